//! Small dense helpers shared by the solver modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};

/// Skew matrix `[v]x` with `[v]x w = v x w`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Largest entrywise deviation of `Q^T Q` from the identity.
pub fn orthogonality_defect(q: &Mat3) -> f64 {
    (q.transpose() * q - Mat3::identity()).amax()
}

pub fn require_orthogonal(q: &Mat3) -> Result<()> {
    if !q.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("transform has non-finite entries".into()));
    }
    let defect = orthogonality_defect(q);
    if defect > 1e-12 {
        return Err(Error::InvalidArgument(format!("transform is not orthogonal (|Q^T Q - I| = {defect:e})")));
    }
    Ok(())
}

/// Moore-Penrose pseudo-inverse of a 3x3 matrix, dropping singular values
/// below `rel_tol * sigma_max`.
pub fn pinv3(m: &Mat3, rel_tol: f64) -> Mat3 {
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut out = Mat3::zeros();
    for i in 0..3 {
        let s = svd.singular_values[i];
        if s > rel_tol * smax && s > 0.0 {
            out += vt.row(i).transpose() * u.column(i).transpose() / s;
        }
    }
    out
}

/// Smallest and largest singular value of a 3x3 matrix.
pub fn singular_range(m: &Mat3) -> (f64, f64) {
    let sv = m.singular_values();
    (sv.min(), sv.max())
}

/// Extreme eigenvalues of the symmetric part of a square matrix.
pub fn symmetric_eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues.min(), eig.eigenvalues.max())
}
