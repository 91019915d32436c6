//! Symmetry checks on bodies and on their resistance tensors.
//!
//! A body invariant under an orthogonal `Q` has
//! `K = Q^T K Q`, `B = Q^T B Q`, `C = det(Q) Q^T C Q`. Mirror planes and
//! three-fold (or higher) axes force the zero patterns checked below.

use crate::error::{Error, Result};
use crate::geometry::DiscretizedBody;
use crate::linalg::require_orthogonal;
use crate::mobility::ResistanceSet;
use crate::{Mat3, Vec3};

/// Relative node-matching error below which a body counts as invariant.
pub const INVARIANCE_RTOL: f64 = 1e-9;

/// Symmetric Hausdorff distance between the weighted node set and its image
/// under `Q`. Nodes only match nodes of equal density.
pub fn check_geometric_invariance(dbody: &DiscretizedBody, q: &Mat3) -> Result<f64> {
    require_orthogonal(q)?;
    let nodes = dbody.nodes();
    let rho = dbody.densities();
    let rho_tol = 1e-12 * rho.iter().copied().fold(0.0, f64::max);
    let images: Vec<Vec3> = nodes.iter().map(|x| q * x).collect();
    let directed = |from: &[Vec3], to: &[Vec3]| {
        from.iter()
            .zip(rho)
            .map(|(p, rp)| {
                to.iter()
                    .zip(rho)
                    .filter(|(_, rq)| (*rp - **rq).abs() <= rho_tol)
                    .map(|(x, _)| (p - x).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&images, nodes).max(directed(nodes, &images)))
}

pub fn is_invariant(dbody: &DiscretizedBody, q: &Mat3) -> Result<bool> {
    Ok(check_geometric_invariance(dbody, q)? < INVARIANCE_RTOL * dbody.diameter())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformResiduals {
    pub k: f64,
    pub b: f64,
    pub c: f64,
}

impl TransformResiduals {
    pub fn max(&self) -> f64 {
        self.k.max(self.b).max(self.c)
    }
}

/// Relative defects of the invariance law for `Q`. The coupling residual is
/// normalized by `max(|C|, |K|)` so that `C ~ 0` does not produce 0/0.
pub fn check_transform_law(r: &ResistanceSet, q: &Mat3) -> Result<TransformResiduals> {
    require_orthogonal(q)?;
    let det = q.determinant().signum();
    let qt = q.transpose();
    let rel = |m: &Mat3, scale: f64| if scale == 0.0 { 0.0 } else { m.norm() / scale };
    Ok(TransformResiduals {
        k: rel(&(r.k - qt * r.k * q), r.k.norm()),
        b: rel(&(r.b - qt * r.b * q), r.b.norm()),
        c: rel(&(r.c - qt * r.c * q * det), r.c.norm().max(r.k.norm())),
    })
}

fn axis_index(axis: usize) -> Result<usize> {
    if (1..=3).contains(&axis) {
        Ok(axis - 1)
    } else {
        Err(Error::InvalidArgument(format!("axis must be 1, 2 or 3, got {axis}")))
    }
}

/// Index map sending the axis-1 statements to axis `a` by cyclic permutation.
fn cyclic(a: usize) -> impl Fn(usize) -> usize {
    move |i| (i + a) % 3
}

/// Mirror plane normal to `normal_axis` (1-based): `K` and `B` decouple the
/// normal direction, and `C` vanishes except in the normal row and column
/// off the diagonal.
pub fn check_plane_pattern(r: &ResistanceSet, normal_axis: usize, tol: f64) -> Result<bool> {
    let p = cyclic(axis_index(normal_axis)?);
    let limit = tol * r.a().norm();
    let small = |m: &Mat3, i: usize, j: usize| m[(p(i), p(j))].abs() <= limit;
    let kb_zero = [(0, 1), (0, 2), (1, 0), (2, 0)];
    let c_zero = [(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)];
    Ok(kb_zero.iter().all(|&(i, j)| small(&r.k, i, j) && small(&r.b, i, j))
        && c_zero.iter().all(|&(i, j)| small(&r.c, i, j)))
}

/// Three-fold (or higher) axis: `K`, `B` diagonal with equal transverse
/// entries; `C` block-diagonal with an antisymmetric transverse off-diagonal pair.
pub fn check_helicoidal_pattern(r: &ResistanceSet, axis: usize, tol: f64) -> Result<bool> {
    let p = cyclic(axis_index(axis)?);
    let limit = tol * r.a().norm();
    let at = |m: &Mat3, i: usize, j: usize| m[(p(i), p(j))];
    let diagonal = |m: &Mat3| {
        (0..3).all(|i| (0..3).all(|j| i == j || at(m, i, j).abs() <= limit))
            && (at(m, 1, 1) - at(m, 2, 2)).abs() <= limit
    };
    let c_zero = [(0, 1), (0, 2), (1, 0), (2, 0)];
    Ok(diagonal(&r.k)
        && diagonal(&r.b)
        && c_zero.iter().all(|&(i, j)| at(&r.c, i, j).abs() <= limit)
        && (at(&r.c, 1, 2) + at(&r.c, 2, 1)).abs() <= limit)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationalOrientation {
    /// Unit gravity direction of a purely translational fall.
    pub g: Vec3,
    /// Null direction of `C` with `g = K u0 / |K u0|`.
    pub u0: Vec3,
    /// Number of singular values of `C` below the threshold.
    pub nullity: usize,
    pub sigma_min: f64,
}

/// Orientation giving a purely translational fall of a homogeneous body:
/// `g` parallel to `K u0` with `C u0 = 0`.
pub fn translational_orientation_plane(r: &ResistanceSet, tol: f64) -> Result<TranslationalOrientation> {
    let threshold = tol * r.a().norm();
    let svd = r.c.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Eigen("SVD of C failed".into()))?;
    let sv = svd.singular_values;
    let imin = sv.imin();
    let sigma_min = sv[imin];
    if sigma_min > threshold {
        return Err(Error::NoTranslationalOrientation { sigma_min, threshold });
    }
    let nullity = sv.iter().filter(|s| **s <= threshold).count();
    let u0: Vec3 = if nullity == 3 { Vec3::x() } else { v_t.row(imin).transpose().normalize() };
    let ku = r.k * u0;
    let g = if nullity == 3 { Vec3::x() } else { ku.normalize() };
    let g = if g[g.iamax()] < 0.0 { -g } else { g };
    Ok(TranslationalOrientation { g, u0, nullity, sigma_min })
}

/// Everything the symmetry checks report for one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub transform: Mat3,
    pub det: f64,
    pub node_matching_error: f64,
    pub geometrically_invariant: bool,
    pub residuals: TransformResiduals,
    pub plane: Option<(usize, bool)>,
    pub helicoidal: Option<(usize, bool)>,
    /// `|C| / |K|`; below the pattern tolerance for fore-aft symmetric bodies.
    pub coupling_ratio: f64,
    pub translational: Option<TranslationalOrientation>,
}

pub fn report(
    dbody: &DiscretizedBody,
    r: &ResistanceSet,
    q: &Mat3,
    plane_axis: Option<usize>,
    heli_axis: Option<usize>,
    tol: f64,
) -> Result<SymmetryReport> {
    let err = check_geometric_invariance(dbody, q)?;
    let plane = plane_axis.map(|a| check_plane_pattern(r, a, tol).map(|ok| (a, ok))).transpose()?;
    let helicoidal = heli_axis.map(|a| check_helicoidal_pattern(r, a, tol).map(|ok| (a, ok))).transpose()?;
    Ok(SymmetryReport {
        transform: *q,
        det: q.determinant(),
        node_matching_error: err,
        geometrically_invariant: err < INVARIANCE_RTOL * dbody.diameter(),
        residuals: check_transform_law(r, q)?,
        plane,
        helicoidal,
        coupling_ratio: r.c.norm() / r.k.norm(),
        translational: translational_orientation_plane(r, tol).ok(),
    })
}

/// Rotation by `theta` about coordinate axis `axis` (1-based).
pub fn axis_rotation(axis: usize, theta: f64) -> Result<Mat3> {
    let a = axis_index(axis)?;
    let (s, c) = theta.sin_cos();
    let (i, j) = ((a + 1) % 3, (a + 2) % 3);
    let mut q = Mat3::identity();
    q[(i, i)] = c;
    q[(j, j)] = c;
    q[(i, j)] = -s;
    q[(j, i)] = s;
    Ok(q)
}

/// Reflection through the plane normal to coordinate axis `axis` (1-based).
pub fn reflection(axis: usize) -> Result<Mat3> {
    let a = axis_index(axis)?;
    let mut q = Mat3::identity();
    q[(a, a)] = -1.0;
    Ok(q)
}
