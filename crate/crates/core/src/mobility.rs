//! Nyström solver for the first-kind boundary-integral equation
//!
//! ```text
//! sum_l Z(x_k - x_l) w_l f_l = xi + omega x x_k      (every node k)
//! ```
//!
//! and the resistance tensors built from its solutions. The system is solved
//! in the symmetrized form `W^{1/2} M W^{1/2} y = W^{1/2} U`, `f = W^{-1/2} y`,
//! whose matrix is symmetric positive definite for distinct nodes.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::geometry::DiscretizedBody;
use crate::kernel::{oseen_unchecked, HyperKernel};
use crate::{Mat3, Mat6, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Cholesky,
    /// Partial-pivoting LU, used only when the Cholesky factorization fails.
    Lu,
}

impl FactorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactorKind::Cholesky => "cholesky",
            FactorKind::Lu => "lu",
        }
    }
}

#[derive(Debug, Clone)]
enum Factorization {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

/// Assembled and factorized system matrix for one body and one kernel.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    sqrt_w: Vec<f64>,
    kernel: HyperKernel,
    matrix: DMatrix<f64>,
    factor: Factorization,
    condition: f64,
    warnings: Vec<String>,
}

/// Force per unit length exerted by the body on the fluid at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceDensity(Vec<Vec3>);

impl ForceDensity {
    pub fn new(values: Vec<Vec3>) -> Result<Self> {
        if values.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidArgument("force density has non-finite entries".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Vec3::zeros(); n])
    }

    pub fn values(&self) -> &[Vec3] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How the rotational block degenerates for bodies that cannot carry torque
/// about some direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationDegeneracy {
    None,
    /// All nodes on one line: spinning about it moves no node.
    Axis(Vec3),
    /// A single node at the origin supports no torque at all; `B = 0`.
    Point,
}

/// Resistance tensors in the convention
/// `(F, T)_fluid = A (xi, omega)`, `A = [[K, S], [C, B]]`,
/// so the force and torque on the body are `-(K xi + S omega)` and `-(C xi + B omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceSet {
    pub k: Mat3,
    pub s: Mat3,
    pub c: Mat3,
    pub b: Mat3,
    pub nodes: usize,
    pub condition: f64,
    /// `|A - A^T| / |A|` in the Frobenius norm.
    pub asymmetry: f64,
    pub factorization: FactorKind,
    pub degeneracy: RotationDegeneracy,
}

impl ResistanceSet {
    /// Wraps externally supplied tensors (no solver diagnostics).
    pub fn from_blocks(k: Mat3, s: Mat3, c: Mat3, b: Mat3) -> Self {
        let mut out = Self {
            k,
            s,
            c,
            b,
            nodes: 0,
            condition: f64::NAN,
            asymmetry: 0.0,
            factorization: FactorKind::Cholesky,
            degeneracy: RotationDegeneracy::None,
        };
        out.asymmetry = asymmetry(&out.a());
        out
    }

    pub fn a(&self) -> Mat6 {
        let mut a = Mat6::zeros();
        a.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.k);
        a.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.s);
        a.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.c);
        a.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.b);
        a
    }

    pub fn is_rotation_degenerate(&self) -> bool {
        self.degeneracy != RotationDegeneracy::None
    }

    /// Tensors of the same body after the rigid map `x -> Q x`.
    /// Torques are pseudo-vectors, so the coupling blocks pick up `det Q`.
    pub fn transformed(&self, q: &Mat3) -> Self {
        let det = q.determinant().signum();
        let qt = q.transpose();
        Self {
            k: q * self.k * qt,
            s: q * self.s * qt * det,
            c: q * self.c * qt * det,
            b: q * self.b * qt,
            degeneracy: match self.degeneracy {
                RotationDegeneracy::Axis(a) => RotationDegeneracy::Axis(q * a),
                d => d,
            },
            ..self.clone()
        }
    }

    /// `(F, T)` on the fluid for a rigid motion.
    pub fn apply(&self, xi: &Vec3, omega: &Vec3) -> (Vec3, Vec3) {
        (self.k * xi + self.s * omega, self.c * xi + self.b * omega)
    }
}

fn asymmetry(a: &Mat6) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        0.0
    } else {
        (a - a.transpose()).norm() / n
    }
}

/// Rigid boundary data `xi + omega x x_k` at every node.
pub fn rigid_velocity(nodes: &[Vec3], xi: &Vec3, omega: &Vec3) -> Vec<Vec3> {
    nodes.iter().map(|x| xi + omega.cross(x)).collect()
}

/// Builds and factorizes the symmetrized Nyström matrix.
pub fn assemble(dbody: &DiscretizedBody, k: &HyperKernel) -> Result<KernelMatrix> {
    let nodes = dbody.nodes().to_vec();
    let weights = dbody.weights().to_vec();
    let n = nodes.len();
    let tol = 1e-12 * dbody.diameter().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i + 1..n {
            if (nodes[i] - nodes[j]).norm() <= tol {
                return Err(Error::Assembly(format!("nodes {i} and {j} coincide")));
            }
        }
    }
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        for j in i..n {
            let z = oseen_unchecked(&(nodes[i] - nodes[j]), k) * (sqrt_w[i] * sqrt_w[j]);
            m.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(&z);
            if i != j {
                m.fixed_view_mut::<3, 3>(3 * j, 3 * i).copy_from(&z.transpose());
            }
        }
    }

    let mut warnings = Vec::new();
    let factor = match Cholesky::new(m.clone()) {
        Some(ch) => Factorization::Cholesky(ch),
        None => {
            warnings.push(
                "Cholesky factorization failed; falling back to pivoted LU (matrix not positive definite)".to_string(),
            );
            let lu = m.clone().lu();
            if !lu.is_invertible() {
                return Err(Error::SingularSystem("kernel matrix is singular".into()));
            }
            Factorization::Lu(lu)
        }
    };
    let mut km = KernelMatrix { nodes, weights, sqrt_w, kernel: *k, matrix: m, factor, condition: f64::NAN, warnings };
    km.condition = km.estimate_condition();
    if !km.condition.is_finite() {
        return Err(Error::SingularSystem("kernel matrix condition number is not finite".into()));
    }
    Ok(km)
}

impl KernelMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kernel(&self) -> &HyperKernel {
        &self.kernel
    }

    pub fn factorization(&self) -> FactorKind {
        match self.factor {
            Factorization::Cholesky(_) => FactorKind::Cholesky,
            Factorization::Lu(_) => FactorKind::Lu,
        }
    }

    /// 2-norm condition estimate from power and inverse iteration.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn solve_symmetric(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let out = match &self.factor {
            Factorization::Cholesky(ch) => ch.solve(rhs),
            Factorization::Lu(lu) => {
                lu.solve(rhs).ok_or_else(|| Error::SingularSystem("LU back-substitution failed".into()))?
            }
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("solution has non-finite entries".into()));
        }
        Ok(out)
    }

    /// Solves `(M W) f = U` for several right-hand sides at once; column `c`
    /// of `velocities` holds the stacked nodal velocities.
    pub fn solve_many(&self, velocities: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.nodes.len();
        if velocities.nrows() != 3 * n {
            return Err(Error::ShapeMismatch { expected: 3 * n, got: velocities.nrows() });
        }
        let mut rhs = velocities.clone();
        for (i, sw) in self.sqrt_w.iter().enumerate() {
            rhs.rows_mut(3 * i, 3).scale_mut(*sw);
        }
        let mut y = self.solve_symmetric(&rhs)?;
        for (i, sw) in self.sqrt_w.iter().enumerate() {
            y.rows_mut(3 * i, 3).scale_mut(1.0 / sw);
        }
        Ok(y)
    }

    /// Force density for arbitrary nodal velocities.
    pub fn solve_velocity(&self, u: &[Vec3]) -> Result<ForceDensity> {
        if u.len() != self.nodes.len() {
            return Err(Error::ShapeMismatch { expected: self.nodes.len(), got: u.len() });
        }
        let rhs = DMatrix::from_column_slice(3 * u.len(), 1, &stack(u));
        let f = self.solve_many(&rhs)?;
        Ok(ForceDensity(unstack(f.column(0).as_slice())))
    }

    /// Discrete dissipation `sum_k sum_l w_k w_l f_k . Z(x_k - x_l) f_l`.
    pub fn dissipation(&self, f: &ForceDensity) -> Result<f64> {
        if f.len() != self.nodes.len() {
            return Err(Error::ShapeMismatch { expected: self.nodes.len(), got: f.len() });
        }
        let mut y = DVector::from_vec(stack(f.values()));
        for (i, sw) in self.sqrt_w.iter().enumerate() {
            y.rows_mut(3 * i, 3).scale_mut(*sw);
        }
        Ok(y.dot(&(&self.matrix * &y)))
    }

    fn estimate_condition(&self) -> f64 {
        let dim = self.matrix.nrows();
        let start = DVector::from_fn(dim, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
        let iterations = 200;

        let mut v = start.normalize();
        let mut lmax = 0.0;
        for _ in 0..iterations {
            let w = &self.matrix * &v;
            lmax = w.norm();
            if lmax == 0.0 {
                return f64::INFINITY;
            }
            v = w / lmax;
        }

        let mut v = start.normalize();
        let mut inv_max = 0.0;
        for _ in 0..iterations {
            let rhs = DMatrix::from_column_slice(dim, 1, v.as_slice());
            let Ok(w) = self.solve_symmetric(&rhs) else {
                return f64::INFINITY;
            };
            let w = DVector::from_column_slice(w.as_slice());
            inv_max = w.norm();
            v = w / inv_max;
        }
        lmax * inv_max
    }
}

fn stack(v: &[Vec3]) -> Vec<f64> {
    v.iter().flat_map(|x| [x.x, x.y, x.z]).collect()
}

fn unstack(v: &[f64]) -> Vec<Vec3> {
    v.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

/// Force density for the rigid motion `(xi, omega)`.
pub fn solve_rigid(km: &KernelMatrix, xi: &Vec3, omega: &Vec3) -> Result<ForceDensity> {
    km.solve_velocity(&rigid_velocity(&km.nodes, xi, omega))
}

/// Hydrodynamic force and torque (about the center of mass) on the body,
/// the reaction to the force density exerted on the fluid.
pub fn force_torque(f: &ForceDensity, dbody: &DiscretizedBody) -> Result<(Vec3, Vec3)> {
    if f.len() != dbody.len() {
        return Err(Error::ShapeMismatch { expected: dbody.len(), got: f.len() });
    }
    let (mut force, mut torque) = (Vec3::zeros(), Vec3::zeros());
    for ((fk, x), w) in f.values().iter().zip(dbody.nodes()).zip(dbody.weights()) {
        force -= fk * *w;
        torque -= x.cross(fk) * *w;
    }
    Ok((force, torque))
}

/// Weighted pairing `sum_k w_k f_k . U_k`.
pub fn pairing(f: &ForceDensity, u: &[Vec3], weights: &[f64]) -> f64 {
    f.values().iter().zip(u).zip(weights).map(|((fk, uk), w)| w * fk.dot(uk)).sum()
}

/// Velocity induced in the fluid at `x_eval` by the force density.
pub fn disturbance_velocity(x_eval: &Vec3, f: &ForceDensity, dbody: &DiscretizedBody, k: &HyperKernel) -> Result<Vec3> {
    if f.len() != dbody.len() {
        return Err(Error::ShapeMismatch { expected: dbody.len(), got: f.len() });
    }
    if x_eval.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("evaluation point is not finite".into()));
    }
    Ok(f.values()
        .iter()
        .zip(dbody.nodes())
        .zip(dbody.weights())
        .fold(Vec3::zeros(), |acc, ((fk, x), w)| acc + oseen_unchecked(&(x_eval - x), k) * fk * *w))
}

/// Resistance tensors from six solves with unit translations and rotations.
pub fn resistance(dbody: &DiscretizedBody, k: &HyperKernel) -> Result<ResistanceSet> {
    let km = assemble(dbody, k)?;
    resistance_from(&km)
}

/// Same as [`resistance`] on an already assembled matrix.
pub fn resistance_from(km: &KernelMatrix) -> Result<ResistanceSet> {
    let n = km.nodes.len();
    let mut rhs = DMatrix::zeros(3 * n, 6);
    for (i, x) in km.nodes.iter().enumerate() {
        for a in 0..3 {
            let e = Vec3::ith(a, 1.0);
            rhs.fixed_view_mut::<3, 1>(3 * i, a).copy_from(&e);
            rhs.fixed_view_mut::<3, 1>(3 * i, 3 + a).copy_from(&e.cross(x));
        }
    }
    let f = km.solve_many(&rhs)?;
    let mut a = Mat6::zeros();
    for col in 0..6 {
        let (mut force, mut torque) = (Vec3::zeros(), Vec3::zeros());
        for (i, (x, w)) in km.nodes.iter().zip(&km.weights).enumerate() {
            let fk = Vec3::new(f[(3 * i, col)], f[(3 * i + 1, col)], f[(3 * i + 2, col)]);
            force += fk * *w;
            torque += x.cross(&fk) * *w;
        }
        a.fixed_view_mut::<3, 1>(0, col).copy_from(&force);
        a.fixed_view_mut::<3, 1>(3, col).copy_from(&torque);
    }
    let degeneracy = rotation_degeneracy(&km.nodes);
    Ok(ResistanceSet {
        k: a.fixed_view::<3, 3>(0, 0).into(),
        s: a.fixed_view::<3, 3>(0, 3).into(),
        c: a.fixed_view::<3, 3>(3, 0).into(),
        b: a.fixed_view::<3, 3>(3, 3).into(),
        nodes: n,
        condition: km.condition,
        asymmetry: asymmetry(&a),
        factorization: km.factorization(),
        degeneracy,
    })
}

fn rotation_degeneracy(nodes: &[Vec3]) -> RotationDegeneracy {
    let scale = nodes.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if nodes.len() == 1 || scale == 0.0 {
        return RotationDegeneracy::Point;
    }
    let tol = 1e-12 * scale;
    let far = nodes.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let axis = far.normalize();
    if nodes.iter().all(|x| x.cross(&axis).norm() <= tol) {
        RotationDegeneracy::Axis(axis)
    } else {
        RotationDegeneracy::None
    }
}
