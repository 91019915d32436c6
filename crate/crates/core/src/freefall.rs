//! Steady free fall.
//!
//! A steady fall has spin `omega = lambda g` about the gravity direction and
//! solves the force and torque balance
//!
//! ```text
//! K xi + lambda S g = m_e g
//! C xi + lambda B g = -m_c r x g
//! ```
//!
//! Eliminating `xi = K^{-1}(m_e g - lambda S g)` leaves the eigenproblem
//! `F g = lambda g` with `F = (C K^{-1} S - B)^{-1} (m_e C K^{-1} + m_c [r]x)`.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::geometry::MassProperties;
use crate::linalg::{pinv3, singular_range, skew};
use crate::mobility::ResistanceSet;
use crate::{Mat3, Vec3};

/// Relative threshold below which a 3x3 block counts as singular.
const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FreefallInput {
    pub resistance: ResistanceSet,
    pub m_e: f64,
    pub m_c: f64,
    /// Centroid minus center of mass.
    pub r: Vec3,
}

impl FreefallInput {
    pub fn new(resistance: ResistanceSet, m_e: f64, m_c: f64, r: Vec3) -> Result<Self> {
        if !(m_e.is_finite() && m_e >= 0.0) {
            return Err(Error::InvalidArgument(format!("effective mass must be non-negative, got {m_e}")));
        }
        if !(m_c.is_finite() && m_c >= 0.0) {
            return Err(Error::InvalidArgument(format!("complementary mass must be non-negative, got {m_c}")));
        }
        if r.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("centroid offset is not finite".into()));
        }
        Ok(Self { resistance, m_e, m_c, r })
    }

    pub fn from_mass(resistance: ResistanceSet, mass: &MassProperties) -> Result<Self> {
        Self::new(resistance, mass.m_e, mass.m_c, mass.r)
    }

    /// Residual scale `m_e + m_c |r| + 1`.
    pub fn scale(&self) -> f64 {
        self.m_e + self.m_c * self.r.norm() + 1.0
    }

    /// Right-hand side `(m_e G, -m_c r x G)` of the balance at orientation `G`.
    pub fn load(&self, g: &Vec3) -> (Vec3, Vec3) {
        (g * self.m_e, -self.r.cross(g) * self.m_c)
    }

    pub(crate) fn k_inverse(&self) -> Result<Mat3> {
        let k = &self.resistance.k;
        let (smin, smax) = singular_range(k);
        if !(smin > SINGULAR_RTOL * smax) {
            return Err(Error::SingularSystem(
                "translation tensor singular (contradicts positive definiteness; check the discretization)".into(),
            ));
        }
        k.try_inverse().ok_or_else(|| Error::SingularSystem("translation tensor singular".into()))
    }
}

/// The 3x3 matrix whose real eigenpairs are the steady states.
pub fn build_f(input: &FreefallInput) -> Result<Mat3> {
    Ok(build_f_parts(input)?.0)
}

/// Returns `F` together with a reference magnitude: the size `F` would have
/// if the coupling tensor were as large as the whole grand matrix.
fn build_f_parts(input: &FreefallInput) -> Result<(Mat3, f64)> {
    let res = &input.resistance;
    let k_inv = input.k_inverse()?;
    let schur = res.c * k_inv * res.s - res.b;
    let (smin, smax) = singular_range(&schur);
    let scale = res.a().norm();
    let schur_inv = if smin > SINGULAR_RTOL * scale.max(smax) {
        schur.try_inverse().ok_or_else(|| Error::SingularSystem("grand resistance matrix singular".into()))?
    } else if res.is_rotation_degenerate() {
        // Spin about a torque-free direction is undetermined; take the
        // minimum-norm rotation.
        pinv3(&schur, 1e-10 * scale.max(smax) / smax.max(f64::MIN_POSITIVE))
    } else {
        return Err(Error::SingularSystem("grand resistance matrix singular".into()));
    };
    let load = res.c * k_inv * input.m_e + skew(&input.r) * input.m_c;
    let f = schur_inv * load;
    let reference = schur_inv.norm() * (input.m_e * k_inv.norm() * scale + input.m_c * input.r.norm());
    Ok((f, reference))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionClass {
    Translational,
    Screw,
}

impl MotionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MotionClass::Translational => "translational",
            MotionClass::Screw => "screw",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub lambda: f64,
    /// Unit gravity direction in the co-moving frame.
    pub g: Vec3,
    pub xi: Vec3,
    pub omega: Vec3,
    /// Force- and torque-balance residual norms.
    pub residuals: (f64, f64),
    pub class: MotionClass,
    /// Algebraic multiplicity of `lambda` as an eigenvalue of `F`.
    pub multiplicity: usize,
    /// False when a residual exceeds `1e-8 * (m_e + m_c |r| + 1)`.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreefallSolution {
    pub f: Mat3,
    pub states: Vec<SteadyState>,
    /// Eigenvalues of `F` off the real axis; they yield no states.
    pub complex_eigenvalues: Vec<Complex<f64>>,
    /// `F` vanishes: every orientation is a translational steady state.
    pub all_orientations: bool,
}

/// Force- and torque-balance residuals of a candidate state.
pub fn verify(state: &SteadyState, input: &FreefallInput) -> (f64, f64) {
    residuals(input, state.lambda, &state.g, &state.xi)
}

fn residuals(input: &FreefallInput, lambda: f64, g: &Vec3, xi: &Vec3) -> (f64, f64) {
    let res = &input.resistance;
    let first = res.k * xi + res.s * g * lambda - g * input.m_e;
    let second = res.c * xi + res.b * g * lambda + input.r.cross(g) * input.m_c;
    (first.norm(), second.norm())
}

/// Every real eigenpair of `F` as a pair of states `(lambda, +-g)`.
/// `tol_trans` classifies `|lambda| <= tol_trans` as translational; the default
/// is `1e-8 |F|`.
pub fn steady_states(input: &FreefallInput, tol_trans: Option<f64>) -> Result<FreefallSolution> {
    let (f, reference) = build_f_parts(input)?;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("F has non-finite entries".into()));
    }
    let norm_f = f.norm();
    let zero_tol = 1e-10 * reference;
    let tol_trans = tol_trans.unwrap_or(1e-8 * norm_f).max(zero_tol);
    let k_inv = input.k_inverse()?;

    let make = |lambda: f64, g: Vec3, multiplicity: usize| -> SteadyState {
        let xi = k_inv * (g * input.m_e - input.resistance.s * g * lambda);
        let residuals = residuals(input, lambda, &g, &xi);
        let limit = 1e-8 * input.scale();
        SteadyState {
            lambda,
            g,
            xi,
            omega: g * lambda,
            residuals,
            class: if lambda.abs() <= tol_trans { MotionClass::Translational } else { MotionClass::Screw },
            multiplicity,
            consistent: residuals.0 <= limit && residuals.1 <= limit,
        }
    };
    let push_pair = |states: &mut Vec<SteadyState>, lambda: f64, g: Vec3, mult: usize| {
        let g = canonical_sign(g.normalize());
        states.push(make(lambda, g, mult));
        states.push(make(lambda, -g, mult));
    };

    let mut states = Vec::new();
    if norm_f <= zero_tol {
        for i in 0..3 {
            push_pair(&mut states, 0.0, Vec3::ith(i, 1.0), 3);
        }
        return Ok(FreefallSolution { f, states, complex_eigenvalues: vec![], all_orientations: true });
    }

    let eig = f.complex_eigenvalues();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("eigenvalues of F are not finite".into()));
    }
    let im_tol = 1e-10 * norm_f;
    let mut real: Vec<f64> = eig.iter().filter(|z| z.im.abs() <= im_tol).map(|z| z.re).collect();
    let complex_eigenvalues: Vec<Complex<f64>> = eig.iter().filter(|z| z.im.abs() > im_tol).copied().collect();
    if real.is_empty() {
        // A real 3x3 matrix always has a real eigenvalue; take the one least off the axis.
        let z = eig.iter().min_by(|a, b| a.im.abs().total_cmp(&b.im.abs())).unwrap();
        real.push(z.re);
    }
    real.sort_by(f64::total_cmp);

    let cluster_tol = 1e-8 * norm_f;
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for v in real {
        match clusters.last_mut() {
            Some(c) if (v - c[c.len() - 1]).abs() <= cluster_tol => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }

    for cluster in clusters {
        let mult = cluster.len();
        let lambda0 = cluster.iter().sum::<f64>() / mult as f64;
        let shifted = f - Mat3::identity() * lambda0;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::Eigen("SVD failed".into()))?;
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let null_tol = 1e-8 * norm_f;
        let nullity = order.iter().filter(|&&i| svd.singular_values[i] <= null_tol).count().clamp(1, mult.max(1));
        if nullity == 3 {
            for i in 0..3 {
                push_pair(&mut states, lambda0, Vec3::ith(i, 1.0), mult);
            }
            continue;
        }
        for &i in order.iter().take(nullity) {
            let g: Vec3 = v_t.row(i).transpose().normalize();
            // Rayleigh quotient of the computed eigenvector.
            let lambda = g.dot(&(f * g));
            push_pair(&mut states, lambda, g, mult);
        }
    }
    Ok(FreefallSolution { f, states, complex_eigenvalues, all_orientations: false })
}

/// Flip `g` so that its largest component is positive.
fn canonical_sign(g: Vec3) -> Vec3 {
    if g[g.iamax()] < 0.0 {
        -g
    } else {
        g
    }
}

/// Angle in degrees, in `[0, 90]`, between the gravity direction and a body axis.
pub fn tilt_angle(state: &SteadyState, body_axis: &Vec3) -> Result<f64> {
    let n = body_axis.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidArgument("body axis must be a non-zero vector".into()));
    }
    let c = (state.g.dot(body_axis) / (n * state.g.norm())).abs().min(1.0);
    Ok(c.acos().to_degrees())
}
