//! Hyperviscous Green's function, Stokeslet and Oseen tensor.
//!
//! With `s = |x|/ell` and `e = exp(-s)` the Oseen tensor is
//!
//! ```text
//! Z(x) = D(s) I / (8 pi |x|) + P(s) x x^T / (8 pi |x|^3)
//! D(s) = 1 - 2e - 2e/s + 2(1 - e)/s^2
//! P(s) = 1 + 2e + 6e/s - 6(1 - e)/s^2
//! ```
//!
//! Both brackets cancel catastrophically as `s -> 0` (`D ~ 4s/3`,
//! `P ~ s^2/4`), so below `series_threshold` they are summed from their
//! Taylor series. The kernel is bounded: `Z(0) = I / (6 pi ell)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};

/// Default switch point between the Taylor and closed-form branches.
pub const DEFAULT_SERIES_THRESHOLD: f64 = 0.5;
/// Default number of Taylor terms per bracket.
pub const DEFAULT_SERIES_TERMS: usize = 30;

/// Evaluation context for the hyperviscous kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperKernel {
    ell: f64,
    series_threshold: f64,
    series_terms: usize,
}

impl HyperKernel {
    pub fn new(ell: f64) -> Result<Self> {
        Self::with_series(ell, DEFAULT_SERIES_THRESHOLD, DEFAULT_SERIES_TERMS)
    }

    pub fn with_series(ell: f64, series_threshold: f64, series_terms: usize) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidArgument(format!("ell must be positive and finite, got {ell}")));
        }
        if !(series_threshold > 0.0 && series_threshold <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "series threshold must lie in (0, 0.5], got {series_threshold}"
            )));
        }
        if series_terms < 10 {
            return Err(Error::InvalidArgument(format!("at least 10 series terms are required, got {series_terms}")));
        }
        Ok(Self { ell, series_threshold, series_terms })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn series_threshold(&self) -> f64 {
        self.series_threshold
    }

    pub fn series_terms(&self) -> usize {
        self.series_terms
    }

    /// `(1 - e^{-s})/s`, the shape factor of the scalar Green's function.
    pub fn green_factor(&self, s: f64) -> f64 {
        if s < self.series_threshold {
            green_factor_series(s, self.series_terms)
        } else {
            green_factor_closed(s)
        }
    }

    /// Diagonal bracket `D(s)`.
    pub fn diag_bracket(&self, s: f64) -> f64 {
        if s < self.series_threshold {
            s * diag_over_s_series(s, self.series_terms)
        } else {
            diag_bracket_closed(s)
        }
    }

    /// Dyadic bracket `P(s)`.
    pub fn dyad_bracket(&self, s: f64) -> f64 {
        if s < self.series_threshold {
            s * dyad_over_s_series(s, self.series_terms)
        } else {
            dyad_bracket_closed(s)
        }
    }

    fn brackets_over_s(&self, s: f64) -> (f64, f64) {
        if s < self.series_threshold {
            (diag_over_s_series(s, self.series_terms), dyad_over_s_series(s, self.series_terms))
        } else {
            (diag_bracket_closed(s) / s, dyad_bracket_closed(s) / s)
        }
    }
}

fn check_finite(x: &Vec3) -> Result<()> {
    if x.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite displacement {:?}", x.as_slice())))
    }
}

/// Hyperviscous Green's function `(1 - exp(-|x|/ell)) / (4 pi |x|)`.
pub fn green_scalar(x: &Vec3, k: &HyperKernel) -> Result<f64> {
    check_finite(x)?;
    let s = x.norm() / k.ell;
    Ok(k.green_factor(s) / (4.0 * PI * k.ell))
}

/// Laplace fundamental solution `1/(4 pi |x|)`.
pub fn green_classical(x: &Vec3) -> Result<f64> {
    check_finite(x)?;
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Singularity("classical Green's function at x = 0".into()));
    }
    Ok(1.0 / (4.0 * PI * r))
}

/// Hyperviscous Oseen tensor `Z(x)`, with `Z(0) = I/(6 pi ell)`.
pub fn oseen_tensor(x: &Vec3, k: &HyperKernel) -> Result<Mat3> {
    check_finite(x)?;
    Ok(oseen_unchecked(x, k))
}

/// Same as [`oseen_tensor`] without the finiteness check; used in assembly loops.
pub(crate) fn oseen_unchecked(x: &Vec3, k: &HyperKernel) -> Mat3 {
    let r = x.norm();
    let pref = 1.0 / (8.0 * PI * k.ell);
    if r == 0.0 {
        return Mat3::identity() * (4.0 / 3.0 * pref);
    }
    let (d, p) = k.brackets_over_s(r / k.ell);
    let xh = x / r;
    let mut z = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let dyad = p * (xh[i] * xh[j]);
            z[(i, j)] = pref * if i == j { d + dyad } else { dyad };
        }
    }
    z
}

/// Stokeslet velocity `Z(x) h`.
pub fn stokeslet_velocity(x: &Vec3, h: &Vec3, k: &HyperKernel) -> Result<Vec3> {
    check_finite(h)?;
    Ok(oseen_tensor(x, k)? * h)
}

/// Stokeslet pressure `(h . x)/(4 pi |x|^3)`; identical to the classical one.
pub fn stokeslet_pressure(x: &Vec3, h: &Vec3) -> Result<f64> {
    check_finite(x)?;
    check_finite(h)?;
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Singularity("Stokeslet pressure at x = 0".into()));
    }
    Ok(h.dot(x) / (4.0 * PI * r * r * r))
}

/// Classical Oseen tensor `(I + x^ x^T)/(8 pi |x|)`.
pub fn classical_oseen(x: &Vec3) -> Result<Mat3> {
    check_finite(x)?;
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Singularity("classical Oseen tensor at x = 0".into()));
    }
    let xh = x / r;
    Ok((Mat3::identity() + xh * xh.transpose()) / (8.0 * PI * r))
}

fn green_factor_closed(s: f64) -> f64 {
    -(-s).exp_m1() / s
}

fn diag_bracket_closed(s: f64) -> f64 {
    let e = (-s).exp();
    1.0 - 2.0 * e - 2.0 * e / s - 2.0 * (-s).exp_m1() / (s * s)
}

fn dyad_bracket_closed(s: f64) -> f64 {
    let e = (-s).exp();
    1.0 + 2.0 * e + 6.0 * e / s + 6.0 * (-s).exp_m1() / (s * s)
}

// Series coefficients:
//   (1 - e^{-s})/s = sum_{k>=0} (-1)^k s^k / (k+1)!
//   D(s)           = sum_{k>=1} (-1)^{k+1} 2 [1/k! - 1/(k+1)! + 1/(k+2)!] s^k
//   P(s)           = sum_{k>=2} (-1)^k [2/k! - 6/(k+1)! + 6/(k+2)!] s^k
// The sums are evaluated highest order first.

fn green_factor_series(s: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in (0..terms).rev() {
        let c = sign(k) * inv_factorial(k + 1);
        acc = acc * s + c;
    }
    acc
}

/// `D(s)/s = sum_{k>=1} c_k s^{k-1}`.
fn diag_over_s_series(s: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in (1..=terms).rev() {
        let c = -sign(k) * 2.0 * (inv_factorial(k) - inv_factorial(k + 1) + inv_factorial(k + 2));
        acc = acc * s + c;
    }
    acc
}

/// `P(s)/s = sum_{k>=2} c_k s^{k-1}`.
fn dyad_over_s_series(s: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in (2..=terms + 1).rev() {
        let c = sign(k) * (2.0 * inv_factorial(k) - 6.0 * inv_factorial(k + 1) + 6.0 * inv_factorial(k + 2));
        acc = acc * s + c;
    }
    acc * s
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn inv_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc / i as f64)
}
