use serde::Serialize;

use crate::Failure;

/// Numerical settings shared by every body-level command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub ell: f64,
    /// Nodes per unit length.
    pub resolution: f64,
    /// Largest accepted `|A - A^T| / |A|`.
    pub tol_reciprocity: f64,
    /// `|lambda|` below which a steady state counts as translational;
    /// `None` selects the solver default.
    pub tol_trans: Option<f64>,
    /// Relative tolerance of the symmetry zero patterns.
    pub tol_pattern: f64,
    pub format: Format,
    pub condition_ceiling: f64,
    /// Proceed past the condition ceiling instead of failing.
    pub allow_ill_conditioned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ell: 0.1,
            resolution: 16.0,
            tol_reciprocity: 1e-10,
            tol_trans: None,
            tol_pattern: 1e-8,
            format: Format::Json,
            condition_ceiling: 1e12,
            allow_ill_conditioned: false,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::validation("invalid-argument", format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        positive("ell", self.ell)?;
        positive("resolution", self.resolution)?;
        positive("tol-reciprocity", self.tol_reciprocity)?;
        positive("tol-pattern", self.tol_pattern)?;
        positive("condition ceiling", self.condition_ceiling)?;
        if let Some(t) = self.tol_trans {
            positive("tol-trans", t)?;
        }
        Ok(())
    }
}

/// Dimensional inputs in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Fluid density, kg/m^3.
    pub rho: f64,
    /// Dynamic viscosity, Pa s.
    pub mu: f64,
    /// Gravitational acceleration, m/s^2.
    pub gravity: f64,
    /// Reference length, m.
    pub d: f64,
    /// Effective thickness, m.
    #[serde(rename = "L")]
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nondim {
    /// Velocity scale `rho g d^2 / mu`.
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "Re")]
    pub re: f64,
    pub ell: f64,
    pub warnings: Vec<String>,
}

/// Reynolds number above which the creeping-flow model is questionable.
pub const RE_WARNING: f64 = 0.1;

pub fn nondim(p: &PhysicalParams) -> Result<Nondim, Failure> {
    positive("rho", p.rho)?;
    positive("mu", p.mu)?;
    positive("gravity", p.gravity)?;
    positive("d", p.d)?;
    positive("L", p.thickness)?;
    let w = p.rho * p.gravity * p.d * p.d / p.mu;
    let re = p.rho * p.rho * p.gravity * p.d.powi(3) / (p.mu * p.mu);
    let ell = p.thickness / p.d;
    let mut warnings = Vec::new();
    if re > RE_WARNING {
        warnings.push(format!("Reynolds number {re} is not small; the low-Reynolds model may not apply"));
    }
    if p.thickness > p.d {
        warnings.push(format!("effective thickness L = {} exceeds the reference length d = {}", p.thickness, p.d));
    }
    Ok(Nondim { w, re, ell, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn water_like_example() {
        let p = PhysicalParams { rho: 1000.0, mu: 1.0, gravity: 9.81, d: 0.01, thickness: 0.001 };
        let n = nondim(&p).unwrap();
        assert!(rel(n.w, 0.981) < 1e-14);
        assert!(rel(n.re, 9.81) < 1e-14);
        assert!(rel(n.ell, 0.1) < 1e-14);
        assert_eq!(n.warnings.len(), 1);
        assert!(n.warnings[0].contains("Reynolds"));
    }

    #[test]
    fn viscous_example() {
        let p = PhysicalParams { rho: 1000.0, mu: 10.0, gravity: 9.81, d: 0.001, thickness: 0.0001 };
        let n = nondim(&p).unwrap();
        assert!(rel(n.w, 9.81e-4) < 1e-14);
        assert!(rel(n.re, 9.81e-5) < 1e-14);
        assert!(rel(n.ell, 0.1) < 1e-14);
        assert!(n.warnings.is_empty());
    }

    #[test]
    fn doubling_viscosity() {
        let p = PhysicalParams { rho: 1200.0, mu: 0.3, gravity: 9.81, d: 0.002, thickness: 0.0005 };
        let a = nondim(&p).unwrap();
        let b = nondim(&PhysicalParams { mu: 0.6, ..p }).unwrap();
        assert!(rel(b.re, a.re / 4.0) < 1e-14);
        assert!(rel(b.w, a.w / 2.0) < 1e-14);
    }

    #[test]
    fn thick_body_warns() {
        let p = PhysicalParams { rho: 1.0, mu: 1.0, gravity: 1.0, d: 0.01, thickness: 0.02 };
        let n = nondim(&p).unwrap();
        assert!(n.warnings.iter().any(|w| w.contains("exceeds")));
    }

    #[test]
    fn rejects_non_positive() {
        let p = PhysicalParams { rho: 1.0, mu: 0.0, gravity: 1.0, d: 1.0, thickness: 0.1 };
        let err = nondim(&p).unwrap_err();
        assert_eq!(err.code, 2);
        let p = PhysicalParams { rho: f64::NAN, ..p };
        assert!(nondim(&p).is_err());
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig { ell: -1.0, ..RunConfig::default() };
        assert_eq!(bad.validate().unwrap_err().kind, "invalid-argument");
        let bad = RunConfig { tol_trans: Some(0.0), ..RunConfig::default() };
        assert!(bad.validate().is_err());
    }
}
