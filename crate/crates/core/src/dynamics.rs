//! Quasi-steady orientation dynamics.
//!
//! At every instant the body moves with the rigid velocity that balances
//! gravity and buoyancy at the current orientation `G`, and gravity turns
//! in the co-moving frame as `dG/dt = G x omega`. Fixed points of this flow
//! are exactly the steady free-fall states, which makes it an independent
//! check of [`crate::freefall`]. Time is measured in the unit implied by the
//! nondimensional resistance tensors; only fixed-point locations are
//! parameterization independent.

use nalgebra::Vector6;

use crate::error::{Error, Result};
use crate::freefall::FreefallInput;
use crate::linalg::skew;
use crate::{Mat3, Mat6, Vec3};

/// Precomputed inverse of the grand resistance matrix for repeated balances.
#[derive(Debug, Clone)]
pub struct QuasiSteady {
    input: FreefallInput,
    solver: Mat6,
}

impl QuasiSteady {
    pub fn new(input: &FreefallInput) -> Result<Self> {
        let a = input.resistance.a();
        let svd = a.svd(true, true);
        let (smin, smax) = (svd.singular_values.min(), svd.singular_values.max());
        let solver = if smin > 1e-12 * smax {
            a.try_inverse().ok_or_else(|| Error::SingularSystem("grand resistance matrix singular".into()))?
        } else if input.resistance.is_rotation_degenerate() && smax > 0.0 {
            // Minimum-norm motion: no spin about torque-free directions.
            svd.pseudo_inverse(1e-10 * smax).map_err(|e| Error::SingularSystem(e.to_string()))?
        } else {
            return Err(Error::SingularSystem("grand resistance matrix singular".into()));
        };
        Ok(Self { input: input.clone(), solver })
    }

    /// `(xi, omega)` solving `A (xi, omega) = (m_e G, -m_c r x G)`.
    pub fn motion(&self, g: &Vec3) -> (Vec3, Vec3) {
        let (f, t) = self.input.load(g);
        let rhs = Vector6::new(f.x, f.y, f.z, t.x, t.y, t.z);
        let z = self.solver * rhs;
        (z.fixed_rows::<3>(0).into(), z.fixed_rows::<3>(3).into())
    }

    /// Linear map `G -> omega(G)`.
    pub fn spin_map(&self) -> Mat3 {
        let mut w = Mat3::zeros();
        for i in 0..3 {
            w.set_column(i, &self.motion(&Vec3::ith(i, 1.0)).1);
        }
        w
    }

    fn rate(&self, g: &Vec3) -> Vec3 {
        g.cross(&self.motion(g).1)
    }
}

pub fn instantaneous_motion(input: &FreefallInput, g: &Vec3) -> Result<(Vec3, Vec3)> {
    if g.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("orientation is not finite".into()));
    }
    Ok(QuasiSteady::new(input)?.motion(g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrientationTrajectory {
    pub times: Vec<f64>,
    pub g: Vec<Vec3>,
    pub xi: Vec<Vec3>,
    pub omega: Vec<Vec3>,
    /// `max_t ||G(t)| - 1|` of the stored (renormalized) orientations.
    pub norm_drift: f64,
    /// Largest `||G| - 1|` produced by a single step before renormalization.
    pub step_drift: f64,
    /// `|G x omega|` at the final time.
    pub terminal_residual: f64,
}

/// Classical fourth-order Runge-Kutta for `dG/dt = G x omega(G)`, with `G`
/// renormalized after every step.
pub fn integrate_orientation(input: &FreefallInput, g0: &Vec3, dt: f64, t_end: f64) -> Result<OrientationTrajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("end time must be non-negative, got {t_end}")));
    }
    if !((g0.norm() - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidArgument(format!("initial orientation must be a unit vector, |G0| = {}", g0.norm())));
    }
    let qs = QuasiSteady::new(input)?;
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;

    let mut g = g0.normalize();
    let mut out = OrientationTrajectory {
        times: Vec::with_capacity(steps + 1),
        g: Vec::with_capacity(steps + 1),
        xi: Vec::with_capacity(steps + 1),
        omega: Vec::with_capacity(steps + 1),
        norm_drift: 0.0,
        step_drift: 0.0,
        terminal_residual: 0.0,
    };
    let record = |out: &mut OrientationTrajectory, t: f64, g: Vec3| {
        let (xi, omega) = qs.motion(&g);
        out.norm_drift = out.norm_drift.max((g.norm() - 1.0).abs());
        out.times.push(t);
        out.g.push(g);
        out.xi.push(xi);
        out.omega.push(omega);
    };
    record(&mut out, 0.0, g);
    for n in 0..steps {
        let k1 = qs.rate(&g);
        let k2 = qs.rate(&(g + k1 * (0.5 * dt)));
        let k3 = qs.rate(&(g + k2 * (0.5 * dt)));
        let k4 = qs.rate(&(g + k3 * dt));
        let next = g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        out.step_drift = out.step_drift.max((next.norm() - 1.0).abs());
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::SingularSystem(format!("orientation blew up at step {n}")));
        }
        g = next.normalize();
        record(&mut out, (n + 1) as f64 * dt, g);
    }
    let last = out.g.len() - 1;
    out.terminal_residual = out.g[last].cross(&out.omega[last]).norm();
    Ok(out)
}

/// Quasi-uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub g: Vec3,
    /// `|G x omega(G)|`.
    pub residual: f64,
    /// Growth of a 1e-3 tangent perturbation over a short quasi-steady run;
    /// below 1 suggests an attracting orientation. Empirical only.
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
    /// `omega x G` vanishes on the whole grid.
    pub all_orientations: bool,
    /// No polished point met the tolerance, although one must exist.
    pub tolerance_failure: bool,
    pub tolerance: f64,
}

const NEIGHBOURS: usize = 8;

/// Grid search for orientations with `G x omega(G) = 0`, polished by
/// Gauss-Newton iteration on the sphere.
pub fn find_fixed_points(input: &FreefallInput, grid_resolution: usize) -> Result<FixedPointSet> {
    if grid_resolution < NEIGHBOURS + 1 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least {} points, got {grid_resolution}",
            NEIGHBOURS + 1
        )));
    }
    let qs = QuasiSteady::new(input)?;
    let w = qs.spin_map();
    let tolerance = 1e-8 * (input.m_e + input.m_c * input.r.norm());
    let residual = |g: &Vec3| g.cross(&(w * g)).norm();

    let grid = fibonacci_sphere(grid_resolution);
    let values: Vec<f64> = grid.iter().map(residual).collect();
    if values.iter().all(|v| *v <= tolerance) {
        let points = (0..3)
            .flat_map(|i| [Vec3::ith(i, 1.0), Vec3::ith(i, -1.0)])
            .map(|g| FixedPoint { g, residual: residual(&g), growth: 1.0 })
            .collect();
        return Ok(FixedPointSet { points, all_orientations: true, tolerance_failure: false, tolerance });
    }

    let mut points: Vec<FixedPoint> = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        let mut dist: Vec<(f64, usize)> =
            grid.iter().enumerate().filter(|(j, _)| *j != i).map(|(j, q)| ((p - q).norm_squared(), j)).collect();
        dist.select_nth_unstable_by(NEIGHBOURS - 1, |a, b| a.0.total_cmp(&b.0));
        if dist[..NEIGHBOURS].iter().any(|(_, j)| values[*j] < values[i]) {
            continue;
        }
        let g = polish(&w, *p);
        let r = residual(&g);
        if r > tolerance {
            continue;
        }
        match points.iter_mut().find(|fp| (fp.g - g).norm() < 1e-6) {
            Some(fp) if fp.residual > r => {
                fp.g = g;
                fp.residual = r;
            }
            Some(_) => {}
            None => points.push(FixedPoint { g, residual: r, growth: f64::NAN }),
        }
    }
    for fp in &mut points {
        fp.growth = perturbation_growth(&qs, &w, &fp.g);
    }
    let tolerance_failure = points.is_empty();
    Ok(FixedPointSet { points, all_orientations: false, tolerance_failure, tolerance })
}

fn tangent_basis(g: &Vec3) -> (Vec3, Vec3) {
    let helper = if g.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = g.cross(&helper).normalize();
    (u, g.cross(&u))
}

fn polish(w: &Mat3, start: Vec3) -> Vec3 {
    let mut g = start.normalize();
    let scale = w.norm().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let wg = w * g;
        let r = g.cross(&wg);
        if r.norm() <= 1e-15 * scale {
            break;
        }
        let (u, v) = tangent_basis(&g);
        // d/dG (G x W G) = -[W G]x + [G]x W
        let jac = skew(&g) * w - skew(&wg);
        let (ju, jv) = (jac * u, jac * v);
        let m = nalgebra::Matrix2::new(ju.dot(&ju), ju.dot(&jv), jv.dot(&ju), jv.dot(&jv));
        let rhs = nalgebra::Vector2::new(-ju.dot(&r), -jv.dot(&r));
        let Some(step) = m.lu().solve(&rhs) else { break };
        let next = (g + u * step.x + v * step.y).normalize();
        let done = (next - g).norm() < 1e-16;
        g = next;
        if done {
            break;
        }
    }
    g
}

fn perturbation_growth(qs: &QuasiSteady, w: &Mat3, g: &Vec3) -> f64 {
    let rate = w.norm();
    if rate == 0.0 {
        return 1.0;
    }
    let (dt, steps) = (0.02 / rate, 250);
    let (u, v) = tangent_basis(g);
    let mut growth: f64 = 0.0;
    for dir in [u, v, -u, -v] {
        let mut x = (g + dir * 1e-3).normalize();
        let d0 = (x - g).norm();
        for _ in 0..steps {
            let k1 = qs.rate(&x);
            let k2 = qs.rate(&(x + k1 * (0.5 * dt)));
            let k3 = qs.rate(&(x + k2 * (0.5 * dt)));
            let k4 = qs.rate(&(x + k3 * dt));
            x = (x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)).normalize();
        }
        growth = growth.max((x - g).norm() / d0);
    }
    growth
}
