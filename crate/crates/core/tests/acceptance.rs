//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report reads top to bottom. The process
//! exits non-zero when a criterion fails, except for criteria listed in
//! `KNOWN_RED` (see the note there), which are still printed as FAIL.

mod support;

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{SymmetricEigen, Vector6};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use slender_core::dynamics::{find_fixed_points, integrate_orientation};
use slender_core::freefall::{steady_states, FreefallInput, MotionClass};
use slender_core::geometry::{self, BodyGeometry, Density, Segment};
use slender_core::kernel::{
    classical_oseen, green_classical, green_scalar, oseen_tensor, stokeslet_pressure, stokeslet_velocity,
};
use slender_core::mobility::{assemble, resistance, resistance_from, solve_rigid};
use slender_core::symmetry::{check_helicoidal_pattern, check_plane_pattern};
use slender_core::HyperKernel;
use support::{bilaplacian, divergence, gradient, laplacian, random_orthogonal, random_unit, richardson4, suite, V};

const ELL: f64 = 0.1;
const RESOLUTIONS: [f64; 2] = [8.0, 16.0];

/// A straight rod cannot resist rotation about its own axis: every node sits
/// on the axis, the boundary velocity of that rotation is zero, so the
/// corresponding row and column of A vanish identically. "min eig(A) > 0 for
/// every suite body" therefore cannot hold for rod(1) and criterion 5 is
/// expected to stay red.
const KNOWN_RED: [u32; 1] = [5];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let k = HyperKernel::new(ELL).unwrap();
    let (mut worst_momentum, mut worst_div) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let s = rng.gen_range(0.5..50.0);
        let x = random_unit(&mut rng) * (s * ELL);
        let h = random_unit(&mut rng);
        let zeta = |y: &V| stokeslet_velocity(y, &h, &k).unwrap();
        let p = |y: &V| stokeslet_pressure(y, &h).unwrap();

        // Balances the h^6 truncation against the eps/h^4 roundoff of the bilaplacian.
        let step = 0.1 * ELL * s.min(1.0);
        let grad_p = richardson4(gradient(&p, &x, step), gradient(&p, &x, step / 2.0));
        let lap = richardson4(laplacian(&zeta, &x, step), laplacian(&zeta, &x, step / 2.0));
        let bilap = richardson4(bilaplacian(&zeta, &x, step), bilaplacian(&zeta, &x, step / 2.0));
        let residual = grad_p - lap + bilap * (ELL * ELL);
        let scale = grad_p.norm() + lap.norm() + ELL * ELL * bilap.norm();
        worst_momentum = worst_momentum.max(residual.norm() / scale);

        let r = x.norm();
        let div = divergence(&zeta, &x, 1e-4 * r);
        worst_div = worst_div.max(div.abs() / (zeta(&x).norm() / r));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_momentum < 1e-4 && worst_div < 1e-6 && secs < 5.0,
        format!("momentum residual {worst_momentum:.2e}, divergence {worst_div:.2e}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let seg = Segment::uniform(vec![V::zeros(), V::new(0.05, 0.0, 0.0)], 1.0).unwrap();
    let point = BodyGeometry::new("point", vec![seg], 0.0).unwrap().discretize(16.0).unwrap();
    let k = HyperKernel::new(ELL).unwrap();
    let r = resistance(&point, &k).unwrap();
    let drag = 6.0 * PI * ELL;
    let k_err = (r.k - support::M::identity() * drag).norm() / (drag * 3f64.sqrt());

    // Three-level Richardson on Z(s e) for s -> 0 along an oblique direction.
    let e = V::new(1.0, -2.0, 0.5).normalize();
    let z = |s: f64| oseen_tensor(&(e * (s * ELL)), &k).unwrap();
    let (a, b, c) = (z(1e-3), z(1e-4), z(1e-5));
    let ab = (b * 10.0 - a) / 9.0;
    let bc = (c * 10.0 - b) / 9.0;
    let z0 = (bc * 100.0 - ab) / 99.0;
    let target = support::M::identity() / (6.0 * PI * ELL);
    let z_err = (z0 - target).norm() / target.norm();
    outcome(
        point.len() == 1 && k_err < 1e-12 && z_err < 1e-10,
        format!("nodes {}, K error {k_err:.2e}, Z(0) error {z_err:.2e}", point.len()),
    )
}

fn criterion_3() -> Outcome {
    let k = HyperKernel::new(1e-6).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = random_unit(&mut rng);
        let g = green_scalar(&x, &k).unwrap();
        worst = worst.max(rel(g, green_classical(&x).unwrap()));
        let z = oseen_tensor(&x, &k).unwrap();
        let z1 = classical_oseen(&x).unwrap();
        worst = worst.max((z - z1).norm() / z1.norm());
    }
    outcome(worst < 1e-6, format!("max relative deviation {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let k = HyperKernel::new(ELL).unwrap();
    let mut worst = 0.0f64;
    let mut largest = 0;
    for body in suite() {
        for res in RESOLUTIONS {
            let d = body.discretize(res).unwrap();
            largest = largest.max(3 * d.len());
            let a = resistance(&d, &k).unwrap().a();
            worst = worst.max((a - a.transpose()).norm() / a.norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-10 && secs < 60.0, format!("max asymmetry {worst:.2e}, largest system {largest}, {secs:.2} s"))
}

fn criterion_5() -> Outcome {
    let k = HyperKernel::new(ELL).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst_energy = 0.0f64;
    let mut not_positive = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for body in suite() {
        for res in RESOLUTIONS {
            let d = body.discretize(res).unwrap();
            let km = assemble(&d, &k).unwrap();
            let r = resistance_from(&km).unwrap();
            let a = r.a();
            let sym = (a + a.transpose()) * 0.5;
            let eig = SymmetricEigen::new(sym);
            let lmin = eig.eigenvalues.min();
            let lmax = eig.eigenvalues.max();
            min_ratio = min_ratio.min(lmin / lmax);
            // Anything within roundoff of zero is not positive.
            if lmin <= 1e-12 * lmax {
                not_positive.push(format!("{}@{res}: {:.1e}", body.name(), lmin / lmax));
            }
            for _ in 0..20 {
                let xi = support::random_vector(&mut rng, 1.0);
                let omega = support::random_vector(&mut rng, 1.0);
                let f = solve_rigid(&km, &xi, &omega).unwrap();
                let energy = km.dissipation(&f).unwrap();
                let v = Vector6::new(xi[0], xi[1], xi[2], omega[0], omega[1], omega[2]);
                let quad = v.dot(&(a * v));
                worst_energy = worst_energy.max(rel(energy, quad));
            }
        }
    }
    let detail = if not_positive.is_empty() {
        format!("min eig/max eig {min_ratio:.2e}, energy identity {worst_energy:.2e}")
    } else {
        format!(
            "non-positive min eigenvalue (relative) for {}; energy identity {worst_energy:.2e}",
            not_positive.join(", ")
        )
    };
    outcome(not_positive.is_empty() && worst_energy < 1e-10, detail)
}

fn criterion_6() -> Outcome {
    let k = HyperKernel::new(ELL).unwrap();
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for body in suite() {
        let base = resistance(&body.discretize(8.0).unwrap(), &k).unwrap();
        for i in 0..10 {
            let q = random_orthogonal(&mut rng, i % 2 == 1);
            let moved = body.transform(&q, &V::zeros()).unwrap();
            let direct = resistance(&moved.discretize(8.0).unwrap(), &k).unwrap();
            let predicted = base.transformed(&q);
            worst = worst.max((direct.a() - predicted.a()).norm() / direct.a().norm());
        }
    }
    outcome(worst < 1e-12, format!("max transport residual {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let k = HyperKernel::new(ELL).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for res in RESOLUTIONS {
        let bent = resistance(&geometry::bent_rod(PI / 2.0, 0.5).unwrap().discretize(res).unwrap(), &k).unwrap();
        let plane = check_plane_pattern(&bent, 2, 1e-8).unwrap();
        let tripod = resistance(&geometry::tripod_tetrahedron(1.0).unwrap().discretize(res).unwrap(), &k).unwrap();
        let heli = check_helicoidal_pattern(&tripod, 1, 1e-8).unwrap();
        ok &= plane && heli;
        let mut ratio = 0.0f64;
        for body in [geometry::rod(1.0).unwrap(), geometry::octahedron_frame(1.0).unwrap()] {
            let r = resistance(&body.discretize(res).unwrap(), &k).unwrap();
            ratio = ratio.max(r.c.norm() / r.k.norm());
        }
        ok &= ratio < 1e-8;
        notes.push(format!("res {res}: plane {plane}, helicoidal {heli}, |C|/|K| {ratio:.1e}"));
    }
    outcome(ok, notes.join("; "))
}

fn input_for(body: &BodyGeometry, res: f64) -> FreefallInput {
    let d = body.discretize(res).unwrap();
    let r = resistance(&d, &HyperKernel::new(ELL).unwrap()).unwrap();
    FreefallInput::from_mass(r, d.mass()).unwrap()
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut worst_residual = 0.0f64;
    for res in RESOLUTIONS {
        for body in [geometry::octahedron_frame(1.0).unwrap(), geometry::rod(1.0).unwrap()] {
            let input = input_for(&body, res);
            let sol = steady_states(&input, None).unwrap();
            let k_inv = input.resistance.k.try_inverse().unwrap();
            let mut worst = 0.0f64;
            for st in &sol.states {
                let expected = k_inv * st.g * input.m_e;
                worst = worst.max((st.xi - expected).norm() / expected.norm());
                ok &= st.lambda.abs() < 1e-10 && st.class == MotionClass::Translational;
            }
            ok &= !sol.states.is_empty() && worst < 1e-10;
            notes.push(format!("{}@{res}: xi error {worst:.1e}", body.name()));
        }
        let bent = geometry::bent_rod(PI / 2.0, 0.5).unwrap();
        let input = input_for(&bent, res);
        let sol = steady_states(&input, None).unwrap();
        let out_of_plane = sol
            .states
            .iter()
            .filter(|s| s.class == MotionClass::Translational)
            .map(|s| s.g[1].abs())
            .fold(f64::INFINITY, f64::min);
        ok &= out_of_plane < 1e-8;
        notes.push(format!("bent_rod@{res}: out-of-plane {out_of_plane:.1e}"));
    }
    for body in suite() {
        for res in RESOLUTIONS {
            let input = input_for(&body, res);
            for st in steady_states(&input, None).unwrap().states {
                worst_residual = worst_residual.max(st.residuals.0.max(st.residuals.1) / input.scale());
            }
        }
    }
    ok &= worst_residual < 1e-8;
    notes.push(format!("max scaled residual {worst_residual:.1e}"));
    outcome(ok, notes.join("; "))
}

/// Bent rod with unequal arm densities.
pub fn bent_variant() -> BodyGeometry {
    let base = geometry::bent_rod(PI / 2.0, 0.5).unwrap();
    let points = base.segments()[0].points().to_vec();
    let seg = Segment::new(points, Density::PerEdge(vec![1.0, 2.0])).unwrap();
    BodyGeometry::new("bent_rod_variant", vec![seg], 0.0).unwrap()
}

/// Tripod with three different leg densities.
pub fn tripod_variant() -> BodyGeometry {
    let base = geometry::tripod_tetrahedron(1.0).unwrap();
    let segments = base
        .segments()
        .iter()
        .zip([1.0, 1.5, 2.0])
        .map(|(s, rho)| Segment::uniform(s.points().to_vec(), rho).unwrap())
        .collect();
    BodyGeometry::new("tripod_variant", segments, 0.0).unwrap()
}

fn with_complementary_mass(body: BodyGeometry) -> BodyGeometry {
    let m = body.mass_properties().unwrap().mass;
    body.with_m_c(0.1 * m).unwrap()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for body in [bent_variant(), tripod_variant()] {
        let body = with_complementary_mass(body);
        let input = input_for(&body, 16.0);
        let sol = steady_states(&input, None).unwrap();
        let fixed = find_fixed_points(&input, 4000).unwrap();
        let distance =
            |g: &V, set: &mut dyn Iterator<Item = V>| set.map(|h| (g - h).norm()).fold(f64::INFINITY, f64::min);
        let mut worst = 0.0f64;
        for st in &sol.states {
            worst = worst.max(distance(&st.g, &mut fixed.points.iter().map(|p| p.g)));
        }
        for p in &fixed.points {
            worst = worst.max(distance(&p.g, &mut sol.states.iter().map(|s| s.g)));
        }
        ok &= !sol.states.is_empty() && worst < 1e-6 && input.r.norm() > 0.0;
        notes.push(format!(
            "{}: {} states, {} fixed points, max gap {worst:.1e}",
            body.name(),
            sol.states.len(),
            fixed.points.len()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    notes.push(format!("{secs:.2} s"));
    outcome(ok, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let rod = geometry::rod(1.0).unwrap();
    let k11 = |ell: f64, res: f64| {
        resistance(&rod.discretize(res).unwrap(), &HyperKernel::new(ell).unwrap()).unwrap().k[(0, 0)]
    };
    let values: Vec<f64> = [8.0, 16.0, 32.0].iter().map(|&res| k11(ELL, res)).collect();
    let (d1, d2) = ((values[1] - values[0]).abs(), (values[2] - values[1]).abs());
    let by_ell: Vec<f64> = [0.01, 0.1, 1.0].iter().map(|&ell| k11(ell, 16.0)).collect();
    let increasing = by_ell.windows(2).all(|w| w[1] > w[0]);
    outcome(d2 < d1 && increasing, format!("differences {d1:.3e} -> {d2:.3e}; K11 over ell {by_ell:.4?}"))
}

/// Scales masses so that the spin map has norm `target`, putting the RK4
/// per-step drift well above roundoff.
fn fast_input(target: f64) -> FreefallInput {
    let base = input_for(&with_complementary_mass(bent_variant()), 16.0);
    let w = slender_core::dynamics::QuasiSteady::new(&base).unwrap().spin_map().norm();
    let factor = target / w;
    FreefallInput::new(base.resistance.clone(), base.m_e * factor, base.m_c * factor, base.r).unwrap()
}

fn criterion_11() -> Outcome {
    let input = fast_input(20.0);
    let g0 = V::new(0.3, -0.5, 0.8).normalize();
    let coarse = integrate_orientation(&input, &g0, 1e-2, 10.0).unwrap();
    let fine = integrate_orientation(&input, &g0, 5e-3, 10.0).unwrap();
    let ratio = coarse.step_drift / fine.step_drift;
    let drift = coarse.norm_drift.max(fine.norm_drift);
    outcome(
        drift < 1e-9 && ratio >= 12.0,
        format!(
            "norm drift {drift:.1e}, step drift {:.2e} -> {:.2e} (ratio {ratio:.1})",
            coarse.step_drift, fine.step_drift
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "kernel closed forms", criterion_1),
        (2, "point drag", criterion_2),
        (3, "classical limit", criterion_3),
        (4, "reciprocity", criterion_4),
        (5, "positivity and energy identity", criterion_5),
        (6, "transformation law", criterion_6),
        (7, "symmetry structure", criterion_7),
        (8, "steady free fall", criterion_8),
        (9, "cross-solver agreement", criterion_9),
        (10, "convergence", criterion_10),
        (11, "ODE hygiene", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        let note = if !out.pass && KNOWN_RED.contains(&id) { " [known]" } else { "" };
        println!("{status} {id:>2} {name}: {}{note}", out.detail);
        if !out.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
        if out.pass && KNOWN_RED.contains(&id) {
            println!("     criterion {id} is listed as known-red but passed");
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
