use std::path::Path;

use serde_json::{json, Value};
use slender_core::dynamics::{find_fixed_points, integrate_orientation};
use slender_core::freefall::{steady_states, tilt_angle, FreefallInput};
use slender_core::geometry::{BodyGeometry, DiscretizedBody};
use slender_core::kernel::{
    classical_oseen, green_classical, green_scalar, oseen_tensor, stokeslet_pressure, stokeslet_velocity,
};
use slender_core::mobility::{assemble, resistance_from, RotationDegeneracy};
use slender_core::symmetry::report;
use slender_core::{HyperKernel, Mat3, Mat6, ResistanceSet, Vec3};

use crate::bodyfile::BodyFile;
use crate::config::{nondim, Format, PhysicalParams, RunConfig};
use crate::json::format_f64;
use crate::{
    BodyCommand, Cli, Command, ConvergenceArgs, Failure, FallSimArgs, FixedPointsArgs, FreefallArgs, KernelCommand,
    KernelEvalArgs, NondimArgs, Output, Payload, ResistanceArgs, SolverArgs, SymmetryArgs,
};

pub fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Body(BodyCommand::Info { file }) => body_info(&file),
        Command::Kernel(KernelCommand::Eval(args)) => kernel_eval(&args),
        Command::Resistance(args) => resistance_cmd(&args),
        Command::Freefall(args) => freefall_cmd(&args),
        Command::Symmetry(args) => symmetry_cmd(&args),
        Command::FallSim(args) => fall_sim(&args),
        Command::FixedPoints(args) => fixed_points_cmd(&args),
        Command::Convergence(args) => convergence(&args),
        Command::Nondim(args) => nondim_cmd(&args),
    }
}

fn vec3(v: &Vec3) -> Value {
    json!([v[0], v[1], v[2]])
}

fn mat3(m: &Mat3) -> Value {
    Value::Array((0..3).map(|i| json!([m[(i, 0)], m[(i, 1)], m[(i, 2)]])).collect())
}

fn mat6(m: &Mat6) -> Value {
    Value::Array((0..6).map(|i| Value::Array((0..6).map(|j| json!(m[(i, j)])).collect())).collect())
}

fn point(values: &[f64], what: &str) -> Result<Vec3, Failure> {
    match values {
        [x, y, z] if values.iter().all(|v| v.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(Failure::validation("invalid-argument", format!("{what} needs three finite numbers"))),
    }
}

fn json_output(config: Value, body: Value, result: Value, warnings: Vec<String>) -> Output {
    Output { payload: Payload::Json(json!({"config": config, "body": body, "result": result})), warnings }
}

fn body_summary(path: &Path, geometry: &BodyGeometry, dbody: Option<&DiscretizedBody>) -> Value {
    json!({
        "file": path.display().to_string(),
        "name": geometry.name(),
        "m_c": geometry.m_c(),
        "segments": geometry.segments().len(),
        "connected": geometry.is_connected(),
        "nodes": dbody.map(|d| d.len()),
    })
}

fn load(path: &Path, warnings: &mut Vec<String>) -> Result<BodyGeometry, Failure> {
    let geometry = BodyFile::read(path)?.to_geometry()?;
    if !geometry.is_connected() {
        warnings.push(format!("body '{}' is not connected; results treat it as one rigid body", geometry.name()));
    }
    Ok(geometry)
}

/// A body taken through discretization and the resistance solve, with the
/// configured conditioning and reciprocity checks applied.
struct Solved {
    geometry: BodyGeometry,
    dbody: DiscretizedBody,
    resistance: ResistanceSet,
    warnings: Vec<String>,
}

fn solver_config(args: &SolverArgs, resolution: f64) -> RunConfig {
    RunConfig {
        ell: args.ell,
        resolution,
        tol_reciprocity: args.tol_reciprocity,
        condition_ceiling: args.condition_ceiling,
        allow_ill_conditioned: args.allow_ill_conditioned,
        ..RunConfig::default()
    }
}

fn solve_body(
    path: &Path,
    geometry: BodyGeometry,
    cfg: &RunConfig,
    mut warnings: Vec<String>,
) -> Result<Solved, Failure> {
    let kernel = HyperKernel::new(cfg.ell)?;
    let dbody = geometry.discretize(cfg.resolution)?;
    let km = assemble(&dbody, &kernel)?;
    warnings.extend(km.warnings().iter().cloned());
    if !(km.condition() <= cfg.condition_ceiling) {
        let message = format!(
            "condition estimate {:e} of {} exceeds the ceiling {:e}",
            km.condition(),
            path.display(),
            cfg.condition_ceiling
        );
        if cfg.allow_ill_conditioned {
            warnings.push(message);
        } else {
            return Err(Failure::numerical("ill-conditioned", message + " (use --allow-ill-conditioned to proceed)"));
        }
    }
    let resistance = resistance_from(&km)?;
    if !(resistance.asymmetry <= cfg.tol_reciprocity) {
        return Err(Failure::numerical(
            "reciprocity",
            format!("|A - A^T|/|A| = {:e} exceeds {:e}", resistance.asymmetry, cfg.tol_reciprocity),
        ));
    }
    if let RotationDegeneracy::Axis(a) = resistance.degeneracy {
        warnings.push(format!(
            "all nodes lie on the line through the origin along ({}, {}, {}); spin about it meets no resistance",
            a[0], a[1], a[2]
        ));
    }
    if resistance.degeneracy == RotationDegeneracy::Point {
        warnings.push("body reduces to a single point; it supports no torque".into());
    }
    Ok(Solved { geometry, dbody, resistance, warnings })
}

fn prepare(args: &SolverArgs, cfg: &RunConfig) -> Result<Solved, Failure> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let geometry = load(&args.file, &mut warnings)?;
    solve_body(&args.file, geometry, cfg, warnings)
}

fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn freefall_input(solved: &Solved) -> Result<FreefallInput, Failure> {
    Ok(FreefallInput::from_mass(solved.resistance.clone(), solved.dbody.mass())?)
}

fn body_info(path: &Path) -> Result<Output, Failure> {
    let mut warnings = Vec::new();
    let geometry = load(path, &mut warnings)?;
    let mass = geometry.mass_properties()?;
    let result = json!({
        "m": mass.mass,
        "m_e": mass.m_e,
        "m_c": mass.m_c,
        "r": vec3(&mass.r),
        "center_of_mass": vec3(&mass.center_of_mass),
        "centroid": vec3(&mass.centroid),
        "length": mass.length,
        "diameter": geometry.diameter(),
    });
    Ok(json_output(Value::Null, body_summary(path, &geometry, None), result, warnings))
}

fn kernel_eval(args: &KernelEvalArgs) -> Result<Output, Failure> {
    let x = point(&args.x, "--x")?;
    let kernel = HyperKernel::new(args.ell)?;
    let z = oseen_tensor(&x, &kernel)?;
    let at_origin = x.norm() == 0.0;
    let mut result = json!({
        "x": vec3(&x),
        "g": green_scalar(&x, &kernel)?,
        "g1": if at_origin { Value::Null } else { json!(green_classical(&x)?) },
        "Z": z.transpose().iter().copied().collect::<Vec<f64>>(),
        "Z_classical": if at_origin { Value::Null } else { mat3(&classical_oseen(&x)?) },
    });
    if let Some(h) = &args.h {
        let h = point(h, "--h")?;
        result["h"] = vec3(&h);
        result["zeta"] = vec3(&stokeslet_velocity(&x, &h, &kernel)?);
        result["p_zeta"] = if at_origin { Value::Null } else { json!(stokeslet_pressure(&x, &h)?) };
    }
    Ok(json_output(json!({"ell": args.ell}), Value::Null, result, Vec::new()))
}

fn degeneracy_json(d: &RotationDegeneracy) -> Value {
    match d {
        RotationDegeneracy::None => json!({"kind": "none"}),
        RotationDegeneracy::Axis(a) => json!({"kind": "axis", "axis": vec3(a)}),
        RotationDegeneracy::Point => json!({"kind": "point"}),
    }
}

fn resistance_json(r: &ResistanceSet) -> Value {
    json!({
        "K": mat3(&r.k),
        "S": mat3(&r.s),
        "C": mat3(&r.c),
        "B": mat3(&r.b),
        "A": mat6(&r.a()),
        "nodes": r.nodes,
        "condition": r.condition,
        "asymmetry": r.asymmetry,
        "factorization": r.factorization.as_str(),
        "degeneracy": degeneracy_json(&r.degeneracy),
    })
}

fn resistance_cmd(args: &ResistanceArgs) -> Result<Output, Failure> {
    let cfg = RunConfig { format: args.format, ..solver_config(&args.solver, args.resolution) };
    let s = prepare(&args.solver, &cfg)?;
    let r = &s.resistance;
    match args.format {
        Format::Json => Ok(json_output(
            config_json(&cfg),
            body_summary(&args.solver.file, &s.geometry, Some(&s.dbody)),
            resistance_json(r),
            s.warnings,
        )),
        Format::Csv => {
            let mut out = String::from("tensor,row,col,value\n");
            for (name, m) in [("K", r.k), ("S", r.s), ("C", r.c), ("B", r.b)] {
                for i in 0..3 {
                    for j in 0..3 {
                        out += &format!("{name},{},{},{}\n", i + 1, j + 1, format_f64(m[(i, j)]));
                    }
                }
            }
            out += &format!("condition,,,{}\n", format_f64(r.condition));
            out += &format!("asymmetry,,,{}\n", format_f64(r.asymmetry));
            Ok(Output { payload: Payload::Csv(out), warnings: s.warnings })
        }
    }
}

fn freefall_cmd(args: &FreefallArgs) -> Result<Output, Failure> {
    let cfg = RunConfig { tol_trans: args.tol_trans, ..solver_config(&args.solver, args.resolution) };
    let axis = args.axis.as_deref().map(|a| point(a, "--axis")).transpose()?;
    let mut s = prepare(&args.solver, &cfg)?;
    let input = freefall_input(&s)?;
    let sol = steady_states(&input, cfg.tol_trans)?;
    let mut states = Vec::with_capacity(sol.states.len());
    for st in &sol.states {
        if !st.consistent {
            s.warnings.push(format!(
                "state lambda = {} fails the balance check (residuals {:e}, {:e})",
                st.lambda, st.residuals.0, st.residuals.1
            ));
        }
        let tilt = axis.map(|a| tilt_angle(st, &a)).transpose()?;
        states.push(json!({
            "lambda": st.lambda,
            "g": vec3(&st.g),
            "xi": vec3(&st.xi),
            "omega": vec3(&st.omega),
            "residuals": [st.residuals.0, st.residuals.1],
            "class": st.class.as_str(),
            "multiplicity": st.multiplicity,
            "consistent": st.consistent,
            "tilt_deg": tilt,
        }));
    }
    if sol.all_orientations {
        s.warnings
            .push("F vanishes: every orientation is a translational steady state; listing coordinate axes".into());
    }
    let result = json!({
        "F": mat3(&sol.f),
        "m_e": input.m_e,
        "m_c": input.m_c,
        "r": vec3(&input.r),
        "all_orientations": sol.all_orientations,
        "complex_eigenvalues": sol.complex_eigenvalues.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
        "states": states,
    });
    let mut config = config_json(&cfg);
    config["axis"] = axis.map(|a| vec3(&a)).unwrap_or(Value::Null);
    Ok(json_output(config, body_summary(&args.solver.file, &s.geometry, Some(&s.dbody)), result, s.warnings))
}

fn symmetry_cmd(args: &SymmetryArgs) -> Result<Output, Failure> {
    let cfg = RunConfig { tol_pattern: args.tol_pattern, ..solver_config(&args.solver, args.resolution) };
    let q = match &args.transform {
        Some(v) if v.len() == 9 && v.iter().all(|x| x.is_finite()) => Mat3::from_row_slice(v),
        Some(_) => return Err(Failure::validation("invalid-argument", "--transform needs nine finite numbers")),
        None => Mat3::identity(),
    };
    slender_core::linalg::require_orthogonal(&q)?;
    let s = prepare(&args.solver, &cfg)?;
    let rep = report(&s.dbody, &s.resistance, &q, args.plane_axis, args.heli_axis, cfg.tol_pattern)?;
    let pattern = |p: Option<(usize, bool)>| p.map(|(axis, holds)| json!({"axis": axis, "holds": holds}));
    let result = json!({
        "transform": mat3(&rep.transform),
        "det": rep.det,
        "node_matching_error": rep.node_matching_error,
        "geometrically_invariant": rep.geometrically_invariant,
        "residuals": {"K": rep.residuals.k, "B": rep.residuals.b, "C": rep.residuals.c},
        "plane_pattern": pattern(rep.plane),
        "helicoidal_pattern": pattern(rep.helicoidal),
        "coupling_ratio": rep.coupling_ratio,
        "translational_orientation": rep.translational.map(|t| json!({
            "g": vec3(&t.g),
            "u0": vec3(&t.u0),
            "nullity": t.nullity,
            "sigma_min": t.sigma_min,
        })),
    });
    Ok(json_output(config_json(&cfg), body_summary(&args.solver.file, &s.geometry, Some(&s.dbody)), result, s.warnings))
}

fn fall_sim(args: &FallSimArgs) -> Result<Output, Failure> {
    let cfg = solver_config(&args.solver, args.resolution);
    let g0 = point(&args.g0, "--g0")?;
    let s = prepare(&args.solver, &cfg)?;
    let input = freefall_input(&s)?;
    let traj = integrate_orientation(&input, &g0, args.dt, args.t_end)?;
    let mut out = String::from("t,G1,G2,G3,xi1,xi2,xi3,omega1,omega2,omega3\n");
    for k in 0..traj.times.len() {
        let cols: Vec<String> = std::iter::once(traj.times[k])
            .chain(traj.g[k].iter().copied())
            .chain(traj.xi[k].iter().copied())
            .chain(traj.omega[k].iter().copied())
            .map(format_f64)
            .collect();
        out += &cols.join(",");
        out.push('\n');
    }
    let mut warnings = s.warnings;
    if traj.norm_drift > 1e-9 {
        warnings.push(format!("orientation norm drifted by {:e}", traj.norm_drift));
    }
    Ok(Output { payload: Payload::Csv(out), warnings })
}

fn fixed_points_cmd(args: &FixedPointsArgs) -> Result<Output, Failure> {
    let cfg = solver_config(&args.solver, args.resolution);
    let mut s = prepare(&args.solver, &cfg)?;
    let input = freefall_input(&s)?;
    let set = find_fixed_points(&input, args.grid)?;
    if set.tolerance_failure {
        s.warnings.push(format!("no polished orientation met the tolerance {:e}", set.tolerance));
    }
    let result = json!({
        "grid": args.grid,
        "tolerance": set.tolerance,
        "all_orientations": set.all_orientations,
        "tolerance_failure": set.tolerance_failure,
        "points": set.points.iter().map(|p| json!({
            "g": vec3(&p.g),
            "residual": p.residual,
            "growth": p.growth,
        })).collect::<Vec<_>>(),
    });
    let mut config = config_json(&cfg);
    config["grid"] = json!(args.grid);
    Ok(json_output(config, body_summary(&args.solver.file, &s.geometry, Some(&s.dbody)), result, s.warnings))
}

fn convergence(args: &ConvergenceArgs) -> Result<Output, Failure> {
    let mut warnings = Vec::new();
    let geometry = load(&args.solver.file, &mut warnings)?;
    let mut out = String::from("resolution,nodes");
    for i in 1..=3 {
        for j in 1..=3 {
            out += &format!(",K{i}{j}");
        }
    }
    out += ",diff\n";
    let mut previous: Option<Mat3> = None;
    for &res in &args.resolutions {
        let cfg = solver_config(&args.solver, res);
        cfg.validate()?;
        let s = solve_body(&args.solver.file, geometry.clone(), &cfg, Vec::new())?;
        for w in s.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        let k = s.resistance.k;
        out += &format!("{},{}", format_f64(res), s.dbody.len());
        for i in 0..3 {
            for j in 0..3 {
                out += &format!(",{}", format_f64(k[(i, j)]));
            }
        }
        out += ",";
        if let Some(prev) = previous {
            out += &format_f64((k - prev).norm());
        }
        out.push('\n');
        previous = Some(k);
    }
    Ok(Output { payload: Payload::Csv(out), warnings })
}

fn nondim_cmd(args: &NondimArgs) -> Result<Output, Failure> {
    let params =
        PhysicalParams { rho: args.rho, mu: args.mu, gravity: args.gravity, d: args.d, thickness: args.thickness };
    let n = nondim(&params)?;
    let result = json!({"W": n.w, "Re": n.re, "ell": n.ell});
    let config = serde_json::to_value(params).expect("parameters serialize");
    Ok(json_output(config, Value::Null, result, n.warnings))
}
