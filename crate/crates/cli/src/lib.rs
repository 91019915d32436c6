//! Command-line front end: body files in, JSON or CSV results out.
// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodyfile;
pub mod commands;
pub mod config;
pub mod json;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run;
pub use config::{nondim, Format, Nondim, PhysicalParams, RunConfig};

/// A failed command: exit `code` 2 for bad input, 1 for numerical trouble.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self { code: 2, kind: kind.into(), message: message.into() }
    }

    pub fn numerical(kind: &str, message: impl Into<String>) -> Self {
        Self { code: 1, kind: kind.into(), message: message.into() }
    }

    /// `error: <kind>: <message>` on a single line.
    pub fn line(&self) -> String {
        let message: String = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error: {}: {message}", self.kind)
    }
}

impl From<slender_core::Error> for Failure {
    fn from(e: slender_core::Error) -> Self {
        let code = if e.is_validation() { 2 } else { 1 };
        Self { code, kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Json(serde_json::Value),
    Csv(String),
}

/// What a successful command prints: the payload on stdout, warnings on stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub payload: Payload,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn render(&self) -> String {
        match &self.payload {
            Payload::Json(v) => json::to_string(v).expect("JSON values always serialize") + "\n",
            Payload::Csv(s) => s.clone(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "slender", version, about = "Resistance tensors and free fall of slender rigid bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Body file inspection.
    #[command(subcommand)]
    Body(BodyCommand),
    /// Direct kernel evaluation.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Resistance tensors K, S, C, B and the grand matrix A.
    Resistance(ResistanceArgs),
    /// Steady free-fall states.
    Freefall(FreefallArgs),
    /// Symmetry checks for one orthogonal transform.
    Symmetry(SymmetryArgs),
    /// Quasi-steady orientation trajectory (CSV).
    FallSim(FallSimArgs),
    /// Orientations with no rotation relative to gravity, by grid search.
    FixedPoints(FixedPointsArgs),
    /// Translation tensor under mesh refinement (CSV).
    Convergence(ConvergenceArgs),
    /// Velocity scale, Reynolds number and thickness from physical data.
    Nondim(NondimArgs),
}

#[derive(Debug, Subcommand)]
pub enum BodyCommand {
    /// Mass properties of a body file.
    Info { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum KernelCommand {
    /// g, the classical g, and Z at a point; with --h also the Stokeslet pair.
    Eval(KernelEvalArgs),
}

#[derive(Debug, Args)]
pub struct KernelEvalArgs {
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
    pub x: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub ell: f64,
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["HX", "HY", "HZ"])]
    pub h: Option<Vec<f64>>,
}

/// Options shared by every command that solves on a body.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    pub file: PathBuf,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub ell: f64,
    /// Largest accepted relative asymmetry of A.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-10)]
    pub tol_reciprocity: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e12)]
    pub condition_ceiling: f64,
    /// Continue (with a warning) when the condition estimate exceeds the ceiling.
    #[arg(long)]
    pub allow_ill_conditioned: bool,
}

#[derive(Debug, Args)]
pub struct ResistanceArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Nodes per unit length.
    #[arg(long, allow_negative_numbers = true, default_value_t = 16.0)]
    pub resolution: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FreefallArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 16.0)]
    pub resolution: f64,
    /// |lambda| below which a state counts as translational.
    #[arg(long, allow_negative_numbers = true)]
    pub tol_trans: Option<f64>,
    /// Body axis for the reported tilt angle.
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
    pub axis: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 16.0)]
    pub resolution: f64,
    /// Orthogonal matrix, row-major; the identity by default.
    #[arg(long, num_args = 9, allow_negative_numbers = true)]
    pub transform: Option<Vec<f64>>,
    /// Normal axis (1-3) of a mirror plane to test.
    #[arg(long)]
    pub plane_axis: Option<usize>,
    /// Axis (1-3) of a helicoidal symmetry to test.
    #[arg(long)]
    pub heli_axis: Option<usize>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-8)]
    pub tol_pattern: f64,
}

#[derive(Debug, Args)]
pub struct FallSimArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 16.0)]
    pub resolution: f64,
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
    pub g0: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: f64,
}

#[derive(Debug, Args)]
pub struct FixedPointsArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 16.0)]
    pub resolution: f64,
    /// Number of grid orientations.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub resolutions: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct NondimArgs {
    /// Fluid density, kg/m^3.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    /// Dynamic viscosity, Pa s.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Gravitational acceleration, m/s^2.
    #[arg(long, allow_negative_numbers = true)]
    pub gravity: f64,
    /// Reference length, m.
    #[arg(long, allow_negative_numbers = true)]
    pub d: f64,
    /// Effective thickness, m.
    #[arg(long = "L", allow_negative_numbers = true)]
    pub thickness: f64,
}
