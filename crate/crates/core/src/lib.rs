//! Slender-body hydrodynamics in a hyperviscous Stokes fluid.
//!
//! A one-dimensional rigid body is discretized into quadrature nodes, the
//! hyperviscous Oseen tensor is used as a bounded boundary-integral kernel,
//! and the resulting first-kind system yields the resistance tensors
//! `K`, `S`, `C`, `B`. From those the crate computes steady free-fall states,
//! checks symmetry-induced tensor patterns and integrates the quasi-steady
//! orientation dynamics.
//!
//! All quantities are nondimensional.
// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod freefall;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod mobility;
pub mod symmetry;

pub use error::{Error, Result};
pub use geometry::{BodyGeometry, Density, DiscretizedBody, MassProperties, Segment};
pub use kernel::HyperKernel;
pub use mobility::{ForceDensity, KernelMatrix, ResistanceSet};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat6 = nalgebra::Matrix6<f64>;
