//! Independent oracles shared by the integration tests: finite-difference
//! differential operators, suite bodies and random orthogonal matrices.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use slender_core::geometry::{self, BodyGeometry};

pub type V = Vector3<f64>;
pub type M = Matrix3<f64>;

/// The acceptance suite bodies.
pub fn suite() -> Vec<BodyGeometry> {
    vec![
        geometry::rod(1.0).unwrap(),
        geometry::bent_rod(PI / 2.0, 0.5).unwrap(),
        geometry::tripod_tetrahedron(1.0).unwrap(),
        geometry::octahedron_frame(1.0).unwrap(),
        geometry::helix(0.2, 0.1, 3.0).unwrap(),
    ]
}

/// Random orthogonal matrix from a random unit quaternion, optionally reflected.
pub fn random_orthogonal<R: Rng>(rng: &mut R, improper: bool) -> M {
    let q = loop {
        let v = nalgebra::Vector4::<f64>::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v / n;
        }
    };
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let rot = M::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    );
    if improper {
        -rot
    } else {
        rot
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, scale: f64) -> V {
    V::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
}

pub fn random_unit<R: Rng>(rng: &mut R) -> V {
    loop {
        let v = random_vector(rng, 1.0);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

// Finite differences. All stencils are centered and fourth-order accurate
// unless noted; `richardson4` removes the leading h^4 term from two steps.

pub fn richardson4<T>(coarse: T, fine: T) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T>,
{
    fine * (16.0 / 15.0) - coarse * (1.0 / 15.0)
}

fn shifted(x: &V, axis: usize, h: f64) -> V {
    let mut y = *x;
    y[axis] += h;
    y
}

/// First derivative along `axis`.
pub fn d1<F, T>(f: &F, x: &V, axis: usize, h: f64) -> T
where
    F: Fn(&V) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let p = |k: f64| f(&shifted(x, axis, k * h));
    (p(-2.0) - p(2.0) + (p(1.0) - p(-1.0)) * 8.0) * (1.0 / (12.0 * h))
}

/// Second derivative along `axis`.
pub fn d2<F, T>(f: &F, x: &V, axis: usize, h: f64) -> T
where
    F: Fn(&V) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let p = |k: f64| f(&shifted(x, axis, k * h));
    ((p(1.0) + p(-1.0)) * 16.0 - (p(2.0) + p(-2.0)) - p(0.0) * 30.0) * (1.0 / (12.0 * h * h))
}

/// Fourth derivative along `axis`.
pub fn d4<F, T>(f: &F, x: &V, axis: usize, h: f64) -> T
where
    F: Fn(&V) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let p = |k: f64| f(&shifted(x, axis, k * h));
    ((p(2.0) + p(-2.0)) * 12.0 + p(0.0) * 56.0 - (p(3.0) + p(-3.0)) - (p(1.0) + p(-1.0)) * 39.0)
        * (1.0 / (6.0 * h.powi(4)))
}

pub fn laplacian<F, T>(f: &F, x: &V, h: f64) -> T
where
    F: Fn(&V) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    d2(f, x, 0, h) + d2(f, x, 1, h) + d2(f, x, 2, h)
}

/// `sum_i d_i^4 + 2 sum_{i<j} d_i^2 d_j^2`, the mixed terms as nested stencils.
pub fn bilaplacian<F, T>(f: &F, x: &V, h: f64) -> T
where
    F: Fn(&V) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let mut acc = d4(f, x, 0, h) + d4(f, x, 1, h) + d4(f, x, 2, h);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let inner = |y: &V| d2(f, y, j, h);
        acc = acc + d2(&inner, x, i, h) * 2.0;
    }
    acc
}

/// Second-order central divergence of a vector field, one Richardson step.
pub fn divergence<F: Fn(&V) -> V>(f: &F, x: &V, h: f64) -> f64 {
    let central =
        |h: f64| (0..3).map(|i| (f(&shifted(x, i, h))[i] - f(&shifted(x, i, -h))[i]) / (2.0 * h)).sum::<f64>();
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

pub fn gradient<F: Fn(&V) -> f64>(f: &F, x: &V, h: f64) -> V {
    V::new(d1(f, x, 0, h), d1(f, x, 1, h), d1(f, x, 2, h))
}
