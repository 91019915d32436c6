//! One-dimensional rigid bodies: polyline segments with linear density,
//! their mass properties and their Nyström discretization.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::require_orthogonal;
use crate::{Mat3, Vec3};

/// Linear mass density of a segment.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Uniform(f64),
    /// One value per polyline edge.
    PerEdge(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    points: Vec<Vec3>,
    density: Density,
}

impl Segment {
    pub fn new(points: Vec<Vec3>, density: Density) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!("a segment needs at least 2 points, got {}", points.len())));
        }
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidArgument("segment has non-finite coordinates".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if (w[1] - w[0]).norm() == 0.0 {
                return Err(Error::InvalidArgument(format!("edge {i} has zero length")));
            }
        }
        let valid = |r: f64| r.is_finite() && r > 0.0;
        match &density {
            Density::Uniform(r) if !valid(*r) => {
                return Err(Error::InvalidArgument(format!("density must be positive, got {r}")));
            }
            Density::PerEdge(v) => {
                if v.len() != points.len() - 1 {
                    return Err(Error::ShapeMismatch { expected: points.len() - 1, got: v.len() });
                }
                if let Some(r) = v.iter().find(|r| !valid(**r)) {
                    return Err(Error::InvalidArgument(format!("density must be positive, got {r}")));
                }
            }
            _ => {}
        }
        Ok(Self { points, density })
    }

    pub fn uniform(points: Vec<Vec3>, density: f64) -> Result<Self> {
        Self::new(points, Density::Uniform(density))
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn edge_density(&self, edge: usize) -> f64 {
        match &self.density {
            Density::Uniform(r) => *r,
            Density::PerEdge(v) => v[edge],
        }
    }

    /// `(start, end, density)` for every edge.
    pub fn edges(&self) -> impl Iterator<Item = (Vec3, Vec3, f64)> + '_ {
        self.points.windows(2).enumerate().map(|(i, w)| (w[0], w[1], self.edge_density(i)))
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b, _)| (b - a).norm()).sum()
    }
}

/// A rigid body made of a finite union of polylines.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyGeometry {
    name: String,
    segments: Vec<Segment>,
    m_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub mass: f64,
    pub center_of_mass: Vec3,
    /// Center of the uniform-density body.
    pub centroid: Vec3,
    /// `centroid - center_of_mass`.
    pub r: Vec3,
    pub m_c: f64,
    /// Effective mass `m - m_c`.
    pub m_e: f64,
    pub length: f64,
}

impl BodyGeometry {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>, m_c: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("a body needs at least one segment".into()));
        }
        if !(m_c.is_finite() && m_c >= 0.0) {
            return Err(Error::InvalidArgument(format!("complementary mass must be non-negative, got {m_c}")));
        }
        let body = Self { name: name.into(), segments, m_c };
        if !(body.length() > 0.0) {
            return Err(Error::InvalidArgument("total arc length must be positive".into()));
        }
        Ok(body)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn m_c(&self) -> f64 {
        self.m_c
    }

    pub fn with_m_c(mut self, m_c: f64) -> Result<Self> {
        if !(m_c.is_finite() && m_c >= 0.0) {
            return Err(Error::InvalidArgument(format!("complementary mass must be non-negative, got {m_c}")));
        }
        self.m_c = m_c;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Largest distance between two polyline vertices.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<&Vec3> = self.segments.iter().flat_map(|s| s.points.iter()).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((*a - *b).norm());
            }
        }
        d
    }

    /// Whether the segments form one connected set. Two segments touch when
    /// a vertex of one lies on an edge of the other.
    pub fn is_connected(&self) -> bool {
        let n = self.segments.len();
        let tol = 1e-9 * self.diameter().max(f64::MIN_POSITIVE);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let touches = |a: &Segment, b: &Segment| {
            a.points.iter().any(|p| b.edges().any(|(s, e, _)| point_edge_distance(p, &s, &e) <= tol))
        };
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.segments[i], &self.segments[j]);
                if touches(a, b) || touches(b, a) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let root = find(&mut parent, 0);
        (1..n).all(|i| find(&mut parent, i) == root)
    }

    /// Mass, center of mass and centroid by exact line integrals over the polylines.
    pub fn mass_properties(&self) -> Result<MassProperties> {
        let mut mass = 0.0;
        let mut length = 0.0;
        let mut moment = Vec3::zeros();
        let mut first = Vec3::zeros();
        for seg in &self.segments {
            for (a, b, rho) in seg.edges() {
                let len = (b - a).norm();
                let mid = (a + b) * 0.5;
                mass += rho * len;
                length += len;
                moment += mid * (rho * len);
                first += mid * len;
            }
        }
        if self.m_c > mass {
            return Err(Error::InvalidConfiguration(format!(
                "complementary mass {} exceeds body mass {mass}",
                self.m_c
            )));
        }
        let center_of_mass = moment / mass;
        let centroid = first / length;
        Ok(MassProperties {
            mass,
            center_of_mass,
            centroid,
            r: centroid - center_of_mass,
            m_c: self.m_c,
            m_e: mass - self.m_c,
            length,
        })
    }

    /// Rigid map `p -> Q p + t` of every point.
    pub fn transform(&self, q: &Mat3, t: &Vec3) -> Result<Self> {
        require_orthogonal(q)?;
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { points: s.points.iter().map(|p| q * p + t).collect(), density: s.density.clone() })
            .collect();
        Ok(Self { name: self.name.clone(), segments, m_c: self.m_c })
    }

    /// Composite midpoint discretization: every edge is cut into
    /// `ceil(length * resolution)` equal elements with one node per element.
    /// Nodes are shifted so that the center of mass sits at the origin.
    pub fn discretize(&self, resolution: f64) -> Result<DiscretizedBody> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
        }
        let mass = self.mass_properties()?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut densities = Vec::new();
        for seg in &self.segments {
            for (a, b, rho) in seg.edges() {
                let len = (b - a).norm();
                // Shave a few ulps so that lengths like 1.0000000000000002 do
                // not pick up an extra element and break symmetric layouts.
                let n = ((len * resolution * (1.0 - 1e-12)).ceil() as usize).max(1);
                let w = len / n as f64;
                for j in 0..n {
                    let t = (j as f64 + 0.5) / n as f64;
                    nodes.push(a + (b - a) * t);
                    weights.push(w);
                    densities.push(rho);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("discretization produced no nodes".into()));
        }
        let dm: f64 = weights.iter().zip(&densities).map(|(w, r)| w * r).sum();
        let shift =
            nodes.iter().zip(weights.iter().zip(&densities)).fold(Vec3::zeros(), |acc, (x, (w, r))| acc + x * (w * r))
                / dm;
        for x in &mut nodes {
            *x -= shift;
        }
        Ok(DiscretizedBody { nodes, weights, densities, mass, shift, resolution, diameter: self.diameter() })
    }
}

fn point_edge_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Quadrature nodes of a body in its co-moving frame (center of mass at the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBody {
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    densities: Vec<f64>,
    mass: MassProperties,
    shift: Vec3,
    resolution: f64,
    diameter: f64,
}

impl DiscretizedBody {
    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Linear density at each node.
    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// Mass properties in the original (lab) placement of the body.
    pub fn mass(&self) -> &MassProperties {
        &self.mass
    }

    /// Translation that was subtracted from every node.
    pub fn shift(&self) -> Vec3 {
        self.shift
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Density-weighted first moment `sum w rho x`; zero up to roundoff.
    pub fn mass_moment(&self) -> Vec3 {
        self.nodes
            .iter()
            .zip(self.weights.iter().zip(&self.densities))
            .fold(Vec3::zeros(), |acc, (x, (w, r))| acc + x * (w * r))
    }

    /// Whether every node lies on one line through the origin. Such bodies
    /// feel no torque when spinning about that line.
    pub fn collinear_axis(&self) -> Option<Vec3> {
        let tol = 1e-12 * self.diameter.max(f64::MIN_POSITIVE);
        let far = self.nodes.iter().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
        if far.norm() <= tol {
            return None;
        }
        let axis = far.normalize();
        self.nodes.iter().all(|x| x.cross(&axis).norm() <= tol).then_some(axis)
    }
}

// Builders. All produce homogeneous bodies (density 1) with m_c = 0.

/// Straight rod along `x1`, centered at the origin.
pub fn rod(length: f64) -> Result<BodyGeometry> {
    positive("length", length)?;
    let h = 0.5 * length;
    BodyGeometry::new("rod", vec![Segment::uniform(vec![Vec3::new(-h, 0.0, 0.0), Vec3::new(h, 0.0, 0.0)], 1.0)?], 0.0)
}

/// Two arms of equal length meeting at `angle` (radians), lying in the
/// `x2 x3` plane and mirror-symmetric about the `x1 x3` plane.
pub fn bent_rod(angle: f64, arm_length: f64) -> Result<BodyGeometry> {
    positive("arm length", arm_length)?;
    if !(angle > 0.0 && angle <= PI) {
        return Err(Error::InvalidArgument(format!("bend angle must lie in (0, pi], got {angle}")));
    }
    let (s, c) = (0.5 * angle).sin_cos();
    let left = Vec3::new(0.0, -s, c) * arm_length;
    let right = Vec3::new(0.0, s, c) * arm_length;
    BodyGeometry::new("bent_rod", vec![Segment::uniform(vec![left, Vec3::zeros(), right], 1.0)?], 0.0)
}

/// Three concurrent edges of a regular tetrahedron, apex at the origin,
/// three-fold axis along `x1`.
pub fn tripod_tetrahedron(edge: f64) -> Result<BodyGeometry> {
    positive("edge", edge)?;
    let radius = edge / 3f64.sqrt();
    let height = edge * (2.0f64 / 3.0).sqrt();
    let segments = (0..3)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / 3.0;
            let foot = Vec3::new(height, radius * phi.cos(), radius * phi.sin());
            Segment::uniform(vec![Vec3::zeros(), foot], 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    BodyGeometry::new("tripod_tetrahedron", segments, 0.0)
}

/// The 12 edges of a regular octahedron with vertices on the coordinate axes.
pub fn octahedron_frame(edge: f64) -> Result<BodyGeometry> {
    positive("edge", edge)?;
    let a = edge / 2f64.sqrt();
    let vertices: Vec<Vec3> = (0..3)
        .flat_map(|i| {
            let e = Vec3::ith(i, a);
            [e, -e]
        })
        .collect();
    let mut segments = Vec::with_capacity(12);
    for i in 0..6 {
        for j in i + 1..6 {
            // Skip opposite vertices.
            if i / 2 != j / 2 {
                segments.push(Segment::uniform(vec![vertices[i], vertices[j]], 1.0)?);
            }
        }
    }
    BodyGeometry::new("octahedron_frame", segments, 0.0)
}

/// Polyline samples per helix turn.
pub const HELIX_SAMPLES_PER_TURN: usize = 64;

/// Circular helix with axis `x1`; `pitch` is the rise per turn.
pub fn helix(radius: f64, pitch: f64, turns: f64) -> Result<BodyGeometry> {
    positive("radius", radius)?;
    positive("pitch", pitch)?;
    positive("turns", turns)?;
    let n = ((turns * HELIX_SAMPLES_PER_TURN as f64).ceil() as usize).max(2);
    let total = 2.0 * PI * turns;
    let points = (0..=n)
        .map(|j| {
            let t = total * j as f64 / n as f64;
            Vec3::new(pitch * (t / (2.0 * PI) - 0.5 * turns), radius * t.cos(), radius * t.sin())
        })
        .collect();
    BodyGeometry::new("helix", vec![Segment::uniform(points, 1.0)?], 0.0)
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be positive, got {v}")))
    }
}
