//! Body files: `{"name", "m_c", "segments": [{"points": [[x, y, z], ...], "density": d | [d, ...]}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use slender_core::geometry::{BodyGeometry, Density, Segment};
use slender_core::Vec3;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub name: String,
    #[serde(default)]
    pub m_c: f64,
    pub segments: Vec<SegmentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentFile {
    pub points: Vec<[f64; 3]>,
    pub density: DensityFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensityFile {
    Uniform(f64),
    PerEdge(Vec<f64>),
}

impl BodyFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::validation("invalid-body", e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation("io", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_geometry(&self) -> Result<BodyGeometry, Failure> {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let points = s.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
                let density = match &s.density {
                    DensityFile::Uniform(d) => Density::Uniform(*d),
                    DensityFile::PerEdge(d) => Density::PerEdge(d.clone()),
                };
                Segment::new(points, density)
            })
            .collect::<slender_core::Result<Vec<_>>>()?;
        Ok(BodyGeometry::new(self.name.clone(), segments, self.m_c)?)
    }

    pub fn from_geometry(body: &BodyGeometry) -> Self {
        let segments = body
            .segments()
            .iter()
            .map(|s| SegmentFile {
                points: s.points().iter().map(|p| [p[0], p[1], p[2]]).collect(),
                density: match s.density() {
                    Density::Uniform(d) => DensityFile::Uniform(*d),
                    Density::PerEdge(d) => DensityFile::PerEdge(d.clone()),
                },
            })
            .collect();
        Self { name: body.name().to_string(), m_c: body.m_c(), segments }
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self).expect("body files always serialize")
    }
}
