//! JSON schemas for divisors, differentials, paths, polygons and solver
//! reports.
//!
//! Complex numbers are objects `{"re": .., "im": ..}`. Cone parameters are
//! either JSON numbers or strings such as `"1/3"`; strings keep rationals
//! exact, numbers are read through their decimal text and so stay exact when
//! they terminate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divisor::{ConeParam, ConePoint, Divisor, Position};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::prym::PrymDifferential;
use crate::sc::{PolygonSpec, PrevertexConfig, ScSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaJson {
    Number(f64),
    Text(String),
}

impl AlphaJson {
    pub fn to_param(&self) -> Result<ConeParam> {
        match self {
            // shortest round-trip text, so 0.5 is read as 1/2
            AlphaJson::Number(x) => format!("{x}").parse(),
            AlphaJson::Text(s) => s.parse(),
        }
    }
}

impl From<ConeParam> for AlphaJson {
    fn from(a: ConeParam) -> Self {
        match a {
            ConeParam::Exact(_) => AlphaJson::Text(a.to_string()),
            ConeParam::Real(x) => AlphaJson::Number(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub re: f64,
    pub im: f64,
    pub alpha: AlphaJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityJson {
    pub alpha: AlphaJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorJson {
    pub points: Vec<PointJson>,
    #[serde(default)]
    pub infinity: Option<InfinityJson>,
}

impl DivisorJson {
    pub fn to_divisor(&self) -> Result<Divisor> {
        let mut points = Vec::with_capacity(self.points.len() + 1);
        for p in &self.points {
            points.push(ConePoint::finite(Complex64::new(p.re, p.im), p.alpha.to_param()?));
        }
        if let Some(inf) = &self.infinity {
            points.push(ConePoint::at_infinity(inf.alpha.to_param()?));
        }
        Divisor::new(points)
    }
}

impl From<&Divisor> for DivisorJson {
    fn from(d: &Divisor) -> Self {
        let mut points = Vec::new();
        let mut infinity = None;
        for p in d.points() {
            match p.position {
                Position::Finite(z) => points.push(PointJson { re: z.re, im: z.im, alpha: p.alpha.into() }),
                Position::Infinity => infinity = Some(InfinityJson { alpha: p.alpha.into() }),
            }
        }
        DivisorJson { points, infinity }
    }
}

/// A divisor plus the scale constant of the differential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialJson {
    #[serde(flatten)]
    pub divisor: DivisorJson,
    #[serde(default)]
    pub scale: Option<ComplexJson>,
}

impl DifferentialJson {
    /// Completes the divisor at infinity when it has no point there.
    pub fn to_differential(&self) -> Result<PrymDifferential> {
        let divisor = self.divisor.to_divisor()?;
        let scale = self.scale.map(Complex64::from).unwrap_or(Complex64::new(1.0, 0.0));
        if divisor.infinity().is_some() {
            PrymDifferential::new(divisor, scale)
        } else {
            PrymDifferential::completed(&divisor, scale)
        }
    }
}

impl From<&PrymDifferential> for DifferentialJson {
    fn from(w: &PrymDifferential) -> Self {
        DifferentialJson { divisor: w.divisor().into(), scale: Some(w.scale().into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub waypoints: Vec<ComplexJson>,
    #[serde(default)]
    pub clearance: Option<f64>,
}

impl PathJson {
    /// Uses `default_clearance` when the document gives none.
    pub fn to_path(&self, default_clearance: f64) -> Result<Path> {
        Path::new(self.waypoints.iter().map(|&z| z.into()).collect(), self.clearance.unwrap_or(default_clearance))
    }
}

impl From<&Path> for PathJson {
    fn from(p: &Path) -> Self {
        PathJson { waypoints: p.waypoints().iter().map(|&z| z.into()).collect(), clearance: Some(p.clearance()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonJson {
    pub vertices: Vec<ComplexJson>,
    pub alphas: Vec<AlphaJson>,
}

impl PolygonJson {
    pub fn to_polygon(&self) -> Result<PolygonSpec> {
        let alphas = self.alphas.iter().map(AlphaJson::to_param).collect::<Result<Vec<_>>>()?;
        PolygonSpec::new(self.vertices.iter().map(|&z| z.into()).collect(), alphas)
    }
}

impl From<&PolygonSpec> for PolygonJson {
    fn from(p: &PolygonSpec) -> Self {
        PolygonJson {
            vertices: p.vertices().iter().map(|&z| z.into()).collect(),
            alphas: p.alphas().iter().map(|&a| a.into()).collect(),
        }
    }
}

/// Prevertex data for forward maps: finite prevertices `x_1..x_{n-1}`
/// (infinity implied) and one cone parameter per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevertexJson {
    pub prevertices: Vec<f64>,
    pub alphas: Vec<AlphaJson>,
}

impl PrevertexJson {
    pub fn to_config(&self) -> Result<(PrevertexConfig, Vec<ConeParam>)> {
        let config = PrevertexConfig::new(self.prevertices.clone())?;
        let alphas = self.alphas.iter().map(AlphaJson::to_param).collect::<Result<Vec<_>>>()?;
        if alphas.len() != config.vertex_count() {
            return Err(Error::InvalidPrevertices(format!(
                "{} prevertices (with infinity) but {} angle parameters",
                config.vertex_count(),
                alphas.len()
            )));
        }
        Ok((config, alphas))
    }
}

/// Solver report: `prevertices` lists the finite ones, infinity implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub prevertices: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl From<&ScSolution> for SolutionJson {
    fn from(s: &ScSolution) -> Self {
        SolutionJson { prevertices: s.config.finite().to_vec(), residual: s.mismatch, iterations: s.iterations }
    }
}
