//! The JSON problem file shared by all subcommands.
//!
//! Each subcommand reads only the fields it needs and ignores the rest; a
//! missing required field is a validation error naming the field.

use serde::{Deserialize, Serialize};

use flatcone::io::{AlphaJson, ComplexJson, DivisorJson, PathJson, PolygonJson, PrevertexJson};
use flatcone::{PrymDifferential, QuadratureSettings};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative quadrature tolerance.
    #[serde(default)]
    pub tol_q: Option<f64>,
    #[serde(default)]
    pub max_depth: Option<u32>,
    #[serde(default)]
    pub resonance_tol: Option<f64>,
}

/// Rectangular sampling grid for `metric`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Local series problem for `frobenius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusJson {
    pub alpha: AlphaJson,
    /// Coefficients `b_1, b_2, ...` of `q(x)`; `b_0 = (1 - alpha^2)/4` is implied.
    #[serde(default)]
    pub b: Vec<ComplexJson>,
    /// Truncation orders; default `[3, 6]`.
    #[serde(default)]
    pub terms: Option<Vec<usize>>,
    /// Two radii for the residual slope; default `[0.05, 0.02]`.
    #[serde(default)]
    pub radii: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default)]
    pub divisor: Option<DivisorJson>,
    #[serde(default)]
    pub scale: Option<ComplexJson>,
    /// Path for `develop` and `plot`, closed loop for `monodromy`.
    #[serde(default)]
    pub path: Option<PathJson>,
    #[serde(default)]
    pub probes: Option<Vec<ComplexJson>>,
    /// Sample count for `develop` and `plot`; default 101.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub grid: Option<GridJson>,
    /// Radii for `cone-angle`; default `[1e-3]`.
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub frobenius: Option<FrobeniusJson>,
    #[serde(default)]
    pub polygon: Option<PolygonJson>,
    #[serde(default)]
    pub prevertices: Option<PrevertexJson>,
    /// Upper half-plane points for `sc-map`; default: the prevertices.
    #[serde(default)]
    pub points: Option<Vec<ComplexJson>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn missing(field: &str) -> CliError {
    CliError::Validation(format!("problem file lacks the field \"{field}\""))
}

impl ProblemSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("cannot parse problem file: {e}")))
    }

    pub fn require_divisor(&self) -> CliResult<&DivisorJson> {
        self.divisor.as_ref().ok_or_else(|| missing("divisor"))
    }

    /// The differential of the divisor, completed at infinity when needed.
    pub fn differential(&self) -> CliResult<PrymDifferential> {
        let divisor = self.require_divisor()?.to_divisor()?;
        let scale = self.scale.map(Into::into).unwrap_or(num_complex::Complex64::new(1.0, 0.0));
        let w = if divisor.infinity().is_some() {
            PrymDifferential::new(divisor, scale)?
        } else {
            PrymDifferential::completed(&divisor, scale)?
        };
        Ok(w)
    }

    pub fn require_path(&self) -> CliResult<&PathJson> {
        self.path.as_ref().ok_or_else(|| missing("path"))
    }

    pub fn require_grid(&self) -> CliResult<&GridJson> {
        self.grid.as_ref().ok_or_else(|| missing("grid"))
    }

    pub fn require_frobenius(&self) -> CliResult<&FrobeniusJson> {
        self.frobenius.as_ref().ok_or_else(|| missing("frobenius"))
    }

    pub fn require_polygon(&self) -> CliResult<&PolygonJson> {
        self.polygon.as_ref().ok_or_else(|| missing("polygon"))
    }

    pub fn require_prevertices(&self) -> CliResult<&PrevertexJson> {
        self.prevertices.as_ref().ok_or_else(|| missing("prevertices"))
    }

    /// Quadrature settings, with `tol_override` (from `--tol`) taking
    /// precedence over the file.
    pub fn quadrature(&self, tol_override: Option<f64>) -> CliResult<QuadratureSettings> {
        let mut s = QuadratureSettings::default();
        if let Some(t) = tol_override.or(self.tolerances.tol_q) {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Validation(format!("tolerance must lie in (0, 1), got {t}")));
            }
            s.tol = t;
        }
        if let Some(d) = self.tolerances.max_depth {
            s.max_depth = d;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_missing_fields() {
        let spec = ProblemSpec::parse(r#"{"divisor":{"points":[]},"samples":5}"#).unwrap();
        assert_eq!(spec.samples, Some(5));
        assert!(matches!(spec.require_path(), Err(CliError::Validation(_))));
        assert!(ProblemSpec::parse("{not json").is_err());
    }

    #[test]
    fn tolerance_precedence() {
        let spec = ProblemSpec::parse(r#"{"tolerances":{"tol_q":1e-8,"max_depth":12}}"#).unwrap();
        assert_eq!(spec.quadrature(None).unwrap().tol, 1e-8);
        assert_eq!(spec.quadrature(Some(1e-11)).unwrap().tol, 1e-11);
        assert_eq!(spec.quadrature(None).unwrap().max_depth, 12);
        assert!(spec.quadrature(Some(-1.0)).is_err());
    }
}
