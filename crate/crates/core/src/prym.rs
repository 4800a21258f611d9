//! The multiplicative differential `omega = C * prod_j (z - P_j)^(alpha_j - 1) dz`
//! attached to a Gauss-Bonnet divisor, evaluated on explicitly tracked
//! branches.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::divisor::{ConeParam, Divisor, GaussBonnet};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::quadrature::{self, QuadratureSettings};

/// Signed angle swept by `z - p` along the straight segment `a -> b`
/// (exact whenever the segment misses `p`, since it subtends less than `pi`).
pub fn turn(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    ((b - p) * (a - p).conj()).arg()
}

/// Continuously tracked arguments of `z - P_j` for every finite cone point.
///
/// `args[j]` is not reduced modulo `2*pi`; the integer part of
/// `(args[j] - Arg(base - P_j)) / 2*pi` is the winding accumulated so far.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub base: Complex64,
    pub args: Vec<f64>,
}

impl BranchState {
    /// Principal branch (`arg` in `(-pi, pi]`) at `z`.
    pub fn principal(omega: &PrymDifferential, z: Complex64) -> Result<Self> {
        omega.check_off_cone_points(z)?;
        let args = omega.centers.iter().map(|&p| (z - p).arg()).collect();
        Ok(BranchState { base: z, args })
    }

    /// Whether every tracked argument agrees with `z` modulo `2*pi`.
    pub fn is_consistent_at(&self, omega: &PrymDifferential, z: Complex64, tol: f64) -> bool {
        omega.centers.iter().zip(&self.args).all(|(&p, &a)| {
            let d = a - (z - p).arg();
            (d - 2.0 * PI * (d / (2.0 * PI)).round()).abs() <= tol
        })
    }

    /// Net number of turns around each point relative to the principal branch.
    pub fn windings(&self, omega: &PrymDifferential) -> Vec<i64> {
        omega
            .centers
            .iter()
            .zip(&self.args)
            .map(|(&p, &a)| ((a - (self.base - p).arg()) / (2.0 * PI)).round() as i64)
            .collect()
    }
}

/// A Gauss-Bonnet divisor together with a nonzero scale constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PrymDifferential {
    divisor: Divisor,
    scale: Complex64,
    centers: Vec<Complex64>,
    alphas: Vec<ConeParam>,
    exponents: Vec<f64>,
    chart_radius: f64,
}

impl PrymDifferential {
    /// `divisor` must already satisfy Gauss-Bonnet (see
    /// [`Divisor::complete_at_infinity`]).
    pub fn new(divisor: Divisor, scale: Complex64) -> Result<Self> {
        if let GaussBonnet::Fail { deficit } = divisor.validate_gauss_bonnet() {
            return Err(Error::GaussBonnet { deficit });
        }
        if scale == Complex64::new(0.0, 0.0) || !scale.norm().is_finite() {
            return Err(Error::ZeroScale);
        }
        let (centers, alphas): (Vec<_>, Vec<_>) = divisor.finite_points().unzip();
        let exponents = alphas.iter().map(|a: &ConeParam| a.exponent().value()).collect();
        let max_abs = centers.iter().map(|p: &Complex64| p.norm()).fold(0.0, f64::max);
        Ok(PrymDifferential { divisor, scale, centers, alphas, exponents, chart_radius: 2.0 * (1.0 + max_abs) })
    }

    /// Completes a divisor of finite points at infinity, then builds the
    /// differential.
    pub fn completed(finite: &Divisor, scale: Complex64) -> Result<Self> {
        PrymDifferential::new(finite.complete_at_infinity()?, scale)
    }

    /// Unit-scale differential from finite `(position, alpha)` pairs.
    pub fn from_points<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, ConeParam)>,
    {
        PrymDifferential::completed(&Divisor::from_finite(points)?, Complex64::new(1.0, 0.0))
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn with_scale(&self, scale: Complex64) -> Result<Self> {
        PrymDifferential::new(self.divisor.clone(), scale)
    }

    /// Finite cone point positions, in divisor order.
    pub fn centers(&self) -> &[Complex64] {
        &self.centers
    }

    pub fn alphas(&self) -> &[ConeParam] {
        &self.alphas
    }

    pub fn alpha(&self, j: usize) -> Result<f64> {
        self.alphas
            .get(j)
            .map(ConeParam::value)
            .ok_or(Error::IndexOutOfRange { index: j, len: self.centers.len() })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// Cone parameter at infinity (1 when infinity is a smooth point).
    pub fn alpha_at_infinity(&self) -> f64 {
        self.divisor.infinity().map(|a| a.value()).unwrap_or(1.0)
    }

    /// Exponent of `omega` at infinity read in the chart `w = 1/z`:
    /// `-sum_j (alpha_j - 1) - 2` over finite points.
    pub fn exponent_at_infinity(&self) -> f64 {
        -self.exponents.iter().sum::<f64>() - 2.0
    }

    /// Beyond this radius evaluation switches to the chart at infinity.
    pub fn chart_radius(&self) -> f64 {
        self.chart_radius
    }

    /// `1e-6 * (diameter of the cone point set + 1)`.
    pub fn default_clearance(&self) -> f64 {
        let mut diam: f64 = 0.0;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                diam = diam.max((a - b).norm());
            }
        }
        1e-6 * (diam + 1.0)
    }

    /// Index of the finite cone point at exactly `z`, if any.
    pub fn cone_index_at(&self, z: Complex64) -> Option<usize> {
        self.centers.iter().position(|&p| p == z)
    }

    pub(crate) fn check_off_cone_points(&self, z: Complex64) -> Result<()> {
        match self.cone_index_at(z) {
            Some(index) => Err(Error::AtConePoint { index, exponent: self.exponents[index] }),
            None => Ok(()),
        }
    }

    /// `d omega / omega = sum_j (alpha_j - 1) / (z - P_j)`.
    pub fn log_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_cone_points(z)?;
        Ok(self.log_derivative_unchecked(z))
    }

    pub(crate) fn log_derivative_unchecked(&self, z: Complex64) -> Complex64 {
        self.centers
            .iter()
            .zip(&self.exponents)
            .map(|(&p, &e)| e / (z - p))
            .sum()
    }

    /// Residue of the logarithmic derivative at finite point `j`: `alpha_j - 1`.
    pub fn residue_at(&self, j: usize) -> Result<f64> {
        self.exact_residue_at(j).map(|r| r.value())
    }

    pub fn exact_residue_at(&self, j: usize) -> Result<ConeParam> {
        self.alphas
            .get(j)
            .map(ConeParam::exponent)
            .ok_or(Error::IndexOutOfRange { index: j, len: self.centers.len() })
    }

    /// `ln |z - P|`, switching to the factored form `ln|z| + ln|1 - P/z|`
    /// in the chart at infinity.
    fn ln_distance(&self, z: Complex64, p: Complex64) -> f64 {
        if z.norm() > self.chart_radius {
            z.norm().ln() + (Complex64::new(1.0, 0.0) - p / z).norm().ln()
        } else {
            (z - p).norm().ln()
        }
    }

    /// `ln f(z)` on the branch given by `args` (one per finite point).
    pub(crate) fn log_coefficient(&self, z: Complex64, args: &[f64]) -> Complex64 {
        let mut acc = self.scale.ln();
        for ((&p, &e), &a) in self.centers.iter().zip(&self.exponents).zip(args) {
            if e != 0.0 {
                acc += Complex64::new(e * self.ln_distance(z, p), e * a);
            }
        }
        acc
    }

    pub(crate) fn coefficient_with_args(&self, z: Complex64, args: &[f64]) -> Complex64 {
        self.log_coefficient(z, args).exp()
    }

    /// Coefficient at `z` on the branch continued along the straight segment
    /// from `anchor` (where the arguments are `anchor_args`). The factor of
    /// point `skip` is left out.
    pub(crate) fn coefficient_continued(
        &self,
        z: Complex64,
        anchor: Complex64,
        anchor_args: &[f64],
        skip: Option<usize>,
    ) -> Complex64 {
        let mut acc = self.scale.ln();
        for (k, ((&p, &e), &a)) in self.centers.iter().zip(&self.exponents).zip(anchor_args).enumerate() {
            if e == 0.0 || skip == Some(k) {
                continue;
            }
            let arg = a + turn(anchor, z, p);
            acc += Complex64::new(e * self.ln_distance(z, p), e * arg);
        }
        acc.exp()
    }

    /// `|C| * prod_{k != skip} |z - P_k|^(alpha_k - 1)`.
    pub(crate) fn modulus_excluding(&self, z: Complex64, skip: usize) -> f64 {
        let mut log = self.scale.norm().ln();
        for (k, (&p, &e)) in self.centers.iter().zip(&self.exponents).enumerate() {
            if k != skip && e != 0.0 {
                log += e * self.ln_distance(z, p);
            }
        }
        log.exp()
    }

    /// The coefficient `f` of `omega = f dz` on the branch `b` (located at `z`).
    pub fn evaluate_with_branch(&self, z: Complex64, b: &BranchState) -> Result<Complex64> {
        self.check_off_cone_points(z)?;
        if b.args.len() != self.centers.len() {
            return Err(Error::IndexOutOfRange { index: b.args.len(), len: self.centers.len() });
        }
        Ok(self.coefficient_with_args(z, &b.args))
    }

    /// Coefficient of `omega` in the chart `w = 1/z`:
    /// `-C * prod_j (1/w - P_j)^(alpha_j - 1) * w^-2`, on the branch whose
    /// arguments of `1/w - P_j` are `args`.
    pub fn evaluate_in_infinity_chart(&self, w: Complex64, args: &[f64]) -> Result<Complex64> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::AtConePoint { index: self.centers.len(), exponent: self.exponent_at_infinity() });
        }
        let z = w.inv();
        Ok(-self.coefficient_with_args(z, args) / (w * w))
    }

    /// `|f(z)|^2`; the same on every branch since the exponents are real.
    pub fn metric_density(&self, z: Complex64) -> Result<f64> {
        let mut log = self.scale.norm().ln();
        for (j, (&p, &e)) in self.centers.iter().zip(&self.exponents).enumerate() {
            if e == 0.0 {
                continue;
            }
            if z == p {
                return Err(Error::AtConePoint { index: j, exponent: e });
            }
            log += e * self.ln_distance(z, p);
        }
        Ok((2.0 * log).exp())
    }

    /// `f(z0) * exp(integral of d omega / omega along path)` with `f(z0)` on
    /// the principal branch. Uses only the single-valued logarithmic
    /// derivative, so it is independent of argument tracking.
    pub fn reconstruct_by_exponential(&self, path: &Path, settings: &QuadratureSettings) -> Result<Complex64> {
        path.check_clearance(&self.centers, None)?;
        let start = BranchState::principal(self, path.start())?;
        let f0 = self.log_coefficient(path.start(), &start.args);
        let mut total = Complex64::new(0.0, 0.0);
        for (a, b) in path.segments() {
            let d = b - a;
            let est = quadrature::integrate(|t| self.log_derivative_unchecked(a + d * t) * d, 0.0, 1.0, settings)?;
            total += est.value;
        }
        Ok((f0 + total).exp())
    }
}
