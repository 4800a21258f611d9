//! Least-squares fit of the local normal form of the developing map at a
//! cone point: `F = C0 (x - P)^alpha + C1` for `alpha != 0` and
//! `F = C0 log(x - P) + C1` for `alpha = 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::develop::integrate_regular_segment;
use crate::error::{Error, Result};
use crate::prym::{BranchState, PrymDifferential};
use crate::quadrature::QuadratureSettings;

/// Fits with a residual above this are rejected.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

const HALF_CIRCLE_SAMPLES: usize = 49;
const DEFAULT_CORRECTIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalForm {
    Power,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormFit {
    pub c0: Complex64,
    pub c1: Complex64,
    /// `max |F - model| / max |F - C1|` over the samples.
    pub residual: f64,
    pub form: NormalForm,
    /// Base point `P + radius` where the sampled `F` vanishes, and the
    /// principal branch there.
    pub base: BranchState,
}

impl NormalFormFit {
    /// The fitted model at `x` with `arg(x - P)` given explicitly.
    pub fn model(&self, alpha: f64, center: Complex64, x: Complex64, arg: f64) -> Complex64 {
        let log = Complex64::new((x - center).norm().ln(), arg);
        match self.form {
            NormalForm::Power => self.c0 * (log * alpha).exp() + self.c1,
            NormalForm::Log => self.c0 * log + self.c1,
        }
    }
}

/// Fit on the half circle `|x - P_j| = radius`, `arg` in `[0, pi]`, with
/// eight higher-order correction terms in the basis.
pub fn fit_local_normal_form(omega: &PrymDifferential, j: usize, radius: f64) -> Result<NormalFormFit> {
    fit_local_normal_form_with(omega, j, radius, DEFAULT_CORRECTIONS, &QuadratureSettings::with_tol(1e-12))
}

/// As [`fit_local_normal_form`], with `corrections` extra terms
/// `(x - P)^(alpha + k)` (or `(x - P)^k` in the log case), `k = 1..=corrections`.
/// With `corrections = 0` this is the bare two-coefficient fit.
pub fn fit_local_normal_form_with(
    omega: &PrymDifferential,
    j: usize,
    radius: f64,
    corrections: usize,
    settings: &QuadratureSettings,
) -> Result<NormalFormFit> {
    let alpha = omega.alpha(j)?;
    let center = omega.centers()[j];
    if !(radius > 0.0) {
        return Err(Error::InvalidPath(format!("radius must be positive, got {radius}")));
    }
    if let Some((k, _)) = omega
        .centers()
        .iter()
        .enumerate()
        .find(|(k, p)| *k != j && (**p - center).norm() <= radius)
    {
        return Err(Error::InvalidPath(format!("disk of radius {radius} contains cone point {k}")));
    }

    let form = if alpha == 0.0 { NormalForm::Log } else { NormalForm::Power };
    let thetas: Vec<f64> = (0..HALF_CIRCLE_SAMPLES)
        .map(|k| PI * k as f64 / (HALF_CIRCLE_SAMPLES - 1) as f64)
        .collect();
    let points: Vec<Complex64> = thetas.iter().map(|&t| center + Complex64::from_polar(radius, t)).collect();

    let base = BranchState::principal(omega, points[0])?;
    let mut args = base.args.clone();
    let mut values = vec![Complex64::new(0.0, 0.0)];
    let mut acc = Complex64::new(0.0, 0.0);
    for w in points.windows(2) {
        acc += integrate_regular_segment(omega, w[0], w[1], &mut args, settings)?;
        values.push(acc);
    }

    // Basis in the scaled variable u = (x - P)/radius with arg u = theta
    // (the principal argument at the base, continued along the arc).
    let theta0 = base.args[j];
    let ncols = 2 + corrections;
    let mut a = DMatrix::<Complex64>::zeros(thetas.len(), ncols);
    for (row, &t) in thetas.iter().enumerate() {
        let arg = theta0 + t;
        a[(row, 0)] = Complex64::new(1.0, 0.0);
        match form {
            NormalForm::Power => {
                for k in 0..=corrections {
                    a[(row, 1 + k)] = Complex64::from_polar(1.0, (alpha + k as f64) * arg);
                }
            }
            NormalForm::Log => {
                a[(row, 1)] = Complex64::new(0.0, arg);
                for k in 1..=corrections {
                    a[(row, 1 + k)] = Complex64::from_polar(1.0, k as f64 * arg);
                }
            }
        }
    }
    let rhs = DVector::from_vec(values.clone());
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|_| Error::FitFailure { residual: f64::INFINITY, limit: FIT_RESIDUAL_LIMIT })?;
    let fitted = &a * &coef;

    let constant = coef[0];
    let spread = values.iter().map(|v| (v - constant).norm()).fold(0.0, f64::max);
    let misfit = values.iter().zip(fitted.iter()).map(|(v, m)| (v - m).norm()).fold(0.0, f64::max);
    let residual = if spread > 0.0 { misfit / spread } else { f64::INFINITY };

    // A negative integer exponent leaves f single valued around P_j, but a
    // residue there adds a log term the power form cannot carry. The closed
    // circle integral measures it.
    let mut residual = residual;
    if alpha < 0.0 && alpha.fract() == 0.0 {
        let mut loop_integral = acc;
        let closing: Vec<Complex64> = (HALF_CIRCLE_SAMPLES - 1..=2 * (HALF_CIRCLE_SAMPLES - 1))
            .map(|k| center + Complex64::from_polar(radius, PI * k as f64 / (HALF_CIRCLE_SAMPLES - 1) as f64))
            .collect();
        for w in closing.windows(2) {
            loop_integral += integrate_regular_segment(omega, w[0], w[1], &mut args, settings)?;
        }
        residual = residual.max(loop_integral.norm() / spread);
    }

    let (c0, c1) = match form {
        NormalForm::Power => (coef[1] / radius.powf(alpha), constant),
        NormalForm::Log => (coef[1], constant - coef[1] * radius.ln()),
    };
    if residual > FIT_RESIDUAL_LIMIT || c0.norm() == 0.0 || !residual.is_finite() {
        return Err(Error::FitFailure { residual, limit: FIT_RESIDUAL_LIMIT });
    }
    Ok(NormalFormFit { c0, c1, residual, form, base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::develop::integrate_along_path;
    use crate::divisor::ConeParam;
    use crate::path::Path;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_power() {
        let w = PrymDifferential::from_points([(c(0., 0.), ConeParam::ratio(1, 2).unwrap())]).unwrap();
        let r = 0.25;
        let fit = fit_local_normal_form(&w, 0, r).unwrap();
        assert_eq!(fit.form, NormalForm::Power);
        assert!((fit.c0 - c(2., 0.)).norm() < 1e-10, "{:?}", fit.c0);
        // F(x) = 2 sqrt(x) - 2 sqrt(r)
        assert!((fit.c1 - c(-2.0 * r.sqrt(), 0.)).norm() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn exact_log() {
        let w = PrymDifferential::from_points([(c(1., 1.), ConeParam::integer(0))]).unwrap();
        let fit = fit_local_normal_form(&w, 0, 0.5).unwrap();
        assert_eq!(fit.form, NormalForm::Log);
        assert!((fit.c0 - c(1., 0.)).norm() < 1e-10);
        assert!((fit.c1 - c(-(0.5f64).ln(), 0.)).norm() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn three_point_divisor_fits_and_converges() {
        let third = ConeParam::ratio(1, 3).unwrap();
        let w = PrymDifferential::from_points([(c(0., 0.), third), (c(1., 0.), third)]).unwrap();
        for j in 0..2 {
            let s = QuadratureSettings::with_tol(1e-12);
            let coarse = fit_local_normal_form_with(&w, j, 1e-3, 0, &s).unwrap();
            let fine = fit_local_normal_form_with(&w, j, 1e-4, 0, &s).unwrap();
            assert!(coarse.c0.norm() > 0.1 && fine.c0.norm() > 0.1);
            assert!(fine.residual < coarse.residual);
            // O(radius) residual: a decade in radius gains close to a decade
            let rate = (coarse.residual / fine.residual).log10();
            assert!(rate > 0.9, "rate {rate}");
            let full = fit_local_normal_form(&w, j, 1e-2).unwrap();
            assert!(full.residual < 1e-9);
        }
    }

    #[test]
    fn continuation_around_point_rotates_by_cone_angle() {
        let w = PrymDifferential::from_points([
            (c(0., 0.), ConeParam::ratio(1, 3).unwrap()),
            (c(1., 0.5), ConeParam::ratio(3, 4).unwrap()),
            (c(-1., 1.), ConeParam::ratio(5, 2).unwrap()),
        ])
        .unwrap();
        let r = 0.05;
        let fit = fit_local_normal_form(&w, 0, r).unwrap();
        let loop_path = Path::circle(c(0., 0.), r, 256, 0.0, 1e-9).unwrap();
        let s = QuadratureSettings::with_tol(1e-12);
        let after = integrate_along_path(&w, &loop_path, &fit.base, &s).unwrap().value;
        let rho = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let lhs = after - fit.c1;
        let rhs = rho * (c(0., 0.) - fit.c1);
        assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn negative_integer_with_residue_fails() {
        // f = z^-2 (z - 1): residue 1 at 0 gives a log term
        let w = PrymDifferential::from_points([(c(0., 0.), ConeParam::integer(-1)), (c(1., 0.), ConeParam::integer(2))]).unwrap();
        assert!(matches!(fit_local_normal_form(&w, 0, 0.1), Err(Error::FitFailure { .. })));
    }

    #[test]
    fn negative_integer_without_residue_fits() {
        let w = PrymDifferential::from_points([(c(0., 0.), ConeParam::integer(-1))]).unwrap();
        let fit = fit_local_normal_form(&w, 0, 0.1).unwrap();
        assert!((fit.c0 - c(-1., 0.)).norm() < 1e-10, "{:?}", fit.c0);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn rejects_crowded_disk() {
        let w = PrymDifferential::from_points([(c(0., 0.), ConeParam::ratio(1, 2).unwrap()), (c(0.1, 0.), ConeParam::ratio(1, 2).unwrap())]).unwrap();
        assert!(matches!(fit_local_normal_form(&w, 0, 0.2), Err(Error::InvalidPath(_))));
    }
}
