//! Indicial equation and Frobenius series for `L u = x^2 u'' + q(x) u = 0`,
//! `q(x) = sum_k b_k x^k` with `b_0 = (1 - alpha^2) / 4`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative resonance tolerance: `|R_m| <= tol * max(1, sum |b_k|)`.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Roots `s1 = (1 - alpha)/2`, `s2 = (1 + alpha)/2` of the indicial polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialPair {
    pub s1: f64,
    pub s2: f64,
    pub alpha: f64,
}

impl IndicialPair {
    pub fn is_double(&self) -> bool {
        self.s1 == self.s2
    }

    pub fn larger(&self) -> f64 {
        self.s1.max(self.s2)
    }

    pub fn smaller(&self) -> f64 {
        self.s1.min(self.s2)
    }
}

/// `h(s) = s (s - 1) + (1 - alpha^2) / 4`.
pub fn indicial_polynomial(alpha: f64, s: f64) -> f64 {
    s * (s - 1.0) + (1.0 - alpha * alpha) / 4.0
}

pub fn indicial_roots(alpha: f64) -> IndicialPair {
    IndicialPair { s1: (1.0 - alpha) / 2.0, s2: (1.0 + alpha) / 2.0, alpha }
}

/// Truncated series `x^s * sum_{n <= N} c_n x^n`, `c_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeries {
    pub root: f64,
    pub coefficients: Vec<Complex64>,
    /// Index `m` where `h(s + m) = 0` and `R_m` vanished, so `c_m` was free
    /// (set to 0).
    pub resonance: Option<usize>,
}

impl FrobeniusSeries {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `x^s * sum c_n x^n` on the principal branch of `x^s`.
    pub fn evaluate(&self, x: Complex64) -> Complex64 {
        let poly = self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
        (x.ln() * self.root).exp() * poly
    }
}

fn h_at(b0: f64, s: f64) -> f64 {
    s * (s - 1.0) + b0
}

fn check_inputs(b: &[Complex64], s: f64) -> Result<f64> {
    let b0 = b.first().ok_or_else(|| Error::InvalidSeries("q needs at least b_0".into()))?;
    if b0.im.abs() > 1e-12 {
        return Err(Error::InvalidSeries(format!("b_0 = {b0} must be real")));
    }
    if !s.is_finite() || h_at(b0.re, s).abs() > 1e-12 * (1.0 + s * s) {
        return Err(Error::InvalidSeries(format!("s = {s} is not a root of the indicial polynomial")));
    }
    Ok(b0.re)
}

/// Solves `h(s + n) c_n + R_n = 0`, `R_n = sum_{i<n} c_i b_{n-i}`, for
/// `n = 1..=n_terms`.
pub fn frobenius_coefficients(b: &[Complex64], s: f64, n_terms: usize) -> Result<FrobeniusSeries> {
    frobenius_coefficients_with_tol(b, s, n_terms, RESONANCE_TOL)
}

pub fn frobenius_coefficients_with_tol(
    b: &[Complex64],
    s: f64,
    n_terms: usize,
    resonance_tol: f64,
) -> Result<FrobeniusSeries> {
    let b0 = check_inputs(b, s)?;
    let b_mass: f64 = b.iter().map(|x| x.norm()).sum();
    let r_tol = resonance_tol * b_mass.max(1.0);
    let mut c = Vec::with_capacity(n_terms + 1);
    c.push(Complex64::new(1.0, 0.0));
    let mut resonance = None;
    for n in 1..=n_terms {
        let r_n: Complex64 = (0..n).filter(|&i| n - i < b.len()).map(|i| c[i] * b[n - i]).sum();
        let h = h_at(b0, s + n as f64);
        if h.abs() <= 1e-12 * (1.0 + (s + n as f64).powi(2)) {
            if r_n.norm() > r_tol {
                return Err(Error::ResonanceObstruction { m: n, remainder: r_n.norm() });
            }
            resonance = Some(n);
            c.push(Complex64::new(0.0, 0.0));
        } else {
            c.push(-r_n / h);
        }
    }
    Ok(FrobeniusSeries { root: s, coefficients: c, resonance })
}

/// `x^2 u'' + q(x) u` for the truncated series, with `q` the polynomial
/// given by `b`.
///
/// Evaluated through the exact identity
/// `L(x^s sum c_n x^n) = x^s sum_m (h(s+m) c_m + sum_{i<m} c_i b_{m-i}) x^m`,
/// which avoids the cancellation between the two large terms near `x = 0`.
pub fn ode_residual(series: &FrobeniusSeries, b: &[Complex64], x: Complex64) -> Result<Complex64> {
    let b0 = b.first().ok_or_else(|| Error::InvalidSeries("q needs at least b_0".into()))?.re;
    let c = &series.coefficients;
    let s = series.root;
    let top = c.len() + b.len().saturating_sub(1);
    let coeff = |i: usize| c.get(i).copied().unwrap_or_default();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in (0..top).rev() {
        let mut e = coeff(m) * h_at(b0, s + m as f64);
        for i in m.saturating_sub(b.len() - 1)..m.min(c.len()) {
            e += c[i] * b[m - i];
        }
        acc = acc * x + e;
    }
    Ok((x.ln() * s).exp() * acc)
}

/// Log-log slope of `|ode_residual|` between radii `r1` and `r2` along the
/// ray of direction `e^{i theta}`.
pub fn residual_order(series: &FrobeniusSeries, b: &[Complex64], r1: f64, r2: f64, theta: f64) -> Result<f64> {
    let e1 = ode_residual(series, b, Complex64::from_polar(r1, theta))?.norm();
    let e2 = ode_residual(series, b, Complex64::from_polar(r2, theta))?.norm();
    Ok((e1.ln() - e2.ln()) / (r1.ln() - r2.ln()))
}
