//! Real-coefficient divisors on the Riemann sphere.
//!
//! A divisor is a finite list of cone points `P_j` with cone parameters
//! `alpha_j` (cone angle `2*pi*alpha_j`); the formal exponent carried by
//! `P_j` is `alpha_j - 1`. On the sphere a flat conical metric with these
//! cone points exists iff the exponents sum to the Euler characteristic,
//! `sum_j (alpha_j - 1) = -2`.
//!
//! Cone parameters given as rationals (`"p/q"` or terminating decimal
//! strings) are kept exact so that the degree check is an identity rather
//! than a floating-point comparison.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedSub, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Euler characteristic of the sphere.
pub const SPHERE_EULER_CHARACTERISTIC: i128 = -2;

/// Tolerance used for Gauss-Bonnet checks once any parameter is inexact.
pub const INEXACT_DEGREE_TOL: f64 = 1e-12;

/// Above this magnitude quadrature becomes badly conditioned; reported as a
/// warning only.
pub const LARGE_ALPHA_WARNING: f64 = 50.0;

pub type Rational = Ratio<i128>;

/// A cone parameter `alpha`, either exact rational or a finite real.
#[derive(Clone, Copy, PartialEq)]
pub enum ConeParam {
    Exact(Rational),
    Real(f64),
}

impl ConeParam {
    pub fn ratio(numer: i128, denom: i128) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(ConeParam::Exact(Rational::new(numer, denom)))
    }

    pub fn integer(n: i128) -> Self {
        ConeParam::Exact(Rational::from_integer(n))
    }

    pub fn real(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidDivisor(format!("cone parameter {value} is not finite")));
        }
        Ok(ConeParam::Real(value))
    }

    pub fn value(&self) -> f64 {
        match self {
            ConeParam::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            ConeParam::Real(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ConeParam::Exact(_))
    }

    /// The divisor exponent `alpha - 1`.
    pub fn exponent(&self) -> ConeParam {
        self.checked_sub(&ConeParam::integer(1))
    }

    /// `alpha == 1`: a smooth point. Exact for rationals, within
    /// [`INEXACT_DEGREE_TOL`] otherwise.
    pub fn is_smooth(&self) -> bool {
        match self {
            ConeParam::Exact(r) => r.is_one(),
            ConeParam::Real(x) => (x - 1.0).abs() <= INEXACT_DEGREE_TOL,
        }
    }

    /// Sum that stays exact while both sides are exact and no overflow occurs.
    pub fn checked_add(&self, other: &ConeParam) -> ConeParam {
        match (self, other) {
            (ConeParam::Exact(a), ConeParam::Exact(b)) => match a.checked_add(b) {
                Some(s) => ConeParam::Exact(s),
                None => ConeParam::Real(self.value() + other.value()),
            },
            _ => ConeParam::Real(self.value() + other.value()),
        }
    }

    pub fn checked_sub(&self, other: &ConeParam) -> ConeParam {
        match (self, other) {
            (ConeParam::Exact(a), ConeParam::Exact(b)) => match a.checked_sub(b) {
                Some(s) => ConeParam::Exact(s),
                None => ConeParam::Real(self.value() - other.value()),
            },
            _ => ConeParam::Real(self.value() - other.value()),
        }
    }

    fn neg(&self) -> ConeParam {
        ConeParam::integer(0).checked_sub(self)
    }
}

impl fmt::Debug for ConeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ConeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeParam::Exact(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            ConeParam::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ConeParam::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ConeParam {
    type Err = Error;

    /// Accepts `"p/q"`, integers, terminating decimals (kept exact) and any
    /// other float syntax (kept as a real).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: i128 = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return ConeParam::ratio(p, q);
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(ConeParam::Exact(r));
        }
        let x: f64 = s.parse().map_err(|_| Error::Parse(format!("bad cone parameter {s:?}")))?;
        ConeParam::real(x)
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 30 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i128.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Location of a cone point on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    Finite(Complex64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub position: Position,
    pub alpha: ConeParam,
}

impl ConePoint {
    pub fn finite(z: Complex64, alpha: ConeParam) -> Self {
        ConePoint { position: Position::Finite(z), alpha }
    }

    pub fn at_infinity(alpha: ConeParam) -> Self {
        ConePoint { position: Position::Infinity, alpha }
    }
}

/// Outcome of the Gauss-Bonnet degree check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussBonnet {
    /// Degree equals -2; `exact` records whether this was an exact identity.
    Pass { exact: bool },
    /// `deficit = degree + 2`.
    Fail { deficit: f64 },
}

impl GaussBonnet {
    pub fn passed(&self) -> bool {
        matches!(self, GaussBonnet::Pass { .. })
    }
}

/// An ordered list of distinct cone points, at most one of them at infinity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Divisor {
    points: Vec<ConePoint>,
}

impl Divisor {
    pub fn new(points: Vec<ConePoint>) -> Result<Self> {
        let mut seen_infinity = false;
        for (i, p) in points.iter().enumerate() {
            if !p.alpha.value().is_finite() {
                return Err(Error::InvalidDivisor(format!("point {i}: alpha is not finite")));
            }
            match p.position {
                Position::Infinity => {
                    if seen_infinity {
                        return Err(Error::InvalidDivisor("more than one point at infinity".into()));
                    }
                    seen_infinity = true;
                }
                Position::Finite(z) => {
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        return Err(Error::InvalidDivisor(format!("point {i}: position is not finite")));
                    }
                    if points[..i].iter().any(|q| q.position == p.position) {
                        return Err(Error::InvalidDivisor(format!("point {i}: duplicate position {z}")));
                    }
                }
            }
        }
        Ok(Divisor { points })
    }

    pub fn empty() -> Self {
        Divisor::default()
    }

    /// Convenience constructor from finite points only.
    pub fn from_finite<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, ConeParam)>,
    {
        Divisor::new(points.into_iter().map(|(z, a)| ConePoint::finite(z, a)).collect())
    }

    pub fn points(&self) -> &[ConePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Finite cone points in input order.
    pub fn finite_points(&self) -> impl Iterator<Item = (Complex64, ConeParam)> + '_ {
        self.points.iter().filter_map(|p| match p.position {
            Position::Finite(z) => Some((z, p.alpha)),
            Position::Infinity => None,
        })
    }

    pub fn infinity(&self) -> Option<ConeParam> {
        self.points
            .iter()
            .find(|p| p.position == Position::Infinity)
            .map(|p| p.alpha)
    }

    fn degree_param(&self) -> ConeParam {
        self.points
            .iter()
            .fold(ConeParam::integer(0), |acc, p| acc.checked_add(&p.alpha.exponent()))
    }

    /// `sum_j (alpha_j - 1)`, including the point at infinity if present.
    pub fn degree(&self) -> f64 {
        self.degree_param().value()
    }

    /// The degree as an exact rational, when every parameter is exact.
    pub fn exact_degree(&self) -> Option<Rational> {
        match self.degree_param() {
            ConeParam::Exact(r) => Some(r),
            ConeParam::Real(_) => None,
        }
    }

    pub fn validate_gauss_bonnet(&self) -> GaussBonnet {
        let chi = Rational::from_integer(SPHERE_EULER_CHARACTERISTIC);
        match self.degree_param() {
            ConeParam::Exact(d) => {
                if d == chi {
                    GaussBonnet::Pass { exact: true }
                } else {
                    GaussBonnet::Fail { deficit: (d - chi).to_f64().unwrap_or(f64::NAN) }
                }
            }
            ConeParam::Real(d) => {
                let deficit = d + 2.0;
                if deficit.abs() <= INEXACT_DEGREE_TOL {
                    GaussBonnet::Pass { exact: false }
                } else {
                    GaussBonnet::Fail { deficit }
                }
            }
        }
    }

    /// Adds the point at infinity that makes the degree exactly -2. A
    /// resulting `alpha_inf = 1` is a smooth point and is not stored.
    pub fn complete_at_infinity(&self) -> Result<Divisor> {
        if self.infinity().is_some() {
            return Err(Error::InvalidDivisor("divisor already has a point at infinity".into()));
        }
        let alpha_inf = ConeParam::integer(-1).checked_sub(&self.degree_param());
        let mut points = self.points.clone();
        if !alpha_inf.is_smooth() {
            points.push(ConePoint::at_infinity(alpha_inf));
        }
        Ok(Divisor { points })
    }

    /// Divisor product: exponents add at shared positions and points whose
    /// summed exponent vanishes are dropped.
    pub fn combine(&self, other: &Divisor) -> Divisor {
        let mut points: Vec<ConePoint> = Vec::with_capacity(self.points.len() + other.points.len());
        for p in self.points.iter().chain(other.points.iter()) {
            match points.iter_mut().find(|q| q.position == p.position) {
                Some(q) => q.alpha = q.alpha.checked_add(&p.alpha.exponent()),
                None => points.push(*p),
            }
        }
        points.retain(|p| !p.alpha.exponent().is_zero_param());
        Divisor { points }
    }

    /// The inverse divisor: every exponent negated.
    pub fn inverse(&self) -> Divisor {
        let points = self
            .points
            .iter()
            .map(|p| ConePoint {
                position: p.position,
                alpha: ConeParam::integer(1).checked_add(&p.alpha.exponent().neg()),
            })
            .collect();
        Divisor { points }
    }

    /// Indices of points whose `|alpha|` exceeds [`LARGE_ALPHA_WARNING`].
    pub fn large_alpha_warnings(&self) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.alpha.value().abs() > LARGE_ALPHA_WARNING)
            .map(|(i, _)| i)
            .collect()
    }
}

impl ConeParam {
    fn is_zero_param(&self) -> bool {
        match self {
            ConeParam::Exact(r) => r.is_zero(),
            ConeParam::Real(x) => x.abs() <= INEXACT_DEGREE_TOL,
        }
    }
}
