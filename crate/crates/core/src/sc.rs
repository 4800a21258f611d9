//! Schwarz-Christoffel maps from the upper half-plane onto polygons.
//!
//! A polygon with vertices `w_1..w_n` (counterclockwise) and interior angles
//! `pi * alpha_k` is the image of
//! `F(z) = C * integral from x_1 to z of prod_k (t - x_k)^(alpha_k - 1) dt`
//! with prevertices `x_1 < ... < x_{n-1}` on the real axis and `x_n` at
//! infinity. The angles close up iff `sum_k alpha_k = n - 2`, which is the
//! Gauss-Bonnet condition for the divisor of prevertices.
//!
//! Prevertices are normalized to `x_1 = 0`, `x_2 = 1`. The parameter problem
//! solves for `x_3..x_{n-1}` through the log gaps `y_k = ln(x_{k+1} - x_k)`,
//! which keeps them ordered without constraints.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::develop::{integrate_along_path, integrate_to_cone_point, integrate_to_infinity};
use crate::divisor::{ConeParam, ConePoint, Divisor};
use crate::error::{Error, Result};
use crate::lm::{self, LmOptions};
use crate::path::{distance_to_segment, Path};
use crate::prym::{BranchState, PrymDifferential};
use crate::quadrature::QuadratureSettings;

/// Interior angles of a [`PolygonSpec`] must match `pi * alpha_k` this closely.
pub const ANGLE_TOL: f64 = 1e-8;

/// Prevertices `0 = x_1 < 1 = x_2 < ... < x_{n-1}`, with `x_n = infinity`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevertexConfig {
    finite: Vec<f64>,
}

impl PrevertexConfig {
    pub fn new(finite: Vec<f64>) -> Result<Self> {
        if finite.len() < 2 {
            return Err(Error::InvalidPrevertices("need at least two finite prevertices".into()));
        }
        if finite[0] != 0.0 || finite[1] != 1.0 {
            return Err(Error::InvalidPrevertices(format!(
                "normalization requires x_1 = 0 and x_2 = 1, got {} and {}",
                finite[0], finite[1]
            )));
        }
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPrevertices("prevertices must be finite".into()));
        }
        if finite.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPrevertices("prevertices must be strictly increasing".into()));
        }
        Ok(PrevertexConfig { finite })
    }

    /// The `n = 3` configuration `(0, 1, infinity)`.
    pub fn triangle() -> Self {
        PrevertexConfig { finite: vec![0.0, 1.0] }
    }

    /// From the log gaps `y_k = ln(x_{k+1} - x_k)`, `k = 2..n-2`.
    pub fn from_log_gaps(gaps: &[f64]) -> Result<Self> {
        let mut finite = vec![0.0, 1.0];
        for &y in gaps {
            let last = *finite.last().unwrap_or(&1.0);
            finite.push(last + y.exp());
        }
        PrevertexConfig::new(finite)
    }

    /// `x_k = tan(pi (k-1) / (2(n-1)))`, rescaled so that `x_2 = 1`.
    pub fn initial_guess(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPrevertices(format!("need n >= 3 vertices, got {n}")));
        }
        let m = (n - 1) as f64;
        let unit = (PI / (2.0 * m)).tan();
        let finite = (0..n - 1).map(|k| if k == 1 { 1.0 } else { (PI * k as f64 / (2.0 * m)).tan() / unit }).collect();
        PrevertexConfig::new(finite)
    }

    /// Finite prevertices `x_1..x_{n-1}`.
    pub fn finite(&self) -> &[f64] {
        &self.finite
    }

    /// Number of polygon vertices, counting the one at infinity.
    pub fn vertex_count(&self) -> usize {
        self.finite.len() + 1
    }

    pub fn log_gaps(&self) -> Vec<f64> {
        self.finite[1..].windows(2).map(|w| (w[1] - w[0]).ln()).collect()
    }
}

/// Target polygon: vertices in counterclockwise order and the cone
/// parameter `alpha_k` (interior angle `pi * alpha_k`) at each.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSpec {
    vertices: Vec<Complex64>,
    alphas: Vec<ConeParam>,
}

fn proper_crossing(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| ((p - o).conj() * (q - o)).im;
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    // touching or collinear overlap
    let on = |p: Complex64, q: Complex64, r: Complex64| distance_to_segment(r, p, q) == 0.0;
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

fn sum_params(alphas: &[ConeParam]) -> ConeParam {
    alphas.iter().fold(ConeParam::integer(0), |acc, a| acc.checked_add(a))
}

impl PolygonSpec {
    /// Checks `n >= 3`, distinct vertices, a simple counterclockwise
    /// boundary, `sum alpha_k = n - 2`, and that each interior angle is
    /// `pi * alpha_k` within [`ANGLE_TOL`].
    pub fn new(vertices: Vec<Complex64>, alphas: Vec<ConeParam>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {n}")));
        }
        if alphas.len() != n {
            return Err(Error::InvalidPolygon(format!("{n} vertices but {} angle parameters", alphas.len())));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidPolygon("vertices must be finite".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidPolygon(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        let edge = |k: usize| (vertices[k], vertices[(k + 1) % n]);
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share a vertex by construction
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = edge(i);
                let (c, d) = edge(j);
                if proper_crossing(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        let area2: f64 = (0..n).map(|k| {
            let (a, b) = edge(k);
            a.re * b.im - b.re * a.im
        }).sum();
        if area2 <= 0.0 {
            return Err(Error::InvalidPolygon("vertices must be in counterclockwise order".into()));
        }
        let total = sum_params(&alphas);
        let target = (n - 2) as f64;
        let closes = match (total, total.is_exact()) {
            (ConeParam::Exact(r), true) => r == num_rational::Ratio::from_integer((n - 2) as i128),
            _ => (total.value() - target).abs() <= 1e-12 * target.max(1.0),
        };
        if !closes {
            return Err(Error::InvalidPolygon(format!("angle parameters sum to {total}, expected {}", n - 2)));
        }
        for k in 0..n {
            let prev = vertices[(k + n - 1) % n];
            let here = vertices[k];
            let next = vertices[(k + 1) % n];
            let exterior = ((next - here) / (here - prev)).arg();
            let interior = PI - exterior;
            let want = PI * alphas[k].value();
            if (interior - want).abs() > ANGLE_TOL {
                return Err(Error::InvalidPolygon(format!(
                    "interior angle at vertex {k} is {interior}, alpha = {} asks for {want}",
                    alphas[k]
                )));
            }
        }
        Ok(PolygonSpec { vertices, alphas })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn alphas(&self) -> &[ConeParam] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `|w_{k+1} - w_k|` for `k = 1..n`, the last side closing back to `w_1`.
    pub fn side_lengths(&self) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n).map(|k| (self.vertices[(k + 1) % n] - self.vertices[k]).norm()).collect()
    }
}

/// Indices of vertices with `alpha = 1`, where the polygon has no corner.
pub fn smooth_vertices(fractions: &[ConeParam]) -> Vec<usize> {
    fractions.iter().enumerate().filter(|(_, a)| a.is_smooth()).map(|(k, _)| k).collect()
}

/// The map `F` for one prevertex configuration.
#[derive(Debug, Clone)]
pub struct ScMap {
    config: PrevertexConfig,
    omega: PrymDifferential,
    base: Complex64,
    settings: QuadratureSettings,
}

impl ScMap {
    pub fn new(config: &PrevertexConfig, fractions: &[ConeParam], scale: Complex64, settings: QuadratureSettings) -> Result<Self> {
        let n = config.vertex_count();
        if fractions.len() != n {
            return Err(Error::InvalidPrevertices(format!(
                "{} prevertices (with infinity) but {} angle parameters",
                n,
                fractions.len()
            )));
        }
        let mut points: Vec<ConePoint> = config
            .finite
            .iter()
            .zip(fractions)
            .map(|(&x, &a)| ConePoint::finite(Complex64::new(x, 0.0), a))
            .collect();
        if !fractions[n - 1].is_smooth() {
            points.push(ConePoint::at_infinity(fractions[n - 1]));
        }
        let omega = PrymDifferential::new(Divisor::new(points)?, scale)?;
        let lo = config.finite[0];
        let hi = config.finite[n - 2];
        let base = Complex64::new(0.5 * (lo + hi), (0.5 * (hi - lo)).max(1.0));
        Ok(ScMap { config: config.clone(), omega, base, settings })
    }

    pub fn differential(&self) -> &PrymDifferential {
        &self.omega
    }

    pub fn config(&self) -> &PrevertexConfig {
        &self.config
    }

    fn base_branch(&self) -> Result<BranchState> {
        BranchState::principal(&self.omega, self.base)
    }

    fn clearance_along(&self, a: Complex64, b: Complex64) -> f64 {
        self.omega.centers().iter().map(|&p| distance_to_segment(p, a, b)).fold(f64::INFINITY, f64::min) * 0.5
    }

    /// Straight path from `from` into prevertex `j`, with clearance half the
    /// distance to the nearest other prevertex.
    fn path_into(&self, from: Complex64, j: usize) -> Result<Path> {
        let to = self.omega.centers()[j];
        let others = self
            .omega
            .centers()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, &p)| distance_to_segment(p, from, to))
            .fold(f64::INFINITY, f64::min);
        Path::segment(from, to, if others.is_finite() { 0.5 * others } else { 1.0 })
    }

    /// Integral from the interior base point to `z` in the closed upper
    /// half-plane, on the principal branch (continuous there).
    fn integral_from_base(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Err(Error::InvalidPath(format!("{z} is below the real axis")));
        }
        let b0 = self.base_branch()?;
        if let Some(j) = self.omega.cone_index_at(z) {
            return integrate_to_cone_point(&self.omega, &self.path_into(self.base, j)?, &b0, &self.settings);
        }
        let clearance = self.clearance_along(self.base, z);
        if !(clearance > 0.0) {
            return Err(Error::InvalidPath(format!("segment to {z} touches a prevertex")));
        }
        let path = Path::segment(self.base, z, clearance)?;
        Ok(integrate_along_path(&self.omega, &path, &b0, &self.settings)?.value)
    }

    /// `F(z)`, normalized by `F(x_1) = 0`.
    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.integral_from_base(z)? - self.integral_from_base(Complex64::new(self.config.finite[0], 0.0))?)
    }

    /// `F(infinity)`, finite iff the parameter at infinity is positive.
    pub fn at_infinity(&self) -> Result<Complex64> {
        let b0 = self.base_branch()?;
        let clearance = self.omega.default_clearance().min(0.5 * self.base.im);
        let far = integrate_to_infinity(&self.omega, &b0, clearance, &self.settings)?;
        Ok(far - self.integral_from_base(Complex64::new(self.config.finite[0], 0.0))?)
    }

    /// Images `F(x_1)..F(x_n)` of all prevertices.
    pub fn vertex_images(&self) -> Result<Vec<Complex64>> {
        let x1 = self.integral_from_base(Complex64::new(self.config.finite[0], 0.0))?;
        let mut out = vec![Complex64::new(0.0, 0.0)];
        for &x in &self.config.finite[1..] {
            out.push(self.integral_from_base(Complex64::new(x, 0.0))? - x1);
        }
        out.push(self.at_infinity()?);
        Ok(out)
    }

    /// `|F(x_{k+1}) - F(x_k)|` for finite `k`, integrated along the real
    /// interval split at its midpoint.
    fn finite_side(&self, k: usize) -> Result<f64> {
        let a = self.config.finite[k];
        let b = self.config.finite[k + 1];
        let mid = Complex64::new(0.5 * (a + b), 0.0);
        let b0 = BranchState::principal(&self.omega, mid)?;
        let right = integrate_to_cone_point(&self.omega, &self.path_into(mid, k + 1)?, &b0, &self.settings)?;
        let left = integrate_to_cone_point(&self.omega, &self.path_into(mid, k)?, &b0, &self.settings)?;
        Ok((right - left).norm())
    }

    /// `|F(infinity) - F(x_{n-1})|`, along the real axis to the right of
    /// the last finite prevertex.
    fn infinite_side(&self) -> Result<f64> {
        let finite = &self.config.finite;
        let last = finite[finite.len() - 1];
        let gap = last - finite[finite.len() - 2];
        let start = Complex64::new(last + gap, 0.0);
        let b0 = BranchState::principal(&self.omega, start)?;
        let far = integrate_to_infinity(&self.omega, &b0, 0.5 * gap, &self.settings)?;
        let back = integrate_to_cone_point(&self.omega, &self.path_into(start, finite.len() - 1)?, &b0, &self.settings)?;
        Ok((far - back).norm())
    }

    /// Lengths of sides `1..n-1`; the last runs from `F(x_{n-1})` to
    /// `F(infinity)`. Requires every `alpha_k > 0`.
    pub fn side_lengths(&self) -> Result<Vec<f64>> {
        self.check_bounded()?;
        let mut out = Vec::with_capacity(self.config.finite.len());
        for k in 0..self.config.finite.len() - 1 {
            out.push(self.finite_side(k)?);
        }
        out.push(self.infinite_side()?);
        Ok(out)
    }

    /// Lengths of the finite sides `1..n-2` only.
    pub fn finite_side_lengths(&self) -> Result<Vec<f64>> {
        self.check_bounded()?;
        (0..self.config.finite.len() - 1).map(|k| self.finite_side(k)).collect()
    }

    fn check_bounded(&self) -> Result<()> {
        for (j, a) in self.omega.alphas().iter().enumerate() {
            if a.value() <= 0.0 {
                return Err(Error::Divergent { index: j, alpha: a.value() });
            }
        }
        let a_inf = self.omega.alpha_at_infinity();
        if a_inf <= 0.0 {
            return Err(Error::Divergent { index: self.omega.centers().len(), alpha: a_inf });
        }
        Ok(())
    }
}

/// `F(z)` for unit scale; see [`ScMap::forward`].
pub fn sc_forward(config: &PrevertexConfig, fractions: &[ConeParam], z: Complex64) -> Result<Complex64> {
    ScMap::new(config, fractions, Complex64::new(1.0, 0.0), QuadratureSettings::with_tol(1e-12))?.forward(z)
}

/// Side lengths `1..n-1` for unit scale; see [`ScMap::side_lengths`].
pub fn sc_side_lengths(config: &PrevertexConfig, fractions: &[ConeParam]) -> Result<Vec<f64>> {
    sc_side_lengths_scaled(config, fractions, Complex64::new(1.0, 0.0))
}

pub fn sc_side_lengths_scaled(config: &PrevertexConfig, fractions: &[ConeParam], scale: Complex64) -> Result<Vec<f64>> {
    ScMap::new(config, fractions, scale, QuadratureSettings::with_tol(1e-12))?.side_lengths()
}

/// Solver controls for [`sc_solve_parameters_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Stop once every side ratio matches to this relative accuracy.
    pub tol: f64,
    pub quadrature: QuadratureSettings,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iters: 200, tol: 1e-8, quadrature: QuadratureSettings::with_tol(1e-12) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScSolution {
    pub config: PrevertexConfig,
    /// `max_k |ratio_k / target_k - 1|` over sides `2..n-2` against side 1.
    pub mismatch: f64,
    pub iterations: usize,
}

fn log_ratio_residual(sides: &[f64], targets: &[f64]) -> Vec<f64> {
    (1..sides.len()).map(|k| (sides[k] / sides[0]).ln() - (targets[k] / targets[0]).ln()).collect()
}

fn mismatch_of(residual: &[f64]) -> f64 {
    residual.iter().map(|r| r.exp_m1().abs()).fold(0.0, f64::max)
}

pub fn sc_solve_parameters(poly: &PolygonSpec) -> Result<ScSolution> {
    sc_solve_parameters_with(poly, &PrevertexConfig::initial_guess(poly.len())?, &SolverOptions::default())
}

/// Solves the parameter problem from the given starting configuration.
pub fn sc_solve_parameters_with(poly: &PolygonSpec, initial: &PrevertexConfig, opts: &SolverOptions) -> Result<ScSolution> {
    let n = poly.len();
    if initial.vertex_count() != n {
        return Err(Error::InvalidPrevertices(format!("initial guess has {} prevertices, polygon has {n}", initial.vertex_count())));
    }
    for (k, a) in poly.alphas().iter().enumerate() {
        if a.value() <= 0.0 {
            return Err(Error::InvalidPolygon(format!("alpha at vertex {k} must be positive, got {a}")));
        }
    }
    if n == 3 {
        return Ok(ScSolution { config: PrevertexConfig::triangle(), mismatch: 0.0, iterations: 0 });
    }
    let targets: Vec<f64> = poly.side_lengths()[..n - 2].to_vec();
    let fractions = poly.alphas();
    let residual = |gaps: &[f64]| -> Result<Vec<f64>> {
        let config = PrevertexConfig::from_log_gaps(gaps)?;
        let map = ScMap::new(&config, fractions, Complex64::new(1.0, 0.0), opts.quadrature)?;
        Ok(log_ratio_residual(&map.finite_side_lengths()?, &targets))
    };
    let tol = opts.tol;
    let lm_opts = LmOptions { max_iters: opts.max_iters, diff_step: 1e-6, max_step: 2.0 };
    let out = lm::minimize(residual, initial.log_gaps(), |r| mismatch_of(r) <= tol, &lm_opts)?;
    let mismatch = mismatch_of(&out.residual);
    if !out.converged {
        return Err(Error::SolverNonConvergence { iterations: out.iterations, mismatch });
    }
    Ok(ScSolution { config: PrevertexConfig::from_log_gaps(&out.x)?, mismatch, iterations: out.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BETA_THIRD_THIRD: f64 = 5.299916250856349871941;
    /// `x_3` for the square with unit prevertex spacing.
    const SQUARE_X3: f64 = 2.0;
    /// `x_3` for the rectangle with sides (2, 1, 2, 1).
    const RECTANGLE_X3: f64 = 1.0303300858899106;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn thirds() -> Vec<ConeParam> {
        vec![ConeParam::ratio(1, 3).unwrap(); 3]
    }

    fn halves(n: usize) -> Vec<ConeParam> {
        vec![ConeParam::ratio(1, 2).unwrap(); n]
    }

    fn square() -> PolygonSpec {
        PolygonSpec::new(vec![c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)], halves(4)).unwrap()
    }

    fn rectangle() -> PolygonSpec {
        PolygonSpec::new(vec![c(0., 0.), c(2., 0.), c(2., 1.), c(0., 1.)], halves(4)).unwrap()
    }

    #[test]
    fn triangle_side_is_the_beta_constant() {
        let cfg = PrevertexConfig::triangle();
        let f1 = sc_forward(&cfg, &thirds(), c(1., 0.)).unwrap();
        let f0 = sc_forward(&cfg, &thirds(), c(0., 0.)).unwrap();
        assert_eq!(f0, c(0., 0.));
        assert!(((f1 - f0).norm() / BETA_THIRD_THIRD - 1.0).abs() < 1e-10, "{}", (f1 - f0).norm());
        // the principal branch left of x_1 puts the first side at angle -2 pi/3
        assert!((f1 - Complex64::from_polar(BETA_THIRD_THIRD, -2.0 * PI / 3.0)).norm() < 1e-9);
    }

    #[test]
    fn equilateral_sides() {
        let sides = sc_side_lengths(&PrevertexConfig::triangle(), &thirds()).unwrap();
        assert_eq!(sides.len(), 2);
        for s in &sides {
            assert!((s / BETA_THIRD_THIRD - 1.0).abs() < 1e-8, "{s}");
        }
        let map = ScMap::new(&PrevertexConfig::triangle(), &thirds(), c(1., 0.), QuadratureSettings::with_tol(1e-12)).unwrap();
        let w = map.vertex_images().unwrap();
        for k in 0..3 {
            let side = (w[(k + 1) % 3] - w[k]).norm();
            assert!((side / BETA_THIRD_THIRD - 1.0).abs() < 1e-8, "side {k}: {side}");
        }
    }

    #[test]
    fn flat_integrand_is_a_translation() {
        // alpha = (1, 1, -1): the vertex at infinity carries all the curvature
        let fr = vec![ConeParam::integer(1), ConeParam::integer(1), ConeParam::integer(-1)];
        let z = c(0.3, 0.7);
        let v = sc_forward(&PrevertexConfig::triangle(), &fr, z).unwrap();
        assert!((v - z).norm() < 1e-14);
        assert_eq!(smooth_vertices(&fr), vec![0, 1]);
    }

    #[test]
    fn scale_multiplies_sides() {
        let cfg = PrevertexConfig::new(vec![0.0, 1.0, 2.5]).unwrap();
        let one = sc_side_lengths(&cfg, &halves(4)).unwrap();
        let two = sc_side_lengths_scaled(&cfg, &halves(4), c(0., 2.)).unwrap();
        assert_eq!(one.len(), 3);
        for (a, b) in one.iter().zip(&two) {
            assert!((b / a - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn right_isosceles_flags_the_smooth_vertex() {
        // (1/2, 1/2, 1) cannot close a triangle: the angle sum is 2 pi
        let bad = vec![ConeParam::ratio(1, 2).unwrap(), ConeParam::ratio(1, 2).unwrap(), ConeParam::integer(1)];
        assert!(matches!(sc_side_lengths(&PrevertexConfig::triangle(), &bad), Err(Error::GaussBonnet { .. })));
        assert_eq!(smooth_vertices(&bad), vec![2]);

        // right isosceles triangle with a flat vertex on the hypotenuse
        let q = ConeParam::ratio(1, 4).unwrap();
        let fr = vec![ConeParam::ratio(1, 2).unwrap(), q, ConeParam::integer(1), q];
        assert_eq!(smooth_vertices(&fr), vec![2]);
        let cfg = PrevertexConfig::new(vec![0.0, 1.0, 2.0]).unwrap();
        let map = ScMap::new(&cfg, &fr, c(1., 0.), QuadratureSettings::with_tol(1e-12)).unwrap();
        let w = map.vertex_images().unwrap();
        // the flat vertex lies on the segment joining its neighbours
        let dev = ((w[2] - w[1]) * (w[3] - w[1]).conj()).im.abs() / (w[3] - w[1]).norm();
        assert!(dev < 1e-9 * (w[3] - w[1]).norm());
        let legs = ((w[1] - w[0]).norm(), (w[3] - w[0]).norm());
        assert!((legs.0 / legs.1 - 1.0).abs() < 1e-9, "{legs:?}");
    }

    #[test]
    fn nonpositive_alpha_has_no_side_lengths() {
        let fr = vec![ConeParam::integer(0), ConeParam::integer(1), ConeParam::integer(1), ConeParam::integer(0)];
        let cfg = PrevertexConfig::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert!(matches!(sc_side_lengths(&cfg, &fr), Err(Error::Divergent { .. })));
    }

    #[test]
    fn edges_map_to_straight_segments() {
        let cfg = PrevertexConfig::new(vec![0.0, 1.0, 1.7, 4.0]).unwrap();
        let fr = vec![
            ConeParam::ratio(2, 3).unwrap(),
            ConeParam::ratio(1, 2).unwrap(),
            ConeParam::ratio(5, 6).unwrap(),
            ConeParam::ratio(3, 4).unwrap(),
            ConeParam::ratio(1, 4).unwrap(),
        ];
        let map = ScMap::new(&cfg, &fr, c(1., 0.), QuadratureSettings::with_tol(1e-12)).unwrap();
        let w = map.vertex_images().unwrap();
        for k in 0..3 {
            let (a, b) = (cfg.finite()[k], cfg.finite()[k + 1]);
            let chord = w[k + 1] - w[k];
            for i in 1..10 {
                let x = a + (b - a) * i as f64 / 10.0;
                let v = map.forward(c(x, 0.)).unwrap();
                let dev = ((v - w[k]) * chord.conj()).im.abs() / chord.norm();
                assert!(dev <= 1e-8 * chord.norm(), "side {k} at {x}: {dev}");
            }
        }
    }

    #[test]
    fn image_polygon_closes_with_the_prescribed_angles() {
        let cfg = PrevertexConfig::new(vec![0.0, 1.0, 1.7, 4.0]).unwrap();
        let fr = vec![
            ConeParam::ratio(2, 3).unwrap(),
            ConeParam::ratio(1, 2).unwrap(),
            ConeParam::ratio(5, 6).unwrap(),
            ConeParam::ratio(3, 4).unwrap(),
            ConeParam::ratio(1, 4).unwrap(),
        ];
        let map = ScMap::new(&cfg, &fr, c(1., 0.), QuadratureSettings::with_tol(1e-12)).unwrap();
        let w = map.vertex_images().unwrap();
        let n = w.len();
        let mut turning = 0.0;
        for k in 0..n {
            let prev = w[(k + n - 1) % n];
            let next = w[(k + 1) % n];
            let exterior = ((next - w[k]) / (w[k] - prev)).arg();
            assert!((PI - exterior - PI * fr[k].value()).abs() < 1e-8, "vertex {k}");
            turning += exterior;
        }
        assert!((turning - 2.0 * PI).abs() < 1e-8);
        // the image is a valid polygon with these angles
        assert!(PolygonSpec::new(w, fr).is_ok());
    }

    #[test]
    fn polygon_validation() {
        let q = |v: Vec<Complex64>| PolygonSpec::new(v, halves(4));
        assert!(q(vec![c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).is_ok());
        // clockwise
        assert!(matches!(q(vec![c(0., 0.), c(0., 1.), c(1., 1.), c(1., 0.)]), Err(Error::InvalidPolygon(_))));
        // bow tie
        assert!(matches!(q(vec![c(0., 0.), c(1., 1.), c(1., 0.), c(0., 1.)]), Err(Error::InvalidPolygon(_))));
        // repeated vertex
        assert!(matches!(q(vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 1.)]), Err(Error::InvalidPolygon(_))));
        // wrong angles
        let tri = vec![c(0., 0.), c(1., 0.), c(0., 1.)];
        assert!(matches!(PolygonSpec::new(tri.clone(), thirds()), Err(Error::InvalidPolygon(_))));
        let right = vec![ConeParam::ratio(1, 2).unwrap(), ConeParam::ratio(1, 4).unwrap(), ConeParam::ratio(1, 4).unwrap()];
        let p = PolygonSpec::new(tri, right).unwrap();
        assert_eq!(p.len(), 3);
        // angle sum
        assert!(matches!(
            PolygonSpec::new(vec![c(0., 0.), c(1., 0.), c(0., 1.)], halves(3)),
            Err(Error::InvalidPolygon(_))
        ));
    }

    #[test]
    fn prevertex_normalization() {
        assert!(PrevertexConfig::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(PrevertexConfig::new(vec![0.0, 2.0]).is_err());
        assert!(PrevertexConfig::new(vec![0.0]).is_err());
        let g = PrevertexConfig::initial_guess(5).unwrap();
        let t = |k: f64| (PI * k / 8.0).tan() / (PI / 8.0).tan();
        assert_eq!(g.finite().len(), 4);
        assert_eq!(g.finite()[..2], [0.0, 1.0]);
        assert!((g.finite()[2] - t(2.0)).abs() < 1e-14 && (g.finite()[3] - t(3.0)).abs() < 1e-14);
        let back = PrevertexConfig::from_log_gaps(&g.log_gaps()).unwrap();
        for (a, b) in back.finite().iter().zip(g.finite()) {
            assert!((a - b).abs() < 1e-13 * b.max(1.0));
        }
    }

    #[test]
    fn triangle_needs_no_iterations() {
        let tri = PolygonSpec::new(vec![c(0., 0.), c(3., 0.), c(0., 3.)], vec![
            ConeParam::ratio(1, 2).unwrap(),
            ConeParam::ratio(1, 4).unwrap(),
            ConeParam::ratio(1, 4).unwrap(),
        ])
        .unwrap();
        let s = sc_solve_parameters(&tri).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!(s.config, PrevertexConfig::triangle());
    }

    #[test]
    fn square_and_rectangle() {
        let s = sc_solve_parameters(&square()).unwrap();
        assert!(s.mismatch <= 1e-8);
        assert!((s.config.finite()[2] - SQUARE_X3).abs() < 1e-7, "{:?}", s.config);
        let sides = sc_side_lengths(&s.config, &halves(4)).unwrap();
        for side in &sides {
            assert!((side / sides[0] - 1.0).abs() < 1e-6);
        }

        let r = sc_solve_parameters(&rectangle()).unwrap();
        assert!((r.config.finite()[2] - RECTANGLE_X3).abs() < 1e-7, "{:?}", r.config);
        let sides = sc_side_lengths(&r.config, &halves(4)).unwrap();
        let want = [1.0, 0.5, 1.0];
        for (side, w) in sides.iter().zip(want) {
            assert!((side / sides[0] - w).abs() < 1e-6, "{sides:?}");
        }
    }

    #[test]
    fn solution_is_insensitive_to_the_start() {
        let base = sc_solve_parameters(&rectangle()).unwrap();
        let guess = PrevertexConfig::initial_guess(4).unwrap();
        for factor in [0.9, 1.1] {
            let gaps: Vec<f64> = guess.log_gaps().iter().map(|g| (g.exp() * factor).ln()).collect();
            let start = PrevertexConfig::from_log_gaps(&gaps).unwrap();
            let s = sc_solve_parameters_with(&rectangle(), &start, &SolverOptions::default()).unwrap();
            assert!((s.config.finite()[2] - base.config.finite()[2]).abs() < 1e-8);
        }
    }

    #[test]
    fn solution_is_similarity_invariant() {
        let pentagon = || {
            vec![c(0., 0.), c(2., 0.), c(2.5, 1.), c(1., 2.), c(-0.5, 1.)]
        };
        let alphas_of = |v: &[Complex64]| -> Vec<ConeParam> {
            let n = v.len();
            (0..n)
                .map(|k| {
                    let ext = ((v[(k + 1) % n] - v[k]) / (v[k] - v[(k + n - 1) % n])).arg();
                    ConeParam::real(1.0 - ext / PI).unwrap()
                })
                .collect()
        };
        let v = pentagon();
        let mut fr = alphas_of(&v);
        // make the sum exact in floating point by closing on the last entry
        let rest: f64 = fr[..4].iter().map(|a| a.value()).sum();
        fr[4] = ConeParam::real(3.0 - rest).unwrap();
        let base = sc_solve_parameters(&PolygonSpec::new(v.clone(), fr.clone()).unwrap()).unwrap();
        let moved: Vec<Complex64> = v.iter().map(|z| Complex64::from_polar(3.5, 0.8) * z + c(-4., 7.)).collect();
        let other = sc_solve_parameters(&PolygonSpec::new(moved, fr.clone()).unwrap()).unwrap();
        for (a, b) in base.config.finite().iter().zip(other.config.finite()) {
            assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{:?} vs {:?}", base.config, other.config);
        }
        // consistency: the solved map reproduces the side ratios
        let sides = sc_side_lengths(&base.config, &fr).unwrap();
        let target = PolygonSpec::new(v, fr).unwrap().side_lengths();
        for k in 1..sides.len() {
            assert!((sides[k] / sides[0] / (target[k] / target[0]) - 1.0).abs() < 1e-7);
        }
    }
}
