//! Developing map `F(z) = integral of omega` along polylines, with branch
//! tracking, endpoint-singular integration into cone points, integration
//! out to infinity, and monodromy of closed loops.
//!
//! `F` is normalized to vanish at the start of whatever path it is
//! integrated along, so every result is defined modulo a plane isometry
//! `z -> rotation * z + translation`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::divisor::{ConeParam, ConePoint, Divisor};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::prym::{turn, BranchState, PrymDifferential};
use crate::quadrature::{self, QuadratureSettings};

const ROTATION_TOL: f64 = 1e-10;
const MAX_SPLIT_DEPTH: u32 = 64;

/// `z -> rotation * z + translation` with `|rotation| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineIsometry {
    pub rotation: Complex64,
    pub translation: Complex64,
}

impl AffineIsometry {
    pub const IDENTITY: AffineIsometry =
        AffineIsometry { rotation: Complex64::new(1.0, 0.0), translation: Complex64::new(0.0, 0.0) };

    pub fn new(rotation: Complex64, translation: Complex64) -> Result<Self> {
        let iso = AffineIsometry { rotation, translation };
        if !iso.is_isometry(ROTATION_TOL) {
            return Err(Error::InvalidPath(format!("rotation {rotation} does not have unit modulus")));
        }
        Ok(iso)
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        (self.rotation.norm() - 1.0).abs() <= tol
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.rotation * z + self.translation
    }

    /// `self o inner`: apply `inner` first.
    pub fn compose(&self, inner: &AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> AffineIsometry {
        let r = self.rotation.inv();
        AffineIsometry { rotation: r, translation: -r * self.translation }
    }

    /// The same map in coordinates shifted so that `origin` becomes 0.
    pub fn renormalized(&self, origin: Complex64) -> AffineIsometry {
        AffineIsometry { rotation: self.rotation, translation: self.translation + (self.rotation - 1.0) * origin }
    }

    /// Center of rotation, when the rotation is nontrivial.
    pub fn fixed_point(&self) -> Option<Complex64> {
        let d = Complex64::new(1.0, 0.0) - self.rotation;
        (d.norm() > 1e-12).then(|| self.translation / d)
    }
}

/// Image of a path endpoint under `F`, with the branch reached there.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopedValue {
    pub value: Complex64,
    pub branch: BranchState,
}

fn max_turn(a: Complex64, b: Complex64, centers: &[Complex64], skip: Option<usize>) -> f64 {
    centers
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != skip)
        .map(|(_, &p)| turn(a, b, p).abs())
        .fold(0.0, f64::max)
}

/// Splits `a -> b` until no sub-segment turns any cone point by `pi/2` or more.
fn split_by_turn(
    a: Complex64,
    b: Complex64,
    centers: &[Complex64],
    skip: Option<usize>,
    depth: u32,
    out: &mut Vec<(Complex64, Complex64)>,
) {
    if depth >= MAX_SPLIT_DEPTH || max_turn(a, b, centers, skip) < FRAC_PI_2 {
        out.push((a, b));
        return;
    }
    let m = 0.5 * (a + b);
    split_by_turn(a, m, centers, skip, depth + 1, out);
    split_by_turn(m, b, centers, skip, depth + 1, out);
}

fn pieces(a: Complex64, b: Complex64, centers: &[Complex64], skip: Option<usize>) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    split_by_turn(a, b, centers, skip, 0, &mut out);
    out
}

fn check_branch(omega: &PrymDifferential, b: &BranchState) -> Result<()> {
    if b.args.len() != omega.centers().len() {
        return Err(Error::IndexOutOfRange { index: b.args.len(), len: omega.centers().len() });
    }
    Ok(())
}

fn advance_args(args: &mut [f64], a: Complex64, b: Complex64, centers: &[Complex64]) {
    for (arg, &p) in args.iter_mut().zip(centers) {
        *arg += turn(a, b, p);
    }
}

/// Continues the arguments of `b0` along `path`.
pub fn continue_branch(omega: &PrymDifferential, path: &Path, b0: &BranchState) -> Result<BranchState> {
    check_branch(omega, b0)?;
    path.check_clearance(omega.centers(), None)?;
    let mut args = b0.args.clone();
    for (a, b) in path.segments() {
        for (pa, pb) in pieces(a, b, omega.centers(), None) {
            advance_args(&mut args, pa, pb, omega.centers());
        }
    }
    Ok(BranchState { base: path.end(), args })
}

/// Integral of `omega` over one straight segment that keeps clearance from
/// every cone point; advances `args` to the segment end.
pub(crate) fn integrate_regular_segment(
    omega: &PrymDifferential,
    a: Complex64,
    b: Complex64,
    args: &mut [f64],
    settings: &QuadratureSettings,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (pa, pb) in pieces(a, b, omega.centers(), None) {
        let d = pb - pa;
        let anchor_args: &[f64] = args;
        let est = quadrature::integrate(
            |t| omega.coefficient_continued(pa + d * t, pa, anchor_args, None) * d,
            0.0,
            1.0,
            settings,
        )?;
        total += est.value;
        advance_args(args, pa, pb, omega.centers());
    }
    Ok(total)
}

/// `integral of omega` along `path` on the branch continued from `b0`.
pub fn integrate_along_path(
    omega: &PrymDifferential,
    path: &Path,
    b0: &BranchState,
    settings: &QuadratureSettings,
) -> Result<DevelopedValue> {
    check_branch(omega, b0)?;
    path.check_clearance(omega.centers(), None)?;
    let mut args = b0.args.clone();
    let mut value = Complex64::new(0.0, 0.0);
    for (a, b) in path.segments() {
        value += integrate_regular_segment(omega, a, b, &mut args, settings)?;
    }
    Ok(DevelopedValue { value, branch: BranchState { base: path.end(), args } })
}

/// Integral over the straight segment from `a` into cone point `j`, with the
/// branch `args` valid at `a`. The substitution `|z - P_j| / |a - P_j| = s^(1/alpha)`
/// turns the `(z - P_j)^(alpha - 1)` singularity into a constant.
fn integrate_terminal_segment(
    omega: &PrymDifferential,
    a: Complex64,
    j: usize,
    args: &[f64],
    settings: &QuadratureSettings,
) -> Result<Complex64> {
    let centers = omega.centers();
    let p = centers[j];
    let alpha = omega.alpha(j)?;
    let v = a - p;
    let radius = v.norm();
    let inv_alpha = 1.0 / alpha;
    let mut args = args.to_vec();
    let mut sum = Complex64::new(0.0, 0.0);
    for (pa, pb) in pieces(a, p, centers, Some(j)) {
        let u_hi = (pa - p).norm() / radius;
        let u_lo = (pb - p).norm() / radius;
        let anchor_args: &[f64] = &args;
        let est = quadrature::integrate(
            |s| {
                let z = p + v * s.powf(inv_alpha);
                omega.coefficient_continued(z, pa, anchor_args, Some(j))
            },
            u_lo.powf(alpha),
            u_hi.powf(alpha),
            settings,
        )?;
        sum += est.value;
        for (k, (arg, &q)) in args.iter_mut().zip(centers).enumerate() {
            if k != j {
                *arg += turn(pa, pb, q);
            }
        }
    }
    // (a - P)^alpha on the tracked branch of arg(z - P_j), constant along the segment
    let lead = Complex64::new(alpha * radius.ln(), alpha * args[j]).exp();
    Ok(-lead * inv_alpha * sum)
}

/// Improper integral along `path` whose final waypoint is a cone point with
/// positive `alpha`.
pub fn integrate_to_cone_point(
    omega: &PrymDifferential,
    path: &Path,
    b0: &BranchState,
    settings: &QuadratureSettings,
) -> Result<Complex64> {
    check_branch(omega, b0)?;
    let j = omega
        .cone_index_at(path.end())
        .ok_or_else(|| Error::InvalidPath("terminal waypoint is not a cone point".into()))?;
    let alpha = omega.alpha(j)?;
    if alpha <= 0.0 {
        return Err(Error::Divergent { index: j, alpha });
    }
    path.check_clearance(omega.centers(), Some(j))?;
    let w = path.waypoints();
    let mut args = b0.args.clone();
    let mut value = Complex64::new(0.0, 0.0);
    for k in 0..w.len() - 2 {
        value += integrate_regular_segment(omega, w[k], w[k + 1], &mut args, settings)?;
    }
    let last = w[w.len() - 2];
    value += integrate_terminal_segment(omega, last, j, &args, settings)?;
    Ok(value)
}

fn distance_to_ray(p: Complex64, start: Complex64) -> f64 {
    let t = ((p * start.conj()).re / start.norm_sqr()).max(1.0);
    (p - start * t).norm()
}

/// The differential pulled back by `z = -1/w`, scaled so that its value at
/// `w0 = -1/z0` matches `omega` on branch `b0` at `z0`.
fn pullback_at_infinity(omega: &PrymDifferential, b0: &BranchState) -> Result<(PrymDifferential, Complex64)> {
    let z0 = b0.base;
    let mut points = Vec::new();
    for (&p, a) in omega.centers().iter().zip(omega.alphas()) {
        if p != Complex64::new(0.0, 0.0) {
            points.push(ConePoint::finite(-p.inv(), *a));
        }
    }
    if let Some(a_inf) = omega.divisor().infinity() {
        points.push(ConePoint::finite(Complex64::new(0.0, 0.0), a_inf));
    }
    let unit = PrymDifferential::completed(&Divisor::new(points)?, Complex64::new(1.0, 0.0))?;
    let w0 = -z0.inv();
    let target = omega.evaluate_with_branch(z0, b0)? / (w0 * w0);
    let b_unit = BranchState::principal(&unit, w0)?;
    let scale = target / unit.evaluate_with_branch(w0, &b_unit)?;
    Ok((unit.with_scale(scale)?, w0))
}

/// Integral from `b0.base` to infinity along the radial ray `t * b0.base`,
/// `t >= 1`. Converges iff the cone parameter at infinity is positive.
pub fn integrate_to_infinity(
    omega: &PrymDifferential,
    b0: &BranchState,
    clearance: f64,
    settings: &QuadratureSettings,
) -> Result<Complex64> {
    check_branch(omega, b0)?;
    let start = b0.base;
    if start == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidPath("radial ray to infinity needs a nonzero start".into()));
    }
    let alpha_inf = omega.alpha_at_infinity();
    if alpha_inf <= 0.0 {
        return Err(Error::Divergent { index: omega.centers().len(), alpha: alpha_inf });
    }
    for (j, &p) in omega.centers().iter().enumerate() {
        let d = distance_to_ray(p, start);
        if d < clearance {
            return Err(Error::Clearance { segment: 0, index: j, distance: d, clearance });
        }
    }
    let (pulled, w0) = pullback_at_infinity(omega, b0)?;
    let origin = Complex64::new(0.0, 0.0);
    // clearance was verified on the z side
    let w_path = Path::segment(w0, origin, f64::MIN_POSITIVE)?;
    let b_w = BranchState::principal(&pulled, w0)?;
    if pulled.cone_index_at(origin).is_some() {
        integrate_to_cone_point(&pulled, &w_path, &b_w, settings)
    } else {
        integrate_along_path(&pulled, &w_path, &b_w, settings).map(|d| d.value)
    }
}

/// Monodromy of a closed loop, with the rotation predicted from the
/// enclosed cone parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyReport {
    /// `F_after = rotation * F_before + translation`, with `F` vanishing at
    /// the loop start before continuation.
    pub isometry: AffineIsometry,
    /// `exp(2*pi*i * sum_j winding_j * alpha_j)`.
    pub predicted_rotation: Complex64,
    /// Winding number of the loop around each finite cone point.
    pub windings: Vec<i64>,
    /// Integral of omega around the loop.
    pub loop_integral: Complex64,
}

/// Two probe points at distances 0.1 and 0.2 from the loop start along the
/// outward normal of the first segment.
pub fn default_probes(loop_path: &Path) -> [Complex64; 2] {
    let w = loop_path.waypoints();
    let start = w[0];
    let next = w.iter().copied().find(|&z| z != start).unwrap_or(start);
    let dir = (next - start).unscale((next - start).norm().max(f64::MIN_POSITIVE));
    // interior lies to the left of a counterclockwise loop
    let normal = if loop_path.signed_area2() >= 0.0 { dir * Complex64::new(0.0, -1.0) } else { dir * Complex64::new(0.0, 1.0) };
    [start + normal * 0.1, start + normal * 0.2]
}

pub fn monodromy(
    omega: &PrymDifferential,
    loop_path: &Path,
    b0: &BranchState,
    probes: &[Complex64],
    settings: &QuadratureSettings,
) -> Result<MonodromyReport> {
    if !loop_path.is_closed() {
        return Err(Error::OpenLoop);
    }
    if probes.len() < 2 {
        return Err(Error::SingularProbes);
    }
    let around = integrate_along_path(omega, loop_path, b0, settings)?;
    let b1 = around.branch;
    let start = loop_path.start();
    let mut before = Vec::with_capacity(probes.len());
    let mut after = Vec::with_capacity(probes.len());
    for &p in probes {
        let leg = Path::segment(start, p, loop_path.clearance())?;
        before.push(integrate_along_path(omega, &leg, b0, settings)?.value);
        after.push(around.value + integrate_along_path(omega, &leg, &b1, settings)?.value);
    }
    let n = probes.len() as f64;
    let mean_b: Complex64 = before.iter().sum::<Complex64>() / n;
    let mean_a: Complex64 = after.iter().sum::<Complex64>() / n;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (a, b) in after.iter().zip(&before) {
        num += (a - mean_a) * (b - mean_b).conj();
        den += (b - mean_b).norm_sqr();
    }
    let spread = before.iter().map(|b| b.norm()).fold(0.0, f64::max);
    if den <= (1e-14 * spread).powi(2) || den == 0.0 {
        return Err(Error::SingularProbes);
    }
    let rotation = num / den;
    let translation = mean_a - rotation * mean_b;

    let windings: Vec<i64> = b1
        .args
        .iter()
        .zip(&b0.args)
        .map(|(a1, a0)| ((a1 - a0) / (2.0 * PI)).round() as i64)
        .collect();
    let mut phase = 0.0;
    for (&k, a) in windings.iter().zip(omega.alphas()) {
        if k != 0 {
            phase += k as f64 * fractional_part(a);
        }
    }
    let predicted_rotation = Complex64::from_polar(1.0, 2.0 * PI * phase);
    Ok(MonodromyReport {
        isometry: AffineIsometry { rotation, translation },
        predicted_rotation,
        windings,
        loop_integral: around.value,
    })
}

/// `alpha mod 1`, exact for rational parameters.
fn fractional_part(a: &ConeParam) -> f64 {
    match a {
        ConeParam::Exact(r) => {
            let f = r.fract();
            num_traits::ToPrimitive::to_f64(&f).unwrap_or(f64::NAN)
        }
        ConeParam::Real(x) => x - x.floor(),
    }
}

/// `n` samples of `F` at evenly spaced arc-length positions along `path`;
/// the first value is 0.
pub fn develop_samples(
    omega: &PrymDifferential,
    path: &Path,
    n: usize,
    settings: &QuadratureSettings,
) -> Result<Vec<(Complex64, Complex64)>> {
    if n < 2 {
        return Err(Error::InvalidPath("need at least 2 samples".into()));
    }
    path.check_clearance(omega.centers(), None)?;
    let b0 = BranchState::principal(omega, path.start())?;
    let total = path.length();
    let mut args = b0.args;
    let mut value = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    out.push((path.start(), value));
    let mut travelled = 0.0;
    let mut next = 1;
    for (a, b) in path.segments() {
        let len = (b - a).norm();
        let mut cursor = a;
        // the final sample is pinned to the path end below
        while next < n - 1 {
            let target = total * next as f64 / (n - 1) as f64;
            if target > travelled + len {
                break;
            }
            let t = if len > 0.0 { (target - travelled) / len } else { 1.0 };
            let z = a + (b - a) * t;
            value += integrate_regular_segment(omega, cursor, z, &mut args, settings)?;
            cursor = z;
            out.push((z, value));
            next += 1;
        }
        value += integrate_regular_segment(omega, cursor, b, &mut args, settings)?;
        travelled += len;
    }
    out.push((path.end(), value));
    Ok(out)
}

/// A developing map germ around `anchor`: `y -> integral of omega` over the
/// straight segment `anchor -> y`, on the branch `b`. Accurate to rounding
/// when `|y - anchor|` is small compared with the distance to the nearest
/// cone point.
pub fn local_developing_map<'a>(
    omega: &'a PrymDifferential,
    b: &'a BranchState,
) -> impl Fn(Complex64) -> Complex64 + 'a {
    move |y: Complex64| {
        let anchor = b.base;
        let d = y - anchor;
        if d == Complex64::new(0.0, 0.0) {
            return d;
        }
        let mut f = |t: f64| omega.coefficient_continued(anchor + d * t, anchor, &b.args, None) * d;
        let (v1, _, _) = quadrature::gk15(&mut f, 0.0, 0.5);
        let (v2, _, _) = quadrature::gk15(&mut f, 0.5, 1.0);
        v1 + v2
    }
}
