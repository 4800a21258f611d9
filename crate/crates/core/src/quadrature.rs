//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued
//! integrands on a real parameter interval.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `tol * integral of |f|`. Measuring the tolerance
//! against the L1 mass keeps closed-loop integrals that cancel to zero from
//! demanding an unreachable absolute accuracy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance and refinement depth for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { tol: 1e-10, max_depth: 40 }
    }
}

impl QuadratureSettings {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureSettings { tol, ..Default::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    /// Estimate of the integral of `|f|`.
    pub mass: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    error: f64,
    mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel on `[a, b]`: (value, |K15 - G7|, integral of |f|).
pub fn gk15<F>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut mass = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        mass += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    (value, error, mass * half.abs())
}

const MAX_PANELS: usize = 200_000;

/// Integrates `f` over `[a, b]` to relative tolerance `settings.tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, mass: 0.0, evaluations: 0 });
    }
    let (value, error, mass) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, depth: 0, value, error, mass });
    let mut total_value = value;
    let mut total_error = error;
    let mut total_mass = mass;

    loop {
        let bound = settings.tol * total_mass.max(total_value.norm());
        if total_error <= bound || total_error <= f64::MIN_POSITIVE {
            break;
        }
        if !total_value.norm().is_finite() {
            return Err(Error::NonConvergence { max_depth: settings.max_depth, error: f64::INFINITY });
        }
        let worst = heap.pop().expect("heap never empties");
        if worst.depth >= settings.max_depth || heap.len() >= MAX_PANELS {
            return Err(Error::NonConvergence { max_depth: settings.max_depth, error: total_error });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, m1) = gk15(&mut f, worst.a, mid);
        let (v2, e2, m2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        total_mass += m1 + m2 - worst.mass;
        heap.push(Panel { a: worst.a, b: mid, depth: worst.depth + 1, value: v1, error: e1, mass: m1 });
        heap.push(Panel { a: mid, b: worst.b, depth: worst.depth + 1, value: v2, error: e2, mass: m2 });
    }

    // Re-sum to shed the drift of the running totals.
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut mass = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
        mass += p.mass;
    }
    Ok(Estimate { value, error, mass, evaluations })
}

/// Integrates a real-valued function; convenience wrapper over [`integrate`].
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|t| Complex64::new(f(t), 0.0), a, b, settings).map(|e| e.value.re)
}
