use num_complex::Complex64;

use crate::error::{Error, Result};

// Nine-point central difference weights for offsets -4..=4.
const D1: [f64; 9] = [
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
];
const D2: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];
const D3: [f64; 9] = [
    -7.0 / 240.0,
    3.0 / 10.0,
    -169.0 / 120.0,
    61.0 / 30.0,
    0.0,
    -61.0 / 30.0,
    169.0 / 120.0,
    -3.0 / 10.0,
    7.0 / 240.0,
];

/// Step used near singularities: `1e-3 * |x|`.
pub fn default_step(x: Complex64) -> f64 {
    let r = x.norm();
    if r > 0.0 {
        1e-3 * r
    } else {
        1e-3
    }
}

/// `{F, x} = F'''/F' - 3/2 (F''/F')^2` from nine samples of `F` on the
/// real-direction stencil `x + k h`, `k = -4..=4`.
pub fn schwarzian_numeric<F>(f: F, x: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let samples: Vec<Complex64> = (-4..=4).map(|k| f(x + Complex64::new(k as f64 * h, 0.0))).collect();
    let center = samples[4];
    let weighted = |w: &[f64; 9]| samples.iter().zip(w).map(|(s, c)| (s - center) * c).sum::<Complex64>();
    let d1 = weighted(&D1) / h;
    let d2 = weighted(&D2) / (h * h);
    let d3 = weighted(&D3) / (h * h * h);
    let variation = samples.iter().map(|s| (s - center).norm()).fold(0.0, f64::max);
    if d1.norm() * h <= 1e-10 * variation || d1.norm() == 0.0 {
        return Err(Error::NotUnivalent);
    }
    let r = d2 / d1;
    Ok(d3 / d1 - 1.5 * r * r)
}
