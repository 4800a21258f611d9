//! Minimal SVG export: one polyline with a fitted view box.

use num_complex::Complex64;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub stroke: String,
    /// Stroke width as a fraction of the bounding-box diagonal.
    pub stroke_width: f64,
    /// Output width in pixels; the height follows the aspect ratio.
    pub width_px: u32,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { stroke: "black".into(), stroke_width: 2e-3, width_px: 800 }
    }
}

/// Rounds to a multiple of `quantum` and prints with just enough decimals.
fn coord(x: f64, quantum: f64, decimals: usize) -> String {
    let r = (x / quantum).round() * quantum;
    // avoid "-0.000"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.decimals$}")
}

/// A single polyline through `samples`. The plane's `y` axis points up, so
/// SVG coordinates are `(x, -y)`. The view box is the bounding box plus a
/// margin of 5% of its larger side, and every coordinate is rounded to the
/// largest power of ten not above `1e-6` of the bounding-box diagonal.
pub fn emit_svg(samples: &[Complex64], style: &SvgStyle) -> CliResult<String> {
    if samples.len() < 2 {
        return Err(CliError::Validation(format!("a polyline needs at least 2 points, got {}", samples.len())));
    }
    if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Validation("cannot plot non-finite points".into()));
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in samples {
        xmin = xmin.min(z.re);
        xmax = xmax.max(z.re);
        ymin = ymin.min(-z.im);
        ymax = ymax.max(-z.im);
    }
    let (w, h) = (xmax - xmin, ymax - ymin);
    let diagonal = w.hypot(h);
    if !(diagonal > 0.0) {
        return Err(CliError::Validation("degenerate bounding box: all points coincide".into()));
    }
    let decimals = (-(1e-6 * diagonal).log10()).ceil().clamp(0.0, 17.0) as usize;
    let quantum = 10f64.powi(-(decimals as i32));
    let margin = 0.05 * w.max(h);
    let (vx, vy, vw, vh) = (xmin - margin, ymin - margin, w + 2.0 * margin, h + 2.0 * margin);
    let c = |x: f64| coord(x, quantum, decimals);
    let points: Vec<String> = samples.iter().map(|z| format!("{},{}", c(z.re), c(-z.im))).collect();
    let height_px = ((style.width_px as f64) * vh / vw).round().max(1.0) as u32;
    Ok(format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
            "</svg>\n"
        ),
        style.width_px,
        height_px,
        c(vx),
        c(vy),
        c(vw),
        c(vh),
        style.stroke,
        c(style.stroke_width * diagonal),
        points.join(" ")
    ))
}
