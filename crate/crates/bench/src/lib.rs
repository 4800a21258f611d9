//! Fixed problems shared by the benchmarks.

use num_complex::Complex64;

use flatcone::{ConeParam, Path, PolygonSpec, PrymDifferential};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Three cone points of mixed sign, completed at infinity.
pub fn three_point() -> PrymDifferential {
    let q = |p, d| ConeParam::ratio(p, d).expect("nonzero denominator");
    PrymDifferential::from_points([(c(0., 0.), q(1, 3)), (c(2., 0.), q(3, 4)), (c(1., 1.5), q(5, 2))])
        .expect("valid divisor")
}

/// Counterclockwise 64-gon of radius 4 around all three points.
pub fn wide_loop() -> Path {
    Path::circle(c(1., 0.5), 4.0, 64, 0.0, 1e-6).expect("valid loop")
}

/// An open path threading between the cone points.
pub fn threading_path() -> Path {
    Path::new(vec![c(-1., -1.), c(1., 0.5), c(3., 0.5), c(1., 3.)], 1e-6).expect("valid path")
}

/// Axis-aligned rectangle of the given aspect ratio.
pub fn rectangle(aspect: f64) -> PolygonSpec {
    let half = ConeParam::ratio(1, 2).expect("nonzero denominator");
    PolygonSpec::new(vec![c(0., 0.), c(aspect, 0.), c(aspect, 1.), c(0., 1.)], vec![half; 4]).expect("valid polygon")
}

/// House-shaped pentagon: a unit-high 2-wide box under a right-angled roof.
pub fn pentagon() -> PolygonSpec {
    let q = |p, d| ConeParam::ratio(p, d).expect("nonzero denominator");
    PolygonSpec::new(
        vec![c(0., 0.), c(2., 0.), c(2., 1.), c(1., 2.), c(0., 1.)],
        vec![q(1, 2), q(1, 2), q(3, 4), q(1, 2), q(3, 4)],
    )
    .expect("valid polygon")
}
