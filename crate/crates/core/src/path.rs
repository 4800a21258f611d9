//! Polyline paths in the finite plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A polyline with a minimum allowed distance to any cone point.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    waypoints: Vec<Complex64>,
    clearance: f64,
}

impl Path {
    pub fn new(waypoints: Vec<Complex64>, clearance: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least 2 waypoints".into()));
        }
        if waypoints.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidPath("waypoints must be finite".into()));
        }
        if !(clearance > 0.0 && clearance.is_finite()) {
            return Err(Error::InvalidPath(format!("clearance must be positive, got {clearance}")));
        }
        Ok(Path { waypoints, clearance })
    }

    pub fn segment(a: Complex64, b: Complex64, clearance: f64) -> Result<Self> {
        Path::new(vec![a, b], clearance)
    }

    /// Closed regular `sides`-gon inscribed in the circle `|z - center| = radius`,
    /// starting at angle `phase` and running counterclockwise.
    pub fn circle(center: Complex64, radius: f64, sides: usize, phase: f64, clearance: f64) -> Result<Self> {
        if sides < 3 {
            return Err(Error::InvalidPath("a closed polygon needs at least 3 sides".into()));
        }
        let mut pts: Vec<Complex64> = (0..sides)
            .map(|k| center + Complex64::from_polar(radius, phase + 2.0 * PI * k as f64 / sides as f64))
            .collect();
        pts.push(pts[0]);
        Path::new(pts, clearance)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().expect("at least two waypoints")
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Path {
        let mut w = self.waypoints.clone();
        w.reverse();
        Path { waypoints: w, clearance: self.clearance }
    }

    /// Concatenation; `next` must start where `self` ends.
    pub fn then(&self, next: &Path) -> Result<Path> {
        if self.end() != next.start() {
            return Err(Error::InvalidPath("paths do not join".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend_from_slice(&next.waypoints[1..]);
        Path::new(w, self.clearance.min(next.clearance))
    }

    pub fn with_clearance(mut self, clearance: f64) -> Result<Path> {
        if !(clearance > 0.0 && clearance.is_finite()) {
            return Err(Error::InvalidPath(format!("clearance must be positive, got {clearance}")));
        }
        self.clearance = clearance;
        Ok(self)
    }

    /// Twice the signed area enclosed by a closed path; positive for
    /// counterclockwise loops.
    pub fn signed_area2(&self) -> f64 {
        self.segments().map(|(a, b)| a.re * b.im - b.re * a.im).sum()
    }

    /// Checks every segment against every cone point. `exempt_terminal`
    /// names a point the final segment is allowed to end on.
    pub fn check_clearance(&self, cone_points: &[Complex64], exempt_terminal: Option<usize>) -> Result<()> {
        let nseg = self.waypoints.len() - 1;
        for (s, (a, b)) in self.segments().enumerate() {
            for (j, &p) in cone_points.iter().enumerate() {
                if s + 1 == nseg && exempt_terminal == Some(j) {
                    continue;
                }
                let d = distance_to_segment(p, a, b);
                if d < self.clearance {
                    return Err(Error::Clearance { segment: s, index: j, distance: d, clearance: self.clearance });
                }
            }
        }
        Ok(())
    }
}

pub fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
