//! Metric measurement of the cone angle: the ratio of the circumference of a
//! small metric circle around `P_j` to its radius tends to `2*pi*alpha_j`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::prym::PrymDifferential;
use crate::quadrature::{self, QuadratureSettings};

/// Radial distances are averaged over this many equally spaced rays, which
/// cancels the angular harmonics of `|f|` up to this order.
pub const RADIAL_RAYS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAngleMeasurement {
    /// `L = integral of |f| |dx|` over `|x - P_j| = eps`.
    pub circumference: f64,
    /// Metric distance from `P_j` to the circle, averaged over rays.
    pub radius: f64,
    /// `L / r`, in radians.
    pub angle: f64,
}

pub fn cone_angle_measure(omega: &PrymDifferential, j: usize, eps: f64) -> Result<f64> {
    cone_angle_measurement(omega, j, eps, &QuadratureSettings::with_tol(1e-12)).map(|m| m.angle)
}

pub fn cone_angle_measurement(
    omega: &PrymDifferential,
    j: usize,
    eps: f64,
    settings: &QuadratureSettings,
) -> Result<ConeAngleMeasurement> {
    let alpha = omega.alpha(j)?;
    if alpha <= 0.0 {
        return Err(Error::Divergent { index: j, alpha });
    }
    let center = omega.centers()[j];
    if !(eps > 0.0) {
        return Err(Error::InvalidPath(format!("radius must be positive, got {eps}")));
    }
    if let Some((k, _)) = omega
        .centers()
        .iter()
        .enumerate()
        .find(|(k, p)| *k != j && (**p - center).norm() <= eps)
    {
        return Err(Error::InvalidPath(format!("disk of radius {eps} contains cone point {k}")));
    }

    // on the circle |f| = eps^(alpha-1) * rest
    let rest_on_circle = |t: f64| omega.modulus_excluding(center + Complex64::from_polar(eps, t), j);
    let circumference = eps.powf(alpha) * quadrature::integrate_real(rest_on_circle, 0.0, 2.0 * PI, settings)?;

    // integral_0^eps t^(alpha-1) rest(t) dt = eps^alpha / alpha * integral_0^1 rest(eps s^(1/alpha)) ds
    let mut radial = 0.0;
    for k in 0..RADIAL_RAYS {
        let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / RADIAL_RAYS as f64);
        let ray = |s: f64| omega.modulus_excluding(center + dir * (eps * s.powf(1.0 / alpha)), j);
        radial += quadrature::integrate_real(ray, 0.0, 1.0, settings)?;
    }
    let radius = eps.powf(alpha) / alpha * radial / RADIAL_RAYS as f64;
    Ok(ConeAngleMeasurement { circumference, radius, angle: circumference / radius })
}
