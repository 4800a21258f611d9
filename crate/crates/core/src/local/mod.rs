//! Local analysis at a cone point.

pub mod cone_angle;
pub mod frobenius;
pub mod normal_form;
pub mod schwarzian;

pub use cone_angle::{cone_angle_measure, cone_angle_measurement, ConeAngleMeasurement};
pub use frobenius::{
    frobenius_coefficients, frobenius_coefficients_with_tol, indicial_polynomial, indicial_roots, ode_residual,
    residual_order, FrobeniusSeries, IndicialPair,
};
pub use normal_form::{fit_local_normal_form, fit_local_normal_form_with, NormalForm, NormalFormFit};
pub use schwarzian::{default_step, schwarzian_numeric};
