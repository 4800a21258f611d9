//! Flat conical metrics on the Riemann sphere.
//!
//! Starting from a divisor of cone points `P_j` with real cone parameters
//! `alpha_j` satisfying `sum_j (alpha_j - 1) = -2`, the flat metric is
//! `|omega|^2` for `omega = C * prod_j (z - P_j)^(alpha_j - 1) dz`, and its
//! developing map is `F = integral of omega`. This crate provides
//!
//! - [`divisor`]: exact divisor algebra and the Gauss-Bonnet check,
//! - [`prym`]: evaluation of `omega` on tracked branches,
//! - [`develop`]: path integration, endpoint singularities and monodromy,
//! - [`local`]: indicial/Frobenius analysis, Schwarzians, normal forms and
//!   cone angle measurement,
//! - [`sc`]: the Schwarz-Christoffel forward map and parameter problem,
//! - [`io`]: the JSON schemas for divisors, paths and polygons.
//!
//! ```
//! use flatcone::{
//!     develop::default_probes, monodromy, BranchState, Complex64, ConeParam, Path, PrymDifferential,
//!     QuadratureSettings,
//! };
//!
//! let third = ConeParam::ratio(1, 3)?;
//! let w = PrymDifferential::from_points([
//!     (Complex64::new(0.0, 0.0), third),
//!     (Complex64::new(1.0, 0.0), third),
//!     (Complex64::new(0.0, 1.0), third),
//! ])?;
//! let around = Path::circle(Complex64::new(0.0, 0.0), 0.5, 64, 0.0, 1e-6)?;
//! let b0 = BranchState::principal(&w, around.start())?;
//! let m = monodromy(&w, &around, &b0, &default_probes(&around), &QuadratureSettings::default())?;
//! // rotation by 2 pi / 3 around the enclosed cone point
//! assert!((m.isometry.rotation - m.predicted_rotation).norm() < 1e-9);
//! # Ok::<(), flatcone::Error>(())
//! ```

pub mod develop;
pub mod divisor;
pub mod error;
pub mod io;
pub mod local;
pub mod path;
pub mod prym;
pub mod quadrature;
pub mod sc;

mod lm;

pub use develop::{
    continue_branch, develop_samples, integrate_along_path, integrate_to_cone_point, integrate_to_infinity, monodromy,
    AffineIsometry, DevelopedValue, MonodromyReport,
};
pub use divisor::{ConeParam, ConePoint, Divisor, GaussBonnet, Position};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use path::Path;
pub use prym::{BranchState, PrymDifferential};
pub use quadrature::QuadratureSettings;
pub use sc::{
    sc_forward, sc_side_lengths, sc_solve_parameters, sc_solve_parameters_with, PolygonSpec, PrevertexConfig, ScMap,
    ScSolution, SolverOptions,
};
