//! Stationary tail asymptotics of two-dimensional semimartingale reflecting
//! Brownian motion in the quadrant.
//!
//! The crate covers model validation, the kernel curve and its rational
//! parametrization, meromorphic continuation of the boundary transforms, the
//! classification of decay regimes along rays, numerical Laplace inversion and a
//! reflected Euler simulator used as an independent check.
//!
//! ```
//! use srbm_core::density::{density_eval, QuadratureSpec};
//! use srbm_core::{classify, fit_product_form, ModelParams, Regime};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let p = ModelParams::from_entries(1.0, 0.5, 2.0, -1.0, -1.5, 1.0, 0.25, 0.5, 1.0)?;
//! let report = classify(&p, std::f64::consts::FRAC_PI_3)?;
//! assert_eq!(report.regime, Regime::PoleEtaThetaStar);
//!
//! let pf = fit_product_form(&p)?;
//! let v = density_eval(&p, [1.0, 2.0], &pf, &QuadratureSpec::default())?;
//! assert!((v.value - pf.density(1.0, 2.0)).abs() < 1e-8);
//! # Ok(())
//! # }
//! ```

// Negated comparisons are the NaN-rejecting form of the range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod boundary_transforms;
pub mod density;
pub mod kernel;
pub mod model;
pub mod simulator;
pub mod surface;

pub use asymptotics::{classify, AsymptoticsError, DecayReport, Regime};
pub use boundary_transforms::{fit_product_form, BoundaryTransform, ProductFormModel, RationalTransform};
pub use model::{validate_stability, ModelError, ModelParams, StabilityReport};
