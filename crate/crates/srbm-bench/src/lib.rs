//! Shared fixtures for the benchmarks.

use srbm_core::ModelParams;

/// Identity reflection, unit covariance, drift `(−1, −1)`.
pub fn identity_model() -> ModelParams {
    ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).expect("valid model")
}

/// Correlated covariance with a skew product-form reflection.
pub fn skew_product_form() -> ModelParams {
    ModelParams::from_entries(1.0, 0.5, 2.0, -1.0, -1.5, 1.0, 0.25, 0.5, 1.0).expect("valid model")
}

/// Mixed reflection without a product form.
pub fn mixed_model() -> ModelParams {
    ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.2, -1.0, 1.0).expect("valid model")
}
