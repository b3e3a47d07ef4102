//! Fixed tolerance ladder shared by the operators and their reports.

use crate::quadrature::Tolerance;

/// Target for every adaptive quadrature.
pub const QUADRATURE: Tolerance = Tolerance::new(1e-10, 1e-12);

/// Bound on the neglected tail of `∫₀^∞ ψ(e^{-s}y) ds`.
pub const TAIL: f64 = 1e-10;

/// Horizon at which a still-growing tail is declared divergent.
pub const MAX_HORIZON: f64 = 500.0;

/// Accuracy target for numerical derivatives of exponents.
pub const DERIVATIVE: f64 = 1e-6;

/// A derivative whose error estimate exceeds this (relative) bound is
/// reported as a differentiation failure.
pub const DERIVATIVE_FAILURE: f64 = 1e-3;

/// Relative step of first derivatives in the dilation variable.
pub const FIRST_STEP: f64 = 1e-4;

/// Relative step of second derivatives in the dilation variable.
pub const SECOND_STEP: f64 = 1e-3;

/// Residual threshold for identity verdicts.
pub const IDENTITY: f64 = 1e-5;

/// Relative tolerance on divided differences in the classifiers.
pub const DIVIDED_DIFFERENCE: f64 = 1e-9;

/// Violations smaller than this multiple of [`DIVIDED_DIFFERENCE`] make a
/// verdict inconclusive instead of negative.
pub const NEAR_BOUNDARY_FACTOR: f64 = 1e3;

/// Relative step used when differentiating closed-form spectral functions.
pub const SPECTRAL_STEP: f64 = 1e-3;
