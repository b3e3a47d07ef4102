//! Factorization calculus of selfdecomposable laws on the real line.
//!
//! The crate works at two levels. At the exponent level a law is its Lévy
//! exponent `Φ` and the random-integral mappings `I`, `J` act by quadrature
//! ([`maps`]). At the spectral level a law is its Lévy measure, handled per
//! half-line, and membership in the classes `U ⊃ L ⊃ L^f` and the
//! filtration `L_n` is decided on divided differences ([`spectral`]).
//! [`catalogue`] holds closed-form laws used as oracles and [`simulate`]
//! checks the factorization identity by Monte Carlo.

pub mod catalogue;
pub mod diff;
pub mod error;
pub mod exponent;
pub mod grid;
pub mod maps;
pub mod quadrature;
pub mod simulate;
pub mod spectral;
pub mod tolerances;

pub use error::{Error, Result};
pub use exponent::{
    eval_distinguished_log, exponent_add, exponent_dilate, exponent_from_triple, fit_linear_drift, DriftFit, Evaluated,
    ExponentKind, LevyExponent, LogMoment, Triple,
};
pub use grid::{Grid, Sampled};
pub use maps::{
    inv_i, inv_j, inv_ji, iterate_i, lf_characteristic, map_i, map_j, verify_factorization, FactorizationReport,
    IdentityVerdict,
};
pub use spectral::{ClassTested, ClassificationReport, Side, SpectralDensity, Verdict};
