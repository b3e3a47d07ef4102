//! The random-integral mappings on exponents.
//!
//! For a driving exponent `ψ`:
//!
//! * `I(ψ)(y) = ∫_0^∞ ψ(e^{-s} y) ds`, the law of `∫_0^∞ e^{-s} dY(s)`;
//! * `J(ψ)(y) = ∫_0^1 ψ(s y) ds`, the law of `∫_0^1 s dY(s)`.
//!
//! The inverses are differential operators in the dilation variable:
//! writing `r(t) = Φ(t y)`, `I⁻¹Φ = r'(1)`, `J⁻¹Φ = Φ + r'(1)` and
//! `(I∘J)⁻¹Φ = 2 r'(1) + r''(1)`.

use std::cell::Cell;

use num_complex::Complex64;
use serde::Serialize;

use crate::diff;
use crate::error::{Error, Result};
use crate::exponent::{exponent_add, Evaluated, ExponentKind, LevyExponent, LogMoment};
use crate::grid::{Grid, Sampled};
use crate::quadrature::{integrate_complex, integrate_semi_infinite, Tolerance};
use crate::tolerances::{DERIVATIVE_FAILURE, FIRST_STEP, IDENTITY, MAX_HORIZON, QUADRATURE, SECOND_STEP, TAIL};

/// Evaluates `psi` inside a quadrature: failures are parked in `slot` and
/// the integrand reads as zero; the largest inner error estimate is kept.
fn guarded<'a>(
    psi: &'a LevyExponent,
    slot: &'a Cell<Option<Error>>,
    inner: &'a Cell<f64>,
) -> impl Fn(f64) -> Complex64 + Copy + 'a {
    move |x| match psi.evaluate(x) {
        Ok(e) => {
            inner.set(inner.get().max(e.error));
            e.value
        }
        Err(err) => {
            let prev = slot.take();
            slot.set(Some(prev.unwrap_or(err)));
            Complex64::new(0.0, 0.0)
        }
    }
}

fn mirrored(y: f64, e: Evaluated) -> Evaluated {
    if y < 0.0 {
        Evaluated {
            value: e.value.conj(),
            error: e.error,
        }
    } else {
        e
    }
}

fn refuse_without_log_moment(psi: &LevyExponent, what: &str) -> Result<()> {
    if psi.log_moment() == LogMoment::No {
        return Err(Error::InvalidParameter(format!(
            "{what} needs a finite logarithmic moment, the input is flagged as having none"
        )));
    }
    Ok(())
}

/// `∫_0^∞ w(s)·psi(e^{-s} y) ds`, evaluated at `|y|` and conjugated back.
fn semi_infinite_at<W>(psi: &LevyExponent, y: f64, stage: usize, weight: W) -> Result<Evaluated>
where
    W: Fn(f64) -> f64,
{
    if y == 0.0 {
        return Ok(Evaluated::exact(Complex64::new(0.0, 0.0)));
    }
    let u = y.abs();
    let slot = Cell::new(None);
    let inner = Cell::new(0.0f64);
    let g = guarded(psi, &slot, &inner);
    let tq = integrate_semi_infinite(
        |s| g((-s).exp() * u) * weight(s),
        0.0,
        1.0,
        QUADRATURE,
        Tolerance::new(TAIL, 0.0),
        MAX_HORIZON,
    );
    if let Some(err) = slot.take() {
        return Err(err);
    }
    if !tq.tail_converged {
        return Err(Error::LogMomentViolation {
            t: y,
            stage,
            horizon: tq.horizon,
            tail_estimate: tq.tail_estimate,
        });
    }
    Ok(mirrored(
        y,
        Evaluated {
            value: tq.quad.value,
            error: tq.quad.error + inner.get() * tq.horizon,
        },
    ))
}

fn map_i_stage(psi: &LevyExponent, stage: usize) -> LevyExponent {
    let p = psi.clone();
    LevyExponent::new(ExponentKind::QuadratureBacked, LogMoment::Unknown, move |y| {
        semi_infinite_at(&p, y, stage, |_| 1.0)
    })
}

/// `I(ψ)(y) = ∫_0^∞ ψ(e^{-s} y) ds`.
///
/// The integral is truncated once the remaining tail is below `1e-10`; a
/// tail still growing at `s = 500` raises
/// [`Error::LogMomentViolation`] when the result is evaluated. Inputs
/// flagged as lacking a logarithmic moment are refused outright.
pub fn map_i(psi: &LevyExponent) -> Result<LevyExponent> {
    refuse_without_log_moment(psi, "the mapping I")?;
    Ok(map_i_stage(psi, 1))
}

/// `J(ψ)(y) = ∫_0^1 ψ(s y) ds`.
pub fn map_j(psi: &LevyExponent) -> LevyExponent {
    let p = psi.clone();
    LevyExponent::new(ExponentKind::QuadratureBacked, psi.log_moment(), move |y| {
        if y == 0.0 {
            return Ok(Evaluated::exact(Complex64::new(0.0, 0.0)));
        }
        let u = y.abs();
        let slot = Cell::new(None);
        let inner = Cell::new(0.0f64);
        let g = guarded(&p, &slot, &inner);
        let q = integrate_complex(|s| g(s * u), &[0.0, 1.0], QUADRATURE);
        if let Some(err) = slot.take() {
            return Err(err);
        }
        Ok(mirrored(
            y,
            Evaluated {
                value: q.value,
                error: q.error + inner.get(),
            },
        ))
    })
}

fn first_step(y: f64) -> f64 {
    FIRST_STEP * y.abs().max(1.0)
}

fn second_step(y: f64) -> f64 {
    SECOND_STEP * y.abs().max(1.0)
}

fn checked(y: f64, d: diff::Derivative<Complex64>) -> Result<diff::Derivative<Complex64>> {
    if !(d.error <= DERIVATIVE_FAILURE * d.value.norm().max(1.0)) {
        return Err(Error::Differentiation {
            at: y,
            residual: d.error,
        });
    }
    Ok(d)
}

/// `d/dt Φ(t y)` at `t = 1`, i.e. `y·Φ'(y)`.
fn dilation_slope(phi: &LevyExponent, y: f64) -> Result<Evaluated> {
    let d = checked(y, diff::first(|t| phi.value(t), y, first_step(y))?)?;
    Ok(Evaluated {
        value: d.value * y,
        error: d.error * y.abs(),
    })
}

/// `d²/dt² Φ(t y)` at `t = 1`, i.e. `y²·Φ''(y)`.
fn dilation_curvature(phi: &LevyExponent, y: f64) -> Result<Evaluated> {
    let d = checked(y, diff::second(|t| phi.value(t), y, second_step(y))?)?;
    Ok(Evaluated {
        value: d.value * (y * y),
        error: d.error * y * y,
    })
}

/// `I⁻¹(Φ)(y) = y·Φ'(y)`: the exponent of the background driving law.
pub fn inv_i(phi: &LevyExponent) -> LevyExponent {
    let p = phi.clone();
    LevyExponent::new(ExponentKind::QuadratureBacked, LogMoment::Unknown, move |y| {
        if y == 0.0 {
            return Ok(Evaluated::exact(Complex64::new(0.0, 0.0)));
        }
        dilation_slope(&p, y)
    })
}

/// `J⁻¹(Φ)(y) = Φ(y) + y·Φ'(y)`.
pub fn inv_j(phi: &LevyExponent) -> LevyExponent {
    let p = phi.clone();
    LevyExponent::new(ExponentKind::QuadratureBacked, phi.log_moment(), move |y| {
        if y == 0.0 {
            return Ok(Evaluated::exact(Complex64::new(0.0, 0.0)));
        }
        let v = p.evaluate(y)?;
        let d = dilation_slope(&p, y)?;
        Ok(Evaluated {
            value: v.value + d.value,
            error: v.error + d.error,
        })
    })
}

/// `(I∘J)⁻¹(Φ)(y) = 2y·Φ'(y) + y²·Φ''(y)`.
pub fn inv_ji(phi: &LevyExponent) -> LevyExponent {
    let p = phi.clone();
    LevyExponent::new(ExponentKind::QuadratureBacked, LogMoment::Unknown, move |y| {
        if y == 0.0 {
            return Ok(Evaluated::exact(Complex64::new(0.0, 0.0)));
        }
        let d1 = dilation_slope(&p, y)?;
        let d2 = dilation_curvature(&p, y)?;
        Ok(Evaluated {
            value: d1.value * 2.0 + d2.value,
            error: 2.0 * d1.error + d2.error,
        })
    })
}

/// Exponent of `I(J(ν))` as one integral:
/// `∫_0^1 ∫_0^w ν(u y)/w² du dw = ∫_0^∞ ν(e^{-s} y)(1 - e^{-s}) ds`.
pub fn lf_characteristic(nu: &LevyExponent) -> Result<LevyExponent> {
    refuse_without_log_moment(nu, "the L^f characteristic")?;
    let p = nu.clone();
    Ok(LevyExponent::new(
        ExponentKind::QuadratureBacked,
        LogMoment::Unknown,
        move |y| semi_infinite_at(&p, y, 1, |s| -(-s).exp_m1()),
    ))
}

/// `I` applied `n` times. A divergent tail at stage `k` is reported with
/// that stage index.
pub fn iterate_i(psi: &LevyExponent, n: usize) -> Result<LevyExponent> {
    if n == 0 {
        return Err(Error::InvalidParameter("iterate_I needs n >= 1".into()));
    }
    refuse_without_log_moment(psi, "the mapping I")?;
    let mut out = psi.clone();
    for stage in 1..=n {
        out = map_i_stage(&out, stage);
    }
    Ok(out)
}

/// Outcome of an identity check at tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityVerdict {
    Holds,
    Fails,
    Inconclusive,
}

impl IdentityVerdict {
    /// Residual `residual` against threshold `tol`, with quadrature error
    /// estimate `error`: a residual within ten error estimates of the
    /// threshold cannot be decided.
    pub fn judge(residual: f64, error: f64, tol: f64) -> Self {
        if residual < tol && 10.0 * error < tol {
            IdentityVerdict::Holds
        } else if residual >= tol && residual > 10.0 * error {
            IdentityVerdict::Fails
        } else {
            IdentityVerdict::Inconclusive
        }
    }

    pub fn holds(self) -> bool {
        self == IdentityVerdict::Holds
    }
}

/// Both sides of `I(ν) + ν = I(ρ)` with `ν = J(ρ)` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub grid: Vec<f64>,
    pub residual_sup: f64,
    /// Largest combined quadrature error estimate of the two sides.
    pub error_estimate: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub lhs: Sampled,
    #[serde(skip)]
    pub rhs: Sampled,
    pub verdict: IdentityVerdict,
}

/// Checks the factorization identity for the driving exponent `rho`.
pub fn verify_factorization(rho: &LevyExponent, grid: &Grid) -> Result<FactorizationReport> {
    refuse_without_log_moment(rho, "the factorization check")?;
    let nu = map_j(rho);
    let lhs = exponent_add(&map_i(&nu)?, &nu).sample(grid)?;
    let rhs = map_i(rho)?.sample(grid)?;
    let residual_sup = lhs.sup_distance(&rhs);
    let error_estimate = lhs
        .errors
        .iter()
        .zip(&rhs.errors)
        .map(|(a, b)| a + b)
        .fold(0.0, f64::max);
    Ok(FactorizationReport {
        grid: grid.points().to_vec(),
        residual_sup,
        error_estimate,
        tolerance: IDENTITY,
        verdict: IdentityVerdict::judge(residual_sup, error_estimate, IDENTITY),
        lhs,
        rhs,
    })
}
