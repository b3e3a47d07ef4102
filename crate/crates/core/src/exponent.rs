//! Lévy exponents on the real line.
//!
//! An exponent is a function `Φ` with `E e^{itX} = e^{Φ(t)}`. Exponents are
//! immutable, cheap to clone, and may be evaluated from any thread.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, Sampled};
use crate::quadrature::{integrate_complex, integrate_semi_infinite, wynn_epsilon, Tolerance};
use crate::spectral::{integrability_check, Side, SideMeasure, SpectralDensity, Verdict};

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: Complex64,
    pub error: f64,
}

impl Evaluated {
    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Three-valued answer to "does the law have a finite logarithmic moment".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogMoment {
    Yes,
    No,
    Unknown,
}

impl LogMoment {
    pub fn and(self, other: LogMoment) -> LogMoment {
        match (self, other) {
            (LogMoment::Yes, LogMoment::Yes) => LogMoment::Yes,
            (LogMoment::No, _) | (_, LogMoment::No) => LogMoment::No,
            _ => LogMoment::Unknown,
        }
    }
}

/// How an exponent is computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    ClosedForm { name: String, params: Vec<(String, f64)> },
    QuadratureBacked,
    SpectralBacked,
}

type EvalFn = dyn Fn(f64) -> Result<Evaluated> + Send + Sync;

#[derive(Clone)]
pub struct LevyExponent {
    f: Arc<EvalFn>,
    kind: ExponentKind,
    log_moment: LogMoment,
}

impl fmt::Debug for LevyExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyExponent")
            .field("kind", &self.kind)
            .field("log_moment", &self.log_moment)
            .finish()
    }
}

impl LevyExponent {
    pub fn new<F>(kind: ExponentKind, log_moment: LogMoment, f: F) -> Self
    where
        F: Fn(f64) -> Result<Evaluated> + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            kind,
            log_moment,
        }
    }

    /// Exponent given by an exact formula.
    pub fn closed_form<F>(name: &str, params: &[(&str, f64)], log_moment: LogMoment, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(
            ExponentKind::ClosedForm {
                name: name.to_string(),
                params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            },
            log_moment,
            move |t| Ok(Evaluated::exact(f(t))),
        )
    }

    pub fn zero() -> Self {
        Self::closed_form("zero", &[], LogMoment::Yes, |_| Complex64::new(0.0, 0.0))
    }

    /// `-σ²t²/2`.
    pub fn gaussian(variance: f64) -> Self {
        Self::closed_form("gaussian", &[("variance", variance)], LogMoment::Yes, move |t| {
            Complex64::new(-0.5 * variance * t * t, 0.0)
        })
    }

    /// `iat`.
    pub fn shift(a: f64) -> Self {
        Self::closed_form("shift", &[("a", a)], LogMoment::Yes, move |t| {
            Complex64::new(0.0, a * t)
        })
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    pub fn log_moment(&self) -> LogMoment {
        self.log_moment
    }

    pub fn with_log_moment(mut self, flag: LogMoment) -> Self {
        self.log_moment = flag;
        self
    }

    pub fn evaluate(&self, t: f64) -> Result<Evaluated> {
        (self.f)(t)
    }

    pub fn value(&self, t: f64) -> Result<Complex64> {
        self.evaluate(t).map(|e| e.value)
    }

    /// Evaluates on every grid point, in parallel. On a grid symmetric
    /// about 0 only `t ≥ 0` is evaluated and the rest filled in by
    /// Hermitian symmetry.
    pub fn sample(&self, grid: &Grid) -> Result<Sampled> {
        let pts = grid.points();
        let n = pts.len();
        let symmetric = (0..n / 2).all(|i| pts[i] == -pts[n - 1 - i]);
        let first = if symmetric { n / 2 } else { 0 };
        let upper: Vec<Evaluated> = pts[first..]
            .par_iter()
            .map(|&t| self.evaluate(t))
            .collect::<Result<_>>()?;
        let evals: Vec<Evaluated> = (0..first)
            .map(|i| {
                let e = upper[n - 1 - i - first];
                Evaluated {
                    value: e.value.conj(),
                    error: e.error,
                }
            })
            .chain(upper.iter().copied())
            .collect();
        Ok(Sampled {
            t: grid.points().to_vec(),
            values: evals.iter().map(|e| e.value).collect(),
            errors: evals.iter().map(|e| e.error).collect(),
        })
    }
}

/// `(p + q)(t) = p(t) + q(t)`: convolution of the laws.
pub fn exponent_add(p: &LevyExponent, q: &LevyExponent) -> LevyExponent {
    let (a, b) = (p.clone(), q.clone());
    LevyExponent::new(
        ExponentKind::QuadratureBacked,
        p.log_moment.and(q.log_moment),
        move |t| {
            let (x, y) = (a.evaluate(t)?, b.evaluate(t)?);
            Ok(Evaluated {
                value: x.value + y.value,
                error: x.error + y.error,
            })
        },
    )
    .with_kind_of(p, q)
}

impl LevyExponent {
    fn with_kind_of(mut self, p: &LevyExponent, q: &LevyExponent) -> Self {
        let closed = |e: &LevyExponent| matches!(e.kind, ExponentKind::ClosedForm { .. });
        if closed(p) && closed(q) {
            self.kind = ExponentKind::ClosedForm {
                name: "sum".into(),
                params: Vec::new(),
            };
        } else if p.kind == ExponentKind::SpectralBacked || q.kind == ExponentKind::SpectralBacked {
            self.kind = ExponentKind::SpectralBacked;
        }
        self
    }
}

/// `t ↦ p(c·t)`: the law of `cX`.
pub fn exponent_dilate(p: &LevyExponent, c: f64) -> Result<LevyExponent> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dilation factor must be positive, got {c}"
        )));
    }
    let a = p.clone();
    Ok(LevyExponent {
        f: Arc::new(move |t| a.evaluate(c * t)),
        kind: p.kind.clone(),
        log_moment: p.log_moment,
    })
}

/// Lévy–Khintchine triple with compensator `1_{|x| ≤ 1}`.
#[derive(Debug, Clone)]
pub struct Triple {
    pub shift: f64,
    pub gaussian_var: f64,
    pub spectral: Option<SpectralDensity>,
}

impl Triple {
    pub fn new(shift: f64, gaussian_var: f64, spectral: Option<SpectralDensity>) -> Self {
        Self {
            shift,
            gaussian_var,
            spectral,
        }
    }
}

const TRIPLE_TOL: Tolerance = Tolerance::new(1e-13, 1e-12);
// cap on half-period panels for oscillatory tails
const MAX_PANELS: usize = 4000;

/// `e^{iθ} - 1 - iθ` without cancellation for small `θ`.
fn expm1_minus_linear(theta: f64) -> Complex64 {
    let s = (0.5 * theta).sin();
    let re = -2.0 * s * s;
    let im = if theta.abs() < 0.1 {
        let t2 = theta * theta;
        -theta * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0 * (1.0 - t2 / 110.0))))
    } else {
        theta.sin() - theta
    };
    Complex64::new(re, im)
}

/// `∫_0^∞ (e^{itx} - 1 - itx·1_{x≤1}) m(x) dx` for one side, `t ≥ 0`.
fn side_integral(side: Side, s: &SideMeasure, t: f64) -> Result<Evaluated> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for a in s.atoms() {
        let theta = t * a.location;
        let jump = if a.location <= 1.0 {
            expm1_minus_linear(theta)
        } else {
            Complex64::new(theta.cos() - 1.0, theta.sin())
        };
        value += a.mass * jump;
    }
    if t == 0.0 || s.cutoff() <= 0.0 || s.is_zero() {
        return Ok(Evaluated { value, error });
    }
    let cutoff = s.cutoff();
    let floor = s
        .probe_grid()
        .first()
        .copied()
        .filter(|_| s.is_tabulated())
        .unwrap_or(0.0);

    // small jumps: x = e^{-v} on (floor, min(1, cutoff)]
    let top = cutoff.min(1.0);
    if floor < top {
        let v0 = -top.ln();
        let h = |v: f64| {
            let x = (-v).exp();
            expm1_minus_linear(t * x) * (s.density_at(x) * x)
        };
        let mut edges: Vec<f64> = s
            .breakpoints()
            .iter()
            .filter(|&&b| b > floor && b < top)
            .map(|b| -b.ln())
            .collect();
        edges.push(v0);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        if floor > 0.0 {
            edges.push(-floor.ln());
            let q = integrate_complex(h, &edges, TRIPLE_TOL);
            value += q.value;
            error += q.error;
        } else {
            let last = *edges.last().expect("nonempty");
            if edges.len() > 1 {
                let q = integrate_complex(h, &edges, TRIPLE_TOL);
                value += q.value;
                error += q.error;
            }
            let tq = integrate_semi_infinite(h, last, 1.0, TRIPLE_TOL, Tolerance::new(1e-14, 1e-13), 700.0);
            if !tq.tail_converged {
                return Err(Error::DivergentSpectralIntegral {
                    side,
                    detail: format!("small-jump integral does not converge at t = {t}"),
                });
            }
            value += tq.quad.value;
            error += tq.quad.error;
        }
    }

    // large jumps: ∫_1^C e^{itx} m(x) dx - M̄_ac(1)
    if cutoff > 1.0 {
        let start = floor.max(1.0);
        let atoms_beyond = s.atom_tail(1.0);
        let mass = s.tail(side, 1.0)? - atoms_beyond;
        let f = |x: f64| Complex64::new(0.0, t * x).exp() * s.density_at(x);
        let half = PI / t;
        let extra: Vec<f64> = s
            .breakpoints()
            .iter()
            .copied()
            .filter(|&b| b > start && b < cutoff)
            .collect();
        if cutoff.is_finite() && (cutoff - start) / half <= MAX_PANELS as f64 {
            let mut pts = vec![start];
            let mut x = start + half;
            while x < cutoff {
                pts.push(x);
                x += half;
            }
            pts.push(cutoff);
            pts.extend(extra);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let q = integrate_complex(f, &pts, TRIPLE_TOL);
            value += q.value - mass;
            error += q.error;
        } else {
            let (osc, err) = oscillatory_tail(f, start, half, cutoff, &extra)?;
            value += osc - mass;
            error += err;
        }
    }
    Ok(Evaluated { value, error })
}

/// Sum of half-period panels on `[start, end)`, accelerated with Wynn's
/// epsilon algorithm when the panels decay slowly.
fn oscillatory_tail<F>(mut f: F, start: f64, half: f64, end: f64, extra: &[f64]) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Complex64,
{
    let mut sums: Vec<Complex64> = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut lo = start;
    let mut quiet = 0;
    let mut previous_estimate: Option<Complex64> = None;
    for _ in 0..MAX_PANELS {
        if lo >= end {
            return Ok((total, error));
        }
        let hi = (lo + half).min(end);
        let mut pts = vec![lo];
        pts.extend(extra.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        let q = integrate_complex(&mut f, &pts, TRIPLE_TOL);
        total += q.value;
        error += q.error;
        sums.push(total);
        let scale = total.norm().max(1e-300);
        if q.value.norm() <= 1e-15 * scale {
            quiet += 1;
            if quiet >= 3 {
                return Ok((total, error));
            }
        } else {
            quiet = 0;
        }
        if sums.len() >= 12 && sums.len().is_multiple_of(2) {
            let window = &sums[sums.len() - 12..];
            if let Some(est) = wynn_epsilon(window) {
                if let Some(prev) = previous_estimate {
                    let change = (est - prev).norm();
                    if change <= 1e-13 * est.norm().max(1e-12) {
                        return Ok((est, error + change));
                    }
                }
                previous_estimate = Some(est);
            }
        }
        lo = hi;
    }
    match previous_estimate {
        Some(est) => Ok((est, error + (est - total).norm())),
        None => Ok((total, error)),
    }
}

/// `Φ(t) = iat - σ²t²/2 + ∫ (e^{itx} - 1 - itx·1_{|x|≤1}) M(dx)`.
///
/// Rejects triples whose spectral measure fails `∫ min(1, x²) dM < ∞`.
/// The result is exactly Hermitian: negative `t` are evaluated by conjugation.
pub fn exponent_from_triple(triple: &Triple) -> Result<LevyExponent> {
    if !(triple.gaussian_var >= 0.0 && triple.gaussian_var.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Gaussian variance must be finite and nonnegative, got {}",
            triple.gaussian_var
        )));
    }
    if !triple.shift.is_finite() {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    let (a, var) = (triple.shift, triple.gaussian_var);
    let Some(spectral) = triple.spectral.clone().filter(|s| !s.is_zero()) else {
        return Ok(LevyExponent::closed_form(
            "triple",
            &[("shift", a), ("gaussian_var", var)],
            LogMoment::Yes,
            move |t| Complex64::new(-0.5 * var * t * t, a * t),
        ));
    };
    let check = integrability_check(&spectral);
    if check.verdict == Verdict::NonMember {
        let w = &check.witnesses[0];
        return Err(Error::DivergentSpectralIntegral {
            side: w.side,
            detail: w.inequality.clone(),
        });
    }
    let f = move |t: f64| -> Result<Evaluated> {
        let u = t.abs();
        let pos = side_integral(Side::Pos, &spectral.pos, u)?;
        let neg = side_integral(Side::Neg, &spectral.neg, u)?;
        let mut value = Complex64::new(-0.5 * var * u * u, a * u) + pos.value + neg.value.conj();
        if t < 0.0 {
            value = value.conj();
        }
        Ok(Evaluated {
            value,
            error: pos.error + neg.error,
        })
    };
    Ok(LevyExponent::new(ExponentKind::SpectralBacked, LogMoment::Unknown, f))
}

/// Continuous branch of `log φ` along the grid, unwrapped outward from `t = 0`.
///
/// Fails if `φ` vanishes at a grid point or if the argument of `φ` moves by
/// more than `π/2` between neighbouring points.
pub fn eval_distinguished_log<F>(phi_hat: F, grid: &Grid) -> Result<Sampled>
where
    F: Fn(f64) -> Complex64,
{
    let t = grid.points();
    let zero = grid
        .zero_index()
        .ok_or_else(|| Error::InvalidGrid("grid must contain t = 0".into()))?;
    let values: Vec<Complex64> = t.iter().map(|&s| phi_hat(s)).collect();
    for (&s, v) in t.iter().zip(&values) {
        if !(v.norm() > 0.0) || !v.norm().is_finite() {
            return Err(Error::NotInfinitelyDivisible { t: s });
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
    out[zero] = values[zero].ln();
    let walk = |from: usize, to: usize, out: &mut Vec<Complex64>| -> Result<()> {
        let jump = (values[to] / values[from]).arg();
        if jump.abs() > 0.5 * PI {
            return Err(Error::GridTooCoarse { t: t[to], jump });
        }
        out[to] = Complex64::new(values[to].norm().ln(), out[from].im + jump);
        Ok(())
    };
    for i in zero + 1..t.len() {
        walk(i - 1, i, &mut out)?;
    }
    for i in (0..zero).rev() {
        walk(i + 1, i, &mut out)?;
    }
    Ok(Sampled {
        t: t.to_vec(),
        values: out,
        errors: vec![0.0; t.len()],
    })
}

/// Result of fitting `a(t) - b(t) ≈ iδt` by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftFit {
    pub delta: f64,
    /// Sup-norm of `a - b - iδt` after the fit.
    pub residual_sup: f64,
}

/// Least-squares linear drift between two samples on the same grid.
pub fn fit_linear_drift(a: &Sampled, b: &Sampled) -> DriftFit {
    assert_eq!(a.t, b.t, "samples on different grids");
    let (mut num, mut den) = (0.0, 0.0);
    for ((t, x), y) in a.t.iter().zip(&a.values).zip(&b.values) {
        num += t * (x - y).im;
        den += t * t;
    }
    let delta = if den > 0.0 { num / den } else { 0.0 };
    let residual_sup =
        a.t.iter()
            .zip(&a.values)
            .zip(&b.values)
            .map(|((t, x), y)| (x - y - Complex64::new(0.0, delta * t)).norm())
            .fold(0.0, f64::max);
    DriftFit { delta, residual_sup }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sampling_uses_hermitian_symmetry_consistently() {
        let g = LevyExponent::closed_form("gamma", &[], LogMoment::Yes, |t| -c(1.0, -t).ln());
        for grid in [
            Grid::uniform(-3.0, 3.0, 7).unwrap(),
            Grid::uniform(-3.0, 3.0, 8).unwrap(),
            Grid::uniform(-1.0, 4.0, 6).unwrap(),
        ] {
            let s = g.sample(&grid).unwrap();
            for (t, v) in s.t.iter().zip(&s.values) {
                assert!((v - g.value(*t).unwrap()).norm() < 1e-15, "{t}");
            }
        }
    }

    #[test]
    fn trivial_triples() {
        let g = exponent_from_triple(&Triple::new(0.0, 1.0, None)).unwrap();
        assert_eq!(g.value(3.0).unwrap(), c(-4.5, 0.0));
        let s = exponent_from_triple(&Triple::new(1.0, 0.0, None)).unwrap();
        assert_eq!(s.value(2.0).unwrap(), c(0.0, 2.0));
        assert!(exponent_from_triple(&Triple::new(0.0, -1.0, None)).is_err());
    }

    #[test]
    fn gamma_triple_matches_closed_form_after_recentring() {
        let (alpha, lambda) = (2.0, 1.5);
        let m = SideMeasure::density(move |x| alpha * (-lambda * x).exp() / x, f64::INFINITY, (1e-3, 40.0)).unwrap();
        let e = exponent_from_triple(&Triple::new(0.0, 0.0, Some(SpectralDensity::one_sided(m)))).unwrap();
        let drift = alpha * (1.0 - (-lambda).exp()) / lambda;
        for t in [-7.0, -0.3, 0.01, 1.0, 5.0, 20.0] {
            let want = -alpha * (c(1.0, -t / lambda)).ln() - c(0.0, t * drift);
            let got = e.value(t).unwrap();
            assert!((got - want).norm() < 1e-9, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn stable_triple_has_power_exponent() {
        let alpha: f64 = 0.7;
        let cst = -1.0 / (2.0 * statrs::function::gamma::gamma(-alpha) * (PI * alpha / 2.0).cos());
        let side = SideMeasure::density(move |x| cst * x.powf(-1.0 - alpha), f64::INFINITY, (1e-2, 1e2)).unwrap();
        let e = exponent_from_triple(&Triple::new(0.0, 0.0, Some(SpectralDensity::symmetric(side)))).unwrap();
        for t in [0.05, 1.0, 3.0, 17.0] {
            let got = e.value(t).unwrap();
            assert!((got - c(-t.powf(alpha), 0.0)).norm() < 1e-8, "t={t}: {got}");
        }
    }

    #[test]
    fn non_integrable_measure_is_rejected() {
        let side = SideMeasure::density(|x| x.powf(-3.5), f64::INFINITY, (1e-2, 1e2)).unwrap();
        let r = exponent_from_triple(&Triple::new(0.0, 0.0, Some(SpectralDensity::one_sided(side))));
        assert!(matches!(r, Err(Error::DivergentSpectralIntegral { .. })));
    }

    #[test]
    fn small_angle_expansion_is_continuous() {
        for theta in [0.0999999, 0.1, 0.1000001, 1e-5, -0.05] {
            let got = expm1_minus_linear(theta);
            let want = c(theta.cos() - 1.0, theta.sin() - theta);
            assert!((got - want).norm() < 1e-15 + 1e-9 * want.norm(), "{theta}");
        }
    }

    #[test]
    fn distinguished_log_of_gamma_cf() {
        let grid = Grid::uniform(0.0, 10.0, 1001).unwrap();
        let s = eval_distinguished_log(|t| c(1.0, -t).powf(-2.0), &grid).unwrap();
        for (t, v) in s.t.iter().zip(&s.values) {
            assert!((v.im - 2.0 * t.atan()).abs() < 1e-12);
            assert!((v.re + (1.0 + t * t).ln()).abs() < 1e-12);
        }
        let bad = Grid::uniform(0.0, 10.0, 5).unwrap();
        assert!(matches!(
            eval_distinguished_log(|t| c(0.0, 0.8 * t).exp(), &bad),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn vanishing_cf_is_rejected() {
        let grid = Grid::symmetric(3.0, 61).unwrap();
        let r = eval_distinguished_log(
            |t| {
                if t.abs() > 2.0 {
                    c(0.0, 0.0)
                } else {
                    c((-t * t).exp(), 0.0)
                }
            },
            &grid,
        );
        assert!(matches!(r, Err(Error::NotInfinitelyDivisible { .. })));
    }

    #[test]
    fn dilation_and_addition() {
        let p = LevyExponent::closed_form("s", &[], LogMoment::Yes, |t| c(-t.abs().powf(1.3), 0.0));
        let q = exponent_dilate(&exponent_dilate(&p, 2.0).unwrap(), 0.5).unwrap();
        assert!((q.value(1.7).unwrap() - p.value(1.7).unwrap()).norm() < 1e-12);
        let z = exponent_add(&p, &LevyExponent::zero());
        assert_eq!(z.value(0.4).unwrap(), p.value(0.4).unwrap());
        assert!(exponent_dilate(&p, 0.0).is_err());
    }

    #[test]
    fn drift_fit_recovers_slope() {
        let grid = Grid::symmetric(5.0, 101).unwrap();
        let a = LevyExponent::closed_form("a", &[], LogMoment::Yes, |t| c(-t * t, 0.3 * t))
            .sample(&grid)
            .unwrap();
        let b = LevyExponent::gaussian(2.0).sample(&grid).unwrap();
        let fit = fit_linear_drift(&a, &b);
        assert!((fit.delta - 0.3).abs() < 1e-14);
        assert!(fit.residual_sup < 1e-13);
    }
}
