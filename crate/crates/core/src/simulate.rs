//! Monte Carlo sampling of compound Poisson path integrals and Laplace
//! series, with empirical characteristic functions.
//!
//! Replicate `i` draws from `ChaCha20Rng::seed_from_u64(seed)` on stream `i`,
//! so samples do not depend on thread count or scheduling.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, Open01};
use rayon::prelude::*;

use crate::catalogue::{self, log_x_over_sinh, x_coth_x_minus_one, ParamValue, Params};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::maps::map_i;

pub type SimRng = ChaCha20Rng;

/// Generator description written to output metadata.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha), seed_from_u64(seed), stream = replicate index";

pub const DEFAULT_HORIZON: f64 = 40.0;
pub const DEFAULT_SERIES_CUTOFF: usize = 2000;

/// Number of Laplace terms in the compound Poisson driver of the
/// Lévy area sampler.
const AREA_DRIVER_TERMS: usize = 200;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Horizon `T` for `∫₀^T e^{-s} dY(s)`.
    pub truncation: f64,
    /// Number of terms `K` kept in a Laplace series.
    pub series_cutoff: usize,
    pub t_grid: Grid,
}

impl SimConfig {
    pub fn new(seed: u64, n_samples: usize, t_grid: Grid) -> Self {
        Self {
            seed,
            n_samples,
            truncation: DEFAULT_HORIZON,
            series_cutoff: DEFAULT_SERIES_CUTOFF,
            t_grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
        }
        if !(self.truncation.is_finite() && self.truncation > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation must be positive, got {}",
                self.truncation
            )));
        }
        if self.series_cutoff == 0 {
            return Err(Error::InvalidParameter("series_cutoff must be at least 1".into()));
        }
        Ok(())
    }

    /// Generator for replicate `index`.
    pub fn rng(&self, index: usize) -> SimRng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// `h(s) = e^{-s}` on `[0, T]`.
    ExpDecay,
    /// `h(s) = s` on `[0, 1]`.
    LinearRamp,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub t: Vec<f64>,
    pub empirical_cf: Vec<Complex64>,
    pub target_cf: Option<Vec<Complex64>>,
    pub sup_distance: Option<f64>,
    pub ci_halfwidth: f64,
    pub n_samples: usize,
}

impl SimResult {
    pub fn with_target(mut self, target: Vec<Complex64>) -> Result<Self> {
        if target.len() != self.t.len() {
            return Err(Error::InvalidGrid(format!(
                "target has {} values for {} grid points",
                target.len(),
                self.t.len()
            )));
        }
        let sup = self
            .empirical_cf
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.sup_distance = Some(sup);
        self.target_cf = Some(target);
        Ok(self)
    }

    pub fn with_target_fn(self, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let target = self.t.iter().map(|&t| f(t)).collect();
        self.with_target(target)
    }

    /// CSV with columns `t, re_emp, im_emp, re_target, im_target, abs_err`
    /// and `#` metadata lines.
    pub fn write_csv<W: Write>(&self, cfg: &SimConfig, label: &str, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# law: {label}")?;
        writeln!(out, "# seed: {}", cfg.seed)?;
        writeln!(out, "# n: {}", self.n_samples)?;
        writeln!(out, "# T: {}", cfg.truncation)?;
        writeln!(out, "# K: {}", cfg.series_cutoff)?;
        writeln!(out, "# rng: {RNG_NAME}")?;
        writeln!(out, "# ci_halfwidth: {}", self.ci_halfwidth)?;
        if let Some(d) = self.sup_distance {
            writeln!(out, "# sup_distance: {d}")?;
        }
        writeln!(out, "t,re_emp,im_emp,re_target,im_target,abs_err")?;
        for (i, (&t, e)) in self.t.iter().zip(&self.empirical_cf).enumerate() {
            match &self.target_cf {
                Some(target) => {
                    let g = target[i];
                    writeln!(out, "{t},{},{},{},{},{}", e.re, e.im, g.re, g.im, (e - g).norm())?
                }
                None => writeln!(out, "{t},{},{},,,", e.re, e.im)?,
            }
        }
        Ok(())
    }
}

fn replicate<F>(cfg: &SimConfig, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut SimRng) -> f64 + Sync,
{
    cfg.validate()?;
    Ok((0..cfg.n_samples)
        .into_par_iter()
        .map(|i| draw(&mut cfg.rng(i)))
        .collect())
}

/// Standard Laplace variable, characteristic function `1/(1 + t²)`.
pub fn laplace(rng: &mut SimRng) -> f64 {
    let a: f64 = rng.sample(Exp1);
    let b: f64 = rng.sample(Exp1);
    a - b
}

pub fn exponential(rng: &mut SimRng, lambda: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / lambda
}

/// One draw of `Σ h(s_i)·J_i` over the jumps of a compound Poisson process.
pub fn cp_path_integral_once<J>(rng: &mut SimRng, rate: f64, jump: &J, decay: Decay, horizon: f64) -> f64
where
    J: Fn(&mut SimRng) -> f64,
{
    let end = match decay {
        Decay::ExpDecay => horizon,
        Decay::LinearRamp => 1.0,
    };
    let mut s = 0.0;
    let mut total = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        s += gap / rate;
        if s > end {
            return total;
        }
        let h = match decay {
            Decay::ExpDecay => (-s).exp(),
            Decay::LinearRamp => s,
        };
        total += h * jump(rng);
    }
}

/// One draw of `Y(1)` for a compound Poisson `Y`.
fn cp_sum_once<J>(rng: &mut SimRng, rate: f64, jump: &J) -> f64
where
    J: Fn(&mut SimRng) -> f64,
{
    let mut s = 0.0;
    let mut total = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        s += gap / rate;
        if s > 1.0 {
            return total;
        }
        total += jump(rng);
    }
}

/// Samples `∫ h(s) dY(s)` for a compound Poisson `Y` with the given rate
/// and jump law.
pub fn sample_cp_path_integral<J>(rate: f64, jump_sampler: J, decay: Decay, cfg: &SimConfig) -> Result<Vec<f64>>
where
    J: Fn(&mut SimRng) -> f64 + Sync,
{
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    replicate(cfg, |rng| {
        cp_path_integral_once(rng, rate, &jump_sampler, decay, cfg.truncation)
    })
}

/// Coefficients `a_k`, `k ≥ 1`, of a Laplace series.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientRule {
    /// `scale·k^{-p}`.
    Power {
        scale: f64,
        p: f64,
    },
    /// `scale/k`.
    Harmonic {
        scale: f64,
    },
    /// `scale/(2k - 1)`.
    OddHarmonic {
        scale: f64,
    },
    Explicit(Vec<f64>),
}

impl CoefficientRule {
    pub fn coefficient(&self, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            CoefficientRule::Power { scale, p } => scale * kf.powf(-p),
            CoefficientRule::Harmonic { scale } => scale / kf,
            CoefficientRule::OddHarmonic { scale } => scale / (2.0 * kf - 1.0),
            CoefficientRule::Explicit(a) => a.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// The first `cutoff` coefficients (all of them for an explicit list).
    pub fn terms(&self, cutoff: usize) -> Result<Vec<f64>> {
        let n = match self {
            CoefficientRule::Power { p, .. } if *p <= 0.5 => {
                return Err(Error::InvalidParameter(format!(
                    "divergent coefficient rule: sum of a_k^2 diverges for p = {p}"
                )))
            }
            CoefficientRule::Explicit(a) => a.len(),
            _ => cutoff,
        };
        let terms: Vec<f64> = (1..=n).map(|k| self.coefficient(k)).collect();
        if terms.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(terms)
    }

    /// Exponent `-Σ_{k≤K} log(1 + a_k² t²)` of the truncated series.
    pub fn exponent(&self, cutoff: usize) -> Result<impl Fn(f64) -> f64 + Send + Sync> {
        let sq: Vec<f64> = self.terms(cutoff)?.into_iter().map(|a| a * a).collect();
        Ok(move |t: f64| -sq.iter().map(|s| (s * t * t).ln_1p()).sum::<f64>())
    }
}

/// Samples `Σ_{k≤K} a_k η_k` with i.i.d. standard Laplace `η_k`.
pub fn sample_laplace_series(rule: &CoefficientRule, cfg: &SimConfig) -> Result<Vec<f64>> {
    let a = rule.terms(cfg.series_cutoff)?;
    replicate(cfg, |rng| laplace_series_once(rng, &a))
}

fn laplace_series_once(rng: &mut SimRng, a: &[f64]) -> f64 {
    // smallest terms first to limit rounding
    a.iter().rev().map(|ak| ak * laplace(rng)).sum()
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// `(1/n) Σ e^{itx_j}` on each grid point.
pub fn empirical_cf(samples: &[f64], t_grid: &Grid) -> Result<SimResult> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let n = samples.len() as f64;
    let t = t_grid.points().to_vec();
    let cf = t
        .par_iter()
        .map(|&t| {
            let mut re = Vec::with_capacity(samples.len());
            let mut im = Vec::with_capacity(samples.len());
            for &x in samples {
                let (s, c) = (t * x).sin_cos();
                re.push(c);
                im.push(s);
            }
            Complex64::new(pairwise_sum(&re) / n, pairwise_sum(&im) / n)
        })
        .collect();
    Ok(SimResult {
        t,
        empirical_cf: cf,
        target_cf: None,
        sup_distance: None,
        ci_halfwidth: 2.0 / n.sqrt(),
        n_samples: samples.len(),
    })
}

fn real_param(name: &str, params: &Params, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(ParamValue::Real(v)) if v.is_finite() && *v > 0.0 => Ok(*v),
        Some(v) => Err(Error::InvalidParameter(format!("{name}: bad `{key}` = {v:?}"))),
    }
}

/// Characteristic function of the Lévy area with a driver jump:
/// `(tu/sinh tu)·exp(-(tu coth tu - 1))`.
pub fn levy_area_with_driver_cf(t: f64, u: f64) -> Complex64 {
    let x = t * u;
    Complex64::new((log_x_over_sinh(x) - x_coth_x_minus_one(x)).exp(), 0.0)
}

/// Sample-level check of `I(ν) ∗ ν = I(ρ)` with `ν = J(ρ)`: independent
/// draws `X ~ I(ν)` and `W ~ ν` are summed and compared with `exp(Φ)`.
///
/// Supported `rho_name` values:
/// * `cp_exp` (`alpha`, `lambda`): `W = ∫₀¹ s dY_ρ`, `X = ∫ e^{-s} dY_ν`
///   where `ν` is compound Poisson with jumps `U·Exp(λ)`. Target from the
///   quadrature map `I` of the catalogue exponent.
/// * `zero`.
/// * `levy_area` (`u`): `X` is the Laplace series `Σ u/(πk)·η_k` truncated at
///   `series_cutoff`, `W` is its driving law, compound Poisson with rate 2
///   and jumps `u/(πk)·η` for each `k` up to 200. Target in closed form.
pub fn verify_factorization_mc(rho_name: &str, params: &Params, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let horizon = cfg.truncation;
    match rho_name {
        "zero" => {
            let samples = replicate(cfg, |_| 0.0)?;
            empirical_cf(&samples, &cfg.t_grid)?.with_target_fn(|_| Complex64::new(1.0, 0.0))
        }
        "cp_exp" => {
            let alpha = real_param(rho_name, params, "alpha", 1.0)?;
            let lambda = real_param(rho_name, params, "lambda", 1.0)?;
            let rho = catalogue::get_law("cp_exp", params)?;
            let target = map_i(&rho.exponent)?.sample(&cfg.t_grid)?;
            let samples = replicate(cfg, |rng| {
                let w = cp_path_integral_once(
                    rng,
                    alpha,
                    &|r: &mut SimRng| exponential(r, lambda),
                    Decay::LinearRamp,
                    1.0,
                );
                let nu_jump = |r: &mut SimRng| {
                    let u: f64 = r.sample(Open01);
                    u * exponential(r, lambda)
                };
                let x = cp_path_integral_once(rng, alpha, &nu_jump, Decay::ExpDecay, horizon);
                x + w
            })?;
            empirical_cf(&samples, &cfg.t_grid)?.with_target(target.values.iter().map(|v| v.exp()).collect())
        }
        "levy_area" => {
            let u = real_param(rho_name, params, "u", 1.0)?;
            let x_terms = CoefficientRule::Harmonic { scale: u / PI }.terms(cfg.series_cutoff)?;
            let driver: Vec<f64> = x_terms.iter().take(AREA_DRIVER_TERMS).copied().collect();
            let rate = 2.0 * driver.len() as f64;
            let samples = replicate(cfg, |rng| {
                let x = laplace_series_once(rng, &x_terms);
                let jump = |r: &mut SimRng| {
                    let k = r.random_range(0..driver.len());
                    driver[k] * laplace(r)
                };
                let w = cp_sum_once(rng, rate, &jump);
                x + w
            })?;
            empirical_cf(&samples, &cfg.t_grid)?.with_target_fn(|t| levy_area_with_driver_cf(t, u))
        }
        other => Err(Error::Unsupported(format!(
            "no sampler for `{other}`; supported: cp_exp, zero, levy_area"
        ))),
    }
}
