//! Membership tests for the classes `U ⊃ L ⊃ L^f` and the filtration
//! `L_n`, `L_n^f`, carried out per side on divided differences.
//!
//! | class | criterion on each side |
//! |-------|------------------------|
//! | `U`   | `m` nonincreasing (tail convex) |
//! | `L`   | `k(r) = r·m(r)` nonincreasing |
//! | `L^f` | `k` nonincreasing and convex |
//! | `L_n` | `k_0, …, k_n` nonincreasing, `k_{j+1} = -r·d/dr k_j` |
//!
//! A violation larger than `NEAR_BOUNDARY_FACTOR · tolerance` relative to
//! the local scale is conclusive; smaller ones make the verdict inconclusive.

use std::fmt;

use serde::{Serialize, Serializer};

use super::density::{Side, SideMeasure};
use super::SpectralDensity;
use crate::diff;
use crate::tolerances::{DIVIDED_DIFFERENCE, NEAR_BOUNDARY_FACTOR, SPECTRAL_STEP};

/// Minimum number of probe points per side for a conclusive verdict.
pub const MIN_POINTS: usize = 8;

const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassTested {
    L,
    U,
    Lf,
    /// `L^f` through `r²·L_M''(r)` nondecreasing.
    LfC3,
    Ln(usize),
    Lnf(usize),
    IdLog,
    /// `∫ min(1, x²) dM < ∞`.
    Integrable,
}

impl fmt::Display for ClassTested {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTested::L => f.write_str("L"),
            ClassTested::U => f.write_str("U"),
            ClassTested::Lf => f.write_str("Lf"),
            ClassTested::LfC3 => f.write_str("Lf_c3"),
            ClassTested::Ln(n) => write!(f, "L{n}"),
            ClassTested::Lnf(n) => write!(f, "L{n}f"),
            ClassTested::IdLog => f.write_str("ID_log"),
            ClassTested::Integrable => f.write_str("integrable"),
        }
    }
}

impl std::str::FromStr for ClassTested {
    type Err = crate::error::Error;

    /// Accepts `L`, `U`, `Lf`, `Lf_c3`, `L<n>`, `L<n>f`, `ID_log`, `integrable`.
    fn from_str(s: &str) -> crate::error::Result<Self> {
        let bad = || crate::error::Error::InvalidParameter(format!("unknown class `{s}`"));
        Ok(match s {
            "L" => ClassTested::L,
            "U" => ClassTested::U,
            "Lf" => ClassTested::Lf,
            "Lf_c3" => ClassTested::LfC3,
            "ID_log" => ClassTested::IdLog,
            "integrable" => ClassTested::Integrable,
            _ => {
                let rest = s.strip_prefix('L').ok_or_else(bad)?;
                let (digits, filtered) = match rest.strip_suffix('f') {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                let n: usize = digits.parse().map_err(|_| bad())?;
                if filtered {
                    ClassTested::Lnf(n)
                } else {
                    ClassTested::Ln(n)
                }
            }
        })
    }
}

impl Serialize for ClassTested {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non_member",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A point where a defining inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub side: Side,
    pub x: f64,
    pub inequality: String,
    pub magnitude: f64,
    /// Size of the failure relative to the local scale.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub class_tested: ClassTested,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub tolerance: f64,
    /// Pullback stage of the first failure (filtration tests only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }
}

/// Outcome of the checks on one side, possibly over several stages.
#[derive(Default)]
struct Findings {
    conclusive: Vec<Witness>,
    marginal: Vec<Witness>,
    notes: Vec<String>,
    undecided: bool,
    stage: Option<usize>,
    tol: f64,
}

impl Findings {
    fn new(tol: f64) -> Self {
        Findings {
            tol,
            ..Default::default()
        }
    }

    fn failed(&self) -> bool {
        !self.conclusive.is_empty()
    }

    fn absorb(&mut self, found: Vec<Witness>, stage: Option<usize>) {
        let strict = NEAR_BOUNDARY_FACTOR * self.tol;
        for w in found {
            if w.relative > strict {
                if self.conclusive.is_empty() {
                    self.stage = stage;
                }
                self.conclusive.push(w);
            } else {
                if self.marginal.is_empty() && self.conclusive.is_empty() && self.stage.is_none() {
                    self.stage = stage;
                }
                self.marginal.push(w);
            }
        }
    }

    fn undecided(&mut self, note: String, stage: Option<usize>) {
        if !self.undecided && self.conclusive.is_empty() && self.stage.is_none() {
            self.stage = stage;
        }
        self.undecided = true;
        self.notes.push(note);
    }
}

fn report(class: ClassTested, sides: Vec<Findings>) -> ClassificationReport {
    let tolerance = sides.first().map_or(DIVIDED_DIFFERENCE, |s| s.tol);
    let failed = sides.iter().any(Findings::failed);
    let marginal = sides.iter().any(|s| !s.marginal.is_empty() || s.undecided);
    let verdict = if failed {
        Verdict::NonMember
    } else if marginal {
        Verdict::Inconclusive
    } else {
        Verdict::Member
    };
    let stage = sides
        .iter()
        .filter(|s| if failed { s.failed() } else { true })
        .filter_map(|s| s.stage)
        .min();
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    for s in sides {
        witnesses.extend(s.conclusive.into_iter().take(MAX_WITNESSES));
        if !failed {
            witnesses.extend(s.marginal.into_iter().take(MAX_WITNESSES));
        }
        notes.extend(s.notes);
    }
    ClassificationReport {
        class_tested: class,
        verdict,
        witnesses,
        tolerance,
        stage,
        notes,
    }
}

/// Maximal runs of increase of `f` beyond tolerance. Each run yields one
/// witness at its right end, i.e. at the local maximum it climbs to.
fn rising_runs(side: Side, x: &[f64], f: &[f64], err: Option<&[f64]>, what: &str, tol: f64) -> Vec<Witness> {
    let mut out = Vec::new();
    let mut i = 0;
    let n = x.len();
    while i + 1 < n {
        let step_up = |i: usize| {
            let rise = f[i + 1] - f[i];
            let scale = f[i].abs().max(f[i + 1].abs());
            let noise = err.map_or(0.0, |e| 3.0 * (e[i] + e[i + 1]));
            (rise > tol * scale && rise > 0.0, rise, scale, noise)
        };
        let (up, ..) = step_up(i);
        if !up {
            i += 1;
            continue;
        }
        let start = i;
        let mut relative: f64 = 0.0;
        let mut noisy = true;
        while i + 1 < n {
            let (up, rise, scale, noise) = step_up(i);
            if !up {
                break;
            }
            relative = relative.max(if scale > 0.0 { rise / scale } else { f64::INFINITY });
            noisy &= rise <= noise;
            i += 1;
        }
        out.push(Witness {
            side,
            x: x[i],
            inequality: format!("{what} increases on [{:.6e}, {:.6e}]", x[start], x[i]),
            magnitude: f[i] - f[start],
            relative: if noisy { relative.min(tol) } else { relative },
        });
    }
    out
}

/// Maximal runs of nodes where convexity fails; one witness per run at the
/// node with the largest slope drop.
fn concave_runs(side: Side, x: &[f64], f: &[f64], what: &str, tol: f64) -> Vec<Witness> {
    let kinks = diff::concave_kinks(x, f, tol);
    let mut out: Vec<Witness> = Vec::new();
    let mut last_node: Option<usize> = None;
    for v in kinks {
        let node = x.partition_point(|&p| p < v.x);
        let adjacent = last_node.is_some_and(|l| node == l + 1);
        last_node = Some(node);
        if adjacent {
            let w = out.last_mut().expect("run in progress");
            if v.magnitude > w.magnitude {
                w.x = v.x;
                w.magnitude = v.magnitude;
            }
            w.relative = w.relative.max(v.relative);
            continue;
        }
        out.push(Witness {
            side,
            x: v.x,
            inequality: format!("{what} is not convex"),
            magnitude: v.magnitude,
            relative: v.relative,
        });
    }
    out
}

fn atom_witnesses(side: Side, s: &SideMeasure, what: &str) -> Vec<Witness> {
    s.atoms()
        .iter()
        .filter(|a| a.mass > 0.0)
        .map(|a| Witness {
            side,
            x: a.location,
            inequality: format!("atom of mass {:e}: {what}", a.mass),
            magnitude: a.mass,
            relative: f64::INFINITY,
        })
        .collect()
}

/// Probe grid of a side, or `None` (with a note) if it is too coarse.
fn probe(side: Side, s: &SideMeasure, f: &mut Findings) -> Option<Vec<f64>> {
    let grid = s.probe_grid();
    if grid.len() < MIN_POINTS {
        f.undecided(
            format!("side {side}: {} probe points, need at least {MIN_POINTS}", grid.len()),
            None,
        );
        return None;
    }
    Some(grid)
}

fn check_finite(side: Side, values: &[f64], what: &str, stage: Option<usize>, f: &mut Findings) -> bool {
    if values.iter().all(|v| v.is_finite()) {
        return true;
    }
    f.undecided(format!("side {side}: {what} not finite on the probe grid"), stage);
    false
}

fn per_side<F>(m: &SpectralDensity, tol: f64, mut check: F) -> Vec<Findings>
where
    F: FnMut(Side, &SideMeasure, &mut Findings),
{
    Side::BOTH
        .iter()
        .map(|&side| {
            let mut f = Findings::new(tol);
            let s = m.side(side);
            if !s.is_zero() {
                check(side, s, &mut f);
            }
            f
        })
        .collect()
}

/// Runs the test for `class` at the default tolerance.
pub fn classify(m: &SpectralDensity, class: ClassTested) -> ClassificationReport {
    classify_with_tolerance(m, class, DIVIDED_DIFFERENCE)
}

/// Runs the test for `class`, treating relative changes below `tol` as
/// flat. `tol` must be positive.
pub fn classify_with_tolerance(m: &SpectralDensity, class: ClassTested, tol: f64) -> ClassificationReport {
    match class {
        ClassTested::L => l_test(m, tol),
        ClassTested::U => u_test(m, tol),
        ClassTested::Lf => lf_test(m, tol),
        ClassTested::LfC3 => c3_density_test(m, tol),
        ClassTested::Ln(n) => filtration(m, n, false, tol),
        ClassTested::Lnf(n) => filtration(m, n, true, tol),
        ClassTested::IdLog => logmoment_test(m, tol),
        ClassTested::Integrable => integrability_test(m, tol),
    }
}

/// Class `L`: `k(r) = r·m(r)` nonincreasing on each side.
pub fn classify_l(m: &SpectralDensity) -> ClassificationReport {
    l_test(m, DIVIDED_DIFFERENCE)
}

fn l_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        f.absorb(
            atom_witnesses(side, s, "class L measures are absolutely continuous"),
            Some(0),
        );
        let Some(grid) = probe(side, s, f) else { return };
        let k: Vec<f64> = grid.iter().map(|&r| s.k(r)).collect();
        if check_finite(side, &k, "k", Some(0), f) {
            f.absorb(rising_runs(side, &grid, &k, None, "k(r) = r m(r)", f.tol), Some(0));
        }
    });
    report(ClassTested::L, sides)
}

/// Class `U`: the density is nonincreasing on each side, equivalently the
/// tail `M̄` is convex (`L_M` concave on `(0, ∞)`).
pub fn classify_u(m: &SpectralDensity) -> ClassificationReport {
    u_test(m, DIVIDED_DIFFERENCE)
}

fn u_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        f.absorb(atom_witnesses(side, s, "a step in the tail is not convex"), Some(0));
        let Some(grid) = probe(side, s, f) else { return };
        let d: Vec<f64> = grid.iter().map(|&r| s.density_at(r)).collect();
        if check_finite(side, &d, "density", Some(0), f) {
            f.absorb(
                rising_runs(side, &grid, &d, None, "m(r) (tail not convex)", f.tol),
                Some(0),
            );
        }
    });
    report(ClassTested::U, sides)
}

/// Class `L^f`: `k` nonincreasing and convex on each side.
pub fn classify_lf(m: &SpectralDensity) -> ClassificationReport {
    lf_test(m, DIVIDED_DIFFERENCE)
}

fn lf_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        f.absorb(
            atom_witnesses(side, s, "class L measures are absolutely continuous"),
            Some(0),
        );
        let Some(grid) = probe(side, s, f) else { return };
        let k: Vec<f64> = grid.iter().map(|&r| s.k(r)).collect();
        if check_finite(side, &k, "k", Some(0), f) {
            f.absorb(rising_runs(side, &grid, &k, None, "k(r) = r m(r)", f.tol), Some(0));
            f.absorb(concave_runs(side, &grid, &k, "k(r) = r m(r)", f.tol), Some(0));
        }
    });
    report(ClassTested::Lf, sides)
}

fn c3_findings(side: Side, grid: &[f64], h: &[f64], noisy: usize, tol: f64) -> Findings {
    let mut f = Findings::new(tol);
    if grid.len() < MIN_POINTS {
        f.undecided(
            format!("side {side}: {} usable points, need at least {MIN_POINTS}", grid.len()),
            None,
        );
        return f;
    }
    if noisy * 4 > grid.len() + noisy {
        f.undecided(
            format!("side {side}: second differences too noisy at {noisy} points"),
            None,
        );
    }
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    f.absorb(rising_runs(side, grid, &neg, None, "-r^2 L_M''(r)", tol), None);
    f
}

/// `L^f` through `r ↦ r²·L_M''(r)` nondecreasing on one side, with the
/// second derivative of the spectral function supplied by the caller.
pub fn classify_lf_c3<F>(lm_second_deriv: F, side: Side, grid: &[f64]) -> ClassificationReport
where
    F: Fn(f64) -> f64,
{
    let (pts, h): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .map(|&r| (r, r * r * lm_second_deriv(r)))
        .filter(|(_, v)| v.is_finite())
        .unzip();
    let noisy = grid.len() - pts.len();
    report(
        ClassTested::LfC3,
        vec![c3_findings(side, &pts, &h, noisy, DIVIDED_DIFFERENCE)],
    )
}

/// [`classify_lf_c3`] on both sides of a density, with `L_M'' = m'`
/// obtained by finite differences. Points whose difference estimate is
/// unreliable (a kink within the stencil) are dropped.
pub fn classify_lf_c3_density(m: &SpectralDensity) -> ClassificationReport {
    c3_density_test(m, DIVIDED_DIFFERENCE)
}

fn c3_density_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        f.absorb(
            atom_witnesses(side, s, "class L measures are absolutely continuous"),
            None,
        );
        let grid = s.probe_grid();
        let (pts, h, noisy) = if s.is_tabulated() {
            if grid.len() < 3 {
                (Vec::new(), Vec::new(), 0)
            } else {
                let d: Vec<f64> = grid.iter().map(|&r| s.density_at(r)).collect();
                let slope = diff::three_point(&grid, &d);
                let h: Vec<f64> = grid.iter().zip(&slope).map(|(r, v)| r * r * v).collect();
                (grid.clone(), h, 0)
            }
        } else {
            let mut pts = Vec::new();
            let mut h = Vec::new();
            let mut noisy = 0;
            for &r in &grid {
                let d = diff::first(|w| Ok(s.density_at(w)), r, SPECTRAL_STEP * r).expect("infallible");
                let scale = d.value.abs().max(s.density_at(r) / r);
                if d.value.is_finite() && d.error <= 1e-6 * scale {
                    pts.push(r);
                    h.push(r * r * d.value);
                } else {
                    noisy += 1;
                }
            }
            (pts, h, noisy)
        };
        let found = c3_findings(side, &pts, &h, noisy, f.tol);
        f.conclusive.extend(found.conclusive);
        f.marginal.extend(found.marginal);
        f.notes.extend(found.notes);
        f.undecided |= found.undecided;
    });
    report(ClassTested::LfC3, sides)
}

/// Densities of the successive pullbacks `m_0 = m`,
/// `m_{j+1}(r) = -d/dr [r·m_j(r)]`, with error estimates.
fn pullback(s: &SideMeasure, j: usize, r: f64) -> (f64, f64) {
    if j == 0 {
        let v = s.density_at(r);
        return (v, 4.0 * f64::EPSILON * v.abs());
    }
    let h = SPECTRAL_STEP * r;
    let mut inner: f64 = 0.0;
    let d = diff::first(
        |w| {
            let (v, e) = pullback(s, j - 1, w);
            inner = inner.max(w * e);
            Ok(w * v)
        },
        r,
        h,
    )
    .expect("infallible");
    (-d.value, d.error + 2.0 * inner / h)
}

fn filtration(m: &SpectralDensity, n: usize, factorization: bool, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        f.absorb(
            atom_witnesses(side, s, "class L measures are absolutely continuous"),
            Some(0),
        );
        if f.failed() {
            return;
        }
        let Some(grid) = probe(side, s, f) else { return };
        let tabulated = s.is_tabulated();
        let mut density: Vec<f64> = grid.iter().map(|&r| s.density_at(r)).collect();
        let mut errors: Vec<f64> = density.iter().map(|v| 4.0 * f64::EPSILON * v.abs()).collect();
        for j in 0..=n {
            if j > 0 {
                if tabulated {
                    let k: Vec<f64> = grid.iter().zip(&density).map(|(r, v)| r * v).collect();
                    density = diff::three_point(&grid, &k).iter().map(|d| -d).collect();
                    errors = vec![0.0; grid.len()];
                } else {
                    let pairs: Vec<(f64, f64)> = grid.iter().map(|&r| pullback(s, j, r)).collect();
                    density = pairs.iter().map(|p| p.0).collect();
                    errors = pairs.iter().map(|p| p.1).collect();
                }
            }
            if !check_finite(side, &density, &format!("pullback density m_{j}"), Some(j), f) {
                return;
            }
            let floor = density.iter().map(|v| v.abs()).fold(0.0, f64::max) * NEAR_BOUNDARY_FACTOR * f.tol;
            let negative: Vec<Witness> = grid
                .iter()
                .zip(&density)
                .zip(&errors)
                .filter(|((_, v), e)| **v < -(3.0 * **e).max(0.0) && **v < 0.0)
                .map(|((&r, &v), &e)| Witness {
                    side,
                    x: r,
                    inequality: format!("pullback density m_{j} is negative"),
                    magnitude: -v,
                    relative: if -v > floor && -v > 3.0 * e { f64::INFINITY } else { 0.0 },
                })
                .take(MAX_WITNESSES)
                .collect();
            f.absorb(negative, Some(j));
            let k: Vec<f64> = grid.iter().zip(&density).map(|(r, v)| r * v).collect();
            let k_err: Vec<f64> = grid.iter().zip(&errors).map(|(r, e)| r * e).collect();
            f.absorb(
                rising_runs(side, &grid, &k, Some(&k_err), &format!("k_{j}(r) = r m_{j}(r)"), f.tol),
                Some(j),
            );
            if factorization && j == n {
                f.absorb(
                    concave_runs(side, &grid, &k, &format!("k_{n}(r) = r m_{n}(r)"), f.tol),
                    Some(n),
                );
            }
            if f.failed() {
                return;
            }
        }
    });
    report(
        if factorization {
            ClassTested::Lnf(n)
        } else {
            ClassTested::Ln(n)
        },
        sides,
    )
}

/// Class `L_n`: the `n + 1` successive `k`-functions obtained by pulling
/// back through the inverse of `I` are all nonincreasing. The report names
/// the first failing stage.
pub fn classify_ln(m: &SpectralDensity, n: usize) -> ClassificationReport {
    filtration(m, n, false, DIVIDED_DIFFERENCE)
}

/// Class `L_n^f`: `L_n` with the `n`-th pullback in `L^f`.
pub fn classify_lnf(m: &SpectralDensity, n: usize) -> ClassificationReport {
    filtration(m, n, true, DIVIDED_DIFFERENCE)
}

/// Verdict on the convergence of a series of nonnegative terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Undecided,
}

/// Ratio and comparison tests on the trailing terms: trailing zeros, the
/// last ten ratios at most 0.9, or `k^{3/2}·s_k` nonincreasing over the last
/// twenty terms mean convergence; `k·s_k` nondecreasing (within 1%) over the
/// last twenty terms means divergence like the harmonic series or slower.
pub fn series_verdict(terms: &[f64]) -> SeriesVerdict {
    let n = terms.len();
    if n == 0 || terms[n.saturating_sub(3)..].iter().all(|&t| t == 0.0) {
        return SeriesVerdict::Converges;
    }
    if n >= 11 && terms[n - 11..].windows(2).all(|w| w[0] > 0.0 && w[1] <= 0.9 * w[0]) {
        return SeriesVerdict::Converges;
    }
    if n >= 21 {
        let tail = &terms[n - 21..];
        let base = n - 21 + 1;
        let weighted: Vec<f64> = tail.iter().enumerate().map(|(i, t)| (base + i) as f64 * t).collect();
        if weighted.iter().all(|&v| v > 0.0) && weighted.windows(2).all(|w| w[1] >= 0.99 * w[0]) {
            return SeriesVerdict::Diverges;
        }
        let damped: Vec<f64> = tail
            .iter()
            .enumerate()
            .map(|(i, t)| ((base + i) as f64).powf(1.5) * t)
            .collect();
        if damped.windows(2).all(|w| w[1] <= w[0]) {
            return SeriesVerdict::Converges;
        }
    }
    SeriesVerdict::Undecided
}

const SHELLS: usize = 80;

/// Contributions of the dyadic shells `[2^j, 2^{j+1})` (outward) or
/// `[2^{-j-1}, 2^{-j})` (inward) to `∫ w(x) dM`.
fn shells<W>(s: &SideMeasure, outward: bool, weight: W) -> Vec<f64>
where
    W: Fn(f64) -> f64,
{
    let mut out = Vec::with_capacity(SHELLS);
    let extent = s.extent();
    for j in 0..SHELLS {
        let (a, b) = if outward {
            (2f64.powi(j as i32), 2f64.powi(j as i32 + 1))
        } else {
            (2f64.powi(-(j as i32) - 1), 2f64.powi(-(j as i32)))
        };
        if a >= extent {
            out.push(0.0);
            continue;
        }
        let body = s
            .integrate_between(a, b.min(extent), |x| weight(x) * s.density_at(x))
            .value;
        let atoms: f64 = s
            .atoms()
            .iter()
            .filter(|at| at.location >= a && at.location < b)
            .map(|at| weight(at.location) * at.mass)
            .sum();
        out.push(body + atoms);
    }
    out
}

fn series_findings(side: Side, terms: &[f64], what: &str, at: f64, f: &mut Findings) {
    match series_verdict(terms) {
        SeriesVerdict::Converges => {}
        SeriesVerdict::Diverges => f.absorb(
            vec![Witness {
                side,
                x: at,
                inequality: format!("{what} diverges"),
                magnitude: terms[terms.len() - 1],
                relative: f64::INFINITY,
            }],
            None,
        ),
        SeriesVerdict::Undecided => f.undecided(format!("side {side}: {what} converges too slowly to decide"), None),
    }
}

/// Finite logarithmic moment of the tails: `∫_{|x| > 1} ln(1 + |x|) dM < ∞`,
/// judged from the dyadic shell contributions.
pub fn logmoment_check(m: &SpectralDensity) -> ClassificationReport {
    logmoment_test(m, DIVIDED_DIFFERENCE)
}

fn logmoment_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        let terms = shells(s, true, |x| x.ln_1p());
        series_findings(side, &terms, "log-moment shell series", 2f64.powi(SHELLS as i32), f);
    });
    report(ClassTested::IdLog, sides)
}

/// `∫ min(1, x²) dM < ∞`, judged from the dyadic shells on both sides of 1.
pub fn integrability_check(m: &SpectralDensity) -> ClassificationReport {
    integrability_test(m, DIVIDED_DIFFERENCE)
}

fn integrability_test(m: &SpectralDensity, tol: f64) -> ClassificationReport {
    let sides = per_side(m, tol, |side, s, f| {
        let inner = shells(s, false, |x| x * x);
        series_findings(side, &inner, "small-jump shell series", 2f64.powi(-(SHELLS as i32)), f);
        let outer = shells(s, true, |_| 1.0);
        series_findings(side, &outer, "large-jump shell series", 2f64.powi(SHELLS as i32), f);
    });
    report(ClassTested::Integrable, sides)
}
