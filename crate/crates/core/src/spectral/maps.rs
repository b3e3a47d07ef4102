//! The random-integral maps at the level of spectral measures.
//!
//! With `G` the spectral measure of the driving law and `Ḡ(r) = G{x > r}`:
//!
//! | map | result |
//! |-----|--------|
//! | `I` | `r·m(r) = Ḡ(r)` |
//! | `J` | `n(r) = ∫_r^∞ dG(w)/w` |
//! | `I∘J` | `M̄(r) = ∫_r^∞ (w - r)/w² · Ḡ(w) dw` |

use std::sync::Arc;

use serde::Serialize;

use super::classify::{logmoment_check, Verdict};
use super::density::{Side, SideMeasure};
use super::SpectralDensity;
use crate::diff;
use crate::error::{Error, Result};
use crate::tolerances::{DIVIDED_DIFFERENCE, NEAR_BOUNDARY_FACTOR, SPECTRAL_STEP};

/// `-ln(1 - d) - d` for `d ∈ [0, 1)`, without cancellation near 0.
pub fn log_excess(d: f64) -> f64 {
    if d < 0.1 {
        let mut term = d;
        let mut sum = 0.0;
        for k in 2..40 {
            term *= d;
            sum += term / k as f64;
        }
        sum
    } else {
        -(-d).ln_1p() - d
    }
}

fn require_log_moment(g: &SpectralDensity) -> Result<()> {
    let report = logmoment_check(g);
    if report.verdict == Verdict::NonMember {
        let side = report.witnesses.first().map(|w| w.side).unwrap_or(Side::Pos);
        return Err(Error::InfiniteLogMoment { side });
    }
    Ok(())
}

/// Linear interpolation on tabulated nodes, clamped at both ends.
fn interpolate(x: &[f64], y: &[f64], r: f64) -> f64 {
    if r <= x[0] {
        return y[0];
    }
    let n = x.len();
    if r >= x[n - 1] {
        return y[n - 1];
    }
    let j = x.partition_point(|&v| v <= r) - 1;
    let w = (r - x[j]) / (x[j + 1] - x[j]);
    y[j] * (1.0 - w) + y[j + 1] * w
}

/// `d/dr k(r)` for a closed-form side.
fn k_slope(side: &SideMeasure, r: f64) -> f64 {
    diff::first(|w| Ok(side.k(w)), r, SPECTRAL_STEP * r)
        .map(|d| d.value)
        .unwrap_or(f64::NAN)
}

/// `M = I(G)`: density `m(r) = Ḡ(r)/r`.
pub fn spectral_map_i(g: &SpectralDensity) -> Result<SpectralDensity> {
    require_log_moment(g)?;
    g.map_sides(|side, s| {
        if s.is_zero() {
            return Ok(SideMeasure::zero());
        }
        let src = s.clone();
        let out = SideMeasure::density(
            move |r| src.tail(side, r).unwrap_or(f64::NAN) / r,
            s.extent(),
            s.probe(),
        )?
        .with_breakpoints(
            s.breakpoints()
                .iter()
                .copied()
                .chain(s.atoms().iter().map(|a| a.location)),
        )
        .with_nodes(s.table_nodes());
        Ok(out)
    })
}

/// `N = J(G)`: density `n(r) = ∫_r^∞ g(w)/w dw + Σ_{x₀ > r} c/x₀`, tail
/// `N̄(r) = ∫_r^∞ (1 - r/w) dG(w)`.
pub fn spectral_map_j(g: &SpectralDensity) -> Result<SpectralDensity> {
    g.map_sides(|side, s| {
        if s.is_zero() {
            return Ok(SideMeasure::zero());
        }
        let (a, b) = (s.clone(), s.clone());
        let density = move |r: f64| {
            let body = a
                .integrate_beyond(side, r, |w| a.density_at(w) / w)
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            body + a
                .atoms()
                .iter()
                .filter(|x| x.location > r)
                .map(|x| x.mass / x.location)
                .sum::<f64>()
        };
        let tail = move |r: f64| {
            let body = b
                .integrate_beyond(side, r, |w| b.density_at(w) * (1.0 - r / w))
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            body + b
                .atoms()
                .iter()
                .filter(|x| x.location > r)
                .map(|x| x.mass * (1.0 - r / x.location))
                .sum::<f64>()
        };
        Ok(SideMeasure::tail_and_density(tail, density, s.extent(), s.probe())?
            .with_breakpoints(
                s.breakpoints()
                    .iter()
                    .copied()
                    .chain(s.atoms().iter().map(|a| a.location)),
            )
            .with_nodes(s.table_nodes()))
    })
}

fn worst(v: &[diff::Violation]) -> Option<diff::Violation> {
    v.iter()
        .copied()
        .filter(|w| w.relative > NEAR_BOUNDARY_FACTOR * DIVIDED_DIFFERENCE)
        .max_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
}

/// `G = I⁻¹(M)`: tail `Ḡ(r) = r·m(r)`, density `g(r) = -d/dr [r·m(r)]`.
pub fn spectral_inv_i(m: &SpectralDensity) -> Result<SpectralDensity> {
    m.map_sides(|side, s| {
        if s.is_zero() {
            return Ok(SideMeasure::zero());
        }
        if let Some(a) = s.atoms().iter().find(|a| a.mass > 0.0) {
            return Err(Error::NotClassL {
                side,
                r: a.location,
                magnitude: a.mass,
            });
        }
        let grid = s.probe_grid();
        let k: Vec<f64> = grid.iter().map(|&r| s.k(r)).collect();
        if let Some(v) = worst(&diff::increases(&grid, &k, DIVIDED_DIFFERENCE)) {
            return Err(Error::NotClassL {
                side,
                r: v.x,
                magnitude: v.magnitude,
            });
        }
        if s.is_tabulated() {
            let slope = diff::three_point(&grid, &k);
            let g: Vec<f64> = slope.iter().map(|d| -d).collect();
            let (x1, x2) = (Arc::new(grid.clone()), Arc::new(grid.clone()));
            let (k, g) = (Arc::new(k), Arc::new(g));
            let last = grid[grid.len() - 1];
            return Ok(SideMeasure::tail_and_density(
                move |r| if r > last { 0.0 } else { interpolate(&x1, &k, r) },
                move |r| interpolate(&x2, &g, r),
                last,
                s.probe(),
            )?
            .with_breakpoints(grid.iter().copied())
            .with_nodes(Some(Arc::new(grid))));
        }
        let (a, b) = (s.clone(), s.clone());
        Ok(
            SideMeasure::tail_and_density(move |r| a.k(r), move |r| -k_slope(&b, r), s.cutoff(), s.probe())?
                .with_breakpoints(s.breakpoints().iter().copied()),
        )
    })
}

/// `G = J⁻¹(N)`: tail `Ḡ(r) = N̄(r) + r·n(r)`, density `g(r) = -r·n'(r)`.
pub fn spectral_inv_j(n: &SpectralDensity) -> Result<SpectralDensity> {
    n.map_sides(|side, s| {
        if s.is_zero() {
            return Ok(SideMeasure::zero());
        }
        if let Some(a) = s.atoms().iter().find(|a| a.mass > 0.0) {
            return Err(Error::NotClassU {
                side,
                r: a.location,
                magnitude: a.mass,
            });
        }
        let grid = s.probe_grid();
        let dens: Vec<f64> = grid.iter().map(|&r| s.density_at(r)).collect();
        if let Some(v) = worst(&diff::increases(&grid, &dens, DIVIDED_DIFFERENCE)) {
            return Err(Error::NotClassU {
                side,
                r: v.x,
                magnitude: v.magnitude,
            });
        }
        if s.is_tabulated() {
            let slope = diff::three_point(&grid, &dens);
            let mut tail = Vec::with_capacity(grid.len());
            for (&r, &d) in grid.iter().zip(&dens) {
                tail.push(s.tail(side, r)? + r * d);
            }
            let g: Vec<f64> = grid.iter().zip(&slope).map(|(r, d)| -r * d).collect();
            let (x1, x2) = (Arc::new(grid.clone()), Arc::new(grid.clone()));
            let (tail, g) = (Arc::new(tail), Arc::new(g));
            let last = grid[grid.len() - 1];
            return Ok(SideMeasure::tail_and_density(
                move |r| if r > last { 0.0 } else { interpolate(&x1, &tail, r) },
                move |r| interpolate(&x2, &g, r),
                last,
                s.probe(),
            )?
            .with_breakpoints(grid.iter().copied())
            .with_nodes(Some(Arc::new(grid))));
        }
        let (a, b) = (s.clone(), s.clone());
        Ok(SideMeasure::tail_and_density(
            move |r| a.tail(side, r).unwrap_or(f64::NAN) + r * a.density_at(r),
            move |r| {
                let slope = diff::first(|w| Ok(b.density_at(w)), r, SPECTRAL_STEP * r)
                    .map(|d| d.value)
                    .unwrap_or(f64::NAN);
                -r * slope
            },
            s.cutoff(),
            s.probe(),
        )?
        .with_breakpoints(s.breakpoints().iter().copied()))
    })
}

/// `M = I(J(G))` in single-integral form. After exchanging the order of
/// integration, `M̄(r) = ∫_r^∞ [ln(w/r) - 1 + r/w] dG(w)` and
/// `m(r) = ∫_r^∞ (1/r - 1/w) dG(w)`; atoms contribute in closed form.
pub fn lm_from_g(g: &SpectralDensity) -> Result<SpectralDensity> {
    require_log_moment(g)?;
    g.map_sides(|side, s| {
        if s.is_zero() {
            return Ok(SideMeasure::zero());
        }
        let (a, b) = (s.clone(), s.clone());
        let tail = move |r: f64| {
            let body = a
                .integrate_beyond(side, r, |w| a.density_at(w) * log_excess(1.0 - r / w))
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            body + a
                .atoms()
                .iter()
                .filter(|x| x.location > r)
                .map(|x| x.mass * log_excess(1.0 - r / x.location))
                .sum::<f64>()
        };
        let density = move |r: f64| {
            let body = b
                .integrate_beyond(side, r, |w| b.density_at(w) * (1.0 / r - 1.0 / w))
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            body + b
                .atoms()
                .iter()
                .filter(|x| x.location > r)
                .map(|x| x.mass * (1.0 / r - 1.0 / x.location))
                .sum::<f64>()
        };
        Ok(SideMeasure::tail_and_density(tail, density, s.extent(), s.probe())?
            .with_breakpoints(
                s.breakpoints()
                    .iter()
                    .copied()
                    .chain(s.atoms().iter().map(|a| a.location)),
            )
            .with_nodes(s.table_nodes()))
    })
}

/// Pointwise comparison of `d/dr k_M(r)` with `-∫_r^∞ dG(w)/w`.
#[derive(Debug, Clone, Serialize)]
pub struct DderivReport {
    pub points: Vec<DderivPoint>,
    pub residual_sup: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DderivPoint {
    pub side: Side,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks `k_M'(r) = -∫_r^∞ g(w)/w dw - Σ_{x₀ > r} c/x₀` on `r_grid` for both
/// sides. Points within one difference step of an atom of `G` are skipped.
pub fn dderiv_relation(g: &SpectralDensity, m: &SpectralDensity, r_grid: &[f64]) -> Result<DderivReport> {
    let mut points = Vec::new();
    let mut residual_sup: f64 = 0.0;
    for side in Side::BOTH {
        let (gs, ms) = (g.side(side), m.side(side));
        if gs.is_zero() && ms.is_zero() {
            continue;
        }
        for &r in r_grid {
            if !(r > 0.0) {
                return Err(Error::InvalidGrid("radii must be positive".into()));
            }
            let h = SPECTRAL_STEP * r;
            if gs.atoms().iter().any(|a| (a.location - r).abs() <= 2.0 * h) {
                continue;
            }
            let lhs = diff::first(|w| Ok(ms.k(w)), r, h)?.value;
            let rhs = -gs.integrate_beyond(side, r, |w| gs.density_at(w) / w)?.value
                - gs.atoms()
                    .iter()
                    .filter(|a| a.location > r)
                    .map(|a| a.mass / a.location)
                    .sum::<f64>();
            residual_sup = residual_sup.max((lhs - rhs).abs());
            points.push(DderivPoint { side, r, lhs, rhs });
        }
    }
    Ok(DderivReport { points, residual_sup })
}
