//! Lévy spectral measures on the real line, handled one half-line at a time.
//!
//! A measure `M` on `ℝ∖{0}` is stored as two [`SideMeasure`]s describing
//! `M` restricted to `(0, ∞)` and the mirror image of `M` restricted to
//! `(-∞, 0)`. Every radial quantity (`m`, the tail `M̄(r)`, `k(r) = r·m(r)`)
//! is therefore a function of `r > 0`.

mod classify;
mod density;
mod maps;

pub use classify::{
    classify, classify_l, classify_lf, classify_lf_c3, classify_lf_c3_density, classify_ln, classify_lnf, classify_u,
    classify_with_tolerance, integrability_check, logmoment_check, ClassTested, ClassificationReport, SeriesVerdict,
    Verdict, Witness,
};
pub use density::{log_space, Atom, RealFn, Side, SideMeasure, PROBE_POINTS};
pub use maps::{
    dderiv_relation, lm_from_g, log_excess, spectral_inv_i, spectral_inv_j, spectral_map_i, spectral_map_j,
    DderivReport,
};

use crate::error::{Error, Result};

/// Two-sided Lévy measure.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub pos: SideMeasure,
    pub neg: SideMeasure,
}

impl SpectralDensity {
    pub fn new(pos: SideMeasure, neg: SideMeasure) -> Self {
        Self { pos, neg }
    }

    pub fn zero() -> Self {
        Self::new(SideMeasure::zero(), SideMeasure::zero())
    }

    /// Measure concentrated on `(0, ∞)`.
    pub fn one_sided(pos: SideMeasure) -> Self {
        Self::new(pos, SideMeasure::zero())
    }

    /// Measure invariant under `x ↦ -x`.
    pub fn symmetric(side: SideMeasure) -> Self {
        Self::new(side.clone(), side)
    }

    /// Tabulated density on signed abscissae. Rows with `x > 0` form the
    /// positive side, rows with `x < 0` the mirrored negative side; `x = 0`
    /// is not allowed.
    pub fn from_signed_table(x: &[f64], density: &[f64]) -> Result<Self> {
        if x.len() != density.len() {
            return Err(Error::InvalidParameter("table columns differ in length".into()));
        }
        if x.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidGrid("table abscissae must be finite and nonzero".into()));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("table abscissae must be strictly increasing".into()));
        }
        let mut pos = (Vec::new(), Vec::new());
        let mut neg = (Vec::new(), Vec::new());
        for (&xi, &yi) in x.iter().zip(density) {
            if xi > 0.0 {
                pos.0.push(xi);
                pos.1.push(yi);
            } else {
                neg.0.push(-xi);
                neg.1.push(yi);
            }
        }
        neg.0.reverse();
        neg.1.reverse();
        let side = |(x, y): (Vec<f64>, Vec<f64>)| {
            if x.is_empty() {
                Ok(SideMeasure::zero())
            } else {
                SideMeasure::tabulated(x, y)
            }
        };
        Ok(Self::new(side(pos)?, side(neg)?))
    }

    pub fn side(&self, side: Side) -> &SideMeasure {
        match side {
            Side::Pos => &self.pos,
            Side::Neg => &self.neg,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pos.is_zero() && self.neg.is_zero()
    }

    /// Density at a signed point `x ≠ 0`.
    pub fn density_at(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.pos.density_at(x)
        } else if x < 0.0 {
            self.neg.density_at(-x)
        } else {
            0.0
        }
    }

    /// `M{x > r}` on the positive side, `M{x < -r}` on the negative side.
    pub fn tail(&self, side: Side, r: f64) -> Result<f64> {
        self.side(side).tail(side, r)
    }

    /// Sum of measures (convolution of the laws).
    pub fn add(&self, other: &SpectralDensity) -> SpectralDensity {
        SpectralDensity::new(
            SideMeasure::sum(vec![self.pos.clone(), other.pos.clone()]),
            SideMeasure::sum(vec![self.neg.clone(), other.neg.clone()]),
        )
    }

    /// Image under `x ↦ c·x`, `c > 0`.
    pub fn dilate(&self, c: f64) -> Result<SpectralDensity> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {c}"
            )));
        }
        Ok(SpectralDensity::new(self.pos.dilate(c), self.neg.dilate(c)))
    }

    /// Applies `f` to each side.
    pub fn map_sides<F>(&self, mut f: F) -> Result<SpectralDensity>
    where
        F: FnMut(Side, &SideMeasure) -> Result<SideMeasure>,
    {
        Ok(SpectralDensity::new(f(Side::Pos, &self.pos)?, f(Side::Neg, &self.neg)?))
    }
}
