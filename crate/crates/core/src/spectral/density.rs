use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_semi_infinite, Quad, Tolerance};

/// Real function of one variable, shareable across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Half-line of the spectral measure: `Pos` is `(0, ∞)`, `Neg` is `(-∞, 0)`
/// described through `|x|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Pos, Side::Neg];

    pub fn sign(self) -> f64 {
        match self {
            Side::Pos => 1.0,
            Side::Neg => -1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Pos => "+",
            Side::Neg => "-",
        })
    }
}

/// Point mass `mass` at distance `location` from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Number of points in the log-spaced probe grids used by the classifiers.
pub const PROBE_POINTS: usize = 400;

/// Quadrature tolerance for spectral integrals.
pub(crate) const SPECTRAL_TOL: Tolerance = Tolerance::new(1e-15, 1e-13);
const SPECTRAL_TAIL: Tolerance = Tolerance::new(1e-300, 1e-15);
// log-substituted horizon; e^700 is close to the largest finite double
const MAX_LOG_EXTENT: f64 = 700.0;

#[derive(Clone)]
struct Table {
    x: Vec<f64>,
    y: Vec<f64>,
    /// `tail_at[i]` is the integral of the interpolant over `[x[i], x[last]]`.
    tail_at: Vec<f64>,
}

impl Table {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut tail_at = vec![0.0; n];
        for i in (0..n - 1).rev() {
            tail_at[i] = tail_at[i + 1] + 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
        }
        Self { x, y, tail_at }
    }

    fn segment(&self, r: f64) -> Option<usize> {
        if r < self.x[0] || r > self.x[self.x.len() - 1] {
            return None;
        }
        let j = self.x.partition_point(|&v| v <= r);
        Some(j.saturating_sub(1).min(self.x.len() - 2))
    }

    fn value(&self, r: f64) -> f64 {
        match self.segment(r) {
            None => 0.0,
            Some(j) => {
                let w = (r - self.x[j]) / (self.x[j + 1] - self.x[j]);
                self.y[j] * (1.0 - w) + self.y[j + 1] * w
            }
        }
    }

    fn tail(&self, r: f64) -> f64 {
        if r < self.x[0] {
            return self.tail_at[0];
        }
        match self.segment(r) {
            None => 0.0,
            Some(j) => 0.5 * (self.x[j + 1] - r) * (self.value(r) + self.y[j + 1]) + self.tail_at[j + 1],
        }
    }
}

#[derive(Clone)]
enum Repr {
    Zero,
    Density(RealFn),
    Tabulated(Arc<Table>),
    /// The measure is described by its tail `r ↦ M{x > r}`; the density is
    /// carried alongside for pointwise use.
    TailDensity {
        tail: RealFn,
        density: RealFn,
    },
    Sum(Vec<SideMeasure>),
}

/// Lévy measure restricted to one half-line: an absolutely continuous part
/// plus a finite list of atoms.
#[derive(Clone)]
pub struct SideMeasure {
    repr: Repr,
    atoms: Vec<Atom>,
    cutoff: f64,
    probe: (f64, f64),
    breakpoints: Vec<f64>,
    nodes: Option<Arc<Vec<f64>>>,
}

impl fmt::Debug for SideMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Zero => "zero",
            Repr::Density(_) => "density",
            Repr::Tabulated(_) => "tabulated",
            Repr::TailDensity { .. } => "tail",
            Repr::Sum(_) => "sum",
        };
        f.debug_struct("SideMeasure")
            .field("repr", &kind)
            .field("atoms", &self.atoms)
            .field("cutoff", &self.cutoff)
            .field("probe", &self.probe)
            .finish()
    }
}

fn check_probe(probe: (f64, f64)) -> Result<()> {
    if !(probe.0 > 0.0 && probe.1 > probe.0 && probe.1.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "probe range must satisfy 0 < lo < hi < inf, got {probe:?}"
        )));
    }
    Ok(())
}

impl SideMeasure {
    pub fn zero() -> Self {
        Self {
            repr: Repr::Zero,
            atoms: Vec::new(),
            cutoff: 0.0,
            probe: (1e-3, 1e3),
            breakpoints: Vec::new(),
            nodes: None,
        }
    }

    /// Closed-form density on `(0, cutoff)`; `probe` is the range scanned by
    /// the grid-based checks.
    pub fn density<F>(f: F, cutoff: f64, probe: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_probe(probe)?;
        if !(cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff must be positive, got {cutoff}"
            )));
        }
        Ok(Self {
            repr: Repr::Density(Arc::new(f)),
            atoms: Vec::new(),
            cutoff,
            probe,
            breakpoints: Vec::new(),
            nodes: None,
        })
    }

    /// Density tabulated at strictly increasing positive nodes, linearly
    /// interpolated and zero outside `[x[0], x[last]]`.
    pub fn tabulated(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidParameter("table columns differ in length".into()));
        }
        if x.len() < 2 {
            return Err(Error::InvalidParameter("table needs at least two rows".into()));
        }
        if x[0] <= 0.0 || x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "tabulated density needs strictly increasing positive abscissae".into(),
            ));
        }
        if let Some(bad) = y.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "density must be finite and nonnegative, row {bad} has {}",
                y[bad]
            )));
        }
        let probe = (x[0], x[x.len() - 1]);
        let cutoff = probe.1;
        let nodes = Arc::new(x.clone());
        Ok(Self {
            repr: Repr::Tabulated(Arc::new(Table::new(x.clone(), y))),
            atoms: Vec::new(),
            cutoff,
            probe,
            breakpoints: x,
            nodes: Some(nodes),
        })
    }

    /// Measure given by its tail function and density.
    pub fn tail_and_density<T, D>(tail: T, density: D, cutoff: f64, probe: (f64, f64)) -> Result<Self>
    where
        T: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_probe(probe)?;
        Ok(Self {
            repr: Repr::TailDensity {
                tail: Arc::new(tail),
                density: Arc::new(density),
            },
            atoms: Vec::new(),
            cutoff,
            probe,
            breakpoints: Vec::new(),
            nodes: None,
        })
    }

    /// Purely atomic measure.
    pub fn atoms_only(atoms: Vec<Atom>, probe: (f64, f64)) -> Result<Self> {
        check_probe(probe)?;
        Self::zero().with_atoms(atoms).map(|s| Self { probe, ..s })
    }

    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(a.location > 0.0 && a.location.is_finite() && a.mass >= 0.0) {
                return Err(Error::InvalidParameter(format!("bad atom {a:?}")));
            }
        }
        self.atoms.extend(atoms);
        self.atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(self)
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints
            .extend(points.into_iter().filter(|p| *p > 0.0 && p.is_finite()));
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    pub(crate) fn with_nodes(mut self, nodes: Option<Arc<Vec<f64>>>) -> Self {
        self.nodes = nodes;
        self
    }

    /// Sum of measures; atoms are carried by the sum itself.
    pub fn sum(parts: Vec<SideMeasure>) -> Self {
        let mut atoms = Vec::new();
        let mut breakpoints = Vec::new();
        let mut cutoff: f64 = 0.0;
        let mut probe = (f64::INFINITY, 0.0f64);
        let mut stripped = Vec::new();
        for p in parts {
            atoms.extend(p.atoms.iter().copied());
            breakpoints.extend(p.breakpoints.iter().copied());
            breakpoints.extend(p.atoms.iter().map(|a| a.location));
            if !p.is_zero() {
                cutoff = cutoff.max(p.extent());
                probe = (probe.0.min(p.probe.0), probe.1.max(p.probe.1));
            }
            stripped.push(SideMeasure { atoms: Vec::new(), ..p });
        }
        if !probe.0.is_finite() {
            probe = (1e-3, 1e3);
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        SideMeasure {
            repr: Repr::Sum(stripped),
            atoms,
            cutoff,
            probe,
            breakpoints: Vec::new(),
            nodes: None,
        }
        .with_breakpoints(breakpoints)
    }

    pub fn is_zero(&self) -> bool {
        let body_zero = match &self.repr {
            Repr::Zero => true,
            Repr::Sum(parts) => parts.iter().all(SideMeasure::is_zero),
            _ => false,
        };
        body_zero && self.atoms.iter().all(|a| a.mass == 0.0)
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.repr, Repr::Tabulated(_))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Beyond this radius the absolutely continuous part vanishes.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Largest radius carrying mass (cutoff or outermost atom).
    pub fn extent(&self) -> f64 {
        self.atoms.iter().map(|a| a.location).fold(self.cutoff, f64::max)
    }

    pub fn probe(&self) -> (f64, f64) {
        self.probe
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Density of the absolutely continuous part at radius `r > 0`.
    pub fn density_at(&self, r: f64) -> f64 {
        if !(r > 0.0) || r > self.cutoff {
            return 0.0;
        }
        match &self.repr {
            Repr::Zero => 0.0,
            Repr::Density(f) => f(r),
            Repr::Tabulated(t) => t.value(r),
            Repr::TailDensity { density, .. } => density(r),
            Repr::Sum(parts) => parts.iter().map(|p| p.density_at(r)).sum(),
        }
    }

    /// `k(r) = r·m(r)`.
    pub fn k(&self, r: f64) -> f64 {
        r * self.density_at(r)
    }

    /// Mass of the atoms located strictly beyond `r`.
    pub fn atom_tail(&self, r: f64) -> f64 {
        self.atoms.iter().filter(|a| a.location > r).map(|a| a.mass).sum()
    }

    /// `M{x > r}` on this side (atoms included).
    pub fn tail(&self, side: Side, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail radius must be positive, got {r}"
            )));
        }
        let body = match &self.repr {
            Repr::Zero => 0.0,
            Repr::Tabulated(t) => t.tail(r),
            Repr::TailDensity { tail, .. } => tail(r),
            Repr::Density(f) => {
                let f = f.clone();
                self.integrate_beyond(side, r, move |w| f(w))?.value
            }
            Repr::Sum(parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.tail(side, r)?;
                }
                s
            }
        };
        Ok(body + self.atom_tail(r))
    }

    /// `∫_r^{cutoff} g(w) dw` via the substitution `w = r·e^v`; the known
    /// breakpoints and atom locations become panel edges.
    pub fn integrate_beyond<G>(&self, side: Side, r: f64, g: G) -> Result<Quad<f64>>
    where
        G: Fn(f64) -> f64,
    {
        integrate_log(side, r, self.extent(), &self.edges(), g)
    }

    /// `∫_a^b g(w) dw` under the same substitution.
    pub fn integrate_between<G>(&self, a: f64, b: f64, g: G) -> Quad<f64>
    where
        G: Fn(f64) -> f64,
    {
        let mut pts = vec![0.0];
        let span = (b / a).ln();
        pts.extend(self.edges().iter().filter(|&&e| e > a && e < b).map(|e| (e / a).ln()));
        pts.push(span);
        integrate(
            |v| {
                let w = a * v.exp();
                g(w) * w
            },
            &pts,
            SPECTRAL_TOL,
        )
    }

    fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.breakpoints.clone();
        e.extend(self.atoms.iter().map(|a| a.location));
        if self.cutoff.is_finite() && self.cutoff > 0.0 {
            e.push(self.cutoff);
        }
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    /// Probe grid: the table nodes for tabulated input, otherwise
    /// [`PROBE_POINTS`] log-spaced points over the probe range.
    pub fn probe_grid(&self) -> Vec<f64> {
        if let Some(nodes) = &self.nodes {
            return nodes.as_ref().clone();
        }
        if let Repr::Tabulated(t) = &self.repr {
            return t.x.clone();
        }
        log_space(self.probe.0, self.probe.1, PROBE_POINTS)
    }

    pub(crate) fn table_nodes(&self) -> Option<Arc<Vec<f64>>> {
        match &self.repr {
            Repr::Tabulated(t) => Some(Arc::new(t.x.clone())),
            _ => self.nodes.clone(),
        }
    }

    /// Image under `x ↦ c·x`: density `m(x/c)/c`, tail `M̄(r/c)`.
    pub fn dilate(&self, c: f64) -> SideMeasure {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Density(f) => {
                let f = f.clone();
                Repr::Density(Arc::new(move |x| f(x / c) / c))
            }
            Repr::Tabulated(t) => Repr::Tabulated(Arc::new(Table::new(
                t.x.iter().map(|x| x * c).collect(),
                t.y.iter().map(|y| y / c).collect(),
            ))),
            Repr::TailDensity { tail, density } => {
                let (tail, density) = (tail.clone(), density.clone());
                Repr::TailDensity {
                    tail: Arc::new(move |r| tail(r / c)),
                    density: Arc::new(move |x| density(x / c) / c),
                }
            }
            Repr::Sum(parts) => Repr::Sum(parts.iter().map(|p| p.dilate(c)).collect()),
        };
        SideMeasure {
            repr,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location * c,
                    mass: a.mass,
                })
                .collect(),
            cutoff: self.cutoff * c,
            probe: (self.probe.0 * c, self.probe.1 * c),
            breakpoints: self.breakpoints.iter().map(|b| b * c).collect(),
            nodes: self.nodes.as_ref().map(|n| Arc::new(n.iter().map(|x| x * c).collect())),
        }
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let w = i as f64 / last;
            (a * (1.0 - w) + b * w).exp()
        })
        .collect()
}

/// `∫_r^{end} g(w) dw` with `w = r·e^v`; `end` may be infinite.
pub(crate) fn integrate_log<G>(side: Side, r: f64, end: f64, edges: &[f64], g: G) -> Result<Quad<f64>>
where
    G: Fn(f64) -> f64,
{
    if r >= end {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let h = |v: f64| {
        let w = r * v.exp();
        let y = g(w) * w;
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    let mut pts = vec![0.0];
    pts.extend(edges.iter().filter(|&&e| e > r && e < end).map(|e| (e / r).ln()));
    if end.is_finite() {
        pts.push((end / r).ln());
        return Ok(integrate(h, &pts, SPECTRAL_TOL));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    let start = if pts.len() > 1 {
        let q = integrate(h, &pts, SPECTRAL_TOL);
        value += q.value;
        error += q.error;
        evaluations += q.evaluations;
        converged &= q.converged;
        *pts.last().unwrap()
    } else {
        0.0
    };
    let tq = integrate_semi_infinite(
        |v| num_complex::Complex64::new(h(v), 0.0),
        start,
        1.0,
        SPECTRAL_TOL,
        Tolerance {
            rel: SPECTRAL_TAIL.rel,
            abs: SPECTRAL_TAIL.abs.max(SPECTRAL_TAIL.rel * value.abs()),
            ..SPECTRAL_TAIL
        },
        MAX_LOG_EXTENT - start.min(MAX_LOG_EXTENT - 1.0),
    );
    if !tq.tail_converged && tq.tail_estimate > 1e-3 * (value + tq.quad.value.re).abs().max(1e-300) {
        return Err(Error::DivergentTail { side, r });
    }
    Ok(Quad {
        value: value + tq.quad.value.re,
        error: error + tq.quad.error,
        evaluations: evaluations + tq.quad.evaluations,
        converged: converged && tq.quad.converged,
    })
}
