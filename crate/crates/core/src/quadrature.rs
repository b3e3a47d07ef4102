//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! The integrator is a global-priority bisection scheme in the spirit of
//! QUADPACK's QAG: every interval carries a 7-point Gauss / 15-point Kronrod
//! estimate, and the interval with the largest error is bisected until the
//! accumulated error meets the tolerance. Semi-infinite ranges are handled
//! by [`integrate_semi_infinite`], which sums panels of doubling width and
//! watches the panel contributions to decide whether the tail is negligible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 2000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        crate::tolerances::QUADRATURE
    }
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let value = kron * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Integrates `f` over `[points[0], points[last]]`, using the interior points
/// as initial breakpoints.
pub fn integrate_complex<F>(mut f: F, points: &[f64], tol: Tolerance) -> Quad<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut frozen_value = Complex64::new(0.0, 0.0);
    let mut frozen_error = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = kronrod(&mut f, w[0], w[1]);
        evaluations += 15;
        total += value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut count = heap.len();
    let mut converged = true;
    loop {
        if total_err <= tol.abs.max(tol.rel * total.norm()) {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        if count >= tol.max_intervals {
            heap.push(worst);
            converged = false;
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 8.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) || !worst.error.is_finite() {
            // cannot be refined further
            frozen_value += worst.value;
            frozen_error += worst.error;
            if !worst.error.is_finite() {
                converged = false;
            }
            continue;
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        count += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed the drift of the running totals
    let mut value = frozen_value;
    let mut error = frozen_error;
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    if error > tol.abs.max(tol.rel * value.norm()) {
        converged = false;
    }
    Quad {
        value,
        error,
        evaluations,
        converged,
    }
}

/// Real-valued convenience wrapper around [`integrate_complex`].
pub fn integrate<F>(mut f: F, points: &[f64], tol: Tolerance) -> Quad<f64>
where
    F: FnMut(f64) -> f64,
{
    let q = integrate_complex(|x| Complex64::new(f(x), 0.0), points, tol);
    Quad {
        value: q.value.re,
        error: q.error,
        evaluations: q.evaluations,
        converged: q.converged,
    }
}

/// Outcome of a semi-infinite integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuad {
    pub quad: Quad<Complex64>,
    /// Upper end of the last panel that was integrated.
    pub horizon: f64,
    /// Estimate of the mass beyond `horizon`.
    pub tail_estimate: f64,
    /// `false` when the panel contributions stopped shrinking before
    /// `max_extent` was reached.
    pub tail_converged: bool,
}

/// Integrates `f` over `[start, ∞)` by summing panels of doubling width.
///
/// The first panel is `[start, start + first_width]`. Integration stops once
/// the last panel and the geometric extrapolation of the remaining panels
/// both fall below `max(tail.abs, tail.rel * |value|)`, or gives up at
/// `start + max_extent`.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    start: f64,
    first_width: f64,
    tol: Tolerance,
    tail: Tolerance,
    max_extent: f64,
) -> TailQuad
where
    F: FnMut(f64) -> Complex64,
{
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    let mut lo = start;
    let mut width = first_width;
    let mut previous: Option<f64> = None;
    let mut tail_estimate = f64::INFINITY;
    loop {
        let hi = lo + width;
        let q = integrate_complex(
            &mut f,
            &[lo, hi],
            Tolerance {
                abs: tol.abs * 0.1,
                ..tol
            },
        );
        value += q.value;
        error += q.error;
        evaluations += q.evaluations;
        converged &= q.converged;
        let size = q.value.norm() + q.error;
        if let Some(prev) = previous {
            let ratio = if prev > 0.0 { size / prev } else { 0.0 };
            tail_estimate = if size == 0.0 {
                0.0
            } else if ratio < 0.9 {
                size * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            let tail_tol = tail.abs.max(tail.rel * value.norm());
            if size <= tail_tol && tail_estimate <= tail_tol {
                return TailQuad {
                    quad: Quad {
                        value,
                        error: error + tail_estimate,
                        evaluations,
                        converged,
                    },
                    horizon: hi,
                    tail_estimate,
                    tail_converged: true,
                };
            }
        }
        previous = Some(size);
        lo = hi;
        width *= 2.0;
        if lo - start >= max_extent {
            return TailQuad {
                quad: Quad {
                    value,
                    error,
                    evaluations,
                    converged: false,
                },
                horizon: lo,
                tail_estimate: if tail_estimate.is_finite() { tail_estimate } else { size },
                tail_converged: false,
            };
        }
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns
/// the most recent extrapolated limit.
pub fn wynn_epsilon(partial_sums: &[Complex64]) -> Option<Complex64> {
    let n = partial_sums.len();
    if n < 3 {
        return partial_sums.last().copied();
    }
    // e[k] holds column k of the epsilon table, columns shrink by one.
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = partial_sums.to_vec();
    let mut best = *partial_sums.last()?;
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() == 0.0 {
                return Some(best);
            }
            next.push(prev[i + 1] + diff.inv());
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(v) = cur.last() {
                if v.re.is_finite() && v.im.is_finite() {
                    best = *v;
                }
            }
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> Tolerance {
        Tolerance::new(1e-13, 1e-13)
    }

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        // degree 22 is the exactness limit of the 15-point Kronrod rule
        let mut f = |x: f64| Complex64::new(x.powi(22), 0.0);
        let (v, _) = kronrod(&mut f, -1.0, 1.0);
        assert!((v.re - 2.0 / 23.0).abs() < 1e-15);
        let mut g = |x: f64| Complex64::new(0.0, 3.0 * x * x);
        let (v, _) = kronrod(&mut g, 0.0, 2.0);
        assert!((v.im - 8.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_weights_integrate_constants() {
        let gauss_sum = 2.0 * (WG[0] + WG[1] + WG[2]) + WG[3];
        let kron_sum = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((gauss_sum - 2.0).abs() < 1e-15);
        assert!((kron_sum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let q = integrate_complex(
            |x| Complex64::new(0.0, 7.0 * x).exp(),
            &[0.0, 10.0],
            Tolerance::new(1e-12, 1e-12),
        );
        let exact = (Complex64::new(0.0, 70.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((q.value - exact).norm() < 1e-12, "{:?} vs {:?}", q.value, exact);
        assert!(q.converged);
    }

    #[test]
    fn endpoint_singularity_is_refined() {
        let q = integrate(|x| 1.0 / x.sqrt(), &[0.0, 1.0], Tolerance::new(1e-10, 1e-10));
        assert!((q.value - 2.0).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn semi_infinite_exponential() {
        let t = integrate_semi_infinite(
            |s| Complex64::new((-0.5 * s).exp(), 0.0),
            0.0,
            1.0,
            tight(),
            Tolerance::new(1e-14, 0.0),
            500.0,
        );
        assert!(t.tail_converged);
        assert!((t.quad.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_detects_non_decay() {
        let t = integrate_semi_infinite(
            |s| Complex64::new(1.0 / (1.0 + s), 0.0),
            0.0,
            1.0,
            tight(),
            Tolerance::new(1e-12, 0.0),
            500.0,
        );
        assert!(!t.tail_converged);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // log 2 = 1 - 1/2 + 1/3 - ...
        let mut sums = Vec::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            sums.push(Complex64::new(s, 0.0));
        }
        let v = wynn_epsilon(&sums).unwrap();
        assert!((v.re - 2f64.ln()).abs() < 1e-10, "{}", v.re);
    }
}
