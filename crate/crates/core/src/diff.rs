//! Finite differences: Richardson-extrapolated central stencils for smooth
//! functions, three-point stencils for tabulated data, and divided-difference
//! scans for monotonicity and convexity.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::Result;

/// Values the stencils can operate on.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// A derivative estimate and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub value: T,
    pub error: f64,
}

/// First derivative at `x`: central difference with step `h`, one level of
/// Richardson extrapolation against step `h/2`.
pub fn first<T, F>(mut f: F, x: f64, h: f64) -> Result<Derivative<T>>
where
    T: Scalar,
    F: FnMut(f64) -> Result<T>,
{
    let d_h = (f(x + h)? - f(x - h)?) * (0.5 / h);
    let h2 = 0.5 * h;
    let d_h2 = (f(x + h2)? - f(x - h2)?) * (0.5 / h2);
    let value = (d_h2 * 4.0 - d_h) * (1.0 / 3.0);
    Ok(Derivative {
        value,
        error: (d_h2 - d_h).magnitude() / 3.0,
    })
}

/// Second derivative at `x`, same scheme as [`first`].
pub fn second<T, F>(mut f: F, x: f64, h: f64) -> Result<Derivative<T>>
where
    T: Scalar,
    F: FnMut(f64) -> Result<T>,
{
    let f0 = f(x)?;
    let d_h = (f(x + h)? - f0 * 2.0 + f(x - h)?) * (1.0 / (h * h));
    let h2 = 0.5 * h;
    let d_h2 = (f(x + h2)? - f0 * 2.0 + f(x - h2)?) * (1.0 / (h2 * h2));
    let value = (d_h2 * 4.0 - d_h) * (1.0 / 3.0);
    Ok(Derivative {
        value,
        error: (d_h2 - d_h).magnitude() / 3.0,
    })
}

/// First derivative of tabulated data on a strictly increasing grid:
/// three-point stencils in the interior, one-sided three-point at the ends.
pub fn three_point(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, y.len());
    assert!(n >= 3, "three-point stencils need at least three nodes");
    let mut d = vec![0.0; n];
    for i in 0..n {
        // stencil nodes
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        // derivative of the interpolating quadratic at x[i]
        let xi = x[i];
        let (xa, xb, xc) = (x[a], x[b], x[c]);
        let la = ((xi - xb) + (xi - xc)) / ((xa - xb) * (xa - xc));
        let lb = ((xi - xa) + (xi - xc)) / ((xb - xa) * (xb - xc));
        let lc = ((xi - xa) + (xi - xb)) / ((xc - xa) * (xc - xb));
        d[i] = la * y[a] + lb * y[b] + lc * y[c];
    }
    d
}

/// A point where a tabulated function breaks an expected shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// Location of the offending difference (geometric midpoint of the stencil).
    pub x: f64,
    /// Size of the violation, in units of the local scale.
    pub relative: f64,
    /// Size of the violation in absolute terms.
    pub magnitude: f64,
}

fn midpoint(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        (a * b).sqrt()
    } else {
        0.5 * (a + b)
    }
}

/// Places where `f` increases between consecutive nodes by more than
/// `rel_tol` times the local scale `max(|f_i|, |f_{i+1}|)`.
pub fn increases(x: &[f64], f: &[f64], rel_tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..x.len().saturating_sub(1) {
        let rise = f[i + 1] - f[i];
        let scale = f[i].abs().max(f[i + 1].abs());
        if rise > rel_tol * scale && rise > 0.0 {
            out.push(Violation {
                x: midpoint(x[i], x[i + 1]),
                relative: if scale > 0.0 { rise / scale } else { f64::INFINITY },
                magnitude: rise,
            });
        }
    }
    out
}

/// Places where `f` decreases between consecutive nodes beyond tolerance.
pub fn decreases(x: &[f64], f: &[f64], rel_tol: f64) -> Vec<Violation> {
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    increases(x, &neg, rel_tol)
}

/// Places where the slope of `f` decreases between consecutive pairs of
/// nodes, i.e. where convexity fails. The local scale of a slope difference
/// is `max(|f|)` over the stencil divided by the stencil width.
pub fn concave_kinks(x: &[f64], f: &[f64], rel_tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..x.len().saturating_sub(2) {
        let s1 = (f[i + 1] - f[i]) / (x[i + 1] - x[i]);
        let s2 = (f[i + 2] - f[i + 1]) / (x[i + 2] - x[i + 1]);
        let drop = s1 - s2;
        let width = x[i + 2] - x[i];
        let scale = f[i].abs().max(f[i + 1].abs()).max(f[i + 2].abs()) / width;
        if drop > rel_tol * scale && drop > 0.0 {
            out.push(Violation {
                x: x[i + 1],
                relative: if scale > 0.0 { drop / scale } else { f64::INFINITY },
                magnitude: drop,
            });
        }
    }
    out
}

/// Places where convexity is exceeded, i.e. concavity fails.
pub fn convex_kinks(x: &[f64], f: &[f64], rel_tol: f64) -> Vec<Violation> {
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    concave_kinks(x, &neg, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_first_derivative_of_exp() {
        let d = first(|x: f64| Ok(x.exp()), 1.0, 1e-3).unwrap();
        assert!((d.value - 1f64.exp()).abs() < 1e-11, "{}", d.value);
        assert!(d.error < 1e-5);
    }

    #[test]
    fn richardson_second_derivative_of_sin() {
        let d = second(|x: f64| Ok(x.sin()), 0.7, 1e-2).unwrap();
        assert!((d.value + 0.7f64.sin()).abs() < 1e-9, "{}", d.value);
    }

    #[test]
    fn complex_derivative() {
        let d = first(|t: f64| Ok(Complex64::new(0.0, t).exp()), 0.3, 1e-4).unwrap();
        let exact = Complex64::new(0.0, 1.0) * Complex64::new(0.0, 0.3).exp();
        assert!((d.value - exact).norm() < 1e-11);
    }

    #[test]
    fn three_point_exact_for_quadratics_on_uneven_grid() {
        let x = [0.1, 0.3, 0.35, 0.9, 1.4, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        let d = three_point(&x, &y);
        for (xi, di) in x.iter().zip(d) {
            assert!((di - (6.0 * xi - 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn monotone_and_convex_scans() {
        let x: Vec<f64> = (1..=20).map(|i| i as f64 * 0.1).collect();
        let dec: Vec<f64> = x.iter().map(|v| (-v).exp()).collect();
        assert!(increases(&x, &dec, 1e-9).is_empty());
        assert!(concave_kinks(&x, &dec, 1e-9).is_empty());
        assert!(!convex_kinks(&x, &dec, 1e-9).is_empty());
        let bump: Vec<f64> = x.iter().map(|v| v * (-v).exp()).collect();
        let w = increases(&x, &bump, 1e-9);
        assert!(!w.is_empty());
        assert!(w.iter().all(|v| v.x < 1.0));
    }

    #[test]
    fn linear_function_is_both_convex_and_concave() {
        let x: Vec<f64> = (0..50).map(|i| 0.01 + i as f64 * 0.02).collect();
        let f: Vec<f64> = x.iter().map(|v| 2.0 * (1.0 - v)).collect();
        assert!(concave_kinks(&x, &f, 1e-9).is_empty());
        assert!(convex_kinks(&x, &f, 1e-9).is_empty());
    }
}
