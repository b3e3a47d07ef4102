//! Closed-form laws with known exponents, spectral densities and class
//! memberships. They serve as oracles for the numerical operators.
//!
//! Spectral densities are given per side as functions of `r = |x| > 0`.
//! Parameter names and defaults are listed by [`registry`].

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;

use crate::error::{Error, Result};
use crate::exponent::{exponent_from_triple, LevyExponent, LogMoment, Triple};
use crate::spectral::{ClassTested, SideMeasure, SpectralDensity, Verdict};

/// A law parameter: a real number, or a list (series coefficients).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    List(Vec<f64>),
}

pub type Params = BTreeMap<String, ParamValue>;

/// Builds a parameter map from scalar pairs.
pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), ParamValue::Real(*v)))
        .collect()
}

/// `ln(x / sinh x)`, even in `x`.
pub fn log_x_over_sinh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-3 {
        let s = a * a;
        s * (-1.0 / 6.0 + s * (1.0 / 180.0 + s * (-1.0 / 2835.0 + s / 37800.0)))
    } else {
        a.ln() - (a + (-(-2.0 * a).exp_m1()).ln() - LN_2)
    }
}

/// `x·coth x - 1`, even in `x`.
pub fn x_coth_x_minus_one(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-3 {
        let s = a * a;
        s * (1.0 / 3.0 + s * (-1.0 / 45.0 + s * (2.0 / 945.0 - s / 4725.0)))
    } else {
        a / a.tanh() - 1.0
    }
}

/// `ln cosh x`, even in `x`.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-3 {
        let s = a * a;
        s * (0.5 + s * (-1.0 / 12.0 + s * (1.0 / 45.0 - s * 17.0 / 2520.0)))
    } else {
        a + (-2.0 * a).exp().ln_1p() - LN_2
    }
}

/// Prior knowledge about one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownClass {
    pub class: ClassTested,
    pub verdict: Verdict,
    pub note: &'static str,
}

fn known(class: ClassTested, verdict: Verdict, note: &'static str) -> KnownClass {
    KnownClass { class, verdict, note }
}

/// A fully populated catalogue entry.
#[derive(Debug, Clone)]
pub struct LawSpec {
    pub name: String,
    pub params: Params,
    pub exponent: LevyExponent,
    pub spectral: Option<SpectralDensity>,
    pub known_classes: Vec<KnownClass>,
    pub log_moment: LogMoment,
    pub description: &'static str,
    pub provenance: &'static str,
}

impl LawSpec {
    pub fn expected(&self, class: ClassTested) -> Option<Verdict> {
        self.known_classes.iter().find(|k| k.class == class).map(|k| k.verdict)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: Option<f64>,
    pub range: &'static str,
}

/// Registry entry: what [`get_law`] accepts under a name.
#[derive(Debug, Clone, Serialize)]
pub struct LawInfo {
    pub name: &'static str,
    pub params: Vec<ParamInfo>,
    pub description: &'static str,
    pub provenance: &'static str,
    pub has_spectral: bool,
    pub known_classes: Vec<KnownClass>,
}

fn p(name: &'static str, default: f64, range: &'static str) -> ParamInfo {
    ParamInfo {
        name,
        default: Some(default),
        range,
    }
}

const POSITIVE: &str = "> 0";

/// Every law known to [`get_law`], in listing order.
pub fn registry() -> Vec<LawInfo> {
    use ClassTested as C;
    use Verdict::{Member as M, NonMember as N};
    let lf = |note| vec![known(C::Lf, M, note), known(C::L, M, note), known(C::U, M, note)];
    vec![
        LawInfo {
            name: "gamma",
            params: vec![p("alpha", 1.0, POSITIVE), p("lambda", 1.0, POSITIVE)],
            description: "gamma law, exponent -alpha log(1 - it/lambda), density alpha e^{-lambda x}/x on x > 0",
            provenance: "gamma law as a selfdecomposable law driven by a compound Poisson law with exponential jumps",
            has_spectral: true,
            known_classes: vec![
                known(C::L, M, "k(r) = alpha e^{-lambda r} decreasing"),
                known(C::Lf, M, "k convex decreasing"),
                known(C::U, M, "density decreasing"),
                known(
                    C::Ln(1),
                    N,
                    "k_1(r) = alpha lambda r e^{-lambda r} rises up to r = 1/lambda",
                ),
            ],
        },
        LawInfo {
            name: "cp_exp",
            params: vec![p("alpha", 1.0, POSITIVE), p("lambda", 1.0, POSITIVE)],
            description: "compound Poisson, rate alpha, Exp(lambda) jumps; exponent alpha(lambda/(lambda - it) - 1)",
            provenance: "background driving law of the gamma law",
            has_spectral: true,
            known_classes: vec![
                known(C::U, M, "density alpha lambda e^{-lambda x} decreasing"),
                known(C::L, N, "k(x) = alpha lambda x e^{-lambda x} not monotone"),
                known(C::Lf, N, "not in L"),
            ],
        },
        LawInfo {
            name: "bessel",
            params: vec![p("alpha", 1.0, POSITIVE)],
            description: "gamma(alpha, 1) convolved with cp_exp(alpha, 1)",
            provenance: "Bessel-type law: gamma law convolved with its own background driving law",
            has_spectral: true,
            known_classes: vec![
                known(C::L, M, "k(r) = alpha e^{-r}(1 + r) decreasing"),
                known(C::Lf, N, "k''(r) = alpha e^{-r}(r - 1) < 0 on (0, 1)"),
                known(C::U, M, "density decreasing"),
            ],
        },
        LawInfo {
            name: "laplace",
            params: vec![p("a", 1.0, POSITIVE)],
            description: "Laplace law with scale a, exponent -log(1 + a^2 t^2)",
            provenance: "one term of a Laplace series",
            has_spectral: true,
            known_classes: lf("k(r) = e^{-r/a} convex decreasing"),
        },
        LawInfo {
            name: "d1",
            params: vec![p("u", 1.0, POSITIVE)],
            description: "exponent log(tu/sinh tu); Laplace series with a_k = u/(pi k); density 1/(r expm1(pi r/u))",
            provenance: "Levy stochastic area: characteristic function tu/sinh tu",
            has_spectral: true,
            known_classes: lf("k(r) = 1/expm1(pi r/u) convex decreasing"),
        },
        LawInfo {
            name: "d1_bdpd",
            params: vec![p("u", 1.0, POSITIVE)],
            description: "exponent -(tu coth tu - 1); tail 1/expm1(pi r/u), density (pi/u)/(4 sinh^2(pi r/(2u)))",
            provenance: "background driving law of the Levy stochastic area: exp(-(tu coth tu - 1))",
            has_spectral: true,
            known_classes: vec![known(
                C::U,
                M,
                "density decreasing: the driving law is s-selfdecomposable",
            )],
        },
        LawInfo {
            name: "half_d2",
            params: vec![],
            description: "exponent -log(cosh t)/2; density 1/(4 r sinh(pi r/2))",
            provenance: "convolution square root of the hyperbolic-cosine law (cosh t)^{-1/2}",
            has_spectral: true,
            known_classes: lf("k(r) = 1/(4 sinh(pi r/2)) convex decreasing"),
        },
        LawInfo {
            name: "half_d2_bdpd",
            params: vec![],
            description: "exponent -t tanh(t)/2; tail 1/(4 sinh(pi r/2)), density (pi/8) cosh(pi r/2)/sinh^2(pi r/2)",
            provenance: "background driving law of (cosh t)^{-1/2}: exp(-t tanh(t)/2)",
            has_spectral: true,
            known_classes: vec![known(C::U, M, "density decreasing")],
        },
        LawInfo {
            name: "sym_stable",
            params: vec![p("alpha", 1.0, "(0, 2]"), p("c", 1.0, POSITIVE)],
            description: "symmetric stable, exponent -c|t|^alpha; alpha = 2 is Gaussian with variance 2c",
            provenance: "stable laws are fixed by the mapping I up to scale",
            has_spectral: true,
            known_classes: vec![
                known(C::Lf, M, "k(r) = C r^{-alpha}"),
                known(C::L, M, "k decreasing"),
                known(C::U, M, "density decreasing"),
                known(C::Ln(3), M, "every pullback is stable"),
                known(C::Lnf(3), M, "every pullback is stable"),
            ],
        },
        LawInfo {
            name: "sym_gamma",
            params: vec![p("alpha", 1.0, POSITIVE)],
            description: "symmetrized gamma, exponent -alpha log(1 + t^2), density alpha e^{-|x|}/|x|",
            provenance: "difference of two independent gamma variables",
            has_spectral: true,
            known_classes: lf("k(r) = alpha e^{-r}"),
        },
        LawInfo {
            name: "k_measure",
            params: vec![p("alpha", 1.0, POSITIVE), p("beta", 1.0, POSITIVE)],
            description: "one-sided, density alpha(beta/r - 1) on (0, beta), tail alpha[beta log(beta/r) - (beta - r)]",
            provenance: "image of a point mass under I after J; has the factorization property",
            has_spectral: true,
            known_classes: lf("k(r) = alpha(beta - r) on (0, beta)"),
        },
        LawInfo {
            name: "laplace_series",
            params: vec![ParamInfo {
                name: "a",
                default: None,
                range: "list of positive reals",
            }],
            description: "sum of a_k times independent standard Laplace variables, exponent -sum log(1 + a_k^2 t^2)",
            provenance: "Laplace series: sums of scaled Laplace variables are in L^f",
            has_spectral: true,
            known_classes: lf("sum of L^f members"),
        },
        LawInfo {
            name: "parabolic_k",
            params: vec![],
            description: "one-sided, density (1 - x^2)/x on (0, 1): k(x) = max(0, 1 - x^2)",
            provenance: "test measure: k concave, so in L but not in L^f",
            has_spectral: true,
            known_classes: vec![
                known(C::L, M, "k decreasing"),
                known(C::Lf, N, "k concave on (0, 1)"),
                known(C::U, M, "density decreasing"),
            ],
        },
        LawInfo {
            name: "zero",
            params: vec![],
            description: "point mass at 0",
            provenance: "degenerate law",
            has_spectral: true,
            known_classes: vec![
                known(C::Lf, M, "zero measure"),
                known(C::L, M, "zero measure"),
                known(C::U, M, "zero measure"),
            ],
        },
    ]
}

pub fn law_info(name: &str) -> Result<LawInfo> {
    registry()
        .into_iter()
        .find(|l| l.name == name)
        .ok_or_else(|| Error::UnknownLaw(name.to_string()))
}

struct Args<'a> {
    law: &'a str,
    given: &'a Params,
    info: LawInfo,
}

impl Args<'_> {
    fn real(&self, name: &str) -> Result<f64> {
        let v = match self.given.get(name) {
            Some(ParamValue::Real(v)) => *v,
            Some(ParamValue::List(_)) => {
                return Err(Error::InvalidParameter(format!(
                    "{}: `{name}` must be a number",
                    self.law
                )))
            }
            None => self
                .info
                .params
                .iter()
                .find(|p| p.name == name)
                .and_then(|p| p.default)
                .ok_or_else(|| Error::InvalidParameter(format!("{}: missing `{name}`", self.law)))?,
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: `{name}` must be positive, got {v}",
                self.law
            )));
        }
        Ok(v)
    }

    fn list(&self, name: &str) -> Result<Vec<f64>> {
        let v = match self.given.get(name) {
            Some(ParamValue::List(v)) => v.clone(),
            Some(ParamValue::Real(v)) => vec![*v],
            None => return Err(Error::InvalidParameter(format!("{}: missing `{name}`", self.law))),
        };
        if v.is_empty() || v.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "{}: `{name}` must be a nonempty list of positive reals",
                self.law
            )));
        }
        Ok(v)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gamma_exponent(alpha: f64, lambda: f64, t: f64) -> Complex64 {
    -alpha * c(1.0, -t / lambda).ln()
}

fn cp_exp_exponent(alpha: f64, lambda: f64, t: f64) -> Complex64 {
    alpha * c(0.0, t) / c(lambda, -t)
}

fn side(f: impl Fn(f64) -> f64 + Send + Sync + 'static, cutoff: f64, probe: (f64, f64)) -> Result<SideMeasure> {
    SideMeasure::density(f, cutoff, probe)
}

fn tail_side(
    tail: impl Fn(f64) -> f64 + Send + Sync + 'static,
    density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    cutoff: f64,
    probe: (f64, f64),
) -> Result<SideMeasure> {
    SideMeasure::tail_and_density(tail, density, cutoff, probe)
}

/// Spectral constant `C` of the symmetric stable density `C|x|^{-1-α}`
/// with exponent `-c|t|^α`, `0 < α < 2`.
pub fn stable_constant(alpha: f64, c: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        c / PI
    } else {
        -c / (2.0 * gamma_fn(-alpha) * (PI * alpha / 2.0).cos())
    }
}

/// Looks up a law by name. Missing scalar parameters take their defaults.
pub fn get_law(name: &str, given: &Params) -> Result<LawSpec> {
    let info = law_info(name)?;
    for key in given.keys() {
        if !info.params.iter().any(|p| p.name == key) {
            return Err(Error::InvalidParameter(format!("{name}: unknown parameter `{key}`")));
        }
    }
    let args = Args { law: name, given, info };
    let mut log_moment = LogMoment::Yes;
    let (exponent, spectral) = match name {
        "gamma" => {
            let (alpha, lambda) = (args.real("alpha")?, args.real("lambda")?);
            let e = LevyExponent::closed_form(
                name,
                &[("alpha", alpha), ("lambda", lambda)],
                LogMoment::Yes,
                move |t| gamma_exponent(alpha, lambda, t),
            );
            let s = side(
                move |x| alpha * (-lambda * x).exp() / x,
                f64::INFINITY,
                (1e-3 / lambda, 40.0 / lambda),
            )?;
            (e, Some(SpectralDensity::one_sided(s)))
        }
        "cp_exp" => {
            let (alpha, lambda) = (args.real("alpha")?, args.real("lambda")?);
            let e = LevyExponent::closed_form(
                name,
                &[("alpha", alpha), ("lambda", lambda)],
                LogMoment::Yes,
                move |t| cp_exp_exponent(alpha, lambda, t),
            );
            let s = tail_side(
                move |r| alpha * (-lambda * r).exp(),
                move |x| alpha * lambda * (-lambda * x).exp(),
                f64::INFINITY,
                (1e-3 / lambda, 40.0 / lambda),
            )?;
            (e, Some(SpectralDensity::one_sided(s)))
        }
        "bessel" => {
            let alpha = args.real("alpha")?;
            let e = LevyExponent::closed_form(name, &[("alpha", alpha)], LogMoment::Yes, move |t| {
                gamma_exponent(alpha, 1.0, t) + cp_exp_exponent(alpha, 1.0, t)
            });
            let s = side(
                move |x| alpha * (-x).exp() * (1.0 / x + 1.0),
                f64::INFINITY,
                (1e-3, 40.0),
            )?;
            (e, Some(SpectralDensity::one_sided(s)))
        }
        "laplace" => {
            let a = args.real("a")?;
            let e = LevyExponent::closed_form(name, &[("a", a)], LogMoment::Yes, move |t| {
                c(-(a * a * t * t).ln_1p(), 0.0)
            });
            let s = side(move |x| (-x / a).exp() / x, f64::INFINITY, (1e-3 * a, 40.0 * a))?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "d1" => {
            let u = args.real("u")?;
            let e = LevyExponent::closed_form(name, &[("u", u)], LogMoment::Yes, move |t| {
                c(log_x_over_sinh(t * u), 0.0)
            });
            let s = side(
                move |x| 1.0 / (x * (PI * x / u).exp_m1()),
                f64::INFINITY,
                (1e-3 * u, 10.0 * u),
            )?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "d1_bdpd" => {
            let u = args.real("u")?;
            let e = LevyExponent::closed_form(name, &[("u", u)], LogMoment::Yes, move |t| {
                c(-x_coth_x_minus_one(t * u), 0.0)
            });
            let s = tail_side(
                move |r| 1.0 / (PI * r / u).exp_m1(),
                move |x| {
                    let s = (PI * x / (2.0 * u)).sinh();
                    (PI / u) / (4.0 * s * s)
                },
                f64::INFINITY,
                (1e-3 * u, 10.0 * u),
            )?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "half_d2" => {
            let e = LevyExponent::closed_form(name, &[], LogMoment::Yes, |t| c(-0.5 * log_cosh(t), 0.0));
            let s = side(|x| 1.0 / (4.0 * x * (PI * x / 2.0).sinh()), f64::INFINITY, (1e-3, 10.0))?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "half_d2_bdpd" => {
            let e = LevyExponent::closed_form(name, &[], LogMoment::Yes, |t| c(-0.5 * t * t.tanh(), 0.0));
            let s = tail_side(
                |r| 1.0 / (4.0 * (PI * r / 2.0).sinh()),
                |x| {
                    let h = PI * x / 2.0;
                    PI / 8.0 * h.cosh() / (h.sinh() * h.sinh())
                },
                f64::INFINITY,
                (1e-3, 10.0),
            )?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "sym_stable" => {
            let (alpha, scale) = (args.real("alpha")?, args.real("c")?);
            if alpha > 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "sym_stable: alpha must lie in (0, 2], got {alpha}"
                )));
            }
            let e = LevyExponent::closed_form(name, &[("alpha", alpha), ("c", scale)], LogMoment::Yes, move |t| {
                c(-scale * t.abs().powf(alpha), 0.0)
            });
            if alpha == 2.0 {
                (e, None)
            } else {
                let k = stable_constant(alpha, scale);
                let s = tail_side(
                    move |r| k * r.powf(-alpha) / alpha,
                    move |x| k * x.powf(-1.0 - alpha),
                    f64::INFINITY,
                    (1e-2, 1e2),
                )?;
                (e, Some(SpectralDensity::symmetric(s)))
            }
        }
        "sym_gamma" => {
            let alpha = args.real("alpha")?;
            let e = LevyExponent::closed_form(name, &[("alpha", alpha)], LogMoment::Yes, move |t| {
                c(-alpha * (t * t).ln_1p(), 0.0)
            });
            let s = side(move |x| alpha * (-x).exp() / x, f64::INFINITY, (1e-3, 40.0))?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "k_measure" => {
            let (alpha, beta) = (args.real("alpha")?, args.real("beta")?);
            let s = tail_side(
                move |r| {
                    if r >= beta {
                        0.0
                    } else {
                        alpha * beta * crate::spectral::log_excess(1.0 - r / beta)
                    }
                },
                move |x| if x < beta { alpha * (beta / x - 1.0) } else { 0.0 },
                beta,
                (1e-3 * beta, 2.0 * beta),
            )?;
            let spectral = SpectralDensity::one_sided(s);
            let e =
                exponent_from_triple(&Triple::new(0.0, 0.0, Some(spectral.clone())))?.with_log_moment(LogMoment::Yes);
            (e, Some(spectral))
        }
        "laplace_series" => {
            let a = args.list("a")?;
            let (lo, hi) = a
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
            let sq: Vec<f64> = a.iter().map(|v| v * v).collect();
            let e = LevyExponent::closed_form(name, &[("terms", a.len() as f64)], LogMoment::Yes, move |t| {
                c(-sq.iter().map(|s| (s * t * t).ln_1p()).sum::<f64>(), 0.0)
            });
            let coef = a.clone();
            let s = side(
                move |x| coef.iter().map(|ak| (-x / ak).exp()).sum::<f64>() / x,
                f64::INFINITY,
                (1e-3 * lo, 40.0 * hi),
            )?;
            (e, Some(SpectralDensity::symmetric(s)))
        }
        "parabolic_k" => {
            let s = side(|x| (1.0 - x * x) / x, 1.0, (1e-3, 2.0))?;
            let spectral = SpectralDensity::one_sided(s);
            let e =
                exponent_from_triple(&Triple::new(0.0, 0.0, Some(spectral.clone())))?.with_log_moment(LogMoment::Yes);
            (e, Some(spectral))
        }
        "zero" => (LevyExponent::zero(), Some(SpectralDensity::zero())),
        other => return Err(Error::UnknownLaw(other.to_string())),
    };
    if exponent.log_moment() != LogMoment::Yes {
        log_moment = exponent.log_moment();
    }
    Ok(LawSpec {
        name: name.to_string(),
        params: given.clone(),
        exponent,
        spectral,
        known_classes: args.info.known_classes,
        log_moment,
        description: args.info.description,
        provenance: args.info.provenance,
    })
}

/// One expected classification verdict.
#[derive(Debug, Clone)]
pub struct OracleCase {
    pub law: LawSpec,
    pub class: ClassTested,
    pub expected: Verdict,
}

/// The fixed suite of expected verdicts consumed by the tests.
pub fn oracle_table() -> Result<Vec<OracleCase>> {
    use ClassTested as C;
    use Verdict::{Member as M, NonMember as N};
    let cases: [(&str, Params, C, Verdict); 14] = [
        ("gamma", params(&[("alpha", 2.0), ("lambda", 1.0)]), C::L, M),
        ("gamma", params(&[("alpha", 2.0), ("lambda", 1.0)]), C::Lf, M),
        ("cp_exp", params(&[("alpha", 1.0), ("lambda", 1.0)]), C::U, M),
        ("cp_exp", params(&[("alpha", 1.0), ("lambda", 1.0)]), C::L, N),
        ("parabolic_k", Params::new(), C::L, M),
        ("parabolic_k", Params::new(), C::Lf, N),
        ("k_measure", params(&[("alpha", 1.0), ("beta", 2.0)]), C::Lf, M),
        ("d1_bdpd", params(&[("u", 1.0)]), C::U, M),
        ("d1", params(&[("u", 1.0)]), C::Lf, M),
        ("half_d2", Params::new(), C::Lf, M),
        ("sym_stable", params(&[("alpha", 1.5), ("c", 1.0)]), C::Lf, M),
        ("bessel", params(&[("alpha", 2.0)]), C::L, M),
        ("bessel", params(&[("alpha", 2.0)]), C::Lf, N),
        ("laplace", params(&[("a", 1.0)]), C::Lf, M),
    ];
    cases
        .into_iter()
        .map(|(name, ps, class, expected)| {
            Ok(OracleCase {
                law: get_law(name, &ps)?,
                class,
                expected,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_helpers_are_continuous_at_switchover() {
        for x in [0.999e-3, 1e-3, 1.001e-3] {
            let direct = (x / f64::sinh(x)).ln();
            assert!((log_x_over_sinh(x) - direct).abs() < 1e-12);
            assert!((x_coth_x_minus_one(x) - (x / x.tanh() - 1.0)).abs() < 1e-12);
            assert!((log_cosh(x) - x.cosh().ln()).abs() < 1e-15);
        }
        assert!((log_x_over_sinh(800.0) - (800f64.ln() - 800.0 + LN_2)).abs() < 1e-9);
        assert!((log_cosh(800.0) - (800.0 - LN_2)).abs() < 1e-9);
        assert!((log_x_over_sinh(2.0) - (2.0 / 2f64.sinh()).ln()).abs() < 1e-15);
    }

    #[test]
    fn gamma_exponent_value() {
        let law = get_law("gamma", &params(&[("alpha", 1.0), ("lambda", 1.0)])).unwrap();
        let t = 1.3;
        let want = -c(1.0, -t).ln();
        assert!((law.exponent.value(t).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn gaussian_boundary_of_stable() {
        let law = get_law("sym_stable", &params(&[("alpha", 2.0), ("c", 0.5)])).unwrap();
        assert!(law.spectral.is_none());
        assert!((law.exponent.value(3.0).unwrap() - c(-4.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bessel_is_sum() {
        let b = get_law("bessel", &params(&[("alpha", 2.0)])).unwrap();
        let g = get_law("gamma", &params(&[("alpha", 2.0), ("lambda", 1.0)])).unwrap();
        let p = get_law("cp_exp", &params(&[("alpha", 2.0), ("lambda", 1.0)])).unwrap();
        for t in [-3.0, 0.5, 9.0] {
            let want = g.exponent.value(t).unwrap() + p.exponent.value(t).unwrap();
            assert!((b.exponent.value(t).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn stable_constant_reproduces_cauchy() {
        assert!((stable_constant(1.0, 1.0) - 1.0 / PI).abs() < 1e-15);
        // continuity through alpha = 1
        assert!((stable_constant(1.0 + 1e-7, 1.0) - 1.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(get_law("nope", &Params::new()), Err(Error::UnknownLaw(_))));
        assert!(get_law("gamma", &params(&[("alpha", -1.0)])).is_err());
        assert!(get_law("gamma", &params(&[("shape", 1.0)])).is_err());
        assert!(get_law("sym_stable", &params(&[("alpha", 2.5)])).is_err());
        assert!(get_law("laplace_series", &Params::new()).is_err());
    }

    #[test]
    fn known_classes_respect_the_chain() {
        for info in registry() {
            let has = |c: ClassTested| info.known_classes.iter().find(|k| k.class == c).map(|k| k.verdict);
            if has(ClassTested::Lf) == Some(Verdict::Member) {
                assert_eq!(has(ClassTested::L), Some(Verdict::Member), "{}", info.name);
            }
            if has(ClassTested::L) == Some(Verdict::Member) {
                assert_eq!(has(ClassTested::U), Some(Verdict::Member), "{}", info.name);
            }
        }
    }
}
