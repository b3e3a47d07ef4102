//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use levyfactor::catalogue::{get_law, log_x_over_sinh, oracle_table, params, LawSpec};
use levyfactor::error::Result;
use levyfactor::grid::{Grid, Sampled};
use levyfactor::maps::{inv_i, inv_j, inv_ji, lf_characteristic, map_i, map_j, verify_factorization};
use levyfactor::simulate::{
    empirical_cf, exponential, sample_cp_path_integral, sample_laplace_series, verify_factorization_mc,
    CoefficientRule, Decay, SimConfig, SimRng,
};
use levyfactor::spectral::{
    classify, classify_l, classify_ln, classify_lnf, dderiv_relation, lm_from_g, log_space, spectral_inv_i, Atom,
    ClassTested, Side, SideMeasure, SpectralDensity, Verdict,
};
use levyfactor::{exponent_add, LevyExponent, LogMoment};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sup_diff(a: &Sampled, b: &Sampled) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn law(name: &str, ps: &[(&str, f64)]) -> Result<LawSpec> {
    get_law(name, &params(ps))
}

fn closed(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> LevyExponent {
    LevyExponent::closed_form("oracle", &[], LogMoment::Yes, move |t| Complex64::new(f(t), 0.0))
}

fn stable_fixed_point() -> Result<Outcome> {
    let grid = Grid::default();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let psi = law("sym_stable", &[("alpha", alpha), ("c", 1.0)])?.exponent;
        let want_i = closed(move |t| -t.abs().powf(alpha) / alpha).sample(&grid)?;
        let want_j = closed(move |t| -t.abs().powf(alpha) / (alpha + 1.0)).sample(&grid)?;
        worst = worst.max(sup_diff(&map_i(&psi)?.sample(&grid)?, &want_i));
        worst = worst.max(sup_diff(&map_j(&psi).sample(&grid)?, &want_j));
    }
    Ok(outcome(
        worst < 1e-8,
        format!("sup error {worst:.2e} (< 1e-8), alpha in {{0.5, 1, 1.5, 2}}"),
    ))
}

fn levy_area() -> Result<Outcome> {
    let grid = Grid::uniform(-10.0, 10.0, 2001)?;
    let d1 = law("d1", &[("u", 1.0)])?;
    let bdpd = law("d1_bdpd", &[("u", 1.0)])?;
    let err = sup_diff(&inv_i(&d1.exponent).sample(&grid)?, &bdpd.exponent.sample(&grid)?);

    let sum = exponent_add(&d1.exponent, &bdpd.exponent);
    let target = closed(|t| log_x_over_sinh(t) - (t / t.tanh() - 1.0)).sample(&Grid::uniform(0.5, 10.0, 20)?)?;
    let add_err = sup_diff(&sum.sample(&Grid::uniform(0.5, 10.0, 20)?)?, &target);

    let m_d1 = d1.spectral.expect("d1 has a spectral density");
    let extracted = m_d1.add(&spectral_inv_i(&m_d1)?);
    let verdict = classify_l(&extracted).verdict;
    Ok(outcome(
        err < 1e-6 && add_err < 1e-12 && verdict == Verdict::Member,
        format!("inv_I sup error {err:.2e} (< 1e-6); sum exponent error {add_err:.1e}; classify_L of sum: {verdict}"),
    ))
}

fn half_cosh() -> Result<Outcome> {
    let grid = Grid::uniform(-10.0, 10.0, 2001)?;
    let err = sup_diff(
        &inv_i(&law("half_d2", &[])?.exponent).sample(&grid)?,
        &law("half_d2_bdpd", &[])?.exponent.sample(&grid)?,
    );
    Ok(outcome(err < 1e-6, format!("sup error {err:.2e} (< 1e-6)")))
}

fn factorization(elapsed_limit: Duration) -> Result<Outcome> {
    let start = Instant::now();
    let grid = Grid::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, ps) in [
        ("gamma", vec![("alpha", 2.0), ("lambda", 1.0)]),
        ("cp_exp", vec![("alpha", 1.0), ("lambda", 1.0)]),
        ("laplace", vec![("a", 1.0)]),
        ("sym_stable", vec![("alpha", 1.5), ("c", 1.0)]),
    ] {
        let rep = verify_factorization(&law(name, &ps)?.exponent, &grid)?;
        pass &= rep.residual_sup < 1e-5;
        parts.push(format!("{name} {:.1e}", rep.residual_sup));
    }
    let took = start.elapsed();
    pass &= took < elapsed_limit;
    Ok(outcome(
        pass,
        format!(
            "residuals {} (< 1e-5); {:.2} s (< {} s)",
            parts.join(", "),
            took.as_secs_f64(),
            elapsed_limit.as_secs()
        ),
    ))
}

fn operator_identity() -> Result<Outcome> {
    let grid = Grid::uniform(-10.0, 10.0, 201)?;
    let mut inv_err: f64 = 0.0;
    for spec in [
        law("gamma", &[("alpha", 2.0), ("lambda", 1.0)])?,
        law("d1", &[("u", 1.0)])?,
    ] {
        let phi = &spec.exponent;
        let direct = inv_ji(phi).sample(&grid)?;
        inv_err = inv_err.max(sup_diff(&direct, &inv_j(&inv_i(phi)).sample(&grid)?));
        inv_err = inv_err.max(sup_diff(&direct, &inv_i(&inv_j(phi)).sample(&grid)?));
    }
    let mut lf_err: f64 = 0.0;
    for spec in [
        law("cp_exp", &[("alpha", 1.0), ("lambda", 1.0)])?,
        law("laplace", &[("a", 1.0)])?,
    ] {
        let nu = &spec.exponent;
        let composed = map_i(&map_j(nu))?.sample(&grid)?;
        lf_err = lf_err.max(sup_diff(&lf_characteristic(nu)?.sample(&grid)?, &composed));
    }
    Ok(outcome(
        inv_err < 1e-5 && lf_err < 1e-7,
        format!("inverse compositions {inv_err:.2e} (< 1e-5); lf vs I(J) {lf_err:.2e} (< 1e-7)"),
    ))
}

fn spectral_closed_form() -> Result<Outcome> {
    let mut rel: f64 = 0.0;
    for (c, x0) in [(1.0, 1.0), (1.3, 2.5), (0.2, 0.05)] {
        let atom = Atom { location: x0, mass: c };
        let g = SpectralDensity::one_sided(SideMeasure::atoms_only(vec![atom], (0.01 * x0, 2.0 * x0))?);
        let m = lm_from_g(&g)?;
        let (alpha, beta) = (c / x0, x0);
        for r in log_space(0.01 * x0, x0, 202).into_iter().skip(1).take(200) {
            let want = alpha * (beta * (beta / r).ln() - (beta - r));
            rel = rel.max(((m.tail(Side::Pos, r)? - want) / want).abs());
        }
    }
    let mut residual: f64 = 0.0;
    for (name, ps) in [
        ("cp_exp", vec![("alpha", 1.0), ("lambda", 1.0)]),
        ("gamma", vec![("alpha", 2.0), ("lambda", 1.0)]),
        ("d1_bdpd", vec![("u", 1.0)]),
    ] {
        let g = law(name, &ps)?.spectral.expect("spectral density");
        let m = lm_from_g(&g)?;
        residual = residual.max(dderiv_relation(&g, &m, &log_space(0.01, 10.0, 40))?.residual_sup);
    }
    Ok(outcome(
        rel < 1e-9 && residual < 1e-6,
        format!("atom tail relative error {rel:.2e} (< 1e-9); derivative relation residual {residual:.2e} (< 1e-6)"),
    ))
}

fn chain_holds(m: &SpectralDensity) -> bool {
    let lf = classify(m, ClassTested::Lf).verdict;
    let l = classify(m, ClassTested::L).verdict;
    let u = classify(m, ClassTested::U).verdict;
    (lf != Verdict::Member || l == Verdict::Member) && (l != Verdict::Member || u == Verdict::Member)
}

fn oracle_suite() -> Result<Outcome> {
    let cases = oracle_table()?;
    let mut mismatches = Vec::new();
    let mut chain_failures = Vec::new();
    for case in &cases {
        let m = case.law.spectral.as_ref().expect("oracle laws have spectral densities");
        let got = classify(m, case.class).verdict;
        if got != case.expected {
            mismatches.push(format!(
                "{} {}: got {got}, want {}",
                case.law.name, case.class, case.expected
            ));
        }
        if !chain_holds(m) {
            chain_failures.push(case.law.name.clone());
        }
    }
    Ok(outcome(
        mismatches.is_empty() && chain_failures.is_empty(),
        if mismatches.is_empty() && chain_failures.is_empty() {
            format!("{} verdicts reproduced; chain Lf => L => U holds", cases.len())
        } else {
            format!(
                "mismatches: [{}]; chain failures: [{}]",
                mismatches.join("; "),
                chain_failures.join(", ")
            )
        },
    ))
}

fn monte_carlo(limit: Duration) -> Result<Outcome> {
    let start = Instant::now();
    let n = 100_000;
    let seed = 20240611;

    let cfg = SimConfig::new(seed, n, Grid::uniform(-10.0, 10.0, 201)?);
    let (alpha, lambda) = (2.0, 1.0);
    let samples = sample_cp_path_integral(
        alpha,
        move |r: &mut SimRng| exponential(r, lambda),
        Decay::ExpDecay,
        &cfg,
    )?;
    let gamma = empirical_cf(&samples, &cfg.t_grid)?
        .with_target_fn(|t| Complex64::new(1.0, -t / lambda).powf(-alpha))?
        .sup_distance
        .unwrap_or(f64::INFINITY);
    let gamma_time = start.elapsed();

    let cfg8 = SimConfig::new(seed, n, Grid::uniform(-8.0, 8.0, 161)?);
    let harmonic = sample_laplace_series(&CoefficientRule::Harmonic { scale: 1.0 }, &cfg8)?;
    let emp = empirical_cf(&harmonic, &cfg8.t_grid)?;
    let area = emp
        .clone()
        .with_target_fn(|t| Complex64::new(log_x_over_sinh(t).exp(), 0.0))?
        .sup_distance
        .unwrap_or(f64::INFINITY);
    // the same samples against the product formula for Σ η_k/k
    let area_pi = emp
        .with_target_fn(|t| Complex64::new(log_x_over_sinh(std::f64::consts::PI * t).exp(), 0.0))?
        .sup_distance
        .unwrap_or(f64::INFINITY);

    let fact = verify_factorization_mc("cp_exp", &params(&[("alpha", 1.0), ("lambda", 1.0)]), &cfg)?
        .sup_distance
        .unwrap_or(f64::INFINITY);
    let took = start.elapsed();
    let pass = gamma < 0.02 && gamma_time < limit && area < 0.03 && fact < 0.03;
    Ok(outcome(
        pass,
        format!(
            "gamma {gamma:.4} (< 0.02, {:.1} s < {} s); a_k = 1/k vs t/sinh t {area:.4} (< 0.03) [vs pi t/sinh(pi t): {area_pi:.4}]; factorization cp_exp {fact:.4} (< 0.03); total {:.1} s",
            gamma_time.as_secs_f64(),
            limit.as_secs(),
            took.as_secs_f64()
        ),
    ))
}

fn filtration() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut pass = true;
    let stable = law("sym_stable", &[("alpha", 1.5), ("c", 1.0)])?
        .spectral
        .expect("stable density");
    for n in 1..=3 {
        let ln = classify_ln(&stable, n).verdict;
        let lnf = classify_lnf(&stable, n).verdict;
        if ln != Verdict::Member || lnf != Verdict::Member {
            pass = false;
            notes.push(format!("stable L{n} {ln}, L{n}f {lnf}"));
        }
    }
    let lambda = 2.0;
    let gamma = law("gamma", &[("alpha", 1.0), ("lambda", lambda)])?
        .spectral
        .expect("gamma density");
    let rep = classify_ln(&gamma, 1);
    let near = rep.witnesses.first().map(|w| w.x * lambda);
    let gamma_ok =
        rep.verdict == Verdict::NonMember && rep.stage == Some(1) && near.is_some_and(|x| (x - 1.0).abs() < 0.1);
    pass &= gamma_ok;
    notes.push(format!(
        "gamma L1 {} at stage {:?}, witness r*lambda = {}",
        rep.verdict,
        rep.stage,
        near.map_or("none".into(), |x| format!("{x:.3}"))
    ));

    let mut checked = 0;
    let mut tests: Vec<(SpectralDensity, ClassTested)> = vec![
        (stable.clone(), ClassTested::Ln(2)),
        (stable, ClassTested::Lnf(3)),
        (gamma, ClassTested::Ln(1)),
    ];
    for case in oracle_table()? {
        tests.push((case.law.spectral.expect("spectral"), case.class));
    }
    for (m, class) in &tests {
        let base = classify(m, *class).verdict;
        for c in [0.5, 2.0] {
            let v = classify(&m.dilate(c)?, *class).verdict;
            checked += 1;
            if v != base {
                pass = false;
                notes.push(format!("{class} changed from {base} to {v} under dilation {c}"));
            }
        }
    }
    notes.push(format!("{checked} dilated verdicts unchanged"));
    Ok(outcome(pass, notes.join("; ")))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome>>)> = vec![
        (
            "stable fixed point",
            Box::new(|| {
                let start = Instant::now();
                let o = stable_fixed_point()?;
                let took = start.elapsed();
                Ok(outcome(
                    o.pass && took < Duration::from_secs(1),
                    format!("{}; {:.2} s (< 1 s)", o.detail, took.as_secs_f64()),
                ))
            }),
        ),
        ("Levy area identity", Box::new(levy_area)),
        ("hyperbolic cosine identity", Box::new(half_cosh)),
        (
            "factorization residual",
            Box::new(|| factorization(Duration::from_secs(10))),
        ),
        ("operator identity", Box::new(operator_identity)),
        ("spectral closed form", Box::new(spectral_closed_form)),
        ("classifier oracle suite", Box::new(oracle_suite)),
        ("Monte Carlo", Box::new(|| monte_carlo(Duration::from_secs(30)))),
        ("filtration spot checks", Box::new(filtration)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
