use num_complex::Complex64;

use levyfactor::catalogue::{get_law, params, registry, ParamValue, Params};
use levyfactor::exponent::{exponent_from_triple, fit_linear_drift, Triple};
use levyfactor::grid::Grid;
use levyfactor::spectral::{classify, spectral_inv_i, spectral_map_i};
use levyfactor::{exponent_add, Side, Verdict};

fn spectral_laws() -> Vec<(&'static str, Params)> {
    vec![
        ("gamma", params(&[("alpha", 2.0), ("lambda", 1.5)])),
        ("cp_exp", params(&[("alpha", 1.0), ("lambda", 2.0)])),
        ("bessel", params(&[("alpha", 1.0)])),
        ("laplace", params(&[("a", 0.7)])),
        ("d1", params(&[("u", 1.0)])),
        ("d1_bdpd", params(&[("u", 1.0)])),
        ("half_d2", Params::new()),
        ("half_d2_bdpd", Params::new()),
        ("sym_stable", params(&[("alpha", 0.8), ("c", 1.0)])),
        ("sym_stable", params(&[("alpha", 1.5), ("c", 2.0)])),
        ("sym_gamma", params(&[("alpha", 0.5)])),
        (
            "laplace_series",
            Params::from([("a".to_string(), ParamValue::List(vec![1.0, 0.5, 0.25]))]),
        ),
    ]
}

#[test]
fn triple_reproduces_stored_exponent_up_to_drift() {
    let grid = Grid::default();
    for (name, ps) in spectral_laws() {
        let law = get_law(name, &ps).unwrap();
        let triple = Triple::new(0.0, 0.0, law.spectral.clone());
        let from_triple = exponent_from_triple(&triple).unwrap().sample(&grid).unwrap();
        let stored = law.exponent.sample(&grid).unwrap();
        let fit = fit_linear_drift(&stored, &from_triple);
        assert!(
            fit.residual_sup < 1e-6,
            "{name}: residual {} (drift {})",
            fit.residual_sup,
            fit.delta
        );
    }
}

#[test]
fn gamma_drift_matches_compensator() {
    // ∫_0^1 x·αe^{-λx}/x dx = α(1 - e^{-λ})/λ
    let (alpha, lambda) = (2.0, 1.5);
    let law = get_law("gamma", &params(&[("alpha", alpha), ("lambda", lambda)])).unwrap();
    let grid = Grid::uniform(-10.0, 10.0, 201).unwrap();
    let from_triple = exponent_from_triple(&Triple::new(0.0, 0.0, law.spectral.clone()))
        .unwrap()
        .sample(&grid)
        .unwrap();
    let fit = fit_linear_drift(&law.exponent.sample(&grid).unwrap(), &from_triple);
    let want = alpha * (1.0 - (-lambda).exp()) / lambda;
    assert!((fit.delta.abs() - want).abs() < 1e-8, "{} vs {want}", fit.delta);
}

#[test]
fn harmonic_laplace_series_approximates_d1() {
    // Σ_k log(1 + t²/k²) = log(sinh(πt)/(πt)), so the series with a_k = 1/k is d1 at u = π.
    let k = 2000;
    let a: Vec<f64> = (1..=k).map(|j| 1.0 / j as f64).collect();
    let series = get_law(
        "laplace_series",
        &Params::from([("a".to_string(), ParamValue::List(a))]),
    )
    .unwrap();
    let d1 = get_law("d1", &params(&[("u", std::f64::consts::PI)])).unwrap();
    let mut cf_sup: f64 = 0.0;
    for t in Grid::uniform(-10.0, 10.0, 401).unwrap().points() {
        let (s, d) = (series.exponent.value(*t).unwrap(), d1.exponent.value(*t).unwrap());
        let gap = (s - d).norm();
        assert!(gap <= t * t / k as f64 + 1e-12, "{t}: {gap}");
        cf_sup = cf_sup.max((s.exp() - d.exp()).norm());
    }
    assert!(cf_sup < 2e-3, "{cf_sup}");
}

#[test]
fn gamma_exponents_add() {
    let lam = 1.3;
    let g = |a: f64| {
        get_law("gamma", &params(&[("alpha", a), ("lambda", lam)]))
            .unwrap()
            .exponent
    };
    let sum = exponent_add(&g(0.4), &g(1.1));
    let whole = g(1.5);
    for t in [-7.0, -0.2, 0.0, 3.0, 19.0] {
        assert!((sum.value(t).unwrap() - whole.value(t).unwrap()).norm() < 1e-10);
    }
}

#[test]
fn spectral_driving_densities() {
    // gamma is driven by cp_exp, d1 by d1_bdpd, half_d2 by half_d2_bdpd
    for (law, bdpd, ps) in [
        ("gamma", "cp_exp", params(&[("alpha", 1.5), ("lambda", 2.0)])),
        ("d1", "d1_bdpd", params(&[("u", 2.0)])),
        ("half_d2", "half_d2_bdpd", Params::new()),
    ] {
        let m = get_law(law, &ps).unwrap().spectral.unwrap();
        let g = get_law(bdpd, &ps).unwrap().spectral.unwrap();
        let g_back = spectral_inv_i(&m).unwrap();
        let m_fwd = spectral_map_i(&g).unwrap();
        for r in [0.05, 0.3, 1.0, 2.5] {
            let (a, b) = (
                g_back.side(Side::Pos).tail(Side::Pos, r).unwrap(),
                g.tail(Side::Pos, r).unwrap(),
            );
            assert!((a - b).abs() < 1e-7 * b.max(1e-3), "{law} tail at {r}: {a} vs {b}");
            let (a, b) = (m_fwd.density_at(r), m.density_at(r));
            assert!((a - b).abs() < 1e-7 * b, "{law} density at {r}: {a} vs {b}");
        }
    }
}

#[test]
fn registry_listing_and_known_classes() {
    let names: Vec<_> = registry().iter().map(|l| l.name).collect();
    for want in ["gamma", "cp_exp", "bessel", "d1", "half_d2", "sym_stable", "k_measure"] {
        assert!(names.contains(&want), "{want}");
    }
    // every documented membership is reproduced by the classifiers
    for info in registry() {
        let ps = if info.name == "laplace_series" {
            Params::from([("a".to_string(), ParamValue::List(vec![1.0, 0.3]))])
        } else {
            Params::new()
        };
        let law = get_law(info.name, &ps).unwrap();
        let Some(m) = law.spectral.as_ref() else { continue };
        for known in &law.known_classes {
            assert_eq!(
                classify(m, known.class).verdict,
                known.verdict,
                "{} {}",
                info.name,
                known.class
            );
        }
    }
}

#[test]
fn exponents_satisfy_basic_invariants() {
    for (name, ps) in spectral_laws() {
        let e = get_law(name, &ps).unwrap().exponent;
        assert_eq!(e.value(0.0).unwrap(), Complex64::new(0.0, 0.0), "{name}");
        for t in [0.01, 0.9, 4.0, 15.0] {
            let (p, m) = (e.value(t).unwrap(), e.value(-t).unwrap());
            assert!((p.conj() - m).norm() < 1e-12 * p.norm().max(1.0), "{name} at {t}");
            assert!(p.re <= 1e-15, "{name} at {t}: {p}");
        }
    }
}

#[test]
fn stable_gaussian_boundary_has_no_spectral_part() {
    let law = get_law("sym_stable", &params(&[("alpha", 2.0), ("c", 0.5)])).unwrap();
    assert!(law.spectral.is_none());
    assert!((law.exponent.value(2.0).unwrap().re + 2.0).abs() < 1e-14);
    let z = get_law("zero", &Params::new()).unwrap();
    assert_eq!(
        classify(z.spectral.as_ref().unwrap(), levyfactor::ClassTested::Lf).verdict,
        Verdict::Member
    );
}
