use std::f64::consts::PI;

use num_complex::Complex64;

use levyfactor::catalogue::{get_law, log_cosh, log_x_over_sinh, params};
use levyfactor::grid::Grid;
use levyfactor::maps::map_j;
use levyfactor::simulate::{
    empirical_cf, exponential, levy_area_with_driver_cf, sample_cp_path_integral, sample_laplace_series,
    verify_factorization_mc, CoefficientRule, Decay, SimConfig, SimRng,
};

const N: usize = 100_000;

fn gamma_cf(alpha: f64, lambda: f64) -> impl Fn(f64) -> Complex64 {
    move |t| Complex64::new(1.0, -t / lambda).powf(-alpha)
}

fn exp_jumps(lambda: f64) -> impl Fn(&mut SimRng) -> f64 + Sync {
    move |r: &mut SimRng| exponential(r, lambda)
}

#[test]
fn exp_decay_integral_is_gamma() {
    let cfg = SimConfig::new(11, N, Grid::uniform(-10.0, 10.0, 201).unwrap());
    let (alpha, lambda) = (1.5, 2.0);
    let s = sample_cp_path_integral(alpha, exp_jumps(lambda), Decay::ExpDecay, &cfg).unwrap();
    let r = empirical_cf(&s, &cfg.t_grid)
        .unwrap()
        .with_target_fn(gamma_cf(alpha, lambda))
        .unwrap();
    assert!(r.sup_distance.unwrap() < 0.02, "{}", r.sup_distance.unwrap());
    assert!(r.empirical_cf.iter().all(|z| z.norm() <= 1.0 + 1e-12));
}

#[test]
fn linear_ramp_integral_matches_map_j() {
    let cfg = SimConfig::new(12, N, Grid::uniform(-10.0, 10.0, 101).unwrap());
    let (alpha, lambda) = (1.0, 1.0);
    let s = sample_cp_path_integral(alpha, exp_jumps(lambda), Decay::LinearRamp, &cfg).unwrap();
    let rho = get_law("cp_exp", &params(&[("alpha", alpha), ("lambda", lambda)])).unwrap();
    let target = map_j(&rho.exponent).sample(&cfg.t_grid).unwrap();
    let r = empirical_cf(&s, &cfg.t_grid)
        .unwrap()
        .with_target(target.values.iter().map(|v| v.exp()).collect())
        .unwrap();
    assert!(r.sup_distance.unwrap() < 0.02, "{}", r.sup_distance.unwrap());
}

#[test]
fn odd_harmonic_series_is_hyperbolic_secant() {
    // Σ 2/(π(2k-1))·η_k has characteristic function 1/cosh t, the square of
    // (cosh t)^{-1/2}; two independent copies give 1/cosh² t.
    let mut cfg = SimConfig::new(13, N, Grid::uniform(-8.0, 8.0, 81).unwrap());
    let rule = CoefficientRule::OddHarmonic { scale: 2.0 / PI };
    let a = sample_laplace_series(&rule, &cfg).unwrap();
    cfg.seed = 14;
    let b = sample_laplace_series(&rule, &cfg).unwrap();
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    for (samples, power) in [(&a, 1.0), (&sum, 2.0)] {
        let r = empirical_cf(samples, &cfg.t_grid)
            .unwrap()
            .with_target_fn(|t| Complex64::new((-power * log_cosh(t)).exp(), 0.0))
            .unwrap();
        assert!(
            r.sup_distance.unwrap() < 0.03,
            "power {power}: {}",
            r.sup_distance.unwrap()
        );
    }
}

#[test]
fn harmonic_series_is_hyperbolic_sine_ratio() {
    // a_k = u/(πk) gives tu/sinh(tu); u = π is the plain harmonic series
    let cfg = SimConfig::new(15, N, Grid::uniform(-8.0, 8.0, 81).unwrap());
    for (scale, u) in [(1.0 / PI, 1.0), (1.0, PI)] {
        let s = sample_laplace_series(&CoefficientRule::Harmonic { scale }, &cfg).unwrap();
        let r = empirical_cf(&s, &cfg.t_grid)
            .unwrap()
            .with_target_fn(|t| Complex64::new(log_x_over_sinh(t * u).exp(), 0.0))
            .unwrap();
        assert!(r.sup_distance.unwrap() < 0.03, "u = {u}: {}", r.sup_distance.unwrap());
    }
}

#[test]
fn factorization_by_simulation() {
    let cfg = SimConfig::new(7, N, Grid::uniform(-10.0, 10.0, 101).unwrap());
    let r = verify_factorization_mc("cp_exp", &params(&[("alpha", 1.0), ("lambda", 1.0)]), &cfg).unwrap();
    assert!(r.sup_distance.unwrap() < 0.03, "{}", r.sup_distance.unwrap());

    let cfg = SimConfig {
        series_cutoff: 500,
        ..SimConfig::new(8, 50_000, Grid::uniform(-6.0, 6.0, 61).unwrap())
    };
    let r = verify_factorization_mc("levy_area", &params(&[("u", 1.0)]), &cfg).unwrap();
    assert!(r.sup_distance.unwrap() < 0.03, "{}", r.sup_distance.unwrap());
    let at = |t: f64| levy_area_with_driver_cf(t, 1.0).re;
    assert!((at(1.0) - (1.0 / 1f64.sinh()) * (-(1.0 / 1f64.tanh() - 1.0)).exp()).abs() < 1e-15);
}

#[test]
fn clt_envelope_across_seeds() {
    let grid = Grid::uniform(-10.0, 10.0, 41).unwrap();
    let inside = (0..20)
        .filter(|&seed| {
            let cfg = SimConfig::new(1000 + seed, 10_000, grid.clone());
            let s = sample_cp_path_integral(2.0, exp_jumps(1.0), Decay::ExpDecay, &cfg).unwrap();
            let r = empirical_cf(&s, &grid)
                .unwrap()
                .with_target_fn(gamma_cf(2.0, 1.0))
                .unwrap();
            r.sup_distance.unwrap() <= 3.0 * r.ci_halfwidth
        })
        .count();
    assert!(inside >= 18, "{inside} of 20");
}

#[test]
fn horizon_doubling_is_invisible() {
    let base = SimConfig::new(21, N, Grid::uniform(-10.0, 10.0, 41).unwrap());
    let long = SimConfig {
        truncation: 80.0,
        ..base.clone()
    };
    let a = sample_cp_path_integral(2.0, exp_jumps(1.0), Decay::ExpDecay, &base).unwrap();
    let b = sample_cp_path_integral(2.0, exp_jumps(1.0), Decay::ExpDecay, &long).unwrap();
    let ra = empirical_cf(&a, &base.t_grid).unwrap();
    let rb = empirical_cf(&b, &base.t_grid).unwrap();
    let gap = ra
        .empirical_cf
        .iter()
        .zip(&rb.empirical_cf)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(gap < ra.ci_halfwidth, "{gap}");
}

#[test]
fn same_seed_same_stream() {
    let cfg = SimConfig::new(99, 2000, Grid::uniform(-1.0, 1.0, 3).unwrap());
    let a = sample_cp_path_integral(3.0, exp_jumps(1.0), Decay::ExpDecay, &cfg).unwrap();
    let b = sample_cp_path_integral(3.0, exp_jumps(1.0), Decay::ExpDecay, &cfg).unwrap();
    assert_eq!(
        a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
    let other = SimConfig {
        seed: 100,
        ..cfg.clone()
    };
    assert_ne!(
        a,
        sample_cp_path_integral(3.0, exp_jumps(1.0), Decay::ExpDecay, &other).unwrap()
    );
}
