//! Fixed-point constructions, scattering profiles and characteristic numbers
//! on small grids.

use nonrad_core::charnum::{alpha_of, beta_relative, ALPHA_MATCH_TOL};
use nonrad_core::dynamics::separation_check;
use nonrad_core::extsolve::{y_norm_tail, Nonlinearity, SourceHistory, SourceSlice};
use nonrad_core::fixpoint::{
    apply_t, extract_scatter_profiles, iterate_second, iterate_to_fixed_point, FixpointConfig, InteriorFill, Order,
};
use nonrad_core::freewave::{source_profile, RadialGrid};
use nonrad_core::profile::{GridSpec, RadialProfile};
use nonrad_core::Error;

fn small(cfg: FixpointConfig) -> FixpointConfig {
    FixpointConfig { grid: GridSpec::symmetric(64.0, 0.125).unwrap(), t_extract: 24.0, ..cfg }
        .with_step(0.125)
        .unwrap()
}

#[test]
fn single_slice_scatters_to_its_source_profile() {
    let h = 1.0 / 16.0;
    let grid = GridSpec::symmetric(16.0, h).unwrap();
    let rg = RadialGrid::up_to(16.0, h).unwrap();
    let f: Vec<f64> = (0..=rg.n).map(|k| (-(k as f64 * h - 3.0).powi(2)).exp()).collect();
    let mut history = SourceHistory::new(grid);
    history.slices.push(SourceSlice { t: 0.0, weight: 1.0, mask_start: 0, f: f.clone() });
    let (q_minus, q_plus) = history.scattering_limits().unwrap();
    assert_eq!(q_minus.max_abs(), 0.0);
    let expected = source_profile(&f[1..], rg).unwrap();
    assert!(q_plus.sub(&expected).unwrap().max_abs() < 1e-12);
    // An even source profile is its own reflection.
    assert!(q_plus.sub(&q_plus.reflect().unwrap()).unwrap().max_abs() < 1e-12);
}

#[test]
fn zero_alpha_is_the_zero_solution() {
    let fp = iterate_to_fixed_point(&small(FixpointConfig { radius: Some(1.0), ..FixpointConfig::first(0.0) }), &Nonlinearity::focusing(), Order::First).unwrap();
    assert_eq!(fp.profile.max_abs(), 0.0);
    assert!(fp.solution.snapshots.iter().all(|s| s.u.iter().all(|&u| u == 0.0)));
}

#[test]
fn first_order_construction() {
    let f = Nonlinearity::focusing();
    let fp = iterate_to_fixed_point(&small(FixpointConfig::first(0.1)), &f, Order::First).unwrap();
    let d = &fp.diagnostics;
    assert!((alpha_of(&fp.profile) - 0.1).abs() < 2e-3);
    assert!(d.ratios.iter().all(|&r| r < 0.5), "{:?}", d.ratios);
    assert!(d.ball_ratio <= 1.0, "ball ratio {}", d.ball_ratio);
    assert!(d.energy_monotone);
    // Odd nonlinearity without time dependence: the profile is even.
    assert!(fp.profile.sub(&fp.profile.reflect().unwrap()).unwrap().max_abs() < 1e-12);

    let sc = extract_scatter_profiles(&fp.solution, fp.config.extract_tol).unwrap();
    assert!(sc.disagreement < fp.config.extract_tol);

    let ys: Vec<f64> = [0.0, 2.0, 4.0, 8.0].iter().map(|&r| y_norm_tail(&fp.solution, r).unwrap().value).collect();
    assert!(ys.windows(2).all(|w| w[1] <= w[0]), "{ys:?}");
}

#[test]
fn second_order_recovers_beta() {
    let f = Nonlinearity::focusing();
    let cfg = small(FixpointConfig::second(0.1, 0.05));
    let reference = iterate_to_fixed_point(&FixpointConfig { beta: 0.0, ..cfg.clone() }, &f, Order::First).unwrap();
    let fp = iterate_second(&cfg, &f, &reference).unwrap();
    let beta = beta_relative(&fp.profile, &reference.profile, ALPHA_MATCH_TOL).unwrap();
    assert!((beta - 0.05).abs() < 0.05 * 0.03, "beta {beta}");

    let mismatched = iterate_to_fixed_point(&small(FixpointConfig::first(0.05)), &f, Order::First).unwrap();
    assert!(iterate_second(&cfg, &f, &mismatched).is_err());
}

#[test]
fn exterior_ignores_moment_free_interior_changes() {
    let f = Nonlinearity::focusing();
    let cfg = small(FixpointConfig::first(0.1));
    let tail = RadialProfile::zeros(cfg.grid);
    let radius = cfg.resolved_radius(Order::First);
    let a = apply_t(&tail, &cfg, &f, Order::First, None, 8).unwrap();
    let other = FixpointConfig { interior: InteriorFill::Perturbed { amplitude: 0.05 }, ..cfg.clone() };
    let b = apply_t(&tail, &other, &f, Order::First, None, 8).unwrap();
    let mut worst: f64 = 0.0;
    for (sa, sb) in a.solution.snapshots.iter().zip(&b.solution.snapshots) {
        for k in 0..sa.u.len() {
            if a.solution.r(k) > radius + sa.t.abs() {
                worst = worst.max((sa.u[k] - sb.u[k]).abs());
            }
        }
    }
    assert!(worst < 1e-12, "exterior moved by {worst}");
}

#[test]
fn contraction_improves_with_radius() {
    let f = Nonlinearity::focusing();
    let ratios: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&r| {
            let cfg = small(FixpointConfig { radius: Some(r), tol: 1e-9, ..FixpointConfig::first(0.3) });
            let fp = iterate_to_fixed_point(&cfg, &f, Order::First).unwrap();
            fp.diagnostics.ratios[0]
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
}

#[test]
fn large_data_is_refused() {
    let f = Nonlinearity::focusing();
    let cfg = small(FixpointConfig { radius: Some(0.25), ..FixpointConfig::first(3.0) });
    match iterate_to_fixed_point(&cfg, &f, Order::First) {
        Err(Error::NonContraction(_) | Error::Divergence { .. } | Error::Convergence(_) | Error::Extraction(_)) => {}
        other => panic!("expected a refusal, got {:?}", other.map(|fp| fp.diagnostics)),
    }
}

#[test]
fn inverse_cube_term_dominates_far_out() {
    let f = Nonlinearity::focusing();
    let cfg = small(FixpointConfig::second(0.01, 0.5));
    let reference = iterate_to_fixed_point(&FixpointConfig { beta: 0.0, ..cfg.clone() }, &f, Order::First).unwrap();
    let fp = iterate_second(&cfg, &f, &reference).unwrap();
    let rows = separation_check(&fp, &reference, &[2.0, 4.0, 8.0]).unwrap();
    for row in &rows {
        assert!(row.r > fp.radius);
        assert!(row.remainder <= row.bound, "{row:?}");
        assert!(row.leading > 100.0 * row.remainder, "{row:?}");
    }
    // The remainder falls off faster than the leading term.
    for w in rows.windows(2) {
        assert!(w[1].remainder / w[0].remainder < w[1].leading / w[0].leading);
    }
    assert!(separation_check(&reference, &reference, &[4.0]).is_err());
}
