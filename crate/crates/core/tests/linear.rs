//! Closed-form cases and structural properties of profiles and free waves.

use nonrad_core::freewave::{
    data_from_profile, energy_norm, evolve_free, evolve_free_with_derivatives, isometry_defect, profile_from_data,
    source_profile, RadialData, RadialGrid,
};
use nonrad_core::profile::{weighted_distance, GridSpec, RadialProfile};
use nonrad_core::SIGMA4;

fn grid(l: f64, h: f64) -> GridSpec {
    GridSpec::symmetric(l, h).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn box_moments_are_exact() {
    let g = grid(4.0, 1.0 / 16.0);
    let one = RadialProfile::indicator(g, -1.0, 1.0).unwrap();
    let odd = RadialProfile::piecewise(g, -1.0, 1.0, |s| s).unwrap();
    let sq = RadialProfile::piecewise(g, -1.0, 1.0, |s| s * s).unwrap();
    let right = RadialProfile::indicator(g, 0.0, 2.0).unwrap();
    let inf = f64::INFINITY;
    assert!(close(one.moment0(-inf, inf).unwrap(), 2.0, 1e-14));
    assert!(odd.moment0(-inf, inf).unwrap().abs() < 1e-14);
    // Trapezoid on s² is second order, not exact.
    assert!(close(sq.moment0(-inf, inf).unwrap(), 2.0 / 3.0, 1e-3));
    assert!(one.moment1(-inf, inf).unwrap().abs() < 1e-14);
    assert!(close(odd.moment1(-inf, inf).unwrap(), 2.0 / 3.0, 1e-3));
    assert!(close(right.moment1(-inf, inf).unwrap(), 2.0, 1e-14));
}

#[test]
fn box_tails_and_split() {
    let g = grid(4.0, 1.0 / 16.0);
    let one = RadialProfile::indicator(g, -1.0, 1.0).unwrap();
    assert_eq!(one.l2_tail(1.0).unwrap(), 0.0);
    assert!(close(one.l2_tail(0.0).unwrap(), 2f64.sqrt(), 1e-14));

    let wide = RadialProfile::indicator(g, -2.0, 2.0).unwrap();
    let (inner, outer) = wide.split_at(1.0).unwrap();
    let inf = f64::INFINITY;
    assert!(close(inner.moment0(-inf, inf).unwrap(), 2.0, 1e-14));
    assert!(close(outer.moment0(-inf, inf).unwrap(), 2.0, 1e-14));
    assert_eq!(outer.moment0(-1.0, 1.0).unwrap(), 0.0);

    let (all, none) = wide.split_at(10.0).unwrap();
    assert_eq!(all, wide);
    assert_eq!(none.max_abs(), 0.0);
}

#[test]
fn box_translation_is_a_shift() {
    let g = grid(4.0, 1.0 / 16.0);
    let one = RadialProfile::indicator(g, -1.0, 1.0).unwrap();
    assert_eq!(one.translate(0.0).unwrap(), one);
    assert_eq!(one.translate(1.0).unwrap(), RadialProfile::indicator(g, -2.0, 0.0).unwrap());
}

#[test]
fn translated_profile_advances_the_wave() {
    let g = RadialProfile::piecewise(grid(16.0, 1.0 / 64.0), -6.0, 6.0, |s| (1.0 + s) * (-s * s).exp()).unwrap();
    let t0 = 0.75;
    let shifted = g.translate(t0).unwrap();
    for (r, t) in [(0.5, 0.0), (2.0, 1.0), (3.0, -2.0), (1.25, 0.5)] {
        let a = evolve_free(&shifted, r, t).unwrap();
        let b = evolve_free(&g, r, t + t0).unwrap();
        assert!((a - b).abs() < 1e-12, "r={r} t={t}: {a} vs {b}");
    }
}

#[test]
fn weighted_distance_ignores_the_core() {
    let g = grid(8.0, 1.0 / 16.0);
    let a = RadialProfile::from_fn(g, |s| (-s * s).exp());
    assert_eq!(weighted_distance(&a, &a, 1.0, 7.0 / 6.0).unwrap(), 0.0);
    let b = a.add(&RadialProfile::indicator(g, -1.0, 1.0).unwrap()).unwrap();
    assert_eq!(weighted_distance(&a, &b, 2.0, 7.0 / 6.0).unwrap(), 0.0);
}

#[test]
fn free_wave_of_boxes() {
    let g = grid(4.0, 1.0 / 64.0);
    let one = RadialProfile::indicator(g, -1.0, 1.0).unwrap();
    let odd = RadialProfile::piecewise(g, -1.0, 1.0, |s| s).unwrap();
    assert!(evolve_free(&one, 2.0, 0.0).unwrap().abs() < 1e-15);
    assert!(evolve_free(&one, 0.5, 0.0).unwrap().abs() < 1e-15);
    assert!(close(evolve_free(&odd, 2.0, 0.0).unwrap(), 1.0 / 12.0, 1e-4));
}

#[test]
fn even_profiles_have_no_initial_displacement() {
    let g = RadialProfile::from_fn(grid(16.0, 1.0 / 32.0), |s| (-s * s / 3.0).exp() * (1.0 + s * s));
    let d = data_from_profile(&g).unwrap();
    assert!(d.u0.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn box_energy_matches_profile_norm() {
    let mut prev = f64::INFINITY;
    for h in [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
        let g = RadialProfile::indicator(grid(32.0, h), -1.0, 1.0).unwrap();
        let d = data_from_profile(&g).unwrap();
        let e = energy_norm(&d, 0.0).unwrap().powi(2);
        assert!(close(e, 4.0 * SIGMA4, 0.02), "h={h}: {e}");
        let defect = isometry_defect(&g).unwrap();
        assert!(defect < prev);
        prev = defect;
    }
    assert_eq!(isometry_defect(&RadialProfile::zeros(grid(4.0, 0.125))).unwrap(), 0.0);
}

#[test]
fn compact_profiles_radiate_inverse_cubes() {
    let big_r = 2.0;
    let g = RadialProfile::piecewise(grid(16.0, 1.0 / 32.0), -big_r, big_r, |s| (1.0 + s) * (4.0 - s * s)).unwrap();
    let c1 = g.moment1(-big_r, big_r).unwrap();
    let c2 = -g.moment0(-big_r, big_r).unwrap();
    let d = data_from_profile(&g).unwrap();
    let outside: Vec<(f64, f64)> = (0..d.r_grid.n)
        // The end-correction stencil reaches two nodes back.
        .filter(|&k| d.r_grid.r(k) > big_r + 2.5 * d.r_grid.step)
        .map(|k| (d.r_grid.r(k).powi(3) * d.u0[k], d.r_grid.r(k).powi(3) * d.u1[k]))
        .collect();
    let (a0, a1) = outside[0];
    for &(b0, b1) in &outside {
        assert!((b0 - a0).abs() < 1e-12 * a0.abs() && (b1 - a1).abs() < 1e-12 * a1.abs());
    }
    // The kinks at ±R cost O(h²) in the constants themselves.
    assert!(close(a0, c1, 1e-3), "{a0} vs {c1}");
    assert!(close(a1, c2, 1e-3), "{a1} vs {c2}");
}

#[test]
fn velocity_box_inverts_to_even_profile() {
    let h = 1.0 / 256.0;
    let rg = RadialGrid::up_to(8.0, h).unwrap();
    let d = RadialData::from_fn(rg, |_| 0.0, |r| if r <= 1.0 { 1.0 } else { 0.0 });
    let g = profile_from_data(&d).unwrap();
    for s in [0.25, 0.5, 0.75, 2.0, 5.0] {
        // Half of r²u1 - ∫_r^∞ ρ u1 dρ.
        let expected = if s < 1.0 { 0.5 * (s * s - (1.0 - s * s) / 2.0) } else { 0.0 };
        assert!((g.sample(s) - expected).abs() < 1e-2, "s={s}: {} vs {expected}", g.sample(s));
        assert!((g.sample(-s) - g.sample(s)).abs() < 1e-12);
    }
}

#[test]
fn source_profile_of_inverse_cube_is_a_box() {
    let h = 1.0 / 64.0;
    let rg = RadialGrid::up_to(64.0, h).unwrap();
    // The sample on the jump takes the midpoint value.
    let f: Vec<f64> = rg
        .radii()
        .iter()
        .map(|&r| if r > 1.0 { r.powi(-3) } else if r == 1.0 { 0.5 } else { 0.0 })
        .collect();
    let g = source_profile(&f, rg).unwrap();
    // r²f and ∫_r^∞ ρ f cancel beyond r = 1; inside only the integral survives.
    for (s, expected) in [(0.25, -0.5), (0.75, -0.5), (1.5, 0.0), (4.0, 0.0), (8.0, 0.0)] {
        assert!((g.sample(s) - expected).abs() < 1e-3, "s={s}: {}", g.sample(s));
        assert!((g.sample(-s) - expected).abs() < 1e-3);
    }
    let zero = source_profile(&vec![0.0; rg.n], rg).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn source_profile_reproduces_velocity() {
    let h = 1.0 / 128.0;
    let rg = RadialGrid::up_to(24.0, h).unwrap();
    let f: Vec<f64> = rg.radii().iter().map(|&r| (-(r - 3.0) * (r - 3.0)).exp()).collect();
    let d = data_from_profile(&source_profile(&f, rg).unwrap()).unwrap();
    for k in 0..d.r_grid.n.min(rg.n) {
        assert!(d.u0[k].abs() < 1e-12);
        assert!((d.u1[k] - f[k]).abs() < 1e-3, "r={}", rg.r(k));
    }
}

#[test]
fn free_waves_solve_the_radial_equation() {
    let g = RadialProfile::from_fn(grid(16.0, 1.0 / 128.0), |s| (-(s - 0.5) * (s - 0.5)).exp());
    let e = 1e-3;
    for (r, t) in [(1.0, 0.3), (2.5, -1.0), (4.0, 2.0)] {
        let u = |r: f64, t: f64| evolve_free(&g, r, t).unwrap();
        let utt = (u(r, t + e) - 2.0 * u(r, t) + u(r, t - e)) / (e * e);
        let urr = (u(r + e, t) - 2.0 * u(r, t) + u(r - e, t)) / (e * e);
        let (_, _, ur) = evolve_free_with_derivatives(&g, r, t).unwrap();
        let scale = u(r, t).abs().max(1e-3);
        let residual = (utt - urr - 4.0 / r * ur).abs() / scale;
        assert!(residual < 1e-2, "r={r} t={t}: {residual}");
    }
}
