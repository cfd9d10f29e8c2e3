//! Dynamical consequences checked numerically: the translation law for
//! characteristic numbers, uniqueness, overlap of translated solutions, the
//! time-symmetric case, the span of `r^{-3}` and `t r^{-3}`, the ground
//! state `W`, an exterior Hardy bound and the `β r^{-3}` term that keeps
//! solutions with `α ≠ 0` from being stationary.

use serde::{Deserialize, Serialize};

use crate::charnum::{alpha_of, beta_relative, ALPHA_MATCH_TOL};
use crate::error::{domain, Result};
use crate::extsolve::{exterior_energy, solve_exterior, ExteriorSolution, Nonlinearity, SolverConfig};
use crate::fixpoint::{iterate_second, iterate_to_fixed_point, FixedPoint, FixpointConfig, Order};
use crate::freewave::{energy_norm, profile_from_data, RadialData, RadialGrid};
use crate::profile::{RadialProfile, SIGMA4};

/// Characteristic numbers before and after translating a solution in time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub t0: f64,
    pub alpha_before: f64,
    pub beta_before: f64,
    pub alpha_after: f64,
    pub beta_after: f64,
    /// `beta_before + alpha_before * t0`.
    pub beta_predicted: f64,
}

/// Measures `(alpha', beta')` of `v(t) = u(t + t0)` from the data of `u` at `t0`.
///
/// `beta` is measured relative to `reference` (the first-order `G_α`).
pub fn translate_and_measure(sol: &ExteriorSolution, t0: f64, reference: &RadialProfile) -> Result<TranslationReport> {
    if !sol.autonomous {
        return domain("translation law needs a time-independent nonlinearity");
    }
    if t0.abs() > sol.horizon + 1e-12 {
        return domain(format!("t0 = {t0} lies outside the solve window [-{0}, {0}]", sol.horizon));
    }
    let Some(g) = &sol.initial_profile else {
        return domain("solution carries no initial profile");
    };
    let snap = sol.snapshot(t0)?;
    let alpha_before = alpha_of(g);
    let beta_before = beta_relative(g, reference, ALPHA_MATCH_TOL)?;
    let rg = RadialGrid::new(sol.step, snap.u.len())?;
    let d = RadialData::new(rg, snap.u.clone(), snap.ut.clone())?;
    let g_after = profile_from_data(&d)?;
    let alpha_after = alpha_of(&g_after);
    let beta_after = beta_relative(&g_after, reference, ALPHA_MATCH_TOL)?;
    Ok(TranslationReport {
        t0,
        alpha_before,
        beta_before,
        alpha_after,
        beta_after,
        beta_predicted: beta_before + alpha_before * t0,
    })
}

/// Pointwise comparison of two solutions on a common exterior region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub sup_diff: f64,
    pub points: usize,
    /// `(t, r, |difference|)` on the compared points.
    pub rows: Vec<(f64, f64, f64)>,
}

/// Difference of `u1(r, t - t1)` and `u2(r, t - t2)` on the overlap of both cones.
///
/// Only time levels stored by both solutions and radii `>= margin` inside
/// both cones are compared.
pub fn overlap_difference(
    sol1: &ExteriorSolution,
    t1: f64,
    sol2: &ExteriorSolution,
    t2: f64,
    margin: f64,
) -> Result<ComparisonReport> {
    if (sol1.step - sol2.step).abs() > 1e-12 * sol1.step {
        return domain("solutions use different radial steps");
    }
    let n = sol1.n_r().min(sol2.n_r());
    let mut rows = Vec::new();
    let mut sup: f64 = 0.0;
    for s1 in &sol1.snapshots {
        let t = s1.t + t1;
        let Ok(s2) = sol2.snapshot(t - t2) else { continue };
        let bound = (sol1.cone_radius + s1.t.abs()).max(sol2.cone_radius + s2.t.abs()) + margin;
        for k in 0..n {
            let r = sol1.r(k);
            if r <= bound + 1e-12 {
                continue;
            }
            let diff = (s1.u[k] - s2.u[k]).abs();
            sup = sup.max(diff);
            rows.push((t, r, diff));
        }
    }
    if rows.is_empty() {
        return domain("the two solutions share no exterior points");
    }
    Ok(ComparisonReport { sup_diff: sup, points: rows.len(), rows })
}

/// Uniqueness: two non-radiative solutions with the same characteristic
/// numbers agree on the common exterior region.
///
/// `(alpha, beta)` are compared through `-∫ (G1 - G2)` and `∫ s (G1 - G2)`.
pub fn uniqueness_check(sol1: &ExteriorSolution, sol2: &ExteriorSolution, tol: f64, margin: f64) -> Result<ComparisonReport> {
    let (Some(g1), Some(g2)) = (&sol1.initial_profile, &sol2.initial_profile) else {
        return domain("uniqueness check needs solutions built from profiles");
    };
    let diff = g1.sub(g2)?;
    let (da, db) = (diff.total_moment0().abs(), diff.total_moment1().abs());
    if da > tol || db > tol {
        return domain(format!("characteristic numbers differ: |Δα| = {da:.3e}, |Δβ| = {db:.3e}"));
    }
    overlap_difference(sol1, 0.0, sol2, 0.0, margin)
}

/// Overlap report for the universal-profile identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalReport {
    pub alpha: f64,
    pub t1: f64,
    pub t2: f64,
    /// Radii actually used, rounded up to a node. They bound the optimal
    /// radii from above.
    pub radius1: f64,
    pub radius2: f64,
    /// `|radius1 - radius2| <= |t1 - t2|`.
    pub lipschitz: bool,
    pub comparison: ComparisonReport,
}

/// Builds `u_{α, α t_i}` for `i = 1, 2` and compares `u_{α,αt1}(r, t - t1)`
/// with `u_{α,αt2}(r, t - t2)` on the overlap.
///
/// `reference` is the first-order construction for `alpha` built with `cfg`.
pub fn universal_profile_consistency(
    cfg: &FixpointConfig,
    f: &Nonlinearity,
    reference: &FixedPoint,
    t1: f64,
    t2: f64,
    margin: f64,
) -> Result<UniversalReport> {
    let alpha = cfg.alpha;
    let build = |t: f64| iterate_second(&FixpointConfig { beta: alpha * t, ..cfg.clone() }, f, reference);
    let (a, b) = (build(t1)?, build(t2)?);
    let comparison = overlap_difference(&a.solution, t1, &b.solution, t2, margin)?;
    let lipschitz = (a.radius - b.radius).abs() <= (t1 - t2).abs() + 1e-12;
    Ok(UniversalReport { alpha, t1, t2, radius1: a.radius, radius2: b.radius, lipschitz, comparison })
}

/// Defects of the time-symmetric solution `u_{α,0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `sup |G(s) - G(-s)|` over the data profile.
    pub profile_even_defect: f64,
    /// `sup |u(r, t) + u(r, -t)|` over the exterior region.
    pub odd_in_time_defect: f64,
    /// `sup |u|`, for scale.
    pub u_max: f64,
}

/// Checks that an AS-symmetric construction has an even profile and a
/// solution odd in time.
pub fn as_symmetry_check(fp: &FixedPoint, f: &Nonlinearity) -> Result<SymmetryReport> {
    if !f.as_symmetric {
        return domain("nonlinearity is not AS-symmetric");
    }
    let g = &fp.profile;
    let refl = g.reflect()?;
    let profile_even_defect = g.sub(&refl)?.max_abs();
    let sol = &fp.solution;
    let (mut odd, mut umax) = (0.0f64, 0.0f64);
    for s in &sol.snapshots {
        let Ok(m) = sol.snapshot(-s.t) else { continue };
        for k in sol.first_exterior_index(s.t)..s.u.len() {
            odd = odd.max((s.u[k] + m.u[k]).abs());
            umax = umax.max(s.u[k].abs());
        }
    }
    Ok(SymmetryReport { profile_even_defect, odd_in_time_defect: odd, u_max: umax })
}

/// Ground state `W_λ(r) = (1/λ + λ r²/15)^{-3/2}`.
pub fn ground_state(lambda: f64, r: f64) -> f64 {
    (1.0 / lambda + lambda * r * r / 15.0).powf(-1.5)
}

/// `(W, W', W'')` in closed form.
pub fn ground_state_derivatives(lambda: f64, r: f64) -> (f64, f64, f64) {
    let a = 1.0 / lambda + lambda * r * r / 15.0;
    let w = a.powf(-1.5);
    let w1 = -lambda * r / 5.0 * a.powf(-2.5);
    let w2 = -lambda / 5.0 * a.powf(-2.5) + lambda * lambda * r * r / 15.0 * a.powf(-3.5);
    (w, w1, w2)
}

/// How derivatives of `W` are evaluated in the residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Derivatives {
    Analytic,
    /// Centered differences with this step.
    FiniteDifference(f64),
}

/// `sup_{0 < r <= r_max} |W'' + (4/r) W' + sign |W|^{4/3} W|` on a grid of step `r_max / 4096`.
///
/// `sign = 1` is the focusing equation, for which `W` is a solution.
pub fn ground_state_residual_with(lambda: f64, r_max: f64, sign: f64, derivs: Derivatives) -> Result<f64> {
    if !(lambda > 0.0) || !(r_max > 0.0) {
        return domain("ground state needs lambda > 0 and r_max > 0");
    }
    let n = 4096;
    let mut sup: f64 = 0.0;
    for k in 1..=n {
        let r = r_max * k as f64 / n as f64;
        let (w, w1, w2) = match derivs {
            Derivatives::Analytic => ground_state_derivatives(lambda, r),
            Derivatives::FiniteDifference(h) => {
                let (wm, w0, wp) = (ground_state(lambda, r - h), ground_state(lambda, r), ground_state(lambda, r + h));
                (w0, (wp - wm) / (2.0 * h), (wp - 2.0 * w0 + wm) / (h * h))
            }
        };
        let res = w2 + 4.0 / r * w1 + sign * w.abs().powf(4.0 / 3.0) * w;
        sup = sup.max(res.abs());
    }
    Ok(sup)
}

/// Residual of the focusing ground-state equation with exact derivatives.
pub fn ground_state_residual(lambda: f64, r_max: f64) -> Result<f64> {
    ground_state_residual_with(lambda, r_max, 1.0, Derivatives::Analytic)
}

/// Solves the focusing exterior problem from `(W_λ, 0)` and returns
/// `sup |u - W_λ|` over the exterior region.
pub fn ground_state_drift(lambda: f64, cfg: &SolverConfig, r_max: f64, step: f64) -> Result<f64> {
    let rg = RadialGrid::up_to(r_max, step)?;
    let d = RadialData::from_fn(rg, |r| ground_state(lambda, r), |_| 0.0);
    let sol = solve_exterior(&d, &Nonlinearity::focusing(), cfg)?;
    let mut sup: f64 = 0.0;
    for s in &sol.snapshots {
        for k in sol.first_exterior_index(s.t)..s.u.len() {
            sup = sup.max((s.u[k] - ground_state(lambda, sol.r(k))).abs());
        }
    }
    Ok(sup)
}

/// Check of the free solutions `(a t + b) r^{-3}` on `Ω_R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    /// `sup |u_tt - u_rr - (4/r) u_r|` over the sampled points.
    pub max_wave_residual: f64,
    /// `(t, computed exterior energy, closed form)`.
    pub energies: Vec<(f64, f64, f64)>,
    pub max_rel_energy_error: f64,
}

/// Evaluates the wave residual and exterior energy of `(a t + b) r^{-3}`.
///
/// The closed form is `σ₄ (3 (a t + b)² ρ^{-3} + a² ρ^{-1})` with `ρ = R + |t|`.
pub fn span_nonradiative_check(a: f64, b: f64, radius: f64, times: &[f64], step: f64, r_max: f64) -> Result<SpanReport> {
    if times.is_empty() {
        return domain("span check needs at least one time");
    }
    let n = (r_max / step).round() as usize;
    let sol = ExteriorSolution::from_fields(radius, step, n, times, |r, t| {
        let m = a * t + b;
        (m * r.powi(-3), a * r.powi(-3), -3.0 * m * r.powi(-4))
    });
    let mut residual: f64 = 0.0;
    for &t in times {
        let m = a * t + b;
        for k in sol.first_exterior_index(t)..n {
            let r = sol.r(k);
            let (u_tt, u_r, u_rr) = (0.0, -3.0 * m * r.powi(-4), 12.0 * m * r.powi(-5));
            residual = residual.max((u_tt - u_rr - 4.0 / r * u_r).abs());
        }
    }
    let mut energies = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in times {
        let rho = radius + t.abs();
        let m = a * t + b;
        let exact = SIGMA4 * (3.0 * m * m * rho.powi(-3) + a * a / rho);
        let got = exterior_energy(&sol, t)?;
        if exact > 0.0 {
            worst = worst.max((got - exact).abs() / exact);
        }
        energies.push((t, got, exact));
    }
    Ok(SpanReport { max_wave_residual: residual, energies, max_rel_energy_error: worst })
}

/// `‖f‖_{L²(r<|x|<2r)} / (r ‖f‖_{Ḣ¹(|x|>r)})` for a radial field sampled on `rg`.
///
/// Hardy's inequality on `|x| > r` bounds this by `4/3` in five dimensions.
pub fn hardy_ratio(rg: RadialGrid, f: &[f64], r: f64) -> Result<f64> {
    if !(r > 0.0) || 2.0 * r > rg.r_max() {
        return domain(format!("annulus [{r}, {}] leaves the grid", 2.0 * r));
    }
    let zero = vec![0.0; rg.n];
    let as_velocity = RadialData::new(rg, zero.clone(), f.to_vec())?;
    let inner = energy_norm(&as_velocity, r)?.powi(2) - energy_norm(&as_velocity, 2.0 * r)?.powi(2);
    let gradient = energy_norm(&RadialData::new(rg, f.to_vec(), zero)?, r)?;
    if gradient == 0.0 {
        return domain("field is constant outside r");
    }
    Ok(inner.max(0.0).sqrt() / (r * gradient))
}

/// One row of [`separation_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub rho: f64,
    /// `ρ c^{1/2} |β|^{2/3}`.
    pub r: f64,
    /// `‖β r^{-3}‖_{Ḣ¹(|x|>r)}` in closed form.
    pub leading: f64,
    /// Exterior energy norm of the data minus `u_{α,0}` data minus `(β r^{-3}, 0)`.
    pub remainder: f64,
    /// `c |β|^{7/3} r^{-7/2}`.
    pub bound: f64,
}

/// Splits the data of `u_{α,β}` at `t = 0` as `u_{α,0} + (β r^{-3}, 0) + remainder`
/// on `|x| > ρ c^{1/2} |β|^{2/3}` for each `ρ`.
///
/// The leading term scales like `ρ^{-3/2}` and the remainder like `ρ^{-7/2}`,
/// so a large `ρ` separates them.
pub fn separation_check(fp: &FixedPoint, reference: &FixedPoint, rhos: &[f64]) -> Result<Vec<SeparationRow>> {
    let (beta, c) = (fp.config.beta, fp.config.c);
    if beta == 0.0 {
        return domain("separation check needs beta != 0");
    }
    let (d, d0) = (fp.initial_data()?, reference.initial_data()?);
    if d.r_grid != d0.r_grid {
        return domain("solution and reference data live on different grids");
    }
    let rg = d.r_grid;
    let u0: Vec<f64> = (0..rg.n).map(|k| d.u0[k] - d0.u0[k] - beta * rg.r(k).powi(-3)).collect();
    let u1: Vec<f64> = (0..rg.n).map(|k| d.u1[k] - d0.u1[k]).collect();
    let rest = RadialData::new(rg, u0, u1)?;
    rhos.iter()
        .map(|&rho| {
            let r = rho * c.sqrt() * beta.abs().powf(2.0 / 3.0);
            if r >= rg.r_max() {
                return domain(format!("radius {r} is past the grid"));
            }
            Ok(SeparationRow {
                rho,
                r,
                leading: beta.abs() * (3.0 * SIGMA4).sqrt() * r.powf(-1.5),
                remainder: energy_norm(&rest, r)?,
                bound: c * beta.abs().powf(7.0 / 3.0) * r.powf(-3.5),
            })
        })
        .collect()
}

/// Runs a first-order construction for each `alpha` and returns them.
pub fn first_order_family(cfg: &FixpointConfig, f: &Nonlinearity, alphas: &[f64]) -> Result<Vec<FixedPoint>> {
    alphas
        .iter()
        .map(|&a| iterate_to_fixed_point(&FixpointConfig { alpha: a, ..cfg.clone() }, f, Order::First))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_closed_forms() {
        assert!((ground_state(1.0, 0.0) - 1.0).abs() < 1e-15);
        let lam: f64 = 2.5;
        for r in [0.0, 0.7, 3.0] {
            let scaled = lam.powf(1.5) * ground_state(1.0, lam * r);
            assert!((ground_state(lam, r) - scaled).abs() < 1e-14);
        }
        assert!(ground_state_residual(1.0, 10.0).unwrap() < 1e-10);
        let fd = ground_state_residual_with(1.0, 10.0, 1.0, Derivatives::FiniteDifference(1e-3)).unwrap();
        assert!(fd < 1e-5, "{fd}");
        let flipped = ground_state_residual_with(1.0, 10.0, -1.0, Derivatives::Analytic).unwrap();
        assert!((flipped - 2.0).abs() < 1e-2, "{flipped}");
    }

    #[test]
    fn hardy_ratio_of_inverse_cube() {
        let rg = RadialGrid::up_to(64.0, 1.0 / 128.0).unwrap();
        let f: Vec<f64> = rg.radii().iter().map(|r| r.powi(-3)).collect();
        // σ₄/(2r) over 3σ₄ r^{-1}: the ratio is 6^{-1/2} at every radius.
        for r in [1.0, 2.0, 5.0] {
            let q = hardy_ratio(rg, &f, r).unwrap();
            assert!((q - 6f64.sqrt().recip()).abs() < 1e-3, "r={r}: {q}");
        }
        assert!(hardy_ratio(rg, &f, 40.0).is_err());
        assert!(hardy_ratio(rg, &vec![0.0; rg.n], 1.0).is_err());
    }

    #[test]
    fn span_energies() {
        let rep = span_nonradiative_check(1.0, 0.0, 0.0, &[4.0], 1.0 / 64.0, 64.0).unwrap();
        assert!(rep.max_rel_energy_error < 1e-4);
        assert!((rep.energies[0].2 - SIGMA4).abs() < 1e-12);
        let rep = span_nonradiative_check(0.0, 1.0, 0.0, &[2.0], 1.0 / 64.0, 64.0).unwrap();
        assert!((rep.energies[0].2 - 3.0 * SIGMA4 / 8.0).abs() < 1e-12);
        assert!(rep.max_wave_residual < 1e-12);
    }
}
