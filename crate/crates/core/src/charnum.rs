//! Characteristic numbers `(alpha, beta)` and their estimators.
//!
//! For a profile, `alpha = -∫ G` and `beta = ∫ s G` relative to a reference
//! with the same `alpha`. From data, `alpha` is the coefficient of `r^{-3}`
//! in `u1` and `beta` that of `r^{-3}` in `u0 - u0_ref`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::freewave::{derivative, RadialData};
use crate::profile::{RadialProfile, SIGMA4};

/// Characteristic numbers with provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharNumbers {
    pub alpha: f64,
    pub beta: f64,
    pub method: String,
    /// Radial window of a fit, when one was used.
    pub window: Option<(f64, f64)>,
    /// Residual of the fit, or the stabilization spread of a truncated moment.
    pub residual: f64,
}

/// `alpha = -∫ G`.
pub fn alpha_of(g: &RadialProfile) -> f64 {
    -g.total_moment0()
}

/// Default mismatch allowed between the `alpha` of a profile and its reference.
pub const ALPHA_MATCH_TOL: f64 = 1e-3;

/// `beta = ∫ s (G - G_ref)` over the common extent of the two grids.
///
/// Both profiles must carry the same `alpha` up to `tol` (absolute, scaled by
/// `max(1, |alpha|)`).
pub fn beta_relative(g: &RadialProfile, g_ref: &RadialProfile, tol: f64) -> Result<f64> {
    let (a, b) = (g.grid(), g_ref.grid());
    if !a.aligned_with(b) {
        return domain("profiles are not on aligned grids");
    }
    let (alpha, alpha_ref) = (alpha_of(g), alpha_of(g_ref));
    if (alpha - alpha_ref).abs() > tol * alpha.abs().max(alpha_ref.abs()).max(1.0) {
        return domain(format!("alpha mismatch: {alpha:.6e} vs reference {alpha_ref:.6e}"));
    }
    let lo = a.s_min.max(b.s_min);
    let hi = a.s_max.min(b.s_max);
    Ok(g.moment1(lo, hi)? - g_ref.moment1(lo, hi)?)
}

/// Principal value `lim_{r→∞} ∫_{-r}^{r} s G(s) ds` for an `alpha = 0` profile.
///
/// Evaluates the truncated moment at radii doubling from `r0` and accepts once
/// the last three values agree to `tol`.
pub fn beta_pv(g: &RadialProfile, r0: f64, tol: f64) -> Result<CharNumbers> {
    if !(r0 > 0.0) {
        return domain("beta_pv needs a positive starting radius");
    }
    let l = g.grid().s_max.min(-g.grid().s_min);
    let mut values = Vec::new();
    let mut r = r0;
    while r <= l + 1e-12 {
        values.push(g.moment1(-r, r)?);
        r *= 2.0;
    }
    if values.len() < 3 {
        return domain(format!("grid half-width {l} too small for three truncation radii from {r0}"));
    }
    let last = &values[values.len() - 3..];
    let spread = last.iter().fold(0.0f64, |m, v| m.max((v - last[2]).abs()));
    if spread > tol * last[2].abs().max(1.0) {
        return Err(Error::Convergence(format!(
            "truncated first moments {last:?} have not stabilized to {tol:.1e}"
        )));
    }
    Ok(CharNumbers {
        alpha: alpha_of(g),
        beta: last[2],
        method: "principal-value".into(),
        window: Some((r0, r / 2.0)),
        residual: spread,
    })
}

fn window_indices(d: &RadialData, window: (f64, f64)) -> Result<(usize, usize)> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return domain(format!("bad fit window ({lo}, {hi})"));
    }
    let h = d.r_grid.step;
    let i0 = ((lo / h).ceil() as usize).max(1) - 1;
    let i1 = ((hi / h).floor() as usize).min(d.r_grid.n) - 1;
    if i1 < i0 + 2 {
        return domain(format!("fit window ({lo}, {hi}) holds fewer than three nodes"));
    }
    Ok((i0, i1))
}

fn trapezoid(h: f64, f: impl Fn(usize) -> f64, i0: usize, i1: usize) -> f64 {
    (i0..i1).map(|i| 0.5 * h * (f(i) + f(i + 1))).sum()
}

/// Least-squares fit `u1 ≈ alpha r^{-3}` in the energy norm on `window`.
///
/// The residual is `(σ₄ ∫ (u1 - alpha r^{-3})² r⁴ dr)^{1/2}` over the window.
pub fn alpha_fit(d: &RadialData, window: (f64, f64)) -> Result<CharNumbers> {
    let (i0, i1) = window_indices(d, window)?;
    let h = d.r_grid.step;
    let r = |i: usize| d.r_grid.r(i);
    let num = trapezoid(h, |i| d.u1[i] * r(i), i0, i1);
    let den = trapezoid(h, |i| r(i).powi(-2), i0, i1);
    let alpha = num / den;
    let res = trapezoid(h, |i| (d.u1[i] - alpha * r(i).powi(-3)).powi(2) * r(i).powi(4), i0, i1);
    Ok(CharNumbers {
        alpha,
        beta: f64::NAN,
        method: "alpha-fit".into(),
        window: Some((r(i0), r(i1))),
        residual: (SIGMA4 * res).sqrt(),
    })
}

/// Least-squares fit `u0 - u0_ref ≈ beta r^{-3}` in the Ḣ¹ norm on `window`.
pub fn beta_fit(d: &RadialData, d_ref: &RadialData, window: (f64, f64)) -> Result<CharNumbers> {
    if d.r_grid != d_ref.r_grid {
        return domain("data and reference live on different radial grids");
    }
    let (i0, i1) = window_indices(d, window)?;
    let h = d.r_grid.step;
    let r = |i: usize| d.r_grid.r(i);
    let w: Vec<f64> = d.u0.iter().zip(&d_ref.u0).map(|(a, b)| a - b).collect();
    let dw = derivative(&w, h);
    // Basis derivative: (r^{-3})' = -3 r^{-4}, weight r⁴.
    let num = trapezoid(h, |i| dw[i] * -3.0, i0, i1);
    let den = trapezoid(h, |i| 9.0 * r(i).powi(-4), i0, i1);
    let beta = num / den;
    let res = trapezoid(h, |i| (dw[i] + 3.0 * beta * r(i).powi(-4)).powi(2) * r(i).powi(4), i0, i1);
    let alpha = alpha_fit(d, window)?.alpha;
    Ok(CharNumbers {
        alpha,
        beta,
        method: "beta-fit".into(),
        window: Some((r(i0), r(i1))),
        residual: (SIGMA4 * res).sqrt(),
    })
}

/// Least-squares slope of `log value` against `log r`.
///
/// Needs at least five samples spanning a decade in `r`, all positive.
pub fn decay_rate_fit(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 5 {
        return domain(format!("decay fit needs at least five samples, got {}", samples.len()));
    }
    if samples.iter().any(|&(r, v)| !(r > 0.0) || !(v > 0.0)) {
        return domain("decay fit needs positive radii and values");
    }
    let (rmin, rmax) = samples.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &(r, _)| (a.min(r), b.max(r)));
    if rmax < 10.0 * rmin * (1.0 - 1e-9) {
        return domain(format!("decay fit samples span [{rmin}, {rmax}], less than a decade"));
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(r, v) in samples {
        let (x, y) = (r.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Geometrically spaced samples of `l2_tail(g, r)` on `[lo, hi]`.
pub fn tail_samples(g: &RadialProfile, lo: f64, hi: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    if count < 2 || !(lo > 0.0 && hi > lo) {
        return domain("bad tail sampling window");
    }
    (0..count)
        .map(|i| {
            let r = lo * (hi / lo).powf(i as f64 / (count - 1) as f64);
            g.l2_tail(r).map(|t| (r, t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewave::RadialGrid;
    use crate::profile::GridSpec;

    #[test]
    fn alpha_and_beta_of_boxes() {
        let grid = GridSpec::default();
        let g = RadialProfile::indicator(grid, -1.0, 1.0).unwrap().scale(-0.5);
        assert!((alpha_of(&g) - 1.0).abs() < 1e-14);
        let shifted = g.translate(0.5).unwrap();
        let b = beta_relative(&shifted, &g, ALPHA_MATCH_TOL).unwrap();
        // G(s + 1/2) moves mass -1 to the left by 1/2: beta = (-1)(-1/2).
        assert!((b - 0.5).abs() < 1e-12, "{b}");
        let other = g.scale(2.0);
        assert!(beta_relative(&other, &g, ALPHA_MATCH_TOL).is_err());
    }

    #[test]
    fn alpha_fit_exact_and_perturbed() {
        let rg = RadialGrid::up_to(64.0, 1.0 / 64.0).unwrap();
        let d = RadialData::from_fn(rg, |_| 0.0, |r| 2.0 * r.powi(-3));
        let c = alpha_fit(&d, (4.0, 40.0)).unwrap();
        assert!((c.alpha - 2.0).abs() < 1e-12 && c.residual < 1e-10);
        let mut prev = f64::INFINITY;
        for lo in [1.0, 2.0, 4.0] {
            let d = RadialData::from_fn(rg, |_| 0.0, |r| 2.0 * r.powi(-3) + if r > lo { r.powi(-4) } else { 0.0 });
            let err = (alpha_fit(&d, (lo, 10.0 * lo)).unwrap().alpha - 2.0).abs();
            // Oracle: (lo^{-2} - hi^{-2}) / (2 (lo^{-1} - hi^{-1})) = 11 / (20 lo).
            // The jump at r = lo costs O(h / lo) relative.
            assert!((err - 11.0 / (20.0 * lo)).abs() < 2e-2 * err, "{err}");
            assert!(err < prev);
            prev = err;
        }
        assert!(alpha_fit(&d, (5.0, 2.0)).is_err());
    }

    #[test]
    fn beta_fit_recovers_coefficient() {
        let rg = RadialGrid::up_to(64.0, 1.0 / 64.0).unwrap();
        let d = RadialData::from_fn(rg, |r| 0.3 * r.powi(-3), |r| 0.1 * r.powi(-3));
        let z = RadialData::from_fn(rg, |_| 0.0, |_| 0.0);
        let c = beta_fit(&d, &z, (4.0, 40.0)).unwrap();
        assert!((c.beta - 0.3).abs() < 1e-5, "{}", c.beta);
        assert!((c.alpha - 0.1).abs() < 1e-12);
    }

    #[test]
    fn principal_value_moment() {
        let grid = GridSpec::default();
        // Odd tails ±|s|^{-3} beyond 1 plus an odd bump: truncated moments converge.
        let g = RadialProfile::from_fn(grid, |s| {
            let bump = s * (-s * s).exp();
            if s.abs() > 1.0 {
                bump + s.signum() * s.abs().powi(-3)
            } else {
                bump
            }
        });
        let c = beta_pv(&g, 2.0, 1e-1).unwrap();
        // ∫ s² e^{-s²} = √π/2, ∫_{|s|>1} |s|^{-2} = 2 over the full line.
        let exact = std::f64::consts::PI.sqrt() / 2.0 + 2.0;
        assert!((c.beta - exact).abs() < 0.1, "{}", c.beta);
        assert!(beta_pv(&g, 2.0, 1e-9).is_err());
    }

    #[test]
    fn decay_fits() {
        let s: Vec<(f64, f64)> = (0..8).map(|i| 2f64.powi(i)).map(|r| (r, 3.0 * r.powf(-7.0 / 6.0))).collect();
        assert!((decay_rate_fit(&s).unwrap() + 7.0 / 6.0).abs() < 1e-12);
        assert!(decay_rate_fit(&s[..4]).is_err());
        assert!(decay_rate_fit(&[(1.0, 1.0), (1.5, 1.0), (2.0, 1.0), (2.5, 1.0), (3.0, 1.0)]).is_err());
        let mut bad = s.clone();
        bad[2].1 = 0.0;
        assert!(decay_rate_fit(&bad).is_err());
    }
}
