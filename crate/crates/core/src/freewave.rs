//! The dictionary between radiation profiles and radial free waves.
//!
//! For a profile `G` the free wave is
//!
//! ```text
//! u(r, t) = r^{-3} ∫_{t-r}^{t+r} (s - t) G(s) ds,
//! ```
//!
//! and its data at `t = 0` depend on the even and odd parts
//! `E(r) = G(r) + G(-r)`, `O(r) = G(r) - G(-r)`:
//! `u0 = r^{-3} ∫_0^r s O`, `u1 = E / r² - r^{-3} ∫_0^r E`.
//! The inverse map recovers the unique square-integrable profile.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::profile::{GridSpec, RadialProfile, SIGMA4};
use crate::quad;

/// Radial nodes `r_k = (k + 1) * step`, `k = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub step: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(step: f64, n: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return domain(format!("radial step must be positive, got {step}"));
        }
        if n < 3 {
            return domain("radial grid needs at least three nodes");
        }
        Ok(Self { step, n })
    }

    /// Grid `step, 2 step, ..., r_max`.
    pub fn up_to(r_max: f64, step: f64) -> Result<Self> {
        let n = r_max / step;
        if (n - n.round()).abs() > 1e-7 * n.max(1.0) {
            return domain(format!("r_max {r_max} is not a multiple of the step {step}"));
        }
        Self::new(step, n.round() as usize)
    }

    pub fn r(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.step
    }

    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.step
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.r(k)).collect()
    }

    /// Builds a grid from sampled radii, which must be uniform and start at one step.
    pub fn from_radii(radii: &[f64]) -> Result<Self> {
        if radii.len() < 3 {
            return domain("radial data needs at least three nodes");
        }
        let h = radii[1] - radii[0];
        for (k, &r) in radii.iter().enumerate() {
            if (r - (k + 1) as f64 * h).abs() > 1e-9 * (1.0 + r) {
                return domain(format!("radial grid is not uniform with r_k = (k+1) h (node {k}: r = {r})"));
            }
        }
        Self::new(h, radii.len())
    }
}

/// Radial initial data `(u0, u1)` sampled on a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialData {
    pub r_grid: RadialGrid,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
}

impl RadialData {
    pub fn new(r_grid: RadialGrid, u0: Vec<f64>, u1: Vec<f64>) -> Result<Self> {
        if u0.len() != r_grid.n || u1.len() != r_grid.n {
            return domain("data length does not match the radial grid");
        }
        if u0.iter().chain(&u1).any(|v| !v.is_finite()) {
            return domain("radial data contains non-finite values");
        }
        Ok(Self { r_grid, u0, u1 })
    }

    pub fn from_fn(r_grid: RadialGrid, f0: impl Fn(f64) -> f64, f1: impl Fn(f64) -> f64) -> Self {
        let r = r_grid.radii();
        Self {
            r_grid,
            u0: r.iter().map(|&x| f0(x)).collect(),
            u1: r.iter().map(|&x| f1(x)).collect(),
        }
    }

    /// `du0/dr` by second-order finite differences.
    pub fn u0_prime(&self) -> Vec<f64> {
        derivative(&self.u0, self.r_grid.step)
    }
}

/// Second-order finite-difference derivative with one-sided ends.
pub(crate) fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for k in 1..n - 1 {
        d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Free wave `u(r, t)` generated by `G`; `G` is zero off its grid.
pub fn evolve_free(g: &RadialProfile, r: f64, t: f64) -> Result<f64> {
    if !(r > 0.0) || !t.is_finite() {
        return domain(format!("free wave needs r > 0 and finite t, got r = {r}, t = {t}"));
    }
    Ok(g.integrate_clipped(t - r, t + r, |s, v| (s - t) * v) / r.powi(3))
}

/// Free wave with its derivatives: `(u, u_t, u_r)` at `(r, t)`.
pub fn evolve_free_with_derivatives(g: &RadialProfile, r: f64, t: f64) -> Result<(f64, f64, f64)> {
    let u = evolve_free(g, r, t)?;
    let mass = g.integrate_clipped(t - r, t + r, |_, v| v);
    let (gp, gm) = (g.sample(t + r), g.sample(t - r));
    let r2 = r * r;
    Ok((u, (gp + gm) / r2 - mass / (r2 * r), -3.0 * u / r + (gp - gm) / r2))
}

/// Prefix integrals of a profile for fast free-wave evaluation at grid nodes.
pub struct ProfileIntegrals {
    c0: Vec<f64>,
    c1: Vec<f64>,
    vals: Vec<f64>,
    s_min: f64,
    step: f64,
}

impl ProfileIntegrals {
    pub fn new(g: &RadialProfile) -> Self {
        let grid = g.grid();
        Self::from_limits(grid.s_min, grid.step, g.left_limits(), g.right_limits())
    }

    pub(crate) fn from_limits(s_min: f64, step: f64, left: &[f64], right: &[f64]) -> Self {
        let n = left.len();
        let mut c0 = vec![0.0; n];
        let mut c1 = vec![0.0; n];
        for i in 1..n {
            let (a, b) = (right[i - 1], left[i]);
            let (sa, sb) = (s_min + (i - 1) as f64 * step, s_min + i as f64 * step);
            c0[i] = c0[i - 1] + 0.5 * step * (a + b);
            c1[i] = c1[i - 1] + 0.5 * step * (sa * a + sb * b);
        }
        let vals = left.iter().zip(right).map(|(l, r)| 0.5 * (l + r)).collect();
        Self { c0, c1, vals, s_min, step }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Index of the node at time `t`, which must be a grid node.
    pub fn node_of(&self, t: f64) -> Result<isize> {
        let x = (t - self.s_min) / self.step;
        if (x - x.round()).abs() > 1e-7 {
            return domain(format!("time {t} is not on the profile grid"));
        }
        Ok(x.round() as isize)
    }

    /// `(u, u_t, u_r)` at radius `k * step` and the time with node index `j`.
    pub fn field(&self, j: isize, k: usize) -> (f64, f64, f64) {
        let n = self.vals.len() as isize;
        let (a, b) = (j - k as isize, j + k as isize);
        let clip = |i: isize| i.clamp(0, n - 1) as usize;
        let val = |i: isize| if i < 0 || i >= n { 0.0 } else { self.vals[i as usize] };
        let (ia, ib) = (clip(a), clip(b));
        let m0 = self.c0[ib] - self.c0[ia];
        let m1 = self.c1[ib] - self.c1[ia];
        let t = self.s_min + j as f64 * self.step;
        let r = k as f64 * self.step;
        let r2 = r * r;
        let r3 = r2 * r;
        let u = (m1 - t * m0) / r3;
        let (gp, gm) = (val(b), val(a));
        (u, (gp + gm) / r2 - m0 / r3, -3.0 * u / r + (gp - gm) / r2)
    }

    /// `u` only, at radius `k * step` and time node `j`.
    pub fn value(&self, j: isize, k: usize) -> f64 {
        let n = self.vals.len() as isize;
        let clip = |i: isize| i.clamp(0, n - 1) as usize;
        let (ia, ib) = (clip(j - k as isize), clip(j + k as isize));
        let t = self.s_min + j as f64 * self.step;
        let r = k as f64 * self.step;
        ((self.c1[ib] - self.c1[ia]) - t * (self.c0[ib] - self.c0[ia])) / (r * r * r)
    }
}

/// Cumulative `∫_0^{r_k} f` on half-line nodes `r_k = k h` with the
/// Euler-Maclaurin end correction `-(h²/12)(f'(r_k) - f'(0))`.
///
/// `left`/`right` are one-sided limits at `k = 0..=n`, `d0 = f'(0)`. The
/// first stencil uses the even extension of `f` through the origin.
fn corrected_cumulative(left: &[f64], right: &[f64], h: f64, d0: f64) -> Vec<f64> {
    let n = left.len();
    let mut out = vec![0.0; n];
    let mut trap = 0.0;
    // Cancelling jumps leave roundoff behind; those must not switch stencils.
    let scale = left.iter().chain(right).fold(0.0f64, |m, v| m.max(v.abs()));
    let smooth = |k: usize| (left[k] - right[k]).abs() <= 1e-12 * scale;
    let val = |k: usize| 0.5 * (left[k] + right[k]);
    for k in 1..n {
        trap += 0.5 * h * (right[k - 1] + left[k]);
        let d = if k == 1 {
            if smooth(0) {
                // Even extension: f(-h) = f(h).
                2.0 * (left[1] - val(0)) / h
            } else {
                (left[1] - right[0]) / h
            }
        } else if smooth(k - 1) && smooth(k - 2) {
            (3.0 * left[k] - 4.0 * val(k - 1) + val(k - 2)) / (2.0 * h)
        } else {
            (left[k] - right[k - 1]) / h
        };
        out[k] = trap - h * h / 12.0 * (d - d0);
    }
    out
}

/// Initial data `(u0, u1)` of the free wave generated by `G`.
///
/// The radial grid is `(0, L]` with the profile step, for a profile on `[-L, L]`.
pub fn data_from_profile(g: &RadialProfile) -> Result<RadialData> {
    let grid = g.grid();
    let c = grid.center()?;
    let h = grid.step;
    let (gl, gr) = (g.left_limits(), g.right_limits());
    let m = c + 1;
    let mut el = vec![0.0; m];
    let mut er = vec![0.0; m];
    let mut fl = vec![0.0; m];
    let mut fr = vec![0.0; m];
    for k in 0..m {
        let r = k as f64 * h;
        el[k] = gl[c + k] + gr[c - k];
        er[k] = gr[c + k] + gl[c - k];
        fl[k] = r * (gl[c + k] - gr[c - k]);
        fr[k] = r * (gr[c + k] - gl[c - k]);
    }
    er[0] = gr[c] + gl[c];
    el[0] = er[0];
    // f = s O(s) vanishes at 0 with slope O(0), the jump of G there.
    let slope0 = gr[c] - gl[c];
    let b = corrected_cumulative(&el, &er, h, 0.0);
    let a = corrected_cumulative(&fl, &fr, h, slope0);
    let rg = RadialGrid::new(h, c)?;
    let mut u0 = vec![0.0; c];
    let mut u1 = vec![0.0; c];
    for k in 1..m {
        let r = k as f64 * h;
        let r3 = r * r * r;
        let e = g.value(c + k) + g.value(c - k);
        u0[k - 1] = a[k] / r3;
        u1[k - 1] = e / (r * r) - b[k] / r3;
    }
    RadialData::new(rg, u0, u1)
}

/// Backward cumulative `∫_{r_k}^∞ s f(s) ds` at `k = 0..=n` (`r_0 = 0`),
/// with one-sided `f` and the `f ~ r^{-3}` tail closure `r_max² f(r_max)`.
fn moment_from_infinity(fl: &[f64], fr: &[f64], h: f64) -> Vec<f64> {
    let n = fl.len() - 1;
    let r_max = n as f64 * h;
    let mut out = vec![0.0; n + 1];
    out[n] = r_max * r_max * fl[n];
    for k in (0..n).rev() {
        let (r0, r1) = (k as f64 * h, (k + 1) as f64 * h);
        out[k] = out[k + 1] + 0.5 * h * (r0 * fr[k] + r1 * fl[k + 1]);
    }
    out
}

/// The square-integrable profile of the free wave with data `d`.
///
/// Output grid: `[-r_max, r_max]` with the data step.
pub fn profile_from_data(d: &RadialData) -> Result<RadialProfile> {
    let h = d.r_grid.step;
    let n = d.r_grid.n;
    let grid = GridSpec::symmetric(d.r_grid.r_max(), h)?;
    let du0 = d.u0_prime();
    let mut f = vec![0.0; n + 1];
    f[1..].copy_from_slice(&d.u1);
    let tail = moment_from_infinity(&f, &f, h);
    let c = n;
    let mut vals = vec![0.0; 2 * n + 1];
    vals[c] = -0.5 * tail[0];
    for k in 1..=n {
        let r = k as f64 * h;
        let e = r * r * d.u1[k - 1] - tail[k];
        let o = 3.0 * r * d.u0[k - 1] + r * r * du0[k - 1];
        vals[c + k] = 0.5 * (e + o);
        vals[c - k] = 0.5 * (e - o);
    }
    RadialProfile::from_samples(grid, vals)
}

/// One-sided limits of the even profile `½(r² f - ∫_r^∞ s f)` on `k = 0..=n`.
///
/// `f[k]` is the source at `r = k h` and vanishes on cells left of
/// `mask_start`, so a sharp cutoff integrates exactly.
pub(crate) fn half_source_profile(f: &[f64], mask_start: usize, h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len() - 1;
    let mut fl = f.to_vec();
    let fr = f.to_vec();
    if mask_start <= n && mask_start > 0 {
        fl[mask_start] = 0.0;
    }
    let tail = moment_from_infinity(&fl, &fr, h);
    let mut gl = vec![0.0; n + 1];
    let mut gr = vec![0.0; n + 1];
    for k in 0..=n {
        let r2 = (k as f64 * h).powi(2);
        gl[k] = 0.5 * (r2 * fl[k] - tail[k]);
        gr[k] = 0.5 * (r2 * fr[k] - tail[k]);
    }
    (gl, gr)
}

/// Profile `G_f` whose free wave has data `(0, f)`.
pub fn source_profile(f: &[f64], r_grid: RadialGrid) -> Result<RadialProfile> {
    if f.len() != r_grid.n {
        return domain("source length does not match the radial grid");
    }
    let n = r_grid.n;
    let h = r_grid.step;
    let mut full = vec![0.0; n + 1];
    full[1..].copy_from_slice(f);
    let (gl, gr) = half_source_profile(&full, 0, h);
    let grid = GridSpec::symmetric(r_grid.r_max(), h)?;
    let mut left = vec![0.0; 2 * n + 1];
    let mut right = vec![0.0; 2 * n + 1];
    for k in 0..=n {
        left[n + k] = gl[k];
        right[n + k] = gr[k];
        // Mirror of an even function swaps one-sided limits.
        left[n - k] = gr[k];
        right[n - k] = gl[k];
    }
    right[2 * n] = 0.0;
    left[0] = 0.0;
    RadialProfile::from_limits(grid, left, right)
}

/// Exterior energy norm `(σ₄ ∫_r^∞ (u0'² + u1²) ρ⁴ dρ)^{1/2}`.
///
/// The integrand is extended past the grid by a fitted power law.
pub fn energy_norm(d: &RadialData, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return domain(format!("energy radius must be nonnegative, got {r}"));
    }
    let du0 = d.u0_prime();
    let phi: Vec<f64> = (0..d.r_grid.n)
        .map(|k| (du0[k].powi(2) + d.u1[k].powi(2)) * d.r_grid.r(k).powi(4))
        .collect();
    Ok((SIGMA4 * quad::radial_integral(d.r_grid.step, &phi, r, true)).sqrt())
}

/// `|‖(u0, u1)‖² - 2 σ₄ ‖G‖²|`, relative to `2 σ₄ ‖G‖²`.
pub fn isometry_defect(g: &RadialProfile) -> Result<f64> {
    let d = data_from_profile(g)?;
    let lhs = energy_norm(&d, 0.0)?.powi(2);
    let rhs = 2.0 * SIGMA4 * g.l2_norm().powi(2);
    if rhs == 0.0 {
        return Ok(lhs);
    }
    Ok((lhs - rhs).abs() / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::default()
    }

    #[test]
    fn unit_box_data() {
        let g = RadialProfile::indicator(grid(), -1.0, 1.0).unwrap();
        let d = data_from_profile(&g).unwrap();
        let k = (2.0 / d.r_grid.step) as usize - 1;
        assert!((d.r_grid.r(k) - 2.0).abs() < 1e-12);
        assert!((d.u1[k] + 0.25).abs() < 1e-12, "{}", d.u1[k]);
        assert!(d.u0[k].abs() < 1e-12);
        let k = (0.5 / d.r_grid.step) as usize - 1;
        assert!(d.u1[k].abs() < 1e-12);
    }

    #[test]
    fn free_wave_of_unit_box() {
        let g = RadialProfile::indicator(grid(), -1.0, 1.0).unwrap();
        for &(r, t) in &[(3.0, 1.0), (2.5, -0.5), (5.0, 3.0)] {
            let u = evolve_free(&g, r, t).unwrap();
            // ∫_{-1}^{1} (s - t) ds = -2t when [-1, 1] ⊂ [t - r, t + r].
            assert!((u + 2.0 * t / (r * r * r)).abs() < 1e-14);
        }
        assert!(evolve_free(&g, 0.0, 1.0).is_err());
        let (_, ut, ur) = evolve_free_with_derivatives(&g, 3.0, 1.0).unwrap();
        assert!((ut + 2.0 / 27.0).abs() < 1e-14);
        assert!((ur - 3.0 * 2.0 / 81.0).abs() < 1e-14);
    }

    #[test]
    fn prefix_evaluation_matches_direct() {
        let g = RadialProfile::from_fn(grid(), |s| (-(s - 0.3) * (s - 0.3)).exp() * (1.0 + s));
        let pi = ProfileIntegrals::new(&g);
        let j = pi.node_of(0.5).unwrap();
        let k = 256;
        let (u, ut, ur) = pi.field(j, k);
        let (v, vt, vr) = evolve_free_with_derivatives(&g, 2.0, 0.5).unwrap();
        assert!((u - v).abs() < 1e-13 && (ut - vt).abs() < 1e-13 && (ur - vr).abs() < 1e-12);
        assert!((pi.value(j, k) - u).abs() < 1e-15);
    }

    #[test]
    fn data_profile_normalization() {
        // Data (0, r^{-3} 1_{r > 1}) has the profile -½ 1_{[-1, 1]}.
        let rg = RadialGrid::up_to(64.0, 1.0 / 128.0).unwrap();
        let d = RadialData::from_fn(rg, |_| 0.0, |r| if r > 1.0 { r.powi(-3) } else { 0.0 });
        let g = profile_from_data(&d).unwrap();
        // The jump of u1 at r = 1 costs O(h) in the cumulative moment.
        assert!((g.sample(0.0) + 0.5).abs() < 1e-2);
        assert!((g.sample(-0.5) + 0.5).abs() < 1e-2);
        assert!(g.sample(3.0).abs() < 1e-6);
        assert!(g.sample(-10.0).abs() < 1e-6);
    }

    #[test]
    fn source_profile_is_even_and_consistent() {
        let rg = RadialGrid::up_to(32.0, 1.0 / 64.0).unwrap();
        let f: Vec<f64> = rg.radii().iter().map(|r| (-(r - 3.0) * (r - 3.0)).exp()).collect();
        let g = source_profile(&f, rg).unwrap();
        assert_eq!(g.reflect().unwrap(), g);
        let d = data_from_profile(&g).unwrap();
        let err = d.u1.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert!(d.u0.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn energy_of_inverse_cube() {
        let rg = RadialGrid::up_to(64.0, 1.0 / 128.0).unwrap();
        let s4 = SIGMA4;
        let d = RadialData::from_fn(rg, |_| 0.0, |r| r.powi(-3));
        let got = energy_norm(&d, 2.0).unwrap();
        let exact = (s4 / 2.0).sqrt();
        assert!((got - exact).abs() / exact < 1e-4);
        let d = RadialData::from_fn(rg, |r| r.powi(-3), |_| 0.0);
        let got = energy_norm(&d, 2.0).unwrap();
        let exact = (3.0 * s4).sqrt() * 2f64.powf(-1.5);
        assert!((got - exact).abs() / exact < 1e-4);
        assert!(energy_norm(&d, -1.0).is_err());
    }

    #[test]
    fn isometry_on_smooth_profile() {
        let g = RadialProfile::from_fn(grid(), |s| (1.0 + s) * (-(s - 0.5) * (s - 0.5) / 2.0).exp());
        let defect = isometry_defect(&g).unwrap();
        assert!(defect < 1e-4, "{defect}");
    }

    #[test]
    fn rejects_irregular_radii() {
        assert!(RadialGrid::from_radii(&[0.1, 0.2, 0.35]).is_err());
        assert!(RadialGrid::from_radii(&[0.1, 0.2, 0.3]).is_ok());
    }
}
