//! Uniform grids on the real line and radiation profiles sampled on them.
//!
//! A [`RadialProfile`] is piecewise linear between nodes but stores separate
//! left and right limits at every node, so indicator functions and the
//! one-sided tails produced by [`RadialProfile::split_at`] integrate exactly
//! under the trapezoid rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Surface area of the unit sphere in R^5.
pub const SIGMA4: f64 = 8.0 * PI * PI / 3.0;

/// Relative slack (in units of the step) when matching a coordinate to a node.
const NODE_SLACK: f64 = 1e-7;

/// Uniform grid `s_min, s_min + step, ..., s_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub step: f64,
    /// Normalizing constant of the isometry, always [`SIGMA4`].
    pub sigma4: f64,
}

impl GridSpec {
    pub fn new(s_min: f64, s_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return domain(format!("grid step must be positive, got {step}"));
        }
        if !(s_min < s_max) || !s_min.is_finite() || !s_max.is_finite() {
            return domain(format!("empty grid [{s_min}, {s_max}]"));
        }
        let cells = (s_max - s_min) / step;
        if (cells - cells.round()).abs() > NODE_SLACK * cells.max(1.0) {
            return domain(format!(
                "extent {} is not a multiple of the step {step}",
                s_max - s_min
            ));
        }
        Ok(Self { s_min, s_max, step, sigma4: SIGMA4 })
    }

    /// The grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        Self::new(-half_width, half_width, step)
    }

    pub fn cells(&self) -> usize {
        ((self.s_max - self.s_min) / self.step).round() as usize
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.cells() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.step
    }

    /// Index of the node at `s`, if `s` is (numerically) a node.
    pub fn node_index(&self, s: f64) -> Option<usize> {
        let x = (s - self.s_min) / self.step;
        let k = x.round();
        if (x - k).abs() <= NODE_SLACK * (1.0 + k.abs()).sqrt() && k >= 0.0 && k <= self.cells() as f64 {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (self.s_min + self.s_max).abs() <= NODE_SLACK * self.step && self.cells() % 2 == 0
    }

    /// Index of `s = 0` on a symmetric grid.
    pub fn center(&self) -> Result<usize> {
        if !self.is_symmetric() {
            return domain("operation requires a grid symmetric about 0");
        }
        Ok(self.cells() / 2)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.s_max - self.s_min)
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.s_min - NODE_SLACK * self.step && s <= self.s_max + NODE_SLACK * self.step
    }

    /// True if both grids have the same step and their nodes coincide.
    pub fn aligned_with(&self, other: &GridSpec) -> bool {
        if (self.step - other.step).abs() > 1e-12 * self.step {
            return false;
        }
        let off = (other.s_min - self.s_min) / self.step;
        (off - off.round()).abs() <= NODE_SLACK
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { s_min: -64.0, s_max: 64.0, step: 1.0 / 128.0, sigma4: SIGMA4 }
    }
}

/// Radiation profile `G` sampled on a [`GridSpec`] with two-sided node limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: GridSpec,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl RadialProfile {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self { grid, left: vec![0.0; n], right: vec![0.0; n] }
    }

    /// Samples a continuous function at the nodes.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let v: Vec<f64> = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, left: v.clone(), right: v }
    }

    pub fn from_samples(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::from_limits(grid, values.clone(), values)
    }

    pub fn from_limits(grid: GridSpec, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.len() != grid.len() || right.len() != grid.len() {
            return domain(format!(
                "profile has {} / {} samples, grid has {} nodes",
                left.len(),
                right.len(),
                grid.len()
            ));
        }
        if left.iter().chain(right.iter()).any(|v| !v.is_finite()) {
            return domain("profile contains non-finite values");
        }
        Ok(Self { grid, left, right })
    }

    /// `f` on `[a, b]` and zero elsewhere, with jumps at `a` and `b`.
    ///
    /// Infinite endpoints are clipped to the grid; finite ones must be nodes.
    pub fn piecewise(grid: GridSpec, a: f64, b: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let ia = if a == f64::NEG_INFINITY { Some(0) } else { grid.node_index(a) };
        let ib = if b == f64::INFINITY { Some(grid.cells()) } else { grid.node_index(b) };
        let (Some(ia), Some(ib)) = (ia, ib) else {
            return domain(format!("support endpoints {a}, {b} must be grid nodes"));
        };
        if ia >= ib {
            return domain(format!("empty support [{a}, {b}]"));
        }
        let mut p = Self::zeros(grid);
        for i in ia..=ib {
            let v = f(grid.node(i));
            if i > ia || ia == 0 {
                p.left[i] = v;
            }
            if i < ib || ib == grid.cells() {
                p.right[i] = v;
            }
        }
        Ok(p)
    }

    /// Indicator function of `[a, b]`.
    pub fn indicator(grid: GridSpec, a: f64, b: f64) -> Result<Self> {
        Self::piecewise(grid, a, b, |_| 1.0)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.grid.node(i)
    }

    pub fn left(&self, i: usize) -> f64 {
        self.left[i]
    }

    pub fn right(&self, i: usize) -> f64 {
        self.right[i]
    }

    pub fn left_limits(&self) -> &[f64] {
        &self.left
    }

    pub fn right_limits(&self) -> &[f64] {
        &self.right
    }

    /// Point value at node `i`: the mean of the two limits.
    pub fn value(&self, i: usize) -> f64 {
        0.5 * (self.left[i] + self.right[i])
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn has_jumps(&self) -> bool {
        self.left.iter().zip(&self.right).any(|(l, r)| l != r)
    }

    /// Evaluates `G(s)`; zero off the grid, the node value at nodes.
    pub fn sample(&self, s: f64) -> f64 {
        if !self.grid.contains(s) {
            return 0.0;
        }
        if let Some(i) = self.grid.node_index(s) {
            return self.value(i);
        }
        let (i, frac) = self.locate(s);
        (1.0 - frac) * self.right[i] + frac * self.left[i + 1]
    }

    /// Cell containing `s` and the fractional position inside it.
    fn locate(&self, s: f64) -> (usize, f64) {
        let x = ((s - self.grid.s_min) / self.grid.step).max(0.0);
        let i = (x.floor() as usize).min(self.grid.cells() - 1);
        (i, (x - i as f64).clamp(0.0, 1.0))
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return domain("profiles live on different grids");
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| k * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            left: self.left.iter().map(|&v| f(v)).collect(),
            right: self.right.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            left: self.left.iter().zip(&other.left).map(|(&a, &b)| f(a, b)).collect(),
            right: self.right.iter().zip(&other.right).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self += k * other` in place.
    pub fn axpy(&mut self, k: f64, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.left.iter_mut().zip(&other.left) {
            *a += k * b;
        }
        for (a, b) in self.right.iter_mut().zip(&other.right) {
            *a += k * b;
        }
        Ok(())
    }

    /// Mirror image `s -> G(-s)`; requires a symmetric grid.
    pub fn reflect(&self) -> Result<Self> {
        self.grid.center()?;
        let n = self.len();
        let mut out = Self::zeros(self.grid);
        for i in 0..n {
            let j = n - 1 - i;
            out.left[i] = self.right[j];
            out.right[i] = self.left[j];
        }
        Ok(out)
    }

    /// Trapezoid rule for `phi(s, G(s))` over `[a, b]`, cell by cell.
    ///
    /// Partial cells use the linear reconstruction inside the cell, so the
    /// rule is exact for piecewise-linear integrands `phi`.
    pub fn integrate_with(&self, a: f64, b: f64, phi: impl Fn(f64, f64) -> f64) -> Result<f64> {
        let a = if a == f64::NEG_INFINITY { self.grid.s_min } else { a };
        let b = if b == f64::INFINITY { self.grid.s_max } else { b };
        if !(a < b) {
            return domain(format!("integration interval [{a}, {b}] is empty"));
        }
        if !self.grid.contains(a) || !self.grid.contains(b) {
            return domain(format!(
                "interval [{a}, {b}] leaves the grid [{}, {}]",
                self.grid.s_min, self.grid.s_max
            ));
        }
        Ok(self.integrate_clipped(a, b, phi))
    }

    /// Like [`Self::integrate_with`] but treats `G` as zero off the grid.
    pub(crate) fn integrate_clipped(&self, a: f64, b: f64, phi: impl Fn(f64, f64) -> f64) -> f64 {
        let g = &self.grid;
        let a = a.max(g.s_min);
        let b = b.min(g.s_max);
        if !(a < b) {
            return 0.0;
        }
        let h = g.step;
        let first = (((a - g.s_min) / h).floor().max(0.0) as usize).min(g.cells() - 1);
        let last = (((b - g.s_min) / h).ceil() as usize).clamp(first + 1, g.cells());
        let mut sum = 0.0;
        for i in first..last {
            let s0 = g.node(i);
            let s1 = g.node(i + 1);
            let lo = a.max(s0);
            let hi = b.min(s1);
            if hi <= lo {
                continue;
            }
            let at = |s: f64| {
                let w = ((s - s0) / h).clamp(0.0, 1.0);
                (1.0 - w) * self.right[i] + w * self.left[i + 1]
            };
            let (glo, ghi) = if lo == s0 && hi == s1 {
                (self.right[i], self.left[i + 1])
            } else {
                (at(lo), at(hi))
            };
            sum += 0.5 * (hi - lo) * (phi(lo, glo) + phi(hi, ghi));
        }
        sum
    }

    /// `∫_a^b G`. Infinite endpoints mean the grid ends.
    pub fn moment0(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_with(a, b, |_, g| g)
    }

    /// `∫_a^b s G(s) ds`.
    pub fn moment1(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_with(a, b, |s, g| s * g)
    }

    /// Total mass `∫ G` over the whole grid.
    pub fn total_moment0(&self) -> f64 {
        self.integrate_clipped(f64::NEG_INFINITY, f64::INFINITY, |_, g| g)
    }

    /// Total first moment `∫ s G(s) ds` over the whole grid.
    pub fn total_moment1(&self) -> f64 {
        self.integrate_clipped(f64::NEG_INFINITY, f64::INFINITY, |s, g| s * g)
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate_clipped(f64::NEG_INFINITY, f64::INFINITY, |_, g| g * g).sqrt()
    }

    /// `(∫_{|s|>r} G²)^{1/2}`.
    pub fn l2_tail(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return domain(format!("tail radius must be nonnegative, got {r}"));
        }
        let sq = |_: f64, g: f64| g * g;
        let pos = self.integrate_clipped(r, f64::INFINITY, sq);
        let neg = self.integrate_clipped(f64::NEG_INFINITY, -r, sq);
        Ok((pos + neg).sqrt())
    }

    /// Tail norms at every nonnegative node radius `r_k = k * step`.
    ///
    /// Returns `(r_k, l2_tail(r_k))` pairs; requires a symmetric grid.
    pub fn tail_norms(&self) -> Result<Vec<(f64, f64)>> {
        let c = self.grid.center()?;
        let h = self.grid.step;
        let n = self.len() - 1;
        let mut out = vec![(0.0, 0.0); c + 1];
        let mut acc = 0.0;
        out[c] = (c as f64 * h, 0.0);
        for k in (0..c).rev() {
            let (p0, p1) = (c + k, c + k + 1);
            let (m0, m1) = (c - k - 1, c - k);
            acc += 0.5 * h * (self.right[p0].powi(2) + self.left[p1].powi(2));
            acc += 0.5 * h * (self.right[m0].powi(2) + self.left[m1].powi(2));
            out[k] = (k as f64 * h, acc.max(0.0).sqrt());
        }
        debug_assert_eq!(n, 2 * c);
        Ok(out)
    }

    /// Exact decomposition `G = G1 + G2` with `G1` on `|s| <= r1`, `G2` on `|s| >= r1`.
    ///
    /// When `±r1` are nodes the cut keeps the one-sided limits, so both parts
    /// integrate exactly. Otherwise the cut falls at the last node inside.
    pub fn split_at(&self, r1: f64) -> Result<(Self, Self)> {
        if !(r1 > 0.0) {
            return domain(format!("split radius must be positive, got {r1}"));
        }
        let mut inner = Self::zeros(self.grid);
        let mut outer = Self::zeros(self.grid);
        let tol = NODE_SLACK * self.grid.step;
        for i in 0..self.len() {
            let s = self.node(i);
            let d = s.abs() - r1;
            if d < -tol {
                inner.left[i] = self.left[i];
                inner.right[i] = self.right[i];
            } else if d > tol {
                outer.left[i] = self.left[i];
                outer.right[i] = self.right[i];
            } else if s > 0.0 {
                inner.left[i] = self.left[i];
                outer.right[i] = self.right[i];
            } else {
                outer.left[i] = self.left[i];
                inner.right[i] = self.right[i];
            }
        }
        Ok((inner, outer))
    }

    /// The part of `G` on `s >= r` (`positive`) or `s <= -r`, with exact cut.
    pub fn outer_side(&self, r: f64, positive: bool) -> Result<Self> {
        let (_, outer) = self.split_at(r)?;
        let mut out = outer;
        for i in 0..self.len() {
            let s = self.node(i);
            if (positive && s <= 0.0) || (!positive && s >= 0.0) {
                out.left[i] = 0.0;
                out.right[i] = 0.0;
            }
        }
        Ok(out)
    }

    /// Time translation `s -> G(s + t0)`.
    ///
    /// Shifts by whole steps are exact and keep jumps; other shifts
    /// interpolate linearly. Mass pushed off the grid is a domain error.
    pub fn translate(&self, t0: f64) -> Result<Self> {
        let h = self.grid.step;
        let x = t0 / h;
        let n = self.len();
        if (x - x.round()).abs() <= NODE_SLACK {
            let k = x.round() as i64;
            let mut out = Self::zeros(self.grid);
            for j in 0..n {
                let target = j as i64 - k;
                if target < 0 || target >= n as i64 {
                    if self.left[j] != 0.0 || self.right[j] != 0.0 {
                        return domain(format!(
                            "translation by {t0} pushes the support off the grid"
                        ));
                    }
                    continue;
                }
                out.left[target as usize] = self.left[j];
                out.right[target as usize] = self.right[j];
            }
            return Ok(out);
        }
        for j in 0..n {
            if (self.left[j] != 0.0 || self.right[j] != 0.0) && !self.grid.contains(self.node(j) - t0) {
                return domain(format!("translation by {t0} pushes the support off the grid"));
            }
        }
        Ok(Self::from_fn(self.grid, |s| self.sample(s + t0)))
    }

    /// Copies the profile onto an aligned grid, failing if mass would be lost.
    pub fn embed(&self, grid: &GridSpec) -> Result<Self> {
        self.regrid(grid, false)
    }

    /// Restricts or extends the profile onto an aligned grid, discarding
    /// whatever falls outside it.
    pub fn truncate_to(&self, grid: &GridSpec) -> Result<Self> {
        self.regrid(grid, true)
    }

    fn regrid(&self, grid: &GridSpec, allow_loss: bool) -> Result<Self> {
        if !self.grid.aligned_with(grid) {
            return domain("target grid is not aligned with the profile grid");
        }
        let off = ((grid.s_min - self.grid.s_min) / self.grid.step).round() as i64;
        let mut out = Self::zeros(*grid);
        for j in 0..self.len() {
            let t = j as i64 - off;
            if t < 0 || t >= grid.len() as i64 {
                if !allow_loss && (self.left[j] != 0.0 || self.right[j] != 0.0) {
                    return domain("profile support does not fit the target grid");
                }
                continue;
            }
            out.left[t as usize] = self.left[j];
            out.right[t as usize] = self.right[j];
        }
        // A cut through the interior of the support leaves no phantom jump at the edges.
        let last = grid.len() - 1;
        if allow_loss {
            out.left[0] = out.right[0];
            out.right[last] = out.left[last];
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.left.iter().chain(&self.right).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.left.iter().chain(&self.right).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `sup_{r >= r_min} r^exponent * l2_tail(G1 - G2, r)` over node radii and `r_min`.
pub fn weighted_distance(
    g1: &RadialProfile,
    g2: &RadialProfile,
    r_min: f64,
    exponent: f64,
) -> Result<f64> {
    weighted_sup(g1, g2, r_min, |r, tail| r.powf(exponent) * tail)
}

/// Two-regime distance used for second-order constructions.
///
/// Below the crossover radius `|beta|/|alpha|` the weight is
/// `|beta|^{-7/3} r^{7/2}`, above it `|alpha|^{-4/3} |beta|^{-1} r^{13/6}`.
pub fn weighted_distance_two_regime(
    g1: &RadialProfile,
    g2: &RadialProfile,
    r_min: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let (a, b) = (alpha.abs(), beta.abs());
    if b == 0.0 {
        return domain("two-regime distance needs beta != 0");
    }
    let crossover = if a > 0.0 { b / a } else { f64::INFINITY };
    let inner = b.powf(-7.0 / 3.0);
    let outer = if a > 0.0 { a.powf(-4.0 / 3.0) / b } else { 0.0 };
    weighted_sup(g1, g2, r_min, |r, tail| {
        if r <= crossover {
            inner * r.powf(3.5) * tail
        } else {
            outer * r.powf(13.0 / 6.0) * tail
        }
    })
}

fn weighted_sup(
    g1: &RadialProfile,
    g2: &RadialProfile,
    r_min: f64,
    weight: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    if !(r_min > 0.0) {
        return domain(format!("distance radius must be positive, got {r_min}"));
    }
    let diff = g1.sub(g2)?;
    let mut best = weight(r_min, diff.l2_tail(r_min)?);
    for (r, tail) in diff.tail_norms()? {
        if r >= r_min {
            best = best.max(weight(r, tail));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::default()
    }

    #[test]
    fn unit_box_moments_and_tails() {
        let g = RadialProfile::indicator(grid(), -1.0, 1.0).unwrap();
        assert!((g.moment0(f64::NEG_INFINITY, f64::INFINITY).unwrap() - 2.0).abs() < 1e-14);
        assert!(g.total_moment1().abs() < 1e-14);
        assert!(g.l2_tail(1.0).unwrap() < 1e-14);
        assert!((g.l2_tail(0.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn odd_box_first_moment() {
        let g = RadialProfile::piecewise(grid(), -1.0, 1.0, |s| s).unwrap();
        // ∫ s² over [-1, 1] with the trapezoid rule on step h: 2/3 + h²/3.
        let h = grid().step;
        assert!((g.total_moment1() - (2.0 / 3.0 + h * h / 3.0)).abs() < 1e-14);
        assert!((g.total_moment1() - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn power_tail_l2() {
        let gr = grid();
        let a = RadialProfile::piecewise(gr, 1.0, f64::INFINITY, |s| s.abs().powf(-5.0 / 3.0)).unwrap();
        let b = RadialProfile::piecewise(gr, f64::NEG_INFINITY, -1.0, |s| s.abs().powf(-5.0 / 3.0)).unwrap();
        let g = a.add(&b).unwrap();
        // ∫_{|s|>2} |s|^{-10/3} on the truncated grid, computed in closed form.
        let l = gr.s_max;
        let exact = (2.0 * 3.0 / 7.0 * (2f64.powf(-7.0 / 3.0) - l.powf(-7.0 / 3.0))).sqrt();
        let got = g.l2_tail(2.0).unwrap();
        assert!((got - exact).abs() / exact < 1e-4, "{got} vs {exact}");
        let tails = g.tail_norms().unwrap();
        let (r, t) = tails[256];
        assert_eq!(r, 2.0);
        assert!((t - got).abs() < 1e-12);
    }

    #[test]
    fn split_is_exact_at_nodes() {
        let g = RadialProfile::from_fn(grid(), |s| (-s * s).exp() * (1.0 + s));
        let (inner, outer) = g.split_at(0.75).unwrap();
        let sum = inner.add(&outer).unwrap();
        for i in 0..g.len() {
            assert_eq!(sum.value(i), g.value(i));
        }
        let m = g.total_moment0();
        assert!((inner.total_moment0() + outer.total_moment0() - m).abs() < 1e-14);
        assert!(inner.l2_tail(0.75).unwrap() == 0.0);
    }

    #[test]
    fn translate_whole_steps_keeps_jumps() {
        let g = RadialProfile::indicator(grid(), -1.0, 1.0).unwrap();
        let t = g.translate(0.5).unwrap();
        assert_eq!(t.sample(-1.0), 1.0);
        assert_eq!(t.sample(-1.5), 0.5);
        assert_eq!(t.sample(0.75), 0.0);
        assert!((t.total_moment0() - 2.0).abs() < 1e-14);
        assert!(g.translate(70.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GridSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.3).is_err());
        let g = RadialProfile::zeros(grid());
        assert!(g.moment0(1.0, 1.0).is_err());
        assert!(g.moment0(-100.0, 0.0).is_err());
        assert!(g.l2_tail(-1.0).is_err());
        assert!(g.split_at(0.0).is_err());
        assert!(RadialProfile::from_samples(grid(), vec![0.0; 3]).is_err());
    }

    #[test]
    fn weighted_distance_of_power_tail() {
        let gr = GridSpec::symmetric(32.0, 1.0 / 32.0).unwrap();
        let g = RadialProfile::piecewise(gr, 1.0, f64::INFINITY, |s| s.powf(-5.0 / 3.0)).unwrap();
        let z = RadialProfile::zeros(gr);
        let d = weighted_distance(&g, &z, 1.0, 7.0 / 6.0).unwrap();
        // r^{7/6} * (3/7)^{1/2} r^{-7/6}, up to truncation at the grid edge.
        assert!((d - (3.0f64 / 7.0).sqrt()).abs() < 1e-3, "{d}");
    }
}
