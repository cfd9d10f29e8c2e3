//! Fixed-point constructions of non-radiative solutions.
//!
//! The unknown is the exterior part of a profile, `G` on `|s| > R`. The map
//! `T` fills `[-R, R]` so that the characteristic numbers come out right,
//! solves the exterior problem from the filled profile and returns the part of
//! the scattering profiles that must be cancelled for the solution to be
//! non-radiative on `|x| > R + |t|`:
//!
//! ```text
//! T G(s) = -Q_-(s)  for s > R,     T G(s) = -Q_+(s)  for s < -R,
//! ```
//!
//! where `Q_±` are the Duhamel profiles accumulated over `t ≷ 0`. The second
//! order construction perturbs around the first-order solution `G_α`.

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::extsolve::{
    exterior_energy, solve_exterior_from_profile, ExteriorSolution, Mask, Nonlinearity, SolverConfig,
};
use crate::freewave::{ProfileIntegrals, RadialData, RadialGrid};
use crate::profile::{weighted_distance, weighted_distance_two_regime, GridSpec, RadialProfile};

/// Which characteristic number the construction prescribes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    First,
    Second,
}

/// How `[-R, R]` is filled before solving.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum InteriorFill {
    /// Constant (first order) or affine (second order).
    Standard,
    /// Standard fill plus `amplitude * (s² - m)` on `[-R, R]`, with `m` the mean
    /// of `s²` there, so mass and first moment are unchanged. Used to probe uniqueness.
    Perturbed { amplitude: f64 },
}

/// Parameters of a fixed-point construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixpointConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Overrides the radius formula when set.
    pub radius: Option<f64>,
    /// Constant in `R = c^{3/2} α²` and its second-order analogue.
    pub c: f64,
    /// Stop once successive iterates are this close in the weighted distance.
    pub tol: f64,
    pub max_iters: usize,
    /// Horizon `T` of each exterior solve; `Q_±` are truncated there.
    pub t_extract: f64,
    pub dt: f64,
    pub grid: GridSpec,
    pub picard_iters: usize,
    pub mask: Mask,
    pub interior: InteriorFill,
    /// Snapshot stride of the final solve.
    pub snapshot_every: usize,
    /// Largest relative disagreement allowed between the exact and sampled
    /// scattering profiles.
    pub extract_tol: f64,
}

impl FixpointConfig {
    pub fn first(alpha: f64) -> Self {
        let grid = GridSpec::symmetric(128.0, 1.0 / 16.0).expect("valid default grid");
        Self {
            alpha,
            beta: 0.0,
            radius: None,
            c: 32.0,
            tol: 1e-11,
            max_iters: 40,
            t_extract: 48.0,
            dt: 2.0 * grid.step,
            grid,
            picard_iters: 2,
            mask: Mask::Sharp,
            interior: InteriorFill::Standard,
            snapshot_every: 2,
            extract_tol: 0.5,
        }
    }

    pub fn second(alpha: f64, beta: f64) -> Self {
        Self { beta, ..Self::first(alpha) }
    }

    /// Same construction on a grid with step `h` (time step `2h`, snapshots every 0.25).
    pub fn with_step(mut self, h: f64) -> Result<Self> {
        self.grid = GridSpec::symmetric(self.grid.half_width(), h)?;
        self.dt = 2.0 * h;
        self.snapshot_every = ((0.25 / self.dt).round() as usize).max(1);
        Ok(self)
    }

    /// Cone radius for `order`, rounded up to a grid node.
    pub fn resolved_radius(&self, order: Order) -> f64 {
        let h = self.grid.step;
        let raw = match (self.radius, order) {
            (Some(r), _) => r,
            (None, Order::First) => self.c.powf(1.5) * self.alpha * self.alpha,
            (None, Order::Second) => (self.c.powf(1.5) * self.alpha * self.alpha)
                .max(self.c.sqrt() * self.beta.abs().powf(2.0 / 3.0)),
        };
        ((raw / h - 1e-9).ceil() * h).max(h)
    }

    fn solver(&self, radius: f64, snapshot_every: usize) -> SolverConfig {
        SolverConfig {
            cone_radius: radius,
            horizon: self.t_extract,
            dt: self.dt,
            picard_iters: self.picard_iters,
            mask: self.mask,
            snapshot_every,
            y_threshold: 0.5,
        }
    }
}

fn node_radius(grid: &GridSpec, radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return domain(format!("fill radius must be positive, got {radius}"));
    }
    if grid.node_index(radius).is_none() || grid.node_index(-radius).is_none() {
        return domain(format!("fill radius {radius} must be a grid node"));
    }
    Ok(())
}

/// `G_tail` on `|s| > R` plus the constant on `[-R, R]` that makes `∫ G = -alpha`.
pub fn extend_profile_first(g_tail: &RadialProfile, alpha: f64, radius: f64) -> Result<RadialProfile> {
    let grid = *g_tail.grid();
    node_radius(&grid, radius)?;
    let (_, tail) = g_tail.split_at(radius)?;
    let k = (-alpha - tail.total_moment0()) / (2.0 * radius);
    let fill = RadialProfile::indicator(grid, -radius, radius)?.scale(k);
    tail.add(&fill)
}

/// `G_tail` on `|s| > R` plus the affine `a + b s` on `[-R, R]` with
/// `∫ G = 0` and `∫ s G = beta`.
pub fn extend_profile_second(g_tail: &RadialProfile, beta: f64, radius: f64) -> Result<RadialProfile> {
    let grid = *g_tail.grid();
    node_radius(&grid, radius)?;
    let (_, tail) = g_tail.split_at(radius)?;
    let one = RadialProfile::indicator(grid, -radius, radius)?;
    let lin = RadialProfile::piecewise(grid, -radius, radius, |s| s)?;
    // Discrete moments of the basis, so the targets hold to round-off.
    let (a11, a12) = (one.total_moment0(), lin.total_moment0());
    let (a21, a22) = (one.total_moment1(), lin.total_moment1());
    let (b1, b2) = (-tail.total_moment0(), beta - tail.total_moment1());
    let det = a11 * a22 - a12 * a21;
    let a = (b1 * a22 - a12 * b2) / det;
    let b = (a11 * b2 - a21 * b1) / det;
    let mut out = tail;
    out.axpy(a, &one)?;
    out.axpy(b, &lin)?;
    Ok(out)
}

fn perturbation(grid: GridSpec, radius: f64, amplitude: f64) -> Result<RadialProfile> {
    // The offset is the discrete mean of s² rather than R²/3, so the discrete
    // mass vanishes exactly and the exterior cannot see the change.
    let sq = RadialProfile::piecewise(grid, -radius, radius, |s| s * s)?;
    let one = RadialProfile::indicator(grid, -radius, radius)?;
    let mean = sq.total_moment0() / one.total_moment0();
    Ok(sq.sub(&one.scale(mean))?.scale(amplitude))
}

/// One application of `T` with everything it produced.
#[derive(Clone, Debug)]
pub struct TStep {
    /// `T G_tail`, supported on `|s| >= R`.
    pub next_tail: RadialProfile,
    /// Profile of the linear part of the solve (filled `G`, plus `G_α` at second order).
    pub data_profile: RadialProfile,
    pub solution: ExteriorSolution,
    pub radius: f64,
}

/// Applies the map `T` once.
///
/// Second order needs the first-order profile `G_α` as `reference`, on the same grid.
pub fn apply_t(
    g_tail: &RadialProfile,
    cfg: &FixpointConfig,
    f: &Nonlinearity,
    order: Order,
    reference: Option<&RadialProfile>,
    snapshot_every: usize,
) -> Result<TStep> {
    let radius = cfg.resolved_radius(order);
    let grid = cfg.grid;
    if g_tail.grid() != &grid {
        return domain("iterate lives on a different grid than the configuration");
    }
    let mut filled = match order {
        Order::First => extend_profile_first(g_tail, cfg.alpha, radius)?,
        Order::Second => extend_profile_second(g_tail, cfg.beta, radius)?,
    };
    if let InteriorFill::Perturbed { amplitude } = cfg.interior {
        filled = filled.add(&perturbation(grid, radius, amplitude)?)?;
    }
    let data_profile = match (order, reference) {
        (Order::First, _) => filled,
        (Order::Second, Some(g_ref)) => filled.add(g_ref)?,
        (Order::Second, None) => return domain("second-order step needs the first-order reference profile"),
    };
    let solution = solve_exterior_from_profile(&data_profile, f, &cfg.solver(radius, snapshot_every))?;
    let (q_minus, q_plus) = solution.history.scattering_limits()?;
    let (mut pos, mut neg) = (q_minus.scale(-1.0), q_plus.scale(-1.0));
    if let (Order::Second, Some(g_ref)) = (order, reference) {
        pos = pos.sub(g_ref)?;
        neg = neg.sub(g_ref)?;
    }
    let next_tail = pos.outer_side(radius, true)?.add(&neg.outer_side(radius, false)?)?;
    Ok(TStep { next_tail, data_profile, solution, radius })
}

/// Convergence record of a construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixpointDiagnostics {
    pub iterations: usize,
    /// Weighted distance between successive iterates.
    pub distances: Vec<f64>,
    /// Ratios of successive distances.
    pub ratios: Vec<f64>,
    /// `l2_tail(G_k, R)` for each iterate.
    pub tail_norms: Vec<f64>,
    /// `max_r l2_tail(G, r) / (c |α|^{7/3} r^{-7/6})` for the final iterate.
    pub ball_ratio: f64,
    /// `(t, exterior energy)` of the final solution.
    pub energy_trace: Vec<(f64, f64)>,
    /// Exterior energy is non-increasing in `|t|` on both sides.
    pub energy_monotone: bool,
    pub max_picard_ratio: f64,
}

/// Identifies the first-order construction a second-order one is built on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTag {
    pub alpha: f64,
    pub radius: f64,
    pub c: f64,
    pub step: f64,
    pub t_extract: f64,
}

/// Result of [`iterate_to_fixed_point`].
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub order: Order,
    pub config: FixpointConfig,
    pub radius: f64,
    /// Fixed point `G*` on `|s| > R`.
    pub tail: RadialProfile,
    /// Full data profile of the solution (includes `G_α` at second order).
    pub profile: RadialProfile,
    pub solution: ExteriorSolution,
    pub diagnostics: FixpointDiagnostics,
    /// Per-iterate tails, oldest first.
    pub iterates: Vec<RadialProfile>,
    pub reference: Option<ReferenceTag>,
}

impl FixedPoint {
    pub fn tag(&self) -> ReferenceTag {
        ReferenceTag {
            alpha: self.config.alpha,
            radius: self.radius,
            c: self.config.c,
            step: self.config.grid.step,
            t_extract: self.config.t_extract,
        }
    }

    /// Radial data `(u, u_t)` at `t = 0`.
    pub fn initial_data(&self) -> Result<RadialData> {
        let s = self.solution.snapshot(0.0)?;
        RadialData::new(RadialGrid::new(self.solution.step, s.u.len())?, s.u.clone(), s.ut.clone())
    }
}

/// Iterates `T` from `G = 0` until successive iterates agree to `cfg.tol`.
///
/// Second order first builds its own first-order reference.
pub fn iterate_to_fixed_point(cfg: &FixpointConfig, f: &Nonlinearity, order: Order) -> Result<FixedPoint> {
    match order {
        Order::First => iterate(cfg, f, Order::First, None),
        Order::Second => {
            let reference = iterate(&FixpointConfig { interior: InteriorFill::Standard, ..cfg.clone() }, f, Order::First, None)?;
            iterate_second(cfg, f, &reference)
        }
    }
}

/// Second-order construction on top of an existing first-order `reference`.
pub fn iterate_second(cfg: &FixpointConfig, f: &Nonlinearity, reference: &FixedPoint) -> Result<FixedPoint> {
    if reference.order != Order::First {
        return domain("reference must be a first-order construction");
    }
    let tag = reference.tag();
    let mine = FixpointConfig { radius: None, ..cfg.clone() };
    if tag.alpha != cfg.alpha || tag.c != cfg.c || tag.step != cfg.grid.step || reference.config.grid != cfg.grid {
        return domain("reference was built with a different alpha, c or grid");
    }
    if cfg.radius.is_none() && mine.resolved_radius(Order::First) != tag.radius {
        return domain("reference radius does not match this configuration");
    }
    iterate(cfg, f, Order::Second, Some(reference))
}

fn iterate(cfg: &FixpointConfig, f: &Nonlinearity, order: Order, reference: Option<&FixedPoint>) -> Result<FixedPoint> {
    let radius = cfg.resolved_radius(order);
    let g_ref = reference.map(|r| &r.profile);
    let distance = |a: &RadialProfile, b: &RadialProfile| match order {
        Order::First => weighted_distance(a, b, radius, 7.0 / 6.0),
        Order::Second if cfg.beta != 0.0 => weighted_distance_two_regime(a, b, radius, cfg.alpha, cfg.beta),
        Order::Second => weighted_distance(a, b, radius, 13.0 / 6.0),
    };
    let mut g = RadialProfile::zeros(cfg.grid);
    let mut diag = FixpointDiagnostics::default();
    let mut iterates = vec![g.clone()];
    let mut prev_d: Option<f64> = None;
    // Ratios are only meaningful while the distance is above round-off.
    let floor = 1e-13;
    loop {
        if diag.iterations >= cfg.max_iters {
            return Err(Error::NonContraction(format!(
                "no convergence to tol {:.1e} after {} iterations (last distance {:.3e})",
                cfg.tol,
                cfg.max_iters,
                prev_d.unwrap_or(f64::NAN)
            )));
        }
        let step = apply_t(&g, cfg, f, order, g_ref, cfg.snapshot_every)?;
        diag.iterations += 1;
        diag.tail_norms.push(g.l2_tail(radius)?);
        diag.max_picard_ratio = diag.max_picard_ratio.max(step.solution.diagnostics.max_picard_ratio);
        let d = distance(&step.next_tail, &g)?;
        diag.distances.push(d);
        if let Some(p) = prev_d {
            if p > floor {
                let ratio = d / p;
                diag.ratios.push(ratio);
                if ratio >= 1.0 && d > floor {
                    return Err(Error::NonContraction(format!(
                        "distance ratio {ratio:.3} >= 1 at iteration {}; increase c (now {})",
                        diag.iterations, cfg.c
                    )));
                }
            }
        }
        info!("iteration {}: distance {d:.3e}", diag.iterations);
        if d <= cfg.tol {
            let solution = step.solution;
            diag.energy_trace = solution
                .snapshots
                .iter()
                .map(|s| exterior_energy(&solution, s.t).map(|e| (s.t, e)))
                .collect::<Result<_>>()?;
            diag.energy_monotone = energy_monotone(&diag.energy_trace);
            diag.ball_ratio = ball_ratio(&g, cfg.alpha, cfg.c, radius)?;
            return Ok(FixedPoint {
                order,
                config: cfg.clone(),
                radius,
                tail: g,
                profile: step.data_profile,
                solution,
                diagnostics: diag,
                iterates,
                reference: reference.map(|r| r.tag()),
            });
        }
        prev_d = Some(d);
        g = step.next_tail;
        iterates.push(g.clone());
    }
}

/// Relative slack allowed when checking that energy does not increase.
const ENERGY_SLACK: f64 = 1e-6;

fn energy_monotone(trace: &[(f64, f64)]) -> bool {
    let side = |positive: bool| {
        let mut v: Vec<(f64, f64)> = trace.iter().copied().filter(|(t, _)| (*t >= 0.0) == positive || *t == 0.0).collect();
        v.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        v.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + ENERGY_SLACK))
    };
    side(true) && side(false)
}

fn ball_ratio(g: &RadialProfile, alpha: f64, c: f64, radius: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let scale = c * alpha.abs().powf(7.0 / 3.0);
    Ok(g.tail_norms()?
        .into_iter()
        .filter(|(r, _)| *r >= radius)
        .map(|(r, t)| t / (scale * r.powf(-7.0 / 6.0)))
        .fold(0.0, f64::max))
}

/// Scattering profiles of the Duhamel part of a solution.
#[derive(Clone, Debug)]
pub struct ScatterProfiles {
    /// `G^+(σ) = Q_+(-σ)`.
    pub g_plus: RadialProfile,
    /// `G^-(σ) = Q_-(σ)`.
    pub g_minus: RadialProfile,
    /// `(σ, r² u_t(T + σ, T))` sampled from the Duhamel part.
    pub sampled_plus: Vec<(f64, f64)>,
    /// `(σ, r² u_t(T + σ, -T))`.
    pub sampled_minus: Vec<(f64, f64)>,
    /// Largest relative L² disagreement between exact and sampled profiles.
    pub disagreement: f64,
}

/// Extracts `G^±` exactly from the source history and cross-checks them
/// against `r² ∂_t` of the Duhamel part sampled at `t = ±T`.
pub fn extract_scatter_profiles(sol: &ExteriorSolution, tol: f64) -> Result<ScatterProfiles> {
    let (q_minus, q_plus) = sol.history.scattering_limits()?;
    let grid = sol.history.grid;
    let t = sol.horizon;
    let h = grid.step;
    let lo = sol.cone_radius.max(h);
    let hi = grid.s_max - 2.0 * t;
    if hi <= lo {
        return Err(Error::Extraction(format!("no sampling window: need L - 2T > R (L = {}, T = {t})", grid.s_max)));
    }
    let g_minus = q_minus.clone();
    let g_plus = q_plus.reflect()?;
    let sample = |q: &RadialProfile, at: f64| -> Result<Vec<(f64, f64)>> {
        let pi = ProfileIntegrals::new(q);
        let j = pi.node_of(at)?;
        let k0 = (lo / h).ceil() as usize;
        let k1 = (hi / h).floor() as usize;
        Ok((k0..=k1)
            .map(|k| {
                let sigma = k as f64 * h;
                let r = t + sigma;
                let kr = (r / h).round() as usize;
                let (_, ut, _) = pi.field(j, kr);
                (sigma, r * r * ut)
            })
            .collect())
    };
    let sampled_plus = sample(&q_plus, t)?;
    let sampled_minus = sample(&q_minus, -t)?;
    let rel = |exact: &RadialProfile, s: &[(f64, f64)]| {
        let (mut num, mut den) = (0.0, 0.0);
        for &(sigma, v) in s {
            let e = exact.sample(sigma);
            num += (e - v).powi(2);
            den += e * e;
        }
        if den == 0.0 {
            if num == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (num / den).sqrt()
        }
    };
    let disagreement = rel(&g_plus, &sampled_plus).max(rel(&g_minus, &sampled_minus));
    if !(disagreement <= tol) {
        return Err(Error::Extraction(format!(
            "exact and sampled scattering profiles differ by {disagreement:.3e} (tolerance {tol:.1e}); increase T"
        )));
    }
    Ok(ScatterProfiles { g_plus, g_minus, sampled_plus, sampled_minus, disagreement })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::symmetric(16.0, 1.0 / 64.0).unwrap()
    }

    #[test]
    fn first_extension_of_zero_tail() {
        let g = extend_profile_first(&RadialProfile::zeros(grid()), 1.0, 1.0).unwrap();
        assert!((g.sample(0.0) + 0.5).abs() < 1e-15);
        assert!((g.left(grid().node_index(1.0).unwrap()) + 0.5).abs() < 1e-15);
        assert_eq!(g.sample(1.5), 0.0);
        assert!((g.total_moment0() + 1.0).abs() < 1e-14);
        assert!(extend_profile_first(&g, 1.0, 0.0).is_err());
    }

    #[test]
    fn second_extension_moments() {
        let gr = grid();
        let z = extend_profile_second(&RadialProfile::zeros(gr), 1.0, 1.0).unwrap();
        assert!(z.total_moment0().abs() < 1e-14);
        assert!((z.total_moment1() - 1.0).abs() < 1e-14);
        // Continuous answer 3s/2; the discrete fill absorbs the O(h²) quadrature error.
        assert!((z.sample(0.5) - 0.75).abs() < 1e-4);
        let tail = RadialProfile::piecewise(gr, 2.0, 4.0, |s| 1.0 / s).unwrap();
        let g = extend_profile_second(&tail, -0.3, 1.5).unwrap();
        assert!(g.total_moment0().abs() < 1e-13);
        assert!((g.total_moment1() + 0.3).abs() < 1e-13);
        assert_eq!(g.sample(3.0), 1.0 / 3.0);
    }

    #[test]
    fn perturbation_has_small_moments() {
        let p = perturbation(grid(), 1.0, 1.0).unwrap();
        assert!(p.total_moment0().abs() < 1e-15);
        assert!(p.total_moment1().abs() < 1e-14);
    }

    #[test]
    fn radius_rounding() {
        let cfg = FixpointConfig::first(0.1);
        let r = cfg.resolved_radius(Order::First);
        assert!(r >= 32f64.powf(1.5) * 0.01 && r < 32f64.powf(1.5) * 0.01 + cfg.grid.step);
        assert!(cfg.grid.node_index(r).is_some());
        let cfg = FixpointConfig::second(0.1, 0.05);
        assert!(cfg.resolved_radius(Order::Second) >= 32f64.sqrt() * 0.05f64.powf(2.0 / 3.0));
    }

    #[test]
    fn zero_alpha_gives_zero_solution() {
        let mut cfg = FixpointConfig::first(0.0);
        cfg.grid = GridSpec::symmetric(16.0, 1.0 / 8.0).unwrap();
        cfg.dt = 0.25;
        cfg.t_extract = 4.0;
        let fp = iterate_to_fixed_point(&cfg, &Nonlinearity::focusing(), Order::First).unwrap();
        assert_eq!(fp.diagnostics.iterations, 1);
        assert_eq!(fp.tail.max_abs(), 0.0);
        assert_eq!(fp.profile.max_abs(), 0.0);
    }

    #[test]
    fn monotone_energy_check() {
        assert!(energy_monotone(&[(-1.0, 1.0), (0.0, 2.0), (1.0, 1.5), (2.0, 1.0)]));
        assert!(!energy_monotone(&[(0.0, 2.0), (1.0, 2.5)]));
    }
}
