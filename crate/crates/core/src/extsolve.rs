//! Exterior nonlinear solver on the cone `Ω_R = {r > R + |t|}`.
//!
//! The equation `u_tt - Δu = χ_R F(u)` is marched with the exact free
//! propagator: the state is a radiation profile `P(t)` whose free wave is the
//! solution, and Duhamel's formula turns each time step into the addition of
//! a translated source profile,
//!
//! ```text
//! P(t + dt) = P(t) + dt * G_{f(t + dt/2)}( · - (t + dt/2) ),   f = χ_R F(u).
//! ```
//!
//! The midpoint value `u(t + dt/2)` comes from a short Picard iteration on the
//! local Duhamel correction `(dt²/8) f`. Time steps are even multiples of the
//! profile step, so every translation is an exact index shift.
//!
//! [`fd_oracle_solve`] integrates the same problem with a leapfrog scheme in
//! `(r, t)` and serves as an independent cross-check.

use std::fmt;
use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::freewave::{half_source_profile, profile_from_data, ProfileIntegrals, RadialData};
use crate::profile::{GridSpec, RadialProfile, SIGMA4};
use crate::quad;

/// Which nonlinearity drives the exterior problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearityKind {
    Focusing,
    Defocusing,
    Custom,
}

/// `F(t, r, u)` with `|F| <= gamma |u|^{7/3}`.
#[derive(Clone)]
pub struct Nonlinearity {
    pub kind: NonlinearityKind,
    pub gamma: f64,
    /// `F(-t, r, -u) = -F(t, r, u)`.
    pub as_symmetric: bool,
    /// `F` does not depend on `t`.
    pub autonomous: bool,
    eval: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("kind", &self.kind)
            .field("gamma", &self.gamma)
            .field("as_symmetric", &self.as_symmetric)
            .field("autonomous", &self.autonomous)
            .finish()
    }
}

/// `|u|^{4/3} u` without `powf`.
#[inline]
fn power_73(u: f64) -> f64 {
    let c = u.abs().cbrt();
    let c2 = c * c;
    c2 * c2 * u
}

impl Nonlinearity {
    /// `F(u) = |u|^{4/3} u`.
    pub fn focusing() -> Self {
        Self {
            kind: NonlinearityKind::Focusing,
            gamma: 1.0,
            as_symmetric: true,
            autonomous: true,
            eval: Arc::new(|_, _, u| power_73(u)),
        }
    }

    /// `F(u) = -|u|^{4/3} u`.
    pub fn defocusing() -> Self {
        Self {
            kind: NonlinearityKind::Defocusing,
            gamma: 1.0,
            as_symmetric: true,
            autonomous: true,
            eval: Arc::new(|_, _, u| -power_73(u)),
        }
    }

    pub fn from_kind(kind: NonlinearityKind) -> Result<Self> {
        match kind {
            NonlinearityKind::Focusing => Ok(Self::focusing()),
            NonlinearityKind::Defocusing => Ok(Self::defocusing()),
            NonlinearityKind::Custom => domain("custom nonlinearities need an evaluator"),
        }
    }

    /// The free equation.
    pub fn zero() -> Self {
        Self::custom(0.0, true, true, |_, _, _| 0.0)
    }

    pub fn custom(
        gamma: f64,
        as_symmetric: bool,
        autonomous: bool,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { kind: NonlinearityKind::Custom, gamma, as_symmetric, autonomous, eval: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, t: f64, r: f64, u: f64) -> f64 {
        (self.eval)(t, r, u)
    }

    /// Checks `|F(t, r, u)| <= gamma |u|^{7/3}` at the probe points.
    pub fn check_bound(&self, probes: &[(f64, f64, f64)]) -> Result<()> {
        for &(t, r, u) in probes {
            let f = self.eval(t, r, u);
            let bound = self.gamma * u.abs().powf(7.0 / 3.0);
            if !f.is_finite() || f.abs() > bound * (1.0 + 1e-12) + 1e-300 {
                return domain(format!(
                    "nonlinearity violates |F| <= {} |u|^(7/3) at (t, r, u) = ({t}, {r}, {u})",
                    self.gamma
                ));
            }
        }
        Ok(())
    }

    /// Checks `F(-t, r, -u) = -F(t, r, u)` at the probe points.
    pub fn check_as_symmetry(&self, probes: &[(f64, f64, f64)]) -> Result<()> {
        for &(t, r, u) in probes {
            let (a, b) = (self.eval(-t, r, -u), -self.eval(t, r, u));
            if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return domain(format!("nonlinearity is not AS-symmetric at (t, r, u) = ({t}, {r}, {u})"));
            }
        }
        Ok(())
    }
}

/// Cutoff `χ_R` applied to the source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Mask {
    /// Indicator of `r >= R + |t|`.
    Sharp,
    /// 1 on `r >= R + |t|`, ramping smoothly to 0 over `width` inside the cone.
    Smooth { width: f64 },
}

impl Mask {
    #[inline]
    pub fn weight(&self, r: f64, t: f64, radius: f64) -> f64 {
        let d = r - radius - t.abs();
        match *self {
            Mask::Sharp => {
                if d >= -1e-9 {
                    1.0
                } else {
                    0.0
                }
            }
            Mask::Smooth { width } => {
                if d >= 0.0 {
                    1.0
                } else if d <= -width {
                    0.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * d / width).cos())
                }
            }
        }
    }
}

/// Parameters of [`solve_exterior`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Cone radius `R`.
    pub cone_radius: f64,
    /// Horizon `T`: the solution is computed on `[-T, T]`.
    pub horizon: f64,
    pub dt: f64,
    pub picard_iters: usize,
    pub mask: Mask,
    /// Keep every `snapshot_every`-th time level.
    pub snapshot_every: usize,
    /// Warn when the linear Y-norm on the window exceeds this.
    pub y_threshold: f64,
}

impl SolverConfig {
    pub fn new(cone_radius: f64, horizon: f64, dt: f64) -> Self {
        Self { cone_radius, horizon, dt, picard_iters: 2, mask: Mask::Sharp, snapshot_every: 1, y_threshold: 0.5 }
    }
}

/// Solution fields at one time level on the radial nodes `k * step`, `k = 1..=n_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
    pub ur: Vec<f64>,
}

/// Source `f = χ_R F(u)` at a midpoint time, kept for the Duhamel sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSlice {
    /// Midpoint time `t'`.
    pub t: f64,
    /// Oriented quadrature weight: `+dt` forward, `-dt` backward.
    pub weight: f64,
    /// First radial index where the source may be nonzero.
    pub mask_start: usize,
    /// Source at `r = k * step`, `k = 0..=n`.
    pub f: Vec<f64>,
}

/// All source slices of a run; the Duhamel profiles are rebuilt from these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceHistory {
    pub grid: GridSpec,
    pub slices: Vec<SourceSlice>,
}

impl SourceHistory {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, slices: Vec::new() }
    }

    /// Adds `weight * G_f(s - t)` into the two-sided arrays of a profile on `self.grid`.
    fn accumulate(&self, slice: &SourceSlice, left: &mut [f64], right: &mut [f64]) -> Result<()> {
        let h = self.grid.step;
        let c = self.grid.center()? as isize;
        let n_nodes = left.len() as isize;
        let (gl, gr) = half_source_profile(&slice.f, slice.mask_start, h);
        let m = (slice.t / h).round() as isize;
        let n_src = gl.len() as isize - 1;
        for q in -n_src..=n_src {
            let j = c + q + m;
            let (l, r) = if q >= 0 {
                (gl[q as usize], gr[q as usize])
            } else {
                (gr[(-q) as usize], gl[(-q) as usize])
            };
            if j < 0 || j >= n_nodes {
                if l != 0.0 || r != 0.0 {
                    return domain("source profile leaves the profile grid; enlarge the grid");
                }
                continue;
            }
            left[j as usize] += slice.weight * l;
            right[j as usize] += slice.weight * r;
        }
        Ok(())
    }

    fn sum_where(&self, keep: impl Fn(&SourceSlice) -> bool) -> Result<RadialProfile> {
        let n = self.grid.len();
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];
        for s in self.slices.iter().filter(|s| keep(s)) {
            self.accumulate(s, &mut left, &mut right)?;
        }
        // Two-sided limits at the grid ends are never used by the cells.
        left[0] = right[0];
        right[n - 1] = left[n - 1];
        RadialProfile::from_limits(self.grid, left, right)
    }

    /// Oriented Duhamel profile `∮_0^t G_{f(t')}(· - t') dt'`.
    pub fn accumulated(&self, t: f64) -> Result<RadialProfile> {
        self.sum_where(|s| if t >= 0.0 { s.t > 0.0 && s.t < t } else { s.t < 0.0 && s.t > t })
    }

    /// `(Q_-, Q_+)`: the Duhamel profiles summed over all backward and all forward slices.
    pub fn scattering_limits(&self) -> Result<(RadialProfile, RadialProfile)> {
        Ok((self.sum_where(|s| s.t < 0.0)?, self.sum_where(|s| s.t >= 0.0)?))
    }
}

/// Diagnostics collected while marching.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    /// Largest Picard contraction ratio over all steps.
    pub max_picard_ratio: f64,
    /// Y-norm of the linear evolution on the cone over `[-T, T]`.
    pub linear_y_norm: f64,
    pub steps: usize,
}

/// Solution on `Ω_R ∩ {|t| <= T}`, stored as snapshots of the global extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExteriorSolution {
    pub cone_radius: f64,
    pub horizon: f64,
    /// Radial step; snapshot entry `k` sits at `r = (k + 1) * step`.
    pub step: f64,
    /// Snapshots in increasing time.
    pub snapshots: Vec<Snapshot>,
    /// Profile of the linear part, when the solve started from one.
    pub initial_profile: Option<RadialProfile>,
    pub history: SourceHistory,
    pub diagnostics: SolveDiagnostics,
    /// The nonlinearity had no explicit time dependence.
    pub autonomous: bool,
}

impl ExteriorSolution {
    /// Builds a solution from closed-form fields `(u, u_t, u_r)(r, t)`.
    pub fn from_fields(
        cone_radius: f64,
        step: f64,
        n_r: usize,
        times: &[f64],
        field: impl Fn(f64, f64) -> (f64, f64, f64),
    ) -> Self {
        let snapshots = times
            .iter()
            .map(|&t| {
                let mut s = Snapshot { t, u: vec![0.0; n_r], ut: vec![0.0; n_r], ur: vec![0.0; n_r] };
                for k in 0..n_r {
                    let (u, ut, ur) = field((k + 1) as f64 * step, t);
                    s.u[k] = u;
                    s.ut[k] = ut;
                    s.ur[k] = ur;
                }
                s
            })
            .collect();
        let grid = GridSpec::symmetric(step * 2.0, step).expect("valid placeholder grid");
        Self {
            cone_radius,
            horizon: times.iter().fold(0.0, |m: f64, t| m.max(t.abs())),
            step,
            snapshots,
            initial_profile: None,
            history: SourceHistory::new(grid),
            diagnostics: SolveDiagnostics::default(),
            autonomous: true,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn n_r(&self) -> usize {
        self.snapshots.first().map_or(0, |s| s.u.len())
    }

    pub fn r(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.step
    }

    /// Snapshot at time `t`, which must be one of the stored times.
    pub fn snapshot(&self, t: f64) -> Result<&Snapshot> {
        self.snapshot_index(t).map(|i| &self.snapshots[i])
    }

    pub fn snapshot_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * (1.0 + t.abs());
        self.snapshots
            .iter()
            .position(|s| (s.t - t).abs() <= tol)
            .ok_or_else(|| Error::Domain(format!("time {t} is not a stored time level")))
    }

    /// True if `(r, t)` lies in the exterior cone and the stored window.
    pub fn in_domain(&self, r: f64, t: f64) -> bool {
        r > self.cone_radius + t.abs() && t.abs() <= self.horizon + 1e-12 && r <= self.n_r() as f64 * self.step + 1e-12
    }

    /// First radial index strictly inside the cone at time `t`.
    pub fn first_exterior_index(&self, t: f64) -> usize {
        let x = (self.cone_radius + t.abs()) / self.step;
        // Entry k sits at (k+1) h; the boundary node itself is included.
        let k = (x - 1e-9).ceil() as isize - 1;
        k.max(0) as usize
    }
}

/// Energy of the solution outside the cone at time `t`:
/// `σ₄ ∫_{R+|t|}^∞ (u_r² + u_t²) ρ⁴ dρ`, with a power-law tail past the grid.
pub fn exterior_energy(sol: &ExteriorSolution, t: f64) -> Result<f64> {
    let snap = sol.snapshot(t)?;
    let phi: Vec<f64> = (0..snap.u.len())
        .map(|k| (snap.ur[k].powi(2) + snap.ut[k].powi(2)) * sol.r(k).powi(4))
        .collect();
    Ok(SIGMA4 * quad::radial_integral(sol.step, &phi, sol.cone_radius + t.abs(), true))
}

/// A space-time norm together with the time window it was computed on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowedNorm {
    pub value: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// `(∫ (σ₄ ∫_{r+|t|}^∞ |u|^{14/3} ρ⁴ dρ)^{1/2} dt)^{3/7}` over the stored window.
pub fn y_norm_tail(sol: &ExteriorSolution, r: f64) -> Result<WindowedNorm> {
    if !(r >= 0.0) {
        return domain(format!("Y-norm radius must be nonnegative, got {r}"));
    }
    if sol.snapshots.len() < 2 {
        return domain("Y-norm needs at least two time levels");
    }
    let inner: Vec<f64> = sol
        .snapshots
        .iter()
        .map(|s| {
            let phi: Vec<f64> =
                s.u.iter().enumerate().map(|(k, u)| u.abs().powf(14.0 / 3.0) * sol.r(k).powi(4)).collect();
            (SIGMA4 * quad::radial_integral(sol.step, &phi, r + s.t.abs(), true)).sqrt()
        })
        .collect();
    let mut total = 0.0;
    for i in 1..inner.len() {
        total += 0.5 * (sol.snapshots[i].t - sol.snapshots[i - 1].t) * (inner[i] + inner[i - 1]);
    }
    Ok(WindowedNorm {
        value: total.powf(3.0 / 7.0),
        t_min: sol.snapshots[0].t,
        t_max: sol.snapshots[sol.snapshots.len() - 1].t,
    })
}

/// Solves the exterior problem from radial data.
pub fn solve_exterior(d: &RadialData, f: &Nonlinearity, cfg: &SolverConfig) -> Result<ExteriorSolution> {
    solve_exterior_from_profile(&profile_from_data(d)?, f, cfg)
}

/// Integer step counts behind a solver configuration.
struct Layout {
    h: f64,
    center: usize,
    /// Time step in profile steps (even).
    m: usize,
    steps: usize,
    /// Radial nodes carried in the snapshots.
    n_r: usize,
    /// Source nodes, `k = 0..=n_src`.
    n_src: usize,
}

fn layout(grid: &GridSpec, cfg: &SolverConfig) -> Result<Layout> {
    let h = grid.step;
    let center = grid.center()?;
    if !(cfg.cone_radius >= 0.0) {
        return domain(format!("cone radius must be nonnegative, got {}", cfg.cone_radius));
    }
    if !(cfg.horizon > 0.0) || !(cfg.dt > 0.0) {
        return domain("horizon and time step must be positive");
    }
    let m = cfg.dt / h;
    if (m - m.round()).abs() > 1e-7 || (m.round() as usize) % 2 != 0 || m.round() < 2.0 {
        return domain(format!("time step {} must be an even multiple of the profile step {h}", cfg.dt));
    }
    let steps = cfg.horizon / cfg.dt;
    if (steps - steps.round()).abs() > 1e-7 {
        return domain(format!("horizon {} is not a multiple of the time step {}", cfg.horizon, cfg.dt));
    }
    let steps = steps.round() as usize;
    let t_idx = steps * m.round() as usize;
    if t_idx >= center {
        return domain("horizon does not fit inside the profile grid");
    }
    let n_r = center - t_idx;
    if (n_r as f64) * h <= cfg.cone_radius + cfg.horizon {
        return domain(format!(
            "profile grid half-width {} leaves no exterior region at the horizon (need > R + 2T = {})",
            grid.half_width(),
            cfg.cone_radius + 2.0 * cfg.horizon
        ));
    }
    if cfg.picard_iters == 0 || cfg.snapshot_every == 0 {
        return domain("picard_iters and snapshot_every must be positive");
    }
    Ok(Layout { h, center, m: m.round() as usize, steps, n_r, n_src: n_r })
}

/// Solves the exterior problem whose linear part is the free wave of `g`.
///
/// The snapshots hold the global extension on `r ∈ (0, L - T]`; inside the
/// cone it solves the masked equation, outside it is the exterior solution.
pub fn solve_exterior_from_profile(
    g: &RadialProfile,
    f: &Nonlinearity,
    cfg: &SolverConfig,
) -> Result<ExteriorSolution> {
    if !g.is_finite() {
        return domain("profile contains non-finite values");
    }
    let grid = *g.grid();
    let lay = layout(&grid, cfg)?;
    let h = lay.h;
    let dt = cfg.dt;
    let linear = ProfileIntegrals::new(g);
    let mut history = SourceHistory::new(grid);
    let mut diag = SolveDiagnostics::default();
    let mut y_linear = Vec::with_capacity(2 * lay.steps + 1);

    let eval_snapshot = |p: &ProfileIntegrals, t: f64, j: isize| {
        let mut s = Snapshot { t, u: vec![0.0; lay.n_r], ut: vec![0.0; lay.n_r], ur: vec![0.0; lay.n_r] };
        for k in 1..=lay.n_r {
            let (u, ut, ur) = p.field(j, k);
            s.u[k - 1] = u;
            s.ut[k - 1] = ut;
            s.ur[k - 1] = ur;
        }
        s
    };
    let linear_y = |t: f64, j: isize| {
        let phi: Vec<f64> = (1..=lay.n_r)
            .map(|k| linear.value(j, k).abs().powf(14.0 / 3.0) * (k as f64 * h).powi(4))
            .collect();
        (SIGMA4 * quad::radial_integral(h, &phi, cfg.cone_radius + t.abs(), true)).sqrt()
    };

    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let c = lay.center as isize;
    for dir in [1.0f64, -1.0] {
        let mut left = g.left_limits().to_vec();
        let mut right = g.right_limits().to_vec();
        let out = if dir > 0.0 { &mut forward } else { &mut backward };
        if dir > 0.0 {
            out.push(eval_snapshot(&linear, 0.0, c));
            y_linear.push((0.0, linear_y(0.0, c)));
        }
        for n in 0..lay.steps {
            let t_mid = dir * (n as f64 + 0.5) * dt;
            let j_mid = c + dir as isize * (n * lay.m + lay.m / 2) as isize;
            let state = ProfileIntegrals::from_limits(grid.s_min, h, &left, &right);
            let u_lin: Vec<f64> = (0..=lay.n_src).map(|k| if k == 0 { 0.0 } else { state.value(j_mid, k) }).collect();
            let mask: Vec<f64> = (0..=lay.n_src).map(|k| cfg.mask.weight(k as f64 * h, t_mid, cfg.cone_radius)).collect();
            let source = |u: &[f64]| -> Vec<f64> {
                (0..=lay.n_src)
                    .map(|k| if k == 0 || mask[k] == 0.0 { 0.0 } else { mask[k] * f.eval(t_mid, k as f64 * h, u[k]) })
                    .collect()
            };
            let mut u_prev = u_lin.clone();
            let mut src = source(&u_prev);
            let mut last_change = 0.0f64;
            for it in 0..cfg.picard_iters {
                let u_next: Vec<f64> = u_lin.iter().zip(&src).map(|(a, s)| a + dt * dt / 8.0 * s).collect();
                let change = u_next.iter().zip(&u_prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if !change.is_finite() {
                    return Err(Error::Divergence { t: t_mid, factor: f64::INFINITY });
                }
                if it > 0 && last_change > 1e-14 * (1.0 + max_abs(&u_lin)) {
                    let ratio = change / last_change;
                    diag.max_picard_ratio = diag.max_picard_ratio.max(ratio);
                    if ratio >= 1.0 {
                        return Err(Error::Divergence { t: t_mid, factor: ratio });
                    }
                }
                last_change = change;
                u_prev = u_next;
                src = source(&u_prev);
            }
            let mask_start = mask.iter().position(|&w| w > 0.0).unwrap_or(lay.n_src + 1);
            let slice = SourceSlice { t: t_mid, weight: dir * dt, mask_start, f: src };
            history.accumulate(&slice, &mut left, &mut right)?;
            history.slices.push(slice);
            diag.steps += 1;
            let t_new = dir * (n + 1) as f64 * dt;
            let j_new = c + dir as isize * ((n + 1) * lay.m) as isize;
            y_linear.push((t_new, linear_y(t_new, j_new)));
            if (n + 1) % cfg.snapshot_every == 0 || n + 1 == lay.steps {
                let state = ProfileIntegrals::from_limits(grid.s_min, h, &left, &right);
                out.push(eval_snapshot(&state, t_new, j_new));
            }
        }
    }
    backward.reverse();
    backward.extend(forward);

    y_linear.sort_by(|a, b| a.0.total_cmp(&b.0));
    let y: f64 = y_linear.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[1].1 + w[0].1)).sum();
    diag.linear_y_norm = y.powf(3.0 / 7.0);
    if diag.linear_y_norm > cfg.y_threshold {
        warn!(
            "linear Y-norm {:.3e} on [-{}, {}] exceeds the small-data threshold {:.3e}",
            diag.linear_y_norm, cfg.horizon, cfg.horizon, cfg.y_threshold
        );
    }
    Ok(ExteriorSolution {
        cone_radius: cfg.cone_radius,
        horizon: cfg.horizon,
        step: h,
        snapshots: backward,
        initial_profile: Some(g.clone()),
        history,
        diagnostics: diag,
        autonomous: f.autonomous,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Leapfrog finite-difference solve of the masked equation on `[0, r_max]`.
///
/// Time step `dt <= step`; the outer boundary is a first-order outgoing
/// condition for `r² u`. Every `cfg.snapshot_every`-th level is stored.
pub fn fd_oracle_solve(d: &RadialData, f: &Nonlinearity, cfg: &SolverConfig) -> Result<ExteriorSolution> {
    let h = d.r_grid.step;
    let dt = cfg.dt;
    if !(dt > 0.0) || dt > h * (1.0 + 1e-12) {
        return domain(format!("finite-difference step violates dt <= h ({dt} > {h})"));
    }
    let steps = cfg.horizon / dt;
    if !(cfg.horizon > 0.0) || (steps - steps.round()).abs() > 1e-7 {
        return domain(format!("horizon {} is not a positive multiple of dt {dt}", cfg.horizon));
    }
    if cfg.snapshot_every == 0 {
        return domain("snapshot_every must be positive");
    }
    let steps = steps.round() as usize;
    let n = d.r_grid.n;
    // Node i sits at r = i h, i = 0..=n; the origin value comes from evenness.
    let extend = |v: &[f64]| {
        let mut w = Vec::with_capacity(n + 1);
        w.push((4.0 * v[0] - v[1]) / 3.0);
        w.extend_from_slice(v);
        w
    };
    let u0 = extend(&d.u0);
    let v0 = extend(&d.u1);
    let r: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();

    let lap = |u: &[f64], out: &mut [f64]| {
        out[0] = 10.0 * (u[1] - u[0]) / (h * h);
        for i in 1..n {
            out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) + 4.0 / r[i] * (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        out[n] = 0.0;
    };
    let src = |t: f64, u: &[f64], out: &mut [f64]| {
        for i in 0..=n {
            let w = cfg.mask.weight(r[i], t, cfg.cone_radius);
            out[i] = if w == 0.0 { 0.0 } else { w * f.eval(t, r[i], u[i]) };
        }
    };
    let boundary = |u: &[f64]| u[n] - dt * ((u[n] - u[n - 1]) / h + 2.0 * u[n] / r[n]);

    let snap = |t: f64, prev: &[f64], cur: &[f64], next: &[f64], span: f64| {
        let mut s = Snapshot { t, u: cur[1..].to_vec(), ut: vec![0.0; n], ur: vec![0.0; n] };
        for i in 1..=n {
            s.ut[i - 1] = (next[i] - prev[i]) / span;
            s.ur[i - 1] = if i < n { (cur[i + 1] - cur[i - 1]) / (2.0 * h) } else { (cur[n] - cur[n - 1]) / h };
        }
        s
    };

    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mut lu = vec![0.0; n + 1];
    let mut fu = vec![0.0; n + 1];
    for dir in [1.0f64, -1.0] {
        let k = dir * dt;
        let out = if dir > 0.0 { &mut forward } else { &mut backward };
        lap(&u0, &mut lu);
        src(0.0, &u0, &mut fu);
        let mut cur: Vec<f64> = (0..=n).map(|i| u0[i] + k * v0[i] + 0.5 * dt * dt * (lu[i] + fu[i])).collect();
        cur[n] = boundary(&u0);
        let mut prev = u0.clone();
        if dir > 0.0 {
            let mut s = snap(0.0, &u0, &u0, &u0, 1.0);
            s.ut = d.u1.clone();
            out.push(s);
        }
        for step in 1..=steps {
            let t = step as f64 * k;
            lap(&cur, &mut lu);
            src(t, &cur, &mut fu);
            let mut next: Vec<f64> = (0..=n).map(|i| 2.0 * cur[i] - prev[i] + dt * dt * (lu[i] + fu[i])).collect();
            next[n] = boundary(&cur);
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { t, factor: f64::INFINITY });
            }
            if step % cfg.snapshot_every == 0 || step == steps {
                out.push(snap(t, &prev, &cur, &next, 2.0 * k));
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    backward.reverse();
    backward.extend(forward);
    Ok(ExteriorSolution {
        cone_radius: cfg.cone_radius,
        horizon: cfg.horizon,
        step: h,
        snapshots: backward,
        initial_profile: None,
        history: SourceHistory::new(GridSpec::symmetric(2.0 * h, h)?),
        diagnostics: SolveDiagnostics { steps: 2 * steps, ..Default::default() },
        autonomous: f.autonomous,
    })
}
