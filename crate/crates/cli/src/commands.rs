use std::path::Path;

use log::info;
use nonrad_core::charnum::{alpha_fit, alpha_of, beta_fit, beta_pv, beta_relative, decay_rate_fit, tail_samples, ALPHA_MATCH_TOL};
use nonrad_core::extsolve::{exterior_energy, fd_oracle_solve, solve_exterior_from_profile, SolverConfig};
use nonrad_core::fixpoint::{iterate_second, iterate_to_fixed_point, FixpointConfig, Order};
use nonrad_core::freewave::data_from_profile;
use nonrad_core::io::{
    read_data_csv, read_profile_csv, write_data_csv, write_json, write_profile_csv, write_run, write_snapshots_csv,
};
use nonrad_core::verify::{run_suite, Suite};
use nonrad_core::{Error, GridSpec};
use serde_json::json;

use crate::{
    mask, resolve, CharnumsArgs, ConstructArgs, DecayfitArgs, EvolveArgs, Failure, Kind, OrderArg, SolverArg,
    SuiteArg, TranslateArgs, VerifyArgs,
};

type Outcome = Result<(), Failure>;

fn print(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn positive(name: &str, v: f64) -> Result<f64, Error> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Input(format!("--{name} must be positive, got {v}")))
    }
}

pub fn construct(flags: &ConstructArgs, out: &Path) -> Outcome {
    let a = resolve(flags, flags.config.as_deref())?;
    let alpha = a.alpha.ok_or_else(|| Error::Input("construct needs --alpha".into()))?;
    let beta = a.beta.unwrap_or(0.0);
    let order = a.order.unwrap_or(OrderArg::First);
    if order == OrderArg::First && beta != 0.0 {
        return Err(Error::Input("--beta needs --order second".into()).into());
    }
    let kind = a.kind.unwrap_or(Kind::Focusing);
    let defaults = FixpointConfig::first(alpha);
    let h = positive("step", a.step.unwrap_or(defaults.grid.step))?;
    let half_width = positive("half-width", a.half_width.unwrap_or(defaults.grid.half_width()))?;
    let mut cfg = FixpointConfig {
        beta,
        grid: GridSpec::symmetric(half_width, h)?,
        t_extract: positive("horizon", a.horizon.unwrap_or(defaults.t_extract))?,
        radius: a.radius.map(|r| positive("radius", r)).transpose()?,
        c: positive("c", a.c.unwrap_or(defaults.c))?,
        tol: positive("tol", a.tol.unwrap_or(defaults.tol))?,
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        picard_iters: a.picard_iters.unwrap_or(defaults.picard_iters),
        mask: mask(a.mask, a.mask_width)?,
        ..defaults
    }
    .with_step(h)?;
    cfg.snapshot_every = cfg.snapshot_every.max(1);
    let f = kind.nonlinearity();

    let name = format!("construct-{}-a{alpha}-b{beta}", if order == OrderArg::First { "first" } else { "second" });
    let dir = out.join(name);
    let (fp, beta_measured) = match order {
        OrderArg::First => (iterate_to_fixed_point(&cfg, &f, Order::First)?, None),
        OrderArg::Second => {
            let reference = iterate_to_fixed_point(&FixpointConfig { beta: 0.0, ..cfg.clone() }, &f, Order::First)?;
            let fp = iterate_second(&cfg, &f, &reference)?;
            write_profile_csv(&dir.join("reference.csv"), &reference.profile)?;
            write_data_csv(&dir.join("reference_data.csv"), &reference.initial_data()?)?;
            let b = beta_relative(&fp.profile, &reference.profile, ALPHA_MATCH_TOL)?;
            (fp, Some(b))
        }
    };
    info!("converged in {} iterations", fp.diagnostics.iterations);
    write_run(&dir, &fp)?;
    write_json(&dir.join("config.json"), &a)?;
    write_data_csv(&dir.join("data.csv"), &fp.initial_data()?)?;
    write_snapshots_csv(&dir.join("snapshots.csv"), &fp.solution, a.stride.unwrap_or(8))?;
    print(&json!({
        "dir": dir,
        "order": order,
        "kind": kind,
        "R": fp.radius,
        "iterations": fp.diagnostics.iterations,
        "max_ratio": fp.diagnostics.ratios.iter().cloned().fold(0.0, f64::max),
        "alpha_target": alpha,
        "alpha_measured": alpha_of(&fp.profile),
        "beta_target": beta,
        "beta_measured": beta_measured,
        "energy_monotone": fp.diagnostics.energy_monotone,
        "horizon": fp.config.t_extract,
    }));
    Ok(())
}

pub fn evolve(flags: &EvolveArgs, out: &Path) -> Outcome {
    let a = resolve(flags, flags.config.as_deref())?;
    let g = match (&a.profile, &a.data) {
        (Some(p), _) => read_profile_csv(p)?,
        (None, Some(d)) => nonrad_core::freewave::profile_from_data(&read_data_csv(d)?)?,
        (None, None) => return Err(Error::Input("evolve needs --profile or --data".into()).into()),
    };
    let h = g.grid().step;
    let solver = a.solver.unwrap_or(SolverArg::Duhamel);
    let default_dt = match solver {
        SolverArg::Duhamel => 2.0 * h,
        SolverArg::Fd => h / 2.0,
    };
    let mut cfg = SolverConfig::new(
        positive("radius", a.radius.unwrap_or(1.0))?,
        positive("horizon", a.horizon.unwrap_or(2.0))?,
        positive("dt", a.dt.unwrap_or(default_dt))?,
    );
    cfg.picard_iters = a.picard_iters.unwrap_or(cfg.picard_iters);
    cfg.mask = mask(a.mask, a.mask_width)?;
    cfg.snapshot_every = a.snapshot_every.unwrap_or(((0.25 / cfg.dt).round() as usize).max(1));
    let f = a.kind.unwrap_or(Kind::Focusing).nonlinearity();
    let sol = match solver {
        SolverArg::Duhamel => solve_exterior_from_profile(&g, &f, &cfg)?,
        SolverArg::Fd => fd_oracle_solve(&data_from_profile(&g)?, &f, &cfg)?,
    };
    let dir = out.join(a.name.clone().unwrap_or_else(|| "evolve".into()));
    write_snapshots_csv(&dir.join("snapshots.csv"), &sol, a.stride.unwrap_or(1))?;
    let energy: Vec<(f64, f64)> =
        sol.times().into_iter().map(|t| exterior_energy(&sol, t).map(|e| (t, e))).collect::<Result<_, _>>()?;
    let record = json!({
        "config": a,
        "solver": cfg,
        "diagnostics": sol.diagnostics,
        "energy_trace": energy,
        "window": [-sol.horizon, sol.horizon],
    });
    write_json(&dir.join("evolve.json"), &record)?;
    print(&json!({ "dir": dir, "steps": sol.diagnostics.steps, "max_picard_ratio": sol.diagnostics.max_picard_ratio,
                   "linear_y_norm": sol.diagnostics.linear_y_norm, "window": [-sol.horizon, sol.horizon] }));
    Ok(())
}

pub fn charnums(a: &CharnumsArgs) -> Outcome {
    let report = if let Some(p) = &a.profile {
        let g = read_profile_csv(p)?;
        match &a.reference {
            Some(r) => {
                let g_ref = read_profile_csv(r)?;
                json!({ "alpha": alpha_of(&g), "beta": beta_relative(&g, &g_ref, ALPHA_MATCH_TOL)?,
                        "method": "profile-moments", "reference": r })
            }
            None => {
                let alpha = alpha_of(&g);
                let mut v = json!({ "alpha": alpha, "method": "profile-moments" });
                if alpha.abs() <= ALPHA_MATCH_TOL {
                    v["beta_pv"] = serde_json::to_value(beta_pv(&g, a.pv_radius, a.pv_tol)?)
                        .map_err(|e| Error::Input(e.to_string()))?;
                }
                v
            }
        }
    } else {
        let path = a.data.as_ref().expect("clap requires --profile or --data");
        let d = read_data_csv(path)?;
        let r_max = d.r_grid.r_max();
        let window = match a.window.as_deref() {
            Some([lo, hi]) => (*lo, *hi),
            _ => (r_max / 8.0, r_max / 2.0),
        };
        let n = match &a.reference {
            Some(r) => beta_fit(&d, &read_data_csv(r)?, window)?,
            None => alpha_fit(&d, window)?,
        };
        serde_json::to_value(n).map_err(|e| Error::Input(e.to_string()))?
    };
    print(&report);
    Ok(())
}

pub fn translate(a: &TranslateArgs, out: &Path) -> Outcome {
    let g = read_profile_csv(&a.profile)?;
    let moved = g.translate(a.t0)?;
    let path = a.output.clone().unwrap_or_else(|| out.join("translated.csv"));
    write_profile_csv(&path, &moved)?;
    let mut report = json!({ "output": path, "t0": a.t0, "alpha": alpha_of(&g), "alpha_after": alpha_of(&moved) });
    if let Some(r) = &a.reference {
        let g_ref = read_profile_csv(r)?;
        let before = beta_relative(&g, &g_ref, ALPHA_MATCH_TOL)?;
        report["beta"] = json!(before);
        report["beta_after"] = json!(beta_relative(&moved, &g_ref, ALPHA_MATCH_TOL)?);
        report["beta_predicted"] = json!(before + alpha_of(&g) * a.t0);
    }
    print(&report);
    Ok(())
}

pub fn verify(a: &VerifyArgs, out: &Path) -> Outcome {
    let suite = match a.suite {
        SuiteArg::Linear => Suite::Linear,
        SuiteArg::Fixpoint => Suite::Fixpoint,
        SuiteArg::Dynamics => Suite::Dynamics,
        SuiteArg::All => Suite::All,
    };
    let results = run_suite(suite, a.fast);
    let report = json!({ "suite": suite, "fast": a.fast, "results": results });
    write_json(&out.join(format!("verify-{}.json", suite_name(suite))), &report)?;
    if a.json {
        print(&report);
    } else {
        for r in &results {
            println!("{r}");
        }
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Linear => "linear",
        Suite::Fixpoint => "fixpoint",
        Suite::Dynamics => "dynamics",
        Suite::All => "all",
    }
}

pub fn decayfit(a: &DecayfitArgs) -> Outcome {
    let mut g = read_profile_csv(&a.profile)?;
    if let Some(m) = &a.minus {
        g = g.sub(&read_profile_csv(m)?)?;
    }
    let samples = tail_samples(&g, a.lo, a.hi, a.count)?;
    let slope = decay_rate_fit(&samples)?;
    print(&json!({ "slope": slope, "window": [a.lo, a.hi], "samples": samples }));
    Ok(())
}
