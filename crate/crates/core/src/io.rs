//! CSV and JSON artifacts, written atomically.
//!
//! Formats: profiles `s,value`; radial data `r,u0,u1`; evaluations `r,t,u`;
//! snapshots `t,r,u,ut`; overlap heatmaps `t,r,diff`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extsolve::ExteriorSolution;
use crate::fixpoint::{FixedPoint, FixpointConfig, Order};
use crate::freewave::{RadialData, RadialGrid};
use crate::profile::{GridSpec, RadialProfile};

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Input(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Input(e.to_string()))
}

fn read_columns(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let got: Vec<String> = r
        .headers()
        .map_err(|e| Error::Input(e.to_string()))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if got != header {
        return Err(Error::Input(format!("{}: expected columns {header:?}, found {got:?}", path.display())));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        if rec.len() != header.len() {
            return Err(Error::Input(format!("{}: row {} has {} fields", path.display(), line + 2, rec.len())));
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("{}: row {}: bad number {field:?}", path.display(), line + 2)))?;
            if !v.is_finite() {
                return Err(Error::Input(format!("{}: row {}: non-finite value", path.display(), line + 2)));
            }
            cols[c].push(v);
        }
    }
    Ok(cols)
}

pub fn write_profile_csv(path: &Path, g: &RadialProfile) -> Result<()> {
    let rows = (0..g.len()).map(|i| vec![g.node(i), g.value(i)]);
    write_atomic(path, &csv_bytes(&["s", "value"], rows)?)
}

/// Reads a profile written as `s,value` on a uniform grid.
pub fn read_profile_csv(path: &Path) -> Result<RadialProfile> {
    let cols = read_columns(path, &["s", "value"])?;
    let (s, v) = (&cols[0], &cols[1]);
    if s.len() < 3 {
        return Err(Error::Input(format!("{}: need at least three rows", path.display())));
    }
    let h = s[1] - s[0];
    for (i, &x) in s.iter().enumerate() {
        if (x - (s[0] + i as f64 * h)).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(Error::Input(format!("{}: s column is not a uniform grid", path.display())));
        }
    }
    let grid = GridSpec::new(s[0], s[s.len() - 1], h).map_err(|e| Error::Input(e.to_string()))?;
    RadialProfile::from_samples(grid, v.clone())
}

pub fn write_data_csv(path: &Path, d: &RadialData) -> Result<()> {
    let rows = (0..d.r_grid.n).map(|k| vec![d.r_grid.r(k), d.u0[k], d.u1[k]]);
    write_atomic(path, &csv_bytes(&["r", "u0", "u1"], rows)?)
}

/// Reads `r,u0,u1` with `r_k = (k + 1) h`.
pub fn read_data_csv(path: &Path) -> Result<RadialData> {
    let cols = read_columns(path, &["r", "u0", "u1"])?;
    let rg = RadialGrid::from_radii(&cols[0]).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    RadialData::new(rg, cols[1].clone(), cols[2].clone())
}

/// `r,t,u` rows.
pub fn write_evaluation_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let it = rows.iter().map(|&(r, t, u)| vec![r, t, u]);
    write_atomic(path, &csv_bytes(&["r", "t", "u"], it)?)
}

/// `t,r,u,ut` for every stored time and every `radial_stride`-th node.
pub fn write_snapshots_csv(path: &Path, sol: &ExteriorSolution, radial_stride: usize) -> Result<()> {
    let stride = radial_stride.max(1);
    let mut rows = Vec::new();
    for s in &sol.snapshots {
        for k in (0..s.u.len()).step_by(stride) {
            rows.push(vec![s.t, sol.r(k), s.u[k], s.ut[k]]);
        }
    }
    write_atomic(path, &csv_bytes(&["t", "r", "u", "ut"], rows.into_iter())?)
}

/// `t,r,diff` heatmap rows.
pub fn write_overlap_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let it = rows.iter().map(|&(t, r, d)| vec![t, r, d]);
    write_atomic(path, &csv_bytes(&["t", "r", "diff"], it)?)
}

/// Summary of a fixed-point run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub alpha: f64,
    pub beta: f64,
    pub order: Order,
    #[serde(rename = "R")]
    pub radius: f64,
    pub c: f64,
    pub iters: usize,
    pub ratios: Vec<f64>,
    pub tail_norms: Vec<f64>,
    pub energy_trace: Vec<(f64, f64)>,
    pub energy_monotone: bool,
    pub max_picard_ratio: f64,
    pub config: FixpointConfig,
}

impl RunRecord {
    pub fn from_fixed_point(fp: &FixedPoint) -> Self {
        Self {
            alpha: fp.config.alpha,
            beta: fp.config.beta,
            order: fp.order,
            radius: fp.radius,
            c: fp.config.c,
            iters: fp.diagnostics.iterations,
            ratios: fp.diagnostics.ratios.clone(),
            tail_norms: fp.diagnostics.tail_norms.clone(),
            energy_trace: fp.diagnostics.energy_trace.clone(),
            energy_monotone: fp.diagnostics.energy_monotone,
            max_picard_ratio: fp.diagnostics.max_picard_ratio,
            config: fp.config.clone(),
        }
    }
}

/// Writes `run.json`, `profile.csv`, `tail.csv` and one `iterate_<k>.csv` per iterate into `dir`.
pub fn write_run(dir: &Path, fp: &FixedPoint) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("run.json"), &RunRecord::from_fixed_point(fp))?;
    write_profile_csv(&dir.join("profile.csv"), &fp.profile)?;
    write_profile_csv(&dir.join("tail.csv"), &fp.tail)?;
    for (k, g) in fp.iterates.iter().enumerate() {
        write_profile_csv(&dir.join(format!("iterate_{k:02}.csv")), g)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("nonrad-io-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn profile_roundtrip() {
        let dir = scratch("profile");
        let g = RadialProfile::from_fn(GridSpec::symmetric(4.0, 0.125).unwrap(), |s| (-s * s).exp());
        let p = dir.join("g.csv");
        write_profile_csv(&p, &g).unwrap();
        let back = read_profile_csv(&p).unwrap();
        assert_eq!(back.grid().len(), g.grid().len());
        for i in 0..g.len() {
            assert!((back.value(i) - g.value(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn data_roundtrip_and_errors() {
        let dir = scratch("data");
        let rg = RadialGrid::up_to(4.0, 0.25).unwrap();
        let d = RadialData::from_fn(rg, |r| r, |r| -r);
        let p = dir.join("d.csv");
        write_data_csv(&p, &d).unwrap();
        assert_eq!(read_data_csv(&p).unwrap(), d);
        fs::write(&p, "r,u0,u1\n0.25,1,2\n0.5,x,3\n").unwrap();
        assert!(matches!(read_data_csv(&p), Err(Error::Input(_))));
        fs::write(&p, "r,u0\n0.25,1\n").unwrap();
        assert!(matches!(read_data_csv(&p), Err(Error::Input(_))));
        fs::write(&p, "r,u0,u1\n0.25,1,2\n0.5,1,3\n0.8,1,1\n").unwrap();
        assert!(matches!(read_data_csv(&p), Err(Error::Input(_))));
    }
}
