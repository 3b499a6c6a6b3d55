//! CSV profiles and the run directory layout.
//!
//! One row per cell, x fastest. Columns are `x,rho,j` in one dimension and
//! `x,y,rho,jx,jy` in two. Missing values are written as `NaN`.

use std::fs;
use std::path::{Path, PathBuf};

use apmc_core::{CellStats, SpatialGrid};

use crate::error::{Result, SimError};
use crate::runner::{snapshot_name, RunOutput, Snapshot};

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub dim: usize,
    pub centers: Vec<[f64; 2]>,
    pub rho: Vec<f64>,
    pub flux: Vec<[f64; 2]>,
}

impl Profile {
    pub fn from_stats(grid: &SpatialGrid, stats: &CellStats) -> Self {
        Self {
            dim: grid.dim(),
            centers: (0..grid.num_cells()).map(|c| grid.center(c)).collect(),
            rho: stats.rho.clone(),
            flux: stats.flux.clone(),
        }
    }

    /// Uniform grid whose cell centres are `centers`.
    pub fn grid(&self) -> Result<SpatialGrid> {
        let bad = || SimError::field("profile", "cell centres do not form a uniform grid");
        let c = &self.centers;
        if c.is_empty() {
            return Err(bad());
        }
        let nx = if self.dim == 1 { c.len() } else { c.iter().take_while(|p| p[1] == c[0][1]).count() };
        if !c.len().is_multiple_of(nx) {
            return Err(bad());
        }
        let ny = c.len() / nx;
        let hx = if nx > 1 { c[1][0] - c[0][0] } else { return Err(bad()) };
        let grid = if self.dim == 1 {
            SpatialGrid::new_1d(c[0][0] - hx / 2.0, c[0][0] + hx * (nx as f64 - 0.5), nx)
        } else {
            let hy = if ny > 1 { c[nx][1] - c[0][1] } else { return Err(bad()) };
            SpatialGrid::new_2d(
                [c[0][0] - hx / 2.0, c[0][1] - hy / 2.0],
                [c[0][0] + hx * (nx as f64 - 0.5), c[0][1] + hy * (ny as f64 - 0.5)],
                [nx, ny],
            )
        }
        .map_err(|_| bad())?;
        let tol = 1e-9 * (1.0 + hx.abs());
        let uniform = c.iter().enumerate().all(|(k, p)| {
            let q = grid.center(k);
            (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol
        });
        if uniform {
            Ok(grid)
        } else {
            Err(bad())
        }
    }
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.17e}")
    }
}

pub fn write_csv(path: &Path, grid: &SpatialGrid, stats: &CellStats) -> Result<()> {
    let csv_err = |e: csv::Error| SimError::Csv { path: path.to_path_buf(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if grid.dim() == 1 {
        w.write_record(["x", "rho", "j"]).map_err(csv_err)?;
    } else {
        w.write_record(["x", "y", "rho", "jx", "jy"]).map_err(csv_err)?;
    }
    for c in 0..grid.num_cells() {
        let p = grid.center(c);
        let f = stats.flux[c];
        let row = if grid.dim() == 1 {
            vec![fmt(p[0]), fmt(stats.rho[c]), fmt(f[0])]
        } else {
            vec![fmt(p[0]), fmt(p[1]), fmt(stats.rho[c]), fmt(f[0]), fmt(f[1])]
        };
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::Io { path: path.to_path_buf(), source: e })
}

pub fn read_csv(path: &Path) -> Result<Profile> {
    let err = |m: String| SimError::Csv { path: path.to_path_buf(), message: m };
    let mut r = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let header: Vec<String> = r.headers().map_err(|e| err(e.to_string()))?.iter().map(str::to_owned).collect();
    let dim = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "rho", "j"] => 1,
        ["x", "y", "rho", "jx", "jy"] => 2,
        _ => return Err(err(format!("unexpected header {header:?}"))),
    };
    let mut p = Profile { dim, centers: Vec::new(), rho: Vec::new(), flux: Vec::new() };
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let v = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| err(format!("row {}: `{s}` is not a number", line + 2))))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != header.len() {
            return Err(err(format!("row {}: expected {} columns", line + 2, header.len())));
        }
        if dim == 1 {
            p.centers.push([v[0], 0.0]);
            p.rho.push(v[1]);
            p.flux.push([v[2], 0.0]);
        } else {
            p.centers.push([v[0], v[1]]);
            p.rho.push(v[2]);
            p.flux.push([v[3], v[4]]);
        }
    }
    Ok(p)
}

fn write_all(dir: &Path, prefix: &str, grid: &SpatialGrid, snaps: &[Snapshot]) -> Result<()> {
    for s in snaps {
        write_csv(&dir.join(snapshot_name(prefix, s.time)), grid, &s.stats)?;
    }
    Ok(())
}

/// Writes the run into `dir`:
///
/// * `snapshot_t<time>.csv`: replicate mean or deterministic solution
/// * `reference_t<time>.csv`: reference solution, when one is configured
/// * `stderr_t<time>.csv` and `replicate_<r>/`: with two or more replicates
/// * `report.json`, `scenario.json`
pub fn write_run(dir: &Path, run: &RunOutput) -> Result<Vec<PathBuf>> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |e| SimError::Io { path: p, source: e }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    write_all(dir, "snapshot", &run.grid, &run.result)?;
    if let Some(r) = &run.reference {
        write_all(dir, "reference", &run.grid, r)?;
    }
    if let Some(e) = &run.stderr {
        write_all(dir, "stderr", &run.grid, e)?;
    }
    if run.replicates.len() > 1 {
        for rep in &run.replicates {
            let sub = dir.join(format!("replicate_{}", rep.replicate));
            fs::create_dir_all(&sub).map_err(io(&sub))?;
            write_all(&sub, "snapshot", &run.grid, &rep.snapshots)?;
        }
    }
    let report = dir.join("report.json");
    let text = serde_json::to_string_pretty(&run.report)?;
    fs::write(&report, text).map_err(io(&report))?;
    let scenario = dir.join("scenario.json");
    fs::write(&scenario, run.scenario.to_json()).map_err(io(&scenario))?;
    Ok(vec![report, scenario])
}
