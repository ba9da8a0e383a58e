//! Deterministic CSV and manifest writers. All floating-point values are
//! printed with 17 significant digits, so identical runs produce
//! byte-identical files.

use crate::error::Result;
use serde::Serialize;
use slrf_core::{FlowConfig, GeneratingCurve, LadderLattice, MetricGrid, StepDiagnostics};
use std::io::Write;
use std::path::Path;

/// Full-precision decimal form (17 significant digits).
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(contents.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Write lattice snapshots; returns the data row count. The rail column is
/// empty on the last vertex, which has no outgoing segment.
pub fn write_lattice_snapshots(path: &Path, snapshots: &[LadderLattice]) -> Result<usize> {
    let mut out = String::from("t,i,s,L_x,L_y,R\n");
    let mut rows = 0;
    for snap in snapshots {
        let s = snap.arclength();
        let t = fmt(snap.t);
        for i in 0..=snap.n() {
            let l_y = if i < snap.n() { fmt(snap.l_y[i]) } else { String::new() };
            out.push_str(&format!(
                "{t},{i},{},{},{l_y},{}\n",
                fmt(s[i]),
                fmt(snap.l_x[i]),
                fmt(snap.ricci[i])
            ));
            rows += 1;
        }
    }
    write_file(path, &out)?;
    Ok(rows)
}

pub fn write_fd_snapshots(path: &Path, snapshots: &[MetricGrid]) -> Result<usize> {
    let mut out = String::from("t,i,rho,h,m\n");
    let mut rows = 0;
    for snap in snapshots {
        let t = fmt(snap.t);
        for i in 0..snap.n_points() {
            out.push_str(&format!(
                "{t},{i},{},{},{}\n",
                fmt(snap.rho(i)),
                fmt(snap.h[i]),
                fmt(snap.m[i])
            ));
            rows += 1;
        }
    }
    write_file(path, &out)?;
    Ok(rows)
}

pub fn write_diagnostics(path: &Path, diagnostics: &[StepDiagnostics]) -> Result<usize> {
    let mut out = String::from("step,t,dt,max_R,min_L_y,regridded\n");
    for d in diagnostics {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            d.step_index,
            fmt(d.t),
            fmt(d.dt),
            fmt(d.max_ricci),
            fmt(d.min_rail),
            u8::from(d.regrid_performed)
        ));
    }
    write_file(path, &out)?;
    Ok(diagnostics.len())
}

pub fn write_embeddings(path: &Path, curves: &[GeneratingCurve]) -> Result<usize> {
    let mut out = String::from("t,i,x,y,source\n");
    let mut rows = 0;
    for curve in curves {
        let t = fmt(curve.t);
        let source = curve.source.as_str();
        for (i, p) in curve.points.iter().enumerate() {
            out.push_str(&format!("{t},{i},{},{},{source}\n", fmt(p[0]), fmt(p[1])));
            rows += 1;
        }
    }
    write_file(path, &out)?;
    Ok(rows)
}

pub fn write_sphere_error(path: &Path, series: &[(f64, f64)]) -> Result<usize> {
    let mut out = String::from("t,e\n");
    for &(t, e) in series {
        out.push_str(&format!("{},{}\n", fmt(t), fmt(e)));
    }
    write_file(path, &out)?;
    Ok(series.len())
}

#[derive(Debug, Serialize)]
pub struct ManifestFile {
    pub name: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub c3: f64,
    pub c5: f64,
    pub n: usize,
    pub delta_theta: f64,
    pub courant_factor: f64,
    pub timestep_mode: String,
    pub ghost_depth: usize,
    pub interp_start: usize,
    pub regrid_every: usize,
    pub stop_factor: f64,
    pub method: String,
    pub snapshot_every: usize,
    pub snapshot_times: Vec<f64>,
    pub max_steps: Option<usize>,
    pub seed_r_from_legs: bool,
    pub fd_scheme: String,
    pub fd_dt: Option<f64>,
}

impl From<&FlowConfig> for ConfigEcho {
    fn from(c: &FlowConfig) -> Self {
        ConfigEcho {
            c3: c.c3,
            c5: c.c5,
            n: c.n,
            delta_theta: c.delta_theta,
            courant_factor: c.courant_factor,
            timestep_mode: c.timestep_mode.as_str().into(),
            ghost_depth: c.ghost_depth,
            interp_start: c.interp_start,
            regrid_every: c.regrid_every,
            stop_factor: c.stop_factor,
            method: c.method.as_str().into(),
            snapshot_every: c.snapshot_every,
            snapshot_times: c.snapshot_times.clone(),
            max_steps: c.max_steps,
            seed_r_from_legs: c.seed_r_from_legs,
            fd_scheme: c.fd_scheme.as_str().into(),
            fd_dt: c.fd_dt,
        }
    }
}

/// Run summary written once per run; the inventory lists every emitted
/// file with its data row count.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub preset: Option<String>,
    pub config: ConfigEcho,
    pub t_start: f64,
    pub t_end: f64,
    pub termination: String,
    pub files: Vec<ManifestFile>,
    pub notes: Vec<String>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_file(path, &(json + "\n"))
}
