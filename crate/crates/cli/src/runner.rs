//! The `run` subcommand: drive a solver from initial data to termination
//! and emit the output files.

use crate::error::{CliError, Result};
use crate::output::{self, Manifest, ManifestFile};
use crate::settings::RunSettings;
use slrf_core::embed::{embed_lattice, embed_metric};
use slrf_core::{
    run_fd, run_flow, GeneratingCurve, LadderLattice, Method, MetricGrid, Termination,
};

/// Fractional error of the shrinking-sphere law, `e = (r^2 - 1 + 2t)/r^2`.
fn sphere_error(r_sq: f64, t: f64) -> f64 {
    (r_sq - 1.0 + 2.0 * t) / r_sq
}

/// Error series from lattice snapshots: a meridian of a round sphere of
/// radius r has total rail length pi r, so `r^2 = (sum L_y / pi)^2`.
pub fn sphere_error_series_lattice(snapshots: &[LadderLattice]) -> Vec<(f64, f64)> {
    snapshots
        .iter()
        .map(|s| {
            let r_sq = (s.total_rail_length() / std::f64::consts::PI).powi(2);
            (s.t, sphere_error(r_sq, s.t))
        })
        .collect()
}

/// Error series from fd snapshots: `r^2 = m(pi/2)` at the equator sample.
pub fn sphere_error_series_fd(snapshots: &[MetricGrid]) -> Vec<(f64, f64)> {
    snapshots
        .iter()
        .map(|s| {
            let r_sq = s.m[(s.n_points() - 1) / 2];
            (s.t, sphere_error(r_sq, s.t))
        })
        .collect()
}

pub struct RunOutcome {
    pub termination: Termination,
    pub out_dir: std::path::PathBuf,
}

pub fn run(settings: &RunSettings) -> Result<RunOutcome> {
    std::fs::create_dir_all(&settings.out_dir)?;
    let dir = settings.out_dir.as_path();
    let config = &settings.config;
    let is_sphere = config.c3 == 0.0 && config.c5 == 0.0;

    let mut files: Vec<ManifestFile> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let push = |name: &str, rows: usize, files: &mut Vec<ManifestFile>| {
        files.push(ManifestFile {
            name: name.into(),
            rows,
        });
    };

    let (termination, t_start, t_end);
    match config.method {
        Method::Fd => {
            let run = run_fd(config)?;
            termination = run.termination.clone();
            t_start = run.snapshots.first().map_or(0.0, |s| s.t);
            t_end = run.snapshots.last().map_or(0.0, |s| s.t);

            let rows = output::write_fd_snapshots(&dir.join("snapshots.csv"), &run.snapshots)?;
            push("snapshots.csv", rows, &mut files);
            let rows = output::write_diagnostics(&dir.join("diagnostics.csv"), &run.diagnostics)?;
            push("diagnostics.csv", rows, &mut files);

            let mut curves: Vec<GeneratingCurve> = Vec::new();
            for snap in &run.snapshots {
                match embed_metric(snap, settings.tol_embed) {
                    Ok(curve) => curves.push(curve),
                    Err(e) => notes.push(format!("embedding skipped at t = {}: {e}", snap.t)),
                }
            }
            let rows = output::write_embeddings(&dir.join("embeddings.csv"), &curves)?;
            push("embeddings.csv", rows, &mut files);

            if is_sphere {
                let series = sphere_error_series_fd(&run.snapshots);
                let rows = output::write_sphere_error(&dir.join("sphere_error.csv"), &series)?;
                push("sphere_error.csv", rows, &mut files);
            }
        }
        method => {
            let run = run_flow(config)?;
            termination = run.termination.clone();
            t_start = run.snapshots.first().map_or(0.0, |s| s.t);
            t_end = run.snapshots.last().map_or(0.0, |s| s.t);

            let rows = output::write_lattice_snapshots(&dir.join("snapshots.csv"), &run.snapshots)?;
            push("snapshots.csv", rows, &mut files);
            let rows = output::write_diagnostics(&dir.join("diagnostics.csv"), &run.diagnostics)?;
            push("diagnostics.csv", rows, &mut files);

            let mut curves: Vec<GeneratingCurve> = Vec::new();
            for snap in &run.snapshots {
                match embed_lattice(snap, config.delta_theta, method, settings.tol_embed) {
                    Ok(curve) => curves.push(curve),
                    Err(e) => notes.push(format!("embedding skipped at t = {}: {e}", snap.t)),
                }
            }
            let rows = output::write_embeddings(&dir.join("embeddings.csv"), &curves)?;
            push("embeddings.csv", rows, &mut files);

            if is_sphere {
                let series = sphere_error_series_lattice(&run.snapshots);
                let rows = output::write_sphere_error(&dir.join("sphere_error.csv"), &series)?;
                push("sphere_error.csv", rows, &mut files);
            }
        }
    }

    let termination_label = match &termination {
        Termination::StopCriterion => "stop-criterion".to_string(),
        Termination::MaxSteps => "max-steps".to_string(),
        Termination::Failed(e) => format!("numerical-failure: {e}"),
    };
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        preset: settings.preset.clone(),
        config: config.into(),
        t_start,
        t_end,
        termination: termination_label,
        files,
        notes,
    };
    output::write_manifest(&dir.join("manifest.json"), &manifest)?;

    if let Termination::Failed(e) = &termination {
        return Err(CliError::Numerical(format!(
            "{e} (partial outputs in {})",
            dir.display()
        )));
    }
    Ok(RunOutcome {
        termination,
        out_dir: dir.to_path_buf(),
    })
}
