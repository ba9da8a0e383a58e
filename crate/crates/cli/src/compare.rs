//! The `compare` subcommand: pairwise curve distances between runs at
//! their common snapshot times.

use crate::error::{CliError, Result};
use crate::output::fmt;
use slrf_core::{curve_distance, GeneratingCurve, Method};
use std::path::{Path, PathBuf};

/// Curves of one run, ordered by snapshot time.
pub struct RunCurves {
    pub dir: PathBuf,
    pub curves: Vec<GeneratingCurve>,
}

/// Parse the embeddings.csv of a run directory back into curves.
pub fn load_embeddings(dir: &Path) -> Result<RunCurves> {
    let path = dir.join("embeddings.csv");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut curves: Vec<GeneratingCurve> = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Config(format!(
                "{}:{}: expected 5 columns",
                path.display(),
                lineno + 1
            )));
        }
        let bad = |what: &str| {
            CliError::Config(format!("{}:{}: bad {what}", path.display(), lineno + 1))
        };
        let t: f64 = fields[0].parse().map_err(|_| bad("t"))?;
        let x: f64 = fields[2].parse().map_err(|_| bad("x"))?;
        let y: f64 = fields[3].parse().map_err(|_| bad("y"))?;
        let source: Method = fields[4].parse().map_err(|_| bad("source"))?;
        match curves.last_mut() {
            Some(curve) if curve.t == t => curve.points.push([x, y]),
            _ => curves.push(GeneratingCurve {
                t,
                source,
                points: vec![[x, y]],
            }),
        }
    }
    if curves.is_empty() {
        return Err(CliError::Config(format!(
            "{} holds no embedded snapshots",
            path.display()
        )));
    }
    Ok(RunCurves {
        dir: dir.to_path_buf(),
        curves,
    })
}

#[derive(Debug)]
pub struct PairReport {
    pub dir_a: PathBuf,
    pub dir_b: PathBuf,
    /// `(t_a, distance)` per common snapshot time, in time order.
    pub distances: Vec<(f64, f64)>,
    pub max_distance: f64,
}

impl PairReport {
    /// Distance at the latest common snapshot time.
    pub fn latest(&self) -> (f64, f64) {
        *self.distances.last().expect("non-empty by construction")
    }
}

#[derive(Debug)]
pub struct CompareReport {
    pub pairs: Vec<PairReport>,
}

/// Compare every pair of run directories at snapshot times matching within
/// `time_tol`.
pub fn compare_dirs(dirs: &[PathBuf], time_tol: f64) -> Result<CompareReport> {
    if dirs.len() < 2 {
        return Err(CliError::Config("compare needs at least two run directories".into()));
    }
    let runs: Vec<RunCurves> = dirs.iter().map(|d| load_embeddings(d)).collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            let mut distances = Vec::new();
            for curve_a in &runs[a].curves {
                let nearest = runs[b]
                    .curves
                    .iter()
                    .min_by(|x, y| {
                        (x.t - curve_a.t)
                            .abs()
                            .partial_cmp(&(y.t - curve_a.t).abs())
                            .expect("finite times")
                    })
                    .expect("non-empty");
                if (nearest.t - curve_a.t).abs() <= time_tol {
                    distances.push((curve_a.t, curve_distance(curve_a, nearest)));
                }
            }
            if distances.is_empty() {
                return Err(CliError::Config(format!(
                    "no overlapping snapshot times between {} and {} (tolerance {time_tol})",
                    runs[a].dir.display(),
                    runs[b].dir.display()
                )));
            }
            let max_distance = distances.iter().map(|&(_, d)| d).fold(0.0, f64::max);
            pairs.push(PairReport {
                dir_a: runs[a].dir.clone(),
                dir_b: runs[b].dir.clone(),
                distances,
                max_distance,
            });
        }
    }
    Ok(CompareReport { pairs })
}

/// Render the report as CSV rows: `dir_a,dir_b,t,distance`.
pub fn report_csv(report: &CompareReport) -> String {
    let mut out = String::from("dir_a,dir_b,t,distance\n");
    for pair in &report.pairs {
        for &(t, d) in &pair.distances {
            out.push_str(&format!(
                "{},{},{},{}\n",
                pair.dir_a.display(),
                pair.dir_b.display(),
                fmt(t),
                fmt(d)
            ));
        }
    }
    out
}

pub fn print_report(report: &CompareReport) {
    for pair in &report.pairs {
        println!(
            "{} vs {}: {} common times, max distance {}",
            pair.dir_a.display(),
            pair.dir_b.display(),
            pair.distances.len(),
            fmt(pair.max_distance)
        );
        let (t, d) = pair.latest();
        println!("  latest common t = {}: distance {}", fmt(t), fmt(d));
    }
}
