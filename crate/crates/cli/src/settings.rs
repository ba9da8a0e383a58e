//! Resolution of the effective run configuration: defaults, then preset,
//! then config file, then command-line flags.

use crate::args::RunArgs;
use crate::error::{CliError, Result};
use slrf_core::{FlowConfig, InitialProfile, Method};
use std::path::{Path, PathBuf};

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub config: FlowConfig,
    pub preset: Option<String>,
    pub out_dir: PathBuf,
    pub snapshot_count: usize,
    pub tol_embed: f64,
}

struct Raw {
    args: RunArgs,
}

pub fn resolve(args: &RunArgs) -> Result<RunSettings> {
    let mut raw = Raw { args: args.clone() };

    if let Some(path) = raw.args.config.clone() {
        apply_config_file(&mut raw, &path)?;
    }
    if let Some(name) = raw.args.preset.clone() {
        apply_preset(&mut raw, &name)?;
    }

    let args = &raw.args;
    let method: Method = args
        .method
        .as_deref()
        .unwrap_or("slrf-v1")
        .parse()
        .map_err(|e: slrf_core::FlowError| CliError::Config(e.to_string()))?;
    let defaults = FlowConfig::default();
    let n = args.n.unwrap_or(if method == Method::Fd { 801 } else { 100 });

    let mut config = FlowConfig {
        c3: args.c3.unwrap_or(0.0),
        c5: args.c5.unwrap_or(0.0),
        n,
        method,
        ..defaults
    };
    if let Some(v) = args.delta_theta {
        config.delta_theta = v;
    }
    if let Some(v) = args.courant_factor {
        config.courant_factor = v;
    }
    if let Some(ref v) = args.timestep_mode {
        config.timestep_mode = v
            .parse()
            .map_err(|e: slrf_core::FlowError| CliError::Config(e.to_string()))?;
    }
    if let Some(v) = args.ghost_depth {
        config.ghost_depth = v;
    }
    if let Some(v) = args.interp_start {
        config.interp_start = v;
    }
    if let Some(v) = args.regrid_every {
        config.regrid_every = v;
    }
    if let Some(v) = args.stop_factor {
        config.stop_factor = v;
    }
    if let Some(v) = args.snapshot_every {
        config.snapshot_every = v;
    }
    config.max_steps = args.max_steps;
    if let Some(v) = args.seed_r_from_legs {
        config.seed_r_from_legs = v;
    }
    if let Some(ref v) = args.fd_scheme {
        config.fd_scheme = v
            .parse()
            .map_err(|e: slrf_core::FlowError| CliError::Config(e.to_string()))?;
    }
    if args.fd_dt.is_some() {
        config.fd_dt = args.fd_dt;
    }

    let snapshot_count = args.snapshot_count.unwrap_or(20);
    // Time-based cadence: uniformly spaced targets up to the analytic
    // extinction time t = A(0) / 8 pi, shared by every solver on the same
    // initial data so cross-method runs snapshot at matching times.
    if config.snapshot_every == 0 && snapshot_count > 0 {
        let profile =
            InitialProfile::new(config.c3, config.c5).map_err(|e| CliError::Config(e.to_string()))?;
        let t_ext = profile.extinction_time();
        config.snapshot_times = (1..=snapshot_count)
            .map(|k| t_ext * k as f64 / snapshot_count as f64)
            .collect();
    }

    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let out_dir = args.out.clone().unwrap_or_else(|| {
        let tag = raw
            .args
            .preset
            .clone()
            .unwrap_or_else(|| format!("c3_{}_c5_{}", config.c3, config.c5));
        PathBuf::from(format!("runs/{tag}-{}-n{}", method.as_str(), config.n))
    });

    Ok(RunSettings {
        config,
        preset: raw.args.preset.clone(),
        out_dir,
        snapshot_count,
        tol_embed: args.tol_embed.unwrap_or(slrf_core::DEFAULT_TOL_EMBED),
    })
}

fn apply_preset(raw: &mut Raw, name: &str) -> Result<()> {
    let (c3, c5, stop) = match name {
        "sphere" => (0.0, 0.0, 200.0),
        "single-dumbbell" => (0.766, -0.091, 400.0),
        "double-dumbbell" => (0.021, 0.598, 400.0),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset '{other}' (expected sphere, single-dumbbell or double-dumbbell)"
            )))
        }
    };
    let a = &mut raw.args;
    a.c3.get_or_insert(c3);
    a.c5.get_or_insert(c5);
    a.stop_factor.get_or_insert(stop);
    Ok(())
}

fn apply_config_file(raw: &mut Raw, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        set_key(&mut raw.args, key, value).map_err(|msg| {
            CliError::Config(format!("{}:{}: {msg}", path.display(), lineno + 1))
        })?;
    }
    Ok(())
}

/// Apply one config-file entry unless the same key was already given as a
/// flag (flags win).
fn set_key(args: &mut RunArgs, key: &str, value: &str) -> std::result::Result<(), String> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
    }
    match key {
        "c3" => drop(args.c3.get_or_insert(parse(key, value)?)),
        "c5" => drop(args.c5.get_or_insert(parse(key, value)?)),
        "n" => drop(args.n.get_or_insert(parse(key, value)?)),
        "delta_theta" => drop(args.delta_theta.get_or_insert(parse(key, value)?)),
        "courant_factor" => drop(args.courant_factor.get_or_insert(parse(key, value)?)),
        "timestep_mode" => drop(args.timestep_mode.get_or_insert(value.to_string())),
        "ghost_depth" => drop(args.ghost_depth.get_or_insert(parse(key, value)?)),
        "interp_start" => drop(args.interp_start.get_or_insert(parse(key, value)?)),
        "regrid_every" => drop(args.regrid_every.get_or_insert(parse(key, value)?)),
        "stop_factor" => drop(args.stop_factor.get_or_insert(parse(key, value)?)),
        "method" => drop(args.method.get_or_insert(value.to_string())),
        "snapshot_every" => drop(args.snapshot_every.get_or_insert(parse(key, value)?)),
        "snapshot_count" => drop(args.snapshot_count.get_or_insert(parse(key, value)?)),
        "max_steps" => drop(args.max_steps.get_or_insert(parse(key, value)?)),
        "seed_r_from_legs" => drop(args.seed_r_from_legs.get_or_insert(parse(key, value)?)),
        "fd_scheme" => drop(args.fd_scheme.get_or_insert(value.to_string())),
        "fd_dt" => drop(args.fd_dt.get_or_insert(parse(key, value)?)),
        "tol_embed" => drop(args.tol_embed.get_or_insert(parse(key, value)?)),
        other => return Err(format!("unknown config key '{other}'")),
    }
    Ok(())
}
