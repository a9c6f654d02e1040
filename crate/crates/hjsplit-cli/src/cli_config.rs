//! Solver configuration assembly: registry defaults, then the config
//! file, then command-line flags (highest precedence).

use hjsplit::config::{PdhgConfig, RestartPolicy, ValueStop};
use std::path::Path;

/// The documented flat key-value config keys.
pub const CONFIG_KEYS: &[&str] = &[
    "sigma",
    "tau",
    "theta",
    "delta",
    "tol",
    "max_count",
    "seed",
    "init_radius",
    "sigma_bump",
    "restart_policy",
    "max_restarts",
    "value_tol",
];

#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigOverrides {
    /// Flat key-value config file (keys: sigma, tau, theta, delta, tol,
    /// max_count, seed, init_radius, sigma_bump, restart_policy,
    /// max_restarts, value_tol)
    #[arg(long, global = true)]
    pub config: Option<String>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_count: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub init_radius: Option<f64>,
    #[arg(long, global = true)]
    pub sigma_bump: Option<f64>,
    /// accept-at-cap | bump-sigma | reinit
    #[arg(long, global = true)]
    pub restart_policy: Option<String>,
    #[arg(long, global = true)]
    pub max_restarts: Option<u32>,
    #[arg(long, global = true)]
    pub value_tol: Option<f64>,
}

fn get_f64(table: &toml::Table, key: &str) -> Result<Option<f64>, String> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(v)) => Ok(Some(*v)),
        Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(other) => Err(format!("config key '{key}' must be a number, got {other}")),
    }
}

fn get_u64(table: &toml::Table, key: &str) -> Result<Option<u64>, String> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
        Some(other) => Err(format!(
            "config key '{key}' must be a nonnegative integer, got {other}"
        )),
    }
}

/// Applies a config file to a base configuration. Unknown keys are
/// rejected so that typos surface instead of silently using defaults.
pub fn apply_config_file(cfg: &mut PdhgConfig, path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| format!("config file {}: {e}", path.display()))?;
    for key in table.keys() {
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("unknown config key '{key}'"));
        }
    }
    if let Some(v) = get_f64(&table, "sigma")? {
        cfg.sigma = v;
    }
    if let Some(v) = get_f64(&table, "tau")? {
        cfg.tau = v;
    }
    if let Some(v) = get_f64(&table, "theta")? {
        cfg.theta = v;
    }
    if let Some(v) = get_f64(&table, "delta")? {
        cfg.delta = v;
    }
    if let Some(v) = get_f64(&table, "tol")? {
        cfg.tol = v;
    }
    if let Some(v) = get_u64(&table, "max_count")? {
        cfg.max_count = v as usize;
    }
    if let Some(v) = get_u64(&table, "seed")? {
        cfg.seed = v;
    }
    if let Some(v) = get_f64(&table, "init_radius")? {
        cfg.init_radius = v;
    }
    if let Some(v) = get_f64(&table, "sigma_bump")? {
        cfg.sigma_bump = v;
    }
    if let Some(v) = get_u64(&table, "max_restarts")? {
        cfg.max_restarts = v as u32;
    }
    if let Some(v) = get_f64(&table, "value_tol")? {
        cfg.value_tol = Some(v);
        if cfg.value_stop == ValueStop::Off {
            cfg.value_stop = ValueStop::FallbackAtCap;
        }
    }
    if let Some(toml::Value::String(s)) = table.get("restart_policy") {
        cfg.restart_policy = RestartPolicy::parse(s)
            .ok_or_else(|| format!("unknown restart_policy '{s}'"))?;
    } else if table.contains_key("restart_policy") {
        return Err("config key 'restart_policy' must be a string".into());
    }
    Ok(())
}

/// Applies file, then flags, onto a registry-provided base config.
pub fn resolve_config(base: PdhgConfig, overrides: &ConfigOverrides) -> Result<PdhgConfig, String> {
    let mut cfg = base;
    if let Some(path) = &overrides.config {
        apply_config_file(&mut cfg, Path::new(path))?;
    }
    if let Some(v) = overrides.sigma {
        // keep tau consistent unless the user also pins it
        if overrides.tau.is_none() {
            cfg.rescale_sigma(v);
        } else {
            cfg.sigma = v;
        }
    }
    if let Some(v) = overrides.tau {
        cfg.tau = v;
    }
    if let Some(v) = overrides.theta {
        cfg.theta = v;
    }
    if let Some(v) = overrides.delta {
        cfg.delta = v;
    }
    if let Some(v) = overrides.tol {
        cfg.tol = v;
    }
    if let Some(v) = overrides.max_count {
        cfg.max_count = v;
    }
    if let Some(v) = overrides.seed {
        cfg.seed = v;
    }
    if let Some(v) = overrides.init_radius {
        cfg.init_radius = v;
    }
    if let Some(v) = overrides.sigma_bump {
        cfg.sigma_bump = v;
    }
    if let Some(s) = &overrides.restart_policy {
        cfg.restart_policy =
            RestartPolicy::parse(s).ok_or_else(|| format!("unknown restart_policy '{s}'"))?;
    }
    if let Some(v) = overrides.max_restarts {
        cfg.max_restarts = v;
    }
    if let Some(v) = overrides.value_tol {
        cfg.value_tol = Some(v);
        if cfg.value_stop == ValueStop::Off {
            cfg.value_stop = ValueStop::FallbackAtCap;
        }
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}
