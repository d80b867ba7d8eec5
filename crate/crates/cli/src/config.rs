//! TOML run description.
//!
//! ```toml
//! lambda = 0.0
//! delta_amp = 1.0
//! n_particles = 100000
//! t_end = 300.0
//! seed = 7
//! # optional: a_rate = 1, b_rate = 0, m_party = 0, dt = 0.1 / a_rate,
//! # output_every, histogram_every, histogram_bins = 100,
//! # kernel = "moller" | "literal-flux",
//! # closure = "mj-consistent" | "as-printed",
//! # exec = { mode = "deterministic" } | { mode = "parallel", chunks = 64 }
//!
//! [init]
//! kind = "ranges"
//! ranges = [ { lo = 0.99, hi = 1.0, weight = 1.0 },
//!            { lo = -1.0, hi = -0.8, weight = 1.0 } ]
//! # or: kind = "juttner", chi = 2.0, mbar = 0.0
//! ```

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bounded_opinion::dsmc::{InitialCondition, KernelKind, SimConfig};
use bounded_opinion::equilibrium::EnergyClosure;
use bounded_opinion::par::ExecMode;
use serde::Deserialize;

pub const REQUIRED_FIELDS: [&str; 6] = ["lambda", "delta_amp", "n_particles", "t_end", "seed", "init"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lambda: f64,
    delta_amp: f64,
    #[serde(default = "one")]
    a_rate: f64,
    #[serde(default)]
    b_rate: f64,
    #[serde(default)]
    m_party: f64,
    n_particles: usize,
    dt: Option<f64>,
    t_end: f64,
    seed: u64,
    init: InitialCondition,
    output_every: Option<u64>,
    histogram_every: Option<u64>,
    histogram_bins: Option<usize>,
    #[serde(default)]
    kernel: KernelKind,
    #[serde(default)]
    closure: EnergyClosure,
    #[serde(default)]
    exec: ExecMode,
}

fn one() -> f64 {
    1.0
}

/// About a thousand flow rows per run.
pub fn default_output_every(t_end: f64, dt: f64) -> u64 {
    ((t_end / dt / 1000.0).round() as u64).max(1)
}

/// About fifty histogram snapshots per run.
pub fn default_histogram_every(t_end: f64, dt: f64) -> u64 {
    ((t_end / dt / 50.0).round() as u64).max(1)
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    let table: toml::Table = toml::from_str(text).context("config is not valid TOML")?;
    let missing: Vec<&str> = REQUIRED_FIELDS.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        bail!("config error: missing required fields: {}", missing.join(", "));
    }
    let f: FileConfig = toml::from_str(text).map_err(|e| anyhow!("config error: {}", e.message()))?;
    let dt = f.dt.unwrap_or_else(|| SimConfig::default_dt(f.a_rate));
    let cfg = SimConfig {
        lambda: f.lambda,
        delta_amp: f.delta_amp,
        a_rate: f.a_rate,
        b_rate: f.b_rate,
        m_party: f.m_party,
        n_particles: f.n_particles,
        dt,
        t_end: f.t_end,
        seed: f.seed,
        init: f.init,
        output_every: f.output_every.unwrap_or_else(|| default_output_every(f.t_end, dt)),
        histogram_every: f.histogram_every.unwrap_or_else(|| default_histogram_every(f.t_end, dt)),
        histogram_bins: f.histogram_bins.unwrap_or(100),
        kernel: f.kernel,
        closure: f.closure,
        exec: f.exec,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}
