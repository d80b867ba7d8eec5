//! Parameter sets for each experiment.
//!
//! Horizons are not given for every test; each defaults to the longest
//! time the corresponding figure discusses, or to the time needed to
//! settle, and can be overridden.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use bounded_opinion::dsmc::{derive_seed, InitialCondition, KernelKind, OpinionRange, SimConfig};
use bounded_opinion::equilibrium::EnergyClosure;
use bounded_opinion::par::ExecMode;
use serde::{Deserialize, Serialize};

use crate::config::{default_histogram_every, default_output_every};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    C1,
    C2,
    DGrid,
    Fig1,
    Fig2,
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 12] = [
        Preset::A1,
        Preset::A2,
        Preset::A3,
        Preset::A4,
        Preset::B1,
        Preset::B2,
        Preset::C1,
        Preset::C2,
        Preset::DGrid,
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::A1 => "a1",
            Preset::A2 => "a2",
            Preset::A3 => "a3",
            Preset::A4 => "a4",
            Preset::B1 => "b1",
            Preset::B2 => "b2",
            Preset::C1 => "c1",
            Preset::C2 => "c2",
            Preset::DGrid => "d-grid",
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig7 => "fig7",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Preset::A1 => "collisional cooling, 0.99 <= |m| < 1",
            Preset::A2 => "collisional cooling, two asymmetric bands",
            Preset::A3 => "party drift to m_p = 0 with elastic swaps",
            Preset::A4 => "party drift to m_p = 0.97 with elastic swaps",
            Preset::B1 => "elastic collisions with noise, uniform start",
            Preset::B2 => "elastic collisions with noise, two bands",
            Preset::C1 => "inelastic collisions with noise, 0.8 <= |m| < 1",
            Preset::C2 => "inelastic collisions with noise, two bands",
            Preset::DGrid => "party drift plus noise, six (m_p, delta, B) cases",
            Preset::Fig1 => "psi1 table",
            Preset::Fig2 => "psi2 table",
            Preset::Fig7 => "runs a1 and a3 and overlays the limiting chi(t) laws",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        for p in Preset::ALL {
            if p.name() == s {
                return Ok(p);
            }
        }
        let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        bail!("unknown preset {s:?}; expected one of {}", names.join(", "))
    }
}

/// Command-line overrides applied after expansion.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub particles: Option<usize>,
    pub exec: Option<ExecMode>,
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRun {
    pub label: String,
    pub config: SimConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tabulation {
    Psi1,
    Psi2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub preset: Preset,
    pub runs: Vec<LabeledRun>,
    pub tables: Vec<Tabulation>,
    /// figure ids emitted once the runs finish
    pub figures: Vec<&'static str>,
}

pub const DEFAULT_PARTICLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 20_240_601;

fn band(lo: f64, hi: f64) -> InitialCondition {
    InitialCondition::symmetric_band(lo, hi)
}

fn two_bands(neg_lo: f64) -> InitialCondition {
    InitialCondition::Ranges {
        ranges: vec![
            OpinionRange { lo: 0.99, hi: 1.0, weight: 1.0 },
            OpinionRange { lo: -1.0, hi: neg_lo, weight: 1.0 },
        ],
    }
}

fn base(lambda: f64, delta_amp: f64, b_rate: f64, m_party: f64, t_end: f64, init: InitialCondition) -> SimConfig {
    let dt = SimConfig::default_dt(1.0);
    SimConfig {
        lambda,
        delta_amp,
        a_rate: 1.0,
        b_rate,
        m_party,
        n_particles: DEFAULT_PARTICLES,
        dt,
        t_end,
        seed: DEFAULT_SEED,
        init,
        output_every: default_output_every(t_end, dt),
        histogram_every: default_histogram_every(t_end, dt),
        histogram_bins: 100,
        kernel: KernelKind::Moller,
        closure: EnergyClosure::MjConsistent,
        exec: ExecMode::Deterministic,
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn runs_for(preset: Preset) -> Vec<LabeledRun> {
    let one = |label: &str, config| vec![LabeledRun { label: label.to_string(), config }];
    match preset {
        Preset::A1 => one("a1", base(0.0, 0.0, 0.0, 0.0, 20.0, band(0.99, 1.0))),
        Preset::A2 => one("a2", base(0.0, 0.0, 0.0, 0.0, 177.0, two_bands(-0.9))),
        Preset::A3 => one("a3", base(1.0, 0.0, 0.1, 0.0, 88.0, band(0.99, 1.0))),
        Preset::A4 => one("a4", base(1.0, 0.0, 0.1, 0.97, 80.0, two_bands(-0.8))),
        Preset::B1 | Preset::B2 => [1.0, 5.0]
            .iter()
            .map(|&d| {
                let init = if preset == Preset::B1 { band(0.0, 1.0) } else { two_bands(-0.8) };
                LabeledRun { label: format!("{preset}-delta{}", num(d)), config: base(1.0, d, 0.0, 0.0, 30.0, init) }
            })
            .collect(),
        Preset::C1 => [1.0, 5.0, 11.5, 25.0]
            .iter()
            .map(|&d| LabeledRun {
                label: format!("c1-delta{}", num(d)),
                config: base(0.0, d, 0.0, 0.0, 100.0, band(0.8, 1.0)),
            })
            .collect(),
        // the weak-noise case settles only after ~2500 time units
        Preset::C2 => [(1.0, 3000.0), (11.5, 300.0)]
            .iter()
            .map(|&(d, t)| LabeledRun {
                label: format!("c2-delta{}", num(d)),
                config: base(0.0, d, 0.0, 0.0, t, two_bands(-0.8)),
            })
            .collect(),
        Preset::DGrid => {
            let mut v = Vec::new();
            for &(d, b) in &[(1.0, 0.1), (11.5, 1.0)] {
                for &mp in &[0.0, 0.5, 0.8] {
                    v.push(LabeledRun {
                        label: format!("d-mp{}-delta{}-b{}", num(mp), num(d), num(b)),
                        config: base(0.0, d, b, mp, 100.0, band(0.8, 1.0)),
                    });
                }
            }
            v
        }
        Preset::Fig7 => {
            let mut v = runs_for(Preset::A1);
            v.extend(runs_for(Preset::A3));
            v
        }
        Preset::Fig1 | Preset::Fig2 => Vec::new(),
    }
}

/// Expands a preset into runs with overrides applied. Multi-run presets
/// give each run its own stream derived from the master seed.
pub fn expand(preset: Preset, ov: &Overrides) -> Result<Plan> {
    let mut runs = runs_for(preset);
    let master = ov.seed.unwrap_or(DEFAULT_SEED);
    let multi = runs.len() > 1;
    for (i, r) in runs.iter_mut().enumerate() {
        let c = &mut r.config;
        c.seed = if multi { derive_seed(master, i as u64) } else { master };
        if let Some(n) = ov.particles {
            c.n_particles = n;
        }
        if let Some(e) = ov.exec {
            c.exec = e;
        }
        if let Some(t) = ov.t_end {
            c.t_end = t;
            c.output_every = default_output_every(t, c.dt);
            c.histogram_every = default_histogram_every(t, c.dt);
        }
        c.validate()?;
    }
    let (tables, figures) = match preset {
        Preset::Fig1 => (vec![Tabulation::Psi1], vec!["fig1"]),
        Preset::Fig2 => (vec![Tabulation::Psi2], vec!["fig2"]),
        Preset::Fig7 => (vec![], vec!["fig7-left", "fig7-right"]),
        _ => (vec![], vec![]),
    };
    Ok(Plan { preset, runs, tables, figures })
}

/// Labels produced by a preset.
pub fn labels(preset: Preset) -> Vec<String> {
    runs_for(preset).into_iter().map(|r| r.label).collect()
}
