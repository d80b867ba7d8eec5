use std::path::PathBuf;

use anyhow::{bail, Result};
use bounded_opinion::par::ExecMode;
use bounded_opinion_cli::plotdata::figure_ids;
use bounded_opinion_cli::{
    emit_plotdata, expand, load_config, rerun_manifest, run_config, run_scenario, Overrides, Preset,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bounded-opinion", version, about = "Kinetic simulation of bounded opinions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Deterministic,
    Parallel,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset, a TOML config, or the config stored in a manifest.
    Run {
        /// preset name, see `list`
        #[arg(long, conflicts_with_all = ["config", "manifest"])]
        preset: Option<Preset>,
        /// TOML run description
        #[arg(long, conflicts_with = "manifest")]
        config: Option<PathBuf>,
        /// re-run the configuration recorded in a manifest.json
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// output root; each run writes to <out>/<label>
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// master seed
        #[arg(long)]
        seed: Option<u64>,
        /// particle count
        #[arg(long)]
        particles: Option<usize>,
        /// horizon; output cadence is rescaled to match
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// chunk count for parallel mode
        #[arg(long, default_value_t = 64)]
        chunks: usize,
    },
    /// Write plot data for a figure from runs under --runs.
    Plot {
        /// figure id, see `list`
        #[arg(long)]
        figure: String,
        /// directory holding the preset runs
        #[arg(long, default_value = "runs")]
        runs: PathBuf,
        /// where to write the csv; defaults to --runs
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets and figure ids.
    List,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run { preset, config, manifest, out, seed, particles, t_end, mode, chunks } => {
            let exec = mode.map(|m| match m {
                Mode::Deterministic => ExecMode::Deterministic,
                Mode::Parallel => ExecMode::Parallel { chunks },
            });
            if let Some(p) = preset {
                let plan = expand(p, &Overrides { seed, particles, exec, t_end })?;
                for m in run_scenario(&plan, &out)? {
                    report(&m);
                }
            } else if let Some(path) = config {
                let mut c = load_config(&path)?;
                if let Some(s) = seed {
                    c.seed = s;
                }
                if let Some(n) = particles {
                    c.n_particles = n;
                }
                if let Some(t) = t_end {
                    c.t_end = t;
                }
                if let Some(e) = exec {
                    c.exec = e;
                }
                c.validate()?;
                let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                report(&run_config(&c, &label, None, &out)?);
            } else if let Some(m) = manifest {
                report(&rerun_manifest(&m, &out)?);
            } else {
                bail!("give one of --preset, --config or --manifest");
            }
        }
        Cmd::Plot { figure, runs, out } => {
            for f in emit_plotdata(&runs, &figure, out.as_ref().unwrap_or(&runs))? {
                println!("{}", f.display());
            }
        }
        Cmd::List => {
            for p in Preset::ALL {
                println!("{:8} {}", p.name(), p.describe());
            }
            println!("figures: {}", figure_ids().join(" "));
        }
    }
    Ok(())
}

fn report(m: &bounded_opinion_cli::RunManifest) {
    match (&m.summary, &m.converged) {
        (Some(s), Some(c)) => println!(
            "{}: t={} chi={:.6} mbar={:.6} phi={:.6} | last {:.0}%: chi={:.6} mbar={:.6} phi={:.6}{} ({:.1}s)",
            m.label,
            s.final_time,
            s.final_flow.chi,
            s.final_flow.mbar,
            s.final_flow.phi,
            100.0 * bounded_opinion_cli::analysis::TAIL_FRACTION,
            c.chi,
            c.mbar,
            c.phi,
            if c.stationary { "" } else { " (still drifting)" },
            m.wall_seconds
        ),
        _ => println!("{}: {:?}", m.label, m.failure),
    }
}
