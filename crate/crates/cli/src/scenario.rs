//! Runs configurations and writes their CSV output and manifests.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use bounded_opinion::diagnostics::{DiagnosticsSink, FlowState, HistogramPair};
use bounded_opinion::dsmc::{run, RunSummary, SimConfig};
use bounded_opinion::Error;
use serde::{Deserialize, Serialize};

use crate::analysis::{converged, Converged, TAIL_FRACTION};
use crate::plotdata::emit_plotdata;
use crate::presets::{LabeledRun, Plan, Tabulation};

pub const TIMESERIES_HEADER: [&str; 11] =
    ["t", "n", "mbar", "chi", "theta", "Pi", "q1", "Pi11", "phi", "c_param", "cold"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub preset: Option<String>,
    pub label: String,
    pub seed: u64,
    pub config: SimConfig,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_seconds: f64,
    /// file names relative to the run directory
    pub outputs: Vec<String>,
    pub summary: Option<RunSummary>,
    pub converged: Option<Converged>,
    pub failure: Option<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Shortest round-trip text, in exponent form outside [1e-4, 1e15).
pub fn f(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_histogram(path: &Path, h: &HistogramPair) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["m", "f", "f_mj"])?;
    for i in 0..h.centers.len() {
        w.write_record([f(h.centers[i]), f(h.f[i]), f(h.f_mj[i])])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Streams flow rows to timeseries.csv and histograms to numbered files,
/// and averages the histograms that fall in the final window.
struct CsvSink {
    dir: PathBuf,
    series: csv::Writer<File>,
    flows: Vec<FlowState>,
    snapshots: Vec<(String, f64)>,
    window_start: f64,
    avg: Option<HistogramPair>,
    avg_count: usize,
}

impl CsvSink {
    fn new(dir: &Path, t_end: f64) -> Result<Self> {
        let path = dir.join("timeseries.csv");
        let mut series = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        series.write_record(TIMESERIES_HEADER)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            series,
            flows: Vec::new(),
            snapshots: Vec::new(),
            window_start: (1.0 - TAIL_FRACTION) * t_end,
            avg: None,
            avg_count: 0,
        })
    }

    fn finish(mut self) -> Result<(Vec<String>, Vec<FlowState>)> {
        self.series.flush()?;
        let mut outputs = vec!["timeseries.csv".to_string()];
        let index = self.dir.join("histograms.csv");
        let mut w = csv::Writer::from_path(&index)?;
        w.write_record(["file", "t"])?;
        for (name, t) in &self.snapshots {
            w.write_record([name.clone(), f(*t)])?;
            outputs.push(name.clone());
        }
        w.flush()?;
        outputs.push("histograms.csv".into());
        if let Some(mut h) = self.avg.take() {
            let k = self.avg_count as f64;
            h.f.iter_mut().chain(h.f_mj.iter_mut()).for_each(|v| *v /= k);
            write_histogram(&self.dir.join("histogram_avg.csv"), &h)?;
            outputs.push("histogram_avg.csv".into());
        }
        Ok((outputs, self.flows))
    }
}

fn sink_err(e: impl std::fmt::Display) -> Error {
    Error::Sink(e.to_string())
}

impl DiagnosticsSink for CsvSink {
    fn flow(&mut self, s: &FlowState) -> bounded_opinion::Result<()> {
        let row = [
            f(s.t),
            f(s.n),
            f(s.mbar),
            f(s.chi),
            f(s.theta),
            f(s.pi_dyn),
            f(s.q1),
            f(s.pi11),
            f(s.phi),
            f(s.c_param),
            u8::from(s.cold).to_string(),
        ];
        self.series.write_record(&row).map_err(sink_err)?;
        self.flows.push(*s);
        Ok(())
    }

    fn histogram(&mut self, t: f64, h: &HistogramPair) -> bounded_opinion::Result<()> {
        let name = format!("histogram_t{:03}.csv", self.snapshots.len());
        write_histogram(&self.dir.join(&name), h).map_err(sink_err)?;
        self.snapshots.push((name, t));
        if t >= self.window_start - 1e-9 {
            match &mut self.avg {
                None => self.avg = Some(h.clone()),
                Some(a) => {
                    a.f.iter_mut().zip(&h.f).for_each(|(x, y)| *x += y);
                    a.f_mj.iter_mut().zip(&h.f_mj).for_each(|(x, y)| *x += y);
                }
            }
            self.avg_count += 1;
        }
        Ok(())
    }
}

/// Runs one configuration into `dir`. A failed run still leaves a manifest
/// with the failure recorded (and the particle state for non-finite
/// aborts) before the error is returned.
pub fn run_config(config: &SimConfig, label: &str, preset: Option<&str>, dir: &Path) -> Result<RunManifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let started_unix = unix_now();
    let clock = Instant::now();
    let mut sink = CsvSink::new(dir, config.t_end)?;
    let result = run(config, &mut sink);
    let (mut outputs, flows) = sink.finish()?;
    let mut manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        preset: preset.map(str::to_string),
        label: label.to_string(),
        seed: config.seed,
        config: config.clone(),
        started_unix,
        finished_unix: unix_now(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        summary: None,
        converged: converged(&flows),
        failure: None,
    };
    let outcome = match result {
        Ok(s) => {
            manifest.summary = Some(s);
            Ok(())
        }
        Err(e) => {
            if let Error::NonFinite(dump) = &e {
                let p = dir.join("state_dump.csv");
                let mut w = csv::Writer::from_path(&p)?;
                w.write_record(["index", "p"])?;
                for (i, p) in dump.momenta.iter().enumerate() {
                    w.write_record([i.to_string(), f(*p)])?;
                }
                w.flush()?;
                outputs.push("state_dump.csv".into());
            }
            manifest.failure = Some(e.to_string());
            Err(e)
        }
    };
    outputs.push("manifest.json".into());
    manifest.outputs = outputs;
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", path.display()))?;
    outcome.with_context(|| format!("run {label} failed; see {}", path.display()))?;
    Ok(manifest)
}

fn run_all(runs: &[LabeledRun], preset: &str, out: &Path) -> Vec<Result<RunManifest>> {
    let one = |r: &LabeledRun| run_config(&r.config, &r.label, Some(preset), &out.join(&r.label));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        runs.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        runs.iter().map(one).collect()
    }
}

/// Runs every configuration of a plan under `out/<label>/`, writes any
/// theory tables and derived figure data, and returns the run manifests.
/// Independent runs execute concurrently when built with `parallel`.
pub fn run_scenario(plan: &Plan, out: &Path) -> Result<Vec<RunManifest>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut manifests = Vec::new();
    for r in run_all(&plan.runs, plan.preset.name(), out) {
        manifests.push(r?);
    }
    for t in &plan.tables {
        let id = match t {
            Tabulation::Psi1 => "fig1",
            Tabulation::Psi2 => "fig2",
        };
        if !plan.figures.contains(&id) {
            emit_plotdata(out, id, out)?;
        }
    }
    for id in &plan.figures {
        emit_plotdata(out, id, out)?;
    }
    Ok(manifests)
}

/// Re-executes the configuration stored in a manifest.
pub fn rerun_manifest(manifest: &Path, out: &Path) -> Result<RunManifest> {
    let m = RunManifest::read(manifest)?;
    run_config(&m.config, &m.label, m.preset.as_deref(), out)
}
