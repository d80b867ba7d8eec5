//! Column files for reproducing each figure from finished runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bounded_opinion::theory::{
    chi_limit, log_grid, psi1, psi1_zero, psi1_zero_peak, psi2, CoolingCurve, CoolingRegime,
};

use crate::presets::{labels, Preset};

/// Columns of a CSV file, all numeric.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().with_context(|| format!("bad number {s:?} in {}", path.display())))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn col(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name).with_context(|| format!("no column {name}"))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Copy)]
enum Kind {
    /// chosen timeseries columns, long format with a run column
    Series(&'static [&'static str]),
    /// every histogram snapshot
    Snapshots,
    /// final-window averaged histogram
    Averaged,
    /// snapshot nearest to the given time (per run, in order)
    Nearest(&'static [f64]),
    Psi1,
    Psi2,
    Fig7Left,
    Fig7Right,
}

struct Figure {
    id: &'static str,
    presets: &'static [Preset],
    /// keep only runs whose label contains this
    filter: &'static str,
    kind: Kind,
}

const FIGURES: &[Figure] = &[
    Figure { id: "fig1", presets: &[], filter: "", kind: Kind::Psi1 },
    Figure { id: "fig2", presets: &[], filter: "", kind: Kind::Psi2 },
    Figure { id: "fig3", presets: &[Preset::A1, Preset::A2], filter: "", kind: Kind::Series(&["chi"]) },
    Figure { id: "fig4", presets: &[Preset::A1, Preset::A2], filter: "", kind: Kind::Nearest(&[17.7, 177.0]) },
    Figure { id: "fig5", presets: &[Preset::A3, Preset::A4], filter: "", kind: Kind::Series(&["chi"]) },
    Figure { id: "fig6", presets: &[Preset::A3, Preset::A4], filter: "", kind: Kind::Snapshots },
    Figure { id: "fig7-left", presets: &[Preset::A1], filter: "", kind: Kind::Fig7Left },
    Figure { id: "fig7-right", presets: &[Preset::A3], filter: "", kind: Kind::Fig7Right },
    Figure {
        id: "fig8",
        presets: &[Preset::A1, Preset::A2, Preset::A3, Preset::A4],
        filter: "",
        kind: Kind::Series(&["mbar"]),
    },
    Figure {
        id: "fig9",
        presets: &[Preset::A1, Preset::A2],
        filter: "",
        kind: Kind::Series(&["Pi", "q1", "Pi11", "c_param"]),
    },
    Figure { id: "fig10", presets: &[Preset::B1, Preset::B2], filter: "", kind: Kind::Series(&["chi"]) },
    Figure { id: "fig11", presets: &[Preset::B1, Preset::B2], filter: "", kind: Kind::Series(&["mbar"]) },
    Figure { id: "fig12", presets: &[Preset::B1, Preset::B2], filter: "delta1", kind: Kind::Snapshots },
    Figure { id: "fig13", presets: &[Preset::C1], filter: "", kind: Kind::Snapshots },
    Figure { id: "fig14", presets: &[Preset::C1], filter: "", kind: Kind::Series(&["chi", "phi"]) },
    Figure { id: "fig15", presets: &[Preset::C1], filter: "", kind: Kind::Averaged },
    Figure { id: "fig16", presets: &[Preset::C2], filter: "", kind: Kind::Series(&["chi", "mbar", "phi"]) },
    Figure { id: "fig17", presets: &[Preset::C2], filter: "delta11.5", kind: Kind::Averaged },
    Figure { id: "fig18", presets: &[Preset::DGrid], filter: "", kind: Kind::Averaged },
    Figure { id: "fig19", presets: &[Preset::DGrid], filter: "", kind: Kind::Series(&["chi", "phi", "mbar"]) },
];

pub fn figure_ids() -> Vec<&'static str> {
    FIGURES.iter().map(|f| f.id).collect()
}

use crate::scenario::f as num;

struct Out {
    w: csv::Writer<fs::File>,
    path: PathBuf,
}

impl Out {
    fn new(path: PathBuf, header: &[&str]) -> Result<Self> {
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(header)?;
        Ok(Self { w, path })
    }
    fn row(&mut self, cells: &[String]) -> Result<()> {
        self.w.write_record(cells)?;
        Ok(())
    }
    fn done(mut self) -> Result<PathBuf> {
        self.w.flush().with_context(|| format!("writing {}", self.path.display()))?;
        Ok(self.path)
    }
}

fn find_runs(root: &Path, fig: &Figure) -> Result<Vec<(String, PathBuf)>> {
    let wanted: Vec<String> = fig.presets.iter().flat_map(|p| labels(*p)).filter(|l| l.contains(fig.filter)).collect();
    let missing: Vec<&String> = wanted.iter().filter(|l| !root.join(l).join("timeseries.csv").is_file()).collect();
    if !missing.is_empty() {
        let presets: Vec<&str> = fig.presets.iter().map(|p| p.name()).collect();
        bail!(
            "figure {} needs runs {} under {}; run presets {} first",
            fig.id,
            missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
            root.display(),
            presets.join(", ")
        );
    }
    Ok(wanted.into_iter().map(|l| (l.clone(), root.join(l))).collect())
}

fn snapshot_index(dir: &Path) -> Result<Vec<(String, f64)>> {
    let path = dir.join("histograms.csv");
    let mut r = csv::Reader::from_path(&path).with_context(|| format!("opening {}", path.display()))?;
    let mut v = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        v.push((rec[0].to_string(), rec[1].parse::<f64>()?));
    }
    Ok(v)
}

fn copy_histogram(out: &mut Out, label: &str, t: Option<f64>, path: &Path) -> Result<()> {
    let h = Table::read(path)?;
    let (m, f, g) = (h.col("m")?, h.col("f")?, h.col("f_mj")?);
    for i in 0..m.len() {
        let mut row = vec![label.to_string()];
        if let Some(t) = t {
            row.push(num(t));
        }
        row.extend([num(m[i]), num(f[i]), num(g[i])]);
        out.row(&row)?;
    }
    Ok(())
}

fn overlay(dir: &Path, out: PathBuf, laws: [(CoolingRegime, f64, &str); 2], rate: f64) -> Result<PathBuf> {
    let ts = Table::read(&dir.join("timeseries.csv"))?;
    let (t, chi) = (ts.col("t")?, ts.col("chi")?);
    let at = |t0: f64| -> f64 {
        let i = t.iter().position(|&x| x >= t0 - 1e-9).unwrap_or(t.len() - 1);
        chi[i]
    };
    let mut o = Out::new(out, &["t", "chi_dsmc", laws[0].2, laws[1].2])?;
    let curves: Vec<(CoolingCurve, f64)> = laws
        .iter()
        .map(|&(regime, start, _)| (CoolingCurve { chi0: at(start), rate_const: rate, regime }, start))
        .collect();
    for i in 0..t.len() {
        let mut row = vec![num(t[i]), num(chi[i])];
        for (c, start) in &curves {
            row.push(if t[i] >= *start { num(chi_limit(c, t[i] - start)?) } else { String::new() });
        }
        o.row(&row)?;
    }
    o.done()
}

/// Writes the data for `figure` into `out` from runs found under `root`.
/// Theory figures need no runs.
pub fn emit_plotdata(root: &Path, figure: &str, out: &Path) -> Result<Vec<PathBuf>> {
    let Some(fig) = FIGURES.iter().find(|f| f.id == figure) else {
        bail!("unknown figure id {figure:?}; expected one of {}", figure_ids().join(", "));
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let file = |suffix: &str| out.join(format!("{}{suffix}.csv", fig.id.replace('-', "_")));
    let mut files = Vec::new();
    match fig.kind {
        Kind::Psi1 => {
            let (peak_chi, peak) = psi1_zero_peak()?;
            let mut chis = log_grid(1e-2, 1e3, 121);
            chis.push(peak_chi);
            chis.sort_by(f64::total_cmp);
            let mut o = Out::new(file("_grid"), &["chi", "c", "psi1"])?;
            for &x in &chis {
                for k in -8..=8 {
                    let c = 0.25 * k as f64;
                    o.row(&[num(x), num(c), num(psi1(x, c)?)])?;
                }
            }
            files.push(o.done()?);
            let mut o = Out::new(file("_right"), &["chi", "psi1", "small_chi_limit", "large_chi_limit"])?;
            for &x in &chis {
                let large = 2.0 / (std::f64::consts::PI * x).sqrt();
                o.row(&[num(x), num(psi1_zero(x)?), num(0.125), num(large)])?;
            }
            files.push(o.done()?);
            let mut o = Out::new(file("_peak"), &["chi", "psi1"])?;
            o.row(&[num(peak_chi), num(peak)])?;
            files.push(o.done()?);
        }
        Kind::Psi2 => {
            let mut o = Out::new(file(""), &["chi", "p", "psi2"])?;
            for &x in &log_grid(1e-3, 1e3, 121) {
                for k in -6..=6 {
                    let p = 0.5 * k as f64;
                    o.row(&[num(x), num(p), num(psi2(x, p)?)])?;
                }
            }
            files.push(o.done()?);
        }
        Kind::Fig7Left => {
            let (_, dir) = find_runs(root, fig)?.remove(0);
            let laws =
                [(CoolingRegime::SmallChiCollision, 0.0, "eq41"), (CoolingRegime::LargeChiCollision, 15.0, "eq42")];
            files.push(overlay(&dir, file(""), laws, 1.0)?);
        }
        Kind::Fig7Right => {
            let (_, dir) = find_runs(root, fig)?.remove(0);
            let laws = [(CoolingRegime::SmallChiVlasov, 0.0, "eq43"), (CoolingRegime::LargeChiVlasov, 40.0, "eq44")];
            files.push(overlay(&dir, file(""), laws, 0.1)?);
        }
        Kind::Series(cols) => {
            let runs = find_runs(root, fig)?;
            let mut header = vec!["run", "t"];
            header.extend_from_slice(cols);
            let mut o = Out::new(file(""), &header)?;
            for (label, dir) in &runs {
                let ts = Table::read(&dir.join("timeseries.csv"))?;
                let t = ts.col("t")?;
                let data: Vec<Vec<f64>> = cols.iter().map(|c| ts.col(c)).collect::<Result<_>>()?;
                for i in 0..t.len() {
                    let mut row = vec![label.clone(), num(t[i])];
                    row.extend(data.iter().map(|d| num(d[i])));
                    o.row(&row)?;
                }
            }
            files.push(o.done()?);
        }
        Kind::Snapshots => {
            let runs = find_runs(root, fig)?;
            let mut o = Out::new(file(""), &["run", "t", "m", "f", "f_mj"])?;
            for (label, dir) in &runs {
                for (name, t) in snapshot_index(dir)? {
                    copy_histogram(&mut o, label, Some(t), &dir.join(name))?;
                }
            }
            files.push(o.done()?);
        }
        Kind::Nearest(targets) => {
            let runs = find_runs(root, fig)?;
            let mut o = Out::new(file(""), &["run", "t", "m", "f", "f_mj"])?;
            for ((label, dir), &target) in runs.iter().zip(targets) {
                let idx = snapshot_index(dir)?;
                let (name, t) = idx
                    .iter()
                    .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
                    .with_context(|| format!("run {label} has no histograms"))?;
                copy_histogram(&mut o, label, Some(*t), &dir.join(name))?;
            }
            files.push(o.done()?);
        }
        Kind::Averaged => {
            let runs = find_runs(root, fig)?;
            let mut o = Out::new(file(""), &["run", "m", "f", "f_mj"])?;
            for (label, dir) in &runs {
                copy_histogram(&mut o, label, None, &dir.join("histogram_avg.csv"))?;
            }
            files.push(o.done()?);
        }
    }
    Ok(files)
}
