//! Fits and time averages over flow records.

use bounded_opinion::diagnostics::FlowState;
use serde::{Deserialize, Serialize};

/// Fraction of the run averaged for converged ("t = infinity") values.
pub const TAIL_FRACTION: f64 = 0.2;

/// Records with t >= (1 - frac) t_last.
pub fn tail(flows: &[FlowState], frac: f64) -> &[FlowState] {
    let Some(last) = flows.last() else { return flows };
    let start = (1.0 - frac) * last.t;
    let i = flows.partition_point(|f| f.t < start);
    &flows[i..]
}

fn mean_sd(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = v.clone().count() as f64;
    let m = v.clone().sum::<f64>() / n;
    let var = v.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Converged {
    pub window_start: f64,
    pub samples: usize,
    pub chi: f64,
    pub chi_sd: f64,
    pub mbar: f64,
    pub mbar_sd: f64,
    pub phi: f64,
    pub phi_sd: f64,
    /// relative change of mean chi between the window halves
    pub chi_drift: f64,
    /// chi_drift below 5%
    pub stationary: bool,
}

pub fn converged(flows: &[FlowState]) -> Option<Converged> {
    let w = tail(flows, TAIL_FRACTION);
    if w.len() < 2 {
        return None;
    }
    let (chi, chi_sd) = mean_sd(w.iter().map(|f| f.chi));
    let (mbar, mbar_sd) = mean_sd(w.iter().map(|f| f.mbar));
    let (phi, phi_sd) = mean_sd(w.iter().map(|f| f.phi));
    let h = w.len() / 2;
    let a = w[..h].iter().map(|f| f.chi).sum::<f64>() / h as f64;
    let b = w[h..].iter().map(|f| f.chi).sum::<f64>() / (w.len() - h) as f64;
    let chi_drift = (b - a).abs() / chi.abs();
    Some(Converged {
        window_start: w[0].t,
        samples: w.len(),
        chi,
        chi_sd,
        mbar,
        mbar_sd,
        phi,
        phi_sd,
        chi_drift,
        stationary: chi_drift < 0.05,
    })
}

/// Least-squares (slope, intercept).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of ln chi over the records where chi has not yet grown by a
/// factor e.
pub fn first_efold_rate(flows: &[FlowState]) -> f64 {
    let c0 = flows[0].chi;
    let k = flows.iter().position(|f| f.chi > c0 * std::f64::consts::E).unwrap_or(flows.len());
    let w = &flows[..k.max(2)];
    let t: Vec<f64> = w.iter().map(|f| f.t).collect();
    let y: Vec<f64> = w.iter().map(|f| f.chi.ln()).collect();
    linear_fit(&t, &y).0
}

/// Slope of ln chi over all records.
pub fn log_rate(flows: &[FlowState]) -> f64 {
    let t: Vec<f64> = flows.iter().map(|f| f.t).collect();
    let y: Vec<f64> = flows.iter().map(|f| f.chi.ln()).collect();
    linear_fit(&t, &y).0
}

/// Slope of sqrt(chi) over all records.
pub fn sqrt_slope(flows: &[FlowState]) -> f64 {
    let t: Vec<f64> = flows.iter().map(|f| f.t).collect();
    let y: Vec<f64> = flows.iter().map(|f| f.chi.sqrt()).collect();
    linear_fit(&t, &y).0
}
