//! Moments of the particle ensemble and their Eckart decomposition.
//!
//! Every particle carries weight 1/N in the dp measure, so N^0 = 1 exactly.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{chi_from_energy_excess, energy_excess, mj_mass_between, EnergyClosure, MjState, CHI_MAX};
use crate::error::{Error, Result};
use crate::kinematics::{dot_minus_one, momentum_to_opinion, TwoVector};
use crate::specfun::ScaledK;

/// Symmetric rank-2 tensor with upper indices.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub t00: f64,
    pub t01: f64,
    pub t11: f64,
}

impl Sym2 {
    fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.t00, self.t01], [self.t01, self.t11]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: TwoVector,
    pub t: Sym2,
    /// e - 1 accumulated particle by particle, if available
    pub energy_excess: Option<f64>,
}

/// Neumaier-compensated sum.
#[derive(Default, Clone, Copy)]
struct Acc {
    s: f64,
    c: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }
    fn get(self) -> f64 {
        self.s + self.c
    }
}

/// Magnitudes of the positive and negative momenta, each sorted. Summing
/// odd moments as (positive part) - (negative part) in this order makes a
/// mirror-symmetric ensemble cancel exactly.
fn split_sorted(momenta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pos: Vec<f64> = momenta.iter().copied().filter(|&p| p > 0.0).collect();
    let mut neg: Vec<f64> = momenta.iter().filter(|&&p| p < 0.0).map(|p| -p).collect();
    pos.sort_unstable_by(f64::total_cmp);
    neg.sort_unstable_by(f64::total_cmp);
    (pos, neg)
}

/// N^a = (1/N) sum p^a/p0 and T^ab = (1/N) sum p^a p^b / p0, plus a
/// cancellation-free e - 1.
pub fn particle_moments(momenta: &[f64]) -> Result<Moments> {
    if momenta.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let inv_n = 1.0 / momenta.len() as f64;
    let (pos, neg) = split_sorted(momenta);
    let zeros = (momenta.len() - pos.len() - neg.len()) as f64;
    let odd = |g: &dyn Fn(f64) -> f64| {
        let (mut a, mut b) = (Acc::default(), Acc::default());
        pos.iter().for_each(|&p| a.add(g(p)));
        neg.iter().for_each(|&p| b.add(g(p)));
        (a.get() - b.get()) * inv_n
    };
    let even = |g: &dyn Fn(f64) -> f64, at_zero: f64| {
        let mut a = Acc::default();
        pos.iter().chain(neg.iter()).for_each(|&p| a.add(g(p)));
        (a.get() + zeros * at_zero) * inv_n
    };
    let n1 = odd(&momentum_to_opinion);
    let t00 = even(&|p: f64| p.hypot(1.0), 1.0);
    let t01 = odd(&|p: f64| p);
    let t11 = even(&|p: f64| p * p / p.hypot(1.0), 0.0);
    let n = TwoVector::new(1.0, n1);

    let mut excess = None;
    let nn = (1.0 - n1) * (1.0 + n1);
    if nn > 0.0 {
        let dens = nn.sqrt();
        let u1 = n1 / dens;
        // e - 1 = <(p.U)(p.U - 1)/p0> / n
        let mut a = Acc::default();
        for &p in momenta {
            let dm1 = dot_minus_one(p, u1);
            a.add((1.0 + dm1) * dm1 / p.hypot(1.0));
        }
        excess = Some(a.get() * inv_n / dens);
    }
    Ok(Moments { n, t: Sym2 { t00, t01, t11 }, energy_excess: excess })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub n: f64,
    pub mbar: f64,
    pub u: TwoVector,
    /// energy per particle in the flow frame
    pub e: f64,
    pub chi: f64,
    pub theta: f64,
    pub pi_dyn: f64,
    pub q1: f64,
    pub pi11: f64,
    pub phi: f64,
    pub c_param: f64,
    /// chi hit the cap: the ensemble is colder than can be resolved
    pub cold: bool,
}

const ETA: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

/// (p + Pi, Pi^<11>, q^1) from the projections with the 1/3 weights.
fn projections(u: TwoVector, t: &[[f64; 2]; 2]) -> (f64, f64, f64) {
    let up = [u.a0, u.a1];
    let dn = [u.a0, -u.a1];
    let mut d_up = [[0.0; 2]; 2];
    let mut d_mix = [[0.0; 2]; 2];
    let mut d_dn = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            d_up[a][b] = ETA[a][b] - up[a] * up[b];
            d_mix[a][b] = if a == b { 1.0 } else { 0.0 } - up[a] * dn[b];
            d_dn[a][b] = ETA[a][b] - dn[a] * dn[b];
        }
    }
    let mut trace = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            trace += d_dn[a][b] * t[a][b];
        }
    }
    let p_plus_pi = -trace / 3.0;
    let mut shear = 0.0;
    for c in 0..2 {
        for d in 0..2 {
            shear += (d_mix[1][c] * d_mix[1][d] - d_up[1][1] * d_dn[c][d] / 3.0) * t[c][d];
        }
    }
    let mut q1 = 0.0;
    for c in 0..2 {
        for b in 0..2 {
            q1 += d_mix[1][c] * dn[b] * t[b][c];
        }
    }
    (p_plus_pi, shear, q1)
}

/// Eckart decomposition. The dynamic pressure and shear are reported
/// relative to the same projections of the equilibrium tensor at (n, U,
/// chi), so they vanish at equilibrium despite the 1/3 weights.
pub fn eckart_decompose(m: &Moments, closure: EnergyClosure) -> Result<FlowState> {
    let nn = m.n.norm2();
    if !(nn > 0.0) || m.n.a0 <= 0.0 {
        return Err(Error::DegenerateFlow(nn));
    }
    let dens = nn.sqrt();
    let u = m.n.scale(1.0 / dens);
    let t = m.t.as_array();
    let ut = [u.a0, -u.a1];
    let mut utu = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            utu += ut[a] * t[a][b] * ut[b];
        }
    }
    let e = utu / dens;
    let excess = m.energy_excess.unwrap_or(e - 1.0);
    let floor = energy_excess(CHI_MAX, closure)?;
    let (chi, cold) = if excess <= floor { (CHI_MAX, true) } else { (chi_from_energy_excess(excess, closure)?, false) };
    let k = ScaledK::new(chi)?;
    let ratio = k.k[2] / k.k[1];
    // T_E = n (K2/K1 U U - eta / chi)
    let mut te = [[0.0; 2]; 2];
    let uu = [u.a0, u.a1];
    for a in 0..2 {
        for b in 0..2 {
            te[a][b] = dens * (ratio * uu[a] * uu[b] - ETA[a][b] / chi);
        }
    }
    let (ppi, shear, q1) = projections(u, &t);
    let (ppi_e, shear_e, _) = projections(u, &te);
    Ok(FlowState {
        t: 0.0,
        n: dens,
        mbar: u.a1 / u.a0,
        u,
        e: 1.0 + excess,
        chi,
        theta: 1.0 / chi,
        pi_dyn: ppi - ppi_e,
        q1,
        pi11: shear - shear_e,
        phi: f64::NAN,
        c_param: u.a1 * ratio,
        cold,
    })
}

/// (1/N) sum |p|.
pub fn phi_measure(momenta: &[f64]) -> f64 {
    if momenta.is_empty() {
        return 0.0;
    }
    let mut a = Acc::default();
    momenta.iter().for_each(|p| a.add(p.abs()));
    a.get() / momenta.len() as f64
}

/// Full diagnostic record for an ensemble at time `t`.
pub fn flow_state(momenta: &[f64], t: f64, closure: EnergyClosure) -> Result<FlowState> {
    let m = particle_moments(momenta)?;
    let mut f = eckart_decompose(&m, closure)?;
    f.t = t;
    f.phi = phi_measure(momenta);
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramPair {
    pub centers: Vec<f64>,
    pub f: Vec<f64>,
    pub f_mj: Vec<f64>,
}

impl HistogramPair {
    pub fn bin_width(&self) -> f64 {
        2.0 / self.centers.len() as f64
    }
}

/// Opinion histogram on uniform bins over (-1, 1) in the dm measure, next
/// to the Maxwell-Juttner bin averages at the ensemble's (n, mbar, chi).
/// Both integrate to 1.
pub fn histogram_with_flow(momenta: &[f64], bins: usize, flow: &FlowState) -> Result<HistogramPair> {
    if bins < 10 {
        return Err(Error::Domain(format!("need at least 10 bins, got {bins}")));
    }
    if momenta.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let w = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &p in momenta {
        let m = momentum_to_opinion(p);
        let i = (((m + 1.0) / w) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = momenta.len() as f64;
    let f = counts.iter().map(|&c| c as f64 / (total * w)).collect();
    let centers: Vec<f64> = (0..bins).map(|i| -1.0 + (i as f64 + 0.5) * w).collect();
    let state = MjState::new(flow.n, flow.mbar, flow.chi)?;
    let mass: Vec<f64> =
        (0..bins).map(|i| mj_mass_between(-1.0 + i as f64 * w, -1.0 + (i + 1) as f64 * w, &state)).collect();
    let sum: f64 = mass.iter().sum();
    let f_mj = mass.iter().map(|v| v / (sum * w)).collect();
    Ok(HistogramPair { centers, f, f_mj })
}

pub fn histogram_vs_mj(momenta: &[f64], bins: usize, closure: EnergyClosure) -> Result<HistogramPair> {
    let flow = flow_state(momenta, 0.0, closure)?;
    histogram_with_flow(momenta, bins, &flow)
}

/// Consumer of diagnostics emitted by a run.
pub trait DiagnosticsSink {
    fn flow(&mut self, state: &FlowState) -> Result<()>;
    fn histogram(&mut self, _t: f64, _h: &HistogramPair) -> Result<()> {
        Ok(())
    }
}

/// Keeps everything in memory.
#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub flows: Vec<FlowState>,
    pub histograms: Vec<(f64, HistogramPair)>,
}

impl DiagnosticsSink for MemorySink {
    fn flow(&mut self, state: &FlowState) -> Result<()> {
        self.flows.push(*state);
        Ok(())
    }
    fn histogram(&mut self, t: f64, h: &HistogramPair) -> Result<()> {
        self.histograms.push((t, h.clone()));
        Ok(())
    }
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl DiagnosticsSink for NullSink {
    fn flow(&mut self, _: &FlowState) -> Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_ensemble() {
        let m = particle_moments(&[0.0; 7]).unwrap();
        assert_eq!(m.n, TwoVector::new(1.0, 0.0));
        assert_eq!(m.t, Sym2 { t00: 1.0, t01: 0.0, t11: 0.0 });
        let f = flow_state(&[0.0; 7], 0.0, EnergyClosure::MjConsistent).unwrap();
        assert!(f.cold);
        assert_eq!(f.chi, CHI_MAX);
        assert_eq!(f.e, 1.0);
        assert_eq!(f.phi, 0.0);
    }

    #[test]
    fn mirror_cancels_exactly() {
        let base = [0.3, 1.7, 0.01, 12.0, 0.3, 5.5];
        let mut v: Vec<f64> = base.to_vec();
        v.extend(base.iter().rev().map(|p| -p));
        let m = particle_moments(&v).unwrap();
        assert_eq!(m.n.a1, 0.0);
        assert_eq!(m.t.t01, 0.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(particle_moments(&[]), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn few_bins_rejected() {
        let f = flow_state(&[0.1, -0.2], 0.0, EnergyClosure::MjConsistent).unwrap();
        assert!(histogram_with_flow(&[0.1, -0.2], 5, &f).is_err());
    }
}
