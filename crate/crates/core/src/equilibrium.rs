//! Maxwell-Juttner equilibrium in 1+1 dimensions.
//!
//! f_MJ(p) = n / (2 K_1(chi)) exp(-chi p.U) is a density in dp whose
//! integral is N^0 = n U^0. Everything below works with scaled Bessel
//! values, so chi up to 1e6 is fine.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{dot_minus_one, gamma, Momentum, TwoVector};
use crate::quad::gauss_legendre;
use crate::specfun::{k1_minus_k0_scaled, ScaledK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MjState {
    pub n: f64,
    /// mean opinion
    pub ubar: f64,
    pub chi: f64,
}

impl MjState {
    pub fn new(n: f64, ubar: f64, chi: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!("density must be positive, got {n}")));
        }
        if !(ubar.abs() < 1.0) {
            return Err(Error::Domain(format!("mean opinion must satisfy |m| < 1, got {ubar}")));
        }
        if !(chi > 0.0) || !chi.is_finite() {
            return Err(Error::Domain(format!("chi must be positive, got {chi}")));
        }
        Ok(Self { n, ubar, chi })
    }

    pub fn velocity(&self) -> TwoVector {
        TwoVector::velocity(self.ubar)
    }
}

/// Density in dp.
pub fn mj_pdf(p: Momentum, state: &MjState) -> f64 {
    let k1 = ScaledK::new(state.chi).map(|k| k.k[1]).unwrap_or(f64::NAN);
    let u1 = state.velocity().a1;
    state.n / (2.0 * k1) * (-state.chi * dot_minus_one(p.0, u1)).exp()
}

/// Density in dm: mj_pdf carried over with |dp/dm| = gamma^3.
pub fn mj_pdf_opinion(m: f64, state: &MjState) -> f64 {
    if m.abs() >= 1.0 {
        return 0.0;
    }
    let g = gamma(m);
    mj_pdf(Momentum(m * g), state) * g * g * g
}

/// Mass of f_MJ between two opinions, i.e. the integral of mj_pdf over
/// [p(m_lo), p(m_hi)]. Integrated in rapidity relative to the flow with
/// panels narrower than the thermal width.
pub fn mj_mass_between(m_lo: f64, m_hi: f64, state: &MjState) -> f64 {
    let chi = state.chi;
    let ubar_rap = state.ubar.atanh();
    let k1 = match ScaledK::new(chi) {
        Ok(k) => k.k[1],
        Err(_) => return f64::NAN,
    };
    // exp(-chi (cosh w - 1)) drops below e^-60 beyond w_max
    let w_max = (1.0 + 60.0 / chi).acosh();
    let lo = (m_lo.max(-1.0).atanh() - ubar_rap).max(-w_max);
    let hi = (m_hi.min(1.0).atanh() - ubar_rap).min(w_max);
    if !(hi > lo) {
        return 0.0;
    }
    let width = 0.25f64.min(0.25 / chi.sqrt());
    let pieces = ((hi - lo) / width).ceil() as usize;
    let integrand = |w: f64| {
        let sh = (0.5 * w).sinh();
        (-2.0 * chi * sh * sh).exp() * (w + ubar_rap).cosh()
    };
    state.n / (2.0 * k1) * gauss_legendre(integrand, lo, hi, pieces)
}

/// Rest-frame sampler for the density exp(-chi (p0 - 1)) dp.
///
/// Envelope: flat on |p| < a and exponential beyond, where a is chosen so
/// the target has fallen by one e-fold there. Since p0 - 1 is convex the
/// tangent line at a bounds it from below, so the envelope dominates.
/// Acceptance is about 75% for every chi.
#[derive(Debug, Clone, Copy)]
pub struct MjSampler {
    chi: f64,
    u0: f64,
    u1: f64,
    ubar: f64,
    a: f64,
    slope: f64,
    core_frac: f64,
}

fn kinetic(p: f64) -> f64 {
    // sqrt(1+p^2) - 1 without cancellation
    p * p / (p.hypot(1.0) + 1.0)
}

impl MjSampler {
    pub fn new(state: &MjState) -> Self {
        let chi = state.chi;
        let inv = 1.0 / chi;
        let a = (inv * (2.0 + inv)).sqrt();
        // d(p0 - 1)/dp at a; p0(a) = 1 + 1/chi
        let slope = chi * a / (1.0 + inv);
        let tail = (-1.0f64).exp() / slope;
        let u = state.velocity();
        Self { chi, u0: u.a0, u1: u.a1, ubar: state.ubar, a, slope, core_frac: a / (a + tail) }
    }

    fn rest<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let pick: f64 = rng.random();
            let acc: f64 = rng.random();
            let p = if pick < self.core_frac {
                let p = self.a * rng.random::<f64>();
                if acc < (-self.chi * kinetic(p)).exp() {
                    p
                } else {
                    continue;
                }
            } else {
                let e: f64 = -(1.0 - rng.random::<f64>()).ln();
                let p = self.a + e / self.slope;
                let bound = 1.0 + self.slope * (p - self.a) / self.chi;
                if acc < (-self.chi * (kinetic(p) - (bound - 1.0) - 1.0 / self.chi)).exp() {
                    p
                } else {
                    continue;
                }
            };
            return if rng.random::<bool>() { p } else { -p };
        }
    }

    /// One momentum in the lab frame.
    ///
    /// The rest-frame sample has density exp(-chi p0) dp; a plain boost of it
    /// would be weighted by the wrong Jacobian. Flipping the sign with
    /// probability max(0, -ubar m_rest) supplies the missing (1 + ubar m)
    /// factor exactly, then the boost is applied.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Momentum {
        let mut p = self.rest(rng);
        let e = p.hypot(1.0);
        if self.ubar != 0.0 {
            let x: f64 = rng.random();
            if -self.ubar * p / e > x {
                p = -p;
            }
        }
        Momentum(self.u0 * p + self.u1 * e)
    }
}

pub fn mj_sample<R: Rng + ?Sized>(state: &MjState, rng: &mut R) -> Momentum {
    MjSampler::new(state).sample(rng)
}

/// Tensor over the (1+1)-D index set; component (i1..ik) lives at
/// offset sum i_j 2^j.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rank: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank);
        let off = idx.iter().enumerate().fold(0, |acc, (j, &i)| acc | (i << j));
        self.data[off]
    }

    fn build(rank: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut data = Vec::with_capacity(1 << rank);
        let mut idx = vec![0; rank];
        for off in 0..(1usize << rank) {
            for (j, slot) in idx.iter_mut().enumerate() {
                *slot = (off >> j) & 1;
            }
            data.push(f(&idx));
        }
        Tensor { rank, data }
    }
}

fn eta(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 0) => 1.0,
        (1, 1) => -1.0,
        _ => 0.0,
    }
}

fn comp(u: TwoVector, i: usize) -> f64 {
    if i == 0 {
        u.a0
    } else {
        u.a1
    }
}

fn check_velocity(u: TwoVector) -> Result<()> {
    if (u.norm2() - 1.0).abs() > 1e-9 || u.a0 <= 0.0 {
        return Err(Error::Domain(format!("U must be a unit future-pointing vector, U.U = {}", u.norm2())));
    }
    Ok(())
}

/// Z^{a b ...} with each K_n(chi) given by `k[n]`.
fn z_from(k: &[f64; 5], chi: f64, u: TwoVector, rank: usize) -> Tensor {
    let uc = |i| comp(u, i);
    Tensor::build(rank, |ix| match rank {
        0 => 2.0 * k[0],
        1 => 2.0 * k[1] * uc(ix[0]),
        2 => {
            let (a, b) = (ix[0], ix[1]);
            2.0 * k[2] * uc(a) * uc(b) - 2.0 * eta(a, b) * k[1] / chi
        }
        3 => {
            let (a, b, c) = (ix[0], ix[1], ix[2]);
            2.0 * k[3] * uc(a) * uc(b) * uc(c)
                - 2.0 * (eta(a, b) * uc(c) + eta(a, c) * uc(b) + eta(b, c) * uc(a)) * k[2] / chi
        }
        _ => {
            let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
            let six = eta(a, b) * uc(c) * uc(d)
                + eta(a, c) * uc(b) * uc(d)
                + eta(b, c) * uc(a) * uc(d)
                + eta(a, d) * uc(c) * uc(b)
                + eta(d, c) * uc(b) * uc(a)
                + eta(d, b) * uc(a) * uc(c);
            let three = eta(a, b) * eta(c, d) + eta(a, c) * eta(b, d) + eta(a, d) * eta(b, c);
            2.0 * k[4] * uc(a) * uc(b) * uc(c) * uc(d) - 2.0 * k[3] / chi * six + 2.0 * k[2] / (chi * chi) * three
        }
    })
}

/// e^chi Z^{a...} = e^chi int p^a ... exp(-chi p.U) dp/p0, rank 0..=4.
pub fn z_moments_scaled(chi: f64, u: TwoVector, rank: usize) -> Result<Tensor> {
    if rank > 4 {
        return Err(Error::Domain(format!("rank must be at most 4, got {rank}")));
    }
    check_velocity(u)?;
    let k = ScaledK::new(chi)?;
    Ok(z_from(&k.k, chi, u, rank))
}

pub fn z_moments(chi: f64, u: TwoVector, rank: usize) -> Result<Tensor> {
    let mut t = z_moments_scaled(chi, u, rank)?;
    let s = (-chi).exp();
    t.data.iter_mut().for_each(|v| *v *= s);
    Ok(t)
}

/// Moments over the total-momentum hyperbola P.P = Q*^2, rank 0..=2.
/// Values are multiplied by e^(Q* chi).
pub fn z_star_moments_scaled(chi: f64, q_star: f64, u: TwoVector, rank: usize) -> Result<Tensor> {
    if rank > 2 {
        return Err(Error::Domain(format!("rank must be at most 2, got {rank}")));
    }
    if !(q_star >= 2.0) {
        return Err(Error::Domain(format!("Q* must be at least 2, got {q_star}")));
    }
    check_velocity(u)?;
    let k = ScaledK::new(q_star * chi)?;
    let uc = |i| comp(u, i);
    Ok(Tensor::build(rank, |ix| match rank {
        0 => 2.0 * k.k[0],
        1 => 2.0 * q_star * k.k[1] * uc(ix[0]),
        _ => {
            let (a, b) = (ix[0], ix[1]);
            2.0 * q_star * q_star * k.k[2] * uc(a) * uc(b) - 2.0 * q_star * eta(a, b) * k.k[1] / chi
        }
    }))
}

pub fn z_star_moments(chi: f64, q_star: f64, u: TwoVector, rank: usize) -> Result<Tensor> {
    let mut t = z_star_moments_scaled(chi, q_star, u, rank)?;
    let s = (-q_star * chi).exp();
    t.data.iter_mut().for_each(|v| *v *= s);
    Ok(t)
}

/// How energy per particle is tied to chi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyClosure {
    /// e = 1/chi + K0/K1: the energy of the 1D Maxwell-Juttner density.
    #[default]
    MjConsistent,
    /// e = 1/chi + K1/K0 as printed alongside the Eckart decomposition.
    /// It is the 3D-style ratio and does not match 1D equilibrium moments.
    AsPrinted,
}

/// e - 1, evaluated without cancellation.
pub fn energy_excess(chi: f64, closure: EnergyClosure) -> Result<f64> {
    let k = ScaledK::new(chi)?;
    let diff = k1_minus_k0_scaled(chi);
    Ok(match closure {
        EnergyClosure::MjConsistent => 1.0 / chi - diff / k.k[1],
        EnergyClosure::AsPrinted => 1.0 / chi + diff / k.k[0],
    })
}

/// Energy per particle in the rest frame of the flow.
pub fn energy_density(chi: f64) -> Result<f64> {
    energy_density_with(chi, EnergyClosure::MjConsistent)
}

/// 1/chi + K1/K0, kept for comparison.
pub fn energy_density_as_printed(chi: f64) -> Result<f64> {
    energy_density_with(chi, EnergyClosure::AsPrinted)
}

pub fn energy_density_with(chi: f64, closure: EnergyClosure) -> Result<f64> {
    Ok(1.0 + energy_excess(chi, closure)?)
}

fn energy_slope(chi: f64, closure: EnergyClosure) -> f64 {
    let k = match ScaledK::new(chi) {
        Ok(k) => k,
        Err(_) => return f64::NAN,
    };
    match closure {
        EnergyClosure::MjConsistent => {
            let y = k.k[0] / k.k[1];
            -1.0 / (chi * chi) + y * y - 1.0 + y / chi
        }
        EnergyClosure::AsPrinted => {
            let r = k.k[1] / k.k[0];
            -1.0 / (chi * chi) + r * r - 1.0 - r / chi
        }
    }
}

pub const CHI_MIN: f64 = 1e-9;
pub const CHI_MAX: f64 = 1e9;

/// Inverse of `energy_density`.
pub fn chi_from_energy(e: f64) -> Result<f64> {
    chi_from_energy_excess(e - 1.0, EnergyClosure::MjConsistent)
}

/// chi such that e(chi) - 1 = `excess`. Bisection on ln chi over
/// [CHI_MIN, CHI_MAX], then Newton. Targets beyond the bracket return the
/// nearer end of it.
pub fn chi_from_energy_excess(excess: f64, closure: EnergyClosure) -> Result<f64> {
    if !(excess > 0.0) || !excess.is_finite() {
        return Err(Error::Domain(format!("energy per particle must exceed 1, got 1 + {excess}")));
    }
    let f = |c: f64| energy_excess(c, closure).map(|v| v - excess);
    if f(CHI_MAX)? >= 0.0 {
        return Ok(CHI_MAX);
    }
    if f(CHI_MIN)? <= 0.0 {
        return Ok(CHI_MIN);
    }
    let (mut lo, mut hi) = (CHI_MIN.ln(), CHI_MAX.ln());
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp())? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut chi = (0.5 * (lo + hi)).exp();
    for _ in 0..50 {
        let step = f(chi)? / energy_slope(chi, closure);
        if !step.is_finite() {
            break;
        }
        let next = (chi - step).clamp(lo.exp(), hi.exp());
        let done = (next - chi).abs() <= 1e-15 * chi;
        chi = next;
        if done {
            break;
        }
    }
    Ok(chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_frame_rank_two() {
        let chi = 1.3;
        let t = z_moments(chi, TwoVector::new(1.0, 0.0), 2).unwrap();
        let k1 = crate::specfun::bessel_k(1, chi).unwrap();
        let k2 = crate::specfun::bessel_k(2, chi).unwrap();
        assert!((t.get(&[0, 0]) - (2.0 * k2 - 2.0 * k1 / chi)).abs() < 1e-14);
        assert_eq!(t.get(&[0, 1]), 0.0);
        assert!((t.get(&[1, 1]) - 2.0 * k1 / chi).abs() < 1e-14);
    }

    #[test]
    fn star_rank_one_at_threshold() {
        let chi = 0.7;
        let t = z_star_moments(chi, 2.0, TwoVector::new(1.0, 0.0), 1).unwrap();
        let k = crate::specfun::bessel_k(1, 2.0 * chi).unwrap();
        assert!((t.get(&[0]) - 4.0 * k).abs() < 1e-14);
        assert_eq!(t.get(&[1]), 0.0);
        assert!(z_star_moments(chi, 1.5, TwoVector::new(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn printed_energy_example() {
        let e = energy_density_as_printed(1.0).unwrap();
        assert!((e - 2.429_625_398_260_4).abs() < 1e-12);
    }

    #[test]
    fn inversion_clamps_outside_bracket() {
        let c = chi_from_energy_excess(1e-12, EnergyClosure::MjConsistent).unwrap();
        assert_eq!(c, CHI_MAX);
        assert!(chi_from_energy(1.0).is_err());
        assert!(chi_from_energy(0.5).is_err());
    }
}
