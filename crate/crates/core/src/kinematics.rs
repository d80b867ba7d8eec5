//! (1+1)-dimensional kinematics with metric diag(1, -1) and unit mass.
//!
//! A particle is stored by its spatial momentum p. Energy p0 = sqrt(1+p^2)
//! and opinion m = p/p0 are derived, so |m| < 1 holds for every finite p.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Momentum(pub f64);

impl Momentum {
    pub fn new(p: f64) -> Self {
        Momentum(p)
    }

    pub fn p(self) -> f64 {
        self.0
    }

    pub fn energy(self) -> f64 {
        self.0.hypot(1.0)
    }

    pub fn opinion(self) -> f64 {
        momentum_to_opinion(self.0)
    }

    pub fn two_vector(self) -> TwoVector {
        TwoVector::new(self.energy(), self.0)
    }
}

pub fn opinion_to_momentum(m: f64) -> Result<Momentum> {
    if m.is_nan() || m.abs() >= 1.0 {
        return Err(Error::Domain(format!("opinion must satisfy |m| < 1, got {m}")));
    }
    // (1-m)(1+m) keeps precision close to |m| = 1
    Ok(Momentum(m / ((1.0 - m) * (1.0 + m)).sqrt()))
}

pub fn momentum_to_opinion(p: f64) -> f64 {
    p / p.hypot(1.0)
}

/// Lorentz factor of an opinion.
pub fn gamma(m: f64) -> f64 {
    1.0 / ((1.0 - m) * (1.0 + m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoVector {
    pub a0: f64,
    pub a1: f64,
}

impl TwoVector {
    pub const fn new(a0: f64, a1: f64) -> Self {
        Self { a0, a1 }
    }

    /// Four-velocity of mean opinion `m`.
    pub fn velocity(m: f64) -> Self {
        let g = gamma(m);
        Self::new(g, g * m)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.a0 * o.a0 - self.a1 * o.a1
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.a0 * s, self.a1 * s)
    }

    /// Boost by rapidity `eta` (active: a particle at rest acquires
    /// velocity tanh(eta)).
    pub fn boost(self, eta: f64) -> Self {
        let (sh, ch) = (eta.sinh(), eta.cosh());
        Self::new(ch * self.a0 + sh * self.a1, sh * self.a0 + ch * self.a1)
    }
}

impl std::ops::Add for TwoVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.a1 + o.a1)
    }
}

impl std::ops::Sub for TwoVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.a1 - o.a1)
    }
}

/// p.q - 1 for two unit-mass momenta, without cancellation.
///
/// p.q - 1 = -(p-q).(p-q)/2 and p0 - q0 = (p-q)(p+q)/(p0+q0).
pub fn dot_minus_one(p: f64, q: f64) -> f64 {
    let (e1, e2) = (p.hypot(1.0), q.hypot(1.0));
    let v = (p + q) / (e1 + e2);
    0.5 * (p - q) * (p - q) * (1.0 - v) * (1.0 + v)
}

/// Moller relative velocity sqrt((a.b)^2 - 1) / (a0 b0).
///
/// The invariant form is evaluated through a.b - 1 computed without
/// cancellation, so it stays accurate for nearly equal momenta.
pub fn moller_velocity(a: Momentum, b: Momentum) -> f64 {
    let dm1 = dot_minus_one(a.0, b.0);
    (dm1 * (dm1 + 2.0)).sqrt() / (a.energy() * b.energy())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmDecomposition {
    pub total: TwoVector,
    pub relative: TwoVector,
    /// s = P.P
    pub s: f64,
    /// sqrt(s)
    pub q_star: f64,
}

pub fn cm_decompose(a: Momentum, b: Momentum) -> CmDecomposition {
    let (va, vb) = (a.two_vector(), b.two_vector());
    let total = va + vb;
    let relative = va - vb;
    // P.P = 2 + 2 a.b = 4 + 2 (a.b - 1)
    let s = 4.0 + 2.0 * dot_minus_one(a.0, b.0);
    CmDecomposition { total, relative, s, q_star: s.sqrt() }
}

impl CmDecomposition {
    pub fn reconstruct(&self) -> (TwoVector, TwoVector) {
        ((self.total + self.relative).scale(0.5), (self.total - self.relative).scale(0.5))
    }
}
