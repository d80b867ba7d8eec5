//! Binary inelastic exchange with a random, momentum-conserving kick.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Momentum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionParams {
    /// Inelasticity: 1 swaps the pair, 0 sends both to the midpoint.
    pub lambda: f64,
    /// Amplitude of the self-thinking kick.
    pub delta_amp: f64,
}

impl CollisionParams {
    pub fn new(lambda: f64, delta_amp: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::config("lambda", format!("must lie in [0, 1], got {lambda}")));
        }
        if !(delta_amp >= 0.0) || !delta_amp.is_finite() {
            return Err(Error::config("delta_amp", format!("must be finite and non-negative, got {delta_amp}")));
        }
        Ok(Self { lambda, delta_amp })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionOutcome {
    pub p_out: Momentum,
    pub pstar_out: Momentum,
    pub delta_used: f64,
    pub energy_change: f64,
}

/// Delta = amp (2u - 1) for u uniform on [0, 1].
pub fn sample_delta(delta_amp: f64, u: f64) -> f64 {
    delta_amp * (2.0 * u - 1.0)
}

/// Post-collision pair. The same transfer is added to one momentum and
/// removed from the other, so the pair sum changes only by rounding.
pub fn collide_direct(p: Momentum, pstar: Momentum, params: &CollisionParams, delta: f64) -> CollisionOutcome {
    let transfer = 0.5 * (1.0 + params.lambda) * (pstar.0 - p.0 + delta);
    let p_out = Momentum(p.0 + transfer);
    let pstar_out = Momentum(pstar.0 - transfer);
    CollisionOutcome {
        p_out,
        pstar_out,
        delta_used: delta,
        energy_change: energy_change((p, pstar), (p_out, pstar_out)),
    }
}

/// Pre-collision pair that `collide_direct` maps onto (p, pstar) when the
/// kick is zero.
pub fn collide_inverse(
    p: Momentum,
    pstar: Momentum,
    params: &CollisionParams,
    delta: f64,
) -> Result<(Momentum, Momentum)> {
    if params.lambda == 0.0 {
        return Err(Error::SingularInverse);
    }
    let transfer = 0.5 * (1.0 + params.lambda) / params.lambda * (pstar.0 - p.0 + delta);
    Ok((Momentum(p.0 + transfer), Momentum(pstar.0 - transfer)))
}

/// |1/L + (1 + 1/L)(d_pstar Delta - d_p Delta)/2|^-1
pub fn jacobian(params: &CollisionParams, d_delta_dp: f64, d_delta_dpstar: f64) -> Result<f64> {
    if params.lambda == 0.0 {
        return Err(Error::SingularInverse);
    }
    let inv = 1.0 / params.lambda;
    let bracket = inv + 0.5 * (1.0 + inv) * (d_delta_dpstar - d_delta_dp);
    if bracket == 0.0 || !bracket.is_finite() {
        return Err(Error::DegenerateMap);
    }
    Ok(1.0 / bracket.abs())
}

/// Change of the pair's total energy. Each particle's energy difference is
/// written as (p'-p)(p'+p)/(p0'+p0) to avoid cancellation.
pub fn energy_change(before: (Momentum, Momentum), after: (Momentum, Momentum)) -> f64 {
    let de = |a: Momentum, b: Momentum| (b.0 - a.0) * (b.0 + a.0) / (b.energy() + a.energy());
    de(before.0, after.0) + de(before.1, after.1)
}
