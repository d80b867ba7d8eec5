//! Closed-form companions to the particle model: equilibrium cooling
//! parameters, limiting chi(t) laws, mean-flow solutions, the heating
//! integral and Fokker-Planck steady states.
//!
//! Bessel functions enter only through scaled values; the exponential
//! factors that multiply numerator and denominator alike are dropped
//! before evaluation.

use serde::{Deserialize, Serialize};

use crate::equilibrium::MjState;
use crate::error::{Error, Result};
use crate::kinematics::{dot_minus_one, gamma, opinion_to_momentum};
use crate::quad::{golden_max, tanh_sinh, tanh_sinh_abs, tanh_sinh_split};
use crate::specfun::{k1_minus_k0_scaled, ScaledK};

fn horner(x: f64, c: &[f64]) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Collisional cooling parameter at equilibrium, d(1/chi)/dt =
/// -n A (1 - L^2) psi1 / chi.
///
/// The denominator is split as D0 + c^2 D1. D0 = chi^3 K2^3 E with
/// E = chi^2 (K1 - K0)(K1 + K0) + 4 K1^2, and D1 / (chi^3 K1^5) is a cubic in
/// d = (K1 - K0)/K1, so the large-chi cancellations happen symbolically.
pub fn psi1(chi: f64, c: f64) -> Result<f64> {
    let k = ScaledK::new(chi)?;
    let k2x = ScaledK::new(2.0 * chi)?;
    let [k0, k1, k2, ..] = k.k;
    let c2 = c * c;
    let diff = k1_minus_k0_scaled(chi);
    let e = chi * chi * diff * (k1 + k0) + 4.0 * k1 * k1;
    let d0 = chi.powi(3) * k2.powi(3) * e;
    let d = diff / k1;
    let x = chi;
    let cubic = horner(
        d,
        &[
            2.0 * x * x + 4.0 * x + 16.0,
            -4.0 * x.powi(3) - 10.0 * x * x - 32.0 * x - 16.0,
            2.0 * x.powi(3) + 12.0 * x * x + 16.0 * x,
            -4.0 * x * x,
        ],
    );
    let d1 = x.powi(3) * k1.powi(5) * cubic;
    let r = k1 / k2;
    let num = chi * chi * k2 * (2.0 * c2 * chi * k2x.k[2] * k1 * k1 + (2.0 * chi * k2x.k[0] + k2x.k[1]) * k2 * k2);
    Ok(num / ((d0 + c2 * d1) * (1.0 + c2 * r * r).sqrt()))
}

/// psi1 at zero frame parameter:
/// (2 chi K0(2chi) + K1(2chi)) / (chi (chi^2+4) K1^2 - chi^3 K0^2).
pub fn psi1_zero(chi: f64) -> Result<f64> {
    let k = ScaledK::new(chi)?;
    let k2x = ScaledK::new(2.0 * chi)?;
    let (k0, k1) = (k.k[0], k.k[1]);
    let e = chi * chi * k1_minus_k0_scaled(chi) * (k1 + k0) + 4.0 * k1 * k1;
    Ok((2.0 * chi * k2x.k[0] + k2x.k[1]) / (chi * e))
}

/// Vlasov cooling parameter at equilibrium, d(1/chi)/dt = -B psi2 / chi.
pub fn psi2(chi: f64, p_drive: f64) -> Result<f64> {
    let k = ScaledK::new(chi)?;
    let p2 = p_drive * p_drive;
    let x = chi;
    if x < 1.0 {
        // direct form, normalised by K0
        let y1 = k.k[1] / k.k[0];
        let y2 = k.k[2] / k.k[0];
        let num =
            -4.0 * x * y1 * y2 * (p2 * x * y1.powi(3) + 4.0 * p2 * y2 * y1 * y1 - p2 * x * y2 * y2 * y1 + y2.powi(3));
        let den = 4.0
            * p2
            * y1
            * y1
            * (-2.0 * x * x - x * (x * x + 8.0) * y1 + (x * x - 8.0) * y1 * y1 + x * (x * x + 6.0) * y1.powi(3))
            + x * x * y2.powi(5)
            - 2.0 * x * x * y1 * y1 * y2.powi(3)
            + x * (x - 6.0 * y1) * y2.powi(4);
        return Ok(num / den);
    }
    // Expansion in d = (K1 - K0)/K0 with K2/K0 = 1 + 2(1 + d)/x. Both
    // sides carry an extra x^4 and a common factor of x has been removed.
    let d = k1_minus_k0_scaled(x) / k.k[0];
    let h = |c: &[f64]| horner(x, c);
    let num = [
        -4.0 * (x + 2.0) * h(&[8.0, 12.0, 6.0 + 4.0 * p2, 1.0]),
        -4.0 * h(&[80.0, 128.0, 72.0 + 40.0 * p2, 16.0 + 16.0 * p2, 1.0 + 4.0 * p2, 2.0 * p2]),
        -4.0 * h(&[160.0, 192.0, 72.0 + 80.0 * p2, 8.0 + 24.0 * p2, 14.0 * p2, 5.0 * p2]),
        -8.0 * h(&[80.0, 64.0, 12.0 + 40.0 * p2, 8.0 * p2, 9.0 * p2, 2.0 * p2]),
        -4.0 * h(&[80.0, 32.0, 40.0 * p2, 4.0 * p2, 10.0 * p2, p2]),
        -8.0 * h(&[8.0, 0.0, 4.0 * p2, 0.0, p2]),
    ];
    let den = [
        -4.0 * h(&[16.0, 24.0, 12.0, 2.0 + 8.0 * p2, 2.0 * p2, p2]),
        4.0 * h(&[-80.0, -96.0, -44.0, -16.0 - 32.0 * p2, -6.0 + 6.0 * p2, -1.0, 2.0 * p2]),
        2.0 * h(&[-320.0, -288.0, -128.0, -64.0 - 96.0 * p2, -18.0 + 72.0 * p2, -1.0 + 8.0 * p2, 14.0 * p2]),
        4.0 * h(&[-160.0, -96.0, -48.0, -24.0 - 32.0 * p2, -3.0 + 52.0 * p2, 4.0 * p2, 9.0 * p2]),
        4.0 * h(&[-80.0, -24.0, -20.0, -6.0 - 8.0 * p2, 30.0 * p2, p2, 5.0 * p2]),
        4.0 * h(&[-16.0, 0.0, -4.0, 0.0, 6.0 * p2, 0.0, p2]),
    ];
    Ok(horner(d, &num) / horner(d, &den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoolingRegime {
    SmallChiCollision,
    LargeChiCollision,
    SmallChiVlasov,
    LargeChiVlasov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingCurve {
    pub chi0: f64,
    /// A for the collision regimes, B for the Vlasov ones.
    pub rate_const: f64,
    pub regime: CoolingRegime,
}

/// Limiting chi(t) at equilibrium with zero mean opinion.
pub fn chi_limit(curve: &CoolingCurve, t: f64) -> Result<f64> {
    if !(curve.chi0 > 0.0) || !(curve.rate_const > 0.0) {
        return Err(Error::Domain(format!("cooling curve needs chi0 > 0 and rate > 0, got {curve:?}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let (c0, r) = (curve.chi0, curve.rate_const);
    Ok(match curve.regime {
        CoolingRegime::SmallChiCollision => c0 * (r * t / 8.0).exp(),
        CoolingRegime::LargeChiCollision => {
            let s = r * t / std::f64::consts::PI.sqrt() + c0.sqrt();
            s * s
        }
        CoolingRegime::SmallChiVlasov => c0 * (r * t).exp(),
        CoolingRegime::LargeChiVlasov => c0 * (2.0 * r * t).exp(),
    })
}

/// U^1 under pure inelastic collisions: c K1(chi)/K2(chi).
pub fn u1_inelastic(chi_t: f64, c: f64) -> Result<f64> {
    let k = ScaledK::new(chi_t)?;
    Ok(c * k.k[1] / k.k[2])
}

/// U^1 under the party drift: K1/K2 (P + C e^{-B t}).
pub fn u1_vlasov(t: f64, chi_t: f64, p_drive: f64, script_c: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("need b > 0 and t >= 0, got b={b}, t={t}")));
    }
    let k = ScaledK::new(chi_t)?;
    Ok(k.k[1] / k.k[2] * (p_drive + script_c * (-b * t).exp()))
}

/// Energy production by elastic collisions with a fixed kick `delta` in a
/// resting Maxwell-Juttner state:
///
/// n^2 A / (8 K1^2) int int |sin w - sin s| e^{-chi (sec w + sec s)}
///   (E(tan w - delta) + E(tan s + delta) - sec w - sec s) dw ds
///
/// over (-pi/2, pi/2)^2, with E(p) = sqrt(1 + p^2). The pair (w, s) ->
/// (-w, -s) maps the kick to its negative, so the integrand is averaged
/// over both signs; the result is then symmetric across the diagonal and
/// only the half below it is integrated.
pub fn heating_rate_mj(chi: f64, delta: f64, a: f64, n: f64) -> Result<f64> {
    let k1 = ScaledK::new(chi)?.k[1];
    if delta == 0.0 {
        return Ok(0.0);
    }
    let hpi = std::f64::consts::FRAC_PI_2;
    // energy change of p under p -> p + dp
    let de = |p: f64, e: f64, dp: f64| {
        let q = p + dp;
        dp * (2.0 * p + dp) / (q.hypot(1.0) + e)
    };
    let integrand = |w: f64, s: f64| -> f64 {
        let (sw, cw) = w.sin_cos();
        let (ss, cs) = s.sin_cos();
        if cw <= 0.0 || cs <= 0.0 {
            return 0.0;
        }
        let (pw, ps) = (sw / cw, ss / cs);
        let (ew, es) = (1.0 / cw, 1.0 / cs);
        // sec - 1 = 2 sin^2(x/2) / cos
        let hw = 2.0 * (0.5 * w).sin().powi(2) / cw;
        let hs = 2.0 * (0.5 * s).sin().powi(2) / cs;
        let weight = (sw - ss).abs() * (-chi * (hw + hs)).exp();
        if weight == 0.0 {
            return 0.0;
        }
        let plus = de(pw, ew, -delta) + de(ps, es, delta);
        let minus = de(pw, ew, delta) + de(ps, es, -delta);
        weight * 0.5 * (plus + minus)
    };
    let inner_err = std::cell::Cell::new(None);
    let outer = |w: f64| -> f64 {
        if w <= -hpi {
            return 0.0;
        }
        // the bracket is O(delta^2); this floor never moves the outer sum
        match tanh_sinh_abs(|s| integrand(w, s), -hpi, w, 1e-11, 1e-20 * delta * delta) {
            Ok(v) => v,
            Err(e) => {
                inner_err.set(Some(e));
                0.0
            }
        }
    };
    let total = 2.0 * tanh_sinh(outer, -hpi, hpi, 1e-10)?;
    if let Some(e) = inner_err.take() {
        return Err(e);
    }
    Ok(n * n * a / (8.0 * k1 * k1) * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyVariant {
    /// diffusion weight (1 - m^2)^2
    ToscaniSq,
    /// as ToscaniSq but with the power-law exponents carrying m instead of
    /// the mean opinion, exactly as typeset in the source
    ToscaniSqPrinted,
    /// diffusion weight (1 - |m|)^2
    ToscaniAbs,
    /// diffusion weight 1 - m^2
    ToscaniLin,
    /// zero-flux state of the causal Fokker-Planck model
    Relativistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    /// integral over (-1, 1) in dm equals 1
    Unit,
    /// integral equals the given density
    Density(f64),
    /// relativistic only: prefactor n / (2 K1(1/lambda)), the value under
    /// which the steady state coincides with the Maxwell-Juttner function
    /// at p = m gamma(m)
    JuttnerPrefactor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSpec {
    pub variant: SteadyVariant,
    pub lambda: f64,
    pub mbar: f64,
    pub normalization: Normalization,
}

/// A steady state with its normalisation constant resolved.
#[derive(Debug, Clone, Copy)]
pub struct SteadyState {
    spec: SteadyStateSpec,
    /// log of the multiplier applied to the unnormalised density
    log_scale: f64,
}

impl SteadyState {
    pub fn new(spec: SteadyStateSpec) -> Result<Self> {
        let SteadyStateSpec { variant, lambda, mbar, normalization } = spec;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        if mbar.is_nan() {
            return Err(Error::Domain("mean opinion is NaN".into()));
        }
        let divergent = |end: f64| {
            Err(Error::Domain(format!(
                "steady state {variant:?} with lambda={lambda}, mbar={mbar} is not \
                 normalisable: density diverges at m = {end}"
            )))
        };
        match variant {
            SteadyVariant::ToscaniLin => {
                if (1.0 + mbar) / lambda <= 0.0 {
                    return divergent(-1.0);
                }
                if (1.0 - mbar) / lambda <= 0.0 {
                    return divergent(1.0);
                }
            }
            _ => {
                if mbar >= 1.0 {
                    return divergent(1.0);
                }
                if mbar <= -1.0 {
                    return divergent(-1.0);
                }
            }
        }
        let mut st = SteadyState { spec, log_scale: 0.0 };
        if let Normalization::JuttnerPrefactor(n) = normalization {
            if variant != SteadyVariant::Relativistic {
                return Err(Error::Domain("the Juttner prefactor applies only to the relativistic state".into()));
            }
            let k1 = ScaledK::new(1.0 / lambda)?.k[1];
            st.log_scale = (n / (2.0 * k1)).ln();
            return Ok(st);
        }
        // shift by the grid maximum so the quadrature sees O(1) values
        let shift = (1..2000)
            .map(|i| {
                let m = -1.0 + i as f64 / 1000.0;
                st.log_unnormalised(m, 1.0 + m, 1.0 - m)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        // split at 0, where the |m| variant has a kink
        let z = tanh_sinh_split(|m, dl, dr| (st.log_unnormalised(m, dl, 1.0 + dr) - shift).exp(), -1.0, 0.0, 1e-12)?
            + tanh_sinh_split(|m, dl, dr| (st.log_unnormalised(m, 1.0 + dl, dr) - shift).exp(), 0.0, 1.0, 1e-12)?;
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Quadrature(format!("normalisation of {variant:?} evaluated to {z}")));
        }
        let mass = match normalization {
            Normalization::Density(n) => n,
            _ => 1.0,
        };
        st.log_scale = mass.ln() - shift - z.ln();
        Ok(st)
    }

    /// log of the density before normalisation; `lo` = 1 + m, `hi` = 1 - m.
    fn log_unnormalised(&self, m: f64, lo: f64, hi: f64) -> f64 {
        let SteadyStateSpec { variant, lambda, mbar, .. } = self.spec;
        match variant {
            SteadyVariant::ToscaniSq | SteadyVariant::ToscaniSqPrinted => {
                let s = if variant == SteadyVariant::ToscaniSq { mbar } else { m };
                let k = s / (2.0 * lambda);
                (-2.0 + k) * lo.ln() + (-2.0 - k) * hi.ln() - (1.0 - mbar * m) / (lambda * lo * hi)
            }
            SteadyVariant::ToscaniAbs => {
                let sgn = if m >= 0.0 { 1.0 } else { -1.0 };
                let gap = lo.min(hi);
                (-2.0 - 2.0 / lambda) * gap.ln() - (1.0 - mbar * sgn) / (2.0 * lambda * gap)
            }
            SteadyVariant::ToscaniLin => {
                -(1.0 - (1.0 + mbar) / lambda) * lo.ln() - (1.0 - (1.0 - mbar) / lambda) * hi.ln()
            }
            SteadyVariant::Relativistic => {
                // -(p.U - 1)/lambda with p = m gamma(m)
                let p = m / (lo * hi).sqrt();
                let u1 = mbar * gamma(mbar);
                -dot_minus_one(p, u1) / lambda
            }
        }
    }

    pub fn pdf(&self, m: f64) -> Result<f64> {
        if !(m.abs() < 1.0) {
            return Err(Error::Domain(format!("opinion must satisfy |m| < 1, got {m}")));
        }
        Ok((self.log_unnormalised(m, 1.0 + m, 1.0 - m) + self.log_scale).exp())
    }
}

pub fn steady_state_pdf(m: f64, spec: &SteadyStateSpec) -> Result<f64> {
    SteadyState::new(*spec)?.pdf(m)
}

/// The Maxwell-Juttner state matching a relativistic steady state.
pub fn juttner_counterpart(spec: &SteadyStateSpec, n: f64) -> Result<MjState> {
    MjState::new(n, spec.mbar, 1.0 / spec.lambda)
}

/// Argmax of `f` on a log-spaced grid refined by golden section on ln chi.
/// Returns None when the grid maximum sits on an end of the range.
pub fn peak_on_log_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Option<(f64, f64)> {
    let (l0, l1) = (lo.ln(), hi.ln());
    let step = (l1 - l0) / (points - 1) as f64;
    let vals: Vec<f64> = (0..points).map(|i| f((l0 + step * i as f64).exp())).collect();
    let best = (0..points).max_by(|&i, &j| vals[i].total_cmp(&vals[j]))?;
    if best == 0 || best == points - 1 {
        return None;
    }
    let a = l0 + step * (best - 1) as f64;
    let b = l0 + step * (best + 1) as f64;
    // 1e-5 in ln chi is below 1e-4 in chi over the tabulated range
    let (lx, v) = golden_max(|l| f(l.exp()), a, b, 1e-5 / (1.0 + hi.ln().abs()));
    Some((lx.exp(), v))
}

/// Peak of psi1(chi, 0).
pub fn psi1_zero_peak() -> Result<(f64, f64)> {
    psi1_zero(1.0)?;
    peak_on_log_grid(|c| psi1_zero(c).unwrap_or(f64::NAN), 1e-2, 1e3, 201)
        .ok_or_else(|| Error::Invariant("psi1(chi, 0) has no interior maximum".into()))
}

/// Interior peak of psi1(., c), if any.
pub fn psi1_peak(c: f64) -> Option<(f64, f64)> {
    peak_on_log_grid(|x| psi1(x, c).unwrap_or(f64::NAN), 1e-2, 1e3, 201)
}

/// Interior peak of psi2(., P) over chi in [1e-3, 1e3], if any. Small |P|
/// gives a monotone rise towards 2 and no interior peak.
pub fn psi2_peak(p_drive: f64) -> Option<(f64, f64)> {
    peak_on_log_grid(|x| psi2(x, p_drive).unwrap_or(f64::NAN), 1e-3, 1e3, 241)
}

/// Rows (chi, c, psi1) over the outer product of the grids.
pub fn tabulate_psi1(chis: &[f64], cs: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(chis.len() * cs.len());
    for &x in chis {
        for &c in cs {
            out.push((x, c, psi1(x, c)?));
        }
    }
    Ok(out)
}

/// Rows (chi, P, psi2) over the outer product of the grids.
pub fn tabulate_psi2(chis: &[f64], ps: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(chis.len() * ps.len());
    for &x in chis {
        for &p in ps {
            out.push((x, p, psi2(x, p)?));
        }
    }
    Ok(out)
}

/// Log-spaced grid including both ends.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..points).map(|i| (l0 + (l1 - l0) * i as f64 / (points - 1).max(1) as f64).exp()).collect()
}

/// Momentum of the party: P = m_p gamma(m_p).
pub fn party_momentum(m_p: f64) -> Result<f64> {
    Ok(opinion_to_momentum(m_p)?.p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi2_branches_meet() {
        for &p in &[0.0, 0.5, 2.0] {
            let below = psi2(1.0 - 1e-12, p).unwrap();
            let above = psi2(1.0, p).unwrap();
            assert!((below - above).abs() < 1e-9 * above.abs(), "P={p}: {below} {above}");
        }
    }

    #[test]
    fn chi_limit_examples() {
        let c = |regime, chi0, r| CoolingCurve { chi0, rate_const: r, regime };
        let v = chi_limit(&c(CoolingRegime::SmallChiCollision, 0.01, 1.0), 8.0).unwrap();
        assert!((v - 0.01 * 1f64.exp()).abs() < 1e-15);
        let v = chi_limit(&c(CoolingRegime::LargeChiCollision, 100.0, 1.0), 0.0).unwrap();
        assert!((v - 100.0).abs() < 1e-12);
        let v = chi_limit(&c(CoolingRegime::LargeChiVlasov, 1.0, 0.1), 10.0).unwrap();
        assert!((v - 2f64.exp()).abs() < 1e-12);
        assert!(chi_limit(&c(CoolingRegime::SmallChiVlasov, 1.0, 0.1), -1.0).is_err());
    }

    #[test]
    fn u1_examples() {
        assert_eq!(u1_inelastic(3.0, 0.0).unwrap(), 0.0);
        // K1/K2 ~ 1 - 3/(2x) + 15/(8x^2)
        let x = 1e4;
        let asym = 1.0 - 1.5 / x + 15.0 / (8.0 * x * x);
        assert!((u1_inelastic(x, 1.0).unwrap() - asym).abs() < 1e-10);
        let v = u1_inelastic(1.0, 1.0).unwrap();
        assert!((v - 0.370_443).abs() < 1e-5);
        let k = u1_inelastic(2.0, 1.0).unwrap();
        assert!((u1_vlasov(0.0, 2.0, 0.3, 0.2, 0.1).unwrap() - 0.5 * k).abs() < 1e-15);
        assert!((u1_vlasov(7.0, 2.0, 0.3, 0.0, 0.1).unwrap() - 0.3 * k).abs() < 1e-15);
        let late = u1_vlasov(100.0, 2.0, 0.0, 1.0, 0.1).unwrap();
        assert!(late.abs() < 5e-5 * k);
    }

    #[test]
    fn divergent_steady_states_name_the_endpoint() {
        let spec = SteadyStateSpec {
            variant: SteadyVariant::ToscaniSq,
            lambda: 0.5,
            mbar: 1.0,
            normalization: Normalization::Unit,
        };
        let err = SteadyState::new(spec).unwrap_err().to_string();
        assert!(err.contains("m = 1"), "{err}");
        let spec = SteadyStateSpec { variant: SteadyVariant::ToscaniLin, mbar: -1.0, ..spec };
        let err = SteadyState::new(spec).unwrap_err().to_string();
        assert!(err.contains("m = -1"), "{err}");
    }
}
