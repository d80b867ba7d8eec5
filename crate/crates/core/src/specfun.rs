//! Modified Bessel functions of the second kind, K_n(x), for integer order
//! and real x > 0.
//!
//! Below [`X_CUT`] the ascending series gives K_0 and K_1; above it Steed's
//! continued fraction (Temme's CF2) gives e^x K_0 and e^x K_1 directly, so
//! nothing overflows or underflows up to x = 1e6 and beyond. Higher orders
//! come from forward recurrence, which is stable for K.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;

/// Seam between the series and continued-fraction branches.
pub const X_CUT: f64 = 2.0;

fn check_arg(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel K needs a finite positive argument, got {x}")))
    }
}

/// Ascending series for (K_0, K_1), unscaled. Accurate for x <= a few.
pub(crate) fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();
    let mut t = 1.0; // y^k / (k!)^2
    let mut u = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut s0 = 0.0;
    let mut i1 = 1.0;
    // psi(1) + psi(2) = 1 - 2 gamma
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..200 {
        let kf = k as f64;
        t *= y / (kf * kf);
        u *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t;
        s0 += t * harmonic;
        i1 += u;
        s1 += u * (2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0));
        if t < EPS * i0 && u < EPS * i1 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * 0.5 * x * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's CF2 for (e^x K_0, e^x K_1). Converges quickly for x >= 2.
pub(crate) fn k01_cf2_scaled(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - a1 * h) / x;
    (k0, k1)
}

fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= X_CUT {
        let (k0, k1) = k01_series(x);
        let ex = x.exp();
        (k0 * ex, k1 * ex)
    } else {
        k01_cf2_scaled(x)
    }
}

/// e^x K_0(x) .. e^x K_4(x), the orders every formula in this crate uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledK {
    pub x: f64,
    pub k: [f64; 5],
}

impl ScaledK {
    pub fn new(x: f64) -> Result<Self> {
        check_arg(x)?;
        let (k0, k1) = k01_scaled(x);
        let mut k = [k0, k1, 0.0, 0.0, 0.0];
        for n in 1..4 {
            k[n + 1] = k[n - 1] + 2.0 * n as f64 * k[n] / x;
        }
        Ok(Self { x, k })
    }

    /// (K_1 - K_0)/K_1, free of cancellation at large x.
    pub fn d10(&self) -> f64 {
        k1_minus_k0_scaled(self.x) / self.k[1]
    }
}

/// e^x K_n(x).
pub fn bessel_k_scaled(n: u32, x: f64) -> Result<f64> {
    check_arg(x)?;
    let (mut km, mut k) = k01_scaled(x);
    if n == 0 {
        return Ok(km);
    }
    for j in 1..n {
        let next = km + 2.0 * j as f64 * k / x;
        km = k;
        k = next;
    }
    Ok(k)
}

/// K_n(x). Underflows to zero beyond x of about 745.
pub fn bessel_k(n: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(n, x)? * (-x).exp())
}

/// K_n(x) / K_m(x) from scaled values.
pub fn bessel_k_ratio(n: u32, m: u32, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(n, x)? / bessel_k_scaled(m, x)?)
}

/// e^x (K_1(x) - K_0(x)).
///
/// For x >= 30 the difference of the two asymptotic series is summed
/// term by term, which avoids subtracting two nearly equal numbers.
pub fn k1_minus_k0_scaled(x: f64) -> f64 {
    if x < 30.0 {
        let (k0, k1) = k01_scaled(x);
        return k1 - k0;
    }
    // a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
    let mut a0 = 1.0;
    let mut a1 = 1.0;
    let mut xp = 1.0;
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = (2.0 * kf - 1.0).powi(2);
        a0 *= -odd / (8.0 * kf);
        a1 *= (4.0 - odd) / (8.0 * kf);
        xp /= x;
        let term = (a1 - a0) * xp;
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_seam() {
        for &x in &[1.9, X_CUT, 2.1, 2.5] {
            let (s0, s1) = k01_series(x);
            let (c0, c1) = k01_cf2_scaled(x);
            let e = (-x).exp();
            assert!((s0 - c0 * e).abs() / s0 < 1e-13, "K0 seam at {x}");
            assert!((s1 - c1 * e).abs() / s1 < 1e-13, "K1 seam at {x}");
        }
    }

    #[test]
    fn difference_helper_matches_direct_where_both_work() {
        for &x in &[30.0, 45.0, 80.0] {
            let (k0, k1) = k01_cf2_scaled(x);
            let direct = k1 - k0;
            let asym = k1_minus_k0_scaled(x);
            assert!((direct - asym).abs() / asym < 1e-12, "x={x}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -1.0).is_err());
        assert!(bessel_k_scaled(2, f64::NAN).is_err());
        assert!(ScaledK::new(f64::INFINITY).is_err());
    }
}
