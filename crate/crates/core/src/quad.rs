//! Quadrature and one-dimensional search used by the theory module.

use crate::error::{Error, Result};

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
///
/// Plain-`x` front end to [`tanh_sinh_split`]; nodes that round onto an
/// endpoint are skipped.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    tanh_sinh_split(|x, _, _| if x > a && x < b { f(x) } else { 0.0 }, a, b, rel_tol)
}

/// Tanh-sinh quadrature where the integrand also receives the exact
/// distances `x - a` and `b - x`. Integrands singular at an endpoint
/// should build their singular factors from those distances, which stay
/// accurate down to 1e-270 where `x` itself has long rounded off.
///
/// The step is halved until two successive estimates agree to `rel_tol`.
pub fn tanh_sinh_split<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    tanh_sinh_core(f, a, b, rel_tol, 0.0)
}

/// [`tanh_sinh`] that also stops once successive estimates differ by less
/// than `abs_tol`. For inner integrals whose value can be negligibly small.
pub fn tanh_sinh_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    tanh_sinh_core(|x, _, _| if x > a && x < b { f(x) } else { 0.0 }, a, b, rel_tol, abs_tol)
}

fn tanh_sinh_core<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    const T_MAX: f64 = 6.0;
    const MIN_LEVEL: u32 = 3;
    const MAX_LEVEL: u32 = 12;
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);
    let hpi = std::f64::consts::FRAC_PI_2;

    // Contribution of the node pair at +-t (or the centre when t = 0).
    let pair = |t: f64| -> f64 {
        let u = hpi * t.sinh();
        let ch = u.cosh();
        let w = hpi * t.cosh() / (ch * ch);
        if t == 0.0 {
            return w * f(centre, half, half);
        }
        if w == 0.0 {
            return 0.0;
        }
        // distance from the nearest endpoint
        let dist = half * 2.0 / ((2.0 * u).exp() + 1.0);
        if dist == 0.0 {
            return 0.0;
        }
        let far = 2.0 * half - dist;
        w * (f(b - dist, far, dist) + f(a + dist, dist, far))
    };

    let mut h = 1.0;
    let mut sum = pair(0.0);
    let mut k = 1.0;
    while k <= T_MAX {
        sum += pair(k);
        k += 1.0;
    }
    let mut prev = half * h * sum;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += pair(t);
            t += 2.0 * h;
        }
        let est = half * h * sum;
        if !est.is_finite() {
            return Err(Error::Quadrature(format!("non-finite estimate on [{a}, {b}]")));
        }
        let diff = (est - prev).abs();
        let settled = diff <= rel_tol * est.abs() || diff <= abs_tol || est == 0.0 && prev == 0.0;
        if settled && level >= MIN_LEVEL {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::Quadrature(format!("tanh-sinh on [{a}, {b}] stalled at {prev:e}")))
}

const GL10_X: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_W: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// Composite 10-point Gauss-Legendre with `pieces` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut total = 0.0;
    for j in 0..pieces {
        let c = a + (j as f64 + 0.5) * width;
        let r = 0.5 * width;
        let mut s = 0.0;
        for i in 0..5 {
            s += GL10_W[i] * (f(c - r * GL10_X[i]) + f(c + r * GL10_X[i]));
        }
        total += r * s;
    }
    total
}

/// Golden-section search for a maximum of a unimodal `f` on [a, b].
/// Returns (argmax, max).
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
