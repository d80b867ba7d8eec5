//! Values checked against sources independent of the library code:
//! frozen 80-digit values, integral representations and plain quadrature
//! written out here.

// reference digits are kept as generated
#![allow(clippy::excessive_precision)]

use std::f64::consts::FRAC_PI_2;

use bounded_opinion::equilibrium::{
    energy_density, energy_density_as_printed, mj_mass_between, mj_pdf, mj_pdf_opinion, z_moments, z_star_moments,
    MjState,
};
use bounded_opinion::kinematics::{Momentum, TwoVector};
use bounded_opinion::specfun::{bessel_k, bessel_k_ratio, bessel_k_scaled};
use bounded_opinion::theory::{
    heating_rate_mj, psi1, psi1_zero, psi2, steady_state_pdf, Normalization, SteadyState, SteadyStateSpec,
    SteadyVariant,
};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Composite 8-point Gauss-Legendre, kept separate from the library rule.
fn gl(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    const X: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for i in 0..pieces {
        let c = a + h * (i as f64 + 0.5);
        for k in 0..4 {
            let d = 0.5 * h * X[k];
            s += W[k] * (f(c - d) + f(c + d));
        }
    }
    0.5 * h * s
}

/// Trapezoid on a wide symmetric interval; exponentially accurate for
/// smooth integrands that decay at both ends.
fn trap(f: impl Fn(f64) -> f64, half_width: f64, h: f64) -> f64 {
    let n = (half_width / h).ceil() as i64;
    (-n..=n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

// 80-digit reference values of K_0..K_4.
const K_TABLE: [(f64, [f64; 5]); 7] = [
    (0.001, [7.0236888005623813, 999.99623815608557, 1999999.5000009717, 7999999000.000125, 47999996000000.25]),
    (0.5, [0.92441907122766586, 1.6564411200033009, 7.5501835512408694, 62.057909529930256, 752.24509791040395]),
    (1.0, [0.42102443824070833, 0.60190723019723457, 1.6248388986351775, 7.1012628247379445, 44.232415847062845]),
    (2.0, [0.11389387274953344, 0.13986588181652243, 0.25375975456605586, 0.64738539094863415, 2.1959159274119583]),
    (2.5, [0.062347553200366186, 0.073890816347747064, 0.12146020627856384, 0.2682271463934492, 0.76520535762284192]),
    (
        10.0,
        [
            1.7780062316167652e-5,
            1.8648773453825585e-5,
            2.1509817006932769e-5,
            2.7252700256598692e-5,
            3.7861437160891984e-5,
        ],
    ),
    (
        50.0,
        [
            3.4101677497894955e-23,
            3.4441022267175556e-23,
            3.5479318388581977e-23,
            3.7279367738262114e-23,
            3.9952842517173431e-23,
        ],
    ),
];

#[test]
fn bessel_matches_reference_table() {
    for (x, ks) in K_TABLE {
        for (n, &k) in ks.iter().enumerate() {
            let v = bessel_k(n as u32, x).unwrap();
            assert!(rel(v, k) < 2e-14, "K{n}({x}) = {v}, want {k}");
        }
    }
    let scaled_700 =
        [0.047362369454613572, 0.047396187653494544, 0.047497787133623557, 0.047667603579972393, 0.047906366592880463];
    for (n, &k) in scaled_700.iter().enumerate() {
        assert!(rel(bessel_k_scaled(n as u32, 700.0).unwrap(), k) < 2e-14);
    }
}

#[test]
fn bessel_matches_integral_representation() {
    // K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt
    for &x in &[0.3, 1.0, 1.99, 2.01, 4.0, 17.0] {
        for n in 0..5u32 {
            let q = 0.5 * trap(|t: f64| (-x * t.cosh()).exp() * (n as f64 * t).cosh(), 12.0, 0.01);
            assert!(rel(bessel_k(n, x).unwrap(), q) < 1e-12, "n={n} x={x}");
        }
    }
}

#[test]
fn bessel_ratio_is_quotient() {
    let r = bessel_k_ratio(1, 2, 1.0).unwrap();
    assert!(rel(r, 0.37044117463141794) < 1e-14);
    // scaled ratio survives where both values underflow
    let r = bessel_k_ratio(1, 0, 2000.0).unwrap();
    assert!(rel(r, 1.0 + 0.5 / 2000.0 - 0.125 / 2000.0f64.powi(2)) < 1e-9);
}

const PSI1_TABLE: [(f64, f64, f64); 21] = [
    (0.01, 0.0, 0.1251504319707816),
    (0.01, 0.5, 0.12515160281888869),
    (0.01, 2.0, 0.1251691648074871),
    (0.1, 0.0, 0.13168369138763767),
    (0.1, 0.5, 0.13179583483387366),
    (0.1, 2.0, 0.13347052099429911),
    (1.0, 0.0, 0.22497468442679931),
    (1.0, 0.5, 0.22785655832870888),
    (1.0, 2.0, 0.25037386219803815),
    (4.0, 0.0, 0.29514422483354931),
    (4.0, 0.5, 0.28539983613819691),
    (4.0, 2.0, 0.19794557901391569),
    (10.0, 0.0, 0.26495877692057418),
    (10.0, 0.5, 0.24606724075735137),
    (10.0, 2.0, 0.14016312137166875),
    (50.0, 0.0, 0.14956737571236948),
    (50.0, 0.5, 0.13484699873685419),
    (50.0, 2.0, 0.069102906357942348),
    (200.0, 0.0, 0.07848518763317858),
    (200.0, 0.5, 0.070339746186887759),
    (200.0, 2.0, 0.035382953847546874),
];

#[test]
fn psi1_matches_reference_table() {
    for (x, c, want) in PSI1_TABLE {
        let v = psi1(x, c).unwrap();
        assert!(rel(v, want) < 1e-12, "psi1({x}, {c}) = {v}, want {want}");
        assert_eq!(v, psi1(x, -c).unwrap());
        if c == 0.0 {
            assert!(rel(psi1_zero(x).unwrap(), want) < 1e-12);
        }
    }
}

const PSI2_TABLE: [(f64, f64, f64); 18] = [
    (0.01, 0.0, 1.0002111743656294),
    (0.01, 1.0, 1.0002611308978001),
    (0.01, 3.0, 1.0006607830837369),
    (0.5, 0.0, 1.0925035235285984),
    (0.5, 1.0, 1.1734915099531756),
    (0.5, 3.0, 1.7534459619085413),
    (1.0, 0.0, 1.1969187201653706),
    (1.0, 1.0, 1.3786368855104141),
    (1.0, 3.0, 2.2841757506741446),
    (2.0, 0.0, 1.3570976575973695),
    (2.0, 1.0, 1.6121988542481828),
    (2.0, 3.0, 2.2998664007483984),
    (10.0, 0.0, 1.761002241949879),
    (10.0, 1.0, 1.8862850715644081),
    (10.0, 3.0, 2.0185952392738503),
    (100.0, 0.0, 1.9707334570283814),
    (100.0, 1.0, 1.9855042563537086),
    (100.0, 3.0, 1.9976461311730016),
];

#[test]
fn psi2_matches_reference_table() {
    for (x, p, want) in PSI2_TABLE {
        let v = psi2(x, p).unwrap();
        assert!(rel(v, want) < 1e-11, "psi2({x}, {p}) = {v}, want {want}");
        assert_eq!(v, psi2(x, -p).unwrap());
    }
}

/// Z^{a...} by quadrature in rapidity, p = (cosh w, sinh w), dp/p0 = dw.
fn z_quad(chi: f64, eta: f64, idx: &[usize], scale: f64) -> f64 {
    trap(
        |w: f64| {
            let (c, s) = ((w + eta).cosh(), (w + eta).sinh());
            let prod: f64 = idx.iter().map(|&i| if i == 0 { c } else { s }).product();
            prod * (-chi * w.cosh()).exp()
        },
        (1.0 + 80.0 / chi).acosh(),
        0.002 / (1.0 + chi.sqrt()),
    ) * scale
}

#[test]
fn z_moments_match_rapidity_quadrature() {
    for &chi in &[0.3, 1.0, 7.0] {
        for &eta in &[0.0f64, 0.8] {
            let u = TwoVector::new(eta.cosh(), eta.sinh());
            for rank in 0..=4usize {
                let t = z_moments(chi, u, rank).unwrap();
                for off in 0..(1usize << rank) {
                    let idx: Vec<usize> = (0..rank).map(|j| (off >> j) & 1).collect();
                    let q = z_quad(chi, eta, &idx, 1.0);
                    let v = t.get(&idx);
                    assert!((v - q).abs() < 1e-11 * (1.0 + q.abs()), "chi={chi} eta={eta} {idx:?}: {v} vs {q}");
                }
            }
        }
    }
}

#[test]
fn z_star_moments_match_quadrature() {
    // P = Q* (cosh w, sinh w), dP/P0 = dw
    for &(chi, qs) in &[(0.5, 2.0), (2.0, 3.5)] {
        let eta = 0.4f64;
        let u = TwoVector::new(eta.cosh(), eta.sinh());
        for rank in 0..=2usize {
            let t = z_star_moments(chi, qs, u, rank).unwrap();
            for off in 0..(1usize << rank) {
                let idx: Vec<usize> = (0..rank).map(|j| (off >> j) & 1).collect();
                let q = z_quad(chi * qs, eta, &idx, qs.powi(rank as i32));
                assert!((t.get(&idx) - q).abs() < 1e-11 * (1.0 + q.abs()));
            }
        }
    }
}

#[test]
fn mj_density_and_mass() {
    let st = MjState::new(1.7, 0.6, 1.5).unwrap();
    let g = 1.0 / (1.0 - 0.36f64).sqrt();
    // integral of f dp is N^0 = n U^0
    let total = gl(|p| mj_pdf(Momentum(p), &st), -40.0, 40.0, 4000);
    assert!(rel(total, 1.7 * g) < 1e-12);
    // same mass in the opinion variable
    let total_m = gl(|m| mj_pdf_opinion(m, &st), -1.0, 1.0, 4000);
    assert!(rel(total_m, 1.7 * g) < 1e-9);
    let p_of = |m: f64| m / (1.0 - m * m).sqrt();
    for &(a, b) in &[(-0.5, 0.2), (0.2, 0.9), (0.9, 0.999)] {
        let q = gl(|p| mj_pdf(Momentum(p), &st), p_of(a), p_of(b), 2000);
        assert!(rel(mj_mass_between(a, b, &st), q) < 1e-11, "{a}..{b}");
    }
}

#[test]
fn energy_per_particle_is_mj_moment_ratio() {
    // T^00 / N^0 at rest from the rank-2 and rank-1 moments
    for &chi in &[0.01, 1.0, 30.0] {
        let rest = TwoVector::new(1.0, 0.0);
        let t00 = z_moments(chi, rest, 2).unwrap().get(&[0, 0]);
        let n0 = z_moments(chi, rest, 1).unwrap().get(&[0]);
        assert!(rel(energy_density(chi).unwrap(), t00 / n0) < 1e-12);
    }
    assert!(rel(energy_density(1.0).unwrap(), 1.6994839355937723) < 1e-14);
    assert!(rel(energy_density_as_printed(1.0).unwrap(), 1.0 + 1.4296253982604) < 1e-12);
}

#[test]
fn phi_of_rest_mj_closed_form() {
    // int |p| f_MJ dp = n (1 + chi) e^-chi / (chi^2 K1)
    for &chi in &[0.5, 2.0, 9.0] {
        let st = MjState::new(1.0, 0.0, chi).unwrap();
        let q = gl(|p| p.abs() * mj_pdf(Momentum(p), &st), -60.0, 60.0, 6000);
        let closed = (1.0 + chi) * (-chi).exp() / (chi * chi * bessel_k(1, chi).unwrap());
        assert!(rel(q, closed) < 1e-10);
    }
}

/// Small-kick limit of the heating integral: the energy change expands to
/// Delta^2 (cos^3 w + cos^3 s) / 2 after averaging the sign of the kick.
fn heating_small_kick(chi: f64, delta: f64) -> f64 {
    let k1 = bessel_k(1, chi).unwrap();
    let inner = |w: f64| {
        gl(
            |s: f64| {
                let (sw, cw) = w.sin_cos();
                let (ss, cs) = s.sin_cos();
                if cw <= 0.0 || cs <= 0.0 {
                    return 0.0;
                }
                (sw - ss).abs() * (-chi * (1.0 / cw + 1.0 / cs)).exp() * 0.5 * (cw.powi(3) + cs.powi(3))
            },
            -FRAC_PI_2,
            w,
            150,
        )
    };
    2.0 * gl(inner, -FRAC_PI_2, FRAC_PI_2, 150) * delta * delta / (8.0 * k1 * k1)
}

#[test]
fn heating_matches_small_kick_limit() {
    for &chi in &[0.5, 1.0, 5.0] {
        let d = 1e-3;
        let h = heating_rate_mj(chi, d, 1.0, 1.0).unwrap();
        let o = heating_small_kick(chi, d);
        assert!(h > 0.0);
        assert!(rel(h, o) < 1e-4, "chi={chi}: {h} vs {o}");
    }
    assert_eq!(heating_rate_mj(1.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
    // prefactor n^2 A
    let a = heating_rate_mj(2.0, 0.01, 1.0, 1.0).unwrap();
    let b = heating_rate_mj(2.0, 0.01, 3.0, 2.0).unwrap();
    assert!(rel(b, 12.0 * a) < 1e-12);
}

#[test]
fn toscani_lin_is_a_beta_density() {
    // (1+m)^1 (1-m)^2 normalised: 3/4 (1+m)(1-m)^2
    let spec = SteadyStateSpec {
        variant: SteadyVariant::ToscaniLin,
        lambda: 0.4,
        mbar: -0.2,
        normalization: Normalization::Unit,
    };
    for &m in &[-0.9, -0.3, 0.0, 0.55, 0.97] {
        let want = 0.75 * (1.0 + m) * (1.0 - m) * (1.0 - m);
        assert!(rel(steady_state_pdf(m, &spec).unwrap(), want) < 1e-10);
    }
    // exponent vanishing at m = 1: 3/8 (1+m)^2
    let spec = SteadyStateSpec { lambda: 0.5, mbar: 0.5, ..spec };
    for &m in &[-0.5, 0.2, 0.99] {
        assert!(rel(steady_state_pdf(m, &spec).unwrap(), 0.375 * (1.0 + m).powi(2)) < 1e-10);
    }
}

#[test]
fn steady_states_have_unit_mass() {
    for variant in [SteadyVariant::ToscaniSq, SteadyVariant::ToscaniAbs, SteadyVariant::Relativistic] {
        for &(lambda, mbar) in &[(0.3, 0.0), (0.5, 0.4), (2.0, -0.7)] {
            let spec = SteadyStateSpec { variant, lambda, mbar, normalization: Normalization::Unit };
            let st = SteadyState::new(spec).unwrap();
            let mass = gl(|m| st.pdf(m).unwrap_or(0.0), -1.0, 1.0, 4000);
            assert!((mass - 1.0).abs() < 1e-8, "{variant:?} {lambda} {mbar}: {mass}");
        }
    }
}
