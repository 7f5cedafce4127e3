//! Real-argument special functions used by the closed-form gain and
//! beam-profile curves.
//!
//! Elliptic integrals use the *parameter* convention:
//!
//! ```text
//!          π/2
//!          ⌠          dt
//! K(m)  =  │  ─────────────────
//!          ⌡  √(1 − m·sin²t)
//!          0
//! ```
//!
//! Negative parameters are reduced to `[0, 1)` through the imaginary-modulus
//! transform before the AGM iteration runs.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{function}: argument {arg} outside the domain ({constraint})")]
    Domain {
        function: &'static str,
        arg: f64,
        constraint: &'static str,
    },
}

fn domain(function: &'static str, arg: f64, constraint: &'static str) -> SpecFunError {
    SpecFunError::Domain {
        function,
        arg,
        constraint,
    }
}

/// Complete elliptic integral of the first kind, `m < 1`.
pub fn ellip_k(m: f64) -> Result<f64, SpecFunError> {
    if !m.is_finite() || m >= 1.0 {
        return Err(domain("ellip_k", m, "m < 1"));
    }
    if m < 0.0 {
        // K(m) = K(m/(m-1)) / sqrt(1-m)
        let mt = m / (m - 1.0);
        return Ok(agm_k(mt) / (1.0 - m).sqrt());
    }
    Ok(agm_k(m))
}

/// Complete elliptic integral of the second kind, `m ≤ 1`.
pub fn ellip_e(m: f64) -> Result<f64, SpecFunError> {
    if !m.is_finite() || m > 1.0 {
        return Err(domain("ellip_e", m, "m <= 1"));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    if m < 0.0 {
        // E(m) = sqrt(1-m) E(m/(m-1))
        let mt = m / (m - 1.0);
        return Ok((1.0 - m).sqrt() * agm_e(mt));
    }
    Ok(agm_e(m))
}

fn agm_k(m: f64) -> f64 {
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (2.0 * a)
}

fn agm_e(m: f64) -> f64 {
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    // Σ 2^(n-1) c_n², starting with c_0² = m.
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// Struve order supported by [`struve_h`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StruveOrder {
    MinusOne,
    Zero,
    One,
}

impl StruveOrder {
    pub fn from_int(order: i32) -> Option<Self> {
        match order {
            -1 => Some(Self::MinusOne),
            0 => Some(Self::Zero),
            1 => Some(Self::One),
            _ => None,
        }
    }

    fn nu(self) -> f64 {
        match self {
            Self::MinusOne => -1.0,
            Self::Zero => 0.0,
            Self::One => 1.0,
        }
    }
}

const STRUVE_SERIES_MAX: f64 = 16.0;
const STRUVE_ASYMPTOTIC_MIN: f64 = 100.0;

/// Struve function `H_ν(x)` for `ν ∈ {−1, 0, 1}` and `x ≥ 0`.
///
/// Three regimes: the ascending series up to `x = 16`, Gauss–Legendre
/// quadrature of the Poisson integral up to `x = 100`, and the
/// `H_ν − Y_ν` asymptotic expansion beyond.
pub fn struve_h(order: i32, x: f64) -> Result<f64, SpecFunError> {
    let order = StruveOrder::from_int(order)
        .ok_or_else(|| domain("struve_h", order as f64, "order in {-1, 0, 1}"))?;
    struve(order, x)
}

/// Typed variant of [`struve_h`].
pub fn struve(order: StruveOrder, x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain("struve_h", x, "finite x >= 0"));
    }
    Ok(if x <= STRUVE_SERIES_MAX {
        struve_series(order, x)
    } else if x <= STRUVE_ASYMPTOTIC_MIN {
        struve_integral(order, x)
    } else {
        struve_asymptotic(order, x)
    })
}

fn struve_series(order: StruveOrder, x: f64) -> f64 {
    let nu = order.nu();
    let half = 0.5 * x;
    // m = 0 term: (x/2)^(ν+1) / (Γ(3/2) Γ(ν+3/2))
    let mut term = match order {
        StruveOrder::MinusOne => FRAC_2_PI,
        StruveOrder::Zero => FRAC_2_PI * x,
        StruveOrder::One => 2.0 * x * x / (3.0 * PI),
    };
    let q = half * half;
    let mut sum = term;
    let mut m = 0.0;
    loop {
        term *= -q / ((m + 1.5) * (m + nu + 1.5));
        m += 1.0;
        sum += term;
        if m > half && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum
}

// 16-point Gauss–Legendre nodes/weights on [-1, 1] (positive half).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_095,
];

fn gauss_legendre_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in GL16_X.iter().zip(GL16_W.iter()) {
            s += wi * (f(mid - half * xi) + f(mid + half * xi));
        }
        total += half * s;
    }
    total
}

fn struve_integral(order: StruveOrder, x: f64) -> f64 {
    let panels = (x / 4.0).ceil() as usize + 4;
    match order {
        StruveOrder::Zero => {
            FRAC_2_PI * gauss_legendre_panels(|t| (x * t.cos()).sin(), 0.0, FRAC_PI_2, panels)
        }
        StruveOrder::One => {
            FRAC_2_PI
                * x
                * gauss_legendre_panels(
                    |t| {
                        let s = t.sin();
                        (x * t.cos()).sin() * s * s
                    },
                    0.0,
                    FRAC_PI_2,
                    panels,
                )
        }
        // H₋₁ = H₀', differentiated under the integral sign.
        StruveOrder::MinusOne => {
            FRAC_2_PI
                * gauss_legendre_panels(
                    |t| {
                        let c = t.cos();
                        c * (x * c).cos()
                    },
                    0.0,
                    FRAC_PI_2,
                    panels,
                )
        }
    }
}

fn struve_asymptotic(order: StruveOrder, x: f64) -> f64 {
    let nu = order.nu();
    // c_k = Γ(k+½)/Γ(ν+½−k)
    let mut c = match order {
        StruveOrder::MinusOne => -0.5,
        StruveOrder::Zero => 1.0,
        StruveOrder::One => 2.0,
    };
    let half = 0.5 * x;
    let mut pow = half.powf(nu - 1.0);
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let term = c * pow;
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        let kf = k as f64;
        c *= (kf + 0.5) * (nu - 0.5 - kf);
        pow /= half * half;
    }
    let y = match order {
        StruveOrder::MinusOne => -bessel_y_asymptotic(1.0, x),
        StruveOrder::Zero => bessel_y_asymptotic(0.0, x),
        StruveOrder::One => bessel_y_asymptotic(1.0, x),
    };
    y + sum / PI
}

/// Hankel asymptotic form of `Y_ν(x)`; only accurate for large `x`.
fn bessel_y_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0_f64; // a_k(ν) / x^k
    let mut prev = f64::INFINITY;
    for k in 0..40 {
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        let odd = (2 * k + 1) as f64;
        a *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
        if a.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos())
}

/// Sine integral `Si(x) = ∫₀ˣ sin t / t dt` for `x ≥ 0`.
pub fn sine_integral(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain("sine_integral", x, "finite x >= 0"));
    }
    if x <= 4.0 {
        let x2 = x * x;
        let mut fact_term = x; // x^(2n+1)/(2n+1)!
        let mut sum = x;
        let mut n = 0usize;
        loop {
            let a = (2 * n + 2) as f64;
            let b = (2 * n + 3) as f64;
            fact_term *= -x2 / (a * b);
            n += 1;
            let term = fact_term / (2 * n + 1) as f64;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs().max(1e-300) || n > 60 {
                break;
            }
        }
        return Ok(sum);
    }
    // Continued fraction for E1(ix), modified Lentz.
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..200 {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    Ok(FRAC_PI_2 + h.im)
}

const SINC_SERIES_MAX: f64 = 1e-4;

/// Unnormalized sinc, `sin(x)/x`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SINC_SERIES_MAX {
        let x2 = ax * ax;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        ax.sin() / ax
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Reference values below were computed with 30-digit arithmetic.

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Trapezoid rule over one full period; spectrally accurate for the
    /// smooth periodic integrands of K and E.
    fn periodic_trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n).map(|i| f(h * i as f64)).sum::<f64>() * h
    }

    fn k_oracle(m: f64) -> f64 {
        periodic_trapezoid(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 4096) / 4.0
    }

    fn e_oracle(m: f64) -> f64 {
        periodic_trapezoid(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 4096) / 4.0
    }

    #[test]
    fn ellip_k_points() {
        assert_eq!(ellip_k(0.0).unwrap(), FRAC_PI_2);
        assert!(rel(ellip_k(0.5).unwrap(), 1.854_074_677_301_371_9) < 1e-12);
        assert!(rel(ellip_k(-4.0).unwrap(), 1.009_452_909_989_211_6) < 1e-12);
        assert!(rel(ellip_k(0.99).unwrap(), 3.695_637_362_989_874_2) < 1e-12);
        assert!(rel(ellip_k(-0.5).unwrap(), 1.415_737_208_425_956_2) < 1e-12);
    }

    #[test]
    fn ellip_e_points() {
        assert_eq!(ellip_e(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(ellip_e(1.0).unwrap(), 1.0);
        assert!(rel(ellip_e(0.5).unwrap(), 1.350_643_881_047_675_5) < 1e-12);
        assert!(rel(ellip_e(0.99).unwrap(), 1.015_993_545_025_224) < 1e-12);
        assert!(rel(ellip_e(-4.0).unwrap(), 2.635_183_581_595_630) < 1e-12);
    }

    #[test]
    fn elliptic_agree_with_quadrature_oracle() {
        for &m in &[-6.0, -1.0, -0.2, 0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!(rel(ellip_k(m).unwrap(), k_oracle(m)) < 1e-12, "K({m})");
            assert!(rel(ellip_e(m).unwrap(), e_oracle(m)) < 1e-12, "E({m})");
        }
    }

    #[test]
    fn elliptic_domain_errors() {
        assert!(ellip_k(1.0).is_err());
        assert!(ellip_k(f64::NAN).is_err());
        assert!(ellip_e(1.0 + 1e-12).is_err());
        assert!(ellip_e(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn legendre_relation() {
        for i in 1..10 {
            let m = i as f64 / 10.0;
            let (k, kp) = (ellip_k(m).unwrap(), ellip_k(1.0 - m).unwrap());
            let (e, ep) = (ellip_e(m).unwrap(), ellip_e(1.0 - m).unwrap());
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-10);
        }
    }

    #[test]
    fn k_monotone_above_half_pi() {
        let mut prev = ellip_k(0.0).unwrap();
        for i in 1..1000 {
            let k = ellip_k(i as f64 / 1000.0).unwrap();
            assert!(k > prev && k > FRAC_PI_2);
            prev = k;
        }
    }

    #[test]
    fn struve_points() {
        let cases: [(i32, f64, f64); 19] = [
            (0, 0.0, 0.0),
            (-1, 0.0, FRAC_2_PI),
            (1, 0.0, 0.0),
            (0, 1.0, 0.568_656_627_048_287_95),
            (0, 5.0, -0.185_216_815_776_684_9),
            (0, 16.0, 0.135_449_318_081_864_68),
            (0, 20.0, 0.094_393_698_081_323_45),
            (0, 30.0, -0.096_098_421_554_162_11),
            (0, 50.0, -0.085_337_674_826_119),
            (1, 1.0, 0.198_457_336_201_944_4),
            (1, 5.0, 0.807_811_945_794_064_4),
            (1, 16.0, 0.817_054_111_875_970_2),
            (1, 20.0, 0.472_688_184_291_042_9),
            (1, 50.0, 0.580_078_447_945_441_9),
            (-1, 1.0, 0.438_162_436_165_636_94),
            (-1, 5.0, -0.171_192_173_426_483_1),
            (-1, 16.0, -0.180_434_339_508_388_88),
            (-1, 30.0, -0.085_130_605_979_408_64),
            (-1, 50.0, 0.056_541_324_422_139_444),
        ];
        for (order, x, want) in cases {
            let got = struve_h(order, x).unwrap();
            assert!(
                (got - want).abs() < 1e-10,
                "H_{order}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn struve_regimes_join_smoothly() {
        for order in [-1, 0, 1] {
            for &edge in &[STRUVE_SERIES_MAX, STRUVE_ASYMPTOTIC_MIN] {
                let o = StruveOrder::from_int(order).unwrap();
                let a = struve_integral(o, edge);
                let b = if edge == STRUVE_SERIES_MAX {
                    struve_series(o, edge)
                } else {
                    struve_asymptotic(o, edge)
                };
                assert!((a - b).abs() < 1e-10, "order {order} at {edge}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn struve_recurrence_identity() {
        for i in 0..=400 {
            let x = i as f64 * 0.05;
            let s = struve_h(-1, x).unwrap() + struve_h(1, x).unwrap();
            assert!((s - FRAC_2_PI).abs() < 1e-9, "x = {x}");
        }
        for &x in &[25.0, 60.0, 99.0, 101.0, 250.0, 1e4] {
            let s = struve_h(-1, x).unwrap() + struve_h(1, x).unwrap();
            assert!((s - FRAC_2_PI).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn struve_domain_errors() {
        assert!(struve_h(2, 1.0).is_err());
        assert!(struve_h(0, -1.0).is_err());
        assert!(struve_h(0, f64::INFINITY).is_err());
    }

    #[test]
    fn sine_integral_points() {
        assert_eq!(sine_integral(0.0).unwrap(), 0.0);
        let cases = [
            (PI, 1.851_937_051_982_466_2),
            (0.5, 0.493_107_418_043_066_7),
            (2.0, 1.605_412_976_802_694_8),
            (4.0, 1.758_203_138_949_053),
            (10.0, 1.658_347_594_218_874),
            (50.0, 1.551_617_072_485_935_9),
            (1000.0, 1.570_233_121_968_771_2),
        ];
        for (x, want) in cases {
            assert!((sine_integral(x).unwrap() - want).abs() < 1e-12, "Si({x})");
        }
        let far = sine_integral(1000.0).unwrap();
        assert!((far - FRAC_PI_2).abs() < 0.002);
        assert!(sine_integral(-0.1).is_err());
    }

    #[test]
    fn sine_integral_matches_quadrature_oracle() {
        for &x in &[0.3, 1.7, 3.9, 4.1, 7.5, 20.0] {
            let panels = (x * 4.0_f64).ceil() as usize + 2;
            let oracle =
                gauss_legendre_panels(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, panels);
            assert!(
                (sine_integral(x).unwrap() - oracle).abs() < 1e-12,
                "Si({x})"
            );
        }
    }

    #[test]
    fn sine_integral_peaks_at_pi() {
        let peak = sine_integral(PI).unwrap();
        let mut prev = 0.0;
        for i in 1..=1000 {
            let x = PI * i as f64 / 1000.0;
            let v = sine_integral(x).unwrap();
            assert!(v > prev);
            prev = v;
        }
        for i in 1..2000 {
            let x = PI + i as f64 * 0.01;
            assert!(sine_integral(x).unwrap() < peak);
        }
    }

    #[test]
    fn sinc_points() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(1.391_557_6) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        // series and direct forms meet at the threshold
        let t = SINC_SERIES_MAX * 0.999_999;
        assert!((sinc(t) - t.sin() / t).abs() <= f64::EPSILON);
    }

    proptest! {
        #[test]
        fn sinc_is_even(x in -1e3f64..1e3) {
            prop_assert_eq!(sinc(x).to_bits(), sinc(-x).to_bits());
        }

        #[test]
        fn pure_functions_are_bit_stable(m in -10.0f64..0.999, x in 0.0f64..200.0) {
            prop_assert_eq!(ellip_k(m).unwrap().to_bits(), ellip_k(m).unwrap().to_bits());
            prop_assert_eq!(ellip_e(m).unwrap().to_bits(), ellip_e(m).unwrap().to_bits());
            prop_assert_eq!(struve_h(0, x).unwrap().to_bits(), struve_h(0, x).unwrap().to_bits());
            prop_assert_eq!(sine_integral(x).unwrap().to_bits(), sine_integral(x).unwrap().to_bits());
        }
    }
}
