//! Globally adaptive Gauss–Kronrod (7/15) integration.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {intervals} intervals")]
pub struct QuadError {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<Segment, E> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let diff = ((kron - gauss) * h).abs();
    // QUADPACK-style scaling of the raw Kronrod–Gauss difference.
    let error = if diff > 0.0 {
        diff * (200.0 * diff / value.abs().max(f64::MIN_POSITIVE))
            .powf(1.5)
            .min(1.0)
    } else {
        0.0
    };
    Ok(Segment {
        a,
        b,
        value,
        error: error.max(50.0 * f64::EPSILON * value.abs()),
    })
}

/// Integrates `f` over `[a, b]`, pre-splitting at the interior `breaks`
/// (kinks or near-singular points of the integrand).
pub fn integrate<E: From<QuadError>>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate, E> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi && x.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(lo);
    nodes.extend(cuts);
    nodes.push(hi);

    let mut segments = Vec::new();
    for w in nodes.windows(2) {
        segments.push(gk15(&mut f, w[0], w[1])?);
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Estimate {
                value: sign * value,
                error,
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(QuadError {
                value: sign * value,
                error,
                intervals: segments.len(),
            }
            .into());
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at machine precision
            return Err(QuadError {
                value: sign * value,
                error,
                intervals: segments.len() + 1,
            }
            .into());
        }
        segments.push(gk15(&mut f, s.a, mid)?);
        segments.push(gk15(&mut f, mid, s.b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct E(QuadError);
    impl From<QuadError> for E {
        fn from(q: QuadError) -> Self {
            E(q)
        }
    }

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64, E> {
        move |x| Ok::<_, E>(f(x))
    }

    #[test]
    fn polynomials_and_smooth_functions() {
        let r = integrate(ok(|x| x * x), 0.0, 3.0, &[], Tolerance::default()).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = integrate(
            ok(f64::sin),
            0.0,
            std::f64::consts::PI,
            &[],
            Tolerance::default(),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate(ok(f64::exp), 1.0, 0.0, &[], Tolerance::default()).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn kinks_and_peaks() {
        let r = integrate(
            ok(|x: f64| (x - 0.3).abs()),
            -1.0,
            1.0,
            &[0.3],
            Tolerance::default(),
        )
        .unwrap();
        assert!((r.value - (1.3 * 1.3 + 0.7 * 0.7) / 2.0).abs() < 1e-13);
        // Lorentzian of width 1e-3: ∫ = 2 atan(1/eps)
        let eps = 1e-3;
        let r = integrate(
            ok(|x| eps / (x * x + eps * eps)),
            -1.0,
            1.0,
            &[],
            Tolerance::default(),
        )
        .unwrap();
        assert!((r.value - 2.0 * (1.0 / eps).atan()).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            max_intervals: 3,
            ..Tolerance::default()
        };
        let err = integrate(ok(|x: f64| x.recip()), 0.0, 1.0, &[], tol).unwrap_err();
        assert!(err.0.error > 0.0);
        assert_eq!(err.0.intervals, 3);
    }

    #[test]
    fn integrand_errors_propagate() {
        #[derive(Debug, PartialEq)]
        enum Mine {
            Bad,
            Quad,
        }
        impl From<QuadError> for Mine {
            fn from(_: QuadError) -> Self {
                Mine::Quad
            }
        }
        let r = integrate(
            |x: f64| if x > 0.5 { Err(Mine::Bad) } else { Ok(x) },
            0.0,
            1.0,
            &[],
            Tolerance::default(),
        );
        assert_eq!(r.unwrap_err(), Mine::Bad);
    }
}
