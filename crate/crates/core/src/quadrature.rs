//! Adaptive Gauss-Kronrod (10/21 point) quadrature.

use crate::error::{Error, Result};

const MAX_SEGMENTS: usize = 4000;

// Kronrod abscissae; odd positions are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_336_313,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = f_center.abs() * WGK[10];
    let mut samples = [(0.0, 0.0); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
        *sample = (lo, hi);
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for (j, &(lo, hi)) in samples.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }

    let scale = half.abs();
    let value = kronrod * half;
    let abs_value = abs_sum * scale;
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Segment { a, b, value, error }
}

/// Integral of `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Fails with [`Error::Numerical`] when the integrand is not finite or the
/// error estimate does not reach the tolerance within the subdivision limit.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numerical {
            context: "quadrature",
            detail: format!("non-finite bounds [{a}, {b}]"),
        });
    }
    if a == b {
        return Ok(0.0);
    }

    let mut segments = vec![gauss_kronrod(&f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!("integrand not finite on [{a}, {b}]"),
            });
        }
        // Round-off floor so tolerances below machine precision still terminate.
        if error <= abs_tol.max(50.0 * f64::EPSILON * value.abs()) {
            return Ok(value);
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!(
                    "no convergence on [{a}, {b}] after {} segments: estimate {value:e}, error {error:e}, tolerance {abs_tol:e}",
                    segments.len()
                ),
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!("segment [{}, {}] cannot be bisected further", seg.a, seg.b),
            });
        }
        segments.push(gauss_kronrod(&f, seg.a, mid));
        segments.push(gauss_kronrod(&f, mid, seg.b));
    }
}

/// Integral of `f` over `[a, inf)`, via the map `x = a + (1 - t) / t` onto
/// `t` in `(0, 1]`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64) -> Result<f64> {
    let mapped = |t: f64| {
        let x = a + (1.0 - t) / t;
        let v = f(x) / (t * t);
        // The t -> 0 endpoint corresponds to x = inf; a decaying integrand
        // that underflows there contributes nothing.
        if v.is_nan() && f(x) == 0.0 {
            0.0
        } else {
            v
        }
    };
    integrate(mapped, 0.0, 1.0, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_is_exact_for_low_degree_polynomials() {
        for k in 0..=29 {
            let got = gauss_kronrod(&|x: f64| x.powi(k), -1.0, 1.0).value;
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {k}: {got} vs {want}");
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_peaked_integrands() {
        let v = integrate(f64::sin, 0.0, PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| (-1e4 * (x - 0.3).powi(2)).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (PI / 1e4).sqrt()).abs() < 1e-12);
        assert_eq!(integrate(f64::cos, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_ranges() {
        let v = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, 1e-12).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
        let v = integrate_to_infinity(|x| (-x).exp(), 1.0, 1e-13).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-13);
        // slow power-law tail
        let v = integrate_to_infinity(|x: f64| 0.45 * x.powf(-1.45), 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        assert!(matches!(
            integrate(|_| f64::NAN, 0.0, 1.0, 1e-10),
            Err(Error::Numerical { .. })
        ));
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-10).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        // 1/x on (0, 1] diverges.
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Numerical { .. }), "{err:?}");
    }
}
