//! Closed-form average delays for the typical macro and small-cell users.
//!
//! The downlink term uses the nearest-server coverage kernel
//!
//! ```text
//! c = rho(gamma, alpha) + (P_o/P_s)^(2/alpha) (lambda_o/lambda_s) gamma^(2/alpha) A(alpha)
//! ```
//!
//! where `o` is the interfering tier and `s` the serving tier, with
//! `rho(gamma, alpha) = gamma^(2/alpha) * int_{gamma^(-2/alpha)}^inf du / (1 + u^(alpha/2))`
//! and `A(alpha) = Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)`. `1/(1+c)` is the
//! single-attempt success probability, and the mean downlink delay is
//!
//! ```text
//! T0 * sum_{i=0}^{M-1} (-1)^i C(M, i+1) / (1 + i c)
//! ```
//!
//! That alternating sum cancels badly for large `M`. Writing
//! `1/(1 + i c) = int_0^1 y^(i c) dy` and applying the hockey-stick identity
//! turns it into the positive series
//! `T0 * sum_{m=0}^{M-1} prod_{k=1}^{m} k c / (k c + 1)`, which is what
//! [`b1`] evaluates. [`b1_alternating`] keeps the alternating form for
//! cross-checks at small `M`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use crate::caching::{hit_probability, validate_config, B3Variant, CacheConfig, CachePolicy};
use crate::channel::RadioParams;
use crate::error::{Error, Result};
use crate::popularity::{effective_eta, PopularityModel};
use crate::quadrature::integrate_to_infinity;

const RHO_ABS_TOL: f64 = 1e-11;

/// Tier intensities in points per square meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intensities {
    pub central_router: f64,
    pub macro_bs: f64,
    pub small_cell: f64,
    pub user: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayParams {
    /// `T0`, duration of one transmission attempt in ms.
    pub slot_ms: f64,
    /// `M`, maximum number of attempts.
    pub max_attempts: u32,
    /// `beta`, in ms per meter per connected base station.
    pub backhaul_scale: f64,
    /// Mean cache read delay in ms.
    pub cache_read_mean_ms: f64,
    pub intensities: Intensities,
    pub radio: RadioParams,
}

impl DelayParams {
    /// Hard constraints. The density ordering
    /// `lambda_ut > lambda_sc > lambda_mc > lambda_cr` is only reported by
    /// [`DelayParams::warnings`] so that sweeps may cross it.
    pub fn validate(&self) -> Result<()> {
        if !(self.slot_ms > 0.0 && self.slot_ms.is_finite()) {
            return Err(Error::param("slot_ms", self.slot_ms, "must be positive"));
        }
        if self.max_attempts < 1 {
            return Err(Error::param("max_attempts", self.max_attempts as f64, "must be at least 1"));
        }
        if !(self.backhaul_scale >= 0.0 && self.backhaul_scale.is_finite()) {
            return Err(Error::param("backhaul_scale", self.backhaul_scale, "must be non-negative"));
        }
        if !(self.cache_read_mean_ms >= 0.0 && self.cache_read_mean_ms.is_finite()) {
            return Err(Error::param("cache_read_mean_ms", self.cache_read_mean_ms, "must be non-negative"));
        }
        let i = &self.intensities;
        for (name, v) in [
            ("lambda_cr", i.central_router),
            ("lambda_mc", i.macro_bs),
            ("lambda_sc", i.small_cell),
            ("lambda_ut", i.user),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, v, "intensity must be positive"));
            }
        }
        Ok(())
    }

    /// Modeling assumptions that the parameters break without making the
    /// formulas invalid.
    pub fn warnings(&self) -> Vec<String> {
        let i = &self.intensities;
        let mut out = Vec::new();
        if !(i.user > i.small_cell && i.small_cell > i.macro_bs && i.macro_bs > i.central_router) {
            out.push(format!(
                "densities not ordered lambda_ut > lambda_sc > lambda_mc > lambda_cr ({:e}, {:e}, {:e}, {:e})",
                i.user, i.small_cell, i.macro_bs, i.central_router
            ));
        }
        let macro_backhaul = mean_backhaul(i.macro_bs, i.central_router, self.backhaul_scale);
        let small_backhaul = mean_backhaul(i.small_cell, i.central_router, self.backhaul_scale);
        if small_backhaul < macro_backhaul {
            out.push(format!(
                "small-cell backhaul mean {small_backhaul:.4} ms is below the macro one {macro_backhaul:.4} ms"
            ));
        }
        if self.cache_read_mean_ms > small_backhaul {
            out.push(format!(
                "cache read mean {} ms exceeds small-cell backhaul mean {small_backhaul:.4} ms",
                self.cache_read_mean_ms
            ));
        }
        out
    }
}

/// Average delay split by source, all in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormDelay {
    pub downlink: f64,
    pub backhaul: f64,
    /// `(cache read mean - backhaul mean) * hit probability`; zero without caching.
    pub cache_adjustment: f64,
    pub total: f64,
    pub hit_probability: f64,
}

fn rho_cache() -> &'static RwLock<HashMap<(u64, u64), f64>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "pathloss exponent must exceed 2"))
    }
}

/// Same-tier interference functional of the nearest-server coverage
/// probability, by adaptive quadrature. `gamma = 0` gives the limit 0.
pub fn rho(gamma: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", gamma, "target SIR must be non-negative"));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let key = (gamma.to_bits(), alpha.to_bits());
    if let Some(&v) = rho_cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(v);
    }

    let scale = gamma.powf(2.0 / alpha);
    let half_alpha = 0.5 * alpha;
    let integral = integrate_to_infinity(
        |u| 1.0 / (1.0 + u.powf(half_alpha)),
        1.0 / scale,
        RHO_ABS_TOL / scale,
    )
    .map_err(|e| Error::Numerical {
        context: "rho",
        detail: format!("gamma = {gamma}, alpha = {alpha}: {e}"),
    })?;
    let value = scale * integral;

    rho_cache()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(key, value);
    Ok(value)
}

/// Cross-tier interference constant `Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)`,
/// evaluated through the reflection formula as `(2 pi/alpha) / sin(2 pi/alpha)`.
pub fn big_a(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 2.0 * PI / alpha;
    Ok(x / x.sin())
}

/// Coverage kernel `c`; a single attempt succeeds with probability `1/(1+c)`.
pub fn coverage_kernel(
    gamma: f64,
    alpha: f64,
    power_other: f64,
    power_serving: f64,
    lambda_other: f64,
    lambda_serving: f64,
) -> Result<f64> {
    for (name, v) in [
        ("power_other", power_other),
        ("power_serving", power_serving),
        ("lambda_other", lambda_other),
        ("lambda_serving", lambda_serving),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, v, "must be positive"));
        }
    }
    let exponent = 2.0 / alpha;
    let cross = (power_other / power_serving).powf(exponent)
        * (lambda_other / lambda_serving)
        * gamma.powf(exponent)
        * big_a(alpha)?;
    Ok(rho(gamma, alpha)? + cross)
}

/// Single-attempt success probability of a user served by its nearest base
/// station of the serving tier.
pub fn coverage_probability(
    gamma: f64,
    alpha: f64,
    power_other: f64,
    power_serving: f64,
    lambda_other: f64,
    lambda_serving: f64,
) -> Result<f64> {
    Ok(1.0 / (1.0 + coverage_kernel(gamma, alpha, power_other, power_serving, lambda_other, lambda_serving)?))
}

fn check_slots(slot_ms: f64, max_attempts: u32) -> Result<()> {
    if !(slot_ms > 0.0 && slot_ms.is_finite()) {
        return Err(Error::param("slot_ms", slot_ms, "must be positive"));
    }
    if max_attempts < 1 {
        return Err(Error::param("max_attempts", max_attempts as f64, "must be at least 1"));
    }
    Ok(())
}

/// Mean downlink delay in ms. Arguments follow the interfering-tier-first
/// order: for a macro user pass the small-cell power and intensity as
/// `*_other`.
#[allow(clippy::too_many_arguments)]
pub fn b1(
    slot_ms: f64,
    max_attempts: u32,
    gamma: f64,
    alpha: f64,
    power_other: f64,
    power_serving: f64,
    lambda_other: f64,
    lambda_serving: f64,
) -> Result<f64> {
    check_slots(slot_ms, max_attempts)?;
    let c = coverage_kernel(gamma, alpha, power_other, power_serving, lambda_other, lambda_serving)?;
    let mut sum = 0.0;
    let mut term = 1.0;
    for m in 0..max_attempts {
        sum += term;
        let kc = f64::from(m + 1) * c;
        term *= kc / (kc + 1.0);
    }
    Ok(slot_ms * sum)
}

/// `sum_{i=0}^{M-1} (-1)^i C(M, i+1) weight(i)` with compensated summation.
/// Binomials come from the multiplicative recurrence, so the result is only
/// trustworthy while `C(M, M/2)` stays well inside the `f64` mantissa.
pub fn alternating_binomial_sum(max_attempts: u32, weight: impl Fn(u32) -> f64) -> f64 {
    let m = f64::from(max_attempts);
    let mut binom = m; // C(M, 1)
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for i in 0..max_attempts {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binom * weight(i);
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            carry += (sum - t) + term;
        } else {
            carry += (term - t) + sum;
        }
        sum = t;
        let k = f64::from(i + 1);
        binom *= (m - k) / (k + 1.0);
    }
    sum + carry
}

/// The mean downlink delay as the alternating binomial sum.
#[allow(clippy::too_many_arguments)]
pub fn b1_alternating(
    slot_ms: f64,
    max_attempts: u32,
    gamma: f64,
    alpha: f64,
    power_other: f64,
    power_serving: f64,
    lambda_other: f64,
    lambda_serving: f64,
) -> Result<f64> {
    check_slots(slot_ms, max_attempts)?;
    let c = coverage_kernel(gamma, alpha, power_other, power_serving, lambda_other, lambda_serving)?;
    Ok(slot_ms * alternating_binomial_sum(max_attempts, |i| 1.0 / (1.0 + f64::from(i) * c)))
}

/// Mean backhaul delay `beta * lambda_tier * lambda_cr^(-3/2) / 2`: the
/// mean distance to the nearest router, `1/(2 sqrt(lambda_cr))`, times the
/// mean number of base stations per router, `lambda_tier / lambda_cr`,
/// times `beta`.
pub fn mean_backhaul(lambda_tier: f64, lambda_cr: f64, beta: f64) -> f64 {
    0.5 * beta * lambda_tier * lambda_cr.powf(-1.5)
}

fn downlink_macro(params: &DelayParams) -> Result<f64> {
    let r = &params.radio;
    let i = &params.intensities;
    b1(
        params.slot_ms,
        params.max_attempts,
        r.target_sir(),
        r.pathloss_exponent(),
        r.power_small(),
        r.power_macro(),
        i.small_cell,
        i.macro_bs,
    )
}

fn downlink_small(params: &DelayParams) -> Result<f64> {
    let r = &params.radio;
    let i = &params.intensities;
    b1(
        params.slot_ms,
        params.max_attempts,
        r.target_sir(),
        r.pathloss_exponent(),
        r.power_macro(),
        r.power_small(),
        i.macro_bs,
        i.small_cell,
    )
}

/// Average delay of a user served by its nearest macro base station.
pub fn avg_delay_macro(params: &DelayParams) -> Result<ClosedFormDelay> {
    params.validate()?;
    let downlink = downlink_macro(params)?;
    let i = &params.intensities;
    let backhaul = mean_backhaul(i.macro_bs, i.central_router, params.backhaul_scale);
    Ok(ClosedFormDelay {
        downlink,
        backhaul,
        cache_adjustment: 0.0,
        total: downlink + backhaul,
        hit_probability: 0.0,
    })
}

/// Average delay of a user served by its nearest small cell. `cache` must be
/// the split `policy` uses (see [`CacheConfig::for_policy`]).
pub fn avg_delay_small(
    policy: CachePolicy,
    model: PopularityModel,
    cache: &CacheConfig,
    params: &DelayParams,
    variant: B3Variant,
) -> Result<ClosedFormDelay> {
    params.validate()?;
    let downlink = downlink_small(params)?;
    let i = &params.intensities;
    let backhaul = mean_backhaul(i.small_cell, i.central_router, params.backhaul_scale);
    let hit = if policy == CachePolicy::NoCache {
        0.0
    } else {
        validate_config(policy, cache).map_err(Error::InvalidConfig)?;
        let eta = effective_eta(model, i.small_cell, i.user, None)?;
        hit_probability(policy, cache, eta, variant)?
    };
    let cache_adjustment = (params.cache_read_mean_ms - backhaul) * hit;
    Ok(ClosedFormDelay {
        downlink,
        backhaul,
        cache_adjustment,
        total: downlink + backhaul + cache_adjustment,
        hit_probability: hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use proptest::prelude::*;

    fn gamma_3db() -> f64 {
        db_to_linear(3.0)
    }

    fn reference_params(beta: f64) -> DelayParams {
        DelayParams {
            slot_ms: 0.1,
            max_attempts: 4,
            backhaul_scale: beta,
            cache_read_mean_ms: 0.01,
            intensities: Intensities {
                central_router: 1.4e-6,
                macro_bs: 2.8e-6,
                small_cell: 3.6e-6,
                user: 7.2e-6,
            },
            radio: RadioParams::new(20.0, 2.0, 4.0, gamma_3db()).unwrap(),
        }
    }

    fn reference_cache() -> CacheConfig {
        CacheConfig::new(100.0, 9.5, 0.5, 90.0, 500.0)
    }

    /// Lanczos approximation (g = 7, 9 terms), an independent route to
    /// the Gamma function.
    fn lanczos_gamma(x: f64) -> f64 {
        const G: f64 = 7.0;
        const C: [f64; 9] = [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if x < 0.5 {
            return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
        }
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }

    #[test]
    fn lanczos_sanity() {
        assert!((lanczos_gamma(0.5) - PI.sqrt()).abs() < 1e-13);
        assert!((lanczos_gamma(5.0) - 24.0).abs() < 1e-11);
    }

    #[test]
    fn rho_matches_closed_form_at_alpha_four() {
        for gamma in [1e-4, 0.1, 1.0, gamma_3db(), 10.0, 1e3] {
            let s = f64::sqrt(gamma);
            let closed = s * (PI / 2.0 - (1.0 / s).atan());
            let quad = rho(gamma, 4.0).unwrap();
            assert!((quad - closed).abs() < 1e-8, "gamma {gamma}: {quad} vs {closed}");
        }
        assert!((rho(1.0, 4.0).unwrap() - PI / 4.0).abs() < 1e-10);
        assert!((rho(gamma_3db(), 4.0).unwrap() - 1.348_630_820_202_614_5).abs() < 1e-9);
        assert_eq!(rho(0.0, 4.0).unwrap(), 0.0);
        assert!(rho(1e-12, 4.0).unwrap() < 1e-11);
        assert!(rho(-1.0, 4.0).is_err());
        assert!(rho(1.0, 2.0).is_err());
    }

    #[test]
    fn rho_other_exponents_are_finite_and_positive() {
        for alpha in [2.5, 3.0, 3.5, 5.0, 6.0] {
            let v = rho(gamma_3db(), alpha).unwrap();
            assert!(v.is_finite() && v > 0.0);
            // memoized value is bit-identical
            assert_eq!(v.to_bits(), rho(gamma_3db(), alpha).unwrap().to_bits());
        }
    }

    #[test]
    fn big_a_values() {
        assert!((big_a(4.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((big_a(3.0).unwrap() - 2.418_399_152_312_29).abs() < 1e-12);
        assert!((big_a(1e9).unwrap() - 1.0).abs() < 1e-12);
        for alpha in [2.5, 3.0, 4.0, 5.5] {
            let oracle = lanczos_gamma(1.0 + 2.0 / alpha) * lanczos_gamma(1.0 - 2.0 / alpha);
            assert!((big_a(alpha).unwrap() - oracle).abs() < 1e-10, "alpha {alpha}");
        }
        assert!(big_a(2.0).is_err());
    }

    /// Term-by-term evaluation of the alternating form for the macro user.
    #[test]
    fn b1_macro_defaults() {
        let g = gamma_3db();
        let c = {
            let s = g.sqrt();
            s * (PI / 2.0 - (1.0 / s).atan()) + (0.1f64).sqrt() * (3.6 / 2.8) * s * PI / 2.0
        };
        assert!((c - 2.250_750_893_361_549).abs() < 1e-9);
        let oracle = 0.1 * (4.0 - 6.0 / (1.0 + c) + 4.0 / (1.0 + 2.0 * c) - 1.0 / (1.0 + 3.0 * c));
        let got = b1(0.1, 4, g, 4.0, 2.0, 20.0, 3.6e-6, 2.8e-6).unwrap();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 0.275_235_203_304_318).abs() < 1e-9);
    }

    #[test]
    fn b1_limits() {
        assert_eq!(b1(0.1, 4, 0.0, 4.0, 2.0, 20.0, 3.6e-6, 2.8e-6).unwrap(), 0.1);
        assert_eq!(b1(0.1, 4, 1e-300, 4.0, 2.0, 20.0, 3.6e-6, 2.8e-6).unwrap(), 0.1);
        // saturates at M * T0 for a hopeless threshold
        let hi = b1(0.1, 4, 1e12, 4.0, 2.0, 20.0, 3.6e-6, 2.8e-6).unwrap();
        assert!(hi <= 0.4 && hi > 0.399);
        assert!(b1(0.0, 4, 1.0, 4.0, 2.0, 20.0, 1.0, 1.0).is_err());
        assert!(b1(0.1, 0, 1.0, 4.0, 2.0, 20.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn b1_stays_stable_for_large_attempt_counts() {
        for m in [30, 60, 200] {
            let v = b1(0.1, m, gamma_3db(), 4.0, 20.0, 2.0, 2.8e-6, 3.6e-6).unwrap();
            assert!(v > 0.0 && v <= 0.1 * f64::from(m));
        }
    }

    #[test]
    fn hockey_stick_example() {
        assert!((alternating_binomial_sum(2, |i| 0.3f64.powi(i as i32)) - 1.7).abs() < 1e-15);
    }

    #[test]
    fn backhaul_values() {
        let v = mean_backhaul(2.8e-6, 1.4e-6, 1e-3);
        assert!((v - 0.845_154_254_728_516_6).abs() < 1e-12);
        let factorized = 422.577_127_364_258_3 * 2.0 * 1e-3;
        assert!((v - factorized).abs() < 1e-12);
        assert_eq!(mean_backhaul(2.8e-6, 1.4e-6, 0.0), 0.0);
        assert!((mean_backhaul(5.6e-6, 1.4e-6, 1e-3) - 2.0 * v).abs() < 1e-12);
        assert!((mean_backhaul(3.6e-6, 1.4e-6, 1e-3) - 1.086_626_898_936_664_3).abs() < 1e-12);
    }

    #[test]
    fn macro_user_defaults() {
        let d = avg_delay_macro(&reference_params(1e-3)).unwrap();
        assert!((d.total - 1.120_389_458_032_834_6).abs() < 1e-9);
        assert_eq!(d.total, d.downlink + d.backhaul + d.cache_adjustment);
        let mut p = reference_params(0.0);
        p.radio = RadioParams::new(20.0, 2.0, 4.0, 1e-300).unwrap();
        assert_eq!(avg_delay_macro(&p).unwrap().total, 0.1);
    }

    #[test]
    fn small_user_defaults() {
        let p = reference_params(1e-3);
        let c = reference_cache();
        let v = B3Variant::AsPrinted;
        let none = avg_delay_small(CachePolicy::NoCache, PopularityModel::Fixed(1.45), &c, &p, v).unwrap();
        assert!((none.total - 1.432_468_065_871_880_5).abs() < 1e-9);
        assert_eq!(none.cache_adjustment, 0.0);

        let fixed = avg_delay_small(CachePolicy::MixPop, PopularityModel::Fixed(1.45), &c, &p, v).unwrap();
        assert!((fixed.total - 0.475_474_214_093_310_5).abs() < 1e-9);
        assert!(fixed.cache_adjustment < 0.0);
        let consistent = avg_delay_small(
            CachePolicy::MixPop,
            PopularityModel::Fixed(1.45),
            &c,
            &p,
            B3Variant::IntegralConsistent,
        )
        .unwrap();
        assert!((consistent.total - 0.673_020_434_081_689_2).abs() < 1e-9);

        let load = avg_delay_small(CachePolicy::MixPop, PopularityModel::LoadDependent, &c, &p, v).unwrap();
        assert!((load.total - 0.242_411_220_202_795_7).abs() < 1e-9);
        let dist = avg_delay_small(CachePolicy::MixPop, PopularityModel::DistanceDependent, &c, &p, v).unwrap();
        assert!((dist.total - 0.158_294_946_946_837_3).abs() < 1e-9);
    }

    #[test]
    fn full_hit_with_free_cache_leaves_only_downlink() {
        let mut p = reference_params(1e-3);
        p.cache_read_mean_ms = 0.0;
        // eta huge and the whole catalogue cached: hit probability 1
        let c = CacheConfig::new(499.0, 499.0, 0.0, 0.0, 500.0);
        let d = avg_delay_small(CachePolicy::StdPop, PopularityModel::Fixed(1e6), &c, &p, B3Variant::AsPrinted).unwrap();
        assert_eq!(d.hit_probability, 1.0);
        assert!((d.total - d.downlink).abs() < 1e-15);
    }

    #[test]
    fn empty_cache_reduces_to_no_cache() {
        let p = reference_params(1e-3);
        let empty = CacheConfig::new(0.0, 0.0, 0.0, 0.0, 500.0);
        for variant in [B3Variant::AsPrinted, B3Variant::IntegralConsistent] {
            let mix = avg_delay_small(CachePolicy::MixPop, PopularityModel::Fixed(1.45), &empty, &p, variant).unwrap();
            let none = avg_delay_small(CachePolicy::NoCache, PopularityModel::Fixed(1.45), &empty, &p, variant).unwrap();
            assert_eq!(mix.total, none.total);
        }
    }

    #[test]
    fn delay_ordering_follows_hit_probability() {
        let p = reference_params(1e-3);
        let c = reference_cache();
        for variant in [B3Variant::AsPrinted, B3Variant::IntegralConsistent] {
            let mut rows: Vec<(f64, f64)> = [
                PopularityModel::Fixed(1.45),
                PopularityModel::DistanceDependent,
                PopularityModel::LoadDependent,
            ]
            .iter()
            .map(|&m| {
                let d = avg_delay_small(CachePolicy::MixPop, m, &c, &p, variant).unwrap();
                (d.hit_probability, d.total)
            })
            .collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert!(rows.windows(2).all(|w| w[0].1 >= w[1].1), "{variant:?}: {rows:?}");
        }
    }

    #[test]
    fn warnings_flag_broken_assumptions() {
        assert!(reference_params(1e-3).warnings().is_empty());
        let mut p = reference_params(1e-3);
        p.intensities.macro_bs = 5.0e-6;
        assert_eq!(p.warnings().len(), 2);
        p.cache_read_mean_ms = 100.0;
        assert_eq!(p.warnings().len(), 3);
    }

    #[test]
    fn closed_forms_are_deterministic() {
        let p = reference_params(1e-3);
        let a = avg_delay_small(CachePolicy::MixPop, PopularityModel::LoadDependent, &reference_cache(), &p, B3Variant::AsPrinted)
            .unwrap();
        let b = avg_delay_small(CachePolicy::MixPop, PopularityModel::LoadDependent, &reference_cache(), &p, B3Variant::AsPrinted)
            .unwrap();
        assert_eq!(a.total.to_bits(), b.total.to_bits());
    }

    proptest! {
        #[test]
        fn product_form_equals_alternating_form(
            m in 1u32..=12, gamma in 0.01f64..50.0, alpha in 2.2f64..6.0, ratio in 0.05f64..20.0
        ) {
            let a = b1(0.1, m, gamma, alpha, 2.0, 20.0, ratio * 1e-6, 1e-6).unwrap();
            let b = b1_alternating(0.1, m, gamma, alpha, 2.0, 20.0, ratio * 1e-6, 1e-6).unwrap();
            prop_assert!((a - b).abs() < 1e-11, "{} vs {}", a, b);
        }

        #[test]
        fn b1_bounds_and_monotonicity(
            m in 1u32..=40, g1 in 0.01f64..100.0, g2 in 0.01f64..100.0, r1 in 0.05f64..20.0, r2 in 0.05f64..20.0
        ) {
            let (glo, ghi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            let (rlo, rhi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let f = |g: f64, r: f64| b1(0.1, m, g, 4.0, 20.0, 2.0, r, 1.0).unwrap();
            let v = f(glo, rlo);
            prop_assert!(v > 0.0 && v <= 0.1 * f64::from(m) + 1e-15);
            prop_assert!(f(ghi, rlo) >= v);
            prop_assert!(f(glo, rhi) >= v);
        }

        #[test]
        fn caching_never_hurts_when_reads_are_faster(
            beta in 1e-4f64..1e-2, popular in 0.0f64..50.0, uniform in 0.0f64..400.0, eta in 1.05f64..10.0
        ) {
            let p = reference_params(beta);
            let c = CacheConfig::new(popular + uniform, popular, 0.0, uniform, 500.0);
            prop_assume!(p.cache_read_mean_ms <= mean_backhaul(3.6e-6, 1.4e-6, beta));
            let none = avg_delay_small(CachePolicy::NoCache, PopularityModel::Fixed(eta), &c, &p, B3Variant::AsPrinted).unwrap();
            for variant in [B3Variant::AsPrinted, B3Variant::IntegralConsistent] {
                let mix = avg_delay_small(CachePolicy::MixPop, PopularityModel::Fixed(eta), &c, &p, variant).unwrap();
                prop_assert!(mix.total <= none.total);
            }
        }
    }
}
