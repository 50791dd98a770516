//! Monte Carlo delay estimation for the typical user.
//!
//! Each replication samples the macro, small-cell and central-router point
//! processes, serves the user from the nearest base station of the scenario
//! tier, and runs the retransmission protocol with geometry fixed and fading
//! redrawn on every attempt. The tail delay is either an exponential cache
//! read or an exponential backhaul transfer whose mean is
//! `beta * (distance from serving BS to its nearest router) * lambda_tier / lambda_cr`.
//! The tail is added even after an outage.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::analytics::DelayParams;
use crate::caching::{is_hit, validate_config, CacheConfig, CachePolicy};
use crate::channel::{LinkBudget, RadioParams, Serving};
use crate::error::{Error, Result};
use crate::geometry::{nearest, nearest_to, sample_ppp, PointSet, Tier, Window};
use crate::popularity::{effective_eta, PopularityDist, PopularityModel};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Where the distance-dependent popularity steepness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Mean nearest small-cell distance, as in the closed form.
    #[default]
    Averaged,
    /// The realized distance to the serving small cell.
    PerUser,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    MacroUser,
    SmallUser {
        policy: CachePolicy,
        model: PopularityModel,
        distance_mode: DistanceMode,
    },
}

impl Scenario {
    pub fn serving_tier(&self) -> Tier {
        match self {
            Scenario::MacroUser => Tier::Macro,
            Scenario::SmallUser { .. } => Tier::SmallCell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkOutcome {
    pub attempts: u32,
    pub outage: bool,
    pub delay: f64,
}

/// Delay of one simulated content delivery, in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySample {
    pub downlink: f64,
    /// Cache read on a hit, backhaul transfer otherwise.
    pub tail: f64,
    pub total: f64,
    pub attempts: u32,
    pub outage: bool,
    pub hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub std_error: f64,
    pub replications: usize,
    pub outage_rate: f64,
    pub hit_rate: f64,
    pub mean_downlink: f64,
    pub mean_tail: f64,
    /// Fraction of deliveries that succeeded on the first attempt.
    pub first_attempt_success: f64,
}

/// Retransmits until the SIR clears the target or `max_attempts` are spent.
pub fn downlink_delay<R: Rng + ?Sized>(
    serving: Serving,
    macro_set: &PointSet,
    small_set: &PointSet,
    radio: &RadioParams,
    slot_ms: f64,
    max_attempts: u32,
    rng: &mut R,
) -> Result<DownlinkOutcome> {
    let budget = LinkBudget::at_origin(serving, macro_set, small_set, radio)?;
    Ok(retransmit(&budget, radio.target_sir(), slot_ms, max_attempts, rng))
}

fn retransmit<R: Rng + ?Sized>(
    budget: &LinkBudget,
    target_sir: f64,
    slot_ms: f64,
    max_attempts: u32,
    rng: &mut R,
) -> DownlinkOutcome {
    for attempt in 1..=max_attempts {
        if budget.attempt(target_sir, rng) {
            return DownlinkOutcome {
                attempts: attempt,
                outage: false,
                delay: slot_ms * f64::from(attempt),
            };
        }
    }
    DownlinkOutcome {
        attempts: max_attempts,
        outage: true,
        delay: slot_ms * f64::from(max_attempts),
    }
}

/// One end-to-end delivery to the typical user.
pub fn run_replication<R: Rng + ?Sized>(
    scenario: &Scenario,
    params: &DelayParams,
    cache: &CacheConfig,
    window: &Window,
    rng: &mut R,
) -> Result<DelaySample> {
    let lambda = &params.intensities;
    let macro_set = sample_ppp(Tier::Macro, lambda.macro_bs, window, rng)?;
    let small_set = sample_ppp(Tier::SmallCell, lambda.small_cell, window, rng)?;
    let routers = sample_ppp(Tier::CentralRouter, lambda.central_router, window, rng)?;

    let tier = scenario.serving_tier();
    let serving_set = if tier == Tier::Macro { &macro_set } else { &small_set };
    let (index, distance) = nearest(serving_set)?;
    let link = downlink_delay(
        Serving { tier, index },
        &macro_set,
        &small_set,
        &params.radio,
        params.slot_ms,
        params.max_attempts,
        rng,
    )?;

    let serving_point = serving_set.points()[index];
    let (_, router_distance) = nearest_to(&serving_point, &routers)?;
    let backhaul_mean =
        params.backhaul_scale * router_distance * serving_set.intensity() / lambda.central_router;

    let (hit, tail) = match *scenario {
        Scenario::MacroUser => {
            let unit: f64 = Exp1.sample(rng);
            (false, backhaul_mean * unit)
        }
        Scenario::SmallUser {
            policy,
            model,
            distance_mode,
        } => {
            let realized = match distance_mode {
                DistanceMode::PerUser => Some(distance),
                DistanceMode::Averaged => None,
            };
            let eta = effective_eta(model, lambda.small_cell, lambda.user, realized)?;
            let request = PopularityDist::new(eta)?.sample_request(rng);
            // Drawn before the hit test so that paired runs with and
            // without caching share the same exponential variate.
            let unit: f64 = Exp1.sample(rng);
            let hit = is_hit(request, policy, cache, rng)?;
            let mean = if hit { params.cache_read_mean_ms } else { backhaul_mean };
            (hit, mean * unit)
        }
    };

    Ok(DelaySample {
        downlink: link.delay,
        tail,
        total: link.delay + tail,
        attempts: link.attempts,
        outage: link.outage,
        hit,
    })
}

/// Random stream of replication `index` under `master_seed`.
pub fn replication_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs `replications` independent deliveries and summarizes them.
///
/// Replication `i` draws from [`replication_rng`]`(master_seed, i)` and the
/// reduction runs in index order, so the result does not depend on how many
/// threads execute the replications.
pub fn estimate(
    scenario: &Scenario,
    params: &DelayParams,
    cache: &CacheConfig,
    window: &Window,
    replications: usize,
    master_seed: u64,
) -> Result<DelayEstimate> {
    if replications == 0 {
        return Err(Error::param("replications", 0.0, "must be at least 1"));
    }
    params.validate()?;
    if let Scenario::SmallUser { policy, .. } = scenario {
        if *policy != CachePolicy::NoCache {
            validate_config(*policy, cache).map_err(Error::InvalidConfig)?;
        }
    }

    let samples = (0..replications)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| run_replication(scenario, params, cache, window, &mut replication_rng(master_seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&samples))
}

/// Sample mean with a normal-approximation 95% interval.
pub fn summarize(samples: &[DelaySample]) -> DelayEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.total).sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|s| (s.total - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_error = (var / n).sqrt();
    let rate = |pred: fn(&DelaySample) -> bool| samples.iter().filter(|s| pred(s)).count() as f64 / n;
    DelayEstimate {
        mean,
        ci_low: mean - Z_95 * std_error,
        ci_high: mean + Z_95 * std_error,
        std_error,
        replications: samples.len(),
        outage_rate: rate(|s| s.outage),
        hit_rate: rate(|s| s.hit),
        mean_downlink: samples.iter().map(|s| s.downlink).sum::<f64>() / n,
        mean_tail: samples.iter().map(|s| s.tail).sum::<f64>() / n,
        first_attempt_success: rate(|s| s.attempts == 1 && !s.outage),
    }
}
