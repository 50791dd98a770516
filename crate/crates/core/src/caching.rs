//! Small-cell cache contents (StdPop, UniRand, MixPop), request hit tests
//! and the closed-form hit probabilities of the popular and uniform cache
//! segments.
//!
//! Storage is measured in content units: one unit caches a unit-length
//! interval of the content axis. The popular segment `[1, 1 + S_p)` is
//! cached deterministically; the uniform segment caches a random fraction of
//! the rest of the catalogue, modeled per request as a Bernoulli draw.

use std::fmt;

use log::warn;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CachePolicy {
    NoCache,
    StdPop,
    UniRand,
    MixPop,
}

impl CachePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            CachePolicy::NoCache => "NoCache",
            CachePolicy::StdPop => "StdPop",
            CachePolicy::UniRand => "UniRand",
            CachePolicy::MixPop => "MixPop",
        }
    }
}

/// Which closed form is used for the uniform-segment hit probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum B3Variant {
    /// `S_u/(f_0 - S_p) * (1 - (1+f_0)^(1-eta) + (1+S_p)^(1-eta))`.
    #[default]
    AsPrinted,
    /// `S_u/(f_0 - S_p) * ((1+S_p)^(1-eta) - (1+f_0)^(1-eta))`: the selected
    /// fraction times the popularity mass of the un-cached segment.
    IntegralConsistent,
}

/// Content range UniRand draws its cached fraction from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UniformSpan {
    /// The whole catalogue `[1, f_0)`, hit probability `S_u / (f_0 - 1)`.
    #[default]
    Catalogue,
    /// The MixPop rule with an empty popular segment: probability `S_u / f_0`.
    MixPopRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheConfig {
    /// `S`
    pub total: f64,
    /// `S_p`
    pub popular: f64,
    /// `S_0`, consumed by popularity tracking; never produces hits.
    pub overhead: f64,
    /// `S_u`
    pub uniform: f64,
    /// `f_0`: content at or beyond this coordinate is not cacheable.
    pub catalogue_bound: f64,
    pub uniform_span: UniformSpan,
}

impl CacheConfig {
    pub fn new(total: f64, popular: f64, overhead: f64, uniform: f64, catalogue_bound: f64) -> Self {
        CacheConfig {
            total,
            popular,
            overhead,
            uniform,
            catalogue_bound,
            uniform_span: UniformSpan::default(),
        }
    }

    /// The storage split `policy` actually uses out of this budget.
    ///
    /// StdPop puts everything except the overhead into the popular segment;
    /// UniRand needs no popularity tracking and caches `S` uniformly.
    pub fn for_policy(&self, policy: CachePolicy) -> CacheConfig {
        match policy {
            CachePolicy::NoCache | CachePolicy::MixPop => *self,
            CachePolicy::StdPop => CacheConfig {
                popular: (self.total - self.overhead).max(0.0),
                uniform: 0.0,
                ..*self
            },
            CachePolicy::UniRand => CacheConfig {
                popular: 0.0,
                overhead: 0.0,
                uniform: self.total,
                ..*self
            },
        }
    }

    /// Resizes the cache to `total`, letting the uniform segment absorb the
    /// change. A budget smaller than `S_p + S_0` empties the uniform segment
    /// and shrinks the popular and overhead segments proportionally.
    pub fn with_total(&self, total: f64) -> CacheConfig {
        let reserved = self.popular + self.overhead;
        if total >= reserved {
            CacheConfig {
                total,
                uniform: total - reserved,
                ..*self
            }
        } else {
            let scale = if reserved > 0.0 { total / reserved } else { 0.0 };
            CacheConfig {
                total,
                popular: self.popular * scale,
                overhead: self.overhead * scale,
                uniform: 0.0,
                ..*self
            }
        }
    }
}

/// One broken cache-configuration rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite(&'static str),
    NegativeSegment(&'static str),
    StorageSplitMismatch { total: f64, sum: f64 },
    PopularSegmentExceedsCatalogue { popular: f64, catalogue_bound: f64 },
    UniformSegmentExceedsCatalogue { uniform: f64, available: f64 },
    PolicyForbidsUniformSegment,
    PolicyForbidsPopularSegment,
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NonFinite(_) => "non-finite-value",
            Violation::NegativeSegment(_) => "negative-segment",
            Violation::StorageSplitMismatch { .. } => "storage-split-mismatch",
            Violation::PopularSegmentExceedsCatalogue { .. } => "popular-segment-exceeds-catalogue",
            Violation::UniformSegmentExceedsCatalogue { .. } => "uniform-segment-exceeds-catalogue",
            Violation::PolicyForbidsUniformSegment => "policy-forbids-uniform-segment",
            Violation::PolicyForbidsPopularSegment => "policy-forbids-popular-segment",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())?;
        match self {
            Violation::NonFinite(field) | Violation::NegativeSegment(field) => write!(f, " ({field})"),
            Violation::StorageSplitMismatch { total, sum } => {
                write!(f, " (S = {total}, S_p + S_0 + S_u = {sum})")
            }
            Violation::PopularSegmentExceedsCatalogue { popular, catalogue_bound } => {
                write!(f, " (1 + S_p = {} > f_0 = {catalogue_bound})", 1.0 + popular)
            }
            Violation::UniformSegmentExceedsCatalogue { uniform, available } => {
                write!(f, " (S_u = {uniform} > {available})")
            }
            Violation::PolicyForbidsUniformSegment | Violation::PolicyForbidsPopularSegment => Ok(()),
        }
    }
}

/// Checks every storage rule for `policy` and reports all violations.
pub fn validate_config(policy: CachePolicy, config: &CacheConfig) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let fields = [
        ("total", config.total),
        ("popular", config.popular),
        ("overhead", config.overhead),
        ("uniform", config.uniform),
        ("catalogue_bound", config.catalogue_bound),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            violations.push(Violation::NonFinite(name));
        } else if value < 0.0 {
            violations.push(Violation::NegativeSegment(name));
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let sum = config.popular + config.overhead + config.uniform;
    if (sum - config.total).abs() > 1e-9 * config.total.abs().max(1.0) {
        violations.push(Violation::StorageSplitMismatch {
            total: config.total,
            sum,
        });
    }
    if 1.0 + config.popular > config.catalogue_bound {
        violations.push(Violation::PopularSegmentExceedsCatalogue {
            popular: config.popular,
            catalogue_bound: config.catalogue_bound,
        });
    }
    let available = match (policy, config.uniform_span) {
        (CachePolicy::UniRand, UniformSpan::Catalogue) => config.catalogue_bound - 1.0,
        _ => config.catalogue_bound - config.popular,
    };
    if config.uniform > available {
        violations.push(Violation::UniformSegmentExceedsCatalogue {
            uniform: config.uniform,
            available,
        });
    }
    match policy {
        CachePolicy::StdPop if config.uniform > 0.0 => {
            violations.push(Violation::PolicyForbidsUniformSegment);
        }
        CachePolicy::UniRand if config.popular > 0.0 || config.overhead > 0.0 => {
            violations.push(Violation::PolicyForbidsPopularSegment);
        }
        _ => {}
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 1.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSteepness(eta))
    }
}

/// Hit probability of the deterministic popular segment,
/// `1 - (1 + S_p)^(1 - eta)`.
pub fn hit_prob_popular(popular: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(popular >= 0.0) {
        return Err(Error::param("popular", popular, "must be non-negative"));
    }
    Ok(1.0 - (1.0 + popular).powf(1.0 - eta))
}

/// Closed-form hit probability of the uniformly cached segment.
pub fn hit_prob_uniform(
    uniform: f64,
    popular: f64,
    catalogue_bound: f64,
    eta: f64,
    variant: B3Variant,
) -> Result<f64> {
    check_eta(eta)?;
    if !(uniform >= 0.0) {
        return Err(Error::param("uniform", uniform, "must be non-negative"));
    }
    if !(catalogue_bound > popular) {
        return Err(Error::InvalidConfig(vec![Violation::PopularSegmentExceedsCatalogue {
            popular,
            catalogue_bound,
        }]));
    }
    let fraction = uniform / (catalogue_bound - popular);
    let head = (1.0 + popular).powf(1.0 - eta);
    let tail = (1.0 + catalogue_bound).powf(1.0 - eta);
    Ok(match variant {
        B3Variant::AsPrinted => fraction * (1.0 - tail + head),
        B3Variant::IntegralConsistent => fraction * (head - tail),
    })
}

/// Total closed-form hit probability of `policy` with the split `config`.
///
/// Logs a warning when the value exceeds one, which the printed uniform
/// segment formula can produce.
pub fn hit_probability(policy: CachePolicy, config: &CacheConfig, eta: f64, variant: B3Variant) -> Result<f64> {
    check_eta(eta)?;
    let hit = match policy {
        CachePolicy::NoCache => 0.0,
        CachePolicy::StdPop => hit_prob_popular(config.popular, eta)?,
        CachePolicy::UniRand => hit_prob_uniform(config.uniform, 0.0, config.catalogue_bound, eta, variant)?,
        CachePolicy::MixPop => {
            hit_prob_popular(config.popular, eta)?
                + hit_prob_uniform(config.uniform, config.popular, config.catalogue_bound, eta, variant)?
        }
    };
    if hit > 1.0 {
        warn!(
            "{} hit probability {hit:.4} exceeds 1 at eta = {eta} ({variant:?})",
            policy.name()
        );
    }
    Ok(hit)
}

/// Whether a request for content `request` is served from the cache.
pub fn is_hit<R: Rng + ?Sized>(request: f64, policy: CachePolicy, config: &CacheConfig, rng: &mut R) -> Result<bool> {
    validate_config(policy, config).map_err(Error::InvalidConfig)?;
    if policy == CachePolicy::NoCache || request >= config.catalogue_bound {
        return Ok(false);
    }
    let (start, fraction) = match policy {
        CachePolicy::NoCache => unreachable!(),
        CachePolicy::StdPop | CachePolicy::MixPop if request < 1.0 + config.popular => return Ok(true),
        CachePolicy::StdPop => return Ok(false),
        CachePolicy::MixPop => (
            1.0 + config.popular,
            config.uniform / (config.catalogue_bound - config.popular),
        ),
        CachePolicy::UniRand => match config.uniform_span {
            UniformSpan::Catalogue => (1.0, config.uniform / (config.catalogue_bound - 1.0)),
            UniformSpan::MixPopRule => (1.0, config.uniform / config.catalogue_bound),
        },
    };
    Ok(request >= start && fraction > 0.0 && rng.random::<f64>() < fraction)
}
