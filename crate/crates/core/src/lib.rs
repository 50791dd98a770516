//! Delay analysis for two-tier cellular networks with cache-enabled small
//! cells.
//!
//! Base stations, central routers and users are homogeneous Poisson point
//! processes. A typical user at the origin fetches one content item: the
//! serving base station retransmits until the SIR clears a target, then the
//! content comes either from the small-cell cache or over the backhaul.
//! [`analytics`] evaluates the closed-form average delays and [`simulator`]
//! estimates the same quantities by Monte Carlo.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytics;
pub mod caching;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod popularity;
pub mod quadrature;
pub mod simulator;

pub use analytics::{ClosedFormDelay, DelayParams, Intensities};
pub use caching::{B3Variant, CacheConfig, CachePolicy, UniformSpan, Violation};
pub use channel::RadioParams;
pub use error::{Error, Result};
pub use geometry::{PointSet, Tier, Window};
pub use popularity::{PopularityDist, PopularityModel};
pub use simulator::{DelayEstimate, DelaySample, DistanceMode, Scenario};
