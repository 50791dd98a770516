use thiserror::Error;

use crate::caching::Violation;
use crate::geometry::Tier;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A tier required by the scenario has no point inside the window.
    #[error("no {0} point inside the simulation window; enlarge the window")]
    EmptyTier(Tier),

    #[error("pathloss is singular at distance {0}")]
    Singularity(f64),

    /// Popularity steepness must exceed one for the power law to normalize.
    #[error("invalid popularity steepness {0}: must be > 1")]
    InvalidSteepness(f64),

    #[error("invalid cache configuration: {}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("numerical failure in {context}: {detail}")]
    Numerical {
        context: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
