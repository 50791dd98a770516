//! Continuous power-law content popularity.
//!
//! Content is indexed by a real coordinate `f >= 1`; the request density is
//! `(eta - 1) f^-eta`, so larger `eta` concentrates requests on the most
//! popular (smallest) coordinates.

use log::warn;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::mean_nearest_distance;

/// Steepness used when a per-user distance would give `eta <= 1`.
pub const CLAMPED_ETA: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopularityDist {
    eta: f64,
}

impl PopularityDist {
    pub fn new(eta: f64) -> Result<Self> {
        if eta > 1.0 && eta.is_finite() {
            Ok(PopularityDist { eta })
        } else {
            Err(Error::InvalidSteepness(eta))
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn pdf(&self, f: f64) -> f64 {
        if f >= 1.0 {
            (self.eta - 1.0) * f.powf(-self.eta)
        } else {
            0.0
        }
    }

    pub fn cdf(&self, f: f64) -> f64 {
        if f >= 1.0 {
            1.0 - f.powf(1.0 - self.eta)
        } else {
            0.0
        }
    }

    /// Inverse CDF: maps `u` in `[0, 1)` to a content coordinate.
    pub fn quantile(&self, u: f64) -> f64 {
        (1.0 - u).powf(-1.0 / (self.eta - 1.0))
    }

    pub fn sample_request<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// How the popularity steepness is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PopularityModel {
    /// Same steepness for every user.
    Fixed(f64),
    /// Steepness equals the user to serving small-cell distance in meters.
    DistanceDependent,
    /// Steepness equals the mean number of users per small cell.
    LoadDependent,
}

impl PopularityModel {
    pub fn name(&self) -> &'static str {
        match self {
            PopularityModel::Fixed(_) => "Fixed",
            PopularityModel::DistanceDependent => "Distance",
            PopularityModel::LoadDependent => "Load",
        }
    }
}

/// Steepness implied by `model`.
///
/// For [`PopularityModel::DistanceDependent`], `distance_override` carries
/// a realized user distance; without it the mean nearest-SBS distance
/// `1 / (2 sqrt(lambda_sc))` is used. A realized distance that gives
/// `eta <= 1` is clamped to [`CLAMPED_ETA`]; every other `eta <= 1` is an
/// error.
pub fn effective_eta(
    model: PopularityModel,
    lambda_sc: f64,
    lambda_ut: f64,
    distance_override: Option<f64>,
) -> Result<f64> {
    if !(lambda_sc > 0.0) {
        return Err(Error::param("lambda_sc", lambda_sc, "must be positive"));
    }
    if !(lambda_ut > 0.0) {
        return Err(Error::param("lambda_ut", lambda_ut, "must be positive"));
    }
    let eta = match model {
        PopularityModel::Fixed(eta0) => eta0,
        PopularityModel::DistanceDependent => match distance_override {
            Some(r) if r > 1.0 => r,
            Some(r) => {
                warn!("user distance {r} m gives steepness <= 1; clamping to {CLAMPED_ETA}");
                CLAMPED_ETA
            }
            None => mean_nearest_distance(lambda_sc)?,
        },
        PopularityModel::LoadDependent => lambda_ut / lambda_sc,
    };
    PopularityDist::new(eta).map(|d| d.eta())
}
