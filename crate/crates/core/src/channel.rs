//! Power-law pathloss, Rayleigh fading and the interference-limited SIR seen
//! by the typical user at the origin.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::geometry::{PointSet, Tier};

/// Transmit powers, pathloss exponent and decoding threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    power_macro: f64,
    power_small: f64,
    pathloss_exponent: f64,
    target_sir: f64,
}

impl RadioParams {
    /// `target_sir` is a linear ratio.
    pub fn new(power_macro: f64, power_small: f64, pathloss_exponent: f64, target_sir: f64) -> Result<Self> {
        if !(power_small > 0.0 && power_small.is_finite()) {
            return Err(Error::param("power_small", power_small, "must be positive"));
        }
        if !(power_macro > power_small && power_macro.is_finite()) {
            return Err(Error::param("power_macro", power_macro, "must exceed power_small"));
        }
        if !(pathloss_exponent > 2.0 && pathloss_exponent.is_finite()) {
            return Err(Error::param("pathloss_exponent", pathloss_exponent, "must exceed 2"));
        }
        if !(target_sir > 0.0 && target_sir.is_finite()) {
            return Err(Error::param("target_sir", target_sir, "must be positive"));
        }
        Ok(RadioParams {
            power_macro,
            power_small,
            pathloss_exponent,
            target_sir,
        })
    }

    pub fn power_macro(&self) -> f64 {
        self.power_macro
    }

    pub fn power_small(&self) -> f64 {
        self.power_small
    }

    pub fn pathloss_exponent(&self) -> f64 {
        self.pathloss_exponent
    }

    pub fn target_sir(&self) -> f64 {
        self.target_sir
    }

    pub fn with_target_sir(&self, target_sir: f64) -> Result<Self> {
        RadioParams::new(self.power_macro, self.power_small, self.pathloss_exponent, target_sir)
    }

    /// Transmit power of a base-station tier.
    pub fn power(&self, tier: Tier) -> Result<f64> {
        match tier {
            Tier::Macro => Ok(self.power_macro),
            Tier::SmallCell => Ok(self.power_small),
            other => Err(Error::Numerical {
                context: "radio power",
                detail: format!("tier {other} does not transmit"),
            }),
        }
    }
}

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `distance^-alpha`.
pub fn pathloss(distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Singularity(distance));
    }
    Ok(distance.powf(-alpha))
}

fn pathloss_sq(dist_sq: f64, alpha: f64) -> Result<f64> {
    if !(dist_sq > 0.0) {
        return Err(Error::Singularity(dist_sq.sqrt()));
    }
    if alpha == 4.0 {
        Ok(1.0 / (dist_sq * dist_sq))
    } else {
        Ok(dist_sq.powf(-0.5 * alpha))
    }
}

/// Fading power coefficients, one per transmitter.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FadingDraw(pub Vec<f64>);

impl FadingDraw {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `count` i.i.d. unit-mean exponential power coefficients.
pub fn draw_fading<R: Rng + ?Sized>(count: usize, rng: &mut R) -> FadingDraw {
    FadingDraw((0..count).map(|_| Exp1.sample(rng)).collect())
}

/// Signal-to-interference ratio; `Unbounded` when nothing interferes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sir {
    Finite(f64),
    Unbounded,
}

impl Sir {
    pub fn meets(&self, target: f64) -> bool {
        match *self {
            Sir::Finite(v) => v >= target,
            Sir::Unbounded => true,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Sir::Finite(v) => v,
            Sir::Unbounded => f64::INFINITY,
        }
    }
}

/// The base station serving the typical user: tier plus index within that
/// tier's point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Serving {
    pub tier: Tier,
    pub index: usize,
}

/// Fading-free received powers `P * l(x)` at the origin for every macro and
/// small-cell transmitter, macro tier first. Geometry stays fixed across
/// retransmissions, so this is computed once per realization and reused
/// for every fading draw.
#[derive(Debug, Clone)]
pub struct LinkBudget {
    gains: Vec<f64>,
    serving: usize,
}

impl LinkBudget {
    pub fn at_origin(serving: Serving, macro_set: &PointSet, small_set: &PointSet, radio: &RadioParams) -> Result<Self> {
        let offset = match serving.tier {
            Tier::Macro if serving.index < macro_set.len() => 0,
            Tier::SmallCell if serving.index < small_set.len() => macro_set.len(),
            _ => {
                return Err(Error::Numerical {
                    context: "serving base station",
                    detail: format!("no {} point at index {}", serving.tier, serving.index),
                })
            }
        };
        let alpha = radio.pathloss_exponent();
        let mut gains = Vec::with_capacity(macro_set.len() + small_set.len());
        for (set, power) in [(macro_set, radio.power_macro()), (small_set, radio.power_small())] {
            for p in set.points() {
                gains.push(power * pathloss_sq(p.norm_sq(), alpha)?);
            }
        }
        Ok(LinkBudget {
            gains,
            serving: offset + serving.index,
        })
    }

    /// Number of transmitters, serving one included.
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn serving_position(&self) -> usize {
        self.serving
    }

    /// SIR under one fading draw (one coefficient per transmitter).
    pub fn sir(&self, fading: &[f64]) -> Result<Sir> {
        if fading.len() != self.gains.len() {
            return Err(Error::Numerical {
                context: "sir",
                detail: format!("{} fading coefficients for {} transmitters", fading.len(), self.gains.len()),
            });
        }
        let signal = self.gains[self.serving] * fading[self.serving];
        let interference: f64 = self
            .gains
            .iter()
            .zip(fading)
            .enumerate()
            .filter(|&(i, _)| i != self.serving)
            .map(|(_, (g, h))| g * h)
            .sum();
        if self.gains.len() == 1 {
            return Ok(Sir::Unbounded);
        }
        Ok(Sir::Finite(signal / interference))
    }

    /// One transmission attempt with freshly drawn fading on every link.
    pub fn attempt<R: Rng + ?Sized>(&self, target_sir: f64, rng: &mut R) -> bool {
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (i, g) in self.gains.iter().enumerate() {
            let h: f64 = Exp1.sample(rng);
            if i == self.serving {
                signal = g * h;
            } else {
                interference += g * h;
            }
        }
        signal >= target_sir * interference
    }
}

/// SIR at the origin for a user served by `serving`; every other macro and
/// small-cell point interferes. `fading` holds macro coefficients first,
/// then small-cell ones.
pub fn sir_at_origin(
    serving: Serving,
    macro_set: &PointSet,
    small_set: &PointSet,
    fading: &FadingDraw,
    radio: &RadioParams,
) -> Result<Sir> {
    LinkBudget::at_origin(serving, macro_set, small_set, radio)?.sir(fading.as_slice())
}
