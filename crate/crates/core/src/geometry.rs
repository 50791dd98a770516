//! Homogeneous Poisson point processes on a disc and nearest-point queries
//! for the typical user at the origin.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Default simulation disc radius in meters.
pub const DEFAULT_WINDOW_RADIUS: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    CentralRouter,
    Macro,
    SmallCell,
    User,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::CentralRouter => "central-router",
            Tier::Macro => "macro",
            Tier::SmallCell => "small-cell",
            Tier::User => "user",
        })
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Simulation disc centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("window radius", radius, "must be positive and finite"));
        }
        Ok(Window { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.norm_sq() <= self.radius * self.radius
    }
}

impl Default for Window {
    fn default() -> Self {
        Window {
            radius: DEFAULT_WINDOW_RADIUS,
        }
    }
}

/// One realization of a tier's point process inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    tier: Tier,
    intensity: f64,
    points: Vec<Point2D>,
}

impl PointSet {
    /// Builds a point set from explicit positions, checking that every point
    /// is finite and lies inside `window`.
    pub fn new(tier: Tier, intensity: f64, points: Vec<Point2D>, window: &Window) -> Result<Self> {
        check_intensity(intensity)?;
        if let Some(p) = points.iter().find(|p| !p.is_finite() || !window.contains(p)) {
            return Err(Error::param(
                "point radius",
                p.norm(),
                "point is non-finite or outside the window",
            ));
        }
        Ok(PointSet {
            tier,
            intensity,
            points,
        })
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_intensity(intensity: f64) -> Result<()> {
    if intensity > 0.0 && intensity.is_finite() {
        Ok(())
    } else {
        Err(Error::param("intensity", intensity, "must be positive and finite"))
    }
}

/// Samples a homogeneous PPP of the given intensity on `window`.
///
/// The count is Poisson with mean `intensity * area`; positions are i.i.d.
/// uniform on the disc, drawn by rejection from the bounding square.
pub fn sample_ppp<R: Rng + ?Sized>(
    tier: Tier,
    intensity: f64,
    window: &Window,
    rng: &mut R,
) -> Result<PointSet> {
    check_intensity(intensity)?;
    let mean = intensity * window.area();
    let count = Poisson::new(mean)
        .map_err(|_| Error::param("expected point count", mean, "not a valid Poisson mean"))?
        .sample(rng) as usize;

    let radius = window.radius();
    let points = (0..count)
        .map(|_| loop {
            let x = 2.0 * rng.random::<f64>() - 1.0;
            let y = 2.0 * rng.random::<f64>() - 1.0;
            if x * x + y * y < 1.0 {
                break Point2D::new(radius * x, radius * y);
            }
        })
        .collect();

    Ok(PointSet {
        tier,
        intensity,
        points,
    })
}

/// Nearest point of `set` to the origin as `(index, distance)`.
pub fn nearest(set: &PointSet) -> Result<(usize, f64)> {
    nearest_to(&Point2D::ORIGIN, set)
}

/// Nearest point of `set` to `target`. Equidistant points resolve to the
/// lowest index.
pub fn nearest_to(target: &Point2D, set: &PointSet) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in set.points.iter().enumerate() {
        let d2 = p.dist_sq(target);
        match best {
            Some((_, b)) if d2 >= b => {}
            _ => best = Some((i, d2)),
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt()))
        .ok_or(Error::EmptyTier(set.tier))
}

/// Mean distance from a fixed location to the nearest point of a PPP with
/// the given intensity, `1 / (2 sqrt(lambda))`.
pub fn mean_nearest_distance(intensity: f64) -> Result<f64> {
    check_intensity(intensity)?;
    Ok(0.5 / intensity.sqrt())
}
