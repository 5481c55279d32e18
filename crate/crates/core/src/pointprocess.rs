//! Homogeneous Poisson point processes on disks: sampling, marking, thinning
//! and superposition.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::{draw_fade, FadingModel};
use crate::error::{invalid, Result};
use crate::scenario::Network;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_squared(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

/// Disk-shaped sampling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    center: Point2,
    radius: f64,
}

impl Region {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(
                "radius",
                format!("window radius must be positive and finite, got {radius}"),
            ));
        }
        Ok(Self { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(Point2::ORIGIN, radius)
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.center.distance_squared(p) <= self.radius * self.radius
    }
}

/// Point carrying its transmit power, fading gain and the network it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub position: Point2,
    pub power_mark: f64,
    pub fading_mark: f64,
    pub origin: Network,
}

/// Transmit powers used as marks (ρ for cellular users, ρ̃ for ad hoc transmitters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMarks {
    pub cellular: f64,
    pub manet: f64,
}

impl PowerMarks {
    pub fn of(&self, network: Network) -> f64 {
        match network {
            Network::Cellular => self.cellular,
            Network::Manet => self.manet,
        }
    }
}

/// Finite realization of a (possibly marked) PPP restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<MarkedPoint>,
    generating_density: f64,
    region: Region,
}

impl PointSet {
    pub fn empty(region: Region) -> Self {
        Self {
            points: Vec::new(),
            generating_density: 0.0,
            region,
        }
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn generating_density(&self) -> f64 {
        self.generating_density
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Sets every power mark and origin tag.
    pub fn with_power(mut self, power: f64, origin: Network) -> Self {
        for p in &mut self.points {
            p.power_mark = power;
            p.origin = origin;
        }
        self
    }

    /// Draws an independent fading mark for each point.
    pub fn with_fading<R: Rng + ?Sized>(mut self, model: FadingModel, rng: &mut R) -> Self {
        for p in &mut self.points {
            p.fading_mark = draw_fade(model, rng);
        }
        self
    }

    /// Number of points tagged with `network`.
    pub fn count_of(&self, network: Network) -> usize {
        self.points.iter().filter(|p| p.origin == network).count()
    }
}

/// Radius of a disk holding `mean_count` points on average at `density`.
pub fn radius_for_mean_count(mean_count: f64, density: f64) -> Result<f64> {
    if !(mean_count > 0.0) {
        return Err(invalid("mean_count", format!("must be positive, got {mean_count}")));
    }
    if !(density > 0.0) {
        return Err(invalid("density", format!("must be positive, got {density}")));
    }
    Ok((mean_count / (std::f64::consts::PI * density)).sqrt())
}

fn check_density(name: &'static str, density: f64) -> Result<()> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(invalid(name, format!("density must be finite and >= 0, got {density}")));
    }
    Ok(())
}

fn sample_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let law = Poisson::new(mean).expect("positive finite mean");
    law.sample(rng) as usize
}

fn sample_positions<R: Rng + ?Sized>(density: f64, region: &Region, rng: &mut R) -> Vec<Point2> {
    let n = sample_count(density * region.area(), rng);
    let c = region.center();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let r = region.radius() * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let (s, co) = phi.sin_cos();
        out.push(Point2::new(c.x + r * co, c.y + r * s));
    }
    out
}

/// Samples a homogeneous PPP of the given density on `region`.
///
/// Points carry unit power and fading marks and the cellular origin tag until
/// re-marked.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, region: Region, rng: &mut R) -> Result<PointSet> {
    check_density("density", density)?;
    let points = sample_positions(density, &region, rng)
        .into_iter()
        .map(|position| MarkedPoint {
            position,
            power_mark: 1.0,
            fading_mark: 1.0,
            origin: Network::Cellular,
        })
        .collect();
    Ok(PointSet {
        points,
        generating_density: density,
        region,
    })
}

/// Superposes the cellular and ad hoc processes and marks each point with its
/// transmit power.
///
/// A point is cellular with probability λ/(λ+λ̃) and ad hoc with probability
/// λ̃/(λ+λ̃). With one density zero the marks are deterministic and no extra
/// random numbers are consumed, so the realization coincides with [`sample_ppp`]
/// under the same stream.
pub fn superpose_and_mark<R: Rng + ?Sized>(
    cellular_density: f64,
    manet_density: f64,
    powers: PowerMarks,
    region: Region,
    rng: &mut R,
) -> Result<PointSet> {
    check_density("cellular_density", cellular_density)?;
    check_density("manet_density", manet_density)?;
    let total = cellular_density + manet_density;
    let positions = sample_positions(total, &region, rng);
    let p_cell = if total > 0.0 { cellular_density / total } else { 1.0 };
    let mut points = Vec::with_capacity(positions.len());
    for position in positions {
        let origin = if manet_density == 0.0 {
            Network::Cellular
        } else if cellular_density == 0.0 {
            Network::Manet
        } else if rng.random::<f64>() < p_cell {
            Network::Cellular
        } else {
            Network::Manet
        };
        points.push(MarkedPoint {
            position,
            power_mark: powers.of(origin),
            fading_mark: 1.0,
            origin,
        });
    }
    Ok(PointSet {
        points,
        generating_density: total,
        region,
    })
}

/// Independent thinning: each point is kept with `retain_probability`.
pub fn thin<R: Rng + ?Sized>(points: &PointSet, retain_probability: f64, rng: &mut R) -> Result<PointSet> {
    if !(0.0..=1.0).contains(&retain_probability) {
        return Err(invalid(
            "retain_probability",
            format!("must lie in [0, 1], got {retain_probability}"),
        ));
    }
    let kept = if retain_probability == 1.0 {
        points.points.clone()
    } else if retain_probability == 0.0 {
        Vec::new()
    } else {
        points
            .points
            .iter()
            .filter(|_| rng.random::<f64>() < retain_probability)
            .copied()
            .collect()
    };
    Ok(PointSet {
        points: kept,
        generating_density: points.generating_density * retain_probability,
        region: points.region,
    })
}
