//! Exact and geometric sampling of the cellular uplink distance.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{invalid, Result};
use crate::pointprocess::{radius_for_mean_count, sample_ppp, Point2, Region};

fn check_base_station_density(base_station_density: f64) -> Result<()> {
    if !(base_station_density > 0.0) || !base_station_density.is_finite() {
        return Err(invalid(
            "base_station_density",
            format!("must be positive and finite, got {base_station_density}"),
        ));
    }
    Ok(())
}

/// Draws `(D, Z)`: the inner-disk radius Z of the serving cell and the user
/// distance D, uniform in area within that disk.
///
/// `Pr(Z ≤ z) = 1 − exp(−4πλ_b z²)` is inverted directly, so D follows the
/// link-distance density exactly.
pub fn sample_link_distance<R: Rng + ?Sized>(base_station_density: f64, rng: &mut R) -> Result<(f64, f64)> {
    check_base_station_density(base_station_density)?;
    let u1: f64 = rng.sample(Open01);
    let u2: f64 = rng.sample(Open01);
    let z = (-u1.ln() / (4.0 * std::f64::consts::PI * base_station_density)).sqrt();
    Ok((z * u2.sqrt(), z))
}

/// Same law as [`sample_link_distance`], realized from the base-station field
/// itself: the serving station sits at the origin, Z is half the distance to
/// its nearest neighbour, and the user is placed uniformly in the disk of
/// radius Z.
///
/// Only useful to cross-check the exact sampler; it costs a full field per draw.
pub fn sample_link_distance_geometric<R: Rng + ?Sized>(
    base_station_density: f64,
    window_mean_count: f64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_base_station_density(base_station_density)?;
    let window = Region::centered(radius_for_mean_count(window_mean_count, base_station_density)?)?;
    let stations = sample_ppp(base_station_density, window, rng)?;
    let nearest = stations
        .points()
        .iter()
        .map(|p| p.position.distance(&Point2::ORIGIN))
        .fold(window.radius(), f64::min);
    let z = 0.5 * nearest;
    let u: f64 = rng.sample(Open01);
    Ok((z * u.sqrt(), z))
}
