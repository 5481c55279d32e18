//! Transmission-capacity trade-off curves from critical densities.

use serde::Serialize;

use crate::analytic::OutageLimited;
use crate::error::{invalid, Error, Result};
use crate::scenario::{Network, ScenarioConfig, SharingMode};

use super::search::{find_critical_density_for, CriticalDensity, SearchMode};

/// One feasible operating point: capacities `C = (1−ε)λ_ε` in m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityPoint {
    pub c_cell: f64,
    pub c_manet: f64,
    /// Outage constraints active at this point.
    pub binding: OutageLimited,
    /// Relative 95% uncertainty of the limiting density, propagated from the
    /// outage interval (0 for analytic modes).
    pub relative_uncertainty: f64,
}

/// A sweep entry that could not be turned into a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmittedPoint {
    pub manet_density: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct TradeoffCurve {
    pub points: Vec<CapacityPoint>,
    pub omitted: Vec<OmittedPoint>,
}

/// Relative tolerance of the density searches behind each point.
pub const CURVE_TOLERANCE: f64 = 1e-6;

/// Capacity pairs reachable at outage target `epsilon`.
///
/// Overlay: each network's critical density on a single sub-channel is found
/// once; the curve then lists every split `K = 0..=M`, `K̃ = M − K`, since the
/// critical density scales with the number of owned sub-channels. `sweep` is
/// ignored.
///
/// Underlay: for every ad hoc density in `sweep`, the cellular density is
/// raised until the first of the two outage constraints becomes active. Entries
/// where the ad hoc network alone already misses the target are omitted.
pub fn tradeoff_curve(
    cfg: &ScenarioConfig<f64>,
    epsilon: f64,
    sweep: &[f64],
    mode: SearchMode,
) -> Result<TradeoffCurve> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(
            "epsilon",
            format!("target outage must lie in (0, 1), got {epsilon}"),
        ));
    }
    match cfg.mode {
        SharingMode::Overlay { .. } => overlay_curve(cfg, epsilon, mode),
        SharingMode::Underlay => underlay_curve(cfg, epsilon, sweep, mode),
    }
}

fn relative_uncertainty(r: &CriticalDensity, epsilon: f64) -> f64 {
    // Outage is close to linear in density near a small target.
    r.ci_half_width / epsilon
}

fn overlay_curve(cfg: &ScenarioConfig<f64>, epsilon: f64, mode: SearchMode) -> Result<TradeoffCurve> {
    let m = cfg.total_subchannels;
    if m < 2 {
        return Err(invalid("subchannels.total", "an overlay split needs M >= 2"));
    }
    let single_band = cfg
        .clone()
        .with_mode(SharingMode::Overlay {
            cellular: 1,
            manet: m - 1,
        })
        .with_densities(0.0, 0.0);
    let cell = find_critical_density_for(
        &single_band,
        Network::Cellular,
        Network::Cellular,
        epsilon,
        mode,
        CURVE_TOLERANCE,
    )?;
    let single_band = single_band.with_mode(SharingMode::Overlay {
        cellular: m - 1,
        manet: 1,
    });
    let manet = find_critical_density_for(
        &single_band,
        Network::Manet,
        Network::Manet,
        epsilon,
        mode,
        CURVE_TOLERANCE,
    )?;
    let scale = 1.0 - epsilon;
    let points = (0..=m)
        .map(|k| {
            let k_manet = m - k;
            let binding = match (k, k_manet) {
                (0, _) => OutageLimited::Manet,
                (_, 0) => OutageLimited::Cellular,
                _ => OutageLimited::Both,
            };
            CapacityPoint {
                c_cell: scale * k as f64 * cell.density,
                c_manet: scale * k_manet as f64 * manet.density,
                binding,
                relative_uncertainty: relative_uncertainty(&cell, epsilon).max(relative_uncertainty(&manet, epsilon)),
            }
        })
        .collect();
    Ok(TradeoffCurve {
        points,
        omitted: Vec::new(),
    })
}

fn underlay_curve(cfg: &ScenarioConfig<f64>, epsilon: f64, sweep: &[f64], mode: SearchMode) -> Result<TradeoffCurve> {
    let mut curve = TradeoffCurve::default();
    for &manet_density in sweep {
        if !(manet_density >= 0.0) || !manet_density.is_finite() {
            return Err(invalid(
                "sweep",
                format!("ad hoc densities must be finite and >= 0, got {manet_density}"),
            ));
        }
        let at = cfg.clone().with_densities(0.0, manet_density);
        // Without ad hoc links their outage constraint is vacuous.
        let manet_limit = if manet_density == 0.0 {
            None
        } else {
            match find_critical_density_for(&at, Network::Cellular, Network::Manet, epsilon, mode, CURVE_TOLERANCE) {
                Ok(r) => Some(r),
                Err(Error::NoSolution(reason)) => {
                    curve.omitted.push(OmittedPoint { manet_density, reason });
                    continue;
                }
                Err(e) => return Err(e),
            }
        };
        let cell_limit = match find_critical_density_for(
            &at,
            Network::Cellular,
            Network::Cellular,
            epsilon,
            mode,
            CURVE_TOLERANCE,
        ) {
            Ok(r) => Some(r),
            // Ad hoc interference alone breaks every cellular link: only λ = 0 is feasible.
            Err(Error::NoSolution(_)) => None,
            Err(e) => return Err(e),
        };
        let (density, binding, uncertainty) = match (cell_limit, manet_limit) {
            (None, _) => (0.0, OutageLimited::Cellular, 0.0),
            (Some(c), None) => (c.density, OutageLimited::Cellular, relative_uncertainty(&c, epsilon)),
            (Some(c), Some(a)) => {
                let rel = (c.density - a.density).abs() / c.density.max(a.density);
                let tie = match mode {
                    SearchMode::Simulated(_) => {
                        relative_uncertainty(&c, epsilon).max(relative_uncertainty(&a, epsilon))
                    }
                    _ => 1e-6,
                };
                let binding = if rel <= tie {
                    OutageLimited::Both
                } else if c.density < a.density {
                    OutageLimited::Cellular
                } else {
                    OutageLimited::Manet
                };
                let limiting = if c.density <= a.density { c } else { a };
                (limiting.density, binding, relative_uncertainty(&limiting, epsilon))
            }
        };
        curve.points.push(CapacityPoint {
            c_cell: (1.0 - epsilon) * density,
            c_manet: (1.0 - epsilon) * manet_density,
            binding,
            relative_uncertainty: uncertainty,
        });
    }
    Ok(curve)
}
