//! Scenario parameters shared by the analytic and simulation layers.

use serde::{Deserialize, Serialize};

use crate::channel::{FadingModel, SicConfig};
use crate::error::{invalid, Result};
use crate::scalar::{db_to_linear, Real};

/// The two coexisting networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Network {
    Cellular,
    Manet,
}

impl Network {
    pub fn other(self) -> Network {
        match self {
            Network::Cellular => Network::Manet,
            Network::Manet => Network::Cellular,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Network::Cellular => "cellular",
            Network::Manet => "manet",
        }
    }
}

impl std::fmt::Display for Network {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spectrum sharing method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SharingMode {
    /// Disjoint sub-channel sets: `cellular + manet = M`.
    Overlay { cellular: u32, manet: u32 },
    /// Both networks spread over all `M` sub-channels.
    Underlay,
}

/// How the cellular link distance is realized in simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkPlacement {
    /// Inversion of the inner-disk radius law followed by a uniform position in the disk.
    Exact,
    /// Realize the base-station field and place the user in the inner disk of the
    /// typical cell.
    Geometry,
}

/// All physical and network parameters of one coexistence scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig<F> {
    pub mode: SharingMode,
    pub total_subchannels: u32,
    /// λ, cellular uplink users per m².
    pub cellular_density: F,
    /// λ̃, ad hoc transmitters per m².
    pub manet_density: F,
    /// λ_b, base stations per m².
    pub base_station_density: F,
    /// θ (linear).
    pub sir_threshold: F,
    /// α.
    pub path_loss_exponent: F,
    /// η = ρ/ρ̃ (linear).
    pub power_ratio: F,
    /// d̃ in meters.
    pub manet_link_distance: F,
    pub sic: SicConfig<F>,
    /// Served-link law of the cellular uplink (W).
    pub fading_cellular: FadingModel,
    /// Served-link law of the ad hoc link (W̃).
    pub fading_manet: FadingModel,
    /// Law of every interferer channel (G).
    pub fading_interferer: FadingModel,
    /// ε, target outage probability.
    pub target_outage: F,
    /// Mean number of interferers in the simulation window.
    pub window_mean_count: F,
    pub placement: LinkPlacement,
}

impl<F: Real> ScenarioConfig<F> {
    /// Evaluation setting used throughout the project: θ = 3, α = 4, λ_b = 10⁻³,
    /// d̃ = 5 m, η = 5 dB, κ = 2 dB (SIC off), Rayleigh fading, ε = 10⁻²,
    /// M = 10 split 5/5, window mean 200.
    pub fn reference() -> Self {
        Self {
            mode: SharingMode::Overlay { cellular: 5, manet: 5 },
            total_subchannels: 10,
            cellular_density: F::lit(1e-4),
            manet_density: F::lit(1e-4),
            base_station_density: F::lit(1e-3),
            sir_threshold: F::lit(3.0),
            path_loss_exponent: F::lit(4.0),
            power_ratio: db_to_linear(F::lit(5.0)),
            manet_link_distance: F::lit(5.0),
            sic: SicConfig {
                enabled: false,
                kappa: db_to_linear(F::lit(2.0)),
            },
            fading_cellular: FadingModel::Rayleigh,
            fading_manet: FadingModel::Rayleigh,
            fading_interferer: FadingModel::Rayleigh,
            target_outage: F::lit(1e-2),
            window_mean_count: F::lit(200.0),
            placement: LinkPlacement::Exact,
        }
    }

    /// δ = 2/α.
    pub fn delta(&self) -> F {
        F::lit(2.0) / self.path_loss_exponent
    }

    pub fn density(&self, network: Network) -> F {
        match network {
            Network::Cellular => self.cellular_density,
            Network::Manet => self.manet_density,
        }
    }

    pub fn with_density(mut self, network: Network, density: F) -> Self {
        match network {
            Network::Cellular => self.cellular_density = density,
            Network::Manet => self.manet_density = density,
        }
        self
    }

    pub fn with_densities(self, cellular: F, manet: F) -> Self {
        self.with_density(Network::Cellular, cellular)
            .with_density(Network::Manet, manet)
    }

    pub fn with_mode(mut self, mode: SharingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sic(mut self, enabled: bool) -> Self {
        self.sic.enabled = enabled;
        self
    }

    /// Served-link fading law of `network`.
    pub fn served_fading(&self, network: Network) -> FadingModel {
        match network {
            Network::Cellular => self.fading_cellular,
            Network::Manet => self.fading_manet,
        }
    }

    /// Sub-channels available to `network`.
    pub fn subchannels(&self, network: Network) -> u32 {
        match (self.mode, network) {
            (SharingMode::Overlay { cellular, .. }, Network::Cellular) => cellular,
            (SharingMode::Overlay { manet, .. }, Network::Manet) => manet,
            (SharingMode::Underlay, _) => self.total_subchannels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &'static str, v: F| -> Result<()> {
            if !(v >= F::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
            Ok(())
        };
        if self.total_subchannels == 0 {
            return Err(invalid("subchannels.total", "M must be >= 1"));
        }
        if let SharingMode::Overlay { cellular, manet } = self.mode {
            if cellular + manet != self.total_subchannels {
                return Err(invalid(
                    "subchannels",
                    format!(
                        "overlay split {cellular} + {manet} must equal M = {}",
                        self.total_subchannels
                    ),
                ));
            }
            // A network may own no band only while it has no transmitters.
            if cellular == 0 && self.cellular_density > F::zero() {
                return Err(invalid(
                    "subchannels.cellular",
                    "K must be >= 1 when the cellular density is positive",
                ));
            }
            if manet == 0 && self.manet_density > F::zero() {
                return Err(invalid(
                    "subchannels.manet",
                    "K~ must be >= 1 when the ad hoc density is positive",
                ));
            }
        }
        finite_nonneg("density.cellular", self.cellular_density)?;
        finite_nonneg("density.manet", self.manet_density)?;
        if !(self.base_station_density > F::zero()) || !self.base_station_density.is_finite() {
            return Err(invalid("density.base_station", "lambda_b must be positive"));
        }
        if !(self.sir_threshold >= F::one()) || !self.sir_threshold.is_finite() {
            return Err(invalid(
                "sir.threshold",
                format!(
                    "theta must satisfy theta >= 1 (a single strong interferer must be able to cause outage), got {}",
                    self.sir_threshold
                ),
            ));
        }
        if !(self.path_loss_exponent > F::lit(2.0)) || !self.path_loss_exponent.is_finite() {
            return Err(invalid(
                "pathloss.alpha",
                format!("alpha must exceed 2, got {}", self.path_loss_exponent),
            ));
        }
        if !(self.power_ratio > F::zero()) || !self.power_ratio.is_finite() {
            return Err(invalid("power.ratio", "eta must be positive"));
        }
        if !(self.manet_link_distance > F::zero()) || !self.manet_link_distance.is_finite() {
            return Err(invalid("manet.link_distance", "d~ must be positive"));
        }
        self.sic.validate()?;
        self.fading_cellular.validate()?;
        self.fading_manet.validate()?;
        self.fading_interferer.validate()?;
        if !(self.target_outage > F::zero() && self.target_outage < F::one()) {
            return Err(invalid(
                "target.epsilon",
                format!("epsilon must lie in (0, 1), got {}", self.target_outage),
            ));
        }
        if !(self.window_mean_count > F::zero()) || !self.window_mean_count.is_finite() {
            return Err(invalid("simulation.window_mean_count", "must be positive"));
        }
        Ok(())
    }
}

impl<F: Real> Default for ScenarioConfig<F> {
    fn default() -> Self {
        Self::reference()
    }
}
