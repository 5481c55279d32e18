//! Asymptotic (small-ε) capacity trade-off: line weights, SIC scaling interval,
//! optimal power ratio and diversity-gain windows.

use crate::analytic::bounds::{distance_second_moment, zeta};
use crate::analytic::special::gamma_ratio;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::scenario::{Network, ScenarioConfig, SharingMode};

/// Weights of the line μ̃C̃ + μC = Mε/φ and the interval φ ranges over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffWeights<F> {
    /// μ, weight on the cellular capacity (m²).
    pub mu: F,
    /// μ̃, weight on the ad hoc capacity (m²).
    pub mu_tilde: F,
    pub phi_low: F,
    pub phi_high: F,
}

/// Which network's outage constraint is active at capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutageLimited {
    Cellular,
    Manet,
    Both,
}

impl OutageLimited {
    pub fn as_str(self) -> &'static str {
        match self {
            OutageLimited::Cellular => "cellular",
            OutageLimited::Manet => "manet",
            OutageLimited::Both => "both",
        }
    }

    pub fn includes(self, network: Network) -> bool {
        match self {
            OutageLimited::Both => true,
            OutageLimited::Cellular => network == Network::Cellular,
            OutageLimited::Manet => network == Network::Manet,
        }
    }
}

/// Overlay weights (μ_o, μ̃_o) = (ζE[W^{−δ}]E[D²], ζE[W̃^{−δ}]d̃²).
pub fn overlay_weights<F: Real>(cfg: &ScenarioConfig<F>) -> (F, F) {
    let delta = cfg.delta();
    let z = zeta(cfg.sir_threshold, delta, cfg.fading_interferer);
    let mu = z * cfg.fading_cellular.moment(-delta) * distance_second_moment(cfg.base_station_density);
    let d = cfg.manet_link_distance;
    let mu_tilde = z * cfg.fading_manet.moment(-delta) * d * d;
    (mu, mu_tilde)
}

/// φ interval: [1, 1] without SIC, [1 − θ^{−δ}κ^{−δ}, 2/(2−δ) − θ^{−δ}κ^{−δ}] with it.
pub fn phi_interval<F: Real>(cfg: &ScenarioConfig<F>) -> (F, F) {
    if !cfg.sic.enabled {
        return (F::one(), F::one());
    }
    let delta = cfg.delta();
    let t = if cfg.sic.kappa.is_infinite() {
        F::zero()
    } else {
        (cfg.sir_threshold * cfg.sic.kappa).powf(-delta)
    };
    (F::one() - t, F::lit(2.0) / (F::lit(2.0) - delta) - t)
}

pub fn tradeoff_weights<F: Real>(cfg: &ScenarioConfig<F>) -> Result<TradeoffWeights<F>> {
    cfg.validate()?;
    let (mu_o, mu_tilde_o) = overlay_weights(cfg);
    let (mu, mu_tilde) = match cfg.mode {
        SharingMode::Overlay { .. } => (mu_o, mu_tilde_o),
        SharingMode::Underlay => {
            let e = cfg.power_ratio.powf(cfg.delta());
            ((e * mu_tilde_o).max(mu_o), mu_tilde_o.max(mu_o / e))
        }
    };
    let (phi_low, phi_high) = phi_interval(cfg);
    Ok(TradeoffWeights {
        mu,
        mu_tilde,
        phi_low,
        phi_high,
    })
}

/// Outage-limited network(s): both for overlay; for underlay the larger operand
/// of μ_u = (η^δ μ̃_o) ∨ μ_o decides.
pub fn outage_limited<F: Real>(cfg: &ScenarioConfig<F>) -> OutageLimited {
    match cfg.mode {
        SharingMode::Overlay { .. } => OutageLimited::Both,
        SharingMode::Underlay => {
            let (mu_o, mu_tilde_o) = overlay_weights(cfg);
            let manet_side = cfg.power_ratio.powf(cfg.delta()) * mu_tilde_o;
            let scale = mu_o.max(manet_side);
            if (mu_o - manet_side).abs() <= scale * F::lit(1e-9) {
                OutageLimited::Both
            } else if mu_o > manet_side {
                OutageLimited::Cellular
            } else {
                OutageLimited::Manet
            }
        }
    }
}

/// η* = (μ_o/μ̃_o)^{1/δ}, the power ratio at which underlay matches overlay.
pub fn optimal_power_ratio<F: Real>(cfg: &ScenarioConfig<F>) -> Result<F> {
    cfg.validate()?;
    let (mu_o, mu_tilde_o) = overlay_weights(cfg);
    Ok((mu_o / mu_tilde_o).powf(F::one() / cfg.delta()))
}

/// Asymptotic trade-off line for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityLine<F> {
    pub weights: TradeoffWeights<F>,
    pub total_subchannels: u32,
    pub epsilon: F,
}

impl<F: Real> CapacityLine<F> {
    /// Right-hand side Mε/φ.
    pub fn rhs(&self, phi: F) -> F {
        F::from_count(self.total_subchannels as usize) * self.epsilon / phi
    }

    /// Right-hand-side interval [Mε/φ_high, Mε/φ_low].
    pub fn rhs_interval(&self) -> (F, F) {
        (self.rhs(self.weights.phi_high), self.rhs(self.weights.phi_low))
    }

    /// Axis intercepts (C_max, C̃_max) for a given φ.
    pub fn intercepts(&self, phi: F) -> (F, F) {
        let r = self.rhs(phi);
        (r / self.weights.mu, r / self.weights.mu_tilde)
    }

    /// Cellular capacity on the line for a given ad hoc capacity; negative past the intercept.
    pub fn cellular_at(&self, c_manet: F, phi: F) -> F {
        (self.rhs(phi) - self.weights.mu_tilde * c_manet) / self.weights.mu
    }

    /// μ̃C̃ + μC.
    pub fn weighted_sum(&self, c_cell: F, c_manet: F) -> F {
        self.weights.mu * c_cell + self.weights.mu_tilde * c_manet
    }

    /// Whether (C, C̃) lies in the triangle under the line for φ.
    pub fn contains(&self, c_cell: F, c_manet: F, phi: F) -> bool {
        c_cell >= F::zero() && c_manet >= F::zero() && self.weighted_sum(c_cell, c_manet) <= self.rhs(phi)
    }
}

/// Capacity line for the configured ε; asymptotic in ε.
pub fn capacity_line<F: Real>(cfg: &ScenarioConfig<F>) -> Result<CapacityLine<F>> {
    Ok(CapacityLine {
        weights: tradeoff_weights(cfg)?,
        total_subchannels: cfg.total_subchannels,
        epsilon: cfg.target_outage,
    })
}

/// Window ((L−1)^δ, L^δ) for the capacity multiplier of order-`L` diversity
/// relative to unit fading.
pub fn diversity_factor_bounds<F: Real>(order: u32, delta: F) -> Result<(F, F)> {
    if order == 0 {
        return Err(invalid("order", "diversity order must be >= 1"));
    }
    if !(delta > F::zero() && delta < F::one()) {
        return Err(invalid("delta", format!("delta must lie in (0, 1), got {delta}")));
    }
    let l = F::from_count(order as usize);
    Ok(((l - F::one()).powf(delta), l.powf(delta)))
}

/// Exact multiplier 1/E[W^{−δ}] = Γ(L)/Γ(L−δ).
pub fn diversity_multiplier<F: Real>(order: u32, delta: F) -> F {
    let l = F::from_count(order as usize);
    gamma_ratio(l, l - delta)
}

/// Kershaw's two-sided bounds on Γ(x+1)/Γ(x+s), x > 0, 0 < s < 1:
/// (x + s/2)^{1−s} < Γ(x+1)/Γ(x+s) < (x − 1/2 + (s + 1/4)^{1/2})^{1−s}.
pub fn kershaw_bounds<F: Real>(x: F, s: F) -> (F, F) {
    let half = F::lit(0.5);
    let e = F::one() - s;
    let lo = (x + s * half).powf(e);
    let hi = (x - half + (s + F::lit(0.25)).sqrt()).powf(e);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::special::gamma;
    use crate::channel::FadingModel;

    fn reference() -> ScenarioConfig<f64> {
        ScenarioConfig::reference()
    }

    #[test]
    fn phi_without_and_with_sic() {
        let w = tradeoff_weights(&reference()).unwrap();
        assert_eq!((w.phi_low, w.phi_high), (1.0, 1.0));
        let w = tradeoff_weights(&reference().with_sic(true)).unwrap();
        assert!((w.phi_low - 0.541_394_379_857_016).abs() < 1e-12);
        assert!((w.phi_high - 0.874_727_713_190_349).abs() < 1e-12);
    }

    #[test]
    fn overlay_weight_values() {
        let (mu, mu_t) = overlay_weights(&reference());
        let z = 4.822_313_501_860_374;
        let ew = std::f64::consts::PI.sqrt(); // Γ(1/2)
        assert!((mu - z * ew * 39.788_735_772_973_83).abs() / mu < 1e-12);
        assert!((mu_t - z * ew * 25.0).abs() / mu_t < 1e-12);
    }

    #[test]
    fn symmetric_configuration_gives_unit_eta() {
        let mut cfg = reference();
        // E[D²] = d̃² when λ_b = 1/(8π d̃²)
        cfg.base_station_density = 1.0 / (8.0 * std::f64::consts::PI * 25.0);
        let (mu, mu_t) = overlay_weights(&cfg);
        assert!((mu - mu_t).abs() / mu < 1e-12);
        assert!((optimal_power_ratio(&cfg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_eta_scaling() {
        let mut cfg = reference();
        cfg.base_station_density = 1.0 / (8.0 * std::f64::consts::PI * 100.0);
        // μ_o = 4 μ̃_o at δ = 1/2 gives η* = 16
        assert!((optimal_power_ratio(&cfg).unwrap() - 16.0).abs() < 1e-10);
    }

    #[test]
    fn optimal_eta_reproduces_overlay_weights() {
        let mut cfg = reference().with_mode(SharingMode::Underlay);
        let (mu_o, mu_t_o) = overlay_weights(&cfg);
        cfg.power_ratio = optimal_power_ratio(&cfg).unwrap();
        let w = tradeoff_weights(&cfg).unwrap();
        assert!((w.mu - mu_o).abs() / mu_o < 1e-12);
        assert!((w.mu_tilde - mu_t_o).abs() / mu_t_o < 1e-12);
        assert_eq!(outage_limited(&cfg), OutageLimited::Both);
    }

    #[test]
    fn classification_compares_max_operands() {
        let cfg = reference().with_mode(SharingMode::Underlay);
        // η = 5 dB: η^δ μ̃_o > μ_o, so the ad hoc constraint binds first
        assert_eq!(outage_limited(&cfg), OutageLimited::Manet);
        let mut low = cfg.clone();
        low.power_ratio = 0.1;
        assert_eq!(outage_limited(&low), OutageLimited::Cellular);
        assert_eq!(outage_limited(&reference()), OutageLimited::Both);
    }

    #[test]
    fn line_intercepts() {
        let line = capacity_line(&reference()).unwrap();
        let (c, ct) = line.intercepts(1.0);
        assert!((line.weighted_sum(c, 0.0) - 0.1).abs() < 1e-15);
        assert!((line.weighted_sum(0.0, ct) - 0.1).abs() < 1e-15);
        assert!((line.cellular_at(0.0, 1.0) - c).abs() < 1e-18);
        assert!(line.contains(c * 0.5, ct * 0.5, 1.0));
        assert!(!line.contains(c, ct * 0.01, 1.0));
    }

    #[test]
    fn diversity_examples() {
        let (lo, hi) = diversity_factor_bounds(1, 0.5_f64).unwrap();
        assert_eq!((lo, hi), (0.0, 1.0));
        let m1 = diversity_multiplier(1, 0.5_f64);
        assert!(m1 > 0.0 && m1 < 1.0);

        let (lo, hi) = diversity_factor_bounds(2, 0.5_f64).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 2f64.sqrt()).abs() < 1e-15);
        assert!((diversity_multiplier(2, 0.5_f64) - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-13);

        let (lo, hi) = diversity_factor_bounds(8, 0.5_f64).unwrap();
        assert!((lo - 7f64.sqrt()).abs() < 1e-15 && (hi - 8f64.sqrt()).abs() < 1e-15);
        let m8 = diversity_multiplier(8, 0.5_f64);
        assert!((m8 - 2.693_380_576_004_207).abs() < 1e-12, "{m8}");

        assert!(diversity_factor_bounds(0, 0.5_f64).is_err());
        assert!(diversity_factor_bounds(2, 1.0_f64).is_err());
    }

    #[test]
    fn kershaw_orientation() {
        // Γ(x+s)/Γ(x+1) at x = 1, s = 1/2 is 0.886, below the lower end 1.118 of
        // the window, so the bounds apply to the reciprocal.
        let (lo, hi) = kershaw_bounds(1.0_f64, 0.5);
        let ratio = gamma(1.5_f64) / gamma(2.0);
        assert!(ratio < lo);
        let recip = 1.0 / ratio;
        assert!(lo < recip && recip < hi);
        for x in 1..20 {
            for s in 1..10 {
                let (x, s) = (x as f64 * 0.5, s as f64 * 0.1);
                let (lo, hi) = kershaw_bounds(x, s);
                let r = gamma_ratio(x + 1.0, x + s);
                assert!(lo < r && r < hi, "x={x} s={s}");
            }
        }
    }

    #[test]
    fn rayleigh_matches_unit_order_diversity() {
        let mut a = reference();
        let mut b = reference();
        a.fading_cellular = FadingModel::Rayleigh;
        b.fading_cellular = FadingModel::Diversity(1);
        assert_eq!(overlay_weights(&a), overlay_weights(&b));
    }
}
