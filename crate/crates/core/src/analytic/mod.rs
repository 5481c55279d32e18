//! Closed-form outage bounds, link-distance law, numerical expectations and the
//! asymptotic capacity trade-off.

pub mod bounds;
pub mod quadrature;
pub mod special;
pub mod tradeoff;

pub use bounds::{
    distance_pdf, distance_second_moment, effective_density, expected_outage_bounds, expected_outage_bounds_with,
    outage_lower, outage_upper, sic_chi, sic_chi_for, xi, zeta, BoundKernel, BoundPair, ExpectationSettings,
};
pub use quadrature::{AdaptiveQuadrature, GaussLegendre, Quadrature};
pub use special::{exp_integral_e1, gamma, gamma_ratio, ln_gamma};
pub use tradeoff::{
    capacity_line, diversity_factor_bounds, diversity_multiplier, kershaw_bounds, optimal_power_ratio, outage_limited,
    overlay_weights, phi_interval, tradeoff_weights, CapacityLine, OutageLimited, TradeoffWeights,
};
