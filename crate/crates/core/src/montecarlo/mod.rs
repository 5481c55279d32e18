//! Monte Carlo estimation of outage probabilities, exact sampling of the
//! cellular link distance, critical-density search and trade-off curves.

mod curve;
mod outage;
mod sampling;
mod search;

pub use curve::{tradeoff_curve, CapacityPoint, OmittedPoint, TradeoffCurve, CURVE_TOLERANCE};
pub use outage::{
    estimate_outage, estimate_outage_with_threads, transmit_powers, trial_rng, worker_threads, NetworkRealization,
    OutageEstimate, THREADS_ENV,
};
pub use sampling::{sample_link_distance, sample_link_distance_geometric};
pub use search::{find_critical_density, find_critical_density_for, CriticalDensity, SearchMode, SimulatedSearch};
