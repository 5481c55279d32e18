//! Outage-probability bounds and transmission-capacity trade-offs for a
//! cellular uplink sharing spectrum with a mobile ad hoc network, with a Monte
//! Carlo simulator of the underlying Poisson fields to check every closed form.
//!
//! The analytic layer is generic over the scalar type ([`Real`]: `f32` or
//! `f64`); the simulator works in `f64`. Concrete aliases for the common `f64`
//! instantiation live at the crate root.

// Parameter checks are written `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod pointprocess;
pub mod scalar;
pub mod scenario;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Real;
pub use scenario::{LinkPlacement, Network, SharingMode};

pub type ScenarioConfig = scenario::ScenarioConfig<f64>;
pub type BoundPair = analytic::BoundPair<f64>;
pub type TradeoffWeights = analytic::TradeoffWeights<f64>;
pub type CapacityLine = analytic::CapacityLine<f64>;
pub type SicConfig = channel::SicConfig<f64>;
pub type LinkSample = channel::LinkSample<f64>;
pub type Interferer = channel::Interferer<f64>;
