//! Per-trial network realizations and the parallel outage estimator.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::effective_density;
use crate::channel::{apply_sic, compute_sir, draw_fade, Interferer, LinkSample};
use crate::error::{invalid, Result};
use crate::pointprocess::{radius_for_mean_count, sample_ppp, superpose_and_mark, PointSet, PowerMarks, Region};
use crate::scenario::{LinkPlacement, Network, ScenarioConfig, SharingMode};

use super::sampling::{sample_link_distance, sample_link_distance_geometric};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SPECSHARE_THREADS";

const BATCH: usize = 1024;

/// Worker count: `SPECSHARE_THREADS` when set to a positive integer, otherwise
/// every available core.
pub fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Simulated outage probability with its normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub outage_fraction: f64,
    pub outages: u64,
    pub trials: usize,
    pub ci_half_width: f64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: usize, seed: u64) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            outage_fraction: p,
            outages,
            trials,
            ci_half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
        }
    }

    /// Fewer than five outages were observed, so the normal interval is not
    /// trustworthy.
    pub fn unreliable(&self) -> bool {
        self.outages < 5
    }
}

/// Transmit powers used by the simulator: ρ = η for cellular users and ρ̃ = 1
/// for ad hoc transmitters. Only the ratio matters for the SIR.
pub fn transmit_powers(cfg: &ScenarioConfig<f64>) -> PowerMarks {
    PowerMarks {
        cellular: cfg.power_ratio,
        manet: 1.0,
    }
}

/// One snapshot as seen by the typical receiver at the window centre.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub typical_link: LinkSample<f64>,
    pub interferers: PointSet,
    pub window: Region,
}

impl NetworkRealization {
    /// Draws a snapshot for the receiver of `network`.
    ///
    /// Random numbers are consumed in a fixed order: link distance, link fade,
    /// interferer positions, origin marks, interferer fades. The window always
    /// holds `window_mean_count` points on average, so a change of density only
    /// rescales the same draws.
    pub fn draw<R: Rng + ?Sized>(cfg: &ScenarioConfig<f64>, network: Network, rng: &mut R) -> Result<Self> {
        let powers = transmit_powers(cfg);
        let distance = match network {
            Network::Manet => cfg.manet_link_distance,
            Network::Cellular => match cfg.placement {
                LinkPlacement::Exact => sample_link_distance(cfg.base_station_density, rng)?.0,
                LinkPlacement::Geometry => {
                    sample_link_distance_geometric(cfg.base_station_density, cfg.window_mean_count, rng)?.0
                }
            },
        };
        let typical_link = LinkSample {
            signal_fade: draw_fade(cfg.served_fading(network), rng),
            tx_rx_distance: distance,
            tx_power: powers.of(network),
        };
        let (cell, manet) = field_densities(cfg, network);
        let total = cell + manet;
        let window = if total > 0.0 {
            Region::centered(radius_for_mean_count(cfg.window_mean_count, total)?)?
        } else {
            Region::centered(1.0)?
        };
        let field = match cfg.mode {
            SharingMode::Overlay { .. } => {
                let density = cell.max(manet);
                sample_ppp(density, window, rng)?.with_power(powers.of(network), network)
            }
            SharingMode::Underlay => superpose_and_mark(cell, manet, powers, window, rng)?,
        };
        Ok(Self {
            typical_link,
            interferers: field.with_fading(cfg.fading_interferer, rng),
            window,
        })
    }

    /// Interferers with their distances to the receiver.
    pub fn interferers_seen(&self) -> Vec<Interferer<f64>> {
        let c = self.window.center();
        self.interferers
            .points()
            .iter()
            .map(|p| Interferer {
                power: p.power_mark,
                fade: p.fading_mark,
                distance: p.position.distance(&c),
            })
            .collect()
    }

    /// SIR after the receiver's cancellation stage.
    pub fn sir(&self, cfg: &ScenarioConfig<f64>) -> Result<f64> {
        let alpha = cfg.path_loss_exponent;
        let kept = apply_sic(&self.typical_link, &self.interferers_seen(), &cfg.sic, alpha)?;
        compute_sir(&self.typical_link, &kept, alpha)
    }

    /// Outage test on the squared-distance fast path.
    ///
    /// A coincident interferer (probability zero) has infinite received power:
    /// it is cancelled when SIC is on and forces an outage otherwise.
    pub fn in_outage(&self, cfg: &ScenarioConfig<f64>) -> bool {
        let loss = PathLoss::new(cfg.path_loss_exponent);
        let link = &self.typical_link;
        let d = link.tx_rx_distance;
        let signal = link.tx_power * link.signal_fade * loss.gain(d * d);
        let limit = if cfg.sic.enabled {
            cfg.sic.kappa * signal
        } else {
            f64::INFINITY
        };
        let c = self.window.center();
        let mut interference = 0.0;
        for p in self.interferers.points() {
            let rx = p.power_mark * p.fading_mark * loss.gain(p.position.distance_squared(&c));
            if !(rx > limit) {
                interference += rx;
            }
        }
        // SIR < θ  ⇔  S < θ·I
        signal < cfg.sir_threshold * interference
    }
}

/// Interferer densities (cellular, ad hoc) in the receiver's band.
fn field_densities(cfg: &ScenarioConfig<f64>, network: Network) -> (f64, f64) {
    match cfg.mode {
        SharingMode::Overlay { cellular, manet } => match network {
            Network::Cellular => (per_band(cfg.cellular_density, cellular), 0.0),
            Network::Manet => (0.0, per_band(cfg.manet_density, manet)),
        },
        SharingMode::Underlay => (
            per_band(cfg.cellular_density, cfg.total_subchannels),
            per_band(cfg.manet_density, cfg.total_subchannels),
        ),
    }
}

fn per_band(density: f64, bands: u32) -> f64 {
    if bands == 0 {
        0.0
    } else {
        density / bands as f64
    }
}

/// `r^{−α}` from `r²`, with an integer-power shortcut for even α.
#[derive(Debug, Clone, Copy)]
struct PathLoss {
    half_alpha: f64,
    integer: Option<i32>,
}

impl PathLoss {
    fn new(alpha: f64) -> Self {
        let half_alpha = 0.5 * alpha;
        let integer = (half_alpha.fract() == 0.0 && half_alpha <= 16.0).then_some(half_alpha as i32);
        Self { half_alpha, integer }
    }

    #[inline]
    fn gain(&self, r2: f64) -> f64 {
        match self.integer {
            Some(k) => 1.0 / r2.powi(k),
            None => r2.powf(-self.half_alpha),
        }
    }
}

/// Random stream of trial `index` under `seed`: the seed keys a ChaCha8
/// generator and the trial index selects its stream, so every trial owns an
/// independent, position-free substream.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate of `Pr(SIR < θ)` for the typical receiver of `network`.
///
/// Trials run in fixed-size batches on up to [`worker_threads`] threads and
/// only integer outage counts are reduced, so the result does not depend on
/// the thread count or scheduling.
pub fn estimate_outage(
    cfg: &ScenarioConfig<f64>,
    network: Network,
    trials: usize,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_outage_with_threads(cfg, network, trials, seed, worker_threads())
}

/// [`estimate_outage`] with an explicit worker count.
pub fn estimate_outage_with_threads(
    cfg: &ScenarioConfig<f64>,
    network: Network,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<OutageEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "at least one trial is required"));
    }
    cfg.validate()?;
    if effective_density(cfg, network) == 0.0 {
        return Ok(OutageEstimate::from_counts(0, trials, seed));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let batches = trials.div_ceil(BATCH);
    let run_batch = |b: usize| -> Result<u64> {
        let mut outages = 0;
        for index in b * BATCH..((b + 1) * BATCH).min(trials) {
            let mut rng = base.clone();
            rng.set_stream(index as u64);
            if NetworkRealization::draw(cfg, network, &mut rng)?.in_outage(cfg) {
                outages += 1;
            }
        }
        Ok(outages)
    };
    let outages = if threads <= 1 {
        (0..batches).map(run_batch).sum::<Result<u64>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| invalid("threads", e.to_string()))?;
        pool.install(|| (0..batches).into_par_iter().map(run_batch).sum::<Result<u64>>())?
    };
    Ok(OutageEstimate::from_counts(outages, trials, seed))
}
