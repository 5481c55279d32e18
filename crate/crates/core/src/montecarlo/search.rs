//! Critical density: the largest transmitter density meeting an outage target.

use serde::Serialize;

use crate::analytic::expected_outage_bounds;
use crate::error::{invalid, Error, Result};
use crate::scenario::{Network, ScenarioConfig};

use super::outage::estimate_outage;

/// Trial schedule of a simulated search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulatedSearch {
    /// Trials per evaluation at first.
    pub trials: usize,
    /// Evaluations that cannot be told apart from ε are repeated with doubled
    /// trials up to this many.
    pub max_trials: usize,
    pub seed: u64,
}

impl SimulatedSearch {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            max_trials: 4 * trials,
            seed,
        }
    }
}

/// How the outage of a candidate density is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    /// Expected lower bound: yields the largest density estimate.
    AnalyticLower,
    /// Expected upper bound: yields the smallest density estimate.
    AnalyticUpper,
    /// Monte Carlo with common random numbers across candidate densities.
    Simulated(SimulatedSearch),
}

impl SearchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMode::AnalyticLower => "analytic_lb",
            SearchMode::AnalyticUpper => "analytic_ub",
            SearchMode::Simulated(_) => "simulated",
        }
    }
}

/// Result of a critical-density search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalDensity {
    /// λ_ε in m⁻².
    pub density: f64,
    /// Outage observed at `density`.
    pub outage: f64,
    /// 95% half-width of `outage` (0 for analytic modes).
    pub ci_half_width: f64,
    /// Final bracket: outage below ε at the left end, at or above ε at the right.
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// Trials behind `outage` (0 for analytic modes).
    pub trials: usize,
    /// The bracket reached the relative tolerance. A simulated search usually
    /// stops earlier, once ε lies inside the confidence interval at the largest
    /// trial budget.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Probe {
    outage: f64,
    ci_half_width: f64,
    trials: usize,
    /// The outage is distinguishable from ε.
    separated: bool,
}

const MAX_EXPANSIONS: usize = 2100;
const MAX_BISECTIONS: usize = 400;

/// Largest density of `network` whose own outage equals `epsilon`, all other
/// parameters fixed.
///
/// `tol` is the relative width of the final density bracket.
pub fn find_critical_density(
    cfg: &ScenarioConfig<f64>,
    network: Network,
    epsilon: f64,
    mode: SearchMode,
    tol: f64,
) -> Result<CriticalDensity> {
    find_critical_density_for(cfg, network, network, epsilon, mode, tol)
}

/// Largest density of the `free` network at which the outage of `observed`
/// equals `epsilon`. Outage grows with either density, so bisection applies.
pub fn find_critical_density_for(
    cfg: &ScenarioConfig<f64>,
    free: Network,
    observed: Network,
    epsilon: f64,
    mode: SearchMode,
    tol: f64,
) -> Result<CriticalDensity> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(
            "epsilon",
            format!("target outage must lie in (0, 1), got {epsilon}"),
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(
            "tol",
            format!("relative tolerance must lie in (0, 1), got {tol}"),
        ));
    }
    cfg.validate()?;
    let mut evaluations = 0;
    let mut probe = |density: f64| -> Result<Probe> {
        evaluations += 1;
        evaluate(cfg, free, observed, density, epsilon, mode)
    };

    let at_zero = probe(0.0)?;
    if at_zero.outage >= epsilon {
        return Err(Error::NoSolution(format!(
            "{} outage is {:.4e} >= {epsilon} even without {} transmitters",
            observed, at_zero.outage, free
        )));
    }

    // Bracket: (lo, hi] with outage(lo) < ε ≤ outage(hi).
    let (mut lo, mut hi) = initial_bracket(cfg, free, observed, epsilon, mode)?;
    let mut lo_probe = at_zero;
    let mut hi_probe;
    if lo > 0.0 {
        lo_probe = probe(lo)?;
        while lo_probe.outage >= epsilon {
            hi = lo;
            lo *= 0.5;
            lo_probe = probe(lo)?;
        }
    }
    hi_probe = probe(hi)?;
    let mut expansions = 0;
    while hi_probe.outage < epsilon {
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(Error::NoSolution(format!(
                "{observed} outage stays below {epsilon} for every {free} density tried"
            )));
        }
        lo = hi;
        lo_probe = hi_probe;
        hi *= 2.0;
        hi_probe = probe(hi)?;
    }

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            let (density, at) = if (lo_probe.outage - epsilon).abs() <= (hi_probe.outage - epsilon).abs() && lo > 0.0 {
                (lo, lo_probe)
            } else {
                (hi, hi_probe)
            };
            return Ok(done(density, at, (lo, hi), evaluations, true));
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let p = probe(mid)?;
        if !p.separated {
            return Ok(done(mid, p, (lo, hi), evaluations, false));
        }
        if p.outage < epsilon {
            lo = mid;
            lo_probe = p;
        } else {
            hi = mid;
            hi_probe = p;
        }
    }
    Err(Error::Numerical {
        what: "critical-density bisection",
        estimate: 0.5 * (lo + hi),
        error: hi - lo,
        evaluations,
    })
}

fn done(density: f64, at: Probe, bracket: (f64, f64), evaluations: usize, converged: bool) -> CriticalDensity {
    CriticalDensity {
        density,
        outage: at.outage,
        ci_half_width: at.ci_half_width,
        bracket,
        evaluations,
        trials: at.trials,
        converged,
    }
}

/// Starting guesses `(lo, hi)`; `lo = 0` when nothing better is known.
fn initial_bracket(
    cfg: &ScenarioConfig<f64>,
    free: Network,
    observed: Network,
    epsilon: f64,
    mode: SearchMode,
) -> Result<(f64, f64)> {
    let current = cfg.density(free);
    let guess = if current > 0.0 { current } else { 1e-4 };
    match mode {
        SearchMode::AnalyticLower | SearchMode::AnalyticUpper => Ok((0.0, guess)),
        SearchMode::Simulated(_) => {
            // The analytic bounds pin the simulated root between their own
            // roots. A bound may have no root (the upper bound can exceed ε
            // before the free network transmits at all); the bracket then
            // falls back to 0 or to the guess and is verified by probing.
            let coarse = 1e-4;
            let root = |m| match find_critical_density_for(cfg, free, observed, epsilon, m, coarse) {
                Ok(r) => Ok(Some(r.density)),
                Err(Error::NoSolution(_)) => Ok(None),
                Err(e) => Err(e),
            };
            let lo = root(SearchMode::AnalyticUpper)?.map_or(0.0, |d| 0.8 * d);
            let hi = root(SearchMode::AnalyticLower)?.map_or(guess.max(2.0 * lo), |d| 1.25 * d);
            Ok((lo, hi))
        }
    }
}

fn evaluate(
    cfg: &ScenarioConfig<f64>,
    free: Network,
    observed: Network,
    density: f64,
    epsilon: f64,
    mode: SearchMode,
) -> Result<Probe> {
    let trial_cfg = cfg.clone().with_density(free, density);
    match mode {
        SearchMode::AnalyticLower | SearchMode::AnalyticUpper => {
            let b = expected_outage_bounds(&trial_cfg, observed)?;
            let outage = if mode == SearchMode::AnalyticLower {
                b.lower
            } else {
                b.upper
            };
            Ok(Probe {
                outage,
                ci_half_width: 0.0,
                trials: 0,
                separated: outage != epsilon,
            })
        }
        SearchMode::Simulated(s) => {
            let mut trials = s.trials.max(1);
            loop {
                let e = estimate_outage(&trial_cfg, observed, trials, s.seed)?;
                // Separation is judged with the variance at ε, which stays
                // meaningful when no outage was observed.
                let half = 1.96 * (epsilon * (1.0 - epsilon) / trials as f64).sqrt();
                let separated = (e.outage_fraction - epsilon).abs() > half;
                if separated || trials >= s.max_trials {
                    return Ok(Probe {
                        outage: e.outage_fraction,
                        ci_half_width: e.ci_half_width,
                        trials,
                        separated,
                    });
                }
                trials = (2 * trials).min(s.max_trials);
            }
        }
    }
}
