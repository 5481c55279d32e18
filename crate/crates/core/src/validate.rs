//! Self-check suite run by `specshare validate`: invariants of every layer,
//! evaluated on a user scenario.

use crate::analytic::bounds::distance_tail_cutoff;
use crate::analytic::{
    distance_pdf, distance_second_moment, diversity_factor_bounds, diversity_multiplier, effective_density,
    expected_outage_bounds, kershaw_bounds, optimal_power_ratio, overlay_weights, sic_chi, tradeoff_weights, zeta,
    AdaptiveQuadrature,
};
use crate::channel::FadingModel;
use crate::error::Result;
use crate::montecarlo::{
    estimate_outage, estimate_outage_with_threads, find_critical_density, sample_link_distance, trial_rng, SearchMode,
};
use crate::pointprocess::{superpose_and_mark, PowerMarks, Region};
use crate::scenario::{Network, ScenarioConfig, SharingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Invariants at small sample sizes; well under a minute.
    Fast,
    /// Adds the density-ladder sandwich and SIC-ratio checks at 10⁵ trials.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&ScenarioConfig<f64>, u64) -> Result<(bool, String)>;

/// Runs every check of `suite` against `cfg`.
pub fn run_suite(cfg: &ScenarioConfig<f64>, suite: Suite, seed: u64) -> Vec<CheckOutcome> {
    let mut checks: Vec<(&'static str, Check)> = vec![
        ("distance_law", distance_law),
        ("sampled_link_distance", sampled_link_distance),
        ("sic_factor", sic_factor),
        ("bound_order", bound_order),
        ("region_containment_eta_star", region_containment),
        ("degenerate_equivalence", degenerate_equivalence),
        ("kershaw_diversity", kershaw_diversity),
        ("mark_law", mark_law),
        ("bisection_closed_form", bisection_closed_form),
        ("thread_determinism", thread_determinism),
        ("sandwich_at_target", sandwich_at_target),
    ];
    if suite == Suite::Full {
        checks.push(("sandwich_ladder", sandwich_ladder));
    }
    checks
        .into_iter()
        .map(|(name, check)| match check(cfg, seed) {
            Ok((passed, detail)) => CheckOutcome { name, passed, detail },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn distance_law(cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let lb = cfg.base_station_density;
    let q = AdaptiveQuadrature::new(20, 1e-13);
    let top = distance_tail_cutoff(lb, 1e-16);
    let mass = q.integrate(0.0, top, |t| distance_pdf(t, lb))?.value;
    let second = q.integrate(0.0, top, |t| t * t * distance_pdf(t, lb))?.value;
    let rel = (second - distance_second_moment(lb)).abs() / distance_second_moment(lb);
    Ok((
        (mass - 1.0).abs() < 1e-8 && rel < 1e-6,
        format!("mass {mass:.12}, E[D^2] rel err {rel:.2e}"),
    ))
}

fn sampled_link_distance(cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let lb = cfg.base_station_density;
    let n = 200_000;
    let mut rng = trial_rng(seed, u64::MAX);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let (d, _) = sample_link_distance(lb, &mut rng)?;
        let d2 = d * d;
        s1 += d2;
        s2 += d2 * d2;
    }
    let mean = s1 / n as f64;
    let sd = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let z = (mean - distance_second_moment(lb)) / sd;
    Ok((
        z.abs() < 3.0,
        format!("E[D^2] {mean:.4} vs {:.4} (z = {z:.2})", distance_second_moment(lb)),
    ))
}

fn sic_factor(cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let delta = cfg.delta();
    let kappa = if cfg.sic.kappa.is_finite() {
        cfg.sic.kappa
    } else {
        10f64.powf(0.2)
    };
    let chi = sic_chi(cfg.sir_threshold, kappa, delta)?;
    let direct = 1.0 - (cfg.sir_threshold * kappa).powf(-delta);
    // Lower-bound exponents scale by χ exactly.
    let without = cfg.clone().with_sic(false).with_densities(1e-5, 1e-5);
    let mut with = without.clone().with_sic(true);
    with.sic.kappa = kappa;
    let a = expected_outage_bounds(&without, Network::Manet)?.lower;
    let b = expected_outage_bounds(&with, Network::Manet)?.lower;
    let ratio = b / a;
    Ok((
        (chi - direct).abs() < 1e-14 && chi > 0.0 && chi < 1.0 && (ratio - chi).abs() < 0.02 * chi,
        format!("chi {chi:.7}, small-density lower-bound ratio {ratio:.5}"),
    ))
}

fn bound_order(cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [Network::Cellular, Network::Manet] {
        if effective_density(cfg, n) == 0.0 {
            continue;
        }
        let b = expected_outage_bounds(cfg, n)?;
        ok &= 0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0;
        detail.push(format!("{n} [{:.4e}, {:.4e}]", b.lower, b.upper));
    }
    Ok((ok, detail.join(", ")))
}

fn region_containment(cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let under = cfg.clone().with_mode(SharingMode::Underlay);
    let (mu_o, mu_tilde_o) = overlay_weights(&under);
    let w = tradeoff_weights(&under)?;
    let contained = w.mu >= mu_o && w.mu_tilde >= mu_tilde_o;
    let mut at_star = under.clone();
    at_star.power_ratio = optimal_power_ratio(&under)?;
    let s = tradeoff_weights(&at_star)?;
    let e1 = (s.mu - mu_o).abs() / mu_o;
    let e2 = (s.mu_tilde - mu_tilde_o).abs() / mu_tilde_o;
    Ok((
        contained && e1 < 1e-12 && e2 < 1e-12,
        format!("eta* {:.6}, rel err at eta* {:.1e}/{:.1e}", at_star.power_ratio, e1, e2),
    ))
}

fn degenerate_pair(cfg: &ScenarioConfig<f64>) -> (ScenarioConfig<f64>, ScenarioConfig<f64>) {
    let density = if cfg.cellular_density > 0.0 {
        cfg.cellular_density
    } else {
        1e-4
    };
    let m = cfg.total_subchannels;
    let over = cfg
        .clone()
        .with_mode(SharingMode::Overlay { cellular: m, manet: 0 })
        .with_densities(density, 0.0);
    let under = over.clone().with_mode(SharingMode::Underlay);
    (over, under)
}

fn degenerate_equivalence(cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let (over, under) = degenerate_pair(cfg);
    let a = expected_outage_bounds(&over, Network::Cellular)?;
    let b = expected_outage_bounds(&under, Network::Cellular)?;
    let rel = ((a.lower - b.lower).abs() / a.lower).max((a.upper - b.upper).abs() / a.upper);
    let sa = estimate_outage(&over, Network::Cellular, 5_000, seed)?;
    let sb = estimate_outage(&under, Network::Cellular, 5_000, seed)?;
    Ok((
        rel <= 1e-12 && sa == sb,
        format!(
            "bounds rel diff {rel:.1e}, simulated {} vs {}",
            sa.outage_fraction, sb.outage_fraction
        ),
    ))
}

fn kershaw_diversity(_cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for l in 1..=12u32 {
        for k in 1..=9 {
            let delta = k as f64 / 10.0;
            let exact = diversity_multiplier(l, delta);
            let (lo, hi) = diversity_factor_bounds(l, delta)?;
            worst = worst.min(exact - lo).min(hi - exact);
            if l > 1 {
                // Γ(L)/Γ(L−δ) = Γ(x+1)/Γ(x+s) with x = L − 1, s = 1 − δ.
                let (klo, khi) = kershaw_bounds(l as f64 - 1.0, 1.0 - delta);
                worst = worst.min(exact - klo).min(khi - exact);
            }
        }
    }
    let at = diversity_multiplier(2, 0.5_f64);
    Ok((
        worst >= 0.0 && (at - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-10,
        format!("min margin {worst:.3e}, Gamma(2)/Gamma(1.5) = {at:.8}"),
    ))
}

fn mark_law(_cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let region = Region::centered(100.0)?;
    let lam = 3e-2;
    let mut rng = trial_rng(seed, u64::MAX - 1);
    let (mut cell, mut total) = (0usize, 0usize);
    while total < 20_000 {
        let set = superpose_and_mark(
            lam,
            lam / 3.0,
            PowerMarks {
                cellular: 2.0,
                manet: 1.0,
            },
            region,
            &mut rng,
        )?;
        cell += set.count_of(Network::Cellular);
        total += set.len();
    }
    let p = cell as f64 / total as f64;
    let z = (p - 0.75) / (0.75 * 0.25 / total as f64).sqrt();
    Ok((
        z.abs() < 3.5,
        format!("cellular share {p:.4} over {total} points (z = {z:.2})"),
    ))
}

fn bisection_closed_form(cfg: &ScenarioConfig<f64>, _seed: u64) -> Result<(bool, String)> {
    let mut unit = cfg.clone().with_mode(SharingMode::Overlay {
        cellular: cfg.total_subchannels.max(2) - 1,
        manet: 1,
    });
    unit.total_subchannels = unit.total_subchannels.max(2);
    unit.fading_manet = FadingModel::Unit;
    unit.sic.enabled = false;
    let eps = cfg.target_outage;
    let z = zeta(unit.sir_threshold, unit.delta(), unit.fading_interferer);
    let d = unit.manet_link_distance;
    let exact = -(1.0 - eps).ln() / (z * d * d);
    let r = find_critical_density(&unit, Network::Manet, eps, SearchMode::AnalyticLower, 1e-10)?;
    let rel = (r.density - exact).abs() / exact;
    Ok((
        rel <= 1e-9,
        format!("lambda_eps {:.10e} vs {exact:.10e} (rel {rel:.1e})", r.density),
    ))
}

fn thread_determinism(cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let point = cfg
        .clone()
        .with_densities(cfg.cellular_density.max(1e-4), cfg.manet_density.max(1e-4));
    let a = estimate_outage_with_threads(&point, Network::Cellular, 4_000, seed, 1)?;
    let b = estimate_outage_with_threads(&point, Network::Cellular, 4_000, seed, 4)?;
    Ok((a == b, format!("{} outages with 1 and 4 threads", a.outages)))
}

fn sandwich_at(
    cfg: &ScenarioConfig<f64>,
    network: Network,
    density: f64,
    trials: usize,
    seed: u64,
) -> Result<(bool, f64, String)> {
    let point = cfg.clone().with_densities(density, density);
    let b = expected_outage_bounds(&point, network)?;
    let e = estimate_outage(&point, network, trials, seed)?;
    let inside = e.outage_fraction >= b.lower - e.ci_half_width && e.outage_fraction <= b.upper + e.ci_half_width;
    let detail = format!(
        "{network} at {density:.3e}: {:.4e} in [{:.4e}, {:.4e}] ± {:.1e}",
        e.outage_fraction, b.lower, b.upper, e.ci_half_width
    );
    Ok((inside, e.outage_fraction / b.lower, detail))
}

/// Equal densities at which the expected lower bound of `network` equals `target`.
pub fn density_for_lower_bound(cfg: &ScenarioConfig<f64>, network: Network, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if expected_outage_bounds(&cfg.clone().with_densities(mid, mid), network)?.lower < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn sandwich_at_target(cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [Network::Cellular, Network::Manet] {
        let density = density_for_lower_bound(cfg, n, 1e-2)?;
        let (inside, _, d) = sandwich_at(cfg, n, density, 20_000, seed)?;
        ok &= inside;
        detail.push(d);
    }
    Ok((ok, detail.join("; ")))
}

fn sandwich_ladder(cfg: &ScenarioConfig<f64>, seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [Network::Cellular, Network::Manet] {
        let top = density_for_lower_bound(cfg, n, 4e-2)?;
        let mut last_ratio = f64::NAN;
        for step in 0..4 {
            let density = top * 10f64.powf(-(step as f64) / 3.0);
            let (inside, ratio, _) = sandwich_at(cfg, n, density, 100_000, seed)?;
            ok &= inside;
            last_ratio = ratio;
        }
        ok &= last_ratio <= 1.25;
        detail.push(format!("{n}: sim/lower at smallest density {last_ratio:.3}"));
    }
    Ok((ok, detail.join("; ")))
}
