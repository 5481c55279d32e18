//! Outage-probability bounds: the per-link kernels, the effective interferer
//! densities, the link-distance law of inner-cell users and the expectations of
//! the kernels over the served link.

use crate::analytic::quadrature::AdaptiveQuadrature;
use crate::analytic::special::{exp_integral_e1, gamma_upper_quantile_int, ln_gamma};
use crate::channel::FadingModel;
use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::scenario::{Network, ScenarioConfig, SharingMode};

/// Lower/upper outage bounds of one network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair<F> {
    pub lower: F,
    pub upper: F,
}

impl<F: Real> BoundPair<F> {
    pub fn zero() -> Self {
        Self {
            lower: F::zero(),
            upper: F::zero(),
        }
    }

    pub fn contains(&self, p: F) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// ζ = π θ^δ E[G^δ].
pub fn zeta<F: Real>(theta: F, delta: F, fading_interferer: FadingModel) -> F {
    F::PI() * theta.powf(delta) * fading_interferer.moment(delta)
}

/// Mean number of strong interferers, ζ λ w^{−δ} d².
#[inline]
fn strong_mean<F: Real>(w: F, d: F, density: F, zeta: F, delta: F) -> F {
    zeta * density * w.powf(-delta) * d * d
}

/// Lower bound conditioned on the link: 1 − exp(−ζ λ w^{−δ} d²).
pub fn outage_lower<F: Real>(w: F, d: F, density: F, zeta: F, delta: F) -> F {
    -(-strong_mean(w, d, density, zeta, delta)).exp_m1()
}

/// Chebyshev correction ξ(w, d, λ) for the weak-interferer sum.
pub fn xi<F: Real>(w: F, d: F, density: F, zeta: F, delta: F) -> F {
    xi_of_mean(strong_mean(w, d, density, zeta, delta), delta)
}

#[inline]
fn xi_of_mean<F: Real>(x: F, delta: F) -> F {
    let one = F::one();
    let a = delta / (one - delta) * x;
    if a >= one {
        return F::zero();
    }
    let b = delta / (F::lit(2.0) - delta) * x;
    let gap = one - a;
    (one - b / (gap * gap)).max(F::zero())
}

/// Upper bound conditioned on the link: 1 − ξ exp(−ζ λ w^{−δ} d²).
pub fn outage_upper<F: Real>(w: F, d: F, density: F, zeta: F, delta: F) -> F {
    let x = strong_mean(w, d, density, zeta, delta);
    F::one() - xi_of_mean(x, delta) * (-x).exp()
}

/// Both conditional bounds with the SIC factor χ applied to the strong-interferer
/// exponent only; ξ is unaffected because cancellation never touches weak interferers.
#[derive(Debug, Clone, Copy)]
pub struct BoundKernel<F> {
    pub zeta: F,
    pub delta: F,
    pub chi: F,
}

impl<F: Real> BoundKernel<F> {
    pub fn from_config(cfg: &ScenarioConfig<F>) -> Result<Self> {
        let delta = cfg.delta();
        Ok(Self {
            zeta: zeta(cfg.sir_threshold, delta, cfg.fading_interferer),
            delta,
            chi: sic_chi_for(cfg)?,
        })
    }

    #[inline]
    pub fn lower(&self, w: F, d: F, density: F) -> F {
        let x = strong_mean(w, d, density, self.zeta, self.delta);
        -(-self.chi * x).exp_m1()
    }

    #[inline]
    pub fn upper(&self, w: F, d: F, density: F) -> F {
        let x = strong_mean(w, d, density, self.zeta, self.delta);
        F::one() - xi_of_mean(x, self.delta) * (-self.chi * x).exp()
    }
}

/// Density of the interferer process as seen by `network`, after power weighting.
///
/// Overlay: λ/K and λ̃/K̃. Underlay: (λ + η^{−δ}λ̃)/M and (η^δλ + λ̃)/M.
pub fn effective_density<F: Real>(cfg: &ScenarioConfig<F>, network: Network) -> F {
    let delta = cfg.delta();
    match cfg.mode {
        SharingMode::Overlay { cellular, manet } => {
            let (density, k) = match network {
                Network::Cellular => (cfg.cellular_density, cellular),
                Network::Manet => (cfg.manet_density, manet),
            };
            if density == F::zero() {
                F::zero()
            } else {
                density / F::from_count(k as usize)
            }
        }
        SharingMode::Underlay => {
            let m = F::from_count(cfg.total_subchannels as usize);
            match network {
                Network::Cellular => (cfg.cellular_density + cfg.power_ratio.powf(-delta) * cfg.manet_density) / m,
                Network::Manet => (cfg.power_ratio.powf(delta) * cfg.cellular_density + cfg.manet_density) / m,
            }
        }
    }
}

/// χ = 1 − θ^{−δ}κ^{−δ}, the share of strong interferers left after cancellation.
pub fn sic_chi<F: Real>(theta: F, kappa: F, delta: F) -> Result<F> {
    if !(kappa > F::one()) {
        return Err(invalid(
            "kappa",
            format!("SIC threshold factor must exceed 1, got {kappa}"),
        ));
    }
    if theta < F::one() {
        return Err(invalid("theta", format!("theta must be >= 1, got {theta}")));
    }
    if kappa.is_infinite() {
        return Ok(F::one());
    }
    Ok(F::one() - theta.powf(-delta) * kappa.powf(-delta))
}

/// χ for a scenario; 1 without SIC.
pub fn sic_chi_for<F: Real>(cfg: &ScenarioConfig<F>) -> Result<F> {
    if cfg.sic.enabled {
        sic_chi(cfg.sir_threshold, cfg.sic.kappa, cfg.delta())
    } else {
        Ok(F::one())
    }
}

/// Density of the uplink distance of an inner-cell user:
/// f_D(t) = 8πλ_b t E₁(4πλ_b t²).
pub fn distance_pdf<F: Real>(t: F, base_station_density: F) -> F {
    if !(t > F::zero()) {
        return F::zero();
    }
    let four_pi_lb = F::lit(4.0) * F::PI() * base_station_density;
    let y = four_pi_lb * t * t;
    match exp_integral_e1(y) {
        Ok(e1) => F::lit(2.0) * four_pi_lb * t * e1,
        Err(_) => F::zero(),
    }
}

/// Radius beyond which the inner-disk radius Z (and therefore D ≤ Z) has mass ≤ `tail`.
pub fn distance_tail_cutoff<F: Real>(base_station_density: F, tail: F) -> F {
    let four_pi_lb = F::lit(4.0) * F::PI() * base_station_density;
    ((F::one() / tail).ln() / four_pi_lb).sqrt()
}

/// E[D²] = 1/(8πλ_b).
pub fn distance_second_moment<F: Real>(base_station_density: F) -> F {
    F::one() / (F::lit(8.0) * F::PI() * base_station_density)
}

/// Numerical settings for expectations over the served link.
#[derive(Debug, Clone)]
pub struct ExpectationSettings<F> {
    /// Tolerance and rule for the outermost integral.
    pub quadrature: AdaptiveQuadrature<F>,
    /// Absolute tolerance of nested (inner) integrals.
    pub inner_tolerance: F,
    /// Probability mass discarded when truncating the fading and distance laws.
    pub tail_mass: F,
}

impl<F: Real> Default for ExpectationSettings<F> {
    fn default() -> Self {
        // The integrator accepts panels at rounding level, so these absolute
        // targets need no precision-dependent floor.
        Self {
            quadrature: AdaptiveQuadrature::new(20, F::lit(1e-8)),
            inner_tolerance: F::lit(1e-10),
            tail_mass: F::lit(1e-12),
        }
    }
}

impl<F: Real> ExpectationSettings<F> {
    /// E_W[h(W)] for the served-link law.
    fn over_fading<H: FnMut(F) -> F>(&self, model: FadingModel, quad: &AdaptiveQuadrature<F>, mut h: H) -> Result<F> {
        match model.shape() {
            None => Ok(h(F::one())),
            Some(shape) => {
                let upper = gamma_upper_quantile_int(shape, self.tail_mass);
                let k = F::from_count(shape as usize);
                let log_norm = ln_gamma(k);
                let pdf = move |w: F| {
                    if w > F::zero() {
                        ((k - F::one()) * w.ln() - w - log_norm).exp()
                    } else if shape == 1 {
                        F::one()
                    } else {
                        F::zero()
                    }
                };
                Ok(quad.integrate(F::zero(), upper, |w| pdf(w) * h(w))?.value)
            }
        }
    }

    /// E over the served link of a kernel `g(w, d)`.
    pub fn expect_over_link<G: Fn(F, F) -> F>(&self, cfg: &ScenarioConfig<F>, network: Network, g: G) -> Result<F> {
        let model = cfg.served_fading(network);
        match network {
            Network::Manet => {
                let d = cfg.manet_link_distance;
                self.over_fading(model, &self.quadrature, |w| g(w, d))
            }
            Network::Cellular => {
                let lb = cfg.base_station_density;
                let t_max = distance_tail_cutoff(lb, self.tail_mass);
                let inner = self.quadrature.with_tolerance(self.inner_tolerance);
                let mut failure = None;
                let value = self.quadrature.integrate(F::zero(), t_max, |t| {
                    let density = distance_pdf(t, lb);
                    if density == F::zero() {
                        return F::zero();
                    }
                    match self.over_fading(model, &inner, |w| g(w, t)) {
                        Ok(v) => density * v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            F::nan()
                        }
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                Ok(value?.value)
            }
        }
    }
}

/// Expected outage bounds of `network` with default numerical settings.
pub fn expected_outage_bounds<F: Real>(cfg: &ScenarioConfig<F>, network: Network) -> Result<BoundPair<F>> {
    expected_outage_bounds_with(cfg, network, &ExpectationSettings::default())
}

/// Expected outage bounds: the conditional kernels averaged over the served-link
/// fading and, for the cellular uplink, over the inner-cell distance law.
pub fn expected_outage_bounds_with<F: Real>(
    cfg: &ScenarioConfig<F>,
    network: Network,
    settings: &ExpectationSettings<F>,
) -> Result<BoundPair<F>> {
    cfg.validate()?;
    let density = effective_density(cfg, network);
    if density == F::zero() {
        return Ok(BoundPair::zero());
    }
    let kernel = BoundKernel::from_config(cfg)?;
    let clamp = |p: F| p.max(F::zero()).min(F::one());
    let lower = clamp(settings.expect_over_link(cfg, network, |w, d| kernel.lower(w, d, density))?);
    let upper = clamp(settings.expect_over_link(cfg, network, |w, d| kernel.upper(w, d, density))?);
    Ok(BoundPair {
        lower,
        upper: upper.max(lower),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::db_to_linear;
    use proptest::prelude::*;

    const ZETA_REF: f64 = 4.822_313_501_860_374; // π√3Γ(3/2)

    #[test]
    fn zeta_examples() {
        assert!((zeta(1.0, 0.3, FadingModel::Unit) - std::f64::consts::PI).abs() < 1e-15);
        assert!((zeta(3.0, 0.5, FadingModel::Rayleigh) - ZETA_REF).abs() < 1e-13);
        assert!((zeta(3.0_f32, 0.5, FadingModel::Rayleigh) - ZETA_REF as f32).abs() < 1e-5);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(outage_lower(1.0, 10.0, 0.0, ZETA_REF, 0.5), 0.0);
        let v = outage_lower(1.0, 10.0, 1e-3, ZETA_REF, 0.5);
        assert!((v - 0.382_595_791_337_763).abs() < 1e-12, "{v}");
        // d² law in the exponent
        let e1 = -(1.0 - outage_lower(1.0, 3.0, 1e-3, ZETA_REF, 0.5)).ln();
        let e2 = -(1.0 - outage_lower(1.0, 6.0, 1e-3, ZETA_REF, 0.5)).ln();
        assert!((e2 / e1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi(1.0, 10.0, 0.0, ZETA_REF, 0.5), 1.0);
        // δ/(1−δ)·x = 1 at δ = 1/2, x = 1
        assert_eq!(xi(1.0, 1.0, 1.0, 1.0, 0.5), 0.0);
        // x = 0.2
        assert!((xi(1.0_f64, 1.0, 0.2, 1.0, 0.5) - 0.895_833_333_333_333_3).abs() < 1e-14);
    }

    #[test]
    fn upper_bound_example() {
        // ξ = 0.400398536628127, 1 − ξe^{−x} at x = 0.48223135
        let v = outage_upper(1.0, 10.0, 1e-3, ZETA_REF, 0.5);
        assert!((v - 0.752_792_258_343_593_6).abs() < 1e-12, "{v}");
        assert_eq!(outage_upper(1.0, 10.0, 0.0, ZETA_REF, 0.5), 0.0);
    }

    #[test]
    fn effective_density_examples() {
        let base = ScenarioConfig::<f64>::reference();
        let under = base.clone().with_mode(SharingMode::Underlay).with_densities(1e-3, 0.0);
        assert!((effective_density(&under, Network::Cellular) - 1e-4).abs() < 1e-18);

        let mut eq = base.clone().with_mode(SharingMode::Underlay).with_densities(2e-3, 1e-3);
        eq.power_ratio = 1.0;
        for n in [Network::Cellular, Network::Manet] {
            assert!((effective_density(&eq, n) - 3e-4).abs() < 1e-18);
        }

        let mut five = base.clone().with_mode(SharingMode::Underlay).with_densities(1e-3, 1e-3);
        five.power_ratio = db_to_linear(5.0);
        let v = effective_density(&five, Network::Cellular);
        assert!((v - 1.562_341_325_190_349e-4).abs() < 1e-16, "{v}");

        let over = base.with_densities(1e-3, 2e-3);
        assert!((effective_density(&over, Network::Cellular) - 2e-4).abs() < 1e-18);
        assert!((effective_density(&over, Network::Manet) - 4e-4).abs() < 1e-18);
    }

    #[test]
    fn chi_examples() {
        let chi = sic_chi(3.0, 10f64.powf(0.2), 0.5).unwrap();
        assert!((chi - 0.541_394_379_857_016).abs() < 1e-12, "{chi}");
        assert_eq!(sic_chi(3.0, f64::INFINITY, 0.5).unwrap(), 1.0);
        assert!(sic_chi(3.0, 1e12, 0.5).unwrap() > 1.0 - 1e-6);
        assert!(sic_chi(3.0, 1.0, 0.5).is_err());
        let cfg = ScenarioConfig::<f64>::reference();
        assert_eq!(sic_chi_for(&cfg).unwrap(), 1.0);
        assert!((sic_chi_for(&cfg.with_sic(true)).unwrap() - chi).abs() < 1e-15);
    }

    #[test]
    fn distance_pdf_edges() {
        assert_eq!(distance_pdf(0.0, 1e-3), 0.0);
        assert!(distance_pdf(1e-9, 1e-3) < 1e-8);
        assert!(distance_pdf(1e4, 1e-3) == 0.0);
        assert!((distance_second_moment(1e-3_f64) - 39.788_735_772_973_83).abs() < 1e-11);
    }

    #[test]
    fn manet_unit_fading_needs_no_integration() {
        let mut cfg = ScenarioConfig::<f64>::reference().with_densities(0.0, 2e-3);
        cfg.fading_manet = FadingModel::Unit;
        let b = expected_outage_bounds(&cfg, Network::Manet).unwrap();
        let z = zeta(3.0, 0.5, FadingModel::Rayleigh);
        assert_eq!(b.lower, outage_lower(1.0, 5.0, 2e-3 / 5.0, z, 0.5));
        assert_eq!(b.upper, outage_upper(1.0, 5.0, 2e-3 / 5.0, z, 0.5));
    }

    #[test]
    fn zero_density_bounds() {
        let cfg = ScenarioConfig::<f64>::reference().with_densities(0.0, 0.0);
        assert_eq!(
            expected_outage_bounds(&cfg, Network::Cellular).unwrap(),
            BoundPair::zero()
        );
        assert_eq!(expected_outage_bounds(&cfg, Network::Manet).unwrap(), BoundPair::zero());
    }

    #[test]
    fn single_precision_bounds_track_double() {
        let c64 = ScenarioConfig::<f64>::reference().with_densities(5e-5, 5e-5);
        let c32 = ScenarioConfig::<f32>::reference().with_densities(5e-5, 5e-5);
        for n in [Network::Cellular, Network::Manet] {
            let a = expected_outage_bounds(&c64, n).unwrap();
            let b = expected_outage_bounds(&c32, n).unwrap();
            assert!(((b.lower as f64) - a.lower).abs() / a.lower < 1e-3);
            assert!(((b.upper as f64) - a.upper).abs() / a.upper < 1e-3);
        }
    }

    proptest! {
        #[test]
        fn bounds_are_ordered_and_monotone(
            w in 0.01f64..10.0, d in 0.5f64..50.0, density in 0.0f64..1e-2,
            theta in 1.0f64..20.0, alpha in 2.1f64..6.0,
        ) {
            let delta = 2.0 / alpha;
            let z = zeta(theta, delta, FadingModel::Rayleigh);
            let lo = outage_lower(w, d, density, z, delta);
            let hi = outage_upper(w, d, density, z, delta);
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!(lo <= hi && hi <= 1.0);
            let k = xi(w, d, density, z, delta);
            prop_assert!((0.0..=1.0).contains(&k));
            if density > 0.0 && lo < 0.99 {
                prop_assert!(outage_lower(w, d * 1.1, density, z, delta) > lo);
                prop_assert!(outage_lower(w * 1.1, d, density, z, delta) < lo);
                prop_assert!(outage_lower(w, d, density * 1.1, z, delta) > lo);
                let z2 = zeta(theta * 1.1, delta, FadingModel::Rayleigh);
                prop_assert!(outage_lower(w, d, density, z2, delta) > lo);
            }
            if density > 0.0 && hi < 0.99 {
                prop_assert!(outage_upper(w, d * 1.1, density, z, delta) >= hi);
                prop_assert!(outage_upper(w * 1.1, d, density, z, delta) <= hi);
            }
        }

        #[test]
        fn underlay_without_manet_matches_full_band_overlay(
            lambda in 1e-6f64..1e-3, m in 1u32..20, eta_db in -10.0f64..10.0,
        ) {
            let mut under = ScenarioConfig::<f64>::reference()
                .with_mode(SharingMode::Underlay)
                .with_densities(lambda, 0.0);
            under.total_subchannels = m;
            under.power_ratio = db_to_linear(eta_db);
            let mut over = under.clone().with_mode(SharingMode::Overlay { cellular: m, manet: 0 });
            over.total_subchannels = m;
            let a = effective_density(&under, Network::Cellular) * m as f64;
            let b = effective_density(&over, Network::Cellular) * m as f64;
            prop_assert_eq!(a, b);
        }
    }
}
