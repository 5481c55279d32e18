//! Fading, path loss, SIR evaluation and the SIC interferer filter.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::analytic::special::gamma_ratio;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Channel power-gain law.
///
/// `Diversity(L)` is a gamma law with integer shape `L` and unit scale, i.e. the
/// combined gain of `L` unit-mean Rayleigh branches. `Rayleigh` is the `L = 1` case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FadingModel {
    Unit,
    Rayleigh,
    Diversity(u32),
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            FadingModel::Diversity(0) => Err(invalid("fading order", "diversity order must be >= 1")),
            _ => Ok(()),
        }
    }

    /// Gamma shape of the law; `None` for the deterministic unit gain.
    pub fn shape(&self) -> Option<u32> {
        match *self {
            FadingModel::Unit => None,
            FadingModel::Rayleigh => Some(1),
            FadingModel::Diversity(l) => Some(l),
        }
    }

    /// E[G^p] = Γ(L + p)/Γ(L). Infinite when `p ≤ −L`.
    pub fn moment<F: Real>(&self, p: F) -> F {
        match self.shape() {
            None => F::one(),
            Some(l) => {
                let shape = F::from_count(l as usize);
                if shape + p <= F::zero() {
                    F::infinity()
                } else {
                    gamma_ratio(shape + p, shape)
                }
            }
        }
    }

    /// Canonical text form used by configuration files: `unit`, `rayleigh`, `diversity:L`.
    pub fn to_token(&self) -> String {
        match self {
            FadingModel::Unit => "unit".into(),
            FadingModel::Rayleigh => "rayleigh".into(),
            FadingModel::Diversity(l) => format!("diversity:{l}"),
        }
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let model = match s.as_str() {
            "unit" | "none" => FadingModel::Unit,
            "rayleigh" => FadingModel::Rayleigh,
            other => {
                let order = other
                    .strip_prefix("diversity:")
                    .and_then(|l| l.trim().parse::<u32>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown fading model `{s}`")))?;
                FadingModel::Diversity(order)
            }
        };
        model.validate()?;
        Ok(model)
    }
}

/// Draws one channel power gain.
pub fn draw_fade<R: Rng + ?Sized>(model: FadingModel, rng: &mut R) -> f64 {
    match model {
        FadingModel::Unit => 1.0,
        FadingModel::Rayleigh => positive(|| Exp1.sample(rng)),
        FadingModel::Diversity(1) => positive(|| Exp1.sample(rng)),
        FadingModel::Diversity(l) => {
            let law = Gamma::new(l as f64, 1.0).expect("integer shape >= 1 is valid");
            positive(|| law.sample(rng))
        }
    }
}

// Gains must be strictly positive; an exact zero has probability zero but the
// generators can emit it.
fn positive(mut draw: impl FnMut() -> f64) -> f64 {
    loop {
        let g = draw();
        if g > 0.0 {
            return g;
        }
    }
}

/// Desired link of the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample<F> {
    pub signal_fade: F,
    pub tx_rx_distance: F,
    pub tx_power: F,
}

impl<F: Real> LinkSample<F> {
    pub fn received_power(&self, alpha: F) -> Result<F> {
        received_power(self.tx_power, self.signal_fade, self.tx_rx_distance, alpha)
    }
}

/// One interferer as seen from the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer<F> {
    pub power: F,
    pub fade: F,
    pub distance: F,
}

impl<F: Real> Interferer<F> {
    pub fn received_power(&self, alpha: F) -> Result<F> {
        received_power(self.power, self.fade, self.distance, alpha)
    }
}

/// SIC receiver setting: interferers received above `kappa` times the signal are removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SicConfig<F> {
    pub enabled: bool,
    pub kappa: F,
}

impl<F: Real> SicConfig<F> {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            kappa: F::infinity(),
        }
    }

    pub fn enabled(kappa: F) -> Result<Self> {
        let sic = Self { enabled: true, kappa };
        sic.validate()?;
        Ok(sic)
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled && !(self.kappa > F::one()) {
            return Err(invalid(
                "kappa",
                format!("SIC threshold factor must exceed 1, got {}", self.kappa),
            ));
        }
        Ok(())
    }
}

/// Far-field received power `power·fade·distance^{−α}`.
#[inline]
pub fn received_power<F: Real>(power: F, fade: F, distance: F, alpha: F) -> Result<F> {
    if distance == F::zero() {
        return Err(Error::Singularity);
    }
    Ok(power * fade * distance.powf(-alpha))
}

/// Signal-to-interference ratio; `+∞` with no interferers.
pub fn compute_sir<F: Real>(link: &LinkSample<F>, interferers: &[Interferer<F>], alpha: F) -> Result<F> {
    let signal = link.received_power(alpha)?;
    let mut total = F::zero();
    for x in interferers {
        total = total + x.received_power(alpha)?;
    }
    Ok(signal_over(signal, total))
}

#[inline]
pub(crate) fn signal_over<F: Real>(signal: F, interference: F) -> F {
    if interference > F::zero() {
        signal / interference
    } else {
        F::infinity()
    }
}

/// Interferers that survive cancellation: received power `≤ κ·signal`.
pub fn apply_sic<F: Real>(
    link: &LinkSample<F>,
    interferers: &[Interferer<F>],
    sic: &SicConfig<F>,
    alpha: F,
) -> Result<Vec<Interferer<F>>> {
    sic.validate()?;
    if !sic.enabled {
        return Ok(interferers.to_vec());
    }
    let limit = sic.kappa * link.received_power(alpha)?;
    let mut kept = Vec::with_capacity(interferers.len());
    for x in interferers {
        if x.received_power(alpha)? <= limit {
            kept.push(*x);
        }
    }
    Ok(kept)
}
