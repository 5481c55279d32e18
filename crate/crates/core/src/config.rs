//! Scenario files: dotted-key TOML in, canonical text and digest out.
//!
//! ```toml
//! mode = "underlay"
//! subchannels.total = 10
//! density.cellular = 1e-4
//! sir.threshold_db = 4.77
//! sic.enabled = true
//! sic.kappa_db = 2.0
//! ```
//!
//! Keys left out keep the reference scenario's value. Quantities quoted in
//! both forms accept either a linear key (`sir.threshold`) or a decibel key
//! (`sir.threshold_db`), never both; decibels are converted once, here.

use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::channel::FadingModel;
use crate::error::{Error, Result};
use crate::scalar::db_to_linear;
use crate::scenario::{LinkPlacement, ScenarioConfig, SharingMode};

/// Reads and validates a scenario from TOML text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig<f64>> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    let mut flat = Vec::new();
    flatten("", &table, &mut flat)?;
    let mut reader = Reader { entries: flat };
    let cfg = reader.build()?;
    if let Some((key, _)) = reader.entries.first() {
        return Err(Error::Config(format!("unknown key `{key}`")));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a scenario file.
pub fn load_config(path: &std::path::Path) -> Result<ScenarioConfig<f64>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn flatten(prefix: &str, table: &Table, out: &mut Vec<(String, Value)>) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out)?,
            Value::Array(_) | Value::Datetime(_) => {
                return Err(Error::Config(format!("`{key}` must be a scalar")));
            }
            other => out.push((key, other.clone())),
        }
    }
    Ok(())
}

struct Reader {
    entries: Vec<(String, Value)>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<Value> {
        let i = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(i).1)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(x)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(_) => Err(Error::Config(format!("`{key}` must be a number"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<u32>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => u32::try_from(i)
                .map(Some)
                .map_err(|_| Error::Config(format!("`{key}` must be a non-negative integer"))),
            Some(_) => Err(Error::Config(format!("`{key}` must be an integer"))),
        }
    }

    fn text(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(Error::Config(format!("`{key}` must be a string"))),
        }
    }

    fn flag(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(_) => Err(Error::Config(format!("`{key}` must be true or false"))),
        }
    }

    /// A quantity given either linearly under `key` or in dB under `key_db`.
    fn linear_or_db(&mut self, key: &str) -> Result<Option<f64>> {
        let db_key = format!("{key}_db");
        match (self.number(key)?, self.number(&db_key)?) {
            (Some(_), Some(_)) => Err(Error::Config(format!("give either `{key}` or `{db_key}`, not both"))),
            (Some(x), None) => Ok(Some(x)),
            (None, Some(db)) => Ok(Some(db_to_linear(db))),
            (None, None) => Ok(None),
        }
    }

    fn build(&mut self) -> Result<ScenarioConfig<f64>> {
        let mut cfg = ScenarioConfig::<f64>::reference();
        if let Some(m) = self.count("subchannels.total")? {
            cfg.total_subchannels = m;
        }
        let k = self.count("subchannels.cellular")?;
        let k_manet = self.count("subchannels.manet")?;
        let mode = self.text("mode")?;
        cfg.mode = match mode.as_deref() {
            None | Some("overlay") => {
                let (k, k_manet) = match (k, k_manet) {
                    (Some(a), Some(b)) => (a, b),
                    (Some(a), None) => (a, cfg.total_subchannels.saturating_sub(a)),
                    (None, Some(b)) => (cfg.total_subchannels.saturating_sub(b), b),
                    (None, None) => {
                        let half = cfg.total_subchannels / 2;
                        (cfg.total_subchannels - half, half)
                    }
                };
                SharingMode::Overlay {
                    cellular: k,
                    manet: k_manet,
                }
            }
            Some("underlay") => {
                if k.is_some() || k_manet.is_some() {
                    return Err(Error::Config(
                        "underlay uses all sub-channels; drop `subchannels.cellular`/`subchannels.manet`".into(),
                    ));
                }
                SharingMode::Underlay
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "`mode` must be \"overlay\" or \"underlay\", got \"{other}\""
                )))
            }
        };
        if let Some(x) = self.number("density.cellular")? {
            cfg.cellular_density = x;
        }
        if let Some(x) = self.number("density.manet")? {
            cfg.manet_density = x;
        }
        if let Some(x) = self.number("density.base_station")? {
            cfg.base_station_density = x;
        }
        if let Some(x) = self.linear_or_db("sir.threshold")? {
            cfg.sir_threshold = x;
        }
        if let Some(x) = self.number("pathloss.alpha")? {
            cfg.path_loss_exponent = x;
        }
        if let Some(x) = self.linear_or_db("power.ratio")? {
            cfg.power_ratio = x;
        }
        if let Some(x) = self.number("manet.link_distance")? {
            cfg.manet_link_distance = x;
        }
        if let Some(b) = self.flag("sic.enabled")? {
            cfg.sic.enabled = b;
        }
        if let Some(x) = self.linear_or_db("sic.kappa")? {
            cfg.sic.kappa = x;
        }
        for (key, slot) in [
            ("fading.cellular", &mut cfg.fading_cellular),
            ("fading.manet", &mut cfg.fading_manet),
            ("fading.interferer", &mut cfg.fading_interferer),
        ] {
            if let Some(token) = self.text(key)? {
                *slot = FadingModel::parse_token(&token).map_err(|e| Error::Config(format!("`{key}`: {e}")))?;
            }
        }
        if let Some(x) = self.number("target.epsilon")? {
            cfg.target_outage = x;
        }
        if let Some(x) = self.number("simulation.window_mean_count")? {
            cfg.window_mean_count = x;
        }
        if let Some(p) = self.text("simulation.placement")? {
            cfg.placement = match p.as_str() {
                "exact" => LinkPlacement::Exact,
                "geometry" => LinkPlacement::Geometry,
                other => {
                    return Err(Error::Config(format!(
                        "`simulation.placement` must be \"exact\" or \"geometry\", got \"{other}\""
                    )))
                }
            };
        }
        Ok(cfg)
    }
}

/// Canonical text of a resolved scenario: one `key = value` line per field,
/// sorted by key, linear units only, floats printed with round-trip precision.
/// Parsing it back yields the same scenario.
pub fn canonical_config(cfg: &ScenarioConfig<f64>) -> String {
    let f = |x: f64| format!("{x:?}");
    let s = |t: &str| format!("\"{t}\"");
    let mut lines = vec![
        ("density.base_station", f(cfg.base_station_density)),
        ("density.cellular", f(cfg.cellular_density)),
        ("density.manet", f(cfg.manet_density)),
        ("fading.cellular", s(&cfg.fading_cellular.to_token())),
        ("fading.interferer", s(&cfg.fading_interferer.to_token())),
        ("fading.manet", s(&cfg.fading_manet.to_token())),
        ("manet.link_distance", f(cfg.manet_link_distance)),
        ("pathloss.alpha", f(cfg.path_loss_exponent)),
        ("power.ratio", f(cfg.power_ratio)),
        ("sic.enabled", cfg.sic.enabled.to_string()),
        ("sic.kappa", f(cfg.sic.kappa)),
        (
            "simulation.placement",
            s(match cfg.placement {
                LinkPlacement::Exact => "exact",
                LinkPlacement::Geometry => "geometry",
            }),
        ),
        ("simulation.window_mean_count", f(cfg.window_mean_count)),
        ("sir.threshold", f(cfg.sir_threshold)),
        ("subchannels.total", cfg.total_subchannels.to_string()),
        ("target.epsilon", f(cfg.target_outage)),
    ];
    match cfg.mode {
        SharingMode::Overlay { cellular, manet } => {
            lines.push(("mode", s("overlay")));
            lines.push(("subchannels.cellular", cellular.to_string()));
            lines.push(("subchannels.manet", manet.to_string()));
        }
        SharingMode::Underlay => lines.push(("mode", s("underlay"))),
    }
    lines.sort_by(|a, b| a.0.cmp(b.0));
    lines.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// SHA-256 of the canonical text, hex encoded.
pub fn config_digest(cfg: &ScenarioConfig<f64>) -> String {
    hex::encode(Sha256::digest(canonical_config(cfg).as_bytes()))
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub command: String,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(cfg: &ScenarioConfig<f64>, command: impl Into<String>, seed: u64) -> Self {
        Self {
            config_digest: config_digest(cfg),
            command: command.into(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// Comment line heading each CSV. The timestamp is left out so reruns stay
    /// byte-identical.
    pub fn csv_comment(&self) -> String {
        format!(
            "# specshare {} | command: {} | seed: {} | config: sha256:{}",
            self.tool_version, self.command, self.seed, self.config_digest
        )
    }
}
