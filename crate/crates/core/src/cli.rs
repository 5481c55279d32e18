//! Command-line front end: argument parsing, command dispatch and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytic::{
    capacity_line, expected_outage_bounds, optimal_power_ratio, outage_limited, sic_chi_for, tradeoff_weights, zeta,
};
use crate::config::{canonical_config, load_config, RunManifest};
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_outage, find_critical_density_for, tradeoff_curve, SearchMode, SimulatedSearch, CURVE_TOLERANCE,
};
use crate::scenario::{Network, ScenarioConfig, SharingMode};
use crate::validate::{run_suite, Suite};

/// Exit status for an invalid configuration or argument value.
pub const EXIT_INVALID_CONFIG: i32 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "specshare",
    version,
    about = "Outage and transmission-capacity tools for cellular/ad hoc spectrum sharing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NetworkArg {
    Cell,
    Manet,
}

impl From<NetworkArg> for Network {
    fn from(n: NetworkArg) -> Self {
        match n {
            NetworkArg::Cell => Network::Cellular,
            NetworkArg::Manet => Network::Manet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveModeArg {
    Analytic,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Fast,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds and simulated outage over a list of densities.
    Outage {
        /// Scenario file; the reference scenario when omitted.
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        network: NetworkArg,
        /// Comma-separated densities of the chosen network (m⁻²).
        #[arg(long, value_delimiter = ',', required = true)]
        densities: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Set both networks' densities to each listed value.
        #[arg(long)]
        equal_densities: bool,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacity trade-off: the asymptotic lines or simulated points.
    Tradeoff {
        /// Scenario file; the reference scenario when omitted.
        config: Option<PathBuf>,
        /// Outage target; the scenario's `target.epsilon` when omitted.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "analytic")]
        mode: CurveModeArg,
        /// Ad hoc densities: `a,b,c` or `start:stop:count`.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite.
    Validate {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Scenario file; the reference scenario when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Trade-off weights, SIC factor, optimal power ratio and intercepts.
    Weights {
        /// Scenario file; the reference scenario when omitted.
        config: Option<PathBuf>,
        /// Also write the block as two-column CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the resolved scenario in canonical form.
    Config {
        /// Scenario file; the reference scenario when omitted.
        config: Option<PathBuf>,
    },
}

/// Parses `std::env::args` and runs; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_CONFIG } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } => EXIT_INVALID_CONFIG,
        Error::Numerical { .. } | Error::NoSolution(_) | Error::Domain(_) | Error::Singularity => EXIT_NUMERICAL,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn scenario(path: Option<&Path>) -> Result<ScenarioConfig<f64>> {
    match path {
        Some(p) => load_config(p),
        None => Ok(ScenarioConfig::reference()),
    }
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Outage {
            config,
            network,
            densities,
            trials,
            seed,
            equal_densities,
            out,
        } => {
            let cfg = scenario(config.as_deref())?;
            let command = format!(
                "outage --network {} --densities {} --trials {trials}{}",
                network
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default(),
                densities.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
                if equal_densities { " --equal-densities" } else { "" },
            );
            let manifest = RunManifest::new(&cfg, command, seed);
            let rows = cmd_outage(&cfg, network.into(), &densities, trials, seed, equal_densities)?;
            emit(out.as_deref(), &manifest, &rows)?;
            Ok(0)
        }
        Command::Tradeoff {
            config,
            epsilon,
            mode,
            sweep,
            trials,
            seed,
            out,
        } => {
            let cfg = scenario(config.as_deref())?;
            let epsilon = epsilon.unwrap_or(cfg.target_outage);
            let sweep = sweep.as_deref().map(parse_sweep).transpose()?;
            let command = format!(
                "tradeoff --epsilon {epsilon} --mode {}{} --trials {trials}",
                mode.to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default(),
                sweep
                    .as_ref()
                    .map(|s| format!(
                        " --sweep {}",
                        s.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
                    ))
                    .unwrap_or_default(),
            );
            let manifest = RunManifest::new(&cfg, command, seed);
            let rows = cmd_tradeoff(&cfg, epsilon, mode, sweep.as_deref(), trials, seed)?;
            emit(out.as_deref(), &manifest, &rows)?;
            Ok(0)
        }
        Command::Validate { suite, seed, config } => {
            let cfg = scenario(config.as_deref())?;
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
            };
            let outcomes = run_suite(&cfg, suite, seed);
            let mut failed = 0;
            for o in &outcomes {
                println!("{} {:<34} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            println!("{} checks, {failed} failed", outcomes.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Weights { config, out } => {
            let cfg = scenario(config.as_deref())?;
            let block = cmd_weights(&cfg)?;
            for (k, v) in &block {
                println!("{k} = {v}");
            }
            if let Some(path) = out {
                let manifest = RunManifest::new(&cfg, "weights", 0);
                let rows = Table {
                    header: vec!["key", "value"],
                    rows: block.into_iter().map(|(k, v)| vec![k, v]).collect(),
                };
                emit(Some(&path), &manifest, &rows)?;
            }
            Ok(0)
        }
        Command::Config { config } => {
            let cfg = scenario(config.as_deref())?;
            print!("{}", canonical_config(&cfg));
            Ok(0)
        }
    }
}

/// CSV body: header plus rows of already formatted fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Writes the manifest comment, then the table. With a destination file, the
/// full manifest goes to `<file>.manifest.json`.
fn emit(out: Option<&Path>, manifest: &RunManifest, table: &Table) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", manifest.csv_comment())?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    match out {
        Some(path) => {
            std::fs::write(path, &buf)?;
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".manifest.json");
            let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(PathBuf::from(sidecar), json + "\n")?;
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn sharing_label(cfg: &ScenarioConfig<f64>) -> &'static str {
    match cfg.mode {
        SharingMode::Overlay { .. } => "overlay",
        SharingMode::Underlay => "underlay",
    }
}

/// Rows of the `outage` command.
pub fn cmd_outage(
    cfg: &ScenarioConfig<f64>,
    network: Network,
    densities: &[f64],
    trials: usize,
    seed: u64,
    equal_densities: bool,
) -> Result<Table> {
    if trials == 0 {
        return Err(crate::error::invalid("trials", "must be positive"));
    }
    let mut rows = Vec::with_capacity(densities.len());
    for &density in densities {
        let point = if equal_densities {
            cfg.clone().with_densities(density, density)
        } else {
            cfg.clone().with_density(network, density)
        };
        point.validate()?;
        let bounds = expected_outage_bounds(&point, network)?;
        let sim = estimate_outage(&point, network, trials, seed)?;
        rows.push(vec![
            density.to_string(),
            bounds.lower.to_string(),
            bounds.upper.to_string(),
            sim.outage_fraction.to_string(),
            sim.ci_half_width.to_string(),
            sim.trials.to_string(),
            sharing_label(cfg).to_string(),
            cfg.sic.enabled.to_string(),
        ]);
    }
    Ok(Table {
        header: vec![
            "density",
            "pout_lb",
            "pout_ub",
            "pout_sim",
            "ci_half_width",
            "trials",
            "mode",
            "sic",
        ],
        rows,
    })
}

/// `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("sweep `{spec}`: {why}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range form is start:stop:count"));
        }
        let (a, b) = (number(parts[0])?, number(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad("count must be an integer"))?;
        match n {
            0 => return Err(bad("count must be positive")),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(bad("densities must be finite and >= 0"));
    }
    Ok(values)
}

/// Rows of the `tradeoff` command.
pub fn cmd_tradeoff(
    cfg: &ScenarioConfig<f64>,
    epsilon: f64,
    mode: CurveModeArg,
    sweep: Option<&[f64]>,
    trials: usize,
    seed: u64,
) -> Result<Table> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(crate::error::invalid(
            "epsilon",
            format!("must lie in (0, 1), got {epsilon}"),
        ));
    }
    let cfg = ScenarioConfig {
        target_outage: epsilon,
        ..cfg.clone()
    };
    let header = vec!["c_cell", "c_manet", "source", "binding"];
    let mut rows = Vec::new();
    match mode {
        CurveModeArg::Analytic => {
            let line = capacity_line(&cfg)?;
            let binding = outage_limited(&cfg).as_str();
            for (source, phi) in [
                ("line_phi_low", line.weights.phi_low),
                ("line_phi_high", line.weights.phi_high),
            ] {
                let (_, manet_intercept) = line.intercepts(phi);
                let c_manet: Vec<f64> = match sweep {
                    Some(s) => s
                        .iter()
                        .map(|d| (1.0 - epsilon) * d)
                        .filter(|c| *c <= manet_intercept)
                        .collect(),
                    None => (0..=10).map(|i| manet_intercept * i as f64 / 10.0).collect(),
                };
                for c in c_manet {
                    rows.push(vec![
                        line.cellular_at(c, phi).max(0.0).to_string(),
                        c.to_string(),
                        source.to_string(),
                        binding.to_string(),
                    ]);
                }
            }
        }
        CurveModeArg::Simulated => {
            let search = SearchMode::Simulated(SimulatedSearch::new(trials, seed));
            let sweep = match sweep {
                Some(s) => s.to_vec(),
                None => default_sweep(&cfg, epsilon)?,
            };
            let curve = tradeoff_curve(&cfg, epsilon, &sweep, search)?;
            for o in &curve.omitted {
                eprintln!("omitted ad hoc density {}: {}", o.manet_density, o.reason);
            }
            for p in curve.points {
                rows.push(vec![
                    p.c_cell.to_string(),
                    p.c_manet.to_string(),
                    "simulated".to_string(),
                    p.binding.as_str().to_string(),
                ]);
            }
        }
    }
    Ok(Table { header, rows })
}

/// Five ad hoc densities from 0 to 80% of the analytic ad hoc-only capacity.
fn default_sweep(cfg: &ScenarioConfig<f64>, epsilon: f64) -> Result<Vec<f64>> {
    if !matches!(cfg.mode, SharingMode::Underlay) {
        return Ok(Vec::new());
    }
    let alone = find_critical_density_for(
        &cfg.clone().with_densities(0.0, 0.0),
        Network::Manet,
        Network::Manet,
        epsilon,
        SearchMode::AnalyticLower,
        CURVE_TOLERANCE,
    )?;
    Ok((0..5).map(|i| alone.density * 0.2 * i as f64).collect())
}

/// Key-value block of the `weights` command.
pub fn cmd_weights(cfg: &ScenarioConfig<f64>) -> Result<Vec<(String, String)>> {
    let w = tradeoff_weights(cfg)?;
    let line = capacity_line(cfg)?;
    let mut block = vec![
        ("mode".to_string(), sharing_label(cfg).to_string()),
        ("delta".to_string(), cfg.delta().to_string()),
        (
            "zeta".to_string(),
            zeta(cfg.sir_threshold, cfg.delta(), cfg.fading_interferer).to_string(),
        ),
        ("mu".to_string(), w.mu.to_string()),
        ("mu_tilde".to_string(), w.mu_tilde.to_string()),
        ("phi_low".to_string(), w.phi_low.to_string()),
        ("phi_high".to_string(), w.phi_high.to_string()),
        ("eta".to_string(), cfg.power_ratio.to_string()),
        ("eta_star".to_string(), optimal_power_ratio(cfg)?.to_string()),
        ("outage_limited".to_string(), outage_limited(cfg).as_str().to_string()),
    ];
    if cfg.sic.enabled {
        block.push(("chi".to_string(), sic_chi_for(cfg)?.to_string()));
    }
    for (label, phi) in [("phi_low", w.phi_low), ("phi_high", w.phi_high)] {
        let (c, c_manet) = line.intercepts(phi);
        block.push((format!("intercept_cell_{label}"), c.to_string()));
        block.push((format!("intercept_manet_{label}"), c_manet.to_string()));
    }
    Ok(block)
}
