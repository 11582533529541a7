//! Configuration files, command dispatch and CSV output.
//!
//! Configs are flat `key = value` documents (full-line `#` comments, blank
//! lines ignored, later assignments win). Every CSV starts with `#`-prefixed
//! metadata — tool version, command, and the full resolved configuration in
//! a fixed key order — so any output file is self-describing and can be
//! parsed back into the exact configuration that produced it. Numbers are
//! printed in Rust's shortest round-trip form; outputs are byte-identical
//! across runs.

use crate::interferometer::{self, linspace, InterferometerConfig, ModelError};
use crate::wigner::{self, Scenario, WignerError, WignerGrid};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{location}: unknown key '{key}'")]
    UnknownKey { location: String, key: String },
    #[error("{location}: expected 'key = value', got '{line}'")]
    Malformed { location: String, line: String },
    #[error("{location}: bad value for '{key}': {reason}")]
    BadValue {
        location: String,
        key: String,
        reason: String,
    },
    #[error("config conflict: {0}")]
    Conflict(String),
    #[error("cannot read config file '{path}': {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown command '{0}'; expected snl, sweep, threshold, qmap, wigner or calibrate")]
    UnknownCommand(String),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Wigner(#[from] WignerError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for numeric
    /// failures inside the model, 1 for output I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) | CliError::Wigner(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Snl,
    Sweep,
    Threshold,
    Qmap,
    Wigner,
    Calibrate,
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "snl" => Ok(Self::Snl),
            "sweep" => Ok(Self::Sweep),
            "threshold" => Ok(Self::Threshold),
            "qmap" => Ok(Self::Qmap),
            "wigner" => Ok(Self::Wigner),
            "calibrate" => Ok(Self::Calibrate),
            other => Err(ConfigError::UnknownCommand(other.to_string())),
        }
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Snl => "snl",
            Self::Sweep => "sweep",
            Self::Threshold => "threshold",
            Self::Qmap => "qmap",
            Self::Wigner => "wigner",
            Self::Calibrate => "calibrate",
        })
    }
}

/// Full run configuration: the physical model plus sweep, map, Wigner-grid
/// and calibration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: InterferometerConfig,
    /// Phase range and resolution of `sweep`.
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
    /// Detection-transmission axis of `qmap`.
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_points: usize,
    /// Amplifier-gain axis of `qmap`.
    pub g2_min: f64,
    pub g2_max: f64,
    pub g2_points: usize,
    /// Input squeezing (variance dB) defining the ideal advantage in `qmap`.
    pub squeezing_db: f64,
    /// Wigner-command scenario and its parameters.
    pub scenario: Scenario,
    pub alpha: f64,
    pub sv_db: f64,
    pub dopa_db: f64,
    pub n_phases: usize,
    /// Phase-space window and resolution of `wigner`.
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    /// `calibrate` input as (pump_power, mean_photons) pairs.
    pub calib_samples: Vec<(f64, f64)>,
    /// Output path; commands fall back to `<command>.csv`.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: InterferometerConfig::default(),
            phi_min: -PI,
            phi_max: PI,
            n_points: 1001,
            eta_min: 0.01,
            eta_max: 1.0,
            eta_points: 100,
            g2_min: 0.0,
            g2_max: 5.0,
            g2_points: 101,
            squeezing_db: 15.0,
            scenario: Scenario::SqueezedAmplified,
            alpha: 3.0,
            sv_db: 6.0,
            dopa_db: 9.6,
            // Wide enough that the amplified bright-fringe state (mean
            // quadrature ≈ 9, σ ≈ 3 at the defaults) stays inside the window.
            n_phases: 5,
            grid_min: -20.0,
            grid_max: 20.0,
            grid_points: 201,
            calib_samples: [0.5, 1.0, 2.0, 4.0]
                .iter()
                .map(|&p| (p, (2.0 * f64::sqrt(p)).sinh().powi(2)))
                .collect(),
            out: None,
        }
    }
}

fn parse_f64(location: &str, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        location: location.to_string(),
        key: key.to_string(),
        reason: format!("'{value}' is not a number"),
    })
}

fn parse_usize(location: &str, key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        location: location.to_string(),
        key: key.to_string(),
        reason: format!("'{value}' is not a non-negative integer"),
    })
}

fn parse_bool(location: &str, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue {
            location: location.to_string(),
            key: key.to_string(),
            reason: format!("'{value}' is not 'true' or 'false'"),
        }),
    }
}

/// Calibration samples are written `power:photons,power:photons,...`.
fn parse_samples(location: &str, key: &str, value: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    value
        .split(',')
        .map(|pair| {
            let (p, n) = pair.split_once(':').ok_or_else(|| ConfigError::BadValue {
                location: location.to_string(),
                key: key.to_string(),
                reason: format!("'{pair}' is not 'power:photons'"),
            })?;
            Ok((
                parse_f64(location, key, p.trim())?,
                parse_f64(location, key, n.trim())?,
            ))
        })
        .collect()
}

fn format_samples(samples: &[(f64, f64)]) -> String {
    samples
        .iter()
        .map(|(p, n)| format!("{p}:{n}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn bad_range(location: &str, key: &str, rule: &str) -> ConfigError {
    ConfigError::BadValue {
        location: location.to_string(),
        key: key.to_string(),
        reason: format!("must satisfy: {rule}"),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment, validating the value's range.
    pub fn set(&mut self, key: &str, value: &str, location: &str) -> Result<(), ConfigError> {
        macro_rules! num {
            ($field:expr, $rule:literal, $ok:expr) => {{
                let v = parse_f64(location, key, value)?;
                if !v.is_finite() || !$ok(v) {
                    return Err(bad_range(location, key, $rule));
                }
                $field = v;
            }};
        }
        match key {
            "n_alpha" => num!(self.model.n_alpha, ">= 0", |v| v >= 0.0),
            "g1" => num!(self.model.g1, ">= 0", |v| v >= 0.0),
            "g2" => num!(self.model.g2, ">= 0", |v| v >= 0.0),
            "eta" => num!(self.model.eta, "0 < eta <= 1", |v| v > 0.0 && v <= 1.0),
            "mu" => num!(self.model.mu, "0 < mu <= 1", |v| v > 0.0 && v <= 1.0),
            "g2_corr" => num!(self.model.g2_corr, ">= 1", |v| v >= 1.0),
            "dark_rms" => num!(self.model.dark_rms, ">= 0", |v| v >= 0.0),
            "sv_enabled" => self.model.sv_enabled = parse_bool(location, key, value)?,
            "phi_min" => num!(self.phi_min, "finite", |_| true),
            "phi_max" => num!(self.phi_max, "finite", |_| true),
            "n_points" => {
                let v = parse_usize(location, key, value)?;
                if v < 2 {
                    return Err(bad_range(location, key, ">= 2"));
                }
                self.n_points = v;
            }
            "eta_min" => num!(self.eta_min, "0 < eta_min <= 1", |v| v > 0.0 && v <= 1.0),
            "eta_max" => num!(self.eta_max, "0 < eta_max <= 1", |v| v > 0.0 && v <= 1.0),
            "eta_points" => {
                let v = parse_usize(location, key, value)?;
                if v < 1 {
                    return Err(bad_range(location, key, ">= 1"));
                }
                self.eta_points = v;
            }
            "g2_min" => num!(self.g2_min, ">= 0", |v| v >= 0.0),
            "g2_max" => num!(self.g2_max, ">= 0", |v| v >= 0.0),
            "g2_points" => {
                let v = parse_usize(location, key, value)?;
                if v < 1 {
                    return Err(bad_range(location, key, ">= 1"));
                }
                self.g2_points = v;
            }
            "squeezing_db" => num!(self.squeezing_db, ">= 0", |v| v >= 0.0),
            "scenario" => {
                self.scenario = value.parse().map_err(|e| ConfigError::BadValue {
                    location: location.to_string(),
                    key: key.to_string(),
                    reason: format!("{e}"),
                })?;
            }
            "alpha" => num!(self.alpha, "finite", |_| true),
            "sv_db" => num!(self.sv_db, ">= 0", |v| v >= 0.0),
            "dopa_db" => num!(self.dopa_db, ">= 0", |v| v >= 0.0),
            "n_phases" => {
                let v = parse_usize(location, key, value)?;
                if v < 1 {
                    return Err(bad_range(location, key, ">= 1"));
                }
                self.n_phases = v;
            }
            "grid_min" => num!(self.grid_min, "finite", |_| true),
            "grid_max" => num!(self.grid_max, "finite", |_| true),
            "grid_points" => {
                let v = parse_usize(location, key, value)?;
                if v < 2 {
                    return Err(bad_range(location, key, ">= 2"));
                }
                self.grid_points = v;
            }
            "calib_samples" => self.calib_samples = parse_samples(location, key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => {
                return Err(ConfigError::UnknownKey {
                    location: location.to_string(),
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// The resolved configuration as ordered key/value text, exactly as
    /// echoed into CSV metadata. Feeding these lines back through
    /// [`parse_config`] reproduces this configuration.
    pub fn echo_entries(&self) -> Vec<(&'static str, String)> {
        let m = &self.model;
        let mut entries = vec![
            ("n_alpha", m.n_alpha.to_string()),
            ("g1", m.g1.to_string()),
            ("g2", m.g2.to_string()),
            ("eta", m.eta.to_string()),
            ("mu", m.mu.to_string()),
            ("g2_corr", m.g2_corr.to_string()),
            ("dark_rms", m.dark_rms.to_string()),
            ("sv_enabled", m.sv_enabled.to_string()),
            ("phi_min", self.phi_min.to_string()),
            ("phi_max", self.phi_max.to_string()),
            ("n_points", self.n_points.to_string()),
            ("eta_min", self.eta_min.to_string()),
            ("eta_max", self.eta_max.to_string()),
            ("eta_points", self.eta_points.to_string()),
            ("g2_min", self.g2_min.to_string()),
            ("g2_max", self.g2_max.to_string()),
            ("g2_points", self.g2_points.to_string()),
            ("squeezing_db", self.squeezing_db.to_string()),
            ("scenario", self.scenario.to_string()),
            ("alpha", self.alpha.to_string()),
            ("sv_db", self.sv_db.to_string()),
            ("dopa_db", self.dopa_db.to_string()),
            ("n_phases", self.n_phases.to_string()),
            ("grid_min", self.grid_min.to_string()),
            ("grid_max", self.grid_max.to_string()),
            ("grid_points", self.grid_points.to_string()),
            ("calib_samples", format_samples(&self.calib_samples)),
        ];
        if let Some(out) = &self.out {
            entries.push(("out", out.display().to_string()));
        }
        entries
    }
}

/// Parse a config document on top of the defaults. Lines are `key = value`;
/// blank lines and lines starting with `#` are skipped; later assignments
/// override earlier ones.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let location = format!("line {}", idx + 1);
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            location: location.clone(),
            line: line.to_string(),
        })?;
        config.set(key.trim(), value.trim(), &location)?;
    }
    Ok(config)
}

/// Load a config file, or defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Unreadable {
                path: p.to_path_buf(),
                source,
            })?;
            parse_config(&text)
        }
    }
}

fn metadata(command: Command, config: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# squint {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command = {command}");
    for (key, value) in config.echo_entries() {
        let _ = writeln!(out, "# {key} = {value}");
    }
    out
}

/// Execute one command: writes its CSV and returns the one-line summary.
///
/// The output path is `out_override`, else the config's `out`, else
/// `<command>.csv` in the working directory.
pub fn run_command(
    command: Command,
    config: &RunConfig,
    out_override: Option<&Path>,
) -> Result<String, CliError> {
    let default_name = PathBuf::from(format!("{command}.csv"));
    let path = out_override
        .or(config.out.as_deref())
        .unwrap_or(&default_name);
    let mut csv = metadata(command, config);
    let summary = match command {
        Command::Snl => {
            let limit = interferometer::snl(&config.model)?;
            csv.push_str("quantity,value\n");
            let _ = writeln!(csv, "snl_rad,{limit}");
            let _ = writeln!(csv, "snl_mrad,{}", 1e3 * limit);
            format!("snl_mrad={}", 1e3 * limit)
        }
        Command::Sweep => {
            if !(config.phi_min < config.phi_max) {
                return Err(ConfigError::Conflict("phi_min must be below phi_max".into()).into());
            }
            let curve = interferometer::phase_sweep(
                &config.model,
                config.phi_min,
                config.phi_max,
                config.n_points,
            )?;
            let _ = writeln!(csv, "# snl_rad = {}", curve.snl);
            csv.push_str("phi_rad,mean_n,var_n,var_quantum,var_excess,var_dark,delta_phi_rad\n");
            for point in &curve.points {
                let s = &point.stats;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    s.phi, s.mean_n, s.var_n, s.var_quantum, s.var_excess, s.var_dark, point.delta_phi
                );
            }
            let best = curve
                .points
                .iter()
                .map(|p| p.delta_phi)
                .fold(f64::INFINITY, f64::min);
            format!(
                "points={} best_delta_phi_mrad={} snl_mrad={} sub_snl_width_rad={}",
                curve.points.len(),
                1e3 * best,
                1e3 * curve.snl,
                curve.sub_snl_width()
            )
        }
        Command::Threshold => {
            let threshold = interferometer::loss_threshold(&config.model)?;
            csv.push_str("quantity,value\n");
            let _ = writeln!(csv, "eta_threshold,{threshold}");
            format!("eta_threshold={threshold}")
        }
        Command::Qmap => {
            if config.eta_min > config.eta_max || config.g2_min > config.g2_max {
                return Err(ConfigError::Conflict(
                    "qmap axes need eta_min <= eta_max and g2_min <= g2_max".into(),
                )
                .into());
            }
            let q0 = interferometer::q0_from_squeezing(config.squeezing_db, config.model.mu)?;
            let etas = linspace(config.eta_min, config.eta_max, config.eta_points);
            let g2s = linspace(config.g2_min, config.g2_max, config.g2_points);
            let map = interferometer::advantage_map(q0, config.model.mu, &etas, &g2s)?;
            let _ = writeln!(csv, "# q0 = {q0}");
            csv.push_str("eta\\g2");
            for g2 in &map.g2 {
                let _ = write!(csv, ",{g2}");
            }
            csv.push('\n');
            for (eta, row) in map.eta.iter().zip(&map.normalized) {
                let _ = write!(csv, "{eta}");
                for v in row {
                    let _ = write!(csv, ",{v}");
                }
                csv.push('\n');
            }
            format!("q0={q0} rows={} cols={}", map.eta.len(), map.g2.len())
        }
        Command::Wigner => {
            if !(config.grid_min < config.grid_max) {
                return Err(
                    ConfigError::Conflict("grid_min must be below grid_max".into()).into(),
                );
            }
            let phis = linspace(0.0, PI, config.n_phases);
            let states = wigner::scenario_states(
                config.scenario,
                &phis,
                config.alpha,
                config.sv_db,
                config.model.eta,
                config.dopa_db,
            )?;
            let axis = linspace(config.grid_min, config.grid_max, config.grid_points);
            if states.len() >= 2 {
                let separations = wigner::separation_metric(&states)?;
                let _ = writeln!(
                    csv,
                    "# separation = {}",
                    separations
                        .iter()
                        .map(f64::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                );
            }
            csv.push_str("phi_rad,x,p,wigner\n");
            let mut integrals = Vec::with_capacity(states.len());
            for (phi, state) in phis.iter().zip(&states) {
                let grid = WignerGrid::sample(
                    state,
                    &axis,
                    &axis,
                    format!("{} phi={phi}", config.scenario),
                )?;
                integrals.push(grid.integral());
                for (i, x) in grid.x_axis.iter().enumerate() {
                    for (j, p) in grid.p_axis.iter().enumerate() {
                        let _ = writeln!(csv, "{phi},{x},{p},{}", grid.values[(i, j)]);
                    }
                }
            }
            let lo = integrals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = integrals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            format!(
                "scenario={} phases={} grid={}x{} integral_min={lo} integral_max={hi}",
                config.scenario,
                phis.len(),
                config.grid_points,
                config.grid_points
            )
        }
        Command::Calibrate => {
            let fit = interferometer::calibrate_gain(&config.calib_samples)?;
            let _ = writeln!(csv, "# b = {}", fit.b);
            let _ = writeln!(csv, "# c = {}", fit.c);
            let _ = writeln!(csv, "# rms_residual = {}", fit.rms_residual);
            csv.push_str("pump_power,mean_photons,fit\n");
            for &(p, n) in &config.calib_samples {
                let model = fit.c * (fit.b * p.sqrt()).sinh().powi(2);
                let _ = writeln!(csv, "{p},{n},{model}");
            }
            format!("b={} c={} rms_residual={}", fit.b, fit.c, fit.rms_residual)
        }
    };
    std::fs::write(path, csv)?;
    Ok(summary)
}
