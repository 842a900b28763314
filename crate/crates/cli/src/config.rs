//! Run configuration: TOML file, preset, `--set` overrides and validation.

use std::path::PathBuf;

use lambda_fcs::{MediumParams, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    Na23,
    Cs133,
    Custom,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name.to_ascii_lowercase().as_str() {
            "na" | "na23" | "sodium" => Ok(Self::Na23),
            "cs" | "cs133" | "caesium" | "cesium" => Ok(Self::Cs133),
            "custom" | "none" => Ok(Self::Custom),
            other => Err(CliError::Config(format!("unknown preset '{other}' (expected na, cs or custom)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One sweep axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

/// Variables a sweep may name. `xi` sets `omega_c = xi * omega_p`.
pub const SWEEP_VARS: [&str; 9] =
    ["gamma", "omega_c", "omega_p", "delta_c", "delta_p", "nbar12", "nbar13", "cal_a", "xi"];

impl Axis {
    pub fn validate(&self) -> Result<(), CliError> {
        if !SWEEP_VARS.contains(&self.var.as_str()) {
            return Err(CliError::Config(format!(
                "sweep variable '{}' is not a parameter (one of {})",
                self.var,
                SWEEP_VARS.join(", ")
            )));
        }
        if self.count < 2 {
            return Err(CliError::Config(format!("sweep '{}' needs count >= 2, got {}", self.var, self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(CliError::Config(format!("sweep '{}' needs finite min <= max", self.var)));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(CliError::Config(format!("log sweep '{}' needs min > 0", self.var)));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k == n - 1 {
                    return self.max;
                }
                let t = k as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Parses `min:max:count[:log|linear]`.
    pub fn parse_spec(var: &str, spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("sweep.{var} expects min:max:count[:log], got '{spec}'"));
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        let scale = match parts.get(3).map(|s| s.trim()) {
            None | Some("linear") | Some("lin") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(_) => return Err(bad()),
        };
        Ok(Self { var: var.to_string(), min, max, count, scale })
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    gamma: Option<f64>,
    omega_c: Option<f64>,
    omega_p: Option<f64>,
    xi: Option<f64>,
    delta_c: Option<f64>,
    delta_p: Option<f64>,
    nbar12: Option<f64>,
    nbar13: Option<f64>,
    cal_a: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    n_density: Option<f64>,
    dipole_13: Option<f64>,
    gamma13_si: Option<f64>,
    lambda_p_nm: Option<f64>,
    cal_n: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    axes: Vec<Axis>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    tau_end: Option<f64>,
    n_max: Option<usize>,
    samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Format>,
    path: Option<PathBuf>,
}

/// Everything a config file may contain; unset values fall back to the
/// preset and then to per-command defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    preset: Option<String>,
    jobs: Option<usize>,
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    medium: RawMedium,
    sweep: Option<RawSweep>,
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    output: RawOutput,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn set_preset(&mut self, name: &str) {
        self.preset = Some(name.to_string());
    }

    pub fn set_format(&mut self, format: Format) {
        self.output.format = Some(format);
    }

    pub fn set_path(&mut self, path: PathBuf) {
        self.output.path = Some(path);
    }

    pub fn has_jobs(&self) -> bool {
        self.jobs.is_some()
    }

    pub fn set_jobs(&mut self, jobs: usize) {
        self.jobs = Some(jobs);
    }

    /// Applies one `key=value` override. Keys are `section.field`; bare
    /// names refer to `[system]`. Sweeps use `sweep.VAR=min:max:count[:log]`
    /// and replace any sweep from the file.
    pub fn apply_set(&mut self, assignment: &str, sweep_from_flags: &mut bool) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{assignment}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let (section, field) = match key.split_once('.') {
            Some(parts) => parts,
            None if matches!(key, "jobs" | "preset") => ("run", key),
            None => ("system", key),
        };
        let num = || -> Result<f64, CliError> {
            value.parse().map_err(|_| CliError::Config(format!("{key}: '{value}' is not a number")))
        };
        let int = || -> Result<usize, CliError> {
            value.parse().map_err(|_| CliError::Config(format!("{key}: '{value}' is not a non-negative integer")))
        };
        let s = &mut self.system;
        let m = &mut self.medium;
        match (section, field) {
            ("system", "gamma") => s.gamma = Some(num()?),
            ("system", "omega_c") => s.omega_c = Some(num()?),
            ("system", "omega_p") => s.omega_p = Some(num()?),
            ("system", "xi") => s.xi = Some(num()?),
            ("system", "delta_c") => s.delta_c = Some(num()?),
            ("system", "delta_p") => s.delta_p = Some(num()?),
            ("system", "nbar12") => s.nbar12 = Some(num()?),
            ("system", "nbar13") => s.nbar13 = Some(num()?),
            ("system", "cal_a") => s.cal_a = Some(num()?),
            ("medium", "n_density") => m.n_density = Some(num()?),
            ("medium", "dipole_13") => m.dipole_13 = Some(num()?),
            ("medium", "gamma13_si") => m.gamma13_si = Some(num()?),
            ("medium", "lambda_p_nm") => m.lambda_p_nm = Some(num()?),
            ("medium", "cal_n") => m.cal_n = Some(num()?),
            ("oracle", "tau_end") => self.oracle.tau_end = Some(num()?),
            ("oracle", "n_max") => self.oracle.n_max = Some(int()?),
            ("oracle", "samples") => self.oracle.samples = Some(int()?),
            ("output", "format") => self.output.format = Some(parse_format(value)?),
            ("output", "path") => self.output.path = Some(PathBuf::from(value)),
            ("run", "jobs") => self.jobs = Some(int()?),
            ("run", "preset") => self.preset = Some(value.to_string()),
            ("sweep", var) => {
                let axis = Axis::parse_spec(var, value)?;
                let sweep = self.sweep.get_or_insert_with(RawSweep::default);
                if !*sweep_from_flags {
                    sweep.axes.clear();
                    *sweep_from_flags = true;
                }
                sweep.axes.retain(|a| a.var != var);
                sweep.axes.push(axis);
            }
            _ => return Err(CliError::Config(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }
}

pub fn parse_format(s: &str) -> Result<Format, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Config(format!("unknown format '{other}' (expected csv or json)"))),
    }
}

/// System parameters as configured, before building [`SystemParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemConfig {
    pub gamma: f64,
    pub omega_c: f64,
    pub omega_p: f64,
    pub delta_c: f64,
    pub delta_p: f64,
    /// Independent occupations; ignored when `cal_a` is set.
    pub nbar12: f64,
    pub nbar13: f64,
    /// Equal-gap thermal parameter; `None` means the occupations above.
    pub cal_a: Option<f64>,
}

impl SystemConfig {
    pub fn params(&self) -> Result<SystemParams<f64>, CliError> {
        let base = SystemParams::new(self.gamma, self.omega_c, self.omega_p)
            .with_detunings(self.delta_c, self.delta_p);
        let p = match self.cal_a {
            Some(a) => base.with_equal_gaps(a),
            None if self.nbar12 == 0.0 && self.nbar13 == 0.0 => base,
            None => base.with_occupations(self.nbar12, self.nbar13),
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }
}

/// Medium in SI-facing units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MediumConfig {
    /// cm⁻³
    pub n_density: f64,
    /// statC·cm
    pub dipole_13: f64,
    /// s⁻¹
    pub gamma13_si: f64,
    /// nm
    pub lambda_p_nm: f64,
    /// Pinned `𝒩`; derived from the atomic data when absent.
    pub cal_n: Option<f64>,
}

impl MediumConfig {
    fn from_params(m: &MediumParams<f64>) -> Self {
        Self {
            n_density: m.n_density,
            dipole_13: m.dipole_13,
            gamma13_si: m.gamma13_si,
            lambda_p_nm: m.lambda_p * 1e7,
            cal_n: m.cal_n_pinned,
        }
    }

    /// Medium probed with Rabi frequency `omega_p` (units of `γ13`).
    pub fn params(&self, omega_p: f64) -> MediumParams<f64> {
        let m = MediumParams::new(self.n_density, self.dipole_13, self.gamma13_si, self.lambda_p_nm * 1e-7, omega_p);
        match self.cal_n {
            Some(n) => m.with_cal_n(n),
            None => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    pub tau_end: f64,
    pub n_max: usize,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Tradeoff,
    FanoMap,
    Fcs,
    Oracle,
    Dressed,
    Presets,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Tradeoff => "tradeoff",
            Self::FanoMap => "fano-map",
            Self::Fcs => "fcs",
            Self::Oracle => "oracle",
            Self::Dressed => "dressed",
            Self::Presets => "presets",
        }
    }
}

/// Fully resolved configuration for one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub preset: Preset,
    pub system: SystemConfig,
    pub medium: MediumConfig,
    pub sweep: Vec<Axis>,
    pub oracle: OracleConfig,
    pub format: Format,
    #[serde(skip)]
    pub path: Option<PathBuf>,
    pub jobs: usize,
}

fn default_sweep(command: Command) -> Vec<Axis> {
    let axis = |var: &str, min, max, count, scale| Axis { var: var.into(), min, max, count, scale };
    match command {
        Command::Spectrum => vec![axis("delta_p", -3.0, 3.0, 121, Scale::Linear)],
        Command::Tradeoff => vec![axis("xi", 1.0, 100.0, 200, Scale::Log)],
        Command::FanoMap => vec![
            axis("delta_p", -3.0, 3.0, 61, Scale::Linear),
            axis("omega_p", 0.1, 1.0, 19, Scale::Linear),
        ],
        _ => Vec::new(),
    }
}

fn expected_axes(command: Command) -> Option<usize> {
    match command {
        Command::Spectrum | Command::Tradeoff => Some(1),
        Command::FanoMap => Some(2),
        _ => None,
    }
}

impl RunConfig {
    /// Resolves a raw configuration: explicit values win over the preset,
    /// which wins over the command defaults.
    pub fn resolve(raw: RawConfig, command: Command) -> Result<Self, CliError> {
        let preset = match &raw.preset {
            Some(name) => Preset::parse(name)?,
            None => Preset::Custom,
        };
        let s = &raw.system;

        let (mut gamma, mut omega_c, mut omega_p) = (0.9, 0.56, 0.5);
        let mut cal_a = None;
        if command == Command::FanoMap {
            cal_a = Some(47.0);
        }
        let preset_medium = match preset {
            Preset::Na23 => {
                omega_p = 0.2;
                MediumParams::<f64>::sodium()
            }
            Preset::Cs133 => MediumParams::<f64>::caesium(),
            Preset::Custom => {
                let mut m = MediumParams::<f64>::sodium();
                m.cal_n_pinned = None;
                m
            }
        };
        if preset != Preset::Custom {
            gamma = 0.9;
        }
        gamma = s.gamma.unwrap_or(gamma);
        omega_p = s.omega_p.unwrap_or(omega_p);
        if s.xi.is_some() && s.omega_c.is_some() {
            return Err(CliError::Config("set either system.xi or system.omega_c, not both".into()));
        }
        omega_c = match s.xi {
            Some(xi) => xi * omega_p,
            None => s.omega_c.unwrap_or(omega_c),
        };
        if s.cal_a.is_some() && (s.nbar12.is_some() || s.nbar13.is_some()) {
            return Err(CliError::Config("set either system.cal_a or system.nbar12/nbar13, not both".into()));
        }
        if s.nbar12.is_some() || s.nbar13.is_some() {
            cal_a = None;
        }
        if let Some(a) = s.cal_a {
            cal_a = Some(a);
        }
        let delta_p = s.delta_p.unwrap_or(0.0);
        // dressed states need equal detunings; a lone delta_p sets both
        let delta_c = match (command, s.delta_c) {
            (_, Some(d)) => d,
            (Command::Dressed, None) => delta_p,
            _ => 0.0,
        };
        let system = SystemConfig {
            gamma,
            omega_c,
            omega_p,
            delta_c,
            delta_p,
            nbar12: s.nbar12.unwrap_or(0.0),
            nbar13: s.nbar13.unwrap_or(0.0),
            cal_a,
        };

        let mut medium = MediumConfig::from_params(&preset_medium);
        let m = &raw.medium;
        let atomic_override = m.n_density.is_some()
            || m.dipole_13.is_some()
            || m.gamma13_si.is_some()
            || m.lambda_p_nm.is_some();
        if atomic_override {
            // a pinned 𝒩 no longer matches changed atomic data
            medium.cal_n = None;
        }
        medium.n_density = m.n_density.unwrap_or(medium.n_density);
        medium.dipole_13 = m.dipole_13.unwrap_or(medium.dipole_13);
        medium.gamma13_si = m.gamma13_si.unwrap_or(medium.gamma13_si);
        medium.lambda_p_nm = m.lambda_p_nm.unwrap_or(medium.lambda_p_nm);
        if m.cal_n.is_some() {
            medium.cal_n = m.cal_n;
        }

        let sweep = match &raw.sweep {
            Some(sw) if !sw.axes.is_empty() => sw.axes.clone(),
            Some(_) => {
                return Err(CliError::Config("sweep section has no axes".into()));
            }
            None => default_sweep(command),
        };
        if let Some(n) = expected_axes(command) {
            if sweep.len() != n {
                return Err(CliError::Config(format!(
                    "{} needs {n} sweep axis(es), got {}",
                    command.as_str(),
                    sweep.len()
                )));
            }
            for a in &sweep {
                a.validate()?;
            }
            if sweep.len() == 2 && sweep[0].var == sweep[1].var {
                return Err(CliError::Config(format!("sweep variable '{}' given twice", sweep[0].var)));
            }
        }
        if command == Command::Tradeoff {
            let a = &sweep[0];
            if a.var != "xi" || a.min < 1.0 {
                return Err(CliError::Config(
                    "tradeoff sweeps the upper branch: sweep variable xi with min >= 1".into(),
                ));
            }
        }

        let oracle = OracleConfig {
            tau_end: raw.oracle.tau_end.unwrap_or(200.0),
            n_max: raw.oracle.n_max.unwrap_or(64),
            samples: raw.oracle.samples.unwrap_or(200),
        };
        if !(oracle.tau_end > 0.0) || oracle.n_max == 0 || oracle.samples < 4 {
            return Err(CliError::Config("oracle needs tau_end > 0, n_max >= 1 and samples >= 4".into()));
        }
        let jobs = raw.jobs.unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::Config("jobs must be >= 1".into()));
        }

        let cfg = Self {
            command,
            preset,
            system,
            medium,
            sweep,
            oracle,
            format: raw.output.format.unwrap_or(Format::Csv),
            path: raw.output.path.clone(),
            jobs,
        };
        cfg.system.params()?;
        cfg.medium
            .params(cfg.system.omega_p.max(f64::MIN_POSITIVE))
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Applies a sweep value to a copy of the system settings.
pub fn assign(system: &mut SystemConfig, var: &str, value: f64) {
    match var {
        "gamma" => system.gamma = value,
        "omega_c" => system.omega_c = value,
        "omega_p" => system.omega_p = value,
        "delta_c" => system.delta_c = value,
        "delta_p" => system.delta_p = value,
        "nbar12" => {
            system.nbar12 = value;
            system.cal_a = None;
        }
        "nbar13" => {
            system.nbar13 = value;
            system.cal_a = None;
        }
        "cal_a" => system.cal_a = Some(value),
        "xi" => system.omega_c = value * system.omega_p,
        _ => unreachable!("sweep variables are validated"),
    }
}
