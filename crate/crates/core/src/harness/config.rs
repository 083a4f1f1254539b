//! Experiment configuration: Table-I defaults, flat `key=value` file
//! parsing, and validation.

use crate::baselines::AllCsiScoring;
use serde::Serialize;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Allocation algorithms the runner can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Algorithm {
    Proposed,
    ThreeStep,
    AllCsi,
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Proposed, Algorithm::ThreeStep, Algorithm::AllCsi, Algorithm::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::ThreeStep => "three_step",
            Algorithm::AllCsi => "all_csi",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s.trim() {
            "proposed" => Ok(Algorithm::Proposed),
            "three_step" => Ok(Algorithm::ThreeStep),
            "all_csi" => Ok(Algorithm::AllCsi),
            "exhaustive" => Ok(Algorithm::Exhaustive),
            other => Err(ConfigError::BadValue {
                key: "algorithms".into(),
                value: other.into(),
                expect: "proposed | three_step | all_csi | exhaustive".into(),
            }),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full experiment description. [`ExperimentConfig::default`] reproduces the
/// paper's Table I at N=5, R=400 m.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_cues: usize,
    /// Table I sets M = 5N.
    pub n_d2d: usize,
    /// Cell radius in meters.
    pub cell_radius: f64,
    /// Cluster radii (meters) to sweep; one full trial set per value.
    pub cluster_radius_sweep: Vec<f64>,
    /// Total bandwidth W in hertz; reporting only (rates are per-hertz).
    pub total_bandwidth: f64,
    /// AWGN power per RB in dBm.
    pub noise_dbm: f64,
    /// Signal-processing noise in dBm, `None` for off.
    pub sigma_s2_dbm: Option<f64>,
    /// Positive pathloss exponent: gain falls as d^(-alpha).
    pub pathloss_exponent: f64,
    /// Log-normal shadowing std in dB; 0 disables shadowing.
    pub shadowing_sigma_db: f64,
    /// Rayleigh fast fading on desired and interference links.
    pub fading: bool,
    pub p_c_max_dbm: f64,
    pub p_d_max_dbm: f64,
    /// Per-UE QoS thresholds drawn uniformly from this dB range.
    pub qos_range_db: (f64, f64),
    pub trials: usize,
    /// Master seed; per-trial seeds derive from it.
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub all_csi_scoring: AllCsiScoring,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_cues: 5,
            n_d2d: 25,
            cell_radius: 400.0,
            cluster_radius_sweep: vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
            total_bandwidth: 5e6,
            noise_dbm: -114.0,
            sigma_s2_dbm: None,
            pathloss_exponent: 3.5,
            shadowing_sigma_db: 8.0,
            fading: true,
            p_c_max_dbm: 24.0,
            p_d_max_dbm: 18.0,
            qos_range_db: (5.0, 20.0),
            trials: 200,
            seed: 1,
            algorithms: vec![Algorithm::Proposed, Algorithm::ThreeStep, Algorithm::AllCsi],
            all_csi_scoring: AllCsiScoring::PowerWeighted,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("config line {line} is not `key = value`: {text}")]
    BadLine { line: usize, text: String },
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("bad value `{value}` for `{key}` (expected {expect})")]
    BadValue { key: String, value: String, expect: String },
    #[error("invalid config: {message}")]
    Invalid { message: String },
}

fn bad(key: &str, value: &str, expect: &str) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), expect: expect.into() }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.trim().parse().map_err(|_| bad(key, value, "a number"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse().map_err(|_| bad(key, value, "a nonnegative integer"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(bad(key, value, "true | false")),
    }
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|part| parse_f64(key, part))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(bad(key, value, "a nonempty comma-separated list"))
            } else {
                Ok(v)
            }
        })
}

impl ExperimentConfig {
    /// Parses a flat `key = value` config text (UTF-8, `#` comments, blank
    /// lines ignored) over the Table-I defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine { line: idx + 1, text: raw.into() });
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "n_cues" => cfg.n_cues = parse_usize(key, value)?,
                "n_d2d" => cfg.n_d2d = parse_usize(key, value)?,
                "cell_radius" => cfg.cell_radius = parse_f64(key, value)?,
                "cluster_radius_sweep" => {
                    cfg.cluster_radius_sweep = parse_f64_list(key, value)?;
                }
                "total_bandwidth" => cfg.total_bandwidth = parse_f64(key, value)?,
                "noise_dbm" => cfg.noise_dbm = parse_f64(key, value)?,
                "sigma_s2_dbm" => {
                    cfg.sigma_s2_dbm = if value == "off" {
                        None
                    } else {
                        Some(parse_f64(key, value)?)
                    };
                }
                "pathloss_exponent" => cfg.pathloss_exponent = parse_f64(key, value)?,
                "shadowing_sigma_db" => cfg.shadowing_sigma_db = parse_f64(key, value)?,
                "fading" => cfg.fading = parse_bool(key, value)?,
                "p_c_max_dbm" => cfg.p_c_max_dbm = parse_f64(key, value)?,
                "p_d_max_dbm" => cfg.p_d_max_dbm = parse_f64(key, value)?,
                "qos_range_db" => {
                    let list = parse_f64_list(key, value)?;
                    if list.len() != 2 {
                        return Err(bad(key, value, "low,high"));
                    }
                    cfg.qos_range_db = (list[0], list[1]);
                }
                "trials" => cfg.trials = parse_usize(key, value)?,
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| bad(key, value, "a u64 seed"))?;
                }
                "algorithms" => {
                    cfg.algorithms = value
                        .split(',')
                        .map(Algorithm::parse)
                        .collect::<Result<Vec<_>, _>>()?;
                }
                "all_csi_scoring" => {
                    cfg.all_csi_scoring = match value {
                        "power_weighted" => AllCsiScoring::PowerWeighted,
                        "gain_only" => AllCsiScoring::GainOnly,
                        _ => return Err(bad(key, value, "power_weighted | gain_only")),
                    };
                }
                _ => return Err(ConfigError::UnknownKey { key: key.into() }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |message: String| Err(ConfigError::Invalid { message });
        if self.n_cues == 0 {
            return fail("n_cues must be at least 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if !(self.cell_radius > 0.0) {
            return fail(format!("cell_radius {} must be positive", self.cell_radius));
        }
        if self.cluster_radius_sweep.is_empty() {
            return fail("cluster_radius_sweep must be nonempty".into());
        }
        for &r in &self.cluster_radius_sweep {
            if !(r > 0.0 && r < self.cell_radius) {
                return fail(format!(
                    "cluster radius {r} must lie in (0, cell_radius = {})",
                    self.cell_radius
                ));
            }
        }
        if !(self.qos_range_db.0 <= self.qos_range_db.1) {
            return fail(format!(
                "qos_range_db low {} exceeds high {}",
                self.qos_range_db.0, self.qos_range_db.1
            ));
        }
        if !(self.pathloss_exponent > 2.0) {
            return fail(format!(
                "pathloss_exponent {} must exceed 2",
                self.pathloss_exponent
            ));
        }
        if self.shadowing_sigma_db < 0.0 {
            return fail("shadowing_sigma_db must be nonnegative".into());
        }
        if !(self.total_bandwidth > 0.0) {
            return fail("total_bandwidth must be positive".into());
        }
        if self.algorithms.is_empty() {
            return fail("algorithms must be nonempty".into());
        }
        if self.algorithms.contains(&Algorithm::Exhaustive)
            && (self.n_cues > 3 || self.n_d2d > 8)
        {
            return fail(format!(
                "exhaustive is guarded to N <= 3, M <= 8; got N = {}, M = {}",
                self.n_cues, self.n_d2d
            ));
        }
        Ok(())
    }
}
