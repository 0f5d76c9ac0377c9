//! Run configuration files.
//!
//! A config is a JSON object whose keys carry SI unit suffixes. Missing keys
//! take the Nb/AlOx/Nb array defaults, unknown keys are rejected, and
//! `key=value` overrides are applied on top of the file before validation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::ensemble::{ArrayConfig, DisorderSpec, DEFAULT_BIN_BUDGET};
use crate::error::{Error, Result};
use crate::params::{DriveConfig, SimGrid, SquidParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Waveform,
    Spectrum,
    Pulses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub shunt_resistance_ohm: f64,
    #[serde(rename = "junction_capacitance_F")]
    pub junction_capacitance_f: f64,
    #[serde(rename = "critical_current_sum_A")]
    pub critical_current_sum_a: f64,
    pub asymmetry: f64,
    #[serde(rename = "loop_inductance_H")]
    pub loop_inductance_h: f64,
    pub area_perturbation: f64,

    #[serde(rename = "drive_frequency_Hz")]
    pub drive_frequency_hz: f64,
    pub drive_amplitude: f64,
    pub bias: f64,

    pub steps_per_period: u32,
    pub periods_total: u32,
    pub periods_transient: u32,
    pub output_decimation: u32,

    pub n_squids: usize,
    pub load_resistance_ohm: f64,

    pub sigma_area: f64,
    pub sigma_asymmetry: f64,
    /// Center of the asymmetry distribution; defaults to `asymmetry`.
    pub preferential_asymmetry: Option<f64>,
    pub n_bins: usize,
    pub n_realizations: usize,
    pub bin_budget: usize,
    pub seed: u64,

    pub k_max: usize,
    pub outputs: Vec<OutputKind>,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let squid = SquidParams::niobium();
        let drive = DriveConfig::default();
        let grid = SimGrid::default();
        let disorder = DisorderSpec::none();
        RunConfig {
            shunt_resistance_ohm: squid.shunt_resistance,
            junction_capacitance_f: squid.junction_capacitance,
            critical_current_sum_a: squid.critical_current_sum,
            asymmetry: squid.asymmetry,
            loop_inductance_h: squid.loop_inductance,
            area_perturbation: squid.area_perturbation,
            drive_frequency_hz: drive.frequency,
            drive_amplitude: drive.amplitude,
            bias: drive.bias,
            steps_per_period: grid.steps_per_period,
            periods_total: grid.periods_total,
            periods_transient: grid.periods_transient,
            output_decimation: grid.output_decimation,
            n_squids: 50,
            load_resistance_ohm: 50.0,
            sigma_area: disorder.sigma_area,
            sigma_asymmetry: disorder.sigma_asymmetry,
            preferential_asymmetry: None,
            n_bins: disorder.n_bins,
            n_realizations: disorder.n_realizations,
            bin_budget: DEFAULT_BIN_BUDGET,
            seed: disorder.seed,
            k_max: 200,
            outputs: vec![OutputKind::Waveform, OutputKind::Spectrum, OutputKind::Pulses],
            output_dir: "out".to_string(),
        }
    }
}

impl RunConfig {
    pub fn squid(&self) -> SquidParams {
        SquidParams {
            shunt_resistance: self.shunt_resistance_ohm,
            junction_capacitance: self.junction_capacitance_f,
            critical_current_sum: self.critical_current_sum_a,
            asymmetry: self.asymmetry,
            loop_inductance: self.loop_inductance_h,
            area_perturbation: self.area_perturbation,
        }
    }

    pub fn drive(&self) -> DriveConfig {
        DriveConfig {
            frequency: self.drive_frequency_hz,
            amplitude: self.drive_amplitude,
            bias: self.bias,
        }
    }

    pub fn grid(&self) -> SimGrid {
        SimGrid {
            steps_per_period: self.steps_per_period,
            periods_total: self.periods_total,
            periods_transient: self.periods_transient,
            output_decimation: self.output_decimation,
        }
    }

    pub fn array(&self) -> ArrayConfig {
        ArrayConfig {
            n_squids: self.n_squids,
            load_resistance: self.load_resistance_ohm,
            base: self.squid(),
            drive: self.drive(),
            grid: self.grid(),
        }
    }

    pub fn disorder(&self) -> DisorderSpec {
        DisorderSpec {
            sigma_area: self.sigma_area,
            sigma_asymmetry: self.sigma_asymmetry,
            preferential_asymmetry: self.preferential_asymmetry.unwrap_or(self.asymmetry),
            n_bins: self.n_bins,
            n_realizations: self.n_realizations,
            seed: self.seed,
        }
    }

    pub fn is_disordered(&self) -> bool {
        self.sigma_area > 0.0 || self.sigma_asymmetry > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let array = self.array();
        array.validate()?;
        if self.loop_inductance_h > 0.0 && array.base.screening_beta() >= 1.0 {
            return Err(Error::invalid(
                "loop_inductance_H",
                "pi L_g (I_+/2) / Phi_0 < 1 required",
            ));
        }
        self.disorder().validate()?;
        if self.k_max == 0 {
            return Err(Error::invalid("k_max", "k_max >= 1 required"));
        }
        let limit = self.grid().samples_per_period() / 4;
        if self.k_max > limit {
            return Err(Error::BandwidthExceeded {
                k_max: self.k_max,
                limit,
            });
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<&'static str> {
        let mut w = self.drive().warnings();
        w.extend(self.disorder().warnings());
        w
    }

    /// SHA-256 of the canonical JSON form (fixed field order, no whitespace).
    pub fn sha256(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Where each overridden key got its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeySource {
    /// Value from the file, or the built-in default when the file omits the key.
    pub file: Value,
    pub r#override: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sources: BTreeMap<String, KeySource>,
}

impl LoadedConfig {
    /// Resolved config, overrides and hash, for the output directory.
    pub fn echo(&self) -> Value {
        serde_json::json!({
            "version": crate::output::VERSION,
            "config_sha256": self.config.sha256(),
            "config": self.config,
            "overrides": self.sources,
        })
    }
}

fn parse_override(raw: &str) -> Result<(String, Value)> {
    let (key, value) = raw.split_once('=').ok_or_else(|| Error::Parse {
        context: format!("override `{raw}`"),
        message: "expected key=value".into(),
    })?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Parse {
            context: format!("override `{raw}`"),
            message: "empty key".into(),
        });
    }
    let value = value.trim();
    let parsed = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

/// Parses a config document (empty text means all defaults) and applies
/// `key=value` overrides.
pub fn parse_config(text: &str, source: &str, overrides: &[String]) -> Result<LoadedConfig> {
    let mut map: Map<String, Value> = if text.trim().is_empty() {
        Map::new()
    } else {
        match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => m,
            Ok(_) => {
                return Err(Error::Parse {
                    context: source.to_string(),
                    message: "top level must be an object".into(),
                })
            }
            Err(e) => {
                return Err(Error::Parse {
                    context: format!("{source} line {} column {}", e.line(), e.column()),
                    message: e.to_string(),
                })
            }
        }
    };
    // reject typos in the file before overrides can mask them
    from_map(&map, source)?;

    let defaults = match serde_json::to_value(RunConfig::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("RunConfig serializes to an object"),
    };
    let mut sources = BTreeMap::new();
    for raw in overrides {
        let (key, value) = parse_override(raw)?;
        let Some(default) = defaults.get(&key) else {
            return Err(Error::Parse {
                context: format!("override `{raw}`"),
                message: format!("unknown key `{key}`"),
            });
        };
        let file = map.get(&key).cloned().unwrap_or_else(|| default.clone());
        sources.insert(
            key.clone(),
            KeySource {
                file,
                r#override: value.clone(),
            },
        );
        map.insert(key, value);
    }
    let config = from_map(&map, "overrides")?;
    config.validate()?;
    Ok(LoadedConfig { config, sources })
}

fn from_map(map: &Map<String, Value>, source: &str) -> Result<RunConfig> {
    serde_json::from_value(Value::Object(map.clone())).map_err(|e| Error::Parse {
        context: source.to_string(),
        message: e.to_string(),
    })
}

/// Reads and validates a config file, applying overrides after the file values.
pub fn load_config(path: impl AsRef<Path>, overrides: &[String]) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string(), overrides)
}
