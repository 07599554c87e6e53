// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration.
//!
//! ```toml
//! delay_T = 0.0
//! eta = 0.95
//! omega_L = 0.0
//!
//! [pulse]
//! beta_bar = 1.0      # or n_in, the mean photon number
//! tau = 1e-6
//!
//! [[cavities]]
//! kappa = 6.283e6
//! delta = 0.0
//! g = 6.283
//!
//! [[signals]]
//! variant = "continuous_harmonic"
//! theta = 1.0
//! params = { amplitude = 1.0, omega_m = 6283.0 }
//! ```
//!
//! Optional tables: `[solver]`, `[grid]`, `[thermal]` and `[app]`. Unknown
//! keys are rejected with their full path.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::applications::{AppOverrides, Preset};
use crate::chain::{CavityParams, ChainConfig, MechanicalSignal, SignalShape};
use crate::error::{Error, Result};
use crate::fields::{GridRule, PulseParams, SampledField};
use crate::solver::SolverOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    /// Bath temperature, K.
    pub temperature: Option<f64>,
    /// Mechanical frequency, rad/s; defaults to the signal's frequency.
    pub omega_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppSection {
    pub preset: Preset,
    /// Signal strength θ of the generated mechanical signal.
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default)]
    pub params: AppOverrides,
}

/// Fully resolved run configuration, defaults included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub chain: ChainConfig,
    pub pulse: PulseParams,
    pub solver: SolverOptions,
    pub grid: GridRule,
    pub thermal: Option<ThermalSection>,
    pub app: Option<AppSection>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: "<file>".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml(&text, path.parent())
    }

    /// Parses `text`; relative file references resolve against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::Config {
            key: "<syntax>".into(),
            message: e.message().to_string(),
        })?;
        let raw: RawConfig = decode(value, "")?;
        raw.resolve(base)
    }

    /// Canonical JSON used for hashing and manifests.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("run config serialises")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    cavities: Vec<CavityParams>,
    signals: Vec<RawSignal>,
    #[serde(rename = "delay_T", default)]
    delay_t: f64,
    #[serde(default = "one")]
    eta: f64,
    #[serde(rename = "omega_L", default)]
    omega_l: f64,
    pulse: RawPulse,
    #[serde(default)]
    solver: SolverOptions,
    #[serde(default)]
    grid: GridRule,
    thermal: Option<ThermalSection>,
    app: Option<AppSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    variant: String,
    #[serde(default = "one")]
    theta: f64,
    #[serde(default = "empty_table")]
    params: toml::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    beta_bar: Option<f64>,
    n_in: Option<f64>,
    tau: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    q0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BurstParams {
    amplitude: f64,
    omega_m: f64,
    envelope_width: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicParams {
    amplitude: f64,
    omega_m: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledParams {
    /// JSON file holding a time-domain field.
    path: PathBuf,
}

fn one() -> f64 {
    1.0
}

fn empty_table() -> toml::Value {
    toml::Value::Table(toml::Table::new())
}

fn join(prefix: &str, path: &str) -> String {
    match (prefix.is_empty(), path.is_empty() || path == ".") {
        (true, _) => path.to_string(),
        (false, true) => prefix.to_string(),
        (false, false) if path.starts_with('[') => format!("{prefix}{path}"),
        (false, false) => format!("{prefix}.{path}"),
    }
}

fn decode<T: DeserializeOwned>(value: toml::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            key: join(prefix, &path),
            message: e.into_inner().to_string(),
        }
    })
}

fn config_err(key: impl Into<String>, e: Error) -> Error {
    let message = match e {
        Error::InvalidParameter { reason, .. } => reason,
        other => other.to_string(),
    };
    Error::Config {
        key: key.into(),
        message,
    }
}

impl RawSignal {
    fn resolve(self, index: usize, base: Option<&Path>) -> Result<MechanicalSignal> {
        let prefix = format!("signals[{index}].params");
        let shape = match self.variant.as_str() {
            "constant" => {
                let p: ConstantParams = decode(self.params, &prefix)?;
                SignalShape::Constant { q0: p.q0 }
            }
            "harmonic_burst" => {
                let p: BurstParams = decode(self.params, &prefix)?;
                SignalShape::HarmonicBurst {
                    amplitude: p.amplitude,
                    omega_m: p.omega_m,
                    envelope_width: p.envelope_width,
                    phase: p.phase,
                }
            }
            "continuous_harmonic" => {
                let p: HarmonicParams = decode(self.params, &prefix)?;
                SignalShape::ContinuousHarmonic {
                    amplitude: p.amplitude,
                    omega_m: p.omega_m,
                    phase: p.phase,
                }
            }
            "sampled" => {
                let p: SampledParams = decode(self.params, &prefix)?;
                let file = match base {
                    Some(dir) if p.path.is_relative() => dir.join(&p.path),
                    _ => p.path,
                };
                let key = format!("{prefix}.path");
                let text = std::fs::read_to_string(&file).map_err(|e| Error::Config {
                    key: key.clone(),
                    message: format!("cannot read {}: {e}", file.display()),
                })?;
                let field: SampledField =
                    serde_json::from_str(&text).map_err(|e| Error::Config {
                        key,
                        message: e.to_string(),
                    })?;
                SignalShape::Sampled { field }
            }
            other => {
                return Err(Error::Config {
                    key: format!("signals[{index}].variant"),
                    message: format!(
                        "unknown variant `{other}`; expected constant, harmonic_burst, \
                         continuous_harmonic or sampled"
                    ),
                })
            }
        };
        let signal = MechanicalSignal {
            shape,
            theta: self.theta,
        };
        signal.validate().map_err(|e| match &e {
            Error::InvalidParameter { name, .. } if name == "theta" => {
                config_err(format!("signals[{index}].theta"), e)
            }
            Error::InvalidParameter { name, .. } => {
                config_err(format!("{prefix}.{name}"), e.clone())
            }
            _ => config_err(format!("signals[{index}]"), e),
        })?;
        Ok(signal)
    }
}

impl RawConfig {
    fn resolve(self, base: Option<&Path>) -> Result<RunConfig> {
        for (i, c) in self.cavities.iter().enumerate() {
            c.validate().map_err(|e| match &e {
                Error::InvalidParameter { name, .. } if name == "kappa" => {
                    config_err(format!("cavities[{i}].kappa"), e.clone())
                }
                _ => config_err(format!("cavities[{i}]"), e),
            })?;
        }
        let signals = self
            .signals
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.resolve(i, base))
            .collect::<Result<Vec<_>>>()?;
        let chain = ChainConfig {
            cavities: self.cavities,
            signals,
            delay_t: self.delay_t,
            eta: self.eta,
            omega_l: self.omega_l,
        };
        chain.validate().map_err(|e| match &e {
            Error::InvalidParameter { name, .. } => config_err(name.clone(), e.clone()),
            _ => config_err("<chain>", e),
        })?;

        let pulse = match (self.pulse.beta_bar, self.pulse.n_in) {
            (Some(b), None) => PulseParams::new(b, self.pulse.tau),
            (None, Some(n)) => {
                if !(n >= 0.0) {
                    return Err(Error::Config {
                        key: "pulse.n_in".into(),
                        message: "must be non-negative".into(),
                    });
                }
                PulseParams::from_photon_number(n, self.pulse.tau)
            }
            _ => {
                return Err(Error::Config {
                    key: "pulse".into(),
                    message: "give exactly one of beta_bar and n_in".into(),
                })
            }
        }
        .map_err(|e| match &e {
            Error::InvalidParameter { name, .. } => config_err(name.clone(), e.clone()),
            _ => config_err("pulse", e),
        })?;

        self.solver
            .validate()
            .map_err(|e| match &e {
                Error::InvalidParameter { name, .. } => {
                    config_err(format!("solver.{name}"), e.clone())
                }
                _ => config_err("solver", e),
            })?;
        for (key, v, lo) in [
            ("grid.kappa_dt", self.grid.kappa_dt, 0.0),
            ("grid.pulse_samples", self.grid.pulse_samples, 1.0),
            ("grid.ring_down", self.grid.ring_down, 0.0),
        ] {
            if !(v > lo) || !v.is_finite() {
                return Err(Error::Config {
                    key: key.into(),
                    message: format!("must be finite and greater than {lo}"),
                });
            }
        }
        if let Some(t) = &self.thermal {
            if let Some(temp) = t.temperature {
                if !(temp >= 0.0) || !temp.is_finite() {
                    return Err(Error::Config {
                        key: "thermal.temperature".into(),
                        message: "must be finite and non-negative".into(),
                    });
                }
            }
            if let Some(w) = t.omega_m {
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::Config {
                        key: "thermal.omega_m".into(),
                        message: "must be positive".into(),
                    });
                }
            }
        }
        Ok(RunConfig {
            chain,
            pulse,
            solver: self.solver,
            grid: self.grid,
            thermal: self.thermal,
            app: self.app,
        })
    }
}
