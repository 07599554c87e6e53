// SPDX-License-Identifier: Apache-2.0

//! Command-line front-end: configuration loading, solver and metrology
//! dispatch, parameter sweeps and result files.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use cascade_core::config::RunConfig;
use cascade_core::solver::Method;

pub mod commands;
pub mod sweep;

pub use commands::{
    app_report, cmd_app, cmd_compare, cmd_nopt, cmd_simulate, cmd_sweep, cmd_thermal,
    compare_report, nopt_rows, thermal_report, AppReport, CompareReport, CompareRow, NoptRow,
    ThermalReport,
};
pub use sweep::{parse_sweep, sweep_rows, SweepParam, SweepRow};

#[derive(Debug, Parser)]
#[command(name = "cascade", version, about = "Cascaded optomechanical sensing simulations")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// direct, first-order, strob-weak, strob-strong, cw-finite, cw-continuous or auto.
    #[arg(long, global = true, default_value = "auto")]
    pub method: String,
    /// Reserved; every command is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the cascade and write the output field and spectrum.
    Simulate,
    /// Evaluate ratio, SNR bound and QFI over a parameter grid.
    Sweep {
        /// `name=v1,v2,...`, `name=a..b` or `name=a..b:step`; names are
        /// eta, N, g, kappa, delta and tau.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        /// Number of repeated pulses.
        #[arg(long, default_value_t = 1)]
        shots: u32,
    },
    /// Discrepancies of every closed form against the direct recursion.
    Compare,
    /// Thermal correction and temperature limit for a single cavity.
    Thermal {
        /// Bath temperature, K; overrides `thermal.temperature`.
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Loss-optimal number of equal cavities.
    Nopt {
        #[arg(long, value_delimiter = ',', required = true)]
        eta: Vec<f64>,
    },
    /// Signal amplitude of a physical scenario and its sensitivity.
    App {
        /// dm, gw or lhc; overrides `app.preset`.
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub key: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            kind: ErrorKind::Io,
            key: None,
            message: format!("{}: {e}", path.display()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Io => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&serde_json::json!({ "error": self })).expect("error serialises")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "{k}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cascade_core::Error> for CliError {
    fn from(e: cascade_core::Error) -> Self {
        use cascade_core::Error as E;
        match e {
            E::Config { key, message } => Self::config(key, message),
            E::InvalidParameter { name, reason } => Self::config(name, reason),
            other => Self {
                kind: ErrorKind::Numeric,
                key: None,
                message: other.to_string(),
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the resolved configuration and command arguments.
    pub config_hash: String,
    pub timestamp: String,
    pub software_version: String,
    pub outputs: Vec<PathBuf>,
}

/// Collects output files for one command and writes its manifest last.
pub struct OutputDir {
    dir: PathBuf,
    command: String,
    hash: String,
    outputs: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path, command: &str, resolved: &serde_json::Value) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            hash: config_hash(resolved),
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError {
            kind: ErrorKind::Numeric,
            key: None,
            message: e.to_string(),
        })?;
        self.write(name, text.as_bytes())
    }

    pub fn finish(self) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            command: self.command,
            config_hash: self.hash,
            timestamp: chrono::Utc::now().to_rfc3339(),
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.outputs,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Hex SHA-256 of the canonical JSON text of `resolved`.
pub fn config_hash(resolved: &serde_json::Value) -> String {
    let text = serde_json::to_string(resolved).expect("json value serialises");
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Resolved configuration and command arguments as one hashed document.
pub fn resolved_document<A: Serialize>(cfg: Option<&RunConfig>, args: &A) -> serde_json::Value {
    serde_json::json!({ "config": cfg, "args": args })
}

pub fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let path = path.ok_or_else(|| CliError::config("--config", "this command needs a config file"))?;
    Ok(RunConfig::from_path(path)?)
}

pub fn parse_method(s: &str) -> CliResult<Method> {
    s.parse::<Method>()
        .map_err(|e| CliError::config("--method", e.to_string()))
}

pub fn run(cli: &Cli) -> CliResult<RunManifest> {
    let method = parse_method(&cli.method)?;
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Simulate => cmd_simulate(&load_config(config)?, method, &cli.out),
        Command::Sweep { params, shots } => {
            let cfg = load_config(config)?;
            let parsed = params
                .iter()
                .map(|p| parse_sweep(p))
                .collect::<CliResult<Vec<_>>>()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads.unwrap_or(0))
                .build()
                .map_err(|e| CliError::config("--threads", e.to_string()))?;
            pool.install(|| cmd_sweep(&cfg, &parsed, *shots, &cli.out))
        }
        Command::Compare => cmd_compare(&load_config(config)?, &cli.out),
        Command::Thermal { temperature } => {
            cmd_thermal(&load_config(config)?, *temperature, &cli.out)
        }
        Command::Nopt { eta } => cmd_nopt(eta, &cli.out),
        Command::App { preset } => {
            let cfg = config.map(RunConfig::from_path).transpose()?;
            cmd_app(cfg.as_ref(), preset.as_deref(), &cli.out)
        }
    }
}
