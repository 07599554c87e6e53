// SPDX-License-Identifier: Apache-2.0

//! Cartesian parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use cascade_core::chain::{diagnose_regime, ChainConfig, Regime};
use cascade_core::config::RunConfig;
use cascade_core::fields::PulseParams;
use cascade_core::metrology::{equal_cavity_ratio, snr_bound};
use cascade_core::output::fmt12;

use crate::{CliError, CliResult};

pub const SWEEP_NAMES: [&str; 6] = ["eta", "N", "g", "kappa", "delta", "tau"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepParam {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parses `name=v1,v2`, `name=a..b` (unit steps, inclusive) or `name=a..b:step`.
pub fn parse_sweep(spec: &str) -> CliResult<SweepParam> {
    let key = format!("--param {spec}");
    let (name, list) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(&key, "expected name=values"))?;
    let name = name.trim();
    if !SWEEP_NAMES.contains(&name) {
        return Err(CliError::config(
            &key,
            format!("unknown parameter `{name}`; expected one of {}", SWEEP_NAMES.join(", ")),
        ));
    }
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(&key, format!("`{s}` is not a number")))
    };
    let values = if let Some((a, rest)) = list.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, s)) => (number(b)?, number(s)?),
            None => (number(rest)?, 1.0),
        };
        let a = number(a)?;
        if !(step > 0.0) || b < a {
            return Err(CliError::config(&key, "ranges need a ≤ b and a positive step"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| a + i as f64 * step).collect()
    } else {
        list.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(number)
            .collect::<CliResult<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(CliError::config(&key, "empty sweep list"));
    }
    if name == "N" && values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
        return Err(CliError::config(&key, "N takes positive integers"));
    }
    Ok(SweepParam {
        name: name.to_string(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub n: usize,
    pub g: f64,
    pub kappa: f64,
    pub delta: f64,
    pub tau: f64,
    pub regime: Regime,
    pub ratio: f64,
    pub snr_bound: f64,
    pub qfi: f64,
}

impl SweepRow {
    pub const HEADER: &'static str = "eta,N,g,kappa,delta,tau,regime,ratio,snr_bound,qfi";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt12(self.eta),
            self.n,
            fmt12(self.g),
            fmt12(self.kappa),
            fmt12(self.delta),
            fmt12(self.tau),
            cascade_core::solver::regime_label(self.regime),
            fmt12(self.ratio),
            fmt12(self.snr_bound),
            fmt12(self.qfi),
        )
    }
}

/// Every combination of the swept values, first parameter slowest.
fn grid_points(params: &[SweepParam]) -> Vec<Vec<(&str, f64)>> {
    params.iter().fold(vec![Vec::new()], |acc, p| {
        acc.into_iter()
            .flat_map(|prefix| {
                p.values.iter().map(move |&v| {
                    let mut point = prefix.clone();
                    point.push((p.name.as_str(), v));
                    point
                })
            })
            .collect()
    })
}

/// Configuration at one grid point. Sweeping N repeats the first cavity and
/// signal; g, kappa and delta apply to every cavity; tau keeps β̄ fixed.
fn configure(base: &RunConfig, point: &[(&str, f64)]) -> CliResult<(ChainConfig, PulseParams)> {
    let mut chain = base.chain.clone();
    let mut pulse = base.pulse;
    for &(name, v) in point {
        match name {
            "N" => {
                let n = v as usize;
                chain.cavities = vec![chain.cavities[0]; n];
                chain.signals = vec![chain.signals[0].clone(); n];
            }
            "eta" => chain.eta = v,
            "tau" => pulse.tau = v,
            _ => {}
        }
    }
    for &(name, v) in point {
        for c in chain.cavities.iter_mut() {
            match name {
                "g" => c.g = v,
                "kappa" => c.kappa = v,
                "delta" => c.delta = v,
                _ => {}
            }
        }
    }
    chain.validate()?;
    pulse.validate()?;
    Ok((chain, pulse))
}

fn evaluate(base: &RunConfig, point: &[(&str, f64)], shots: u32) -> CliResult<SweepRow> {
    let (chain, pulse) = configure(base, point)?;
    let regime = diagnose_regime(&chain, &pulse).regime;
    let grid = chain.time_grid(&pulse, &base.grid)?;
    let report = snr_bound(&chain, &pulse, regime, shots, &grid)?;
    let c = chain.cavities[0];
    Ok(SweepRow {
        eta: chain.eta,
        n: chain.len(),
        g: c.g,
        kappa: c.kappa,
        delta: c.delta,
        tau: pulse.tau,
        regime,
        ratio: equal_cavity_ratio(chain.len(), chain.eta),
        snr_bound: report.snr_bound,
        qfi: report.qfi,
    })
}

/// Rows in grid order; points are evaluated on the current rayon pool.
pub fn sweep_rows(base: &RunConfig, params: &[SweepParam], shots: u32) -> CliResult<Vec<SweepRow>> {
    if params.is_empty() {
        return Err(CliError::config("--param", "empty sweep"));
    }
    for (i, p) in params.iter().enumerate() {
        if params[..i].iter().any(|q| q.name == p.name) {
            return Err(CliError::config("--param", format!("`{}` swept twice", p.name)));
        }
    }
    grid_points(params)
        .par_iter()
        .map(|point| evaluate(base, point, shots))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!(parse_sweep("eta=1,0.9,0.8").unwrap().values, vec![1.0, 0.9, 0.8]);
        let n = parse_sweep("N=1..30").unwrap();
        assert_eq!(n.values.len(), 30);
        assert_eq!(n.values[29], 30.0);
        let r = parse_sweep("tau=1..2:0.25").unwrap();
        assert_eq!(r.values, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["eta=", "speed=1", "eta", "N=0.5", "eta=1..0", "g=x"] {
            assert_eq!(parse_sweep(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn grid_order_is_row_major() {
        let a = SweepParam { name: "eta".into(), values: vec![1.0, 0.5] };
        let b = SweepParam { name: "N".into(), values: vec![1.0, 2.0, 3.0] };
        let params = [a, b];
        let pts = grid_points(&params);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![("eta", 1.0), ("N", 2.0)]);
        assert_eq!(pts[3], vec![("eta", 0.5), ("N", 1.0)]);
    }
}
