// SPDX-License-Identifier: Apache-2.0

//! Command implementations. Each writes its files and a manifest into the
//! output directory.

use std::path::Path;

use serde::Serialize;

use cascade_core::applications::{Preset, Scenario, ScenarioResult};
use cascade_core::chain::{diagnose_regime, MechanicalSignal, Regime, RegimeDiagnostics};
use cascade_core::config::RunConfig;
use cascade_core::fields::photon_number;
use cascade_core::metrology::{
    optimal_n, qfi_free, snr_bound, t_max, thermal_correction, MetrologyReport, ThermalParams,
};
use cascade_core::output::fmt12;
use cascade_core::solver::{resolve_method, solve_on_grid, Method};
use cascade_core::Error;

use crate::sweep::{sweep_rows, SweepParam, SweepRow};
use crate::{resolved_document, CliError, CliResult, OutputDir, RunManifest};

pub fn cmd_simulate(cfg: &RunConfig, method: Method, out: &Path) -> CliResult<RunManifest> {
    let diagnostics = diagnose_regime(&cfg.chain, &cfg.pulse);
    let resolved = resolve_method(&cfg.chain, &cfg.pulse, method);
    let grid = cfg.chain.time_grid(&cfg.pulse, &cfg.grid)?;
    let sol = solve_on_grid(&cfg.chain, &cfg.pulse, resolved, &cfg.solver, &grid)?;

    let doc = resolved_document(Some(cfg), &serde_json::json!({ "method": resolved }));
    let mut dir = OutputDir::create(out, "simulate", &doc)?;
    dir.write_json(
        "solution.json",
        &serde_json::json!({
            "requested_method": method,
            "diagnostics": diagnostics,
            "solution": sol.to_json(true),
        }),
    )?;
    let mut csv = Vec::new();
    sol.write_spectrum_csv(&mut csv)?;
    dir.write("spectrum.csv", &csv)?;
    dir.finish()
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    params: &[SweepParam],
    shots: u32,
    out: &Path,
) -> CliResult<RunManifest> {
    let rows = sweep_rows(cfg, params, shots)?;
    let doc = resolved_document(
        Some(cfg),
        &serde_json::json!({ "params": params, "shots": shots }),
    );
    let mut dir = OutputDir::create(out, "sweep", &doc)?;
    let mut text = String::from(SweepRow::HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    dir.write("sweep.csv", text.as_bytes())?;
    if let Some(eta) = params.iter().find(|p| p.name == "eta") {
        dir.write("nopt.csv", nopt_csv(&nopt_rows(&eta.values)?).as_bytes())?;
    }
    dir.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: Method,
    /// Relative L2 distance of the output spectrum from the recursion's.
    pub discrepancy: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub diagnostics: RegimeDiagnostics,
    pub rows: Vec<CompareRow>,
}

pub const COMPARED: [Method; 5] = [
    Method::FirstOrder,
    Method::StrobWeak,
    Method::StrobStrong,
    Method::CwFinite,
    Method::CwContinuous,
];

pub fn compare_report(cfg: &RunConfig) -> CliResult<CompareReport> {
    let grid = cfg.chain.time_grid(&cfg.pulse, &cfg.grid)?;
    let reference =
        solve_on_grid(&cfg.chain, &cfg.pulse, Method::Direct, &cfg.solver, &grid)?.output_spectrum()?;
    let rows = COMPARED
        .iter()
        .map(|&m| {
            let result = solve_on_grid(&cfg.chain, &cfg.pulse, m, &cfg.solver, &grid)
                .and_then(|s| s.output_spectrum())
                .and_then(|s| s.relative_l2(&reference));
            match result {
                Ok(d) => CompareRow {
                    method: m,
                    discrepancy: Some(d),
                    status: "ok".into(),
                },
                Err(e) => CompareRow {
                    method: m,
                    discrepancy: None,
                    status: e.to_string(),
                },
            }
        })
        .collect();
    Ok(CompareReport {
        diagnostics: diagnose_regime(&cfg.chain, &cfg.pulse),
        rows,
    })
}

pub fn cmd_compare(cfg: &RunConfig, out: &Path) -> CliResult<RunManifest> {
    let report = compare_report(cfg)?;
    let doc = resolved_document(Some(cfg), &serde_json::json!({}));
    let mut dir = OutputDir::create(out, "compare", &doc)?;
    let mut text = String::from("method,discrepancy,status\n");
    for r in &report.rows {
        let d = r.discrepancy.map(fmt12).unwrap_or_default();
        text.push_str(&format!("{},{d},\"{}\"\n", r.method, r.status.replace('"', "'")));
    }
    dir.write("compare.csv", text.as_bytes())?;
    dir.write_json("compare.json", &report)?;
    dir.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalReport {
    pub temperature: f64,
    pub omega_m: f64,
    pub q_amp: f64,
    pub n_in: f64,
    pub h0: f64,
    pub n_bar: f64,
    pub delta_h: f64,
    pub relative_correction: f64,
    pub t_max: f64,
    /// `T ≤ T_max/10`.
    pub valid: bool,
}

pub fn thermal_report(cfg: &RunConfig, temperature: Option<f64>) -> CliResult<ThermalReport> {
    let chain = &cfg.chain;
    if chain.len() != 1 {
        return Err(CliError::config("cavities", "thermal needs exactly one cavity"));
    }
    let regime = diagnose_regime(chain, &cfg.pulse).regime;
    if regime != Regime::Stroboscopic {
        return Err(CliError::config(
            "regime",
            format!(
                "thermal limits need a stroboscopic configuration, found {}",
                cascade_core::solver::regime_label(regime)
            ),
        ));
    }
    let section = cfg.thermal.clone().unwrap_or(cascade_core::config::ThermalSection {
        temperature: None,
        omega_m: None,
    });
    let temperature = temperature
        .or(section.temperature)
        .ok_or_else(|| CliError::config("thermal.temperature", "no temperature given"))?;
    let omega_m = section
        .omega_m
        .unwrap_or_else(|| chain.signals[0].mechanical_frequency());
    if !(omega_m > 0.0) {
        return Err(CliError::config(
            "thermal.omega_m",
            "the signal has no mechanical frequency; set thermal.omega_m",
        ));
    }
    let q_amp = chain.shifted_profile(1, 0.0).0;
    let params = ThermalParams::new(temperature, omega_m, q_amp)?;
    let c = chain.cavities[0];
    let n_in = photon_number(&cfg.pulse);
    let h0 = qfi_free(c.g, c.kappa, c.delta, q_amp, n_in)?;
    let corr = thermal_correction(h0, &params)?;
    let t_max = t_max(h0, omega_m, q_amp)?;
    Ok(ThermalReport {
        temperature,
        omega_m,
        q_amp,
        n_in,
        h0,
        n_bar: params.n_bar(),
        delta_h: corr.delta_h,
        relative_correction: corr.relative,
        t_max,
        valid: temperature <= t_max / 10.0,
    })
}

pub fn cmd_thermal(cfg: &RunConfig, temperature: Option<f64>, out: &Path) -> CliResult<RunManifest> {
    let report = thermal_report(cfg, temperature)?;
    let doc = resolved_document(
        Some(cfg),
        &serde_json::json!({ "temperature": report.temperature }),
    );
    let mut dir = OutputDir::create(out, "thermal", &doc)?;
    dir.write_json("thermal.json", &report)?;
    dir.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoptRow {
    pub eta: f64,
    /// `None` for η = 1, where the ratio grows without bound.
    pub n_opt: Option<usize>,
    pub ratio_max: Option<f64>,
    pub ties: Vec<usize>,
    pub log_floor: Option<usize>,
    pub log_ceil: Option<usize>,
    pub in_log_candidates: Option<bool>,
}

pub fn nopt_rows(etas: &[f64]) -> CliResult<Vec<NoptRow>> {
    if etas.is_empty() {
        return Err(CliError::config("eta", "empty list"));
    }
    etas.iter()
        .map(|&eta| match optimal_n(eta) {
            Ok(o) => Ok(NoptRow {
                eta,
                n_opt: Some(o.n_opt),
                ratio_max: Some(o.ratio_max),
                ties: o.ties,
                log_floor: o.log_candidates.map(|c| c.0),
                log_ceil: o.log_candidates.map(|c| c.1),
                in_log_candidates: Some(o.in_log_candidates),
            }),
            Err(Error::UnboundedGrowth) => Ok(NoptRow {
                eta,
                n_opt: None,
                ratio_max: None,
                ties: Vec::new(),
                log_floor: None,
                log_ceil: None,
                in_log_candidates: None,
            }),
            Err(e) => Err(CliError::from(e)),
        })
        .collect()
}

fn nopt_csv(rows: &[NoptRow]) -> String {
    let opt = |v: Option<usize>| v.map(|n| n.to_string()).unwrap_or_else(|| "unbounded".into());
    let mut text = String::from("eta,N_opt,ratio_max,ties,log_floor,log_ceil\n");
    for r in rows {
        let ties = r.ties.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        text.push_str(&format!(
            "{},{},{},{ties},{},{}\n",
            fmt12(r.eta),
            opt(r.n_opt),
            r.ratio_max.map(fmt12).unwrap_or_else(|| "inf".into()),
            opt(r.log_floor),
            opt(r.log_ceil),
        ));
    }
    text
}

pub fn cmd_nopt(etas: &[f64], out: &Path) -> CliResult<RunManifest> {
    let rows = nopt_rows(etas)?;
    let doc = resolved_document(None, &serde_json::json!({ "eta": etas }));
    let mut dir = OutputDir::create(out, "nopt", &doc)?;
    dir.write("nopt.csv", nopt_csv(&rows).as_bytes())?;
    dir.write_json("nopt.json", &rows)?;
    dir.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppReport {
    pub scenario: Scenario,
    pub result: ScenarioResult,
    /// Present when a cascade configuration was supplied.
    pub signal: Option<MechanicalSignal>,
    pub metrology: Option<MetrologyReport>,
}

pub fn app_report(cfg: Option<&RunConfig>, preset: Option<&str>) -> CliResult<AppReport> {
    let section = cfg.and_then(|c| c.app.clone());
    let preset = match (preset, &section) {
        (Some(p), _) => p.parse::<Preset>()?,
        (None, Some(s)) => s.preset,
        (None, None) => return Err(CliError::config("app.preset", "no preset given")),
    };
    let overrides = section.as_ref().map(|s| s.params).unwrap_or_default();
    let theta = section.as_ref().map_or(1.0, |s| s.theta);
    let scenario = Scenario::new(preset, &overrides)?;
    let result = scenario.evaluate()?;
    let (signal, metrology) = match cfg {
        Some(cfg) => {
            let signal = result.to_signal(theta, cfg.pulse.tau)?;
            let mut chain = cfg.chain.clone();
            chain.signals = vec![signal.clone(); chain.len()];
            let regime = diagnose_regime(&chain, &cfg.pulse).regime;
            let grid = chain.time_grid(&cfg.pulse, &cfg.grid)?;
            let report = snr_bound(&chain, &cfg.pulse, regime, 1, &grid)?;
            (Some(signal), Some(report))
        }
        None => (None, None),
    };
    Ok(AppReport {
        scenario,
        result,
        signal,
        metrology,
    })
}

pub fn cmd_app(cfg: Option<&RunConfig>, preset: Option<&str>, out: &Path) -> CliResult<RunManifest> {
    let report = app_report(cfg, preset)?;
    let doc = resolved_document(cfg, &serde_json::json!({ "scenario": report.scenario }));
    let mut dir = OutputDir::create(out, "app", &doc)?;
    dir.write_json("app.json", &report)?;
    dir.finish()
}
