// SPDX-License-Identifier: Apache-2.0

//! Output amplitude of the cascade: the time-domain recursion, the generic
//! first-order frequency solution, and the regime closed forms.

mod closed_form;
mod direct;
mod first_order;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{diagnose_regime, ChainConfig, Regime};
use crate::error::{Error, Result};
use crate::fields::{forward_transform, FreqGrid, Grid, GridRule, PulseParams, SampledField};
use crate::output::fmt12;

pub use closed_form::{
    solve_cw_continuous, solve_cw_finite, solve_stroboscopic_strong, solve_stroboscopic_weak,
};
pub(crate) use closed_form::sideband_weight;
pub use direct::{solve_direct, MAX_KAPPA_DT};
pub use first_order::{solve_first_order, WEAK_COUPLING_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Memory-integral truncation in units of 1/κ.
    pub memory_cutoff: f64,
    /// Tolerance for the step-halving self-convergence check.
    pub rel_tolerance: f64,
    /// Re-solve on a grid with half the step and compare output norms.
    pub check_convergence: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            memory_cutoff: 40.0,
            rel_tolerance: 1e-6,
            check_convergence: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.memory_cutoff >= 10.0) || !self.memory_cutoff.is_finite() {
            return Err(Error::invalid("memory_cutoff", "must be at least 10"));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::invalid("rel_tolerance", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    FirstOrder,
    StrobWeak,
    StrobStrong,
    CwFinite,
    CwContinuous,
    Auto,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Direct,
        Method::FirstOrder,
        Method::StrobWeak,
        Method::StrobStrong,
        Method::CwFinite,
        Method::CwContinuous,
        Method::Auto,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::FirstOrder => "first-order",
            Method::StrobWeak => "strob-weak",
            Method::StrobStrong => "strob-strong",
            Method::CwFinite => "cw-finite",
            Method::CwContinuous => "cw-continuous",
            Method::Auto => "auto",
        }
    }

    /// Closed form belonging to a regime. Outside all regimes the first-order
    /// solution is used for weak coupling and the recursion otherwise.
    pub fn for_regime(regime: Regime, max_epsilon: f64) -> Method {
        match regime {
            Regime::Stroboscopic => Method::StrobWeak,
            Regime::CwFiniteSignal => Method::CwFinite,
            Regime::CwContinuousSignal => Method::CwContinuous,
            Regime::NumericOnly if max_epsilon <= WEAK_COUPLING_LIMIT => Method::FirstOrder,
            Regime::NumericOnly => Method::Direct,
        }
    }

    /// Whether the output is affine in the common signal strength.
    pub fn is_affine(self) -> bool {
        matches!(
            self,
            Method::FirstOrder | Method::CwFinite | Method::CwContinuous
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "method",
                    format!(
                        "unknown method `{s}`; expected one of {}",
                        Method::ALL.map(Method::label).join(", ")
                    ),
                )
            })
    }
}

/// Per-cavity amplitudes `β_n` in the pulse frame and the lab-frame output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeSolution {
    pub method: Method,
    pub per_cavity_fields: Vec<SampledField>,
    pub final_output_amplitude: SampledField,
    pub warnings: Vec<String>,
}

impl CascadeSolution {
    pub(crate) fn assemble(
        method: Method,
        per_cavity_fields: Vec<SampledField>,
        warnings: Vec<String>,
        cfg: &ChainConfig,
    ) -> Result<Self> {
        let mut sol = Self {
            method,
            final_output_amplitude: per_cavity_fields
                .last()
                .cloned()
                .ok_or_else(|| Error::invalid("cavities", "need at least one cavity"))?,
            per_cavity_fields,
            warnings,
        };
        sol.final_output_amplitude = apply_output_bookkeeping(&sol, cfg)?;
        Ok(sol)
    }

    /// `β_N` in the pulse frame.
    pub fn last_field(&self) -> &SampledField {
        self.per_cavity_fields
            .last()
            .expect("solutions hold at least one cavity")
    }

    /// `β̃_N(ω)` in the pulse frame, transforming if needed.
    pub fn last_spectrum(&self) -> Result<SampledField> {
        to_spectrum(self.last_field())
    }

    /// Spectrum of the lab-frame output.
    pub fn output_spectrum(&self) -> Result<SampledField> {
        to_spectrum(&self.final_output_amplitude)
    }

    /// JSON document with the method label, warnings, output field and,
    /// optionally, every intermediate field.
    pub fn to_json(&self, include_per_cavity: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "method": self.method,
            "warnings": self.warnings,
            "final_output_amplitude": self.final_output_amplitude,
        });
        if include_per_cavity {
            v["per_cavity_fields"] = serde_json::json!(self.per_cavity_fields);
        }
        v
    }

    /// CSV of the output power spectrum `|β̃_N(ω)|²` (η and phase included).
    pub fn write_spectrum_csv<W: Write>(&self, w: W) -> Result<()> {
        self.output_spectrum()?
            .write_power_csv(w)
            .map_err(|e| Error::invalid("output", e.to_string()))
    }
}

fn to_spectrum(f: &SampledField) -> Result<SampledField> {
    match f.grid() {
        Grid::Freq(_) => Ok(f.clone()),
        Grid::Time(_) => forward_transform(f),
    }
}

/// Lab-frame mean output after the last cavity:
/// `η^{N−1} β_N(t − (N−1)T) e^{i(N−1)ω_L T}`.
pub fn apply_output_bookkeeping(sol: &CascadeSolution, cfg: &ChainConfig) -> Result<SampledField> {
    let links = cfg.len() as i32 - 1;
    let delay = f64::from(links) * cfg.delay_t;
    let factor = Complex64::from_polar(cfg.eta.powi(links), delay * cfg.omega_l);
    let last = sol.last_field();
    match *last.grid() {
        Grid::Time(_) => Ok(last.time_shifted(delay)?.scaled(factor)),
        Grid::Freq(g) => {
            let grid = FreqGrid {
                time_start: g.time_start + delay,
                ..g
            };
            let values = last
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * factor * Complex64::from_polar(1.0, g.omega(i) * delay))
                .collect();
            SampledField::new(Grid::Freq(grid), values)
        }
    }
}

/// Warning text when the configuration sits outside a closed form's regime.
pub(crate) fn regime_warning(
    cfg: &ChainConfig,
    p: &PulseParams,
    expected: Regime,
    method: Method,
) -> Option<String> {
    let found = diagnose_regime(cfg, p).regime;
    (found != expected).then(|| {
        format!(
            "{method} assumes the {} regime but the configuration is diagnosed as {}",
            regime_label(expected),
            regime_label(found)
        )
    })
}

pub fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::Stroboscopic => "stroboscopic",
        Regime::CwFiniteSignal => "cw-finite-signal",
        Regime::CwContinuousSignal => "cw-continuous-signal",
        Regime::NumericOnly => "numeric-only",
    }
}

/// Concrete method for `requested`, resolving `Auto` from the diagnostics.
pub fn resolve_method(cfg: &ChainConfig, p: &PulseParams, requested: Method) -> Method {
    match requested {
        Method::Auto => Method::for_regime(diagnose_regime(cfg, p).regime, cfg.max_epsilon()),
        m => m,
    }
}

/// Solves with the grid chosen by `rule`. Frequency-domain methods use the
/// grid conjugate to the time grid so that all methods are comparable.
pub fn solve(
    cfg: &ChainConfig,
    p: &PulseParams,
    method: Method,
    opts: &SolverOptions,
    rule: &GridRule,
) -> Result<CascadeSolution> {
    let grid = cfg.time_grid(p, rule)?;
    solve_on_grid(cfg, p, method, opts, &grid)
}

pub fn solve_on_grid(
    cfg: &ChainConfig,
    p: &PulseParams,
    method: Method,
    opts: &SolverOptions,
    grid: &crate::fields::TimeGrid,
) -> Result<CascadeSolution> {
    let fg = grid.conjugate();
    match resolve_method(cfg, p, method) {
        Method::Direct => solve_direct(cfg, p, grid, opts),
        Method::FirstOrder => solve_first_order(cfg, p, &fg),
        Method::StrobWeak => solve_stroboscopic_weak(cfg, p, &fg),
        Method::StrobStrong => solve_stroboscopic_strong(cfg, p, &fg),
        Method::CwFinite => solve_cw_finite(cfg, p, &fg),
        Method::CwContinuous => solve_cw_continuous(cfg, p, &fg),
        Method::Auto => unreachable!("auto is resolved above"),
    }
}

/// Output energy deviation `(∫|a|² − ∫|b|²)/∫|b|²` evaluated as
/// `Σ Re((a−b)·conj(a+b))` to avoid cancellation.
pub fn relative_energy_change(a: &SampledField, b: &SampledField) -> Result<f64> {
    a.sub(b)?;
    let num: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| ((x - y) * (x + y).conj()).re)
        .sum();
    let den: f64 = b.values().iter().map(|v| v.norm_sqr()).sum();
    Ok(num / den)
}

/// `(ω, |f|²)` rows formatted like the spectrum CSV, for reports.
pub fn power_rows(f: &SampledField) -> Vec<(String, String)> {
    f.values()
        .iter()
        .enumerate()
        .map(|(i, v)| (fmt12(f.coordinate(i)), fmt12(v.norm_sqr())))
        .collect()
}
