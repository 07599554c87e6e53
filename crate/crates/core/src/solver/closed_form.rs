// SPDX-License-Identifier: Apache-2.0

//! Closed-form outputs in the stroboscopic and continuous-wave regimes.

use num_complex::Complex64;

use super::{regime_warning, CascadeSolution, Method};
use crate::chain::{halfline_inverse_fourier, mech_spectrum, CavityParams, ChainConfig, Regime};
use crate::error::Result;
use crate::fields::{FreqGrid, Grid, PulseParams, SampledField};

fn prepare(
    cfg: &ChainConfig,
    p: &PulseParams,
    expected: Regime,
    method: Method,
) -> Result<Vec<String>> {
    cfg.validate()?;
    p.validate()?;
    Ok(regime_warning(cfg, p, expected, method).into_iter().collect())
}

/// Applies a per-cavity spectral factor cumulatively to the input pulse.
fn cumulative(
    p: &PulseParams,
    grid: &FreqGrid,
    factors: impl Iterator<Item = Box<dyn Fn(f64) -> Complex64>>,
) -> Result<Vec<SampledField>> {
    let mut current: Vec<Complex64> = grid
        .omegas()
        .map(|w| Complex64::new(p.spectrum(w), 0.0))
        .collect();
    let mut fields = Vec::new();
    for f in factors {
        for (i, v) in current.iter_mut().enumerate() {
            *v *= f(grid.omega(i));
        }
        fields.push(SampledField::new(Grid::Freq(*grid), current.clone())?);
    }
    Ok(fields)
}

/// `β̃_n = exp{iΣ_j[φ_j + 2ε_j Q_j(0)(1 − cos φ_j)]} β̃`.
pub fn solve_stroboscopic_weak(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &FreqGrid,
) -> Result<CascadeSolution> {
    let warnings = prepare(cfg, p, Regime::Stroboscopic, Method::StrobWeak)?;
    let factors = cfg.cavities.iter().enumerate().map(|(i, &c)| {
        let q0 = cfg.shifted_profile(i + 1, 0.0).0;
        let a = 2.0 * c.epsilon() * q0;
        Box::new(move |w: f64| {
            Complex64::from_polar(1.0, c.response_phase(w) + a * c.one_minus_cos_phase(w))
        }) as Box<dyn Fn(f64) -> Complex64>
    });
    let fields = cumulative(p, grid, factors)?;
    CascadeSolution::assemble(Method::StrobWeak, fields, warnings, cfg)
}

/// `β̃_n = e^{iΣχ_k} β̃` with `e^{iχ_n(ω)} = e^{iφ_n(ω + g_n Q_n(0))}`, valid
/// for any coupling while the displacement is frozen over the pulse.
pub fn solve_stroboscopic_strong(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &FreqGrid,
) -> Result<CascadeSolution> {
    let warnings = prepare(cfg, p, Regime::Stroboscopic, Method::StrobStrong)?;
    let factors = cfg.cavities.iter().enumerate().map(|(i, &c)| {
        let shift = c.g * cfg.shifted_profile(i + 1, 0.0).0;
        Box::new(move |w: f64| c.response_factor(w + shift)) as Box<dyn Fn(f64) -> Complex64>
    });
    let fields = cumulative(p, grid, factors)?;
    CascadeSolution::assemble(Method::StrobStrong, fields, warnings, cfg)
}

/// `(g κ/Γ²) e^{−iφ(0)}`, the on-resonance sideband weight of one cavity.
pub(crate) fn sideband_weight(c: &CavityParams) -> Complex64 {
    let gamma = c.gamma();
    c.g * c.kappa / (gamma * gamma) * c.response_factor(0.0).conj()
}

/// Carrier phase `e^{iΣ_{j≤n} φ_j(0)}` for every prefix `n`.
fn carrier_phases(cfg: &ChainConfig) -> Vec<Complex64> {
    cfg.cavities
        .iter()
        .scan(Complex64::new(1.0, 0.0), |acc, c| {
            *acc *= c.response_factor(0.0);
            Some(*acc)
        })
        .collect()
}

/// `β̃_n = e^{iΣφ_j(0)} [β̃ − iβ(0) Σ_k (g_kκ_k/Γ_k²) e^{−iφ_k(0)} Q̃_k]`.
pub fn solve_cw_finite(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &FreqGrid,
) -> Result<CascadeSolution> {
    let warnings = prepare(cfg, p, Regime::CwFiniteSignal, Method::CwFinite)?;
    let carrier: Vec<Complex64> = grid
        .omegas()
        .map(|w| Complex64::new(p.spectrum(w), 0.0))
        .collect();
    let mut sidebands = vec![Complex64::new(0.0, 0.0); grid.n_points];
    let mut fields = Vec::with_capacity(cfg.len());
    for (k, (c, phase)) in cfg.cavities.iter().zip(carrier_phases(cfg)).enumerate() {
        let q = mech_spectrum(&cfg.signals[k], k + 1, cfg.delay_t, grid)?.to_field(grid);
        let weight = Complex64::new(0.0, -p.beta_bar) * sideband_weight(c);
        for (s, v) in sidebands.iter_mut().zip(q.values()) {
            *s += weight * v;
        }
        let values = carrier
            .iter()
            .zip(&sidebands)
            .map(|(b, s)| phase * (b + s))
            .collect();
        fields.push(SampledField::new(Grid::Freq(*grid), values)?);
    }
    CascadeSolution::assemble(Method::CwFinite, fields, warnings, cfg)
}

/// Carrier plus pulse-shaped sidebands at `ω ∓ Ω_k`:
/// `e^{iΣφ_j(0)} [β̃(ω) − iΣ_k (g_kκ_k/Γ_k²) e^{−iφ_k(0)}
/// (β̃(ω+Ω_k) F_k* + β̃(ω−Ω_k) F_k)]`, `F_k = ∫₀^∞ dΩ Q̃_k(Ω)/√(2π)`.
pub fn solve_cw_continuous(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &FreqGrid,
) -> Result<CascadeSolution> {
    let warnings = prepare(cfg, p, Regime::CwContinuousSignal, Method::CwContinuous)?;
    let mut current: Vec<Complex64> = grid
        .omegas()
        .map(|w| Complex64::new(p.spectrum(w), 0.0))
        .collect();
    let mut fields = Vec::with_capacity(cfg.len());
    for (k, (c, phase)) in cfg.cavities.iter().zip(carrier_phases(cfg)).enumerate() {
        let s = &cfg.signals[k];
        let f_plus = halfline_inverse_fourier(s, k + 1, cfg.delay_t)?;
        let omega = s.mechanical_frequency();
        let weight = Complex64::new(0.0, -1.0) * sideband_weight(c);
        for (i, v) in current.iter_mut().enumerate() {
            let w = grid.omega(i);
            *v += weight
                * (p.spectrum(w + omega) * f_plus.conj() + p.spectrum(w - omega) * f_plus);
        }
        fields.push(SampledField::new(
            Grid::Freq(*grid),
            current.iter().map(|v| v * phase).collect(),
        )?);
    }
    CascadeSolution::assemble(Method::CwContinuous, fields, warnings, cfg)
}
