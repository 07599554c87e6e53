// SPDX-License-Identifier: Apache-2.0

//! First-order solution of the frequency recursion,
//! `β̃_n = e^{iφ_n} β̃_{n−1} − iε_n 𝓛_n[e^{iΣ_{ℓ<n}φ_ℓ} β̃]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CascadeSolution, Method};
use crate::chain::{
    lag_spectrum, mech_spectrum, CavityParams, ChainConfig, MechSpectrum, SignalShape,
};
use crate::error::Result;
use crate::fields::{FreqGrid, Grid, PulseParams, SampledField};

/// Coupling ε above which the first-order solution is flagged.
pub const WEAK_COUPLING_LIMIT: f64 = 0.1;

/// Pulse spectrum support in units of 1/τ; `e^{−x²/2}` is below 1e−21 beyond.
const PULSE_SUPPORT: f64 = 10.0;

/// Burst spectrum support around ±ω_m in units of 1/envelope_width.
const BURST_SUPPORT: f64 = 10.0;

/// Relative size below which mechanical spectral samples are skipped.
const SPECTRUM_FLOOR: f64 = 1e-16;

pub fn solve_first_order(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &FreqGrid,
) -> Result<CascadeSolution> {
    cfg.validate()?;
    p.validate()?;
    let mut warnings = Vec::new();
    for (i, c) in cfg.cavities.iter().enumerate() {
        if c.epsilon().abs() > WEAK_COUPLING_LIMIT {
            warnings.push(format!(
                "cavity {} has g/κ = {:.3e}, beyond the weak-coupling limit {WEAK_COUPLING_LIMIT}",
                i + 1,
                c.epsilon()
            ));
        }
    }

    let omegas: Vec<f64> = grid.omegas().collect();
    let mut current: Vec<Complex64> = omegas
        .iter()
        .map(|&w| Complex64::new(p.spectrum(w), 0.0))
        .collect();
    let mut fields = Vec::with_capacity(cfg.len());
    let mut dropped = 0.0f64;

    for (idx, cav) in cfg.cavities.iter().enumerate() {
        let upstream = &cfg.cavities[..idx];
        // Unperturbed pulse after the upstream cavities, analytic in ω.
        let alpha = |w: f64| -> Complex64 {
            upstream
                .iter()
                .fold(Complex64::new(p.spectrum(w), 0.0), |acc, c| {
                    acc * c.response_factor(w)
                })
        };
        let sideband = sideband_operator(cfg, idx + 1, cav, p, grid, &alpha, &mut dropped)?;
        let eps = Complex64::new(0.0, -cav.epsilon());
        for ((v, &w), l) in current.iter_mut().zip(&omegas).zip(&sideband) {
            *v = *v * cav.response_factor(w) + eps * l;
        }
        fields.push(SampledField::new(Grid::Freq(*grid), current.clone())?);
    }
    if dropped > 0.0 {
        warnings.push(format!(
            "sideband weight {dropped:.3e} (relative) falls outside the frequency grid"
        ));
    }
    CascadeSolution::assemble(Method::FirstOrder, fields, warnings, cfg)
}

/// `𝓛_n[α](ω) = ∫dω′ κ²/(Γ−iω′)² α(ω′) Q̃_n(ω−ω′)/√(2π)` on the grid.
fn sideband_operator(
    cfg: &ChainConfig,
    n: usize,
    cav: &CavityParams,
    p: &PulseParams,
    grid: &FreqGrid,
    alpha: &dyn Fn(f64) -> Complex64,
    dropped: &mut f64,
) -> Result<Vec<Complex64>> {
    let signal = &cfg.signals[n - 1];
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_points];
    match mech_spectrum(signal, n, cfg.delay_t, grid)? {
        MechSpectrum::Lines(lines) => {
            // Q̃ = Σ c √(2π) δ(Ω − Ω_l) collapses the integral.
            let support = PULSE_SUPPORT / p.tau;
            for (i, o) in out.iter_mut().enumerate() {
                let w = grid.omega(i);
                *o = lines
                    .iter()
                    .filter(|l| (w - l.omega).abs() <= support)
                    .map(|l| {
                        let src = w - l.omega;
                        l.weight * cav.sideband_kernel(src) * alpha(src)
                    })
                    .sum();
            }
        }
        MechSpectrum::Sampled(_) => {
            let (m_lo, m_hi) = match &signal.shape {
                SignalShape::HarmonicBurst {
                    omega_m,
                    envelope_width,
                    ..
                } => {
                    let reach = omega_m + BURST_SUPPORT / envelope_width;
                    let m = (reach / grid.d_omega).ceil() as i64;
                    (-m, m)
                }
                _ => {
                    let half = (grid.n_points / 2) as i64;
                    (-half, grid.n_points as i64 - half - 1)
                }
            };
            let lags = lag_spectrum(
                signal,
                n,
                cfg.delay_t,
                grid.d_omega,
                grid.n_points,
                m_lo,
                m_hi,
            )?;
            let peak = lags.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let active: Vec<(i64, Complex64)> = (m_lo..=m_hi)
                .zip(lags)
                .filter(|(_, q)| q.norm() > SPECTRUM_FLOOR * peak)
                .collect();
            let norm = grid.d_omega / (2.0 * PI).sqrt();
            let support = PULSE_SUPPORT / p.tau;
            let mut total = 0.0;
            let mut lost = 0.0;
            for s in 0..grid.n_points {
                let ws = grid.omega(s);
                if ws.abs() > support {
                    continue;
                }
                let src = cav.sideband_kernel(ws) * alpha(ws) * norm;
                for &(m, q) in &active {
                    let term = src * q;
                    let target = s as i64 + m;
                    total += term.norm_sqr();
                    if target >= 0 && (target as usize) < grid.n_points {
                        out[target as usize] += term;
                    } else {
                        lost += term.norm_sqr();
                    }
                }
            }
            if total > 0.0 && lost > 1e-20 * total {
                *dropped = dropped.max((lost / total).sqrt());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::MechanicalSignal;
    use crate::fields::{gaussian_spectrum, GridRule, TimeGrid};
    use crate::solver::{solve_direct, SolverOptions};

    fn grid_for(cfg: &ChainConfig, p: &PulseParams) -> TimeGrid {
        cfg.time_grid(p, &GridRule::default()).unwrap()
    }

    #[test]
    fn uncoupled_chain_is_pure_filter() {
        let p = PulseParams::new(2.0, 1.0).unwrap();
        let cfg = ChainConfig::uniform(
            CavityParams::new(30.0, 4.0, 0.0).unwrap(),
            MechanicalSignal::burst(1.0, 20.0, 0.5, 0.1, 1.0),
            3,
        )
        .unwrap();
        let fg = grid_for(&cfg, &p).conjugate();
        let sol = solve_first_order(&cfg, &p, &fg).unwrap();
        let c = cfg.cavities[0];
        let expected = gaussian_spectrum(&p, &fg).map(|w, v| v * c.response_factor(w).powi(3));
        assert!(sol.last_field().relative_l2(&expected).unwrap() < 1e-14);
    }

    fn remainder(g: f64) -> f64 {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let cfg = ChainConfig::new(
            vec![CavityParams::new(20.0, 0.0, g).unwrap()],
            vec![MechanicalSignal::constant(1.0, 1.0)],
        )
        .unwrap();
        let tg = cfg.time_grid(&p, &GridRule::with_kappa_dt(0.01)).unwrap();
        let exact = solve_direct(&cfg, &p, &tg, &SolverOptions::default())
            .unwrap()
            .last_spectrum()
            .unwrap();
        let approx = solve_first_order(&cfg, &p, &tg.conjugate()).unwrap();
        approx.last_field().relative_l2(&exact).unwrap()
    }

    #[test]
    fn constant_signal_matches_recursion_to_second_order() {
        for ratio in [1e-2, 3e-2] {
            let err = remainder(20.0 * ratio);
            assert!(err < 10.0 * ratio * ratio, "gQ/κ={ratio}: {err}");
        }
    }

    #[test]
    fn burst_matches_recursion() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let cfg = ChainConfig::uniform(
            CavityParams::new(40.0, 5.0, 0.4).unwrap(),
            MechanicalSignal::burst(1.0, 6.0, 0.7, 0.3, 1.0),
            2,
        )
        .unwrap()
        .with_delay(0.2)
        .unwrap();
        let tg = grid_for(&cfg, &p);
        let exact = solve_direct(&cfg, &p, &tg, &SolverOptions::default())
            .unwrap()
            .last_spectrum()
            .unwrap();
        let approx = solve_first_order(&cfg, &p, &tg.conjugate()).unwrap();
        let free = solve_first_order(&cfg.with_theta(0.0), &p, &tg.conjugate()).unwrap();
        // Compare the signal-induced parts so the carrier does not mask them.
        let signal = approx.last_field().sub(free.last_field()).unwrap();
        let exact_signal = exact.sub(free.last_field()).unwrap();
        let err = signal.relative_l2(&exact_signal).unwrap();
        assert!(err < 2e-2, "{err}");
    }

    #[test]
    fn sampled_signal_matches_analytic_burst() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let burst = MechanicalSignal::burst(1.0, 6.0, 0.7, 0.3, 0.5);
        let cav = CavityParams::new(40.0, 5.0, 0.4).unwrap();
        let cfg = ChainConfig::uniform(cav, burst.clone(), 2)
            .unwrap()
            .with_delay(0.2)
            .unwrap();
        let fg = grid_for(&cfg, &p).conjugate();
        let tg = TimeGrid::centered(0.005, 4096).unwrap();
        let field = SampledField::from_fn(Grid::Time(tg), |t| {
            Complex64::new(burst.shape_at(t), 0.0)
        })
        .unwrap();
        let sampled = MechanicalSignal::new(
            SignalShape::Sampled { field },
            0.5,
        )
        .unwrap();
        let cfg_s = ChainConfig::uniform(cav, sampled, 2)
            .unwrap()
            .with_delay(0.2)
            .unwrap();
        let a = solve_first_order(&cfg, &p, &fg).unwrap();
        let b = solve_first_order(&cfg_s, &p, &fg).unwrap();
        let free = solve_first_order(&cfg.with_theta(0.0), &p, &fg).unwrap();
        let da = a.last_field().sub(free.last_field()).unwrap();
        let db = b.last_field().sub(free.last_field()).unwrap();
        assert!(db.relative_l2(&da).unwrap() < 1e-3);
    }

    #[test]
    fn strong_coupling_is_flagged() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let cfg = ChainConfig::new(
            vec![CavityParams::new(20.0, 0.0, 4.0).unwrap()],
            vec![MechanicalSignal::constant(1.0, 1.0)],
        )
        .unwrap();
        let fg = grid_for(&cfg, &p).conjugate();
        let sol = solve_first_order(&cfg, &p, &fg).unwrap();
        assert_eq!(sol.warnings.len(), 1);
    }
}
