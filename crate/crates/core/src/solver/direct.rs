// SPDX-License-Identifier: Apache-2.0

//! Time-domain recursion
//! `β_n(t) = β_{n−1}(t) − κ_n ∫₀^∞ dt′ e^{−G_n(t)t′} β_{n−1}(t − t′)`,
//! `G_n(t) = Γ_n − i g_n Q_n(t)`, with no expansion in the coupling.

use num_complex::Complex64;

use super::{CascadeSolution, Method, SolverOptions};
use crate::chain::ChainConfig;
use crate::error::{Error, Result};
use crate::fields::{gaussian_pulse, Grid, PulseParams, SampledField, TimeGrid};

/// Largest admissible `dt·κ`.
pub const MAX_KAPPA_DT: f64 = 0.05;

pub fn solve_direct(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<CascadeSolution> {
    let (fields, mut warnings) = recurse(cfg, p, grid, opts)?;
    if opts.check_convergence {
        let (fine, _) = recurse(cfg, p, &grid.refined(), opts)?;
        let coarse_norm = fields.last().expect("non-empty").l2_norm();
        let fine_norm = fine.last().expect("non-empty").l2_norm();
        let change = (coarse_norm - fine_norm).abs() / fine_norm.max(f64::MIN_POSITIVE);
        if change > opts.rel_tolerance {
            warnings.push(format!(
                "halving dt changes the output norm by {change:.3e} (tolerance {:.1e})",
                opts.rel_tolerance
            ));
        }
    }
    CascadeSolution::assemble(Method::Direct, fields, warnings, cfg)
}

fn recurse(
    cfg: &ChainConfig,
    p: &PulseParams,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<(Vec<SampledField>, Vec<String>)> {
    cfg.validate()?;
    opts.validate()?;
    let dt = grid.dt;
    for c in &cfg.cavities {
        if c.kappa * dt > MAX_KAPPA_DT {
            return Err(Error::Resolution {
                dt_kappa: c.kappa * dt,
                limit: MAX_KAPPA_DT,
            });
        }
    }

    let n = grid.n_points;
    let mut prev = gaussian_pulse(p, grid)?.into_values();
    let mut fields = Vec::with_capacity(cfg.len());
    let mut warnings = Vec::new();

    for (idx, cav) in cfg.cavities.iter().enumerate() {
        let memory = (opts.memory_cutoff / (cav.kappa * dt)).ceil() as usize;
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        let mut outside = false;
        for (i, out) in next.iter_mut().enumerate() {
            let (q, inside) = cfg.shifted_profile(idx + 1, grid.time(i));
            outside |= !inside;
            let g_t = cav.gamma() - Complex64::i() * (cav.g * q);
            let step = (-g_t * dt).exp();
            let reach = memory.min(i);
            let mut acc = 0.5 * prev[i];
            let mut decay = Complex64::new(1.0, 0.0);
            for j in 1..=reach {
                decay *= step;
                let term = decay * prev[i - j];
                acc += if j == memory { 0.5 * term } else { term };
            }
            *out = prev[i] - cav.kappa * dt * acc;
        }
        if outside {
            warnings.push(format!(
                "signal {} was evaluated outside its sampled range and taken as 0",
                idx + 1
            ));
        }
        fields.push(SampledField::new(Grid::Time(*grid), next.clone())?);
        prev = next;
    }
    Ok((fields, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{CavityParams, MechanicalSignal};
    use crate::fields::{forward_transform, gaussian_spectrum, GridRule};

    fn cfg(kappa: f64, delta: f64, g: f64, q: f64, n: usize) -> ChainConfig {
        ChainConfig::uniform(
            CavityParams::new(kappa, delta, g).unwrap(),
            MechanicalSignal::constant(q, 1.0),
            n,
        )
        .unwrap()
    }

    #[test]
    fn empty_cavity_is_a_phase_filter() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let c = cfg(1e3, 0.0, 0.0, 0.0, 1);
        let grid = c.time_grid(&p, &GridRule::default()).unwrap();
        let sol = solve_direct(&c, &p, &grid, &SolverOptions::default()).unwrap();
        let spec = sol.last_spectrum().unwrap();
        let fg = *spec.freq_grid().unwrap();
        let cav = c.cavities[0];
        let expected =
            gaussian_spectrum(&p, &fg).map(|w, v| v * cav.response_factor(w));
        assert!(spec.relative_l2(&expected).unwrap() < 1e-3);
        let pulse = gaussian_pulse(&p, &grid).unwrap().scaled((-1.0).into());
        assert!(sol.last_field().relative_l2(&pulse).unwrap() < 1e-2);
    }

    #[test]
    fn dark_pulse_stays_dark() {
        let p = PulseParams::new(0.0, 1.0).unwrap();
        let c = cfg(50.0, 3.0, 5.0, 1.0, 3);
        let grid = c.time_grid(&p, &GridRule::default()).unwrap();
        let sol = solve_direct(&c, &p, &grid, &SolverOptions::default()).unwrap();
        for f in &sol.per_cavity_fields {
            assert!(f.values().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let c = cfg(10.0, 0.0, 0.0, 0.0, 1);
        let grid = TimeGrid::centered(0.01, 4096).unwrap();
        let err = solve_direct(&c, &p, &grid, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
    }

    #[test]
    fn constant_displacement_shifts_the_resonance() {
        // For constant Q the recursion is an exact convolution whose kernel
        // transforms to the shifted cavity response.
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let c = cfg(20.0, 2.0, 6.0, 1.0, 1);
        let grid = c
            .time_grid(&p, &GridRule::with_kappa_dt(0.01))
            .unwrap();
        let sol = solve_direct(&c, &p, &grid, &SolverOptions::default()).unwrap();
        let spec = forward_transform(sol.last_field()).unwrap();
        let shifted = CavityParams::new(20.0, 2.0 - 6.0, 0.0).unwrap();
        let expected = gaussian_spectrum(&p, spec.freq_grid().unwrap())
            .map(|w, v| v * shifted.response_factor(w));
        assert!(spec.relative_l2(&expected).unwrap() < 1e-4);
    }

    #[test]
    fn convergence_check_reports() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let c = cfg(20.0, 0.0, 1.0, 1.0, 1);
        let grid = c.time_grid(&p, &GridRule::default()).unwrap();
        let strict = SolverOptions {
            check_convergence: true,
            rel_tolerance: 1e-12,
            ..Default::default()
        };
        let sol = solve_direct(&c, &p, &grid, &strict).unwrap();
        assert_eq!(sol.warnings.len(), 1);
        let loose = SolverOptions {
            rel_tolerance: 1e-2,
            ..strict
        };
        assert!(solve_direct(&c, &p, &grid, &loose).unwrap().warnings.is_empty());
    }
}
