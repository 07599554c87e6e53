// SPDX-License-Identifier: Apache-2.0

//! Fisher-information and signal-to-noise bounds, loss-limited cascade
//! length, and thermal limits for a stroboscopic readout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{
    diagnose_regime, halfline_inverse_fourier, mech_spectrum, ChainConfig, Regime,
};
use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::fields::{photon_number, FreqGrid, Grid, PulseParams, SampledField, TimeGrid};
use crate::solver::{
    regime_label, resolve_method, solve_direct, solve_on_grid, Method, SolverOptions,
};

/// Target `ε·h` for the finite-difference step on the recursion.
pub const FD_STEP_SCALE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetrologyReport {
    /// Fisher information of the output displacement, per θ².
    pub qfi: f64,
    /// Regime-specific closed-form bound.
    pub snr_bound: f64,
    /// `θ·√(𝒩·qfi)` from the first-order derivative.
    pub snr_general: f64,
    pub regime: Regime,
    pub n_shots: u32,
    pub theta: f64,
    pub notes: Vec<String>,
}

/// Trapezoid `∫|f|²` over the field's grid.
fn trapezoid_energy(f: &SampledField) -> f64 {
    let v = f.values();
    let inner: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let ends = 0.5 * (v[0].norm_sqr() + v[v.len() - 1].norm_sqr());
    (inner - ends) * f.grid().step()
}

/// `4 η^{N−1} ∫dω |∂_θ β̃_N|²`.
pub fn qfi_from_derivative(dbeta: &SampledField, eta: f64, n: usize) -> Result<f64> {
    if dbeta.freq_grid().is_none() {
        return Err(Error::GridMismatch(
            "the derivative must be a frequency-domain field".into(),
        ));
    }
    if n == 0 {
        return Err(Error::invalid("N", "need at least one cavity"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", "must lie in [0, 1]"));
    }
    Ok(4.0 * eta.powi(n as i32 - 1) * trapezoid_energy(dbeta))
}

/// `∂_θ β̃_N` at `θ = 0`, all signals scaled by the common θ.
///
/// Affine methods use `β̃_N(1) − β̃_N(0)`, the stroboscopic forms their exact
/// derivative, and the recursion a central difference with `ε_max·h = 1e−4`.
pub fn derivative_of_output(
    cfg: &ChainConfig,
    p: &PulseParams,
    method: Method,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<SampledField> {
    let fg = grid.conjugate();
    match resolve_method(cfg, p, method) {
        Method::Direct => {
            let eps = cfg.max_epsilon();
            if eps == 0.0 {
                return Err(Error::StepSelection(
                    "all couplings vanish, the derivative is identically zero".into(),
                ));
            }
            let h = FD_STEP_SCALE / eps;
            let up = solve_direct(&cfg.with_theta(h), p, grid, opts)?.last_spectrum()?;
            let down = solve_direct(&cfg.with_theta(-h), p, grid, opts)?.last_spectrum()?;
            Ok(up.sub(&down)?.scaled(Complex64::new(0.5 / h, 0.0)))
        }
        Method::StrobWeak | Method::StrobStrong => Ok(stroboscopic_derivative(cfg, p, &fg)),
        m => {
            let on = solve_on_grid(&cfg.with_theta(1.0), p, m, opts, grid)?;
            let off = solve_on_grid(&cfg.with_theta(0.0), p, m, opts, grid)?;
            on.last_field().sub(off.last_field())
        }
    }
}

/// `i Σ_k g_k s_k φ_k′(ω) · e^{iΣφ_j(ω)} β̃(ω)` with `s_k` the unit-strength
/// displacement at pulse arrival. Both stroboscopic forms share it at θ = 0.
fn stroboscopic_derivative(cfg: &ChainConfig, p: &PulseParams, fg: &FreqGrid) -> SampledField {
    let unit = cfg.with_theta(1.0);
    let shapes: Vec<f64> = (1..=cfg.len())
        .map(|n| unit.shifted_profile(n, 0.0).0)
        .collect();
    let values = fg
        .omegas()
        .map(|w| {
            let mut carrier = Complex64::new(p.spectrum(w), 0.0);
            let mut rate = 0.0;
            for (c, s) in cfg.cavities.iter().zip(&shapes) {
                carrier *= c.response_factor(w);
                rate += c.g * s * c.response_phase_slope(w);
            }
            Complex64::new(0.0, rate) * carrier
        })
        .collect();
    SampledField::new(Grid::Freq(*fg), values).expect("finite derivative")
}

/// Closed-form bound for `regime` next to the general quadrature form.
pub fn snr_bound(
    cfg: &ChainConfig,
    p: &PulseParams,
    regime: Regime,
    n_shots: u32,
    grid: &TimeGrid,
) -> Result<MetrologyReport> {
    cfg.validate()?;
    p.validate()?;
    let theta = cfg.common_theta().ok_or_else(|| {
        Error::invalid("theta", "all signals must share one strength θ")
    })?;
    let n = cfg.len();
    let loss = cfg.eta.powf(0.5 * (n as f64 - 1.0));
    let shots = f64::from(n_shots).sqrt();
    let mut notes = Vec::new();
    let diagnosed = diagnose_regime(cfg, p).regime;
    if diagnosed != regime {
        notes.push(format!(
            "requested the {} bound but the configuration is diagnosed as {}",
            regime_label(regime),
            regime_label(diagnosed)
        ));
    }

    let opts = SolverOptions::default();
    let d = derivative_of_output(cfg, p, Method::FirstOrder, grid, &opts)?;
    let qfi = qfi_from_derivative(&d, cfg.eta, n)?;
    let snr_general = theta.abs() * (f64::from(n_shots) * qfi).sqrt();

    let n_in = photon_number(p);
    let specialized = match regime {
        Regime::Stroboscopic => {
            let sum: f64 = cfg
                .cavities
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.epsilon() * cfg.shifted_profile(i + 1, 0.0).0 * c.one_minus_cos_phase(0.0)
                })
                .sum();
            4.0 * loss * n_in.sqrt() * sum.abs()
        }
        Regime::CwFiniteSignal => {
            let fg = grid.conjugate();
            let mut total = vec![Complex64::new(0.0, 0.0); fg.n_points];
            for (k, c) in cfg.cavities.iter().enumerate() {
                let w = crate::solver::sideband_weight(c);
                let q = mech_spectrum(&cfg.signals[k], k + 1, cfg.delay_t, &fg)?.to_field(&fg);
                for (t, v) in total.iter_mut().zip(q.values()) {
                    *t += w * v;
                }
            }
            let field = SampledField::new(Grid::Freq(fg), total)?;
            2.0 * loss * p.beta_bar * trapezoid_energy(&field).sqrt()
        }
        Regime::CwContinuousSignal => {
            let mut plus = Complex64::new(0.0, 0.0);
            let mut minus = Complex64::new(0.0, 0.0);
            for (k, c) in cfg.cavities.iter().enumerate() {
                let w = crate::solver::sideband_weight(c);
                let f = halfline_inverse_fourier(&cfg.signals[k], k + 1, cfg.delay_t)?;
                plus += w * f;
                minus += w * f.conj();
            }
            2.0 * loss * n_in.sqrt() * (plus.norm_sqr() + minus.norm_sqr()).sqrt()
        }
        Regime::NumericOnly => {
            notes.push("no closed form outside the three regimes; using the quadrature form".into());
            snr_general / shots
        }
    };
    let snr_bound = specialized * shots;
    if snr_general > 0.0 {
        notes.push(format!(
            "closed form / quadrature form − 1 = {:.3e}",
            snr_bound / snr_general - 1.0
        ));
    }
    Ok(MetrologyReport {
        qfi,
        snr_bound,
        snr_general,
        regime,
        n_shots,
        theta,
        notes,
    })
}

/// Coherent over incoherent bound for `n` equal cavities, `√N η^{(N−1)/2}`.
pub fn equal_cavity_ratio(n: usize, eta: f64) -> f64 {
    (n as f64).sqrt() * eta.powf(0.5 * (n as f64 - 1.0))
}

/// Relative tolerance under which two ratios count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalN {
    pub n_opt: usize,
    pub ratio_max: f64,
    /// Every N whose ratio ties with the maximum, ascending.
    pub ties: Vec<usize>,
    /// `⌊−1/ln η⌋` and `⌈−1/ln η⌉`.
    pub log_candidates: Option<(usize, usize)>,
    /// Integer part of `η/(1−η)`.
    pub approx_candidate: usize,
    /// Whether the brute-force optimum lies among the log candidates.
    pub in_log_candidates: bool,
    pub matches_approx: bool,
}

/// Brute-force maximiser of [`equal_cavity_ratio`]; ties go to smaller N.
pub fn optimal_n(eta: f64) -> Result<OptimalN> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", "must lie in [0, 1]"));
    }
    if eta == 1.0 {
        return Err(Error::UnboundedGrowth);
    }
    let approx_candidate = (eta / (1.0 - eta)).floor() as usize;
    if eta == 0.0 {
        return Ok(OptimalN {
            n_opt: 1,
            ratio_max: 1.0,
            ties: vec![1],
            log_candidates: None,
            approx_candidate,
            in_log_candidates: true,
            matches_approx: approx_candidate == 1,
        });
    }
    let x = -1.0 / eta.ln();
    let upper = (4.0 * x).ceil() as usize + 10;
    let (mut n_opt, mut ratio_max) = (1, equal_cavity_ratio(1, eta));
    for n in 2..=upper {
        let r = equal_cavity_ratio(n, eta);
        if r > ratio_max * (1.0 + TIE_TOLERANCE) {
            n_opt = n;
            ratio_max = r;
        }
    }
    let ties = (1..=upper)
        .filter(|&n| equal_cavity_ratio(n, eta) >= ratio_max * (1.0 - TIE_TOLERANCE))
        .collect();
    let cands = (x.floor() as usize, x.ceil() as usize);
    Ok(OptimalN {
        n_opt,
        ratio_max,
        ties,
        log_candidates: Some(cands),
        approx_candidate,
        in_log_candidates: n_opt == cands.0 || n_opt == cands.1,
        matches_approx: n_opt == approx_candidate,
    })
}

/// Fisher information of a single undisturbed stroboscopic readout,
/// `64 g² κ² Q² N_in / (κ² + 4Δ²)²`.
pub fn qfi_free(g: f64, kappa: f64, delta: f64, q_amp: f64, n_in: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    let d = kappa * kappa + 4.0 * delta * delta;
    Ok(64.0 * g * g * kappa * kappa * q_amp * q_amp * n_in / (d * d))
}

/// Bose occupation `1/(e^{ħΩ/k_BT} − 1)`, zero at `T = 0`.
pub fn thermal_occupation(omega_m: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::invalid("temperature", "must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega_m / (K_B * temperature)).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalParams {
    /// Bath temperature, K.
    pub temperature: f64,
    /// Mechanical frequency Ω, rad/s.
    pub omega_m: f64,
    /// Signal amplitude Q at pulse arrival.
    pub q_amp: f64,
}

impl ThermalParams {
    pub fn new(temperature: f64, omega_m: f64, q_amp: f64) -> Result<Self> {
        if !(temperature >= 0.0) {
            return Err(Error::invalid("temperature", "must be non-negative"));
        }
        if !(omega_m > 0.0) {
            return Err(Error::invalid("omega_m", "must be positive"));
        }
        if q_amp == 0.0 || !q_amp.is_finite() {
            return Err(Error::invalid("Q_amp", "must be finite and non-zero"));
        }
        Ok(Self {
            temperature,
            omega_m,
            q_amp,
        })
    }

    pub fn n_bar(&self) -> f64 {
        thermal_occupation(self.omega_m, self.temperature).expect("validated temperature")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalCorrection {
    /// `δ𝓗 = −(2n̄+1)𝓗₀²/(2Q²)`, never positive.
    pub delta_h: f64,
    /// `|δ𝓗/𝓗₀|`.
    pub relative: f64,
}

pub fn thermal_correction(h0: f64, thermal: &ThermalParams) -> Result<ThermalCorrection> {
    if !(h0 >= 0.0) {
        return Err(Error::invalid("h0", "must be non-negative"));
    }
    let q2 = thermal.q_amp * thermal.q_amp;
    let factor = (2.0 * thermal.n_bar() + 1.0) / (2.0 * q2);
    Ok(ThermalCorrection {
        delta_h: -factor * h0 * h0,
        relative: factor * h0,
    })
}

/// Sum of per-cavity corrections, each sensor treated independently.
pub fn thermal_correction_sum(parts: &[(f64, ThermalParams)]) -> Result<f64> {
    parts
        .iter()
        .map(|(h0, t)| thermal_correction(*h0, t).map(|c| c.delta_h))
        .sum()
}

/// Highest temperature with a small thermal correction, `Q²ħΩ/(k_B 𝓗₀)`.
/// Infinite when `𝓗₀ = 0`.
pub fn t_max(h0: f64, omega_m: f64, q_amp: f64) -> Result<f64> {
    if !(h0 >= 0.0) {
        return Err(Error::invalid("h0", "must be non-negative"));
    }
    if h0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q_amp * q_amp * HBAR * omega_m / (K_B * h0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{CavityParams, MechanicalSignal};
    use crate::fields::GridRule;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_gaussian(fg: FreqGrid) -> SampledField {
        // ∫|f|² = 1 for f = π^{−1/4} e^{−ω²/2}.
        SampledField::from_fn(Grid::Freq(fg), |w| {
            Complex64::new(PI.powf(-0.25) * (-0.5 * w * w).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn qfi_quadrature() {
        let fg = TimeGrid::centered(0.05, 2048).unwrap().conjugate();
        let zero = SampledField::zeros(Grid::Freq(fg));
        assert_eq!(qfi_from_derivative(&zero, 1.0, 3).unwrap(), 0.0);
        let g = unit_gaussian(fg);
        assert!((qfi_from_derivative(&g, 1.0, 1).unwrap() - 4.0).abs() < 1e-6);
        let a = qfi_from_derivative(&g, 1.0, 2).unwrap();
        let b = qfi_from_derivative(&g, 0.81, 2).unwrap();
        assert_relative_eq!(b / a, 0.81, max_relative = 1e-15);
        let tg = TimeGrid::centered(0.05, 16).unwrap();
        assert!(qfi_from_derivative(&SampledField::zeros(Grid::Time(tg)), 1.0, 1).is_err());
    }

    fn strob(n: usize, g: f64) -> (ChainConfig, PulseParams, TimeGrid) {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let cfg = ChainConfig::uniform(
            CavityParams::new(1e3, 0.0, g).unwrap(),
            MechanicalSignal::continuous(0.8, 1e-2, 0.0, 0.5),
            n,
        )
        .unwrap();
        let tg = cfg.time_grid(&p, &GridRule::default()).unwrap();
        (cfg, p, tg)
    }

    #[test]
    fn stroboscopic_derivative_at_line_centre() {
        let (cfg, p, tg) = strob(1, 3.0);
        let d = derivative_of_output(&cfg, &p, Method::StrobWeak, &tg, &SolverOptions::default())
            .unwrap();
        let fg = tg.conjugate();
        let i = fg.nearest_index(0.0).unwrap();
        assert_relative_eq!(
            d.values()[i].norm(),
            4.0 * 3.0 / 1e3 * 0.8 * p.spectrum(0.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn uncoupled_derivatives() {
        let (cfg, p, tg) = strob(2, 0.0);
        let opts = SolverOptions::default();
        for m in [Method::FirstOrder, Method::StrobWeak, Method::StrobStrong] {
            let d = derivative_of_output(&cfg, &p, m, &tg, &opts).unwrap();
            assert!(d.values().iter().all(|v| v.norm() == 0.0));
        }
        let err = derivative_of_output(&cfg, &p, Method::Direct, &tg, &opts).unwrap_err();
        assert!(matches!(err, Error::StepSelection(_)));
    }

    #[test]
    fn first_order_and_stroboscopic_derivatives_agree() {
        let (cfg, p, tg) = strob(3, 2.0);
        let opts = SolverOptions::default();
        let a = derivative_of_output(&cfg, &p, Method::FirstOrder, &tg, &opts).unwrap();
        let b = derivative_of_output(&cfg, &p, Method::StrobWeak, &tg, &opts).unwrap();
        assert!(a.relative_l2(&b).unwrap() < 1e-4);
    }

    #[test]
    fn stroboscopic_bound_single_cavity() {
        let (cfg, p, tg) = strob(1, 2.0);
        let r = snr_bound(&cfg, &p, Regime::Stroboscopic, 1, &tg).unwrap();
        let expected = 8.0 * (2.0 / 1e3) * 0.5 * 0.8 * photon_number(&p).sqrt();
        assert_relative_eq!(r.snr_bound, expected, max_relative = 1e-12);
        assert!((r.snr_bound / r.snr_general - 1.0).abs() < 1e-3);
        let four = snr_bound(&cfg, &p, Regime::Stroboscopic, 4, &tg).unwrap();
        assert_relative_eq!(four.snr_bound, 2.0 * r.snr_bound, max_relative = 1e-12);
        let (free, p, tg) = strob(1, 0.0);
        let r = snr_bound(&free, &p, Regime::Stroboscopic, 1, &tg).unwrap();
        assert_eq!((r.snr_bound, r.snr_general, r.qfi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn continuous_bound_has_two_equal_sidebands() {
        let p = PulseParams::new(1.0, 1.0).unwrap();
        let (kappa, g, a) = (1e4, 5.0, 0.6);
        let cfg = ChainConfig::new(
            vec![CavityParams::new(kappa, 0.0, g).unwrap()],
            vec![MechanicalSignal::continuous(a, 100.0, 0.0, 1.0)],
        )
        .unwrap();
        let tg = TimeGrid::centered(0.01, 1 << 13).unwrap();
        let r = snr_bound(&cfg, &p, Regime::CwContinuousSignal, 1, &tg).unwrap();
        let single = 2.0 * photon_number(&p).sqrt() * 4.0 * g / kappa * a / 2.0;
        assert_relative_eq!(r.snr_bound, 2f64.sqrt() * single, max_relative = 1e-12);
        assert!((r.snr_bound / r.snr_general - 1.0).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(equal_cavity_ratio(4, 1.0), 2.0);
        assert_relative_eq!(
            equal_cavity_ratio(10, 0.9),
            10f64.sqrt() * 0.9f64.powf(4.5),
            max_relative = 1e-15
        );
        // √10·0.9^{4.5} = 0.9⁴·√(10·0.9) = 3·0.6561.
        assert_relative_eq!(equal_cavity_ratio(10, 0.9), 1.9683, max_relative = 1e-14);
        assert!((equal_cavity_ratio(3, 0.7) - 1.2124).abs() < 1e-4);
    }

    #[test]
    fn optimal_n_examples() {
        // η = N/(N+1) makes N and N+1 tie exactly: √10·0.9^{4.5} = 3·0.9⁴.
        let r = optimal_n(0.9).unwrap();
        assert_eq!(r.n_opt, 9);
        assert_eq!(r.ties, vec![9, 10]);
        assert_eq!(r.log_candidates, Some((9, 10)));
        assert!(r.in_log_candidates);
        assert_relative_eq!(r.ratio_max, 1.9683, max_relative = 1e-14);
        let r = optimal_n(0.5).unwrap();
        assert_eq!(r.n_opt, 1);
        assert_eq!(r.ties, vec![1, 2]);
        assert_eq!(r.ratio_max, 1.0);
        let r = optimal_n(0.85).unwrap();
        assert_eq!((r.n_opt, r.ties.len()), (6, 1));
        assert_eq!(optimal_n(1.0).unwrap_err(), Error::UnboundedGrowth);
        assert_eq!(optimal_n(0.0).unwrap().n_opt, 1);
        assert!(optimal_n(1.5).is_err());
    }

    proptest! {
        #[test]
        fn optimum_is_a_log_candidate(eta in 0.01f64..0.999) {
            prop_assert!(optimal_n(eta).unwrap().in_log_candidates);
        }

        #[test]
        fn correction_is_never_positive(h0 in 0.0f64..1e3, t in 0.0f64..1e3, q in 1e-3f64..1e3) {
            let th = ThermalParams::new(t, 2.0 * PI * 1e3, q).unwrap();
            prop_assert!(thermal_correction(h0, &th).unwrap().delta_h <= 0.0);
        }

        #[test]
        fn valid_temperatures_keep_information_positive(
            g in 1.0f64..100.0, q in 0.1f64..10.0, frac in 0.0f64..0.1
        ) {
            let omega = 2.0 * PI * 1e3;
            let h0 = qfi_free(g, 2.0 * PI * 1e6, omega, q, 100.0).unwrap();
            let t = frac * t_max(h0, omega, q).unwrap();
            let th = ThermalParams::new(t, omega, q).unwrap();
            prop_assert!(h0 + thermal_correction(h0, &th).unwrap().delta_h >= 0.0);
        }
    }

    fn paper_h0() -> f64 {
        let two_pi = 2.0 * PI;
        qfi_free(two_pi, two_pi * 1e6, two_pi * 1e3, 1.0, 100.0).unwrap()
    }

    #[test]
    fn free_information() {
        assert!((paper_h0() - 6.4e-9).abs() < 1e-3 * 6.4e-9);
        assert_eq!(qfi_free(0.0, 1.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
        let on = qfi_free(1.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let off = qfi_free(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(on / off, 4.0, max_relative = 1e-15);
        assert!(qfi_free(1.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn temperature_limit() {
        let omega = 2.0 * PI * 1e3;
        let t = t_max(paper_h0(), omega, 1.0).unwrap();
        assert!((t / 7.5 - 1.0).abs() < 0.02, "{t}");
        assert_eq!(t_max(0.0, omega, 1.0).unwrap(), f64::INFINITY);
        assert_relative_eq!(
            t_max(1e-9, 2.0 * omega, 1.0).unwrap(),
            2.0 * t_max(1e-9, omega, 1.0).unwrap(),
            max_relative = 1e-15
        );
        // 𝓗₀ ∝ Q² cancels the explicit Q².
        let two_pi = 2.0 * PI;
        let h2 = qfi_free(two_pi, two_pi * 1e6, omega, 2.0, 100.0).unwrap();
        assert_relative_eq!(t_max(h2, omega, 2.0).unwrap(), t, max_relative = 1e-14);
    }

    #[test]
    fn occupation_numbers() {
        let omega = 2.0 * PI * 1e3;
        assert_eq!(thermal_occupation(omega, 0.0).unwrap(), 0.0);
        let t1 = HBAR * omega / K_B;
        assert_relative_eq!(
            thermal_occupation(omega, t1).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            max_relative = 1e-12
        );
        assert!((thermal_occupation(omega, 100.0 * t1).unwrap() - 99.50).abs() < 1e-2);
        assert!(thermal_occupation(omega, -1.0).is_err());
    }

    #[test]
    fn zero_temperature_correction() {
        let th = ThermalParams::new(0.0, 2.0 * PI * 1e3, 1.0).unwrap();
        let c = thermal_correction(6.4e-9, &th).unwrap();
        assert_relative_eq!(c.delta_h, -2.048e-17, max_relative = 1e-12);
        assert_relative_eq!(c.relative, 3.2e-9, max_relative = 1e-12);
    }

    #[test]
    fn high_temperature_relative_correction() {
        let omega = 2.0 * PI * 1e3;
        let (h0, q) = (1e-6, 2.0);
        let t = 1e4 * HBAR * omega / K_B;
        let th = ThermalParams::new(t, omega, q).unwrap();
        let rel = thermal_correction(h0, &th).unwrap().relative;
        let limit = h0 * K_B * t / (HBAR * omega * q * q);
        assert!((rel / limit - 1.0).abs() < 1e-4);
    }

    #[test]
    fn summed_corrections() {
        let th = ThermalParams::new(0.0, 1.0, 1.0).unwrap();
        let total = thermal_correction_sum(&[(1.0, th), (2.0, th)]).unwrap();
        assert_relative_eq!(total, -0.5 - 2.0, max_relative = 1e-15);
    }
}
