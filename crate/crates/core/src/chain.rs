// SPDX-License-Identifier: Apache-2.0

//! Cascade configuration: cavities, mechanical signals and regime checks.
//!
//! Signals are given in the laboratory frame, `q_n(t) = θ·shape_n(t)`. The
//! solvers work in the frame that follows the pulse, where cavity `n` sees
//! `Q_n(t) = q_n(t + (n−1)T)` and `Q̃_n(Ω) = q̃_n(Ω) e^{−iΩ(n−1)T}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    forward_transform, FreqGrid, Grid, GridRule, PulseParams, SampledField, TimeGrid,
};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    /// Linewidth κ, rad/s.
    pub kappa: f64,
    /// Detuning Δ from the laser, rad/s.
    pub delta: f64,
    /// Optomechanical coupling g, rad/s.
    pub g: f64,
}

impl CavityParams {
    pub fn new(kappa: f64, delta: f64, g: f64) -> Result<Self> {
        let c = Self { kappa, delta, g };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        if !self.delta.is_finite() || !self.g.is_finite() {
            return Err(Error::invalid("cavity", "delta and g must be finite"));
        }
        Ok(())
    }

    /// Γ = κ/2 + iΔ.
    pub fn gamma(&self) -> Complex64 {
        Complex64::new(0.5 * self.kappa, self.delta)
    }

    /// Weak-coupling indicator ε = g/κ.
    pub fn epsilon(&self) -> f64 {
        self.g / self.kappa
    }

    /// e^{iφ(ω)} = −(Γ − iω)*/(Γ − iω).
    pub fn response_factor(&self, omega: f64) -> Complex64 {
        let z = self.gamma() - Complex64::i() * omega;
        -z.conj() / z
    }

    /// φ(ω) = π + 2 arctan(2(ω − Δ)/κ), in (0, 2π).
    pub fn response_phase(&self, omega: f64) -> f64 {
        PI + 2.0 * (2.0 * (omega - self.delta) / self.kappa).atan()
    }

    /// dφ/dω.
    pub fn response_phase_slope(&self, omega: f64) -> f64 {
        let u = 2.0 * (omega - self.delta) / self.kappa;
        4.0 / (self.kappa * (1.0 + u * u))
    }

    /// 1 − cos φ(ω) = 2/(1 + 4(ω − Δ)²/κ²).
    pub fn one_minus_cos_phase(&self, omega: f64) -> f64 {
        let u = 2.0 * (omega - self.delta) / self.kappa;
        2.0 / (1.0 + u * u)
    }

    /// [1 − e^{iφ(ω)}]² = κ²/(Γ − iω)².
    pub fn sideband_kernel(&self, omega: f64) -> Complex64 {
        let r = self.kappa / (self.gamma() - Complex64::i() * omega);
        r * r
    }
}

pub fn response_phase(c: &CavityParams, omega: f64) -> f64 {
    c.response_phase(omega)
}

/// Time dependence of a mechanical signal at unit strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum SignalShape {
    Constant {
        q0: f64,
    },
    HarmonicBurst {
        amplitude: f64,
        omega_m: f64,
        envelope_width: f64,
        #[serde(default)]
        phase: f64,
    },
    ContinuousHarmonic {
        amplitude: f64,
        omega_m: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Real part of a time-domain field, linearly interpolated.
    Sampled { field: SampledField },
}

/// Mechanical drive `q(t) = θ·shape(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanicalSignal {
    #[serde(flatten)]
    pub shape: SignalShape,
    #[serde(default = "unit_theta")]
    pub theta: f64,
}

fn unit_theta() -> f64 {
    1.0
}

impl MechanicalSignal {
    pub fn new(shape: SignalShape, theta: f64) -> Result<Self> {
        let s = Self { shape, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(q0: f64, theta: f64) -> Self {
        Self {
            shape: SignalShape::Constant { q0 },
            theta,
        }
    }

    pub fn continuous(amplitude: f64, omega_m: f64, phase: f64, theta: f64) -> Self {
        Self {
            shape: SignalShape::ContinuousHarmonic {
                amplitude,
                omega_m,
                phase,
            },
            theta,
        }
    }

    pub fn burst(amplitude: f64, omega_m: f64, envelope_width: f64, phase: f64, theta: f64) -> Self {
        Self {
            shape: SignalShape::HarmonicBurst {
                amplitude,
                omega_m,
                envelope_width,
                phase,
            },
            theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        match &self.shape {
            SignalShape::Constant { q0 } => {
                if !q0.is_finite() {
                    return Err(Error::invalid("q0", "must be finite"));
                }
            }
            SignalShape::HarmonicBurst {
                amplitude,
                omega_m,
                envelope_width,
                phase,
            } => {
                check_harmonic(*amplitude, *omega_m, *phase)?;
                if !(*envelope_width > 0.0) || !envelope_width.is_finite() {
                    return Err(Error::invalid("envelope_width", "must be positive"));
                }
            }
            SignalShape::ContinuousHarmonic {
                amplitude,
                omega_m,
                phase,
            } => check_harmonic(*amplitude, *omega_m, *phase)?,
            SignalShape::Sampled { field } => {
                if field.time_grid().is_none() {
                    return Err(Error::invalid(
                        "field",
                        "sampled signals must be time-domain",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Same shape at a different strength.
    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            theta,
        }
    }

    /// Shape value at unit strength and whether `t` was inside a sampled grid.
    pub fn shape_checked(&self, t: f64) -> (f64, bool) {
        match &self.shape {
            SignalShape::Constant { q0 } => (*q0, true),
            SignalShape::HarmonicBurst {
                amplitude,
                omega_m,
                envelope_width,
                phase,
            } => {
                let x = t / envelope_width;
                (
                    amplitude * (-0.5 * x * x).exp() * (omega_m * t + phase).cos(),
                    true,
                )
            }
            SignalShape::ContinuousHarmonic {
                amplitude,
                omega_m,
                phase,
            } => (amplitude * (omega_m * t + phase).cos(), true),
            SignalShape::Sampled { field } => match field.interpolate(t) {
                Some(v) => (v.re, true),
                None => (0.0, false),
            },
        }
    }

    pub fn shape_at(&self, t: f64) -> f64 {
        self.shape_checked(t).0
    }

    /// Laboratory-frame displacement `θ·shape(t)`.
    pub fn profile(&self, t: f64) -> f64 {
        self.theta * self.shape_at(t)
    }

    /// Central mechanical frequency Ω (0 for a constant displacement).
    pub fn mechanical_frequency(&self) -> f64 {
        match &self.shape {
            SignalShape::Constant { .. } => 0.0,
            SignalShape::HarmonicBurst { omega_m, .. }
            | SignalShape::ContinuousHarmonic { omega_m, .. } => *omega_m,
            SignalShape::Sampled { field } => sampled_band(field).0,
        }
    }

    /// Spectral width ΔΩ (0 for persistent signals).
    pub fn spectral_width(&self) -> f64 {
        match &self.shape {
            SignalShape::Constant { .. } | SignalShape::ContinuousHarmonic { .. } => 0.0,
            SignalShape::HarmonicBurst { envelope_width, .. } => 1.0 / envelope_width,
            SignalShape::Sampled { field } => sampled_band(field).1,
        }
    }

    /// Highest frequency carrying appreciable spectral weight.
    pub fn max_frequency(&self) -> f64 {
        match &self.shape {
            SignalShape::HarmonicBurst {
                omega_m,
                envelope_width,
                ..
            } => omega_m + 8.0 / envelope_width,
            SignalShape::Sampled { field } => {
                let (c, w) = sampled_band(field);
                c + 4.0 * w
            }
            _ => self.mechanical_frequency(),
        }
    }
}

fn check_harmonic(amplitude: f64, omega_m: f64, phase: f64) -> Result<()> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid("amplitude", "must be non-negative"));
    }
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::invalid("omega_m", "must be positive"));
    }
    if !phase.is_finite() {
        return Err(Error::invalid("phase", "must be finite"));
    }
    Ok(())
}

/// Power-weighted centre and RMS width of the positive-frequency spectrum.
fn sampled_band(field: &SampledField) -> (f64, f64) {
    let real = field.map(|_, v| Complex64::new(v.re, 0.0));
    let Ok(spec) = forward_transform(&real) else {
        return (0.0, 0.0);
    };
    let fg = *spec.freq_grid().expect("transform yields a frequency grid");
    let (mut p, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, v) in spec.values().iter().enumerate() {
        let w = fg.omega(i);
        if w >= 0.0 {
            let pw = v.norm_sqr();
            p += pw;
            m1 += pw * w;
            m2 += pw * w * w;
        }
    }
    if p == 0.0 {
        return (0.0, 0.0);
    }
    let mean = m1 / p;
    (mean, (m2 / p - mean * mean).max(0.0).sqrt())
}

pub fn mech_time_profile(s: &MechanicalSignal, t: f64) -> f64 {
    s.profile(t)
}

/// One term `weight·√(2π)·δ(Ω − omega)` of a line spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub omega: f64,
    pub weight: Complex64,
}

/// Spectrum `Q̃_n(Ω)` of a mechanical signal as seen by cavity `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum MechSpectrum {
    /// Persistent signals: exact spectral lines.
    Lines(Vec<SpectralLine>),
    /// Finite-duration signals: samples on a frequency grid.
    Sampled(SampledField),
}

impl MechSpectrum {
    /// Renders lines as single-bin spikes of height `weight·√(2π)/dΩ`.
    pub fn to_field(&self, grid: &FreqGrid) -> SampledField {
        match self {
            MechSpectrum::Sampled(f) => f.clone(),
            MechSpectrum::Lines(lines) => {
                let mut values = vec![Complex64::new(0.0, 0.0); grid.n_points];
                for line in lines {
                    if let Some(i) = grid.nearest_index(line.omega) {
                        values[i] += line.weight * SQRT_2PI / grid.d_omega;
                    }
                }
                SampledField::new(Grid::Freq(*grid), values)
                    .expect("line weights are finite")
            }
        }
    }
}

/// Analytic `Q̃_n(Ω)` for a harmonic burst, including the delay phase.
fn burst_spectrum(
    theta_amp: f64,
    omega_m: f64,
    width: f64,
    phase: f64,
    delay: f64,
    omega: f64,
) -> Complex64 {
    let up = width * (omega - omega_m);
    let down = width * (omega + omega_m);
    let g_up = (-0.5 * up * up).exp();
    let g_down = (-0.5 * down * down).exp();
    let base = Complex64::from_polar(g_up, -phase) + Complex64::from_polar(g_down, phase);
    base * (0.5 * theta_amp * width) * Complex64::from_polar(1.0, -omega * delay)
}

/// Fourier transform of `Q_n`: lines for persistent signals, samples on
/// `grid` otherwise. `cavity_index` is 1-based.
pub fn mech_spectrum(
    s: &MechanicalSignal,
    cavity_index: usize,
    delay_t: f64,
    grid: &FreqGrid,
) -> Result<MechSpectrum> {
    if cavity_index == 0 {
        return Err(Error::invalid("cavity_index", "cavities are numbered from 1"));
    }
    let delay = (cavity_index - 1) as f64 * delay_t;
    Ok(match &s.shape {
        SignalShape::Constant { q0 } => MechSpectrum::Lines(vec![SpectralLine {
            omega: 0.0,
            weight: Complex64::new(q0 * s.theta, 0.0),
        }]),
        SignalShape::ContinuousHarmonic {
            amplitude,
            omega_m,
            phase,
        } => {
            let half = 0.5 * s.theta * amplitude;
            MechSpectrum::Lines(vec![
                SpectralLine {
                    omega: *omega_m,
                    weight: Complex64::from_polar(half, -phase - omega_m * delay),
                },
                SpectralLine {
                    omega: -omega_m,
                    weight: Complex64::from_polar(half, phase + omega_m * delay),
                },
            ])
        }
        SignalShape::HarmonicBurst {
            amplitude,
            omega_m,
            envelope_width,
            phase,
        } => MechSpectrum::Sampled(SampledField::from_fn(Grid::Freq(*grid), |w| {
            burst_spectrum(
                s.theta * amplitude,
                *omega_m,
                *envelope_width,
                *phase,
                delay,
                w,
            )
        })?),
        SignalShape::Sampled { field } => {
            MechSpectrum::Sampled(sampled_spectrum(field, s.theta, delay, grid)?)
        }
    })
}

/// Resamples a lab-frame profile onto the time grid conjugate to `grid` and
/// transforms it.
fn sampled_spectrum(
    field: &SampledField,
    theta: f64,
    delay: f64,
    grid: &FreqGrid,
) -> Result<SampledField> {
    let tg = grid.conjugate();
    let centered = TimeGrid::centered(tg.dt, tg.n_points)?;
    let profile = SampledField::from_fn(Grid::Time(centered), |t| {
        Complex64::new(theta * field.interpolate(t).map_or(0.0, |v| v.re), 0.0)
    })?;
    let spec = forward_transform(&profile)?;
    let src = *spec.freq_grid().expect("frequency grid");
    // Re-index onto the requested grid (same spacing; offsets by whole bins).
    SampledField::from_fn(Grid::Freq(*grid), |w| {
        let phase = Complex64::from_polar(1.0, -w * delay);
        let x = ((w - src.omega_start) / src.d_omega).round();
        if x >= 0.0 && (x as usize) < src.n_points {
            spec.values()[x as usize] * phase
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Q̃_n(m·dΩ)` for integer lags `m ∈ [m_min, m_max]`.
pub(crate) fn lag_spectrum(
    s: &MechanicalSignal,
    cavity_index: usize,
    delay_t: f64,
    d_omega: f64,
    n_points: usize,
    m_min: i64,
    m_max: i64,
) -> Result<Vec<Complex64>> {
    let delay = (cavity_index - 1) as f64 * delay_t;
    match &s.shape {
        SignalShape::HarmonicBurst {
            amplitude,
            omega_m,
            envelope_width,
            phase,
        } => Ok((m_min..=m_max)
            .map(|m| {
                burst_spectrum(
                    s.theta * amplitude,
                    *omega_m,
                    *envelope_width,
                    *phase,
                    delay,
                    m as f64 * d_omega,
                )
            })
            .collect()),
        SignalShape::Sampled { field } => {
            let tg = TimeGrid::centered(2.0 * PI / (n_points as f64 * d_omega), n_points)?;
            let fg = tg.conjugate();
            let spec = sampled_spectrum(field, s.theta, delay, &fg)?;
            let centre = (n_points / 2) as i64;
            Ok((m_min..=m_max)
                .map(|m| {
                    let idx = m + centre;
                    if idx >= 0 && (idx as usize) < n_points {
                        spec.values()[idx as usize]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect())
        }
        _ => Err(Error::UnsupportedSignal {
            index: cavity_index,
            method: "lag spectrum".into(),
            reason: "line spectra have no sampled representation".into(),
        }),
    }
}

/// `∫₀^∞ dΩ Q̃_n(Ω)/√(2π)`: the positive-frequency part of `Q_n` at `t = 0`.
/// A line sitting exactly at `Ω = 0` contributes half its weight.
pub fn halfline_inverse_fourier(
    s: &MechanicalSignal,
    cavity_index: usize,
    delay_t: f64,
) -> Result<Complex64> {
    if cavity_index == 0 {
        return Err(Error::invalid("cavity_index", "cavities are numbered from 1"));
    }
    let delay = (cavity_index - 1) as f64 * delay_t;
    match &s.shape {
        SignalShape::Constant { q0 } => Ok(Complex64::new(0.5 * q0 * s.theta, 0.0)),
        SignalShape::ContinuousHarmonic {
            amplitude,
            omega_m,
            phase,
        } => Ok(Complex64::from_polar(
            0.5 * s.theta * amplitude,
            -phase - omega_m * delay,
        )),
        SignalShape::HarmonicBurst {
            amplitude,
            omega_m,
            envelope_width,
            phase,
        } => {
            let upper = omega_m + 12.0 / envelope_width;
            let mut step = 0.02 / envelope_width;
            if delay > 0.0 {
                step = step.min(0.05 / delay);
            }
            let f = |w: f64| {
                burst_spectrum(
                    s.theta * amplitude,
                    *omega_m,
                    *envelope_width,
                    *phase,
                    delay,
                    w,
                )
            };
            Ok(simpson(f, 0.0, upper, step) / SQRT_2PI)
        }
        SignalShape::Sampled { field } => {
            let real = field.map(|_, v| Complex64::new(v.re * s.theta, 0.0));
            let spec = forward_transform(&real)?;
            let fg = *spec.freq_grid().expect("frequency grid");
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in spec.values().iter().enumerate() {
                let w = fg.omega(i);
                let weight = if w > 0.0 {
                    1.0
                } else if w == 0.0 {
                    0.5
                } else {
                    0.0
                };
                acc += v * weight * Complex64::from_polar(1.0, -w * delay);
            }
            Ok(acc * fg.d_omega / SQRT_2PI)
        }
    }
}

fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, max_step: f64) -> Complex64 {
    let mut n = ((b - a) / max_step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * h) * w;
    }
    acc * h / 3.0
}

/// Ordered cascade with a common inter-cavity delay and link transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub cavities: Vec<CavityParams>,
    pub signals: Vec<MechanicalSignal>,
    /// Propagation delay between consecutive cavities, s.
    pub delay_t: f64,
    /// Amplitude transmission per link.
    pub eta: f64,
    /// Reference laser frequency, rad/s (enters only as a bookkeeping phase).
    pub omega_l: f64,
}

impl ChainConfig {
    pub fn new(cavities: Vec<CavityParams>, signals: Vec<MechanicalSignal>) -> Result<Self> {
        let cfg = Self {
            cavities,
            signals,
            delay_t: 0.0,
            eta: 1.0,
            omega_l: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `n` copies of one cavity and signal.
    pub fn uniform(cavity: CavityParams, signal: MechanicalSignal, n: usize) -> Result<Self> {
        Self::new(vec![cavity; n], vec![signal; n])
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delay(mut self, delay_t: f64) -> Result<Self> {
        self.delay_t = delay_t;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cavities.is_empty() {
            return Err(Error::invalid("cavities", "need at least one cavity"));
        }
        if self.cavities.len() != self.signals.len() {
            return Err(Error::invalid(
                "signals",
                format!(
                    "{} signals for {} cavities",
                    self.signals.len(),
                    self.cavities.len()
                ),
            ));
        }
        for c in &self.cavities {
            c.validate()?;
        }
        for s in &self.signals {
            s.validate()?;
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid("eta", "must lie in [0, 1]"));
        }
        if !self.delay_t.is_finite() || self.delay_t < 0.0 {
            return Err(Error::invalid("delay_T", "must be finite and non-negative"));
        }
        if !self.omega_l.is_finite() {
            return Err(Error::invalid("omega_L", "must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cavities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cavities.is_empty()
    }

    /// `Q_n(t)` in the pulse frame (1-based `n`).
    pub fn shifted_profile(&self, n: usize, t: f64) -> (f64, bool) {
        let s = &self.signals[n - 1];
        let (v, ok) = s.shape_checked(t + (n - 1) as f64 * self.delay_t);
        (s.theta * v, ok)
    }

    /// Common signal strength θ, if all signals share one.
    pub fn common_theta(&self) -> Option<f64> {
        let first = self.signals[0].theta;
        self.signals
            .iter()
            .all(|s| s.theta == first)
            .then_some(first)
    }

    /// Copy with every signal at strength `theta`.
    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            signals: self.signals.iter().map(|s| s.with_theta(theta)).collect(),
            ..self.clone()
        }
    }

    pub fn kappa_range(&self) -> (f64, f64) {
        self.cavities
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
                (lo.min(c.kappa), hi.max(c.kappa))
            })
    }

    /// Time grid following the default sizing rule, also resolving the
    /// fastest mechanical component.
    pub fn time_grid(&self, p: &PulseParams, rule: &GridRule) -> Result<TimeGrid> {
        let (lo, hi) = self.kappa_range();
        let rate = self
            .signals
            .iter()
            .map(MechanicalSignal::max_frequency)
            .fold(0.0, f64::max);
        rule.time_grid(lo, hi, p.tau, rate, 0.0)
    }

    pub fn max_epsilon(&self) -> f64 {
        self.cavities
            .iter()
            .map(|c| c.epsilon().abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Stroboscopic,
    CwFiniteSignal,
    CwContinuousSignal,
    NumericOnly,
}

/// Dimensionless validity ratios for one cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityRatios {
    pub omega_tau: f64,
    pub kappa_tau: f64,
    pub width_tau: f64,
    pub omega_over_kappa: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDiagnostics {
    pub per_cavity: Vec<CavityRatios>,
    pub regime: Regime,
}

/// Cutoffs standing in for "≪ 1" and "≫ 1".
pub const SMALL_RATIO: f64 = 0.1;
pub const LARGE_RATIO: f64 = 10.0;

pub fn diagnose_regime(cfg: &ChainConfig, p: &PulseParams) -> RegimeDiagnostics {
    let per_cavity: Vec<CavityRatios> = cfg
        .cavities
        .iter()
        .zip(&cfg.signals)
        .map(|(c, s)| {
            let omega = s.mechanical_frequency();
            CavityRatios {
                omega_tau: omega * p.tau,
                kappa_tau: c.kappa * p.tau,
                width_tau: s.spectral_width() * p.tau,
                omega_over_kappa: omega / c.kappa,
                epsilon: c.epsilon().abs(),
            }
        })
        .collect();
    let max = |f: fn(&CavityRatios) -> f64| per_cavity.iter().map(f).fold(f64::MIN, f64::max);
    let min = |f: fn(&CavityRatios) -> f64| per_cavity.iter().map(f).fold(f64::MAX, f64::min);

    let regime = if max(|r| r.omega_tau) < SMALL_RATIO && min(|r| r.kappa_tau) > LARGE_RATIO {
        Regime::Stroboscopic
    } else if min(|r| r.width_tau) > LARGE_RATIO {
        Regime::CwFiniteSignal
    } else if min(|r| r.omega_tau) > LARGE_RATIO && max(|r| r.width_tau) < SMALL_RATIO {
        Regime::CwContinuousSignal
    } else {
        Regime::NumericOnly
    };
    RegimeDiagnostics { per_cavity, regime }
}
