// SPDX-License-Identifier: Apache-2.0

//! Uniform-grid complex fields and the symmetric Fourier pair
//!
//! ```text
//! f̃(ω) = ∫ dt e^{+iωt} f(t) / √(2π),     f(t) = ∫ dω e^{−iωt} f̃(ω) / √(2π)
//! ```
//!
//! Frequencies are always offsets from the reference laser frequency. A time
//! grid with `n` points and step `dt` is conjugate to the frequency grid with
//! step `2π/(n·dt)`; the discrete pair is exactly unitary, so Parseval and the
//! round trip hold to rounding error.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::fmt12;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Relative tolerance used when deciding whether two grids coincide.
const GRID_MATCH_RTOL: f64 = 1e-12;

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= GRID_MATCH_RTOL * scale.abs().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub dt: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n_points: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
        }
        if n_points < 2 {
            return Err(Error::invalid("n_points", "need at least two samples"));
        }
        if !t_start.is_finite() {
            return Err(Error::invalid("t_start", "must be finite"));
        }
        Ok(Self {
            t_start,
            dt,
            n_points,
        })
    }

    /// Grid with `t = 0` at index `n/2`.
    pub fn centered(dt: f64, n_points: usize) -> Result<Self> {
        Self::new(-((n_points / 2) as f64) * dt, dt, n_points)
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_points - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.time(i))
    }

    /// Frequency grid paired with this grid by the discrete transform.
    pub fn conjugate(&self) -> FreqGrid {
        let d_omega = 2.0 * PI / (self.n_points as f64 * self.dt);
        FreqGrid {
            omega_start: -((self.n_points / 2) as f64) * d_omega,
            d_omega,
            n_points: self.n_points,
            time_start: self.t_start,
        }
    }

    /// Same start, half the step, twice the points.
    pub fn refined(&self) -> Self {
        Self {
            t_start: self.t_start,
            dt: 0.5 * self.dt,
            n_points: 2 * self.n_points,
        }
    }

    /// Whether the grid covers `[-half_span, +half_span]`.
    pub fn covers(&self, half_span: f64) -> bool {
        let slack = 1e-9 * self.dt;
        self.t_start <= -half_span + slack && self.t_end() >= half_span - slack
    }

    pub fn matches(&self, other: &TimeGrid) -> bool {
        self.n_points == other.n_points
            && close(self.dt, other.dt, self.dt)
            && close(self.t_start, other.t_start, self.dt * self.n_points as f64)
    }
}

/// Frequency grid. `time_start` records the origin of the conjugate time grid,
/// which the inverse transform needs to restore absolute times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqGrid {
    pub omega_start: f64,
    pub d_omega: f64,
    pub n_points: usize,
    pub time_start: f64,
}

impl FreqGrid {
    pub fn new(omega_start: f64, d_omega: f64, n_points: usize, time_start: f64) -> Result<Self> {
        if !(d_omega > 0.0) || !d_omega.is_finite() {
            return Err(Error::invalid(
                "d_omega",
                format!("must be positive, got {d_omega}"),
            ));
        }
        if n_points < 2 {
            return Err(Error::invalid("n_points", "need at least two samples"));
        }
        Ok(Self {
            omega_start,
            d_omega,
            n_points,
            time_start,
        })
    }

    #[inline]
    pub fn omega(&self, i: usize) -> f64 {
        self.omega_start + i as f64 * self.d_omega
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.omega(i))
    }

    pub fn omega_end(&self) -> f64 {
        self.omega(self.n_points - 1)
    }

    pub fn conjugate(&self) -> TimeGrid {
        TimeGrid {
            t_start: self.time_start,
            dt: 2.0 * PI / (self.n_points as f64 * self.d_omega),
            n_points: self.n_points,
        }
    }

    /// Index of the sample nearest to `omega`, if it lies on the grid.
    pub fn nearest_index(&self, omega: f64) -> Option<usize> {
        let x = ((omega - self.omega_start) / self.d_omega).round();
        (x >= 0.0 && x < self.n_points as f64).then_some(x as usize)
    }

    pub fn matches(&self, other: &FreqGrid) -> bool {
        let span = self.d_omega * self.n_points as f64;
        self.n_points == other.n_points
            && close(self.d_omega, other.d_omega, self.d_omega)
            && close(self.omega_start, other.omega_start, span)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Time(TimeGrid),
    Freq(FreqGrid),
}

impl Grid {
    pub fn n_points(&self) -> usize {
        match self {
            Grid::Time(g) => g.n_points,
            Grid::Freq(g) => g.n_points,
        }
    }

    pub fn step(&self) -> f64 {
        match self {
            Grid::Time(g) => g.dt,
            Grid::Freq(g) => g.d_omega,
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        match self {
            Grid::Time(g) => g.time(i),
            Grid::Freq(g) => g.omega(i),
        }
    }

    pub fn matches(&self, other: &Grid) -> bool {
        match (self, other) {
            (Grid::Time(a), Grid::Time(b)) => a.matches(b),
            (Grid::Freq(a), Grid::Freq(b)) => a.matches(b),
            _ => false,
        }
    }

    fn domain(&self) -> Domain {
        match self {
            Grid::Time(_) => Domain::Time,
            Grid::Freq(_) => Domain::Freq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Time,
    Freq,
}

/// Complex samples on a uniform time or frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "values",
                format!("non-finite sample at index {i}"),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            grid,
        }
    }

    /// Samples `f` at every grid coordinate.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.n_points())
            .map(|i| f(grid.coordinate(i)))
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.grid.domain()
    }

    pub fn time_grid(&self) -> Option<&TimeGrid> {
        match &self.grid {
            Grid::Time(g) => Some(g),
            Grid::Freq(_) => None,
        }
    }

    pub fn freq_grid(&self) -> Option<&FreqGrid> {
        match &self.grid {
            Grid::Freq(g) => Some(g),
            Grid::Time(_) => None,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.grid.coordinate(i)
    }

    /// ∫|f|² over the grid (rectangle rule, exact for the discrete pair).
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    fn check_same_grid(&self, other: &SampledField) -> Result<()> {
        if self.grid.matches(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                "fields live on different grids".to_string(),
            ))
        }
    }

    /// ‖self − other‖ / ‖other‖.
    pub fn relative_l2(&self, reference: &SampledField) -> Result<f64> {
        self.check_same_grid(reference)?;
        let diff: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let norm: f64 = reference.values.iter().map(|v| v.norm_sqr()).sum();
        if norm == 0.0 {
            return Ok(if diff == 0.0 { 0.0 } else { f64::INFINITY });
        }
        Ok((diff / norm).sqrt())
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> SampledField {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> SampledField {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| f(self.grid.coordinate(i), *v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Relabels the grid so that every sample moves later by `shift`.
    pub fn time_shifted(&self, shift: f64) -> Result<SampledField> {
        match self.grid {
            Grid::Time(g) => Ok(Self {
                grid: Grid::Time(TimeGrid {
                    t_start: g.t_start + shift,
                    ..g
                }),
                values: self.values.clone(),
            }),
            Grid::Freq(_) => Err(Error::GridMismatch(
                "time shift of a frequency-domain field".to_string(),
            )),
        }
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Option<Complex64> {
        let step = self.grid.step();
        let u = (x - self.grid.coordinate(0)) / step;
        let last = (self.values.len() - 1) as f64;
        if !(u >= 0.0 && u <= last) {
            return None;
        }
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let frac = u - i as f64;
        Some(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    /// CSV with columns `t|omega, re, im`, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let coord = match self.grid {
            Grid::Time(_) => "t",
            Grid::Freq(_) => "omega",
        };
        writeln!(w, "{coord},re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt12(self.grid.coordinate(i)),
                fmt12(v.re),
                fmt12(v.im)
            )?;
        }
        Ok(())
    }

    /// CSV with columns `omega, power` holding |f̃(ω)|².
    pub fn write_power_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,power")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt12(self.grid.coordinate(i)), fmt12(v.norm_sqr()))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    start: f64,
    step: f64,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time_start: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    domain: Domain,
    grid: GridRepr,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<SampledField> for FieldRepr {
    fn from(f: SampledField) -> Self {
        let grid = match f.grid {
            Grid::Time(g) => GridRepr {
                start: g.t_start,
                step: g.dt,
                n: g.n_points,
                time_start: None,
            },
            Grid::Freq(g) => GridRepr {
                start: g.omega_start,
                step: g.d_omega,
                n: g.n_points,
                time_start: Some(g.time_start),
            },
        };
        FieldRepr {
            domain: f.grid.domain(),
            grid,
            re: f.values.iter().map(|v| v.re).collect(),
            im: f.values.iter().map(|v| v.im).collect(),
        }
    }
}

impl TryFrom<FieldRepr> for SampledField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::GridMismatch(
                "re and im arrays differ in length".to_string(),
            ));
        }
        let grid = match r.domain {
            Domain::Time => Grid::Time(TimeGrid::new(r.grid.start, r.grid.step, r.grid.n)?),
            Domain::Freq => {
                // A missing origin means the conjugate time grid is centred.
                let time_start = r.grid.time_start.unwrap_or_else(|| {
                    let dt = 2.0 * PI / (r.grid.n as f64 * r.grid.step);
                    -((r.grid.n / 2) as f64) * dt
                });
                Grid::Freq(FreqGrid::new(
                    r.grid.start,
                    r.grid.step,
                    r.grid.n,
                    time_start,
                )?)
            }
        };
        let values = r
            .re
            .into_iter()
            .zip(r.im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        SampledField::new(grid, values)
    }
}

/// Time-domain samples to the conjugate frequency grid.
pub fn forward_transform(f: &SampledField) -> Result<SampledField> {
    let tg = *f.time_grid().ok_or_else(|| {
        Error::GridMismatch("forward transform expects a time-domain field".to_string())
    })?;
    let fg = tg.conjugate();
    let n = tg.n_points;
    let (t0, w0) = (tg.t_start, fg.omega_start);

    // f̃_k = dt/√2π · e^{iω₀t₀} e^{ik·dω·t₀} Σ_j [e^{iω₀·j·dt} f_j] e^{+2πijk/n}
    let mut buf: Vec<Complex64> = f
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(1.0, w0 * j as f64 * tg.dt))
        .collect();
    FftPlanner::new()
        .plan_fft(n, FftDirection::Inverse)
        .process(&mut buf);
    let norm = tg.dt / SQRT_2PI;
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(norm, w0 * t0 + k as f64 * fg.d_omega * t0);
    }
    SampledField::new(Grid::Freq(fg), buf)
}

/// Frequency-domain samples back to the conjugate time grid.
pub fn inverse_transform(f: &SampledField) -> Result<SampledField> {
    let fg = *f.freq_grid().ok_or_else(|| {
        Error::GridMismatch("inverse transform expects a frequency-domain field".to_string())
    })?;
    let tg = fg.conjugate();
    let n = fg.n_points;
    let (t0, w0) = (tg.t_start, fg.omega_start);

    let mut buf: Vec<Complex64> = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -(k as f64) * fg.d_omega * t0))
        .collect();
    FftPlanner::new()
        .plan_fft(n, FftDirection::Forward)
        .process(&mut buf);
    let norm = fg.d_omega / SQRT_2PI;
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(norm, -(w0 * t0) - w0 * j as f64 * tg.dt);
    }
    SampledField::new(Grid::Time(tg), buf)
}

/// Gaussian input pulse `β(t) = β̄ e^{−t²/2τ²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseParams {
    pub beta_bar: f64,
    pub tau: f64,
}

impl PulseParams {
    pub fn new(beta_bar: f64, tau: f64) -> Result<Self> {
        let p = Self { beta_bar, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid("pulse.tau", "must be positive"));
        }
        if !(self.beta_bar >= 0.0) || !self.beta_bar.is_finite() {
            return Err(Error::invalid("pulse.beta_bar", "must be non-negative"));
        }
        Ok(())
    }

    /// Pulse with the given photon number and duration.
    pub fn from_photon_number(n_in: f64, tau: f64) -> Result<Self> {
        Self::new((n_in / (PI.sqrt() * tau)).sqrt(), tau)
    }

    #[inline]
    pub fn amplitude(&self, t: f64) -> f64 {
        let x = t / self.tau;
        self.beta_bar * (-0.5 * x * x).exp()
    }

    /// Analytic spectrum `β̄τ e^{−τ²ω²/2}`.
    #[inline]
    pub fn spectrum(&self, omega: f64) -> f64 {
        let x = self.tau * omega;
        self.beta_bar * self.tau * (-0.5 * x * x).exp()
    }
}

/// Half-width a grid must cover around the pulse centre.
pub const PULSE_HALF_WIDTHS: f64 = 6.0;

pub fn gaussian_pulse(p: &PulseParams, grid: &TimeGrid) -> Result<SampledField> {
    p.validate()?;
    let required = PULSE_HALF_WIDTHS * p.tau;
    if !grid.covers(required) {
        return Err(Error::GridTooNarrow {
            start: grid.t_start,
            end: grid.t_end(),
            required,
        });
    }
    SampledField::from_fn(Grid::Time(*grid), |t| {
        Complex64::new(p.amplitude(t), 0.0)
    })
}

/// Analytic spectrum of the pulse sampled on `grid`.
pub fn gaussian_spectrum(p: &PulseParams, grid: &FreqGrid) -> SampledField {
    SampledField {
        grid: Grid::Freq(*grid),
        values: grid
            .omegas()
            .map(|w| Complex64::new(p.spectrum(w), 0.0))
            .collect(),
    }
}

/// Mean photon number `√π τ β̄²` of the pulse.
pub fn photon_number(p: &PulseParams) -> f64 {
    PI.sqrt() * p.tau * p.beta_bar * p.beta_bar
}

/// Photon number from trapezoid quadrature of `|β(t)|²` on `grid`.
pub fn photon_number_on_grid(p: &PulseParams, grid: &TimeGrid) -> Result<f64> {
    let pulse = gaussian_pulse(p, grid)?;
    let v = pulse.values();
    let inner: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let ends = 0.5 * (v[0].norm_sqr() + v[v.len() - 1].norm_sqr());
    Ok((inner - ends) * grid.dt)
}

/// Grid sizing rule for a pulse probing cavities with the given linewidths.
///
/// Step: `dt ≤ min(kappa_dt/κ_max, τ/pulse_samples, 1/(20·rate_max))`.
/// Span: `±max(6τ, ring_down/κ_min, extra_half_span)`. Size: next power of two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridRule {
    pub kappa_dt: f64,
    pub pulse_samples: f64,
    pub ring_down: f64,
}

impl Default for GridRule {
    fn default() -> Self {
        Self {
            kappa_dt: 0.05,
            pulse_samples: 50.0,
            ring_down: 40.0,
        }
    }
}

impl GridRule {
    pub fn with_kappa_dt(kappa_dt: f64) -> Self {
        Self {
            kappa_dt,
            ..Self::default()
        }
    }

    /// `extra_rate` is the fastest additional rate (e.g. a mechanical
    /// frequency) to resolve; `extra_half_span` any additional support.
    pub fn time_grid(
        &self,
        kappa_min: f64,
        kappa_max: f64,
        tau: f64,
        extra_rate: f64,
        extra_half_span: f64,
    ) -> Result<TimeGrid> {
        if !(kappa_min > 0.0 && kappa_max >= kappa_min) {
            return Err(Error::invalid("kappa", "linewidths must be positive"));
        }
        if !(tau > 0.0) {
            return Err(Error::invalid("pulse.tau", "must be positive"));
        }
        let mut dt = (self.kappa_dt / kappa_max).min(tau / self.pulse_samples);
        if extra_rate > 0.0 {
            dt = dt.min(1.0 / (20.0 * extra_rate));
        }
        let half = (PULSE_HALF_WIDTHS * tau)
            .max(self.ring_down / kappa_min)
            .max(extra_half_span);
        let needed = 2.0 * (half / dt + 1.0);
        if needed > (1u64 << 30) as f64 {
            return Err(Error::invalid(
                "grid",
                format!("rule asks for {needed:.3e} samples"),
            ));
        }
        let n = (needed.ceil() as usize).next_power_of_two();
        TimeGrid::centered(dt, n)
    }
}
