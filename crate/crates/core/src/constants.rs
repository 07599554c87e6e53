// SPDX-License-Identifier: Apache-2.0

//! Physical constants (CODATA 2018 exact or recommended values).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Newtonian gravitational constant, m³/(kg·s²).
pub const G_NEWTON: f64 = 6.674e-11;
