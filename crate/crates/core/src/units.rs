//! Physical constants and unit conversions.
//!
//! Every frequency-like quantity in this crate is an angular frequency in
//! rad/s. Configuration files and the CLI quote linear frequencies
//! `ν = ω/2π` in MHz; [`mhz`] and [`to_mhz`] are the only places where the
//! factor `2π × 10⁶` is applied.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Mass of a ⁸⁷Rb atom (kg).
pub const RB87_MASS: f64 = 1.443e-25;

/// Rb D2 transition wavelength (m).
pub const RB_WAVELENGTH: f64 = 780e-9;

/// Rb D2 half-linewidth Γ as a linear frequency (MHz). The excited state
/// decays at rate 2Γ.
pub const RB_GAMMA_MHZ: f64 = 3.0;

/// Converts a linear frequency in MHz to an angular frequency in rad/s.
#[inline]
pub fn mhz(nu_mhz: f64) -> f64 {
    2.0 * PI * 1e6 * nu_mhz
}

/// Converts an angular frequency in rad/s to a linear frequency in MHz.
#[inline]
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

/// Converts a rate given per microsecond to a rate per second.
#[inline]
pub fn per_us(rate_per_us: f64) -> f64 {
    rate_per_us * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        assert_eq!(mhz(0.0), 0.0);
        assert!((to_mhz(mhz(12.0)) - 12.0).abs() < 1e-12);
        assert!((mhz(1.0) - 6.283_185_307_179_586e6).abs() < 1e-6);
    }
}
