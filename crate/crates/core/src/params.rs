//! Atom, cavity and drive parameters shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::units::{self, HBAR, SPEED_OF_LIGHT};

/// Two-level atom constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Half-linewidth Γ (rad/s); the excited state decays at 2Γ.
    pub gamma: f64,
    /// Laser–atom detuning Δ_a (rad/s).
    pub delta_a: f64,
    /// Transition wavelength λ (m).
    pub wavelength: f64,
    /// Atomic mass (kg).
    pub mass: f64,
}

impl AtomParams {
    pub fn new(gamma: f64, delta_a: f64, wavelength: f64, mass: f64) -> Result<Self> {
        let atom = Self {
            gamma,
            delta_a,
            wavelength,
            mass,
        };
        atom.validate()?;
        Ok(atom)
    }

    /// ⁸⁷Rb on the D2 line, resonant drive.
    pub fn rubidium() -> Self {
        Self {
            gamma: units::mhz(units::RB_GAMMA_MHZ),
            delta_a: 0.0,
            wavelength: units::RB_WAVELENGTH,
            mass: units::RB87_MASS,
        }
    }

    pub fn with_delta_a(self, delta_a: f64) -> Self {
        Self { delta_a, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be > 0, got {}", self.gamma)));
        }
        if !self.delta_a.is_finite() {
            return Err(invalid("delta_a", "must be finite"));
        }
        if !(self.wavelength > 0.0) {
            return Err(invalid("wavelength", format!("must be > 0, got {}", self.wavelength)));
        }
        if !(self.mass > 0.0) {
            return Err(invalid("mass", format!("must be > 0, got {}", self.mass)));
        }
        Ok(())
    }

    /// Wave number k = 2π/λ (1/m).
    pub fn wave_number(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Single-photon recoil momentum ħk (kg m/s).
    pub fn recoil_momentum(&self) -> f64 {
        HBAR * self.wave_number()
    }
}

/// Cavity geometry and decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Peak single-photon Rabi frequency g (rad/s).
    pub g_max: f64,
    /// Decay through the output mirror κ_T (rad/s).
    pub kappa_t: f64,
    /// Decay through every other channel κ_loss (rad/s).
    pub kappa_loss: f64,
    /// Laser–cavity detuning Δ_c (rad/s).
    pub delta_c: f64,
    /// Mode waist at the atom (m).
    pub waist: f64,
    /// Mirror-to-centre distance L (m).
    pub length: f64,
    /// Input mirror much more reflective than the output mirror: doubles the
    /// transmitted photon number.
    pub asymmetric_input: bool,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_t > 0.0 && self.kappa_t.is_finite()) {
            return Err(invalid("kappa_t", format!("must be > 0, got {}", self.kappa_t)));
        }
        if !(self.kappa_loss >= 0.0 && self.kappa_loss.is_finite()) {
            return Err(invalid(
                "kappa_loss",
                format!("must be >= 0, got {}", self.kappa_loss),
            ));
        }
        if !(self.g_max >= 0.0 && self.g_max.is_finite()) {
            return Err(invalid("g_max", format!("must be >= 0, got {}", self.g_max)));
        }
        if !self.delta_c.is_finite() {
            return Err(invalid("delta_c", "must be finite"));
        }
        Ok(())
    }

    /// Total field decay rate κ = κ_T + κ_loss.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa_t + self.kappa_loss
    }

    /// Photons reaching the detector per intracavity photon per second.
    #[inline]
    pub fn output_rate_per_photon(&self) -> f64 {
        if self.asymmetric_input {
            2.0 * self.kappa_t
        } else {
            self.kappa_t
        }
    }

    pub fn with_g(self, g_max: f64) -> Self {
        Self { g_max, ..self }
    }

    pub fn with_kappa_t(self, kappa_t: f64) -> Self {
        Self { kappa_t, ..self }
    }

    pub fn with_kappa_loss(self, kappa_loss: f64) -> Self {
        Self { kappa_loss, ..self }
    }

    pub fn with_delta_c(self, delta_c: f64) -> Self {
        Self { delta_c, ..self }
    }
}

/// Pump laser and detector integration time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Incident photon rate j_in (photons/s).
    pub j_in: f64,
    /// Integration time τ (s).
    pub tau: f64,
}

impl DriveParams {
    pub fn new(j_in: f64, tau: f64) -> Result<Self> {
        let drive = Self { j_in, tau };
        drive.validate()?;
        Ok(drive)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j_in >= 0.0 && self.j_in.is_finite()) {
            return Err(invalid("j_in", format!("must be >= 0, got {}", self.j_in)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", format!("must be > 0, got {}", self.tau)));
        }
        Ok(())
    }

    pub fn with_j_in(self, j_in: f64) -> Self {
        Self { j_in, ..self }
    }
}

/// Cavity pump amplitude η = √(j_in κ_T).
pub fn pump_amplitude(drive: &DriveParams, cavity: &CavityParams) -> f64 {
    (drive.j_in * cavity.kappa_t).sqrt()
}

/// Cooperativity C = g²/(κΓ) at the field maximum.
pub fn cooperativity(atom: &AtomParams, cavity: &CavityParams) -> f64 {
    cavity.g_max * cavity.g_max / (cavity.kappa() * atom.gamma)
}

/// Resonant absorption cross section σ_a = 3λ²/2π (m²).
pub fn atomic_cross_section(wavelength: f64) -> f64 {
    3.0 * wavelength * wavelength / (2.0 * std::f64::consts::PI)
}

/// Effective area π w0²/2 of a Gaussian mode with field waist `waist`.
pub fn gaussian_mode_area(waist: f64) -> f64 {
    std::f64::consts::PI * waist * waist / 2.0
}

/// Geometric estimate 2 (σ_a/A) n_rt of the cooperativity.
///
/// Only meaningful for mode areas well above σ_a; below 5σ_a a warning is
/// logged and the value is still returned.
pub fn geometric_cooperativity(wavelength: f64, waist_area: f64, n_rt: f64) -> f64 {
    let sigma = atomic_cross_section(wavelength);
    if waist_area < 5.0 * sigma {
        log::warn!(
            "mode area {waist_area:e} m^2 is below 5 sigma_a ({:e} m^2); paraxial estimate unreliable",
            5.0 * sigma
        );
    }
    2.0 * sigma / waist_area * n_rt
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTrips {
    /// Mean number of round trips before a photon decays.
    pub n_rt: f64,
    pub finesse: f64,
}

/// Round trips n_rt = c/(4Lκ) and finesse 4π n_rt, using the geometric
/// length `cavity.length`.
pub fn round_trips_and_finesse(cavity: &CavityParams) -> Result<RoundTrips> {
    if !(cavity.length > 0.0) {
        return Err(invalid("length", "must be > 0"));
    }
    let kappa = cavity.kappa();
    if !(kappa > 0.0) {
        return Err(invalid("kappa", "must be > 0"));
    }
    let n_rt = SPEED_OF_LIGHT / (4.0 * cavity.length * kappa);
    Ok(RoundTrips {
        n_rt,
        finesse: 4.0 * std::f64::consts::PI * n_rt,
    })
}

/// Decay rate κ_add = p c/(4 n_eff L) equivalent to a fractional loss `p`
/// per round trip.
pub fn loss_fraction_to_rate(p: f64, length: f64, n_eff: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(invalid("p", format!("loss fraction must lie in [0, 1), got {p}")));
    }
    if !(length > 0.0) {
        return Err(invalid("length", "must be > 0"));
    }
    if !(n_eff > 0.0) {
        return Err(invalid("n_eff", "must be > 0"));
    }
    Ok(p * SPEED_OF_LIGHT / (4.0 * n_eff * length))
}
