//! Dispersive detection with a balanced homodyne receiver.
//!
//! For a pump far detuned from the atom (`Δ_a ≫ Γ`) and resonant with the
//! cavity, the atom mainly shifts the cavity resonance by U. The output
//! field acquires the phase `φ = −U/κ` and a shot-noise-limited homodyne
//! receiver with an ideal local oscillator reaches
//! `S_hom = 2√N_out |sin φ|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{cooperativity, AtomParams, CavityParams, DriveParams};
use crate::resonant::{maximize_over_pump, optimize_kappa_t, output_photons, saturation_pump, KappaTOptimum};
use crate::steady_state::{empty_cavity_state, solve_stationary};

/// |φ| below which the small-angle forms apply.
pub const SMALL_ANGLE_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneReport {
    /// Cavity phase shift φ = −U/κ (rad).
    pub phase_shift: f64,
    pub snr: f64,
    /// Photons at the detector with the atom present.
    pub n_out: f64,
    /// Photons at the detector for the empty cavity.
    pub n_out_empty: f64,
    pub m_scattered: f64,
    pub saturation: f64,
    /// |φ| < 0.3.
    pub small_angle_valid: bool,
}

/// Homodyne statistic from the full nonlinear stationary solve.
pub fn homodyne_report(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
) -> Result<HomodyneReport> {
    if cavity.delta_c != 0.0 {
        return Err(Error::NotDispersive {
            delta_c: cavity.delta_c,
        });
    }
    if atom.delta_a.abs() < 10.0 * atom.gamma {
        log::warn!(
            "homodyne detection with |delta_a| = {:.3} gamma; absorption is not negligible",
            atom.delta_a.abs() / atom.gamma
        );
    }
    let state = solve_stationary(atom, cavity, drive, cavity.g_max)?;
    let phase_shift = -state.light_shift / cavity.kappa();
    let n_out = output_photons(&state, cavity, drive);
    let n_out_empty = output_photons(&empty_cavity_state(cavity, drive), cavity, drive);
    Ok(HomodyneReport {
        phase_shift,
        snr: 2.0 * n_out.sqrt() * phase_shift.sin().abs(),
        n_out,
        n_out_empty,
        m_scattered: 2.0 * atom.gamma * drive.tau * state.rho11,
        saturation: state.saturation,
        small_angle_valid: phase_shift.abs() < SMALL_ANGLE_LIMIT,
    })
}

/// Low-saturation asymptote `S_hom = 2√(j_in τ) (κ_T/κ) g²/(Δ_a κ)`.
pub fn snr_homodyne_weak_limit(atom: &AtomParams, cavity: &CavityParams, drive: &DriveParams) -> f64 {
    let kappa = cavity.kappa();
    2.0 * (drive.j_in * drive.tau).sqrt() * cavity.kappa_t / kappa * cavity.g_max * cavity.g_max
        / (atom.delta_a.abs() * kappa)
}

/// High-saturation asymptote `S_hom = |Δ_a| √(τ/j_in)`.
pub fn snr_homodyne_strong_limit(atom: &AtomParams, drive: &DriveParams) -> f64 {
    atom.delta_a.abs() * (drive.tau / drive.j_in).sqrt()
}

/// Scattered photons for a given `snr`: `M = S² (κ/κ_T) · ½ C⁻¹`.
pub fn m_homodyne(snr: f64, atom: &AtomParams, cavity: &CavityParams) -> f64 {
    snr * snr * cavity.kappa() / cavity.kappa_t * 0.5 / cooperativity(atom, cavity)
}

/// Output photons needed for a given `snr`:
/// `N_out = ¼ S² (Γκ/g²)² (Δ_a/Γ)²`.
pub fn n_out_required(snr: f64, atom: &AtomParams, cavity: &CavityParams) -> f64 {
    let inv_c = atom.gamma * cavity.kappa() / (cavity.g_max * cavity.g_max);
    0.25 * snr * snr * inv_c * inv_c * (atom.delta_a / atom.gamma).powi(2)
}

/// Pump rate maximising S_hom at fixed cavity.
pub fn max_homodyne_over_pump(
    atom: &AtomParams,
    cavity: &CavityParams,
    tau: f64,
) -> Result<(f64, HomodyneReport)> {
    // Saturation with a detuned atom needs (Δ_a² + Γ²)/Γ² times more photons.
    let detuned = 1.0 + (atom.delta_a / atom.gamma).powi(2);
    let centre = saturation_pump(atom, cavity) * detuned;
    let (j_in, _) = maximize_over_pump(centre, |j| {
        Ok(homodyne_report(atom, cavity, &DriveParams { j_in: j, tau })?.snr)
    })?;
    Ok((j_in, homodyne_report(atom, cavity, &DriveParams { j_in, tau })?))
}

/// Mirror transmission maximising the pump-optimised S_hom.
pub fn optimal_kappa_t_homodyne(
    atom: &AtomParams,
    cavity: &CavityParams,
    tau: f64,
    lower: f64,
    upper: f64,
) -> Result<KappaTOptimum> {
    optimize_kappa_t(lower, upper, |kt| {
        max_homodyne_over_pump(atom, &cavity.with_kappa_t(kt), tau).map(|(j, r)| (r.snr, j))
    })
}
