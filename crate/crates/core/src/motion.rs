//! Back-action of resonant detection on the atomic motion.
//!
//! Valid for a resonant pump in weak saturation. Averages run over the
//! standing-wave coordinate only; the transverse Gaussian profile is not
//! averaged.

use serde::{Deserialize, Serialize};

use crate::params::{cooperativity, pump_amplitude, AtomParams, CavityParams, DriveParams};

/// Saturation above which the averages are flagged as extrapolated.
pub const WEAK_SATURATION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionAverages {
    pub s_bar: f64,
    pub m_bar: f64,
    /// kg² m² / s³.
    pub d_bar: f64,
    /// rms momentum change, in units of ħk.
    pub delta_p: f64,
    /// rms position spread (m).
    pub delta_z: f64,
    /// Antinode saturation of the weak-field solution.
    pub saturation: f64,
    pub weak_saturation_violated: bool,
}

/// Momentum diffusion `D = Γ(ħk)²η²g²/[Γκ + g²cos²(kz)]²` at axial position `z`.
pub fn diffusion_coefficient(atom: &AtomParams, cavity: &CavityParams, drive: &DriveParams, z: f64) -> f64 {
    let hk = atom.recoil_momentum();
    let eta = pump_amplitude(drive, cavity);
    let g2 = cavity.g_max * cavity.g_max;
    let c = (atom.wave_number() * z).cos();
    let denom = atom.gamma * cavity.kappa() + g2 * c * c;
    atom.gamma * hk * hk * eta * eta * g2 / (denom * denom)
}

/// Weak-field saturation parameter `2g²N/Γ²` at an antinode.
pub fn antinode_saturation(atom: &AtomParams, cavity: &CavityParams, drive: &DriveParams) -> f64 {
    let eta = pump_amplitude(drive, cavity);
    let g2 = cavity.g_max * cavity.g_max;
    let n = eta * eta / (cavity.kappa() + g2 / atom.gamma).powi(2);
    2.0 * g2 * n / (atom.gamma * atom.gamma)
}

/// Averages over a flat distribution along the cavity axis.
pub fn spatial_averages(atom: &AtomParams, cavity: &CavityParams, drive: &DriveParams) -> MotionAverages {
    let c = cooperativity(atom, cavity);
    let jt = drive.j_in * drive.tau;
    let ratio = cavity.kappa_t / cavity.kappa();
    let s_bar = jt.sqrt() * ratio * (1.0 + c / 2.0 - 1.0 / (1.0 + c).sqrt());
    let m_bar = jt * ratio * c / (1.0 + c).powf(1.5);
    let hk = atom.recoil_momentum();
    let d_bar = hk * hk / drive.tau * (1.0 + c / 2.0) * m_bar;
    let delta_p = (2.0 * m_bar * (1.0 + c / 2.0)).sqrt();
    let saturation = antinode_saturation(atom, cavity, drive);
    let violated = saturation > WEAK_SATURATION_LIMIT;
    if violated {
        log::warn!("motion averages at saturation {saturation:.3}; weak-field forms are extrapolated");
    }
    MotionAverages {
        s_bar,
        m_bar,
        d_bar,
        delta_p,
        delta_z: position_spread(atom, delta_p, drive.tau),
        saturation,
        weak_saturation_violated: violated,
    }
}

/// `Δz = (Δp ħk / m) τ/√3` for `delta_p` in units of ħk.
pub fn position_spread(atom: &AtomParams, delta_p: f64, tau: f64) -> f64 {
    delta_p * atom.recoil_momentum() / atom.mass * tau / 3f64.sqrt()
}

/// One row per pump rate.
pub fn scan_motion(atom: &AtomParams, cavity: &CavityParams, tau: f64, pumps: &[f64]) -> Vec<(f64, MotionAverages)> {
    pumps
        .iter()
        .map(|&j_in| (j_in, spatial_averages(atom, cavity, &DriveParams { j_in, tau })))
        .collect()
}
