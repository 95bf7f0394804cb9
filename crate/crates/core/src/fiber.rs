//! Design calculator for a cavity formed by two mirror-coated fibers
//! facing each other across a small gap.
//!
//! Each fiber carries a highly reflecting mirror at distance `L` from its
//! end; the fiber ends are separated by the gap `2d`. The fiber mode is
//! taken as a Gaussian of waist `w0`, which diverges across the gap and is
//! partly lost on re-entry.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::{AtomParams, CavityParams};
use crate::units::SPEED_OF_LIGHT;

/// Distance from the `tan` pole below which the two-argument form is used.
const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberCavityDesign {
    /// Mirror to fiber end, L (m).
    pub fiber_length: f64,
    /// Half the gap, d (m).
    pub half_gap: f64,
    /// Core radius a (m).
    pub core_radius: f64,
    pub n_core: f64,
    pub n_clad: f64,
    /// Vacuum wavelength λ0 (m).
    pub wavelength0: f64,
    /// Power transmission T of each fiber mirror.
    pub mirror_transmission: f64,
    /// Effective index n = k1/k0 of the guided mode.
    pub n_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberCavityDerived {
    pub v_number: f64,
    pub waist: f64,
    pub rayleigh: f64,
    pub q_modulus: f64,
    pub q_phase: f64,
    pub kappa_gap: f64,
    pub kappa_t: f64,
    pub g_max: f64,
    pub gap_amplitude_ratio: f64,
    /// Mode number `m` if the gap satisfies the resonance condition.
    pub mode_index: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    pub width: f64,
    /// 1/R(z); zero at the waist.
    pub curvature: f64,
    pub gouy: f64,
    pub rayleigh: f64,
}

impl FiberCavityDesign {
    /// Design with `n_eff = n_core` and the fiber length given as a number
    /// of half-wavelengths in the fiber.
    pub fn from_half_waves(
        half_waves: f64,
        core_radius: f64,
        n_core: f64,
        n_clad: f64,
        wavelength0: f64,
        mirror_transmission: f64,
    ) -> Self {
        Self {
            fiber_length: half_waves * wavelength0 / (2.0 * n_core),
            half_gap: 0.0,
            core_radius,
            n_core,
            n_clad,
            wavelength0,
            mirror_transmission,
            n_eff: n_core,
        }
    }

    pub fn with_half_gap(self, half_gap: f64) -> Self {
        Self { half_gap, ..self }
    }

    /// Sets the gap to the resonance with mode number `m`.
    pub fn with_mode_index(self, m: i64) -> Self {
        self.with_half_gap(resonant_half_gap(&self, m))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_clad > 1.0 && self.n_core > self.n_clad) {
            return Err(invalid("n_core", format!("need n_core > n_clad > 1, got {} and {}", self.n_core, self.n_clad)));
        }
        if !(self.mirror_transmission > 0.0 && self.mirror_transmission < 1.0) {
            return Err(invalid("mirror_transmission", format!("must lie in (0, 1), got {}", self.mirror_transmission)));
        }
        if !(self.half_gap >= 0.0 && self.half_gap.is_finite()) {
            return Err(invalid("half_gap", "must be non-negative"));
        }
        for (name, v) in [
            ("fiber_length", self.fiber_length),
            ("core_radius", self.core_radius),
            ("wavelength0", self.wavelength0),
            ("n_eff", self.n_eff),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn k0(&self) -> f64 {
        2.0 * PI / self.wavelength0
    }

    fn k1l(&self) -> f64 {
        self.n_eff * self.k0() * self.fiber_length
    }

    /// `1 + n − (1 − n) e^{−2ik1L}`.
    fn interface_factor(&self) -> Complex64 {
        let n = self.n_eff;
        let e = Complex64::from_polar(1.0, -2.0 * self.k1l());
        Complex64::new(1.0 + n, 0.0) - (1.0 - n) * e
    }
}

/// Normalised frequency `V = (2πa/λ0) √(n_core² − n_clad²)`.
pub fn v_number(design: &FiberCavityDesign) -> f64 {
    2.0 * PI * design.core_radius / design.wavelength0 * (design.n_core.powi(2) - design.n_clad.powi(2)).sqrt()
}

/// Marcuse approximation to the fundamental-mode waist.
pub fn mode_waist(design: &FiberCavityDesign) -> f64 {
    let v = v_number(design);
    if v > 3.0 {
        log::warn!("V = {v:.3}: fiber is not single mode, Gaussian waist approximation degrades");
    }
    design.core_radius * (0.65 + 1.619 * v.powf(-1.5) + 2.879 * v.powi(-6))
}

pub fn gaussian_beam_params(waist: f64, wavelength0: f64, z: f64) -> GaussianBeam {
    let z0 = PI * waist * waist / wavelength0;
    GaussianBeam {
        width: waist * (1.0 + (z / z0).powi(2)).sqrt(),
        curvature: z / (z * z + z0 * z0),
        gouy: (z / z0).atan(),
        rayleigh: z0,
    }
}

/// `arctan(tan(x)/n)`, continued through the poles of `tan`.
fn fiber_phase(x: f64, n: f64) -> f64 {
    let mut r = x.rem_euclid(PI);
    if r >= PI / 2.0 + POLE_GUARD {
        r -= PI;
    }
    r.sin().atan2(n * r.cos())
}

fn resonant_half_gap(design: &FiberCavityDesign, m: i64) -> f64 {
    let z0 = gaussian_beam_params(mode_waist(design), design.wavelength0, 0.0).rayleigh;
    let phase = fiber_phase(design.k1l(), design.n_eff);
    (m as f64 * PI - 2.0 * phase) / (2.0 * design.k0() - 1.0 / z0)
}

/// `d(2k0 − 1/z0) − mπ + 2 arctan(tan(k1L)/n)`.
pub fn resonance_residual(design: &FiberCavityDesign, m: i64) -> f64 {
    let z0 = gaussian_beam_params(mode_waist(design), design.wavelength0, 0.0).rayleigh;
    design.half_gap * (2.0 * design.k0() - 1.0 / z0) - m as f64 * PI
        + 2.0 * fiber_phase(design.k1l(), design.n_eff)
}

/// `(m, 2d)` for every mode number in `modes` with a non-negative gap.
pub fn resonant_gaps(design: &FiberCavityDesign, modes: std::ops::RangeInclusive<i64>) -> Vec<(i64, f64)> {
    modes
        .map(|m| (m, 2.0 * resonant_half_gap(design, m)))
        // Rounding in k1·L can push the m = 0 gap a hair below zero.
        .map(|(m, gap)| (m, if gap < 0.0 && gap > -1e-9 * design.wavelength0 { 0.0 } else { gap }))
        .filter(|&(_, gap)| gap >= 0.0)
        .collect()
}

/// `(|Q|, arg Q)` with `Q = (w0/w(d)) e^{i(2k0 d − arctan(d/z0))}`.
pub fn mode_match(design: &FiberCavityDesign) -> (f64, f64) {
    let w0 = mode_waist(design);
    let beam = gaussian_beam_params(w0, design.wavelength0, design.half_gap);
    (w0 / beam.width, 2.0 * design.k0() * design.half_gap - beam.gouy)
}

/// Loss rate from the mode mismatch across the gap.
pub fn kappa_gap(design: &FiberCavityDesign) -> f64 {
    let z0 = gaussian_beam_params(mode_waist(design), design.wavelength0, 0.0).rayleigh;
    let ratio = design.half_gap / z0;
    if ratio > 0.3 {
        log::warn!("d/z0 = {ratio:.3}: perturbative gap loss is unreliable");
    }
    let factor = (design.interface_factor() / (2.0 * design.n_eff)).norm_sqr();
    0.5 * SPEED_OF_LIGHT / (2.0 * design.fiber_length) * ratio * ratio * factor
}

/// Single-photon Rabi frequency at a field antinode in the gap.
pub fn coupling_g(design: &FiberCavityDesign, atom: &AtomParams) -> f64 {
    let n = design.n_eff;
    let w0 = mode_waist(design);
    let k0 = design.k0();
    design.interface_factor().norm()
        * (3.0 * atom.gamma * SPEED_OF_LIGHT / (2.0 * n * n * design.fiber_length * w0 * w0 * k0 * k0)).sqrt()
}

/// `κ_T = T c / (4 n L)`.
pub fn kappa_t_mirror(design: &FiberCavityDesign) -> f64 {
    design.mirror_transmission * SPEED_OF_LIGHT / (4.0 * design.n_eff * design.fiber_length)
}

/// Field amplitude in the gap relative to the forward fiber amplitude.
pub fn gap_amplitude_ratio(design: &FiberCavityDesign) -> f64 {
    design.interface_factor().norm() / 2.0
}

pub fn derive(design: &FiberCavityDesign, atom: &AtomParams) -> Result<FiberCavityDerived> {
    design.validate()?;
    let waist = mode_waist(design);
    let rayleigh = gaussian_beam_params(waist, design.wavelength0, 0.0).rayleigh;
    let (q_modulus, q_phase) = mode_match(design);
    let m = ((design.half_gap * (2.0 * design.k0() - 1.0 / rayleigh)
        + 2.0 * fiber_phase(design.k1l(), design.n_eff))
        / PI)
        .round() as i64;
    let mode_index = (resonance_residual(design, m).abs() < 1e-6).then_some(m);
    Ok(FiberCavityDerived {
        v_number: v_number(design),
        waist,
        rayleigh,
        q_modulus,
        q_phase,
        kappa_gap: kappa_gap(design),
        kappa_t: kappa_t_mirror(design),
        g_max: coupling_g(design, atom),
        gap_amplitude_ratio: gap_amplitude_ratio(design),
        mode_index,
    })
}

/// Cavity parameters for the model, with `extra_loss` (rad/s) added to the
/// gap loss.
pub fn design_to_cavity(design: &FiberCavityDesign, atom: &AtomParams, extra_loss: f64) -> Result<CavityParams> {
    let d = derive(design, atom)?;
    if !(extra_loss >= 0.0) {
        return Err(invalid("extra_loss", "must be non-negative"));
    }
    let cavity = CavityParams {
        g_max: d.g_max,
        kappa_t: d.kappa_t,
        kappa_loss: d.kappa_gap + extra_loss,
        delta_c: 0.0,
        waist: d.waist,
        length: design.fiber_length,
        asymmetric_input: false,
    };
    cavity.validate()?;
    Ok(cavity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_mhz;
    use approx::assert_relative_eq;

    fn example() -> FiberCavityDesign {
        FiberCavityDesign::from_half_waves(40_000.0, 2.5e-6, 1.5, 1.496, 780e-9, 0.01)
    }

    #[test]
    fn marcuse_waist() {
        let d = example();
        assert_relative_eq!(v_number(&d), 2.2046, max_relative = 1e-4);
        assert_relative_eq!(mode_waist(&d), 2.9242e-6, max_relative = 1e-4);
        let scaled = FiberCavityDesign { core_radius: 5e-6, wavelength0: 1560e-9, ..d };
        assert_relative_eq!(mode_waist(&scaled), 2.0 * mode_waist(&d), max_relative = 1e-12);
    }

    #[test]
    fn beam_at_waist_and_rayleigh() {
        let b = gaussian_beam_params(2.92e-6, 780e-9, 0.0);
        assert_eq!(b.width, 2.92e-6);
        assert_eq!(b.curvature, 0.0);
        assert_eq!(b.gouy, 0.0);
        assert_relative_eq!(b.rayleigh, 34.34e-6, max_relative = 1e-3);
        let b = gaussian_beam_params(2.92e-6, 780e-9, b.rayleigh);
        assert_relative_eq!(b.width, 2.92e-6 * 2f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(b.gouy, PI / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn example_gaps() {
        let gaps = resonant_gaps(&example(), 0..=13);
        assert_eq!(gaps[0], (0, 0.0));
        assert_relative_eq!(gaps[4].1, 1.5628e-6, max_relative = 1e-4);
        assert_relative_eq!(gaps[13].1, 5.0792e-6, max_relative = 1e-4);
    }

    #[test]
    fn example_rates() {
        let atom = AtomParams::rubidium();
        let d = example().with_mode_index(13);
        let out = derive(&d, &atom).unwrap();
        assert_eq!(out.mode_index, Some(13));
        assert_relative_eq!(to_mhz(out.kappa_gap), 6.2363, max_relative = 1e-3);
        assert_relative_eq!(to_mhz(out.g_max), 12.1996, max_relative = 1e-3);
        assert_relative_eq!(to_mhz(out.kappa_t), 7.6464, max_relative = 1e-3);
        assert_relative_eq!(out.gap_amplitude_ratio, 1.5, max_relative = 1e-9);
        let small = derive(&example().with_mode_index(4), &atom).unwrap();
        assert_relative_eq!(to_mhz(small.kappa_gap), 0.5904, max_relative = 1e-3);
    }

    #[test]
    fn degenerate_values() {
        let d = example();
        assert_eq!(kappa_gap(&d), 0.0);
        assert_eq!(mode_match(&d), (1.0, 0.0));
        assert_eq!(kappa_t_mirror(&FiberCavityDesign { mirror_transmission: 0.0, ..d }), 0.0);
        assert!(derive(&FiberCavityDesign { n_clad: 1.6, ..d }, &AtomParams::rubidium()).is_err());
    }

    #[test]
    fn quarter_wave_fiber_gives_unit_ratio() {
        let d = FiberCavityDesign::from_half_waves(40_001.0 - 0.5, 2.5e-6, 1.5, 1.496, 780e-9, 0.01);
        assert_relative_eq!(gap_amplitude_ratio(&d), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn phase_continuous_through_pole() {
        let n = 1.5;
        let below = fiber_phase(PI / 2.0 - 1e-7, n);
        let above = fiber_phase(PI / 2.0 + 1e-7, n);
        assert!((above - below).abs() < 1e-6, "{below} {above}");
    }

    #[test]
    fn design_bridge() {
        let atom = AtomParams::rubidium();
        let d = example().with_mode_index(13);
        let cav = design_to_cavity(&d, &atom, 0.0).unwrap();
        assert_eq!(cav.kappa_loss, kappa_gap(&d));
        assert_relative_eq!(cav.length, 10.4e-3, max_relative = 1e-12);
    }
}
