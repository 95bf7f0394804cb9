//! Monte Carlo transit experiment.
//!
//! Atoms travel along a magnetic guide (the y axis) that crosses the cavity
//! mode at right angles. The cavity axis is x, the vertical is z. The guide
//! confines x and z harmonically; y is free flight. The intracavity field is
//! slaved to the atom position, photon clicks are drawn from the resulting
//! Poisson process and a sliding-window threshold detector flags atoms.

mod detector;
mod ensemble;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use detector::{detect_events, windowed_counts, DetectionEvent, WindowedSeries};
pub use ensemble::{dark_stream_events, run_ensemble, run_ensemble_with_records, trajectory_rng, DetectionReport};
pub use trajectory::{local_coupling, sample_initial, simulate_trajectory, PhaseSpacePoint, TrajectoryRecord};

/// Atom guide and initial cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuideParams {
    /// Transverse angular trap frequency (rad/s).
    pub trap_omega: f64,
    /// Mean speed along the guide (m/s).
    pub mean_velocity: f64,
    /// Initial cloud temperature (K).
    pub temperature: f64,
}

impl GuideParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.trap_omega > 0.0 && self.trap_omega.is_finite()) {
            return Err(invalid("trap_omega", format!("must be positive, got {}", self.trap_omega)));
        }
        if !(self.mean_velocity >= 0.0 && self.mean_velocity.is_finite()) {
            return Err(invalid("mean_velocity", format!("must be non-negative, got {}", self.mean_velocity)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(invalid("temperature", format!("must be non-negative, got {}", self.temperature)));
        }
        Ok(())
    }
}

impl Default for GuideParams {
    fn default() -> Self {
        Self {
            trap_omega: 2.0 * std::f64::consts::PI * 37e3,
            mean_velocity: 0.4,
            temperature: 30e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step (s).
    pub dt: f64,
    /// Counting window (s).
    pub window: f64,
    /// Spacing of successive windows (s).
    pub stride: f64,
    /// An atom is inferred while the window count is strictly below this.
    pub threshold: u32,
    /// Simulated time per trajectory; `None` means `6 w0 / v + 2 window`.
    pub duration: Option<f64>,
    pub seed: u64,
    pub n_atoms: usize,
    pub include_recoil: bool,
    /// Total length of the empty-cavity reference streams, in windows.
    pub dark_windows: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.05e-6,
            window: 8e-6,
            stride: 4e-6,
            threshold: 11,
            duration: None,
            seed: 0,
            n_atoms: 500,
            include_recoil: true,
            dark_windows: 100_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(invalid("window", "must be positive"));
        }
        if !(self.stride > 0.0 && self.stride <= self.window) {
            return Err(invalid("stride", format!("must lie in (0, window], got {}", self.stride)));
        }
        if !(self.dt > 0.0) {
            return Err(invalid("dt", "must be positive"));
        }
        if let Some(d) = self.duration {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid("duration", "must be positive"));
            }
        }
        if self.n_atoms == 0 {
            return Err(invalid("n_atoms", "need at least one atom"));
        }
        Ok(())
    }

    /// Trajectory length for a given waist and mean speed.
    pub fn duration_for(&self, waist: f64, mean_velocity: f64) -> Result<f64> {
        match self.duration {
            Some(d) => Ok(d),
            None if mean_velocity > 0.0 => Ok(6.0 * waist / mean_velocity + 2.0 * self.window),
            None => Err(invalid("duration", "required when the mean velocity is zero")),
        }
    }
}
