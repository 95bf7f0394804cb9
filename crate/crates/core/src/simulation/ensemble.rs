use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detector::{detect_events, windowed_counts};
use super::trajectory::{simulate_trajectory, TrajectoryRecord};
use super::{GuideParams, SimConfig};
use crate::error::{invalid, Result};
use crate::params::{AtomParams, CavityParams, DriveParams};
use crate::steady_state::empty_cavity_state;

/// Dark-count streams draw from stream indices at and above this value so
/// they never collide with trajectory indices.
const DARK_STREAM_BASE: u64 = 1 << 63;
/// Windows per independent dark-count chunk.
const DARK_CHUNK_WINDOWS: usize = 10_000;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Fraction of atoms with an event overlapping the time spent within
    /// 3 waists of the axis.
    pub efficiency: f64,
    /// False detections per second on empty-cavity streams.
    pub dark_rate: f64,
    /// 95% interval on `dark_rate` (normal approximation to the event count).
    pub dark_rate_ci: [f64; 2],
    pub dark_events: usize,
    /// Effective empty-cavity observation time (s).
    pub dark_time: f64,
    pub mean_m: f64,
    /// Standard error of `mean_m`.
    pub m_std_err: f64,
    /// (trajectory index, first crossing) for every counted event.
    pub detections: Vec<(usize, f64)>,
    pub n_atoms: usize,
    pub threshold: u32,
    pub include_recoil: bool,
    pub quasi_static_violations: usize,
}

/// Random stream for trajectory `index` under master seed `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Counts detection events on an empty-cavity click stream of the given
/// duration and constant click rate.
pub fn dark_stream_events(
    click_rate: f64,
    config: &SimConfig,
    duration: f64,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    let mut clicks = Vec::new();
    if click_rate > 0.0 {
        let gap = Exp::new(click_rate).map_err(|e| invalid("click_rate", e.to_string()))?;
        let mut t = gap.sample(rng);
        while t < duration {
            clicks.push(t);
            t += gap.sample(rng);
        }
    }
    let series = windowed_counts(&clicks, config.window, config.stride, 0.0, duration)?;
    Ok(detect_events(&series, config.threshold).len())
}

/// Runs the ensemble and the dark-count reference.
pub fn run_ensemble(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    guide: &GuideParams,
    config: &SimConfig,
) -> Result<DetectionReport> {
    run_ensemble_with_records(atom, cavity, drive, guide, config).map(|(r, _)| r)
}

/// As [`run_ensemble`], also returning every trajectory.
pub fn run_ensemble_with_records(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    guide: &GuideParams,
    config: &SimConfig,
) -> Result<(DetectionReport, Vec<TrajectoryRecord>)> {
    config.validate()?;
    let records = (0..config.n_atoms)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(config.seed, i as u64);
            simulate_trajectory(atom, cavity, drive, guide, config, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut detections = Vec::new();
    let mut detected = 0usize;
    for (i, rec) in records.iter().enumerate() {
        let mut hit = false;
        if let Some((a, b)) = rec.present {
            for ev in detect_events(&rec.windowed, config.threshold) {
                // Overlap rather than start time keeps efficiency monotone in threshold.
                if ev.end >= a && ev.start <= b {
                    detections.push((i, ev.start));
                    hit = true;
                }
            }
        }
        detected += hit as usize;
    }
    let n = records.len() as f64;
    let mean_m = records.iter().map(|r| r.m_scattered).sum::<f64>() / n;
    let var_m = records.iter().map(|r| (r.m_scattered - mean_m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);

    let click_rate = empty_cavity_state(cavity, drive).n_photons * cavity.output_rate_per_photon();
    let chunks = config.dark_windows.div_ceil(DARK_CHUNK_WINDOWS).max(1);
    let chunk_windows = config.dark_windows.min(DARK_CHUNK_WINDOWS).max(1);
    let chunk_duration = chunk_windows as f64 * config.window;
    let dark_events = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = trajectory_rng(config.seed, DARK_STREAM_BASE + c as u64);
            dark_stream_events(click_rate, config, chunk_duration, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    // The first window of each chunk closes one window after the start.
    let dark_time = chunks as f64 * (chunk_duration - config.window);
    let k = dark_events as f64;
    let half = Z95 * k.sqrt();

    let report = DetectionReport {
        efficiency: detected as f64 / n,
        dark_rate: k / dark_time,
        dark_rate_ci: [((k - half) / dark_time).max(0.0), (k + half) / dark_time],
        dark_events,
        dark_time,
        mean_m,
        m_std_err: (var_m / n).sqrt(),
        detections,
        n_atoms: records.len(),
        threshold: config.threshold,
        include_recoil: config.include_recoil,
        quasi_static_violations: records.iter().filter(|r| r.quasi_static_violated).count(),
    };
    Ok((report, records))
}
