use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use super::detector::{windowed_counts, WindowedSeries};
use super::{GuideParams, SimConfig};
use crate::error::{Error, Result};
use crate::motion::diffusion_coefficient;
use crate::params::{AtomParams, CavityParams, DriveParams};
use crate::steady_state::{empty_cavity_state, solve_stationary};
use crate::units::BOLTZMANN;

/// Largest allowed `ω dt` for the transverse oscillation.
const MAX_PHASE_PER_STEP: f64 = 0.1;
/// Steps per counting window, at least.
const MIN_STEPS_PER_WINDOW: f64 = 20.0;
/// Required ratio between the motional time scale and 1/κ.
const QUASI_STATIC_MARGIN: f64 = 10.0;

/// Position and velocity in (cavity axis, guide axis, vertical).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub initial: PhaseSpacePoint,
    /// Step start times (s).
    pub times: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    /// Quasi-static intracavity photon number at each step.
    pub n_photons: Vec<f64>,
    /// Detector click times, strictly increasing.
    pub click_times: Vec<f64>,
    pub windowed: WindowedSeries,
    /// Expected number of spontaneous emissions, ∫ 2Γρ11 dt.
    pub m_scattered: f64,
    /// Offset of the first counting window (s).
    pub window_offset: f64,
    /// Interval during which the atom is within 3 waists of the cavity axis.
    pub present: Option<(f64, f64)>,
    pub quasi_static_violated: bool,
}

/// Draws the initial state from a thermal cloud in the guide, three
/// waists upstream of the cavity axis.
pub fn sample_initial<R: Rng + ?Sized>(guide: &GuideParams, atom: &AtomParams, waist: f64, rng: &mut R) -> PhaseSpacePoint {
    let sigma_v = (BOLTZMANN * guide.temperature / atom.mass).sqrt();
    let sigma_x = sigma_v / guide.trap_omega;
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let x = sigma_x * normal();
    let z = sigma_x * normal();
    let vx = sigma_v * normal();
    let vz = sigma_v * normal();
    let vy = guide.mean_velocity + sigma_v * normal();
    PhaseSpacePoint {
        position: [x, -3.0 * waist, z],
        velocity: [vx, vy, vz],
    }
}

/// `g_max exp(−(y² + z²)/w0²) |cos(kx)|`.
pub fn local_coupling(position: [f64; 3], cavity: &CavityParams, atom: &AtomParams) -> f64 {
    transverse_envelope(position, cavity) * (atom.wave_number() * position[0]).cos().abs()
}

fn transverse_envelope(position: [f64; 3], cavity: &CavityParams) -> f64 {
    let [_, y, z] = position;
    cavity.g_max * (-(y * y + z * z) / (cavity.waist * cavity.waist)).exp()
}

fn check_step(config: &SimConfig, guide: &GuideParams) -> Result<()> {
    let limit = (config.window / MIN_STEPS_PER_WINDOW).min(MAX_PHASE_PER_STEP / guide.trap_omega);
    if config.dt > limit {
        return Err(Error::StepTooLarge { dt: config.dt, limit });
    }
    Ok(())
}

/// Exact harmonic step of one transverse coordinate.
fn rotate(x: &mut f64, v: &mut f64, omega: f64, dt: f64) {
    let (s, c) = (omega * dt).sin_cos();
    let (x0, v0) = (*x, *v);
    *x = x0 * c + v0 / omega * s;
    *v = -x0 * omega * s + v0 * c;
}

/// Follows one atom through the cavity.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    guide: &GuideParams,
    config: &SimConfig,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    guide.validate()?;
    check_step(config, guide)?;
    let duration = config.duration_for(cavity.waist, guide.mean_velocity)?;
    let initial = sample_initial(guide, atom, cavity.waist, rng);
    let (mut pos, mut vel) = (initial.position, initial.velocity);

    let steps = (duration / config.dt).ceil() as usize;
    let out_rate = cavity.output_rate_per_photon();
    let empty_n = empty_cavity_state(cavity, drive).n_photons;
    let hk_over_m = atom.recoil_momentum() / atom.mass;
    let kappa = cavity.kappa();
    let y_edge = 3.0 * cavity.waist;

    let mut rec = TrajectoryRecord {
        initial,
        times: Vec::with_capacity(steps),
        positions: Vec::with_capacity(steps),
        n_photons: Vec::with_capacity(steps),
        click_times: Vec::new(),
        windowed: WindowedSeries::default(),
        m_scattered: 0.0,
        window_offset: 0.0,
        present: None,
        quasi_static_violated: false,
    };

    // Time rescaling: a click fires each time the integrated rate passes
    // an Exp(1) mark.
    let mut next_mark: f64 = Exp1.sample(rng);
    for i in 0..steps {
        let t = i as f64 * config.dt;
        let dt = config.dt.min(duration - t);
        let envelope = transverse_envelope(pos, cavity);
        let g = envelope * (atom.wave_number() * pos[0]).cos().abs();
        // Diffusion along the cavity axis, evaluated before the step.
        let diffusion = if config.include_recoil && envelope > 0.0 {
            diffusion_coefficient(atom, &cavity.with_g(envelope), drive, pos[0])
        } else {
            0.0
        };
        let (n, rho11) = if g == 0.0 {
            (empty_n, 0.0)
        } else {
            let s = solve_stationary(atom, cavity, drive, g)?;
            (s.n_photons, s.rho11)
        };
        rec.times.push(t);
        rec.positions.push(pos);
        rec.n_photons.push(n);

        if pos[1].abs() <= y_edge {
            rec.present = Some(match rec.present {
                Some((a, _)) => (a, t + dt),
                None => (t, t + dt),
            });
        }
        let axial = (atom.wavelength / 4.0) / vel[0].abs();
        let transit = cavity.waist / vel[1].abs();
        if axial.min(transit) * kappa < QUASI_STATIC_MARGIN {
            rec.quasi_static_violated = true;
        }

        let rate = n * out_rate;
        let mut elapsed = 0.0;
        while rate > 0.0 && rate * (dt - elapsed) >= next_mark {
            elapsed += next_mark / rate;
            rec.click_times.push(t + elapsed);
            next_mark = Exp1.sample(rng);
        }
        next_mark -= rate * (dt - elapsed);

        let scatter_rate = 2.0 * atom.gamma * rho11;
        rec.m_scattered += scatter_rate * dt;

        rotate(&mut pos[0], &mut vel[0], guide.trap_omega, dt);
        rotate(&mut pos[2], &mut vel[2], guide.trap_omega, dt);
        pos[1] += vel[1] * dt;

        if config.include_recoil && envelope > 0.0 {
            let lambda = scatter_rate * dt;
            let kicks = if lambda > 0.0 {
                Poisson::new(lambda).map(|p| p.sample(rng) as u64).unwrap_or(0)
            } else {
                0
            };
            for _ in 0..kicks {
                let u: [f64; 3] = UnitSphere.sample(rng);
                for a in 0..3 {
                    vel[a] += hk_over_m * u[a];
                }
            }
            let xi: f64 = StandardNormal.sample(rng);
            vel[0] += (2.0 * diffusion * dt).sqrt() * xi / atom.mass;
        }
    }
    if rec.quasi_static_violated {
        log::warn!("quasi-static field assumption violated: atom moves too fast for the cavity decay rate");
    }

    rec.window_offset = rng.random::<f64>() * config.stride;
    rec.windowed = windowed_counts(&rec.click_times, config.window, config.stride, rec.window_offset, duration)?;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cavity() -> CavityParams {
        CavityParams {
            g_max: mhz(12.0),
            kappa_t: mhz(14.0),
            kappa_loss: mhz(14.0),
            delta_c: 0.0,
            waist: 3e-6,
            length: 10.4e-3,
            asymmetric_input: false,
        }
    }

    #[test]
    fn coupling_profile() {
        let atom = AtomParams::rubidium();
        let cav = cavity();
        assert_eq!(local_coupling([0.0, 0.0, 0.0], &cav, &atom), cav.g_max);
        assert_relative_eq!(local_coupling([0.0, cav.waist, 0.0], &cav, &atom), cav.g_max / std::f64::consts::E, max_relative = 1e-12);
        assert!(local_coupling([atom.wavelength / 4.0, 0.0, 0.0], &cav, &atom) < 1e-9 * cav.g_max);
    }

    #[test]
    fn cold_cloud_starts_on_axis() {
        let atom = AtomParams::rubidium();
        let guide = GuideParams { temperature: 0.0, ..GuideParams::default() };
        let p = sample_initial(&guide, &atom, 3e-6, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(p.position, [0.0, -9e-6, 0.0]);
        assert_eq!(p.velocity, [0.0, 0.4, 0.0]);
    }

    #[test]
    fn oversized_step_rejected() {
        let atom = AtomParams::rubidium();
        let cfg = SimConfig { dt: 1e-6, ..SimConfig::default() };
        let r = simulate_trajectory(
            &atom,
            &cavity(),
            &DriveParams { j_in: 1e7, tau: 1e-5 },
            &GuideParams::default(),
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn parked_atom_sees_empty_cavity() {
        let atom = AtomParams::rubidium();
        let cav = cavity();
        let drive = DriveParams { j_in: 1e7, tau: 1e-5 };
        let guide = GuideParams { mean_velocity: 0.0, temperature: 0.0, ..GuideParams::default() };
        let cfg = SimConfig { duration: Some(2e-3), include_recoil: false, ..SimConfig::default() };
        let rec = simulate_trajectory(&atom, &cav, &drive, &guide, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let n0 = empty_cavity_state(&cav, &drive).n_photons;
        for &n in &rec.n_photons {
            assert_relative_eq!(n, n0, max_relative = 1e-3);
        }
        let expected = n0 * cav.kappa_t * 2e-3;
        let got = rec.click_times.len() as f64;
        assert!((got - expected).abs() < 4.0 * expected.sqrt(), "{got} vs {expected}");
        assert!(rec.click_times.windows(2).all(|w| w[0] < w[1]));
    }
}
