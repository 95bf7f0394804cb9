//! Stationary and time-dependent solutions of the driven atom–cavity system.
//!
//! A two-level atom (half-linewidth Γ, detuning Δ_a) couples with strength
//! `g` to a coherent cavity field α (decay κ, detuning Δ_c, pump η). In
//! steady state the atom adds a damping γ and a frequency shift U to the
//! cavity,
//!
//! ```text
//! α = η / ((κ + γ) − i(Δ_c − U)),   D = Δ_a² + Γ² + 2g²N,
//! γ = g²Γ/D,   U = g²Δ_a/D,   ρ11 = g²N/D,
//! ```
//!
//! which is implicit in `N = |α|²`. Multiplying the residual
//! `N[(κ+γ)² + (Δ_c−U)²] − η²` by `D² > 0` turns it into a cubic in `N` whose
//! roots all lie in `[0, η²/κ²]`. [`stationary_photon_roots`] finds every
//! such root; [`solve_stationary`] returns the lowest one, which is the
//! branch an adiabatically ramped pump follows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::{pump_amplitude, AtomParams, CavityParams, DriveParams};

/// Relative separation below which two roots are reported as ill-conditioned.
const ROOT_SEPARATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    /// Field amplitude α (√photons).
    pub alpha: Complex64,
    /// Mean intracavity photon number N = |α|².
    pub n_photons: f64,
    /// Excited-state population ρ11 ∈ [0, ½].
    pub rho11: f64,
    /// Atomic coherence ρ01.
    pub rho01: Complex64,
    /// Atom-induced cavity damping γ (rad/s).
    pub gamma_eff: f64,
    /// Atom-induced cavity frequency shift U (rad/s).
    pub light_shift: f64,
    /// Saturation parameter 2g²N/Γ².
    pub saturation: f64,
    /// Number of physical (non-negative) self-consistent photon numbers.
    pub branch_count: usize,
    /// Two or more roots closer than 1e-9 relative.
    pub ill_conditioned: bool,
}

/// All non-negative self-consistent photon numbers, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonRoots {
    pub roots: Vec<f64>,
    pub ill_conditioned: bool,
}

/// Closed-form empty-cavity state α = η/(κ − iΔ_c).
pub fn empty_cavity_state(cavity: &CavityParams, drive: &DriveParams) -> StationaryState {
    let eta = pump_amplitude(drive, cavity);
    let alpha = eta / Complex64::new(cavity.kappa(), -cavity.delta_c);
    StationaryState {
        alpha,
        n_photons: alpha.norm_sqr(),
        rho11: 0.0,
        rho01: Complex64::new(0.0, 0.0),
        gamma_eff: 0.0,
        light_shift: 0.0,
        saturation: 0.0,
        branch_count: 1,
        ill_conditioned: false,
    }
}

/// The scalar residual `N[(κ+γ(N))² + (Δ_c−U(N))²] − η²` (photons·rad²/s²).
pub fn stationary_residual(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    g_local: f64,
    n: f64,
) -> f64 {
    let g2 = g_local * g_local;
    let d = atom.delta_a * atom.delta_a + atom.gamma * atom.gamma + 2.0 * g2 * n;
    let damping = cavity.kappa() + g2 * atom.gamma / d;
    let detuning = cavity.delta_c - g2 * atom.delta_a / d;
    n * (damping * damping + detuning * detuning) - drive.j_in * cavity.kappa_t
}

/// Every non-negative root of the stationary equation at coupling `g_local`.
pub fn stationary_photon_roots(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    g_local: f64,
) -> Result<PhotonRoots> {
    if !(g_local >= 0.0 && g_local.is_finite()) {
        return Err(invalid("g_local", format!("must be >= 0, got {g_local}")));
    }
    let eta2 = drive.j_in * cavity.kappa_t;
    let kappa = cavity.kappa();
    if eta2 == 0.0 {
        return Ok(PhotonRoots {
            roots: vec![0.0],
            ill_conditioned: false,
        });
    }
    if g_local == 0.0 {
        let n = eta2 / (kappa * kappa + cavity.delta_c * cavity.delta_c);
        return Ok(PhotonRoots {
            roots: vec![n],
            ill_conditioned: false,
        });
    }

    // Dimensionless rates keep the coefficients near unity.
    let s = kappa.max(atom.gamma);
    let k = kappa / s;
    let gam = atom.gamma / s;
    let da = atom.delta_a / s;
    let dc = cavity.delta_c / s;
    let g2 = (g_local / s).powi(2);
    let e2 = eta2 / (s * s);

    let a0 = da * da + gam * gam;
    let a1 = 2.0 * g2;
    let p0 = k * a0 + g2 * gam;
    let p1 = k * a1;
    let q0 = dc * a0 - g2 * da;
    let q1 = dc * a1;

    // Substitute N = n_max·x so every root sits in x ∈ (0, 1].
    let n_max = e2 / (k * k);
    let mut c = [
        -e2 * a0 * a0,
        (p0 * p0 + q0 * q0 - 2.0 * e2 * a0 * a1) * n_max,
        (2.0 * (p0 * p1 + q0 * q1) - e2 * a1 * a1) * n_max * n_max,
        (p1 * p1 + q1 * q1) * n_max * n_max * n_max,
    ];
    let norm = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    c.iter_mut().for_each(|v| *v /= norm);

    let xs = unit_interval_roots(&c)?;
    let roots: Vec<f64> = xs.iter().map(|x| x * n_max * 1.0).collect();
    let ill_conditioned = roots
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= ROOT_SEPARATION_TOL * w[1].abs().max(f64::MIN_POSITIVE));
    if ill_conditioned {
        log::warn!("stationary roots nearly coincide: {roots:?}");
    }
    Ok(PhotonRoots {
        roots,
        ill_conditioned,
    })
}

/// Solves the stationary equations at coupling `g_local` and returns the
/// branch continuously connected to `N = 0` under a rising pump.
pub fn solve_stationary(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    g_local: f64,
) -> Result<StationaryState> {
    let PhotonRoots {
        roots,
        ill_conditioned,
    } = stationary_photon_roots(atom, cavity, drive, g_local)?;
    let n = *roots.first().ok_or(Error::NoPhysicalRoot)?;
    let mut state = state_at(atom, cavity, drive, g_local, n);
    state.branch_count = roots.len();
    state.ill_conditioned = ill_conditioned;
    Ok(state)
}

/// Stationary state evaluated at a given photon number `n` (not necessarily
/// self-consistent).
pub fn state_at(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    g_local: f64,
    n: f64,
) -> StationaryState {
    let eta = pump_amplitude(drive, cavity);
    let g2 = g_local * g_local;
    let d = atom.delta_a * atom.delta_a + atom.gamma * atom.gamma + 2.0 * g2 * n;
    let gamma_eff = g2 * atom.gamma / d;
    let light_shift = g2 * atom.delta_a / d;
    let alpha = eta / Complex64::new(cavity.kappa() + gamma_eff, -(cavity.delta_c - light_shift));
    let rho11 = g2 * n / d;
    let rho01 = g_local * alpha.conj() * (1.0 - 2.0 * rho11) / Complex64::new(atom.gamma, atom.delta_a);
    StationaryState {
        alpha,
        n_photons: n,
        rho11,
        rho01,
        gamma_eff,
        light_shift,
        saturation: 2.0 * g2 * n / (atom.gamma * atom.gamma),
        branch_count: 1,
        ill_conditioned: false,
    }
}

fn horner(c: &[f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

fn horner_deriv(c: &[f64; 4], x: f64) -> f64 {
    (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]
}

/// Real roots in (0, 1] of `c0 + c1 x + c2 x² + c3 x³` given `p(0) < 0 < p(1)`.
fn unit_interval_roots(c: &[f64; 4]) -> Result<Vec<f64>> {
    let (p0, p1) = (horner(c, 0.0), horner(c, 1.0));
    if !(p0 < 0.0 && p1 >= 0.0) {
        return Err(Error::NoPhysicalRoot);
    }
    let mut breaks = vec![0.0];
    breaks.extend(
        quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1])
            .into_iter()
            .filter(|x| *x > 0.0 && *x < 1.0),
    );
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);

    let scale = c.iter().map(|v| v.abs()).sum::<f64>();
    let mut roots = Vec::with_capacity(3);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(c, lo), horner(c, hi));
        if flo == 0.0 {
            roots.push(lo);
        } else if flo.signum() != fhi.signum() && fhi != 0.0 {
            roots.push(bracketed_root(c, lo, hi, flo));
        } else if fhi.abs() <= 1e-14 * scale && hi < 1.0 {
            // Tangent (double) root at a critical point.
            roots.push(hi);
        }
    }
    if horner(c, 1.0) == 0.0 {
        roots.push(1.0);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    if roots.is_empty() {
        return Err(Error::NoPhysicalRoot);
    }
    Ok(roots)
}

/// Safeguarded Newton iteration on a sign-changing bracket.
fn bracketed_root(c: &[f64; 4], mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let rising = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = horner(c, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == rising {
            lo = x;
        } else {
            hi = x;
        }
        let df = horner_deriv(c, x);
        let newton = x - f / df;
        let next = if df != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(1e-300) || hi - lo <= 1e-16 * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Real roots of `a x² + b x + c`, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Instantaneous state of the Bloch–field equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub alpha: Complex64,
    pub rho11: f64,
    pub rho01: Complex64,
}

impl BlochState {
    /// Atom in the ground state with the given field amplitude.
    pub fn ground(alpha: Complex64) -> Self {
        Self {
            alpha,
            rho11: 0.0,
            rho01: Complex64::new(0.0, 0.0),
        }
    }

    fn axpy(&self, h: f64, d: &BlochState) -> BlochState {
        BlochState {
            alpha: self.alpha + d.alpha * h,
            rho11: self.rho11 + d.rho11 * h,
            rho01: self.rho01 + d.rho01 * h,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub rho11: Vec<f64>,
    pub rho01: Vec<Complex64>,
}

impl BlochTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<BlochState> {
        let i = self.times.len().checked_sub(1)?;
        Some(BlochState {
            alpha: self.alpha[i],
            rho11: self.rho11[i],
            rho01: self.rho01[i],
        })
    }

    fn push(&mut self, t: f64, s: &BlochState) {
        self.times.push(t);
        self.alpha.push(s.alpha);
        self.rho11.push(s.rho11);
        self.rho01.push(s.rho01);
    }
}

/// Fastest rate in the equations of motion: max(κ, Γ, g, |Δ_a|, |Δ_c|).
pub fn max_rate(atom: &AtomParams, cavity: &CavityParams, g_local: f64) -> f64 {
    [
        cavity.kappa(),
        atom.gamma,
        g_local,
        atom.delta_a.abs(),
        cavity.delta_c.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Default integration step 0.02 / max_rate.
pub fn default_time_step(atom: &AtomParams, cavity: &CavityParams, g_local: f64) -> f64 {
    0.02 / max_rate(atom, cavity, g_local)
}

/// Integrates the optical Bloch equations coupled to the cavity field with
/// a fixed-step fourth-order Runge–Kutta scheme.
///
/// ```text
/// dρ01/dt = −(Γ + iΔ_a) ρ01 + g α* (1 − 2ρ11)
/// dρ11/dt = −2Γ ρ11 + 2g Re(α ρ01)
/// dα/dt   = (iΔ_c − κ) α − g ρ10 + η
/// ```
///
/// Only ρ11 is integrated; ρ00 = 1 − ρ11 by construction. The step is
/// shrunk so that the final sample lands exactly on `t_end`.
pub fn integrate_bloch(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
    g_local: f64,
    initial: BlochState,
    t_end: f64,
    dt: f64,
) -> Result<BlochTrajectory> {
    let limit = 0.1 / max_rate(atom, cavity, g_local);
    if !(dt > 0.0) || dt >= limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", "must be finite and >= 0"));
    }
    let eta = pump_amplitude(drive, cavity);
    let kappa = cavity.kappa();
    let (gam, da, dc, g) = (atom.gamma, atom.delta_a, cavity.delta_c, g_local);

    let rhs = |s: &BlochState| -> BlochState {
        let w = 1.0 - 2.0 * s.rho11;
        BlochState {
            rho01: Complex64::new(-gam, -da) * s.rho01 + g * s.alpha.conj() * w,
            rho11: -2.0 * gam * s.rho11 + 2.0 * g * (s.alpha * s.rho01).re,
            alpha: Complex64::new(-kappa, dc) * s.alpha - g * s.rho01.conj() + eta,
        }
    };

    let steps = (t_end / dt).ceil() as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let mut traj = BlochTrajectory::default();
    let mut s = initial;
    traj.push(0.0, &s);
    for i in 1..=steps {
        let k1 = rhs(&s);
        let k2 = rhs(&s.axpy(0.5 * h, &k1));
        let k3 = rhs(&s.axpy(0.5 * h, &k2));
        let k4 = rhs(&s.axpy(h, &k3));
        s = BlochState {
            alpha: s.alpha + (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha) * (h / 6.0),
            rho11: s.rho11 + (k1.rho11 + 2.0 * k2.rho11 + 2.0 * k3.rho11 + k4.rho11) * (h / 6.0),
            rho01: s.rho01 + (k1.rho01 + 2.0 * k2.rho01 + 2.0 * k3.rho01 + k4.rho01) * (h / 6.0),
        };
        traj.push(if i == steps { t_end } else { i as f64 * h }, &s);
    }
    Ok(traj)
}
