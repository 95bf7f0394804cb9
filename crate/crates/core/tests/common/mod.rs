#![allow(dead_code)]

use microcavity::params::{AtomParams, CavityParams, DriveParams};
use microcavity::steady_state::stationary_residual;
use microcavity::units::mhz;

pub fn rb() -> AtomParams {
    AtomParams::rubidium()
}

/// Cavity with the given (g, κ_T, κ_loss) in MHz.
pub fn cavity(g: f64, kappa_t: f64, kappa_loss: f64) -> CavityParams {
    CavityParams {
        g_max: mhz(g),
        kappa_t: mhz(kappa_t),
        kappa_loss: mhz(kappa_loss),
        delta_c: 0.0,
        waist: 3e-6,
        length: 10.4e-3,
        asymmetric_input: false,
    }
}

pub fn drive(j_per_us: f64, tau_us: f64) -> DriveParams {
    DriveParams {
        j_in: j_per_us * 1e6,
        tau: tau_us * 1e-6,
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Roots of the stationary residual found by sign changes on a uniform grid
/// over the physical interval, refined by bisection.
pub fn dense_scan_roots(atom: &AtomParams, cav: &CavityParams, d: &DriveParams, g: f64, points: usize) -> Vec<f64> {
    let n_max = d.j_in * cav.kappa_t / (cav.kappa() * cav.kappa());
    let f = |n: f64| stationary_residual(atom, cav, d, g, n);
    let mut roots = Vec::new();
    let mut prev_n = 0.0;
    let mut prev_f = f(0.0);
    for i in 1..=points {
        let n = n_max * i as f64 / points as f64;
        let fn_ = f(n);
        if fn_ == 0.0 {
            roots.push(n);
        } else if prev_f != 0.0 && prev_f.signum() != fn_.signum() {
            let (mut lo, mut hi, mut flo) = (prev_n, n, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_n = n;
        prev_f = fn_;
    }
    roots
}

/// Kolmogorov–Smirnov p-value for `samples` against Exp(`rate`).
pub fn ks_exponential_p(samples: &[f64], rate: f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = 1.0 - (-rate * x).exp();
        d = d.max((cdf - i as f64 / n).abs()).max(((i + 1) as f64 / n - cdf).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}
