mod common;

use common::*;
use microcavity::params::{cooperativity, round_trips_and_finesse, CavityParams, DriveParams};
use microcavity::resonant::{intensity_contrast, output_photons, scan_pump, snr_resonant};
use microcavity::optimize::log_grid;
use microcavity::steady_state::{empty_cavity_state, solve_stationary, stationary_photon_roots, stationary_residual};
use microcavity::units::mhz;
use proptest::prelude::*;

fn rescaled(c: &CavityParams, r: f64) -> CavityParams {
    CavityParams {
        g_max: c.g_max / r.sqrt(),
        kappa_t: c.kappa_t / r,
        kappa_loss: c.kappa_loss / r,
        delta_c: c.delta_c / r,
        length: c.length * r,
        ..*c
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_are_physical_and_self_consistent(
        g in 0.0f64..60.0,
        kt in 0.1f64..50.0,
        kl in 0.0f64..100.0,
        da in -100.0f64..100.0,
        dc in -100.0f64..100.0,
        log_j in 3.0f64..12.0,
    ) {
        let atom = rb().with_delta_a(mhz(da));
        let cav = CavityParams { delta_c: mhz(dc), ..cavity(g, kt, kl) };
        let d = DriveParams { j_in: 10f64.powf(log_j), tau: 1e-5 };
        let roots = stationary_photon_roots(&atom, &cav, &d, cav.g_max).unwrap();
        prop_assert!(!roots.roots.is_empty() && roots.roots.len() <= 3);
        let n_max = d.j_in * cav.kappa_t / cav.kappa().powi(2);
        for &n in &roots.roots {
            prop_assert!(n >= 0.0 && n <= n_max * (1.0 + 1e-12));
            let scale = d.j_in * cav.kappa_t;
            prop_assert!(stationary_residual(&atom, &cav, &d, cav.g_max, n).abs() <= 1e-9 * scale);
        }
        let s = solve_stationary(&atom, &cav, &d, cav.g_max).unwrap();
        prop_assert!(s.rho11 >= 0.0 && s.rho11 <= 0.5);
        prop_assert!((s.gamma_eff * atom.delta_a - s.light_shift * atom.gamma).abs()
            <= 1e-12 * (s.gamma_eff * atom.delta_a).abs().max(1.0));
    }

    #[test]
    fn atom_never_raises_resonant_transmission(g in 0.0f64..60.0, kt in 0.1f64..50.0, kl in 0.0f64..100.0, log_j in 3.0f64..12.0) {
        let cav = cavity(g, kt, kl);
        let d = DriveParams { j_in: 10f64.powf(log_j), tau: 1e-5 };
        let with = solve_stationary(&rb(), &cav, &d, cav.g_max).unwrap();
        let empty = empty_cavity_state(&cav, &d);
        prop_assert!(with.n_photons <= empty.n_photons * (1.0 + 1e-12));
        let r = snr_resonant(&rb(), &cav, &d).unwrap();
        prop_assert!(r.snr >= -1e-9);
        prop_assert!(r.m_scattered <= rb().gamma * d.tau * (1.0 + 1e-6));
    }

    #[test]
    fn length_rescaling_leaves_observables_unchanged(
        g in 1.0f64..40.0, kt in 0.1f64..50.0, kl in 0.0f64..100.0, da in -30.0f64..30.0, dc in -30.0f64..30.0,
        log_j in 4.0f64..10.0, r in prop::sample::select(vec![0.5, 2.0, 10.0]),
    ) {
        let atom = rb().with_delta_a(mhz(da));
        let cav = CavityParams { delta_c: mhz(dc), ..cavity(g, kt, kl) };
        let d = DriveParams { j_in: 10f64.powf(log_j), tau: 1e-5 };
        let scaled = rescaled(&cav, r);
        prop_assert!(rel(cooperativity(&atom, &scaled), cooperativity(&atom, &cav)) < 1e-12);
        let a = stationary_photon_roots(&atom, &cav, &d, cav.g_max).unwrap();
        let b = stationary_photon_roots(&atom, &scaled, &d, scaled.g_max).unwrap();
        // Compare only when the branch structure is unambiguous.
        prop_assume!(a.roots.len() == 1 && b.roots.len() == 1);
        let s0 = solve_stationary(&atom, &cav, &d, cav.g_max).unwrap();
        let s1 = solve_stationary(&atom, &scaled, &d, scaled.g_max).unwrap();
        prop_assert!(rel(s1.n_photons, r * s0.n_photons) < 1e-9);
        prop_assert!(rel(s1.rho11, s0.rho11) < 1e-9);
        prop_assert!(rel(output_photons(&s1, &scaled, &d), output_photons(&s0, &cav, &d)) < 1e-9);
    }
}

#[test]
fn finesse_is_four_pi_round_trips() {
    for (kt, kl) in [(0.59, 0.59), (3.0, 6.0), (43.0, 86.0)] {
        let rt = round_trips_and_finesse(&cavity(12.0, kt, kl)).unwrap();
        assert_eq!(rt.finesse, 4.0 * std::f64::consts::PI * rt.n_rt);
    }
}

#[test]
fn strong_saturation_photon_deficit() {
    let atom = rb();
    let cav = cavity(12.0, 3.0, 6.0);
    let mut gaps = Vec::new();
    for j in [1e12, 3e12, 1e13] {
        let d = DriveParams { j_in: j, tau: 1e-5 };
        let s = solve_stationary(&atom, &cav, &d, cav.g_max).unwrap();
        assert!(s.saturation > 100.0);
        let deficit = empty_cavity_state(&cav, &d).n_photons - s.n_photons;
        assert!(rel(deficit, atom.gamma / cav.kappa()) < 0.01, "deficit {deficit}");
        gaps.push(deficit * cav.kappa_t * d.tau);
    }
    for g in &gaps {
        assert!(rel(*g, gaps[0]) < 0.02);
        assert!(rel(*g, atom.gamma * cav.kappa_t * 1e-5 / cav.kappa()) < 0.02);
    }
}

#[test]
fn scattering_saturates_at_gamma_tau() {
    let atom = rb();
    let cav = cavity(12.0, 3.0, 6.0);
    let d = DriveParams { j_in: 1e13, tau: 1e-5 };
    let r = snr_resonant(&atom, &cav, &d).unwrap();
    assert!(r.saturation > 1e3);
    assert!(rel(r.m_scattered, atom.gamma * d.tau) < 0.01);
}

#[test]
fn snr_is_unimodal_in_pump() {
    for (kt, kl) in [(0.59, 0.59), (3.0, 6.0), (43.0, 86.0)] {
        let rows = scan_pump(&rb(), &cavity(12.0, kt, kl), 1e-5, &log_grid(1e3, 1e13, 400)).unwrap();
        let peak = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.snr.total_cmp(&b.1.snr))
            .unwrap()
            .0;
        assert!(peak > 0 && peak < rows.len() - 1);
        assert!(rows[..=peak].windows(2).all(|w| w[1].snr >= w[0].snr));
        assert!(rows[peak..].windows(2).all(|w| w[1].snr <= w[0].snr));
        // Close to saturation at the peak.
        assert!((0.05..20.0).contains(&rows[peak].saturation), "{}", rows[peak].saturation);
    }
}

#[test]
fn resonant_pumping_maximises_contrast() {
    let atom = rb();
    for (kt, kl) in [(0.59, 0.59), (3.0, 6.0), (43.0, 86.0)] {
        let cav = cavity(12.0, kt, kl);
        for j in [1e5, 1e7, 1e9] {
            let d = DriveParams { j_in: j, tau: 1e-5 };
            let r0 = intensity_contrast(&atom, &cav, &d).unwrap();
            // Far above saturation a detuned atom saturates less and can win
            // by a few percent; the claim is about the sub-saturated regime.
            if r0.saturation > 1.0 {
                continue;
            }
            let s0 = r0.snr;
            for delta in [1.0, 5.0] {
                let detuned = atom.with_delta_a(delta * atom.gamma);
                let s = intensity_contrast(&detuned, &cav, &d).unwrap().snr;
                assert!(s0 >= s, "kt {kt} j {j} delta {delta}: {s0} < {s}");
            }
        }
    }
}

#[test]
fn bistable_roots_match_dense_scan() {
    let atom = rb().with_delta_a(mhz(-30.0));
    let cav = CavityParams { delta_c: mhz(-30.0), ..cavity(40.0, 1.0, 1.0) };
    let d = drive(10f64.powf(1.75), 10.0);
    let roots = stationary_photon_roots(&atom, &cav, &d, cav.g_max).unwrap().roots;
    let oracle = dense_scan_roots(&atom, &cav, &d, cav.g_max, 1_000_000);
    assert_eq!(roots.len(), 3);
    assert_eq!(roots.len(), oracle.len());
    for (a, b) in roots.iter().zip(&oracle) {
        assert!(rel(*a, *b) < 1e-6);
    }
    let s = solve_stationary(&atom, &cav, &d, cav.g_max).unwrap();
    assert_eq!(s.n_photons, roots[0]);
    assert_eq!(s.branch_count, 3);
}
