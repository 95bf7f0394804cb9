//! Resonant detection: the atom is seen as a dip in the transmitted photon
//! number.
//!
//! With atom and cavity both resonant with the pump, the signal-to-noise
//! ratio of an intensity measurement over a time τ is
//! `S = (N_out,0 − N_out)/√N_out`, where `N_out = N κ_T τ` counts photons at
//! the detector with the atom present and `N_out,0` without it. The number
//! of spontaneously scattered photons during the same time is
//! `M = 2Γτρ11`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimize::{golden_section_max, log_grid};
use crate::params::{cooperativity, AtomParams, CavityParams, DriveParams};
use crate::steady_state::{empty_cavity_state, solve_stationary, StationaryState};

/// Coupling regime by cooperativity: weak below 0.2, strong above 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Intermediate,
    Strong,
}

impl Regime {
    pub const WEAK_BELOW: f64 = 0.2;
    pub const STRONG_ABOVE: f64 = 5.0;

    pub fn classify(c: f64) -> Self {
        if c < Self::WEAK_BELOW {
            Regime::Weak
        } else if c > Self::STRONG_ABOVE {
            Regime::Strong
        } else {
            Regime::Intermediate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonantReport {
    pub n_out_empty: f64,
    pub n_out_atom: f64,
    pub snr: f64,
    pub m_scattered: f64,
    /// 2g²N/Γ² with the atom present.
    pub saturation: f64,
}

/// Photons reaching the detector in τ: `N κ_T τ`, doubled for an
/// asymmetric (high-reflector input) cavity.
pub fn output_photons(state: &StationaryState, cavity: &CavityParams, drive: &DriveParams) -> f64 {
    state.n_photons * cavity.output_rate_per_photon() * drive.tau
}

/// Intensity-contrast statistic `(N_out,0 − N_out)/√N_out` at whatever
/// detunings `atom` and `cavity` carry. Both solves use the same detunings.
pub fn intensity_contrast(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
) -> Result<ResonantReport> {
    let empty = empty_cavity_state(cavity, drive);
    let with_atom = solve_stationary(atom, cavity, drive, cavity.g_max)?;
    let n_out_empty = output_photons(&empty, cavity, drive);
    let n_out_atom = output_photons(&with_atom, cavity, drive);
    let snr = if n_out_atom > 0.0 {
        (n_out_empty - n_out_atom) / n_out_atom.sqrt()
    } else {
        0.0
    };
    Ok(ResonantReport {
        n_out_empty,
        n_out_atom,
        snr,
        m_scattered: 2.0 * atom.gamma * drive.tau * with_atom.rho11,
        saturation: with_atom.saturation,
    })
}

/// Resonant signal-to-noise ratio from the full nonlinear stationary solve.
pub fn snr_resonant(
    atom: &AtomParams,
    cavity: &CavityParams,
    drive: &DriveParams,
) -> Result<ResonantReport> {
    if atom.delta_a != 0.0 || cavity.delta_c != 0.0 {
        return Err(Error::NotResonant {
            delta_a: atom.delta_a,
            delta_c: cavity.delta_c,
        });
    }
    intensity_contrast(atom, cavity, drive)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLimit {
    pub snr: f64,
    pub cooperativity: f64,
    pub regime: Regime,
    /// Cooperativity between the weak and strong thresholds; the asymptotic
    /// factor is only indicative there.
    pub blended: bool,
}

/// Low-saturation asymptote `S = √(j_in τ) C (κ_T/κ) × {2 if C < 1, 1 otherwise}`.
pub fn snr_weak_limit(atom: &AtomParams, cavity: &CavityParams, drive: &DriveParams) -> WeakLimit {
    let c = cooperativity(atom, cavity);
    let factor = if c < 1.0 { 2.0 } else { 1.0 };
    let regime = Regime::classify(c);
    WeakLimit {
        snr: (drive.j_in * drive.tau).sqrt() * c * cavity.kappa_t / cavity.kappa() * factor,
        cooperativity: c,
        regime,
        blended: regime == Regime::Intermediate,
    }
}

/// High-saturation asymptote `S = Γ √(τ/j_in)`, independent of the cavity.
pub fn snr_strong_limit(atom: &AtomParams, drive: &DriveParams) -> f64 {
    atom.gamma * (drive.tau / drive.j_in).sqrt()
}

/// Scattered photons needed for a given low-saturation `snr`:
/// `M = S² (κ/κ_T) × {½ C⁻¹ if C < 1, 2 C⁻³ otherwise}`.
pub fn m_weak_limit(snr: f64, atom: &AtomParams, cavity: &CavityParams) -> f64 {
    let c = cooperativity(atom, cavity);
    let branch = if c < 1.0 { 0.5 / c } else { 2.0 / c.powi(3) };
    snr * snr * cavity.kappa() / cavity.kappa_t * branch
}

/// Scattered photons per detected photon for free-space fluorescence
/// detection with the given collection fraction.
pub fn fluorescence_reference(collection_fraction: f64) -> Result<f64> {
    if !(collection_fraction > 0.0 && collection_fraction <= 1.0) {
        return Err(invalid(
            "collection_fraction",
            format!("must lie in (0, 1], got {collection_fraction}"),
        ));
    }
    Ok(1.0 / collection_fraction)
}

/// Pump rate at which the empty-cavity photon number saturates the atom,
/// `2g²N_empty = Γ²`.
pub fn saturation_pump(atom: &AtomParams, cavity: &CavityParams) -> f64 {
    let kappa = cavity.kappa();
    atom.gamma * atom.gamma * (kappa * kappa + cavity.delta_c * cavity.delta_c)
        / (2.0 * cavity.g_max * cavity.g_max * cavity.kappa_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpScanRow {
    pub j_in: f64,
    pub n_out_empty: f64,
    pub n_out_atom: f64,
    pub snr: f64,
    pub m_scattered: f64,
    pub saturation: f64,
}

/// Resonant report at each pump rate, in input order.
pub fn scan_pump(
    atom: &AtomParams,
    cavity: &CavityParams,
    tau: f64,
    pumps: &[f64],
) -> Result<Vec<PumpScanRow>> {
    pumps
        .par_iter()
        .map(|&j_in| {
            let r = snr_resonant(atom, cavity, &DriveParams { j_in, tau })?;
            Ok(PumpScanRow {
                j_in,
                n_out_empty: r.n_out_empty,
                n_out_atom: r.n_out_atom,
                snr: r.snr,
                m_scattered: r.m_scattered,
                saturation: r.saturation,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpOptimum {
    pub j_in: f64,
    pub report: ResonantReport,
}

/// Points per decade of the coarse pump grid.
pub const PUMP_GRID_PER_DECADE: usize = 61;
/// Decades covered by the coarse pump grid.
pub const PUMP_GRID_DECADES: f64 = 4.0;

/// Maximises `statistic(j_in)` over the pump rate: a log grid of four
/// decades centred on `centre`, refined by golden section around the best
/// grid point.
pub(crate) fn maximize_over_pump<F>(centre: f64, statistic: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let half = PUMP_GRID_DECADES / 2.0;
    let points = (PUMP_GRID_PER_DECADE as f64 * PUMP_GRID_DECADES) as usize + 1;
    let grid = log_grid(centre * 10f64.powf(-half), centre * 10f64.powf(half), points);
    let values = grid
        .iter()
        .map(|&j| statistic(j))
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(grid.len() - 1)].ln();
    let (x, v) = golden_section_max(|x| statistic(x.exp()).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-7);
    if v >= values[best] {
        Ok((x.exp(), v))
    } else {
        Ok((grid[best], values[best]))
    }
}

/// Pump rate maximising the resonant S at fixed cavity.
pub fn max_snr_over_pump(atom: &AtomParams, cavity: &CavityParams, tau: f64) -> Result<PumpOptimum> {
    if atom.delta_a != 0.0 || cavity.delta_c != 0.0 {
        return Err(Error::NotResonant {
            delta_a: atom.delta_a,
            delta_c: cavity.delta_c,
        });
    }
    let centre = saturation_pump(atom, cavity) * (1.0 + cooperativity(atom, cavity));
    let (j_in, _) = maximize_over_pump(centre, |j| {
        Ok(snr_resonant(atom, cavity, &DriveParams { j_in: j, tau })?.snr)
    })?;
    let report = snr_resonant(atom, cavity, &DriveParams { j_in, tau })?;
    Ok(PumpOptimum { j_in, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaTOptimum {
    pub kappa_t: f64,
    pub snr: f64,
    pub j_in: f64,
    /// The optimum sits on the lower search bound (e.g. no loss to balance).
    pub at_lower_bound: bool,
}

/// Mirror transmission κ_T maximising the pump-optimised S, by golden
/// section over ln κ_T in `[lower, upper]`.
pub fn optimal_kappa_t(
    atom: &AtomParams,
    cavity: &CavityParams,
    tau: f64,
    lower: f64,
    upper: f64,
) -> Result<KappaTOptimum> {
    let objective = |kt: f64| max_snr_over_pump(atom, &cavity.with_kappa_t(kt), tau);
    optimize_kappa_t(lower, upper, |kt| {
        objective(kt).map(|o| (o.report.snr, o.j_in))
    })
}

pub(crate) fn optimize_kappa_t<F>(lower: f64, upper: f64, objective: F) -> Result<KappaTOptimum>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    if !(lower > 0.0 && upper > lower && upper.is_finite()) {
        return Err(Error::NoMaximumInBounds { lower, upper });
    }
    let (lo, hi) = (lower.ln(), upper.ln());
    let (x, _) = golden_section_max(
        |x| objective(x.exp()).map(|v| v.0).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-5,
    );
    let edge = 1e-3 * (hi - lo);
    if x >= hi - edge {
        return Err(Error::NoMaximumInBounds { lower, upper });
    }
    let kappa_t = x.exp();
    let (snr, j_in) = objective(kappa_t)?;
    if !snr.is_finite() {
        return Err(Error::NoMaximumInBounds { lower, upper });
    }
    Ok(KappaTOptimum {
        kappa_t,
        snr,
        j_in,
        at_lower_bound: x <= lo + edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;
    use approx::assert_relative_eq;

    fn cavity(kt: f64, kl: f64) -> CavityParams {
        CavityParams {
            g_max: mhz(12.0),
            kappa_t: mhz(kt),
            kappa_loss: mhz(kl),
            delta_c: 0.0,
            waist: 3e-6,
            length: 10.4e-3,
            asymmetric_input: false,
        }
    }

    #[test]
    fn output_photons_basic() {
        let cav = cavity(0.59, 0.59);
        let drive = DriveParams { j_in: 2e6, tau: 1e-5 };
        let empty = empty_cavity_state(&cav, &drive);
        assert_relative_eq!(output_photons(&empty, &cav, &drive), 5.0, max_relative = 1e-12);
        let asym = CavityParams { asymmetric_input: true, ..cav };
        assert_relative_eq!(output_photons(&empty, &asym, &drive), 10.0, max_relative = 1e-12);
        let vac = empty_cavity_state(&cav, &DriveParams { j_in: 0.0, tau: 1e-5 });
        assert_eq!(output_photons(&vac, &cav, &drive), 0.0);
    }

    #[test]
    fn detuned_input_is_rejected() {
        let atom = AtomParams::rubidium().with_delta_a(1.0);
        let r = snr_resonant(&atom, &cavity(3.0, 6.0), &DriveParams { j_in: 1e6, tau: 1e-5 });
        assert!(matches!(r, Err(Error::NotResonant { .. })));
        let r = snr_resonant(&AtomParams::rubidium(), &cavity(3.0, 6.0).with_delta_c(1.0), &DriveParams { j_in: 1e6, tau: 1e-5 });
        assert!(matches!(r, Err(Error::NotResonant { .. })));
    }

    #[test]
    fn zero_coupling_gives_zero_snr() {
        let r = snr_resonant(&AtomParams::rubidium(), &cavity(3.0, 6.0).with_g(0.0), &DriveParams { j_in: 1e7, tau: 1e-5 }).unwrap();
        assert_eq!(r.snr, 0.0);
        assert_eq!(r.m_scattered, 0.0);
        assert_eq!(snr_weak_limit(&AtomParams::rubidium(), &cavity(3.0, 6.0).with_g(0.0), &DriveParams { j_in: 1e7, tau: 1e-5 }).snr, 0.0);
    }

    #[test]
    fn limit_formulas() {
        let atom = AtomParams::rubidium();
        let d = DriveParams { j_in: 1e9, tau: 1e-5 };
        assert_relative_eq!(snr_strong_limit(&atom, &d), 1.884_955_6, max_relative = 1e-6);
        assert_relative_eq!(
            snr_strong_limit(&atom, &d.with_j_in(4e9)),
            0.5 * snr_strong_limit(&atom, &d),
            max_relative = 1e-12
        );
        let cav = cavity(3.0, 6.0);
        let w = snr_weak_limit(&atom, &cav, &d.with_j_in(1e5));
        let w4 = snr_weak_limit(&atom, &cav, &d.with_j_in(4e5));
        assert_relative_eq!(w4.snr, 2.0 * w.snr, max_relative = 1e-12);
        assert_eq!(w.regime, Regime::Strong);
        assert!(!w.blended);
        assert_eq!(m_weak_limit(0.0, &atom, &cav), 0.0);
    }

    #[test]
    fn m_weak_limit_scales_as_inverse_cube_of_round_trips() {
        // Strong coupling: n_rt ×10 means κ/10 at fixed κ_T/κ, so C ×10.
        let atom = AtomParams::rubidium();
        let cav = cavity(3.0, 6.0);
        let better = cav.with_kappa_t(cav.kappa_t / 10.0).with_kappa_loss(cav.kappa_loss / 10.0);
        let ratio = m_weak_limit(10.0, &atom, &cav) / m_weak_limit(10.0, &atom, &better);
        assert_relative_eq!(ratio, 1000.0, max_relative = 1e-9);
    }

    #[test]
    fn regime_thresholds() {
        assert_eq!(Regime::classify(0.1), Regime::Weak);
        assert_eq!(Regime::classify(1.0), Regime::Intermediate);
        assert_eq!(Regime::classify(40.0), Regime::Strong);
    }

    #[test]
    fn fluorescence_reference_values() {
        assert_relative_eq!(fluorescence_reference(0.05).unwrap(), 20.0, max_relative = 1e-12);
        assert_eq!(fluorescence_reference(1.0).unwrap(), 1.0);
        assert_eq!(fluorescence_reference(0.5).unwrap(), 2.0);
        assert!(fluorescence_reference(0.0).is_err());
        assert!(fluorescence_reference(1.5).is_err());
    }

    #[test]
    fn scan_preserves_order() {
        let atom = AtomParams::rubidium();
        let pumps = log_grid(1e5, 1e9, 25);
        let rows = scan_pump(&atom, &cavity(3.0, 6.0), 1e-5, &pumps).unwrap();
        assert_eq!(rows.len(), 25);
        for (r, j) in rows.iter().zip(&pumps) {
            assert_eq!(r.j_in, *j);
        }
    }

    #[test]
    fn kappa_t_search_bounds() {
        let atom = AtomParams::rubidium();
        let cav = cavity(1.0, 6.0);
        assert!(matches!(
            optimal_kappa_t(&atom, &cav, 1e-5, mhz(5.0), mhz(1.0)),
            Err(Error::NoMaximumInBounds { .. })
        ));
        // Without loss there is nothing to balance: the search runs to the lower bound.
        let lossless = cav.with_kappa_loss(0.0);
        let opt = optimal_kappa_t(&atom, &lossless, 1e-5, mhz(0.1), mhz(20.0)).unwrap();
        assert!(opt.at_lower_bound, "{opt:?}");
    }
}
