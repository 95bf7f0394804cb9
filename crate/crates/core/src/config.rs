//! JSON configuration files.
//!
//! Frequencies are quoted as linear MHz (`ν = ω/2π`), the way cavity
//! parameters are usually stated, and converted to rad/s once in [`Config::atom`],
//! [`Config::cavity`] and friends.
//!
//! ```json
//! {
//!   "atom":   { "gamma_mhz": 3.0, "lambda_nm": 780.0, "mass_kg": 1.443e-25, "delta_a_over_gamma": 0.0 },
//!   "cavity": { "g_mhz": 12.0, "kappa_t_mhz": 3.0, "kappa_loss_mhz": 6.0, "delta_c_mhz": 0.0,
//!               "waist_um": 3.0, "length_mm": 10.4, "asymmetric_input": false },
//!   "drive":  { "j_in_per_us": 2.0, "tau_us": 10.0 }
//! }
//! ```
//!
//! The optional `guide` and `simulation` sections configure the Monte Carlo
//! transit experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{AtomParams, CavityParams, DriveParams};
use crate::simulation::{GuideParams, SimConfig};
use crate::units::{self, mhz};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    #[serde(default = "default_gamma_mhz")]
    pub gamma_mhz: f64,
    #[serde(default = "default_lambda_nm")]
    pub lambda_nm: f64,
    #[serde(default = "default_mass_kg")]
    pub mass_kg: f64,
    #[serde(default)]
    pub delta_a_over_gamma: f64,
}

fn default_gamma_mhz() -> f64 {
    units::RB_GAMMA_MHZ
}
fn default_lambda_nm() -> f64 {
    units::RB_WAVELENGTH * 1e9
}
fn default_mass_kg() -> f64 {
    units::RB87_MASS
}

impl Default for AtomSection {
    fn default() -> Self {
        Self {
            gamma_mhz: default_gamma_mhz(),
            lambda_nm: default_lambda_nm(),
            mass_kg: default_mass_kg(),
            delta_a_over_gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub g_mhz: f64,
    pub kappa_t_mhz: f64,
    pub kappa_loss_mhz: f64,
    #[serde(default)]
    pub delta_c_mhz: f64,
    #[serde(default = "default_waist_um")]
    pub waist_um: f64,
    #[serde(default = "default_length_mm")]
    pub length_mm: f64,
    #[serde(default)]
    pub asymmetric_input: bool,
}

fn default_waist_um() -> f64 {
    3.0
}
fn default_length_mm() -> f64 {
    10.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub j_in_per_us: f64,
    #[serde(default = "default_tau_us")]
    pub tau_us: f64,
}

fn default_tau_us() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuideSection {
    pub trap_khz: f64,
    pub mean_velocity_m_s: f64,
    pub temperature_uk: f64,
}

impl Default for GuideSection {
    fn default() -> Self {
        Self {
            trap_khz: 37.0,
            mean_velocity_m_s: 0.4,
            temperature_uk: 30.0,
        }
    }
}

/// Monte Carlo settings; every field falls back to [`SimConfig::default`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub dt_us: Option<f64>,
    pub window_us: Option<f64>,
    pub stride_us: Option<f64>,
    pub threshold: Option<u32>,
    pub duration_us: Option<f64>,
    pub n_atoms: Option<usize>,
    pub include_recoil: Option<bool>,
    pub dark_windows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub atom: AtomSection,
    pub cavity: CavitySection,
    pub drive: DriveSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guide: Option<GuideSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
}

impl Config {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.atom()?;
        cfg.cavity()?;
        cfg.drive()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn atom(&self) -> Result<AtomParams> {
        let gamma = mhz(self.atom.gamma_mhz);
        AtomParams::new(
            gamma,
            self.atom.delta_a_over_gamma * gamma,
            self.atom.lambda_nm * 1e-9,
            self.atom.mass_kg,
        )
        .map_err(section_error("atom"))
    }

    pub fn cavity(&self) -> Result<CavityParams> {
        let c = &self.cavity;
        let cavity = CavityParams {
            g_max: mhz(c.g_mhz),
            kappa_t: mhz(c.kappa_t_mhz),
            kappa_loss: mhz(c.kappa_loss_mhz),
            delta_c: mhz(c.delta_c_mhz),
            waist: c.waist_um * 1e-6,
            length: c.length_mm * 1e-3,
            asymmetric_input: c.asymmetric_input,
        };
        cavity.validate().map_err(section_error("cavity"))?;
        Ok(cavity)
    }

    pub fn drive(&self) -> Result<DriveParams> {
        DriveParams::new(units::per_us(self.drive.j_in_per_us), self.drive.tau_us * 1e-6)
            .map_err(section_error("drive"))
    }

    pub fn guide(&self) -> GuideParams {
        let g = self.guide.clone().unwrap_or_default();
        GuideParams {
            trap_omega: 2.0 * std::f64::consts::PI * g.trap_khz * 1e3,
            mean_velocity: g.mean_velocity_m_s,
            temperature: g.temperature_uk * 1e-6,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        let s = self.simulation.clone().unwrap_or_default();
        let d = SimConfig::default();
        let window = s.window_us.map_or(d.window, |w| w * 1e-6);
        SimConfig {
            dt: s.dt_us.map_or(d.dt, |v| v * 1e-6),
            window,
            stride: s.stride_us.map_or(window / 2.0, |v| v * 1e-6),
            threshold: s.threshold.unwrap_or(d.threshold),
            duration: s.duration_us.map(|v| v * 1e-6),
            n_atoms: s.n_atoms.unwrap_or(d.n_atoms),
            include_recoil: s.include_recoil.unwrap_or(d.include_recoil),
            dark_windows: s.dark_windows.unwrap_or(d.dark_windows),
            ..d
        }
    }
}

fn section_error(section: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Config(format!("section `{section}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EXAMPLE: &str = r#"{ "atom": {"gamma_mhz": 3.0, "lambda_nm": 780.0, "mass_kg": 1.443e-25, "delta_a_over_gamma": 0.0},
        "cavity": {"g_mhz": 12.0, "kappa_t_mhz": 3.0, "kappa_loss_mhz": 6.0, "delta_c_mhz": 0.0, "waist_um": 3.0, "length_mm": 10.4, "asymmetric_input": false},
        "drive": {"j_in_per_us": 2.0, "tau_us": 10.0} }"#;

    #[test]
    fn parses_reference_schema() {
        let cfg = Config::from_json_str(EXAMPLE).unwrap();
        let cav = cfg.cavity().unwrap();
        assert_relative_eq!(cav.g_max, 2.0 * std::f64::consts::PI * 12e6, max_relative = 1e-15);
        assert_relative_eq!(cav.waist, 3e-6);
        let drive = cfg.drive().unwrap();
        assert_relative_eq!(drive.j_in, 2e6);
        assert_relative_eq!(drive.tau, 1e-5);
        assert_eq!(cfg.atom().unwrap(), AtomParams::rubidium());
    }

    #[test]
    fn atom_section_defaults_to_rubidium() {
        let cfg = Config::from_json_str(
            r#"{"cavity": {"g_mhz": 12, "kappa_t_mhz": 3, "kappa_loss_mhz": 6}, "drive": {"j_in_per_us": 1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.atom().unwrap(), AtomParams::rubidium());
        assert_relative_eq!(cfg.drive().unwrap().tau, 1e-5);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = Config::from_json_str("{\n \"cavity\": {\"g_mhz\": 12, \"kappa_t_mhz\": 3, \"kappa_loss_mhz\": 6, \"bogus\": 1},\n \"drive\": {\"j_in_per_us\": 1}}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("bogus"), "{err}");

        let err = Config::from_json_str(
            r#"{"cavity": {"g_mhz": 12, "kappa_t_mhz": 0, "kappa_loss_mhz": 6}, "drive": {"j_in_per_us": 1}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("cavity") && err.contains("kappa_t"), "{err}");
    }
}
