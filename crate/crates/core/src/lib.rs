//! Single-atom detection with a high-finesse optical microcavity.
//!
//! A weak probe drives the cavity; an atom in the mode changes the
//! transmitted light, either its intensity (resonant probe) or its phase
//! (far-detuned probe read out by homodyne detection). The crate solves the
//! semiclassical stationary state, turns it into detection
//! signal-to-noise ratios and spontaneous-emission budgets, estimates the
//! motional heating, simulates atoms flying through the mode and designs
//! fiber-gap cavities.
//!
//! All rates are angular frequencies in rad/s; [`units::mhz`] converts from
//! the linear MHz used in configuration files.
//!
//! ```
//! use microcavity::{params::*, resonant::snr_resonant, units::mhz};
//!
//! let atom = AtomParams::rubidium();
//! let cavity = CavityParams {
//!     g_max: mhz(12.0),
//!     kappa_t: mhz(0.59),
//!     kappa_loss: mhz(0.59),
//!     delta_c: 0.0,
//!     waist: 3e-6,
//!     length: 10.4e-3,
//!     asymmetric_input: false,
//! };
//! let drive = DriveParams::new(2e6, 10e-6).unwrap();
//! let r = snr_resonant(&atom, &cavity, &drive).unwrap();
//! assert!((r.n_out_empty - 5.0).abs() < 1e-9);
//! assert!(r.snr > 90.0);
//! ```

pub mod config;
pub mod error;
pub mod fiber;
pub mod homodyne;
pub mod motion;
pub mod optimize;
pub mod params;
pub mod resonant;
pub mod simulation;
pub mod steady_state;
pub mod units;

pub use error::{Error, Result};
pub use params::{AtomParams, CavityParams, DriveParams};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/resonant.md")]
    mod resonant {}
    #[doc = include_str!("../../../book/src/homodyne.md")]
    mod homodyne {}
    #[doc = include_str!("../../../book/src/motion.md")]
    mod motion {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/fiber.md")]
    mod fiber {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
