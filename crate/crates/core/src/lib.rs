//! Simulation of a two-level quantum emitter driven by linearly chirped laser
//! pulses whose spectrum carries a Gaussian hole at the transition frequency.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: constants, pulse/emitter/phonon parameters and the closed-form
//!   chirp and pulse-area conversions.
//! * [`grid`] and [`shaper`]: sampled fields, the amplitude/phase mask, and
//!   time-domain diagnostics (instantaneous detuning, autocorrelation, areas).
//! * [`dynamics`]: density-matrix propagation with optional LA-phonon
//!   relaxation between the instantaneous dressed states.
//! * [`analysis`]: dressed-state energies, the adiabaticity ratio, inversion
//!   thresholds and Bloch-vector export.
//! * [`config`] and [`sweep`]: JSON configuration, parallel parameter sweeps
//!   and result files.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod params;
pub mod shaper;
pub mod sweep;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/shaping.md")]
    mod shaping {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/phonons.md")]
    mod phonons {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
