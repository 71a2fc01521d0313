//! Uniform time/frequency sampling shared by the shaper and the propagator.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{mev_to_psinv, PulseSpec};

/// Minimum ratio of time window to stretched pulse duration.
pub const MIN_WINDOW_RATIO: f64 = 8.0;
/// Minimum number of spectral intensity FWHMs spanned by the frequency window.
pub const MIN_SPECTRAL_SPAN: f64 = 6.0;

/// How to size a grid for a given pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub n_samples: usize,
    /// Time window as a multiple of the longest pulse timescale.
    pub window_factor: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            n_samples: 1 << 14,
            window_factor: 16.0,
        }
    }
}

/// `n_samples` points spaced `time_step` apart, centered so that sample
/// `n_samples / 2` sits at t = 0 and ω = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    n_samples: usize,
    time_step: f64,
}

impl SimGrid {
    pub fn new(n_samples: usize, time_step: f64) -> Result<Self> {
        if n_samples < 16 || !n_samples.is_power_of_two() {
            return Err(Error::domain(
                "n_samples",
                "must be a power of two >= 16",
                n_samples as f64,
            ));
        }
        if !(time_step > 0.0 && time_step.is_finite()) {
            return Err(Error::domain("time_step", "must be > 0", time_step));
        }
        Ok(Self {
            n_samples,
            time_step,
        })
    }

    /// Sizes the window to `window_factor` times the longer of the stretched
    /// pulse and the stretched hole structure, then checks the result.
    pub fn sized_for(pulse: &PulseSpec, options: GridOptions) -> Result<Self> {
        pulse.validate()?;
        if !(options.window_factor > 0.0) {
            return Err(Error::domain(
                "window_factor",
                "must be > 0",
                options.window_factor,
            ));
        }
        let longest = pulse.stretched_duration()?.max(pulse.hole_duration()?);
        let window = options.window_factor * longest;
        let grid = Self::new(options.n_samples, window / options.n_samples as f64)?;
        grid.check_for(pulse)?;
        Ok(grid)
    }

    /// Verifies the window and bandwidth invariants for `pulse`.
    pub fn check_for(&self, pulse: &PulseSpec) -> Result<()> {
        let needed = MIN_WINDOW_RATIO * pulse.stretched_duration()?;
        if self.window() < needed {
            return Err(Error::GridSizing {
                invariant: "time window >= 8 x stretched pulse duration",
                required: needed,
                actual: self.window(),
            });
        }
        let fwhm = 4.0 * LN_2 / pulse.fwhm_tl;
        let offset = mev_to_psinv(pulse.center_detuning).abs();
        let needed = 2.0 * (0.5 * MIN_SPECTRAL_SPAN * fwhm + offset);
        if self.frequency_window() < needed {
            return Err(Error::GridSizing {
                invariant: "frequency window >= 6 spectral FWHM around the laser line",
                required: needed,
                actual: self.frequency_window(),
            });
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    /// Angular frequency spacing, 2π / (N Δt).
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / (self.n_samples as f64 * self.time_step)
    }

    pub fn window(&self) -> f64 {
        self.n_samples as f64 * self.time_step
    }

    pub fn frequency_window(&self) -> f64 {
        self.n_samples as f64 * self.frequency_step()
    }

    /// Index of t = 0 (and of ω = 0).
    pub fn center(&self) -> usize {
        self.n_samples / 2
    }

    pub fn time(&self, index: usize) -> f64 {
        (index as f64 - self.center() as f64) * self.time_step
    }

    pub fn frequency(&self, index: usize) -> f64 {
        (index as f64 - self.center() as f64) * self.frequency_step()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.time(i)).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.frequency(i)).collect()
    }
}
