//! Pulse synthesis: Gaussian spectrum, Gaussian-notch amplitude mask with
//! quadratic spectral phase, and time-domain diagnostics of the result.
//!
//! Fields are complex Rabi-frequency envelopes Ω(t) (ps⁻¹) in the frame
//! rotating at the emitter transition ω₀, so spectral offset ω = 0 is the
//! transition and the laser line sits at ω_l − ω₀ = −Δ₀. A positive spectral
//! chirp φ″ produces an instantaneous frequency that rises through the pulse.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SimGrid;
use crate::params::{field_amplitude_for_area, gaussian_envelope_integral, mev_to_psinv};
use crate::params::{EmitterConfig, PulseSpec};

/// Fraction of the peak |Ω| below which the phase (and so the instantaneous
/// detuning) is reported as undefined.
pub const PHASE_FLOOR: f64 = 1e-6;

/// Amplitude-and-phase mask `M(ω) = A(ω) e^{iΦ(ω)}` centered on the emitter
/// transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    /// Full width 2δ of the hole (meV).
    pub hole_fwhm: f64,
    pub hole_depth: f64,
    /// Spectral chirp φ″ (ps²).
    pub chirp_spectral: f64,
}

impl MaskSpec {
    pub fn from_pulse(pulse: &PulseSpec) -> Self {
        Self {
            hole_fwhm: pulse.hole_fwhm,
            hole_depth: pulse.hole_depth,
            chirp_spectral: pulse.chirp_spectral,
        }
    }

    pub fn identity() -> Self {
        Self {
            hole_fwhm: 0.0,
            hole_depth: 0.0,
            chirp_spectral: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hole_fwhm >= 0.0 && self.hole_fwhm.is_finite()) {
            return Err(Error::domain("hole_fwhm", "must be >= 0", self.hole_fwhm));
        }
        if !(0.0..=1.0).contains(&self.hole_depth) {
            return Err(Error::domain("hole_depth", "must lie in [0, 1]", self.hole_depth));
        }
        if !self.chirp_spectral.is_finite() {
            return Err(Error::domain("chirp_spectral", "must be finite", self.chirp_spectral));
        }
        Ok(())
    }

    /// Half width δ of the hole as an angular frequency.
    pub fn half_width(&self) -> f64 {
        mev_to_psinv(self.hole_fwhm) / 2.0
    }

    /// A(ω) = 1 − depth · exp(−ln2 · ω²/δ²), ω measured from the transition.
    pub fn amplitude(&self, omega: f64) -> f64 {
        if self.hole_fwhm == 0.0 || self.hole_depth == 0.0 {
            return 1.0;
        }
        let delta = self.half_width();
        1.0 - self.hole_depth * (-LN_2 * (omega / delta).powi(2)).exp()
    }

    /// Φ(ω) = (φ″/2) ω².
    pub fn phase(&self, omega: f64) -> f64 {
        0.5 * self.chirp_spectral * omega * omega
    }

    pub fn value(&self, omega: f64) -> Complex64 {
        let phase = self.phase(omega);
        if phase == 0.0 {
            Complex64::new(self.amplitude(omega), 0.0)
        } else {
            Complex64::from_polar(self.amplitude(omega), phase)
        }
    }
}

/// A drive sampled on a [`SimGrid`] in both domains.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: SimGrid,
    time_envelope: Vec<Complex64>,
    spectrum: Vec<Complex64>,
    center_frequency_offset: f64,
    fwhm_tl: f64,
}

impl SampledField {
    /// Builds a field from its spectrum, filling in the time envelope.
    pub fn from_spectrum(
        grid: SimGrid,
        spectrum: Vec<Complex64>,
        center_frequency_offset: f64,
        fwhm_tl: f64,
    ) -> Result<Self> {
        if spectrum.len() != grid.n_samples() {
            return Err(Error::Config(format!(
                "spectrum has {} samples, grid has {}",
                spectrum.len(),
                grid.n_samples()
            )));
        }
        let time_envelope = fourier::inverse(&spectrum, grid.time_step());
        Ok(Self {
            grid,
            time_envelope,
            spectrum,
            center_frequency_offset,
            fwhm_tl,
        })
    }

    pub fn grid(&self) -> &SimGrid {
        &self.grid
    }

    /// Ω(t) in ps⁻¹ on the grid's time axis.
    pub fn time_envelope(&self) -> &[Complex64] {
        &self.time_envelope
    }

    /// S(ω) on the grid's frequency axis (offset from the transition).
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// ω_l − ω₀ in ps⁻¹.
    pub fn center_frequency_offset(&self) -> f64 {
        self.center_frequency_offset
    }

    /// Transform-limited intensity FWHM of the source pulse (ps).
    pub fn fwhm_tl(&self) -> f64 {
        self.fwhm_tl
    }

    /// Σ|Ω|²Δt.
    pub fn energy(&self) -> f64 {
        self.time_envelope.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.time_step()
    }

    /// Σ|S|²Δω/2π; equal to [`energy`](Self::energy) by Parseval.
    pub fn spectral_energy(&self) -> f64 {
        self.spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.frequency_step()
            / (2.0 * std::f64::consts::PI)
    }

    pub fn peak_rabi(&self) -> f64 {
        self.time_envelope.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Returns a copy with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.time_envelope.iter_mut().for_each(|v| *v *= factor);
        out.spectrum.iter_mut().for_each(|v| *v *= factor);
        out
    }
}

/// Transform-limited Gaussian spectrum with the pulse's area and detuning, no
/// mask applied.
pub fn synthesize_unmasked(
    pulse: &PulseSpec,
    emitter: &EmitterConfig,
    grid: &SimGrid,
) -> Result<SampledField> {
    pulse.validate()?;
    emitter.validate()?;
    grid.check_for(pulse)?;
    let tau0 = pulse.fwhm_tl;
    let peak_field = field_amplitude_for_area(pulse.area(), tau0, emitter.dipole_scale)?;
    // Spectrum of Ω₀ exp(−2 ln2 t²/τ₀²) under the forward convention.
    let height = emitter.dipole_scale * peak_field * gaussian_envelope_integral(tau0);
    let offset = -mev_to_psinv(pulse.center_detuning);
    let width = tau0 * tau0 / (8.0 * LN_2);
    let spectrum = grid
        .frequencies()
        .into_iter()
        .map(|w| Complex64::new(height * (-(w - offset).powi(2) * width).exp(), 0.0))
        .collect();
    SampledField::from_spectrum(*grid, spectrum, offset, tau0)
}

/// Shaped drive for `pulse`: the Gaussian spectrum multiplied by the mask the
/// pulse describes.
pub fn synthesize(
    pulse: &PulseSpec,
    emitter: &EmitterConfig,
    grid: &SimGrid,
) -> Result<SampledField> {
    let field = synthesize_unmasked(pulse, emitter, grid)?;
    let mask = MaskSpec::from_pulse(pulse);
    if mask == MaskSpec::identity() {
        return Ok(field);
    }
    apply_mask(&field, &mask)
}

/// Multiplies the spectrum by `mask` and recomputes the time envelope.
pub fn apply_mask(field: &SampledField, mask: &MaskSpec) -> Result<SampledField> {
    mask.validate()?;
    let grid = field.grid;
    let spectrum = field
        .spectrum
        .iter()
        .enumerate()
        .map(|(k, s)| s * mask.value(grid.frequency(k)))
        .collect();
    SampledField::from_spectrum(grid, spectrum, field.center_frequency_offset, field.fwhm_tl)
}

/// Magnitude and instantaneous detuning of a drive.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousProfile {
    pub times: Vec<f64>,
    /// |Ω(t)| in ps⁻¹.
    pub omega_abs: Vec<f64>,
    /// Δ(t) = d arg Ω / dt in ps⁻¹; `None` where |Ω| is below
    /// [`PHASE_FLOOR`] × peak at the sample or either neighbour.
    pub delta_inst: Vec<Option<f64>>,
}

impl InstantaneousProfile {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time_step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }
}

/// |Ω(t)| and Δ(t). With the envelope written `|Ω| e^{iφ}`, the laser's
/// instantaneous frequency is ω₀ − φ̇, so its detuning from the transition is
/// φ̇; static detuning and chirp both live in φ.
pub fn instantaneous_profile(field: &SampledField) -> Result<InstantaneousProfile> {
    let env = field.time_envelope();
    let peak = field.peak_rabi();
    if !(peak > 0.0) {
        return Err(Error::domain("field", "must have nonzero energy", 0.0));
    }
    let floor = PHASE_FLOOR * peak;
    let dt = field.grid.time_step();
    let n = env.len();
    let omega_abs: Vec<f64> = env.iter().map(|v| v.norm()).collect();
    let above = |i: usize| omega_abs[i] >= floor;
    let delta_inst = (0..n)
        .map(|i| {
            if !above(i) {
                return None;
            }
            // Centered where possible, one-sided at the window edges. The
            // argument of the product is the wrapped phase increment.
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            if !above(a) || !above(b) {
                return None;
            }
            let increment = (env[b] * env[a].conj()).arg();
            Some(increment / ((b - a) as f64 * dt))
        })
        .collect();
    Ok(InstantaneousProfile {
        times: field.grid.times(),
        omega_abs,
        delta_inst,
    })
}

/// Normalized intensity autocorrelation.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    /// Delays τ (ps), symmetric about zero.
    pub delays: Vec<f64>,
    /// G(τ)/G(0).
    pub values: Vec<f64>,
}

impl Autocorrelation {
    /// Full width at half maximum by linear interpolation around the central
    /// peak.
    pub fn fwhm(&self) -> f64 {
        full_width_at_half_maximum(&self.delays, &self.values)
    }
}

/// G(τ) = ∫|Ω(t)|²|Ω(t+τ)|²dt normalized to G(0) = 1, for |τ| below the
/// window length.
pub fn autocorrelation(field: &SampledField) -> Result<Autocorrelation> {
    let dt = field.grid.time_step();
    let n = field.grid.n_samples();
    let intensity: Vec<f64> = field.time_envelope.iter().map(|v| v.norm_sqr()).collect();
    if !intensity.iter().any(|&v| v > 0.0) {
        return Err(Error::domain("field", "must have nonzero energy", 0.0));
    }
    // Linear (not circular) correlation via a zero-padded FFT.
    let size = 2 * n;
    let mut buf: Vec<Complex64> = intensity
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(size - n))
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for v in &mut buf {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let zero = buf[0].re;
    let half: Vec<f64> = (0..n).map(|k| buf[k].re / zero).collect();
    let mut delays = Vec::with_capacity(2 * n - 1);
    let mut values = Vec::with_capacity(2 * n - 1);
    for k in (1..n).rev() {
        delays.push(-(k as f64) * dt);
        values.push(half[k]);
    }
    for (k, &v) in half.iter().enumerate() {
        delays.push(k as f64 * dt);
        values.push(v);
    }
    Ok(Autocorrelation { delays, values })
}

/// Pulse areas of a shaped field, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveAreas {
    /// ∫|Ω| dt.
    pub magnitude_area: f64,
    /// |∫Ω dt|, equal to |S(ω₀)|.
    pub coherent_area: f64,
}

pub fn effective_areas(field: &SampledField) -> EffectiveAreas {
    let dt = field.grid.time_step();
    let magnitude_area = field.time_envelope.iter().map(|v| v.norm()).sum::<f64>() * dt;
    let coherent_area = field.time_envelope.iter().sum::<Complex64>().norm() * dt;
    EffectiveAreas {
        magnitude_area,
        coherent_area,
    }
}

/// FWHM of a single-peaked sampled curve, interpolating linearly between the
/// samples that straddle half the maximum.
pub fn full_width_at_half_maximum(x: &[f64], y: &[f64]) -> f64 {
    let (peak_idx, peak) = y
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let half = peak / 2.0;
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let mut right = x[x.len() - 1];
    for i in peak_idx..y.len() - 1 {
        if y[i + 1] < half {
            right = cross(i, i + 1);
            break;
        }
    }
    let mut left = x[0];
    for i in (1..=peak_idx).rev() {
        if y[i - 1] < half {
            left = cross(i, i - 1);
            break;
        }
    }
    right - left
}
