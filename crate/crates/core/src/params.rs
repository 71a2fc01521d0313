//! Physical constants, the pulse/emitter/phonon parameter types, and the
//! closed-form conversions between spectral and temporal pulse descriptions.
//!
//! Units throughout the crate: time in ps, energy in meV, angular frequency in
//! ps⁻¹, temperature in K. Energies convert to angular frequencies through
//! [`HBAR`].

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in meV·ps (CODATA 2018).
pub const HBAR: f64 = 0.658_211_956_9;

/// Boltzmann constant in meV/K (CODATA 2018).
pub const K_B: f64 = 0.086_173_332_62;

/// Transform-limited intensity FWHM used when nothing else is specified (ps).
pub const DEFAULT_FWHM_TL: f64 = 0.110;

/// Converts an energy in meV to an angular frequency in ps⁻¹.
#[inline]
pub fn mev_to_psinv(energy: f64) -> f64 {
    energy / HBAR
}

/// Converts an angular frequency in ps⁻¹ to an energy in meV.
#[inline]
pub fn psinv_to_mev(omega: f64) -> f64 {
    omega * HBAR
}

fn check_tau0(tau0: f64) -> Result<()> {
    if tau0 > 0.0 && tau0.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("tau0", "must be > 0", tau0))
    }
}

/// Temporal chirp α (ps⁻²) produced by a spectral chirp φ″ (ps²) applied to a
/// transform-limited Gaussian of intensity FWHM `tau0` (ps).
///
/// The instantaneous frequency of the resulting pulse is `ω_l + 2αt`.
pub fn temporal_chirp(phi2: f64, tau0: f64) -> Result<f64> {
    check_tau0(tau0)?;
    let bandwidth_term = tau0.powi(4) / (2.0 * LN_2).powi(2);
    Ok(2.0 * phi2 / (bandwidth_term + (2.0 * phi2).powi(2)))
}

/// Intensity FWHM (ps) of a Gaussian pulse of transform-limited FWHM `tau0`
/// after a quadratic spectral phase φ″.
pub fn stretched_duration(phi2: f64, tau0: f64) -> Result<f64> {
    check_tau0(tau0)?;
    let stretch = 4.0 * LN_2 * phi2 / (tau0 * tau0);
    Ok(tau0 * (1.0 + stretch * stretch).sqrt())
}

/// Time integral of the unit-peak field envelope `exp(-2 ln2 t²/τ₀²)`.
#[inline]
pub fn gaussian_envelope_integral(tau0: f64) -> f64 {
    tau0 * (PI / (2.0 * LN_2)).sqrt()
}

/// Peak field amplitude for which the unmasked Gaussian envelope has pulse
/// area `theta` (radians). The peak Rabi frequency is `dipole_scale` times the
/// returned value.
pub fn field_amplitude_for_area(theta: f64, tau0: f64, dipole_scale: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::domain("theta", "must be >= 0", theta));
    }
    check_tau0(tau0)?;
    if !(dipole_scale > 0.0) {
        return Err(Error::domain("dipole_scale", "must be > 0", dipole_scale));
    }
    Ok(theta / (dipole_scale * gaussian_envelope_integral(tau0)))
}

/// Transform-limited pulse plus the spectral mask applied to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Intensity FWHM τ₀ of the transform-limited pulse (ps).
    pub fwhm_tl: f64,
    /// Pulse area of the unmasked pulse, in units of π.
    pub area_pi: f64,
    /// Spectral chirp φ″ (ps²).
    pub chirp_spectral: f64,
    /// Static detuning Δ₀ = ω₀ − ω_l expressed as an energy (meV).
    pub center_detuning: f64,
    /// Full width 2δ of the spectral hole (meV).
    pub hole_fwhm: f64,
    /// Depth of the Gaussian notch; 1 removes the resonant component entirely.
    pub hole_depth: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self {
            fwhm_tl: DEFAULT_FWHM_TL,
            area_pi: 1.0,
            chirp_spectral: 0.0,
            center_detuning: 0.0,
            hole_fwhm: 0.0,
            hole_depth: 1.0,
        }
    }
}

impl PulseSpec {
    /// Unfiltered transform-limited pulse of the given duration and area.
    pub fn transform_limited(fwhm_tl: f64, area_pi: f64) -> Self {
        Self {
            fwhm_tl,
            area_pi,
            ..Self::default()
        }
    }

    pub fn with_area(mut self, area_pi: f64) -> Self {
        self.area_pi = area_pi;
        self
    }

    pub fn with_chirp(mut self, phi2: f64) -> Self {
        self.chirp_spectral = phi2;
        self
    }

    pub fn with_detuning(mut self, detuning_mev: f64) -> Self {
        self.center_detuning = detuning_mev;
        self
    }

    /// Adds a spectral hole of full width `fwhm_mev` and the given depth.
    pub fn with_hole(mut self, fwhm_mev: f64, depth: f64) -> Self {
        self.hole_fwhm = fwhm_mev;
        self.hole_depth = depth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm_tl > 0.0 && self.fwhm_tl.is_finite()) {
            return Err(Error::domain("fwhm_tl", "must be > 0", self.fwhm_tl));
        }
        if !(self.area_pi >= 0.0 && self.area_pi.is_finite()) {
            return Err(Error::domain("area", "must be >= 0", self.area_pi));
        }
        if !self.chirp_spectral.is_finite() {
            return Err(Error::domain("chirp_spectral", "must be finite", self.chirp_spectral));
        }
        if !self.center_detuning.is_finite() {
            return Err(Error::domain("center_detuning", "must be finite", self.center_detuning));
        }
        if !(self.hole_fwhm >= 0.0 && self.hole_fwhm.is_finite()) {
            return Err(Error::domain("hole_fwhm", "must be >= 0", self.hole_fwhm));
        }
        if !(0.0..=1.0).contains(&self.hole_depth) {
            return Err(Error::domain("hole_depth", "must lie in [0, 1]", self.hole_depth));
        }
        Ok(())
    }

    /// Pulse area in radians.
    pub fn area(&self) -> f64 {
        self.area_pi * PI
    }

    /// Whether the mask carves anything out of the spectrum.
    pub fn has_hole(&self) -> bool {
        self.hole_depth > 0.0 && self.hole_fwhm > 0.0
    }

    pub fn temporal_chirp(&self) -> Result<f64> {
        temporal_chirp(self.chirp_spectral, self.fwhm_tl)
    }

    pub fn stretched_duration(&self) -> Result<f64> {
        stretched_duration(self.chirp_spectral, self.fwhm_tl)
    }

    /// Duration of the temporal structure imprinted by the hole: the intensity
    /// FWHM of the notch's own transform, stretched by the same φ″. Zero when
    /// there is no hole.
    pub fn hole_duration(&self) -> Result<f64> {
        if !self.has_hole() {
            return Ok(0.0);
        }
        let half_width = mev_to_psinv(self.hole_fwhm) / 2.0;
        let tl = 2.0 * std::f64::consts::SQRT_2 * LN_2 / half_width;
        stretched_duration(self.chirp_spectral, tl)
    }
}

/// Spectral density and bath temperature of the LA-phonon reservoir.
///
/// `J(ω) = coupling · ω³ · exp(−ω²/cutoff²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhononSpec {
    /// Prefactor A (ps²).
    pub coupling: f64,
    /// Cutoff ω_c (ps⁻¹).
    pub cutoff: f64,
    /// Bath temperature (K).
    pub temperature: f64,
}

impl Default for PhononSpec {
    fn default() -> Self {
        Self {
            coupling: 0.0272,
            cutoff: 2.2,
            temperature: 4.2,
        }
    }
}

impl PhononSpec {
    pub fn at_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::domain("coupling", "must be >= 0", self.coupling));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::domain("cutoff", "must be > 0", self.cutoff));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::domain("temperature", "must be >= 0", self.temperature));
        }
        Ok(())
    }

    /// Spectral density J(ω) in ps⁻¹.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.coupling * omega.powi(3) * (-(omega / self.cutoff).powi(2)).exp()
    }

    /// Bose occupation of a phonon of angular frequency `omega`.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 || omega <= 0.0 {
            return 0.0;
        }
        1.0 / (HBAR * omega / (K_B * self.temperature)).exp_m1()
    }
}

/// The driven two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterConfig {
    /// Transition energy ħω₀ (meV).
    pub transition_energy: f64,
    /// μ/ħ in field units; the Rabi frequency is `dipole_scale · E_p(t)`.
    pub dipole_scale: f64,
    pub phonon: Option<PhononSpec>,
}

impl Default for EmitterConfig {
    fn default() -> Self {
        Self {
            // 1170 nm
            transition_energy: 1059.7,
            dipole_scale: 1.0,
            phonon: None,
        }
    }
}

impl EmitterConfig {
    pub fn with_phonons(mut self, phonon: PhononSpec) -> Self {
        self.phonon = Some(phonon);
        self
    }

    pub fn without_phonons(mut self) -> Self {
        self.phonon = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transition_energy > 0.0 && self.transition_energy.is_finite()) {
            return Err(Error::domain("transition_energy", "must be > 0", self.transition_energy));
        }
        if !(self.dipole_scale > 0.0 && self.dipole_scale.is_finite()) {
            return Err(Error::domain("dipole_scale", "must be > 0", self.dipole_scale));
        }
        if let Some(p) = &self.phonon {
            p.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_chirp_gives_zero_alpha() {
        assert_eq!(temporal_chirp(0.0, 0.11).unwrap(), 0.0);
    }

    #[test]
    fn chirp_reference_value() {
        // Plain arithmetic on the conversion formula, written out longhand.
        let tau0: f64 = 0.11;
        let denom = tau0 * tau0 * tau0 * tau0 / (4.0 * LN_2 * LN_2) + 0.3 * 0.3;
        let expected = 0.3 / denom;
        let alpha = temporal_chirp(0.15, 0.11).unwrap();
        assert!((alpha - expected).abs() <= 1e-12 * expected);
        assert!((alpha - 3.3305).abs() < 1e-4);
    }

    #[test]
    fn chirp_rejects_nonpositive_duration() {
        assert!(matches!(temporal_chirp(0.1, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(stretched_duration(0.1, -1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn stretched_duration_limits() {
        assert_eq!(stretched_duration(0.0, 0.11).unwrap(), 0.11);
        let t = stretched_duration(0.15, 0.11).unwrap();
        assert!((t - 3.78).abs() < 0.01, "{t}");
    }

    #[test]
    fn area_amplitude_matches_quadrature() {
        let tau0 = 0.11;
        let amp = field_amplitude_for_area(PI, tau0, 1.0).unwrap();
        // Composite Simpson over ±10 τ₀.
        let n = 20_000;
        let (a, b) = (-10.0 * tau0, 10.0 * tau0);
        let h = (b - a) / n as f64;
        let f = |t: f64| amp * (-2.0 * LN_2 * t * t / (tau0 * tau0)).exp();
        let mut sum = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + i as f64 * h);
        }
        let area = sum * h / 3.0;
        assert!((area - PI).abs() < 1e-10);
        assert_eq!(field_amplitude_for_area(0.0, tau0, 1.0).unwrap(), 0.0);
        assert!(field_amplitude_for_area(-1.0, tau0, 1.0).is_err());
        let doubled = field_amplitude_for_area(2.0 * PI, tau0, 1.0).unwrap();
        assert!((doubled - 2.0 * amp).abs() < 1e-12 * amp);
    }

    #[test]
    fn dipole_scale_divides_field() {
        let a1 = field_amplitude_for_area(PI, 0.11, 1.0).unwrap();
        let a2 = field_amplitude_for_area(PI, 0.11, 4.0).unwrap();
        assert!((a1 - 4.0 * a2).abs() < 1e-12 * a1);
    }

    #[test]
    fn chirp_argmax_by_scan() {
        let tau0: f64 = 0.11;
        let expected = tau0 * tau0 / (4.0 * LN_2);
        let step = 1e-6;
        let (mut best, mut best_phi) = (f64::MIN, 0.0);
        for i in 0..20_000 {
            let phi = i as f64 * step;
            let a = temporal_chirp(phi, tau0).unwrap();
            if a > best {
                best = a;
                best_phi = phi;
            }
        }
        assert!((best_phi - expected).abs() <= step);
    }

    #[test]
    fn pulse_validation_names_field() {
        let err = PulseSpec::default().with_hole(-1.0, 1.0).validate().unwrap_err();
        assert!(err.to_string().contains("hole_fwhm"));
        assert!(PulseSpec::default().with_hole(1.0, 1.5).validate().is_err());
        assert!(PulseSpec::transform_limited(0.0, 1.0).validate().is_err());
    }

    #[test]
    fn bose_occupation_edges() {
        let p = PhononSpec::default().at_temperature(0.0);
        assert_eq!(p.occupation(1.0), 0.0);
        let p = PhononSpec::default();
        assert_eq!(p.occupation(0.0), 0.0);
        assert!(p.occupation(1.0) > 0.0);
    }

    proptest! {
        #[test]
        fn chirp_is_odd(phi in -5.0f64..5.0, tau0 in 0.01f64..2.0) {
            let plus = temporal_chirp(phi, tau0).unwrap();
            let minus = temporal_chirp(-phi, tau0).unwrap();
            prop_assert_eq!(plus, -minus);
            prop_assert!(plus.signum() == phi.signum() || phi == 0.0);
        }

        #[test]
        fn stretch_monotone_in_abs_chirp(phi in 0.0f64..2.0, extra in 1e-6f64..1.0, tau0 in 0.02f64..1.0) {
            let a = stretched_duration(phi, tau0).unwrap();
            let b = stretched_duration(-(phi + extra), tau0).unwrap();
            prop_assert!(b > a);
        }
    }

    #[test]
    fn chirp_rolls_over_at_large_chirp() {
        let a = temporal_chirp(1e6, 0.11).unwrap();
        assert!(a.abs() < 1e-5);
        let a = temporal_chirp(-1e6, 0.11).unwrap();
        assert!(a.abs() < 1e-5);
    }
}
