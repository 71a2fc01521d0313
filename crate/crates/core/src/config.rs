//! JSON run configuration.
//!
//! ```json
//! {
//!   "emitter": { "energy_mev": 1059.7, "dipole_scale": 1.0 },
//!   "pulse":   { "fwhm_ps": 0.11, "area_pi": 1.0, "chirp_ps2": 0.0, "detuning_mev": 0.0 },
//!   "mask":    { "hole_fwhm_mev": 0.0, "hole_depth": 1.0 },
//!   "phonon":  { "enabled": false, "coupling_ps2": 0.0272, "cutoff_psinv": 2.2, "temperature_k": 4.2 },
//!   "grid":    { "n_samples": 16384, "window_factor": 16.0 },
//!   "solver":  { "dt_ps": null }
//! }
//! ```
//!
//! Every section and every key is optional; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::SolverParams;
use crate::error::{Error, Result};
use crate::grid::GridOptions;
use crate::params::{EmitterConfig, PhononSpec, PulseSpec, DEFAULT_FWHM_TL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitterSection {
    pub energy_mev: f64,
    pub dipole_scale: f64,
}

impl Default for EmitterSection {
    fn default() -> Self {
        let e = EmitterConfig::default();
        Self {
            energy_mev: e.transition_energy,
            dipole_scale: e.dipole_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub fwhm_ps: f64,
    pub area_pi: f64,
    pub chirp_ps2: f64,
    pub detuning_mev: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            fwhm_ps: DEFAULT_FWHM_TL,
            area_pi: 1.0,
            chirp_ps2: 0.0,
            detuning_mev: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskSection {
    pub hole_fwhm_mev: f64,
    pub hole_depth: f64,
}

impl Default for MaskSection {
    fn default() -> Self {
        Self {
            hole_fwhm_mev: 0.0,
            hole_depth: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhononSection {
    pub enabled: bool,
    pub coupling_ps2: f64,
    pub cutoff_psinv: f64,
    pub temperature_k: f64,
}

impl Default for PhononSection {
    fn default() -> Self {
        let p = PhononSpec::default();
        Self {
            enabled: false,
            coupling_ps2: p.coupling,
            cutoff_psinv: p.cutoff,
            temperature_k: p.temperature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n_samples: usize,
    pub window_factor: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridOptions::default();
        Self {
            n_samples: g.n_samples,
            window_factor: g.window_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub dt_ps: Option<f64>,
}

/// A complete single-run configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub emitter: EmitterSection,
    pub pulse: PulseSection,
    pub mask: MaskSection,
    pub phonon: PhononSection,
    pub grid: GridSection,
    pub solver: SolverSection,
}

fn check(ok: bool, field: &str, constraint: &str, value: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{field} must be {constraint} (got {value})")))
    }
}

impl Config {
    /// Parses and validates a JSON document. Parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    /// Checks every field, naming the first violation by its JSON path.
    pub fn validate(&self) -> Result<()> {
        let e = &self.emitter;
        check(e.energy_mev > 0.0 && e.energy_mev.is_finite(), "emitter.energy_mev", "> 0", e.energy_mev)?;
        check(e.dipole_scale > 0.0 && e.dipole_scale.is_finite(), "emitter.dipole_scale", "> 0", e.dipole_scale)?;
        let p = &self.pulse;
        check(p.fwhm_ps > 0.0 && p.fwhm_ps.is_finite(), "pulse.fwhm_ps", "> 0", p.fwhm_ps)?;
        check(p.area_pi >= 0.0 && p.area_pi.is_finite(), "pulse.area_pi", ">= 0", p.area_pi)?;
        check(p.chirp_ps2.is_finite(), "pulse.chirp_ps2", "finite", p.chirp_ps2)?;
        check(p.detuning_mev.is_finite(), "pulse.detuning_mev", "finite", p.detuning_mev)?;
        let m = &self.mask;
        check(m.hole_fwhm_mev >= 0.0 && m.hole_fwhm_mev.is_finite(), "mask.hole_fwhm_mev", ">= 0", m.hole_fwhm_mev)?;
        check((0.0..=1.0).contains(&m.hole_depth), "mask.hole_depth", "in [0, 1]", m.hole_depth)?;
        let ph = &self.phonon;
        check(ph.coupling_ps2 >= 0.0 && ph.coupling_ps2.is_finite(), "phonon.coupling_ps2", ">= 0", ph.coupling_ps2)?;
        check(ph.cutoff_psinv > 0.0 && ph.cutoff_psinv.is_finite(), "phonon.cutoff_psinv", "> 0", ph.cutoff_psinv)?;
        check(ph.temperature_k >= 0.0 && ph.temperature_k.is_finite(), "phonon.temperature_k", ">= 0", ph.temperature_k)?;
        let g = &self.grid;
        check(
            g.n_samples >= 16 && g.n_samples.is_power_of_two(),
            "grid.n_samples",
            "a power of two >= 16",
            g.n_samples,
        )?;
        check(g.window_factor > 0.0 && g.window_factor.is_finite(), "grid.window_factor", "> 0", g.window_factor)?;
        if let Some(dt) = self.solver.dt_ps {
            check(dt > 0.0 && dt.is_finite(), "solver.dt_ps", "> 0", dt)?;
        }
        Ok(())
    }

    pub fn pulse_spec(&self) -> PulseSpec {
        PulseSpec {
            fwhm_tl: self.pulse.fwhm_ps,
            area_pi: self.pulse.area_pi,
            chirp_spectral: self.pulse.chirp_ps2,
            center_detuning: self.pulse.detuning_mev,
            hole_fwhm: self.mask.hole_fwhm_mev,
            hole_depth: self.mask.hole_depth,
        }
    }

    pub fn phonon_spec(&self) -> PhononSpec {
        PhononSpec {
            coupling: self.phonon.coupling_ps2,
            cutoff: self.phonon.cutoff_psinv,
            temperature: self.phonon.temperature_k,
        }
    }

    /// The emitter, with the phonon bath attached only when enabled.
    pub fn emitter_config(&self) -> EmitterConfig {
        EmitterConfig {
            transition_energy: self.emitter.energy_mev,
            dipole_scale: self.emitter.dipole_scale,
            phonon: self.phonon.enabled.then(|| self.phonon_spec()),
        }
    }

    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            n_samples: self.grid.n_samples,
            window_factor: self.grid.window_factor,
        }
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams { dt: self.solver.dt_ps }
    }
}
