//! Dressed-state energies, the adiabaticity ratio, inversion thresholds and
//! Bloch-vector export.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::params::HBAR;
use crate::shaper::InstantaneousProfile;

/// Dressed-state energies E± = ±(ħ/2)√(|Ω|² + Δ²) along a pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedCurve {
    pub times: Vec<f64>,
    /// meV; `None` where the detuning is undefined.
    pub e_plus: Vec<Option<f64>>,
    pub e_minus: Vec<Option<f64>>,
    /// Smallest splitting E₊ − E₋ over the defined samples (meV); NaN if no
    /// sample is defined.
    pub min_gap: f64,
    /// Time of the smallest splitting (ps).
    pub gap_time: f64,
}

pub fn dressed_energies(profile: &InstantaneousProfile) -> DressedCurve {
    let half: Vec<Option<f64>> = profile
        .omega_abs
        .iter()
        .zip(&profile.delta_inst)
        .map(|(o, d)| d.map(|d| 0.5 * HBAR * o.hypot(d)))
        .collect();
    let (mut min_gap, mut gap_time) = (f64::NAN, f64::NAN);
    for (t, e) in profile.times.iter().zip(&half) {
        if let Some(e) = e {
            if !(2.0 * e >= min_gap) {
                min_gap = 2.0 * e;
                gap_time = *t;
            }
        }
    }
    DressedCurve {
        times: profile.times.clone(),
        e_minus: half.iter().map(|e| e.map(|e| -e)).collect(),
        e_plus: half,
        min_gap,
        gap_time,
    }
}

/// r(t) = |Δ dΩ/dt − Ω dΔ/dt| / (Ω² + Δ²)^{3/2} along a pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityReport {
    pub times: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
    /// Largest defined ratio; NaN if none is defined.
    pub max: f64,
    pub max_time: f64,
}

impl AdiabaticityReport {
    /// Whether the largest ratio stays below `bound`.
    pub fn is_adiabatic(&self, bound: f64) -> bool {
        self.max < bound
    }
}

/// Adiabaticity ratio from |Ω| and Δ, differentiated by centered differences
/// (one-sided at the ends). Undefined where Δ or a needed neighbour is
/// undefined, or where Ω² + Δ² vanishes.
pub fn adiabaticity_ratio(profile: &InstantaneousProfile) -> AdiabaticityReport {
    let n = profile.len();
    let dt = profile.time_step();
    let omega = &profile.omega_abs;
    let delta = &profile.delta_inst;
    let ratio: Vec<Option<f64>> = (0..n)
        .map(|i| {
            if n < 2 {
                return None;
            }
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            let span = (b - a) as f64 * dt;
            let (d, da, db) = (delta[i]?, delta[a]?, delta[b]?);
            let o = omega[i];
            let lambda_sq = o * o + d * d;
            if lambda_sq == 0.0 {
                return None;
            }
            let d_omega = (omega[b] - omega[a]) / span;
            let d_delta = (db - da) / span;
            Some((d * d_omega - o * d_delta).abs() / lambda_sq.powf(1.5))
        })
        .collect();
    let (mut max, mut max_time) = (f64::NAN, f64::NAN);
    for (t, r) in profile.times.iter().zip(&ratio) {
        if let Some(r) = r {
            if !(*r <= max) {
                max = *r;
                max_time = *t;
            }
        }
    }
    AdiabaticityReport {
        times: profile.times.clone(),
        ratio,
        max,
        max_time,
    }
}

/// Smallest sampled area from which the occupation never again drops below
/// `level`. `curve` holds (area, occupation) pairs sorted by area; the area is
/// returned in the same units. `None` when the last sample is below `level`.
pub fn arp_threshold(curve: &[(f64, f64)], level: f64) -> Result<Option<f64>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain("level", "must lie in (0, 1)", level));
    }
    if curve.windows(2).any(|w| !(w[1].0 >= w[0].0)) {
        return Err(Error::Config("occupation curve must be sorted by area".into()));
    }
    let mut threshold = None;
    for &(area, occ) in curve.iter().rev() {
        if occ >= level {
            threshold = Some(area);
        } else {
            break;
        }
    }
    Ok(threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub t: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochPoint {
    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }
}

/// Bloch-sphere path of a trajectory; south pole (0, 0, −1) is the ground
/// state.
pub fn bloch_export(trajectory: &Trajectory) -> Vec<BlochPoint> {
    trajectory
        .times
        .iter()
        .zip(&trajectory.bloch)
        .map(|(&t, s)| BlochPoint {
            t,
            sx: s[0],
            sy: s[1],
            sz: s[2],
        })
        .collect()
}
