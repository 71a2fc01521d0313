use std::f64::consts::LN_2;

use qdarp_core::grid::{GridOptions, SimGrid};
use qdarp_core::params::{stretched_duration, EmitterConfig, PulseSpec};
use qdarp_core::shaper::{self, effective_areas, full_width_at_half_maximum};

#[test]
fn stretched_duration_matches_transformed_intensity() {
    for phi2 in [0.02, 0.15, -0.3] {
        let pulse = PulseSpec::default().with_chirp(phi2);
        let grid = SimGrid::sized_for(&pulse, GridOptions::default()).unwrap();
        let field = shaper::synthesize(&pulse, &EmitterConfig::default(), &grid).unwrap();
        let intensity: Vec<f64> = field.time_envelope().iter().map(|v| v.norm_sqr()).collect();
        let measured = full_width_at_half_maximum(&grid.times(), &intensity);
        let formula = stretched_duration(phi2, 0.11).unwrap();
        assert!((measured - formula).abs() < 1e-3 * formula, "{measured} vs {formula}");
    }
}

#[test]
fn coherent_area_is_spectrum_at_transition() {
    let pulse = PulseSpec::default().with_area(2.6).with_chirp(0.07).with_hole(1.4, 0.5);
    let grid = SimGrid::sized_for(&pulse, GridOptions::default()).unwrap();
    let field = shaper::synthesize(&pulse, &EmitterConfig::default(), &grid).unwrap();
    let areas = effective_areas(&field);
    let resonant = field.spectrum()[grid.center()].norm();
    assert!((areas.coherent_area - resonant).abs() < 1e-9 * resonant);
    assert!((areas.coherent_area - 0.5 * 2.6 * std::f64::consts::PI).abs() < 1e-9);
    assert!(areas.magnitude_area > areas.coherent_area);
}

#[test]
fn transform_limited_spectrum_width() {
    let pulse = PulseSpec::transform_limited(0.2, 1.0);
    let grid = SimGrid::sized_for(&pulse, GridOptions { n_samples: 1 << 14, window_factor: 400.0 }).unwrap();
    let field = shaper::synthesize(&pulse, &EmitterConfig::default(), &grid).unwrap();
    let energies: Vec<f64> = grid.frequencies().iter().map(|w| w * qdarp_core::params::HBAR).collect();
    let power: Vec<f64> = field.spectrum().iter().map(|v| v.norm_sqr()).collect();
    let fwhm = full_width_at_half_maximum(&energies, &power);
    let expect = 4.0 * LN_2 * qdarp_core::params::HBAR / 0.2;
    assert!((fwhm - expect).abs() < 1e-3 * expect, "{fwhm} vs {expect}");
}
