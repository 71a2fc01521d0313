use qdarp_core::analysis::{adiabaticity_ratio, arp_threshold, bloch_export, dressed_energies};
use qdarp_core::dynamics::{occupation_vs_area, propagate, SolverParams};
use qdarp_core::grid::{GridOptions, SimGrid};
use qdarp_core::params::{EmitterConfig, PulseSpec};
use qdarp_core::shaper::{self, instantaneous_profile, InstantaneousProfile, SampledField};

fn field(pulse: PulseSpec) -> SampledField {
    let grid = SimGrid::sized_for(&pulse, GridOptions::default()).unwrap();
    shaper::synthesize(&pulse, &EmitterConfig::default(), &grid).unwrap()
}

fn profile(pulse: PulseSpec) -> InstantaneousProfile {
    instantaneous_profile(&field(pulse)).unwrap()
}

fn threshold(pulse: PulseSpec, top: f64) -> Option<f64> {
    let areas: Vec<f64> = (0..=(top * 10.0) as usize).map(|i| i as f64 * 0.1).collect();
    let curve = occupation_vs_area(
        &pulse,
        &EmitterConfig::default(),
        GridOptions::default(),
        &SolverParams::default(),
        &areas,
    )
    .unwrap();
    arp_threshold(&curve, 0.95).unwrap()
}

#[test]
fn hole_narrows_the_anticrossing() {
    let plain = dressed_energies(&profile(PulseSpec::default().with_area(7.0).with_chirp(0.15)));
    let holed = dressed_energies(&profile(
        PulseSpec::default().with_area(7.0).with_chirp(0.15).with_hole(2.1, 1.0),
    ));
    assert!(holed.min_gap < plain.min_gap, "{} vs {}", holed.min_gap, plain.min_gap);
    assert!(holed.min_gap >= 0.0);
}

#[test]
fn dressed_energies_are_antisymmetric() {
    let c = dressed_energies(&profile(PulseSpec::default().with_area(3.0).with_chirp(0.15)));
    for (p, m) in c.e_plus.iter().zip(&c.e_minus) {
        assert_eq!(*p, m.map(|m| -m));
    }
}

#[test]
fn chirped_two_pi_pulse_is_adiabatic_and_weak_pulse_is_not() {
    let pulse = PulseSpec::default().with_chirp(0.15);
    let strong = adiabaticity_ratio(&profile(pulse.with_area(2.0)));
    let weak = adiabaticity_ratio(&profile(pulse.with_area(0.2)));
    assert!(strong.max < 1.0, "{}", strong.max);
    assert!(strong.is_adiabatic(1.0));
    assert!(weak.max > 1.0, "{}", weak.max);
}

/// Ratio where the detuning crosses zero, so the drive alone sets the
/// splitting. For a strong chirped pulse this is a local maximum of the
/// splitting, not the global minimum reported by `dressed_energies`.
fn ratio_at_resonance(pulse: PulseSpec) -> f64 {
    let p = profile(pulse);
    let r = adiabaticity_ratio(&p);
    let i = p.times.iter().position(|t| *t == 0.0).unwrap();
    assert!(p.delta_inst[i].unwrap().abs() < 1e-9);
    r.ratio[i].unwrap()
}

#[test]
fn ratio_falls_faster_than_area_grows() {
    let pulse = PulseSpec::default().with_chirp(0.15);
    let r4 = ratio_at_resonance(pulse.with_area(4.0));
    let r8 = ratio_at_resonance(pulse.with_area(8.0));
    assert!(r4 > 0.0);
    assert!(r8 < r4 / 2.0, "{r4} -> {r8}");
    // Globally the maximum sits in the wings, where Δ is comparable to Ω.
    let m4 = adiabaticity_ratio(&profile(pulse.with_area(4.0))).max;
    let m8 = adiabaticity_ratio(&profile(pulse.with_area(8.0))).max;
    assert!(m8 < m4);
}

#[test]
fn bloch_endpoints() {
    let e = EmitterConfig::default();
    let s = SolverParams::default();
    let pi = bloch_export(&propagate(&field(PulseSpec::default()), &e, &s).unwrap());
    assert_eq!((pi[0].sx, pi[0].sy, pi[0].sz), (0.0, 0.0, -1.0));
    let end = pi.last().unwrap();
    assert!((end.sz - 1.0).abs() < 1e-6 && end.sx.abs() < 1e-6 && end.sy.abs() < 1e-6);

    let hole = bloch_export(
        &propagate(&field(PulseSpec::default().with_area(3.4).with_hole(2.1, 1.0)), &e, &s).unwrap(),
    );
    let end = hole.last().unwrap();
    assert!((end.sz + 1.0).abs() < 1e-6 && end.sx.abs() < 1e-6 && end.sy.abs() < 1e-6);

    for pulse in [
        PulseSpec::default().with_area(3.4).with_chirp(0.15),
        PulseSpec::default().with_area(7.0).with_chirp(0.15).with_hole(2.1, 1.0),
    ] {
        let path = bloch_export(&propagate(&field(pulse), &e, &s).unwrap());
        assert!(path.last().unwrap().sz > 0.9);
        assert!(path.iter().all(|p| p.norm() <= 1.0 + 1e-9));
    }
}

#[test]
fn rabi_curve_has_no_threshold() {
    assert_eq!(threshold(PulseSpec::default(), 6.0), None);
}

#[test]
fn hole_raises_threshold() {
    let plain = threshold(PulseSpec::default().with_chirp(0.15), 10.0).unwrap();
    let holed = threshold(PulseSpec::default().with_chirp(0.15).with_hole(2.1, 1.0), 10.0).unwrap();
    assert!(holed > plain, "{plain} -> {holed}");
}

// The three tests below encode reference thresholds that the Gaussian-hole
// model does not reach at the default τ₀ = 110 fs. They document the gap and
// run with `cargo test -- --ignored`.

#[test]
#[ignore = "model gives 1.1π at τ₀ = 110 fs"]
fn unfiltered_threshold_near_two_pi() {
    let t = threshold(PulseSpec::default().with_chirp(0.15), 6.0).unwrap();
    assert!((t - 2.0).abs() <= 0.5, "{t}");
}

#[test]
#[ignore = "model gives 5.0π at τ₀ = 110 fs"]
fn hole_threshold_near_seven_pi() {
    let t = threshold(PulseSpec::default().with_chirp(0.15).with_hole(2.1, 1.0), 10.0).unwrap();
    assert!((t - 7.0).abs() <= 1.0, "{t}");
}

#[test]
#[ignore = "narrow holes leave a slow resonant tail; 2δ = 1 meV never settles by 12π"]
fn threshold_grows_with_hole_width() {
    let t: Vec<Option<f64>> = [0.0, 0.5, 1.05, 1.5]
        .iter()
        .map(|d| threshold(PulseSpec::default().with_chirp(0.15).with_hole(2.0 * d, 1.0), 12.0))
        .collect();
    assert!(t.iter().all(Option::is_some), "{t:?}");
    assert!(t.windows(2).all(|w| w[1] >= w[0]), "{t:?}");
}
