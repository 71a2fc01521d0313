//! Density-matrix propagation of the driven emitter.
//!
//! In the frame rotating at ω₀ the Hamiltonian is
//! `H(t) = (ħ/2)[Ω(t)σ₊ + Ω*(t)σ₋]`, with detuning and chirp carried by the
//! phase of Ω. The state is held as a Bloch vector `s` (so the trace is 1 by
//! construction) obeying the affine equation
//!
//! ```text
//! ṡ = w(t) × s + D(t) s + b(t),    w = (Re Ω, −Im Ω, 0)
//! ```
//!
//! where `D` and `b` are the LA-phonon dissipator expressed in the
//! instantaneous dressed basis. Each step applies the fourth-order Magnus
//! propagator built from Simpson samples of the generator; pure rotations
//! are exponentiated in closed form.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::{GridOptions, SimGrid};
use crate::params::{EmitterConfig, PhononSpec, PulseSpec};
use crate::shaper::{self, SampledField, PHASE_FLOOR};

/// Default step as a fraction of τ₀.
const STEPS_PER_FWHM: f64 = 200.0;
/// Default step resolves the fastest dressed-state precession this many times
/// per period.
const STEPS_PER_PERIOD: f64 = 50.0;
/// Coarsest step accepted from a caller, in steps per precession period.
const MIN_STEPS_PER_PERIOD: f64 = 20.0;

/// Step control for [`propagate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Requested step (ps). `None` picks `min(τ₀/200, 2π/(50 Λ_max))`. The
    /// step actually taken is the grid step divided by the smallest power of
    /// two that does not exceed the request.
    pub dt: Option<f64>,
}

impl SolverParams {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt: Some(dt) }
    }
}

/// 2×2 density matrix in the basis (|0⟩, |1⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 2]; 2]);

impl DensityMatrix {
    pub fn ground() -> Self {
        Self::from_bloch([0.0, 0.0, -1.0])
    }

    /// ρ = (1 + s·σ)/2 with sz = ρ₁₁ − ρ₀₀ and sx + i·sy = 2ρ₀₁.
    pub fn from_bloch(s: [f64; 3]) -> Self {
        let c = Complex64::new(0.5 * s[0], 0.5 * s[1]);
        Self([
            [Complex64::new(0.5 * (1.0 - s[2]), 0.0), c],
            [c.conj(), Complex64::new(0.5 * (1.0 + s[2]), 0.0)],
        ])
    }

    pub fn bloch(&self) -> [f64; 3] {
        let r = &self.0;
        [
            2.0 * r[0][1].re,
            2.0 * r[0][1].im,
            (r[1][1] - r[0][0]).re,
        ]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn purity(&self) -> f64 {
        let r = &self.0;
        (r[0][0] * r[0][0] + r[0][1] * r[1][0] + r[1][0] * r[0][1] + r[1][1] * r[1][1]).re
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = &self.0;
        let a = r[0][0].re;
        let d = r[1][1].re;
        let off = 0.5 * (r[0][1] + r[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d).powi(2) + off.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// Excited-state population ρ₁₁.
    pub fn occupation(&self) -> f64 {
        self.0[1][1].re
    }

    /// Checks that this is a valid initial state: Hermitian, unit trace,
    /// positive semidefinite.
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-9;
        let r = &self.0;
        let herm = (r[0][1] - r[1][0].conj()).norm() + r[0][0].im.abs() + r[1][1].im.abs();
        if herm > TOL {
            return Err(Error::domain("initial_state", "must be Hermitian", herm));
        }
        let tr = self.trace().re;
        if (tr - 1.0).abs() > TOL {
            return Err(Error::domain("initial_state", "must have unit trace", tr));
        }
        let low = self.eigenvalues()[0];
        if low < -TOL {
            return Err(Error::domain("initial_state", "must be positive semidefinite", low));
        }
        Ok(())
    }
}

/// Relaxation rates between the instantaneous dressed states (ps⁻¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononRates {
    /// Upper → lower dressed state (phonon emission).
    pub down: f64,
    /// Lower → upper dressed state (phonon absorption).
    pub up: f64,
    /// Pure dephasing in the dressed basis.
    pub dephasing: f64,
}

impl PhononRates {
    pub const ZERO: Self = Self {
        down: 0.0,
        up: 0.0,
        dephasing: 0.0,
    };
}

/// Dressed-state transition rates for drive magnitude `omega_abs` and
/// detuning `delta_inst` (both ps⁻¹):
///
/// ```text
/// Λ = √(Ω² + Δ²),  γ↓ = (π/2) J(Λ) (Ω/Λ)² (n̄ + 1),  γ↑ = (π/2) J(Λ) (Ω/Λ)² n̄
/// ```
pub fn phonon_rates(omega_abs: f64, delta_inst: f64, phonon: &PhononSpec) -> Result<PhononRates> {
    phonon.validate()?;
    Ok(rates_unchecked(omega_abs, delta_inst, phonon))
}

fn rates_unchecked(omega_abs: f64, delta_inst: f64, phonon: &PhononSpec) -> PhononRates {
    let lambda = omega_abs.hypot(delta_inst);
    if lambda == 0.0 {
        return PhononRates::ZERO;
    }
    let mixing = (omega_abs / lambda).powi(2);
    let base = 0.5 * PI * phonon.spectral_density(lambda) * mixing;
    let nbar = phonon.occupation(lambda);
    PhononRates {
        down: base * (nbar + 1.0),
        up: base * nbar,
        dephasing: 0.0,
    }
}

/// Time-resolved solution of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times (ps): the field grid plus one closing point at the end of
    /// the window.
    pub times: Vec<f64>,
    pub rho: Vec<DensityMatrix>,
    pub bloch: Vec<[f64; 3]>,
    /// ρ₁₁.
    pub occupation: Vec<f64>,
    /// (E₊, E₋) in meV; `None` where the detuning is undefined.
    pub dressed_energies: Vec<Option<(f64, f64)>>,
    pub adiabaticity_ratio: Vec<Option<f64>>,
    /// Step actually used by the integrator (ps).
    pub solver_dt: f64,
}

impl Trajectory {
    pub fn final_occupation(&self) -> f64 {
        *self.occupation.last().expect("trajectory is never empty")
    }

    pub fn final_bloch(&self) -> [f64; 3] {
        *self.bloch.last().expect("trajectory is never empty")
    }
}

/// End state of a propagation, without the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalState {
    pub bloch: [f64; 3],
    pub solver_dt: f64,
}

impl FinalState {
    pub fn occupation(&self) -> f64 {
        0.5 * (1.0 + self.bloch[2])
    }
}

/// Propagates the ground state through `field` and records the trajectory on
/// the field's time grid.
pub fn propagate(
    field: &SampledField,
    emitter: &EmitterConfig,
    solver: &SolverParams,
) -> Result<Trajectory> {
    propagate_from(field, emitter, solver, &DensityMatrix::ground())
}

/// As [`propagate`], from an arbitrary valid initial state.
pub fn propagate_from(
    field: &SampledField,
    emitter: &EmitterConfig,
    solver: &SolverParams,
    initial: &DensityMatrix,
) -> Result<Trajectory> {
    initial.validate()?;
    let drive = Drive::prepare(field, emitter, solver)?;
    let n = field.grid().n_samples();
    let mut bloch = Vec::with_capacity(n + 1);
    drive.run(Vector3::from(initial.bloch()), |s| bloch.push([s.x, s.y, s.z]));

    let grid = field.grid();
    let times: Vec<f64> = (0..=n)
        .map(|i| grid.time(0) + i as f64 * grid.time_step())
        .collect();
    let rho: Vec<DensityMatrix> = bloch.iter().map(|s| DensityMatrix::from_bloch(*s)).collect();
    let occupation = bloch.iter().map(|s| 0.5 * (1.0 + s[2])).collect();

    let (dressed_energies, adiabaticity_ratio) = match shaper::instantaneous_profile(field) {
        Ok(profile) => {
            let curve = analysis::dressed_energies(&profile);
            let ratio = analysis::adiabaticity_ratio(&profile);
            let mut energies: Vec<Option<(f64, f64)>> = curve
                .e_plus
                .iter()
                .zip(&curve.e_minus)
                .map(|(p, m)| p.zip(*m))
                .collect();
            let mut r = ratio.ratio;
            // Closing point: the window is periodic.
            energies.push(energies[0]);
            r.push(r[0]);
            (energies, r)
        }
        Err(_) => (vec![None; n + 1], vec![None; n + 1]),
    };

    Ok(Trajectory {
        times,
        rho,
        bloch,
        occupation,
        dressed_energies,
        adiabaticity_ratio,
        solver_dt: drive.step,
    })
}

/// Propagates from the ground state and returns only the end point.
pub fn final_state(
    field: &SampledField,
    emitter: &EmitterConfig,
    solver: &SolverParams,
) -> Result<FinalState> {
    let drive = Drive::prepare(field, emitter, solver)?;
    let mut last = Vector3::new(0.0, 0.0, -1.0);
    drive.run(last, |s| last = *s);
    Ok(FinalState {
        bloch: [last.x, last.y, last.z],
        solver_dt: drive.step,
    })
}

/// Final excited-state occupation versus pulse area for a fixed shaping.
/// Areas are in units of π; the result pairs each area with its occupation.
/// Whether phonons act is decided by `emitter.phonon`.
pub fn occupation_vs_area(
    pulse: &PulseSpec,
    emitter: &EmitterConfig,
    grid: GridOptions,
    solver: &SolverParams,
    areas_pi: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if let Some(bad) = areas_pi.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::domain("areas", "must be >= 0", *bad));
    }
    if areas_pi.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("areas must be sorted ascending".into()));
    }
    areas_pi
        .par_iter()
        .map(|&area| {
            let pulse = pulse.with_area(area);
            let grid = SimGrid::sized_for(&pulse, grid)?;
            let field = shaper::synthesize(&pulse, emitter, &grid)?;
            Ok((area, final_state(&field, emitter, solver)?.occupation()))
        })
        .collect()
}

/// Generator of the Bloch equation at one instant.
#[derive(Clone, Copy)]
struct Generator {
    rotation: Vector3<f64>,
    dissipation: Option<Dissipation>,
}

#[derive(Clone, Copy)]
struct Dissipation {
    matrix: Matrix3<f64>,
    drift: Vector3<f64>,
}

impl Dissipation {
    /// Relaxation toward the lower dressed state. `upper` is the Bloch
    /// direction of the upper dressed state.
    fn new(rates: PhononRates, upper: Vector3<f64>) -> Self {
        let total = rates.down + rates.up;
        let outer = upper * upper.transpose();
        let identity = Matrix3::identity();
        let matrix = -(0.5 * total) * (identity + outer) - rates.dephasing * (identity - outer);
        Self {
            matrix,
            drift: -(rates.down - rates.up) * upper,
        }
    }
}

impl Generator {
    fn affine(&self) -> Matrix4<f64> {
        let w = self.rotation;
        let mut a = Matrix4::zeros();
        a.fixed_view_mut::<3, 3>(0, 0).copy_from(&w.cross_matrix());
        if let Some(d) = &self.dissipation {
            let mut block = a.fixed_view_mut::<3, 3>(0, 0);
            block += d.matrix;
            a.fixed_view_mut::<3, 1>(0, 3).copy_from(&d.drift);
        }
        a
    }
}

/// The drive resampled for the integrator, plus everything needed to build
/// generators on the fly.
struct Drive<'a> {
    omega: Vec<Complex64>,
    delta: Option<Vec<f64>>,
    phonon: Option<&'a PhononSpec>,
    floor: f64,
    /// Integrator step (ps).
    step: f64,
    /// Integrator steps per field-grid sample.
    refine: usize,
}

fn spectral_derivative(spectrum: &[Complex64], grid: &SimGrid) -> Vec<Complex64> {
    spectrum
        .iter()
        .enumerate()
        .map(|(k, s)| s * Complex64::new(0.0, -grid.frequency(k)))
        .collect()
}

fn detuning(omega: Complex64, derivative: Complex64) -> f64 {
    (derivative * omega.conj()).im / omega.norm_sqr()
}

impl<'a> Drive<'a> {
    fn prepare(
        field: &SampledField,
        emitter: &'a EmitterConfig,
        solver: &SolverParams,
    ) -> Result<Self> {
        emitter.validate()?;
        let grid = field.grid();
        let peak = field.peak_rabi();
        let floor = PHASE_FLOOR * peak;

        let derivative = fourier::inverse(&spectral_derivative(field.spectrum(), grid), grid.time_step());
        let lambda_max = field
            .time_envelope()
            .iter()
            .zip(&derivative)
            .filter(|(o, _)| o.norm() >= floor && peak > 0.0)
            .map(|(o, d)| o.norm().hypot(detuning(*o, *d)))
            .fold(0.0, f64::max);

        let period = if lambda_max > 0.0 {
            2.0 * PI / lambda_max
        } else {
            f64::INFINITY
        };
        let requested = match solver.dt {
            Some(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::domain("dt", "must be > 0", dt));
                }
                let limit = period / MIN_STEPS_PER_PERIOD;
                if dt > limit {
                    return Err(Error::StepTooLarge { dt, required: limit });
                }
                dt
            }
            None => (field.fwhm_tl() / STEPS_PER_FWHM).min(period / STEPS_PER_PERIOD),
        };
        let refine = ((grid.time_step() / requested).ceil().max(1.0) as usize).next_power_of_two();
        let step = grid.time_step() / refine as f64;

        // Samples at every half step for the Simpson nodes.
        let omega = fourier::inverse_resampled(field.spectrum(), grid.time_step(), 2 * refine);
        let phonon = emitter.phonon.as_ref().filter(|p| p.coupling > 0.0);
        let delta = phonon.map(|_| {
            let d = fourier::inverse_resampled(
                &spectral_derivative(field.spectrum(), grid),
                grid.time_step(),
                2 * refine,
            );
            omega
                .iter()
                .zip(&d)
                .map(|(o, d)| if o.norm() >= floor { detuning(*o, *d) } else { 0.0 })
                .collect()
        });
        Ok(Self {
            omega,
            delta,
            phonon,
            floor,
            step,
            refine,
        })
    }

    fn generator(&self, index: usize) -> Generator {
        let index = index % self.omega.len();
        let o = self.omega[index];
        let rotation = Vector3::new(o.re, -o.im, 0.0);
        let dissipation = match (self.phonon, &self.delta) {
            (Some(phonon), Some(delta)) if o.norm() >= self.floor => {
                let abs = o.norm();
                let d = delta[index];
                let rates = rates_unchecked(abs, d, phonon);
                if rates.down + rates.up + rates.dephasing > 0.0 {
                    let upper = Vector3::new(o.re, -o.im, d) / abs.hypot(d);
                    Some(Dissipation::new(rates, upper))
                } else {
                    None
                }
            }
            _ => None,
        };
        Generator {
            rotation,
            dissipation,
        }
    }

    /// Integrates over the whole window, calling `record` at the start and
    /// after every field-grid interval.
    fn run(&self, mut s: Vector3<f64>, mut record: impl FnMut(&Vector3<f64>)) {
        let h = self.step;
        let steps = self.omega.len() / 2;
        record(&s);
        let mut a = self.generator(0);
        for step in 0..steps {
            let m = self.generator(2 * step + 1);
            let b = self.generator(2 * step + 2);
            s = magnus_step(&a, &m, &b, h, &s);
            a = b;
            if (step + 1) % self.refine == 0 {
                record(&s);
            }
        }
    }
}

/// One fourth-order Magnus step from Simpson samples `a`, `m`, `b` of the
/// generator at the start, midpoint and end of the step:
/// `Ω = (h/6)(A + 4M + B) + (h²/12)[B − A, M]`.
fn magnus_step(a: &Generator, m: &Generator, b: &Generator, h: f64, s: &Vector3<f64>) -> Vector3<f64> {
    if a.dissipation.is_none() && m.dissipation.is_none() && b.dissipation.is_none() {
        // [K(u), K(v)] = K(u × v) for cross-product matrices.
        let axis = (h / 6.0) * (a.rotation + 4.0 * m.rotation + b.rotation)
            + (h * h / 12.0) * (b.rotation - a.rotation).cross(&m.rotation);
        return rotate(s, &axis);
    }
    let (ga, gm, gb) = (a.affine(), m.affine(), b.affine());
    let diff = gb - ga;
    let magnus = (h / 6.0) * (ga + 4.0 * gm + gb) + (h * h / 12.0) * (diff * gm - gm * diff);
    let y = magnus.exp() * nalgebra::Vector4::new(s.x, s.y, s.z, 1.0);
    Vector3::new(y.x, y.y, y.z)
}

/// Rotation of `s` about `axis` by the angle |axis| (Rodrigues).
fn rotate(s: &Vector3<f64>, axis: &Vector3<f64>) -> Vector3<f64> {
    let angle = axis.norm();
    if angle == 0.0 {
        return *s;
    }
    let k = axis / angle;
    let (sin, cos) = angle.sin_cos();
    s * cos + k.cross(s) * sin + k * (k.dot(s) * (1.0 - cos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PulseSpec;

    fn field_for(pulse: PulseSpec) -> SampledField {
        let grid = SimGrid::sized_for(&pulse, GridOptions::default()).unwrap();
        shaper::synthesize(&pulse, &EmitterConfig::default(), &grid).unwrap()
    }

    #[test]
    fn density_matrix_bloch_roundtrip() {
        let s = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(s);
        assert_eq!(rho.bloch(), s);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let ev = rho.eigenvalues();
        let r = (0.09f64 + 0.16 + 0.25).sqrt();
        assert!((ev[0] - 0.5 * (1.0 - r)).abs() < 1e-15);
        assert!((rho.purity() - 0.5 * (1.0 + r * r)).abs() < 1e-15);
    }

    #[test]
    fn invalid_initial_state_rejected() {
        let field = field_for(PulseSpec::default());
        let mut rho = DensityMatrix::ground();
        rho.0[0][0] = Complex64::new(2.0, 0.0);
        let err = propagate_from(&field, &EmitterConfig::default(), &SolverParams::default(), &rho)
            .unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn rates_limits() {
        let cold = PhononSpec::default().at_temperature(0.0);
        let r = phonon_rates(2.0, 0.5, &cold).unwrap();
        assert_eq!(r.up, 0.0);
        assert!(r.down > 0.0);
        let r = phonon_rates(0.0, 3.0, &PhononSpec::default()).unwrap();
        assert_eq!((r.down, r.up), (0.0, 0.0));
        let r = phonon_rates(0.0, 0.0, &PhononSpec::default()).unwrap();
        assert_eq!(r, PhononRates::ZERO);
        assert!(phonon_rates(1.0, 0.0, &PhononSpec::default().at_temperature(-1.0)).is_err());
    }

    #[test]
    fn detailed_balance() {
        let p = PhononSpec::default().at_temperature(20.0);
        for (o, d) in [(0.5, 0.0), (2.0, 1.0), (3.0, -4.0)] {
            let r = phonon_rates(o, d, &p).unwrap();
            let nbar = p.occupation(f64::hypot(o, d));
            assert!((r.up / r.down - nbar / (nbar + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_matches_rodrigues_quarter_turn() {
        let s = Vector3::new(0.0, 0.0, -1.0);
        let out = rotate(&s, &Vector3::new(PI / 2.0, 0.0, 0.0));
        // ṡ = w × s about +x carries −z to +y.
        assert!((out - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pi_pulse_inverts() {
        let traj = propagate(
            &field_for(PulseSpec::default()),
            &EmitterConfig::default(),
            &SolverParams::default(),
        )
        .unwrap();
        assert!((traj.final_occupation() - 1.0).abs() < 1e-9);
        assert_eq!(traj.bloch[0], [0.0, 0.0, -1.0]);
        assert_eq!(traj.times.len(), traj.bloch.len());
        assert_eq!(traj.dressed_energies.len(), traj.bloch.len());
    }

    #[test]
    fn trace_purity_and_bounds_without_dissipation() {
        let traj = propagate(
            &field_for(PulseSpec::default().with_area(3.4).with_chirp(0.15).with_hole(2.1, 1.0)),
            &EmitterConfig::default(),
            &SolverParams::default(),
        )
        .unwrap();
        for rho in &traj.rho {
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.eigenvalues()[0] > -1e-9);
            assert!((rho.purity() - 1.0).abs() < 1e-6);
            let occ = rho.occupation();
            assert!((-1e-9..=1.0 + 1e-9).contains(&occ));
        }
    }

    #[test]
    fn positivity_with_phonons() {
        let emitter = EmitterConfig::default().with_phonons(PhononSpec::default());
        // Weak, slowly swept drive keeps Λ near the phonon cutoff.
        let pulse = PulseSpec::default().with_area(1.0).with_chirp(-0.15);
        let grid = SimGrid::sized_for(&pulse, GridOptions::default()).unwrap();
        let field = shaper::synthesize(&pulse, &emitter, &grid).unwrap();
        let traj = propagate(&field, &emitter, &SolverParams::default()).unwrap();
        let mut lost = 0.0f64;
        for rho in &traj.rho {
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.eigenvalues()[0] > -1e-9);
            lost = lost.max(1.0 - rho.purity());
        }
        assert!(lost > 1e-2, "phonons should mix the state");
    }

    #[test]
    fn step_refusal_reports_requirement() {
        let field = field_for(PulseSpec::default().with_area(4.0));
        let err = final_state(&field, &EmitterConfig::default(), &SolverParams::with_dt(0.05))
            .unwrap_err();
        match err {
            Error::StepTooLarge { dt, required } => {
                assert_eq!(dt, 0.05);
                assert!(required < 0.05);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(final_state(&field, &EmitterConfig::default(), &SolverParams::with_dt(-1.0)).is_err());
    }

    #[test]
    fn unsorted_areas_rejected() {
        let r = occupation_vs_area(
            &PulseSpec::default(),
            &EmitterConfig::default(),
            GridOptions::default(),
            &SolverParams::default(),
            &[1.0, 0.5],
        );
        assert!(r.is_err());
    }
}
