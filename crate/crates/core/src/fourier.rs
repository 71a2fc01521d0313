//! Centered discrete transforms with the crate's sign convention:
//!
//! ```text
//! S(ω_k) = Σ_n Ω(t_n) e^{+iω_k t_n} Δt
//! Ω(t_n) = (1/2π) Σ_k S(ω_k) e^{−iω_k t_n} Δω
//! ```
//!
//! with `t_n = (n − N/2)Δt` and `ω_k = (k − N/2)Δω`. For N a multiple of four
//! the centering reduces to alternating signs around an ordinary FFT.

use num_complex::Complex64;
use rustfft::FftPlanner;

#[inline]
fn alternate(buf: &mut [Complex64]) {
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// Time samples → spectrum.
pub fn forward(envelope: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n = envelope.len();
    debug_assert!(n % 4 == 0);
    let mut buf = envelope.to_vec();
    alternate(&mut buf);
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    alternate(&mut buf);
    for v in &mut buf {
        *v *= dt;
    }
    buf
}

/// Spectrum → time samples on the grid whose step is `dt`.
pub fn inverse(spectrum: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n = spectrum.len();
    debug_assert!(n % 4 == 0);
    inverse_resampled(spectrum, dt, 1)
}

/// Evaluates the band-limited envelope described by `spectrum` (sampled for a
/// grid of step `dt`) on a grid `factor` times finer over the same window.
/// Returns `factor · N` samples centered like the original grid.
pub fn inverse_resampled(
    spectrum: &[Complex64],
    dt: f64,
    factor: usize,
) -> Vec<Complex64> {
    let n = spectrum.len();
    let m = n * factor;
    debug_assert!(m % 4 == 0);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let offset = (m - n) / 2;
    buf[offset..offset + n].copy_from_slice(spectrum);
    alternate(&mut buf);
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    alternate(&mut buf);
    let norm = 1.0 / (n as f64 * dt);
    for v in &mut buf {
        *v *= norm;
    }
    buf
}
