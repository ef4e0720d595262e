//! Thin wrappers over `rustfft` with a per-thread plan cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Normalised forward DFT: `X_k = (1/M) Σ_j x_j e^{-2πijk/M}`.
pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut buf = values.to_vec();
    if m == 0 {
        return buf;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m).process(&mut buf));
    let scale = 1.0 / m as f64;
    for x in &mut buf {
        *x *= scale;
    }
    buf
}

/// Unnormalised inverse DFT: `x_j = Σ_k X_k e^{2πijk/M}`.
pub fn inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let m = spectrum.len();
    let mut buf = spectrum.to_vec();
    if m == 0 {
        return buf;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m).process(&mut buf));
    buf
}

pub fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&buf)
}
