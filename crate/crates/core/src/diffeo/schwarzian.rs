//! Schwarzian derivative of the boundary map `γ̊(z) = e^{iγ(θ)}` and the
//! anomaly `β(γ, f)`.
//!
//! `γ̊(z) = z · e^{ip(θ)}` is expanded as a Laurent series in `z` from an FFT of
//! `e^{ip}` on a fine grid; complex derivatives are then exact term-wise.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::spectral::{fft, QuadratureGrid, SpectralFunction};

use super::{CentralCharge, CircleDiffeo};

/// Laurent coefficients `w_m` of `γ̊(z) = Σ_m w_m z^m`, for `m` in
/// `lowest..lowest + len`.
struct Laurent {
    lowest: i64,
    coeffs: Vec<Complex64>,
}

impl Laurent {
    fn new(gamma: &CircleDiffeo, min_points: usize) -> Self {
        let p = gamma.periodic_part();
        let bound: f64 = p.coeffs().iter().skip(1).map(|c| 2.0 * c.norm()).sum();
        let k = p.cutoff();
        let needed = (8 * (k + 1) * (4 + (2.0 * bound).ceil() as usize)).max(1024).max(min_points);
        let l = needed.next_power_of_two();
        let samples: Vec<Complex64> = p.samples(l).into_iter().map(Complex64::cis).collect();
        let e = fft::forward(&samples);
        // e_n sits at index n mod L; keep |n| < L/2 and shift by one for the z factor.
        let half = (l / 2) as i64;
        let lowest = -half + 1 + 1;
        let coeffs = (-half + 1..half).map(|n| e[n.rem_euclid(l as i64) as usize]).collect();
        Self { lowest, coeffs }
    }

    /// `A_k(θ) = Σ_m [m]_k w_m e^{imθ}` where `[m]_k` is the falling factorial,
    /// so that `d^kγ̊/dz^k = A_k · e^{−ikθ}`.
    fn falling(&self, order: u32, m: i64) -> f64 {
        (0..order as i64).map(|j| (m - j) as f64).product()
    }

    fn derivative_samples(&self, order: u32, points: usize) -> Vec<Complex64> {
        let mut spectrum = vec![Complex64::new(0.0, 0.0); points];
        for (i, w) in self.coeffs.iter().enumerate() {
            let m = self.lowest + i as i64;
            spectrum[m.rem_euclid(points as i64) as usize] += w * self.falling(order, m);
        }
        fft::inverse(&spectrum)
    }

    fn derivative_at(&self, order: u32, theta: f64) -> Complex64 {
        let base = Complex64::cis(theta);
        let mut z = Complex64::cis(self.lowest as f64 * theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, w) in self.coeffs.iter().enumerate() {
            let m = self.lowest + i as i64;
            if i % 64 == 0 {
                z = Complex64::cis(m as f64 * theta);
            }
            acc += w * self.falling(order, m) * z;
            z *= base;
        }
        acc
    }
}

fn schwarzian_from(a1: Complex64, a2: Complex64, a3: Complex64, theta: f64) -> Complex64 {
    let r2 = a2 / a1;
    (a3 / a1 - 1.5 * r2 * r2) * Complex64::cis(-2.0 * theta)
}

impl CircleDiffeo {
    /// `{γ̊, z} = γ̊‴/γ̊′ − (3/2)(γ̊″/γ̊′)²` at the grid nodes.
    pub fn schwarzian(&self, grid: &QuadratureGrid) -> Vec<Complex64> {
        let m = grid.points();
        let laurent = Laurent::new(self, 0);
        // Evaluate on a multiple of the requested grid fine enough to hold the
        // whole Laurent series, then subsample.
        let span = laurent.coeffs.len();
        let factor = span.div_ceil(m).max(1);
        let fine = m * factor;
        let a: Vec<Vec<Complex64>> = (1..=3).map(|k| laurent.derivative_samples(k, fine)).collect();
        (0..m)
            .map(|j| {
                let i = j * factor;
                schwarzian_from(a[0][i], a[1][i], a[2][i], grid.node(j))
            })
            .collect()
    }

    /// `{γ̊, z}` at arbitrary angles (direct Laurent summation).
    pub fn schwarzian_at(&self, thetas: &[f64]) -> Vec<Complex64> {
        let laurent = Laurent::new(self, 0);
        thetas
            .iter()
            .map(|&t| {
                let a1 = laurent.derivative_at(1, t);
                let a2 = laurent.derivative_at(2, t);
                let a3 = laurent.derivative_at(3, t);
                schwarzian_from(a1, a2, a3, t)
            })
            .collect()
    }

    /// Complex derivative `dγ̊/dz` at arbitrary angles.
    pub fn z_derivative_at(&self, thetas: &[f64]) -> Vec<Complex64> {
        let laurent = Laurent::new(self, 0);
        thetas.iter().map(|&t| laurent.derivative_at(1, t) * Complex64::cis(-t)).collect()
    }

    /// `β(γ, f)` together with the imaginary part of the quadrature, which
    /// vanishes for real `f` up to rounding.
    pub fn beta_with_residual(&self, c: CentralCharge, f: &SpectralFunction) -> (f64, f64) {
        if f.is_zero() {
            return (0.0, 0.0);
        }
        let laurent = Laurent::new(self, 8 * (f.cutoff() + 1));
        let l = laurent.coeffs.len() + 1;
        let grid = QuadratureGrid::new(l).expect("nonempty");
        let a: Vec<Vec<Complex64>> = (1..=3).map(|k| laurent.derivative_samples(k, l)).collect();
        let fs = f.to_samples(&grid);
        // ∮ {γ̊,z} i z f dz with z = e^{iθ}, dz = iz dθ gives −∫ {γ̊,z} z² f dθ.
        let integral: Complex64 = (0..l)
            .map(|j| {
                let t = grid.node(j);
                let s = schwarzian_from(a[0][j], a[1][j], a[2][j], t);
                s * Complex64::cis(2.0 * t) * fs[j]
            })
            .sum::<Complex64>()
            * (-TAU / l as f64);
        let value = integral * (c.0 / (24.0 * PI));
        (value.re, value.im)
    }
}

/// `β(γ, f) = (c/24π) ∮ {γ̊, z} i z f(z) dz`.
pub fn beta(c: CentralCharge, gamma: &CircleDiffeo, f: &SpectralFunction) -> f64 {
    gamma.beta_with_residual(c, f).0
}
