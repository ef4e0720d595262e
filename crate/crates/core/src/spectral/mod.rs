//! Band-limited real periodic functions on the circle.
//!
//! A [`SpectralFunction`] stores the Fourier coefficients `f̂ₙ` for
//! `0 ≤ n ≤ K`; negative modes are recovered by conjugation, so every value
//! is a real trigonometric polynomial of degree at most `K`.

pub(crate) mod fft;
mod mollifier;
mod norms;

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mollifier::{bump, bump_unit_integral, mollifier_coefficients, smooth_step};

/// Uniform grid `θ_j = 2πj/M` on the circle, used for trapezoid quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadratureGrid {
    points: usize,
}

impl QuadratureGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("quadrature grid needs at least one point".into()));
        }
        Ok(Self { points })
    }

    /// Default grid for integrands whose cutoffs sum to `total_cutoff`:
    /// `max(256, 4·total_cutoff + 1)` points.
    pub fn for_cutoff(total_cutoff: usize) -> Self {
        Self { points: (4 * total_cutoff + 1).max(256) }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        TAU * j as f64 / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Trapezoid rule for `∫₀^{2π} v(θ) dθ` given samples on the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.spacing()
    }
}

/// Real trigonometric polynomial `Σ_{|n|≤K} f̂ₙ e^{inθ}` with `f̂₋ₙ = conj(f̂ₙ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralJson", into = "SpectralJson")]
pub struct SpectralFunction {
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    /// Builds from the non-negative modes `f̂₀, …, f̂_K`. The imaginary part of
    /// `f̂₀` is dropped so that the function is real.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(a: f64) -> Self {
        Self { coeffs: vec![Complex64::new(a, 0.0)] }
    }

    /// `cos(kθ)`.
    pub fn cos(k: usize) -> Self {
        if k == 0 {
            return Self::constant(1.0);
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(0.5, 0.0);
        Self { coeffs }
    }

    /// `sin(kθ)`.
    pub fn sin(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        if k > 0 {
            coeffs[k] = Complex64::new(0.0, -0.5);
        }
        Self { coeffs }
    }

    /// `a₀ + Σ_{n≥1} (aₙ cos nθ + bₙ sin nθ)`; `a[0]` is the constant term and
    /// `b[0]` is ignored.
    pub fn from_trig(a: &[f64], b: &[f64]) -> Self {
        let k = a.len().max(b.len()).max(1) - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        if let Some(&a0) = a.first() {
            coeffs[0] = Complex64::new(a0, 0.0);
        }
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            let an = a.get(n).copied().unwrap_or(0.0);
            let bn = b.get(n).copied().unwrap_or(0.0);
            *c = Complex64::new(an / 2.0, -bn / 2.0);
        }
        Self { coeffs }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients `f̂₀, …, f̂_K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `f̂ₙ` for any integer `n` (zero beyond the cutoff).
    pub fn coeff(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        match self.coeffs.get(k) {
            Some(c) if n >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Trigonometric interpolant of equispaced samples `v_j = f(2πj/M)`.
    ///
    /// For even `M` the Nyquist coefficient is split evenly between `±M/2`.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySamples);
        }
        let m = values.len();
        let x = fft::forward_real(values);
        let k = m / 2;
        let mut coeffs = x[..=k].to_vec();
        if m.is_multiple_of(2) && k > 0 {
            coeffs[k] = Complex64::new(x[k].re / 2.0, 0.0);
        }
        Ok(Self::new(coeffs))
    }

    /// Samples `Σₙ f̂ₙ e^{inθ_j}` at the grid nodes (aliasing folded exactly).
    pub fn to_samples(&self, grid: &QuadratureGrid) -> Vec<f64> {
        let m = grid.points();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); m];
        let k = self.cutoff() as i64;
        for n in -k..=k {
            spectrum[n.rem_euclid(m as i64) as usize] += self.coeff(n);
        }
        fft::inverse(&spectrum).into_iter().map(|z| z.re).collect()
    }

    /// Samples on the `m`-point grid.
    pub fn samples(&self, m: usize) -> Vec<f64> {
        match QuadratureGrid::new(m) {
            Ok(grid) => self.to_samples(&grid),
            Err(_) => Vec::new(),
        }
    }

    /// Point evaluation at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_impl(theta, false).0
    }

    /// `(f(θ), f′(θ))` in one pass.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        self.eval_impl(theta, true)
    }

    fn eval_impl(&self, theta: f64, with_derivative: bool) -> (f64, f64) {
        let step = Complex64::cis(theta);
        let mut z = step;
        let mut value = self.coeffs[0].re;
        let mut slope = 0.0;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            // Re-anchor the power recurrence to keep the phase error bounded.
            if n % 64 == 0 {
                z = Complex64::cis(n as f64 * theta);
            }
            let t = c * z;
            value += 2.0 * t.re;
            if with_derivative {
                slope -= 2.0 * n as f64 * t.im;
            }
            z *= step;
        }
        (value, slope)
    }

    /// `f′`, with `(f′)̂ₙ = i n f̂ₙ`.
    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, c)| c * Complex64::new(0.0, n as f64)).collect();
        Self::new(coeffs)
    }

    /// Pointwise product as a coefficient convolution (cutoff `K_f + K_g`).
    pub fn multiply(&self, other: &Self) -> Self {
        let kf = self.cutoff() as i64;
        let kg = other.cutoff() as i64;
        let coeffs = (0..=kf + kg)
            .map(|m| {
                let lo = (-kf).max(m - kg);
                let hi = kf.min(m + kg);
                (lo..=hi).map(|n| self.coeff(n) * other.coeff(m - n)).sum()
            })
            .collect();
        Self::new(coeffs)
    }

    /// Band-limited approximation of `1/(1+g)` at `target_cutoff`, together
    /// with the residual `sup |(1+g)·r − 1|` on a dense check grid.
    pub fn reciprocal_one_plus(&self, target_cutoff: usize) -> Result<(Self, f64)> {
        let dense = QuadratureGrid::new((8 * self.cutoff().max(target_cutoff) + 1).max(1024))?;
        let g = self.to_samples(&dense);
        let min = g.iter().fold(f64::INFINITY, |acc, v| acc.min(1.0 + v));
        if min.is_nan() || min <= 0.0 {
            return Err(Error::NotInvertible { min });
        }
        let recip: Vec<f64> = g.iter().map(|v| 1.0 / (1.0 + v)).collect();
        let r = Self::from_samples(&recip)?.truncate(target_cutoff);
        let r_samples = r.to_samples(&dense);
        let residual = g.iter().zip(&r_samples).map(|(gv, rv)| ((1.0 + gv) * rv - 1.0).abs()).fold(0.0, f64::max);
        Ok((r, residual))
    }

    /// Drops every mode above `k`.
    pub fn truncate(&self, k: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(k + 1);
        Self { coeffs }
    }

    /// Drops trailing modes with modulus at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= tol) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Rotated function `θ ↦ f(θ − t)`.
    pub fn rotate(&self, t: f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, c)| c * Complex64::cis(-(n as f64) * t)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let k = self.cutoff().max(other.cutoff()) as i64;
        Self::new((0..=k).map(|n| op(self.coeff(n), other.coeff(n))).collect())
    }

    /// Largest sample modulus on the `max(256, 4K+1)` grid.
    pub fn sup_norm(&self) -> f64 {
        let grid = QuadratureGrid::for_cutoff(self.cutoff());
        self.to_samples(&grid).iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `max_n |f̂ₙ − ĝₙ|`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let k = self.cutoff().max(other.cutoff()) as i64;
        (0..=k).map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }
}

impl Default for SpectralFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &SpectralFunction {
    type Output = SpectralFunction;
    fn add(self, rhs: Self) -> SpectralFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralFunction {
    type Output = SpectralFunction;
    fn sub(self, rhs: Self) -> SpectralFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &SpectralFunction {
    type Output = SpectralFunction;
    fn neg(self) -> SpectralFunction {
        self.scale(-1.0)
    }
}

impl Mul<&SpectralFunction> for f64 {
    type Output = SpectralFunction;
    fn mul(self, rhs: &SpectralFunction) -> SpectralFunction {
        rhs.scale(self)
    }
}

impl Add for SpectralFunction {
    type Output = SpectralFunction;
    fn add(self, rhs: Self) -> SpectralFunction {
        &self + &rhs
    }
}

impl Sub for SpectralFunction {
    type Output = SpectralFunction;
    fn sub(self, rhs: Self) -> SpectralFunction {
        &self - &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct SpectralJson {
    cutoff: usize,
    coeffs: Vec<(i64, f64, f64)>,
}

impl From<SpectralFunction> for SpectralJson {
    fn from(f: SpectralFunction) -> Self {
        let coeffs = f.coeffs.iter().enumerate().map(|(n, c)| (n as i64, c.re, c.im)).collect();
        Self { cutoff: f.cutoff(), coeffs }
    }
}

impl TryFrom<SpectralJson> for SpectralFunction {
    type Error = Error;

    fn try_from(json: SpectralJson) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); json.cutoff + 1];
        for (n, re, im) in json.coeffs {
            if n < 0 {
                return Err(Error::Json(format!("negative mode {n}: only n ≥ 0 is stored")));
            }
            let slot = coeffs
                .get_mut(n as usize)
                .ok_or_else(|| Error::Json(format!("mode {n} exceeds declared cutoff {}", json.cutoff)))?;
            *slot = Complex64::new(re, im);
        }
        Ok(Self::new(coeffs))
    }
}
