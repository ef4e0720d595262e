//! Smooth compactly supported profiles: the bump, the smooth step, and the
//! Fourier multiplier of the normalised mollifier.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{fft, SpectralFunction};

/// `exp(−1/(1−u²))` on `(−1, 1)`, zero elsewhere.
pub fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// `∫_{−1}^{1} bump(u) du`.
pub fn bump_unit_integral() -> f64 {
    // Trapezoid on a flat-ended smooth integrand converges faster than any power.
    let n = 4096;
    let h = 2.0 / n as f64;
    (1..n).map(|j| bump(-1.0 + j as f64 * h)).sum::<f64>() * h
}

/// Smooth monotone step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, C^∞ in between.
pub fn smooth_step(u: f64) -> f64 {
    let phi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = phi(u);
        a / (a + phi(1.0 - u))
    }
}

/// Fourier multiplier `ĝ(n) = ∫ g(x) e^{−inx} dx`, `n = 0..=n_max`, of the unit
/// integral mollifier `g ∝ bump(x/width)`. `ĝ(0) = 1` exactly.
pub fn mollifier_coefficients(width: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(width > 0.0 && width < PI) {
        return Err(Error::InvalidArgument(format!("mollifier width must lie in (0, π), got {width}")));
    }
    let needed = (8 * (n_max + 1)).max((512.0 * PI / width).ceil() as usize);
    let points = needed.next_power_of_two();
    let samples: Vec<Complex64> = (0..points)
        .map(|j| {
            let x = TAU * j as f64 / points as f64;
            let x = if x > PI { x - TAU } else { x };
            Complex64::new(bump(x / width), 0.0)
        })
        .collect();
    let spectrum = fft::forward(&samples);
    let norm = spectrum[0].re;
    Ok((0..=n_max).map(|n| spectrum[n].re / norm).collect())
}

impl SpectralFunction {
    /// Convolution with the unit-integral bump supported in `(−width, width)`.
    /// Only modes up to `profile_cutoff` are kept.
    pub fn mollify(&self, width: f64, profile_cutoff: usize) -> Result<Self> {
        let k = self.cutoff().min(profile_cutoff);
        let g = mollifier_coefficients(width, k)?;
        let coeffs = self.coeffs()[..=k].iter().zip(&g).map(|(c, gn)| c * gn).collect();
        Ok(Self::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_integral_value() {
        assert_abs_diff_eq!(bump_unit_integral(), 0.443_993_816_168_079_4, epsilon = 1e-13);
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert_abs_diff_eq!(smooth_step(0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(smooth_step(0.3) + smooth_step(0.7), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn multiplier_matches_direct_integral() {
        let w = 0.4;
        let g = mollifier_coefficients(w, 6).unwrap();
        let total = bump_unit_integral() * w;
        for (n, gn) in g.iter().enumerate() {
            let m = 20000;
            let h = 2.0 * w / m as f64;
            let direct: f64 = (1..m)
                .map(|j| {
                    let x = -w + j as f64 * h;
                    bump(x / w) * (n as f64 * x).cos()
                })
                .sum::<f64>()
                * h
                / total;
            assert_abs_diff_eq!(*gn, direct, epsilon = 1e-11);
        }
    }

    #[test]
    fn mollify_constant_is_identity() {
        let one = SpectralFunction::constant(1.0);
        let m = one.mollify(0.3, 16).unwrap();
        assert_abs_diff_eq!(m.coeff(0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mollify_shrinks_coefficients() {
        let f = SpectralFunction::from_trig(&[0.0, 1.0, 0.5, -0.3, 0.2], &[0.0, 0.1, 0.7, 0.0, -0.4]);
        let m = f.mollify(0.5, 64).unwrap();
        for n in 0..=4 {
            assert!(m.coeff(n).norm() <= f.coeff(n).norm() + 1e-16);
        }
    }

    #[test]
    fn width_out_of_range() {
        assert!(SpectralFunction::cos(1).mollify(0.0, 4).is_err());
        assert!(SpectralFunction::cos(1).mollify(PI, 4).is_err());
    }
}
