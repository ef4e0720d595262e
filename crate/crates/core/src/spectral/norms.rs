//! Sobolev-type norms of band-limited functions.

use crate::error::{Error, Result};

use super::{QuadratureGrid, SpectralFunction};

impl SpectralFunction {
    /// `‖f‖_{H^s} = (Σₙ (1+n²)^s |f̂ₙ|²)^{1/2}`, any real `s`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_l2(|n| (1.0 + (n * n) as f64).powf(s)).sqrt()
    }

    /// Homogeneous part `(Σₙ |n|^{2s} |f̂ₙ|²)^{1/2}` (the zero mode drops out).
    pub fn homogeneous_sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_l2(|n| if n == 0 { 0.0 } else { (n as f64).powf(2.0 * s) }).sqrt()
    }

    fn weighted_l2(&self, weight: impl Fn(usize) -> f64) -> f64 {
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let mult = if n == 0 { 1.0 } else { 2.0 };
                mult * weight(n) * c.norm_sqr()
            })
            .sum()
    }

    /// `‖f‖_{3/2} = Σₙ |f̂ₙ| (1 + |n|^{3/2})`.
    pub fn s32_norm(&self) -> f64 {
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let mult = if n == 0 { 1.0 } else { 2.0 };
                mult * c.norm() * (1.0 + (n as f64).powf(1.5))
            })
            .sum()
    }

    /// Trapezoid approximation of the Gagliardo double integral
    ///
    /// `∬ |f^{(k)}(θ₁) − f^{(k)}(θ₂)|² / |θ₁ − θ₂|^{2λ+1} dθ₁ dθ₂`
    ///
    /// with `k = ⌊s⌋`, `λ = s − k` and circle distance. Diagonal pairs are
    /// excluded.
    pub fn gagliardo_seminorm(&self, s: f64, grid: &QuadratureGrid) -> Result<f64> {
        if s.is_nan() || s <= 0.0 || s.fract() == 0.0 || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("Gagliardo order must be positive and non-integer, got {s}")));
        }
        let order = s.floor() as usize;
        let lambda = s - order as f64;
        let mut d = self.clone();
        for _ in 0..order {
            d = d.derivative();
        }
        let v = d.to_samples(grid);
        let m = grid.points();
        let h = grid.spacing();
        let mut total = 0.0;
        // The integrand depends on θ₁ − θ₂ only through the kernel, so sum by shift.
        for shift in 1..m {
            let dist = h * shift.min(m - shift) as f64;
            let kernel = dist.powf(-(2.0 * lambda + 1.0));
            let acc: f64 = (0..m)
                .map(|j| {
                    let diff = v[j] - v[(j + shift) % m];
                    diff * diff
                })
                .sum();
            total += kernel * acc;
        }
        Ok(total * h * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cos_norms() {
        let c = SpectralFunction::cos(1);
        assert_abs_diff_eq!(c.sobolev_norm(0.0), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.sobolev_norm(2.0), 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.s32_norm(), 2.0, epsilon = 1e-15);
        assert_eq!(SpectralFunction::zero().sobolev_norm(1.3), 0.0);
        assert_eq!(SpectralFunction::zero().s32_norm(), 0.0);
        assert_eq!(SpectralFunction::constant(1.0).s32_norm(), 1.0);
    }

    #[test]
    fn parseval() {
        let f = SpectralFunction::from_trig(&[0.2, 1.0, -0.3], &[0.0, 0.4, 0.9]);
        let grid = QuadratureGrid::for_cutoff(2 * f.cutoff());
        let sq: Vec<f64> = f.to_samples(&grid).iter().map(|v| v * v).collect();
        let l2 = grid.integrate(&sq) / std::f64::consts::TAU;
        assert!((f.sobolev_norm(0.0).powi(2) - l2).abs() / l2 < 1e-10);
    }

    #[test]
    fn gagliardo_vanishes_on_constants() {
        let grid = QuadratureGrid::new(128).unwrap();
        assert_eq!(SpectralFunction::zero().gagliardo_seminorm(0.5, &grid).unwrap(), 0.0);
        assert_eq!(SpectralFunction::constant(3.0).gagliardo_seminorm(1.5, &grid).unwrap(), 0.0);
    }

    #[test]
    fn gagliardo_rejects_integer_order() {
        let grid = QuadratureGrid::new(64).unwrap();
        assert!(SpectralFunction::cos(1).gagliardo_seminorm(1.0, &grid).is_err());
        assert!(SpectralFunction::cos(1).gagliardo_seminorm(-0.5, &grid).is_err());
    }

    /// Direct double-sum oracle (no shift trick).
    fn gagliardo_direct(f: &SpectralFunction, s: f64, m: usize) -> f64 {
        let grid = QuadratureGrid::new(m).unwrap();
        let k = s.floor() as usize;
        let lambda = s - k as f64;
        let mut d = f.clone();
        for _ in 0..k {
            d = d.derivative();
        }
        let nodes = grid.nodes();
        let h = grid.spacing();
        let mut total = 0.0;
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let raw = (a - b).abs();
                let dist = raw.min(std::f64::consts::TAU - raw);
                total += (d.eval(a) - d.eval(b)).powi(2) / dist.powf(2.0 * lambda + 1.0);
            }
        }
        total * h * h
    }

    #[test]
    fn gagliardo_matches_direct_quadrature() {
        let f = SpectralFunction::from_trig(&[0.0, 1.0, 0.2], &[0.0, -0.5, 0.3]);
        let grid = QuadratureGrid::new(96).unwrap();
        for s in [0.5, 1.3] {
            let fast = f.gagliardo_seminorm(s, &grid).unwrap();
            let slow = gagliardo_direct(&f, s, 96);
            assert!((fast - slow).abs() < 1e-10 * slow, "{fast} vs {slow}");
        }
    }

    #[test]
    fn gagliardo_cos_half_within_corridor() {
        let grid = QuadratureGrid::new(512).unwrap();
        let c = SpectralFunction::cos(1);
        let g = c.gagliardo_seminorm(0.5, &grid).unwrap();
        let h = c.homogeneous_sobolev_norm(0.5).powi(2);
        let ratio = g / h;
        assert!(ratio > 1.0 && ratio < 100.0, "ratio {ratio}");
    }
}
