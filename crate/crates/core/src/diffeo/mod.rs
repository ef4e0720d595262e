//! Orientation-preserving circle diffeomorphisms represented by their lifts
//! `γ(θ) = θ + p(θ)` with a band-limited periodic part `p`.
//!
//! Group operations work by sampling at the nodes of an odd grid, evaluating
//! the lifts pointwise, and re-interpolating. The output cutoff is the larger
//! of the input cutoffs and [`WORKING_CUTOFF`], capped at [`MAX_CUTOFF`].

mod fragment;
mod schwarzian;

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{QuadratureGrid, SpectralFunction};

pub use fragment::{CoverInterval, FragmentationCover, ProfileNames, SUPPORT_TOL};
pub use schwarzian::beta;

/// Minimum output cutoff of sample-and-recompose operations.
pub const WORKING_CUTOFF: usize = 256;
/// Hard cap on the output cutoff of sample-and-recompose operations.
pub const MAX_CUTOFF: usize = 8192;
/// Spectral tail above which [`CircleDiffeo::invert`] refines its cutoff.
pub const INVERSE_TAIL_TOL: f64 = 1e-13;

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-13;
const FLOW_MAX_STEPS: u64 = 1_000_000;

/// Central charge `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralCharge(pub f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleDiffeo {
    periodic_part: SpectralFunction,
}

fn default_cutoff(a: usize, b: usize) -> usize {
    a.max(b).clamp(WORKING_CUTOFF, MAX_CUTOFF)
}

/// Relative level below which trailing modes of a resampled function are
/// treated as sampling noise.
pub const CHOP_TOL: f64 = 1e-14;

/// Drops the trailing noise plateau left by sampling and re-transforming. The
/// plateau sits near `ε·√M` relative to the largest mode; left in place it is
/// amplified by any mode-weighted operator such as `T(f)` or `‖·‖_{3/2}`.
fn tidy(f: SpectralFunction) -> SpectralFunction {
    let scale = f.coeffs().iter().fold(1.0f64, |acc, c| acc.max(c.norm()));
    f.trimmed(CHOP_TOL * scale)
}

fn map_nodes(m: usize, work: usize, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let grid_node = |j: usize| TAU * j as f64 / m as f64;
    // Parallelism only pays off once the per-node work is non-trivial.
    if m * work > 1 << 16 {
        (0..m).into_par_iter().map(|j| f(grid_node(j))).collect()
    } else {
        (0..m).map(|j| f(grid_node(j))).collect()
    }
}

impl CircleDiffeo {
    /// Validates `1 + p′ > 0` on a grid of `max(256, 4K+1)` nodes.
    pub fn new(p: SpectralFunction) -> Result<Self> {
        let d = Self { periodic_part: p };
        let min_derivative = d.min_derivative();
        if min_derivative.is_nan() || min_derivative <= 0.0 {
            return Err(Error::Orientation { min_derivative });
        }
        Ok(d)
    }

    pub(crate) fn new_unchecked(p: SpectralFunction) -> Self {
        Self { periodic_part: p }
    }

    pub fn identity() -> Self {
        Self::new_unchecked(SpectralFunction::zero())
    }

    pub fn rotation(alpha: f64) -> Self {
        Self::new_unchecked(SpectralFunction::constant(alpha))
    }

    pub fn periodic_part(&self) -> &SpectralFunction {
        &self.periodic_part
    }

    pub fn cutoff(&self) -> usize {
        self.periodic_part.cutoff()
    }

    /// Lift value `θ + p(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        theta + self.periodic_part.eval(theta)
    }

    /// `(γ(θ), γ′(θ))`.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        let (p, dp) = self.periodic_part.eval_with_derivative(theta);
        (theta + p, 1.0 + dp)
    }

    /// `min γ′` over the validation grid.
    pub fn min_derivative(&self) -> f64 {
        let grid = QuadratureGrid::for_cutoff(self.cutoff());
        self.periodic_part.derivative().to_samples(&grid).iter().fold(f64::INFINITY, |acc, v| acc.min(1.0 + v))
    }

    /// `sup |γ − γ̃|` over a dense grid.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        (&self.periodic_part - &other.periodic_part).sup_norm()
    }

    /// `sup |γ − ι|`, i.e. `sup |p|`.
    pub fn sup_deviation(&self) -> f64 {
        self.periodic_part.sup_norm()
    }

    /// Modulus mass of the upper half of the spectrum, a resolution diagnostic.
    pub fn tail_mass(&self) -> f64 {
        let k = self.cutoff();
        self.periodic_part.coeffs()[k / 2 + 1..].iter().map(|c| 2.0 * c.norm()).sum()
    }

    /// `γ₁ ∘ γ₂` with `self = γ₁`, at the default output cutoff.
    pub fn compose(&self, other: &Self) -> Self {
        self.compose_at(other, default_cutoff(self.cutoff(), other.cutoff()))
    }

    /// `γ₁ ∘ γ₂` re-interpolated at cutoff `k`.
    pub fn compose_at(&self, other: &Self, k: usize) -> Self {
        let m = 2 * k + 1;
        let inner = other.periodic_part.samples(m);
        let outer = &self.periodic_part;
        let values: Vec<f64> = if m * outer.cutoff() > 1 << 16 {
            inner.par_iter().enumerate().map(|(j, q)| q + outer.eval(TAU * j as f64 / m as f64 + q)).collect()
        } else {
            inner.iter().enumerate().map(|(j, q)| q + outer.eval(TAU * j as f64 / m as f64 + q)).collect()
        };
        let p = SpectralFunction::from_samples(&values).expect("grid is nonempty");
        Self::new_unchecked(tidy(p))
    }

    /// Solves `γ(x) = θ` by Newton iteration from `θ − p(θ)`, falling back to
    /// bisection on the bracket `[θ − P, θ + P]`, `P ≥ sup|p|`.
    pub fn inverse_at(&self, theta: f64) -> Result<f64> {
        let p = &self.periodic_part;
        let mut x = theta - p.eval(theta);
        for _ in 0..NEWTON_MAX_ITER {
            let (v, d) = p.eval_with_derivative(x);
            let r = x + v - theta;
            if r.abs() <= NEWTON_TOL {
                return Ok(x);
            }
            x -= r / (1.0 + d);
            if !x.is_finite() {
                break;
            }
        }
        self.bisect(theta)
    }

    fn bisect(&self, theta: f64) -> Result<f64> {
        let p = &self.periodic_part;
        let bound: f64 =
            p.coeffs().iter().enumerate().map(|(n, c)| if n == 0 { c.norm() } else { 2.0 * c.norm() }).sum();
        let (mut lo, mut hi) = (theta - bound - 1e-12, theta + bound + 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + p.eval(mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * theta.abs().max(1.0) {
                break;
            }
        }
        let x = 0.5 * (lo + hi);
        let residual = (x + p.eval(x) - theta).abs();
        if residual > 1e-11 {
            return Err(Error::NewtonDiverged { theta, residual });
        }
        Ok(x)
    }

    /// `γ⁻¹` at the default output cutoff.
    ///
    /// The inverse of a band-limited map is not band-limited, so the cutoff
    /// starts at the default and doubles until the upper half of the spectrum
    /// carries less than [`INVERSE_TAIL_TOL`] (or [`MAX_CUTOFF`] is reached).
    pub fn invert(&self) -> Result<Self> {
        let mut k = default_cutoff(self.cutoff(), 0);
        loop {
            let p = self.inverse_samples(k)?;
            let tail: f64 = p.coeffs()[k / 2 + 1..].iter().map(|c| 2.0 * c.norm()).sum();
            if tail < INVERSE_TAIL_TOL || k >= MAX_CUTOFF {
                return Ok(Self::new_unchecked(tidy(p)));
            }
            k = (2 * k).min(MAX_CUTOFF);
        }
    }

    fn inverse_samples(&self, k: usize) -> Result<SpectralFunction> {
        let m = 2 * k + 1;
        let values = map_nodes(m, self.cutoff(), |theta| Ok(self.inverse_at(theta)? - theta))?;
        SpectralFunction::from_samples(&values)
    }

    pub fn invert_at(&self, k: usize) -> Result<Self> {
        Ok(Self::new_unchecked(tidy(self.inverse_samples(k)?)))
    }

    /// `(γ⋆f)(θ) = γ′(γ⁻¹θ) · f(γ⁻¹θ)`.
    pub fn pushforward(&self, f: &SpectralFunction) -> Result<SpectralFunction> {
        if f.is_zero() {
            return Ok(SpectralFunction::zero());
        }
        let k = default_cutoff(self.cutoff(), f.cutoff());
        let m = 2 * k + 1;
        let values = map_nodes(m, self.cutoff() + f.cutoff(), |theta| {
            let x = self.inverse_at(theta)?;
            let (_, d) = self.eval_with_derivative(x);
            Ok(d * f.eval(x))
        })?;
        Ok(tidy(SpectralFunction::from_samples(&values)?))
    }

    /// Time-`t` flow of the vector field `f`: `dθ/dτ = f(θ)`, integrated from
    /// every node with `⌈64(1 + |t|‖f‖_∞)⌉` classical Runge–Kutta steps.
    pub fn exp_flow(f: &SpectralFunction, t: f64) -> Result<Self> {
        let sup = f.sup_norm();
        let steps_f = (64.0 * (1.0 + t.abs() * sup)).ceil();
        if !steps_f.is_finite() || steps_f > FLOW_MAX_STEPS as f64 {
            return Err(Error::StepUnderflow { steps: steps_f.min(u64::MAX as f64) as u64 });
        }
        let steps = steps_f as usize;
        let h = t / steps as f64;
        let k = default_cutoff(f.cutoff(), 0);
        let m = 2 * k + 1;
        let values = map_nodes(m, steps * f.cutoff(), |theta| {
            let mut x = theta;
            for _ in 0..steps {
                let k1 = f.eval(x);
                let k2 = f.eval(x + 0.5 * h * k1);
                let k3 = f.eval(x + 0.5 * h * k2);
                let k4 = f.eval(x + h * k3);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            Ok(x - theta)
        })?;
        Ok(Self::new_unchecked(tidy(SpectralFunction::from_samples(&values)?)))
    }

    /// Mollified diffeomorphism: `ψ = γ′ − 1` is convolved with the unit bump of
    /// half-width `width` and re-integrated with the mean of `p` kept. Since the
    /// mean of `ψ` vanishes this is the same as mollifying `p`.
    pub fn mollify(&self, width: f64) -> Result<Self> {
        let p = self.periodic_part.mollify(width, self.cutoff())?;
        match Self::new(p) {
            Err(Error::Orientation { .. }) => Err(Error::WidthTooLarge { width }),
            other => other,
        }
    }
}

/// Gelfand–Fuchs cocycle `ω(f, g) = (1/48π) ∫ (f g‴ − f‴ g) dθ`, evaluated in
/// coefficient space as `−(1/6) Σ_{n≥1} n³ Im(f̂ₙ conj(ĝₙ))`.
pub fn gelfand_fuchs(f: &SpectralFunction, g: &SpectralFunction) -> f64 {
    mode_pairing(f, g, |n| n * n * n)
}

/// Cocycle matching the bracket `[Lₙ, Lₘ] = (n−m)L_{n+m} + δ_{n+m,0}(n³−n)/12`:
/// `(1/48π) ∫ (f(g‴ + g′) − (f‴ + f′)g) dθ = −(1/6) Σ_{n≥1} (n³ − n) Im(f̂ₙ conj(ĝₙ))`.
///
/// It differs from [`gelfand_fuchs`] by the coboundary `(1/48π)∫(fg′ − f′g)`,
/// and is the one for which `i[T(g), T(f)] = T(g′f − f′g) + c·ω(g, f)` and
/// `d/dt β(Exp(tf), g)|₀ = −c·ω(f, g)` hold.
pub fn virasoro_cocycle(f: &SpectralFunction, g: &SpectralFunction) -> f64 {
    mode_pairing(f, g, |n| n * n * n - n)
}

/// `(1/48π) ∫ (f g′ − f′ g) dθ`, the difference `gelfand_fuchs − virasoro_cocycle`.
pub fn cocycle_coboundary(f: &SpectralFunction, g: &SpectralFunction) -> f64 {
    mode_pairing(f, g, |n| n)
}

fn mode_pairing(f: &SpectralFunction, g: &SpectralFunction, weight: impl Fn(i64) -> i64) -> f64 {
    let k = f.cutoff().min(g.cutoff()) as i64;
    let s: f64 = (1..=k).map(|n| weight(n) as f64 * (f.coeff(n) * g.coeff(n).conj()).im).sum();
    -s / 6.0
}

/// `|(β(Exp(hf), g) − β(Exp(−hf), g))/(2h) + c·ω(f, g)|` with `ω` the
/// bracket-consistent [`virasoro_cocycle`].
pub fn beta_derivative_check(c: CentralCharge, f: &SpectralFunction, g: &SpectralFunction, step: f64) -> Result<f64> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let plus = beta(c, &CircleDiffeo::exp_flow(f, step)?, g);
    let minus = beta(c, &CircleDiffeo::exp_flow(f, -step)?, g);
    let derivative = (plus - minus) / (2.0 * step);
    Ok((derivative + c.0 * virasoro_cocycle(f, g)).abs())
}
