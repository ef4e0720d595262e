//! Fragmentation of near-identity diffeomorphisms along a three-interval cover.
//!
//! For an interval `I = (a, b)` with inner angles `a < ă < â < b̂ < b̆ < b`, the
//! localised factor of `η` is the lift whose derivative is
//!
//! `1 + (η′ − 1)·D_c + α·D_l + β·D_r`,
//!
//! where `D_c` is a smooth plateau (1 on `[â, b̂]`, 0 outside `(ă, b̆)`), and the
//! lateral bumps `D_l ⊂ (a, ă)`, `D_r ⊂ (b̆, b)` have integrals `(ă − a)/2` and
//! `(b − b̆)/2`. The constants `α`, `β` make the factor agree with `η` on
//! `[â, b̂]` and equal the identity outside `I`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{bump, bump_unit_integral, fft, smooth_step, QuadratureGrid, SpectralFunction};

use super::CircleDiffeo;

/// Lower bound imposed on every constructed derivative.
const MIN_DERIVATIVE: f64 = 0.1;
/// Nodes where a factor must be the identity may deviate by at most this much.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Six angles `a < ă < â < b̂ < b̆ < b` of one cover interval (radians,
/// unwrapped so that they increase and `b − a < 2π`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverInterval {
    pub a: f64,
    pub a_breve: f64,
    pub a_hat: f64,
    pub b_hat: f64,
    pub b_breve: f64,
    pub b: f64,
}

impl CoverInterval {
    /// Arc of the given width centred at `centre`, with breve and hat margins
    /// at `breve_frac` and `hat_frac` of the width.
    pub fn symmetric(centre: f64, width: f64, breve_frac: f64, hat_frac: f64) -> Self {
        let a = (centre - width / 2.0).rem_euclid(TAU);
        Self {
            a,
            a_breve: a + breve_frac * width,
            a_hat: a + hat_frac * width,
            b_hat: a + (1.0 - hat_frac) * width,
            b_breve: a + (1.0 - breve_frac) * width,
            b: a + width,
        }
    }

    fn angles(&self) -> [f64; 6] {
        [self.a, self.a_breve, self.a_hat, self.b_hat, self.b_breve, self.b]
    }

    fn validate(&self) -> Result<()> {
        let v = self.angles();
        let ordered = v.windows(2).all(|w| w[0] < w[1]);
        if !ordered || self.b - self.a >= TAU || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("cover interval angles not ordered: {v:?}")));
        }
        Ok(())
    }

    /// Offset of `θ` from `a` in `[0, 2π)`.
    fn offset(&self, theta: f64) -> f64 {
        (theta - self.a).rem_euclid(TAU)
    }

    /// `θ ∈ (a, b)` modulo 2π.
    pub fn contains(&self, theta: f64) -> bool {
        let x = self.offset(theta);
        x > 0.0 && x < self.b - self.a
    }

    /// `θ ∈ (â, b̂)` modulo 2π.
    pub fn hat_contains(&self, theta: f64) -> bool {
        let x = (theta - self.a_hat).rem_euclid(TAU);
        x > 0.0 && x < self.b_hat - self.a_hat
    }

    /// Plateau `D_c`.
    pub fn d_central(&self, theta: f64) -> f64 {
        let x = self.offset(theta) + self.a;
        if x <= self.a_breve || x >= self.b_breve {
            0.0
        } else if x < self.a_hat {
            smooth_step((x - self.a_breve) / (self.a_hat - self.a_breve))
        } else if x <= self.b_hat {
            1.0
        } else {
            smooth_step((self.b_breve - x) / (self.b_breve - self.b_hat))
        }
    }

    /// Left bump `D_l`, normalised to `∫ D_l = (ă − a)/2`.
    pub fn d_left(&self, theta: f64) -> f64 {
        let x = self.offset(theta);
        let len = self.a_breve - self.a;
        bump(2.0 * x / len - 1.0) / bump_unit_integral()
    }

    /// Right bump `D_r`, normalised to `∫ D_r = (b − b̆)/2`.
    pub fn d_right(&self, theta: f64) -> f64 {
        let x = self.offset(theta) + self.a;
        let len = self.b - self.b_breve;
        bump(2.0 * (x - self.b_breve) / len - 1.0) / bump_unit_integral()
    }

    /// Largest `ε` for which `sup|η − ι|, sup|η′ − 1| < ε` guarantees that the
    /// localised factor has derivative at least 0.1.
    pub fn epsilon(&self) -> f64 {
        let d_max = (-1.0f64).exp() / bump_unit_integral();
        let alpha = 2.0 * (1.0 + (self.a_hat - self.a)) / (self.a_breve - self.a);
        let beta = 2.0 * (1.0 + (self.b - self.b_hat)) / (self.b - self.b_breve);
        (1.0 - MIN_DERIVATIVE) / (d_max * alpha.max(beta)).max(1.0)
    }
}

/// Names of the profiles used for `D_c` and `D_l`, `D_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileNames {
    pub central: String,
    pub lateral: String,
}

impl Default for ProfileNames {
    fn default() -> Self {
        Self { central: "exp-step".into(), lateral: "exp-bump".into() }
    }
}

/// Three arcs `I₁, I₂, I₃` whose hatted cores cover the circle, ordered so that
/// `I₂` ends inside `Î₁`, `I₃` starts inside `Î₁` after it, and each `I_{k+1}`
/// ends inside `I_k` (indices mod 3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoverJson", into = "CoverJson")]
pub struct FragmentationCover {
    intervals: [CoverInterval; 3],
    profiles: ProfileNames,
    resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    intervals: [CoverInterval; 3],
    profiles: ProfileNames,
    resolution: usize,
}

impl From<FragmentationCover> for CoverJson {
    fn from(c: FragmentationCover) -> Self {
        Self { intervals: c.intervals, profiles: c.profiles, resolution: c.resolution }
    }
}

impl TryFrom<CoverJson> for FragmentationCover {
    type Error = Error;
    fn try_from(j: CoverJson) -> Result<Self> {
        let mut cover = Self::new(j.intervals, j.resolution)?;
        cover.profiles = j.profiles;
        Ok(cover)
    }
}

impl Default for FragmentationCover {
    fn default() -> Self {
        Self::symmetric(1.2 * PI, 2048).expect("default cover is valid")
    }
}

impl FragmentationCover {
    /// Default cutoff of constructed factors.
    pub const DEFAULT_RESOLUTION: usize = 2048;

    pub fn new(intervals: [CoverInterval; 3], resolution: usize) -> Result<Self> {
        for i in &intervals {
            i.validate()?;
        }
        if resolution == 0 {
            return Err(Error::InvalidArgument("cover resolution must be positive".into()));
        }
        let cover = Self { intervals, profiles: ProfileNames::default(), resolution };
        cover.check_geometry()?;
        Ok(cover)
    }

    /// Arcs of equal width centred at `0, 4π/3, 2π/3` with margins at 1/10 and
    /// 2/10 of the width.
    pub fn symmetric(width: f64, resolution: usize) -> Result<Self> {
        let centres = [0.0, 4.0 * PI / 3.0, 2.0 * PI / 3.0];
        let intervals = centres.map(|c| CoverInterval::symmetric(c, width, 0.1, 0.2));
        Self::new(intervals, resolution)
    }

    fn check_geometry(&self) -> Result<()> {
        let probe = QuadratureGrid::new(7200)?;
        if let Some(t) = probe.nodes().into_iter().find(|&t| !self.intervals.iter().any(|i| i.hat_contains(t))) {
            return Err(Error::InvalidArgument(format!("hatted intervals do not cover θ = {t:.4}")));
        }
        for k in 0..3 {
            let (cur, next) = (&self.intervals[k], &self.intervals[(k + 1) % 3]);
            if !cur.contains(next.b) {
                return Err(Error::InvalidArgument(format!(
                    "interval {} must end inside interval {}",
                    (k + 1) % 3 + 1,
                    k + 1
                )));
            }
        }
        let (i1, i2, i3) = (&self.intervals[0], &self.intervals[1], &self.intervals[2]);
        if !(i1.hat_contains(i2.b) && i1.hat_contains(i3.a) && i1.hat_contains(i2.b_hat)) {
            return Err(Error::InvalidArgument("intervals 2 and 3 must meet inside the core of interval 1".into()));
        }
        // I₂ must end before I₃ starts (going counter-clockwise from â₁).
        if (i2.b - i1.a_hat).rem_euclid(TAU) >= (i3.a - i1.a_hat).rem_euclid(TAU) {
            return Err(Error::InvalidArgument("interval 2 must end before interval 3 starts".into()));
        }
        Ok(())
    }

    pub fn intervals(&self) -> &[CoverInterval; 3] {
        &self.intervals
    }

    pub fn profiles(&self) -> &ProfileNames {
        &self.profiles
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Interval used by the local two-factor splitting on `I_k ∪ I_{k+1}`:
    /// left end at `a_k`, breve and hat angles at thirds of `(a_k, b_{k+1})`,
    /// right angles those of `I_k`.
    fn local_interval(&self, k: usize) -> CoverInterval {
        let cur = self.intervals[k];
        let next = self.intervals[(k + 1) % 3];
        let overlap = (next.b - cur.a).rem_euclid(TAU);
        CoverInterval { a_breve: cur.a + overlap / 3.0, a_hat: cur.a + 2.0 * overlap / 3.0, ..cur }
    }

    /// Neighbourhood radius `ε` validated for every interval used.
    pub fn epsilon(&self) -> f64 {
        (0..3)
            .flat_map(|k| [self.intervals[k].epsilon(), self.local_interval(k).epsilon()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Profiles `(D_c, D_l, D_r)` of interval `k` (0-based) as band-limited
    /// functions at the cover resolution.
    pub fn profile_functions(&self, k: usize) -> Result<[SpectralFunction; 3]> {
        let i = self.intervals.get(k).ok_or_else(|| Error::InvalidArgument(format!("interval index {k}")))?;
        let m = 2 * self.resolution + 1;
        let grid = QuadratureGrid::new(m)?;
        let nodes = grid.nodes();
        let sample =
            |f: &dyn Fn(f64) -> f64| SpectralFunction::from_samples(&nodes.iter().map(|&t| f(t)).collect::<Vec<_>>());
        Ok([sample(&|t| i.d_central(t))?, sample(&|t| i.d_left(t))?, sample(&|t| i.d_right(t))?])
    }

    /// Largest `|p(θ_j)|` over nodes of a `2·resolution + 1` grid outside `interval`.
    pub fn deviation_outside(&self, gamma: &CircleDiffeo, interval: &CoverInterval) -> f64 {
        let grid = QuadratureGrid::new(2 * self.resolution + 1).expect("nonempty");
        let p = gamma.periodic_part().to_samples(&grid);
        grid.nodes().iter().zip(&p).filter(|(t, _)| !interval.contains(**t)).fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }

    fn check_neighbourhood(&self, gamma: &CircleDiffeo) -> Result<()> {
        let epsilon = self.epsilon();
        let grid = QuadratureGrid::new((8 * gamma.cutoff() + 1).max(1024))?;
        let p = gamma.periodic_part();
        let dev = p.to_samples(&grid).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if dev >= epsilon {
            return Err(Error::Neighbourhood { what: "sup|γ − ι|", value: dev, epsilon });
        }
        let slope = p.derivative().to_samples(&grid).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if slope >= epsilon {
            return Err(Error::Neighbourhood { what: "sup|γ′ − 1|", value: slope, epsilon });
        }
        Ok(())
    }

    /// Localised factor of `eta` on `interval` (see the module docs).
    fn localise(&self, eta: &CircleDiffeo, interval: &CoverInterval, label: usize) -> Result<CircleDiffeo> {
        let k = self.resolution;
        let m = 2 * k + 1;
        let grid = QuadratureGrid::new(m)?;
        let nodes = grid.nodes();
        let q = eta.periodic_part();
        let dq = q.derivative().to_samples(&grid);
        let central: Vec<f64> = nodes.iter().map(|&t| interval.d_central(t)).collect();
        let left: Vec<f64> = nodes.iter().map(|&t| interval.d_left(t)).collect();
        let right: Vec<f64> = nodes.iter().map(|&t| interval.d_right(t)).collect();
        let w: Vec<f64> = dq.iter().zip(&central).map(|(d, c)| d * c).collect();
        let w_hat = fft::forward_real(&w);

        // W(θ) = ∫_a^θ w, exact for the trigonometric interpolant of w.
        let a = interval.a;
        let integral_to = |theta: f64| -> f64 {
            let mut acc = w_hat[0].re * (theta - a);
            for (n, wn) in w_hat.iter().enumerate().take(k + 1).skip(1) {
                let term = wn * (Complex64::cis(n as f64 * theta) - Complex64::cis(n as f64 * a))
                    / Complex64::new(0.0, n as f64);
                acc += 2.0 * term.re;
            }
            acc
        };
        let h = grid.spacing();
        let left_mass: f64 = left.iter().sum::<f64>() * h;
        let right_mass: f64 = right.iter().sum::<f64>() * h;
        let alpha = (q.eval(interval.a_hat) - integral_to(interval.a_hat)) / left_mass;
        let beta = -(TAU * w_hat[0].re + alpha * left_mass) / right_mass;

        let v: Vec<f64> = (0..m).map(|j| w[j] + alpha * left[j] + beta * right[j]).collect();
        let min_derivative = v.iter().fold(f64::INFINITY, |acc, x| acc.min(1.0 + x));
        if min_derivative < MIN_DERIVATIVE {
            return Err(Error::CoverTooTight { interval: label, min_derivative });
        }
        let v_hat = fft::forward_real(&v);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        let mut at_a = Complex64::new(0.0, 0.0);
        for n in 1..=k {
            let c = v_hat[n] / Complex64::new(0.0, n as f64);
            coeffs[n] = c;
            at_a += c * Complex64::cis(n as f64 * a);
        }
        // Fix the constant so that the factor fixes a.
        coeffs[0] = Complex64::new(-2.0 * at_a.re, 0.0);
        let p = SpectralFunction::new(coeffs);
        let scale = p.coeffs().iter().fold(1.0f64, |acc, c| acc.max(c.norm()));
        Ok(CircleDiffeo::new_unchecked(p.trimmed(super::CHOP_TOL * scale)))
    }

    fn ensure_support(&self, gamma: &CircleDiffeo, interval: usize) -> Result<()> {
        let deviation = self.deviation_outside(gamma, &self.intervals[interval]);
        if deviation > SUPPORT_TOL {
            return Err(Error::Support { interval: interval + 1, deviation });
        }
        Ok(())
    }

    /// Splits `γ ∈ 𝒱_ε` as `γ = γ₁ ∘ γ₂ ∘ γ₃` with `supp γ_k ⊂ I_k`.
    pub fn fragment(&self, gamma: &CircleDiffeo) -> Result<(CircleDiffeo, CircleDiffeo, CircleDiffeo)> {
        self.check_neighbourhood(gamma)?;
        let k = self.resolution;
        let g1 = self.localise(gamma, &self.intervals[0], 1)?;
        let eta = g1.invert_at(k)?.compose_at(gamma, k);
        let g2 = self.localise(&eta, &self.intervals[1], 2)?;
        let g3 = g2.invert_at(k)?.compose_at(&eta, k);
        self.ensure_support(&g3, 2)?;
        Ok((g1, g2, g3))
    }

    /// For `γ` supported in `(a_{k+1}, b̂_k)` (inside `I_k ∪ I_{k+1}`), splits
    /// `γ = χ_k ∘ χ_{k+1}` with `supp χ_k ⊂ I_k`, `supp χ_{k+1} ⊂ I_{k+1}`.
    /// `k` is 1-based; `k + 1` wraps to 1.
    pub fn fragment_local(&self, gamma: &CircleDiffeo, k: usize) -> Result<(CircleDiffeo, CircleDiffeo)> {
        if !(1..=3).contains(&k) {
            return Err(Error::InvalidArgument(format!("interval index {k} not in 1..=3")));
        }
        let cur = k - 1;
        let next = k % 3;
        let allowed = CoverInterval {
            a: self.intervals[next].a,
            a_breve: self.intervals[next].a,
            a_hat: self.intervals[next].a,
            b_hat: self.intervals[cur].b_hat,
            b_breve: self.intervals[cur].b_hat,
            b: self.intervals[cur].b_hat,
        };
        let deviation = self.deviation_outside(gamma, &allowed);
        if deviation > SUPPORT_TOL {
            return Err(Error::Support { interval: k, deviation });
        }
        self.check_neighbourhood(gamma)?;
        let chi_k = self.localise(gamma, &self.local_interval(cur), k)?;
        let chi_next = chi_k.invert_at(self.resolution)?.compose_at(gamma, self.resolution);
        self.ensure_support(&chi_next, next)?;
        Ok((chi_k, chi_next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cover_is_consistent() {
        let cover = FragmentationCover::default();
        let eps = cover.epsilon();
        assert!(eps > 0.05 && eps < 0.2, "ε = {eps}");
    }

    #[test]
    fn narrow_cover_rejected() {
        // Arcs of width 5π/6 leave gaps between the hatted cores.
        assert!(FragmentationCover::symmetric(5.0 * PI / 6.0, 64).is_err());
    }

    #[test]
    fn profile_shapes() {
        let i = FragmentationCover::default().intervals()[0];
        assert_eq!(i.d_central(i.a + 0.5 * (i.a_hat + i.b_hat) - i.a), 1.0);
        assert_eq!(i.d_central(i.a + 0.01), 0.0);
        assert_eq!(i.d_left(i.a_breve + 0.01), 0.0);
        assert!(i.d_left(0.5 * (i.a + i.a_breve)) > 0.0);
        let grid = QuadratureGrid::new(20001).unwrap();
        let left: Vec<f64> = grid.nodes().iter().map(|&t| i.d_left(t)).collect();
        let right: Vec<f64> = grid.nodes().iter().map(|&t| i.d_right(t)).collect();
        assert!((grid.integrate(&left) - (i.a_breve - i.a) / 2.0).abs() < 1e-10);
        assert!((grid.integrate(&right) - (i.b - i.b_breve) / 2.0).abs() < 1e-10);
        assert!(left.iter().chain(&right).all(|&v| v <= 1.0));
    }

    #[test]
    fn identity_fragments_to_identities() {
        let cover = FragmentationCover::symmetric(1.2 * PI, 256).unwrap();
        let (a, b, c) = cover.fragment(&CircleDiffeo::identity()).unwrap();
        for g in [a, b, c] {
            assert_eq!(g, CircleDiffeo::identity());
        }
    }

    #[test]
    fn json_round_trip() {
        let cover = FragmentationCover::default();
        let s = serde_json::to_string(&cover).unwrap();
        let back: FragmentationCover = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cover);
    }

    #[test]
    fn neighbourhood_violation() {
        let cover = FragmentationCover::symmetric(1.2 * PI, 256).unwrap();
        let g = CircleDiffeo::new(SpectralFunction::sin(1).scale(0.5)).unwrap();
        assert!(matches!(cover.fragment(&g), Err(Error::Neighbourhood { .. })));
    }
}
