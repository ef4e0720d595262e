//! `Lₙ`, `T(f)`, `T^γ(f)` and the identity checks on their exactness windows.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffeo::{beta, virasoro_cocycle, CentralCharge, CircleDiffeo};
use crate::error::{Error, Result};
use crate::spectral::SpectralFunction;

use super::{ModuleTruncation, OperatorMatrix};

/// Highest mode with a nonzero coefficient.
pub(crate) fn degree(f: &SpectralFunction) -> usize {
    f.coeffs().iter().rposition(|c| c.norm() != 0.0).unwrap_or(0)
}

impl ModuleTruncation {
    fn add_mode(&self, out: &mut DMatrix<Complex64>, n: i64, coeff: Complex64) {
        if coeff.norm() == 0.0 {
            return;
        }
        let cap = self.level_cap();
        let off = self.level_offsets();
        let m = n.unsigned_abs() as usize;
        if n == 0 {
            let h = self.weight().h;
            for k in 0..=cap {
                for i in off[k]..off[k + 1] {
                    out[(i, i)] += coeff * (h + k as f64);
                }
            }
        } else if n < 0 {
            for k in 0..=cap.saturating_sub(m) {
                if k + m > cap {
                    break;
                }
                let block = self.creation_block(m, k);
                add_block(out, block, off[k + m], off[k], coeff);
            }
        } else {
            for k in m..=cap {
                let block = self.annihilation_block(m, k);
                add_block(out, &block, off[k - m], off[k], coeff);
            }
        }
    }

    /// Matrix of `Lₙ`, `|n| ≤ N`. Blocks that would leave levels `0..=N` are
    /// dropped (compression to the truncation).
    pub fn l_matrix(&self, n: i64) -> Result<OperatorMatrix> {
        if n.unsigned_abs() as usize > self.level_cap() {
            return Err(Error::ModeOutOfRange { mode: n, level_cap: self.level_cap() });
        }
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        self.add_mode(&mut out, n, Complex64::new(1.0, 0.0));
        Ok(OperatorMatrix::new(out, self.levels()))
    }

    /// Compression `P_N T(f) P_N` with `T(f) = Σₙ f̂ₙ Lₙ`.
    pub fn t_matrix(&self, f: &SpectralFunction) -> Result<OperatorMatrix> {
        let k = degree(f);
        if k > self.level_cap() {
            return Err(Error::CutoffOverflow { cutoff: k, level_cap: self.level_cap() });
        }
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for n in -(k as i64)..=k as i64 {
            self.add_mode(&mut out, n, f.coeff(n));
        }
        Ok(OperatorMatrix::new(out, self.levels()))
    }

    /// `T^γ(f) = T(γ⋆f) − β(γ, f)`, with `γ⋆f` truncated to modes `≤ N` (which
    /// is exactly what the compression sees).
    pub fn t_gamma_matrix(&self, gamma: &CircleDiffeo, f: &SpectralFunction) -> Result<OperatorMatrix> {
        let pushed = gamma.pushforward(f)?.truncate(self.level_cap());
        let b = beta(CentralCharge(self.weight().c), gamma, f);
        let mut t = self.t_matrix(&pushed)?.into_entries();
        for i in 0..t.nrows() {
            t[(i, i)] -= Complex64::new(b, 0.0);
        }
        Ok(OperatorMatrix::new(t, self.levels()))
    }

    /// Frobenius norm of `i[T(g), T(f)] − T(g′f − f′g) − c·ω(g, f)` on levels
    /// `≤ N − deg f − deg g`, with `ω` the bracket cocycle. Returns the value
    /// and the window.
    pub fn commutator_defect(&self, f: &SpectralFunction, g: &SpectralFunction) -> Result<(f64, usize)> {
        self.commutator_defect_with(f, g, virasoro_cocycle)
    }

    /// [`commutator_defect`](Self::commutator_defect) with the central term
    /// built from an arbitrary cocycle. Any other choice leaves a scalar
    /// residual `c·(ω_bracket − ω)(g, f)` on the window.
    pub fn commutator_defect_with(
        &self,
        f: &SpectralFunction,
        g: &SpectralFunction,
        cocycle: impl Fn(&SpectralFunction, &SpectralFunction) -> f64,
    ) -> Result<(f64, usize)> {
        let needed = degree(f) + degree(g);
        if needed > self.level_cap() {
            return Err(Error::EmptyWindow { level_cap: self.level_cap(), needed });
        }
        let window = self.level_cap() - needed;
        let tf = self.t_matrix(f)?.into_entries();
        let tg = self.t_matrix(g)?.into_entries();
        let bracket_field = &g.derivative().multiply(f) - &f.derivative().multiply(g);
        let tb = self.t_matrix(&bracket_field)?.into_entries();
        let central = self.weight().c * cocycle(g, f);
        // Only the window block of the products is needed.
        let w = self.level_offsets()[window + 1];
        let i = Complex64::new(0.0, 1.0);
        let gf = tg.rows(0, w) * tf.columns(0, w);
        let fg = tf.rows(0, w) * tg.columns(0, w);
        let mut a = (gf - fg) * i - tb.view((0, 0), (w, w));
        for k in 0..w {
            a[(k, k)] -= Complex64::new(central, 0.0);
        }
        Ok((a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), window))
    }

    /// `σ_max(T(f)(1 + L₀)⁻¹) / ‖f‖_{3/2}`: the best energy-bound constant at
    /// this truncation.
    pub fn energy_bound_ratio(&self, f: &SpectralFunction) -> Result<f64> {
        if f.is_zero() {
            return Err(Error::ZeroField);
        }
        let h = self.weight().h;
        let levels = self.levels();
        let mut x = self.t_matrix(f)?.into_entries();
        for (j, level) in levels.iter().enumerate() {
            let scale = 1.0 / (1.0 + h + *level as f64);
            x.column_mut(j).scale_mut(scale);
        }
        let sigma = x.singular_values().iter().fold(0.0f64, |a, v| a.max(*v));
        Ok(sigma / f.s32_norm())
    }

    /// `e^{isT(f)}` by eigendecomposition of the Hermitian matrix `T(f)`.
    pub fn exp_t(&self, f: &SpectralFunction, s: f64) -> Result<OperatorMatrix> {
        let t = self.t_matrix(f)?;
        let residual = t.hermiticity_residual();
        if residual > 1e-10 * t.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(OperatorMatrix::new(hermitian_exp(t.entries(), s), self.levels()))
    }

    /// `‖(e^{iT(g)} T(f) e^{−iT(g)} − T(Exp(g)⋆f) + β(Exp(g), f)) ξ‖` for a
    /// seeded random unit vector `ξ` supported on levels `≤ probe_level`.
    pub fn covariance_defect(
        &self,
        g: &SpectralFunction,
        f: &SpectralFunction,
        probe_level: usize,
        seed: u64,
    ) -> Result<f64> {
        let spread = degree(f) + degree(g);
        if probe_level + spread > self.level_cap() {
            return Err(Error::ProbeTooHigh { probe_level, degree: spread, level_cap: self.level_cap() });
        }
        if g.is_zero() {
            return Ok(0.0);
        }
        let xi = self.probe(probe_level, seed);
        let tg = self.t_matrix(g)?;
        let residual = tg.hermiticity_residual();
        if residual > 1e-10 * tg.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        let tg = tg.into_entries();
        let tf = self.t_matrix(f)?.into_entries();
        let inner = exp_apply(&tg, -1.0, &xi);
        let lhs = exp_apply(&tg, 1.0, &(tf * inner));
        let flow = CircleDiffeo::exp_flow(g, 1.0)?;
        let rhs = self.t_gamma_matrix(&flow, f)?.into_entries() * &xi;
        Ok((lhs - rhs).norm())
    }

    /// Seeded random unit vector on levels `≤ probe_level`. The basis at low
    /// levels does not depend on `N`, so the same seed gives the same vector in
    /// every truncation.
    pub fn probe(&self, probe_level: usize, seed: u64) -> DVector<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let support = self.level_offsets()[probe_level.min(self.level_cap()) + 1];
        let mut v = DVector::zeros(self.dim());
        for i in 0..support {
            v[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
        }
        v
    }
}

fn add_block(out: &mut DMatrix<Complex64>, block: &DMatrix<f64>, row: usize, col: usize, coeff: Complex64) {
    for j in 0..block.ncols() {
        for i in 0..block.nrows() {
            out[(row + i, col + j)] += coeff * block[(i, j)];
        }
    }
}

/// `e^{isT} v` by a sub-stepped Taylor series. Unlike the eigendecomposition
/// route, the rounding error is relative to `‖v‖` rather than to the largest
/// eigenvalue of `T`, which matters once a defect sits near machine precision.
pub fn exp_apply(t: &DMatrix<Complex64>, s: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
    let bound = t.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = (bound * s.abs()).ceil().max(1.0) as usize;
    let h = Complex64::new(0.0, s / steps as f64);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..=60 {
            term = (t * term) * (h / k as f64);
            acc += &term;
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}

pub(crate) fn hermitian_exp(t: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
    let eig = t.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::cis(s * l)));
    v * phases * v.adjoint()
}

/// Best phase `z* = tr(V†U)/|tr(V†U)|` aligning `V` to `U`, and the aligned
/// Frobenius distance `‖U − z*V‖`.
pub fn phase_align(u: &OperatorMatrix, v: &OperatorMatrix) -> Result<(Complex64, f64)> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let trace: Complex64 = u.entries().iter().zip(v.entries().iter()).map(|(a, b)| b.conj() * a).sum();
    if trace.norm() == 0.0 {
        return Err(Error::AlignmentUndefined { distance: (2.0 * u.dim() as f64).sqrt() });
    }
    let z = trace / trace.norm();
    let distance = (u.entries() - v.entries() * z).iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
    Ok((z, distance))
}
