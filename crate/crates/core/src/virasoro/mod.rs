//! Truncated lowest-weight Virasoro modules and the operators acting on them.
//!
//! A [`ModuleTruncation`] holds, for every level `k ≤ N`, a basis of the
//! quotient of the Verma module by the radical of its form, normalised so that
//! `⟨e_i, e_j⟩ = σ_i δ_ij` with signs `σ_i = ±1`. In the unitary region every
//! sign is `+1` and the basis is orthonormal.

mod direct_sum;
mod module;
mod operators;
mod pbw;
mod series;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use direct_sum::{direct_sum, rotation_2pi_scalar_defect, rotation_2pi_scalar_defect_unchecked};
pub use module::{ModuleTruncation, NULL_TOL};
pub use operators::{exp_apply, phase_align};
pub use pbw::pbw_gram;
pub use series::{discrete_series_c, discrete_series_h, discrete_series_pairs, SeriesConvention};

/// Central charge and lowest weight `(c, h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowestWeight {
    pub c: f64,
    pub h: f64,
}

impl LowestWeight {
    pub fn new(c: f64, h: f64) -> Self {
        Self { c, h }
    }
}

/// Dense complex matrix in a level-graded basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    /// Level of every basis vector.
    levels: Vec<usize>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, levels: Vec<usize>) -> Self {
        debug_assert_eq!(entries.nrows(), levels.len());
        Self { entries, levels }
    }

    pub fn zeros(levels: Vec<usize>) -> Self {
        let d = levels.len();
        Self { entries: DMatrix::zeros(d, d), levels }
    }

    pub fn identity(levels: Vec<usize>) -> Self {
        let d = levels.len();
        Self { entries: DMatrix::identity(d, d), levels }
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Starting index of each level block, followed by the dimension.
    pub fn level_offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for i in 1..self.levels.len() {
            if self.levels[i] != self.levels[i - 1] {
                out.push(i);
            }
        }
        out.push(self.levels.len());
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A†A − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        (self.entries.adjoint() * &self.entries - DMatrix::<Complex64>::identity(d, d))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Restriction to rows and columns of levels `≤ window`.
    pub fn window(&self, window: usize) -> DMatrix<Complex64> {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| self.levels[i] <= window).collect();
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])])
    }

    /// Sparse JSON dump `{"dim", "levels", "entries": [[i, j, re, im], …]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut triplets = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.entries[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    triplets.push(serde_json::json!([i, j, z.re, z.im]));
                }
            }
        }
        serde_json::json!({ "dim": self.dim(), "levels": self.levels, "entries": triplets })
    }
}
