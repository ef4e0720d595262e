//! Level-by-level construction of a truncated lowest-weight module.
//!
//! Level `k` is spanned by `L₋₁ V_{k−1}` and `L₋₂ V_{k−2}`. The Gram matrix of
//! this spanning set only needs the action of `L₁` and `L₂` on lower levels:
//!
//! * `⟨L₋₁u, L₋₁v⟩ = ⟨L₁u, L₁v⟩ + 2(h + k − 1)⟨u, v⟩`
//! * `⟨L₋₁u, L₋₂v⟩ = ⟨L₂u, L₁v⟩ + 3⟨L₁u, v⟩`
//! * `⟨L₋₂u, L₋₂v⟩ = ⟨L₂u, L₂v⟩ + (4(h + k − 2) + c/2)⟨u, v⟩`
//!
//! Diagonalising it gives a basis of the quotient by the radical with
//! `⟨e_i, e_j⟩ = σ_i δ_ij`, and the coordinates of the spanning vectors in
//! that basis are the matrices of `L₋₁` and `L₋₂`. Higher modes follow from
//! `L₋₍ₘ₊₁₎ = [L₋₁, L₋ₘ]/(m − 1)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::partition::{partitions, Partition};

use super::LowestWeight;

/// Relative eigenvalue cutoff separating null directions from the quotient.
pub const NULL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ModuleTruncation {
    weight: LowestWeight,
    level_cap: usize,
    unitary_mode: bool,
    /// Signs `σ` of the basis at each level.
    signature: Vec<Vec<f64>>,
    /// `create[n][k]`: matrix of `L₋ₙ` from level `k` to level `k + n` (index 0 unused).
    create: Vec<Vec<DMatrix<f64>>>,
    /// PBW monomials at each level, in the order of [`partitions`].
    basis: Vec<Vec<Partition>>,
    /// Coordinates of the PBW monomials (columns) in the quotient basis.
    pbw_coordinates: Vec<DMatrix<f64>>,
    /// PBW Gram matrices from direct normal ordering.
    gram: Vec<DMatrix<f64>>,
    offsets: Vec<usize>,
}

fn sym_block(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl ModuleTruncation {
    /// Builds levels `0..=n`. With `unitary_mode` a negative direction of the
    /// form is an error; otherwise it is kept with sign `−1`.
    pub fn build(weight: LowestWeight, n: usize, unitary_mode: bool) -> Result<Self> {
        let (c, h) = (weight.c, weight.h);
        let mut signature: Vec<Vec<f64>> = vec![vec![1.0]];
        // create[1][k] and create[2][k], filled as levels are built.
        let mut create: Vec<Vec<DMatrix<f64>>> = vec![Vec::new(); n + 1];
        let dims = |sig: &Vec<Vec<f64>>, k: isize| if k < 0 { 0 } else { sig[k as usize].len() };

        for k in 1..=n {
            let d1 = dims(&signature, k as isize - 1);
            let d2 = dims(&signature, k as isize - 2);
            let sig = |lvl: usize| DMatrix::from_diagonal(&DVector::from_vec(signature[lvl].clone()));
            let mut gram = DMatrix::<f64>::zeros(d1 + d2, d1 + d2);

            // L₁ on level k−1 (into k−2) and L₂ on level k−1 (into k−3).
            let lower = |m: usize, from: usize| -> Option<DMatrix<f64>> {
                if from < m {
                    return None;
                }
                let x = &create[m][from - m];
                Some(sig(from - m) * x.transpose() * sig(from))
            };
            if d1 > 0 {
                let mut g11 = sig(k - 1) * (2.0 * (h + k as f64 - 1.0));
                if let Some(r1) = lower(1, k - 1) {
                    g11 += r1.transpose() * sig(k - 2) * &r1;
                }
                gram.view_mut((0, 0), (d1, d1)).copy_from(&g11);
            }
            if d2 > 0 {
                let mut g22 = sig(k - 2) * (4.0 * (h + k as f64 - 2.0) + c / 2.0);
                if let Some(r2) = lower(2, k - 2) {
                    g22 += r2.transpose() * sig(k - 4) * &r2;
                }
                gram.view_mut((d1, d1), (d2, d2)).copy_from(&g22);
                if d1 > 0 {
                    let r1_upper = lower(1, k - 1).expect("k ≥ 2");
                    let mut g12 = r1_upper.transpose() * sig(k - 2) * 3.0;
                    if let (Some(r2_upper), Some(r1_lower)) = (lower(2, k - 1), lower(1, k - 2)) {
                        g12 += r2_upper.transpose() * sig(k - 3) * r1_lower;
                    }
                    gram.view_mut((0, d1), (d1, d2)).copy_from(&g12);
                    gram.view_mut((d1, 0), (d2, d1)).copy_from(&g12.transpose());
                }
            }
            let gram = sym_block(&gram);

            let eig = gram.clone().symmetric_eigen();
            let scale = eig.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if unitary_mode {
                if let Some(&neg) = eig.eigenvalues.iter().find(|&&v| v < -NULL_TOL * scale) {
                    return Err(Error::NonUnitary { level: k, eigenvalue: neg });
                }
            }
            let keep: Vec<usize> =
                (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i].abs() > NULL_TOL * scale).collect();
            let mut sigma = Vec::with_capacity(keep.len());
            // Coordinates of the spanning vectors: row a is σ_a ⟨e_a, s_b⟩ = sqrt|λ_a| Q_{ba}.
            let mut coords = DMatrix::<f64>::zeros(keep.len(), d1 + d2);
            for (row, &i) in keep.iter().enumerate() {
                let lambda = eig.eigenvalues[i];
                sigma.push(lambda.signum());
                let root = lambda.abs().sqrt();
                for b in 0..d1 + d2 {
                    coords[(row, b)] = root * eig.eigenvectors[(b, i)];
                }
            }
            signature.push(sigma);
            create[1].push(coords.columns(0, d1).into_owned());
            if k >= 2 {
                create[2].push(coords.columns(d1, d2).into_owned());
            }
        }

        // L₋₍ₘ₊₁₎ from level j = (L₋₁ L₋ₘ − L₋ₘ L₋₁)/(m − 1).
        for m in 2..n {
            let mut next = Vec::new();
            for j in 0..=n - m - 1 {
                let a = &create[1][j + m] * &create[m][j];
                let b = &create[m][j + 1] * &create[1][j];
                next.push((a - b) / (m as f64 - 1.0));
            }
            create[m + 1] = next;
        }

        let mut offsets = vec![0];
        for s in &signature {
            offsets.push(offsets.last().unwrap() + s.len());
        }

        let mut t = Self {
            weight,
            level_cap: n,
            unitary_mode,
            signature,
            create,
            basis: Vec::new(),
            pbw_coordinates: Vec::new(),
            gram: super::pbw_gram(weight, n),
            offsets,
        };
        t.basis = (0..=n).map(|k| partitions(k as u32)).collect();
        t.pbw_coordinates = (0..=n).map(|k| t.pbw_coordinates_at(k)).collect();
        Ok(t)
    }

    fn pbw_coordinates_at(&self, k: usize) -> DMatrix<f64> {
        let parts = &self.basis[k];
        let mut out = DMatrix::<f64>::zeros(self.signature[k].len(), parts.len());
        for (col, lambda) in parts.iter().enumerate() {
            // L₋λ₁ ⋯ L₋λᵣ |h⟩: apply the rightmost factor first.
            let mut v = DVector::from_element(1, 1.0);
            let mut level = 0;
            for &part in lambda.iter().rev() {
                v = &self.create[part as usize][level] * v;
                level += part as usize;
            }
            out.set_column(col, &v);
        }
        out
    }

    pub fn weight(&self) -> LowestWeight {
        self.weight
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }

    pub fn unitary_mode(&self) -> bool {
        self.unitary_mode
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Dimension of the quotient at each level.
    pub fn quotient_dims(&self) -> Vec<usize> {
        self.signature.iter().map(Vec::len).collect()
    }

    /// Start of each level block, followed by the total dimension.
    pub fn level_offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Level of every basis vector.
    pub fn levels(&self) -> Vec<usize> {
        (0..=self.level_cap).flat_map(|k| std::iter::repeat_n(k, self.signature[k].len())).collect()
    }

    pub fn signature(&self, level: usize) -> &[f64] {
        &self.signature[level]
    }

    /// `true` when the form is positive on every level.
    pub fn is_positive(&self) -> bool {
        self.signature.iter().flatten().all(|&s| s > 0.0)
    }

    /// PBW monomials (partitions) at `level`.
    pub fn basis(&self, level: usize) -> &[Partition] {
        &self.basis[level]
    }

    /// Coordinates of the PBW monomials of `level` in the quotient basis; the
    /// change of basis from the partition basis to the orthonormal one.
    pub fn pbw_coordinates(&self, level: usize) -> &DMatrix<f64> {
        &self.pbw_coordinates[level]
    }

    /// Gram matrix `⟨L₋λ|h⟩, L₋μ|h⟩⟩` of the PBW monomials at `level`, by
    /// floating-point normal ordering (see [`pbw_gram`](super::pbw_gram)).
    pub fn gram(&self, level: usize) -> &DMatrix<f64> {
        &self.gram[level]
    }

    /// The same Gram matrix recovered from the quotient coordinates as `PᵀΣP`.
    /// Agrees with [`gram`](Self::gram) up to rounding relative to the largest
    /// entry of the level; used as an internal consistency check.
    pub fn quotient_gram(&self, level: usize) -> DMatrix<f64> {
        let p = &self.pbw_coordinates[level];
        let sig = DMatrix::from_diagonal(&DVector::from_vec(self.signature[level].clone()));
        sym_block(&(p.transpose() * sig * p))
    }

    /// Matrix of `L₋ₙ` (`n ≥ 1`) from level `k` to level `k + n`.
    pub(crate) fn creation_block(&self, n: usize, k: usize) -> &DMatrix<f64> {
        &self.create[n][k]
    }

    /// Matrix of `Lₙ` (`n ≥ 1`) from level `k` to level `k − n`.
    pub(crate) fn annihilation_block(&self, n: usize, k: usize) -> DMatrix<f64> {
        let x = &self.create[n][k - n];
        let s_low = DVector::from_vec(self.signature[k - n].clone());
        let s_high = DVector::from_vec(self.signature[k].clone());
        DMatrix::from_fn(x.ncols(), x.nrows(), |i, j| s_low[i] * x[(j, i)] * s_high[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn level_zero() {
        let t = ModuleTruncation::build(LowestWeight::new(1.0, 0.3), 0, true).unwrap();
        assert_eq!(t.dim(), 1);
        assert_eq!(t.gram(0)[(0, 0)], 1.0);
    }

    #[test]
    fn vacuum_level_one_is_null() {
        let t = ModuleTruncation::build(LowestWeight::new(0.5, 0.0), 3, true).unwrap();
        assert_eq!(t.quotient_dims()[1], 0);
    }

    #[test]
    fn quotient_gram_matches_normal_ordering() {
        for (c, h) in [(1.0, 0.5), (0.7, 0.0), (2.3, 1.4)] {
            let t = ModuleTruncation::build(LowestWeight::new(c, h), 7, false).unwrap();
            for k in 0..=7 {
                let direct = t.gram(k);
                let scale = direct.amax().max(1.0);
                assert!((t.quotient_gram(k) - direct).amax() < 1e-12 * scale, "level {k}");
            }
        }
    }

    #[test]
    fn level_two_gram() {
        let t = ModuleTruncation::build(LowestWeight::new(1.0, 0.5), 2, true).unwrap();
        let g = t.gram(2);
        assert_abs_diff_eq!(g[(0, 0)], 2.5, epsilon = 1e-13);
        assert_abs_diff_eq!(g[(0, 1)], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g[(1, 1)], 4.0, epsilon = 1e-13);
    }

    #[test]
    fn generic_dims_are_partition_counts() {
        let t = ModuleTruncation::build(LowestWeight::new(2.3, 0.7), 8, true).unwrap();
        let expected: Vec<usize> = (0..=8).map(crate::partition::partition_count).collect();
        assert_eq!(t.quotient_dims(), expected);
    }

    #[test]
    fn non_unitary_detected() {
        let w = LowestWeight::new(0.4, 0.3);
        assert!(matches!(ModuleTruncation::build(w, 4, true), Err(Error::NonUnitary { level: 2, .. })));
        let t = ModuleTruncation::build(w, 4, false).unwrap();
        assert!(!t.is_positive());
    }
}
