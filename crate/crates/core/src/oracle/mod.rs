//! Exact normal ordering of Virasoro words over `ℚ[c, h]`.
//!
//! Expectation values `⟨h| L_{m₁} ⋯ L_{m_k} |h⟩` are reduced by repeatedly
//! commuting a raising-side mode `L_a` (`a > 0`) past its right neighbour with
//! `[L_a, L_b] = (a − b) L_{a+b} + δ_{a+b,0} (a³ − a)/12 · c`, using
//! `L_n|h⟩ = 0` for `n > 0`, `⟨h|L_{−n} = 0` and `L₀|h⟩ = h|h⟩`.

mod poly;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::partitions;

pub use poly::{rational, Poly};

/// Default bound on word degree.
pub const DEFAULT_MAX_LEVEL: usize = 8;

/// `coefficient · L_{n₁} ⋯ L_{n_k}`; the empty word is the central unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirasoroWord {
    pub modes: Vec<i64>,
    pub coefficient: Poly,
}

impl VirasoroWord {
    pub fn new(modes: Vec<i64>) -> Self {
        Self { modes, coefficient: Poly::one() }
    }

    /// `max(Σ positive modes, Σ |negative modes|)`.
    pub fn degree(&self) -> usize {
        degree_of(&self.modes)
    }
}

fn degree_of(modes: &[i64]) -> usize {
    let up: i64 = modes.iter().filter(|m| **m > 0).sum();
    let down: i64 = modes.iter().filter(|m| **m < 0).map(|m| -m).sum();
    up.max(down) as usize
}

/// Memoising evaluator. Each instance owns its memo table.
#[derive(Debug)]
pub struct Oracle {
    max_level: usize,
    memo: HashMap<Vec<i64>, Poly>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_LEVEL)
    }
}

impl Oracle {
    pub fn new(max_level: usize) -> Self {
        Self { max_level, memo: HashMap::new() }
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// `⟨h| word · L_{−λ₁} ⋯ L_{−λ_k} |h⟩` for the partition `parts = λ`.
    pub fn normal_order(&mut self, word: &VirasoroWord, parts: &[u32]) -> Result<Poly> {
        let mut modes = word.modes.clone();
        modes.extend(parts.iter().map(|&p| -(p as i64)));
        let degree = degree_of(&modes);
        if degree > self.max_level {
            return Err(Error::DegreeOverflow { level: degree, max: self.max_level });
        }
        Ok(&word.coefficient * &self.expectation(&modes))
    }

    /// Vacuum expectation `⟨h| L_{m₁} ⋯ L_{m_k} |h⟩` (no degree check).
    pub fn expectation(&mut self, modes: &[i64]) -> Poly {
        if modes.iter().sum::<i64>() != 0 {
            return Poly::zero();
        }
        let Some((&first, &last)) = modes.first().zip(modes.last()) else {
            return Poly::one();
        };
        if last > 0 || first < 0 {
            return Poly::zero();
        }
        if last == 0 {
            return &Poly::h() * &self.expectation(&modes[..modes.len() - 1]);
        }
        if first == 0 {
            return &Poly::h() * &self.expectation(&modes[1..]);
        }
        if let Some(hit) = self.memo.get(modes) {
            return hit.clone();
        }
        // A positive mode immediately followed by a non-positive one exists because
        // the word starts positive and ends negative.
        let i = (0..modes.len() - 1)
            .find(|&i| modes[i] > 0 && modes[i + 1] <= 0)
            .expect("word starts positive and ends negative");
        let (a, b) = (modes[i], modes[i + 1]);
        let mut swapped = modes.to_vec();
        swapped.swap(i, i + 1);
        let mut result = self.expectation(&swapped);
        let mut merged = modes[..i].to_vec();
        merged.push(a + b);
        merged.extend_from_slice(&modes[i + 2..]);
        result = &result + &self.expectation(&merged).scale(&rational(a - b, 1));
        if a + b == 0 {
            let mut dropped = modes[..i].to_vec();
            dropped.extend_from_slice(&modes[i + 2..]);
            let central = Poly::c().scale(&rational(a * a * a - a, 12));
            result = &result + &(&central * &self.expectation(&dropped));
        }
        self.memo.insert(modes.to_vec(), result.clone());
        result
    }

    /// `M_{λμ} = ⟨L_{−λ}|h⟩, L_{−μ}|h⟩⟩` over the partitions of `level`, in the
    /// order of [`partitions`].
    pub fn shapovalov_matrix(&mut self, level: usize) -> Result<Vec<Vec<Poly>>> {
        if level > self.max_level {
            return Err(Error::DegreeOverflow { level, max: self.max_level });
        }
        let basis = partitions(level as u32);
        let mut matrix = vec![vec![Poly::zero(); basis.len()]; basis.len()];
        for (i, lambda) in basis.iter().enumerate() {
            // The adjoint of L_{−λ₁}⋯L_{−λ_r} is L_{λ_r}⋯L_{λ₁}.
            let bra: Vec<i64> = lambda.iter().rev().map(|&p| p as i64).collect();
            for (j, mu) in basis.iter().enumerate().skip(i) {
                let value = self.normal_order(&VirasoroWord::new(bra.clone()), mu)?;
                matrix[j][i] = value.clone();
                matrix[i][j] = value;
            }
        }
        Ok(matrix)
    }
}

/// `[L_n, L_m] = (n − m) L_{n+m} + δ_{n+m,0} (n³ − n)/12 · c`, as a list of words
/// (the central term is the empty word).
pub fn commutator_reduce(n: i64, m: i64) -> Vec<VirasoroWord> {
    let mut out = Vec::new();
    if n != m {
        out.push(VirasoroWord { modes: vec![n + m], coefficient: Poly::integer(n - m) });
    }
    if n + m == 0 && n * n * n != n {
        out.push(VirasoroWord { modes: Vec::new(), coefficient: Poly::c().scale(&rational(n * n * n - n, 12)) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h_times(q: i64) -> Poly {
        Poly::h().scale(&rational(q, 1))
    }

    #[test]
    fn simple_expectations() {
        let mut o = Oracle::default();
        assert_eq!(o.normal_order(&VirasoroWord::new(vec![1]), &[1]).unwrap(), h_times(2));
        let l2 = o.normal_order(&VirasoroWord::new(vec![2]), &[2]).unwrap();
        assert_eq!(l2, &h_times(4) + &Poly::c().scale(&rational(1, 2)));
        let l11 = o.normal_order(&VirasoroWord::new(vec![1, 1]), &[1, 1]).unwrap();
        assert_eq!(l11, &h_times(4) * &(&h_times(2) + &Poly::one()));
    }

    #[test]
    fn degree_overflow() {
        let mut o = Oracle::new(3);
        assert!(matches!(o.normal_order(&VirasoroWord::new(vec![4]), &[4]), Err(Error::DegreeOverflow { .. })));
        assert!(o.shapovalov_matrix(4).is_err());
    }

    #[test]
    fn low_level_shapovalov() {
        let mut o = Oracle::default();
        assert_eq!(o.shapovalov_matrix(0).unwrap(), vec![vec![Poly::one()]]);
        assert_eq!(o.shapovalov_matrix(1).unwrap(), vec![vec![h_times(2)]]);
        let m = o.shapovalov_matrix(2).unwrap();
        assert_eq!(m[0][0].to_string(), "4*h + 1/2*c");
        assert_eq!(m[0][1], h_times(6));
        assert_eq!(m[1][1].to_string(), "8*h^2 + 4*h");
    }

    #[test]
    fn shapovalov_symmetric() {
        let mut o = Oracle::default();
        for level in 0..=5 {
            let m = o.shapovalov_matrix(level).unwrap();
            for (i, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    assert_eq!(*x, m[j][i]);
                }
            }
        }
    }

    #[test]
    fn commutators() {
        let l1 = commutator_reduce(1, -1);
        assert_eq!(l1, vec![VirasoroWord { modes: vec![0], coefficient: Poly::integer(2) }]);
        let l2 = commutator_reduce(2, -2);
        assert_eq!(l2.len(), 2);
        assert_eq!(l2[1].coefficient.to_string(), "1/2*c");
        assert_eq!(commutator_reduce(0, 3), vec![VirasoroWord { modes: vec![3], coefficient: Poly::integer(-3) }]);
        assert!(commutator_reduce(2, 2).is_empty());
    }

    type Element = HashMap<Option<i64>, Poly>;

    fn bracket(x: &Element, y: &Element) -> Element {
        let mut out: Element = HashMap::new();
        for (kx, cx) in x {
            for (ky, cy) in y {
                let (Some(n), Some(m)) = (kx, ky) else { continue };
                for w in commutator_reduce(*n, *m) {
                    let key = w.modes.first().copied();
                    let term = &(cx * cy) * &w.coefficient;
                    let slot = out.entry(key).or_default();
                    *slot = &*slot + &term;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn generator(n: i64) -> Element {
        HashMap::from([(Some(n), Poly::one())])
    }

    #[test]
    fn jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (a, b, c) = (
                generator(rng.random_range(-6..=6)),
                generator(rng.random_range(-6..=6)),
                generator(rng.random_range(-6..=6)),
            );
            let mut total: Element = HashMap::new();
            for term in [bracket(&bracket(&a, &b), &c), bracket(&bracket(&b, &c), &a), bracket(&bracket(&c, &a), &b)] {
                for (k, v) in term {
                    let slot = total.entry(k).or_default();
                    *slot = &*slot + &v;
                }
            }
            assert!(total.values().all(Poly::is_zero));
        }
    }

    #[test]
    fn level_two_determinant_roots() {
        let mut o = Oracle::default();
        let m = o.shapovalov_matrix(2).unwrap();
        let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        let half = rational(1, 2);
        let coeffs = det.specialize_c(&half);
        // det = h · (q₂h² + q₁h + q₀) at c = 1/2; the constant term must vanish.
        assert!(coeffs[0].is_zero());
        let (q0, q1, q2) = (&coeffs[1], &coeffs[2], &coeffs[3]);
        let disc = q1 * q1 - rational(4, 1) * q2 * q0;
        // Exact square root of the rational discriminant.
        let num = disc.numer().sqrt();
        let den = disc.denom().sqrt();
        let root = BigRational::new(num, den);
        assert_eq!(&root * &root, disc);
        let two_q2 = rational(2, 1) * q2;
        let roots = [BigRational::zero(), (-q1 + &root) / &two_q2, (-q1 - &root) / &two_q2];
        let mut sorted = roots.to_vec();
        sorted.sort();
        assert_eq!(sorted, vec![BigRational::zero(), rational(1, 16), rational(1, 2)]);
        for r in &roots {
            assert!(det.eval(&half, r).is_zero());
        }
    }
}
