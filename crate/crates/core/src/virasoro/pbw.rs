//! Floating-point normal ordering on PBW monomials `L₋μ₁ ⋯ L₋μᵣ|h⟩`
//! (`μ₁ ≥ ⋯ ≥ μᵣ`), specialised at numeric `(c, h)`.
//!
//! Every coefficient produced while commuting modes into place is one of
//! `m − j > 0`, `n + m > 0`, `c(n³ − n)/12` or `h + level`, so for `c, h ≥ 0`
//! the recursion has no cancellation and each Gram entry carries a relative
//! error of a few ulps, independently of its size.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use crate::partition::{partitions, Partition};

use super::LowestWeight;

type State = BTreeMap<Partition, f64>;

fn add_into(acc: &mut State, other: &State, scale: f64) {
    for (k, v) in other {
        *acc.entry(k.clone()).or_insert(0.0) += scale * v;
    }
}

struct Reducer {
    c: f64,
    h: f64,
    create: HashMap<(u32, Partition), State>,
    lower: HashMap<(u32, Partition), State>,
}

impl Reducer {
    /// `L₋ⱼ L₋μ|h⟩` in PBW form.
    fn create(&mut self, j: u32, mu: &[u32]) -> State {
        if mu.first().is_none_or(|&top| j >= top) {
            let mut word = Vec::with_capacity(mu.len() + 1);
            word.push(j);
            word.extend_from_slice(mu);
            return State::from([(word, 1.0)]);
        }
        let key = (j, mu.to_vec());
        if let Some(hit) = self.create.get(&key) {
            return hit.clone();
        }
        // L₋ⱼ L₋ₘ X = L₋ₘ (L₋ⱼ X) + (m − j) L₋₍ⱼ₊ₘ₎ X with m = μ₁ > j.
        let (m, tail) = (mu[0], &mu[1..]);
        let mut out = State::new();
        for (word, coeff) in self.create(j, tail) {
            add_into(&mut out, &self.create(m, &word), coeff);
        }
        add_into(&mut out, &self.create(j + m, tail), f64::from(m - j));
        self.create.insert(key, out.clone());
        out
    }

    /// `Lₙ L₋μ|h⟩` for `n ≥ 1`, in PBW form.
    fn lower(&mut self, n: u32, mu: &[u32]) -> State {
        let Some((&m, tail)) = mu.split_first() else {
            return State::new();
        };
        let key = (n, mu.to_vec());
        if let Some(hit) = self.lower.get(&key) {
            return hit.clone();
        }
        // Lₙ L₋ₘ X = L₋ₘ Lₙ X + (n + m) L_{n−m} X + δ_{nm} c(n³ − n)/12 X.
        let mut out = State::new();
        for (word, coeff) in self.lower(n, tail) {
            add_into(&mut out, &self.create(m, &word), coeff);
        }
        let bracket = f64::from(n + m);
        let middle = match n.cmp(&m) {
            std::cmp::Ordering::Greater => self.lower(n - m, tail),
            std::cmp::Ordering::Less => self.create(m - n, tail),
            std::cmp::Ordering::Equal => {
                let level: u32 = tail.iter().sum();
                State::from([(tail.to_vec(), self.h + f64::from(level))])
            }
        };
        add_into(&mut out, &middle, bracket);
        if n == m {
            let nf = f64::from(n);
            add_into(&mut out, &State::from([(tail.to_vec(), 1.0)]), self.c * (nf * nf * nf - nf) / 12.0);
        }
        self.lower.insert(key, out.clone());
        out
    }
}

/// PBW Gram matrices `⟨L₋λ|h⟩, L₋μ|h⟩⟩` for levels `0..=max_level`, rows and
/// columns in the order of [`partitions`].
///
/// Uses `⟨L₋λ₁ L₋λ′ v, w⟩ = ⟨L₋λ′ v, L_{λ₁} w⟩` and the Gram of the lower level.
pub fn pbw_gram(weight: LowestWeight, max_level: usize) -> Vec<DMatrix<f64>> {
    let mut reducer = Reducer { c: weight.c, h: weight.h, create: HashMap::new(), lower: HashMap::new() };
    let bases: Vec<Vec<Partition>> = (0..=max_level).map(|k| partitions(k as u32)).collect();
    let index: Vec<HashMap<Partition, usize>> =
        bases.iter().map(|b| b.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()).collect();
    let mut grams: Vec<DMatrix<f64>> = vec![DMatrix::from_element(1, 1, 1.0)];
    for (k, basis) in bases.iter().enumerate().skip(1) {
        let mut g = DMatrix::zeros(basis.len(), basis.len());
        for (j, mu) in basis.iter().enumerate() {
            for (i, lambda) in basis.iter().enumerate() {
                let (top, rest) = (lambda[0], &lambda[1..]);
                let low = k - top as usize;
                let r = index[low][rest];
                let image = reducer.lower(top, mu);
                g[(i, j)] = image.iter().map(|(word, coeff)| coeff * grams[low][(r, index[low][word])]).sum();
            }
        }
        grams.push(g);
    }
    grams
}
