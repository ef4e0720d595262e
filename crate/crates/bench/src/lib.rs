//! Deterministic fixtures shared by the benchmarks.

use diffvir_core::{CircleDiffeo, LowestWeight, ModuleTruncation, SpectralFunction};

/// Trigonometric field `Σ_{k=1}^{degree} (cos kθ + sin kθ/2)/k²`.
pub fn field(degree: usize) -> SpectralFunction {
    (1..=degree).fold(SpectralFunction::zero(), |acc, k| {
        let w = 1.0 / (k * k) as f64;
        let term = &SpectralFunction::cos(k).scale(w) + &SpectralFunction::sin(k).scale(0.5 * w);
        &acc + &term
    })
}

/// Near-identity diffeomorphism with periodic part of size `size` built from
/// [`field`].
pub fn diffeo(degree: usize, size: f64) -> CircleDiffeo {
    let p = field(degree);
    let scale = p.sup_norm().max(p.derivative().sup_norm());
    CircleDiffeo::new(p.scale(size / scale)).expect("small lifts are diffeomorphisms")
}

pub fn module(c: f64, h: f64, n: usize) -> ModuleTruncation {
    ModuleTruncation::build(LowestWeight::new(c, h), n, false).expect("module builds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(field(3).cutoff(), 3);
        assert!(diffeo(4, 0.1).sup_deviation() <= 0.1 + 1e-12);
        assert_eq!(module(1.0, 0.0, 4).level_cap(), 4);
    }
}
