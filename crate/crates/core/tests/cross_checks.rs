//! The numerical engine against the exact oracle, and frozen oracle values.

use diffvir_core::oracle::{rational, Oracle, VirasoroWord};
use diffvir_core::partition::partitions;
use diffvir_core::{LowestWeight, ModuleTruncation};
use nalgebra::DMatrix;
use num_traits::ToPrimitive;

/// `⟨L₋λ|h⟩, L_{−n} L₋μ|h⟩⟩` for `λ ⊢ k + n`, `μ ⊢ k` through the engine's
/// quotient coordinates and `L₋ₙ` matrix.
fn engine_pairing(module: &ModuleTruncation, n: usize, k: usize) -> DMatrix<f64> {
    let l = module.l_matrix(-(n as i64)).unwrap();
    let offsets = module.level_offsets();
    let (dk, dkn) = (module.signature(k).len(), module.signature(k + n).len());
    let block = l.entries().view((offsets[k + n], offsets[k]), (dkn, dk)).map(|z| z.re);
    let sig = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(module.signature(k + n).to_vec()));
    module.pbw_coordinates(k + n).transpose() * sig * block * module.pbw_coordinates(k)
}

fn oracle_pairing(oracle: &mut Oracle, c: f64, h: f64, n: usize, k: usize) -> DMatrix<f64> {
    let rows = partitions((k + n) as u32);
    let cols = partitions(k as u32);
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        // (L₋λ)† = L_{λ_k} ⋯ L_{λ₁}.
        let mut modes: Vec<i64> = rows[i].iter().rev().map(|&p| p as i64).collect();
        modes.push(-(n as i64));
        oracle.normal_order(&VirasoroWord::new(modes), &cols[j]).unwrap().eval_f64(c, h)
    })
}

#[test]
fn lowering_matrices_match_normal_ordering() {
    let mut oracle = Oracle::new(8);
    for (c, h) in [(1.0, 0.5), (2.5, 0.0), (0.7, 1.25)] {
        let module = ModuleTruncation::build(LowestWeight::new(c, h), 7, false).unwrap();
        for n in 1..=3 {
            for k in 0..=(7 - n) {
                let engine = engine_pairing(&module, n, k);
                let exact = oracle_pairing(&mut oracle, c, h, n, k);
                let scale = exact.amax().max(1.0);
                let err = (&engine - &exact).amax() / scale;
                assert!(err < 1e-11, "(c, h) = ({c}, {h}), n = {n}, k = {k}: {err:e}");
            }
        }
    }
}

#[test]
fn engine_gram_equals_exact_at_rational_points() {
    let mut oracle = Oracle::new(6);
    for (p, q) in [((3, 2), (1, 3)), ((7, 10), (2, 5)), ((5, 1), (0, 1))] {
        let (c, h) = (rational(p.0, p.1), rational(q.0, q.1));
        let (cf, hf) = (c.to_f64().unwrap(), h.to_f64().unwrap());
        let module = ModuleTruncation::build(LowestWeight::new(cf, hf), 6, false).unwrap();
        for level in 0..=6 {
            let exact = oracle.shapovalov_matrix(level).unwrap();
            let gram = module.gram(level);
            for (i, row) in exact.iter().enumerate() {
                for (j, poly) in row.iter().enumerate() {
                    let value = poly.eval(&c, &h).to_f64().unwrap();
                    let rel = (gram[(i, j)] - value).abs() / value.abs().max(1.0);
                    assert!(rel < 1e-12, "level {level} entry ({i}, {j}): {rel:e}");
                }
            }
        }
    }
}

/// Level-3 and level-4 forms in the basis order (3), (2,1), (1,1,1) and
/// (4), (3,1), (2,2), (2,1,1), (1,1,1,1), frozen at first computation.
#[test]
fn frozen_shapovalov_levels_three_and_four() {
    let mut oracle = Oracle::new(4);
    let level3 = [
        ["6*h + 2*c", "10*h", "24*h"],
        ["10*h", "8*h^2 + c*h + 8*h", "36*h^2 + 12*h"],
        ["24*h", "36*h^2 + 12*h", "48*h^3 + 72*h^2 + 24*h"],
    ];
    let level4 = [
        ["8*h + 5*c", "14*h", "24*h + 3*c", "36*h", "120*h"],
        ["14*h", "12*h^2 + 4*c*h + 12*h", "30*h", "40*h^2 + 20*h", "192*h^2 + 48*h"],
        ["24*h + 3*c", "30*h", "32*h^2 + 8*c*h + 32*h + 1/2*c^2 + 4*c", "48*h^2 + 6*c*h + 48*h", "216*h^2 + 144*h"],
        [
            "36*h",
            "40*h^2 + 20*h",
            "48*h^2 + 6*c*h + 48*h",
            "32*h^3 + 4*c*h^2 + 116*h^2 + 2*c*h + 32*h",
            "288*h^3 + 336*h^2 + 96*h",
        ],
        [
            "120*h",
            "192*h^2 + 48*h",
            "216*h^2 + 144*h",
            "288*h^3 + 336*h^2 + 96*h",
            "384*h^4 + 1152*h^3 + 1056*h^2 + 288*h",
        ],
    ];
    let got3 = oracle.shapovalov_matrix(3).unwrap();
    for (i, row) in level3.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            assert_eq!(got3[i][j].to_string(), *s);
        }
    }
    let got4 = oracle.shapovalov_matrix(4).unwrap();
    for (i, row) in level4.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            assert_eq!(got4[i][j].to_string(), *s);
        }
    }
}

/// Corner entries at level 8, frozen at first computation.
#[test]
fn frozen_level_eight_corners() {
    let mut oracle = Oracle::new(8);
    let m = oracle.shapovalov_matrix(8).unwrap();
    assert_eq!(m[0][0].to_string(), "16*h + 42*c");
    assert_eq!(
        m[21][21].to_string(),
        "10321920*h^8 + 144506880*h^7 + 830914560*h^6 + 2528870400*h^5 + 4366817280*h^4 + 4235857920*h^3 + 2107607040*h^2 + 406425600*h"
    );
    // ⟨L₋₁⁸|h⟩, L₋₁⁸|h⟩⟩ = 8! ∏_{j=0}^{7} (2h + j).
    let h = rational(3, 7);
    let closed = (0..8).fold(rational(40320, 1), |acc, j| acc * (rational(2, 1) * &h + rational(j, 1)));
    assert_eq!(m[21][21].eval(&rational(0, 1), &h), closed);
}
