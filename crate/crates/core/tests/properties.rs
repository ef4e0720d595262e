//! Property-based invariants of the spectral, diffeomorphism and operator layers.

use diffvir_core::diffeo::{gelfand_fuchs, virasoro_cocycle};
use diffvir_core::{CircleDiffeo, Complex64, LowestWeight, ModuleTruncation, QuadratureGrid, SpectralFunction};
use proptest::prelude::*;

fn field(max_degree: usize) -> impl Strategy<Value = SpectralFunction> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_degree + 1)
        .prop_map(|c| SpectralFunction::new(c.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

/// Near-identity diffeomorphism: periodic part of sup-size and derivative
/// below `size`.
fn diffeo(max_degree: usize, size: f64) -> impl Strategy<Value = CircleDiffeo> {
    field(max_degree).prop_map(move |p| {
        let scale = p.sup_norm().max(p.derivative().sup_norm()).max(1e-12);
        CircleDiffeo::new(p.scale(size / scale)).expect("small lifts are diffeomorphisms")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_round_trip(f in field(12), extra in 0usize..20) {
        let grid = QuadratureGrid::new(2 * f.cutoff() + 1 + extra).unwrap();
        let back = SpectralFunction::from_samples(&f.to_samples(&grid)).unwrap();
        prop_assert!(back.max_coeff_distance(&f) < 1e-13);
    }

    #[test]
    fn product_rule(f in field(8), g in field(8)) {
        let lhs = f.multiply(&g).derivative();
        let rhs = &f.derivative().multiply(&g) + &f.multiply(&g.derivative());
        prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-12);
        prop_assert!(f.multiply(&g).max_coeff_distance(&g.multiply(&f)) < 1e-14);
    }

    #[test]
    fn product_matches_pointwise(f in field(6), g in field(6), theta in 0.0f64..std::f64::consts::TAU) {
        let prod = f.multiply(&g);
        prop_assert!((prod.eval(theta) - f.eval(theta) * g.eval(theta)).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_monotone_in_s(f in field(10), s in 0.0f64..3.0, ds in 0.0f64..1.0) {
        prop_assert!(f.sobolev_norm(s) <= f.sobolev_norm(s + ds) * (1.0 + 1e-14));
    }

    #[test]
    fn cocycles_antisymmetric(f in field(6), g in field(6)) {
        prop_assert!((gelfand_fuchs(&f, &g) + gelfand_fuchs(&g, &f)).abs() < 1e-13);
        prop_assert!((virasoro_cocycle(&f, &g) + virasoro_cocycle(&g, &f)).abs() < 1e-13);
        prop_assert!(gelfand_fuchs(&f, &f).abs() < 1e-13);
    }

    #[test]
    fn composition_associative(a in diffeo(4, 0.2), b in diffeo(4, 0.2), c in diffeo(4, 0.2)) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        prop_assert!(left.sup_distance(&right) < 1e-11);
    }

    #[test]
    fn inverse_law(a in diffeo(6, 0.3)) {
        let inv = a.invert().unwrap();
        prop_assert!(a.compose(&inv).sup_deviation() < 1e-11);
        prop_assert!(inv.compose(&a).sup_deviation() < 1e-11);
    }

    #[test]
    fn pushforward_is_an_action(a in diffeo(3, 0.1), b in diffeo(3, 0.1), f in field(3)) {
        let lhs = a.compose(&b).pushforward(&f).unwrap();
        let rhs = a.pushforward(&b.pushforward(&f).unwrap()).unwrap();
        prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-10);
    }

    #[test]
    fn pushforward_by_rotation_rotates(alpha in -3.0f64..3.0, f in field(5)) {
        let rotated = CircleDiffeo::rotation(alpha).pushforward(&f).unwrap();
        prop_assert!(rotated.max_coeff_distance(&f.rotate(alpha)) < 1e-12);
    }

    #[test]
    fn flow_group_law(f in field(3), s in -0.5f64..0.5, t in -0.5f64..0.5) {
        let f = f.scale(0.3);
        let lhs = CircleDiffeo::exp_flow(&f, s).unwrap().compose(&CircleDiffeo::exp_flow(&f, t).unwrap());
        let rhs = CircleDiffeo::exp_flow(&f, s + t).unwrap();
        prop_assert!(lhs.sup_distance(&rhs) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smeared_operator_hermitian_and_linear(f in field(3), g in field(3), a in -2.0f64..2.0, h in 0.0f64..2.0) {
        let module = ModuleTruncation::build(LowestWeight::new(1.0, h), 6, false).unwrap();
        let tf = module.t_matrix(&f).unwrap();
        prop_assert!(tf.hermiticity_residual() < 1e-12);
        let combo = module.t_matrix(&(&f.scale(a) + &g)).unwrap();
        let expected = tf.entries() * Complex64::new(a, 0.0) + module.t_matrix(&g).unwrap().entries();
        prop_assert!((combo.entries() - expected).norm() < 1e-11 * (1.0 + combo.frobenius_norm()));
    }

    #[test]
    fn exponential_unitary(f in field(2), s in -1.0f64..1.0) {
        let module = ModuleTruncation::build(LowestWeight::new(1.5, 0.5), 5, false).unwrap();
        let u = module.exp_t(&f, s).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-11);
    }

    #[test]
    fn phase_alignment_recovers_scalar(f in field(2), phi in -3.0f64..3.0) {
        let module = ModuleTruncation::build(LowestWeight::new(1.0, 0.25), 4, false).unwrap();
        let u = module.exp_t(&f, 0.7).unwrap();
        let levels = u.levels().to_vec();
        let v = diffvir_core::OperatorMatrix::new(u.entries() * Complex64::cis(phi), levels);
        let (z, dist) = diffvir_core::virasoro::phase_align(&u, &v).unwrap();
        prop_assert!(dist < 1e-10);
        prop_assert!((z - Complex64::cis(-phi)).norm() < 1e-10 || (z - Complex64::cis(phi)).norm() < 1e-10);
    }
}
