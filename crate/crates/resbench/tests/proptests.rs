//! Property-based invariants over randomly generated inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use resbench::grid::GridFunction;
use resbench::normalform::delta_test;
use resbench::polynf::{normal_form, substitute, PolyMap};

fn cx() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn near_identity() -> impl Strategy<Value = PolyMap> {
    proptest::collection::vec(cx(), 7).prop_map(|c| {
        let mut h = PolyMap::zero(3);
        h.set(2, 0, c[0]);
        h.set(1, 1, c[1]);
        h.set(0, 2, c[2]);
        h.set(3, 0, c[3]);
        h.set(2, 1, c[4]);
        h.set(1, 2, c[5]);
        h.set(0, 3, c[6]);
        h
    })
}

fn origin_fixing_map() -> impl Strategy<Value = PolyMap> {
    (cx(), near_identity()).prop_map(|(lin, h)| {
        let mut m = h;
        m.set(1, 0, lin);
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncated_composition_is_associative(
        f in origin_fixing_map(),
        g in origin_fixing_map(),
        h in origin_fixing_map(),
    ) {
        let left = f.compose(&g).compose(&h);
        let right = f.compose(&g.compose(&h));
        let scale = left.max_coeff_norm().max(1.0);
        prop_assert!(left.sub(&right).max_coeff_norm() <= 1e-13 * scale);
    }

    #[test]
    fn conjugation_preserves_resonant_coefficients(
        c1 in cx(),
        c2 in cx(),
        h21 in cx(),
        h03 in cx(),
    ) {
        let mut g = PolyMap::linear(Complex64::i(), 3);
        g.set(2, 1, c1);
        g.set(0, 3, c2);
        let mut h = PolyMap::zero(3);
        h.set(2, 1, h21);
        h.set(0, 3, h03);
        let moved = substitute(&g, &h);
        prop_assert!((moved.get(2, 1) - c1).norm() <= 1e-13);
        prop_assert!((moved.get(0, 3) - c2).norm() <= 1e-13);
    }

    #[test]
    fn normal_form_strips_every_nonresonant_monomial(
        r20 in cx(), r11 in cx(), r02 in cx(),
        r30 in cx(), r21 in cx(), r12 in cx(), r03 in cx(),
    ) {
        let g = PolyMap::from_rho(Complex64::i(), r20, r11, r02, r30, r21, r12, r03);
        let nf = normal_form(&g).unwrap();
        prop_assert!(nf.residual <= 1e-13, "residual {:e}", nf.residual);
    }

    #[test]
    fn delta_matches_rotated_form(
        a1 in cx(),
        a2 in cx(),
        b in -8.0..8.0f64,
    ) {
        let delta = delta_test(a1, a2, b);
        let rot = Complex64::new(1.0, -b);
        let other = (a1 * rot).im.abs() - (a2 * rot).norm();
        prop_assert!((delta - other).abs() <= 1e-12 * (1.0 + other.abs()));
    }

    #[test]
    fn interpolation_is_exact_at_nodes(values in proptest::collection::vec(cx(), 17)) {
        prop_assume!(values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
        let g = GridFunction::new(values).unwrap();
        for k in 0..=g.n() {
            let t = g.node(k);
            prop_assert_eq!(g.eval_at(t).unwrap(), g.value(k));
        }
    }

    #[test]
    fn cumulative_endpoint_agrees_with_simpson(
        a_re in -2.0..2.0f64,
        a_im in -3.0..3.0f64,
    ) {
        let a = Complex64::new(a_re, a_im);
        let g = GridFunction::from_fn(2048, |t| (a * t).exp());
        let diff = (g.cumulative().at_zero() - g.integrate()).norm();
        prop_assert!(diff <= 1e-12);
    }
}
