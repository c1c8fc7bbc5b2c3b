use driftwave::operator::{
    adjoint, commutator, resolvent, skew_part, sym_part, transmutator, transmutator_adjoint_residual,
    verify_weak_equals_strong, OperatorMatrix, OperatorSampler,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn close(a: &OperatorMatrix, b: &OperatorMatrix, tol: f64) -> bool {
    (a.entries() - b.entries()).amax() <= tol * a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sym_and_skew_parts_split_the_operator(seed in any::<u64>(), n in 1usize..9) {
        let c = OperatorSampler::new(seed).uniform(n, n);
        let (s, k) = (sym_part(&c).unwrap(), skew_part(&c).unwrap());
        prop_assert!(close(&s.add(&k).unwrap(), &c, 1e-15));
        prop_assert!(close(&adjoint(&s), &s, 0.0));
        prop_assert!(close(&adjoint(&k), &k.scale(-1.0), 0.0));
    }

    #[test]
    fn commutator_is_antisymmetric_and_satisfies_jacobi(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = OperatorSampler::new(seed);
        let (a, b, c) = (rng.uniform(n, n), rng.uniform(n, n), rng.uniform(n, n));
        let ab = commutator(&a, &b).unwrap();
        prop_assert!(close(&ab, &commutator(&b, &a).unwrap().scale(-1.0), 0.0));
        let jacobi = commutator(&a, &commutator(&b, &c).unwrap()).unwrap()
            .add(&commutator(&b, &commutator(&c, &a).unwrap()).unwrap()).unwrap()
            .add(&commutator(&c, &ab).unwrap()).unwrap();
        prop_assert!(jacobi.max_abs() <= 1e-13);
    }

    #[test]
    fn transmutator_adjoint_flips_sign(seed in any::<u64>(), n in 1usize..7, m in 1usize..7) {
        let mut rng = OperatorSampler::new(seed);
        let (l, t, r) = (rng.uniform(m, m), rng.uniform(m, n), rng.uniform(n, n));
        prop_assert!(transmutator_adjoint_residual(&l, &t, &r).unwrap() <= 1e-13);
        // Independent expansion: (LT − TR)* = T*L* − R*T*.
        let direct = adjoint(&transmutator(&l, &t, &r).unwrap());
        let expanded = adjoint(&t).compose(&adjoint(&l)).unwrap().sub(&adjoint(&r).compose(&adjoint(&t)).unwrap()).unwrap();
        prop_assert!(close(&direct, &expanded, 1e-14));
    }

    #[test]
    fn resolvent_inverts_shifted_operator(seed in any::<u64>(), n in 1usize..9, eta in 0.0f64..0.5) {
        let q = OperatorSampler::new(seed).quasi_skew(n, 0.5);
        let r = resolvent(&q.op, eta).unwrap();
        let shifted = OperatorMatrix::identity(n).add(&q.op.scale(eta)).unwrap();
        let product = shifted.compose(&r).unwrap();
        prop_assert!((product.entries() - DMatrix::identity(n, n)).amax() <= 1e-12);
    }

    #[test]
    fn weak_product_rule_matches_strong(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = OperatorSampler::new(seed);
        let c = rng.skew(n);
        let alpha = rng.symmetric(n);
        prop_assert!(verify_weak_equals_strong(&c, &alpha).unwrap().max_abs_residual() <= 1e-12);
    }
}
