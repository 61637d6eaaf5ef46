//! Randomized algebraic laws of the Weyl engine. Each property runs 1000
//! cases over expressions of momentum degree <= 2 with Laurent positions and
//! Gaussian-rational, parameter-carrying coefficients.

use proptest::prelude::*;
use superalg_core::{GaussianRational, OperatorExpr};

fn atom() -> impl Strategy<Value = OperatorExpr> {
    prop_oneof![
        (0..3usize, -2..=2i32).prop_map(|(c, e)| OperatorExpr::position_pow(c, e)),
        (0..3usize).prop_map(OperatorExpr::momentum),
        (-3..=3i64).prop_map(OperatorExpr::constant),
        (0..4usize).prop_map(OperatorExpr::param),
        Just(OperatorExpr::scalar(GaussianRational::i())),
        (-2..=2i64, 1..=3i64)
            .prop_map(|(n, d)| OperatorExpr::scalar(GaussianRational::from_ratio(n, d))),
    ]
}

/// Sum of up to three two-atom products: momentum degree <= 2.
fn expr() -> impl Strategy<Value = OperatorExpr> {
    prop::collection::vec((atom(), atom()), 1..=3).prop_map(|pairs| {
        pairs.into_iter().fold(OperatorExpr::zero(), |acc, (a, b)| {
            acc.add(
                &a.checked_mul(&b)
                    .expect("small products stay under the degree cap"),
            )
        })
    })
}

fn is_eq(a: &OperatorExpr, b: &OperatorExpr) -> bool {
    a.sub(b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jacobi_identity(a in expr(), b in expr(), c in expr()) {
        let ab = a.commutator(&b).unwrap();
        let bc = b.commutator(&c).unwrap();
        let ca = c.commutator(&a).unwrap();
        let total = a
            .commutator(&bc)
            .unwrap()
            .add(&b.commutator(&ca).unwrap())
            .add(&c.commutator(&ab).unwrap());
        prop_assert!(total.is_zero());
    }

    #[test]
    fn commutator_antisymmetry(a in expr(), b in expr()) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.add(&ba).is_zero());
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), c in expr()) {
        let lhs = a.commutator(&b.checked_mul(&c).unwrap()).unwrap();
        let rhs = a
            .commutator(&b)
            .unwrap()
            .checked_mul(&c)
            .unwrap()
            .add(&b.checked_mul(&a.commutator(&c).unwrap()).unwrap());
        prop_assert!(is_eq(&lhs, &rhs));
    }

    #[test]
    fn adjoint_involution(a in expr()) {
        prop_assert!(is_eq(&a.formal_adjoint().formal_adjoint(), &a));
    }

    #[test]
    fn adjoint_antihomomorphism(a in expr(), b in expr()) {
        let lhs = a.checked_mul(&b).unwrap().formal_adjoint();
        let rhs = b.formal_adjoint().checked_mul(&a.formal_adjoint()).unwrap();
        prop_assert!(is_eq(&lhs, &rhs));
    }

    #[test]
    fn product_associativity(a in expr(), b in expr(), c in expr()) {
        let lhs = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
        let rhs = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
        prop_assert!(is_eq(&lhs, &rhs));
    }

    #[test]
    fn product_distributivity(a in expr(), b in expr(), c in expr()) {
        let lhs = a.checked_mul(&b.add(&c)).unwrap();
        let rhs = a.checked_mul(&b).unwrap().add(&a.checked_mul(&c).unwrap());
        prop_assert!(is_eq(&lhs, &rhs));
    }
}
