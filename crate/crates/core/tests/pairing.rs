mod common;

use common::{connected_multigraph, degree_zero};
use jacpair::classify::classify;
use jacpair::divisor::{div_of, Divisor};
use jacpair::graph::Multigraph;
use jacpair::jacobian::{jacobian, jacobian_form, monodromy_pairing};
use jacpair::pairing::{frac, isometric, ISOMETRY_BOUND};
use num_bigint::BigInt;
use proptest::prelude::*;

fn graph_and_divisors() -> impl Strategy<Value = (Multigraph, Divisor, Divisor, Divisor)> {
    connected_multigraph(6, 6).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), degree_zero(n, 5), degree_zero(n, 5), degree_zero(n, 5)).prop_map(|(g, a, b, c)| {
            (g, Divisor::from_i64(&a), Divisor::from_i64(&b), Divisor::from_i64(&c))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn symmetric_and_bilinear((g, a, b, c) in graph_and_divisors()) {
        let p = |x: &Divisor, y: &Divisor| monodromy_pairing(&g, x, y).unwrap();
        prop_assert_eq!(p(&a, &b), p(&b, &a));
        prop_assert_eq!(p(&(&a + &b), &c), frac(&(p(&a, &c) + p(&b, &c))));
        prop_assert_eq!(p(&(-&a), &c), frac(&-p(&a, &c)));
    }

    #[test]
    fn depends_only_on_classes(
        (g, a, b, _) in graph_and_divisors(),
        f in prop::collection::vec(-4i64..=4, 6),
    ) {
        let f: Vec<BigInt> = f[..g.vertex_count()].iter().map(|&x| BigInt::from(x)).collect();
        let moved = &a + &div_of(&g, &f).unwrap();
        prop_assert_eq!(monodromy_pairing(&g, &moved, &b).unwrap(), monodromy_pairing(&g, &a, &b).unwrap());
    }

    #[test]
    fn independent_of_the_base(g in connected_multigraph(6, 6), base in any::<prop::sample::Index>()) {
        let base = base.index(g.vertex_count());
        let at0 = jacobian(&g, 0).unwrap().gram_matrix();
        let atb = jacobian(&g, base).unwrap().gram_matrix();
        prop_assert_eq!(at0.invariant_factors(), atb.invariant_factors());
        if at0.order() <= BigInt::from(ISOMETRY_BOUND) {
            prop_assert!(isometric(&at0, &atb, ISOMETRY_BOUND).unwrap());
        }
        prop_assert_eq!(classify(&at0).unwrap(), classify(&atb).unwrap());
    }

    #[test]
    fn gram_entries_are_pairings_of_generators(g in connected_multigraph(6, 6)) {
        let jac = jacobian(&g, 0).unwrap();
        let gram = jac.gram_matrix();
        for (i, x) in jac.generators().iter().enumerate() {
            for (j, y) in jac.generators().iter().enumerate() {
                prop_assert_eq!(&monodromy_pairing(&g, x, y).unwrap(), &gram.gram()[i][j]);
            }
            prop_assert_eq!(jac.class_order(x).unwrap(), gram.orders()[i].clone());
        }
        prop_assert!(gram.is_nondegenerate());
    }

    #[test]
    fn fast_route_is_isometric(g in connected_multigraph(7, 7)) {
        let slow = jacobian(&g, 0).unwrap().gram_matrix();
        let fast = jacobian_form(&g).unwrap();
        prop_assert_eq!(slow.invariant_factors(), fast.invariant_factors());
        prop_assert_eq!(classify(&slow).unwrap(), classify(&fast).unwrap());
    }
}
