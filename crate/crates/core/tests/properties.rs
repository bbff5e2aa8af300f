use proptest::prelude::*;

use galois_cover::freecover::{kernel_table, FreeWord};
use galois_cover::permgroup::{PermGroup, Permutation};
use galois_cover::wpoly::{rat, BivariatePolyQi, GaussianRational};

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

fn perms(n: usize, count: usize) -> impl Strategy<Value = Vec<Permutation>> {
    prop::collection::vec(permutation(n), count)
}

proptest! {
    #[test]
    fn composition_is_associative_with_inverses(ps in perms(6, 3)) {
        let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
        prop_assert_eq!(a.then(b).then(c), a.then(&b.then(c)));
        prop_assert!(a.then(&a.inverse()).is_identity());
        prop_assert_eq!(a.then(b).inverse(), b.inverse().then(&a.inverse()));
    }

    #[test]
    fn closure_is_a_group(ps in perms(5, 2)) {
        let g = PermGroup::new(5, ps).unwrap();
        prop_assert_eq!(120 % g.order(), 0);
        for x in g.elements() {
            prop_assert!(g.contains(&x.inverse()));
            for y in g.generators() {
                prop_assert!(g.contains(&x.then(y)));
            }
        }
    }

    #[test]
    fn kernel_table_is_galois_with_deck_group_of_group_order(ps in perms(4, 2)) {
        let g = PermGroup::new(4, ps.clone()).unwrap();
        let table = kernel_table(2, &ps).unwrap();
        let deck = table.deck_group().unwrap();
        prop_assert_eq!(table.size(), g.order());
        prop_assert!(deck.galois);
        prop_assert_eq!(deck.order(), g.order());
        prop_assert!(deck.group.isomorphic_as_groups(&g).unwrap().is_some());
    }

    #[test]
    fn word_membership_matches_evaluation(ps in perms(4, 2), letters in prop::collection::vec(
        prop_oneof![Just(1i32), Just(-1), Just(2), Just(-2)], 0..12)) {
        let table = kernel_table(2, &ps).unwrap();
        let w = FreeWord::new(letters);
        prop_assert_eq!(table.contains(&w), w.evaluate(&ps, 4).is_identity());
    }

    #[test]
    fn gaussian_rational_polynomials_evaluate_as_a_ring(
        a in prop::collection::vec((0u32..3, 0u32..3, -9i64..10, -9i64..10), 0..5),
        b in prop::collection::vec((0u32..3, 0u32..3, -9i64..10, -9i64..10), 0..5),
        u in -20i64..20, v in -20i64..20,
    ) {
        let build = |terms: &[(u32, u32, i64, i64)]| {
            let mut p = BivariatePolyQi::zero();
            for &(du, dv, re, im) in terms {
                p.add_term(du, dv, GaussianRational::from_ints(re, im));
            }
            p
        };
        let (p, q) = (build(&a), build(&b));
        let (u, v) = (rat(u, 3), rat(v, 7));
        prop_assert_eq!((&p * &q).eval(&u, &v), &p.eval(&u, &v) * &q.eval(&u, &v));
        let back = BivariatePolyQi::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back, p);
    }
}
