use hquot::chart::phi;
use hquot::lie::{
    exp, exp_closed, iwasawa_basis, kna_decompose, kna_residual, nak_decompose, nak_residual, AlgebraElement,
    GroupElement,
};
use hquot::sample::{case_rng, random_algebra, random_compact, random_group_word, random_point};
use hquot::tolerance;
use proptest::prelude::*;

fn in_group(g: &GroupElement) -> bool {
    GroupElement::new(g.rank(), g.matrix().clone()).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponentials_land_in_the_group(n in 2usize..=6, seed in any::<u64>(), s in 0.1f64..2.0) {
        let x = random_algebra(&mut case_rng(seed, 0), n, s);
        prop_assert!(in_group(&exp(&x)));
    }

    #[test]
    fn one_parameter_subgroups(n in 2usize..=5, seed in any::<u64>(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let x = random_algebra(&mut case_rng(seed, 1), n, 1.0);
        let lhs = exp(&x.scale(a + b));
        let rhs = &exp(&x.scale(a)) * &exp(&x.scale(b));
        prop_assert!(lhs.distance_max(&rhs) <= tolerance::EXACT * lhs.max_norm().max(1.0));
    }

    #[test]
    fn both_exponentials_agree_on_their_common_class(
        n in 2usize..=6,
        which in 0usize..3,
        idx in 0usize..64,
        c in -3.0f64..3.0,
    ) {
        let b = iwasawa_basis(n).unwrap();
        let x = match which {
            0 => b.nilpotent[idx % b.nilpotent.len()].scale(c),
            1 => b.abelian.scale(c),
            _ => b.compact[idx % b.compact.len()].scale(c),
        };
        let closed = exp_closed(&x).expect("single-plane and nilpotent elements are in the closed class");
        prop_assert!(closed.distance_max(&exp(&x)) <= tolerance::EXACT * closed.max_norm().max(1.0));
    }

    #[test]
    fn nak_round_trip(n in 2usize..=5, seed in any::<u64>(), len in 1usize..12) {
        let g = random_group_word(&mut case_rng(seed, 2), n, len).unwrap();
        let (p, k) = nak_decompose(&g).unwrap();
        prop_assert!(k.is_compact(tolerance::MEMBERSHIP));
        prop_assert!(nak_residual(&g, &p, &k) <= tolerance::RECONSTRUCTION);
        let (k2, q) = kna_decompose(&g).unwrap();
        prop_assert!(k2.is_compact(tolerance::MEMBERSHIP));
        prop_assert!(kna_residual(&g, &k2, &q) <= tolerance::RECONSTRUCTION);
    }

    #[test]
    fn nak_factors_are_unique(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = case_rng(seed, 3);
        let p = random_point(&mut rng, n, 2.0, 0.25, 4.0);
        let k = random_compact(&mut rng, n);
        let (p2, k2) = nak_decompose(&(&phi(&p) * &k)).unwrap();
        prop_assert!(p2.distance_max(&p) <= 1e-12 * p.y().max(1.0) * 4.0);
        prop_assert!(k2.distance_max(&k) <= 1e-11);
    }
}

#[test]
fn nilpotent_part_is_abelian() {
    for n in 2..=6 {
        let b = iwasawa_basis(n).unwrap();
        for x in &b.nilpotent {
            for y in &b.nilpotent {
                assert_eq!(x.bracket(y), AlgebraElement::zero(n));
            }
        }
    }
}
