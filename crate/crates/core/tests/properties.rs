use proptest::prelude::*;

use ordsep::cartesian::{abelianize, expand, rs_rewrite};
use ordsep::search::random_candidate;
use ordsep::separator::{separate_orders, verify_certificate, SeparatorConfig};
use ordsep::{ActionGraph, FiniteGroup, FreeProduct, Syllable, Word};

fn c2c3() -> FreeProduct {
    FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3))
}

fn s3c2() -> FreeProduct {
    FreeProduct::new(FiniteGroup::symmetric(3), FiniteGroup::cyclic(2))
}

fn c2c2() -> FreeProduct {
    FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2))
}

/// Raw syllable strings, identities and repeats included, normalized.
fn word_in(fp: FreeProduct, max_len: usize) -> impl Strategy<Value = Word> {
    let (na, nb) = (fp.a().size(), fp.b().size());
    prop::collection::vec((any::<bool>(), 0usize..64), 0..=max_len).prop_map(move |raw| {
        let syllables: Vec<Syllable> = raw
            .into_iter()
            .map(|(is_a, e)| if is_a { Syllable::a(e % na) } else { Syllable::b(e % nb) })
            .collect();
        fp.normalize(&syllables).unwrap()
    })
}

proptest! {
    #[test]
    fn normal_forms_are_fixed_points(w in word_in(c2c3(), 12)) {
        let fp = c2c3();
        prop_assert_eq!(fp.normalize(w.syllables()).unwrap(), w.clone());
        prop_assert!(fp.mul(&w, &fp.invert(&w)).is_empty());
        prop_assert!(w.syllables().windows(2).all(|p| p[0].factor != p[1].factor));
    }

    #[test]
    fn multiplication_is_associative(x in word_in(s3c2(), 6), y in word_in(s3c2(), 6), z in word_in(s3c2(), 6)) {
        let fp = s3c2();
        prop_assert_eq!(fp.mul(&fp.mul(&x, &y), &z), fp.mul(&x, &fp.mul(&y, &z)));
    }

    #[test]
    fn projection_is_a_homomorphism(x in word_in(s3c2(), 8), y in word_in(s3c2(), 8)) {
        let fp = s3c2();
        let (xa, xb) = fp.project_to_direct_product(&x);
        let (ya, yb) = fp.project_to_direct_product(&y);
        prop_assert_eq!(fp.project_to_direct_product(&fp.mul(&x, &y)), (fp.a().mul(xa, ya), fp.b().mul(xb, yb)));
    }

    #[test]
    fn cyclic_reduction_identity(w in word_in(s3c2(), 10)) {
        let fp = s3c2();
        let (reduced, conj) = fp.cyclic_reduce(&w);
        prop_assert!(reduced.is_cyclically_reduced());
        prop_assert_eq!(fp.product([&conj, &reduced, &fp.invert(&conj)]), w);
    }

    #[test]
    fn conjugates_are_recognized(w in word_in(s3c2(), 8), g in word_in(s3c2(), 6)) {
        let fp = s3c2();
        let x = fp.conjugate(&w, &g);
        let c = fp.conjugate_test(&w, &x);
        prop_assert!(c.is_some());
        prop_assert_eq!(fp.conjugate(&w, &c.unwrap()), x);
    }

    #[test]
    fn rewriting_round_trips(w in word_in(s3c2(), 10), x in word_in(s3c2(), 10)) {
        let fp = s3c2();
        let cw = fp.pow(&w, fp.power_entering_cartesian(&w));
        let cx = fp.pow(&x, fp.power_entering_cartesian(&x));
        let rw = rs_rewrite(&fp, &cw).unwrap();
        let rx = rs_rewrite(&fp, &cx).unwrap();
        prop_assert_eq!(expand(&fp, &rw), cw.clone());
        let sum: Vec<i64> = abelianize(&fp, &rw).iter().zip(abelianize(&fp, &rx)).map(|(p, q)| p + q).collect();
        prop_assert_eq!(abelianize(&fp, &rs_rewrite(&fp, &fp.mul(&cw, &cx)).unwrap()), sum);
    }

    #[test]
    fn cycle_lengths_partition_the_vertices(seed in any::<u64>(), blocks in 1usize..8, w in word_in(c2c3(), 8)) {
        let fp = c2c3();
        let (reduced, _) = fp.cyclic_reduce(&w);
        prop_assume!(!reduced.is_empty());
        let graph = ActionGraph::from_actions(&fp, random_candidate(&fp, 6 * blocks, seed).unwrap(), true).unwrap();
        let lengths = graph.cycle_lengths(&reduced).unwrap();
        prop_assert_eq!(lengths.iter().sum::<u64>(), 6 * blocks as u64);
        let order = graph.image_order(&reduced).unwrap();
        for k in 1..=6u64 {
            let expected = order / num_integer::gcd(order, k);
            prop_assert_eq!(graph.tables().image_order(&fp.pow(&reduced, k)), expected);
        }
    }

    #[test]
    fn image_orders_are_conjugation_invariant(seed in any::<u64>(), w in word_in(c2c3(), 8), g in word_in(c2c3(), 6)) {
        let fp = c2c3();
        let tables = random_candidate(&fp, 12, seed).unwrap();
        prop_assert_eq!(tables.image_order(&w), tables.image_order(&fp.conjugate(&w, &g)));
        prop_assert_eq!(tables.image_order(&w), tables.image_order(&fp.invert(&w)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn separator_is_sound_and_symmetric(u in word_in(c2c2(), 6), v in word_in(c2c2(), 6), g in word_in(c2c2(), 4)) {
        let fp = c2c2();
        prop_assume!(!u.is_empty() && !v.is_empty());
        let config = SeparatorConfig { budget: 20_000, ..SeparatorConfig::default() };
        let out = separate_orders(&fp, &u, &v, &config).unwrap();
        if let Some(cert) = out.certificate() {
            prop_assert!(verify_certificate(&fp, &u, &v, cert).passed());
        }
        let swapped = separate_orders(&fp, &v, &u, &config).unwrap();
        let inverted = separate_orders(&fp, &fp.invert(&u), &fp.invert(&v), &config).unwrap();
        let conjugated = separate_orders(&fp, &fp.conjugate(&u, &g), &v, &config).unwrap();
        prop_assert_eq!(out.class(), swapped.class());
        prop_assert_eq!(out.class(), inverted.class());
        prop_assert_eq!(out.class(), conjugated.class());
    }
}
