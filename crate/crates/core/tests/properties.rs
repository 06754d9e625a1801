//! Property tests over seeded random instances.
//!
//! Each property draws a seed and feeds it to the corpus generators, so a
//! failing case shrinks to a single reproducible seed.

use std::sync::Arc;

use enricat::base::{Base, BaseObject, Group};
use enricat::colim::{is_essentially_surjective, karoubi};
use enricat::corpus::{corpus_bases, full_inclusion, instance, instance_rng, random_category};
use enricat::enriched::{VCategory, Weight};
use enricat::flatness::{filtered_decomposition, is_cauchy_weight, is_flat};
use enricat::io::{Document, Kind};
use enricat::replay::{execute, Command, Options};
use enricat::scenarios::verify_counterexample;
use enricat::verdict::Outcome;
use proptest::prelude::*;
use rand::Rng;

const SEED: u64 = 7;

fn small_objects(b: &Base) -> Vec<BaseObject> {
    let mut out: Vec<BaseObject> = (0..3).map(|n| b.discrete(n)).collect();
    out.extend(b.generator().iter().cloned());
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn tensor_hom_adjunction(which in 0usize..3, i in 0usize..5, j in 0usize..5, k in 0usize..5) {
        let b = [Base::fin_set(), Base::fin_gset(Group::cyclic(2)), Base::fin_vec(2).unwrap()][which].clone();
        let objs = small_objects(&b);
        let (x, y, z) = (&objs[i % objs.len()], &objs[j % objs.len()], &objs[k % objs.len()]);
        let xy = b.tensor(x, y).unwrap();
        let yz = b.internal_hom(y, z).unwrap();
        let left = b.hom_set(&xy, z).unwrap();
        prop_assert_eq!(left.len(), b.hom_set(x, &yz).unwrap().len());
        for f in &left {
            let g = b.transpose(x, y, z, f).unwrap();
            prop_assert_eq!(&b.untranspose(y, z, &g).unwrap(), f);
        }
    }

    #[test]
    fn points_of_a_product_are_pairs(which in 0usize..3, i in 0usize..5, j in 0usize..5) {
        let b = [Base::fin_set(), Base::fin_gset(Group::cyclic(3)), Base::fin_cat()][which].clone();
        let objs = small_objects(&b);
        let (x, y) = (&objs[i % objs.len()], &objs[j % objs.len()]);
        let xy = b.tensor(x, y).unwrap();
        let (px, py) = (b.points(x).unwrap(), b.points(y).unwrap());
        let mut seen: Vec<usize> = px.iter().flat_map(|&u| py.iter().map(move |&v| (u, v))).map(|(u, v)| b.pair_points(x, y, u, v)).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen, b.points(&xy).unwrap());
    }

    #[test]
    fn hom_form_round_trips(id in 0u64..400) {
        let m = instance(SEED, id).weight;
        let n = m.domain.num_objects();
        let hf: Vec<_> = (0..n * n).map(|i| m.hom_form(i / n, i % n).unwrap()).collect();
        let back = Weight::from_hom_form(m.domain.clone(), m.values().to_vec(), &hf).unwrap();
        prop_assert_eq!(back.values(), m.values());
        for a in 0..n {
            for c in 0..n {
                prop_assert_eq!(back.act(a, c), m.act(a, c));
            }
        }
    }

    #[test]
    fn representables_are_flat(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 0);
        let b = corpus_bases()[rng.gen_range(0..4)].clone();
        let max_hom = if b.tag() == "finvec" { 2 } else { 3 };
        let k = random_category(&mut rng, 3, max_hom).category;
        let c = Arc::new(VCategory::free(&b, &k).unwrap());
        for x in 0..k.num_objects() {
            prop_assert_eq!(is_flat(&Weight::yoneda(&c, x)).unwrap().outcome, Outcome::Yes);
        }
    }

    #[test]
    fn free_category_has_the_same_underlying_category(seed in any::<u64>(), which in 0usize..3) {
        let b = corpus_bases()[which].clone();
        let k = random_category(&mut instance_rng(seed, 1), 4, 3).category;
        let (u, _) = VCategory::free(&b, &k).unwrap().underlying_category().unwrap();
        prop_assert_eq!(u.num_objects(), k.num_objects());
        prop_assert_eq!(u.num_arrows(), k.num_arrows());
        for x in 0..k.num_objects() {
            for y in 0..k.num_objects() {
                prop_assert_eq!(u.hom(x, y).len(), k.hom(x, y).len());
            }
        }
    }

    #[test]
    fn cauchy_weights_are_flat(id in 0u64..400) {
        let m = instance(SEED, id).weight;
        if is_cauchy_weight(&m, 2).unwrap().outcome == Outcome::Yes {
            prop_assert_eq!(is_flat(&m).unwrap().outcome, Outcome::Yes);
        }
    }

    #[test]
    fn decomposition_succeeds_exactly_on_flat_weights(id in 0u64..100) {
        // Every fourth instance is over FinSet, shifted by two over FinCat.
        let m = instance(SEED, 4 * id + 2 * (id % 2)).weight;
        let d = filtered_decomposition(&m).unwrap();
        prop_assert_eq!(d.verdict.outcome, is_flat(&m).unwrap().outcome);
    }

    #[test]
    fn final_inclusions_transfer_filteredness(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 2);
        let k = Arc::new(random_category(&mut rng, 4, 3).category);
        let objects: Vec<usize> = (0..k.num_objects()).filter(|_| rng.gen_bool(0.6)).collect();
        prop_assume!(!objects.is_empty());
        let j = full_inclusion(&k, &objects);
        if j.is_final().is_yes() {
            let dom = j.src.is_filtered().is_yes();
            let cod = j.dst.is_filtered().is_yes();
            // Full faithfulness makes the transfer go both ways.
            prop_assert_eq!(dom, cod);
        }
    }

    #[test]
    fn karoubi_is_idempotent(seed in any::<u64>(), which in 0usize..2) {
        let b = corpus_bases()[which].clone();
        let k = random_category(&mut instance_rng(seed, 3), 3, 3).category;
        let c = Arc::new(VCategory::free(&b, &k).unwrap());
        let once = karoubi(&c).unwrap();
        let twice = karoubi(&once.completed).unwrap();
        prop_assert!(is_essentially_surjective(&twice.embedding).unwrap().is_yes());
    }

    #[test]
    fn documents_and_reports_are_deterministic(id in 0u64..400) {
        let m = instance(SEED, id).weight;
        let doc = Document::new(Kind::Weight, &m);
        let text = doc.to_text();
        let again = Document::parse(&text).unwrap();
        prop_assert_eq!(&again, &doc);
        let r1 = execute(Command::CheckFlat, &Options::default(), std::slice::from_ref(&doc)).unwrap();
        let r2 = execute(Command::CheckFlat, &Options::default(), &[again]).unwrap();
        prop_assert_eq!(r1.document().to_text(), r2.document().to_text());
    }
}

#[test]
fn counterexample_is_monotone_in_the_truncation() {
    for g in [Group::cyclic(2), Group::cyclic(3)] {
        let ok: Vec<bool> =
            (1..=4).map(|n| verify_counterexample(&g, n, false, 2).unwrap().outcome == Outcome::Yes).collect();
        for w in ok.windows(2) {
            assert!(!w[1] || w[0], "{ok:?}");
        }
    }
}
