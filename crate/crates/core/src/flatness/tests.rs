use super::*;
use crate::base::{Base, BaseObject, Group};
use crate::colim::{pointwise_colimit, weights_isomorphic, WeightDiagram};
use crate::linalg::Matrix;
use crate::ordcat::FinCategory;

fn free(b: &Base, k: &FinCategory) -> Arc<VCategory> {
    Arc::new(VCategory::free(b, k).unwrap())
}

fn coproduct(ws: Vec<Weight>) -> Weight {
    let d = WeightDiagram {
        shape: Arc::new(FinCategory::discrete(ws.len())),
        arrows: ws.iter().map(VNatTrans::identity).collect(),
        weights: ws,
    };
    pointwise_colimit(&d).unwrap().apex
}

/// The one-object `F_2`-category of dual numbers `F_2[x]/x²`.
fn dual_numbers() -> Arc<VCategory> {
    let b = Base::fin_vec(2).unwrap();
    let comp = Matrix::from_rows(2, 4, vec![1, 0, 0, 0, 0, 1, 1, 0]);
    Arc::new(
        VCategory::new(
            b,
            1,
            vec![BaseObject::vect(2)],
            vec![MorphismData::Matrix(comp)],
            vec![MorphismData::Matrix(Matrix::column(&[1, 0]))],
        )
        .unwrap(),
    )
}

/// The simple module over the dual numbers: `x` acts by zero.
fn simple_module(c: &Arc<VCategory>) -> Weight {
    Weight::new(c.clone(), vec![BaseObject::vect(1)], vec![MorphismData::Matrix(Matrix::from_rows(1, 2, vec![1, 0]))])
        .unwrap()
}

fn idempotent_monoid(b: &Base) -> Arc<VCategory> {
    let k = FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap();
    free(b, &k)
}

fn bases() -> Vec<Base> {
    vec![Base::fin_set(), Base::fin_gset(Group::cyclic(2)), Base::fin_cat(), Base::fin_vec(2).unwrap()]
}

#[test]
fn representables_are_flat_everywhere() {
    for b in bases() {
        let c = free(&b, &FinCategory::arrow());
        for obj in 0..2 {
            let m = Weight::yoneda(&c, obj);
            let r = is_flat(&m).unwrap();
            assert_eq!(r.outcome, Outcome::Yes, "{:?}: {r:?}", b.kind());
            assert!(oracle_flat(&m, 3).unwrap().is_yes(), "{:?}", b.kind());
            assert!(is_cauchy_weight(&m, 8).unwrap().is_yes());
        }
    }
}

#[test]
fn coproduct_on_discrete_category_fails_binary_product() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::discrete(2));
    let m = coproduct(vec![Weight::yoneda(&c, 0), Weight::yoneda(&c, 1)]);
    assert_eq!(is_flat(&m).unwrap().outcome, Outcome::No);
    let v = oracle_flat(&m, 3).unwrap();
    match &v.certificate {
        Certificate::LimitNotPreserved { diagram, .. } => assert!(diagram.contains("product"), "{diagram}"),
        other => panic!("unexpected certificate {other:?}"),
    }
    assert!(is_cauchy_weight(&m, 8).unwrap().is_no());
}

#[test]
fn terminal_weight_on_chain_is_flat_and_decomposes() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::chain(3));
    let m = Weight::terminal(&c).unwrap();
    let r = is_flat_with(&m, &FlatConfig { oracle: true, ..FlatConfig::default() }).unwrap();
    assert_eq!(r.outcome, Outcome::Yes);
    assert!(r.criterion(ORACLE).unwrap().is_yes());
    assert!(r.criterion(&j_final_name(0)).unwrap().is_yes());
    let d = filtered_decomposition(&m).unwrap();
    assert!(d.verdict.is_yes());
    assert!(counit_iso_check(&m).unwrap().is_yes());
    // Δ1 is represented by the terminal object 2.
    assert!(is_cauchy_weight(&m, 8).unwrap().is_yes());
}

#[test]
fn terminal_weight_on_discrete_pair_is_not_flat() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::discrete(2));
    let m = Weight::terminal(&c).unwrap();
    assert!(is_flat(&m).unwrap().verdict().is_no());
    assert!(oracle_flat(&m, 3).unwrap().is_no());
    let d = filtered_decomposition(&m).unwrap();
    assert!(d.verdict.is_no());
    // Every presheaf is a colimit of representables, filtered or not.
    assert!(counit_iso_check(&m).unwrap().is_yes());
}

#[test]
fn initial_weight_fails_the_empty_product() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::arrow());
    let m = Weight::initial(&c);
    assert!(is_flat(&m).unwrap().verdict().is_no());
    match oracle_flat(&m, 3).unwrap().certificate {
        Certificate::LimitNotPreserved { diagram, .. } => assert_eq!(diagram, "empty product"),
        other => panic!("unexpected certificate {other:?}"),
    }
}

#[test]
fn split_idempotent_gives_absolute_terminal_weight() {
    let b = Base::fin_set();
    let c = idempotent_monoid(&b);
    let m = Weight::terminal(&c).unwrap();
    assert!(is_flat(&m).unwrap().verdict().is_yes());
    assert!(oracle_flat(&m, 3).unwrap().is_yes());
    let v = is_cauchy_weight(&m, 8).unwrap();
    match v.certificate {
        Certificate::Splitting { objects, retraction, .. } => {
            assert_eq!(objects, vec![0]);
            assert_eq!(retraction.len(), 1);
        }
        other => panic!("unexpected certificate {other:?}"),
    }
}

#[test]
fn sum_of_scalars_is_flat_but_not_filtered() {
    let b = Base::fin_vec(2).unwrap();
    let c = Arc::new(VCategory::unit(&b));
    let (m, _) = linear::direct_sum(&c, &[Weight::yoneda(&c, 0), Weight::yoneda(&c, 0)]).unwrap();
    let r = is_flat_with(&m, &FlatConfig { oracle: true, completion: Some(2), ..FlatConfig::default() }).unwrap();
    assert_eq!(r.outcome, Outcome::Yes, "{r:?}");
    assert!(r.criterion(ELEMENTS_FILTERED).unwrap().is_no());
    assert!(r.criterion(SPLITTING).unwrap().is_yes());
    assert!(r.criterion(COMPLETION_FILTERED).unwrap().is_yes());
    assert!(r.criterion(ORACLE).unwrap().is_yes());
    assert!(is_cauchy_weight(&m, 8).unwrap().is_yes());
}

#[test]
fn simple_module_over_dual_numbers_is_not_flat() {
    let c = dual_numbers();
    let m = simple_module(&c);
    assert!(is_flat(&m).unwrap().verdict().is_no());
    let v = oracle_flat(&m, 3).unwrap();
    assert!(v.is_no(), "{v:?}");
    assert!(is_cauchy_weight(&m, 8).unwrap().is_no());
    // The regular module is free.
    let r = Weight::yoneda(&c, 0);
    assert!(is_flat(&r).unwrap().verdict().is_yes());
    assert!(oracle_flat(&r, 3).unwrap().is_yes());
}

#[test]
fn subfunctors_of_dual_numbers() {
    let c = dual_numbers();
    let cop = Arc::new(c.opposite());
    let r = Weight::yoneda(&cop, 0);
    // The only proper nonzero ideal is (x).
    let subs = linear::subfunctors(&r, 100).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].bases[0].cols, 1);
}

#[test]
fn double_category_criterion_agrees_with_oracle_on_cat() {
    let b = Base::fin_cat();
    let c = idempotent_monoid(&b);
    let m = Weight::terminal(&c).unwrap();
    let r = is_flat(&m).unwrap();
    let o = oracle_flat(&m, 2).unwrap();
    assert_eq!(r.outcome, o.outcome, "{r:?} vs {o:?}");
}

#[test]
fn report_serializes_with_stable_fields() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::arrow());
    let r = is_flat(&Weight::yoneda(&c, 1)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["outcome", "criteria", "certificate"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let back: FlatnessReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}

#[test]
fn kan_extension_of_representable_is_representable() {
    let b = Base::fin_set();
    let big = free(&b, &FinCategory::chain(3));
    let objects = [0, 1];
    let sub = Arc::new(big.full_subcategory(&objects));
    for t in 0..2 {
        let m = Weight::yoneda(&sub, t);
        let lan = extend_along_inclusion(&m, &big, &objects).unwrap();
        assert!(weights_isomorphic(&lan, &Weight::yoneda(&big, objects[t])).unwrap());
    }
    let m = Weight::terminal(&sub).unwrap();
    let lan = extend_along_inclusion(&m, &big, &objects).unwrap();
    assert_eq!(is_flat(&m).unwrap().outcome, is_flat(&lan).unwrap().outcome);
}
