use super::*;
use crate::base::Group;

fn free(b: &Base, k: &FinCategory) -> Arc<VCategory> {
    Arc::new(VCategory::free(b, k).unwrap())
}

/// One-object linear category with hom `F_p` (the unit V-category).
fn scalars(p: u32) -> Arc<VCategory> {
    Arc::new(VCategory::unit(&Base::fin_vec(p).unwrap()))
}

fn direct_sum(ws: Vec<Weight>) -> Weight {
    let k = ws.len();
    let b = ws[0].base().clone();
    let d = WeightDiagram {
        shape: Arc::new(FinCategory::discrete(k)),
        arrows: ws.iter().map(VNatTrans::identity).collect(),
        weights: ws,
    };
    let _ = b;
    pointwise_colimit(&d).unwrap().apex
}

#[test]
fn co_yoneda_on_free_categories() {
    for b in [Base::fin_set(), Base::fin_gset(Group::cyclic(2)), Base::fin_cat(), Base::fin_vec(2).unwrap()] {
        let c = free(&b, &FinCategory::arrow());
        let cop = Arc::new(c.opposite());
        for target in 0..2 {
            let h = corepresentable(&cop, target);
            for obj in 0..2 {
                let e = weighted_colimit(&Weight::yoneda(&c, obj), &h).unwrap();
                assert!(b.is_isomorphic(e.value(), h.value(obj)).unwrap(), "{:?}", b.kind());
                assert!(e.verify(&b, &b.test_objects()[..3]).unwrap());
            }
        }
    }
}

#[test]
fn yoneda_colimit_reproduces_sum_of_representables() {
    let b = Base::fin_vec(2).unwrap();
    let c = free(&b, &FinCategory::arrow());
    let m = direct_sum(vec![Weight::yoneda(&c, 0), Weight::yoneda(&c, 1)]);
    let (my, eps) = yoneda_colimit(&m).unwrap();
    eps.validate(&my, &m).unwrap();
    assert!(eps.is_iso(&my, &m));
}

#[test]
fn conical_colimit_of_terminal_weight() {
    // Δ1 over the free category on 0 -> 1: the colimit of the transpose is
    // the value at the terminal object 1.
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::arrow());
    let cop = Arc::new(c.opposite());
    let h = corepresentable(&cop, 0);
    let e = weighted_colimit(&Weight::terminal(&c).unwrap(), &h).unwrap();
    assert_eq!(e.value(), &BaseObject::set(1));
}

#[test]
fn end_at_representable_is_value() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::chain(3));
    let cop = Arc::new(c.opposite());
    let k = corepresentable(&cop, 0);
    for obj in 0..3 {
        let n = corepresentable(&cop, obj);
        let cone = weighted_limit(&n, &k).unwrap();
        assert_eq!(cone.apex.cells(), k.value(obj).cells());
    }
}

/// Data of `2_{X+X}` with a covariant diagram given by `g1, g2`.
fn n_x_limit(b: &Base, x: &BaseObject, d1: &BaseObject, d2: &BaseObject, g1: &MorphismData, g2: &MorphismData) -> Cone {
    let xx = b.colimit(&Diagram::discrete(b, vec![x.clone(), x.clone()])).unwrap();
    let y = xx.cocone.apex.clone();
    let two = two_category(b, &y).unwrap();
    let cop = Arc::new(two.opposite());
    let empty = |dom: &BaseObject, cod: &BaseObject| b.hom_set(dom, cod).unwrap().remove(0);
    let unitor = |o: &BaseObject| b.identity(o);
    // N_X: N(*1) = I, N(*2) = X, the action (X + X) ⊗ I -> X is the codiagonal.
    let nabla = b.factor_through_colimit(
        &Diagram::discrete(b, vec![x.clone(), x.clone()]),
        &xx,
        x,
        &[b.identity(x), b.identity(x)],
    );
    let i = b.unit();
    // Evaluation form on the opposite: act(a, c): 2^op(a, c) ⊗ W(c) -> W(a).
    let n_act = vec![unitor(&i), empty(&b.tensor(&b.empty(), x).unwrap(), &i), nabla, unitor(x)];
    let n = Weight::new(cop.clone(), vec![i.clone(), x.clone()], n_act).unwrap();
    let g = b.factor_through_colimit(
        &Diagram::discrete(b, vec![x.clone(), x.clone()]),
        &xx,
        &b.internal_hom(d1, d2).unwrap(),
        &[b.transpose(x, d1, d2, g1).unwrap(), b.transpose(x, d1, d2, g2).unwrap()],
    );
    let k_act =
        vec![unitor(d1), empty(&b.tensor(&b.empty(), d2).unwrap(), d1), b.untranspose(d1, d2, &g).unwrap(), unitor(d2)];
    let k = Weight::new(cop, vec![d1.clone(), d2.clone()], k_act).unwrap();
    weighted_limit(&n, &k).unwrap()
}

#[test]
fn n_x_limit_of_equal_maps_is_source() {
    let b = Base::fin_set();
    let (x, d1, d2) = (BaseObject::set(2), BaseObject::set(3), BaseObject::set(2));
    let g: Vec<MorphismData> = b.hom_set(&b.tensor(&x, &d1).unwrap(), &d2).unwrap();
    let cone = n_x_limit(&b, &x, &d1, &d2, &g[5], &g[5]);
    assert_eq!(cone.apex, d1);
    // Distinct maps cut the source down to where they agree.
    let (g1, g2) = (&g[0], &g[g.len() - 1]);
    let cone = n_x_limit(&b, &x, &d1, &d2, g1, g2);
    let agree = (0..3).filter(|&e| (0..2).all(|u| g1.cells()[u * 3 + e] == g2.cells()[u * 3 + e])).count();
    assert_eq!(cone.apex.cells(), agree);
}

#[test]
fn copowers() {
    let b = Base::fin_vec(2).unwrap();
    let c = scalars(2);
    let (v, obj) = copower_in(&c, &b.unit(), 0).unwrap();
    assert!(v.is_yes());
    assert_eq!(obj, Some(0));
    let (v, _) = copower_in(&c, &BaseObject::vect(2), 0).unwrap();
    assert!(v.is_no());
    let w = copower(&BaseObject::vect(2), &Weight::yoneda(&c, 0)).unwrap();
    let sum = direct_sum(vec![Weight::yoneda(&c, 0), Weight::yoneda(&c, 0)]);
    assert!(weights_isomorphic(&w, &sum).unwrap());
    let s = Base::fin_set();
    let cs = free(&s, &FinCategory::arrow());
    let w = copower(&BaseObject::set(2), &Weight::yoneda(&cs, 1)).unwrap();
    let sum = direct_sum(vec![Weight::yoneda(&cs, 1), Weight::yoneda(&cs, 1)]);
    assert!(weights_isomorphic(&w, &sum).unwrap());
}

#[test]
fn karoubi_of_idempotent_monoid() {
    let b = Base::fin_set();
    let k = FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap();
    let c = free(&b, &k);
    let r = karoubi(&c).unwrap();
    let kc = &r.completed;
    assert_eq!(kc.num_objects(), 2);
    let e = 1 - r.embedding.obj_map[0];
    assert_eq!(kc.hom(e, e).cells(), 1);
    assert_eq!(kc.hom(r.embedding.obj_map[0], e).cells(), 1);
    assert!(r.embedding.is_fully_faithful().is_yes());
    // The split object is a retract but not isomorphic to the original.
    assert!(find_object_iso(kc, 0, 1).unwrap().is_none());
    // Completing again adds nothing.
    assert!(is_cauchy_complete(kc, &[1, 1], 1).unwrap().is_yes());
    assert!(is_cauchy_complete(&c, &[1], 1).unwrap().is_no());
}

#[test]
fn karoubi_without_idempotents_is_equivalence() {
    let b = Base::fin_gset(Group::cyclic(2));
    let c = free(&b, &FinCategory::chain(3));
    let r = karoubi(&c).unwrap();
    assert_eq!(r.completed.num_objects(), 3);
    assert!(is_equivalence(&r.embedding).unwrap().is_yes());
}

#[test]
fn matrix_completion_sizes() {
    let c = scalars(2);
    let m1 = matrix_completion(&c, 1).unwrap();
    assert_eq!(m1.completed.num_objects(), 1);
    assert!(is_equivalence(&m1.embedding).unwrap().is_yes());
    let m2 = matrix_completion(&c, 2).unwrap();
    assert_eq!(m2.completed.num_objects(), 2);
    assert_eq!(m2.completed.hom(1, 1).dim(), 4);
    assert_eq!(m2.completed.hom(0, 1).dim(), 2);
    assert!(m2.embedding.is_fully_faithful().is_yes());
}

#[test]
fn cauchy_completion_of_scalars() {
    let c = scalars(2);
    assert!(is_cauchy_complete(&c, &[1], 2).unwrap().is_no());
    let r = cauchy_completion(&c, 2).unwrap();
    // One object per isomorphism class: 0, F_2, F_2^2.
    assert_eq!(r.completed.num_objects(), 3);
    assert_eq!(iso_classes(&r.completed).unwrap().len(), 3);
    assert!(r.embedding.is_fully_faithful().is_yes());
    let lengths = provenance_lengths(&r.provenance);
    assert!(is_cauchy_complete(&r.completed, &lengths, 2).unwrap().is_yes());
}

#[test]
fn biproduct_search_finds_sum() {
    let c = scalars(2);
    let m2 = matrix_completion(&c, 2).unwrap();
    let (s, _, _) = find_biproduct(&m2.completed, 0, 0).unwrap().unwrap();
    assert_eq!(s, 1);
}

#[test]
fn realization_of_representable_presheaf() {
    let b = Base::fin_gset(Group::cyclic(2));
    let c = free(&b, &FinCategory::arrow());
    for obj in 0..2 {
        let y = Weight::yoneda(&c, obj);
        let u = y.underlying_presheaf().unwrap();
        let r = realize_presheaf(&c, &u).unwrap();
        assert!(weights_isomorphic(&r.apex, &y).unwrap());
    }
}

#[test]
fn pointwise_limits_of_representables() {
    // Product of the two representables over the discrete category on two
    // objects is empty everywhere.
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::discrete(2));
    let d = WeightDiagram {
        shape: Arc::new(FinCategory::discrete(2)),
        weights: vec![Weight::yoneda(&c, 0), Weight::yoneda(&c, 1)],
        arrows: vec![VNatTrans::identity(&Weight::yoneda(&c, 0)), VNatTrans::identity(&Weight::yoneda(&c, 1))],
    };
    let l = pointwise_limit(&d).unwrap();
    assert!(l.apex.values().iter().all(|v| v.cells() == 0));
    let s = pointwise_colimit(&d).unwrap();
    assert!(s.apex.values().iter().all(|v| v.cells() == 1));
}

#[test]
fn power_of_representable() {
    let b = Base::fin_set();
    let c = free(&b, &FinCategory::arrow());
    let p = power(&BaseObject::set(2), &Weight::yoneda(&c, 1)).unwrap();
    assert_eq!(p.values().iter().map(|v| v.cells()).collect::<Vec<_>>(), vec![1, 1]);
}
