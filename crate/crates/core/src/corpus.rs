//! Seeded random instances for property checks and the `corpus` command.
//!
//! Every instance is drawn from its own ChaCha stream keyed by the corpus
//! seed and the instance id, so results do not depend on evaluation order
//! and the parallel runner is reproducible byte for byte.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{Base, BaseObject, Group};
use crate::colim::{pointwise_colimit, WeightDiagram};
use crate::enriched::{discrete_map, SetPresheaf, VCategory, VNatTrans, Weight};
use crate::flatness::{self, FlatnessReport};
use crate::ordcat::{FinCategory, OrdFunctor, Presentation, Presented};
use crate::scenarios::build_gset_counterexample;
use crate::verdict::Outcome;

/// The random stream for instance `id` of a corpus.
pub fn instance_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A random finite category given by generators and relations.  Objects
/// are ordered; generators mostly go forward, with optional idempotent or
/// involutive endomorphisms, a section of one generator, and commuting
/// triangles.  Draws are retried until the category has at most
/// `max_hom` arrows between any two objects.
pub fn random_category<R: Rng>(rng: &mut R, max_objects: usize, max_hom: usize) -> Presented {
    loop {
        let n = rng.gen_range(1..=max_objects);
        let mut p = Presentation::new(n);
        let mut forward = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let k = *[0, 0, 1, 1, 1, 2].choose(rng).expect("nonempty");
                for _ in 0..k {
                    forward.push((p.generator(i, j), i, j));
                }
            }
        }
        for i in 0..n {
            if rng.gen_bool(0.25) {
                let e = p.generator(i, i);
                let rhs = if rng.gen_bool(0.5) { vec![e] } else { vec![] };
                p.relate(i, vec![e, e], rhs);
            }
        }
        if !forward.is_empty() && rng.gen_bool(0.2) {
            let &(f, i, j) = forward.choose(rng).expect("nonempty");
            let t = p.generator(j, i);
            p.relate(j, vec![t, f], vec![]);
        }
        for &(a, i, j) in &forward {
            for &(b, j2, k) in &forward {
                if j2 != j {
                    continue;
                }
                for &(c, i2, k2) in &forward {
                    if (i2, k2) == (i, k) && rng.gen_bool(0.6) {
                        p.relate(i, vec![a, b], vec![c]);
                    }
                }
            }
        }
        let Ok(pr) = p.enumerate(256) else { continue };
        let k = &pr.category;
        let widest = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| k.hom(a, b).len()).max();
        if k.num_arrows() <= 32 && widest.unwrap_or(0) <= max_hom {
            return pr;
        }
    }
}

/// A random functor on a presented category with sets of size at most
/// `max_size`: a presheaf on `K` when `covariant` is false, otherwise a
/// covariant functor stored as a presheaf on `K^op` (arrow ids agree).
/// Generator images are drawn at random and kept once the relations hold;
/// after repeated failures the terminal functor is returned.
pub fn random_functor<R: Rng>(rng: &mut R, pr: &Presented, max_size: usize, covariant: bool) -> SetPresheaf {
    let k = &pr.category;
    let category = Arc::new(if covariant { k.opposite() } else { k.clone() });
    let n = k.num_objects();
    for _ in 0..40 {
        let sizes: Vec<usize> =
            (0..n).map(|_| if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=max_size) }).collect();
        let mut gen_maps = Vec::with_capacity(pr.generator_arrows.len());
        let mut possible = true;
        for &a in &pr.generator_arrows {
            let (from, to) = if covariant { (k.src(a), k.tgt(a)) } else { (k.tgt(a), k.src(a)) };
            if sizes[from] > 0 && sizes[to] == 0 {
                possible = false;
                break;
            }
            gen_maps.push((0..sizes[from]).map(|_| rng.gen_range(0..sizes[to])).collect::<Vec<usize>>());
        }
        if !possible {
            continue;
        }
        let maps = (0..k.num_arrows())
            .map(|f| {
                let word = &pr.words[f];
                let from = if covariant { k.src(f) } else { k.tgt(f) };
                (0..sizes[from])
                    .map(|x| {
                        let apply = |x: usize, g: &usize| gen_maps[*g][x];
                        if covariant {
                            word.iter().fold(x, apply)
                        } else {
                            word.iter().rev().fold(x, apply)
                        }
                    })
                    .collect()
            })
            .collect();
        if let Ok(p) = SetPresheaf::new(category.clone(), sizes, maps) {
            return p;
        }
    }
    SetPresheaf::terminal(category)
}

/// The free weight `N · I` on the free V-category over `K`: the value at
/// `a` is the discrete object on `N(a)` and the action is that of `N`.
pub fn free_weight(
    c: &Arc<VCategory>,
    k: &FinCategory,
    n: &SetPresheaf,
) -> Result<Weight, crate::enriched::EnrichedError> {
    let b = &c.base;
    let objs = k.num_objects();
    let values = n.sizes.iter().map(|&s| b.discrete(s)).collect();
    let mut act = Vec::with_capacity(objs * objs);
    for a in 0..objs {
        for x in 0..objs {
            let hom = k.hom(a, x);
            // M(x) ⊗ C(a, x) -> M(a), cell (m, f) at m·|K(a,x)| + f.
            let cells: Vec<usize> =
                (0..n.sizes[x]).flat_map(|m| hom.iter().map(move |&f| (m, f))).map(|(m, f)| n.maps[f][m]).collect();
            act.push(discrete_map(b, &cells, n.sizes[a]));
        }
    }
    Weight::new(c.clone(), values, act)
}

/// The free covariant functor on the free V-category over `K`, as a
/// weight on `cop` (the opposite of that V-category).  `h` is a presheaf
/// on `K^op` whose map at arrow `f: a -> b` of `K` is `H(f): H(a) -> H(b)`.
pub fn free_covariant(
    cop: &Arc<VCategory>,
    k: &FinCategory,
    h: &SetPresheaf,
) -> Result<Weight, crate::enriched::EnrichedError> {
    let b = &cop.base;
    let objs = k.num_objects();
    let values = h.sizes.iter().map(|&s| b.discrete(s)).collect();
    let mut act = Vec::with_capacity(objs * objs);
    for a in 0..objs {
        for x in 0..objs {
            // K(x, a) ⊗ H(x) -> H(a), the hom factor outer.
            let hom = k.hom(x, a);
            let cells: Vec<usize> =
                hom.iter().flat_map(|&f| (0..h.sizes[x]).map(move |m| (m, f))).map(|(m, f)| h.maps[f][m]).collect();
            act.push(discrete_map(b, &cells, h.sizes[a]));
        }
    }
    Weight::new(cop.clone(), values, act)
}

fn coproduct(ws: Vec<Weight>) -> Option<Weight> {
    let d = WeightDiagram {
        shape: Arc::new(FinCategory::discrete(ws.len())),
        arrows: ws.iter().map(VNatTrans::identity).collect(),
        weights: ws,
    };
    pointwise_colimit(&d).ok().map(|c| c.apex)
}

/// The four bases of the corpus, cycled by instance id.
pub fn corpus_bases() -> [Base; 4] {
    [Base::fin_set(), Base::fin_gset(Group::cyclic(2)), Base::fin_cat(), Base::fin_vec(2).expect("2 is prime")]
}

/// One corpus weight with a short description of how it was drawn.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: u64,
    pub base: &'static str,
    pub description: String,
    pub weight: Weight,
}

fn small_category_value<R: Rng>(rng: &mut R) -> BaseObject {
    let k = match rng.gen_range(0..4) {
        0 => FinCategory::arrow(),
        1 => FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).expect("idempotent monoid"),
        2 => FinCategory::monoid(&[vec![0, 1], vec![1, 0]], 0).expect("Z/2"),
        _ => FinCategory::discrete(2),
    };
    BaseObject::cat(k)
}

/// Draw instance `id` of the corpus with the given seed.
pub fn instance(seed: u64, id: u64) -> Instance {
    let mut rng = instance_rng(seed, id);
    let bases = corpus_bases();
    let base = bases[(id % 4) as usize].clone();
    let tag = base.tag();
    // Over G-sets, some domains carry genuinely non-trivial actions.
    if tag == "fingset" && rng.gen_bool(0.25) {
        let n = rng.gen_range(1..=2);
        let literal = rng.gen_bool(0.5);
        let c = Arc::new(build_gset_counterexample(&Group::cyclic(2), n, literal).expect("valid parameters"));
        let (what, weight) = match rng.gen_range(0..3) {
            0 => {
                let o = rng.gen_range(0..=n);
                (format!("C({{-}}, {o})"), Weight::yoneda(&c, o))
            }
            1 => ("terminal".to_string(), Weight::terminal(&c).expect("cartesian")),
            _ => {
                let (a, d) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
                let w = coproduct(vec![Weight::yoneda(&c, a), Weight::yoneda(&c, d)]).expect("coproducts exist");
                (format!("C(-, {a}) + C(-, {d})"), w)
            }
        };
        let kind = if literal { "literal" } else { "tail" };
        return Instance {
            id,
            base: tag,
            description: format!("{what} on the {kind} G-set ladder with {} objects", n + 1),
            weight,
        };
    }
    let max_hom = if tag == "finvec" { 2 } else { 4 };
    let max_objects = if tag == "finvec" || tag == "fincat" { 3 } else { 4 };
    let pr = random_category(&mut rng, max_objects, max_hom);
    let k = &pr.category;
    let c = Arc::new(VCategory::free(&base, k).expect("free V-category"));
    let shape = format!("{} objects, {} arrows", k.num_objects(), k.num_arrows());
    let n = k.num_objects();
    let (what, weight) = loop {
        match rng.gen_range(0..6) {
            0 => {
                let o = rng.gen_range(0..n);
                break (format!("C(-, {o})"), Weight::yoneda(&c, o));
            }
            1 => {
                let t = SetPresheaf::terminal(Arc::new(k.clone()));
                break ("terminal".to_string(), free_weight(&c, k, &t).expect("terminal presheaf"));
            }
            2 => {
                let (a, d) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if let Some(w) = coproduct(vec![Weight::yoneda(&c, a), Weight::yoneda(&c, d)]) {
                    break (format!("C(-, {a}) + C(-, {d})"), w);
                }
            }
            3 if tag == "fincat" => {
                let x = small_category_value(&mut rng);
                if let Ok(w) = Weight::constant(&c, &x) {
                    break ("constant at a small category".to_string(), w);
                }
            }
            4 if tag == "fingset" => {
                let x = if rng.gen_bool(0.5) {
                    BaseObject::gset(Group::cyclic(2).regular_action())
                } else {
                    BaseObject::gset(vec![vec![0, 1, 2], vec![0, 2, 1]])
                };
                if let Ok(w) = Weight::constant(&c, &x) {
                    break (format!("constant at a {}-element G-set", x.cells()), w);
                }
            }
            _ => {
                let p = random_functor(&mut rng, &pr, 2, false);
                if let Ok(w) = free_weight(&c, k, &p) {
                    break (format!("random presheaf of sizes {:?}", p.sizes), w);
                }
            }
        }
    };
    Instance { id, base: tag, description: format!("{what} on a category with {shape}"), weight }
}

pub fn generate(seed: u64, count: usize) -> Vec<Instance> {
    (0..count as u64).into_par_iter().map(|id| instance(seed, id)).collect()
}

/// Result of running the decider and the oracle on one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: u64,
    pub base: String,
    pub description: String,
    pub decider: Outcome,
    pub oracle: Outcome,
    /// `None` when either side is unknown.
    pub agree: Option<bool>,
    pub report: Option<FlatnessReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub flat: usize,
    pub not_flat: usize,
    pub unknown: usize,
    pub agree: usize,
    pub disagree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub bound: usize,
    pub summary: Summary,
    pub results: Vec<InstanceResult>,
}

/// Decider and oracle on one instance.
pub fn evaluate(inst: &Instance, bound: usize) -> InstanceResult {
    let report = flatness::is_flat(&inst.weight);
    let oracle = flatness::oracle_flat(&inst.weight, bound);
    let decider = report.as_ref().map(|r| r.outcome).unwrap_or(Outcome::Unknown);
    let oracle_outcome = oracle.as_ref().map(|v| v.outcome).unwrap_or(Outcome::Unknown);
    let agree = match (decider, oracle_outcome) {
        (Outcome::Unknown, _) | (_, Outcome::Unknown) => None,
        (a, b) => Some(a == b),
    };
    let error = match (&report, &oracle) {
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        _ => None,
    };
    InstanceResult {
        id: inst.id,
        base: inst.base.to_string(),
        description: inst.description.clone(),
        decider,
        oracle: oracle_outcome,
        agree,
        report: report.ok(),
        error,
    }
}

/// Generate and evaluate `count` instances in parallel; results are in id
/// order.
pub fn run(seed: u64, count: usize, bound: usize) -> CorpusReport {
    let results: Vec<InstanceResult> =
        (0..count as u64).into_par_iter().map(|id| evaluate(&instance(seed, id), bound)).collect();
    let mut summary = Summary { total: results.len(), ..Summary::default() };
    for r in &results {
        match r.decider {
            Outcome::Yes => summary.flat += 1,
            Outcome::No => summary.not_flat += 1,
            Outcome::Unknown => summary.unknown += 1,
        }
        match r.agree {
            Some(true) => summary.agree += 1,
            Some(false) => summary.disagree += 1,
            None => {}
        }
    }
    CorpusReport { seed, bound, summary, results }
}

/// The inclusion of the full subcategory of `k` on `objects`.
pub fn full_inclusion(k: &Arc<FinCategory>, objects: &[usize]) -> OrdFunctor {
    let mut arrows = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (i, &a) in objects.iter().enumerate() {
        for (j, &b) in objects.iter().enumerate() {
            for f in k.hom(a, b) {
                index.insert(f, arrows.len());
                arrows.push((f, i, j));
            }
        }
    }
    let src = arrows.iter().map(|a| a.1).collect();
    let tgt = arrows.iter().map(|a| a.2).collect();
    let ident = objects.iter().map(|&a| index[&k.identity(a)]).collect();
    let sub = FinCategory::from_fn(objects.len(), src, tgt, ident, |g, f| {
        index.get(&k.compose(arrows[g].0, arrows[f].0)).copied()
    })
    .expect("full subcategory");
    let arrow_map = arrows.iter().map(|a| a.0).collect();
    OrdFunctor::new(Arc::new(sub), k.clone(), objects.to_vec(), arrow_map).expect("inclusion functor")
}

/// A random linear category: the free `FinVec(2)`-category on a random
/// category with hom-sets of size at most 2.
pub fn random_linear_category<R: Rng>(rng: &mut R) -> Arc<VCategory> {
    let pr = random_category(rng, 3, 2);
    Arc::new(VCategory::free(&Base::fin_vec(2).expect("prime"), &pr.category).expect("free linear category"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_categories_respect_the_hom_bound() {
        let mut rng = instance_rng(7, 0);
        for _ in 0..50 {
            let pr = random_category(&mut rng, 4, 3);
            let k = &pr.category;
            k.validate().unwrap();
            for a in 0..k.num_objects() {
                for b in 0..k.num_objects() {
                    assert!(k.hom(a, b).len() <= 3);
                }
            }
        }
    }

    #[test]
    fn random_functors_are_functorial() {
        let mut rng = instance_rng(11, 3);
        for _ in 0..30 {
            let pr = random_category(&mut rng, 3, 4);
            for covariant in [false, true] {
                random_functor(&mut rng, &pr, 3, covariant).validate().unwrap();
            }
        }
    }

    #[test]
    fn free_weight_of_representable_is_yoneda() {
        let k = FinCategory::chain(3);
        for b in corpus_bases() {
            let c = Arc::new(VCategory::free(&b, &k).unwrap());
            let n = SetPresheaf::representable(Arc::new(k.clone()), 1);
            let w = free_weight(&c, &k, &n).unwrap();
            assert!(crate::colim::weights_isomorphic(&w, &Weight::yoneda(&c, 1)).unwrap(), "{}", b.tag());
        }
    }

    #[test]
    fn free_covariant_of_corepresentable_is_yoneda_on_the_opposite() {
        let k = FinCategory::chain(3);
        for b in corpus_bases() {
            let c = Arc::new(VCategory::free(&b, &k).unwrap());
            let cop = Arc::new(c.opposite());
            let kop = Arc::new(k.opposite());
            // C(0, -) as a presheaf on K^op.
            let h = SetPresheaf::representable(kop, 0);
            let w = free_covariant(&cop, &k, &h).unwrap();
            assert!(crate::colim::weights_isomorphic(&w, &Weight::yoneda(&cop, 0)).unwrap(), "{}", b.tag());
        }
    }

    #[test]
    fn instances_are_reproducible() {
        for id in 0..8 {
            let a = instance(42, id);
            let b = instance(42, id);
            assert_eq!(a.description, b.description);
            assert_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn full_inclusion_of_everything_is_identity_like() {
        let k = Arc::new(FinCategory::chain(3));
        let j = full_inclusion(&k, &[0, 2]);
        assert!(j.is_fully_faithful().is_yes());
        assert!(j.is_final().is_yes());
        let j = full_inclusion(&k, &[0, 1]);
        assert!(j.is_final().is_no());
    }
}
