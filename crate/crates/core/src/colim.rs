//! Weighted colimits and limits, completions and realization of ordinary
//! presheaves.
//!
//! A covariant V-functor `H: C -> V` is handled as a weight on `C^op`, so
//! `H(f)` for `f ∈ C(a, b)` is the action `C^op(b, a) ⊗ H(a) -> H(b)`.
//! The coend `M ∗ H` is one colimit in the base over a shape with a vertex
//! `M(x) ⊗ H(x)` per object and a span `M(b) ⊗ C(a, b) ⊗ H(a)` per pair,
//! each span mapping to vertex `a` through the action of `M` and to vertex
//! `b` through the action of `H`.  Ends are dual.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{Base, BaseError, BaseKind, BaseObject, Colimit, Cone, Diagram, MorphismData};
use crate::enriched::{representing_point, EnrichedError, SetPresheaf, VCategory, VFunctor, VNatTrans, Weight};
use crate::linalg::{self, Matrix};
use crate::ordcat::{CategoryError, FinCategory, Presentation};
use crate::verdict::{Certificate, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColimError {
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Enriched(#[from] EnrichedError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("{0}")]
    Unsupported(String),
    #[error("the weight and the diagram live over different categories")]
    DomainMismatch,
}

/// Size limit for enumerating the coend and end shapes.
const SHAPE_LIMIT: usize = 1 << 20;

/// The coend shape on `n` objects: vertices `0..n`, spans `n + a·n + b`,
/// with generator arrows from each span to vertices `a` and `b`.
fn coend_shape(n: usize, out_of_spans: bool) -> Result<(Arc<FinCategory>, Vec<usize>, Vec<usize>), ColimError> {
    let mut p = Presentation::new(n + n * n);
    let mut gens = Vec::with_capacity(2 * n * n);
    for a in 0..n {
        for b in 0..n {
            let s = n + a * n + b;
            if out_of_spans {
                gens.push((p.generator(s, a), p.generator(s, b)));
            } else {
                gens.push((p.generator(a, s), p.generator(b, s)));
            }
        }
    }
    let pr = p.enumerate(SHAPE_LIMIT)?;
    let left = gens.iter().map(|g| pr.generator_arrows[g.0]).collect();
    let right = gens.iter().map(|g| pr.generator_arrows[g.1]).collect();
    Ok((Arc::new(pr.category), left, right))
}

/// Check that `h` is a covariant functor on the domain of `m`, i.e. a
/// weight on its opposite.
fn check_covariant(m: &Weight, h: &Weight) -> Result<(), ColimError> {
    let (c, d) = (&m.domain, &h.domain);
    let n = c.num_objects();
    if d.num_objects() != n || c.base != d.base {
        return Err(ColimError::DomainMismatch);
    }
    for a in 0..n {
        for b in 0..n {
            if c.hom(a, b) != d.hom(b, a) {
                return Err(ColimError::DomainMismatch);
            }
        }
    }
    Ok(())
}

/// The coend `M ∗ H` with the data needed to map out of it.
#[derive(Clone, Debug)]
pub struct Coend {
    pub diagram: Diagram,
    pub colimit: Colimit,
    n: usize,
    left: Vec<usize>,
}

impl Coend {
    pub fn value(&self) -> &BaseObject {
        &self.colimit.cocone.apex
    }

    /// `ρ_x: M(x) ⊗ H(x) -> M ∗ H`.
    pub fn leg(&self, x: usize) -> &MorphismData {
        &self.colimit.cocone.legs[x]
    }

    pub fn legs(&self) -> &[MorphismData] {
        &self.colimit.cocone.legs[..self.n]
    }

    fn extend(&self, base: &Base, family: &[MorphismData]) -> Vec<MorphismData> {
        let n = self.n;
        let mut out = family.to_vec();
        for a in 0..n {
            for b in 0..n {
                out.push(base.compose(&family[a], &self.diagram.arrows[self.left[a * n + b]]));
            }
        }
        out
    }

    /// The map out of `M ∗ H` induced by an extranatural family
    /// `φ_x: M(x) ⊗ H(x) -> Z`.
    pub fn factor(&self, base: &Base, z: &BaseObject, family: &[MorphismData]) -> MorphismData {
        base.factor_through_colimit(&self.diagram, &self.colimit, z, &self.extend(base, family))
    }

    /// The map `Y ⊗ (M ∗ H) -> Z` induced by `φ_x: Y ⊗ M(x) ⊗ H(x) -> Z`.
    pub fn factor_tensor(&self, base: &Base, y: &BaseObject, z: &BaseObject, family: &[MorphismData]) -> MorphismData {
        let n = self.n;
        let mut full = family.to_vec();
        for a in 0..n {
            for b in 0..n {
                let span = &self.diagram.objects[n + a * n + b];
                let l = &self.diagram.arrows[self.left[a * n + b]];
                full.push(
                    base.compose(&family[a], &base.tensor_mor(&base.identity(y), l, span, &self.diagram.objects[a])),
                );
            }
        }
        base.factor_tensor_colimit(y, &self.diagram, &self.colimit, z, &full)
    }

    /// Exhaustive universality against the given test objects.
    pub fn verify(&self, base: &Base, tests: &[BaseObject]) -> Result<bool, ColimError> {
        Ok(base.verify_colimit(&self.diagram, &self.colimit, tests)?)
    }
}

/// `M ∗ H` for a weight `M` on `C` and a covariant `H: C -> V` given as a
/// weight on `C^op`.
pub fn weighted_colimit(m: &Weight, h: &Weight) -> Result<Coend, ColimError> {
    check_covariant(m, h)?;
    let b = m.base();
    let c = &m.domain;
    let n = c.num_objects();
    let (shape, left, right) = coend_shape(n, true)?;
    let mut objects = Vec::with_capacity(n + n * n);
    for x in 0..n {
        objects.push(b.tensor(m.value(x), h.value(x))?);
    }
    for a in 0..n {
        for d in 0..n {
            objects.push(b.tensor(&b.tensor(m.value(d), c.hom(a, d))?, h.value(a))?);
        }
    }
    let mut arrows = vec![MorphismData::Cells(vec![]); shape.num_arrows()];
    for (o, x) in objects.iter().enumerate() {
        arrows[shape.identity(o)] = b.identity(x);
    }
    for a in 0..n {
        for d in 0..n {
            let k = a * n + d;
            let ma = b.compose(m.act(a, d), &b.symmetry(m.value(d), c.hom(a, d)));
            arrows[left[k]] = b.tensor_mor(&ma, &b.identity(h.value(a)), h.value(a), h.value(a));
            let ch = b.tensor(c.hom(a, d), h.value(a))?;
            arrows[right[k]] = b.tensor_mor(&b.identity(m.value(d)), h.act(d, a), &ch, h.value(d));
        }
    }
    let diagram = Diagram::new(b, shape, objects, arrows)?;
    let colimit = b.colimit(&diagram)?;
    Ok(Coend { diagram, colimit, n, left })
}

/// `M ∗ τ` for a natural transformation `τ: H -> H'` of covariant functors.
pub fn coend_map_right(m: &Weight, from: &Coend, to: &Coend, h: &Weight, h2: &Weight, tau: &VNatTrans) -> MorphismData {
    let b = m.base();
    let family: Vec<MorphismData> = (0..m.domain.num_objects())
        .map(|x| {
            let t = b.tensor_mor(&b.identity(m.value(x)), &tau.components[x], h.value(x), h2.value(x));
            b.compose(to.leg(x), &t)
        })
        .collect();
    from.factor(b, to.value(), &family)
}

/// `σ ∗ H` for a natural transformation `σ: M -> M'` of weights.
pub fn coend_map_left(sigma: &VNatTrans, from: &Coend, to: &Coend, h: &Weight) -> MorphismData {
    let b = h.base();
    let family: Vec<MorphismData> = (0..h.domain.num_objects())
        .map(|x| {
            let t = b.tensor_mor(&sigma.components[x], &b.identity(h.value(x)), h.value(x), h.value(x));
            b.compose(to.leg(x), &t)
        })
        .collect();
    from.factor(b, to.value(), &family)
}

/// The covariant representable `C(c, -)` as a weight on `cop = C^op`.
pub fn corepresentable(cop: &Arc<VCategory>, c: usize) -> Weight {
    Weight::yoneda(cop, c)
}

/// `M ∗ Y` for the Yoneda embedding, computed pointwise, together with
/// the canonical map `M ∗ Y -> M`.
pub fn yoneda_colimit(m: &Weight) -> Result<(Weight, VNatTrans), ColimError> {
    let b = m.base();
    let c = &m.domain;
    let n = c.num_objects();
    let cop = Arc::new(c.opposite());
    let coends: Vec<Coend> =
        (0..n).map(|d| weighted_colimit(m, &corepresentable(&cop, d))).collect::<Result<_, _>>()?;
    let values: Vec<BaseObject> = coends.iter().map(|e| e.value().clone()).collect();
    let mut act = Vec::with_capacity(n * n);
    for d in 0..n {
        for e in 0..n {
            // C(d, e) ⊗ M(x) ⊗ C(e, x) -> M(x) ⊗ C(d, x) -> (M ∗ Y)(d)
            let family: Vec<MorphismData> = (0..n)
                .map(|x| {
                    let mx_cex = b.tensor(m.value(x), c.hom(e, x)).expect("tensor");
                    let swap = b.symmetry(c.hom(d, e), &mx_cex);
                    let inner = b.tensor(c.hom(e, x), c.hom(d, e)).expect("tensor");
                    let comp = b.tensor_mor(&b.identity(m.value(x)), c.comp(d, e, x), &inner, c.hom(d, x));
                    b.compose(coends[d].leg(x), &b.compose(&comp, &swap))
                })
                .collect();
            act.push(coends[e].factor_tensor(b, c.hom(d, e), &values[d], &family));
        }
    }
    let w = Weight::new(c.clone(), values, act)?;
    let components = (0..n)
        .map(|d| {
            let family: Vec<MorphismData> =
                (0..n).map(|x| b.compose(m.act(d, x), &b.symmetry(m.value(x), c.hom(d, x)))).collect();
            coends[d].factor(b, m.value(d), &family)
        })
        .collect();
    Ok((w, VNatTrans { components }))
}

/// The end `{N, K}` for covariant `N, K: C -> V` (weights on `C^op`),
/// with its projections `{N, K} -> [N(x), K(x)]`.
pub fn weighted_limit(n: &Weight, k: &Weight) -> Result<Cone, ColimError> {
    if n.domain != k.domain {
        return Err(ColimError::DomainMismatch);
    }
    let b = n.base();
    let cop = &n.domain;
    let m = cop.num_objects();
    let hom = |a: usize, d: usize| cop.hom(d, a); // C(a, d)
    let (shape, from_a, from_b) = coend_shape(m, false)?;
    let mut objects = Vec::with_capacity(m + m * m);
    for x in 0..m {
        objects.push(b.internal_hom(n.value(x), k.value(x))?);
    }
    for a in 0..m {
        for d in 0..m {
            objects.push(b.internal_hom(&b.tensor(hom(a, d), n.value(a))?, k.value(d))?);
        }
    }
    let mut arrows = vec![MorphismData::Cells(vec![]); shape.num_arrows()];
    for (o, x) in objects.iter().enumerate() {
        arrows[shape.identity(o)] = b.identity(x);
    }
    for a in 0..m {
        for d in 0..m {
            let idx = a * m + d;
            let cna = b.tensor(hom(a, d), n.value(a))?;
            // φ ↦ K(f) ∘ φ
            let ha = &objects[a];
            let swap = b.tensor_mor(&b.symmetry(ha, hom(a, d)), &b.identity(n.value(a)), n.value(a), n.value(a));
            let hna = b.tensor(ha, n.value(a))?;
            let ev = b.tensor_mor(&b.identity(hom(a, d)), &b.eval(n.value(a), k.value(a))?, &hna, k.value(a));
            let post = b.compose(k.act(d, a), &b.compose(&ev, &swap));
            arrows[from_a[idx]] = b.transpose(ha, &cna, k.value(d), &post)?;
            // φ ↦ φ ∘ N(f)
            let hd = &objects[d];
            let pre = b.compose(
                &b.eval(n.value(d), k.value(d))?,
                &b.tensor_mor(&b.identity(hd), n.act(d, a), &cna, n.value(d)),
            );
            arrows[from_b[idx]] = b.transpose(hd, &cna, k.value(d), &pre)?;
        }
    }
    let diagram = Diagram::new(b, shape, objects, arrows)?;
    let mut cone = b.limit(&diagram)?;
    cone.legs.truncate(m);
    Ok(cone)
}

/// The V-category `2_Y`: objects `*1, *2` with `2_Y(*1, *2) = Y`,
/// `2_Y(*2, *1) = 0` and unit endo-homs.
pub fn two_category(base: &Base, y: &BaseObject) -> Result<VCategory, ColimError> {
    let i = base.unit();
    let z = base.empty();
    let homs = vec![i.clone(), y.clone(), z.clone(), i.clone()];
    let empty_map = |dom: &BaseObject, cod: &BaseObject| -> Result<MorphismData, ColimError> {
        Ok(base.hom_set(dom, cod)?.into_iter().next().expect("map out of an initial object"))
    };
    let mut comp = Vec::with_capacity(8);
    for a in 0..2 {
        for bb in 0..2 {
            for c in 0..2 {
                let (h1, h2, h3) = (&homs[bb * 2 + c], &homs[a * 2 + bb], &homs[a * 2 + c]);
                let dom = base.tensor(h1, h2)?;
                let f = if dom.cells() == 0 {
                    empty_map(&dom, h3)?
                } else {
                    // I ⊗ I, Y ⊗ I or I ⊗ Y: the unitor, identity on data.
                    base.identity(h3)
                };
                comp.push(f);
            }
        }
    }
    let ident = vec![base.identity(&i); 2];
    Ok(VCategory::new(base.clone(), 2, homs, comp, ident)?)
}

/// Split the idempotent `phi: X -> X`: the image `S` with inclusion and
/// retraction.
fn split(
    base: &Base,
    x: &BaseObject,
    phi: &MorphismData,
) -> Result<(BaseObject, MorphismData, MorphismData), ColimError> {
    let d = Diagram::parallel_pair(base, x.clone(), x.clone(), phi.clone(), base.identity(x));
    let cone = base.limit(&d)?;
    let incl = cone.legs[0].clone();
    let retr = base.factor_through_limit(&cone, x, &[phi.clone(), phi.clone()]);
    Ok((cone.apex, incl, retr))
}

/// `h ↦ f ∘ h: C(a, d) -> C(a, e)` for a point `f` of `C(d, e)`.
pub fn post_point(c: &VCategory, a: usize, d: usize, e: usize, f: usize) -> MorphismData {
    let b = &c.base;
    let fp = b.point_morphism(c.hom(d, e), f);
    b.compose(c.comp(a, d, e), &b.tensor_mor(&fp, &b.identity(c.hom(a, d)), c.hom(a, d), c.hom(a, d)))
}

/// `h ↦ h ∘ g: C(a, d) -> C(z, d)` for a point `g` of `C(z, a)`.
pub fn pre_point(c: &VCategory, z: usize, a: usize, d: usize, g: usize) -> MorphismData {
    let b = &c.base;
    let gp = b.point_morphism(c.hom(z, a), g);
    b.compose(c.comp(z, a, d), &b.tensor_mor(&b.identity(c.hom(a, d)), &gp, &b.unit(), c.hom(z, a)))
}

/// Compose two points `g ∘ f` with `f ∈ C(a, d)`, `g ∈ C(d, e)`.
pub fn compose_points(c: &VCategory, a: usize, d: usize, e: usize, g: usize, f: usize) -> usize {
    c.base.apply2(c.comp(a, d, e), c.hom(d, e), c.hom(a, d), g, f)
}

/// How an object of a completion was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Objects of the original category summed to form it.
    pub tuple: Vec<usize>,
    /// The idempotent split to form it, as a point code of its
    /// endomorphism object before splitting.
    pub idempotent: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletionResult {
    pub completed: Arc<VCategory>,
    pub embedding: VFunctor,
    pub provenance: Vec<Provenance>,
}

/// Idempotent points of `C(c, c)`.
pub fn idempotents(c: &VCategory, x: usize) -> Result<Vec<usize>, ColimError> {
    Ok(c.base.points(c.hom(x, x))?.into_iter().filter(|&e| compose_points(c, x, x, x, e, e) == e).collect())
}

/// The Karoubi envelope: objects `(c, e)` for idempotent points `e`.
pub fn karoubi(c: &Arc<VCategory>) -> Result<CompletionResult, ColimError> {
    let trivial: Vec<Provenance> =
        (0..c.num_objects()).map(|i| Provenance { tuple: vec![i], idempotent: None }).collect();
    karoubi_with(c, &trivial)
}

fn karoubi_with(c: &Arc<VCategory>, inner: &[Provenance]) -> Result<CompletionResult, ColimError> {
    let b = &c.base;
    let n = c.num_objects();
    // Identities first, so the embedding lands on them; every other
    // idempotent is kept only if its image is new up to isomorphism.
    let mut objs: Vec<(usize, usize)> = (0..n).map(|x| (x, b.morphism_point(c.ident(x)))).collect();
    let unit_index: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = objs.iter().map(|&(x, e)| retract_size(c, x, e)).collect();
    for x in 0..n {
        let id = objs[x].1;
        for e in idempotents(c, x)? {
            if e == id {
                continue;
            }
            let size = retract_size(c, x, e);
            let mut seen = false;
            for (j, &(y, f)) in objs.iter().enumerate() {
                if sizes[j] == size && retracts_isomorphic(c, (x, e), (y, f))? {
                    seen = true;
                    break;
                }
            }
            if !seen {
                objs.push((x, e));
                sizes.push(size);
            }
        }
    }
    let k = objs.len();
    let mut homs = Vec::with_capacity(k * k);
    let mut incl = Vec::with_capacity(k * k);
    let mut retr = Vec::with_capacity(k * k);
    for &(x, e) in &objs {
        for &(y, f) in &objs {
            let phi = b.compose(&post_point(c, x, y, y, f), &pre_point(c, x, x, y, e));
            let (s, i, r) = split(b, c.hom(x, y), &phi)?;
            homs.push(s);
            incl.push(i);
            retr.push(r);
        }
    }
    let mut comp = Vec::with_capacity(k * k * k);
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let (x, y, z) = (objs[i].0, objs[j].0, objs[l].0);
                let t = b.tensor_mor(&incl[j * k + l], &incl[i * k + j], &homs[i * k + j], c.hom(x, y));
                comp.push(b.compose(&retr[i * k + l], &b.compose(c.comp(x, y, z), &t)));
            }
        }
    }
    let ident = (0..k)
        .map(|i| {
            let (x, e) = objs[i];
            b.compose(&retr[i * k + i], &b.point_morphism(c.hom(x, x), e))
        })
        .collect();
    let completed = Arc::new(VCategory::new(b.clone(), k, homs, comp, ident)?);
    let mut action = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            action.push(retr[unit_index[x] * k + unit_index[y]].clone());
        }
    }
    let embedding = VFunctor::new(c.clone(), completed.clone(), unit_index, action)?;
    let provenance =
        objs.iter().map(|&(x, e)| Provenance { tuple: inner[x].tuple.clone(), idempotent: Some(e) }).collect();
    Ok(CompletionResult { completed, embedding, provenance })
}

/// The map `h ↦ f ∘ h ∘ e: C(x, y) -> C(x, y)`.
fn sandwich(c: &VCategory, x: usize, e: usize, y: usize, f: usize) -> MorphismData {
    c.base.compose(&post_point(c, x, y, y, f), &pre_point(c, x, x, y, e))
}

/// Number of points of `e C(x, x) e`, an isomorphism invariant of the
/// retract split off by `e`.
fn retract_size(c: &VCategory, x: usize, e: usize) -> usize {
    let b = &c.base;
    let phi = sandwich(c, x, e, x, e);
    match b.kind() {
        BaseKind::FinVec(p) => (*p as usize).pow(phi.matrix().rank(*p) as u32),
        _ => b
            .points(c.hom(x, x))
            .map_or(0, |pts| pts.into_iter().filter(|&h| b.apply_point(&phi, c.hom(x, x), h) == h).count()),
    }
}

/// Do the idempotents `e` on `x` and `f` on `y` split to isomorphic
/// objects?  Searches `a = f a e` and `b = e b f` with `b a = e`, `a b = f`.
pub fn retracts_isomorphic(c: &VCategory, (x, e): (usize, usize), (y, f): (usize, usize)) -> Result<bool, ColimError> {
    let b = &c.base;
    let fwd = sandwich(c, x, e, y, f);
    let back = sandwich(c, y, f, x, e);
    let forward: Vec<usize> =
        b.points(c.hom(x, y))?.into_iter().filter(|&a| b.apply_point(&fwd, c.hom(x, y), a) == a).collect();
    match b.kind() {
        BaseKind::FinVec(p) => {
            let p = *p;
            let target: Vec<u32> = linalg::decode_vector(e, c.hom(x, x).dim(), p)
                .into_iter()
                .chain(linalg::decode_vector(f, c.hom(y, y).dim(), p))
                .collect();
            for a in forward {
                // Both conditions are linear in the backward map.
                let m = Matrix::vstack(
                    &[pre_point(c, x, y, x, a).matrix().clone(), post_point(c, y, x, y, a).matrix().clone()],
                    c.hom(y, x).dim(),
                );
                if m.solve(&target, p).is_some() {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => {
            let backward: Vec<usize> =
                b.points(c.hom(y, x))?.into_iter().filter(|&r| b.apply_point(&back, c.hom(y, x), r) == r).collect();
            for a in forward {
                for &r in &backward {
                    if compose_points(c, x, y, x, r, a) == e && compose_points(c, y, x, y, a, r) == f {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
    }
}

/// All non-decreasing tuples of objects of length `1..=k`, shortest
/// first, then lexicographic.  Reordering a sum gives an isomorphic
/// object, so one ordering per multiset suffices.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &layer {
            for x in t.last().copied().unwrap_or(0)..n {
                let mut u = t.clone();
                u.push(x);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Free completion of a linear category under direct sums of length at
/// most `k`.  `hom(u, v)` is the direct sum of the `C(u_i, v_j)` with `i`
/// outer and `j` inner; composition is matrix multiplication over `C`.
pub fn matrix_completion(c: &Arc<VCategory>, k: usize) -> Result<CompletionResult, ColimError> {
    let b = &c.base;
    let BaseKind::FinVec(p) = *b.kind() else {
        return Err(ColimError::Unsupported("matrix completion needs a FinVec base".into()));
    };
    let n = c.num_objects();
    let objs = tuples(n, k.max(1));
    let m = objs.len();
    let dim = |x: usize, y: usize| c.hom(x, y).dim();
    // Block offsets inside hom(u, v).
    let offsets = |u: &[usize], v: &[usize]| -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(u.len() * v.len());
        let mut acc = 0;
        for &x in u {
            for &y in v {
                off.push(acc);
                acc += dim(x, y);
            }
        }
        (off, acc)
    };
    let mut homs = Vec::with_capacity(m * m);
    let mut offs = Vec::with_capacity(m * m);
    for u in &objs {
        for v in &objs {
            let (o, d) = offsets(u, v);
            homs.push(BaseObject::vect(d));
            offs.push(o);
        }
    }
    let mut comp = Vec::with_capacity(m * m * m);
    for (iu, u) in objs.iter().enumerate() {
        for (iv, v) in objs.iter().enumerate() {
            for (iw, w) in objs.iter().enumerate() {
                let (duv, dvw, duw) = (homs[iu * m + iv].dim(), homs[iv * m + iw].dim(), homs[iu * m + iw].dim());
                let mut mat = Matrix::zeros(duw, dvw * duv);
                for (i, &x) in u.iter().enumerate() {
                    for (j, &y) in v.iter().enumerate() {
                        for (l, &z) in w.iter().enumerate() {
                            let cm = c.comp(x, y, z).matrix();
                            let of = offs[iu * m + iv][i * v.len() + j];
                            let og = offs[iv * m + iw][j * w.len() + l];
                            let oh = offs[iu * m + iw][i * w.len() + l];
                            let (df, dg) = (dim(x, y), dim(y, z));
                            for r in 0..dim(x, z) {
                                for gq in 0..dg {
                                    for fq in 0..df {
                                        let e = cm.get(r, gq * df + fq);
                                        if e != 0 {
                                            let col = (og + gq) * duv + of + fq;
                                            let cur = mat.get(oh + r, col);
                                            mat.set(oh + r, col, (cur + e) % p);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                comp.push(MorphismData::Matrix(mat));
            }
        }
    }
    let ident = objs
        .iter()
        .enumerate()
        .map(|(iu, u)| {
            let d = homs[iu * m + iu].dim();
            let mut v = vec![0; d];
            for (i, &x) in u.iter().enumerate() {
                let o = offs[iu * m + iu][i * u.len() + i];
                let id = c.ident(x).matrix();
                for r in 0..dim(x, x) {
                    v[o + r] = id.get(r, 0);
                }
            }
            MorphismData::Matrix(Matrix::column(&v))
        })
        .collect();
    let completed = Arc::new(VCategory::new(b.clone(), m, homs, comp, ident)?);
    let action = (0..n * n).map(|i| b.identity(c.hom(i / n, i % n))).collect();
    let embedding = VFunctor::new(c.clone(), completed.clone(), (0..n).collect(), action)?;
    let provenance = objs.into_iter().map(|t| Provenance { tuple: t, idempotent: None }).collect();
    Ok(CompletionResult { completed, embedding, provenance })
}

/// Composite of two V-functors.
pub fn compose_functors(f: &VFunctor, g: &VFunctor) -> Result<VFunctor, ColimError> {
    let b = &f.src.base;
    let n = f.src.num_objects();
    let obj_map: Vec<usize> = f.obj_map.iter().map(|&x| g.obj_map[x]).collect();
    let action = (0..n * n)
        .map(|i| {
            let (x, y) = (i / n, i % n);
            b.compose(g.act(f.obj_map[x], f.obj_map[y]), f.act(x, y))
        })
        .collect();
    Ok(VFunctor::new(f.src.clone(), g.dst.clone(), obj_map, action)?)
}

/// Cauchy completion: idempotent splitting over cartesian bases; sums of
/// length at most `k` followed by idempotent splitting over `FinVec`.
pub fn cauchy_completion(c: &Arc<VCategory>, k: usize) -> Result<CompletionResult, ColimError> {
    match c.base.kind() {
        BaseKind::FinVec(_) => {
            let mc = matrix_completion(c, k)?;
            let kr = karoubi_with(&mc.completed, &mc.provenance)?;
            let embedding = compose_functors(&mc.embedding, &kr.embedding)?;
            Ok(CompletionResult { completed: kr.completed, embedding, provenance: kr.provenance })
        }
        _ => karoubi(c),
    }
}

/// An isomorphism `x ≅ y` in the underlying category, as points
/// `r ∈ C(x, y)`, `s ∈ C(y, x)` inverse to each other.
pub fn find_object_iso(c: &VCategory, x: usize, y: usize) -> Result<Option<(usize, usize)>, ColimError> {
    let b = &c.base;
    if c.hom(x, x).cells() != c.hom(y, y).cells() || c.hom(x, y).cells() != c.hom(y, x).cells() {
        return Ok(None);
    }
    let (idx, idy) = (b.morphism_point(c.ident(x)), b.morphism_point(c.ident(y)));
    match b.kind() {
        BaseKind::FinVec(p) => {
            let p = *p;
            let (dyx, dxy) = (c.hom(y, x).dim(), c.hom(x, y).dim());
            let comp = c.comp(x, y, x).matrix();
            let target = linalg::decode_vector(idx, c.hom(x, x).dim(), p);
            for r in b.points(c.hom(x, y))? {
                let rv = Matrix::column(&linalg::decode_vector(r, dxy, p));
                // s ↦ s ∘ r is linear in s.
                let a = comp.mul(&Matrix::identity(dyx).kron(&rv, p), p);
                if let Some(s) = a.solve(&target, p) {
                    let s = linalg::encode_vector(&s, p);
                    if compose_points(c, y, x, y, r, s) == idy {
                        return Ok(Some((r, s)));
                    }
                }
            }
            Ok(None)
        }
        _ => {
            let back = b.points(c.hom(y, x))?;
            for r in b.points(c.hom(x, y))? {
                for &s in &back {
                    if compose_points(c, x, y, x, s, r) == idx && compose_points(c, y, x, y, r, s) == idy {
                        return Ok(Some((r, s)));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Every object of the target is isomorphic to an object in the image.
pub fn is_essentially_surjective(f: &VFunctor) -> Result<Verdict, ColimError> {
    let d = &f.dst;
    let mut image: Vec<usize> = f.obj_map.clone();
    image.sort_unstable();
    image.dedup();
    for y in 0..d.num_objects() {
        let mut hit = false;
        for &x in &image {
            if x == y || find_object_iso(d, x, y)?.is_some() {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(Verdict::no(Certificate::NotEssentiallySurjective { object: y }));
        }
    }
    Ok(Verdict::yes(Certificate::Checked { items: d.num_objects() }))
}

/// Fully faithful and essentially surjective.
pub fn is_equivalence(f: &VFunctor) -> Result<Verdict, ColimError> {
    let ff = f.is_fully_faithful();
    if !ff.is_yes() {
        return Ok(ff);
    }
    is_essentially_surjective(f)
}

/// Is `C` Cauchy complete up to sums of length `k`?  Idempotents split
/// (the Karoubi embedding is an equivalence); over `FinVec` there is also
/// a zero object and a biproduct for every pair of objects whose
/// provenance tuples have total length at most `k`.
pub fn is_cauchy_complete(c: &Arc<VCategory>, lengths: &[usize], k: usize) -> Result<Verdict, ColimError> {
    let kr = karoubi(c)?;
    let v = is_equivalence(&kr.embedding)?;
    if !v.is_yes() {
        return Ok(v.staged("idempotents split"));
    }
    let BaseKind::FinVec(_) = c.base.kind() else { return Ok(v) };
    let n = c.num_objects();
    if !(0..n).any(|x| c.hom(x, x).dim() == 0) {
        return Ok(Verdict::no(Certificate::NotIsomorphic { object: 0, detail: "no zero object".into() })
            .staged("zero object"));
    }
    for x in 0..n {
        for y in 0..n {
            if lengths[x] + lengths[y] > k {
                continue;
            }
            if find_biproduct(c, x, y)?.is_none() {
                return Ok(Verdict::no(Certificate::NotIsomorphic {
                    object: x * n + y,
                    detail: format!("objects {x} and {y} have no biproduct"),
                })
                .staged("biproducts"));
            }
        }
    }
    Ok(Verdict::yes(Certificate::Checked { items: n }))
}

/// A biproduct `s` of `x` and `y` with injections: points
/// `(s, i1, i2)` such that `(i1, i2): x ⊕ y -> s` is invertible.
pub fn find_biproduct(c: &VCategory, x: usize, y: usize) -> Result<Option<(usize, usize, usize)>, ColimError> {
    let b = &c.base;
    let BaseKind::FinVec(p) = *b.kind() else {
        return Err(ColimError::Unsupported("biproducts are searched over FinVec".into()));
    };
    let d = |a: usize, e: usize| c.hom(a, e).dim();
    let n = c.num_objects();
    for s in 0..n {
        if d(s, s) != d(x, x) + d(y, y) + d(x, y) + d(y, x)
            || d(x, s) != d(x, x) + d(x, y)
            || d(y, s) != d(y, y) + d(y, x)
            || d(s, x) != d(x, x) + d(y, x)
            || d(s, y) != d(y, y) + d(x, y)
        {
            continue;
        }
        let ids = |a: usize| linalg::decode_vector(b.morphism_point(c.ident(a)), d(a, a), p);
        let pre = |a: usize, z: usize, r: usize| -> Matrix {
            // q ↦ q ∘ r: C(s, z) -> C(a, z) for r ∈ C(a, s).
            let rv = Matrix::column(&linalg::decode_vector(r, d(a, s), p));
            c.comp(a, s, z).matrix().mul(&Matrix::identity(d(s, z)).kron(&rv, p), p)
        };
        let zero = |a: usize, e: usize| vec![0; d(a, e)];
        for i1 in b.points(c.hom(x, s))? {
            for i2 in b.points(c.hom(y, s))? {
                // p1 ∘ i1 = 1, p1 ∘ i2 = 0 and p2 ∘ i1 = 0, p2 ∘ i2 = 1.
                let a1 = Matrix::vstack(&[pre(x, x, i1), pre(y, x, i2)], d(s, x));
                let t1: Vec<u32> = ids(x).into_iter().chain(zero(y, x)).collect();
                let Some(p1) = a1.solve(&t1, p) else { continue };
                let a2 = Matrix::vstack(&[pre(x, y, i1), pre(y, y, i2)], d(s, y));
                let t2: Vec<u32> = zero(x, y).into_iter().chain(ids(y)).collect();
                let Some(p2) = a2.solve(&t2, p) else { continue };
                let (p1, p2) = (linalg::encode_vector(&p1, p), linalg::encode_vector(&p2, p));
                let e1 = linalg::decode_vector(compose_points(c, s, x, s, i1, p1), d(s, s), p);
                let e2 = linalg::decode_vector(compose_points(c, s, y, s, i2, p2), d(s, s), p);
                let sum: Vec<u32> = e1.iter().zip(&e2).map(|(u, v)| (u + v) % p).collect();
                if sum == ids(s) {
                    return Ok(Some((s, i1, i2)));
                }
            }
        }
    }
    Ok(None)
}

/// A diagram of weights on one domain and natural transformations.
#[derive(Clone, Debug)]
pub struct WeightDiagram {
    pub shape: Arc<FinCategory>,
    pub weights: Vec<Weight>,
    pub arrows: Vec<VNatTrans>,
}

impl WeightDiagram {
    fn at(&self, x: usize) -> Result<Diagram, ColimError> {
        let b = self.weights[0].base();
        let objects = self.weights.iter().map(|w| w.value(x).clone()).collect();
        let arrows = self.arrows.iter().map(|t| t.components[x].clone()).collect();
        Ok(Diagram::new(b, self.shape.clone(), objects, arrows)?)
    }

    fn domain(&self) -> Result<&Arc<VCategory>, ColimError> {
        self.weights
            .first()
            .map(|w| &w.domain)
            .ok_or_else(|| ColimError::Unsupported("pointwise (co)limits need a nonempty diagram".into()))
    }
}

/// A pointwise limit with its projections and the cones at each object.
#[derive(Clone, Debug)]
pub struct PointwiseLimit {
    pub apex: Weight,
    pub legs: Vec<VNatTrans>,
    pub cones: Vec<Cone>,
}

impl PointwiseLimit {
    /// The map `Z -> lim` induced by a cone of natural transformations.
    pub fn factor(&self, z: &Weight, family: &[VNatTrans]) -> VNatTrans {
        let b = z.base();
        let components = (0..self.cones.len())
            .map(|x| {
                let fam: Vec<MorphismData> = family.iter().map(|t| t.components[x].clone()).collect();
                b.factor_through_limit(&self.cones[x], z.value(x), &fam)
            })
            .collect();
        VNatTrans { components }
    }
}

/// Limits of weights computed objectwise; the action is induced through
/// the limit at each object.
pub fn pointwise_limit(d: &WeightDiagram) -> Result<PointwiseLimit, ColimError> {
    let dom = d.domain()?.clone();
    let b = &dom.base;
    let n = dom.num_objects();
    let cones: Vec<Cone> = (0..n).map(|x| Ok(b.limit(&d.at(x)?)?)).collect::<Result<_, ColimError>>()?;
    let mut act = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let h = dom.hom(x, y);
            let src = b.tensor(h, &cones[y].apex)?;
            let family: Vec<MorphismData> = d
                .weights
                .iter()
                .enumerate()
                .map(|(v, w)| {
                    let t = b.tensor_mor(&b.identity(h), &cones[y].legs[v], &cones[y].apex, w.value(y));
                    b.compose(w.act(x, y), &t)
                })
                .collect();
            act.push(b.factor_through_limit(&cones[x], &src, &family));
        }
    }
    let values = cones.iter().map(|c| c.apex.clone()).collect();
    let apex = Weight::new(dom, values, act)?;
    let legs = (0..d.weights.len())
        .map(|v| VNatTrans { components: cones.iter().map(|c| c.legs[v].clone()).collect() })
        .collect();
    Ok(PointwiseLimit { apex, legs, cones })
}

/// A pointwise colimit with its injections and the colimits at each
/// object.
#[derive(Clone, Debug)]
pub struct PointwiseColimit {
    pub apex: Weight,
    pub legs: Vec<VNatTrans>,
    pub diagrams: Vec<Diagram>,
    pub colimits: Vec<Colimit>,
}

impl PointwiseColimit {
    /// The map `colim -> Z` induced by a cocone of natural transformations.
    pub fn factor(&self, z: &Weight, family: &[VNatTrans]) -> VNatTrans {
        let b = z.base();
        let components = (0..self.colimits.len())
            .map(|x| {
                let fam: Vec<MorphismData> = family.iter().map(|t| t.components[x].clone()).collect();
                b.factor_through_colimit(&self.diagrams[x], &self.colimits[x], z.value(x), &fam)
            })
            .collect();
        VNatTrans { components }
    }
}

pub fn pointwise_colimit(d: &WeightDiagram) -> Result<PointwiseColimit, ColimError> {
    let dom = d.domain()?.clone();
    let b = &dom.base;
    let n = dom.num_objects();
    let diagrams: Vec<Diagram> = (0..n).map(|x| d.at(x)).collect::<Result<_, _>>()?;
    let colimits: Vec<Colimit> = diagrams.iter().map(|g| b.colimit(g)).collect::<Result<_, _>>()?;
    let mut act = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let h = dom.hom(x, y);
            let family: Vec<MorphismData> = d
                .weights
                .iter()
                .enumerate()
                .map(|(v, w)| b.compose(&colimits[x].cocone.legs[v], w.act(x, y)))
                .collect();
            act.push(b.factor_tensor_colimit(h, &diagrams[y], &colimits[y], &colimits[x].cocone.apex, &family));
        }
    }
    let values = colimits.iter().map(|c| c.cocone.apex.clone()).collect();
    let apex = Weight::new(dom, values, act)?;
    let legs = (0..d.weights.len())
        .map(|v| VNatTrans { components: colimits.iter().map(|c| c.cocone.legs[v].clone()).collect() })
        .collect();
    Ok(PointwiseColimit { apex, legs, diagrams, colimits })
}

/// The power `[X, W]` computed objectwise.
pub fn power(x: &BaseObject, w: &Weight) -> Result<Weight, ColimError> {
    let b = w.base();
    let dom = &w.domain;
    let n = dom.num_objects();
    let values: Vec<BaseObject> = (0..n).map(|a| b.internal_hom(x, w.value(a))).collect::<Result<_, _>>()?;
    let mut act = Vec::with_capacity(n * n);
    for a in 0..n {
        for c in 0..n {
            let h = dom.hom(a, c);
            let hx = b.tensor(&values[c], x)?;
            let f = b.compose(w.act(a, c), &b.tensor_mor(&b.identity(h), &b.eval(x, w.value(c))?, &hx, w.value(c)));
            act.push(b.transpose(&b.tensor(h, &values[c])?, x, w.value(a), &f)?);
        }
    }
    Ok(Weight::new(dom.clone(), values, act)?)
}

/// The copower `X · W` computed objectwise.
pub fn copower(x: &BaseObject, w: &Weight) -> Result<Weight, ColimError> {
    let b = w.base();
    let dom = &w.domain;
    let n = dom.num_objects();
    let values: Vec<BaseObject> = (0..n).map(|a| b.tensor(x, w.value(a))).collect::<Result<_, _>>()?;
    let mut act = Vec::with_capacity(n * n);
    for a in 0..n {
        for c in 0..n {
            let h = dom.hom(a, c);
            let swap = b.tensor_mor(&b.symmetry(h, x), &b.identity(w.value(c)), w.value(c), w.value(c));
            let hw = b.tensor(h, w.value(c))?;
            let inner = b.tensor_mor(&b.identity(x), w.act(a, c), &hw, w.value(a));
            act.push(b.compose(&inner, &swap));
        }
    }
    Ok(Weight::new(dom.clone(), values, act)?)
}

/// The copower `X · a` inside `C`, if some object represents
/// `X ⊗ C(-, a)`.
pub fn copower_in(c: &Arc<VCategory>, x: &BaseObject, a: usize) -> Result<(Verdict, Option<usize>), ColimError> {
    let w = copower(x, &Weight::yoneda(c, a))?;
    Ok(match representing_point(&w)? {
        Some((obj, point)) => (Verdict::yes(Certificate::Checked { items: point }), Some(obj)),
        None => (
            Verdict::no(Certificate::NotIsomorphic { object: a, detail: "no object represents the copower".into() }),
            None,
        ),
    })
}

/// The natural transformation `C(-, a) -> C(-, d)` given by a point
/// `f ∈ C(a, d)`.
pub fn yoneda_map(c: &VCategory, a: usize, d: usize, f: usize) -> VNatTrans {
    VNatTrans { components: (0..c.num_objects()).map(|z| post_point(c, z, a, d, f)).collect() }
}

/// A diagram of representables over the category of elements of an
/// ordinary presheaf on `C_0`.
pub fn representables_over_elements(c: &Arc<VCategory>, n: &SetPresheaf) -> Result<WeightDiagram, ColimError> {
    let (c0, labels) = c.underlying_category()?;
    if c0 != *n.category {
        return Err(ColimError::DomainMismatch);
    }
    let (el, objs, proj) = n.elements();
    let weights = objs.iter().map(|&(a, _)| Weight::yoneda(c, a)).collect();
    let arrows = (0..el.num_arrows())
        .map(|e| {
            let (a, d, f) = labels[proj[e]];
            yoneda_map(c, a, d, f)
        })
        .collect();
    Ok(WeightDiagram { shape: Arc::new(el), weights, arrows })
}

/// Realization of an ordinary presheaf `N` on `C_0`: the colimit over
/// `El(N)` of the representables, computed pointwise.
pub fn realize_presheaf(c: &Arc<VCategory>, n: &SetPresheaf) -> Result<PointwiseColimit, ColimError> {
    let d = representables_over_elements(c, n)?;
    if d.weights.is_empty() {
        let apex = Weight::initial(c);
        let b = &c.base;
        let (diagrams, colimits) = (0..c.num_objects())
            .map(|_| {
                let g = Diagram::discrete(b, vec![]);
                let col = b.colimit(&g).map_err(ColimError::from)?;
                Ok((g, col))
            })
            .collect::<Result<Vec<_>, ColimError>>()?
            .into_iter()
            .unzip();
        return Ok(PointwiseColimit { apex, legs: vec![], diagrams, colimits });
    }
    pointwise_colimit(&d)
}

/// Objectwise isomorphism of two weights on one domain, by invariant
/// screening then a search over natural transformations built from
/// objectwise isomorphisms.  Used only on tiny instances.
pub fn weights_isomorphic(m: &Weight, n: &Weight) -> Result<bool, ColimError> {
    let b = m.base();
    let k = m.domain.num_objects();
    let mut choices: Vec<Vec<MorphismData>> = Vec::with_capacity(k);
    for x in 0..k {
        if b.find_iso(m.value(x), n.value(x))?.is_none() {
            return Ok(false);
        }
        let isos: Vec<MorphismData> =
            b.hom_set(m.value(x), n.value(x))?.into_iter().filter(|f| b.is_iso(f, m.value(x), n.value(x))).collect();
        choices.push(isos);
    }
    let mut pick = vec![0usize; k];
    loop {
        let t = VNatTrans { components: (0..k).map(|x| choices[x][pick[x]].clone()).collect() };
        if t.validate(m, n).is_ok() {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(false);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Objects of a V-category up to underlying isomorphism, by first
/// representative.
pub fn iso_classes(c: &VCategory) -> Result<Vec<usize>, ColimError> {
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..c.num_objects() {
        let mut found = false;
        for &r in &reps {
            if find_object_iso(c, r, x)?.is_some() {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(x);
        }
    }
    Ok(reps)
}

/// Lengths of provenance tuples, for [`is_cauchy_complete`].
pub fn provenance_lengths(p: &[Provenance]) -> Vec<usize> {
    p.iter().map(|q| q.tuple.len()).collect()
}

#[cfg(test)]
mod tests;
