//! Finite ordinary categories and functors between them.
//!
//! A [`FinCategory`] stores arrows by index with their source and target,
//! an identity per object, and a sparse composition table: for each arrow
//! `f` the composites `g ∘ f` for every `g` leaving `tgt(f)`.  The decision
//! procedures for filteredness, finality and full faithfulness live here,
//! together with a Todd–Coxeter style enumerator that turns a presentation
//! by generators and relations into a `FinCategory`.

use std::collections::VecDeque;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verdict::{Certificate, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("arrow {arrow} refers to object {object}, but there are only {count} objects")]
    ObjectOutOfRange { arrow: usize, object: usize, count: usize },
    #[error("identity of object {object} is arrow {arrow}, which is not an endo-arrow of it")]
    BadIdentity { object: usize, arrow: usize },
    #[error("composite {g} ∘ {f} is missing from the composition table")]
    MissingComposite { g: usize, f: usize },
    #[error("composite {g} ∘ {f} given for a non-composable pair")]
    NotComposable { g: usize, f: usize },
    #[error("composite {g} ∘ {f} = {h} has the wrong source or target")]
    CompositeEndpoints { g: usize, f: usize, h: usize },
    #[error("unit law fails at arrow {arrow}")]
    Unit { arrow: usize },
    #[error("associativity fails at ({h}, {g}, {f})")]
    Associativity { h: usize, g: usize, f: usize },
    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },
    #[error("functor does not preserve {what} at {at}")]
    NotFunctorial { what: &'static str, at: usize },
    #[error("presentation enumeration exceeded {limit} states")]
    EnumerationLimit { limit: usize },
    #[error("malformed presentation: {0}")]
    BadPresentation(String),
}

/// Wire form of a finite category: arrows as `[src, tgt]` pairs and the
/// composition table as triples `[g, f, g∘f]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinCategoryData {
    pub objects: usize,
    pub arrows: Vec<[usize; 2]>,
    pub identities: Vec<usize>,
    pub composition: Vec<[usize; 3]>,
}

/// A finite category with a total composition table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FinCategoryData", into = "FinCategoryData")]
pub struct FinCategory {
    n_obj: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    ident: Vec<usize>,
    out: Vec<Vec<usize>>,
    pos_in_out: Vec<usize>,
    comp: Vec<Vec<usize>>,
}

impl TryFrom<FinCategoryData> for FinCategory {
    type Error = CategoryError;

    fn try_from(d: FinCategoryData) -> Result<Self, CategoryError> {
        let n = d.arrows.len();
        let mut table = std::collections::HashMap::with_capacity(d.composition.len());
        for &[g, f, h] in &d.composition {
            for x in [g, f, h] {
                if x >= n {
                    return Err(CategoryError::OutOfRange { index: x, size: n });
                }
            }
            if d.arrows[g][0] != d.arrows[f][1] {
                return Err(CategoryError::NotComposable { g, f });
            }
            table.insert((g, f), h);
        }
        let src = d.arrows.iter().map(|a| a[0]).collect();
        let tgt = d.arrows.iter().map(|a| a[1]).collect();
        FinCategory::from_fn(d.objects, src, tgt, d.identities, |g, f| table.get(&(g, f)).copied())
    }
}

impl From<FinCategory> for FinCategoryData {
    fn from(c: FinCategory) -> Self {
        let mut composition = Vec::new();
        for f in 0..c.num_arrows() {
            for &g in &c.out[c.tgt[f]] {
                composition.push([g, f, c.compose(g, f)]);
            }
        }
        FinCategoryData {
            objects: c.n_obj,
            arrows: (0..c.num_arrows()).map(|a| [c.src[a], c.tgt[a]]).collect(),
            identities: c.ident,
            composition,
        }
    }
}

impl FinCategory {
    /// Build and validate a category from arrow endpoints, identities and a
    /// composition function `(g, f) ↦ g ∘ f` queried on composable pairs.
    pub fn from_fn(
        n_obj: usize,
        src: Vec<usize>,
        tgt: Vec<usize>,
        ident: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Self, CategoryError> {
        let n = src.len();
        assert_eq!(n, tgt.len(), "src and tgt lists differ in length");
        for a in 0..n {
            for o in [src[a], tgt[a]] {
                if o >= n_obj {
                    return Err(CategoryError::ObjectOutOfRange { arrow: a, object: o, count: n_obj });
                }
            }
        }
        if ident.len() != n_obj {
            return Err(CategoryError::BadPresentation(format!("{} identities for {} objects", ident.len(), n_obj)));
        }
        for (o, &i) in ident.iter().enumerate() {
            if i >= n || src[i] != o || tgt[i] != o {
                return Err(CategoryError::BadIdentity { object: o, arrow: i });
            }
        }
        let mut out = vec![Vec::new(); n_obj];
        let mut pos_in_out = vec![0; n];
        for a in 0..n {
            pos_in_out[a] = out[src[a]].len();
            out[src[a]].push(a);
        }
        let mut comp = Vec::with_capacity(n);
        for f in 0..n {
            let mut row = Vec::with_capacity(out[tgt[f]].len());
            for &g in &out[tgt[f]] {
                let h = compose(g, f).ok_or(CategoryError::MissingComposite { g, f })?;
                if h >= n {
                    return Err(CategoryError::OutOfRange { index: h, size: n });
                }
                if src[h] != src[f] || tgt[h] != tgt[g] {
                    return Err(CategoryError::CompositeEndpoints { g, f, h });
                }
                row.push(h);
            }
            comp.push(row);
        }
        let c = FinCategory { n_obj, src, tgt, ident, out, pos_in_out, comp };
        c.validate()?;
        Ok(c)
    }

    /// Check the unit and associativity laws.
    pub fn validate(&self) -> Result<(), CategoryError> {
        for f in 0..self.num_arrows() {
            if self.compose(self.ident[self.tgt[f]], f) != f || self.compose(f, self.ident[self.src[f]]) != f {
                return Err(CategoryError::Unit { arrow: f });
            }
        }
        for f in 0..self.num_arrows() {
            for &g in &self.out[self.tgt[f]] {
                let gf = self.compose(g, f);
                for &h in &self.out[self.tgt[g]] {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return Err(CategoryError::Associativity { h, g, f });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.n_obj
    }

    pub fn num_arrows(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.tgt[f]
    }

    pub fn identity(&self, o: usize) -> usize {
        self.ident[o]
    }

    pub fn identities(&self) -> &[usize] {
        &self.ident
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.ident[self.src[f]] == f
    }

    /// Arrows with source `o`.
    pub fn out_arrows(&self, o: usize) -> &[usize] {
        &self.out[o]
    }

    /// `g ∘ f`; panics if the pair is not composable.
    #[inline]
    pub fn compose(&self, g: usize, f: usize) -> usize {
        debug_assert_eq!(self.src[g], self.tgt[f], "composing non-composable arrows");
        self.comp[f][self.pos_in_out[g]]
    }

    /// Arrows `a -> b`.
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.out[a].iter().copied().filter(|&f| self.tgt[f] == b).collect()
    }

    pub fn discrete(n: usize) -> Self {
        let ids: Vec<usize> = (0..n).collect();
        FinCategory::from_fn(n, ids.clone(), ids.clone(), ids, |g, _| Some(g)).expect("discrete category")
    }

    pub fn terminal() -> Self {
        Self::discrete(1)
    }

    /// The arrow category `0 -> 1`.
    pub fn arrow() -> Self {
        FinCategory::from_fn(2, vec![0, 1, 0], vec![0, 1, 1], vec![0, 1], |g, f| {
            Some(if g == 1 || g == 0 { f } else { g })
        })
        .expect("arrow category")
    }

    /// A finite total order `0 < 1 < … < n-1` viewed as a category.
    pub fn chain(n: usize) -> Self {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut idx = vec![vec![usize::MAX; n]; n];
        for i in 0..n {
            for j in i..n {
                idx[i][j] = src.len();
                src.push(i);
                tgt.push(j);
            }
        }
        let ident = (0..n).map(|i| idx[i][i]).collect();
        let (s, t) = (src.clone(), tgt.clone());
        FinCategory::from_fn(n, src, tgt, ident, |g, f| Some(idx[s[f]][t[g]])).expect("chain category")
    }

    /// A one-object category from a monoid multiplication table
    /// `mul[a][b] = a·b`, read as `a ∘ b`, with unit `e`.
    pub fn monoid(mul: &[Vec<usize>], e: usize) -> Result<Self, CategoryError> {
        let n = mul.len();
        FinCategory::from_fn(1, vec![0; n], vec![0; n], vec![e], |g, f| mul.get(g).and_then(|r| r.get(f)).copied())
    }

    pub fn opposite(&self) -> Self {
        FinCategory::from_fn(self.n_obj, self.tgt.clone(), self.src.clone(), self.ident.clone(), |g, f| {
            Some(self.compose(f, g))
        })
        .expect("opposite of a valid category")
    }

    /// Product category; object `(x, y)` and arrow `(f, g)` are encoded
    /// row-major as `x·|Y| + y`.
    pub fn product(&self, other: &FinCategory) -> Self {
        let (no, na) = (other.n_obj, other.num_arrows());
        let mut src = Vec::with_capacity(self.num_arrows() * na);
        let mut tgt = Vec::with_capacity(self.num_arrows() * na);
        for f in 0..self.num_arrows() {
            for g in 0..na {
                src.push(self.src[f] * no + other.src[g]);
                tgt.push(self.tgt[f] * no + other.tgt[g]);
            }
        }
        let mut ident = Vec::with_capacity(self.n_obj * no);
        for x in 0..self.n_obj {
            for y in 0..no {
                ident.push(self.ident[x] * na + other.ident[y]);
            }
        }
        FinCategory::from_fn(self.n_obj * no, src, tgt, ident, |h, k| {
            let (h1, h2) = (h / na, h % na);
            let (k1, k2) = (k / na, k % na);
            Some(self.compose(h1, k1) * na + other.compose(h2, k2))
        })
        .expect("product of valid categories")
    }

    /// Is `f` an isomorphism?  Returns its inverse.
    pub fn inverse(&self, f: usize) -> Option<usize> {
        self.hom(self.tgt[f], self.src[f])
            .into_iter()
            .find(|&g| self.compose(g, f) == self.ident[self.src[f]] && self.compose(f, g) == self.ident[self.tgt[f]])
    }

    /// Objects reachable from `b` by a single arrow, as a membership table.
    fn reach(&self, b: usize) -> Vec<bool> {
        let mut r = vec![false; self.n_obj];
        for &v in &self.out[b] {
            r[self.tgt[v]] = true;
        }
        r
    }

    /// Connected components of the underlying graph, as a label per object.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::<usize>::new(self.n_obj);
        for f in 0..self.num_arrows() {
            uf.union(self.src[f], self.tgt[f]);
        }
        canonical_labels(&uf, self.n_obj)
    }

    /// Decide filteredness.
    ///
    /// A finite category is filtered exactly when it is nonempty and admits
    /// a cocone under its identity functor.  The search grows a cocone one
    /// object at a time: a cospan joins the next object to the current apex,
    /// and every arrow whose triangle fails to commute is repaired by
    /// postcomposing a coequalizing arrow.  Any step that cannot be carried
    /// out exhibits a pair violating the cospan or coequalizer condition.
    pub fn is_filtered(&self) -> Verdict {
        if self.n_obj == 0 {
            return Verdict::no(Certificate::EmptyCategory);
        }
        let mut apex = 0;
        let mut legs: Vec<Option<usize>> = vec![None; self.n_obj];
        legs[0] = Some(self.ident[0]);
        let mut included = vec![0usize];
        for b in 0..self.n_obj {
            if b > 0 {
                let rb = self.reach(b);
                let Some(u) = self.out[apex].iter().copied().find(|&u| rb[self.tgt[u]]) else {
                    return Verdict::no(Certificate::NoCospan { a: apex, b });
                };
                let s = self.tgt[u];
                let v = self.out[b].iter().copied().find(|&v| self.tgt[v] == s).expect("reachable");
                for &a in &included {
                    legs[a] = legs[a].map(|l| self.compose(u, l));
                }
                legs[b] = Some(v);
                apex = s;
                included.push(b);
            }
            while let Some((p, q)) = self.first_incompatible(&included, &legs) {
                let Some(h) = self.out[apex].iter().copied().find(|&h| self.compose(h, p) == self.compose(h, q)) else {
                    return Verdict::no(Certificate::NoCoequalizer { f: p, g: q });
                };
                for &a in &included {
                    legs[a] = legs[a].map(|l| self.compose(h, l));
                }
                apex = self.tgt[h];
            }
        }
        Verdict::yes(Certificate::Cocone { apex, legs: legs.into_iter().map(Option::unwrap).collect() })
    }

    /// First arrow between placed objects whose cocone triangle fails, as
    /// the parallel pair `(λ_b ∘ f, λ_a)`.
    fn first_incompatible(&self, included: &[usize], legs: &[Option<usize>]) -> Option<(usize, usize)> {
        for &a in included {
            let la = legs[a].expect("placed object has a leg");
            for &f in &self.out[a] {
                if let Some(lt) = legs[self.tgt[f]] {
                    let lhs = self.compose(lt, f);
                    if lhs != la {
                        return Some((lhs, la));
                    }
                }
            }
        }
        None
    }

    /// Check that `legs[a]: a -> apex` form a cocone under the identity.
    pub fn is_identity_cocone(&self, apex: usize, legs: &[usize]) -> bool {
        legs.len() == self.n_obj
            && legs.iter().enumerate().all(|(a, &l)| l < self.num_arrows() && self.src[l] == a && self.tgt[l] == apex)
            && (0..self.num_arrows()).all(|f| self.compose(legs[self.tgt[f]], f) == legs[self.src[f]])
    }

    /// Does any arrow out of `b`'s codomain equalize the parallel pair?
    pub fn has_coequalizing_arrow(&self, f: usize, g: usize) -> bool {
        self.out[self.tgt[f]].iter().any(|&h| self.compose(h, f) == self.compose(h, g))
    }

    pub fn has_cospan(&self, a: usize, b: usize) -> bool {
        let rb = self.reach(b);
        self.out[a].iter().any(|&u| rb[self.tgt[u]])
    }

    /// Re-check a filteredness certificate without searching.
    pub fn check_filtered_certificate(&self, v: &Verdict) -> bool {
        use crate::verdict::Outcome;
        match (&v.outcome, &v.certificate) {
            (Outcome::Yes, Certificate::Cocone { apex, legs }) => {
                *apex < self.n_obj && self.is_identity_cocone(*apex, legs)
            }
            (Outcome::No, Certificate::EmptyCategory) => self.n_obj == 0,
            (Outcome::No, Certificate::NoCospan { a, b }) => {
                *a < self.n_obj && *b < self.n_obj && !self.has_cospan(*a, *b)
            }
            (Outcome::No, Certificate::NoCoequalizer { f, g }) => {
                *f < self.num_arrows()
                    && *g < self.num_arrows()
                    && self.src[*f] == self.src[*g]
                    && self.tgt[*f] == self.tgt[*g]
                    && !self.has_coequalizing_arrow(*f, *g)
            }
            _ => false,
        }
    }
}

fn canonical_labels(uf: &UnionFind<usize>, n: usize) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut root_label = std::collections::HashMap::new();
    for (i, l) in label.iter_mut().enumerate() {
        let r = uf.find(i);
        let next = root_label.len();
        *l = *root_label.entry(r).or_insert(next);
    }
    label
}

/// Wire form of a functor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrdFunctorData {
    pub src: FinCategory,
    pub dst: FinCategory,
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

/// A functor between finite categories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrdFunctorData", into = "OrdFunctorData")]
pub struct OrdFunctor {
    pub src: Arc<FinCategory>,
    pub dst: Arc<FinCategory>,
    pub obj_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl TryFrom<OrdFunctorData> for OrdFunctor {
    type Error = CategoryError;

    fn try_from(d: OrdFunctorData) -> Result<Self, CategoryError> {
        OrdFunctor::new(Arc::new(d.src), Arc::new(d.dst), d.objects, d.arrows)
    }
}

impl From<OrdFunctor> for OrdFunctorData {
    fn from(f: OrdFunctor) -> Self {
        OrdFunctorData { src: (*f.src).clone(), dst: (*f.dst).clone(), objects: f.obj_map, arrows: f.arrow_map }
    }
}

impl OrdFunctor {
    pub fn new(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        obj_map: Vec<usize>,
        arrow_map: Vec<usize>,
    ) -> Result<Self, CategoryError> {
        let f = OrdFunctor { src, dst, obj_map, arrow_map };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let obj_map = (0..c.num_objects()).collect();
        let arrow_map = (0..c.num_arrows()).collect();
        OrdFunctor { src: c.clone(), dst: c, obj_map, arrow_map }
    }

    pub fn validate(&self) -> Result<(), CategoryError> {
        let (s, d) = (&self.src, &self.dst);
        if self.obj_map.len() != s.num_objects() {
            return Err(CategoryError::BadPresentation("object map has wrong length".into()));
        }
        if self.arrow_map.len() != s.num_arrows() {
            return Err(CategoryError::BadPresentation("arrow map has wrong length".into()));
        }
        for (o, &x) in self.obj_map.iter().enumerate() {
            if x >= d.num_objects() {
                return Err(CategoryError::OutOfRange { index: x, size: d.num_objects() });
            }
            if self.arrow_map[s.identity(o)] != d.identity(x) {
                return Err(CategoryError::NotFunctorial { what: "identities", at: o });
            }
        }
        for (f, &x) in self.arrow_map.iter().enumerate() {
            if x >= d.num_arrows() {
                return Err(CategoryError::OutOfRange { index: x, size: d.num_arrows() });
            }
            if d.src(x) != self.obj_map[s.src(f)] || d.tgt(x) != self.obj_map[s.tgt(f)] {
                return Err(CategoryError::NotFunctorial { what: "endpoints", at: f });
            }
        }
        for f in 0..s.num_arrows() {
            for &g in s.out_arrows(s.tgt(f)) {
                if self.arrow_map[s.compose(g, f)] != d.compose(self.arrow_map[g], self.arrow_map[f]) {
                    return Err(CategoryError::NotFunctorial { what: "composition", at: f });
                }
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &OrdFunctor) -> OrdFunctor {
        assert_eq!(*self.dst, *other.src, "functor composition mismatch");
        OrdFunctor {
            src: self.src.clone(),
            dst: other.dst.clone(),
            obj_map: self.obj_map.iter().map(|&o| other.obj_map[o]).collect(),
            arrow_map: self.arrow_map.iter().map(|&f| other.arrow_map[f]).collect(),
        }
    }

    /// Objects `(a, φ: b -> J a)` of the comma category `b/J`, in order of
    /// `a` then `φ`.
    fn comma_objects(&self, b: usize) -> Vec<(usize, usize)> {
        let mut objs = Vec::new();
        for a in 0..self.src.num_objects() {
            for phi in self.dst.hom(b, self.obj_map[a]) {
                objs.push((a, phi));
            }
        }
        objs
    }

    /// The comma category `b/J` with its object labels `(a, φ)`.
    pub fn comma(&self, b: usize) -> (FinCategory, Vec<(usize, usize)>) {
        let objs = self.comma_objects(b);
        let index: std::collections::HashMap<(usize, usize), usize> =
            objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        // Arrows: (object index, α) with α leaving the object's `a`.
        let mut arrows = Vec::new();
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut arrow_index = std::collections::HashMap::new();
        for (i, &(a, phi)) in objs.iter().enumerate() {
            for &alpha in self.src.out_arrows(a) {
                let t = (self.src.tgt(alpha), self.dst.compose(self.arrow_map[alpha], phi));
                arrow_index.insert((i, alpha), arrows.len());
                arrows.push((i, alpha));
                src.push(i);
                tgt.push(index[&t]);
            }
        }
        let ident = objs.iter().enumerate().map(|(i, &(a, _))| arrow_index[&(i, self.src.identity(a))]).collect();
        let s = &self.src;
        let cat = FinCategory::from_fn(objs.len(), src, tgt.clone(), ident, |g, f| {
            let (i, alpha) = arrows[f];
            let (_, beta) = arrows[g];
            arrow_index.get(&(i, s.compose(beta, alpha))).copied()
        })
        .expect("comma category is a category");
        (cat, objs)
    }

    /// Decide finality: every comma category `b/J` is nonempty and connected.
    pub fn is_final(&self) -> Verdict {
        for b in 0..self.dst.num_objects() {
            if let Some(c) = self.comma_failure(b) {
                return Verdict::no(c);
            }
        }
        Verdict::yes(Certificate::Checked { items: self.dst.num_objects() })
    }

    fn comma_failure(&self, b: usize) -> Option<Certificate> {
        let objs = self.comma_objects(b);
        if objs.is_empty() {
            return Some(Certificate::CommaEmpty { b });
        }
        let index: std::collections::HashMap<(usize, usize), usize> =
            objs.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mut uf = UnionFind::<usize>::new(objs.len());
        for (i, &(a, phi)) in objs.iter().enumerate() {
            for &alpha in self.src.out_arrows(a) {
                let t = (self.src.tgt(alpha), self.dst.compose(self.arrow_map[alpha], phi));
                uf.union(i, index[&t]);
            }
        }
        let labels = canonical_labels(&uf, objs.len());
        let components = labels.iter().max().unwrap() + 1;
        if components > 1 {
            let second = labels.iter().position(|&l| l == 1).unwrap();
            return Some(Certificate::CommaDisconnected { b, first: objs[0], second: objs[second], components });
        }
        None
    }

    /// Re-check a finality certificate for the given object only.
    pub fn check_final_certificate(&self, v: &Verdict) -> bool {
        use crate::verdict::Outcome;
        match (&v.outcome, &v.certificate) {
            (Outcome::No, Certificate::CommaEmpty { b }) => {
                *b < self.dst.num_objects() && self.comma_objects(*b).is_empty()
            }
            (Outcome::No, Certificate::CommaDisconnected { b, .. }) => {
                *b < self.dst.num_objects()
                    && matches!(self.comma_failure(*b), Some(Certificate::CommaDisconnected { .. }))
            }
            (Outcome::Yes, _) => self.is_final().is_yes(),
            _ => false,
        }
    }

    pub fn is_fully_faithful(&self) -> Verdict {
        let (s, d) = (&self.src, &self.dst);
        for a in 0..s.num_objects() {
            for a2 in 0..s.num_objects() {
                let mut image = std::collections::HashMap::new();
                for f in s.hom(a, a2) {
                    if let Some(&g) = image.get(&self.arrow_map[f]) {
                        return Verdict::no(Certificate::NotFaithful { f: g, g: f });
                    }
                    image.insert(self.arrow_map[f], f);
                }
                for x in d.hom(self.obj_map[a], self.obj_map[a2]) {
                    if !image.contains_key(&x) {
                        return Verdict::no(Certificate::NotFull { a, a2, arrow: x });
                    }
                }
            }
        }
        Verdict::yes(Certificate::Checked { items: s.num_objects() * s.num_objects() })
    }

    pub fn is_essentially_surjective(&self) -> Verdict {
        let d = &self.dst;
        for b in 0..d.num_objects() {
            let hit = self.obj_map.iter().any(|&x| d.hom(x, b).into_iter().any(|f| d.inverse(f).is_some()));
            if !hit {
                return Verdict::no(Certificate::NotEssentiallySurjective { object: b });
            }
        }
        Verdict::yes(Certificate::Checked { items: d.num_objects() })
    }

    /// A protofiltered index: filtered codomain and final functor.
    pub fn is_protofiltered_index(&self) -> Verdict {
        let f = self.dst.is_filtered();
        if !f.is_yes() {
            return f.staged("codomain filtered");
        }
        let j = self.is_final();
        if !j.is_yes() {
            return j.staged("final");
        }
        Verdict::yes(Certificate::Report {
            parts: vec![("codomain filtered".into(), f.outcome), ("final".into(), j.outcome)],
        })
    }
}

/// A presentation of a category by generating arrows and relations.
///
/// Words are read in diagrammatic order: `[g1, g2, g3]` denotes
/// `g3 ∘ g2 ∘ g1`.  An empty word denotes the identity of the relation's
/// source object.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Presentation {
    pub objects: usize,
    pub generators: Vec<(usize, usize)>,
    pub relations: Vec<Relation>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Relation {
    pub source: usize,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

/// The category presented, with the image of each generator and a normal
/// word for every arrow.
#[derive(Clone, Debug)]
pub struct Presented {
    pub category: FinCategory,
    pub generator_arrows: Vec<usize>,
    pub words: Vec<Vec<usize>>,
}

impl Presentation {
    pub fn new(objects: usize) -> Self {
        Presentation { objects, ..Default::default() }
    }

    pub fn generator(&mut self, src: usize, tgt: usize) -> usize {
        self.generators.push((src, tgt));
        self.generators.len() - 1
    }

    pub fn relate(&mut self, source: usize, lhs: Vec<usize>, rhs: Vec<usize>) {
        self.relations.push(Relation { source, lhs, rhs });
    }

    fn word_end(&self, source: usize, w: &[usize]) -> Result<usize, CategoryError> {
        let mut o = source;
        for &g in w {
            let &(s, t) = self
                .generators
                .get(g)
                .ok_or_else(|| CategoryError::BadPresentation(format!("unknown generator {g}")))?;
            if s != o {
                return Err(CategoryError::BadPresentation(format!("word {w:?} is not composable")));
            }
            o = t;
        }
        Ok(o)
    }

    /// Enumerate the presented category, aborting after `limit` states.
    pub fn enumerate(&self, limit: usize) -> Result<Presented, CategoryError> {
        for r in &self.relations {
            if r.source >= self.objects {
                return Err(CategoryError::BadPresentation(format!("relation source {} out of range", r.source)));
            }
            if self.word_end(r.source, &r.lhs)? != self.word_end(r.source, &r.rhs)? {
                return Err(CategoryError::BadPresentation("relation sides have different targets".into()));
            }
        }
        let mut e = Enumerator::new(self, limit);
        e.run()?;
        Ok(e.finish())
    }
}

/// Coset-style enumeration of a presented category.  States are arrows;
/// state `q` records the source `start[q]` and target `obj[q]`, and
/// `next[q][k]` is `q` followed by the `k`-th generator leaving `obj[q]`.
struct Enumerator<'a> {
    p: &'a Presentation,
    limit: usize,
    gens_out: Vec<Vec<usize>>,
    gen_pos: Vec<usize>,
    rel_by_src: Vec<Vec<usize>>,
    start: Vec<usize>,
    obj: Vec<usize>,
    next: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    queue: VecDeque<(usize, usize)>,
}

impl<'a> Enumerator<'a> {
    fn new(p: &'a Presentation, limit: usize) -> Self {
        let mut gens_out = vec![Vec::new(); p.objects];
        let mut gen_pos = vec![0; p.generators.len()];
        for (g, &(s, _)) in p.generators.iter().enumerate() {
            gen_pos[g] = gens_out[s].len();
            gens_out[s].push(g);
        }
        let mut rel_by_src = vec![Vec::new(); p.objects];
        for (i, r) in p.relations.iter().enumerate() {
            rel_by_src[r.source].push(i);
        }
        let mut e = Enumerator {
            p,
            limit,
            gens_out,
            gen_pos,
            rel_by_src,
            start: Vec::new(),
            obj: Vec::new(),
            next: Vec::new(),
            parent: Vec::new(),
            queue: VecDeque::new(),
        };
        for o in 0..p.objects {
            e.new_state(o, o);
        }
        e
    }

    fn new_state(&mut self, start: usize, obj: usize) -> usize {
        let q = self.obj.len();
        self.start.push(start);
        self.obj.push(obj);
        self.next.push(vec![None; self.gens_out[obj].len()]);
        self.parent.push(q);
        q
    }

    fn find(&mut self, mut q: usize) -> usize {
        while self.parent[q] != q {
            let gp = self.parent[self.parent[q]];
            self.parent[q] = gp;
            q = gp;
        }
        q
    }

    fn step(&mut self, q: usize, g: usize) -> Result<usize, CategoryError> {
        let q = self.find(q);
        let k = self.gen_pos[g];
        if let Some(t) = self.next[q][k] {
            return Ok(self.find(t));
        }
        if self.obj.len() >= self.limit {
            return Err(CategoryError::EnumerationLimit { limit: self.limit });
        }
        let t = self.new_state(self.start[q], self.p.generators[g].1);
        self.next[q][k] = Some(t);
        Ok(t)
    }

    fn trace(&mut self, q: usize, w: &[usize]) -> Result<usize, CategoryError> {
        let mut q = self.find(q);
        for &g in w {
            q = self.step(q, g)?;
        }
        Ok(q)
    }

    fn merge(&mut self, a: usize, b: usize) {
        self.queue.push_back((a, b));
        while let Some((a, b)) = self.queue.pop_front() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop] = keep;
            let moved = std::mem::take(&mut self.next[drop]);
            for (k, t) in moved.into_iter().enumerate() {
                let Some(t) = t else { continue };
                match self.next[keep][k] {
                    Some(u) => self.queue.push_back((u, t)),
                    None => self.next[keep][k] = Some(t),
                }
            }
        }
    }

    fn run(&mut self) -> Result<(), CategoryError> {
        let mut q = 0;
        while q < self.obj.len() {
            if self.find(q) == q {
                let o = self.obj[q];
                for ri in self.rel_by_src[o].clone() {
                    let r = &self.p.relations[ri];
                    let (lhs, rhs) = (r.lhs.clone(), r.rhs.clone());
                    let x = self.trace(q, &lhs)?;
                    let y = self.trace(q, &rhs)?;
                    self.merge(x, y);
                    if self.find(q) != q {
                        break;
                    }
                }
                if self.find(q) == q {
                    for g in self.gens_out[o].clone() {
                        self.step(q, g)?;
                    }
                }
            }
            q += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> Presented {
        // Breadth-first numbering from the identities, object by object.
        let mut number = vec![usize::MAX; self.obj.len()];
        let mut order = Vec::new();
        let mut words: Vec<Vec<usize>> = Vec::new();
        for o in 0..self.p.objects {
            let root = self.find(o);
            if number[root] != usize::MAX {
                continue;
            }
            number[root] = order.len();
            order.push(root);
            words.push(Vec::new());
            let mut head = order.len() - 1;
            while head < order.len() {
                let q = order[head];
                for g in self.gens_out[self.obj[q]].clone() {
                    let t = self.step(q, g).expect("complete table");
                    if number[t] == usize::MAX {
                        number[t] = order.len();
                        order.push(t);
                        let mut w = words[head].clone();
                        w.push(g);
                        words.push(w);
                    }
                }
                head += 1;
            }
        }
        let src: Vec<usize> = order.iter().map(|&q| self.start[q]).collect();
        let tgt: Vec<usize> = order.iter().map(|&q| self.obj[q]).collect();
        let ident: Vec<usize> = (0..self.p.objects).map(|o| number[self.find(o)]).collect();
        let mut table = std::collections::HashMap::new();
        for (fi, &fq) in order.iter().enumerate() {
            for (gi, w) in words.iter().enumerate() {
                if src[gi] == tgt[fi] {
                    let h = self.trace(fq, w).expect("complete table");
                    table.insert((gi, fi), number[h]);
                }
            }
        }
        let generator_arrows = (0..self.p.generators.len())
            .map(|g| {
                let s = self.p.generators[g].0;
                let q = self.find(s);
                let t = self.step(q, g).expect("complete table");
                number[t]
            })
            .collect();
        let category = FinCategory::from_fn(self.p.objects, src, tgt, ident, |g, f| table.get(&(g, f)).copied())
            .expect("enumerated presentation is a category");
        Presented { category, generator_arrows, words }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_object_is_filtered() {
        assert!(FinCategory::terminal().is_filtered().is_yes());
    }

    #[test]
    fn discrete_pair_is_not_filtered() {
        let v = FinCategory::discrete(2).is_filtered();
        assert!(v.is_no());
        assert_eq!(v.certificate, Certificate::NoCospan { a: 0, b: 1 });
    }

    #[test]
    fn free_parallel_pair_fails_coequalizer_clause() {
        let mut p = Presentation::new(2);
        p.generator(0, 1);
        p.generator(0, 1);
        let c = p.enumerate(100).unwrap().category;
        let v = c.is_filtered();
        assert!(matches!(v.certificate, Certificate::NoCoequalizer { .. }));
        assert!(c.check_filtered_certificate(&v));
    }

    #[test]
    fn chain_is_filtered_with_top_as_apex() {
        let c = FinCategory::chain(4);
        let v = c.is_filtered();
        assert!(c.check_filtered_certificate(&v));
        assert_eq!(
            v.certificate,
            Certificate::Cocone {
                apex: 3,
                legs: c.hom(0, 3).into_iter().chain(c.hom(1, 3)).chain(c.hom(2, 3)).chain(c.hom(3, 3)).collect()
            }
        );
    }

    #[test]
    fn idempotent_monoid_is_filtered() {
        // {1, e} with e∘e = e: the arrow e coequalizes (1, e).
        let c = FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap();
        assert!(c.is_filtered().is_yes());
    }

    #[test]
    fn group_z2_is_not_filtered() {
        let c = FinCategory::monoid(&[vec![0, 1], vec![1, 0]], 0).unwrap();
        assert!(c.is_filtered().is_no());
    }

    #[test]
    fn presentation_of_cyclic_monoid() {
        // x^3 = x gives {1, x, x^2}.
        let mut p = Presentation::new(1);
        let x = p.generator(0, 0);
        p.relate(0, vec![x, x, x], vec![x]);
        let pr = p.enumerate(100).unwrap();
        assert_eq!(pr.category.num_arrows(), 3);
    }

    #[test]
    fn terminal_inclusion_is_final() {
        let c = Arc::new(FinCategory::chain(3));
        let t = Arc::new(FinCategory::terminal());
        let j = OrdFunctor::new(t, c.clone(), vec![2], vec![c.identity(2)]).unwrap();
        assert!(j.is_final().is_yes());
        let j0 = OrdFunctor::new(Arc::new(FinCategory::terminal()), c.clone(), vec![0], vec![c.identity(0)]).unwrap();
        assert!(j0.is_final().is_no());
    }

    #[test]
    fn serde_round_trip() {
        let c = FinCategory::chain(3);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<FinCategory>(&s).unwrap(), c);
    }

    #[test]
    fn invalid_table_is_rejected() {
        let data = FinCategoryData {
            objects: 1,
            arrows: vec![[0, 0], [0, 0]],
            identities: vec![0],
            composition: vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]],
        };
        assert!(FinCategory::try_from(data).is_ok());
        let bad = FinCategoryData {
            objects: 1,
            arrows: vec![[0, 0], [0, 0]],
            identities: vec![0],
            composition: vec![[0, 0, 0], [0, 1, 0], [1, 0, 1], [1, 1, 0]],
        };
        assert!(FinCategory::try_from(bad).is_err());
    }
}
