//! Finite enriched categories, functors, weights and natural
//! transformations over one of the finite bases.
//!
//! Index conventions: `hom(a, b)` is stored at `a·n + b`; the composition
//! `hom(b, c) ⊗ hom(a, b) -> hom(a, c)` at `(a·n + b)·n + c`.  A weight
//! `M: C^op -> V` is stored in evaluation form: `act(a, b): C(a, b) ⊗ M(b)
//! -> M(a)` at `a·n + b`.  Covariant functors `C -> V` are weights on the
//! opposite category.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{Base, BaseError, BaseKind, BaseObject, MorphismData};
use crate::linalg::Matrix;
use crate::ordcat::{CategoryError, FinCategory, OrdFunctor};
use crate::verdict::{Certificate, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnrichedError {
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("{law} fails at {at:?}")]
    Law { law: String, at: Vec<usize> },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("weights or functors live over different domains")]
    DomainMismatch,
}

impl EnrichedError {
    /// The failed equation as a certificate.
    pub fn certificate(&self) -> Certificate {
        match self {
            EnrichedError::Law { law, at } => {
                Certificate::Equation { law: law.clone(), at: at.clone(), lhs: String::new(), rhs: String::new() }
            }
            other => {
                Certificate::Equation { law: other.to_string(), at: vec![], lhs: String::new(), rhs: String::new() }
            }
        }
    }
}

fn law(name: &str, at: &[usize]) -> EnrichedError {
    EnrichedError::Law { law: name.to_string(), at: at.to_vec() }
}

/// Wire form of a V-category.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VCategoryData {
    pub base: Base,
    pub objects: usize,
    /// `homs[a][b]`.
    pub homs: Vec<Vec<BaseObject>>,
    /// `composition[a][b][c]: hom(b,c) ⊗ hom(a,b) -> hom(a,c)`.
    pub composition: Vec<Vec<Vec<MorphismData>>>,
    /// `identities[a]: I -> hom(a,a)`.
    pub identities: Vec<MorphismData>,
}

/// A finite V-category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VCategoryData", into = "VCategoryData")]
pub struct VCategory {
    pub base: Base,
    n: usize,
    homs: Vec<BaseObject>,
    comp: Vec<MorphismData>,
    ident: Vec<MorphismData>,
}

impl TryFrom<VCategoryData> for VCategory {
    type Error = EnrichedError;
    fn try_from(d: VCategoryData) -> Result<Self, EnrichedError> {
        let n = d.objects;
        if d.homs.len() != n || d.homs.iter().any(|r| r.len() != n) {
            return Err(EnrichedError::Shape("homs must be an n×n table".into()));
        }
        if d.composition.len() != n || d.composition.iter().any(|r| r.len() != n || r.iter().any(|s| s.len() != n)) {
            return Err(EnrichedError::Shape("composition must be an n×n×n table".into()));
        }
        let homs = d.homs.into_iter().flatten().collect();
        let comp = d.composition.into_iter().flatten().flatten().collect();
        VCategory::new(d.base, n, homs, comp, d.identities)
    }
}

impl From<VCategory> for VCategoryData {
    fn from(c: VCategory) -> Self {
        let n = c.n;
        VCategoryData {
            base: c.base.clone(),
            objects: n,
            homs: (0..n).map(|a| (0..n).map(|b| c.hom(a, b).clone()).collect()).collect(),
            composition: (0..n)
                .map(|a| (0..n).map(|b| (0..n).map(|cc| c.comp(a, b, cc).clone()).collect()).collect())
                .collect(),
            identities: c.ident,
        }
    }
}

impl VCategory {
    /// Build and validate.
    pub fn new(
        base: Base,
        n: usize,
        homs: Vec<BaseObject>,
        comp: Vec<MorphismData>,
        ident: Vec<MorphismData>,
    ) -> Result<Self, EnrichedError> {
        let c = Self::new_unchecked(base, n, homs, comp, ident)?;
        c.validate()?;
        Ok(c)
    }

    /// Build without checking the category laws (shape is still checked).
    pub fn new_unchecked(
        base: Base,
        n: usize,
        homs: Vec<BaseObject>,
        comp: Vec<MorphismData>,
        ident: Vec<MorphismData>,
    ) -> Result<Self, EnrichedError> {
        if homs.len() != n * n || comp.len() != n * n * n || ident.len() != n {
            return Err(EnrichedError::Shape("table sizes do not match the object count".into()));
        }
        Ok(VCategory { base, n, homs, comp, ident })
    }

    pub fn num_objects(&self) -> usize {
        self.n
    }

    pub fn hom(&self, a: usize, b: usize) -> &BaseObject {
        &self.homs[a * self.n + b]
    }

    pub fn comp(&self, a: usize, b: usize, c: usize) -> &MorphismData {
        &self.comp[(a * self.n + b) * self.n + c]
    }

    pub fn ident(&self, a: usize) -> &MorphismData {
        &self.ident[a]
    }

    /// Check objects, morphisms, unit laws and associativity.
    pub fn validate(&self) -> Result<(), EnrichedError> {
        let b = &self.base;
        let n = self.n;
        let unit = b.unit();
        for h in &self.homs {
            b.check_object(h)?;
        }
        for a in 0..n {
            b.check_morphism(&unit, self.hom(a, a), self.ident(a))?;
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let src = b.tensor(self.hom(y, z), self.hom(x, y))?;
                    b.check_morphism(&src, self.hom(x, z), self.comp(x, y, z)).map_err(|e| EnrichedError::Law {
                        law: format!("composition morphism: {e}"),
                        at: vec![x, y, z],
                    })?;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let h = self.hom(x, y);
                let right =
                    b.compose(self.comp(x, x, y), &b.tensor_mor(&b.identity(h), self.ident(x), &unit, self.hom(x, x)));
                if right != b.identity(h) {
                    return Err(law("right unit law", &[x, y]));
                }
                let left = b.compose(self.comp(x, y, y), &b.tensor_mor(self.ident(y), &b.identity(h), h, h));
                if left != b.identity(h) {
                    return Err(law("left unit law", &[x, y]));
                }
            }
        }
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        // hom(y,z) ⊗ hom(x,y) ⊗ hom(w,x) -> hom(w,z)
                        let (yz, xy, wx) = (self.hom(y, z), self.hom(x, y), self.hom(w, x));
                        let wy = self.hom(w, y);
                        let lhs = b.compose(
                            self.comp(w, y, z),
                            &b.tensor_mor(&b.identity(yz), self.comp(w, x, y), &b.tensor(xy, wx)?, wy),
                        );
                        let rhs =
                            b.compose(self.comp(w, x, z), &b.tensor_mor(self.comp(x, y, z), &b.identity(wx), wx, wx));
                        if lhs != rhs {
                            return Err(law("associativity", &[w, x, y, z]));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate_verdict(&self) -> Verdict {
        match self.validate() {
            Ok(()) => Verdict::yes(Certificate::Checked { items: self.n }),
            Err(e) => Verdict::no(e.certificate()),
        }
    }

    /// The unit V-category: one object with hom `I`.
    pub fn unit(base: &Base) -> Self {
        let i = base.unit();
        VCategory::new(base.clone(), 1, vec![i.clone()], vec![base.identity(&i)], vec![base.identity(&i)])
            .expect("unit V-category")
    }

    /// The free V-category on an ordinary finite category: `hom(a, b)` is
    /// the copower `K(a, b) · I`.
    pub fn free(base: &Base, k: &FinCategory) -> Result<Self, EnrichedError> {
        let n = k.num_objects();
        let homs_list: Vec<Vec<usize>> = (0..n * n).map(|i| k.hom(i / n, i % n)).collect();
        let pos: HashMap<usize, usize> =
            homs_list.iter().flat_map(|h| h.iter().enumerate().map(|(i, &f)| (f, i))).collect();
        let homs: Vec<BaseObject> = homs_list.iter().map(|h| base.discrete(h.len())).collect();
        let mut comp = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (bc, ab, ac) = (&homs_list[b * n + c], &homs_list[a * n + b], &homs_list[a * n + c]);
                    let cells: Vec<usize> = bc
                        .iter()
                        .flat_map(|&g| ab.iter().map(move |&f| (g, f)))
                        .map(|(g, f)| pos[&k.compose(g, f)])
                        .collect();
                    comp.push(discrete_map(base, &cells, ac.len()));
                }
            }
        }
        let ident = (0..n).map(|a| discrete_map(base, &[pos[&k.identity(a)]], homs_list[a * n + a].len())).collect();
        VCategory::new(base.clone(), n, homs, comp, ident)
    }

    /// The opposite V-category, using the symmetry of the base.
    pub fn opposite(&self) -> Self {
        let b = &self.base;
        let n = self.n;
        let homs = (0..n * n).map(|i| self.hom(i % n, i / n).clone()).collect();
        let mut comp = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for x in 0..n {
                for c in 0..n {
                    // op: hom(c,x) ⊗ hom(x,a) -> hom(c,a), from comp(c,x,a) after swapping.
                    let sym = b.symmetry(self.hom(c, x), self.hom(x, a));
                    comp.push(b.compose(self.comp(c, x, a), &sym));
                }
            }
        }
        VCategory { base: b.clone(), n, homs, comp, ident: self.ident.clone() }
    }

    /// Full sub-V-category on the listed objects.
    pub fn full_subcategory(&self, objects: &[usize]) -> Self {
        let m = objects.len();
        let homs = (0..m * m).map(|i| self.hom(objects[i / m], objects[i % m]).clone()).collect();
        let mut comp = Vec::with_capacity(m * m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    comp.push(self.comp(objects[a], objects[b], objects[c]).clone());
                }
            }
        }
        let ident = objects.iter().map(|&a| self.ident(a).clone()).collect();
        VCategory { base: self.base.clone(), n: m, homs, comp, ident }
    }

    /// The underlying ordinary category: arrows `a -> b` are the points
    /// of `hom(a, b)`.  Returns the category and each arrow's
    /// `(a, b, point)` label.
    pub fn underlying_category(&self) -> Result<(FinCategory, Vec<(usize, usize, usize)>), EnrichedError> {
        let b = &self.base;
        let n = self.n;
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for p in b.points(self.hom(x, y))? {
                    index.insert((x, y, p), labels.len());
                    labels.push((x, y, p));
                }
            }
        }
        let src = labels.iter().map(|l| l.0).collect();
        let tgt = labels.iter().map(|l| l.1).collect();
        let ident = (0..n).map(|a| index[&(a, a, b.morphism_point(self.ident(a)))]).collect();
        let cat = FinCategory::from_fn(n, src, tgt, ident, |g, f| {
            let (x, y, pf) = labels[f];
            let (_, z, pg) = labels[g];
            let h = b.apply2(self.comp(x, y, z), self.hom(y, z), self.hom(x, y), pg, pf);
            index.get(&(x, z, h)).copied()
        })?;
        Ok((cat, labels))
    }

    /// Change of base along the forgetful functor from `G`-sets to sets.
    /// Returns `U_*C` and the identity-on-objects comparison functor
    /// `C_0 -> (U_*C)_0`.
    pub fn change_of_base(&self) -> Result<(VCategory, OrdFunctor), EnrichedError> {
        let target = match self.base.kind() {
            BaseKind::FinGSet(_) | BaseKind::FinSet => Base::fin_set(),
            _ => {
                return Err(
                    BaseError::Unsupported("change of base is configured only for G-sets (and sets)".into()).into()
                )
            }
        };
        let homs = self.homs.iter().map(|h| BaseObject::set(h.cells())).collect();
        let forgotten = VCategory::new(target, self.n, homs, self.comp.clone(), self.ident.clone())?;
        let (c0, l0) = self.underlying_category()?;
        let (u0, lu) = forgotten.underlying_category()?;
        let index: HashMap<(usize, usize, usize), usize> = lu.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let arrow_map = l0.iter().map(|l| index[l]).collect();
        let s = OrdFunctor::new(Arc::new(c0), Arc::new(u0), (0..self.n).collect(), arrow_map)?;
        Ok((forgotten, s))
    }
}

/// A map between discrete objects given on cells (a permutation-style
/// matrix for `FinVec`).
pub fn discrete_map(base: &Base, cells: &[usize], target: usize) -> MorphismData {
    match base.kind() {
        BaseKind::FinVec(_) => {
            let mut m = Matrix::zeros(target, cells.len());
            for (j, &i) in cells.iter().enumerate() {
                m.set(i, j, 1);
            }
            MorphismData::Matrix(m)
        }
        _ => MorphismData::Cells(cells.to_vec()),
    }
}

/// Wire form of a weight.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightData {
    pub domain: VCategory,
    pub values: Vec<BaseObject>,
    /// `action[a][b]: C(a,b) ⊗ M(b) -> M(a)`.
    pub action: Vec<Vec<MorphismData>>,
}

/// A V-presheaf `M: C^op -> V` in evaluation form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightData", into = "WeightData")]
pub struct Weight {
    pub domain: Arc<VCategory>,
    values: Vec<BaseObject>,
    act: Vec<MorphismData>,
}

impl TryFrom<WeightData> for Weight {
    type Error = EnrichedError;
    fn try_from(d: WeightData) -> Result<Self, EnrichedError> {
        let n = d.domain.num_objects();
        if d.action.len() != n || d.action.iter().any(|r| r.len() != n) {
            return Err(EnrichedError::Shape("action must be an n×n table".into()));
        }
        Weight::new(Arc::new(d.domain), d.values, d.action.into_iter().flatten().collect())
    }
}

impl From<Weight> for WeightData {
    fn from(w: Weight) -> Self {
        let n = w.domain.num_objects();
        WeightData {
            domain: (*w.domain).clone(),
            values: w.values.clone(),
            action: (0..n).map(|a| (0..n).map(|b| w.act(a, b).clone()).collect()).collect(),
        }
    }
}

impl Weight {
    pub fn new(domain: Arc<VCategory>, values: Vec<BaseObject>, act: Vec<MorphismData>) -> Result<Self, EnrichedError> {
        let w = Self::new_unchecked(domain, values, act)?;
        w.validate()?;
        Ok(w)
    }

    pub fn new_unchecked(
        domain: Arc<VCategory>,
        values: Vec<BaseObject>,
        act: Vec<MorphismData>,
    ) -> Result<Self, EnrichedError> {
        let n = domain.num_objects();
        if values.len() != n || act.len() != n * n {
            return Err(EnrichedError::Shape("weight tables do not match the domain".into()));
        }
        Ok(Weight { domain, values, act })
    }

    pub fn base(&self) -> &Base {
        &self.domain.base
    }

    pub fn value(&self, a: usize) -> &BaseObject {
        &self.values[a]
    }

    pub fn values(&self) -> &[BaseObject] {
        &self.values
    }

    pub fn act(&self, a: usize, b: usize) -> &MorphismData {
        &self.act[a * self.domain.num_objects() + b]
    }

    pub fn validate(&self) -> Result<(), EnrichedError> {
        let c = &self.domain;
        let b = c.base.clone();
        let n = c.num_objects();
        for v in &self.values {
            b.check_object(v)?;
        }
        for x in 0..n {
            for y in 0..n {
                let src = b.tensor(c.hom(x, y), self.value(y))?;
                b.check_morphism(&src, self.value(x), self.act(x, y))
                    .map_err(|e| EnrichedError::Law { law: format!("action morphism: {e}"), at: vec![x, y] })?;
            }
        }
        for x in 0..n {
            let m = self.value(x);
            let e = b.compose(self.act(x, x), &b.tensor_mor(c.ident(x), &b.identity(m), m, m));
            if e != b.identity(m) {
                return Err(law("action unit law", &[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    // C(x,y) ⊗ C(y,z) ⊗ M(z) -> M(x)
                    let (xy, yz, mz) = (c.hom(x, y), c.hom(y, z), self.value(z));
                    let my = self.value(y);
                    let lhs = b.compose(
                        self.act(x, y),
                        &b.tensor_mor(&b.identity(xy), self.act(y, z), &b.tensor(yz, mz)?, my),
                    );
                    let swap_comp = b.compose(c.comp(x, y, z), &b.symmetry(xy, yz));
                    let rhs = b.compose(self.act(x, z), &b.tensor_mor(&swap_comp, &b.identity(mz), mz, mz));
                    if lhs != rhs {
                        return Err(law("action composition law", &[x, y, z]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate_verdict(&self) -> Verdict {
        match self.validate() {
            Ok(()) => Verdict::yes(Certificate::Checked { items: self.domain.num_objects() }),
            Err(e) => Verdict::no(e.certificate()),
        }
    }

    /// The representable `C(-, c)`.
    pub fn yoneda(c: &Arc<VCategory>, target: usize) -> Self {
        let b = &c.base;
        let n = c.num_objects();
        let values = (0..n).map(|a| c.hom(a, target).clone()).collect();
        let mut act = Vec::with_capacity(n * n);
        for a in 0..n {
            for x in 0..n {
                act.push(b.compose(c.comp(a, x, target), &b.symmetry(c.hom(a, x), c.hom(x, target))));
            }
        }
        Weight { domain: c.clone(), values, act }
    }

    /// The weight constant at `X` with trivial action, over a domain whose
    /// homs admit the map to the unit (cartesian bases).
    pub fn constant(c: &Arc<VCategory>, x: &BaseObject) -> Result<Self, EnrichedError> {
        let b = &c.base;
        if !b.is_cartesian() {
            return Err(BaseError::Unsupported("constant weights need a cartesian base".into()).into());
        }
        let n = c.num_objects();
        let values = vec![x.clone(); n];
        let mut act = Vec::with_capacity(n * n);
        for a in 0..n {
            for y in 0..n {
                let h = c.hom(a, y).cells();
                act.push(MorphismData::Cells((0..h).flat_map(|_| 0..x.cells()).collect()));
            }
        }
        Weight::new(c.clone(), values, act)
    }

    /// The terminal weight `Δ1`.
    pub fn terminal(c: &Arc<VCategory>) -> Result<Self, EnrichedError> {
        Self::constant(c, &c.base.unit())
    }

    /// The initial weight `Δ∅`.
    pub fn initial(c: &Arc<VCategory>) -> Self {
        let b = &c.base;
        let n = c.num_objects();
        let z = b.empty();
        let act = (0..n * n)
            .map(|_| match b.kind() {
                BaseKind::FinVec(_) => MorphismData::Matrix(Matrix::zeros(0, 0)),
                _ => MorphismData::Cells(vec![]),
            })
            .collect();
        Weight { domain: c.clone(), values: vec![z; n], act }
    }

    /// Hom form `C(a, b) -> [M(b), M(a)]` of the action.
    pub fn hom_form(&self, a: usize, b: usize) -> Result<MorphismData, EnrichedError> {
        let base = self.base();
        Ok(base.transpose(self.domain.hom(a, b), self.value(b), self.value(a), self.act(a, b))?)
    }

    /// Rebuild the evaluation form from hom-form data.
    pub fn from_hom_form(
        domain: Arc<VCategory>,
        values: Vec<BaseObject>,
        hom_form: &[MorphismData],
    ) -> Result<Self, EnrichedError> {
        let n = domain.num_objects();
        let base = domain.base.clone();
        let mut act = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                act.push(base.untranspose(&values[b], &values[a], &hom_form[a * n + b])?);
            }
        }
        Weight::new(domain, values, act)
    }

    /// The underlying ordinary presheaf `c ↦ hom(I, M(c))` on `C_0`.
    pub fn underlying_presheaf(&self) -> Result<SetPresheaf, EnrichedError> {
        let b = self.base();
        let (c0, labels) = self.domain.underlying_category()?;
        let points: Vec<Vec<usize>> = self.values.iter().map(|v| b.points(v)).collect::<Result<_, _>>()?;
        let index: Vec<HashMap<usize, usize>> =
            points.iter().map(|ps| ps.iter().enumerate().map(|(i, &p)| (p, i)).collect()).collect();
        let maps = labels
            .iter()
            .map(|&(x, y, f)| {
                points[y]
                    .iter()
                    .map(|&m| index[x][&b.apply2(self.act(x, y), self.domain.hom(x, y), self.value(y), f, m)])
                    .collect()
            })
            .collect();
        SetPresheaf::new(Arc::new(c0), points.iter().map(|p| p.len()).collect(), maps)
    }

    /// The same weight read in `FinSet` over the forgotten domain `U_*C`
    /// returned by [`VCategory::change_of_base`].
    pub fn forget(&self, forgotten: &Arc<VCategory>) -> Result<Self, EnrichedError> {
        if forgotten.num_objects() != self.domain.num_objects() || !matches!(forgotten.base.kind(), BaseKind::FinSet) {
            return Err(EnrichedError::DomainMismatch);
        }
        let values = self.values.iter().map(|v| BaseObject::set(v.cells())).collect();
        Weight::new(forgotten.clone(), values, self.act.clone())
    }

    /// Restrict along a full inclusion of objects.
    pub fn restrict(&self, sub: &Arc<VCategory>, objects: &[usize]) -> Self {
        let n = objects.len();
        let values = objects.iter().map(|&a| self.value(a).clone()).collect();
        let mut act = Vec::with_capacity(n * n);
        for &a in objects {
            for &b in objects {
                act.push(self.act(a, b).clone());
            }
        }
        Weight { domain: sub.clone(), values, act }
    }
}

/// An ordinary presheaf `C^op -> FinSet` on a finite category, stored by
/// the size of each set and, for every arrow `f: a -> b`, the restriction
/// map `N(b) -> N(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPresheaf {
    pub category: Arc<FinCategory>,
    pub sizes: Vec<usize>,
    pub maps: Vec<Vec<usize>>,
}

impl SetPresheaf {
    pub fn new(category: Arc<FinCategory>, sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self, EnrichedError> {
        let p = SetPresheaf { category, sizes, maps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EnrichedError> {
        let c = &self.category;
        if self.sizes.len() != c.num_objects() || self.maps.len() != c.num_arrows() {
            return Err(EnrichedError::Shape("presheaf tables do not match the category".into()));
        }
        for f in 0..c.num_arrows() {
            let m = &self.maps[f];
            if m.len() != self.sizes[c.tgt(f)] || m.iter().any(|&x| x >= self.sizes[c.src(f)]) {
                return Err(law("presheaf map shape", &[f]));
            }
            if c.is_identity(f) && m.iter().enumerate().any(|(i, &x)| i != x) {
                return Err(law("presheaf identity", &[f]));
            }
            for &g in c.out_arrows(c.tgt(f)) {
                // N(g∘f) = N(f) ∘ N(g)
                let gf = &self.maps[c.compose(g, f)];
                if (0..self.sizes[c.tgt(g)]).any(|z| gf[z] != m[self.maps[g][z]]) {
                    return Err(law("presheaf composition", &[g, f]));
                }
            }
        }
        Ok(())
    }

    /// The representable `C(-, c)`.
    pub fn representable(category: Arc<FinCategory>, c: usize) -> Self {
        let homs: Vec<Vec<usize>> = (0..category.num_objects()).map(|a| category.hom(a, c)).collect();
        let pos: Vec<HashMap<usize, usize>> =
            homs.iter().map(|h| h.iter().enumerate().map(|(i, &f)| (f, i)).collect()).collect();
        let maps = (0..category.num_arrows())
            .map(|f| {
                let (a, b) = (category.src(f), category.tgt(f));
                homs[b].iter().map(|&g| pos[a][&category.compose(g, f)]).collect()
            })
            .collect();
        let sizes = homs.iter().map(|h| h.len()).collect();
        SetPresheaf { category, sizes, maps }
    }

    /// The terminal presheaf.
    pub fn terminal(category: Arc<FinCategory>) -> Self {
        let sizes = vec![1; category.num_objects()];
        let maps = vec![vec![0]; category.num_arrows()];
        SetPresheaf { category, sizes, maps }
    }

    /// Category of elements: objects `(c, x)` in order of `c` then `x`,
    /// arrows `f: (c, x) -> (d, y)` with `N(f)(y) = x`.
    pub fn elements(&self) -> (FinCategory, Vec<(usize, usize)>, Vec<usize>) {
        let c = &self.category;
        let mut objs = Vec::new();
        let mut index = HashMap::new();
        for a in 0..c.num_objects() {
            for x in 0..self.sizes[a] {
                index.insert((a, x), objs.len());
                objs.push((a, x));
            }
        }
        let mut arrows = Vec::new();
        for (i, &(a, x)) in objs.iter().enumerate() {
            for &f in c.out_arrows(a) {
                for y in 0..self.sizes[c.tgt(f)] {
                    if self.maps[f][y] == x {
                        arrows.push((i, f, index[&(c.tgt(f), y)]));
                    }
                }
            }
        }
        // An arrow out of (a, x) along f is determined by its target element,
        // so key arrows by (source, f, target).
        let key: HashMap<(usize, usize, usize), usize> = arrows.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let src = arrows.iter().map(|t| t.0).collect();
        let tgt = arrows.iter().map(|t| t.2).collect();
        let ident = objs.iter().enumerate().map(|(i, &(a, _))| key[&(i, c.identity(a), i)]).collect();
        let cat = FinCategory::from_fn(objs.len(), src, tgt, ident, |g, f| {
            let (i, ff, _) = arrows[f];
            let (_, gg, t) = arrows[g];
            key.get(&(i, c.compose(gg, ff), t)).copied()
        })
        .expect("category of elements");
        let projection = arrows.iter().map(|t| t.1).collect();
        (cat, objs, projection)
    }
}

/// A V-functor between V-categories over the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VFunctor {
    pub src: Arc<VCategory>,
    pub dst: Arc<VCategory>,
    pub obj_map: Vec<usize>,
    /// `action[a·n + b]: src.hom(a, b) -> dst.hom(Fa, Fb)`.
    pub action: Vec<MorphismData>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VFunctorData {
    pub src: VCategory,
    pub dst: VCategory,
    pub objects: Vec<usize>,
    pub action: Vec<Vec<MorphismData>>,
}

impl Serialize for VFunctor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.src.num_objects();
        VFunctorData {
            src: (*self.src).clone(),
            dst: (*self.dst).clone(),
            objects: self.obj_map.clone(),
            action: (0..n).map(|a| self.action[a * n..(a + 1) * n].to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VFunctor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let data = VFunctorData::deserialize(d)?;
        VFunctor::new(Arc::new(data.src), Arc::new(data.dst), data.objects, data.action.into_iter().flatten().collect())
            .map_err(serde::de::Error::custom)
    }
}

impl VFunctor {
    pub fn new(
        src: Arc<VCategory>,
        dst: Arc<VCategory>,
        obj_map: Vec<usize>,
        action: Vec<MorphismData>,
    ) -> Result<Self, EnrichedError> {
        let f = VFunctor { src, dst, obj_map, action };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(c: &Arc<VCategory>) -> Self {
        let n = c.num_objects();
        let action = (0..n * n).map(|i| c.base.identity(c.hom(i / n, i % n))).collect();
        VFunctor { src: c.clone(), dst: c.clone(), obj_map: (0..n).collect(), action }
    }

    pub fn act(&self, a: usize, b: usize) -> &MorphismData {
        &self.action[a * self.src.num_objects() + b]
    }

    pub fn validate(&self) -> Result<(), EnrichedError> {
        let (s, d) = (&self.src, &self.dst);
        if s.base != d.base {
            return Err(BaseError::Mismatch.into());
        }
        let b = &s.base;
        let n = s.num_objects();
        if self.obj_map.len() != n || self.action.len() != n * n || self.obj_map.iter().any(|&x| x >= d.num_objects()) {
            return Err(EnrichedError::Shape("functor tables do not match".into()));
        }
        let f = |a: usize| self.obj_map[a];
        for x in 0..n {
            for y in 0..n {
                b.check_morphism(s.hom(x, y), d.hom(f(x), f(y)), self.act(x, y))?;
            }
            if b.compose(self.act(x, x), s.ident(x)) != *d.ident(f(x)) {
                return Err(law("functor identity law", &[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = b.compose(self.act(x, z), s.comp(x, y, z));
                    let rhs = b.compose(
                        d.comp(f(x), f(y), f(z)),
                        &b.tensor_mor(self.act(y, z), self.act(x, y), s.hom(x, y), d.hom(f(x), f(y))),
                    );
                    if lhs != rhs {
                        return Err(law("functor composition law", &[x, y, z]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Is the functor fully faithful (every hom action invertible)?
    pub fn is_fully_faithful(&self) -> Verdict {
        let b = &self.src.base;
        let n = self.src.num_objects();
        for x in 0..n {
            for y in 0..n {
                let (h, k) = (self.src.hom(x, y), self.dst.hom(self.obj_map[x], self.obj_map[y]));
                if !b.is_iso(self.act(x, y), h, k) {
                    return Verdict::no(Certificate::NotIsomorphic { object: x * n + y, detail: "hom action".into() });
                }
            }
        }
        Verdict::yes(Certificate::Checked { items: n * n })
    }
}

/// A V-natural transformation between weights on the same domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VNatTrans {
    pub components: Vec<MorphismData>,
}

impl VNatTrans {
    pub fn validate(&self, m: &Weight, n: &Weight) -> Result<(), EnrichedError> {
        if m.domain != n.domain {
            return Err(EnrichedError::DomainMismatch);
        }
        let c = &m.domain;
        let b = &c.base;
        let k = c.num_objects();
        if self.components.len() != k {
            return Err(EnrichedError::Shape("one component per object".into()));
        }
        for x in 0..k {
            b.check_morphism(m.value(x), n.value(x), &self.components[x])?;
        }
        for x in 0..k {
            for y in 0..k {
                let lhs = b.compose(&self.components[x], m.act(x, y));
                let rhs = b.compose(
                    n.act(x, y),
                    &b.tensor_mor(&b.identity(c.hom(x, y)), &self.components[y], m.value(y), n.value(y)),
                );
                if lhs != rhs {
                    return Err(law("naturality", &[x, y]));
                }
            }
        }
        Ok(())
    }

    pub fn identity(m: &Weight) -> Self {
        VNatTrans { components: m.values().iter().map(|v| m.base().identity(v)).collect() }
    }

    pub fn is_iso(&self, m: &Weight, n: &Weight) -> bool {
        (0..m.domain.num_objects()).all(|x| m.base().is_iso(&self.components[x], m.value(x), n.value(x)))
    }

    /// The transformation `C(-, c) -> M` classified by a point of `M(c)`.
    pub fn from_yoneda_point(m: &Weight, c: usize, point: usize) -> Self {
        let b = m.base();
        let dom = &m.domain;
        let components = (0..dom.num_objects())
            .map(|a| {
                let h = dom.hom(a, c);
                match b.kind() {
                    BaseKind::FinVec(_) => {
                        let x = b.point_morphism(m.value(c), point);
                        let one = b.tensor_mor(&b.identity(h), &x, &b.unit(), m.value(c));
                        b.compose(m.act(a, c), &one)
                    }
                    _ => MorphismData::Cells(
                        (0..h.cells()).map(|f| m.act(a, c).cells()[f * m.value(c).cells() + point]).collect(),
                    ),
                }
            })
            .collect();
        VNatTrans { components }
    }
}

/// Is `M` isomorphic to a representable?  Returns the object and point
/// classifying an isomorphism `C(-, c) ≅ M`.
pub fn representing_point(m: &Weight) -> Result<Option<(usize, usize)>, EnrichedError> {
    let b = m.base();
    let dom = Arc::clone(&m.domain);
    for c in 0..dom.num_objects() {
        let y = Weight::yoneda(&dom, c);
        for p in b.points(m.value(c))? {
            let t = VNatTrans::from_yoneda_point(m, c, p);
            if t.is_iso(&y, m) {
                return Ok(Some((c, p)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Group;

    fn one_object_vec_with_product() -> VCategory {
        // Hom F_2^2 with pointwise multiplication; unit (1, 1).
        let b = Base::fin_vec(2).unwrap();
        let mut comp = Matrix::zeros(2, 4);
        comp.set(0, 0, 1); // e0 ⊗ e0 -> e0
        comp.set(1, 3, 1); // e1 ⊗ e1 -> e1
        let ident = Matrix::column(&[1, 1]);
        VCategory::new(
            b,
            1,
            vec![BaseObject::vect(2)],
            vec![MorphismData::Matrix(comp)],
            vec![MorphismData::Matrix(ident)],
        )
        .unwrap()
    }

    #[test]
    fn unit_vcategory_is_valid_and_terminal() {
        for (b, scalars) in [(Base::fin_set(), 1), (Base::fin_cat(), 1), (Base::fin_vec(3).unwrap(), 3)] {
            let u = VCategory::unit(&b);
            assert!(u.validate_verdict().is_yes());
            // Over vector spaces the underlying monoid is the scalars under multiplication.
            let (c, _) = u.underlying_category().unwrap();
            assert_eq!((c.num_objects(), c.num_arrows()), (1, scalars));
        }
    }

    #[test]
    fn pointwise_product_monoid() {
        let c = one_object_vec_with_product();
        let (u, labels) = c.underlying_category().unwrap();
        assert_eq!(u.num_arrows(), 4);
        // Independently: vectors (a, b) multiply componentwise.
        for f in 0..4 {
            for g in 0..4 {
                let (pf, pg) = (labels[f].2, labels[g].2);
                let (a1, b1, a2, b2) = (pf >> 1, pf & 1, pg >> 1, pg & 1);
                let expect = ((a1 & a2) << 1) | (b1 & b2);
                assert_eq!(labels[u.compose(g, f)].2, expect);
            }
        }
    }

    #[test]
    fn free_vcategory_recovers_underlying() {
        let k = FinCategory::chain(3);
        for b in [Base::fin_set(), Base::fin_gset(Group::cyclic(2)), Base::fin_cat()] {
            let c = VCategory::free(&b, &k).unwrap();
            let (u, _) = c.underlying_category().unwrap();
            assert_eq!(u.num_arrows(), k.num_arrows());
            assert!(crate::base::Base::fin_cat()
                .is_isomorphic(&BaseObject::cat(u), &BaseObject::cat(k.clone()))
                .unwrap());
        }
    }

    #[test]
    fn yoneda_weights_are_valid() {
        let c = Arc::new(one_object_vec_with_product());
        let y = Weight::yoneda(&c, 0);
        assert!(y.validate().is_ok());
        let k = Arc::new(VCategory::free(&Base::fin_set(), &FinCategory::chain(3)).unwrap());
        for t in 0..3 {
            let y = Weight::yoneda(&k, t);
            assert!(y.validate().is_ok());
            assert_eq!(representing_point(&y).unwrap().map(|r| r.0), Some(t));
        }
    }

    #[test]
    fn hom_form_round_trip() {
        let k = Arc::new(VCategory::free(&Base::fin_set(), &FinCategory::chain(2)).unwrap());
        let m = Weight::yoneda(&k, 1);
        let hf: Vec<MorphismData> = (0..4).map(|i| m.hom_form(i / 2, i % 2).unwrap()).collect();
        assert_eq!(Weight::from_hom_form(k.clone(), m.values().to_vec(), &hf).unwrap(), m);
        let c = Arc::new(one_object_vec_with_product());
        let m = Weight::yoneda(&c, 0);
        let hf = vec![m.hom_form(0, 0).unwrap()];
        assert_eq!(Weight::from_hom_form(c, m.values().to_vec(), &hf).unwrap(), m);
    }

    #[test]
    fn opposite_is_involutive_and_valid() {
        let c = one_object_vec_with_product();
        let op = c.opposite();
        assert!(op.validate().is_ok());
        assert_eq!(op.opposite(), c);
        let k = VCategory::free(&Base::fin_cat(), &FinCategory::chain(3)).unwrap();
        assert!(k.opposite().validate().is_ok());
    }

    #[test]
    fn broken_action_is_named() {
        let k = Arc::new(VCategory::free(&Base::fin_set(), &FinCategory::chain(2)).unwrap());
        let y = Weight::yoneda(&k, 1);
        let mut data: WeightData = y.into();
        // Give M(0) two elements and let the identity of 0 swap them.
        data.values[0] = BaseObject::set(2);
        data.action[0][0] = MorphismData::Cells(vec![1, 0]);
        data.action[0][1] = MorphismData::Cells(vec![0]);
        let err = Weight::try_from(data).unwrap_err();
        assert!(matches!(err, EnrichedError::Law { .. }));
    }

    #[test]
    fn set_presheaf_elements_of_representable_has_terminal_object() {
        let c = Arc::new(FinCategory::chain(3));
        let y = SetPresheaf::representable(c, 1);
        let (el, objs, _) = y.elements();
        assert_eq!(objs.len(), 2);
        assert!(el.is_filtered().is_yes());
    }
}
