//! The four finite bases of enrichment.
//!
//! * `FinSet`: finite sets, cartesian.
//! * `FinGSet(G)`: finite left `G`-sets for a finite group `G`, cartesian.
//! * `FinCat`: finite categories, cartesian.
//! * `FinVec(p)`: finite-dimensional `F_p` vector spaces with `⊗`.
//!
//! Objects of the cartesian bases are handled through their *cells*: the
//! elements of a set or `G`-set, or the arrows of a category (objects are
//! the identity arrows).  A morphism is then a map on cells, and the
//! product `X ⊗ Y` has cell `(x, y)` at index `x·|Y| + y`.  Under this
//! encoding the unitors and associators are identities.  `FinVec` objects
//! are dimensions and morphisms are matrices, with the same row-major
//! convention for Kronecker products.

mod dual;
mod internal_hom;
mod limits;

pub use dual::Duality;
pub use internal_hom::FunctorCategory;
pub use limits::{Colimit, ColimitWitness, Cone, Diagram};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::ordcat::{CategoryError, FinCategory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseError {
    #[error("objects belong to different bases")]
    Mismatch,
    #[error("invalid group table: {0}")]
    BadGroup(String),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("invalid object: {0}")]
    BadObject(String),
    #[error("invalid morphism: {0}")]
    BadMorphism(String),
    #[error("{what} needs {needed} entries, above the ceiling {limit}")]
    Ceiling { what: String, limit: usize, needed: usize },
    #[error("operation unsupported on this base: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// A finite group by multiplication table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupData", into = "GroupData")]
pub struct Group {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupData {
    pub table: Vec<Vec<usize>>,
}

impl TryFrom<GroupData> for Group {
    type Error = BaseError;
    fn try_from(d: GroupData) -> Result<Self, BaseError> {
        Group::from_table(d.table)
    }
}

impl From<Group> for GroupData {
    fn from(g: Group) -> Self {
        GroupData { table: g.mul }
    }
}

impl Group {
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self, BaseError> {
        let n = mul.len();
        if n == 0 {
            return Err(BaseError::BadGroup("empty table".into()));
        }
        if mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(BaseError::BadGroup("table is not square over its elements".into()));
        }
        for a in 0..n {
            if mul[0][a] != a || mul[a][0] != a {
                return Err(BaseError::BadGroup("element 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(BaseError::BadGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| mul[a][b] == 0 && mul[b][a] == 0)
                .ok_or_else(|| BaseError::BadGroup(format!("element {a} has no inverse")))?;
        }
        Ok(Group { mul, inv })
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Group::from_table(mul).expect("cyclic group")
    }

    /// The symmetric group on three letters, elements listed as
    /// permutations in lexicographic order (identity first).
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let mul = perms.iter().map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
        Group::from_table(mul).expect("S3")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// The regular action on itself by left multiplication.
    pub fn regular_action(&self) -> Vec<Vec<usize>> {
        self.mul.clone()
    }
}

/// Which base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseKind {
    FinSet,
    FinGSet(Arc<Group>),
    FinCat,
    FinVec(u32),
}

/// An object of one of the bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BaseObject {
    Set { size: usize },
    GSet { size: usize, action: Arc<Vec<Vec<usize>>> },
    Cat { category: Arc<FinCategory> },
    Vect { dim: usize },
}

impl BaseObject {
    pub fn set(n: usize) -> Self {
        BaseObject::Set { size: n }
    }

    pub fn vect(d: usize) -> Self {
        BaseObject::Vect { dim: d }
    }

    pub fn cat(c: FinCategory) -> Self {
        BaseObject::Cat { category: Arc::new(c) }
    }

    pub fn gset(action: Vec<Vec<usize>>) -> Self {
        let size = action.first().map_or(0, |r| r.len());
        BaseObject::GSet { size, action: Arc::new(action) }
    }

    /// Number of cells of a cartesian object; the dimension for `Vect`.
    pub fn cells(&self) -> usize {
        match self {
            BaseObject::Set { size } | BaseObject::GSet { size, .. } => *size,
            BaseObject::Cat { category } => category.num_arrows(),
            BaseObject::Vect { dim } => *dim,
        }
    }

    pub fn as_category(&self) -> Option<&Arc<FinCategory>> {
        match self {
            BaseObject::Cat { category } => Some(category),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BaseObject::Vect { dim } => *dim,
            _ => panic!("dim of a non-vector object"),
        }
    }
}

/// Morphism payload: a cell map for cartesian bases, a matrix for `FinVec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MorphismData {
    Cells(Vec<usize>),
    Matrix(Matrix),
}

impl MorphismData {
    pub fn cells(&self) -> &[usize] {
        match self {
            MorphismData::Cells(c) => c,
            MorphismData::Matrix(_) => panic!("cell access on a matrix morphism"),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        match self {
            MorphismData::Matrix(m) => m,
            MorphismData::Cells(_) => panic!("matrix access on a cell morphism"),
        }
    }
}

/// A morphism with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseMorphism {
    pub src: BaseObject,
    pub dst: BaseObject,
    pub data: MorphismData,
}

/// Wire form of a base: `{"tag": "finset"}`, `{"tag": "fingset", "group":
/// [[...]]}`, `{"tag": "fincat"}` or `{"tag": "finvec", "prime": p}`, with an
/// optional generator override.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseData {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<BaseObject>>,
}

impl TryFrom<BaseData> for Base {
    type Error = BaseError;
    fn try_from(d: BaseData) -> Result<Self, BaseError> {
        let base = match d.tag.as_str() {
            "finset" => Base::fin_set(),
            "fincat" => Base::fin_cat(),
            "fingset" => {
                let table = d.group.ok_or_else(|| BaseError::BadGroup("missing group table".into()))?;
                Base::fin_gset(Group::from_table(table)?)
            }
            "finvec" => Base::fin_vec(d.prime.ok_or(BaseError::NotPrime(0))?)?,
            other => return Err(BaseError::Unsupported(format!("unknown base tag {other:?}"))),
        };
        match d.generator {
            Some(g) => base.with_generator(g),
            None => Ok(base),
        }
    }
}

impl From<Base> for BaseData {
    fn from(b: Base) -> Self {
        let default_generator = match b.kind {
            BaseKind::FinSet => Base::fin_set().generator,
            BaseKind::FinCat => Base::fin_cat().generator,
            BaseKind::FinGSet(ref g) => Base::fin_gset((**g).clone()).generator,
            BaseKind::FinVec(_) => vec![BaseObject::vect(1)],
        };
        BaseData {
            tag: b.tag().to_string(),
            group: b.group().map(|g| g.table().to_vec()),
            prime: b.prime(),
            generator: (b.generator != default_generator).then(|| b.generator.clone()),
        }
    }
}

/// A base of enrichment with its strong generator and search ceiling.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "BaseData", into = "BaseData")]
pub struct Base {
    kind: BaseKind,
    generator: Vec<BaseObject>,
    /// Upper bound on the size of enumerations (hom-sets, functor
    /// categories, limit carriers) before giving up.
    pub ceiling: usize,
}

impl PartialEq for Base {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Base {}

pub const DEFAULT_CEILING: usize = 200_000;

impl Base {
    pub fn fin_set() -> Self {
        Base { kind: BaseKind::FinSet, generator: vec![BaseObject::set(1)], ceiling: DEFAULT_CEILING }
    }

    pub fn fin_gset(g: Group) -> Self {
        let regular = BaseObject::gset(g.regular_action());
        Base { kind: BaseKind::FinGSet(Arc::new(g)), generator: vec![regular], ceiling: DEFAULT_CEILING }
    }

    pub fn fin_cat() -> Self {
        Base {
            kind: BaseKind::FinCat,
            generator: vec![BaseObject::cat(FinCategory::arrow())],
            ceiling: DEFAULT_CEILING,
        }
    }

    pub fn fin_vec(p: u32) -> Result<Self, BaseError> {
        if !linalg::is_prime(p) {
            return Err(BaseError::NotPrime(p));
        }
        Ok(Base { kind: BaseKind::FinVec(p), generator: vec![BaseObject::vect(1)], ceiling: DEFAULT_CEILING })
    }

    /// Replace the default strong generator.
    pub fn with_generator(mut self, generator: Vec<BaseObject>) -> Result<Self, BaseError> {
        for g in &generator {
            self.check_object(g)?;
        }
        self.generator = generator;
        Ok(self)
    }

    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    pub fn generator(&self) -> &[BaseObject] {
        &self.generator
    }

    pub fn group(&self) -> Option<&Group> {
        match &self.kind {
            BaseKind::FinGSet(g) => Some(g),
            _ => None,
        }
    }

    pub fn prime(&self) -> Option<u32> {
        match self.kind {
            BaseKind::FinVec(p) => Some(p),
            _ => None,
        }
    }

    pub fn p(&self) -> u32 {
        self.prime().expect("not a linear base")
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            BaseKind::FinSet => "finset",
            BaseKind::FinGSet(_) => "fingset",
            BaseKind::FinCat => "fincat",
            BaseKind::FinVec(_) => "finvec",
        }
    }

    pub fn is_cartesian(&self) -> bool {
        !matches!(self.kind, BaseKind::FinVec(_))
    }

    pub fn has_direct_sums(&self) -> bool {
        matches!(self.kind, BaseKind::FinVec(_))
    }

    pub fn locally_dualizable(&self) -> bool {
        matches!(self.kind, BaseKind::FinVec(_))
    }

    /// Whether `hom(I, -)` sends finite colimits to jointly surjective
    /// families.  This fails for `G`-sets (the quotient `G -> 1` has a fixed
    /// point that lifts to none) and for vector spaces (points of a direct
    /// sum are not points of a summand).
    pub fn unit_hom_weakly_cocontinuous(&self) -> bool {
        matches!(self.kind, BaseKind::FinSet | BaseKind::FinCat)
    }

    /// `hom(I, I)` is a singleton and `hom(I, X) × hom(I, Y) -> hom(I, X ⊗ Y)`
    /// is onto: the standing assumptions of the elements-based theory.
    pub fn unit_hom_weakly_strong_monoidal(&self) -> bool {
        self.is_cartesian()
    }

    pub fn unit(&self) -> BaseObject {
        match &self.kind {
            BaseKind::FinSet => BaseObject::set(1),
            BaseKind::FinGSet(g) => BaseObject::gset(vec![vec![0]; g.order()]),
            BaseKind::FinCat => BaseObject::cat(FinCategory::terminal()),
            BaseKind::FinVec(_) => BaseObject::vect(1),
        }
    }

    pub fn empty(&self) -> BaseObject {
        match &self.kind {
            BaseKind::FinSet => BaseObject::set(0),
            BaseKind::FinGSet(g) => BaseObject::gset(vec![vec![]; g.order()]),
            BaseKind::FinCat => BaseObject::cat(FinCategory::discrete(0)),
            BaseKind::FinVec(_) => BaseObject::vect(0),
        }
    }

    /// A discrete object on `n` cells (`n`-fold sum of the unit).
    pub fn discrete(&self, n: usize) -> BaseObject {
        match &self.kind {
            BaseKind::FinSet => BaseObject::set(n),
            BaseKind::FinGSet(g) => BaseObject::gset(vec![(0..n).collect(); g.order()]),
            BaseKind::FinCat => BaseObject::cat(FinCategory::discrete(n)),
            BaseKind::FinVec(_) => BaseObject::vect(n),
        }
    }

    pub fn check_object(&self, x: &BaseObject) -> Result<(), BaseError> {
        match (&self.kind, x) {
            (BaseKind::FinSet, BaseObject::Set { .. }) => Ok(()),
            (BaseKind::FinVec(_), BaseObject::Vect { .. }) => Ok(()),
            (BaseKind::FinCat, BaseObject::Cat { category }) => Ok(category.validate()?),
            (BaseKind::FinGSet(g), BaseObject::GSet { size, action }) => {
                if action.len() != g.order() || action.iter().any(|r| r.len() != *size || r.iter().any(|&y| y >= *size))
                {
                    return Err(BaseError::BadObject("action table has wrong shape".into()));
                }
                for x in 0..*size {
                    if action[0][x] != x {
                        return Err(BaseError::BadObject(format!("identity moves element {x}")));
                    }
                    for a in 0..g.order() {
                        for b in 0..g.order() {
                            if action[g.mul(a, b)][x] != action[a][action[b][x]] {
                                return Err(BaseError::BadObject(format!("action law fails at ({a}, {b}, {x})")));
                            }
                        }
                    }
                }
                Ok(())
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    /// Validate a morphism `x -> y`.
    pub fn check_morphism(&self, x: &BaseObject, y: &BaseObject, f: &MorphismData) -> Result<(), BaseError> {
        match (x, y, f) {
            (BaseObject::Vect { dim: dx }, BaseObject::Vect { dim: dy }, MorphismData::Matrix(m)) => {
                if m.rows != *dy || m.cols != *dx {
                    return Err(BaseError::BadMorphism(format!(
                        "matrix is {}×{}, expected {}×{}",
                        m.rows, m.cols, dy, dx
                    )));
                }
                if m.data.iter().any(|&e| e >= self.p()) {
                    return Err(BaseError::BadMorphism("matrix entry out of range".into()));
                }
                Ok(())
            }
            (_, _, MorphismData::Cells(c)) if self.is_cartesian() => {
                if c.len() != x.cells() || c.iter().any(|&v| v >= y.cells()) {
                    return Err(BaseError::BadMorphism("cell map has wrong shape".into()));
                }
                match (x, y) {
                    (BaseObject::GSet { action: ax, .. }, BaseObject::GSet { action: ay, .. }) => {
                        for (g, (rx, ry)) in ax.iter().zip(ay.iter()).enumerate() {
                            for (e, &ge) in rx.iter().enumerate() {
                                if c[ge] != ry[c[e]] {
                                    return Err(BaseError::BadMorphism(format!(
                                        "not equivariant at group element {g}, cell {e}"
                                    )));
                                }
                            }
                        }
                        Ok(())
                    }
                    (BaseObject::Cat { category: cx }, BaseObject::Cat { category: cy }) => {
                        functor_from_cells(cx, cy, c).map(|_| ())
                    }
                    (BaseObject::Set { .. }, BaseObject::Set { .. }) => Ok(()),
                    _ => Err(BaseError::Mismatch),
                }
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    pub fn identity(&self, x: &BaseObject) -> MorphismData {
        match x {
            BaseObject::Vect { dim } => MorphismData::Matrix(Matrix::identity(*dim)),
            _ => MorphismData::Cells((0..x.cells()).collect()),
        }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &MorphismData, f: &MorphismData) -> MorphismData {
        match (g, f) {
            (MorphismData::Cells(g), MorphismData::Cells(f)) => MorphismData::Cells(f.iter().map(|&x| g[x]).collect()),
            (MorphismData::Matrix(g), MorphismData::Matrix(f)) => MorphismData::Matrix(g.mul(f, self.p())),
            _ => panic!("composing morphisms of different bases"),
        }
    }

    /// `X ⊗ Y`.
    pub fn tensor(&self, x: &BaseObject, y: &BaseObject) -> Result<BaseObject, BaseError> {
        Ok(match (x, y) {
            (BaseObject::Set { size: a }, BaseObject::Set { size: b }) => BaseObject::set(a * b),
            (BaseObject::Vect { dim: a }, BaseObject::Vect { dim: b }) => BaseObject::vect(a * b),
            (BaseObject::Cat { category: a }, BaseObject::Cat { category: b }) => BaseObject::cat(a.product(b)),
            (BaseObject::GSet { size: a, action: ax }, BaseObject::GSet { size: b, action: ay }) => {
                let action = ax
                    .iter()
                    .zip(ay.iter())
                    .map(|(rx, ry)| {
                        let mut row = Vec::with_capacity(a * b);
                        for &u in rx.iter() {
                            for &v in ry.iter() {
                                row.push(u * b + v);
                            }
                        }
                        row
                    })
                    .collect();
                BaseObject::GSet { size: a * b, action: Arc::new(action) }
            }
            _ => return Err(BaseError::Mismatch),
        })
    }

    /// Iterated tensor, left-nested (which is strictly associative here).
    pub fn tensor_all(&self, xs: &[&BaseObject]) -> Result<BaseObject, BaseError> {
        let mut acc = self.unit();
        for x in xs {
            acc = self.tensor(&acc, x)?;
        }
        Ok(acc)
    }

    /// `f ⊗ g` for `f: X -> X'`, `g: Y -> Y'`.
    pub fn tensor_mor(&self, f: &MorphismData, g: &MorphismData, y: &BaseObject, y2: &BaseObject) -> MorphismData {
        match (f, g) {
            (MorphismData::Cells(f), MorphismData::Cells(g)) => {
                let (ny, ny2) = (y.cells(), y2.cells());
                debug_assert_eq!(g.len(), ny);
                let mut out = Vec::with_capacity(f.len() * ny);
                for &a in f {
                    for &b in g {
                        out.push(a * ny2 + b);
                    }
                }
                MorphismData::Cells(out)
            }
            (MorphismData::Matrix(f), MorphismData::Matrix(g)) => MorphismData::Matrix(f.kron(g, self.p())),
            _ => panic!("tensoring morphisms of different bases"),
        }
    }

    /// The symmetry `X ⊗ Y -> Y ⊗ X`.
    pub fn symmetry(&self, x: &BaseObject, y: &BaseObject) -> MorphismData {
        let (a, b) = (x.cells(), y.cells());
        match self.kind {
            BaseKind::FinVec(_) => {
                let mut m = Matrix::zeros(a * b, a * b);
                for i in 0..a {
                    for j in 0..b {
                        m.set(j * a + i, i * b + j, 1);
                    }
                }
                MorphismData::Matrix(m)
            }
            _ => {
                let mut out = vec![0; a * b];
                for i in 0..a {
                    for j in 0..b {
                        out[i * b + j] = j * a + i;
                    }
                }
                MorphismData::Cells(out)
            }
        }
    }

    /// Points `I -> X` as codes: a cell for cartesian bases (a fixed point
    /// for `G`-sets, an identity arrow for categories), an encoded vector
    /// for `FinVec`.
    pub fn points(&self, x: &BaseObject) -> Result<Vec<usize>, BaseError> {
        Ok(match x {
            BaseObject::Set { size } => (0..*size).collect(),
            BaseObject::GSet { size, action } => (0..*size).filter(|&e| action.iter().all(|r| r[e] == e)).collect(),
            BaseObject::Cat { category } => category.identities().to_vec(),
            BaseObject::Vect { dim } => {
                let n = linalg::vector_count(self.p(), *dim, self.ceiling).ok_or_else(|| BaseError::Ceiling {
                    what: "points of a vector space".into(),
                    limit: self.ceiling,
                    needed: usize::MAX,
                })?;
                (0..n).collect()
            }
        })
    }

    /// Apply a morphism to a point code.
    pub fn apply_point(&self, f: &MorphismData, x: &BaseObject, point: usize) -> usize {
        match f {
            MorphismData::Cells(c) => c[point],
            MorphismData::Matrix(m) => {
                let p = self.p();
                linalg::encode_vector(&m.apply(&linalg::decode_vector(point, x.dim(), p), p), p)
            }
        }
    }

    /// Pair two point codes into a point of `X ⊗ Y`.
    pub fn pair_points(&self, x: &BaseObject, y: &BaseObject, a: usize, b: usize) -> usize {
        match self.kind {
            BaseKind::FinVec(p) => {
                let va = Matrix::column(&linalg::decode_vector(a, x.dim(), p));
                let vb = Matrix::column(&linalg::decode_vector(b, y.dim(), p));
                linalg::encode_vector(&va.kron(&vb, p).data, p)
            }
            _ => a * y.cells() + b,
        }
    }

    /// Evaluate `f: X ⊗ Y -> Z` at a pair of points.
    pub fn apply2(&self, f: &MorphismData, x: &BaseObject, y: &BaseObject, a: usize, b: usize) -> usize {
        match f {
            MorphismData::Cells(c) => c[a * y.cells() + b],
            MorphismData::Matrix(_) => {
                let xy = BaseObject::vect(x.dim() * y.dim());
                self.apply_point(f, &xy, self.pair_points(x, y, a, b))
            }
        }
    }

    /// The morphism `I -> X` of a point code.
    pub fn point_morphism(&self, x: &BaseObject, point: usize) -> MorphismData {
        match self.kind {
            BaseKind::FinVec(p) => MorphismData::Matrix(Matrix::column(&linalg::decode_vector(point, x.dim(), p))),
            _ => MorphismData::Cells(vec![point]),
        }
    }

    /// Point code of a morphism `I -> X`.
    pub fn morphism_point(&self, f: &MorphismData) -> usize {
        match f {
            MorphismData::Cells(c) => c[0],
            MorphismData::Matrix(m) => linalg::encode_vector(&m.data, self.p()),
        }
    }

    /// All morphisms `X -> Y`, duplicate-free, in a canonical order.
    pub fn hom_set(&self, x: &BaseObject, y: &BaseObject) -> Result<Vec<MorphismData>, BaseError> {
        match (x, y) {
            (BaseObject::Set { size: a }, BaseObject::Set { size: b }) => {
                Ok(self.all_functions(*a, *b)?.into_iter().map(MorphismData::Cells).collect())
            }
            (BaseObject::GSet { .. }, BaseObject::GSet { .. }) => {
                Ok(self.equivariant_maps(x, y)?.into_iter().map(MorphismData::Cells).collect())
            }
            (BaseObject::Cat { category: a }, BaseObject::Cat { category: b }) => {
                Ok(all_functors(a, b, self.ceiling)?.into_iter().map(MorphismData::Cells).collect())
            }
            (BaseObject::Vect { dim: a }, BaseObject::Vect { dim: b }) => {
                let p = self.p();
                linalg::vector_count(p, a * b, self.ceiling).ok_or_else(|| BaseError::Ceiling {
                    what: "linear maps".into(),
                    limit: self.ceiling,
                    needed: usize::MAX,
                })?;
                Ok(linalg::all_matrices(*b, *a, p).into_iter().map(MorphismData::Matrix).collect())
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    /// All functions `a -> b` on cells, lexicographic with `f(0)` most
    /// significant.
    pub fn all_functions(&self, a: usize, b: usize) -> Result<Vec<Vec<usize>>, BaseError> {
        let count = checked_pow(b, a).filter(|&n| n <= self.ceiling).ok_or_else(|| BaseError::Ceiling {
            what: format!("functions from {a} to {b} cells"),
            limit: self.ceiling,
            needed: checked_pow(b, a).unwrap_or(usize::MAX),
        })?;
        Ok((0..count).map(|c| decode_function(c, a, b)).collect())
    }

    /// Equivariant maps between `G`-sets, sorted as cell vectors.
    fn equivariant_maps(&self, x: &BaseObject, y: &BaseObject) -> Result<Vec<Vec<usize>>, BaseError> {
        let (BaseObject::GSet { size: nx, action: ax }, BaseObject::GSet { size: ny, action: ay }) = (x, y) else {
            return Err(BaseError::Mismatch);
        };
        // Orbit representatives of X with the admissible images of each.
        let mut seen = vec![false; *nx];
        let mut reps = Vec::new();
        for e in 0..*nx {
            if seen[e] {
                continue;
            }
            for r in ax.iter() {
                seen[r[e]] = true;
            }
            let choices: Vec<usize> =
                (0..*ny).filter(|&t| ax.iter().zip(ay.iter()).all(|(rx, ry)| rx[e] != e || ry[t] == t)).collect();
            reps.push((e, choices));
        }
        let total = reps.iter().try_fold(1usize, |acc, (_, c)| acc.checked_mul(c.len()));
        match total {
            Some(t) if t <= self.ceiling => {}
            t => {
                return Err(BaseError::Ceiling {
                    what: "equivariant maps".into(),
                    limit: self.ceiling,
                    needed: t.unwrap_or(usize::MAX),
                })
            }
        }
        let mut out = Vec::new();
        if reps.iter().any(|(_, c)| c.is_empty()) {
            return Ok(out);
        }
        let mut pick = vec![0usize; reps.len()];
        'odometer: loop {
            let mut f = vec![usize::MAX; *nx];
            for (k, (e, c)) in reps.iter().enumerate() {
                let t = c[pick[k]];
                for (rx, ry) in ax.iter().zip(ay.iter()) {
                    f[rx[*e]] = ry[t];
                }
            }
            out.push(f);
            for k in (0..reps.len()).rev() {
                pick[k] += 1;
                if pick[k] < reps[k].1.len() {
                    continue 'odometer;
                }
                pick[k] = 0;
            }
            break;
        }
        out.sort();
        Ok(out)
    }

    /// Is the morphism invertible?
    pub fn is_iso(&self, f: &MorphismData, x: &BaseObject, y: &BaseObject) -> bool {
        match f {
            MorphismData::Cells(c) => {
                if x.cells() != y.cells() {
                    return false;
                }
                let mut hit = vec![false; y.cells()];
                for &v in c {
                    if hit[v] {
                        return false;
                    }
                    hit[v] = true;
                }
                true
            }
            MorphismData::Matrix(m) => m.rows == m.cols && m.inverse(self.p()).is_some(),
        }
    }

    /// Inverse of an invertible morphism.
    pub fn inverse(&self, f: &MorphismData, y: &BaseObject) -> Option<MorphismData> {
        match f {
            MorphismData::Cells(c) => {
                let mut inv = vec![usize::MAX; y.cells()];
                for (i, &v) in c.iter().enumerate() {
                    inv[v] = i;
                }
                inv.iter().all(|&v| v != usize::MAX).then_some(MorphismData::Cells(inv))
            }
            MorphismData::Matrix(m) => m.inverse(self.p()).map(MorphismData::Matrix),
        }
    }

    /// Are the two objects isomorphic?  Cheap invariants first, then an
    /// exhaustive search for `G`-sets and categories.
    pub fn is_isomorphic(&self, x: &BaseObject, y: &BaseObject) -> Result<bool, BaseError> {
        Ok(self.find_iso(x, y)?.is_some())
    }

    pub fn find_iso(&self, x: &BaseObject, y: &BaseObject) -> Result<Option<MorphismData>, BaseError> {
        match (x, y) {
            (BaseObject::Set { size: a }, BaseObject::Set { size: b }) => {
                Ok((a == b).then(|| MorphismData::Cells((0..*a).collect())))
            }
            (BaseObject::Vect { dim: a }, BaseObject::Vect { dim: b }) => {
                Ok((a == b).then(|| MorphismData::Matrix(Matrix::identity(*a))))
            }
            (BaseObject::GSet { size: a, .. }, BaseObject::GSet { size: b, .. }) => {
                if a != b || self.orbit_profile(x) != self.orbit_profile(y) {
                    return Ok(None);
                }
                Ok(self
                    .equivariant_maps(x, y)?
                    .into_iter()
                    .find(|f| self.is_iso(&MorphismData::Cells(f.clone()), x, y))
                    .map(MorphismData::Cells))
            }
            (BaseObject::Cat { category: a }, BaseObject::Cat { category: b }) => {
                if a.num_objects() != b.num_objects() || a.num_arrows() != b.num_arrows() {
                    return Ok(None);
                }
                Ok(category_iso(a, b).map(MorphismData::Cells))
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    /// Sorted list of orbit sizes of a `G`-set.
    pub fn orbit_profile(&self, x: &BaseObject) -> Vec<usize> {
        let BaseObject::GSet { size, action } = x else { return vec![] };
        let mut seen = vec![false; *size];
        let mut sizes = Vec::new();
        for e in 0..*size {
            if seen[e] {
                continue;
            }
            let mut n = 0;
            for r in action.iter() {
                if !seen[r[e]] {
                    seen[r[e]] = true;
                    n += 1;
                }
            }
            sizes.push(n);
        }
        sizes.sort();
        sizes
    }

    /// Forget the group action (or keep a set as is).
    pub fn underlying_set(&self, x: &BaseObject) -> Result<BaseObject, BaseError> {
        match x {
            BaseObject::Set { .. } | BaseObject::GSet { .. } => Ok(BaseObject::set(x.cells())),
            _ => Err(BaseError::Unsupported("no underlying set functor configured".into())),
        }
    }
}

fn checked_pow(b: usize, e: usize) -> Option<usize> {
    let mut n: usize = 1;
    for _ in 0..e {
        n = n.checked_mul(b)?;
    }
    Some(n)
}

/// The `code`-th function `a -> b`, with `f(0)` most significant.
pub fn decode_function(mut code: usize, a: usize, b: usize) -> Vec<usize> {
    let mut f = vec![0; a];
    for i in (0..a).rev() {
        f[i] = code % b.max(1);
        code /= b.max(1);
    }
    f
}

pub fn encode_function(f: &[usize], b: usize) -> usize {
    f.iter().fold(0, |acc, &x| acc * b + x)
}

/// Check that an arrow map is a functor and return its object map.
pub fn functor_from_cells(x: &FinCategory, y: &FinCategory, cells: &[usize]) -> Result<Vec<usize>, BaseError> {
    let mut obj = Vec::with_capacity(x.num_objects());
    for o in 0..x.num_objects() {
        let i = cells[x.identity(o)];
        if !y.is_identity(i) {
            return Err(BaseError::BadMorphism(format!("identity of object {o} not sent to an identity")));
        }
        obj.push(y.src(i));
    }
    for f in 0..x.num_arrows() {
        let g = cells[f];
        if y.src(g) != obj[x.src(f)] || y.tgt(g) != obj[x.tgt(f)] {
            return Err(BaseError::BadMorphism(format!("arrow {f} sent to an arrow with wrong endpoints")));
        }
        for &h in x.out_arrows(x.tgt(f)) {
            if cells[x.compose(h, f)] != y.compose(cells[h], g) {
                return Err(BaseError::BadMorphism(format!("composition not preserved at ({h}, {f})")));
            }
        }
    }
    Ok(obj)
}

/// Every functor `x -> y` as an arrow map, in lexicographic order.
pub fn all_functors(x: &FinCategory, y: &FinCategory, ceiling: usize) -> Result<Vec<Vec<usize>>, BaseError> {
    let mut out = Vec::new();
    let mut cells = vec![usize::MAX; x.num_arrows()];
    for code in 0..checked_pow(y.num_objects(), x.num_objects()).unwrap_or(usize::MAX) {
        let obj = decode_function(code, x.num_objects(), y.num_objects());
        functor_search(x, y, 0, &obj, &mut cells, &mut out, ceiling)?;
    }
    out.sort();
    Ok(out)
}

fn functor_search(
    x: &FinCategory,
    y: &FinCategory,
    f: usize,
    obj: &[usize],
    cells: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    ceiling: usize,
) -> Result<(), BaseError> {
    if f == x.num_arrows() {
        if out.len() >= ceiling {
            return Err(BaseError::Ceiling { what: "functors".into(), limit: ceiling, needed: ceiling + 1 });
        }
        out.push(cells.clone());
        return Ok(());
    }
    let choices = if x.is_identity(f) { vec![y.identity(obj[x.src(f)])] } else { y.hom(obj[x.src(f)], obj[x.tgt(f)]) };
    for g in choices {
        cells[f] = g;
        if composition_consistent(x, y, f, cells) {
            functor_search(x, y, f + 1, obj, cells, out, ceiling)?;
        }
    }
    cells[f] = usize::MAX;
    Ok(())
}

/// Every composable pair `(h, k)` whose arrows `h`, `k`, `h∘k` are all
/// assigned, with `f` the latest of them, is preserved.
fn composition_consistent(x: &FinCategory, y: &FinCategory, f: usize, cells: &[usize]) -> bool {
    for k in 0..=f {
        for &h in x.out_arrows(x.tgt(k)) {
            let hk = x.compose(h, k);
            if h > f || hk > f || (h != f && k != f && hk != f) {
                continue;
            }
            if y.compose(cells[h], cells[k]) != cells[hk] {
                return false;
            }
        }
    }
    true
}

/// Search for an isomorphism of categories, as an arrow bijection.
fn category_iso(a: &FinCategory, b: &FinCategory) -> Option<Vec<usize>> {
    let candidates = all_functors(a, b, usize::MAX).ok()?;
    candidates.into_iter().find(|f| {
        let mut hit = vec![false; b.num_arrows()];
        f.iter().all(|&g| !std::mem::replace(&mut hit[g], true))
    })
}
