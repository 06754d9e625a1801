//! Finite limits and colimits in each base, factorization through the
//! colimit, and exhaustive verification of universal properties.

use std::collections::HashMap;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::{Base, BaseError, BaseKind, BaseObject, MorphismData};
use crate::linalg::Matrix;
use crate::ordcat::{FinCategory, Presentation};

/// A functor from a finite shape into a base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub shape: Arc<FinCategory>,
    pub objects: Vec<BaseObject>,
    pub arrows: Vec<MorphismData>,
}

/// A cone or cocone: `legs[v]` goes from the apex to `X_v` for limits and
/// from `X_v` to the apex for colimits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: BaseObject,
    pub legs: Vec<MorphismData>,
}

/// How each element of a colimit was produced, for factoring maps out of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColimitWitness {
    /// For each cell of the apex, a representative `(vertex, cell)`.
    Cells { reps: Vec<(usize, usize)> },
    /// Objects by representative `(vertex, object)`; arrows as words in
    /// generators `(vertex, arrow)`.
    Cat { obj_reps: Vec<(usize, usize)>, generators: Vec<(usize, usize)>, words: Vec<Vec<usize>> },
    /// For each basis vector of the apex, a representative `(vertex, basis index)`.
    Vect { reps: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colimit {
    pub cocone: Cone,
    pub witness: ColimitWitness,
}

impl Diagram {
    pub fn new(
        base: &Base,
        shape: Arc<FinCategory>,
        objects: Vec<BaseObject>,
        arrows: Vec<MorphismData>,
    ) -> Result<Self, BaseError> {
        let d = Diagram { shape, objects, arrows };
        d.validate(base)?;
        Ok(d)
    }

    pub fn validate(&self, base: &Base) -> Result<(), BaseError> {
        let s = &self.shape;
        if self.objects.len() != s.num_objects() || self.arrows.len() != s.num_arrows() {
            return Err(BaseError::BadObject("diagram does not match its shape".into()));
        }
        for x in &self.objects {
            base.check_object(x)?;
        }
        for f in 0..s.num_arrows() {
            base.check_morphism(&self.objects[s.src(f)], &self.objects[s.tgt(f)], &self.arrows[f])?;
        }
        for o in 0..s.num_objects() {
            if self.arrows[s.identity(o)] != base.identity(&self.objects[o]) {
                return Err(BaseError::BadMorphism(format!("identity of vertex {o} not preserved")));
            }
        }
        for f in 0..s.num_arrows() {
            for &g in s.out_arrows(s.tgt(f)) {
                if self.arrows[s.compose(g, f)] != base.compose(&self.arrows[g], &self.arrows[f]) {
                    return Err(BaseError::BadMorphism(format!("composition not preserved at ({g}, {f})")));
                }
            }
        }
        Ok(())
    }

    /// A discrete diagram (for sums and products).
    pub fn discrete(base: &Base, objects: Vec<BaseObject>) -> Self {
        let shape = Arc::new(FinCategory::discrete(objects.len()));
        let arrows = objects.iter().map(|x| base.identity(x)).collect();
        Diagram { shape, objects, arrows }
    }

    /// A parallel pair `f, g: X ⇉ Y`.
    pub fn parallel_pair(base: &Base, x: BaseObject, y: BaseObject, f: MorphismData, g: MorphismData) -> Self {
        let mut p = Presentation::new(2);
        p.generator(0, 1);
        p.generator(0, 1);
        let pr = p.enumerate(16).expect("free parallel pair");
        let shape = Arc::new(pr.category);
        let mut arrows = vec![MorphismData::Cells(vec![]); 4];
        arrows[shape.identity(0)] = base.identity(&x);
        arrows[shape.identity(1)] = base.identity(&y);
        arrows[pr.generator_arrows[0]] = f;
        arrows[pr.generator_arrows[1]] = g;
        Diagram { shape, objects: vec![x, y], arrows }
    }

    /// A cospan `X -> Z <- Y` (for pullbacks) or a span read the other way.
    pub fn two_arrows(
        base: &Base,
        shape_src: [usize; 2],
        objects: Vec<BaseObject>,
        f: MorphismData,
        g: MorphismData,
    ) -> Self {
        let mut p = Presentation::new(3);
        let a = p.generator(shape_src[0], 2);
        let b = p.generator(shape_src[1], 2);
        let pr = p.enumerate(16).expect("free cospan");
        let shape = Arc::new(pr.category);
        let mut arrows = vec![MorphismData::Cells(vec![]); shape.num_arrows()];
        for o in 0..3 {
            arrows[shape.identity(o)] = base.identity(&objects[o]);
        }
        arrows[pr.generator_arrows[a]] = f;
        arrows[pr.generator_arrows[b]] = g;
        Diagram { shape, objects, arrows }
    }
}

impl Base {
    /// The limit with its projection cone.
    pub fn limit(&self, d: &Diagram) -> Result<Cone, BaseError> {
        match &self.kind {
            BaseKind::FinVec(p) => Ok(self.vect_limit(d, *p)),
            _ => self.cartesian_limit(d),
        }
    }

    fn compatible_tuples(&self, d: &Diagram) -> Result<Vec<Vec<usize>>, BaseError> {
        let s = &d.shape;
        let n = s.num_objects();
        let mut out = Vec::new();
        let mut tuple = vec![usize::MAX; n];
        fn go(
            base: &Base,
            d: &Diagram,
            v: usize,
            tuple: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) -> Result<(), BaseError> {
            let s = &d.shape;
            if v == s.num_objects() {
                if out.len() >= base.ceiling {
                    return Err(BaseError::Ceiling {
                        what: "limit carrier".into(),
                        limit: base.ceiling,
                        needed: out.len() + 1,
                    });
                }
                out.push(tuple.clone());
                return Ok(());
            }
            // A value forced by an arrow from an earlier vertex.
            let forced = (0..s.num_arrows())
                .find(|&f| s.tgt(f) == v && s.src(f) < v)
                .map(|f| d.arrows[f].cells()[tuple[s.src(f)]]);
            let candidates: Vec<usize> = match forced {
                Some(x) => vec![x],
                None => (0..d.objects[v].cells()).collect(),
            };
            for x in candidates {
                tuple[v] = x;
                let ok = (0..s.num_arrows()).all(|f| {
                    let (a, b) = (s.src(f), s.tgt(f));
                    a > v || b > v || d.arrows[f].cells()[tuple[a]] == tuple[b]
                });
                if ok {
                    go(base, d, v + 1, tuple, out)?;
                }
            }
            tuple[v] = usize::MAX;
            Ok(())
        }
        go(self, d, 0, &mut tuple, &mut out)?;
        Ok(out)
    }

    fn cartesian_limit(&self, d: &Diagram) -> Result<Cone, BaseError> {
        let tuples = self.compatible_tuples(d)?;
        let n = d.shape.num_objects();
        let legs: Vec<MorphismData> =
            (0..n).map(|v| MorphismData::Cells(tuples.iter().map(|t| t[v]).collect())).collect();
        let index: HashMap<&[usize], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let apex = match &self.kind {
            BaseKind::FinSet => BaseObject::set(tuples.len()),
            BaseKind::FinGSet(g) => {
                let action = (0..g.order())
                    .map(|e| {
                        tuples
                            .iter()
                            .map(|t| {
                                let moved: Vec<usize> = (0..n)
                                    .map(|v| match &d.objects[v] {
                                        BaseObject::GSet { action, .. } => action[e][t[v]],
                                        _ => unreachable!(),
                                    })
                                    .collect();
                                index[moved.as_slice()]
                            })
                            .collect()
                    })
                    .collect();
                BaseObject::GSet { size: tuples.len(), action: Arc::new(action) }
            }
            BaseKind::FinCat => {
                let cats: Vec<&Arc<FinCategory>> = d.objects.iter().map(|x| x.as_category().unwrap()).collect();
                let objs: Vec<usize> =
                    (0..tuples.len()).filter(|&i| (0..n).all(|v| cats[v].is_identity(tuples[i][v]))).collect();
                let obj_index: HashMap<usize, usize> = objs.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                let endpoint = |t: &[usize], src: bool| -> usize {
                    let ids: Vec<usize> = (0..n)
                        .map(|v| {
                            let c = cats[v];
                            let o = if src { c.src(t[v]) } else { c.tgt(t[v]) };
                            c.identity(o)
                        })
                        .collect();
                    obj_index[&index[ids.as_slice()]]
                };
                let src: Vec<usize> = tuples.iter().map(|t| endpoint(t, true)).collect();
                let tgt: Vec<usize> = tuples.iter().map(|t| endpoint(t, false)).collect();
                let cat = FinCategory::from_fn(objs.len(), src, tgt, objs.clone(), |g, f| {
                    let comp: Vec<usize> = (0..n).map(|v| cats[v].compose(tuples[g][v], tuples[f][v])).collect();
                    index.get(comp.as_slice()).copied()
                })?;
                BaseObject::cat(cat)
            }
            BaseKind::FinVec(_) => unreachable!(),
        };
        Ok(Cone { apex, legs })
    }

    fn vect_limit(&self, d: &Diagram, p: u32) -> Cone {
        let s = &d.shape;
        let dims: Vec<usize> = d.objects.iter().map(|x| x.dim()).collect();
        let offsets: Vec<usize> = dims
            .iter()
            .scan(0, |acc, &x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect();
        let total: usize = dims.iter().sum();
        let mut rows = Vec::new();
        for f in 0..s.num_arrows() {
            if s.is_identity(f) {
                continue;
            }
            let (a, b) = (s.src(f), s.tgt(f));
            let m = d.arrows[f].matrix();
            for r in 0..dims[b] {
                let mut row = vec![0u32; total];
                for c in 0..dims[a] {
                    row[offsets[a] + c] = m.get(r, c);
                }
                row[offsets[b] + r] = (row[offsets[b] + r] + p - 1) % p;
                rows.push(row);
            }
        }
        let kernel = if rows.is_empty() {
            Matrix::identity(total)
        } else {
            let n = rows.len();
            Matrix::from_rows(n, total, rows.concat()).nullspace(p)
        };
        let legs = (0..s.num_objects())
            .map(|v| {
                let mut m = Matrix::zeros(dims[v], kernel.cols);
                for r in 0..dims[v] {
                    for c in 0..kernel.cols {
                        m.set(r, c, kernel.get(offsets[v] + r, c));
                    }
                }
                MorphismData::Matrix(m)
            })
            .collect();
        Cone { apex: BaseObject::vect(kernel.cols), legs }
    }

    /// The map `Z -> L` induced by a cone `ψ_v: Z -> X_v` (assumed
    /// compatible).
    pub fn factor_through_limit(&self, cone: &Cone, z: &BaseObject, family: &[MorphismData]) -> MorphismData {
        match &self.kind {
            BaseKind::FinVec(p) => {
                let stacked_legs: Vec<Matrix> = cone.legs.iter().map(|l| l.matrix().clone()).collect();
                let stacked_family: Vec<Matrix> = family.iter().map(|f| f.matrix().clone()).collect();
                let pm = Matrix::vstack(&stacked_legs, cone.apex.dim());
                let fm = Matrix::vstack(&stacked_family, z.dim());
                let mut out = Matrix::zeros(cone.apex.dim(), z.dim());
                for c in 0..z.dim() {
                    let x = pm.solve(&fm.col(c), *p).expect("family is a cone");
                    for (r, &e) in x.iter().enumerate() {
                        out.set(r, c, e);
                    }
                }
                MorphismData::Matrix(out)
            }
            _ => {
                let n = cone.apex.cells();
                let mut index = HashMap::with_capacity(n);
                for i in 0..n {
                    let t: Vec<usize> = cone.legs.iter().map(|l| l.cells()[i]).collect();
                    index.insert(t, i);
                }
                MorphismData::Cells(
                    (0..z.cells())
                        .map(|u| {
                            let t: Vec<usize> = family.iter().map(|f| f.cells()[u]).collect();
                            index[&t]
                        })
                        .collect(),
                )
            }
        }
    }

    /// The colimit with its injection cocone.
    pub fn colimit(&self, d: &Diagram) -> Result<Colimit, BaseError> {
        match &self.kind {
            BaseKind::FinVec(p) => Ok(self.vect_colimit(d, *p)),
            BaseKind::FinCat => self.cat_colimit(d),
            _ => Ok(self.set_colimit(d)),
        }
    }

    fn set_colimit(&self, d: &Diagram) -> Colimit {
        let s = &d.shape;
        let sizes: Vec<usize> = d.objects.iter().map(|x| x.cells()).collect();
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect();
        let total: usize = sizes.iter().sum();
        let mut uf = UnionFind::<usize>::new(total);
        for f in 0..s.num_arrows() {
            let (a, b) = (s.src(f), s.tgt(f));
            for (x, &y) in d.arrows[f].cells().iter().enumerate() {
                uf.union(offsets[a] + x, offsets[b] + y);
            }
        }
        // Classes in order of their least element, which is also the representative.
        let mut class_of_root = HashMap::new();
        let mut class = vec![0; total];
        let mut reps = Vec::new();
        for i in 0..total {
            let r = uf.find(i);
            let next = reps.len();
            let c = *class_of_root.entry(r).or_insert_with(|| next);
            if c == next {
                reps.push(i);
            }
            class[i] = c;
        }
        let reps: Vec<(usize, usize)> = reps
            .into_iter()
            .map(|i| {
                let v = (0..sizes.len()).find(|&v| offsets[v] <= i && i < offsets[v] + sizes[v]).unwrap();
                (v, i - offsets[v])
            })
            .collect();
        let legs = (0..s.num_objects())
            .map(|v| MorphismData::Cells((0..sizes[v]).map(|x| class[offsets[v] + x]).collect()))
            .collect();
        let apex = match &self.kind {
            BaseKind::FinGSet(g) => {
                let action = (0..g.order())
                    .map(|e| {
                        reps.iter()
                            .map(|&(v, x)| match &d.objects[v] {
                                BaseObject::GSet { action, .. } => class[offsets[v] + action[e][x]],
                                _ => unreachable!(),
                            })
                            .collect()
                    })
                    .collect();
                BaseObject::GSet { size: reps.len(), action: Arc::new(action) }
            }
            _ => BaseObject::set(reps.len()),
        };
        Colimit { cocone: Cone { apex, legs }, witness: ColimitWitness::Cells { reps } }
    }

    fn cat_colimit(&self, d: &Diagram) -> Result<Colimit, BaseError> {
        let s = &d.shape;
        let cats: Vec<&Arc<FinCategory>> = d.objects.iter().map(|x| x.as_category().unwrap()).collect();
        let nobj: Vec<usize> = cats.iter().map(|c| c.num_objects()).collect();
        let offsets: Vec<usize> = nobj
            .iter()
            .scan(0, |acc, &x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect();
        let total: usize = nobj.iter().sum();
        let mut uf = UnionFind::<usize>::new(total);
        for f in 0..s.num_arrows() {
            let (a, b) = (s.src(f), s.tgt(f));
            let cells = d.arrows[f].cells();
            for o in 0..nobj[a] {
                let image = cats[b].src(cells[cats[a].identity(o)]);
                uf.union(offsets[a] + o, offsets[b] + image);
            }
        }
        let mut class_of_root = HashMap::new();
        let mut obj_class = vec![0; total];
        let mut obj_reps = Vec::new();
        for v in 0..nobj.len() {
            for o in 0..nobj[v] {
                let i = offsets[v] + o;
                let r = uf.find(i);
                let next = obj_reps.len();
                let c = *class_of_root.entry(r).or_insert(next);
                if c == next {
                    obj_reps.push((v, o));
                }
                obj_class[i] = c;
            }
        }
        let oc = |v: usize, o: usize| obj_class[offsets[v] + o];
        let mut pres = Presentation::new(obj_reps.len());
        let mut gen_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut generators = Vec::new();
        for (v, c) in cats.iter().enumerate() {
            for a in 0..c.num_arrows() {
                if c.is_identity(a) {
                    continue;
                }
                let g = pres.generator(oc(v, c.src(a)), oc(v, c.tgt(a)));
                gen_of.insert((v, a), g);
                generators.push((v, a));
            }
        }
        let word = |v: usize, a: usize| -> Vec<usize> {
            if cats[v].is_identity(a) {
                vec![]
            } else {
                vec![gen_of[&(v, a)]]
            }
        };
        for (v, c) in cats.iter().enumerate() {
            for f in 0..c.num_arrows() {
                if c.is_identity(f) {
                    continue;
                }
                for &g in c.out_arrows(c.tgt(f)) {
                    if c.is_identity(g) {
                        continue;
                    }
                    pres.relate(oc(v, c.src(f)), vec![gen_of[&(v, f)], gen_of[&(v, g)]], word(v, c.compose(g, f)));
                }
            }
        }
        for f in 0..s.num_arrows() {
            if s.is_identity(f) {
                continue;
            }
            let (a, b) = (s.src(f), s.tgt(f));
            let cells = d.arrows[f].cells();
            for x in 0..cats[a].num_arrows() {
                if cats[a].is_identity(x) {
                    continue;
                }
                pres.relate(oc(a, cats[a].src(x)), vec![gen_of[&(a, x)]], word(b, cells[x]));
            }
        }
        let presented = pres.enumerate(self.ceiling)?;
        let cat = &presented.category;
        let legs = cats
            .iter()
            .enumerate()
            .map(|(v, c)| {
                MorphismData::Cells(
                    (0..c.num_arrows())
                        .map(|a| {
                            if c.is_identity(a) {
                                cat.identity(oc(v, c.src(a)))
                            } else {
                                presented.generator_arrows[gen_of[&(v, a)]]
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        Ok(Colimit {
            cocone: Cone { apex: BaseObject::cat(presented.category.clone()), legs },
            witness: ColimitWitness::Cat { obj_reps, generators, words: presented.words },
        })
    }

    fn vect_colimit(&self, d: &Diagram, p: u32) -> Colimit {
        let s = &d.shape;
        let dims: Vec<usize> = d.objects.iter().map(|x| x.dim()).collect();
        let offsets: Vec<usize> = dims
            .iter()
            .scan(0, |acc, &x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect();
        let total: usize = dims.iter().sum();
        let mut rows = Vec::new();
        for f in 0..s.num_arrows() {
            if s.is_identity(f) {
                continue;
            }
            let (a, b) = (s.src(f), s.tgt(f));
            let m = d.arrows[f].matrix();
            for i in 0..dims[a] {
                let mut row = vec![0u32; total];
                for r in 0..dims[b] {
                    row[offsets[b] + r] = m.get(r, i);
                }
                row[offsets[a] + i] = (row[offsets[a] + i] + p - 1) % p;
                rows.push(row);
            }
        }
        let (rr, pivots) = if rows.is_empty() {
            (Matrix::zeros(0, total), vec![])
        } else {
            let n = rows.len();
            Matrix::from_rows(n, total, rows.concat()).rref(p)
        };
        let free: Vec<usize> = (0..total).filter(|c| !pivots.contains(c)).collect();
        let free_index: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        // Quotient map: a free coordinate is a basis vector; a pivot
        // coordinate reduces to minus the free part of its row.
        let mut q = Matrix::zeros(free.len(), total);
        for j in 0..total {
            if let Some(&k) = free_index.get(&j) {
                q.set(k, j, 1);
            } else {
                let i = pivots.iter().position(|&c| c == j).unwrap();
                for (k, &c) in free.iter().enumerate() {
                    q.set(k, j, (p - rr.get(i, c)) % p);
                }
            }
        }
        let legs = (0..s.num_objects())
            .map(|v| {
                let mut m = Matrix::zeros(free.len(), dims[v]);
                for r in 0..free.len() {
                    for c in 0..dims[v] {
                        m.set(r, c, q.get(r, offsets[v] + c));
                    }
                }
                MorphismData::Matrix(m)
            })
            .collect();
        let reps = free
            .iter()
            .map(|&c| {
                let v = (0..dims.len()).find(|&v| offsets[v] <= c && c < offsets[v] + dims[v]).unwrap();
                (v, c - offsets[v])
            })
            .collect();
        Colimit { cocone: Cone { apex: BaseObject::vect(free.len()), legs }, witness: ColimitWitness::Vect { reps } }
    }

    /// The map `L -> Z` induced by a cocone `φ_v: X_v -> Z` (assumed
    /// compatible).
    pub fn factor_through_colimit(
        &self,
        d: &Diagram,
        colim: &Colimit,
        z: &BaseObject,
        family: &[MorphismData],
    ) -> MorphismData {
        match &colim.witness {
            ColimitWitness::Cells { reps } => {
                MorphismData::Cells(reps.iter().map(|&(v, x)| family[v].cells()[x]).collect())
            }
            ColimitWitness::Vect { reps } => {
                let mut m = Matrix::zeros(z.dim(), reps.len());
                for (k, &(v, i)) in reps.iter().enumerate() {
                    let f = family[v].matrix();
                    for r in 0..z.dim() {
                        m.set(r, k, f.get(r, i));
                    }
                }
                MorphismData::Matrix(m)
            }
            ColimitWitness::Cat { obj_reps, generators, words } => {
                let zc = z.as_category().unwrap();
                let l = colim.cocone.apex.as_category().unwrap();
                let cells = (0..l.num_arrows())
                    .map(|a| {
                        let (v, o) = obj_reps[l.src(a)];
                        let xv = d.objects[v].as_category().unwrap();
                        let mut acc = family[v].cells()[xv.identity(o)];
                        for &g in &words[a] {
                            let (w, x) = generators[g];
                            acc = zc.compose(family[w].cells()[x], acc);
                        }
                        acc
                    })
                    .collect();
                MorphismData::Cells(cells)
            }
        }
    }

    /// The map `Y ⊗ L -> Z` induced by a compatible family
    /// `φ_v: Y ⊗ X_v -> Z`, using that `Y ⊗ -` preserves colimits.
    pub fn factor_tensor_colimit(
        &self,
        y: &BaseObject,
        d: &Diagram,
        colim: &Colimit,
        z: &BaseObject,
        family: &[MorphismData],
    ) -> MorphismData {
        let lsize = colim.cocone.apex.cells();
        match &colim.witness {
            ColimitWitness::Cells { reps } => {
                let mut cells = Vec::with_capacity(y.cells() * lsize);
                for u in 0..y.cells() {
                    for &(v, x) in reps {
                        cells.push(family[v].cells()[u * d.objects[v].cells() + x]);
                    }
                }
                MorphismData::Cells(cells)
            }
            ColimitWitness::Vect { reps } => {
                let dy = y.dim();
                let mut m = Matrix::zeros(z.dim(), dy * reps.len());
                for u in 0..dy {
                    for (k, &(v, i)) in reps.iter().enumerate() {
                        let f = family[v].matrix();
                        for r in 0..z.dim() {
                            m.set(r, u * reps.len() + k, f.get(r, u * d.objects[v].dim() + i));
                        }
                    }
                }
                MorphismData::Matrix(m)
            }
            ColimitWitness::Cat { obj_reps, generators, words } => {
                let zc = z.as_category().unwrap();
                let yc = y.as_category().unwrap();
                let l = colim.cocone.apex.as_category().unwrap();
                let at = |v: usize, yy: usize, x: usize| family[v].cells()[yy * d.objects[v].cells() + x];
                let mut cells = Vec::with_capacity(yc.num_arrows() * lsize);
                for u in 0..yc.num_arrows() {
                    for a in 0..l.num_arrows() {
                        let w = &words[a];
                        let value = if w.is_empty() {
                            let (v, o) = obj_reps[l.src(a)];
                            at(v, u, d.objects[v].as_category().unwrap().identity(o))
                        } else {
                            let id_u = yc.identity(yc.src(u));
                            let mut acc: Option<usize> = None;
                            for (k, &g) in w.iter().enumerate() {
                                let (v, x) = generators[g];
                                let yy = if k + 1 == w.len() { u } else { id_u };
                                let step = at(v, yy, x);
                                acc = Some(match acc {
                                    None => step,
                                    Some(prev) => zc.compose(step, prev),
                                });
                            }
                            acc.unwrap()
                        };
                        cells.push(value);
                    }
                }
                MorphismData::Cells(cells)
            }
        }
    }

    /// Every cocone from `d` to `z`.
    pub fn cocones(&self, d: &Diagram, z: &BaseObject) -> Result<Vec<Vec<MorphismData>>, BaseError> {
        let homs: Vec<Vec<MorphismData>> = d.objects.iter().map(|x| self.hom_set(x, z)).collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        let mut pick: Vec<usize> = Vec::new();
        fn go(
            base: &Base,
            d: &Diagram,
            homs: &[Vec<MorphismData>],
            pick: &mut Vec<usize>,
            out: &mut Vec<Vec<MorphismData>>,
        ) {
            let s = &d.shape;
            let v = pick.len();
            if v == s.num_objects() {
                out.push(pick.iter().enumerate().map(|(w, &i)| homs[w][i].clone()).collect());
                return;
            }
            for i in 0..homs[v].len() {
                pick.push(i);
                let ok = (0..s.num_arrows()).all(|f| {
                    let (a, b) = (s.src(f), s.tgt(f));
                    a > v || b > v || base.compose(&homs[b][pick[b]], &d.arrows[f]) == homs[a][pick[a]]
                });
                if ok {
                    go(base, d, homs, pick, out);
                }
                pick.pop();
            }
        }
        go(self, d, &homs, &mut pick, &mut out);
        Ok(out)
    }

    /// Every cone from `z` to `d`.
    pub fn cones(&self, d: &Diagram, z: &BaseObject) -> Result<Vec<Vec<MorphismData>>, BaseError> {
        let homs: Vec<Vec<MorphismData>> = d.objects.iter().map(|x| self.hom_set(z, x)).collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        let mut pick: Vec<usize> = Vec::new();
        fn go(
            base: &Base,
            d: &Diagram,
            homs: &[Vec<MorphismData>],
            pick: &mut Vec<usize>,
            out: &mut Vec<Vec<MorphismData>>,
        ) {
            let s = &d.shape;
            let v = pick.len();
            if v == s.num_objects() {
                out.push(pick.iter().enumerate().map(|(w, &i)| homs[w][i].clone()).collect());
                return;
            }
            for i in 0..homs[v].len() {
                pick.push(i);
                let ok = (0..s.num_arrows()).all(|f| {
                    let (a, b) = (s.src(f), s.tgt(f));
                    a > v || b > v || base.compose(&d.arrows[f], &homs[a][pick[a]]) == homs[b][pick[b]]
                });
                if ok {
                    go(base, d, homs, pick, out);
                }
                pick.pop();
            }
        }
        go(self, d, &homs, &mut pick, &mut out);
        Ok(out)
    }

    /// Exhaustive universality check of a colimit against test objects:
    /// precomposition with the injections is a bijection from `hom(L, Z)`
    /// onto the cocones to `Z`, and the factorization inverts it.
    pub fn verify_colimit(&self, d: &Diagram, colim: &Colimit, tests: &[BaseObject]) -> Result<bool, BaseError> {
        for (v, leg) in colim.cocone.legs.iter().enumerate() {
            self.check_morphism(&d.objects[v], &colim.cocone.apex, leg)?;
        }
        for z in tests {
            let cocones = self.cocones(d, z)?;
            let maps = self.hom_set(&colim.cocone.apex, z)?;
            if maps.len() != cocones.len() {
                return Ok(false);
            }
            let mut seen = std::collections::HashSet::new();
            for m in &maps {
                let fam: Vec<MorphismData> = colim.cocone.legs.iter().map(|l| self.compose(m, l)).collect();
                if !cocones.contains(&fam) || !seen.insert(fam) {
                    return Ok(false);
                }
            }
            for c in &cocones {
                let m = self.factor_through_colimit(d, colim, z, c);
                let back: Vec<MorphismData> = colim.cocone.legs.iter().map(|l| self.compose(&m, l)).collect();
                if &back != c {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exhaustive universality check of a limit cone.
    pub fn verify_limit(&self, d: &Diagram, cone: &Cone, tests: &[BaseObject]) -> Result<bool, BaseError> {
        for (v, leg) in cone.legs.iter().enumerate() {
            self.check_morphism(&cone.apex, &d.objects[v], leg)?;
        }
        for z in tests {
            let cones = self.cones(d, z)?;
            let maps = self.hom_set(z, &cone.apex)?;
            if maps.len() != cones.len() {
                return Ok(false);
            }
            let mut seen = std::collections::HashSet::new();
            for m in &maps {
                let fam: Vec<MorphismData> = cone.legs.iter().map(|l| self.compose(l, m)).collect();
                if !cones.contains(&fam) || !seen.insert(fam) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Small objects to test universal properties against.
    pub fn test_objects(&self) -> Vec<BaseObject> {
        match &self.kind {
            BaseKind::FinSet => (0..=3).map(BaseObject::set).collect(),
            BaseKind::FinGSet(g) => {
                let mut v = vec![self.empty(), self.unit(), self.discrete(2), BaseObject::gset(g.regular_action())];
                if g.order() <= 3 {
                    let reg = BaseObject::gset(g.regular_action());
                    v.push(self.tensor(&reg, &self.discrete(2)).unwrap());
                }
                v
            }
            BaseKind::FinCat => vec![
                self.empty(),
                self.unit(),
                self.discrete(2),
                BaseObject::cat(FinCategory::arrow()),
                BaseObject::cat(FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap()),
            ],
            BaseKind::FinVec(p) => {
                let max = if *p == 2 { 2 } else { 1 };
                (0..=max).map(BaseObject::vect).collect()
            }
        }
    }
}
