//! Closed structure: internal homs, evaluation and currying.

use std::collections::HashMap;
use std::sync::Arc;

use super::{all_functors, decode_function, encode_function, Base, BaseError, BaseKind, BaseObject, MorphismData};
use crate::linalg::Matrix;
use crate::ordcat::FinCategory;

/// The functor category `[X, Y]` of two finite categories with its
/// enumeration data.  Arrows are natural transformations, ordered by
/// source functor, target functor, then components.
#[derive(Clone, Debug)]
pub struct FunctorCategory {
    pub functors: Vec<Vec<usize>>,
    pub object_maps: Vec<Vec<usize>>,
    /// `(source functor, target functor, component per object of X)`.
    pub transformations: Vec<(usize, usize, Vec<usize>)>,
    pub category: FinCategory,
    index: HashMap<(usize, usize, Vec<usize>), usize>,
    functor_index: HashMap<Vec<usize>, usize>,
}

impl FunctorCategory {
    pub fn new(x: &FinCategory, y: &FinCategory, ceiling: usize) -> Result<Self, BaseError> {
        let functors = all_functors(x, y, ceiling)?;
        let object_maps: Vec<Vec<usize>> =
            functors.iter().map(|f| (0..x.num_objects()).map(|o| y.src(f[x.identity(o)])).collect()).collect();
        let mut transformations = Vec::new();
        for (fi, fo) in object_maps.iter().enumerate() {
            for (gi, go) in object_maps.iter().enumerate() {
                let mut comps = vec![usize::MAX; x.num_objects()];
                natural_search(x, y, &functors[fi], &functors[gi], fo, go, 0, &mut comps, &mut |c| {
                    transformations.push((fi, gi, c.to_vec()));
                });
                if transformations.len() > ceiling {
                    return Err(BaseError::Ceiling {
                        what: "natural transformations".into(),
                        limit: ceiling,
                        needed: transformations.len(),
                    });
                }
            }
        }
        let index: HashMap<(usize, usize, Vec<usize>), usize> =
            transformations.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let functor_index = functors.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let src: Vec<usize> = transformations.iter().map(|t| t.0).collect();
        let tgt: Vec<usize> = transformations.iter().map(|t| t.1).collect();
        let ident: Vec<usize> = object_maps
            .iter()
            .enumerate()
            .map(|(fi, fo)| index[&(fi, fi, fo.iter().map(|&o| y.identity(o)).collect())])
            .collect();
        let category = FinCategory::from_fn(functors.len(), src, tgt, ident, |s, t| {
            let (a, _, ref cs) = transformations[t];
            let (_, c, ref cs2) = transformations[s];
            let comps: Vec<usize> = cs.iter().zip(cs2).map(|(&p, &q)| y.compose(q, p)).collect();
            index.get(&(a, c, comps)).copied()
        })?;
        Ok(FunctorCategory { functors, object_maps, transformations, category, index, functor_index })
    }

    pub fn transformation_index(&self, src: usize, tgt: usize, comps: &[usize]) -> Option<usize> {
        self.index.get(&(src, tgt, comps.to_vec())).copied()
    }

    pub fn functor_index(&self, cells: &[usize]) -> Option<usize> {
        self.functor_index.get(cells).copied()
    }
}

#[allow(clippy::too_many_arguments)]
fn natural_search(
    x: &FinCategory,
    y: &FinCategory,
    f: &[usize],
    g: &[usize],
    fo: &[usize],
    go: &[usize],
    o: usize,
    comps: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if o == x.num_objects() {
        emit(comps);
        return;
    }
    for c in y.hom(fo[o], go[o]) {
        comps[o] = c;
        // Naturality for every arrow between already-assigned objects.
        let ok = (0..x.num_arrows()).all(|a| {
            let (s, t) = (x.src(a), x.tgt(a));
            if s > o || t > o {
                return true;
            }
            y.compose(g[a], comps[s]) == y.compose(comps[t], f[a])
        });
        if ok {
            natural_search(x, y, f, g, fo, go, o + 1, comps, emit);
        }
    }
    comps[o] = usize::MAX;
}

impl Base {
    /// The internal hom `[X, Y]`.
    pub fn internal_hom(&self, x: &BaseObject, y: &BaseObject) -> Result<BaseObject, BaseError> {
        match (x, y) {
            (BaseObject::Set { size: a }, BaseObject::Set { size: b }) => Ok(BaseObject::set(self.power(*b, *a)?)),
            (BaseObject::Vect { dim: a }, BaseObject::Vect { dim: b }) => Ok(BaseObject::vect(a * b)),
            (BaseObject::GSet { size: a, action: ax }, BaseObject::GSet { size: b, action: ay }) => {
                let g = self.group().ok_or(BaseError::Mismatch)?;
                let n = self.power(*b, *a)?;
                let action = (0..g.order())
                    .map(|e| {
                        let ei = g.inv(e);
                        (0..n)
                            .map(|code| {
                                let phi = decode_function(code, *a, *b);
                                let moved: Vec<usize> = (0..*a).map(|u| ay[e][phi[ax[ei][u]]]).collect();
                                encode_function(&moved, *b)
                            })
                            .collect()
                    })
                    .collect();
                Ok(BaseObject::GSet { size: n, action: Arc::new(action) })
            }
            (BaseObject::Cat { category: a }, BaseObject::Cat { category: b }) => {
                Ok(BaseObject::cat(FunctorCategory::new(a, b, self.ceiling)?.category))
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    fn power(&self, b: usize, e: usize) -> Result<usize, BaseError> {
        let mut n: usize = 1;
        for _ in 0..e {
            n = n.checked_mul(b).filter(|&n| n <= self.ceiling).ok_or_else(|| BaseError::Ceiling {
                what: "internal hom".into(),
                limit: self.ceiling,
                needed: usize::MAX,
            })?;
        }
        Ok(n)
    }

    /// Evaluation `[Y, Z] ⊗ Y -> Z`.
    pub fn eval(&self, y: &BaseObject, z: &BaseObject) -> Result<MorphismData, BaseError> {
        match (y, z) {
            (BaseObject::Vect { dim: dy }, BaseObject::Vect { dim: dz }) => {
                // Coordinates of [Y, Z]: entry (i, j) of a dz×dy matrix at i·dy + j.
                let mut m = Matrix::zeros(*dz, dz * dy * dy);
                for i in 0..*dz {
                    for j in 0..*dy {
                        m.set(i, (i * dy + j) * dy + j, 1);
                    }
                }
                Ok(MorphismData::Matrix(m))
            }
            (BaseObject::Cat { category: a }, BaseObject::Cat { category: b }) => {
                let fc = FunctorCategory::new(a, b, self.ceiling)?;
                let mut cells = Vec::with_capacity(fc.transformations.len() * a.num_arrows());
                for (_, gi, comps) in &fc.transformations {
                    let g = &fc.functors[*gi];
                    for f in 0..a.num_arrows() {
                        cells.push(b.compose(g[f], comps[a.src(f)]));
                    }
                }
                Ok(MorphismData::Cells(cells))
            }
            _ if self.is_cartesian() => {
                let (a, b) = (y.cells(), z.cells());
                let n = self.power(b, a)?;
                let mut cells = Vec::with_capacity(n * a);
                for code in 0..n {
                    cells.extend(decode_function(code, a, b));
                }
                Ok(MorphismData::Cells(cells))
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    /// Curry `f: X ⊗ Y -> Z` into `X -> [Y, Z]`.
    pub fn transpose(
        &self,
        x: &BaseObject,
        y: &BaseObject,
        z: &BaseObject,
        f: &MorphismData,
    ) -> Result<MorphismData, BaseError> {
        match (x, y, z) {
            (BaseObject::Vect { dim: dx }, BaseObject::Vect { dim: dy }, BaseObject::Vect { dim: dz }) => {
                let m = f.matrix();
                let mut out = Matrix::zeros(dz * dy, *dx);
                for u in 0..*dx {
                    for i in 0..*dz {
                        for j in 0..*dy {
                            out.set(i * dy + j, u, m.get(i, u * dy + j));
                        }
                    }
                }
                Ok(MorphismData::Matrix(out))
            }
            (BaseObject::Cat { category: cx }, BaseObject::Cat { category: cy }, BaseObject::Cat { category: cz }) => {
                let fc = FunctorCategory::new(cy, cz, self.ceiling)?;
                let cells = f.cells();
                let ny = cy.num_arrows();
                let functor_at = |o: usize| -> Vec<usize> {
                    let i = cx.identity(o);
                    (0..ny).map(|g| cells[i * ny + g]).collect()
                };
                let mut out = Vec::with_capacity(cx.num_arrows());
                for a in 0..cx.num_arrows() {
                    let s = fc
                        .functor_index(&functor_at(cx.src(a)))
                        .ok_or_else(|| BaseError::BadMorphism("restriction is not a functor".into()))?;
                    let t = fc
                        .functor_index(&functor_at(cx.tgt(a)))
                        .ok_or_else(|| BaseError::BadMorphism("restriction is not a functor".into()))?;
                    let comps: Vec<usize> = (0..cy.num_objects()).map(|o| cells[a * ny + cy.identity(o)]).collect();
                    out.push(
                        fc.transformation_index(s, t, &comps)
                            .ok_or_else(|| BaseError::BadMorphism("components are not natural".into()))?,
                    );
                }
                Ok(MorphismData::Cells(out))
            }
            _ if self.is_cartesian() => {
                let (a, b) = (y.cells(), z.cells());
                let cells = f.cells();
                Ok(MorphismData::Cells(
                    (0..x.cells()).map(|u| encode_function(&cells[u * a..(u + 1) * a], b)).collect(),
                ))
            }
            _ => Err(BaseError::Mismatch),
        }
    }

    /// Uncurry `g: X -> [Y, Z]` into `X ⊗ Y -> Z`.
    pub fn untranspose(&self, y: &BaseObject, z: &BaseObject, g: &MorphismData) -> Result<MorphismData, BaseError> {
        let ev = self.eval(y, z)?;
        let gy = self.tensor_mor(g, &self.identity(y), y, y);
        Ok(self.compose(&ev, &gy))
    }

    /// Is this base one whose internal hom is built by enumeration (and so
    /// subject to the ceiling)?
    pub fn internal_hom_is_enumerative(&self) -> bool {
        !matches!(self.kind, BaseKind::FinVec(_))
    }
}
