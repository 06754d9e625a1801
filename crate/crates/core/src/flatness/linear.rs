//! Linear-algebra helpers for weights over `FinVec`: direct sums,
//! generating sets, sections of the canonical epimorphism, subfunctors of
//! covariant representables, and extension along the matrix completion.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use crate::base::{BaseObject, MorphismData};
use crate::colim::{ColimError, CompletionResult};
use crate::enriched::{VCategory, VNatTrans, Weight};
use crate::linalg::{self, Matrix};

fn mat(f: &MorphismData) -> &Matrix {
    f.matrix()
}

/// Direct sum of weights on one linear domain, with the block offsets of
/// each summand at each object.
pub fn direct_sum(dom: &Arc<VCategory>, parts: &[Weight]) -> Result<(Weight, Vec<Vec<usize>>), ColimError> {
    let n = dom.num_objects();
    let p = dom.base.p();
    let mut offsets = vec![vec![0; parts.len()]; n];
    let mut dims = vec![0; n];
    for a in 0..n {
        for (i, w) in parts.iter().enumerate() {
            offsets[a][i] = dims[a];
            dims[a] += w.value(a).dim();
        }
    }
    let mut act = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let h = dom.hom(a, b).dim();
            let mut m = Matrix::zeros(dims[a], h * dims[b]);
            for (i, w) in parts.iter().enumerate() {
                let wa = mat(w.act(a, b));
                let db = w.value(b).dim();
                for r in 0..w.value(a).dim() {
                    for f in 0..h {
                        for q in 0..db {
                            let e = wa.get(r, f * db + q);
                            if e != 0 {
                                m.set(offsets[a][i] + r, f * dims[b] + offsets[b][i] + q, e % p);
                            }
                        }
                    }
                }
            }
            act.push(MorphismData::Matrix(m));
        }
    }
    let values = dims.iter().map(|&d| BaseObject::vect(d)).collect();
    Ok((Weight::new(dom.clone(), values, act)?, offsets))
}

/// `f ↦ M(f)(g)`: the map `C(a, c) -> M(a)` classified by `g ∈ M(c)`.
fn yoneda_image(m: &Weight, a: usize, c: usize, g: &[u32]) -> Matrix {
    let p = m.base().p();
    let h = m.domain.hom(a, c).dim();
    mat(m.act(a, c)).mul(&Matrix::identity(h).kron(&Matrix::column(g), p), p)
}

/// A generating set of `M`: elements `g_i ∈ M(c_i)` whose Yoneda maps are
/// jointly surjective.  Basis vectors are added greedily in object order.
pub fn generating_set(m: &Weight) -> Vec<(usize, Vec<u32>)> {
    let p = m.base().p();
    let n = m.domain.num_objects();
    let mut gens: Vec<(usize, Vec<u32>)> = Vec::new();
    for c in 0..n {
        let d = m.value(c).dim();
        for k in 0..d {
            let mut e = vec![0; d];
            e[k] = 1;
            let mut parts: Vec<Matrix> = gens.iter().map(|(ci, g)| yoneda_image(m, c, *ci, g)).collect();
            let before = Matrix::hstack(&parts, d).rank(p);
            parts.push(Matrix::column(&e));
            if Matrix::hstack(&parts, d).rank(p) > before {
                gens.push((c, e));
            }
        }
    }
    gens
}

/// The outcome of looking for a section of `⊕ C(-, c_i) -> M`.
pub struct SplitSearch {
    pub generators: Vec<(usize, Vec<u32>)>,
    /// The section `s_a: M(a) -> P(a)` at each object, if one exists.
    pub section: Option<Vec<Matrix>>,
}

/// Solve the linear system for a natural section of the canonical
/// epimorphism from the sum of representables on a generating set.
pub fn split_generating_epi(m: &Weight) -> Result<SplitSearch, ColimError> {
    let dom = &m.domain;
    let p = m.base().p();
    let n = dom.num_objects();
    let generators = generating_set(m);
    let reps: Vec<Weight> = generators.iter().map(|(c, _)| Weight::yoneda(dom, *c)).collect();
    let (sum, _) = direct_sum(dom, &reps)?;
    let dm: Vec<usize> = (0..n).map(|a| m.value(a).dim()).collect();
    let dp: Vec<usize> = (0..n).map(|a| sum.value(a).dim()).collect();
    let pi: Vec<Matrix> = (0..n)
        .map(|a| {
            let parts: Vec<Matrix> = generators.iter().map(|(c, g)| yoneda_image(m, a, *c, g)).collect();
            Matrix::hstack(&parts, dm[a])
        })
        .collect();
    // Unknowns: the entries of every s_a, row-major, objects in order.
    let mut start = vec![0; n + 1];
    for a in 0..n {
        start[a + 1] = start[a] + dp[a] * dm[a];
    }
    let unknowns = start[n];
    let residual = |s: &[Matrix], with_identity: bool| -> Vec<u32> {
        let mut out = Vec::new();
        for a in 0..n {
            let mut ps = pi[a].mul(&s[a], p);
            if with_identity {
                ps = ps.sub(&Matrix::identity(dm[a]), p);
            }
            out.extend(ps.data);
        }
        for a in 0..n {
            for b in 0..n {
                let h = dom.hom(a, b).dim();
                let lhs = s[a].mul(mat(m.act(a, b)), p);
                let rhs = mat(sum.act(a, b)).mul(&Matrix::identity(h).kron(&s[b], p), p);
                out.extend(lhs.sub(&rhs, p).data);
            }
        }
        out
    };
    let zero: Vec<Matrix> = (0..n).map(|a| Matrix::zeros(dp[a], dm[a])).collect();
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(unknowns);
    for a in 0..n {
        for e in 0..dp[a] * dm[a] {
            let mut s = zero.clone();
            s[a].data[e] = 1;
            columns.push(residual(&s, false));
        }
    }
    // The system is A x = -residual(0) with the identity included.
    let target: Vec<u32> = residual(&zero, true).into_iter().map(|v| (p - v) % p).collect();
    let rows = target.len();
    let mut a_mat = Matrix::zeros(rows, unknowns);
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            a_mat.set(i, j, v);
        }
    }
    let section = a_mat
        .solve(&target, p)
        .map(|x| (0..n).map(|a| Matrix::from_rows(dp[a], dm[a], x[start[a]..start[a + 1]].to_vec())).collect());
    Ok(SplitSearch { generators, section })
}

/// A subfunctor of a covariant functor given as a weight on `C^op`: a
/// basis (as matrix columns) of each subspace.
#[derive(Clone, Debug)]
pub struct Subfunctor {
    pub bases: Vec<Matrix>,
}

fn canonical(b: &Matrix, p: u32) -> Matrix {
    b.transpose().row_space(p).transpose()
}

/// Close a family of subspaces under the action of `r`.
fn close(r: &Weight, mut bases: Vec<Matrix>) -> Vec<Matrix> {
    let p = r.base().p();
    let dom = &r.domain;
    let n = dom.num_objects();
    for b in bases.iter_mut() {
        *b = canonical(b, p);
    }
    loop {
        let mut changed = false;
        for y in 0..n {
            let dy = r.value(y).dim();
            let mut parts = vec![bases[y].clone()];
            for x in 0..n {
                let h = dom.hom(y, x).dim();
                parts.push(mat(r.act(y, x)).mul(&Matrix::identity(h).kron(&bases[x], p), p));
            }
            let next = canonical(&Matrix::hstack(&parts, dy), p);
            if next.cols != bases[y].cols {
                bases[y] = next;
                changed = true;
            }
        }
        if !changed {
            return bases;
        }
    }
}

/// All proper nonzero subfunctors of `r`, or `None` past `limit`.
pub fn subfunctors(r: &Weight, limit: usize) -> Option<Vec<Subfunctor>> {
    let p = r.base().p();
    let n = r.domain.num_objects();
    let dims: Vec<usize> = (0..n).map(|x| r.value(x).dim()).collect();
    let key = |bs: &[Matrix]| -> Vec<Vec<u32>> { bs.iter().map(|b| b.transpose().data).collect() };
    let zero: Vec<Matrix> = dims.iter().map(|&d| Matrix::zeros(d, 0)).collect();
    let mut seen: HashSet<Vec<Vec<u32>>> = HashSet::new();
    seen.insert(key(&zero));
    let mut queue = VecDeque::from([zero]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        for x in 0..n {
            for v in linalg::all_vectors(dims[x], p) {
                let grown = Matrix::hstack(&[s[x].clone(), Matrix::column(&v)], dims[x]);
                if grown.rank(p) == s[x].cols {
                    continue;
                }
                let mut next = s.clone();
                next[x] = grown;
                let next = close(r, next);
                if seen.insert(key(&next)) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(next.clone());
                    if next.iter().zip(&dims).any(|(b, &d)| b.cols < d) {
                        out.push(Subfunctor { bases: next });
                    }
                }
            }
        }
    }
    Some(out)
}

/// The subfunctor as a weight, with its inclusion into `r`.
pub fn subfunctor_weight(r: &Weight, s: &Subfunctor) -> Result<(Weight, VNatTrans), ColimError> {
    let p = r.base().p();
    let dom = &r.domain;
    let n = dom.num_objects();
    let mut act = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            let h = dom.hom(y, x).dim();
            let img = mat(r.act(y, x)).mul(&Matrix::identity(h).kron(&s.bases[x], p), p);
            let mut m = Matrix::zeros(s.bases[y].cols, img.cols);
            for j in 0..img.cols {
                let col = s.bases[y]
                    .solve(&img.col(j), p)
                    .ok_or_else(|| ColimError::Unsupported("subspace family is not closed under the action".into()))?;
                for (i, v) in col.into_iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            act.push(MorphismData::Matrix(m));
        }
    }
    let values = s.bases.iter().map(|b| BaseObject::vect(b.cols)).collect();
    let w = Weight::new(dom.clone(), values, act)?;
    let incl = VNatTrans { components: s.bases.iter().map(|b| MorphismData::Matrix(b.clone())).collect() };
    Ok((w, incl))
}

/// The extension of `M` along the matrix completion: `M'(u) = ⊕ M(u_i)`.
pub fn extend_to_completion(m: &Weight, mc: &CompletionResult) -> Result<Weight, ColimError> {
    let c = &m.domain;
    let dst = &mc.completed;
    let p = m.base().p();
    let k = dst.num_objects();
    let tuples: Vec<&Vec<usize>> = mc.provenance.iter().map(|q| &q.tuple).collect();
    let offs = |u: &[usize]| -> (Vec<usize>, usize) {
        let mut o = Vec::with_capacity(u.len());
        let mut acc = 0;
        for &x in u {
            o.push(acc);
            acc += m.value(x).dim();
        }
        (o, acc)
    };
    let mut values = Vec::with_capacity(k);
    for u in &tuples {
        values.push(BaseObject::vect(offs(u).1));
    }
    let mut act = Vec::with_capacity(k * k);
    for u in &tuples {
        for v in &tuples {
            let (ou, du) = offs(u);
            let (ov, dv) = offs(v);
            let hd: usize =
                u.iter().flat_map(|&x| v.iter().map(move |&y| (x, y))).map(|(x, y)| c.hom(x, y).dim()).sum();
            let mut out = Matrix::zeros(du, hd * dv);
            let mut hoff = 0;
            for (i, &x) in u.iter().enumerate() {
                for (j, &y) in v.iter().enumerate() {
                    let a = mat(m.act(x, y));
                    let (dh, dy) = (c.hom(x, y).dim(), m.value(y).dim());
                    for r in 0..m.value(x).dim() {
                        for f in 0..dh {
                            for q in 0..dy {
                                let e = a.get(r, f * dy + q);
                                if e != 0 {
                                    let col = (hoff + f) * dv + ov[j] + q;
                                    let cur = out.get(ou[i] + r, col);
                                    out.set(ou[i] + r, col, (cur + e) % p);
                                }
                            }
                        }
                    }
                    hoff += dh;
                }
            }
            act.push(MorphismData::Matrix(out));
        }
    }
    Ok(Weight::new(dst.clone(), values, act)?)
}

/// Does the linear category have a zero object and a biproduct of every
/// pair of objects?
pub fn has_direct_sums(c: &VCategory) -> Result<bool, ColimError> {
    let n = c.num_objects();
    if !(0..n).any(|x| c.hom(x, x).dim() == 0) {
        return Ok(false);
    }
    for x in 0..n {
        for y in x..n {
            if crate::colim::find_biproduct(c, x, y)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
