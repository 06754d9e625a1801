//! Categories of elements.
//!
//! A generalized element of a weight `M` at stage `X` is a pair
//! `(c, x: X -> M(c))`.  Morphisms `X -> Y` are stored as code vectors:
//! for a cartesian base the cell table of the map, for `X = I` a single
//! point code.  The action is then applied cell by cell, which covers both
//! readings at once.
//!
//! For the `FinCat` base the double category of elements records the
//! 2-cell data that the ordinary categories of elements forget.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{BaseError, BaseKind, BaseObject, MorphismData};
use crate::enriched::{EnrichedError, VCategory, Weight};
use crate::ordcat::{CategoryError, FinCategory, OrdFunctor};
use crate::verdict::{Certificate, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElementsError {
    #[error(transparent)]
    Enriched(#[from] EnrichedError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error("generalized elements at a stage other than the unit need a cartesian base")]
    NotCartesian,
    #[error("wrong base: {0}")]
    WrongBase(String),
    #[error("malformed double category: {0}")]
    Malformed(String),
}

/// A category of generalized elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementsCategory {
    pub carrier: FinCategory,
    /// Per object: the object `c` of the domain and the code vector of
    /// `x: X -> M(c)`.
    pub labels: Vec<(usize, Vec<usize>)>,
    /// Per arrow: the code vector of `f: X -> C(c, d)`.
    pub arrow_labels: Vec<Vec<usize>>,
    /// The projection to `C_0`, present when the stage is the unit.
    pub projection: Option<OrdFunctor>,
}

impl ElementsCategory {
    /// Object index of a label.
    pub fn object_of(&self, c: usize, x: &[usize]) -> Option<usize> {
        self.labels.iter().position(|(d, y)| *d == c && y.as_slice() == x)
    }

    /// Check every arrow against the defining triangle `act ∘ (f, y) = x`.
    pub fn check_labels(&self, m: &Weight) -> bool {
        let b = m.base();
        let c = &m.domain;
        (0..self.carrier.num_arrows()).all(|a| {
            let (s, t) = (self.carrier.src(a), self.carrier.tgt(a));
            let (cs, x) = &self.labels[s];
            let (ct, y) = &self.labels[t];
            let f = &self.arrow_labels[a];
            f.len() == x.len()
                && (0..x.len()).all(|k| b.apply2(m.act(*cs, *ct), c.hom(*cs, *ct), m.value(*ct), f[k], y[k]) == x[k])
        })
    }
}

/// The generalized elements `X -> Y` as code vectors.
fn stage_elements(m: &Weight, x: &BaseObject, y: &BaseObject) -> Result<Vec<Vec<usize>>, ElementsError> {
    let b = m.base();
    if *x == b.unit() {
        return Ok(b.points(y)?.into_iter().map(|p| vec![p]).collect());
    }
    if !b.is_cartesian() {
        return Err(ElementsError::NotCartesian);
    }
    Ok(b.hom_set(x, y)?
        .into_iter()
        .map(|f| match f {
            MorphismData::Cells(c) => c,
            MorphismData::Matrix(_) => unreachable!("cartesian bases act on cells"),
        })
        .collect())
}

/// `El(M_X)`: objects `(c, x: X -> M(c))` ordered by `c` and then by the
/// canonical order of morphisms; arrows `f: X -> C(c, d)` with
/// `act ∘ (f, y) = x`.
pub fn elements_of(m: &Weight, x: &BaseObject) -> Result<ElementsCategory, ElementsError> {
    let b = m.base();
    let c = &m.domain;
    let n = c.num_objects();
    let mut labels = Vec::new();
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for a in 0..n {
        for e in stage_elements(m, x, m.value(a))? {
            index.insert((a, e.clone()), labels.len());
            labels.push((a, e));
        }
    }
    let width = if *x == b.unit() { 1 } else { x.cells() };
    let mut homs: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n * n);
    for a in 0..n {
        for d in 0..n {
            homs.push(stage_elements(m, x, c.hom(a, d))?);
        }
    }
    let hom_pos: Vec<HashMap<Vec<usize>, usize>> =
        homs.iter().map(|h| h.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect()).collect();

    // Arrows keyed by (source, index of f in hom(c, d), target).
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    for (s, (a, xa)) in labels.iter().enumerate() {
        for d in 0..n {
            for (fi, f) in homs[a * n + d].iter().enumerate() {
                for (t, (dd, y)) in labels.iter().enumerate() {
                    if *dd != d {
                        continue;
                    }
                    let ok = (0..width).all(|k| b.apply2(m.act(*a, d), c.hom(*a, d), m.value(d), f[k], y[k]) == xa[k]);
                    if ok {
                        arrows.push((s, fi, t));
                    }
                }
            }
        }
    }
    let key: HashMap<(usize, usize, usize), usize> = arrows.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let src: Vec<usize> = arrows.iter().map(|t| t.0).collect();
    let tgt: Vec<usize> = arrows.iter().map(|t| t.2).collect();
    let mut ident = Vec::with_capacity(labels.len());
    for (i, (a, _)) in labels.iter().enumerate() {
        let code = vec![b.morphism_point(c.ident(*a)); width];
        let fi = hom_pos[a * n + a][&code];
        ident.push(key[&(i, fi, i)]);
    }
    let carrier = FinCategory::from_fn(labels.len(), src, tgt, ident, |g, f| {
        let (s, fi, mid) = arrows[f];
        let (_, gi, t) = arrows[g];
        let (ca, cd, ce) = (labels[s].0, labels[mid].0, labels[t].0);
        let fv = &homs[ca * n + cd][fi];
        let gv = &homs[cd * n + ce][gi];
        let h: Vec<usize> =
            (0..fv.len()).map(|k| b.apply2(c.comp(ca, cd, ce), c.hom(cd, ce), c.hom(ca, cd), gv[k], fv[k])).collect();
        let hi = *hom_pos[ca * n + ce].get(&h)?;
        key.get(&(s, hi, t)).copied()
    })?;
    let arrow_labels = arrows.iter().map(|&(s, fi, t)| homs[labels[s].0 * n + labels[t].0][fi].clone()).collect();
    let projection = if *x == b.unit() { Some(project(c, &carrier, &labels, &arrows, &homs)?) } else { None };
    Ok(ElementsCategory { carrier, labels, arrow_labels, projection })
}

fn project(
    c: &VCategory,
    carrier: &FinCategory,
    labels: &[(usize, Vec<usize>)],
    arrows: &[(usize, usize, usize)],
    homs: &[Vec<Vec<usize>>],
) -> Result<OrdFunctor, ElementsError> {
    let n = c.num_objects();
    let (c0, l0) = c.underlying_category()?;
    let index: HashMap<(usize, usize, usize), usize> = l0.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let obj_map = labels.iter().map(|l| l.0).collect();
    let arrow_map = arrows
        .iter()
        .map(|&(s, fi, t)| {
            let (a, d) = (labels[s].0, labels[t].0);
            index[&(a, d, homs[a * n + d][fi][0])]
        })
        .collect();
    Ok(OrdFunctor::new(Arc::new(carrier.clone()), Arc::new(c0), obj_map, arrow_map)?)
}

/// `J_X: El(M_1) -> El(M_X)`, precomposition with `X -> 1`.
pub fn j_functor(m: &Weight, x: &BaseObject) -> Result<OrdFunctor, ElementsError> {
    let b = m.base();
    if !b.is_cartesian() {
        return Err(ElementsError::NotCartesian);
    }
    let one = elements_of(m, &b.unit())?;
    let ex = elements_of(m, x)?;
    let width = x.cells();
    let obj_index: HashMap<&(usize, Vec<usize>), usize> = ex.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let obj_map: Vec<usize> = one.labels.iter().map(|(c, p)| obj_index[&(*c, vec![p[0]; width])]).collect();
    let mut arrow_index = HashMap::new();
    for a in 0..ex.carrier.num_arrows() {
        arrow_index.insert((ex.carrier.src(a), &ex.arrow_labels[a], ex.carrier.tgt(a)), a);
    }
    let arrow_map = (0..one.carrier.num_arrows())
        .map(|a| {
            let code = vec![one.arrow_labels[a][0]; width];
            arrow_index[&(obj_map[one.carrier.src(a)], &code, obj_map[one.carrier.tgt(a)])]
        })
        .collect();
    Ok(OrdFunctor::new(Arc::new(one.carrier), Arc::new(ex.carrier), obj_map, arrow_map)?)
}

/// `El(M_U)` for a weight over `G`-sets: elements and arrows are read in
/// the underlying sets, so this is the category of elements of the
/// forgotten weight over `U_*C`, projected onto the ordinary carrier of
/// `U_*C`.
pub fn gset_elements(m: &Weight) -> Result<ElementsCategory, ElementsError> {
    if !matches!(m.base().kind(), BaseKind::FinGSet(_)) {
        return Err(ElementsError::WrongBase("El(M_U) needs a G-set base".into()));
    }
    let (forgotten, _) = m.domain.change_of_base()?;
    let mu = m.forget(&Arc::new(forgotten))?;
    elements_of(&mu, &mu.base().unit())
}

/// A vertical arrow between two objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertical {
    pub src: usize,
    pub tgt: usize,
}

/// Top and bottom horizontal edges of a cell.  The left and right edges
/// are the source and target of the cell in `H_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBoundary {
    pub top: usize,
    pub bottom: usize,
}

/// A finite double category presented by its horizontal category `H`, its
/// vertical arrows, and the category `H_1` whose objects are vertical
/// arrows and whose arrows are cells under horizontal composition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCategory {
    pub horizontal: FinCategory,
    pub verticals: Vec<Vertical>,
    pub vertical_identity: Vec<usize>,
    /// `[first, second, composite]`: `second` stacked below `first`.
    pub vertical_composition: Vec<[usize; 3]>,
    pub cells: FinCategory,
    pub boundary: Vec<CellBoundary>,
    /// Identity cell of each horizontal arrow.
    pub cell_identity: Vec<usize>,
    /// `[upper, lower, composite]` for vertically composable cells.
    pub cell_vertical_composition: Vec<[usize; 3]>,
}

impl DoubleCategory {
    /// `H(D)`.
    pub fn h(&self) -> &FinCategory {
        &self.horizontal
    }

    /// `H_1(D)`.
    pub fn h1(&self) -> &FinCategory {
        &self.cells
    }

    /// `1_H: H(D) -> H_1(D)`.
    pub fn one_h(&self) -> Result<OrdFunctor, ElementsError> {
        Ok(OrdFunctor::new(
            Arc::new(self.horizontal.clone()),
            Arc::new(self.cells.clone()),
            self.vertical_identity.clone(),
            self.cell_identity.clone(),
        )?)
    }

    pub fn left(&self, cell: usize) -> usize {
        self.cells.src(cell)
    }

    pub fn right(&self, cell: usize) -> usize {
        self.cells.tgt(cell)
    }

    /// Check boundaries, identities and interchange.
    pub fn validate(&self) -> Result<(), ElementsError> {
        let bad = |s: String| Err(ElementsError::Malformed(s));
        let h = &self.horizontal;
        let no = h.num_objects();
        if self.cells.num_objects() != self.verticals.len() {
            return bad("H_1 must have one object per vertical arrow".into());
        }
        if self.boundary.len() != self.cells.num_arrows() || self.vertical_identity.len() != no {
            return bad("table lengths do not match".into());
        }
        for v in &self.verticals {
            if v.src >= no || v.tgt >= no {
                return bad("vertical arrow endpoint out of range".into());
            }
        }
        for (o, &v) in self.vertical_identity.iter().enumerate() {
            if v >= self.verticals.len() || self.verticals[v] != (Vertical { src: o, tgt: o }) {
                return bad(format!("vertical identity of object {o}"));
            }
        }
        for (a, bd) in self.boundary.iter().enumerate() {
            let (l, r) = (self.verticals[self.left(a)], self.verticals[self.right(a)]);
            if bd.top >= h.num_arrows() || bd.bottom >= h.num_arrows() {
                return bad(format!("cell {a} boundary out of range"));
            }
            if (h.src(bd.top), h.tgt(bd.top)) != (l.src, r.src)
                || (h.src(bd.bottom), h.tgt(bd.bottom)) != (l.tgt, r.tgt)
            {
                return bad(format!("cell {a} has inconsistent corners"));
            }
        }
        for f in 0..self.cells.num_arrows() {
            for &g in self.cells.out_arrows(self.right(f)) {
                let gf = self.cells.compose(g, f);
                let (bf, bg, bgf) = (self.boundary[f], self.boundary[g], self.boundary[gf]);
                if bgf.top != h.compose(bg.top, bf.top) || bgf.bottom != h.compose(bg.bottom, bf.bottom) {
                    return bad(format!("horizontal composite of cells {g} and {f} has the wrong edges"));
                }
            }
        }
        self.one_h()?;
        for (f, &e) in self.cell_identity.iter().enumerate() {
            if self.boundary[e] != (CellBoundary { top: f, bottom: f }) {
                return bad(format!("identity cell of {f}"));
            }
        }
        let vc: HashMap<(usize, usize), usize> =
            self.vertical_composition.iter().map(|&[a, b, c]| ((a, b), c)).collect();
        let cc: HashMap<(usize, usize), usize> =
            self.cell_vertical_composition.iter().map(|&[a, b, c]| ((a, b), c)).collect();
        for &[u, l, c] in &self.cell_vertical_composition {
            if self.boundary[u].bottom != self.boundary[l].top
                || self.boundary[c].top != self.boundary[u].top
                || self.boundary[c].bottom != self.boundary[l].bottom
                || vc.get(&(self.left(u), self.left(l))) != Some(&self.left(c))
                || vc.get(&(self.right(u), self.right(l))) != Some(&self.right(c))
            {
                return bad(format!("vertical composite of cells {u} and {l}"));
            }
        }
        // Interchange on every 2×2 block.
        for &[a, g, ag] in &self.cell_vertical_composition {
            for &b in self.cells.out_arrows(self.right(a)) {
                for &d in self.cells.out_arrows(self.right(g)) {
                    let Some(&bd) = cc.get(&(b, d)) else { continue };
                    let lhs = cc.get(&(self.cells.compose(b, a), self.cells.compose(d, g)));
                    let rhs = self.cells.compose(bd, ag);
                    if lhs != Some(&rhs) {
                        return bad(format!("interchange fails at cells {a}, {b}, {g}, {d}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cells with left edge `v` and a vertical identity on the right.
    fn cells_to_identity(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.cells.out_arrows(v).iter().copied().filter(|&a| {
            let r = self.verticals[self.right(a)];
            r.src == r.tgt && self.vertical_identity[r.src] == self.right(a)
        })
    }

    fn equalized(&self, alpha: usize, beta: usize) -> bool {
        let o = self.verticals[self.right(alpha)].src;
        self.horizontal.out_arrows(o).iter().any(|&h| {
            let e = self.cell_identity[h];
            self.cells.compose(e, alpha) == self.cells.compose(e, beta)
        })
    }

    fn clause_two_failure(&self) -> Option<Certificate> {
        (0..self.verticals.len())
            .find(|&v| self.cells_to_identity(v).next().is_none())
            .map(|v| Certificate::NoCellForVertical { object: self.verticals[v].src, vertical: v })
    }

    fn clause_three_failure(&self) -> Option<Certificate> {
        for v in 0..self.verticals.len() {
            let cs: Vec<usize> = self.cells_to_identity(v).collect();
            for (i, &a) in cs.iter().enumerate() {
                for &b in &cs[i + 1..] {
                    if self.right(a) == self.right(b) && self.boundary[a] == self.boundary[b] && !self.equalized(a, b) {
                        return Some(Certificate::CellsNotEqualized { alpha: a, beta: b });
                    }
                }
            }
        }
        None
    }

    /// The three clauses of filteredness for a double category.
    pub fn is_filtered(&self) -> Verdict {
        let h = self.horizontal.is_filtered();
        if !h.is_yes() {
            return h;
        }
        if let Some(c) = self.clause_two_failure().or_else(|| self.clause_three_failure()) {
            return Verdict::no(c);
        }
        Verdict::yes(Certificate::Checked { items: self.verticals.len() })
    }

    /// Replay a verdict of [`DoubleCategory::is_filtered`].
    pub fn check_filtered_certificate(&self, v: &Verdict) -> bool {
        match &v.certificate {
            Certificate::NoCellForVertical { object, vertical } => {
                v.is_no()
                    && *vertical < self.verticals.len()
                    && self.verticals[*vertical].src == *object
                    && self.cells_to_identity(*vertical).next().is_none()
            }
            Certificate::CellsNotEqualized { alpha, beta } => {
                let n = self.cells.num_arrows();
                v.is_no()
                    && *alpha < n
                    && *beta < n
                    && self.left(*alpha) == self.left(*beta)
                    && self.right(*alpha) == self.right(*beta)
                    && self.boundary[*alpha] == self.boundary[*beta]
                    && self.cells_to_identity(self.left(*alpha)).any(|a| a == *alpha)
                    && !self.equalized(*alpha, *beta)
            }
            _ if v.is_yes() => self.is_filtered().is_yes(),
            _ => self.horizontal.check_filtered_certificate(v),
        }
    }
}

/// Free-function form of [`DoubleCategory::is_filtered`].
pub fn is_filtered_double(d: &DoubleCategory) -> Verdict {
    d.is_filtered()
}

/// The double category of elements of a weight over `FinCat`.
pub fn double_elements(m: &Weight) -> Result<DoubleCategory, ElementsError> {
    let b = m.base();
    if !matches!(b.kind(), BaseKind::FinCat) {
        return Err(ElementsError::WrongBase("the double category of elements needs the FinCat base".into()));
    }
    let c = &m.domain;
    let n = c.num_objects();
    let el = elements_of(m, &b.unit())?;
    let horizontal = el.carrier.clone();
    let obj_index: HashMap<(usize, usize), usize> =
        el.labels.iter().enumerate().map(|(i, (a, x))| ((*a, x[0]), i)).collect();
    let mut arrow_index = HashMap::new();
    for a in 0..horizontal.num_arrows() {
        arrow_index.insert((horizontal.src(a), el.arrow_labels[a][0], horizontal.tgt(a)), a);
    }
    let mcat: Vec<&FinCategory> = m.values().iter().map(|v| &**v.as_category().expect("FinCat values")).collect();
    let hcat = |a: usize, d: usize| -> &FinCategory { c.hom(a, d).as_category().expect("FinCat homs") };

    // Vertical arrows: every arrow of every M(c).
    let mut verticals = Vec::new();
    let mut vlabels = Vec::new();
    let mut vindex = HashMap::new();
    for a in 0..n {
        for xi in 0..mcat[a].num_arrows() {
            let s = obj_index[&(a, mcat[a].identity(mcat[a].src(xi)))];
            let t = obj_index[&(a, mcat[a].identity(mcat[a].tgt(xi)))];
            vindex.insert((a, xi), verticals.len());
            vlabels.push((a, xi));
            verticals.push(Vertical { src: s, tgt: t });
        }
    }
    let vertical_identity: Vec<usize> = el.labels.iter().map(|(a, x)| vindex[&(*a, x[0])]).collect();
    let mut vertical_composition = Vec::new();
    for a in 0..n {
        let k = mcat[a];
        for xi in 0..k.num_arrows() {
            for &zeta in k.out_arrows(k.tgt(xi)) {
                vertical_composition.push([vindex[&(a, xi)], vindex[&(a, zeta)], vindex[&(a, k.compose(zeta, xi))]]);
            }
        }
    }

    // Cells: a 2-cell alpha of C(a, d) and a vertical mu of M(d); the left
    // edge is M(alpha)(mu).
    let act_cell = |a: usize, d: usize, alpha: usize, mu: usize| -> usize {
        m.act(a, d).cells()[alpha * mcat[d].num_arrows() + mu]
    };
    let mut cells: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut cindex = HashMap::new();
    let mut boundary = Vec::new();
    for a in 0..n {
        for d in 0..n {
            let hk = hcat(a, d);
            for alpha in 0..hk.num_arrows() {
                let (f, g) = (hk.identity(hk.src(alpha)), hk.identity(hk.tgt(alpha)));
                for mu in 0..mcat[d].num_arrows() {
                    let xi = act_cell(a, d, alpha, mu);
                    let (l, r) = (verticals[vindex[&(a, xi)]], verticals[vindex[&(d, mu)]]);
                    let top = arrow_index[&(l.src, f, r.src)];
                    let bottom = arrow_index[&(l.tgt, g, r.tgt)];
                    cindex.insert((a, d, alpha, mu), cells.len());
                    cells.push((a, d, alpha, mu));
                    boundary.push(CellBoundary { top, bottom });
                }
            }
        }
    }
    let src: Vec<usize> = cells.iter().map(|&(a, d, alpha, mu)| vindex[&(a, act_cell(a, d, alpha, mu))]).collect();
    let tgt: Vec<usize> = cells.iter().map(|&(_, d, _, mu)| vindex[&(d, mu)]).collect();
    let ident: Vec<usize> = vlabels.iter().map(|&(a, xi)| cindex[&(a, a, c.ident(a).cells()[0], xi)]).collect();
    let cells_cat = FinCategory::from_fn(verticals.len(), src, tgt, ident, |g, f| {
        let (a, d, alpha, _) = cells[f];
        let (_, e, beta, nu) = cells[g];
        let hk = hcat(a, d);
        let composite = c.comp(a, d, e).cells()[beta * hk.num_arrows() + alpha];
        cindex.get(&(a, e, composite, nu)).copied()
    })?;
    let cell_identity: Vec<usize> = (0..horizontal.num_arrows())
        .map(|f| {
            let (a, d) = (el.labels[horizontal.src(f)].0, el.labels[horizontal.tgt(f)].0);
            let y = el.labels[horizontal.tgt(f)].1[0];
            cindex[&(a, d, el.arrow_labels[f][0], y)]
        })
        .collect();
    let mut cell_vertical_composition = Vec::new();
    for (i, &(a, d, alpha, mu)) in cells.iter().enumerate() {
        let hk = hcat(a, d);
        let md = mcat[d];
        for &alpha2 in hk.out_arrows(hk.tgt(alpha)) {
            for &mu2 in md.out_arrows(md.tgt(mu)) {
                let j = cindex[&(a, d, alpha2, mu2)];
                let k = cindex[&(a, d, hk.compose(alpha2, alpha), md.compose(mu2, mu))];
                cell_vertical_composition.push([i, j, k]);
            }
        }
    }
    Ok(DoubleCategory {
        horizontal,
        verticals,
        vertical_identity,
        vertical_composition,
        cells: cells_cat,
        boundary,
        cell_identity,
        cell_vertical_composition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{Base, Group};

    fn free_set(k: &FinCategory) -> Arc<VCategory> {
        Arc::new(VCategory::free(&Base::fin_set(), k).unwrap())
    }

    #[test]
    fn unit_representable_has_one_element() {
        for b in [Base::fin_set(), Base::fin_cat(), Base::fin_vec(2).unwrap(), Base::fin_gset(Group::cyclic(2))] {
            let u = Arc::new(VCategory::unit(&b));
            let m = Weight::yoneda(&u, 0);
            let e = elements_of(&m, &b.unit()).unwrap();
            if matches!(b.kind(), BaseKind::FinVec(_)) {
                // Every vector of F_2 is a point, and the unit acts by scalars.
                assert_eq!(e.carrier.num_objects(), 2);
                // f·y = x: two loops at 0, one arrow 0 -> 1, the identity at 1.
                assert_eq!(e.carrier.num_arrows(), 4);
                continue;
            }
            assert_eq!(e.carrier.num_objects(), 1, "{:?}", b.kind());
            assert_eq!(e.carrier.num_arrows(), 1);
        }
    }

    #[test]
    fn coproduct_of_representables_has_two_components() {
        let c = free_set(&FinCategory::discrete(2));
        let y0 = Weight::yoneda(&c, 0);
        let y1 = Weight::yoneda(&c, 1);
        // Pointwise coproduct: M(a) = C(a,0) + C(a,1).
        let vals: Vec<BaseObject> =
            (0..2).map(|a| BaseObject::set(y0.value(a).cells() + y1.value(a).cells())).collect();
        let mut act = Vec::new();
        for a in 0..2 {
            for d in 0..2 {
                let h = c.hom(a, d).cells();
                let (s0, s1) = (y0.value(d).cells(), y1.value(d).cells());
                let off = y0.value(a).cells();
                let mut cells = Vec::new();
                for f in 0..h {
                    for e in 0..s0 + s1 {
                        cells.push(if e < s0 {
                            y0.act(a, d).cells()[f * s0 + e]
                        } else {
                            off + y1.act(a, d).cells()[f * s1 + e - s0]
                        });
                    }
                }
                act.push(MorphismData::Cells(cells));
            }
        }
        let m = Weight::new(c, vals, act).unwrap();
        let e = elements_of(&m, &BaseObject::set(1)).unwrap();
        assert_eq!(e.carrier.num_objects(), 2);
        assert_eq!(e.carrier.components().iter().max().unwrap() + 1, 2);
        assert!(e.check_labels(&m));
        assert!(e.projection.unwrap().validate().is_ok());
    }

    #[test]
    fn j_functor_at_unit_is_identity() {
        let c = free_set(&FinCategory::arrow());
        let m = Weight::yoneda(&c, 1);
        let j = j_functor(&m, &BaseObject::set(1)).unwrap();
        assert_eq!(j.obj_map, (0..j.src.num_objects()).collect::<Vec<_>>());
        assert_eq!(j.arrow_map, (0..j.src.num_arrows()).collect::<Vec<_>>());
    }

    #[test]
    fn stage_two_elements_of_representable() {
        // C(-, 1) on 0 -> 1, at stage X = 2: maps 2 -> C(c, 1).
        let c = free_set(&FinCategory::arrow());
        let m = Weight::yoneda(&c, 1);
        let e = elements_of(&m, &BaseObject::set(2)).unwrap();
        // C(0,1) and C(1,1) are singletons, so one map each.
        assert_eq!(e.carrier.num_objects(), 2);
        assert!(e.check_labels(&m));
        assert!(e.carrier.is_filtered().is_yes());
        assert!(j_functor(&m, &BaseObject::set(2)).unwrap().is_final().is_yes());
    }

    #[test]
    fn non_cartesian_stage_is_rejected() {
        let b = Base::fin_vec(2).unwrap();
        let u = Arc::new(VCategory::unit(&b));
        let m = Weight::yoneda(&u, 0);
        assert_eq!(elements_of(&m, &BaseObject::vect(2)), Err(ElementsError::NotCartesian));
        assert!(j_functor(&m, &BaseObject::vect(1)).is_err());
    }

    #[test]
    fn gset_elements_trivial_group_matches_unit_stage() {
        let b = Base::fin_gset(Group::cyclic(1));
        let c = Arc::new(VCategory::free(&b, &FinCategory::arrow()).unwrap());
        let m = Weight::yoneda(&c, 1);
        let u = gset_elements(&m).unwrap();
        let e = elements_of(&m, &b.unit()).unwrap();
        assert_eq!(u.carrier, e.carrier);
        assert_eq!(u.labels, e.labels);
    }

    fn terminal_cat_weight(c: &Arc<VCategory>) -> Weight {
        Weight::terminal(c).unwrap()
    }

    #[test]
    fn double_elements_of_terminal_is_domain() {
        let b = Base::fin_cat();
        let c = Arc::new(VCategory::free(&b, &FinCategory::chain(3)).unwrap());
        let m = terminal_cat_weight(&c);
        let d = double_elements(&m).unwrap();
        d.validate().unwrap();
        assert_eq!(d.horizontal.num_objects(), 3);
        assert_eq!(d.horizontal.num_arrows(), 6);
        assert_eq!(d.verticals.len(), 3);
        assert!(d.is_filtered().is_yes());
        assert_eq!(&d.horizontal, &elements_of(&m, &b.unit()).unwrap().carrier);
    }

    /// The one-object 2-category with hom category 𝟚 = {0 -> 1}, made a
    /// monoidal category by `max` on objects.
    fn two_monoid() -> Arc<VCategory> {
        let b = Base::fin_cat();
        let two = FinCategory::arrow();
        let hom = BaseObject::cat(two.clone());
        // Arrows of 𝟚 × 𝟚 are pairs (g, f) at g·3 + f; max on arrows.
        let arrow_max = |g: usize, f: usize| -> usize {
            // id0 = 0, id1 = 1, u = 2 (0 -> 1).
            let (gs, gt) = (two.src(g), two.tgt(g));
            let (fs, ft) = (two.src(f), two.tgt(f));
            let (s, t) = (gs.max(fs), gt.max(ft));
            if s == t {
                two.identity(s)
            } else {
                2
            }
        };
        let comp: Vec<usize> = (0..9).map(|k| arrow_max(k / 3, k % 3)).collect();
        Arc::new(
            VCategory::new(b, 1, vec![hom], vec![MorphismData::Cells(comp)], vec![MorphismData::Cells(vec![0])])
                .unwrap(),
        )
    }

    #[test]
    fn double_elements_of_representable_on_two() {
        let c = two_monoid();
        let m = Weight::yoneda(&c, 0);
        let d = double_elements(&m).unwrap();
        d.validate().unwrap();
        assert_eq!(d.horizontal.num_objects(), 2);
        let non_identity = d.verticals.iter().filter(|v| v.src != v.tgt).count();
        assert_eq!(non_identity, 1);
        // Cells: 3 two-cells times 3 verticals of M(*) = 𝟚.
        assert_eq!(d.cells.num_arrows(), 9);
        // H_1 agrees with the stage-𝟚 elements in size.
        let e2 = elements_of(&m, &BaseObject::cat(FinCategory::arrow())).unwrap();
        assert_eq!(e2.carrier.num_objects(), d.cells.num_objects());
        assert_eq!(e2.carrier.num_arrows(), d.cells.num_arrows());
        let v = d.is_filtered();
        assert!(v.is_yes());
        assert!(d.one_h().unwrap().is_final().is_yes());
        let j = j_functor(&m, &BaseObject::cat(FinCategory::arrow())).unwrap();
        assert!(j.is_final().is_yes());
    }

    #[test]
    fn vertical_without_cell_is_reported() {
        // Unit 2-category, M(*) = the idempotent monoid {1, e}.
        let b = Base::fin_cat();
        let c = Arc::new(VCategory::unit(&b));
        let k = FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap();
        let m = Weight::constant(&c, &BaseObject::cat(k)).unwrap();
        let d = double_elements(&m).unwrap();
        d.validate().unwrap();
        let v = d.is_filtered();
        assert!(matches!(v.certificate, Certificate::NoCellForVertical { .. }), "{v:?}");
        assert!(d.check_filtered_certificate(&v));
        assert!(d.one_h().unwrap().is_final().is_no());
    }
}
