//! The brute-force flatness oracle: `M ∗ -` is applied to finite limits
//! of covariant representables and the comparison map into the limit of
//! the values is tested for invertibility.

use std::collections::HashMap;
use std::sync::Arc;

use crate::base::{BaseKind, BaseObject, Diagram, MorphismData};
use crate::colim::{
    coend_map_right, corepresentable, pointwise_limit, power, weighted_colimit, yoneda_map, Coend, ColimError,
    WeightDiagram,
};
use crate::enriched::{VCategory, VNatTrans, Weight};
use crate::ordcat::FinCategory;
use crate::verdict::{Certificate, Verdict};

use super::linear;
use super::FlatnessError;

/// Largest number of subfunctors of one representable the linear tests
/// will enumerate.
const SUBFUNCTOR_LIMIT: usize = 4096;

/// A vertex of a test diagram: a covariant representable or a power of one.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Vertex {
    Rep(usize),
    Power { generator: usize, c: usize },
}

struct Oracle<'a> {
    m: &'a Weight,
    cop: Arc<VCategory>,
    cache: HashMap<Vertex, (Weight, Coend)>,
    checked: usize,
}

fn parallel_shape() -> Arc<FinCategory> {
    let b = crate::base::Base::fin_set();
    let x = BaseObject::set(0);
    Diagram::parallel_pair(&b, x.clone(), x, MorphismData::Cells(vec![]), MorphismData::Cells(vec![])).shape
}

impl<'a> Oracle<'a> {
    fn vertex(&mut self, v: Vertex) -> Result<(Weight, Coend), ColimError> {
        if let Some(hit) = self.cache.get(&v) {
            return Ok(hit.clone());
        }
        let w = match v {
            Vertex::Rep(c) => corepresentable(&self.cop, c),
            Vertex::Power { generator, c } => {
                power(&self.m.base().generator()[generator], &corepresentable(&self.cop, c))?
            }
        };
        let e = weighted_colimit(self.m, &w)?;
        self.cache.insert(v, (w.clone(), e.clone()));
        Ok((w, e))
    }

    /// Compare `M ∗ lim D` with `lim (M ∗ D)` for a diagram of vertices.
    fn conical(
        &mut self,
        name: String,
        shape: Arc<FinCategory>,
        vertices: &[Vertex],
        arrows: Vec<VNatTrans>,
    ) -> Result<Option<Verdict>, ColimError> {
        self.checked += 1;
        let b = self.m.base().clone();
        let mut weights = Vec::with_capacity(vertices.len());
        let mut coends = Vec::with_capacity(vertices.len());
        for &v in vertices {
            let (w, e) = self.vertex(v)?;
            weights.push(w);
            coends.push(e);
        }
        let d = WeightDiagram { shape: shape.clone(), weights, arrows };
        let lim = pointwise_limit(&d)?;
        let el = weighted_colimit(self.m, &lim.apex)?;
        let objects = coends.iter().map(|e| e.value().clone()).collect();
        let maps = (0..shape.num_arrows())
            .map(|f| {
                let (s, t) = (shape.src(f), shape.tgt(f));
                coend_map_right(self.m, &coends[s], &coends[t], &d.weights[s], &d.weights[t], &d.arrows[f])
            })
            .collect();
        let values = Diagram::new(&b, shape, objects, maps)?;
        let cone = b.limit(&values)?;
        let legs: Vec<MorphismData> = (0..vertices.len())
            .map(|v| coend_map_right(self.m, &el, &coends[v], &lim.apex, &d.weights[v], &lim.legs[v]))
            .collect();
        let cmp = b.factor_through_limit(&cone, el.value(), &legs);
        Ok(self.judge(name, &cmp, el.value(), &cone.apex))
    }

    fn judge(&self, name: String, cmp: &MorphismData, x: &BaseObject, y: &BaseObject) -> Option<Verdict> {
        if self.m.base().is_iso(cmp, x, y) {
            None
        } else {
            Some(Verdict::no(Certificate::LimitNotPreserved {
                diagram: name,
                detail: format!("comparison {} -> {} cells is not invertible", x.cells(), y.cells()),
            }))
        }
    }

    fn empty_product(&mut self) -> Result<Option<Verdict>, ColimError> {
        self.checked += 1;
        let b = self.m.base().clone();
        let t = match b.kind() {
            BaseKind::FinVec(_) => Weight::initial(&self.cop),
            _ => Weight::terminal(&self.cop)?,
        };
        let e = weighted_colimit(self.m, &t)?;
        let cone = b.limit(&Diagram::discrete(&b, vec![]))?;
        let cmp = b.factor_through_limit(&cone, e.value(), &[]);
        Ok(self.judge("empty product".into(), &cmp, e.value(), &cone.apex))
    }

    fn products(&mut self, bound: usize) -> Result<Option<Verdict>, ColimError> {
        let n = self.cop.num_objects();
        let mut layer: Vec<Vec<usize>> = (0..n).map(|c| vec![c]).collect();
        for k in 2..=bound {
            let mut next = Vec::new();
            for t in &layer {
                for c in *t.last().expect("nonempty tuple")..n {
                    let mut u = t.clone();
                    u.push(c);
                    next.push(u);
                }
            }
            for t in &next {
                let shape = Arc::new(FinCategory::discrete(k));
                let vertices: Vec<Vertex> = t.iter().map(|&c| Vertex::Rep(c)).collect();
                let arrows = vertices.iter().map(|&v| Ok(VNatTrans::identity(&self.vertex(v)?.0))).collect::<Result<
                    _,
                    ColimError,
                >>(
                )?;
                if let Some(v) =
                    self.conical(format!("product of representables at {t:?}"), shape, &vertices, arrows)?
                {
                    return Ok(Some(v));
                }
            }
            layer = next;
        }
        Ok(None)
    }

    fn parallel(
        &mut self,
        name: String,
        from: Vertex,
        to: Vertex,
        f: VNatTrans,
        g: VNatTrans,
    ) -> Result<Option<Verdict>, ColimError> {
        let shape = parallel_shape();
        let (wf, _) = self.vertex(from)?;
        let (wt, _) = self.vertex(to)?;
        let mut arrows = vec![VNatTrans { components: vec![] }; 4];
        arrows[shape.identity(0)] = VNatTrans::identity(&wf);
        arrows[shape.identity(1)] = VNatTrans::identity(&wt);
        let gens: Vec<usize> = (0..4).filter(|&a| !shape.is_identity(a)).collect();
        arrows[gens[0]] = f;
        arrows[gens[1]] = g;
        self.conical(name, shape, &[from, to], arrows)
    }

    /// Equalizers of `C(b, -) ⇉ C(a, -)` induced by pairs of points of
    /// `C(a, b)`.
    fn equalizers(&mut self) -> Result<Option<Verdict>, ColimError> {
        let n = self.cop.num_objects();
        let b = self.m.base().clone();
        for a in 0..n {
            for d in 0..n {
                let pts = b.points(self.cop.hom(d, a))?;
                for (i, &u) in pts.iter().enumerate() {
                    for &v in &pts[i + 1..] {
                        let tu = yoneda_map(&self.cop, d, a, u);
                        let tv = yoneda_map(&self.cop, d, a, v);
                        let name = format!("equalizer of points {u}, {v} of C({a}, {d})");
                        if let Some(x) = self.parallel(name, Vertex::Rep(d), Vertex::Rep(a), tu, tv)? {
                            return Ok(Some(x));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// `M ∗ [X, C(c, -)] -> [X, M ∗ C(c, -)]` for each generator `X`.
    fn powers(&mut self) -> Result<Option<Verdict>, ColimError> {
        let b = self.m.base().clone();
        let n = self.cop.num_objects();
        for (gi, x) in b.generator().iter().enumerate() {
            if *x == b.unit() {
                continue;
            }
            for c in 0..n {
                self.checked += 1;
                let (pw, ep) = self.vertex(Vertex::Power { generator: gi, c })?;
                let (rw, er) = self.vertex(Vertex::Rep(c))?;
                let target = b.internal_hom(x, er.value())?;
                let family = (0..n)
                    .map(|y| {
                        let mp = b.tensor(self.m.value(y), pw.value(y))?;
                        let px = b.tensor(pw.value(y), x)?;
                        let ev = b.tensor_mor(&b.identity(self.m.value(y)), &b.eval(x, rw.value(y))?, &px, rw.value(y));
                        Ok(b.transpose(&mp, x, er.value(), &b.compose(er.leg(y), &ev))?)
                    })
                    .collect::<Result<Vec<_>, ColimError>>()?;
                let cmp = ep.factor(&b, &target, &family);
                if let Some(v) = self.judge(format!("power of C({c}, -) by generator {gi}"), &cmp, ep.value(), &target)
                {
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }

    /// The `N_X` limits: equalizers of `C(d, -) ⇉ [X, C(c, -)]` induced by
    /// pairs `g1, g2: X -> C(c, d)`.
    fn generalized_equalizers(&mut self) -> Result<Option<Verdict>, ColimError> {
        let b = self.m.base().clone();
        let n = self.cop.num_objects();
        let dom = self.m.domain.clone();
        let c_hom = |x: usize, y: usize| dom.hom(x, y).clone();
        for (gi, x) in b.generator().iter().enumerate() {
            if *x == b.unit() {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    let maps = b.hom_set(x, &c_hom(c, d))?;
                    let (pw, _) = self.vertex(Vertex::Power { generator: gi, c })?;
                    let transposed = |g: &MorphismData| -> Result<VNatTrans, ColimError> {
                        let components = (0..n)
                            .map(|y| {
                                let (hdy, hcd, hcy) = (c_hom(d, y), c_hom(c, d), c_hom(c, y));
                                let f = b.compose(dom.comp(c, d, y), &b.tensor_mor(&b.identity(&hdy), g, x, &hcd));
                                let t = b.transpose(&hdy, x, &hcy, &f)?;
                                debug_assert_eq!(pw.value(y), &b.internal_hom(x, &hcy)?);
                                Ok(t)
                            })
                            .collect::<Result<_, ColimError>>()?;
                        Ok(VNatTrans { components })
                    };
                    for (i, g1) in maps.iter().enumerate() {
                        for g2 in &maps[i + 1..] {
                            let name = format!("N_X equalizer for generator {gi} at C({c}, {d})");
                            let (t1, t2) = (transposed(g1)?, transposed(g2)?);
                            if let Some(v) =
                                self.parallel(name, Vertex::Rep(d), Vertex::Power { generator: gi, c }, t1, t2)?
                            {
                                return Ok(Some(v));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// `M ∗ S -> M ∗ C(a, -)` is injective for every subfunctor `S`.
    fn subfunctor_injections(&mut self) -> Result<Result<Option<Verdict>, Verdict>, ColimError> {
        let b = self.m.base().clone();
        let p = b.p();
        for a in 0..self.cop.num_objects() {
            let (r, er) = self.vertex(Vertex::Rep(a))?;
            let Some(subs) = linear::subfunctors(&r, SUBFUNCTOR_LIMIT) else {
                return Ok(Err(Verdict::unknown(
                    format!("subfunctors of C({a}, -)"),
                    SUBFUNCTOR_LIMIT,
                    SUBFUNCTOR_LIMIT + 1,
                )));
            };
            for s in &subs {
                self.checked += 1;
                let (sw, incl) = linear::subfunctor_weight(&r, s)?;
                let es = weighted_colimit(self.m, &sw)?;
                let f = coend_map_right(self.m, &es, &er, &sw, &r, &incl);
                if f.matrix().rank(p) != es.value().dim() {
                    let dims: Vec<usize> = s.bases.iter().map(|x| x.cols).collect();
                    return Ok(Ok(Some(Verdict::no(Certificate::LimitNotPreserved {
                        diagram: format!("subfunctor of C({a}, -) with dimensions {dims:?}"),
                        detail: "M ∗ S -> M ∗ C(a, -) is not injective".into(),
                    }))));
                }
            }
        }
        Ok(Ok(None))
    }
}

/// Run the oracle on a validated weight.  `bound` caps the arity of the
/// products tested.
pub(super) fn run(m: &Weight, bound: usize) -> Result<Verdict, FlatnessError> {
    let cop = Arc::new(m.domain.opposite());
    let mut o = Oracle { m, cop, cache: HashMap::new(), checked: 0 };
    let linear = matches!(m.base().kind(), BaseKind::FinVec(_));
    if let Some(v) = o.empty_product()? {
        return Ok(v.with_bound(bound));
    }
    let arity = if linear { bound.min(2) } else { bound };
    if let Some(v) = o.products(arity)? {
        return Ok(v.with_bound(bound));
    }
    if let Some(v) = o.equalizers()? {
        return Ok(v.with_bound(bound));
    }
    if let Some(v) = o.powers()? {
        return Ok(v.with_bound(bound));
    }
    if let Some(v) = o.generalized_equalizers()? {
        return Ok(v.with_bound(bound));
    }
    if linear {
        match o.subfunctor_injections()? {
            Ok(Some(v)) => return Ok(v.with_bound(bound)),
            Ok(None) => {}
            Err(unknown) => return Ok(unknown),
        }
    }
    if matches!(m.base().kind(), BaseKind::FinGSet(_)) {
        let (forgotten, _) = m.domain.change_of_base()?;
        let mu = m.forget(&Arc::new(forgotten))?;
        let v = run(&mu, bound)?;
        if !v.is_yes() {
            return Ok(v.staged("underlying weight"));
        }
        o.checked += 1;
    }
    Ok(Verdict::yes(Certificate::Checked { items: o.checked }).with_bound(bound))
}
