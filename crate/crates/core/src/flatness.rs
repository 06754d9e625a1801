//! Flatness of weights.
//!
//! [`is_flat`] dispatches on the base: categories of elements for the
//! cartesian bases, the double category of elements for `FinCat`, the
//! elements of the underlying weight for `G`-sets, and over `FinVec`
//! either the elements at the unit (domains with direct sums) or a section
//! of the canonical epimorphism from a sum of representables.
//! [`oracle_flat`] checks the defining property directly through the coend
//! formula and is used to cross-validate the deciders.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{BaseError, BaseKind, MorphismData};
use crate::colim::{self, matrix_completion, realize_presheaf, ColimError, PointwiseColimit};
use crate::elements::{double_elements, elements_of, gset_elements, j_functor, ElementsCategory, ElementsError};
use crate::enriched::{EnrichedError, VCategory, VNatTrans, Weight};
use crate::ordcat::CategoryError;
use crate::verdict::{Certificate, Outcome, Verdict};

pub mod linear;
mod oracle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlatnessError {
    #[error(transparent)]
    Colim(#[from] ColimError),
    #[error(transparent)]
    Elements(#[from] ElementsError),
    #[error(transparent)]
    Enriched(#[from] EnrichedError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl FlatnessError {
    /// The exhausted bound, when the error is a search ceiling.
    fn ceiling(&self) -> Option<Verdict> {
        fn base(e: &BaseError) -> Option<Verdict> {
            match e {
                BaseError::Ceiling { what, limit, needed } => Some(Verdict::unknown(what.clone(), *limit, *needed)),
                BaseError::Category(c) => cat(c),
                _ => None,
            }
        }
        fn cat(e: &CategoryError) -> Option<Verdict> {
            match e {
                CategoryError::EnumerationLimit { limit } => {
                    Some(Verdict::unknown("presentation enumeration", *limit, limit + 1))
                }
                _ => None,
            }
        }
        fn enriched(e: &EnrichedError) -> Option<Verdict> {
            match e {
                EnrichedError::Base(b) => base(b),
                EnrichedError::Category(c) => cat(c),
                _ => None,
            }
        }
        match self {
            FlatnessError::Base(b) => base(b),
            FlatnessError::Category(c) => cat(c),
            FlatnessError::Enriched(e) => enriched(e),
            FlatnessError::Colim(ColimError::Base(b)) => base(b),
            FlatnessError::Colim(ColimError::Category(c)) => cat(c),
            FlatnessError::Colim(ColimError::Enriched(e)) => enriched(e),
            FlatnessError::Elements(ElementsError::Base(b)) => base(b),
            FlatnessError::Elements(ElementsError::Category(c)) => cat(c),
            FlatnessError::Elements(ElementsError::Enriched(e)) => enriched(e),
            _ => None,
        }
    }
}

/// Turn search-ceiling errors into `Unknown`.
fn bounded<E: Into<FlatnessError>>(r: Result<Verdict, E>) -> Result<Verdict, FlatnessError> {
    match r.map_err(Into::into) {
        Ok(v) => Ok(v),
        Err(e) => e.ceiling().ok_or(e),
    }
}

/// One named sub-verdict of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    /// Whether the criterion enters the top-level conjunction.
    pub decisive: bool,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub outcome: Outcome,
    /// The characterization used to decide.
    pub method: String,
    pub criteria: Vec<Criterion>,
    pub certificate: Certificate,
    /// Search bound that limited the decision, if any.
    #[serde(default)]
    pub bound: Option<usize>,
}

impl FlatnessReport {
    fn assemble(method: &str, criteria: Vec<Criterion>, bound: Option<usize>) -> Self {
        let mut outcome = Outcome::Yes;
        for c in criteria.iter().filter(|c| c.decisive) {
            outcome = outcome.and(c.verdict.outcome);
        }
        let certificate = match outcome {
            Outcome::Yes => {
                Certificate::Report { parts: criteria.iter().map(|c| (c.name.clone(), c.verdict.outcome)).collect() }
            }
            _ => {
                let failing = criteria
                    .iter()
                    .filter(|c| c.decisive)
                    .find(|c| c.verdict.outcome == outcome)
                    .expect("a decisive criterion carries the outcome");
                Certificate::Stage { name: failing.name.clone(), detail: Box::new(failing.verdict.certificate.clone()) }
            }
        };
        FlatnessReport { outcome, method: method.into(), criteria, certificate, bound }
    }

    pub fn verdict(&self) -> Verdict {
        Verdict { outcome: self.outcome, certificate: self.certificate.clone(), bound: self.bound }
    }

    pub fn criterion(&self, name: &str) -> Option<&Verdict> {
        self.criteria.iter().find(|c| c.name == name).map(|c| &c.verdict)
    }
}

/// Knobs for [`is_flat_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatConfig {
    /// Product arity for the oracle.
    pub bound: usize,
    /// Also run the oracle and report agreement.
    pub oracle: bool,
    /// Over `FinVec`, also test the elements of the extension along the
    /// matrix completion with tuples of this length.
    pub completion: Option<usize>,
}

impl Default for FlatConfig {
    fn default() -> Self {
        FlatConfig { bound: 3, oracle: false, completion: None }
    }
}

pub const ELEMENTS_FILTERED: &str = "El(M_I) filtered";
pub const DOUBLE_FILTERED: &str = "double category of elements filtered";
pub const GSET_FILTERED: &str = "El(M_U) filtered";
pub const SPLITTING: &str = "canonical epimorphism splits";
pub const COMPLETION_FILTERED: &str = "El(M'_I) filtered after matrix completion";
pub const ORACLE: &str = "oracle agreement";

fn crit(name: impl Into<String>, decisive: bool, verdict: Verdict) -> Criterion {
    Criterion { name: name.into(), decisive, verdict }
}

pub fn j_final_name(i: usize) -> String {
    format!("J_X final for generator {i}")
}

/// Decide flatness with the default configuration.
pub fn is_flat(m: &Weight) -> Result<FlatnessReport, FlatnessError> {
    is_flat_with(m, &FlatConfig::default())
}

fn elements_filtered(m: &Weight) -> Result<Verdict, FlatnessError> {
    bounded(elements_of(m, &m.base().unit()).map(|el| el.carrier.is_filtered()))
}

fn j_criteria(m: &Weight) -> Result<Vec<Criterion>, FlatnessError> {
    let b = m.base();
    b.generator()
        .iter()
        .enumerate()
        .map(|(i, x)| Ok(crit(j_final_name(i), false, bounded(j_functor(m, x).map(|j| j.is_final()))?)))
        .collect()
}

pub fn is_flat_with(m: &Weight, config: &FlatConfig) -> Result<FlatnessReport, FlatnessError> {
    m.validate()?;
    let b = m.base();
    let mut criteria = Vec::new();
    let method = match b.kind() {
        BaseKind::FinSet => {
            criteria.push(crit(ELEMENTS_FILTERED, true, elements_filtered(m)?));
            criteria.extend(j_criteria(m)?);
            "elements at the unit"
        }
        BaseKind::FinCat => {
            let double = bounded(double_elements(m).map(|d| d.is_filtered()))?;
            criteria.push(crit(DOUBLE_FILTERED, true, double));
            criteria.push(crit(ELEMENTS_FILTERED, false, elements_filtered(m)?));
            criteria.extend(j_criteria(m)?);
            "double category of elements"
        }
        BaseKind::FinGSet(_) => {
            criteria.push(crit(GSET_FILTERED, true, bounded(gset_elements(m).map(|e| e.carrier.is_filtered()))?));
            criteria.push(crit(ELEMENTS_FILTERED, false, elements_filtered(m)?));
            "elements of the underlying weight"
        }
        BaseKind::FinVec(_) => {
            let sums = linear::has_direct_sums(&m.domain)?;
            criteria.push(crit(ELEMENTS_FILTERED, sums, elements_filtered(m)?));
            criteria.push(crit(SPLITTING, !sums, splitting_verdict(m)?));
            if let Some(k) = config.completion {
                criteria.push(crit(COMPLETION_FILTERED, false, completion_filtered(m, k)?));
            }
            if sums {
                "elements at the unit"
            } else {
                "section of a projective presentation"
            }
        }
    };
    let mut bound = None;
    if config.oracle {
        criteria.push(crit(ORACLE, false, oracle_flat(m, config.bound)?));
        bound = Some(config.bound);
    }
    Ok(FlatnessReport::assemble(method, criteria, bound))
}

/// Over `FinVec`: does the canonical map from the sum of representables on
/// a generating set admit a natural section?
fn splitting_verdict(m: &Weight) -> Result<Verdict, FlatnessError> {
    let search = linear::split_generating_epi(m)?;
    let objects = search.generators.iter().map(|(c, _)| *c).collect();
    let p = m.base().p();
    Ok(match search.section {
        Some(s) => Verdict::yes(Certificate::Splitting {
            objects,
            section: s.iter().map(|x| x.data.iter().map(|&v| v as usize).collect()).collect(),
            retraction: search.generators.iter().map(|(_, g)| vec![crate::linalg::encode_vector(g, p)]).collect(),
        }),
        None => Verdict::no(Certificate::Stage {
            name: "no natural section".into(),
            detail: Box::new(Certificate::Checked { items: search.generators.len() }),
        }),
    })
}

/// `El(M'_I)` filtered for the extension of `M` along the matrix
/// completion with tuples of length at most `k`.
pub fn completion_filtered(m: &Weight, k: usize) -> Result<Verdict, FlatnessError> {
    let mc = matrix_completion(&m.domain, k)?;
    let ext = linear::extend_to_completion(m, &mc)?;
    Ok(bounded(elements_of(&ext, &ext.base().unit()).map(|el| el.carrier.is_filtered()))?.with_bound(k))
}

/// Brute-force check that `M ∗ -` preserves the finite limits of
/// covariant representables: products of at most `bound` factors,
/// equalizers of pairs of points, powers by the generators and the
/// generalized equalizers `N_X`; over `FinVec` also every subfunctor of
/// a representable.
pub fn oracle_flat(m: &Weight, bound: usize) -> Result<Verdict, FlatnessError> {
    m.validate()?;
    match oracle::run(m, bound) {
        Ok(v) => Ok(v),
        Err(e) => e.ceiling().map(|v| v.with_bound(bound)).ok_or(e),
    }
}

/// The canonical decomposition of a flat weight as the colimit of
/// representables over its elements.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub elements: ElementsCategory,
    pub colimit: PointwiseColimit,
    /// The comparison from the colimit to `M`.
    pub comparison: VNatTrans,
    pub verdict: Verdict,
}

/// Realize the underlying presheaf of `M` and compare with `M`.
fn counit(m: &Weight) -> Result<(PointwiseColimit, VNatTrans), FlatnessError> {
    let b = m.base();
    let up = m.underlying_presheaf()?;
    let pc = realize_presheaf(&m.domain, &up)?;
    let (_, objs, _) = up.elements();
    let points: Vec<Vec<usize>> = m.values().iter().map(|v| b.points(v)).collect::<Result<_, _>>()?;
    let family: Vec<VNatTrans> = objs.iter().map(|&(c, x)| VNatTrans::from_yoneda_point(m, c, points[c][x])).collect();
    let eps = pc.factor(m, &family);
    Ok((pc, eps))
}

fn iso_verdict(m: &Weight, pc: &PointwiseColimit, eps: &VNatTrans) -> Verdict {
    let b = m.base();
    for x in 0..m.domain.num_objects() {
        if !b.is_iso(&eps.components[x], pc.apex.value(x), m.value(x)) {
            return Verdict::no(Certificate::NotIsomorphic {
                object: x,
                detail: format!("{} cells in the colimit, {} in M", pc.apex.value(x).cells(), m.value(x).cells()),
            });
        }
    }
    let components = eps
        .components
        .iter()
        .map(|f| match f {
            MorphismData::Cells(c) => c.clone(),
            MorphismData::Matrix(a) => a.data.iter().map(|&v| v as usize).collect(),
        })
        .collect();
    Verdict::yes(Certificate::Isomorphism { components })
}

/// Write a flat `M` as the colimit of representables over `El(M_I)` and
/// verify the comparison is invertible.  The verdict is `No` when the
/// elements are not filtered.
pub fn filtered_decomposition(m: &Weight) -> Result<Decomposition, FlatnessError> {
    m.validate()?;
    let b = m.base();
    let supported = match b.kind() {
        BaseKind::FinSet | BaseKind::FinCat => true,
        BaseKind::FinVec(_) => linear::has_direct_sums(&m.domain)?,
        BaseKind::FinGSet(_) => false,
    };
    if !supported {
        return Err(FlatnessError::Precondition(
            "the decomposition needs a cartesian base with weakly cocontinuous unit hom or a linear domain with direct sums"
                .into(),
        ));
    }
    let elements = elements_of(m, &b.unit())?;
    let filtered = elements.carrier.is_filtered();
    let (colimit, comparison) = counit(m)?;
    let verdict =
        if filtered.is_yes() { iso_verdict(m, &colimit, &comparison) } else { filtered.staged(ELEMENTS_FILTERED) };
    Ok(Decomposition { elements, colimit, comparison, verdict })
}

/// Is the counit `𝔉𝒰M -> M` invertible?
pub fn counit_iso_check(m: &Weight) -> Result<Verdict, FlatnessError> {
    m.validate()?;
    let (pc, eps) = counit(m)?;
    Ok(iso_verdict(m, &pc, &eps))
}

/// Is `M` a Cauchy (absolute) weight?  Over cartesian bases this searches
/// for a retraction of a representable onto `M`; over `FinVec` for a
/// section of a sum of representables, with at most `bound` summands.
pub fn is_cauchy_weight(m: &Weight, bound: usize) -> Result<Verdict, FlatnessError> {
    m.validate()?;
    if let BaseKind::FinVec(_) = m.base().kind() {
        let gens = linear::generating_set(m).len();
        if gens > bound {
            return Ok(Verdict::unknown("summands of a projective presentation", bound, gens));
        }
        return Ok(splitting_verdict(m)?.with_bound(bound));
    }
    bounded(retract_search(m))
}

/// Search `r: C(-, c) -> M` (a point of `M(c)`) and a natural section
/// `s: M -> C(-, c)` with `r ∘ s = 1`.
fn retract_search(m: &Weight) -> Result<Verdict, FlatnessError> {
    let b = m.base();
    let c = &m.domain;
    let n = c.num_objects();
    let mut tried = 0;
    for target in 0..n {
        let y = Weight::yoneda(c, target);
        for point in b.points(m.value(target))? {
            let r = VNatTrans::from_yoneda_point(m, target, point);
            let mut candidates = Vec::with_capacity(n);
            for a in 0..n {
                let cands: Vec<MorphismData> = b
                    .hom_set(m.value(a), y.value(a))?
                    .into_iter()
                    .filter(|s| b.compose(&r.components[a], s) == b.identity(m.value(a)))
                    .collect();
                tried += cands.len();
                candidates.push(cands);
            }
            if candidates.iter().any(|c| c.is_empty()) {
                continue;
            }
            let mut chosen: Vec<MorphismData> = Vec::with_capacity(n);
            if extend_section(m, &y, &candidates, &mut chosen) {
                return Ok(Verdict::yes(Certificate::Splitting {
                    objects: vec![target],
                    section: chosen.iter().map(|s| s.cells().to_vec()).collect(),
                    retraction: vec![vec![point]],
                }));
            }
        }
    }
    Ok(Verdict::no(Certificate::Stage {
        name: "no retraction of a representable".into(),
        detail: Box::new(Certificate::Checked { items: tried }),
    }))
}

fn natural_at(m: &Weight, y: &Weight, s: &[MorphismData], a: usize, d: usize) -> bool {
    let b = m.base();
    let h = m.domain.hom(a, d);
    let lhs = b.compose(&s[a], m.act(a, d));
    let rhs = b.compose(y.act(a, d), &b.tensor_mor(&b.identity(h), &s[d], m.value(d), y.value(d)));
    lhs == rhs
}

fn extend_section(m: &Weight, y: &Weight, candidates: &[Vec<MorphismData>], chosen: &mut Vec<MorphismData>) -> bool {
    let a = chosen.len();
    if a == candidates.len() {
        return true;
    }
    for s in &candidates[a] {
        chosen.push(s.clone());
        let ok = (0..=a).all(|d| natural_at(m, y, chosen, a, d) && natural_at(m, y, chosen, d, a));
        if ok && extend_section(m, y, candidates, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Left Kan extension of `M` along the inclusion of the full
/// subcategory on `objects`: `(Lan M)(e) = M ∗ D(e, J-)`.
pub fn extend_along_inclusion(m: &Weight, big: &Arc<VCategory>, objects: &[usize]) -> Result<Weight, FlatnessError> {
    let b = &big.base;
    let n = big.num_objects();
    let sub = big.full_subcategory(objects);
    if *m.domain != sub {
        return Err(FlatnessError::Precondition("the weight must live on the full subcategory".into()));
    }
    let bop = Arc::new(big.opposite());
    let sub_op = Arc::new(sub.opposite());
    let hs: Vec<Weight> = (0..n).map(|e| Weight::yoneda(&bop, e).restrict(&sub_op, objects)).collect();
    let coends: Vec<colim::Coend> = hs.iter().map(|h| colim::weighted_colimit(m, h)).collect::<Result<_, _>>()?;
    let values: Vec<_> = coends.iter().map(|e| e.value().clone()).collect();
    let mut act = Vec::with_capacity(n * n);
    for e in 0..n {
        for e2 in 0..n {
            let y = big.hom(e, e2);
            let family: Vec<MorphismData> = objects
                .iter()
                .enumerate()
                .map(|(a, &ja)| {
                    let mh = b.tensor(m.value(a), big.hom(e2, ja))?;
                    let swap = b.symmetry(y, &mh);
                    let inner = b.tensor(big.hom(e2, ja), y)?;
                    let comp = b.tensor_mor(&b.identity(m.value(a)), big.comp(e, e2, ja), &inner, big.hom(e, ja));
                    Ok(b.compose(coends[e].leg(a), &b.compose(&comp, &swap)))
                })
                .collect::<Result<_, FlatnessError>>()?;
            act.push(coends[e2].factor_tensor(b, y, &values[e], &family));
        }
    }
    Ok(Weight::new(big.clone(), values, act)?)
}

#[cfg(test)]
mod tests;
