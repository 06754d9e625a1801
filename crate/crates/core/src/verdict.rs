//! Three-valued verdicts with checkable certificates.
//!
//! Every bounded search in the crate answers with a [`Verdict`].  A `Yes` or
//! `No` always carries a [`Certificate`] that can be re-verified by a
//! targeted computation (see [`crate::replay`]); an `Unknown` carries the
//! bound that was exhausted.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Yes,
    No,
    Unknown,
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Yes
        } else {
            Outcome::No
        }
    }

    /// Conjunction in the three-valued sense: any `No` wins, then `Unknown`.
    pub fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::No, _) | (_, Outcome::No) => Outcome::No,
            (Outcome::Unknown, _) | (_, Outcome::Unknown) => Outcome::Unknown,
            _ => Outcome::Yes,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Yes => 0,
            Outcome::No => 1,
            Outcome::Unknown => 2,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Witness data attached to a verdict.
///
/// Arrow and object indices refer to the category the verdict was computed
/// on; element indices are cell indices in the canonical carriers of the
/// base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// No witness beyond the statement that a finite check was run.
    Checked { items: usize },
    /// The category has no objects.
    EmptyCategory,
    /// A cocone under the identity functor: `legs[a]: a -> apex`.
    Cocone { apex: usize, legs: Vec<usize> },
    /// Two objects with no common codomain.
    NoCospan { a: usize, b: usize },
    /// A parallel pair that no arrow equalizes.
    NoCoequalizer { f: usize, g: usize },
    /// A comma category `b/J` that is empty.
    CommaEmpty { b: usize },
    /// A comma category `b/J` that is disconnected; two objects `(a, phi)`
    /// from different components.
    CommaDisconnected { b: usize, first: (usize, usize), second: (usize, usize), components: usize },
    /// Two distinct arrows identified by a functor.
    NotFaithful { f: usize, g: usize },
    /// An arrow `Ja -> Ja'` outside the image.
    NotFull { a: usize, a2: usize, arrow: usize },
    /// An object of the codomain outside the essential image.
    NotEssentiallySurjective { object: usize },
    /// A failed equation of an algebraic structure.
    Equation { law: String, at: Vec<usize>, lhs: String, rhs: String },
    /// A failed stage of a multi-part pipeline.
    Stage { name: String, detail: Box<Certificate> },
    /// Object sizes obstruct the property (e.g. dualizability in a
    /// cartesian base).
    SizeObstruction { size: usize, detail: String },
    /// A dual pair witnessing dualizability.
    Duality { dual_size: usize, unit: Vec<usize>, counit: Vec<usize> },
    /// The double-category clause 2 fails for this vertical arrow.
    NoCellForVertical { object: usize, vertical: usize },
    /// Two parallel cells that no horizontal arrow equalizes.
    CellsNotEqualized { alpha: usize, beta: usize },
    /// A limit diagram whose comparison map is not invertible.
    LimitNotPreserved { diagram: String, detail: String },
    /// A comparison map that is not an isomorphism at an object.
    NotIsomorphic { object: usize, detail: String },
    /// An isomorphism given componentwise by cell maps or matrices.
    Isomorphism { components: Vec<Vec<usize>> },
    /// A retract presentation `M -> R -> M` with `R` a sum of
    /// representables on the listed objects.
    Splitting { objects: Vec<usize>, section: Vec<Vec<usize>>, retraction: Vec<Vec<usize>> },
    /// A search exceeded its configured ceiling.
    BoundExceeded { what: String, limit: usize, needed: usize },
    /// A conjunction of named sub-verdicts.
    Report { parts: Vec<(String, Outcome)> },
}

/// A three-valued answer with its witness and the bound it was computed at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
}

impl Verdict {
    pub fn yes(certificate: Certificate) -> Self {
        Verdict { outcome: Outcome::Yes, certificate, bound: None }
    }

    pub fn no(certificate: Certificate) -> Self {
        Verdict { outcome: Outcome::No, certificate, bound: None }
    }

    pub fn unknown(what: impl Into<String>, limit: usize, needed: usize) -> Self {
        Verdict {
            outcome: Outcome::Unknown,
            certificate: Certificate::BoundExceeded { what: what.into(), limit, needed },
            bound: Some(limit),
        }
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn is_yes(&self) -> bool {
        self.outcome == Outcome::Yes
    }

    pub fn is_no(&self) -> bool {
        self.outcome == Outcome::No
    }

    pub fn is_unknown(&self) -> bool {
        self.outcome == Outcome::Unknown
    }

    /// Wrap a sub-verdict as a failed pipeline stage.
    pub fn staged(self, name: &str) -> Self {
        Verdict {
            outcome: self.outcome,
            certificate: Certificate::Stage { name: name.to_string(), detail: Box::new(self.certificate) },
            bound: self.bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_valued_conjunction() {
        use Outcome::*;
        assert_eq!(Yes.and(Yes), Yes);
        assert_eq!(Yes.and(Unknown), Unknown);
        assert_eq!(Unknown.and(No), No);
    }

    #[test]
    fn outcome_serializes_lowercase() {
        assert_eq!(serde_json::to_string(&Outcome::Unknown).unwrap(), "\"unknown\"");
        let v = Verdict::no(Certificate::NoCospan { a: 0, b: 1 });
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Verdict>(&s).unwrap(), v);
    }
}
