//! Dualizable objects.

use super::{Base, BaseError, BaseKind, BaseObject, MorphismData};
use crate::linalg::Matrix;
use crate::verdict::{Certificate, Verdict};

/// A dual `D` of `X` with unit `η: I -> D ⊗ X` and counit `ε: X ⊗ D -> I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Duality {
    pub dual: BaseObject,
    pub unit: MorphismData,
    pub counit: MorphismData,
}

impl Base {
    /// Both triangle identities for a candidate duality.
    pub fn check_triangles(&self, x: &BaseObject, w: &Duality) -> Result<bool, BaseError> {
        let d = &w.dual;
        let i = self.unit();
        let dx = self.tensor(d, x)?;
        let xd = self.tensor(x, d)?;
        // X -> X ⊗ D ⊗ X -> X
        let one_eta = self.tensor_mor(&self.identity(x), &w.unit, &i, &dx);
        let eps_one = self.tensor_mor(&w.counit, &self.identity(x), x, x);
        let t1 = self.compose(&eps_one, &one_eta);
        // D -> D ⊗ X ⊗ D -> D
        let eta_one = self.tensor_mor(&w.unit, &self.identity(d), d, d);
        let one_eps = self.tensor_mor(&self.identity(d), &w.counit, &xd, &i);
        let t2 = self.compose(&one_eps, &eta_one);
        Ok(t1 == self.identity(x) && t2 == self.identity(d))
    }

    /// The standard duality of a vector space, or the trivial one of a
    /// terminal cartesian object.
    pub fn standard_duality(&self, x: &BaseObject) -> Option<Duality> {
        match &self.kind {
            BaseKind::FinVec(_) => {
                let n = x.dim();
                let mut unit = Matrix::zeros(n * n, 1);
                let mut counit = Matrix::zeros(1, n * n);
                for k in 0..n {
                    unit.set(k * n + k, 0, 1);
                    counit.set(0, k * n + k, 1);
                }
                Some(Duality {
                    dual: x.clone(),
                    unit: MorphismData::Matrix(unit),
                    counit: MorphismData::Matrix(counit),
                })
            }
            _ => {
                self.find_iso(x, &self.unit()).ok().flatten()?;
                Some(Duality {
                    dual: self.unit(),
                    unit: MorphismData::Cells(vec![0]),
                    counit: MorphismData::Cells(vec![0]),
                })
            }
        }
    }

    /// Decide dualizability.  Vector spaces are always dualizable; in a
    /// cartesian base exactly the objects isomorphic to the unit are, since
    /// the counit `X × D -> 1` is forced and the first triangle then makes
    /// the identity of `X` factor through a point.
    pub fn is_dualizable(&self, x: &BaseObject) -> (Verdict, Option<Duality>) {
        match self.standard_duality(x) {
            Some(w) => {
                let cert = Certificate::Duality {
                    dual_size: w.dual.cells(),
                    unit: morphism_entries(&w.unit),
                    counit: morphism_entries(&w.counit),
                };
                (Verdict::yes(cert), Some(w))
            }
            None => (
                Verdict::no(Certificate::SizeObstruction {
                    size: x.cells(),
                    detail: "a cartesian object is dualizable only if it is isomorphic to the unit".into(),
                }),
                None,
            ),
        }
    }
}

fn morphism_entries(m: &MorphismData) -> Vec<usize> {
    match m {
        MorphismData::Cells(c) => c.clone(),
        MorphismData::Matrix(m) => m.data.iter().map(|&e| e as usize).collect(),
    }
}
