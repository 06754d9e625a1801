//! Command records and replay.
//!
//! Every command run produces a [`Record`] holding the command, its
//! options, the input documents and the result.  [`replay`] recomputes the
//! record and, where the result carries a certificate with a dedicated
//! checker (filteredness of a category, finality of a functor, the clauses
//! of a double category), also checks that certificate directly against
//! the input.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colim::{self, ColimError};
use crate::corpus;
use crate::elements::{double_elements, elements_of, gset_elements, ElementsError};
use crate::enriched::Weight;
use crate::flatness::{self, FlatConfig, FlatnessError, FlatnessReport};
use crate::io::{self, Document, IoError, Object};
use crate::scenarios::{self, Params, ScenarioError};
use crate::verdict::{Outcome, Verdict};

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Flatness(#[from] FlatnessError),
    #[error(transparent)]
    Colim(#[from] ColimError),
    #[error(transparent)]
    Elements(#[from] ElementsError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    CheckFiltered,
    CheckFinal,
    CheckFlat,
    CheckCauchyWeight,
    CauchyComplete,
    Colimit,
    Elements,
    DoubleElements,
    Oracle,
    Scenario,
    Corpus,
}

impl Command {
    /// Number of input documents the command reads.
    pub fn arity(self) -> usize {
        match self {
            Command::Scenario | Command::Corpus => 0,
            Command::Colimit => 2,
            _ => 1,
        }
    }
}

pub const DEFAULT_BOUND: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    pub bound: usize,
    /// Matrix-completion tuple length for `cauchy-complete` and the
    /// optional completion criterion of `check-flat`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<usize>,
    /// Run the oracle alongside the decider in `check-flat`.
    #[serde(default)]
    pub with_oracle: bool,
    /// Generator index used as the stage of `elements`; the unit if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            bound: DEFAULT_BOUND,
            completion: None,
            with_oracle: false,
            stage: None,
            seed: 0,
            count: 0,
            scenario: None,
            params: None,
        }
    }
}

/// A command run: what was asked, on what, and the answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: Command,
    pub options: Options,
    pub inputs: Vec<Document>,
    pub outcome: Outcome,
    pub result: serde_json::Value,
}

impl Record {
    pub fn document(&self) -> Document {
        Document::new(io::Kind::Report, self)
    }

    /// The verdict in the result, for commands that produce one.
    pub fn verdict(&self) -> Option<Verdict> {
        serde_json::from_value(self.result.clone()).ok()
    }
}

fn json<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("results serialize")
}

fn weight(doc: &Document) -> Result<Weight, ExecError> {
    Ok(io::expect_weight(doc.decode()?)?)
}

fn summary(obj: &Object) -> serde_json::Value {
    match obj {
        Object::Base(b) => serde_json::json!({"kind": "base", "tag": b.tag()}),
        Object::FinCategory(c) => {
            serde_json::json!({"kind": "fincategory", "objects": c.num_objects(), "arrows": c.num_arrows()})
        }
        Object::OrdFunctor(f) => {
            serde_json::json!({"kind": "ordfunctor", "objects": f.obj_map.len(), "arrows": f.arrow_map.len()})
        }
        Object::VCategory(c) => {
            serde_json::json!({"kind": "vcategory", "base": c.base.tag(), "objects": c.num_objects()})
        }
        Object::VFunctor(f) => serde_json::json!({"kind": "vfunctor", "objects": f.obj_map.len()}),
        Object::Weight(w) => {
            serde_json::json!({"kind": "weight", "base": w.base().tag(), "objects": w.domain.num_objects()})
        }
        Object::Report(r) => serde_json::json!({"kind": "report", "command": r.command, "outcome": r.outcome}),
    }
}

/// Run a command on decoded inputs.
pub fn execute(command: Command, options: &Options, inputs: &[Document]) -> Result<Record, ExecError> {
    if inputs.len() != command.arity() {
        return Err(ExecError::Usage(format!(
            "{command:?} takes {} input document(s), got {}",
            command.arity(),
            inputs.len()
        )));
    }
    let bound = options.bound;
    let (outcome, result) = match command {
        Command::Validate => (Outcome::Yes, summary(&inputs[0].decode()?)),
        Command::CheckFiltered => {
            let v = match inputs[0].decode()? {
                Object::FinCategory(c) => c.is_filtered(),
                Object::Weight(m) => elements_of(&m, &m.base().unit())?.carrier.is_filtered(),
                other => {
                    return Err(ExecError::Usage(format!(
                        "check-filtered needs a fincategory or a weight, got {}",
                        other.kind()
                    )))
                }
            };
            (v.outcome, json(&v))
        }
        Command::CheckFinal => {
            let v = io::expect_ordfunctor(inputs[0].decode()?)?.is_final();
            (v.outcome, json(&v))
        }
        Command::CheckFlat => {
            let config = FlatConfig { bound, oracle: options.with_oracle, completion: options.completion };
            let r = flatness::is_flat_with(&weight(&inputs[0])?, &config)?;
            (r.outcome, json(&r))
        }
        Command::CheckCauchyWeight => {
            let v = flatness::is_cauchy_weight(&weight(&inputs[0])?, bound)?;
            (v.outcome, json(&v))
        }
        Command::Oracle => {
            let v = flatness::oracle_flat(&weight(&inputs[0])?, bound)?;
            (v.outcome, json(&v))
        }
        Command::CauchyComplete => {
            let c = Arc::new(io::expect_vcategory(inputs[0].decode()?)?);
            let k = options.completion.unwrap_or(DEFAULT_BOUND);
            let r = colim::cauchy_completion(&c, k)?;
            let complete = colim::is_equivalence(&r.embedding)?;
            let result = serde_json::json!({
                "completed": r.completed,
                "provenance": r.provenance,
                "input_already_complete": complete,
            });
            (Outcome::Yes, result)
        }
        Command::Colimit => {
            let (m, h) = (weight(&inputs[0])?, weight(&inputs[1])?);
            let co = colim::weighted_colimit(&m, &h)?;
            (Outcome::Yes, serde_json::json!({"value": co.value(), "legs": co.legs()}))
        }
        Command::Elements => {
            let m = weight(&inputs[0])?;
            let el = match options.stage {
                None => elements_of(&m, &m.base().unit())?,
                Some(i) => {
                    let x = m
                        .base()
                        .generator()
                        .get(i)
                        .cloned()
                        .ok_or_else(|| ExecError::Usage(format!("the base has no generator {i}")))?;
                    elements_of(&m, &x)?
                }
            };
            (Outcome::Yes, json(&el))
        }
        Command::DoubleElements => {
            let d = double_elements(&weight(&inputs[0])?)?;
            let filtered = d.is_filtered();
            (Outcome::Yes, serde_json::json!({"double_category": d, "filtered": filtered}))
        }
        Command::Scenario => {
            let name = options.scenario.as_deref().ok_or_else(|| ExecError::Usage("scenario name missing".into()))?;
            let r = scenarios::run(name, &options.params.clone().unwrap_or_default())?;
            (r.outcome, json(&r))
        }
        Command::Corpus => {
            let r = corpus::run(options.seed, options.count, bound);
            let outcome = if r.summary.disagree > 0 { Outcome::No } else { Outcome::Yes };
            (outcome, json(&r))
        }
    };
    Ok(Record { command, options: options.clone(), inputs: inputs.to_vec(), outcome, result })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub command: Command,
    pub recorded: Outcome,
    pub replayed: Outcome,
    /// The recomputed result equals the recorded one.
    pub identical: bool,
    /// Result of the dedicated certificate checker, where there is one.
    pub certificate_checked: Option<bool>,
    pub outcome: Outcome,
}

/// Check the certificates of a recorded verdict against its input without
/// searching again.  `None` if no checker applies.
pub fn check_certificates(record: &Record) -> Result<Option<bool>, ExecError> {
    let Some(input) = record.inputs.first() else { return Ok(None) };
    Ok(match record.command {
        Command::CheckFiltered => {
            let Some(v) = record.verdict() else { return Ok(Some(false)) };
            Some(match input.decode()? {
                Object::FinCategory(c) => c.check_filtered_certificate(&v),
                Object::Weight(m) => elements_of(&m, &m.base().unit())?.carrier.check_filtered_certificate(&v),
                _ => false,
            })
        }
        Command::CheckFinal => {
            let Some(v) = record.verdict() else { return Ok(Some(false)) };
            Some(io::expect_ordfunctor(input.decode()?)?.check_final_certificate(&v))
        }
        Command::CheckFlat => {
            let Ok(report) = serde_json::from_value::<FlatnessReport>(record.result.clone()) else {
                return Ok(Some(false));
            };
            let m = weight(input)?;
            let mut checked = None;
            for c in &report.criteria {
                if c.verdict.is_unknown() {
                    continue;
                }
                let ok = if c.name == flatness::ELEMENTS_FILTERED {
                    elements_of(&m, &m.base().unit())?.carrier.check_filtered_certificate(&c.verdict)
                } else if c.name == flatness::GSET_FILTERED {
                    gset_elements(&m)?.carrier.check_filtered_certificate(&c.verdict)
                } else if c.name == flatness::DOUBLE_FILTERED {
                    double_elements(&m)?.check_filtered_certificate(&c.verdict)
                } else {
                    continue;
                };
                checked = Some(checked.unwrap_or(true) && ok);
            }
            checked
        }
        Command::DoubleElements => {
            let Some(v) = record.result.get("filtered").and_then(|v| serde_json::from_value::<Verdict>(v.clone()).ok())
            else {
                return Ok(Some(false));
            };
            Some(double_elements(&weight(input)?)?.check_filtered_certificate(&v))
        }
        _ => None,
    })
}

pub fn replay(record: &Record) -> Result<ReplayReport, ExecError> {
    let certificate_checked = check_certificates(record)?;
    let again = execute(record.command, &record.options, &record.inputs)?;
    let identical = again.result == record.result && again.outcome == record.outcome;
    let ok = identical && certificate_checked != Some(false);
    Ok(ReplayReport {
        command: record.command,
        recorded: record.outcome,
        replayed: again.outcome,
        identical,
        certificate_checked,
        outcome: Outcome::from_bool(ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Base;
    use crate::enriched::VCategory;
    use crate::io::Kind;
    use crate::ordcat::FinCategory;
    use crate::verdict::Certificate;

    fn weight_doc(m: &Weight) -> Document {
        Document::new(Kind::Weight, m)
    }

    #[test]
    fn not_filtered_category_replays() {
        let doc = Document::new(Kind::Fincategory, &FinCategory::discrete(2));
        let r = execute(Command::CheckFiltered, &Options::default(), &[doc]).unwrap();
        assert_eq!(r.outcome, Outcome::No);
        let rep = replay(&r).unwrap();
        assert_eq!(rep.outcome, Outcome::Yes);
        assert_eq!(rep.certificate_checked, Some(true));
    }

    #[test]
    fn tampered_certificate_is_caught() {
        let doc = Document::new(Kind::Fincategory, &FinCategory::chain(2));
        let mut r = execute(Command::CheckFiltered, &Options::default(), &[doc]).unwrap();
        assert_eq!(r.outcome, Outcome::Yes);
        r.outcome = Outcome::No;
        r.result = serde_json::to_value(Verdict::no(Certificate::NoCospan { a: 0, b: 1 })).unwrap();
        let rep = replay(&r).unwrap();
        assert_eq!(rep.certificate_checked, Some(false));
        assert_eq!(rep.outcome, Outcome::No);
    }

    #[test]
    fn flatness_record_replays_with_certificates() {
        let b = Base::fin_cat();
        let c = Arc::new(VCategory::free(&b, &FinCategory::discrete(2)).unwrap());
        let m = Weight::terminal(&c).unwrap();
        let r = execute(Command::CheckFlat, &Options::default(), &[weight_doc(&m)]).unwrap();
        assert_eq!(r.outcome, Outcome::No);
        let rep = replay(&r).unwrap();
        assert!(rep.identical);
        assert_eq!(rep.certificate_checked, Some(true));
    }

    #[test]
    fn record_survives_serialization() {
        let b = Base::fin_set();
        let c = Arc::new(VCategory::free(&b, &FinCategory::arrow()).unwrap());
        let r = execute(Command::Oracle, &Options::default(), &[weight_doc(&Weight::yoneda(&c, 0))]).unwrap();
        let text = r.document().to_text();
        let back = match Document::parse(&text).unwrap().decode().unwrap() {
            Object::Report(r) => *r,
            other => panic!("{other:?}"),
        };
        assert_eq!(back, r);
        assert_eq!(replay(&back).unwrap().outcome, Outcome::Yes);
    }

    #[test]
    fn wrong_arity_is_a_usage_error() {
        assert!(matches!(execute(Command::Colimit, &Options::default(), &[]), Err(ExecError::Usage(_))));
    }
}
