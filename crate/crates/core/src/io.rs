//! Versioned JSON documents.
//!
//! A document is `{"version": "1", "kind": ..., "payload": ...}`.  The
//! payload of each kind is the serde form of the matching domain type;
//! decoding validates it, so a loaded document is always a well-formed
//! object.  Errors carry the JSON position or the field path.
//!
//! ```
//! use enricat::io::{Document, Object};
//! let doc = Document::parse(r#"{"version": "1", "kind": "base", "payload": {"tag": "finset"}}"#).unwrap();
//! assert!(matches!(doc.decode().unwrap(), Object::Base(_)));
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::Base;
use crate::enriched::{VCategory, VFunctor, Weight};
use crate::ordcat::{FinCategory, OrdFunctor};
use crate::replay::Record;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid {kind} at `{path}`: {message}")]
    Schema { kind: String, path: String, message: String },
    #[error("schema version {found:?} is not supported (expected {expected:?})")]
    Version { found: String, expected: String },
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: String, found: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Base,
    Fincategory,
    Ordfunctor,
    Vcategory,
    Vfunctor,
    Weight,
    Report,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("kind serializes");
        f.write_str(s.as_str().expect("kind is a string"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    pub kind: Kind,
    pub payload: serde_json::Value,
}

/// A decoded, validated document.
#[derive(Clone, Debug)]
pub enum Object {
    Base(Base),
    FinCategory(FinCategory),
    OrdFunctor(OrdFunctor),
    VCategory(VCategory),
    VFunctor(VFunctor),
    Weight(Weight),
    Report(Box<Record>),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Base(_) => Kind::Base,
            Object::FinCategory(_) => Kind::Fincategory,
            Object::OrdFunctor(_) => Kind::Ordfunctor,
            Object::VCategory(_) => Kind::Vcategory,
            Object::VFunctor(_) => Kind::Vfunctor,
            Object::Weight(_) => Kind::Weight,
            Object::Report(_) => Kind::Report,
        }
    }
}

fn decode_as<T: DeserializeOwned>(kind: Kind, v: &serde_json::Value) -> Result<T, IoError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        IoError::Schema {
            kind: kind.to_string(),
            path: format!("payload{}", if path == "." { String::new() } else { format!(".{path}") }),
            message: e.into_inner().to_string(),
        }
    })
}

impl Document {
    pub fn new<T: Serialize>(kind: Kind, payload: &T) -> Self {
        Document {
            version: SCHEMA_VERSION.into(),
            kind,
            payload: serde_json::to_value(payload).expect("domain types serialize"),
        }
    }

    pub fn encode(obj: &Object) -> Self {
        match obj {
            Object::Base(x) => Document::new(Kind::Base, x),
            Object::FinCategory(x) => Document::new(Kind::Fincategory, x),
            Object::OrdFunctor(x) => Document::new(Kind::Ordfunctor, x),
            Object::VCategory(x) => Document::new(Kind::Vcategory, x),
            Object::VFunctor(x) => Document::new(Kind::Vfunctor, x),
            Object::Weight(x) => Document::new(Kind::Weight, x),
            Object::Report(x) => Document::new(Kind::Report, x),
        }
    }

    /// Parse JSON text and check the envelope; the payload is decoded by
    /// [`Document::decode`].
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let doc: Document = serde_path_to_error::deserialize(&value).map_err(|e| IoError::Schema {
            kind: "document".into(),
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        if doc.version != SCHEMA_VERSION {
            return Err(IoError::Version { found: doc.version, expected: SCHEMA_VERSION.into() });
        }
        Ok(doc)
    }

    pub fn decode(&self) -> Result<Object, IoError> {
        let p = &self.payload;
        Ok(match self.kind {
            Kind::Base => Object::Base(decode_as(self.kind, p)?),
            Kind::Fincategory => Object::FinCategory(decode_as(self.kind, p)?),
            Kind::Ordfunctor => Object::OrdFunctor(decode_as(self.kind, p)?),
            Kind::Vcategory => Object::VCategory(decode_as(self.kind, p)?),
            Kind::Vfunctor => Object::VFunctor(decode_as(self.kind, p)?),
            Kind::Weight => Object::Weight(decode_as(self.kind, p)?),
            Kind::Report => Object::Report(Box::new(decode_as(self.kind, p)?)),
        })
    }

    /// Canonical text: pretty JSON with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// Read, parse and validate a document.
pub fn load(path: impl AsRef<Path>) -> Result<Document, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let doc = Document::parse(&text)?;
    doc.decode()?;
    Ok(doc)
}

pub fn store(doc: &Document, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, doc.to_text())
        .map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })
}

macro_rules! expect_kind {
    ($name:ident, $variant:ident, $ty:ty, $kind:expr) => {
        pub fn $name(obj: Object) -> Result<$ty, IoError> {
            match obj {
                Object::$variant(x) => Ok(x),
                other => Err(IoError::WrongKind { expected: $kind.to_string(), found: other.kind().to_string() }),
            }
        }
    };
}

expect_kind!(expect_weight, Weight, Weight, Kind::Weight);
expect_kind!(expect_fincategory, FinCategory, FinCategory, Kind::Fincategory);
expect_kind!(expect_ordfunctor, OrdFunctor, OrdFunctor, Kind::Ordfunctor);
expect_kind!(expect_vcategory, VCategory, VCategory, Kind::Vcategory);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{BaseObject, Group, MorphismData};
    use std::sync::Arc;

    #[test]
    fn minimal_base_document() {
        let doc = Document::parse(r#"{"version":"1","kind":"base","payload":{"tag":"finset"}}"#).unwrap();
        match doc.decode().unwrap() {
            Object::Base(b) => assert_eq!(b.tag(), "finset"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let err = Document::parse("{\n  \"version\": \"1\",\n  \"kind\": base\n}").unwrap_err();
        assert!(matches!(err, IoError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let err = Document::parse(r#"{"version":"0","kind":"base","payload":{"tag":"finset"}}"#).unwrap_err();
        assert!(matches!(err, IoError::Version { .. }));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let doc = Document::parse(r#"{"version":"1","kind":"fincategory","payload":{"objects":1,"arrows":[[0,"x"]],"identities":[0],"composition":[]}}"#).unwrap();
        match doc.decode().unwrap_err() {
            IoError::Schema { path, .. } => assert!(path.contains("arrows"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_functorial_weight_names_the_equation() {
        let b = Base::fin_set();
        let c = Arc::new(VCategory::free(&b, &FinCategory::monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap()).unwrap());
        let good = Weight::terminal(&c).unwrap();
        let mut doc = Document::new(Kind::Weight, &good);
        // Make the idempotent act as the swap on a two-element set.
        doc.payload["values"] = serde_json::to_value(vec![BaseObject::set(2)]).unwrap();
        doc.payload["action"] = serde_json::to_value(vec![vec![MorphismData::Cells(vec![0, 1, 1, 0])]]).unwrap();
        let err = doc.decode().unwrap_err().to_string();
        assert!(err.contains("weight"), "{err}");
        assert!(err.contains("composition") || err.contains("unit") || err.contains("law"), "{err}");
    }

    #[test]
    fn documents_round_trip_bit_exactly() {
        let b = Base::fin_gset(Group::cyclic(3));
        let c = Arc::new(VCategory::free(&b, &FinCategory::chain(2)).unwrap());
        for obj in [
            Object::Base(b.clone()),
            Object::FinCategory(FinCategory::chain(3)),
            Object::VCategory((*c).clone()),
            Object::Weight(Weight::yoneda(&c, 1)),
        ] {
            let text = Document::encode(&obj).to_text();
            let again = Document::encode(&Document::parse(&text).unwrap().decode().unwrap()).to_text();
            assert_eq!(text, again);
        }
    }
}
