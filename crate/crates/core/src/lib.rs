//! Decision procedures for enriched category theory at finite scale.

pub mod base;
pub mod colim;
pub mod corpus;
pub mod elements;
pub mod enriched;
pub mod flatness;
pub mod io;
pub mod linalg;
pub mod ordcat;
pub mod replay;
pub mod scenarios;
pub mod verdict;
