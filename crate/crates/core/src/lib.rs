//! Exact symbolic engine for bidifferential brackets on trivial bundles over
//! polynomial coordinates: quasi-derivations, anchors, skew-symmetry and
//! Jacobi checks, and rank-1 Jacobi structures.

#![allow(clippy::needless_range_loop)]

pub mod bracket;
pub mod derivation;
pub mod doc;
pub mod error;
pub mod jacobi;
pub mod parse;
pub mod poly;
pub mod qder;
pub mod random;
pub mod report;
pub mod selftest;
pub mod witness;

pub use bracket::{classify, BidiffBracket, ClassificationReport, Flag, Tensor};
pub use derivation::Derivation;
pub use doc::{load_document, LoadError, Payload, StructureDocument};
pub use error::{Error, ParseError, ParseErrorKind};
pub use jacobi::{sn_bracket, wedge, Multivector};
pub use parse::parse_poly;
pub use poly::{Monomial, Poly, Rational};
pub use qder::{FirstOrderOperator, Section};
pub use report::{run_classify, ReportDocument, ReportOptions};
pub use witness::Witness;
