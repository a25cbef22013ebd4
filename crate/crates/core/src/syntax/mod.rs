//! Signatures, formulas, parsing and enumeration.

mod enumerate;
mod formula;
pub mod lexer;
mod parse;
mod signature;

pub use enumerate::{enumerate_formulas, enumerate_formulas_capped, DEFAULT_ENUMERATION_CAP};
pub use formula::{show_set, Formula, Node, SchemaVar, Substitution};
pub use parse::{parse_formula, parse_formula_set, Cursor};
pub(crate) use signature::check_identifier;
pub use signature::{Signature, Symbol};
