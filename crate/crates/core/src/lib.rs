//! Finitely presented consequence systems, their combination by fibring, and
//! ontology development graphs with bounded, machine-checked link evidence.

pub mod consequence;
pub mod devgraph;
pub mod dsl;
pub mod error;
pub mod fibring;
pub mod fixtures;
pub mod morphisms;
pub mod ontology;
pub mod report;
pub mod syntax;

pub use error::{Error, Result};
pub use syntax::{
    enumerate_formulas, parse_formula, parse_formula_set, Formula, SchemaVar, Signature, Substitution, Symbol,
};

use consequence::Fuel;

/// Bounds shared by the checks that sample or enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub fuel: Fuel,
    pub corpus_depth: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { fuel: Fuel::default(), corpus_depth: 2, samples: 25, seed: 7 }
    }
}
