//! Finitely presented consequence systems and bounded checks of their laws.

mod calculus;
mod corpus;
mod engine;
mod laws;
mod unify;

pub use calculus::{Calculus, Fuel, Rule, Verdict};
pub use corpus::{show_query, Corpus};
pub(crate) use engine::{close_with, AxiomSet, ExtraPremises, Seed};
pub use engine::{close_within, Closure, Universe};
pub use laws::{
    check_operator_laws, check_principles, check_structural, probe_pnc, probe_pnt, probe_pps, structural_instance,
    weaker_on, weaker_than, ClosureOperator, Consequence, Weakness, WeaknessEvidence,
};
