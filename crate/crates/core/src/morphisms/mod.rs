//! Signature morphisms, splitting morphisms, and component translations.

mod signature_morphism;
mod splitting;
mod translate;

pub use signature_morphism::SignatureMorphism;
pub use splitting::{compose_splitting, in_k_restricted, SplittingMorphism};
pub use translate::{substitute_back_with, translate_frozen, translate_with, Interning, Translation};
