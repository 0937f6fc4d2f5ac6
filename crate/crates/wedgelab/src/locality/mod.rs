//! Locality experiments: A-operators, half-line field commutators, twists and two-sided bundles.

mod bundle;
mod chain;
mod commutator;
mod twist;

pub use bundle::{
    assemble_massive, assemble_massless, lift_uniform, locality_grid, sides_on_grid, twisted_locality_entries,
    BundleKind, ChiralSide, Generator, LocalityProbe, TripleBundle, SAMPLE_SECTORS, TRANSLATION_SAMPLES,
};
pub use chain::{a_operator, a_operator_from_samples, a_operator_with, AOperator, Certification, ChainFactor, MAX_CHAIN_WORK};
pub use commutator::{half_line_commutator, half_line_commutator_with, wedge_chain, CommutatorResidual, LEAKAGE_LIMIT};
pub use twist::{
    closed_form_chain, sector_legs, twist, twist_in_order, twist_projector_commutation, twisted_commutator, Side, Twist,
    TwoSidedVector, MAX_TWIST_LEGS,
};
