//! Reference-free entailment auditing for radiology reports.
//!
//! A report's Findings are turned into a closed-world evidence vector over
//! the finding atoms of an [`kb::Ontology`]; every diagnosis is then checked
//! for entailment under the ontology's rules with an in-crate DPLL solver.
//! Claimed diagnoses from the Impression are classified as supported,
//! unsupported, missed or correctly excluded, and can be filtered down to
//! the entailed subset.

pub mod evidence;
pub mod kb;
pub mod logic;
pub mod metrics;
pub mod synth;
pub mod text;
pub mod verifier;
