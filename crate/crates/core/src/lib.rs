//! viperkit-core: feature-level evaluation toolkit for deep-learning
//! vulnerability detectors over a C subset.
//!
//! The pipeline is: parse C sources ([`frontend`]), build per-function
//! abridged code property graphs ([`cpg`]), detect vulnerability features
//! with graph rules ([`detect`]), generate feature-preserving and
//! feature-eliminating perturbations plus spurious-feature variants
//! ([`perturb`]), and score detectors with exact-rational satisfaction
//! rates ([`eval`]). A small seeded corpus generator lives in [`corpus`].

pub mod corpus;
pub mod cpg;
pub mod detect;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod perturb;
pub mod sample;
