//! Position-bias probing for multi-constraint instruction following.
//!
//! The crate covers the whole offline side of the protocol:
//!
//! * [`constraints`]: the constraint taxonomy, parameter sampling, description
//!   variants and the conflict relation.
//! * [`verifier`]: deterministic rule-based checkers plus the text
//!   segmentation they rely on.
//! * [`synthesis`]: seed loading, conflict-free combination sampling and
//!   instruction composition.
//! * [`ordering`]: difficulty estimation, the Constraint Difficulty
//!   Distribution Index (CDDI) and order generation for target CDDI values.
//! * [`inference`]: single- and multi-round conversations against a
//!   chat-completion endpoint or the built-in synthetic model.
//! * [`evaluation`]: scoring, constraint/instruction-level accuracy,
//!   robustness testing and report emission.
//! * [`importance`]: normalization and aggregation of token importance
//!   matrices produced by an external attribution extractor.
//! * [`pipeline`]: the end-to-end, resumable protocol driver.
//! * [`plot`]: static SVG charts for the reports.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the pipeline and file formats use.

pub mod constraints;
pub mod error;
pub mod evaluation;
pub mod importance;
pub mod inference;
pub mod io;
pub mod ordering;
pub mod pipeline;
pub mod plot;
pub mod scalar;
pub mod synthesis;
pub mod verifier;

pub use constraints::{
    ConflictMatrix, ConstraintGroup, ConstraintInstance, ConstraintKind, Relation, Taxonomy,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use synthesis::{ComposedInstruction, ConstraintCombination, ProbeInstance, SeedInstruction};
pub use verifier::{verify, Verdict};

/// Exact CDDI value; the achievable set for `n` constraints is `{(N - 2d) / N}`.
pub type Cddi = num_rational::Ratio<i64>;

pub type DifficultyTable = ordering::DifficultyTable<f64>;
pub type OrderWithIndex = ordering::OrderWithIndex<f64>;
pub type EvaluationReport = evaluation::EvaluationReport<f64>;
pub type RawImportanceMatrix = importance::RawImportanceMatrix<f64>;
pub type StandardizedMatrix = importance::StandardizedMatrix<f64>;
pub type ImportanceProfile = importance::ImportanceProfile<f64>;
