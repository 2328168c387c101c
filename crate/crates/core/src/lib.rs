//! Weyl-group combinatorics of zip data and zip flags.
//!
//! The crate models the combinatorial shadow of a zip datum (types `I`, `J`,
//! a frame element `z`, a diagram automorphism `γ`, an exponent `n` and a
//! prime `p`) and computes strata, closure orders, Hasse-invariant
//! multiplicities and purity verdicts with exact arithmetic only.

pub mod cli;
pub mod error;
pub mod fm;
pub mod golden;
pub mod lattice;
pub mod rootsystem;
pub mod sections;
pub mod strata;
pub mod subset;
pub mod weyl;
pub mod zipdatum;

pub use error::{Error, Result};
pub use lattice::{CharVec, CocharVec, IntMat};
pub use rootsystem::{build_root_datum, DatumSpec, GaloisSpec, RootDatum, VectorSide};
pub use subset::SimpleSet;
pub use weyl::{CosetReps, CosetSide, DoubleCosetReps, WeylElt};
pub use zipdatum::{DimReport, FlaggedZipDatum, FrameViolation, TypeSpec, ZipDatum};
