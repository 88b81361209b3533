//! Law-of-the-iterated-logarithm (LIL) tests for pseudorandom bit generators.
//!
//! A sequence of `n` bits with `S` ones has `S_lil = (2S - n) / sqrt(2 n lnln n)`.
//! For random sequences `S_lil` hovers inside `[-1, 1]`. The crate covers:
//!
//! - [`bitstream`]: single-pass ones-counting at checkpoint lengths;
//! - [`lilstat`]: `S*` and `S_lil` with their additivity identities;
//! - [`probcalc`]: theoretical probabilities of the weak, strong and snapshot tests;
//! - [`generators`]: hash-based generators, a biased counterexample and corpora on disk;
//! - [`evaluator`]: scoring corpora against theory.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64`.

pub mod bitstream;
pub mod error;
pub mod evaluator;
pub mod generators;
pub mod lilstat;
pub mod probcalc;
pub mod scalar;

pub use error::{LilError, Result};
pub use scalar::Scalar;

pub type Engine = probcalc::ProbabilityEngine<f64>;
pub type Engine32 = probcalc::ProbabilityEngine<f32>;
pub type Trace = lilstat::LilTrace<f64>;
pub type Snapshot = probcalc::SnapshotDistribution<f64>;
pub type Distances = evaluator::DistanceTriple<f64>;
pub type WeakSpec = probcalc::WeakTestSpec<f64>;
