//! Exact-arithmetic verification of the two-term supercongruence for the
//! sporadic sequence A_δ, with the lemma-level checks and the tuple-set
//! decomposition behind it.
//!
//! All arithmetic is exact (big integers and rationals); results are
//! reported as [`report::CheckRecord`]s.

pub mod congruence;
pub mod decomposition;
pub mod error;
pub mod exactarith;
pub mod laurent;
pub mod proofsteps;
pub mod report;
pub mod seqdsl;
pub mod sequences;

pub use error::{Error, Result};
pub use exactarith::{Integer, Prime, Rational, Valuation};
pub use report::{CheckRecord, Verdict};
pub use sequences::{a_delta, a_delta_binomial, a_delta_multinomial, Representation, Tuple12};
