//! Sequential-measurement statistics for a two-party scenario in which
//! Alice measures the same POVM twice and Bob measures once.
//!
//! The crate computes the joint statistics `p(a0, a1, b)` under the Lüders
//! update, the single-time statistics `p(a1, b)`, no-signalling-in-time
//! residuals, and the witness
//!
//! ```text
//! S = Σ_{a1,b} | Σ_{a0} p(a0, a1, b) − p(a1, b) |
//! ```
//!
//! which vanishes for every shared-randomness model whose hidden variable
//! screens Alice's later outcome from her earlier one. It also builds the
//! explicit violating constructions and searches for large witness values.
//!
//! ```
//! use seqmeas::constructions::{paper_scenario, Construction};
//! use seqmeas::correlations::analyze;
//!
//! let scenario = paper_scenario(Construction::Trine, 2).unwrap();
//! let analysis = analyze(&scenario).unwrap();
//! assert!((analysis.report.value - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod constructions;
pub mod correlations;
pub mod error;
pub mod matcore;
pub mod optimize;
pub mod quantum;

pub use error::{Error, Result};
