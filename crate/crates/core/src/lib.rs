//! Direct-search derivative-free optimization in randomly drawn subspaces.
//!
//! Every iteration draws a sketching matrix `P_k` (r×n) and a polling set
//! `D_k` in R^r, then polls the points `x_k + α_k P_kᵀ d` for `d ∈ D_k`,
//! accepting the first one that achieves sufficient decrease. Taking
//! `P_k = I_n` recovers classical (deterministic or probabilistic) direct
//! search.
//!
//! The crate is organized as:
//!
//! * [`problem`], [`counter`], [`rng`], [`record`]: shared domain types,
//!   evaluation accounting, reproducible random streams and run records.
//! * [`polling`]: direction-set generators and cosine-measure utilities.
//! * [`sketch`]: sketching-matrix ensembles and alignment diagnostics.
//! * [`solver`]: the subspace direct-search method, the STP baseline and
//!   closed-form theory diagnostics.
//! * [`problems`]: the built-in problem registry.
//! * [`bench`]: accuracy counts, performance profiles and campaigns.

pub mod bench;
pub mod counter;
pub mod error;
pub mod format;
pub mod keys;
pub mod polling;
pub mod problem;
pub mod problems;
pub mod record;
pub mod rng;
pub mod sketch;
pub mod solver;

pub use counter::{BudgetExhausted, EvalCounter};
pub use error::{Error, Result};
pub use polling::{DirectionSet, PollFamily};
pub use problem::Problem;
pub use record::{EvalCount, HistoryRow, RunRecord, Termination};
pub use rng::{RngStream, StreamId};
pub use sketch::{SketchKind, SketchMatrix};
pub use solver::{DecreaseRule, SolverConfig, SolverKind};
