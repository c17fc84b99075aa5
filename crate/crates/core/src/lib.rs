//! Hyperbolic-type metrics on finite punctured metric spaces.
//!
//! The crate builds the one-point scale-invariant Cassinian metrics
//! `tau_p` and `tilde_tau_p`, their averages and supremum over a finite
//! puncture set, and the `j` / `j~` metrics, then measures them:
//!
//! - [`delta`] computes the four-point Gromov constant exactly (parallel
//!   `O(n^4)` enumeration) or by seeded sampling;
//! - [`verify`] checks metric axioms, the Ptolemy inequality, the additive
//!   sandwich bounds and the `mu_p` / `mu_P` product inequalities;
//! - [`repro`] bundles the named scenarios (the four-point counterexample,
//!   the arctan-split dichotomy and the puncture-count sweep).
//!
//! Runnable examples live in `examples/`, one per capability:
//!
//! ```bash
//! cargo run --release -p cassinian --example distance_matrices
//! cargo run --release -p cassinian --example punctured_metrics
//! cargo run --release -p cassinian --example four_point_delta
//! cargo run --release -p cassinian --example verify_inequalities
//! cargo run --release -p cassinian --example counterexample
//! cargo run --release -p cassinian --example arctan_dichotomy
//! cargo run --release -p cassinian --example average_sweep
//! ```

pub mod cli;
pub mod delta;
pub mod error;
pub mod io;
pub mod metric;
pub mod par;
pub mod punctured;
pub mod repro;
pub mod sampling;
pub mod verify;

pub use delta::{exact_delta, quadruple_delta, sampled_delta, DeltaMode, DeltaReport};
pub use error::{Error, Result};
pub use metric::{BaseMetric, DistanceMatrix, MetricOracle, PointCloud};
pub use punctured::{PuncturedSpace, PuncturedSpec, Variant};
pub use verify::{Violation, ViolationReport};
