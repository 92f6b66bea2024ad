//! Exact simulation of the continuous-time walk on body welded trees and
//! the weld marker built on it.

pub mod column;
pub mod evolve;
pub mod marker;
pub mod welded;

pub use column::{ColumnWalk, SweepResult};
pub use evolve::{bessel_j, chebyshev_evolve, DenseEvolver, EvolveError, SparseSym};
pub use marker::{build_modified_component, find_exit, Classification, Component, LeafScan, MarkError, Marker, QuantumAdvice, WalkSchedule};
pub use welded::{column_full_discrepancy, WeldedTree};

/// `(k, t*, p*, modeled queries per walk)` for each depth.
pub fn schedule_table(ks: impl IntoIterator<Item = u32>) -> Vec<WalkSchedule> {
    ks.into_iter().map(WalkSchedule::new).collect()
}
