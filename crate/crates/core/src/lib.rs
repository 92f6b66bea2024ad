pub mod adversary;
pub mod advice;
pub mod analysis;
pub mod cli;
pub mod generators;
pub mod graph;
pub mod perm;
pub mod quantum;
pub mod seed;
pub mod stats;
pub mod suite;
pub mod tester;
