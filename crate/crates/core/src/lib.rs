//! Community detection on planted-partition benchmark networks.
//!
//! The crate bundles four layers:
//!
//! * [`graph`]: simple undirected graphs, partitions and dendrograms;
//! * [`lfr`]: a generator of benchmark networks with power-law degrees,
//!   power-law community sizes and a tunable mixing coefficient;
//! * [`algorithms`]: nine community-detection methods;
//! * [`metrics`] and [`harness`]: scoring (NMI, modularity, mixing) and
//!   parameter sweeps that aggregate scores over replicates.

pub mod algorithms;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod lfr;
pub mod metrics;
pub mod rng;

pub use algorithms::{detect, AlgoParams, Algorithm, Detection};
pub use error::{Error, Result};
pub use graph::{Dendrogram, Direction, Graph, Partition, WeightedGraph};
pub use lfr::{generate, LfrConfig, PlantedNetwork};
pub use metrics::{confusion, modularity, nmi, nmi_of, ConfusionMatrix};
pub use harness::{correlate, run_sweep, summarize, RunRecord, SweepOutcome, SweepSpec};
