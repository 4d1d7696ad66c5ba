//! Shared fixtures for the benchmarks.

use commbench::{generate, Graph, LfrConfig};

/// An LFR network with the default exponents and a maximum degree of three
/// times the average.
pub fn lfr_graph(n: usize, avg_degree: f64, mu: f64, seed: u64) -> Graph {
    let config = LfrConfig::new(n, avg_degree, (3.0 * avg_degree).round() as usize, 2.0, 1.0, mu, seed);
    generate(&config).expect("benchmark network generates").graph
}
