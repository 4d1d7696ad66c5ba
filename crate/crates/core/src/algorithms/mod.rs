//! Community-detection algorithms. Each one is a pure function of the
//! graph, the parameters and (for the stochastic ones) the seed.

mod eigenvector;
mod fastgreedy;
mod infomap;
mod label_propagation;
mod louvain;
mod mcl;
mod radetal;
mod spinglass;
mod walktrap;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dendrogram, Graph, Partition};

pub use eigenvector::leading_eigenvector;
pub use fastgreedy::{fastgreedy, fastgreedy_dendrogram};
pub use infomap::{description_length, infomap};
pub use label_propagation::{is_label_fixed_point, label_propagation};
pub use louvain::louvain;
pub use mcl::{markov_cluster, markov_cluster_observed, SparseColumns};
pub use radetal::{radetal, radetal_dendrogram};
pub use spinglass::spinglass;
pub use walktrap::{walktrap, walktrap_dendrogram};

/// Tuning knobs for every algorithm. Defaults are the values used by the
/// benchmark harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoParams {
    pub seed: u64,
    /// Random-walk length for walktrap distances.
    pub walktrap_t: usize,
    /// Matrix power applied in each MCL expansion step.
    pub mcl_expansion: u32,
    /// Elementwise power applied in each MCL inflation step.
    pub mcl_inflation: f64,
    pub mcl_prune_threshold: f64,
    pub mcl_convergence_epsilon: f64,
    pub mcl_max_iterations: usize,
    /// Number of spin states available to spinglass (upper bound on the
    /// number of communities it can report). `None` allows one per node.
    pub spinglass_max_spins: Option<usize>,
    pub spinglass_initial_temperature: f64,
    pub spinglass_cooling: f64,
    pub spinglass_final_temperature: f64,
    /// Sweeps (of `n` single-spin proposals each) per temperature step.
    pub spinglass_sweeps_per_temperature: usize,
    pub eigen_tolerance: f64,
    pub eigen_max_iterations: usize,
    pub lp_max_rounds: usize,
    /// Run a simulated-annealing pass over the map equation after the
    /// greedy infomap optimization.
    pub infomap_anneal: bool,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            seed: 0,
            walktrap_t: 4,
            mcl_expansion: 2,
            mcl_inflation: 2.0,
            mcl_prune_threshold: 1e-5,
            mcl_convergence_epsilon: 1e-8,
            mcl_max_iterations: 100,
            spinglass_max_spins: None,
            spinglass_initial_temperature: 1.0,
            spinglass_cooling: 0.99,
            spinglass_final_temperature: 0.01,
            spinglass_sweeps_per_temperature: 1,
            eigen_tolerance: 1e-8,
            eigen_max_iterations: 10_000,
            lp_max_rounds: 100,
            infomap_anneal: false,
        }
    }
}

impl AlgoParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.walktrap_t == 0 {
            return bad("walktrap_t must be positive");
        }
        if self.mcl_expansion < 2 {
            return bad("mcl_expansion must be an integer >= 2");
        }
        if self.mcl_inflation.is_nan() || self.mcl_inflation <= 1.0 {
            return bad("mcl_inflation must exceed 1");
        }
        if !(self.mcl_prune_threshold >= 0.0 && self.mcl_convergence_epsilon > 0.0) {
            return bad("mcl thresholds must be positive");
        }
        if self.spinglass_max_spins == Some(0) {
            return bad("spinglass_max_spins must be positive");
        }
        if !(self.spinglass_cooling > 0.0 && self.spinglass_cooling < 1.0) {
            return bad("spinglass_cooling must lie in (0, 1)");
        }
        if !(self.spinglass_initial_temperature > 0.0 && self.spinglass_final_temperature > 0.0) {
            return bad("spinglass temperatures must be positive");
        }
        if self.eigen_tolerance.is_nan() || self.eigen_tolerance <= 0.0 {
            return bad("eigen_tolerance must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Radetal,
    Fastgreedy,
    Louvain,
    Spinglass,
    LeadingEigenvector,
    Walktrap,
    MarkovCluster,
    Infomap,
    LabelPropagation,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Radetal,
        Algorithm::Fastgreedy,
        Algorithm::Louvain,
        Algorithm::Spinglass,
        Algorithm::LeadingEigenvector,
        Algorithm::Walktrap,
        Algorithm::MarkovCluster,
        Algorithm::Infomap,
        Algorithm::LabelPropagation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Radetal => "radetal",
            Algorithm::Fastgreedy => "fastgreedy",
            Algorithm::Louvain => "louvain",
            Algorithm::Spinglass => "spinglass",
            Algorithm::LeadingEigenvector => "leading_eigenvector",
            Algorithm::Walktrap => "walktrap",
            Algorithm::MarkovCluster => "markov_cluster",
            Algorithm::Infomap => "infomap",
            Algorithm::LabelPropagation => "label_propagation",
        }
    }

    /// Whether the output depends on `AlgoParams::seed`.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Algorithm::Louvain | Algorithm::Spinglass | Algorithm::Infomap | Algorithm::LabelPropagation
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let algo = match key.as_str() {
            "radetal" | "rd" => Algorithm::Radetal,
            "fastgreedy" | "fast_greedy" | "fg" => Algorithm::Fastgreedy,
            "louvain" | "lv" => Algorithm::Louvain,
            "spinglass" | "sg" => Algorithm::Spinglass,
            "leading_eigenvector" | "leadingeigenvector" | "lev" => Algorithm::LeadingEigenvector,
            "walktrap" | "wt" => Algorithm::Walktrap,
            "markov_cluster" | "markovcluster" | "mcl" => Algorithm::MarkovCluster,
            "infomap" | "inp" => Algorithm::Infomap,
            "label_propagation" | "labelpropagation" | "lp" => Algorithm::LabelPropagation,
            _ => return Err(Error::UnknownAlgorithm(s.to_string())),
        };
        Ok(algo)
    }
}

/// Output of one algorithm run.
#[derive(Debug, Clone)]
pub struct Detection {
    pub partition: Partition,
    /// False when an iterative method hit its iteration cap; the partition
    /// is then the best-effort result at that point.
    pub converged: bool,
}

impl Detection {
    pub(crate) fn converged(partition: Partition) -> Self {
        Self {
            partition,
            converged: true,
        }
    }
}

/// Runs `algorithm` on `graph`.
///
/// Methods that need at least one edge return the singleton partition on
/// edgeless input.
pub fn detect(graph: &Graph, algorithm: Algorithm, params: &AlgoParams) -> Result<Detection> {
    params.validate()?;
    if graph.edge_count() == 0 {
        return Ok(Detection::converged(Partition::singletons(graph.node_count())));
    }
    Ok(match algorithm {
        Algorithm::Radetal => Detection::converged(radetal(graph)?),
        Algorithm::Fastgreedy => Detection::converged(fastgreedy(graph)?),
        Algorithm::Louvain => Detection::converged(louvain(graph, params)?),
        Algorithm::Spinglass => Detection::converged(spinglass(graph, params)?),
        Algorithm::LeadingEigenvector => leading_eigenvector(graph, params)?,
        Algorithm::Walktrap => Detection::converged(walktrap(graph, params)?),
        Algorithm::MarkovCluster => markov_cluster(graph, params)?,
        Algorithm::Infomap => Detection::converged(infomap(graph, params)?),
        Algorithm::LabelPropagation => label_propagation(graph, params),
    })
}

/// Level of maximal modularity; ties go to fewer communities, then to the
/// lowest level index.
pub fn best_cut(dendrogram: &Dendrogram) -> Result<Partition> {
    if dendrogram.is_empty() {
        return Err(Error::EmptyDendrogram);
    }
    const TIE: f64 = 1e-12;
    let scores = dendrogram.level_scores();
    let mut best = 0;
    for i in 1..scores.len() {
        let (q, qb) = (scores[i], scores[best]);
        let better = q > qb + TIE
            || ((q - qb).abs() <= TIE && dendrogram.community_count(i) < dendrogram.community_count(best));
        if better {
            best = i;
        }
    }
    Ok(dendrogram.level(best))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::Graph;

    pub fn cliques(sizes: &[usize], bridges: &[(usize, usize)]) -> Graph {
        let mut edges = Vec::new();
        let mut offset = 0;
        for &s in sizes {
            for i in 0..s {
                for j in i + 1..s {
                    edges.push((offset + i, offset + j));
                }
            }
            offset += s;
        }
        edges.extend_from_slice(bridges);
        Graph::new(offset, edges).unwrap()
    }

    /// Four triangles arranged in a ring, consecutive triangles joined by
    /// one edge.
    pub fn triangle_ring() -> Graph {
        cliques(&[3, 3, 3, 3], &[(2, 3), (5, 6), (8, 9), (11, 0)])
    }

    pub fn block_membership(sizes: &[usize]) -> Vec<usize> {
        sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect()
    }
}
