//! Markov clustering on a sparse column-stochastic matrix.

use super::{AlgoParams, Detection};
use crate::error::Result;
use crate::graph::{Graph, Partition};

/// Column-major sparse matrix; each column is sorted by row index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumns {
    columns: Vec<Vec<(usize, f64)>>,
}

impl SparseColumns {
    /// Adjacency plus unit self-loops, columns normalized to sum 1.
    pub fn transfer_matrix(graph: &Graph) -> Self {
        let columns = (0..graph.node_count())
            .map(|j| {
                let nb = graph.neighbors(j);
                let w = 1.0 / (nb.len() + 1) as f64;
                let mut col: Vec<(usize, f64)> = nb.iter().map(|&i| (i, w)).collect();
                let at = col.partition_point(|&(i, _)| i < j);
                col.insert(at, (j, w));
                col
            })
            .collect();
        Self { columns }
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn nonzero_count(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        self.columns[j].iter().map(|&(_, x)| x).sum()
    }

    fn multiply(&self, rhs: &Self, acc: &mut [f64], touched: &mut Vec<usize>) -> Self {
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                for &(k, b) in col {
                    for &(i, a) in &self.columns[k] {
                        if acc[i] == 0.0 {
                            touched.push(i);
                        }
                        acc[i] += a * b;
                    }
                }
                touched.sort_unstable();
                let out: Vec<(usize, f64)> = touched.iter().map(|&i| (i, acc[i])).collect();
                for i in touched.drain(..) {
                    acc[i] = 0.0;
                }
                out
            })
            .collect();
        Self { columns }
    }

    /// Elementwise power, pruning and column renormalization. Pruned mass
    /// is redistributed by the renormalization; a column is never emptied
    /// (its largest entry always survives).
    fn inflate(&mut self, power: f64, threshold: f64) {
        for col in &mut self.columns {
            for e in col.iter_mut() {
                e.1 = e.1.powf(power);
            }
            let sum: f64 = col.iter().map(|e| e.1).sum();
            let peak = col.iter().map(|e| e.1).fold(0.0, f64::max);
            col.retain(|e| e.1 / sum >= threshold || e.1 == peak);
            let kept: f64 = col.iter().map(|e| e.1).sum();
            for e in col.iter_mut() {
                e.1 /= kept;
            }
        }
    }

    fn max_difference(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (a, b) in self.columns.iter().zip(&other.columns) {
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let d = match (a.get(i), b.get(j)) {
                    (Some(&(ra, xa)), Some(&(rb, xb))) if ra == rb => {
                        i += 1;
                        j += 1;
                        xa - xb
                    }
                    (Some(&(ra, xa)), Some(&(rb, _))) if ra < rb => {
                        i += 1;
                        xa
                    }
                    (Some(&(_, xa)), None) => {
                        i += 1;
                        xa
                    }
                    (_, Some(&(_, xb))) => {
                        j += 1;
                        xb
                    }
                    (None, None) => unreachable!(),
                };
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// Weakly connected components of the nonzero pattern.
    fn support_components(&self) -> Partition {
        let n = self.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, _) in col {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        Partition::from_labels(&roots)
    }
}

pub fn markov_cluster(graph: &Graph, params: &AlgoParams) -> Result<Detection> {
    markov_cluster_observed(graph, params, |_| {})
}

/// As [`markov_cluster`], calling `observe` on the initial matrix and on
/// every iterate after inflation.
pub fn markov_cluster_observed(
    graph: &Graph,
    params: &AlgoParams,
    mut observe: impl FnMut(&SparseColumns),
) -> Result<Detection> {
    params.validate()?;
    let n = graph.node_count();
    let mut acc = vec![0.0; n];
    let mut touched = Vec::new();
    let mut current = SparseColumns::transfer_matrix(graph);
    observe(&current);
    let mut converged = false;
    for _ in 0..params.mcl_max_iterations {
        let mut next = current.multiply(&current, &mut acc, &mut touched);
        for _ in 2..params.mcl_expansion {
            next = next.multiply(&current, &mut acc, &mut touched);
        }
        next.inflate(params.mcl_inflation, params.mcl_prune_threshold);
        observe(&next);
        let delta = next.max_difference(&current);
        current = next;
        if delta < params.mcl_convergence_epsilon {
            converged = true;
            break;
        }
    }
    Ok(Detection {
        partition: current.support_components(),
        converged,
    })
}
