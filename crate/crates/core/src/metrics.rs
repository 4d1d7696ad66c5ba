//! Partition quality and similarity measures.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition, WeightedGraph};

/// Cross-tabulation of estimated (rows) against actual (columns)
/// communities, stored sparsely as sorted non-zero cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    cells: Vec<((usize, usize), usize)>,
    row_marginals: Vec<usize>,
    col_marginals: Vec<usize>,
    total: usize,
}

impl ConfusionMatrix {
    pub fn rows(&self) -> usize {
        self.row_marginals.len()
    }

    pub fn cols(&self) -> usize {
        self.col_marginals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells
            .binary_search_by_key(&(row, col), |&(k, _)| k)
            .map_or(0, |i| self.cells[i].1)
    }

    /// Non-zero cells in row-major order.
    pub fn nonzero(&self) -> &[((usize, usize), usize)] {
        &self.cells
    }

    pub fn row_marginals(&self) -> &[usize] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[usize] {
        &self.col_marginals
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn transpose(&self) -> Self {
        let mut cells: Vec<_> = self.cells.iter().map(|&((i, j), c)| ((j, i), c)).collect();
        cells.sort_unstable();
        Self {
            cells,
            row_marginals: self.col_marginals.clone(),
            col_marginals: self.row_marginals.clone(),
            total: self.total,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0; self.cols()]; self.rows()];
        for &((i, j), c) in &self.cells {
            out[i][j] = c;
        }
        out
    }
}

/// `m_ij` = number of nodes placed in estimated community `i` that belong
/// to actual community `j`.
pub fn confusion(actual: &Partition, estimated: &Partition) -> Result<ConfusionMatrix> {
    if actual.node_count() != estimated.node_count() {
        return Err(Error::NodeSetMismatch(actual.node_count(), estimated.node_count()));
    }
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..actual.node_count() {
        *counts
            .entry((estimated.community_of(v), actual.community_of(v)))
            .or_insert(0) += 1;
    }
    let mut cells: Vec<_> = counts.into_iter().collect();
    cells.sort_unstable();
    Ok(ConfusionMatrix {
        cells,
        row_marginals: estimated.community_sizes().to_vec(),
        col_marginals: actual.community_sizes().to_vec(),
        total: actual.node_count(),
    })
}

/// Normalized mutual information of a confusion matrix, using natural logs
/// and `0 log 0 = 0`. When both partitions are a single community the
/// denominator vanishes and the value is 1.
pub fn nmi(cm: &ConfusionMatrix) -> f64 {
    let n = cm.total as f64;
    if cm.total == 0 {
        return 1.0;
    }
    let mut terms: Vec<f64> = cm
        .cells
        .iter()
        .map(|&((i, j), c)| {
            let c = c as f64;
            c * (n * c / (cm.row_marginals[i] as f64 * cm.col_marginals[j] as f64)).ln()
        })
        .collect();
    // a fixed summation order keeps the value bit-identical under swapping
    // and relabeling the partitions
    terms.sort_unstable_by(f64::total_cmp);
    let numerator = -2.0 * terms.iter().sum::<f64>();
    let entropy_term = |marginals: &[usize]| -> f64 {
        let mut terms: Vec<f64> = marginals
            .iter()
            .filter(|&&m| m > 0)
            .map(|&m| {
                let m = m as f64;
                m * (m / n).ln()
            })
            .collect();
        terms.sort_unstable_by(f64::total_cmp);
        terms.iter().sum()
    };
    let denominator = entropy_term(&cm.row_marginals) + entropy_term(&cm.col_marginals);
    if denominator == 0.0 {
        return if cm.rows() == cm.cols() { 1.0 } else { 0.0 };
    }
    (numerator / denominator).clamp(0.0, 1.0)
}

/// Convenience wrapper: NMI between two partitions.
pub fn nmi_of(actual: &Partition, estimated: &Partition) -> Result<f64> {
    Ok(nmi(&confusion(actual, estimated)?))
}

/// Newman–Girvan modularity `Q = sum_c [l_c / m - (d_c / 2m)^2]`.
pub fn modularity(graph: &Graph, partition: &Partition) -> Result<f64> {
    if partition.node_count() != graph.node_count() {
        return Err(Error::NodeSetMismatch(partition.node_count(), graph.node_count()));
    }
    let m = graph.edge_count();
    if m == 0 {
        return Err(Error::EdgelessGraph);
    }
    let k = partition.community_count();
    let mut internal = vec![0usize; k];
    let mut degree_sum = vec![0usize; k];
    for u in 0..graph.node_count() {
        let cu = partition.community_of(u);
        degree_sum[cu] += graph.neighbors(u).len();
        for &v in graph.neighbors(u) {
            if u < v && partition.community_of(v) == cu {
                internal[cu] += 1;
            }
        }
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree_sum)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

/// Modularity on a weighted graph with self-loops (aggregated networks).
pub fn weighted_modularity(graph: &WeightedGraph, partition: &Partition) -> Result<f64> {
    if partition.node_count() != graph.node_count() {
        return Err(Error::NodeSetMismatch(partition.node_count(), graph.node_count()));
    }
    let two_m = graph.total_strength();
    if two_m <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    let k = partition.community_count();
    let mut inner = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for u in 0..graph.node_count() {
        let cu = partition.community_of(u);
        tot[cu] += graph.strength(u);
        inner[cu] += graph.self_loop(u);
        for &(v, w) in graph.neighbors(u) {
            if partition.community_of(v) == cu {
                inner[cu] += w;
            }
        }
    }
    Ok(inner
        .iter()
        .zip(&tot)
        .map(|(&i, &t)| i / two_m - (t / two_m).powi(2))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixing {
    /// Mean over non-isolated nodes of the fraction of incident edges that
    /// leave the node's community.
    pub per_node: f64,
    /// Fraction of all edges joining different communities.
    pub global: f64,
}

pub fn measured_mixing(graph: &Graph, partition: &Partition) -> Result<Mixing> {
    if partition.node_count() != graph.node_count() {
        return Err(Error::NodeSetMismatch(partition.node_count(), graph.node_count()));
    }
    let mut sum = 0.0;
    let mut counted = 0usize;
    let mut crossing = 0usize;
    for u in 0..graph.node_count() {
        let nb = graph.neighbors(u);
        if nb.is_empty() {
            continue;
        }
        let cu = partition.community_of(u);
        let external = nb.iter().filter(|&&v| partition.community_of(v) != cu).count();
        crossing += external;
        sum += external as f64 / nb.len() as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::AllIsolated);
    }
    Ok(Mixing {
        per_node: sum / counted as f64,
        global: crossing as f64 / 2.0 / graph.edge_count() as f64,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks with ties averaged (1-based).
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation: Pearson on tie-averaged ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    pearson(&ranks(xs), &ranks(ys))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_pair() -> impl Strategy<Value = (Partition, Partition)> {
        (1usize..20).prop_flat_map(|n| {
            (proptest::collection::vec(0..n, n), proptest::collection::vec(0..n, n))
                .prop_map(|(a, b)| (Partition::from_labels(&a), Partition::from_labels(&b)))
        })
    }

    proptest! {
        #[test]
        fn nmi_symmetric_and_bounded((a, b) in arb_pair()) {
            let ab = nmi_of(&a, &b).unwrap();
            let ba = nmi_of(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(nmi(&confusion(&a, &b).unwrap().transpose()), ab);
            let k = a.community_count();
            let reversed: Vec<usize> = a.membership().iter().map(|&c| k - 1 - c).collect();
            prop_assert_eq!(nmi_of(&Partition::new(reversed).unwrap(), &b).unwrap(), ab);
            if a.same_as(&b) {
                prop_assert!((ab - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(ab < 1.0 - 1e-12);
            }
        }

        #[test]
        fn modularity_relabel_invariant(labels in proptest::collection::vec(0usize..5, 8), perm in Just(vec![3usize, 0, 4, 1, 2])) {
            let g = Graph::new(8, [(0,1),(1,2),(2,0),(3,4),(4,5),(5,3),(2,3),(6,7),(0,6)]).unwrap();
            let a = Partition::from_labels(&labels);
            let relabeled: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
            let b = Partition::from_labels(&relabeled);
            let qa = modularity(&g, &a).unwrap();
            let qb = modularity(&g, &b).unwrap();
            prop_assert!((qa - qb).abs() < 1e-15);
            prop_assert!(modularity(&g, &Partition::all_in_one(8)).unwrap() == 0.0);
        }

        #[test]
        fn mixing_bounded(labels in proptest::collection::vec(0usize..4, 8)) {
            let g = Graph::new(8, [(0,1),(1,2),(2,0),(3,4),(4,5),(5,3),(2,3)]).unwrap();
            let p = Partition::from_labels(&labels);
            let m = measured_mixing(&g, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&m.per_node));
            let crossing = g.edges().any(|(u, v)| p.community_of(u) != p.community_of(v));
            prop_assert_eq!(m.per_node == 0.0, !crossing);
        }
    }
}
