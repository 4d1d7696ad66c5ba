use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{AlgoParams, Detection};
use crate::graph::{Graph, Partition};
use crate::rng::seeded;

/// Asynchronous label propagation. Each round visits the nodes in a fresh
/// random order and gives every node the label most frequent among its
/// neighbors (ties broken uniformly). Stops once every node holds one of
/// its neighborhood's most frequent labels, or after `lp_max_rounds`.
pub fn label_propagation(graph: &Graph, params: &AlgoParams) -> Detection {
    let n = graph.node_count();
    let mut rng = seeded(params.seed);
    let mut label: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut count = vec![0usize; n];
    let mut touched = Vec::new();
    let mut best = Vec::new();
    let mut converged = false;
    for _ in 0..params.lp_max_rounds {
        order.shuffle(&mut rng);
        for &v in &order {
            let nb = graph.neighbors(v);
            if nb.is_empty() {
                continue;
            }
            let mut top = 0;
            for &u in nb {
                let l = label[u];
                if count[l] == 0 {
                    touched.push(l);
                }
                count[l] += 1;
                top = top.max(count[l]);
            }
            best.clear();
            // sorted so the draw does not depend on neighbor order
            touched.sort_unstable();
            best.extend(touched.iter().copied().filter(|&l| count[l] == top));
            if count[label[v]] != top || best.len() > 1 {
                label[v] = best[rng.gen_range(0..best.len())];
            }
            for l in touched.drain(..) {
                count[l] = 0;
            }
        }
        if fixed_point_dense(graph, &label, &mut count) {
            converged = true;
            break;
        }
    }
    Detection {
        partition: Partition::from_labels(&label),
        converged,
    }
}

/// As [`is_label_fixed_point`] for labels below `n`, counting in `count`
/// (all zero on entry and on exit).
fn fixed_point_dense(graph: &Graph, labels: &[usize], count: &mut [usize]) -> bool {
    for v in 0..graph.node_count() {
        let nb = graph.neighbors(v);
        let mut top = 0;
        for &u in nb {
            count[labels[u]] += 1;
            top = top.max(count[labels[u]]);
        }
        let own = count[labels[v]];
        for &u in nb {
            count[labels[u]] = 0;
        }
        if own != top {
            return false;
        }
    }
    true
}

/// True when every non-isolated node carries a label of maximal frequency
/// among its neighbors.
pub fn is_label_fixed_point(graph: &Graph, labels: &[usize]) -> bool {
    let mut count = std::collections::HashMap::new();
    (0..graph.node_count()).all(|v| {
        let nb = graph.neighbors(v);
        if nb.is_empty() {
            return true;
        }
        count.clear();
        for &u in nb {
            *count.entry(labels[u]).or_insert(0usize) += 1;
        }
        let top = count.values().copied().max().unwrap_or(0);
        count.get(&labels[v]).copied().unwrap_or(0) == top
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;

    #[test]
    fn two_triangles_every_seed() {
        let g = cliques(&[3, 3], &[]);
        for seed in 0..100 {
            let d = label_propagation(&g, &AlgoParams::with_seed(seed));
            assert!(d.converged);
            assert_eq!(d.partition.community_count(), 2, "seed {seed}");
        }
    }

    #[test]
    fn edgeless_stays_singletons() {
        let g = Graph::new(4, []).unwrap();
        let d = label_propagation(&g, &AlgoParams::default());
        assert_eq!(d.partition, Partition::singletons(4));
        assert!(d.converged);
    }

    #[test]
    fn output_is_fixed_point() {
        let g = triangle_ring();
        for seed in 0..20 {
            let d = label_propagation(&g, &AlgoParams::with_seed(seed));
            assert!(d.converged);
            assert!(is_label_fixed_point(&g, d.partition.membership()));
        }
    }

    #[test]
    fn fixed_point_detects_violation() {
        let g = cliques(&[3], &[]);
        assert!(!is_label_fixed_point(&g, &[0, 0, 1]));
        assert!(is_label_fixed_point(&g, &[0, 0, 0]));
        // path 0-1-2 with labels a b a: node 1 sees only a
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!is_label_fixed_point(&path, &[0, 1, 0]));
    }

    #[test]
    fn round_cap_reports_non_convergence() {
        let g = cliques(&[4, 4], &[(0, 4)]);
        let d = label_propagation(&g, &AlgoParams { lp_max_rounds: 0, ..Default::default() });
        assert!(!d.converged);
        assert_eq!(d.partition, Partition::singletons(8));
    }
}
