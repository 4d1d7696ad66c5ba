use rand::seq::SliceRandom;
use rand::Rng as _;

use super::AlgoParams;
use crate::error::Result;
use crate::graph::{Graph, Partition, WeightedGraph};
use crate::rng::{seeded, Rng};

const MIN_GAIN: f64 = 1e-12;

/// Two-phase modularity optimization: local node moves until no move
/// improves modularity, then aggregation of communities into nodes of a
/// weighted graph (internal links as self-loops), repeated until a pass
/// changes nothing.
pub fn louvain(graph: &Graph, params: &AlgoParams) -> Result<Partition> {
    let mut rng = seeded(params.seed);
    let mut level = WeightedGraph::from_graph(graph);
    let mut membership: Vec<usize> = (0..graph.node_count()).collect();
    loop {
        let (labels, moved) = local_moves(&level, &mut rng);
        if !moved {
            break;
        }
        let part = Partition::from_labels(&labels);
        for m in membership.iter_mut() {
            *m = part.community_of(*m);
        }
        if part.community_count() == level.node_count() {
            break;
        }
        level = level.quotient(&part)?;
    }
    Ok(Partition::from_labels(&membership))
}

/// One phase of local moving on a weighted graph. Returns node labels and
/// whether any node changed community.
pub(crate) fn local_moves(graph: &WeightedGraph, rng: &mut Rng) -> (Vec<usize>, bool) {
    let n = graph.node_count();
    let two_m = graph.total_strength();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = (0..n).map(|v| graph.strength(v)).collect();
    let mut link_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;
    if two_m <= 0.0 {
        return (community, false);
    }
    loop {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            let own = community[v];
            let k_v = graph.strength(v);
            for &(u, w) in graph.neighbors(v) {
                let c = community[u];
                if link_to[c] == 0.0 {
                    touched.push(c);
                }
                link_to[c] += w;
            }
            tot[own] -= k_v;
            // gain of inserting v into c, up to a common factor 1 / m
            let gain = |c: usize, link: f64| link - tot[c] * k_v / two_m;
            let stay = gain(own, link_to[own]);
            let mut best = stay;
            let mut best_c = own;
            let mut ties = 1;
            for &c in &touched {
                if c == own {
                    continue;
                }
                let g = gain(c, link_to[c]);
                if g > best + MIN_GAIN {
                    best = g;
                    best_c = c;
                    ties = 1;
                } else if best_c != own && (g - best).abs() <= MIN_GAIN {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best_c = c;
                    }
                }
            }
            tot[best_c] += k_v;
            if best_c != own {
                community[v] = best_c;
                moved = true;
                any_move = true;
            }
            for c in touched.drain(..) {
                link_to[c] = 0.0;
            }
        }
        if !moved {
            break;
        }
    }
    (community, any_move)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;
    use crate::metrics::modularity;

    #[test]
    fn two_disjoint_cliques() {
        let g = cliques(&[5, 5], &[]);
        let p = louvain(&g, &AlgoParams::default()).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[5, 5])).unwrap()));
    }

    #[test]
    fn triangle_ring_recovered() {
        let g = super::super::fixtures::triangle_ring();
        for seed in 0..10 {
            let p = louvain(&g, &AlgoParams::with_seed(seed)).unwrap();
            assert!(p.same_as(&Partition::new(block_membership(&[3, 3, 3, 3])).unwrap()), "seed {seed}");
        }
    }

    #[test]
    fn never_below_singletons() {
        let g = cliques(&[4, 3, 2], &[(0, 4), (3, 7), (5, 8), (1, 6)]);
        let single = modularity(&g, &Partition::singletons(g.node_count())).unwrap();
        for seed in 0..20 {
            let p = louvain(&g, &AlgoParams::with_seed(seed)).unwrap();
            assert!(modularity(&g, &p).unwrap() >= single);
        }
    }

    #[test]
    fn local_moves_never_decrease_modularity() {
        let g = cliques(&[4, 4, 4], &[(0, 4), (4, 8), (8, 0), (1, 9)]);
        let w = WeightedGraph::from_graph(&g);
        let before = modularity(&g, &Partition::singletons(12)).unwrap();
        let (labels, moved) = local_moves(&w, &mut seeded(3));
        assert!(moved);
        let after = modularity(&g, &Partition::from_labels(&labels)).unwrap();
        assert!(after > before);
    }
}
