use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::best_cut;
use crate::error::Result;
use crate::graph::{Dendrogram, Direction, Graph, Partition, WeightedGraph};

#[derive(Debug, PartialEq)]
struct Candidate {
    gain: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // max-gain first; equal gains resolve to the lexicographically
    // smallest pair
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy agglomeration from singletons: repeatedly merge the pair of
/// edge-connected communities with the largest modularity increase (or
/// smallest decrease) until no connected pair remains.
pub fn fastgreedy_dendrogram(graph: &Graph) -> Result<Dendrogram> {
    let n = graph.node_count();
    let two_m = 2.0 * graph.edge_count() as f64;
    let total = 2 * n;
    let mut alive = vec![false; total];
    let mut share = vec![0.0; total];
    let mut links: Vec<HashMap<usize, f64>> = Vec::with_capacity(total);
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        alive[v] = true;
        share[v] = graph.neighbors(v).len() as f64 / two_m;
        links.push(graph.neighbors(v).iter().map(|&u| (u, 1.0 / two_m)).collect());
    }
    links.resize_with(total, HashMap::new);
    let gain = |e: f64, a: f64, b: f64| 2.0 * (e - a * b);
    for (u, v) in graph.edges() {
        heap.push(Candidate {
            gain: gain(1.0 / two_m, share[u], share[v]),
            a: u,
            b: v,
        });
    }

    let mut merges = Vec::new();
    let mut next = n;
    while let Some(Candidate { a, b, .. }) = heap.pop() {
        if !alive[a] || !alive[b] {
            continue;
        }
        let id = next;
        next += 1;
        merges.push((a, b));
        let (small, large) = if links[a].len() < links[b].len() { (a, b) } else { (b, a) };
        let mut merged = std::mem::take(&mut links[large]);
        for (c, e) in std::mem::take(&mut links[small]) {
            *merged.entry(c).or_insert(0.0) += e;
        }
        merged.remove(&a);
        merged.remove(&b);
        alive[a] = false;
        alive[b] = false;
        alive[id] = true;
        share[id] = share[a] + share[b];
        let mut neighbors: Vec<(usize, f64)> = merged.iter().map(|(&c, &e)| (c, e)).collect();
        neighbors.sort_unstable_by_key(|&(c, _)| c);
        for &(c, e) in &neighbors {
            let back = &mut links[c];
            back.remove(&a);
            back.remove(&b);
            back.insert(id, e);
            heap.push(Candidate {
                gain: gain(e, share[id], share[c]),
                a: c.min(id),
                b: c.max(id),
            });
        }
        links[id] = merged;
    }
    Dendrogram::from_merges(
        &WeightedGraph::from_graph(graph),
        Partition::singletons(n),
        merges,
        Direction::Agglomerative,
    )
}

pub fn fastgreedy(graph: &Graph) -> Result<Partition> {
    best_cut(&fastgreedy_dendrogram(graph)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;

    #[test]
    fn two_disjoint_cliques() {
        let g = cliques(&[5, 5], &[]);
        let p = fastgreedy(&g).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[5, 5])).unwrap()));
    }

    #[test]
    fn triangle_ring_recovered() {
        let p = fastgreedy(&super::super::fixtures::triangle_ring()).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[3, 3, 3, 3])).unwrap()));
    }

    #[test]
    fn single_edge() {
        let g = cliques(&[2], &[]);
        let d = fastgreedy_dendrogram(&g).unwrap();
        assert_eq!(d.level_scores(), &[-0.5, 0.0]);
        assert_eq!(fastgreedy(&g).unwrap(), Partition::all_in_one(2));
    }

    #[test]
    fn merges_stay_within_components() {
        let g = cliques(&[3, 4], &[]);
        let d = fastgreedy_dendrogram(&g).unwrap();
        assert_eq!(d.community_count(d.len() - 1), 2);
    }
}
