//! Random-walk distance clustering.
//!
//! Every community `C` carries the `t`-step transition profile
//! `P^t_C = mean over i in C of P^t_i`, stored pre-scaled by
//! `1 / sqrt(degree)` so that the degree-corrected distance
//! `r^2(C1, C2) = sum_k (P^t_C1k - P^t_C2k)^2 / d(k)` is a plain squared
//! Euclidean distance. Adjacent communities are merged greedily by the
//! smallest increase `sigma = |C1||C2| / (|C1| + |C2|) * r^2 / n`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{best_cut, AlgoParams};
use crate::error::Result;
use crate::graph::{Dendrogram, Direction, Graph, Partition, WeightedGraph};

#[derive(Debug, PartialEq)]
struct Candidate {
    sigma: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // BinaryHeap is a max-heap: smallest sigma must compare greatest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .sigma
            .total_cmp(&self.sigma)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Row `i` of `P^t` scaled by `1 / sqrt(d)`, computed by sparse
/// propagation from the unit vector at `i`.
fn walk_profile(graph: &Graph, start: usize, steps: usize, inv_sqrt_deg: &[f64], scratch: &mut Vec<f64>) -> Vec<f64> {
    let n = graph.node_count();
    let mut current = vec![0.0; n];
    current[start] = 1.0;
    let mut support = vec![start];
    let mut in_next = vec![false; n];
    for _ in 0..steps {
        scratch.clear();
        scratch.resize(n, 0.0);
        let mut next_support = Vec::new();
        for &j in &support {
            let nb = graph.neighbors(j);
            let share = current[j] / nb.len() as f64;
            for &k in nb {
                if !in_next[k] {
                    in_next[k] = true;
                    next_support.push(k);
                }
                scratch[k] += share;
            }
        }
        for &j in &support {
            current[j] = 0.0;
        }
        for &k in &next_support {
            current[k] = scratch[k];
            in_next[k] = false;
        }
        support = next_support;
    }
    for &k in &support {
        current[k] *= inv_sqrt_deg[k];
    }
    current
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn walktrap_dendrogram(graph: &Graph, params: &AlgoParams) -> Result<Dendrogram> {
    let n = graph.node_count();
    let nf = n as f64;
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|v| {
            let d = graph.neighbors(v).len();
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64).sqrt()
            }
        })
        .collect();
    let total = 2 * n;
    let mut profiles: Vec<Option<Vec<f64>>> = Vec::with_capacity(total);
    let mut scratch = Vec::new();
    for v in 0..n {
        if graph.neighbors(v).is_empty() {
            profiles.push(None);
        } else {
            profiles.push(Some(walk_profile(graph, v, params.walktrap_t, &inv_sqrt_deg, &mut scratch)));
        }
    }
    profiles.resize_with(total, || None);
    let mut size = vec![0usize; total];
    size[..n].fill(1);
    let mut alive = vec![false; total];
    alive[..n].fill(true);

    let sigma_of = |sa: usize, sb: usize, r2: f64| (sa * sb) as f64 / (sa + sb) as f64 * r2 / nf;
    let mut sigma: Vec<HashMap<usize, f64>> = vec![HashMap::new(); total];
    let mut heap = BinaryHeap::new();
    for (u, v) in graph.edges() {
        let r2 = squared_distance(
            profiles[u].as_deref().expect("non-isolated"),
            profiles[v].as_deref().expect("non-isolated"),
        );
        let s = sigma_of(1, 1, r2);
        sigma[u].insert(v, s);
        sigma[v].insert(u, s);
        heap.push(Candidate { sigma: s, a: u, b: v });
    }

    let mut merges = Vec::new();
    let mut next = n;
    while let Some(Candidate { a, b, sigma: s_ab }) = heap.pop() {
        if !alive[a] || !alive[b] {
            continue;
        }
        let id = next;
        next += 1;
        merges.push((a, b));
        let (sa, sb) = (size[a], size[b]);
        size[id] = sa + sb;
        let pa = profiles[a].take().expect("alive profile");
        let pb = profiles[b].take().expect("alive profile");
        let (wa, wb) = (sa as f64 / (sa + sb) as f64, sb as f64 / (sa + sb) as f64);
        let merged: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| wa * x + wb * y).collect();

        let from_a = std::mem::take(&mut sigma[a]);
        let from_b = std::mem::take(&mut sigma[b]);
        let mut neighbors: Vec<usize> = from_a.keys().chain(from_b.keys()).copied().filter(|&c| c != a && c != b).collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        let mut table = HashMap::with_capacity(neighbors.len());
        for c in neighbors {
            let sc = size[c];
            let s = match (from_a.get(&c), from_b.get(&c)) {
                (Some(&sac), Some(&sbc)) => {
                    ((sa + sc) as f64 * sac + (sb + sc) as f64 * sbc - sc as f64 * s_ab) / (sa + sb + sc) as f64
                }
                _ => {
                    let pc = profiles[c].as_deref().expect("alive neighbor");
                    sigma_of(sa + sb, sc, squared_distance(&merged, pc))
                }
            };
            let back = &mut sigma[c];
            back.remove(&a);
            back.remove(&b);
            back.insert(id, s);
            table.insert(c, s);
            heap.push(Candidate {
                sigma: s,
                a: c.min(id),
                b: c.max(id),
            });
        }
        sigma[id] = table;
        profiles[id] = Some(merged);
        alive[a] = false;
        alive[b] = false;
        alive[id] = true;
    }
    Dendrogram::from_merges(
        &WeightedGraph::from_graph(graph),
        Partition::singletons(n),
        merges,
        Direction::Agglomerative,
    )
}

/// Walktrap clustering: the best-modularity cut of the random-walk
/// dendrogram.
pub fn walktrap(graph: &Graph, params: &AlgoParams) -> Result<Partition> {
    best_cut(&walktrap_dendrogram(graph, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;

    #[test]
    fn profile_is_a_distribution() {
        let g = triangle_ring();
        let mut scratch = Vec::new();
        let ones = vec![1.0; g.node_count()];
        for v in 0..g.node_count() {
            let p = walk_profile(&g, v, 4, &ones, &mut scratch);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lance_williams_update_matches_direct_distance() {
        // merge two adjacent nodes and compare the updated sigma with the
        // direct computation from averaged profiles
        let g = cliques(&[4], &[]);
        let n = g.node_count();
        let inv: Vec<f64> = (0..n).map(|v| 1.0 / (g.neighbors(v).len() as f64).sqrt()).collect();
        let mut scratch = Vec::new();
        let p: Vec<Vec<f64>> = (0..n).map(|v| walk_profile(&g, v, 3, &inv, &mut scratch)).collect();
        let sig = |sa: usize, sb: usize, x: &[f64], y: &[f64]| {
            (sa * sb) as f64 / (sa + sb) as f64 * squared_distance(x, y) / n as f64
        };
        let s01 = sig(1, 1, &p[0], &p[1]);
        let s02 = sig(1, 1, &p[0], &p[2]);
        let s12 = sig(1, 1, &p[1], &p[2]);
        let merged: Vec<f64> = p[0].iter().zip(&p[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let direct = sig(2, 1, &merged, &p[2]);
        let updated = (2.0 * s02 + 2.0 * s12 - s01) / 3.0;
        assert!((direct - updated).abs() < 1e-15);
    }

    #[test]
    fn two_disjoint_cliques() {
        let g = cliques(&[5, 5], &[]);
        let p = walktrap(&g, &AlgoParams::default()).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[5, 5])).unwrap()));
    }

    #[test]
    fn triangle_ring_recovered() {
        let p = walktrap(&triangle_ring(), &AlgoParams::default()).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[3, 3, 3, 3])).unwrap()));
    }

    #[test]
    fn single_edge() {
        let g = cliques(&[2], &[]);
        assert_eq!(walktrap(&g, &AlgoParams::default()).unwrap(), Partition::all_in_one(2));
    }

    #[test]
    fn isolated_nodes_stay_alone() {
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = walktrap(&g, &AlgoParams::default()).unwrap();
        assert_eq!(p.community_count(), 3);
        assert_ne!(p.community_of(3), p.community_of(4));
    }
}
