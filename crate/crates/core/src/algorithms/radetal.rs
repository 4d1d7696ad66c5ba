//! Divisive clustering by edge-clustering coefficient.
//!
//! The edge with the smallest `C_uv = (z_uv + 1) / min(d_u - 1, d_v - 1)`
//! (`z_uv` = triangles through the edge, degrees taken in the current
//! working graph) is removed repeatedly. Pendant edges get `C = +inf` and go
//! last. Every removal that disconnects a component yields a new level.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::best_cut;
use crate::error::Result;
use crate::graph::{sorted_intersection_count, Dendrogram, Direction, Graph, Partition, WeightedGraph};

fn coefficient(triangles: usize, du: usize, dv: usize) -> f64 {
    let denom = du.min(dv).saturating_sub(1);
    if denom == 0 {
        f64::INFINITY
    } else {
        (triangles + 1) as f64 / denom as f64
    }
}

/// Splits recorded while removing edges: the hierarchy from the initial
/// components down to singletons.
pub fn radetal_dendrogram(graph: &Graph) -> Result<Dendrogram> {
    let n = graph.node_count();
    let edge_list: Vec<(usize, usize)> = graph.edges().collect();
    let edge_id: HashMap<(usize, usize), usize> = edge_list.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let id_of = |u: usize, v: usize| edge_id[&(u.min(v), u.max(v))];

    let mut adjacency: Vec<HashSet<usize>> = (0..n).map(|v| graph.neighbors(v).iter().copied().collect()).collect();
    let mut triangles: Vec<usize> = edge_list
        .iter()
        .map(|&(u, v)| sorted_intersection_count(graph.neighbors(u), graph.neighbors(v)))
        .collect();
    // positive floats (and +inf) order like their bit patterns
    let key = |c: f64| c.to_bits();
    let mut current_key: Vec<u64> = edge_list
        .iter()
        .zip(&triangles)
        .map(|(&(u, v), &t)| key(coefficient(t, adjacency[u].len(), adjacency[v].len())))
        .collect();
    let mut queue: BTreeSet<(u64, usize)> = current_key.iter().enumerate().map(|(i, &k)| (k, i)).collect();

    let components = graph.connected_components();
    let mut label: Vec<usize> = components.membership().to_vec();
    let mut next_label = components.community_count();
    // (kept, split_off) label pairs in removal order
    let mut splits: Vec<(usize, usize)> = Vec::new();

    let mut seen_u = vec![usize::MAX; n];
    let mut seen_v = vec![usize::MAX; n];
    let mut stamp = 0usize;

    while let Some((_, e)) = queue.pop_first() {
        let (u, v) = edge_list[e];
        adjacency[u].remove(&v);
        adjacency[v].remove(&u);
        let mut common: Vec<usize> = adjacency[u].intersection(&adjacency[v]).copied().collect();
        common.sort_unstable();
        for &w in &common {
            triangles[id_of(u, w)] -= 1;
            triangles[id_of(v, w)] -= 1;
        }
        for x in [u, v] {
            let mut incident: Vec<usize> = adjacency[x].iter().copied().collect();
            incident.sort_unstable();
            for y in incident {
                let f = id_of(x, y);
                let (a, b) = edge_list[f];
                let k = key(coefficient(triangles[f], adjacency[a].len(), adjacency[b].len()));
                if k != current_key[f] {
                    queue.remove(&(current_key[f], f));
                    current_key[f] = k;
                    queue.insert((k, f));
                }
            }
        }
        for &w in &common {
            // triangle loss also changes edges (u, w) and (v, w) whose
            // endpoints kept their degree
            for x in [u, v] {
                let f = id_of(x, w);
                let (a, b) = edge_list[f];
                let k = key(coefficient(triangles[f], adjacency[a].len(), adjacency[b].len()));
                if k != current_key[f] {
                    queue.remove(&(current_key[f], f));
                    current_key[f] = k;
                    queue.insert((k, f));
                }
            }
        }

        stamp += 1;
        if let Some(side) = separated_side(&adjacency, u, v, stamp, &mut seen_u, &mut seen_v) {
            let parent = label[u];
            let child = next_label;
            next_label += 1;
            for x in side {
                label[x] = child;
            }
            splits.push((parent, child));
        }
    }

    // Replay splits backwards as merges from the final (singleton) level.
    let base = Partition::from_labels(&label);
    let mut current: HashMap<usize, usize> = HashMap::new();
    for (x, &l) in label.iter().enumerate() {
        current.insert(l, base.community_of(x));
    }
    let k = base.community_count();
    let mut merges = Vec::with_capacity(splits.len());
    for (i, &(parent, child)) in splits.iter().rev().enumerate() {
        let a = current[&parent];
        let b = current[&child];
        merges.push((a, b));
        current.insert(parent, k + i);
    }
    Dendrogram::from_merges(&WeightedGraph::from_graph(graph), base, merges, Direction::Divisive)
}

/// After removing `{u, v}`: `None` if `u` and `v` are still connected,
/// otherwise the nodes of whichever side was exhausted first.
fn separated_side(
    adjacency: &[HashSet<usize>],
    u: usize,
    v: usize,
    stamp: usize,
    seen_u: &mut [usize],
    seen_v: &mut [usize],
) -> Option<Vec<usize>> {
    let mut side_u = vec![u];
    let mut side_v = vec![v];
    seen_u[u] = stamp;
    seen_v[v] = stamp;
    let (mut iu, mut iv) = (0, 0);
    loop {
        // expand the smaller frontier one node
        let expand_u = side_u.len() - iu <= side_v.len() - iv;
        if expand_u {
            if iu == side_u.len() {
                return Some(side_u);
            }
            let x = side_u[iu];
            iu += 1;
            for &y in &adjacency[x] {
                if seen_v[y] == stamp {
                    return None;
                }
                if seen_u[y] != stamp {
                    seen_u[y] = stamp;
                    side_u.push(y);
                }
            }
        } else {
            if iv == side_v.len() {
                return Some(side_v);
            }
            let x = side_v[iv];
            iv += 1;
            for &y in &adjacency[x] {
                if seen_u[y] == stamp {
                    return None;
                }
                if seen_v[y] != stamp {
                    seen_v[y] = stamp;
                    side_v.push(y);
                }
            }
        }
    }
}

pub fn radetal(graph: &Graph) -> Result<Partition> {
    best_cut(&radetal_dendrogram(graph)?)
}
