//! Undirected simple graphs, partitions and the weighted community-level
//! graphs produced by aggregation.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Undirected simple graph over dense node ids `0..node_count`.
///
/// Adjacency is stored in compressed sparse row form with every neighbor
/// list sorted ascending, so membership tests and common-neighbor counts
/// are merge/binary-search operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(Error::InvalidGraph("node_count must be at least 1".into()));
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_count];
        let mut edge_count = 0;
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            edge_count += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut targets = Vec::with_capacity(2 * edge_count);
        offsets.push(0);
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge {{{u}, {}}}", w[0])));
            }
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Ok(Self {
            offsets,
            targets,
            edge_count,
        })
    }

    /// Builds a graph from per-node neighbor lists that are already known to
    /// be symmetric and free of loops and duplicates.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &adjacency {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Self {
            offsets,
            targets,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbors of `node`. Panics if `node` is out of range.
    #[inline]
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> Result<usize> {
        self.check_node(node)?;
        Ok(self.offsets[node + 1] - self.offsets[node])
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Number of triangles the edge `{u, v}` belongs to, i.e. the number of
    /// common neighbors of its endpoints.
    pub fn edge_triangle_count(&self, u: usize, v: usize) -> Result<usize> {
        self.check_node(u)?;
        self.check_node(v)?;
        if !self.has_edge(u, v) {
            return Err(Error::NotAnEdge(u, v));
        }
        Ok(sorted_intersection_count(self.neighbors(u), self.neighbors(v)))
    }

    pub fn connected_components(&self) -> Partition {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        Partition::from_dense_unchecked(label, next)
    }

    /// Community-level graph of `partition`: intra-community edges become
    /// self-loop weight `2 * count`, inter-community edges are summed.
    pub fn quotient_graph(&self, partition: &Partition) -> Result<WeightedGraph> {
        WeightedGraph::from_graph(self).quotient(partition)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }
}

pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Total assignment of nodes to non-empty communities `0..community_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    membership: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Validates a membership vector whose ids must already be contiguous
    /// and non-empty.
    pub fn new(membership: Vec<usize>) -> Result<Self> {
        if membership.is_empty() {
            return Err(Error::InvalidPartition("no nodes".into()));
        }
        let count = membership.iter().max().map_or(0, |&m| m + 1);
        let mut sizes = vec![0; count];
        for &c in &membership {
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("community {empty} is empty")));
        }
        Ok(Self { membership, sizes })
    }

    /// Relabels arbitrary labels to contiguous ids in order of first
    /// appearance.
    pub fn from_labels<T: std::hash::Hash + Eq + Copy>(labels: &[T]) -> Self {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let membership: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        let count = ids.len();
        Self::from_dense_unchecked(membership, count)
    }

    pub(crate) fn from_dense_unchecked(membership: Vec<usize>, count: usize) -> Self {
        let mut sizes = vec![0; count];
        for &c in &membership {
            sizes[c] += 1;
        }
        debug_assert!(sizes.iter().all(|&s| s > 0));
        Self { membership, sizes }
    }

    pub fn singletons(node_count: usize) -> Self {
        Self::from_dense_unchecked((0..node_count).collect(), node_count)
    }

    pub fn all_in_one(node_count: usize) -> Self {
        Self::from_dense_unchecked(vec![0; node_count], usize::from(node_count > 0))
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    #[inline]
    pub fn community_of(&self, node: usize) -> usize {
        self.membership[node]
    }

    pub fn community_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (v, &c) in self.membership.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Canonical form: communities renumbered by their smallest member.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.membership)
    }

    /// Equal up to relabeling of communities.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.canonical().membership == other.canonical().membership
    }
}

/// Undirected weighted graph with self-loops, used for aggregated
/// community-level networks.
///
/// A self-loop of weight `w` contributes `w` to its node's strength, so the
/// loop produced by collapsing `l` internal edges carries weight `2l` and
/// strengths stay equal to the degree sums they replace.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strengths: Vec<f64>,
    total_strength: f64,
}

impl WeightedGraph {
    pub fn from_graph(graph: &Graph) -> Self {
        let adjacency: Vec<Vec<(usize, f64)>> = (0..graph.node_count())
            .map(|u| graph.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        Self::from_parts(adjacency, vec![0.0; graph.node_count()])
    }

    /// `adjacency` must be symmetric and loop-free; loops go in `self_loops`.
    pub fn from_parts(adjacency: Vec<Vec<(usize, f64)>>, self_loops: Vec<f64>) -> Self {
        let strengths: Vec<f64> = adjacency
            .iter()
            .zip(&self_loops)
            .map(|(list, &l)| list.iter().map(|&(_, w)| w).sum::<f64>() + l)
            .collect();
        let total_strength = strengths.iter().sum();
        Self {
            adjacency,
            self_loops,
            strengths,
            total_strength,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    #[inline]
    pub fn self_loop(&self, node: usize) -> f64 {
        self.self_loops[node]
    }

    #[inline]
    pub fn strength(&self, node: usize) -> f64 {
        self.strengths[node]
    }

    /// Sum of strengths, i.e. `2m` for an unweighted source graph.
    pub fn total_strength(&self) -> f64 {
        self.total_strength
    }

    /// Weight between distinct nodes `u` and `v` (zero if not adjacent).
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency[u]
            .iter()
            .find(|&&(x, _)| x == v)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn quotient(&self, partition: &Partition) -> Result<WeightedGraph> {
        if partition.node_count() != self.node_count() {
            return Err(Error::NodeSetMismatch(partition.node_count(), self.node_count()));
        }
        let k = partition.community_count();
        let mut loops = vec![0.0; k];
        let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        for u in 0..self.node_count() {
            let cu = partition.community_of(u);
            loops[cu] += self.self_loops[u];
            for &(v, w) in &self.adjacency[u] {
                let cv = partition.community_of(v);
                if cu == cv {
                    // each internal edge is seen from both ends
                    loops[cu] += w;
                } else {
                    *maps[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = maps
            .into_iter()
            .map(|m| {
                let mut list: Vec<(usize, f64)> = m.into_iter().collect();
                list.sort_unstable_by_key(|&(v, _)| v);
                list
            })
            .collect();
        Ok(Self::from_parts(adjacency, loops))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Agglomerative,
    Divisive,
}

#[derive(Debug, Clone)]
enum Levels {
    /// Finest partition plus merges in finest-to-coarsest order. Clusters of
    /// the base are ids `0..k`; merge `i` creates cluster `k + i`.
    Merges {
        base: Partition,
        merges: Vec<(usize, usize)>,
    },
    Explicit(Vec<Partition>),
}

/// Hierarchy of partitions with the modularity of every level.
///
/// Levels are indexed in production order: level 0 is the first partition
/// the algorithm produced (the finest one for agglomerative methods, the
/// coarsest for divisive ones).
#[derive(Debug, Clone)]
pub struct Dendrogram {
    direction: Direction,
    levels: Levels,
    scores: Vec<f64>,
    community_counts: Vec<usize>,
}

impl Dendrogram {
    /// Builds a dendrogram from a finest partition and a sequence of merges
    /// (always given finest-to-coarsest; for divisive methods this is the
    /// reverse of the split order). Modularity of every level is computed
    /// incrementally against `graph`.
    pub fn from_merges(
        graph: &WeightedGraph,
        base: Partition,
        merges: Vec<(usize, usize)>,
        direction: Direction,
    ) -> Result<Self> {
        if base.node_count() != graph.node_count() {
            return Err(Error::NodeSetMismatch(base.node_count(), graph.node_count()));
        }
        let k = base.community_count();
        let two_m = graph.total_strength();
        let quotient = graph.quotient(&base)?;
        let total = k + merges.len();
        let mut alive = vec![false; total];
        let mut tot = vec![0.0; total];
        let mut inner = vec![0.0; total];
        let mut links: Vec<HashMap<usize, f64>> = vec![HashMap::new(); total];
        for c in 0..k {
            alive[c] = true;
            tot[c] = quotient.strength(c);
            inner[c] = quotient.self_loop(c);
            links[c] = quotient.neighbors(c).iter().copied().collect();
        }
        let q_of = |inner: f64, tot: f64| {
            if two_m > 0.0 {
                inner / two_m - (tot / two_m).powi(2)
            } else {
                0.0
            }
        };
        let mut q: f64 = (0..k).map(|c| q_of(inner[c], tot[c])).sum();
        let mut scores = Vec::with_capacity(merges.len() + 1);
        let mut counts = Vec::with_capacity(merges.len() + 1);
        scores.push(q);
        counts.push(k);
        for (i, &(a, b)) in merges.iter().enumerate() {
            let new_id = k + i;
            if a == b || a >= new_id || b >= new_id || !alive[a] || !alive[b] {
                return Err(Error::InvalidPartition(format!("invalid merge ({a}, {b}) at step {i}")));
            }
            let w_ab = links[a].get(&b).copied().unwrap_or(0.0);
            q -= q_of(inner[a], tot[a]) + q_of(inner[b], tot[b]);
            inner[new_id] = inner[a] + inner[b] + 2.0 * w_ab;
            tot[new_id] = tot[a] + tot[b];
            q += q_of(inner[new_id], tot[new_id]);
            let (small, large) = if links[a].len() < links[b].len() { (a, b) } else { (b, a) };
            let mut merged = std::mem::take(&mut links[large]);
            for (c, w) in std::mem::take(&mut links[small]) {
                *merged.entry(c).or_insert(0.0) += w;
            }
            merged.remove(&a);
            merged.remove(&b);
            for (&c, &w) in &merged {
                let back = &mut links[c];
                back.remove(&a);
                back.remove(&b);
                back.insert(new_id, w);
            }
            links[new_id] = merged;
            alive[a] = false;
            alive[b] = false;
            alive[new_id] = true;
            scores.push(q);
            counts.push(k - i - 1);
        }
        if direction == Direction::Divisive {
            scores.reverse();
            counts.reverse();
        }
        Ok(Self {
            direction,
            levels: Levels::Merges { base, merges },
            scores,
            community_counts: counts,
        })
    }

    /// Builds a dendrogram from explicitly materialized levels.
    pub fn from_levels(graph: &WeightedGraph, levels: Vec<Partition>, direction: Direction) -> Result<Self> {
        let mut scores = Vec::with_capacity(levels.len());
        for level in &levels {
            if level.node_count() != graph.node_count() {
                return Err(Error::NodeSetMismatch(level.node_count(), graph.node_count()));
            }
            scores.push(crate::metrics::weighted_modularity(graph, level)?);
        }
        let community_counts = levels.iter().map(Partition::community_count).collect();
        Ok(Self {
            direction,
            levels: Levels::Explicit(levels),
            scores,
            community_counts,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn level_scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn community_count(&self, level: usize) -> usize {
        self.community_counts[level]
    }

    /// Materializes level `level`.
    pub fn level(&self, level: usize) -> Partition {
        match &self.levels {
            Levels::Explicit(levels) => levels[level].clone(),
            Levels::Merges { base, merges } => {
                let applied = match self.direction {
                    Direction::Agglomerative => level,
                    Direction::Divisive => merges.len() - level,
                };
                let k = base.community_count();
                let mut parent: Vec<usize> = (0..k + applied).collect();
                for (i, &(a, b)) in merges[..applied].iter().enumerate() {
                    parent[a] = k + i;
                    parent[b] = k + i;
                }
                let root = |mut c: usize, parent: &mut Vec<usize>| {
                    let start = c;
                    while parent[c] != c {
                        c = parent[c];
                    }
                    let r = c;
                    let mut c = start;
                    while parent[c] != r {
                        let next = parent[c];
                        parent[c] = r;
                        c = next;
                    }
                    r
                };
                let labels: Vec<usize> = base
                    .membership()
                    .iter()
                    .map(|&c| root(c, &mut parent))
                    .collect();
                Partition::from_labels(&labels)
            }
        }
    }
}
