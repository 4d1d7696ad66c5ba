//! Two-level map equation for the undirected random walk.
//!
//! With visit rates `p_v = d_v / 2m`, module flow `p_i` (sum over members)
//! and exit rate `q_i = cut_i / 2m`, the description length is
//! `L = q log q - 2 sum q_i log q_i - sum p_v log p_v + sum (q_i + p_i) log (q_i + p_i)`
//! where `q = sum q_i`.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::AlgoParams;
use crate::error::Result;
use crate::graph::{Graph, Partition, WeightedGraph};
use crate::rng::{seeded, Rng};

const MIN_GAIN: f64 = 1e-12;

fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Module-level bookkeeping over a weighted graph, in units of weight
/// (divided by `2m` only when evaluating logarithms).
struct Modules {
    two_m: f64,
    /// Weight leaving each module.
    cut: Vec<f64>,
    /// Strength total of each module.
    volume: Vec<f64>,
    exit_sum: f64,
    exit_log_sum: f64,
    total_log_sum: f64,
}

impl Modules {
    fn new(graph: &WeightedGraph, community: &[usize], count: usize) -> Self {
        let mut cut = vec![0.0; count];
        let mut volume = vec![0.0; count];
        for v in 0..graph.node_count() {
            let c = community[v];
            volume[c] += graph.strength(v);
            for &(u, w) in graph.neighbors(v) {
                if community[u] != c {
                    cut[c] += w;
                }
            }
        }
        let mut modules = Self {
            two_m: graph.total_strength(),
            cut,
            volume,
            exit_sum: 0.0,
            exit_log_sum: 0.0,
            total_log_sum: 0.0,
        };
        modules.resync();
        modules
    }

    fn resync(&mut self) {
        let t = self.two_m;
        self.exit_sum = self.cut.iter().sum::<f64>() / t;
        self.exit_log_sum = self.cut.iter().map(|&c| plogp(c / t)).sum();
        self.total_log_sum = self.cut.iter().zip(&self.volume).map(|(&c, &v)| plogp((c + v) / t)).sum();
    }

    /// Description length without the constant node-entropy term.
    fn codelength(&self) -> f64 {
        plogp(self.exit_sum) - 2.0 * self.exit_log_sum + self.total_log_sum
    }

    /// Change in the codelength when a node of strength `s` and exit weight
    /// `e` moves from `a` (sharing weight `k_a` with the rest of `a`) to `b`
    /// (sharing `k_b`).
    fn move_delta(&self, s: f64, e: f64, a: usize, k_a: f64, b: usize, k_b: f64) -> f64 {
        let t = self.two_m;
        let cut_a = self.cut[a] - e + 2.0 * k_a;
        let cut_b = self.cut[b] + e - 2.0 * k_b;
        let vol_a = self.volume[a] - s;
        let vol_b = self.volume[b] + s;
        let exit = self.exit_sum + (cut_a - self.cut[a] + cut_b - self.cut[b]) / t;
        let exit_log = self.exit_log_sum - plogp(self.cut[a] / t) - plogp(self.cut[b] / t)
            + plogp(cut_a / t)
            + plogp(cut_b / t);
        let total_log = self.total_log_sum
            - plogp((self.cut[a] + self.volume[a]) / t)
            - plogp((self.cut[b] + self.volume[b]) / t)
            + plogp((cut_a + vol_a) / t)
            + plogp((cut_b + vol_b) / t);
        plogp(exit) - 2.0 * exit_log + total_log - self.codelength()
    }

    fn apply_move(&mut self, s: f64, e: f64, a: usize, k_a: f64, b: usize, k_b: f64) {
        let t = self.two_m;
        let old = [(self.cut[a], self.volume[a]), (self.cut[b], self.volume[b])];
        self.cut[a] += 2.0 * k_a - e;
        self.cut[b] += e - 2.0 * k_b;
        self.volume[a] -= s;
        self.volume[b] += s;
        for (i, &(c, v)) in [a, b].iter().zip(&old) {
            self.exit_sum += (self.cut[*i] - c) / t;
            self.exit_log_sum += plogp(self.cut[*i] / t) - plogp(c / t);
            self.total_log_sum += plogp((self.cut[*i] + self.volume[*i]) / t) - plogp((c + v) / t);
        }
    }
}

/// Map-equation description length of `partition`, in bits.
pub fn description_length(graph: &Graph, partition: &Partition) -> Result<f64> {
    if partition.node_count() != graph.node_count() {
        return Err(crate::error::Error::NodeSetMismatch(partition.node_count(), graph.node_count()));
    }
    if graph.edge_count() == 0 {
        return Err(crate::error::Error::EdgelessGraph);
    }
    let weighted = WeightedGraph::from_graph(graph);
    let modules = Modules::new(&weighted, partition.membership(), partition.community_count());
    Ok((modules.codelength() - node_entropy_term(&weighted)) / std::f64::consts::LN_2)
}

/// `sum p_v log p_v` over the nodes of the original graph.
fn node_entropy_term(graph: &WeightedGraph) -> f64 {
    let t = graph.total_strength();
    (0..graph.node_count()).map(|v| plogp(graph.strength(v) / t)).sum()
}

/// Local moves: each node (in random order) joins the neighboring module
/// that lowers the codelength most, until a full sweep moves nothing.
fn local_moves(graph: &WeightedGraph, rng: &mut Rng) -> (Vec<usize>, bool) {
    let n = graph.node_count();
    let mut community: Vec<usize> = (0..n).collect();
    let mut modules = Modules::new(graph, &community, n);
    let mut link_to = vec![0.0; n];
    let mut touched = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;
    loop {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            let a = community[v];
            let s = graph.strength(v);
            let e = s - graph.self_loop(v);
            for &(u, w) in graph.neighbors(v) {
                let c = community[u];
                if link_to[c] == 0.0 {
                    touched.push(c);
                }
                link_to[c] += w;
            }
            touched.sort_unstable();
            let k_a = link_to[a];
            let mut best = -MIN_GAIN;
            let mut best_c = a;
            let mut ties = 0;
            for &c in &touched {
                if c == a {
                    continue;
                }
                let delta = modules.move_delta(s, e, a, k_a, c, link_to[c]);
                if delta < best - MIN_GAIN {
                    best = delta;
                    best_c = c;
                    ties = 1;
                } else if best_c != a && (delta - best).abs() <= MIN_GAIN {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best_c = c;
                    }
                }
            }
            if best_c != a {
                modules.apply_move(s, e, a, k_a, best_c, link_to[best_c]);
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
        modules.resync();
    }
    (community, any_move)
}

/// Metropolis refinement of a node-level partition. Proposals move a node
/// into the module of a random neighbor; temperatures follow the spinglass
/// schedule, divided by `m` so that one unit corresponds to a single link.
fn anneal(graph: &WeightedGraph, membership: &mut [usize], params: &AlgoParams, rng: &mut Rng) {
    let n = graph.node_count();
    let count = membership.iter().max().map_or(0, |&c| c + 1);
    let mut modules = Modules::new(graph, membership, count);
    let mut current = modules.codelength();
    let mut best = current;
    let mut best_membership = membership.to_vec();
    let scale = 2.0 / graph.total_strength();
    let mut temperature = params.spinglass_initial_temperature;
    while temperature >= params.spinglass_final_temperature {
        for _ in 0..params.spinglass_sweeps_per_temperature.max(1) {
            for _ in 0..n {
                let v = rng.gen_range(0..n);
                let nb = graph.neighbors(v);
                if nb.is_empty() {
                    continue;
                }
                let a = membership[v];
                let b = membership[nb[rng.gen_range(0..nb.len())].0];
                if a == b {
                    continue;
                }
                let (mut k_a, mut k_b) = (0.0, 0.0);
                for &(u, w) in nb {
                    if membership[u] == a {
                        k_a += w;
                    } else if membership[u] == b {
                        k_b += w;
                    }
                }
                let s = graph.strength(v);
                let e = s - graph.self_loop(v);
                let delta = modules.move_delta(s, e, a, k_a, b, k_b);
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / (temperature * scale)).exp() {
                    modules.apply_move(s, e, a, k_a, b, k_b);
                    membership[v] = b;
                    current += delta;
                }
            }
            if current < best - MIN_GAIN {
                modules.resync();
                current = modules.codelength();
                if current < best - MIN_GAIN {
                    best = current;
                    best_membership.copy_from_slice(membership);
                }
            }
        }
        temperature *= params.spinglass_cooling;
    }
    membership.copy_from_slice(&best_membership);
}

/// Greedy map-equation minimization with aggregation, optionally refined
/// by annealing. The all-in-one partition is returned when nothing found
/// describes the walk more compactly.
pub fn infomap(graph: &Graph, params: &AlgoParams) -> Result<Partition> {
    let n = graph.node_count();
    let mut rng = seeded(params.seed);
    let base = WeightedGraph::from_graph(graph);
    let mut level = base.clone();
    let mut membership: Vec<usize> = (0..n).collect();
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
    if params.infomap_anneal {
        anneal(&base, &mut membership, params, &mut rng);
    }
    let found = Partition::from_labels(&membership);
    let found_length = Modules::new(&base, found.membership(), found.community_count()).codelength();
    let whole_length = Modules::new(&base, &vec![0; n], 1).codelength();
    if whole_length <= found_length {
        return Ok(Partition::all_in_one(n));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;

    #[test]
    fn two_module_codelength_by_hand() {
        // two triangles joined by one edge, split into the triangles:
        // 2m = 14, q_i = 1/14, p_i = 7/14
        let g = cliques(&[3, 3], &[(2, 3)]);
        let p = Partition::new(block_membership(&[3, 3])).unwrap();
        let t = 14.0f64;
        let q = 1.0 / t;
        let degrees = [2.0, 2.0, 3.0, 3.0, 2.0, 2.0];
        let node: f64 = degrees.iter().map(|&d| plogp(d / t)).sum();
        let expect = plogp(2.0 * q) - 2.0 * 2.0 * plogp(q) - node + 2.0 * plogp(q + 7.0 / t);
        let got = description_length(&g, &p).unwrap();
        assert!((got - expect / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn all_in_one_is_node_entropy() {
        let g = triangle_ring();
        let t = 2.0 * g.edge_count() as f64;
        let entropy: f64 = (0..12).map(|v| -plogp(g.neighbors(v).len() as f64 / t)).sum();
        let got = description_length(&g, &Partition::all_in_one(12)).unwrap();
        assert!((got - entropy / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn move_delta_matches_recomputation() {
        let g = cliques(&[4, 3, 3], &[(0, 4), (4, 7), (1, 8)]);
        let w = WeightedGraph::from_graph(&g);
        let mut community = vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2];
        let mut modules = Modules::new(&w, &community, 3);
        for (v, b) in [(3, 0), (4, 2), (9, 1), (0, 2)] {
            let a = community[v];
            let (mut k_a, mut k_b) = (0.0, 0.0);
            for &(u, x) in w.neighbors(v) {
                if community[u] == a {
                    k_a += x;
                } else if community[u] == b {
                    k_b += x;
                }
            }
            let s = w.strength(v);
            let before = modules.codelength();
            let delta = modules.move_delta(s, s, a, k_a, b, k_b);
            modules.apply_move(s, s, a, k_a, b, k_b);
            community[v] = b;
            let fresh = Modules::new(&w, &community, 3);
            assert!((fresh.codelength() - (before + delta)).abs() < 1e-12);
            assert!((fresh.codelength() - modules.codelength()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_disjoint_cliques() {
        let g = cliques(&[5, 5], &[]);
        let p = infomap(&g, &AlgoParams::default()).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[5, 5])).unwrap()));
    }

    #[test]
    fn triangle_ring_recovered() {
        let g = super::super::fixtures::triangle_ring();
        let truth = Partition::new(block_membership(&[3, 3, 3, 3])).unwrap();
        for seed in 0..10 {
            let p = infomap(&g, &AlgoParams::with_seed(seed)).unwrap();
            assert!(p.same_as(&truth), "seed {seed}");
        }
    }

    #[test]
    fn never_worse_than_all_in_one() {
        let g = cliques(&[4, 3], &[(0, 4), (1, 5), (2, 6), (3, 4)]);
        let whole = description_length(&g, &Partition::all_in_one(7)).unwrap();
        for seed in 0..10 {
            for anneal in [false, true] {
                let params = AlgoParams { infomap_anneal: anneal, ..AlgoParams::with_seed(seed) };
                let p = infomap(&g, &params).unwrap();
                assert!(description_length(&g, &p).unwrap() <= whole + 1e-12);
            }
        }
    }

    #[test]
    fn annealing_keeps_planted_structure() {
        let g = super::super::fixtures::triangle_ring();
        let params = AlgoParams { infomap_anneal: true, ..AlgoParams::with_seed(4) };
        let p = infomap(&g, &params).unwrap();
        assert!(p.same_as(&Partition::new(block_membership(&[3, 3, 3, 3])).unwrap()));
    }
}
