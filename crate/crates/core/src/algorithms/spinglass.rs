//! Potts-model simulated annealing on modularity.
//!
//! Energy is `-m * Q`: the Potts Hamiltonian with unit resolution, measured
//! in edges so that temperatures are on the scale of single links. Each
//! proposal flips one node to another spin state (a neighbor's state half
//! of the time, a uniformly random one otherwise) and is accepted by the
//! Metropolis rule.

use rand::Rng as _;

use super::AlgoParams;
use crate::error::Result;
use crate::graph::{Graph, Partition};
use crate::rng::seeded;

pub fn spinglass(graph: &Graph, params: &AlgoParams) -> Result<Partition> {
    let n = graph.node_count();
    let q = params.spinglass_max_spins.unwrap_or(n).min(n).max(1);
    let m = graph.edge_count() as f64;
    let two_m = 2.0 * m;
    let mut rng = seeded(params.seed);

    let mut spin: Vec<usize> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let mut degree_sum = vec![0.0f64; q];
    let mut internal = vec![0.0f64; q];
    for v in 0..n {
        degree_sum[spin[v]] += graph.neighbors(v).len() as f64;
        for &u in graph.neighbors(v) {
            if u > v && spin[u] == spin[v] {
                internal[spin[v]] += 1.0;
            }
        }
    }
    let energy_of = |internal: &[f64], degree_sum: &[f64]| -> f64 {
        -internal
            .iter()
            .zip(degree_sum)
            .map(|(&l, &d)| l - d * d / (2.0 * two_m))
            .sum::<f64>()
    };
    let mut energy = energy_of(&internal, &degree_sum);
    let mut best_energy = energy;
    let mut best_spin = spin.clone();

    let mut temperature = params.spinglass_initial_temperature;
    let sweeps = params.spinglass_sweeps_per_temperature.max(1);
    while temperature >= params.spinglass_final_temperature {
        for _ in 0..sweeps {
            for _ in 0..n {
                let v = rng.gen_range(0..n);
                let nb = graph.neighbors(v);
                let from = spin[v];
                let to = if !nb.is_empty() && rng.gen::<bool>() {
                    spin[nb[rng.gen_range(0..nb.len())]]
                } else {
                    rng.gen_range(0..q)
                };
                if to == from {
                    continue;
                }
                let d = nb.len() as f64;
                let (mut k_from, mut k_to) = (0.0, 0.0);
                for &u in nb {
                    let s = spin[u];
                    if s == from {
                        k_from += 1.0;
                    } else if s == to {
                        k_to += 1.0;
                    }
                }
                let delta = -(k_to - k_from) + d * (degree_sum[to] - degree_sum[from] + d) / two_m;
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                    spin[v] = to;
                    internal[from] -= k_from;
                    internal[to] += k_to;
                    degree_sum[from] -= d;
                    degree_sum[to] += d;
                    energy += delta;
                }
            }
            if energy < best_energy - 1e-9 {
                // resynchronize to shed accumulated rounding
                energy = energy_of(&internal, &degree_sum);
                if energy < best_energy - 1e-9 {
                    best_energy = energy;
                    best_spin.copy_from_slice(&spin);
                }
            }
        }
        temperature *= params.spinglass_cooling;
    }
    Ok(Partition::from_labels(&best_spin))
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::fixtures::*;

    fn majority(g: &Graph, truth: &Partition) -> usize {
        (0..20)
            .filter(|&seed| spinglass(g, &AlgoParams::with_seed(seed)).unwrap().same_as(truth))
            .count()
    }

    #[test]
    fn two_disjoint_cliques() {
        let g = cliques(&[5, 5], &[]);
        let truth = Partition::new(block_membership(&[5, 5])).unwrap();
        assert!(majority(&g, &truth) > 10);
    }

    #[test]
    fn triangle_ring_recovered() {
        let g = super::super::fixtures::triangle_ring();
        let truth = Partition::new(block_membership(&[3, 3, 3, 3])).unwrap();
        assert!(majority(&g, &truth) > 10);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = super::super::fixtures::triangle_ring();
        let a = spinglass(&g, &AlgoParams::with_seed(9)).unwrap();
        let b = spinglass(&g, &AlgoParams::with_seed(9)).unwrap();
        assert_eq!(a, b);
    }
}
