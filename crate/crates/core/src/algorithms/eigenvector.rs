//! Recursive spectral bisection on the modularity matrix.
//!
//! For a group `g` the generalized modularity matrix is
//! `B(g)_ij = A_ij - d_i d_j / 2m - delta_ij (k_i(g) - d_i D(g) / 2m)`, where
//! `k_i(g)` counts the neighbors of `i` inside `g` and `D(g)` is the degree
//! total of `g`. Its leading eigenvector is found by power iteration on
//! `B(g) + sigma I`, `sigma` being the largest absolute row sum, which makes
//! every eigenvalue non-negative so the iteration locks onto the
//! algebraically largest one.

use rand::Rng as _;

use super::{AlgoParams, Detection};
use crate::error::Result;
use crate::graph::{Graph, Partition};
use crate::rng::seeded;

const MIN_GAIN: f64 = 1e-12;

struct Group<'a> {
    graph: &'a Graph,
    nodes: &'a [usize],
    local: &'a [usize],
    two_m: f64,
    degree_total: f64,
    /// `k_i(g) - d_i D(g) / 2m` per local node.
    row_sum: Vec<f64>,
}

impl<'a> Group<'a> {
    fn new(graph: &'a Graph, nodes: &'a [usize], local: &'a [usize], member: &[bool]) -> Self {
        let two_m = 2.0 * graph.edge_count() as f64;
        let degree_total: f64 = nodes.iter().map(|&v| graph.neighbors(v).len() as f64).sum();
        let row_sum = nodes
            .iter()
            .map(|&v| {
                let inside = graph.neighbors(v).iter().filter(|&&u| member[u]).count() as f64;
                inside - graph.neighbors(v).len() as f64 * degree_total / two_m
            })
            .collect();
        Self {
            graph,
            nodes,
            local,
            two_m,
            degree_total,
            row_sum,
        }
    }

    fn degree(&self, i: usize) -> f64 {
        self.graph.neighbors(self.nodes[i]).len() as f64
    }

    /// `out = B(g) x`.
    fn apply(&self, x: &[f64], member: &[bool], out: &mut [f64]) {
        let dx: f64 = (0..x.len()).map(|i| self.degree(i) * x[i]).sum();
        for (i, &v) in self.nodes.iter().enumerate() {
            let ax: f64 = self
                .graph
                .neighbors(v)
                .iter()
                .filter(|&&u| member[u])
                .map(|&u| x[self.local[u]])
                .sum();
            out[i] = ax - self.degree(i) * dx / self.two_m - self.row_sum[i] * x[i];
        }
    }

    /// Upper bound on the absolute row sums of `B(g)`.
    fn shift(&self) -> f64 {
        (0..self.nodes.len())
            .map(|i| {
                let d = self.degree(i);
                let inside = self.row_sum[i] + d * self.degree_total / self.two_m;
                inside + d * self.degree_total / self.two_m + self.row_sum[i].abs()
            })
            .fold(0.0, f64::max)
    }

    /// Modularity gain (times `4m`) of splitting by the signs in `s`.
    fn split_gain(&self, s: &[f64], member: &[bool], scratch: &mut [f64]) -> f64 {
        self.apply(s, member, scratch);
        s.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum()
    }
}

/// Dominant eigenpair of `B(g)` by shifted power iteration, stopped once
/// the Rayleigh quotient changes by less than `eigen_tolerance` relative to
/// its value. Returns the eigenvalue, the vector and whether the iteration
/// converged.
fn leading_pair(group: &Group<'_>, member: &[bool], params: &AlgoParams) -> (f64, Vec<f64>, bool) {
    let len = group.nodes.len();
    let sigma = group.shift();
    // fixed start so the method stays seed-independent
    let mut rng = seeded(len as u64);
    let mut x: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() - 0.5).collect();
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    x.iter_mut().for_each(|a| *a /= norm);
    let mut y = vec![0.0; len];
    let mut previous = f64::NAN;
    for _ in 0..params.eigen_max_iterations {
        group.apply(&x, member, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += sigma * xi;
        }
        let rayleigh: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (-sigma, x, true);
        }
        y.iter_mut().for_each(|a| *a /= norm);
        std::mem::swap(&mut x, &mut y);
        if (rayleigh - previous).abs() <= params.eigen_tolerance * rayleigh.abs() {
            return (rayleigh - sigma, x, true);
        }
        previous = rayleigh;
    }
    let mut bx = vec![0.0; len];
    group.apply(&x, member, &mut bx);
    let lambda = bx.iter().zip(&x).map(|(a, b)| a * b).sum();
    (lambda, x, false)
}

/// Recursive bisection by the sign of the leading eigenvector, keeping a
/// split only when it strictly increases modularity.
pub fn leading_eigenvector(graph: &Graph, params: &AlgoParams) -> Result<Detection> {
    params.validate()?;
    let n = graph.node_count();
    let mut local = vec![0usize; n];
    let mut member = vec![false; n];
    let mut pending: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut done: Vec<Vec<usize>> = Vec::new();
    let mut converged = true;
    while let Some(nodes) = pending.pop() {
        if nodes.len() < 2 {
            done.push(nodes);
            continue;
        }
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
            member[v] = true;
        }
        let group = Group::new(graph, &nodes, &local, &member);
        let (lambda, vector, ok) = leading_pair(&group, &member, params);
        let mut split = None;
        if !ok {
            converged = false;
        } else if lambda > MIN_GAIN {
            let s: Vec<f64> = vector.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
            let mut scratch = vec![0.0; nodes.len()];
            let gain = group.split_gain(&s, &member, &mut scratch) / (2.0 * group.two_m);
            if gain > MIN_GAIN {
                split = Some(s);
            }
        }
        for &v in &nodes {
            member[v] = false;
        }
        match split {
            Some(s) => {
                let (mut plus, mut minus) = (Vec::new(), Vec::new());
                for (&v, &sign) in nodes.iter().zip(&s) {
                    if sign > 0.0 {
                        plus.push(v);
                    } else {
                        minus.push(v);
                    }
                }
                pending.push(minus);
                pending.push(plus);
            }
            None => done.push(nodes),
        }
    }
    let mut membership = vec![0usize; n];
    // order communities by their smallest node for a stable labeling
    done.sort_unstable_by_key(|c| c.iter().copied().min());
    for (c, nodes) in done.iter().enumerate() {
        for &v in nodes {
            membership[v] = c;
        }
    }
    Ok(Detection {
        partition: Partition::new(membership)?,
        converged,
    })
}
