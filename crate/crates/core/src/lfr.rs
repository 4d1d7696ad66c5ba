//! Planted-partition benchmark networks with power-law degrees and
//! community sizes and a controlled mixing coefficient.
//!
//! Generation runs in three steps: a configuration-model graph is built
//! from a power-law degree sequence, nodes are placed into communities
//! whose sizes follow a second power law, and degree-preserving edge swaps
//! rewire the graph until each node's share of external links approaches
//! the target mixing coefficient.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::metrics;
use crate::rng::{seeded, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrConfig {
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Degree distribution exponent.
    pub gamma: f64,
    /// Community size distribution exponent.
    pub beta: f64,
    /// Target mixing coefficient.
    pub mu: f64,
    /// Defaults to `ceil((1 - mu) * k_min) + 1`.
    pub min_community: Option<usize>,
    /// Defaults to `min(n, ceil((1 - mu) * k_max) + avg_degree)`.
    pub max_community: Option<usize>,
    pub mixing_tolerance: f64,
    /// Swap attempts for rewiring; defaults to `50 * m`.
    pub max_rewire_iterations: Option<usize>,
    /// Generate even when `mu` exceeds the limit implied by the sampled
    /// community sizes (the network is then flagged, not refused).
    #[serde(default)]
    pub allow_beyond_limit: bool,
    pub seed: u64,
}

impl LfrConfig {
    pub fn new(n: usize, avg_degree: f64, max_degree: usize, gamma: f64, beta: f64, mu: f64, seed: u64) -> Self {
        Self {
            n,
            avg_degree,
            max_degree,
            gamma,
            beta,
            mu,
            min_community: None,
            max_community: None,
            mixing_tolerance: 0.02,
            max_rewire_iterations: None,
            allow_beyond_limit: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return bad(format!("mu = {} must lie in (0, 1)", self.mu));
        }
        if self.gamma.is_nan() || self.gamma <= 1.0 {
            return bad(format!("gamma = {} must exceed 1", self.gamma));
        }
        if self.beta.is_nan() || self.beta < 1.0 {
            return bad(format!("beta = {} must be at least 1", self.beta));
        }
        if !(self.avg_degree >= 1.0 && self.avg_degree <= self.max_degree as f64 && self.max_degree < self.n) {
            return bad(format!(
                "need 1 <= avg_degree ({}) <= max_degree ({}) <= n - 1 ({})",
                self.avg_degree,
                self.max_degree,
                self.n - 1
            ));
        }
        if let (Some(lo), Some(hi)) = (self.min_community, self.max_community) {
            if lo > hi {
                return bad(format!("min_community {lo} > max_community {hi}"));
            }
        }
        if let Some(lo) = self.min_community {
            if lo == 0 {
                return bad("min_community must be positive".into());
            }
        }
        if let Some(hi) = self.max_community {
            if hi > self.n {
                return bad(format!("max_community {hi} exceeds n = {}", self.n));
            }
        }
        if self.mixing_tolerance <= 0.0 || self.mixing_tolerance.is_nan() {
            return bad("mixing_tolerance must be positive".into());
        }
        Ok(())
    }

    /// Smallest degree of the sampled sequence.
    pub fn min_degree(&self) -> Result<usize> {
        let k_min = solve_min_degree(self.avg_degree, self.max_degree as f64, self.gamma)?;
        Ok((k_min.round() as usize).max(1))
    }

    /// Community size bounds, filling unset ones with the defaults.
    pub fn community_bounds(&self) -> Result<(usize, usize)> {
        let k_min = self.min_degree()? as f64;
        let keep = 1.0 - self.mu;
        let lo = self
            .min_community
            .unwrap_or_else(|| (keep * k_min).ceil() as usize + 1);
        let hi = self.max_community.unwrap_or_else(|| {
            let raw = (keep * self.max_degree as f64).ceil() + self.avg_degree;
            (raw.ceil() as usize).min(self.n)
        });
        if lo > hi {
            return Err(Error::InvalidConfig(format!(
                "community bounds [{lo}, {hi}] are empty"
            )));
        }
        Ok((lo, hi))
    }
}

/// `(n - max_community) / n`: above this mixing value the largest community
/// has more external than internal links on average.
pub fn mu_limit(n: usize, max_community: usize) -> Result<f64> {
    if max_community == 0 || max_community > n {
        return Err(Error::InvalidConfig(format!(
            "max community {max_community} must lie in [1, {n}]"
        )));
    }
    Ok((n - max_community) as f64 / n as f64)
}

/// Mean of the continuous power law `x^-gamma` on `[a, b]`.
fn continuous_mean(a: f64, b: f64, gamma: f64) -> f64 {
    if (b - a).abs() < 1e-12 {
        return a;
    }
    let integral = |p: f64| -> f64 {
        // integral of x^-p over [a, b]
        if (p - 1.0).abs() < 1e-12 {
            (b / a).ln()
        } else {
            (b.powf(1.0 - p) - a.powf(1.0 - p)) / (1.0 - p)
        }
    };
    integral(gamma - 1.0) / integral(gamma)
}

/// Real lower cutoff whose continuous power-law mean on `[k_min, k_max]`
/// equals `avg`, by bisection on `[1, k_max]`.
pub fn solve_min_degree(avg: f64, k_max: f64, gamma: f64) -> Result<f64> {
    if avg > k_max || avg < 1.0 {
        return Err(Error::Infeasible(format!("average degree {avg} outside [1, {k_max}]")));
    }
    if (avg - k_max).abs() < 1e-12 {
        return Ok(k_max);
    }
    let (mut lo, mut hi) = (1.0, k_max);
    if continuous_mean(lo, k_max, gamma) > avg {
        return Err(Error::Infeasible(format!(
            "average degree {avg} below the smallest attainable mean {:.3} for k_max = {k_max}, gamma = {gamma}",
            continuous_mean(lo, k_max, gamma)
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if continuous_mean(mid, k_max, gamma) < avg {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse-CDF draw from the continuous power law on `[a, b]`.
fn draw_continuous(rng: &mut Rng, a: f64, b: f64, exponent: f64) -> f64 {
    let u: f64 = rng.gen();
    if (exponent - 1.0).abs() < 1e-12 {
        a * (b / a).powf(u)
    } else {
        let e = 1.0 - exponent;
        (a.powf(e) + u * (b.powf(e) - a.powf(e))).powf(1.0 / e)
    }
}

/// Power-law degree sequence on `[k_min, k_max]` with an even sum.
///
/// The lower cutoff is solved on the continuous mean; each degree is an
/// inverse-CDF draw from the continuous law rounded to the nearest integer,
/// which keeps the empirical mean on target.
pub fn sample_powerlaw_degrees(config: &LfrConfig, rng: &mut Rng) -> Result<Vec<usize>> {
    config.validate()?;
    let k_max = config.max_degree;
    let a = solve_min_degree(config.avg_degree, k_max as f64, config.gamma)?;
    let mut degrees: Vec<usize> = if (a - k_max as f64).abs() < 1e-9 {
        vec![k_max; config.n]
    } else {
        (0..config.n)
            .map(|_| {
                let x = draw_continuous(rng, a, k_max as f64, config.gamma);
                (x.round() as usize).clamp(1, k_max)
            })
            .collect()
    };
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let below: Vec<usize> = (0..config.n).filter(|&v| degrees[v] < k_max).collect();
        if let Some(&v) = below.choose(rng) {
            degrees[v] += 1;
        } else {
            let v = rng.gen_range(0..config.n);
            degrees[v] -= 1;
        }
    }
    Ok(degrees)
}

/// Discrete inverse-CDF sampler for `P(s) ~ s^-exponent` on `[lo, hi]`.
struct DiscretePowerLaw {
    lo: usize,
    cumulative: Vec<f64>,
}

impl DiscretePowerLaw {
    fn new(lo: usize, hi: usize, exponent: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = (lo..=hi)
            .map(|s| {
                acc += (s as f64).powf(-exponent);
                acc
            })
            .collect();
        Self { lo, cumulative }
    }

    fn draw(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty support");
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.lo + idx.min(self.cumulative.len() - 1)
    }
}

/// Community sizes in `[min_community, max_community]` summing exactly to
/// `n`. Sizes are drawn until the total reaches `n`; the last draw is cut to
/// close the sum, and a remainder too small to stand alone is spread over
/// communities that still have room.
pub fn sample_community_sizes(config: &LfrConfig, rng: &mut Rng) -> Result<Vec<usize>> {
    let (lo, hi) = config.community_bounds()?;
    sample_sizes(config.n, lo, hi, config.beta, rng)
}

pub(crate) fn sample_sizes(n: usize, lo: usize, hi: usize, beta: f64, rng: &mut Rng) -> Result<Vec<usize>> {
    if lo == 0 || lo > hi || n.div_ceil(hi) > n / lo {
        return Err(Error::Infeasible(format!(
            "no set of community sizes in [{lo}, {hi}] sums to {n}"
        )));
    }
    let law = DiscretePowerLaw::new(lo, hi, beta);
    let mut sizes = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let s = law.draw(rng);
        if s <= remaining {
            sizes.push(s);
            remaining -= s;
        } else if remaining >= lo {
            sizes.push(remaining);
            remaining = 0;
        } else {
            break;
        }
    }
    if remaining > 0 {
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.shuffle(rng);
        for i in order {
            let room = hi - sizes[i];
            let add = room.min(remaining);
            sizes[i] += add;
            remaining -= add;
            if remaining == 0 {
                break;
            }
        }
        if remaining > 0 {
            return Err(Error::Infeasible(format!(
                "could not close the community sizes to {n} within [{lo}, {hi}]"
            )));
        }
    }
    Ok(sizes)
}

/// Random stub matching followed by degree-preserving double-edge swaps that
/// remove self-loops and multi-edges, so the output realizes `degrees`
/// exactly.
pub fn configuration_model(degrees: &[usize], rng: &mut Rng) -> Result<Graph> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::InvalidConfig("degree sum is odd".into()));
    }
    let n = degrees.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty degree sequence".into()));
    }
    let mut stubs: Vec<usize> = Vec::with_capacity(total);
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v, d));
    }
    stubs.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = stubs
        .chunks_exact(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    let m = edges.len();

    let mut multiplicity: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::with_capacity(m);
    for &e in &edges {
        *multiplicity.entry(e).or_insert(0) += 1;
    }
    let is_bad = |e: (usize, usize), mult: &std::collections::HashMap<(usize, usize), usize>| {
        e.0 == e.1 || mult[&e] > 1
    };
    let budget = 100 * m.max(1) + 1000;
    let mut attempts = 0;
    loop {
        let bad: Vec<usize> = (0..m).filter(|&i| is_bad(edges[i], &multiplicity)).collect();
        if bad.is_empty() {
            break;
        }
        for i in bad {
            while is_bad(edges[i], &multiplicity) {
                attempts += 1;
                if attempts > budget {
                    return Err(Error::Infeasible(
                        "degree sequence not realizable as a simple graph within the swap budget".into(),
                    ));
                }
                let j = rng.gen_range(0..m);
                if j == i {
                    continue;
                }
                let (a, b) = edges[i];
                let (c, d) = if rng.gen::<bool>() { edges[j] } else { (edges[j].1, edges[j].0) };
                let e1 = (a.min(c), a.max(c));
                let e2 = (b.min(d), b.max(d));
                if e1.0 == e1.1 || e2.0 == e2.1 || e1 == e2 {
                    continue;
                }
                if multiplicity.get(&e1).copied().unwrap_or(0) > 0 || multiplicity.get(&e2).copied().unwrap_or(0) > 0 {
                    continue;
                }
                for old in [edges[i], edges[j]] {
                    let c = multiplicity.get_mut(&old).expect("tracked edge");
                    *c -= 1;
                    if *c == 0 {
                        multiplicity.remove(&old);
                    }
                }
                edges[i] = e1;
                edges[j] = e2;
                multiplicity.insert(e1, 1);
                multiplicity.insert(e2, 1);
            }
        }
    }
    Graph::new(n, edges)
}

/// Nodes' internal-degree needs under mixing `mu`, rounded up; a community
/// can host a node only if it is strictly larger than this.
fn internal_need(degree: usize, mu: f64) -> usize {
    ((1.0 - mu) * degree as f64 - 1e-9).ceil().max(0.0) as usize
}

const SIZE_REDRAWS: usize = 100;

/// Whether every node can be placed in a community strictly larger than its
/// internal need. Eligible communities are nested by size, so it suffices
/// that for every threshold `t` the nodes needing at least `t` fit into the
/// communities larger than `t`.
pub fn assignment_feasible(degrees: &[usize], sizes: &[usize], mu: f64) -> bool {
    let mut needs: Vec<usize> = degrees.iter().map(|&d| internal_need(d, mu)).collect();
    needs.sort_unstable_by(|a, b| b.cmp(a));
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut capacity = 0;
    let mut next = 0;
    for (placed, &t) in needs.iter().enumerate() {
        while next < sorted.len() && sorted[next] > t {
            capacity += sorted[next];
            next += 1;
        }
        if placed + 1 > capacity {
            return false;
        }
    }
    true
}

/// Places nodes into communities of the given sizes so that every node's
/// internal stubs fit inside its community. Nodes pick a random community
/// large enough for them; a full community accepts the newcomer by evicting
/// a random member back into the queue.
pub fn assign_communities(degrees: &[usize], sizes: &[usize], mu: f64, rng: &mut Rng) -> Result<Partition> {
    let n = degrees.len();
    if sizes.iter().sum::<usize>() != n {
        return Err(Error::InvalidConfig(format!(
            "community sizes sum to {} but there are {n} nodes",
            sizes.iter().sum::<usize>()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidConfig("empty community size".into()));
    }
    // communities by decreasing size, so the eligible set is a prefix
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let eligible_prefix = |need: usize| by_size.partition_point(|&c| sizes[c] > need);
    for (v, &d) in degrees.iter().enumerate() {
        if eligible_prefix(internal_need(d, mu)) == 0 {
            return Err(Error::Infeasible(format!(
                "node {v} needs {} internal links but the largest community has {} nodes",
                internal_need(d, mu),
                sizes[by_size[0]]
            )));
        }
    }

    if !assignment_feasible(degrees, sizes, mu) {
        return Err(Error::Infeasible(
            "community sizes cannot host the internal degrees of the nodes".into(),
        ));
    }

    let mut members: Vec<Vec<usize>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut queue: Vec<usize> = (0..n).collect();
    queue.shuffle(rng);
    let budget = 1000 * n + 10_000;
    let mut steps = 0;
    while let Some(v) = queue.pop() {
        steps += 1;
        if steps > budget {
            return Err(Error::Infeasible("community assignment did not converge".into()));
        }
        let prefix = eligible_prefix(internal_need(degrees[v], mu));
        let c = by_size[rng.gen_range(0..prefix)];
        if members[c].len() < sizes[c] {
            members[c].push(v);
        } else {
            let k = rng.gen_range(0..members[c].len());
            let evicted = std::mem::replace(&mut members[c][k], v);
            queue.push(evicted);
        }
    }
    let mut membership = vec![0; n];
    for (c, list) in members.iter().enumerate() {
        for &v in list {
            membership[v] = c;
        }
    }
    Ok(Partition::from_dense_unchecked(membership, sizes.len()))
}

#[derive(Debug, Clone)]
pub struct RewireOutcome {
    pub graph: Graph,
    /// Per-node mixing after rewiring.
    pub realized_mu: f64,
    pub swaps: usize,
    /// False when the swap budget ran out with the realized mixing still
    /// outside tolerance.
    pub converged: bool,
}

struct SwapState {
    adjacency: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
    excess: Vec<i64>,
}

impl SwapState {
    fn has(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.edges.remove(&(u.min(v), u.max(v)));
        let pu = self.adjacency[u].iter().position(|&x| x == v).expect("edge present");
        self.adjacency[u].swap_remove(pu);
        let pv = self.adjacency[v].iter().position(|&x| x == u).expect("edge present");
        self.adjacency[v].swap_remove(pv);
    }

    fn add(&mut self, u: usize, v: usize) {
        self.edges.insert((u.min(v), u.max(v)));
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
    }
}

/// Degree-preserving double-edge swaps driving every node's external degree
/// toward its target `degree - internal`, where the internal share is
/// `(1 - mu) * degree` randomly rounded. Swaps are accepted when they do not
/// increase the summed squared deviation.
pub fn rewire_to_mixing(graph: &Graph, planted: &Partition, config: &LfrConfig, rng: &mut Rng) -> Result<RewireOutcome> {
    if planted.node_count() != graph.node_count() {
        return Err(Error::NodeSetMismatch(planted.node_count(), graph.node_count()));
    }
    let max_size = *planted.community_sizes().iter().max().expect("non-empty partition");
    let limit = mu_limit(graph.node_count(), max_size)?;
    if config.mu > limit && !config.allow_beyond_limit {
        return Err(Error::MixingAboveLimit { mu: config.mu, limit });
    }
    let n = graph.node_count();
    let current = metrics::measured_mixing(graph, planted)?.per_node;
    if (current - config.mu).abs() <= config.mixing_tolerance {
        return Ok(RewireOutcome {
            graph: graph.clone(),
            realized_mu: current,
            swaps: 0,
            converged: true,
        });
    }

    let membership = planted.membership();
    let communities = planted.communities();
    let mut state = SwapState {
        adjacency: (0..n).map(|v| graph.neighbors(v).to_vec()).collect(),
        edges: graph.edges().collect(),
        excess: vec![0; n],
    };
    for v in 0..n {
        let d = graph.neighbors(v).len();
        let want_in = (1.0 - config.mu) * d as f64;
        let mut internal = want_in.floor() as usize;
        if rng.gen::<f64>() < want_in - want_in.floor() {
            internal += 1;
        }
        internal = internal.min(planted.community_sizes()[membership[v]] - 1).min(d);
        let target_ext = (d - internal) as i64;
        let ext = graph.neighbors(v).iter().filter(|&&u| membership[u] != membership[v]).count() as i64;
        state.excess[v] = ext - target_ext;
    }

    let budget = config
        .max_rewire_iterations
        .unwrap_or(50 * graph.edge_count().max(1));
    let mut swaps = 0;
    let mut active: Vec<usize> = Vec::new();
    let mut iter = 0;
    while iter < budget {
        if iter % n.max(64) == 0 || active.is_empty() {
            active = (0..n).filter(|&v| state.excess[v] != 0).collect();
            if active.is_empty() {
                break;
            }
        }
        iter += 1;
        let v = active[rng.gen_range(0..active.len())];
        let ev = state.excess[v];
        if ev > 0 {
            // trade v's external edge (v, b) and c's external edge (c, d)
            // for the internal edge (v, c) and the edge (b, d)
            let ext: Vec<usize> = state.adjacency[v].iter().copied().filter(|&u| membership[u] != membership[v]).collect();
            let Some(&b) = ext.choose(rng) else { continue };
            let comm = &communities[membership[v]];
            let c = comm[rng.gen_range(0..comm.len())];
            if c == v || state.has(v, c) {
                continue;
            }
            let c_ext: Vec<usize> = state.adjacency[c].iter().copied().filter(|&u| membership[u] != membership[c]).collect();
            let Some(&d) = c_ext.choose(rng) else { continue };
            if d == b || state.has(b, d) {
                continue;
            }
            let bd_internal = membership[b] == membership[d];
            let mut delta = delta_sq(state.excess[v], -1) + delta_sq(state.excess[c], -1);
            if bd_internal {
                delta += delta_sq(state.excess[b], -1) + delta_sq(state.excess[d], -1);
            }
            if delta > 0 {
                continue;
            }
            state.remove(v, b);
            state.remove(c, d);
            state.add(v, c);
            state.add(b, d);
            state.excess[v] -= 1;
            state.excess[c] -= 1;
            if bd_internal {
                state.excess[b] -= 1;
                state.excess[d] -= 1;
            }
            swaps += 1;
        } else if ev < 0 {
            // trade internal edges (v, c) and (x, y) from another community
            // for the external edges (v, x) and (c, y)
            let int: Vec<usize> = state.adjacency[v].iter().copied().filter(|&u| membership[u] == membership[v]).collect();
            let Some(&c) = int.choose(rng) else { continue };
            let x = active[rng.gen_range(0..active.len())];
            if membership[x] == membership[v] || state.has(v, x) {
                continue;
            }
            let x_int: Vec<usize> = state.adjacency[x].iter().copied().filter(|&u| membership[u] == membership[x]).collect();
            let Some(&y) = x_int.choose(rng) else { continue };
            if c == y || state.has(c, y) {
                continue;
            }
            let delta = delta_sq(state.excess[v], 1)
                + delta_sq(state.excess[c], 1)
                + delta_sq(state.excess[x], 1)
                + delta_sq(state.excess[y], 1);
            if delta > 0 {
                continue;
            }
            state.remove(v, c);
            state.remove(x, y);
            state.add(v, x);
            state.add(c, y);
            for w in [v, c, x, y] {
                state.excess[w] += 1;
            }
            swaps += 1;
        }
    }

    let adjacency: Vec<Vec<usize>> = state
        .adjacency
        .into_iter()
        .map(|mut l| {
            l.sort_unstable();
            l
        })
        .collect();
    let out = Graph::from_sorted_adjacency(adjacency);
    let realized = metrics::measured_mixing(&out, planted)?.per_node;
    Ok(RewireOutcome {
        graph: out,
        realized_mu: realized,
        swaps,
        converged: (realized - config.mu).abs() <= config.mixing_tolerance,
    })
}

/// Change of `e^2` when `e` moves by `step`.
fn delta_sq(e: i64, step: i64) -> i64 {
    (e + step) * (e + step) - e * e
}

#[derive(Debug, Clone, Serialize)]
pub struct PlantedNetwork {
    #[serde(skip)]
    pub graph: Graph,
    #[serde(skip)]
    pub planted: Partition,
    /// Per-node mixing of the planted partition.
    pub realized_mu: f64,
    /// Fraction of edges between communities.
    pub realized_mu_global: f64,
    pub mu_limit: f64,
    pub max_community_size: usize,
    pub community_count: usize,
    /// Size bounds in effect; the lower one may sit above the default when
    /// the default could not host the degree sequence.
    pub community_bounds: (usize, usize),
    pub rewire_swaps: usize,
    /// Realized mixing within tolerance of the target.
    pub converged: bool,
    /// Target mixing exceeds `mu_limit`.
    pub beyond_limit: bool,
    pub config: LfrConfig,
    pub seed_used: u64,
}

/// Community sizes that can host `degrees` (see [`assignment_feasible`]),
/// together with the size bounds in effect. Sizes are redrawn up to
/// `SIZE_REDRAWS` times; when the lower bound is the default one and no draw
/// fits, it is raised by one and the redraws start over.
pub fn draw_feasible_sizes(config: &LfrConfig, degrees: &[usize], rng: &mut Rng) -> Result<(Vec<usize>, (usize, usize))> {
    let (mut lo, hi) = config.community_bounds()?;
    loop {
        for _ in 0..=SIZE_REDRAWS {
            let sizes = sample_sizes(config.n, lo, hi, config.beta, rng)?;
            if assignment_feasible(degrees, &sizes, config.mu) {
                return Ok((sizes, (lo, hi)));
            }
        }
        if config.min_community.is_some() || lo >= hi || config.n.div_ceil(hi) > config.n / (lo + 1) {
            return Err(Error::Infeasible(format!(
                "no community size draw in [{lo}, {hi}] could host the degree sequence"
            )));
        }
        lo += 1;
    }
}

/// Runs the three generation steps with an RNG seeded from `config.seed`.
pub fn generate(config: &LfrConfig) -> Result<PlantedNetwork> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    let degrees = sample_powerlaw_degrees(config, &mut rng)?;
    let (sizes, bounds) = draw_feasible_sizes(config, &degrees, &mut rng)?;
    let max_size = *sizes.iter().max().expect("at least one community");
    let limit = mu_limit(config.n, max_size)?;
    if config.mu > limit && !config.allow_beyond_limit {
        return Err(Error::MixingAboveLimit { mu: config.mu, limit });
    }
    let base = configuration_model(&degrees, &mut rng)?;
    let planted = assign_communities(&degrees, &sizes, config.mu, &mut rng)?;
    let outcome = rewire_to_mixing(&base, &planted, config, &mut rng)?;
    debug_assert_eq!(outcome.graph.degrees(), degrees);
    let mixing = metrics::measured_mixing(&outcome.graph, &planted)?;
    Ok(PlantedNetwork {
        realized_mu: mixing.per_node,
        realized_mu_global: mixing.global,
        mu_limit: limit,
        max_community_size: max_size,
        community_count: planted.community_count(),
        community_bounds: bounds,
        rewire_swaps: outcome.swaps,
        converged: outcome.converged,
        beyond_limit: config.mu > limit,
        graph: outcome.graph,
        planted,
        config: config.clone(),
        seed_used: config.seed,
    })
}
