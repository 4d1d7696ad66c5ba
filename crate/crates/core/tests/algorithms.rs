use commbench::algorithms::description_length;
use commbench::metrics::modularity;
use commbench::rng::seeded;
use commbench::{detect, generate, AlgoParams, Algorithm, Graph, LfrConfig, Partition};
use proptest::prelude::*;
use rand::Rng;

fn cliques(sizes: &[usize], bridges: &[(usize, usize)]) -> Graph {
    let mut edges = Vec::new();
    let mut offset = 0;
    for &s in sizes {
        for i in 0..s {
            for j in i + 1..s {
                edges.push((offset + i, offset + j));
            }
        }
        offset += s;
    }
    edges.extend_from_slice(bridges);
    Graph::new(offset, edges).unwrap()
}

fn blocks(sizes: &[usize]) -> Partition {
    Partition::new(sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect()).unwrap()
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut labels, &mut out);
    }
    out
}

/// Two-level map equation in bits, written out term by term.
fn map_equation(graph: &Graph, labels: &[usize]) -> f64 {
    let two_m = 2.0 * graph.edge_count() as f64;
    let modules = labels.iter().max().unwrap() + 1;
    let mut exit = vec![0.0; modules];
    let mut visits: Vec<Vec<f64>> = vec![Vec::new(); modules];
    for v in 0..graph.node_count() {
        let c = labels[v];
        visits[c].push(graph.neighbors(v).len() as f64 / two_m);
        exit[c] += graph.neighbors(v).iter().filter(|&&u| labels[u] != c).count() as f64 / two_m;
    }
    let plogp = |p: f64| if p > 0.0 { p * p.log2() } else { 0.0 };
    let q: f64 = exit.iter().sum();
    let mut total = 0.0;
    if q > 0.0 {
        total -= exit.iter().map(|&e| plogp(e / q)).sum::<f64>() * q;
    }
    for c in 0..modules {
        let stay = exit[c] + visits[c].iter().sum::<f64>();
        if stay == 0.0 {
            continue;
        }
        let h = -plogp(exit[c] / stay) - visits[c].iter().map(|&p| plogp(p / stay)).sum::<f64>();
        total += stay * h;
    }
    total
}

fn all_params(seed: u64) -> AlgoParams {
    AlgoParams::with_seed(seed)
}

#[test]
fn every_algorithm_separates_disjoint_cliques() {
    let g = cliques(&[5, 5], &[]);
    for a in Algorithm::ALL {
        let hits = (0..20)
            .filter(|&s| detect(&g, a, &all_params(s)).unwrap().partition.same_as(&blocks(&[5, 5])))
            .count();
        if a.is_stochastic() {
            assert!(hits > 10, "{a}: {hits}/20");
        } else {
            assert_eq!(hits, 20, "{a}");
        }
    }
}

#[test]
fn bridged_cliques_split_at_the_bridge() {
    let g = cliques(&[5, 5], &[(4, 5)]);
    for a in [
        Algorithm::Radetal,
        Algorithm::Fastgreedy,
        Algorithm::Louvain,
        Algorithm::Walktrap,
        Algorithm::MarkovCluster,
        Algorithm::Infomap,
        Algorithm::LeadingEigenvector,
    ] {
        let d = detect(&g, a, &all_params(3)).unwrap();
        assert!(d.partition.same_as(&blocks(&[5, 5])), "{a}: {:?}", d.partition.membership());
    }
}

#[test]
fn deterministic_given_seed() {
    let net = generate(&LfrConfig::new(300, 10.0, 30, 2.5, 1.5, 0.3, 11)).unwrap();
    for a in Algorithm::ALL {
        let x = detect(&net.graph, a, &all_params(5)).unwrap();
        let y = detect(&net.graph, a, &all_params(5)).unwrap();
        assert_eq!(x.partition.membership(), y.partition.membership(), "{a}");
        assert_eq!(x.converged, y.converged);
    }
}

#[test]
fn outputs_cover_every_node() {
    let net = generate(&LfrConfig::new(200, 8.0, 24, 2.5, 1.5, 0.4, 2)).unwrap();
    for a in Algorithm::ALL {
        let d = detect(&net.graph, a, &all_params(1)).unwrap();
        assert_eq!(d.partition.node_count(), 200, "{a}");
        assert_eq!(d.partition.community_sizes().iter().sum::<usize>(), 200);
    }
}

#[test]
fn description_length_matches_map_equation_oracle() {
    let g = cliques(&[4, 3, 5], &[(0, 4), (5, 7), (1, 11), (2, 9)]);
    let n = g.node_count();
    let mut rng = seeded(4);
    for _ in 0..500 {
        let k = rng.gen_range(1..=n);
        let raw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let p = Partition::from_labels(&raw);
        let ours = description_length(&g, &p).unwrap();
        let oracle = map_equation(&g, p.membership());
        assert!((ours - oracle).abs() < 1e-10, "{raw:?}: {ours} vs {oracle}");
    }
}

#[test]
fn infomap_reaches_exhaustive_optimum_on_small_graphs() {
    let graphs = [
        cliques(&[3, 3], &[(2, 3)]),
        cliques(&[4, 4], &[(3, 4)]),
        cliques(&[3, 3, 3], &[(2, 3), (5, 6), (8, 0)]),
        cliques(&[4, 3], &[(0, 4), (1, 5)]),
    ];
    for g in graphs {
        let best = set_partitions(g.node_count())
            .iter()
            .map(|l| map_equation(&g, l))
            .fold(f64::INFINITY, f64::min);
        let d = detect(&g, Algorithm::Infomap, &all_params(0)).unwrap();
        let found = description_length(&g, &d.partition).unwrap();
        assert!(found <= best + 1e-9, "{found} vs optimum {best}");
    }
}

#[test]
fn spinglass_never_beats_exhaustive_modularity() {
    let graphs = [
        cliques(&[3, 3, 3], &[(2, 3), (5, 6), (8, 0)]),
        cliques(&[4, 5], &[(0, 4), (3, 8)]),
        cliques(&[2, 3, 4], &[(1, 2), (4, 5), (0, 8)]),
    ];
    for g in graphs {
        let best = set_partitions(g.node_count())
            .iter()
            .map(|l| modularity(&g, &Partition::new(l.clone()).unwrap()).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        for seed in 0..5 {
            let d = detect(&g, Algorithm::Spinglass, &all_params(seed)).unwrap();
            let q = modularity(&g, &d.partition).unwrap();
            assert!(q <= best + 1e-12);
            assert!(q >= best - 0.05, "seed {seed}: {q} vs {best}");
        }
    }
}

fn two_components() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (3usize..12, 3usize..12).prop_flat_map(|(a, b)| {
        let n = a + b;
        let left = proptest::collection::vec((0..a, 0..a), 2..3 * a);
        let right = proptest::collection::vec((a..n, a..n), 2..3 * b);
        (Just(n), left, right).prop_map(|(n, l, r)| {
            let edges = l.into_iter().chain(r).filter(|(u, v)| u != v).collect();
            (n, edges)
        })
    })
}

fn dedup(mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    for e in &mut edges {
        *e = (e.0.min(e.1), e.0.max(e.1));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn communities_never_span_components((n, edges) in two_components(), seed in 0u64..1000) {
        let g = Graph::new(n, dedup(edges)).unwrap();
        let components = g.connected_components();
        for a in [
            Algorithm::Radetal,
            Algorithm::Walktrap,
            Algorithm::MarkovCluster,
            Algorithm::LabelPropagation,
            Algorithm::Infomap,
        ] {
            let d = detect(&g, a, &all_params(seed)).unwrap();
            for community in d.partition.communities() {
                let c = components.community_of(community[0]);
                prop_assert!(community.iter().all(|&v| components.community_of(v) == c), "{}", a);
            }
        }
    }

    #[test]
    fn modularity_climbers_stay_nonnegative((n, edges) in two_components(), seed in 0u64..1000) {
        let g = Graph::new(n, dedup(edges)).unwrap();
        let components = g.connected_components();
        prop_assume!(components.community_sizes().iter().filter(|&&s| s > 1).count() >= 2);
        for a in [Algorithm::Louvain, Algorithm::Fastgreedy, Algorithm::LeadingEigenvector] {
            let d = detect(&g, a, &all_params(seed)).unwrap();
            // splitting off one non-trivial component already gives Q > 0
            prop_assert!(modularity(&g, &d.partition).unwrap() > 0.0, "{}", a);
        }
    }
}
