use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use commbench::harness::{
    artifact_dir, correlate, emit_csv, emit_plot_data, membership_path, read_records, run_sweep, summarize, Flag,
    MuGrid, Parameter, PlotMode, SweepSpec,
};
use commbench::io::read_membership;
use commbench::metrics::{nmi_of, spearman};
use commbench::rng::derive_seed;
use commbench::Algorithm;

fn small(algorithms: Vec<Algorithm>) -> SweepSpec {
    SweepSpec {
        node_counts: vec![60],
        avg_degrees: vec![8.0],
        gammas: vec![2.5],
        betas: vec![1.5],
        mu_grid: MuGrid {
            start: 0.1,
            stop: 0.9,
            step: 0.4,
        },
        replicates: 2,
        algorithms,
        master_seed: 77,
        workers: 2,
        record_runtime: true,
        write_artifacts: true,
        ..SweepSpec::reduced()
    }
}

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap()
}

#[test]
fn shipped_profiles_match_builtin() {
    for (file, builtin) in [("reduced.json", SweepSpec::reduced()), ("full.json", SweepSpec::full())] {
        let text = std::fs::read_to_string(root().join("profiles").join(file)).unwrap();
        let parsed = SweepSpec::parse(&text).unwrap();
        assert_eq!(SweepSpec { output_dir: None, ..parsed }, builtin, "{file}");
    }
    let text = std::fs::read_to_string(root().join("profiles/quick.conf")).unwrap();
    assert!(SweepSpec::parse(&text).is_ok());
}

#[test]
fn sweep_records_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        output_dir: Some(dir.path().to_path_buf()),
        ..small(vec![Algorithm::Louvain, Algorithm::Walktrap, Algorithm::LabelPropagation])
    };
    let out = run_sweep(&spec).unwrap();
    assert!(out.skipped.is_empty());
    assert_eq!(out.records.len(), spec.cells().len() * 2 * 3);

    for r in &out.records {
        assert!((0.0..=1.0).contains(&r.nmi));
        assert!(r.runtime_ms.unwrap() > 0.0);
        assert_eq!(r.seed, derive_seed(77, &r.cell().key(), r.replicate));
        assert_eq!(r.has_flag(Flag::BeyondLimit), r.mu_target > r.mu_limit);
    }
    // mu = 0.9 sits above the limit of a 60-node network
    assert!(out.records.iter().any(|r| r.has_flag(Flag::BeyondLimit)));

    // every record's NMI recomputes from its membership files
    for r in &out.records {
        let planted = artifact_dir(dir.path(), &r.cell(), r.replicate).join("planted.txt");
        let planted = read_membership(BufReader::new(File::open(planted).unwrap())).unwrap();
        let found = read_membership(BufReader::new(File::open(membership_path(dir.path(), r)).unwrap())).unwrap();
        assert_eq!(nmi_of(&planted, &found).unwrap(), r.nmi);
        assert_eq!(found.community_count(), r.communities_found);
        assert_eq!(planted.community_count(), r.communities_planted);
    }
}

#[test]
fn csv_roundtrip_within_precision() {
    let out = run_sweep(&SweepSpec {
        write_artifacts: false,
        ..small(vec![Algorithm::Infomap, Algorithm::Louvain])
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = emit_csv(&out.records, &summarize(&out.records), dir.path()).unwrap();
    let back = read_records(File::open(path).unwrap()).unwrap();
    assert_eq!(back.len(), out.records.len());
    for (a, b) in out.records.iter().zip(&back) {
        assert_eq!((a.algorithm, a.n, a.replicate, a.seed, &a.flags), (b.algorithm, b.n, b.replicate, b.seed, &b.flags));
        assert!((a.nmi - b.nmi).abs() <= 5e-6 * a.nmi.abs().max(1e-300));
        assert!((a.mu_realized - b.mu_realized).abs() <= 5e-6 * a.mu_realized);
    }
}

#[test]
fn repeated_sweeps_are_identical() {
    let spec = SweepSpec {
        record_runtime: false,
        write_artifacts: false,
        ..small(Algorithm::ALL.to_vec())
    };
    let bytes = |workers| {
        let out = run_sweep(&SweepSpec { workers, ..spec.clone() }).unwrap();
        let mut buf = Vec::new();
        commbench::harness::write_records(&out.records, &mut buf).unwrap();
        buf
    };
    assert_eq!(bytes(1), bytes(3));
}

#[test]
fn summaries_are_consistent() {
    let out = run_sweep(&SweepSpec {
        write_artifacts: false,
        replicates: 4,
        ..small(vec![Algorithm::LabelPropagation, Algorithm::Infomap])
    })
    .unwrap();
    let summaries = summarize(&out.records);
    assert_eq!(summaries.len(), 3 * 2);
    for s in &summaries {
        assert_eq!(s.replicates, 4);
        assert!(s.nmi_min <= s.nmi_mean && s.nmi_mean <= s.nmi_max);
        assert!(s.nmi_std >= 0.0);
        assert!(s.runtime_ms_mean.unwrap() > 0.0);
    }
}

/// The mid-size benchmark slice: n = 1000, <k> = 15, gamma = 3, beta = 2.
fn table_slice(algorithms: Vec<Algorithm>, replicates: usize) -> SweepSpec {
    SweepSpec {
        node_counts: vec![1000],
        avg_degrees: vec![15.0],
        gammas: vec![3.0],
        betas: vec![2.0],
        mu_grid: MuGrid {
            start: 0.1,
            stop: 0.8,
            step: 0.1,
        },
        replicates,
        algorithms,
        master_seed: 3,
        workers: 0,
        record_runtime: false,
        write_artifacts: false,
        ..SweepSpec::reduced()
    }
}

#[test]
fn nmi_decays_with_mixing() {
    let spec = table_slice(
        vec![Algorithm::Louvain, Algorithm::Infomap, Algorithm::LabelPropagation, Algorithm::Walktrap],
        10,
    );
    let out = run_sweep(&spec).unwrap();
    assert!(out.skipped.is_empty());
    let summaries = summarize(&out.records);
    for a in &spec.algorithms {
        let (mus, nmis): (Vec<f64>, Vec<f64>) =
            summaries.iter().filter(|s| s.algorithm == *a).map(|s| (s.cell.mu, s.nmi_mean)).unzip();
        assert_eq!(mus.len(), 8);
        let rho = spearman(&mus, &nmis).unwrap();
        assert!(rho <= -0.7, "{a}: {rho}");
    }

    // spread grows where recovery breaks down
    let std_at = |a: Algorithm, lo: f64, hi: f64| {
        let xs: Vec<f64> = summaries
            .iter()
            .filter(|s| s.algorithm == a && s.cell.mu >= lo && s.cell.mu <= hi)
            .map(|s| s.nmi_std)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    for a in [Algorithm::Infomap, Algorithm::LabelPropagation] {
        assert!(std_at(a, 0.5, 0.8) > std_at(a, 0.0, 0.2), "{a}");
    }

    let mu = correlate(&out.records, Parameter::Mu).unwrap();
    assert!(mu.overall < -0.5);
    assert!(correlate(&out.records, Parameter::Gamma).is_err());
}

#[test]
fn plot_files() {
    let spec = SweepSpec {
        avg_degrees: vec![5.0, 15.0, 30.0],
        mu_grid: MuGrid {
            start: 0.1,
            stop: 0.3,
            step: 0.1,
        },
        node_counts: vec![300],
        ..table_slice(vec![Algorithm::Walktrap, Algorithm::Louvain], 1)
    };
    let out = run_sweep(&spec).unwrap();
    let summaries = summarize(&out.records);
    let dir = tempfile::tempdir().unwrap();
    let f1 = emit_plot_data(
        &summaries,
        &PlotMode::Figure1 {
            n: 300,
            avg_degree: 15.0,
            gamma: 3.0,
            beta: 2.0,
        },
        dir.path(),
    )
    .unwrap();
    let text = std::fs::read_to_string(f1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "mu mu_limit louvain walktrap");
    assert_eq!(lines.len(), 2 + 3);

    let f2 = emit_plot_data(
        &summaries,
        &PlotMode::Figure2 {
            algorithm: Algorithm::Walktrap,
            n: 300,
            gamma: 3.0,
            beta: 2.0,
        },
        dir.path(),
    )
    .unwrap();
    let text = std::fs::read_to_string(f2).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "mu k=5 k=15 k=30");
    assert_eq!(text.lines().count(), 2 + 3);
}
