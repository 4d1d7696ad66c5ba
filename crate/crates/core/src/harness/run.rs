use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::algorithms::{detect, AlgoParams, Algorithm};
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::io::write_membership;
use crate::lfr::{generate, LfrConfig, PlantedNetwork};
use crate::metrics::{modularity, nmi_of};
use crate::rng::derive_seed;

use super::spec::{Cell, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    /// Target mixing above the limit of the planted structure.
    BeyondLimit,
    /// Rewiring ran out of budget before reaching the target mixing.
    MixingOffTarget,
    /// The algorithm hit an iteration cap; its best-effort partition was
    /// scored.
    NotConverged,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::BeyondLimit => "beyond_limit",
            Flag::MixingOffTarget => "mixing_off_target",
            Flag::NotConverged => "not_converged",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beyond_limit" => Ok(Flag::BeyondLimit),
            "mixing_off_target" => Ok(Flag::MixingOffTarget),
            "not_converged" => Ok(Flag::NotConverged),
            other => Err(Error::InvalidConfig(format!("unknown flag `{other}`"))),
        }
    }
}

/// One algorithm applied to one generated network.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub gamma: f64,
    pub beta: f64,
    pub mu_target: f64,
    pub mu_realized: f64,
    pub mu_limit: f64,
    pub replicate: usize,
    pub seed: u64,
    pub nmi: f64,
    pub modularity: f64,
    pub communities_found: usize,
    pub communities_planted: usize,
    pub runtime_ms: Option<f64>,
    pub flags: Vec<Flag>,
}

impl RunRecord {
    pub fn cell(&self) -> Cell {
        Cell {
            n: self.n,
            avg_degree: self.avg_degree,
            max_degree: self.max_degree,
            gamma: self.gamma,
            beta: self.beta,
            mu: self.mu_target,
        }
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }
}

/// A grid cell dropped because one of its networks could not be generated.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub cell_key: String,
    pub replicate: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Ordered by cell (grid order), replicate, then algorithm.
    pub records: Vec<RunRecord>,
    pub skipped: Vec<SkippedCell>,
}

/// Directory holding the memberships of one replicate of one cell.
pub fn artifact_dir(root: &Path, cell: &Cell, replicate: usize) -> PathBuf {
    root.join("runs").join(cell.key().replace(';', "_")).join(format!("r{replicate}"))
}

/// Membership file of one algorithm's output, next to `planted.txt`.
pub fn membership_path(root: &Path, record: &RunRecord) -> PathBuf {
    artifact_dir(root, &record.cell(), record.replicate).join(format!("{}.txt", record.algorithm))
}

fn write_partition(path: &Path, partition: &Partition) -> Result<()> {
    let file = fs::File::create(path)?;
    write_membership(partition, std::io::BufWriter::new(file))
}

fn run_unit(
    spec: &SweepSpec,
    cell: &Cell,
    replicate: usize,
) -> std::result::Result<Vec<RunRecord>, SkippedCell> {
    let key = cell.key();
    let seed = derive_seed(spec.master_seed, &key, replicate);
    let config = LfrConfig {
        allow_beyond_limit: true,
        ..LfrConfig::new(cell.n, cell.avg_degree, cell.max_degree, cell.gamma, cell.beta, cell.mu, seed)
    };
    let skipped = |reason: String| SkippedCell {
        cell_key: key.clone(),
        replicate,
        reason,
    };
    let net: PlantedNetwork = generate(&config).map_err(|e| skipped(e.to_string()))?;

    let dir = match (&spec.output_dir, spec.write_artifacts) {
        (Some(root), true) => {
            let dir = artifact_dir(root, cell, replicate);
            fs::create_dir_all(&dir).map_err(|e| skipped(e.to_string()))?;
            write_partition(&dir.join("planted.txt"), &net.planted).map_err(|e| skipped(e.to_string()))?;
            Some(dir)
        }
        _ => None,
    };

    let mut records = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let params = AlgoParams {
            seed,
            ..spec.params.clone()
        };
        let start = Instant::now();
        let detection = detect(&net.graph, algorithm, &params).map_err(|e| skipped(format!("{algorithm}: {e}")))?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let found = detection.partition;
        let nmi = nmi_of(&net.planted, &found).map_err(|e| skipped(e.to_string()))?;
        let q = modularity(&net.graph, &found).unwrap_or(f64::NAN);
        if let Some(dir) = &dir {
            write_partition(&dir.join(format!("{algorithm}.txt")), &found).map_err(|e| skipped(e.to_string()))?;
        }
        let mut flags = Vec::new();
        if net.beyond_limit {
            flags.push(Flag::BeyondLimit);
        }
        if !net.converged {
            flags.push(Flag::MixingOffTarget);
        }
        if !detection.converged {
            flags.push(Flag::NotConverged);
        }
        records.push(RunRecord {
            algorithm,
            n: cell.n,
            avg_degree: cell.avg_degree,
            max_degree: cell.max_degree,
            gamma: cell.gamma,
            beta: cell.beta,
            mu_target: cell.mu,
            mu_realized: net.realized_mu,
            mu_limit: net.mu_limit,
            replicate,
            seed,
            nmi,
            modularity: q,
            communities_found: found.community_count(),
            communities_planted: net.community_count,
            runtime_ms: spec.record_runtime.then_some(elapsed.max(1e-6)),
            flags,
        });
    }
    Ok(records)
}

/// Generates every (cell, replicate) network and runs every algorithm on
/// it. Units run in parallel on `spec.workers` threads; the output order
/// and content do not depend on scheduling. A cell with any network that
/// cannot be generated is dropped as a whole and reported in `skipped`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let cells = spec.cells();
    let units: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.replicates).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        units
            .par_iter()
            .map(|&(c, r)| run_unit(spec, &cells[c], r))
            .collect()
    });

    let mut outcome = SweepOutcome::default();
    for (c, chunk) in results.chunks(spec.replicates).enumerate() {
        let failures: Vec<SkippedCell> = chunk.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
        if failures.is_empty() {
            for r in chunk {
                outcome.records.extend(r.as_ref().expect("no failures").iter().cloned());
            }
        } else {
            debug_assert!(failures.iter().all(|f| f.cell_key == cells[c].key()));
            outcome.skipped.extend(failures);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::spec::MuGrid;

    fn tiny(algorithms: Vec<Algorithm>) -> SweepSpec {
        SweepSpec {
            node_counts: vec![60],
            avg_degrees: vec![6.0],
            gammas: vec![2.5],
            betas: vec![1.5],
            mu_grid: MuGrid {
                start: 0.2,
                stop: 0.2,
                step: 0.1,
            },
            replicates: 2,
            algorithms,
            workers: 2,
            write_artifacts: false,
            ..SweepSpec::reduced()
        }
    }

    #[test]
    fn record_count() {
        let spec = tiny(vec![Algorithm::Louvain, Algorithm::LabelPropagation, Algorithm::Walktrap]);
        let out = run_sweep(&spec).unwrap();
        assert!(out.skipped.is_empty());
        assert_eq!(out.records.len(), 6);
        assert_eq!(out.records[0].replicate, 0);
        assert_eq!(out.records[3].replicate, 1);
        assert_eq!(out.records[1].algorithm, Algorithm::LabelPropagation);
        for r in &out.records {
            assert!((0.0..=1.0).contains(&r.nmi));
            assert!(r.runtime_ms.unwrap() > 0.0);
            assert_eq!(r.seed, derive_seed(spec.master_seed, &r.cell().key(), r.replicate));
        }
    }

    #[test]
    fn infeasible_cells_are_skipped() {
        // a maximum degree of 18 does not fit in 10 nodes
        let mut spec = tiny(vec![Algorithm::Louvain]);
        spec.node_counts = vec![10, 60];
        let out = run_sweep(&spec).unwrap();
        assert_eq!(out.skipped.len(), 2);
        assert!(out.skipped[0].cell_key.starts_with("n=10;"));
        assert_eq!(out.records.len(), 2);
        let skipped_keys: Vec<&str> = out.skipped.iter().map(|s| s.cell_key.as_str()).collect();
        for r in &out.records {
            assert!(!skipped_keys.contains(&r.cell().key().as_str()));
        }
    }

    #[test]
    fn flags_roundtrip() {
        for f in [Flag::BeyondLimit, Flag::MixingOffTarget, Flag::NotConverged] {
            assert_eq!(f.name().parse::<Flag>().unwrap(), f);
        }
        assert!("weird".parse::<Flag>().is_err());
    }
}
