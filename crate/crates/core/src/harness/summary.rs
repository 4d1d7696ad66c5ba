use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};
use crate::metrics::pearson;

use super::run::RunRecord;
use super::spec::Cell;

/// Aggregate of one algorithm over the replicates of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub cell: Cell,
    pub replicates: usize,
    pub nmi_mean: f64,
    /// Sample standard deviation (zero for a single replicate).
    pub nmi_std: f64,
    pub nmi_min: f64,
    pub nmi_max: f64,
    pub modularity_mean: f64,
    pub communities_found_mean: f64,
    pub mu_realized_mean: f64,
    pub mu_limit_mean: f64,
    /// Absent when the records carry no timings.
    pub runtime_ms_mean: Option<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Total order on cells used for grouping: grid order with floats compared
/// by their bit patterns.
fn cell_order(c: &Cell) -> (usize, u64, usize, u64, u64, u64) {
    (
        c.n,
        c.avg_degree.to_bits(),
        c.max_degree,
        c.gamma.to_bits(),
        c.beta.to_bits(),
        c.mu.to_bits(),
    )
}

/// Per-cell, per-algorithm aggregates ordered by cell then algorithm.
pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<_, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((cell_order(&r.cell()), r.algorithm)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|members| {
            let nmis: Vec<f64> = members.iter().map(|r| r.nmi).collect();
            let of = |f: fn(&RunRecord) -> f64| mean(&members.iter().map(|r| f(r)).collect::<Vec<_>>());
            let runtimes: Option<Vec<f64>> = members.iter().map(|r| r.runtime_ms).collect();
            CellSummary {
                algorithm: members[0].algorithm,
                cell: members[0].cell(),
                replicates: members.len(),
                nmi_mean: mean(&nmis),
                nmi_std: sample_std(&nmis),
                nmi_min: nmis.iter().copied().fold(f64::INFINITY, f64::min),
                nmi_max: nmis.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                modularity_mean: of(|r| r.modularity),
                communities_found_mean: of(|r| r.communities_found as f64),
                mu_realized_mean: of(|r| r.mu_realized),
                mu_limit_mean: of(|r| r.mu_limit),
                runtime_ms_mean: runtimes.map(|t| mean(&t)),
            }
        })
        .collect()
}

/// Generator parameter that NMI can be correlated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Mu,
    N,
    AvgDegree,
    Gamma,
    Beta,
}

impl Parameter {
    pub const ALL: [Parameter; 5] = [Parameter::Mu, Parameter::N, Parameter::AvgDegree, Parameter::Gamma, Parameter::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Mu => "mu",
            Parameter::N => "n",
            Parameter::AvgDegree => "avg_degree",
            Parameter::Gamma => "gamma",
            Parameter::Beta => "beta",
        }
    }

    pub fn of(self, cell: &Cell) -> f64 {
        match self {
            Parameter::Mu => cell.mu,
            Parameter::N => cell.n as f64,
            Parameter::AvgDegree => cell.avg_degree,
            Parameter::Gamma => cell.gamma,
            Parameter::Beta => cell.beta,
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s || (s == "k" && *p == Parameter::AvgDegree))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmCorrelation {
    pub algorithm: Algorithm,
    /// Pearson over (parameter, mean NMI of the cell).
    pub on_means: f64,
    /// Pearson over every individual record, kept for auditing.
    pub on_records: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub parameter: Parameter,
    pub per_algorithm: Vec<AlgorithmCorrelation>,
    /// Pearson over the cell means of all algorithms pooled.
    pub overall: f64,
}

/// Pearson correlation between `parameter` and NMI, per algorithm and
/// pooled. Fails with `ZeroVariance` when the parameter is constant; an
/// algorithm whose NMI never varies gets NaN.
pub fn correlate(records: &[RunRecord], parameter: Parameter) -> Result<Correlation> {
    if records.is_empty() {
        return Err(Error::MissingData("no records to correlate".into()));
    }
    let first = parameter.of(&records[0].cell());
    if records.iter().all(|r| parameter.of(&r.cell()) == first) {
        return Err(Error::ZeroVariance);
    }
    // constant NMI leaves the coefficient undefined
    let coefficient = |xs: &[f64], ys: &[f64]| match pearson(xs, ys) {
        Err(Error::ZeroVariance) => Ok(f64::NAN),
        other => other,
    };
    let summaries = summarize(records);
    let mut algorithms: Vec<Algorithm> = summaries.iter().map(|s| s.algorithm).collect();
    algorithms.sort_unstable();
    algorithms.dedup();
    let mut per_algorithm = Vec::with_capacity(algorithms.len());
    for algorithm in algorithms {
        let (xs, ys): (Vec<f64>, Vec<f64>) = summaries
            .iter()
            .filter(|s| s.algorithm == algorithm)
            .map(|s| (parameter.of(&s.cell), s.nmi_mean))
            .unzip();
        let (rx, ry): (Vec<f64>, Vec<f64>) = records
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| (parameter.of(&r.cell()), r.nmi))
            .unzip();
        per_algorithm.push(AlgorithmCorrelation {
            algorithm,
            on_means: coefficient(&xs, &ys)?,
            on_records: coefficient(&rx, &ry)?,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = summaries.iter().map(|s| (parameter.of(&s.cell), s.nmi_mean)).unzip();
    Ok(Correlation {
        parameter,
        per_algorithm,
        overall: coefficient(&xs, &ys)?,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::harness::run::Flag;

    pub(crate) fn record(algorithm: Algorithm, mu: f64, beta: f64, replicate: usize, nmi: f64) -> RunRecord {
        RunRecord {
            algorithm,
            n: 100,
            avg_degree: 5.0,
            max_degree: 15,
            gamma: 2.0,
            beta,
            mu_target: mu,
            mu_realized: mu + 0.001,
            mu_limit: 0.8,
            replicate,
            seed: 17 + replicate as u64,
            nmi,
            modularity: 0.25,
            communities_found: 4,
            communities_planted: 5,
            runtime_ms: Some(1.5),
            flags: if mu > 0.8 { vec![Flag::BeyondLimit] } else { vec![] },
        }
    }

    #[test]
    fn single_record_summary() {
        let s = summarize(&[record(Algorithm::Louvain, 0.1, 1.0, 0, 0.7)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].nmi_mean, 0.7);
        assert_eq!(s[0].nmi_std, 0.0);
        assert_eq!(s[0].runtime_ms_mean, Some(1.5));
    }

    #[test]
    fn two_record_mean() {
        let s = summarize(&[
            record(Algorithm::Louvain, 0.1, 1.0, 0, 0.4),
            record(Algorithm::Louvain, 0.1, 1.0, 1, 0.6),
        ]);
        assert_eq!(s.len(), 1);
        assert!((s[0].nmi_mean - 0.5).abs() < 1e-15);
        assert!((s[0].nmi_std - 0.02f64.sqrt()).abs() < 1e-15);
        assert!(s[0].nmi_min <= s[0].nmi_mean && s[0].nmi_mean <= s[0].nmi_max);
    }

    #[test]
    fn summaries_group_by_cell_and_algorithm() {
        let records = vec![
            record(Algorithm::Walktrap, 0.2, 1.0, 0, 0.5),
            record(Algorithm::Louvain, 0.1, 1.0, 0, 0.9),
            record(Algorithm::Walktrap, 0.1, 1.0, 0, 0.8),
            record(Algorithm::Louvain, 0.1, 1.0, 1, 0.7),
        ];
        let s = summarize(&records);
        let keys: Vec<(Algorithm, f64, usize)> = s.iter().map(|x| (x.algorithm, x.cell.mu, x.replicates)).collect();
        assert_eq!(
            keys,
            vec![(Algorithm::Louvain, 0.1, 2), (Algorithm::Walktrap, 0.1, 1), (Algorithm::Walktrap, 0.2, 1)]
        );
    }

    #[test]
    fn perfect_negative_correlation_with_mu() {
        let records: Vec<RunRecord> = (1..=8)
            .map(|i| {
                let mu = i as f64 / 10.0;
                record(Algorithm::Infomap, mu, 1.0, 0, 1.0 - mu)
            })
            .collect();
        let c = correlate(&records, Parameter::Mu).unwrap();
        assert!((c.per_algorithm[0].on_means + 1.0).abs() < 1e-12);
        assert!((c.overall + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_parameter_errors() {
        let records: Vec<RunRecord> = (1..=4).map(|i| record(Algorithm::Infomap, i as f64 / 10.0, 1.0, 0, 0.5 + i as f64 / 10.0)).collect();
        assert!(matches!(correlate(&records, Parameter::Beta), Err(Error::ZeroVariance)));
    }

    #[test]
    fn constant_nmi_is_nan() {
        let records: Vec<RunRecord> = (1..=4).map(|i| record(Algorithm::Louvain, i as f64 / 10.0, 1.0, 0, 1.0)).collect();
        let c = correlate(&records, Parameter::Mu).unwrap();
        assert!(c.per_algorithm[0].on_means.is_nan());
    }

    #[test]
    fn parameter_names() {
        for p in Parameter::ALL {
            assert_eq!(p.name().parse::<Parameter>().unwrap(), p);
        }
        assert_eq!("k".parse::<Parameter>().unwrap(), Parameter::AvgDegree);
    }
}
