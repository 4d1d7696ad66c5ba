use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::algorithms::{AlgoParams, Algorithm};
use crate::error::{Error, Result};

use super::fmt_sig;

/// Evenly spaced mixing values `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl MuGrid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e10).round() / 1e10)
            .collect()
    }
}

/// Parameter grid, replicate count and execution settings of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub node_counts: Vec<usize>,
    pub avg_degrees: Vec<f64>,
    /// Maximum degree as a multiple of the average degree.
    pub max_degree_factor: f64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub mu_grid: MuGrid,
    pub replicates: usize,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Measure wall-clock time per run. Without it `runtime_ms` is left
    /// empty and repeated sweeps produce identical files.
    pub record_runtime: bool,
    /// Write planted and detected memberships for every run.
    pub write_artifacts: bool,
    pub params: AlgoParams,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self::reduced()
    }
}

/// One combination of generator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub gamma: f64,
    pub beta: f64,
    pub mu: f64,
}

impl Cell {
    /// Canonical text key used for seeding and artifact paths.
    pub fn key(&self) -> String {
        format!(
            "n={};k={};kmax={};gamma={};beta={};mu={}",
            self.n,
            fmt_sig(self.avg_degree),
            self.max_degree,
            fmt_sig(self.gamma),
            fmt_sig(self.beta),
            fmt_sig(self.mu)
        )
    }
}

impl SweepSpec {
    /// Desk-scale profile: the full parameter grid at n = 100 and 1000
    /// with 10 replicates.
    pub fn reduced() -> Self {
        Self {
            node_counts: vec![100, 1000],
            avg_degrees: vec![5.0, 15.0, 30.0],
            max_degree_factor: 3.0,
            gammas: vec![2.0, 3.0],
            betas: vec![1.0, 2.0],
            mu_grid: MuGrid {
                start: 0.05,
                stop: 0.95,
                step: 0.05,
            },
            replicates: 10,
            algorithms: Algorithm::ALL.to_vec(),
            master_seed: 0,
            output_dir: None,
            workers: 0,
            record_runtime: true,
            write_artifacts: true,
            params: AlgoParams::default(),
        }
    }

    /// The complete benchmark grid with 25 replicates per cell.
    pub fn full() -> Self {
        Self {
            node_counts: vec![100, 500, 1000, 5000],
            replicates: 25,
            ..Self::reduced()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.node_counts.is_empty()
            || self.avg_degrees.is_empty()
            || self.gammas.is_empty()
            || self.betas.is_empty()
            || self.algorithms.is_empty()
        {
            return bad("every grid axis and the algorithm set must be non-empty".into());
        }
        let g = self.mu_grid;
        if !(g.start > 0.0 && g.stop < 1.0 && g.step > 0.0 && g.start <= g.stop) {
            return bad(format!(
                "mu grid {}..{} step {} must lie in (0, 1) with a positive step",
                g.start, g.stop, g.step
            ));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.max_degree_factor.is_nan() || self.max_degree_factor < 1.0 {
            return bad("max_degree_factor must be at least 1".into());
        }
        self.params.validate()
    }

    /// Grid cells in canonical order (n, average degree, gamma, beta, mu).
    pub fn cells(&self) -> Vec<Cell> {
        let mus = self.mu_grid.values();
        let mut cells = Vec::new();
        for &n in &self.node_counts {
            for &avg_degree in &self.avg_degrees {
                let max_degree = (self.max_degree_factor * avg_degree).round() as usize;
                for &gamma in &self.gammas {
                    for &beta in &self.betas {
                        for &mu in &mus {
                            cells.push(Cell {
                                n,
                                avg_degree,
                                max_degree,
                                gamma,
                                beta,
                                mu,
                            });
                        }
                    }
                }
            }
        }
        cells
    }

    /// Parses a JSON document or a flat `key = value` file. List values are
    /// comma separated, `mu_grid` takes `start, stop, step`, and algorithm
    /// parameters are set with `params.<name> = value`.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SweepSpec = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            serde_json::from_value(key_value_document(text)?)?
        };
        spec.validate()?;
        Ok(spec)
    }
}

const LIST_KEYS: [&str; 5] = ["node_counts", "avg_degrees", "gammas", "betas", "algorithms"];

fn scalar(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(b) = raw.parse::<bool>() {
        return Value::Bool(b);
    }
    if let Ok(i) = raw.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(x) = raw.parse::<f64>() {
        return Value::from(x);
    }
    if raw.eq_ignore_ascii_case("none") || raw.eq_ignore_ascii_case("null") {
        return Value::Null;
    }
    Value::String(raw.trim_matches('"').to_string())
}

fn key_value_document(text: &str) -> Result<Value> {
    let mut root = Map::new();
    let mut params = Map::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
        let key = key.trim();
        let parsed = if LIST_KEYS.contains(&key) {
            Value::Array(value.split(',').filter(|s| !s.trim().is_empty()).map(scalar).collect())
        } else if key == "mu_grid" {
            let parts: Vec<Value> = value.split(',').map(scalar).collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "mu_grid takes `start, stop, step`".into(),
                });
            }
            serde_json::json!({ "start": parts[0], "stop": parts[1], "step": parts[2] })
        } else {
            scalar(value)
        };
        match key.strip_prefix("params.") {
            Some(name) => {
                params.insert(name.to_string(), parsed);
            }
            None => {
                root.insert(key.to_string(), parsed);
            }
        }
    }
    if !params.is_empty() {
        root.insert("params".into(), Value::Object(params));
    }
    Ok(Value::Object(root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_grid_values() {
        let g = MuGrid {
            start: 0.05,
            stop: 0.95,
            step: 0.05,
        };
        let v = g.values();
        assert_eq!(v.len(), 19);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[5], 0.3);
        assert_eq!(v[18], 0.95);
        let g = MuGrid {
            start: 0.1,
            stop: 0.8,
            step: 0.1,
        };
        assert_eq!(g.values(), vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]);
    }

    #[test]
    fn grid_cardinality() {
        let spec = SweepSpec::full();
        assert_eq!(spec.cells().len(), 4 * 3 * 2 * 2 * 19);
        assert_eq!(spec.cells()[0].max_degree, 15);
    }

    #[test]
    fn key_value_and_json_agree() {
        let kv = "\
# small sweep
node_counts = 100
avg_degrees = 5, 15
gammas = 2
betas = 1
mu_grid = 0.1, 0.3, 0.1
replicates = 2
algorithms = louvain, lp
master_seed = 9
params.walktrap_t = 5
";
        let json = r#"{
            "node_counts": [100], "avg_degrees": [5, 15], "gammas": [2], "betas": [1],
            "mu_grid": {"start": 0.1, "stop": 0.3, "step": 0.1}, "replicates": 2,
            "algorithms": ["louvain", "label_propagation"], "master_seed": 9,
            "params": {"walktrap_t": 5}
        }"#;
        let a = SweepSpec::parse(kv).unwrap();
        let b = SweepSpec::parse(json).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.params.walktrap_t, 5);
        assert_eq!(a.cells().len(), 6);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(SweepSpec::parse("mu_grid = 0.0, 0.5, 0.1").is_err());
        assert!(SweepSpec::parse("mu_grid = 0.1, 1.0, 0.1").is_err());
        assert!(SweepSpec::parse("replicates = 0").is_err());
        assert!(SweepSpec::parse("algorithms = girvan_newman").is_err());
        assert!(SweepSpec::parse("no separator here").is_err());
        assert!(SweepSpec::parse(r#"{"unknown_field": 1}"#).is_err());
    }

    #[test]
    fn cell_key_is_canonical() {
        let c = Cell {
            n: 1000,
            avg_degree: 15.0,
            max_degree: 45,
            gamma: 3.0,
            beta: 2.0,
            mu: 0.1 + 0.2,
        };
        assert_eq!(c.key(), "n=1000;k=15;kmax=45;gamma=3;beta=2;mu=0.3");
    }
}
