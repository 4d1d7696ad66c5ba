use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};

use super::fmt_sig;
use super::run::{Flag, RunRecord};
use super::summary::CellSummary;

pub const RECORD_COLUMNS: [&str; 17] = [
    "algorithm",
    "n",
    "avg_degree",
    "max_degree",
    "gamma",
    "beta",
    "mu_target",
    "mu_realized",
    "mu_limit",
    "replicate",
    "seed",
    "nmi",
    "modularity",
    "communities_found",
    "communities_planted",
    "runtime_ms",
    "flags",
];

pub const SUMMARY_COLUMNS: [&str; 17] = [
    "algorithm",
    "n",
    "avg_degree",
    "max_degree",
    "gamma",
    "beta",
    "mu",
    "replicates",
    "nmi_mean",
    "nmi_std",
    "nmi_min",
    "nmi_max",
    "modularity_mean",
    "communities_found_mean",
    "mu_realized_mean",
    "mu_limit_mean",
    "runtime_ms_mean",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let flags: Vec<&str> = r.flags.iter().map(|f| f.name()).collect();
        w.write_record([
            r.algorithm.name().to_string(),
            r.n.to_string(),
            fmt_sig(r.avg_degree),
            r.max_degree.to_string(),
            fmt_sig(r.gamma),
            fmt_sig(r.beta),
            fmt_sig(r.mu_target),
            fmt_sig(r.mu_realized),
            fmt_sig(r.mu_limit),
            r.replicate.to_string(),
            r.seed.to_string(),
            fmt_sig(r.nmi),
            fmt_sig(r.modularity),
            r.communities_found.to_string(),
            r.communities_planted.to_string(),
            opt(r.runtime_ms),
            flags.join("|"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, index: usize, line: usize) -> Result<T> {
    let raw = row.get(index).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad value `{raw}` in column {}", RECORD_COLUMNS[index]),
    })
}

/// Reads a `records.csv` written by [`write_records`].
pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_COLUMNS {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {header:?}"),
        });
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let runtime = row.get(15).unwrap_or("");
        let flags = row.get(16).unwrap_or("");
        records.push(RunRecord {
            algorithm: row.get(0).unwrap_or("").parse::<Algorithm>()?,
            n: field(&row, 1, line)?,
            avg_degree: field(&row, 2, line)?,
            max_degree: field(&row, 3, line)?,
            gamma: field(&row, 4, line)?,
            beta: field(&row, 5, line)?,
            mu_target: field(&row, 6, line)?,
            mu_realized: field(&row, 7, line)?,
            mu_limit: field(&row, 8, line)?,
            replicate: field(&row, 9, line)?,
            seed: field(&row, 10, line)?,
            nmi: field(&row, 11, line)?,
            modularity: field(&row, 12, line)?,
            communities_found: field(&row, 13, line)?,
            communities_planted: field(&row, 14, line)?,
            runtime_ms: if runtime.is_empty() { None } else { Some(field(&row, 15, line)?) },
            flags: if flags.is_empty() {
                Vec::new()
            } else {
                flags.split('|').map(str::parse::<Flag>).collect::<Result<_>>()?
            },
        });
    }
    Ok(records)
}

pub fn write_summaries<W: Write>(summaries: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summaries {
        let c = &s.cell;
        w.write_record([
            s.algorithm.name().to_string(),
            c.n.to_string(),
            fmt_sig(c.avg_degree),
            c.max_degree.to_string(),
            fmt_sig(c.gamma),
            fmt_sig(c.beta),
            fmt_sig(c.mu),
            s.replicates.to_string(),
            fmt_sig(s.nmi_mean),
            fmt_sig(s.nmi_std),
            fmt_sig(s.nmi_min),
            fmt_sig(s.nmi_max),
            fmt_sig(s.modularity_mean),
            fmt_sig(s.communities_found_mean),
            fmt_sig(s.mu_realized_mean),
            fmt_sig(s.mu_limit_mean),
            opt(s.runtime_ms_mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records.csv` and `summary.csv` into `dir`, returning both paths.
pub fn emit_csv(records: &[RunRecord], summaries: &[CellSummary], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let records_path = dir.join("records.csv");
    let summary_path = dir.join("summary.csv");
    write_records(records, fs::File::create(&records_path)?)?;
    write_summaries(summaries, fs::File::create(&summary_path)?)?;
    Ok((records_path, summary_path))
}

/// Slice of the summaries to plot.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotMode {
    /// One NMI series per algorithm against mu, at a fixed network class.
    Figure1 { n: usize, avg_degree: f64, gamma: f64, beta: f64 },
    /// One NMI series per average degree against mu, for one algorithm.
    Figure2 { algorithm: Algorithm, n: usize, gamma: f64, beta: f64 },
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Sorted distinct values.
fn distinct(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| close(*a, *b));
    xs
}

/// Whitespace-separated table: a `mu` column, then the series columns.
/// Figure 1 tables also carry `mu_limit`, the mean limit of the networks in
/// each row. Missing points are written as `nan`.
pub fn plot_table(summaries: &[CellSummary], mode: &PlotMode) -> Result<String> {
    let (title, slice, label): (String, Vec<&CellSummary>, fn(&CellSummary) -> String) = match *mode {
        PlotMode::Figure1 { n, avg_degree, gamma, beta } => (
            format!("figure1 n={n} avg_degree={} gamma={} beta={}", fmt_sig(avg_degree), fmt_sig(gamma), fmt_sig(beta)),
            summaries
                .iter()
                .filter(|s| s.cell.n == n && close(s.cell.avg_degree, avg_degree) && close(s.cell.gamma, gamma) && close(s.cell.beta, beta))
                .collect(),
            |s| s.algorithm.name().to_string(),
        ),
        PlotMode::Figure2 { algorithm, n, gamma, beta } => (
            format!("figure2 algorithm={algorithm} n={n} gamma={} beta={}", fmt_sig(gamma), fmt_sig(beta)),
            summaries
                .iter()
                .filter(|s| s.algorithm == algorithm && s.cell.n == n && close(s.cell.gamma, gamma) && close(s.cell.beta, beta))
                .collect(),
            |s| format!("k={}", fmt_sig(s.cell.avg_degree)),
        ),
    };
    if slice.is_empty() {
        return Err(Error::MissingData(format!("no summaries match {title}")));
    }
    let mus = distinct(slice.iter().map(|s| s.cell.mu).collect());
    let mut series: Vec<String> = Vec::new();
    for s in &slice {
        let name = label(s);
        if !series.contains(&name) {
            series.push(name);
        }
    }
    if let PlotMode::Figure2 { .. } = mode {
        series.sort_by(|a, b| {
            let num = |x: &str| x.trim_start_matches("k=").parse::<f64>().unwrap_or(f64::NAN);
            num(a).total_cmp(&num(b))
        });
    }
    let figure1 = matches!(mode, PlotMode::Figure1 { .. });

    let mut out = format!("# {title}\nmu");
    if figure1 {
        out.push_str(" mu_limit");
    }
    for name in &series {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for &mu in &mus {
        let row: Vec<&&CellSummary> = slice.iter().filter(|s| close(s.cell.mu, mu)).collect();
        out.push_str(&fmt_sig(mu));
        if figure1 {
            let limits: Vec<f64> = row.iter().map(|s| s.mu_limit_mean).collect();
            out.push(' ');
            out.push_str(&fmt_sig(limits.iter().sum::<f64>() / limits.len() as f64));
        }
        for name in &series {
            out.push(' ');
            match row.iter().find(|s| &label(s) == name) {
                Some(s) => out.push_str(&fmt_sig(s.nmi_mean)),
                None => out.push_str("nan"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes [`plot_table`] to `figure1.dat` or `figure2.dat` under `dir`.
pub fn emit_plot_data(summaries: &[CellSummary], mode: &PlotMode, dir: &Path) -> Result<PathBuf> {
    let table = plot_table(summaries, mode)?;
    fs::create_dir_all(dir)?;
    let name = match mode {
        PlotMode::Figure1 { .. } => "figure1.dat",
        PlotMode::Figure2 { .. } => "figure2.dat",
    };
    let path = dir.join(name);
    fs::write(&path, table)?;
    Ok(path)
}
