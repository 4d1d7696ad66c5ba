use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commbench::harness::{
    correlate, emit_csv, plot_table, read_records, run_sweep, summarize, CellSummary, Parameter, PlotMode, SweepSpec,
};
use commbench::io::{read_edge_list, read_membership, write_edge_list, write_membership};
use commbench::metrics::{measured_mixing, modularity, nmi_of};
use commbench::{detect, generate, AlgoParams, Algorithm, Error, Graph, LfrConfig, Partition};

#[derive(Parser)]
#[command(name = "commbench", version, about = "LFR benchmark generation and community detection scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one LFR network
    Generate(GenerateArgs),
    /// Run a detection algorithm on an edge list
    Detect(DetectArgs),
    /// Compare two memberships on a graph
    Score(ScoreArgs),
    /// Run a parameter sweep
    Sweep(SweepArgs),
    /// Correlations and plot data from a records.csv
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Average degree
    #[arg(long)]
    avg_degree: f64,
    /// Maximum degree (defaults to 3 x average degree)
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    min_community: Option<usize>,
    #[arg(long)]
    max_community: Option<usize>,
    /// Generate and flag instead of refusing when mu is above the limit
    #[arg(long)]
    allow_beyond_limit: bool,
    /// Output directory for edges.txt, membership.txt and meta.json
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct DetectArgs {
    /// Edge list file
    graph: PathBuf,
    #[arg(long, short)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter override, `name=value`; repeatable
    #[arg(long = "param", short = 'p', value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Declare trailing isolated nodes
    #[arg(long, default_value_t = 0)]
    nodes: usize,
    /// Membership output file
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ScoreArgs {
    /// Edge list file
    graph: PathBuf,
    /// Reference membership
    truth: PathBuf,
    /// Membership to evaluate
    found: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Reduced,
    Full,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Spec file (JSON or key = value); defaults to the chosen profile
    spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "reduced")]
    profile: Profile,
    /// Output directory (overrides the spec)
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Leave runtime_ms empty so repeated sweeps are byte-identical
    #[arg(long)]
    no_runtime: bool,
    /// Skip writing per-run membership files
    #[arg(long)]
    no_artifacts: bool,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// records.csv from a sweep
    records: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let max_degree = args.max_degree.unwrap_or((3.0 * args.avg_degree).round() as usize);
    let config = LfrConfig {
        min_community: args.min_community,
        max_community: args.max_community,
        allow_beyond_limit: args.allow_beyond_limit,
        ..LfrConfig::new(args.n, args.avg_degree, max_degree, args.gamma, args.beta, args.mu, args.seed)
    };
    let net = generate(&config)?;
    fs::create_dir_all(&args.out)?;
    let mut edges = create(&args.out.join("edges.txt"))?;
    write_edge_list(&net.graph, &mut edges)?;
    edges.flush()?;
    let mut membership = create(&args.out.join("membership.txt"))?;
    write_membership(&net.planted, &mut membership)?;
    membership.flush()?;
    fs::write(args.out.join("meta.json"), serde_json::to_string_pretty(&net)?)?;
    println!(
        "nodes={} edges={} communities={} mu_realized={:.6} mu_limit={:.6} converged={}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.community_count,
        net.realized_mu,
        net.mu_limit,
        net.converged
    );
    Ok(())
}

/// Applies `name=value` overrides through the serde form of the params.
fn apply_overrides(params: AlgoParams, overrides: &[String]) -> Result<AlgoParams> {
    let mut value = serde_json::to_value(params)?;
    let map = value.as_object_mut().expect("params serialize to an object");
    for item in overrides {
        let Some((name, raw)) = item.split_once('=') else {
            bail!("parameter override `{item}` is not `name=value`");
        };
        let name = name.trim().replace('-', "_");
        if !map.contains_key(&name) {
            bail!("unknown parameter `{name}`");
        }
        let raw = raw.trim();
        let parsed = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(name, parsed);
    }
    let params: AlgoParams = serde_json::from_value(value)?;
    params.validate()?;
    Ok(params)
}

fn read_graph(path: &Path, nodes: usize) -> Result<Graph> {
    read_edge_list(open(path)?, nodes).with_context(|| format!("reading {}", path.display()))
}

fn read_partition(path: &Path) -> Result<Partition> {
    read_membership(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn run_detect(args: DetectArgs) -> Result<()> {
    let graph = read_graph(&args.graph, args.nodes)?;
    let params = apply_overrides(AlgoParams::with_seed(args.seed), &args.params)?;
    let start = Instant::now();
    let detection = detect(&graph, args.algorithm, &params)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mut out = create(&args.out)?;
    write_membership(&detection.partition, &mut out)?;
    out.flush()?;
    let q = modularity(&graph, &detection.partition).unwrap_or(f64::NAN);
    println!(
        "algorithm={} communities={} modularity={:.6} ms={:.3} converged={}",
        args.algorithm,
        detection.partition.community_count(),
        q,
        ms,
        detection.converged
    );
    Ok(())
}

fn run_score(args: ScoreArgs) -> Result<()> {
    let truth = read_partition(&args.truth)?;
    let found = read_partition(&args.found)?;
    let graph = read_graph(&args.graph, truth.node_count())?;
    let nmi = nmi_of(&truth, &found)?;
    println!("nmi = {nmi:.6}");
    for (label, partition) in [("truth", &truth), ("found", &found)] {
        let q = modularity(&graph, partition)?;
        let mixing = measured_mixing(&graph, partition)?;
        println!("{label}.communities = {}", partition.community_count());
        println!("{label}.modularity = {q:.6}");
        println!("{label}.mixing = {:.6}", mixing.per_node);
        println!("{label}.mixing_global = {:.6}", mixing.global);
    }
    Ok(())
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SweepSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => match args.profile {
            Profile::Reduced => SweepSpec::reduced(),
            Profile::Full => SweepSpec::full(),
        },
    };
    if let Some(out) = args.out {
        spec.output_dir = Some(out);
    }
    if let Some(workers) = args.workers {
        spec.workers = workers;
    }
    if let Some(seed) = args.master_seed {
        spec.master_seed = seed;
    }
    spec.record_runtime &= !args.no_runtime;
    spec.write_artifacts &= !args.no_artifacts;
    let Some(dir) = spec.output_dir.clone() else {
        bail!("no output directory: pass --out or set output_dir in the spec");
    };

    let outcome = run_sweep(&spec)?;
    let summaries = summarize(&outcome.records);
    let (records, summary) = emit_csv(&outcome.records, &summaries, &dir)?;
    let mut skipped = create(&dir.join("skipped.csv"))?;
    writeln!(skipped, "cell,replicate,reason")?;
    for s in &outcome.skipped {
        writeln!(skipped, "\"{}\",{},\"{}\"", s.cell_key, s.replicate, s.reason.replace('"', "'"))?;
    }
    skipped.flush()?;
    for s in &outcome.skipped {
        eprintln!("skipped {} replicate {}: {}", s.cell_key, s.replicate, s.reason);
    }
    println!(
        "records={} cells={} skipped_cells={} -> {}, {}",
        outcome.records.len(),
        summaries.len() / spec.algorithms.len().max(1),
        outcome.skipped.len(),
        records.display(),
        summary.display()
    );
    Ok(())
}

fn slug(x: f64) -> String {
    commbench::harness::fmt_sig(x)
}

/// Distinct values of `key` in first-seen order.
fn distinct<T: PartialEq + Copy>(summaries: &[CellSummary], key: impl Fn(&CellSummary) -> T) -> Vec<T> {
    let mut out = Vec::new();
    for s in summaries {
        let k = key(s);
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

fn run_report(args: ReportArgs) -> Result<()> {
    let records = read_records(open(&args.records)?)?;
    if records.is_empty() {
        bail!("{} holds no records", args.records.display());
    }
    fs::create_dir_all(&args.out)?;
    let mut table = create(&args.out.join("correlations.csv"))?;
    writeln!(table, "parameter,algorithm,pearson_cell_means,pearson_records")?;
    println!("{:<12} {:<20} {:>10} {:>10}", "parameter", "algorithm", "means", "records");
    for parameter in Parameter::ALL {
        match correlate(&records, parameter) {
            Ok(c) => {
                for a in &c.per_algorithm {
                    writeln!(table, "{},{},{},{}", parameter, a.algorithm, slug(a.on_means), slug(a.on_records))?;
                    println!("{:<12} {:<20} {:>10.4} {:>10.4}", parameter.name(), a.algorithm.name(), a.on_means, a.on_records);
                }
                writeln!(table, "{},all,{},", parameter, slug(c.overall))?;
                println!("{:<12} {:<20} {:>10.4}", parameter.name(), "all", c.overall);
            }
            Err(Error::ZeroVariance) => eprintln!("{parameter}: constant across records or NMI, no correlation"),
            Err(e) => return Err(e.into()),
        }
    }
    table.flush()?;

    let summaries = summarize(&records);
    let plots = args.out.join("plots");
    fs::create_dir_all(&plots)?;
    let mut written = 0;
    let slices = distinct(&summaries, |s| (s.cell.n, s.cell.avg_degree.to_bits(), s.cell.gamma.to_bits(), s.cell.beta.to_bits()));
    for (n, k, gamma, beta) in slices {
        let (k, gamma, beta) = (f64::from_bits(k), f64::from_bits(gamma), f64::from_bits(beta));
        let mode = PlotMode::Figure1 {
            n,
            avg_degree: k,
            gamma,
            beta,
        };
        let name = format!("figure1_n{n}_k{}_gamma{}_beta{}.dat", slug(k), slug(gamma), slug(beta));
        fs::write(plots.join(name), plot_table(&summaries, &mode)?)?;
        written += 1;
    }
    let slices = distinct(&summaries, |s| (s.algorithm, s.cell.n, s.cell.gamma.to_bits(), s.cell.beta.to_bits()));
    for (algorithm, n, gamma, beta) in slices {
        let (gamma, beta) = (f64::from_bits(gamma), f64::from_bits(beta));
        let mode = PlotMode::Figure2 {
            algorithm,
            n,
            gamma,
            beta,
        };
        let name = format!("figure2_{algorithm}_n{n}_gamma{}_beta{}.dat", slug(gamma), slug(beta));
        fs::write(plots.join(name), plot_table(&summaries, &mode)?)?;
        written += 1;
    }
    println!("wrote {} and {written} plot files under {}", args.out.join("correlations.csv").display(), plots.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => run_generate(args),
        Command::Detect(args) => run_detect(args),
        Command::Score(args) => run_score(args),
        Command::Sweep(args) => run_sweep_command(args),
        Command::Report(args) => run_report(args),
    }
}
