use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coreness::bp::default_init;
use coreness::evaluation::evaluate_scores;
use coreness::experiments::{
    compute_scores, load_edge_list, sample_replicate, with_threads, write_report, EdgeList,
};
use coreness::{fit_sbm, run_experiment, ExperimentConfig, ExperimentKind, Labeling};

/// Defaults for the single-graph subcommands: every method, no input key required.
const SINGLE_GRAPH: ExperimentKind = ExperimentKind::EcMinresCorrelation;

#[derive(Parser)]
#[command(name = "coreness", version, about = "Core-periphery detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph from the configured model.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the two-block model to an edge list by BP + EM.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute the configured centralities of an edge list.
    Centrality {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Score an edge list against a planted labeling.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// CSV with `node,group` rows, group 1 = core, 2 = periphery.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Run a configured ensemble and write its CSV report.
    Experiment {
        #[command(flatten)]
        common: Common,
    },
    /// Analyze a real network: fit, all scores, correlation matrices.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Config file in `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for replicates (overrides CORENESS_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Override a config key, e.g. `--set n=500`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self, fallback: ExperimentKind) -> Result<ExperimentConfig> {
        self.config_with_input(fallback, None)
    }

    /// Like `config`, with `input` set before the overrides are validated.
    fn config_with_input(&self, fallback: ExperimentKind, input: Option<&Path>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::defaults(fallback),
        };
        if let Some(input) = input {
            cfg.input = Some(input.to_path_buf());
        }
        for item in &self.overrides {
            let (key, value) = item.split_once('=').with_context(|| format!("`--set {item}` is not KEY=VALUE"))?;
            cfg.apply(key.trim(), value)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        Ok(cfg)
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common } => generate(&common),
        Command::Fit { common, input } => fit(&common, &input),
        Command::Centrality { common, input } => centrality(&common, &input),
        Command::Evaluate { common, input, truth } => evaluate(&common, &input, &truth),
        Command::Experiment { common } => experiment(&common),
        Command::Report { common, input } => report(&common, &input),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(input: &Path) -> Result<EdgeList> {
    let edges = load_edge_list(input).with_context(|| format!("loading {}", input.display()))?;
    log::info!("{}: {} nodes, {} edges", input.display(), edges.graph.node_count(), edges.graph.edge_count());
    Ok(edges)
}

fn generate(common: &Common) -> Result<()> {
    let cfg = common.config(ExperimentKind::HomogeneousRanking)?;
    let point = cfg.sweep_points()[0];
    let (g, truth, _) = sample_replicate(&cfg, &point, cfg.seed)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let mut edges = format!("# n={} seed={}\n", g.node_count(), cfg.seed);
    for &(i, j) in g.edges() {
        edges.push_str(&format!("{i} {j}\n"));
    }
    let labels = csv_text(&["node", "group"], truth.codes().iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string()]))?;
    emit(Some(&dir.join("edges.txt")), &edges)?;
    emit(Some(&dir.join("labels.csv")), &labels)?;
    println!("nodes {} edges {} core {}", g.node_count(), g.edge_count(), truth.core_size());
    Ok(())
}

fn fit(common: &Common, input: &Path) -> Result<()> {
    let cfg = common.config(SINGLE_GRAPH)?;
    let e = load(input)?;
    let result = fit_sbm(&e.graph, &default_init(&e.graph), &cfg.settings.fit, cfg.seed)?;
    let p = &result.params;
    println!(
        "gamma {} c11 {} c12 {} c22 {} core {} rounds {} converged {}",
        p.gamma,
        p.c[0][0],
        p.c[0][1],
        p.c[1][1],
        result.marginals.implied_core_size(),
        result.rounds,
        result.converged
    );
    let rows = result
        .marginals
        .coreness()
        .iter()
        .enumerate()
        .map(|(i, q)| vec![i.to_string(), e.ids[i].clone(), e.graph.degree(i).to_string(), q.to_string()])
        .collect::<Vec<_>>();
    emit(common.out.as_deref(), &csv_text(&["node", "id", "degree", "core_marginal"], rows)?)
}

fn centrality(common: &Common, input: &Path) -> Result<()> {
    let cfg = common.config(SINGLE_GRAPH)?;
    let e = load(input)?;
    let set = compute_scores(&e.graph, &cfg.methods, &cfg.settings, &default_init(&e.graph), cfg.seed)?;
    for s in &set.scores {
        if !s.converged {
            log::warn!("{} did not converge", s.method);
        }
    }
    let mut header = vec!["node", "id", "degree"];
    header.extend(set.scores.iter().map(|s| s.method.tag()));
    let rows = (0..e.graph.node_count()).map(|i| {
        let mut row = vec![i.to_string(), e.ids[i].clone(), e.graph.degree(i).to_string()];
        row.extend(set.scores.iter().map(|s| s.scores[i].to_string()));
        row
    });
    emit(common.out.as_deref(), &csv_text(&header, rows)?)
}

/// Reads `node,group` rows keyed by external id.
fn read_truth(path: &Path, e: &EdgeList) -> Result<Labeling> {
    let mut codes = vec![0u8; e.graph.node_count()];
    let index: std::collections::HashMap<&str, usize> = e.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    for rec in rdr.records() {
        let rec = rec?;
        let (id, group) = (rec.get(0).unwrap_or(""), rec.get(1).unwrap_or(""));
        let Some(&i) = index.get(id) else { continue };
        codes[i] = group.trim().parse().with_context(|| format!("bad group `{group}` for node {id}"))?;
    }
    if let Some(i) = codes.iter().position(|&c| c == 0) {
        bail!("no label for node {}", e.ids[i]);
    }
    Ok(Labeling::from_codes(&codes)?)
}

fn evaluate(common: &Common, input: &Path, truth: &Path) -> Result<()> {
    let cfg = common.config(SINGLE_GRAPH)?;
    let e = load(input)?;
    let labels = read_truth(truth, &e)?;
    let set = compute_scores(&e.graph, &cfg.methods, &cfg.settings, &default_init(&e.graph), cfg.seed)?;
    let eval = evaluate_scores(&set.scores, Some(&labels))?;
    let rows = eval.methods.iter().map(|m| vec![m.method.to_string(), m.ipr.to_string(), cell(m.agreement), cell(m.overlap)]);
    emit(common.out.as_deref(), &csv_text(&["method", "ipr", "agreement", "overlap"], rows)?)
}

fn experiment(common: &Common) -> Result<()> {
    if common.config.is_none() {
        bail!("`experiment` needs --config");
    }
    let cfg = common.config(ExperimentKind::HomogeneousRanking)?;
    let report = with_threads(common.threads, || run_experiment(&cfg))??;
    let written = write_report(&report, &cfg.output)?;
    println!("{} replicates, {} failed; wrote {} files to {}", report.attempted, report.failures.len(), written.len(), cfg.output.display());
    if !report.is_valid() {
        bail!("{:.0}% of replicates failed; report is invalid", 100.0 * report.failure_rate());
    }
    Ok(())
}

fn report(common: &Common, input: &Path) -> Result<()> {
    let cfg = common.config_with_input(ExperimentKind::RealNetwork, Some(input))?;
    if cfg.kind != ExperimentKind::RealNetwork {
        bail!("`report` needs a real-network config, got {}", cfg.kind.name());
    }
    let report = with_threads(common.threads, || run_experiment(&cfg))??;
    let written = write_report(&report, &cfg.output)?;
    if let Some(fit) = report.network.as_ref().and_then(|n| n.full.fit()) {
        println!("fitted gamma {} implied core size {}", fit.params.gamma, fit.marginals.implied_core_size());
    }
    println!("wrote {} files to {}", written.len(), cfg.output.display());
    Ok(())
}
