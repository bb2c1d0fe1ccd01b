//! Configuration-driven ensemble runs, edge-list ingestion and CSV output.
//!
//! A run is described by a flat `key = value` text file. Every replicate
//! draws its own seed from the base seed, so results do not depend on the
//! number of worker threads and the written manifest reproduces a run
//! exactly.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::bp::{default_init, fit_sbm, FitConfig, FitResult};
use crate::centrality::{
    degree_centrality, eigenvector_centrality, minres_coreness, nbt_centrality, pagerank, CentralityScores, Method,
    SolverConfig, DEFAULT_DAMPING,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    agreement, evaluate_scores, pearson_matrix, spearman_matrix, summarize, top_k_assignment, CorrelationMatrix,
    ReplicateEvaluation,
};
use crate::generators::{
    core_size, default_offset, power_law_corrections, rng_from_seed, sample_dc_sbm, sample_sbm, BlockModelParams,
};
use crate::graph::{Graph, Labeling};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "CORENESS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    HomogeneousRanking,
    IprScaling,
    EcMinresCorrelation,
    AlphaSweep,
    RealNetwork,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::HomogeneousRanking,
        ExperimentKind::IprScaling,
        ExperimentKind::EcMinresCorrelation,
        ExperimentKind::AlphaSweep,
        ExperimentKind::RealNetwork,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::HomogeneousRanking => "homogeneous-ranking",
            ExperimentKind::IprScaling => "ipr-scaling",
            ExperimentKind::EcMinresCorrelation => "ec-minres-correlation",
            ExperimentKind::AlphaSweep => "alpha-sweep",
            ExperimentKind::RealNetwork => "real-network",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Starting affinities for the EM fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpInit {
    /// Generic start from the observed mean degree.
    Default,
    /// Start from the generating parameters (synthetic runs only).
    Truth,
}

impl BpInit {
    fn name(self) -> &'static str {
        match self {
            BpInit::Default => "default",
            BpInit::Truth => "truth",
        }
    }
}

/// The variable an ensemble is swept over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    N,
    Alpha,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::Alpha => "alpha",
        }
    }
}

/// Solver settings shared by every score computation in a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreSettings {
    pub fit: FitConfig,
    pub spectral: SolverConfig,
    pub minres: SolverConfig,
    pub damping: f64,
}

impl Default for ScoreSettings {
    fn default() -> Self {
        Self { fit: FitConfig::default(), spectral: SolverConfig::SPECTRAL, minres: SolverConfig::MINRES, damping: DEFAULT_DAMPING }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub params: BlockModelParams,
    /// Power-law exponent of the degree corrections; `None` samples a plain SBM.
    pub alpha: Option<f64>,
    /// Offset of the power law; `None` picks the smallest offset that avoids capping.
    pub i0: Option<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub sweep_n: Vec<usize>,
    pub sweep_alpha: Vec<f64>,
    pub input: Option<PathBuf>,
    pub output: PathBuf,
    pub gamma_grid: Vec<f64>,
    pub subgraph_size: usize,
    pub bp_init: BpInit,
    pub settings: ScoreSettings,
}

const KEYS: [&str; 30] = [
    "kind",
    "n",
    "gamma",
    "c11",
    "c12",
    "c22",
    "alpha",
    "i0",
    "replicates",
    "seed",
    "methods",
    "sweep_n",
    "sweep_alpha",
    "input",
    "output",
    "gamma_grid",
    "subgraph_size",
    "bp_init",
    "bp_tol",
    "bp_max_sweeps",
    "bp_damping",
    "bp_init_noise",
    "em_tol",
    "em_max_rounds",
    "em_restarts",
    "spectral_tol",
    "spectral_max_iter",
    "minres_tol",
    "minres_max_iter",
    "pagerank_damping",
];

impl ExperimentConfig {
    /// Desk-scale defaults for `kind`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let methods = match kind {
            ExperimentKind::HomogeneousRanking => {
                Method::ALL.into_iter().filter(|&m| m != Method::Minres).collect()
            }
            _ => Method::ALL.to_vec(),
        };
        let sweep_n = match kind {
            ExperimentKind::IprScaling => vec![250, 500, 1000, 2000, 4000],
            ExperimentKind::EcMinresCorrelation => vec![500, 1000, 2000, 4000],
            _ => Vec::new(),
        };
        let sweep_alpha = match kind {
            ExperimentKind::AlphaSweep => vec![2.6, 3.0, 4.0, 6.0, 10.0],
            _ => Vec::new(),
        };
        Self {
            kind,
            n: 2000,
            params: BlockModelParams { gamma: 0.3, c: [[10.0, 6.0], [6.0, 1.0]] },
            alpha: None,
            i0: None,
            replicates: 20,
            seed: 1,
            methods,
            sweep_n,
            sweep_alpha,
            input: None,
            output: PathBuf::from(format!("results/{}", kind.name())),
            gamma_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3],
            subgraph_size: 1000,
            bp_init: BpInit::Default,
            settings: ScoreSettings::default(),
        }
    }

    /// Parses the `key = value` format. `kind` is required; every other key
    /// overrides the defaults of that kind.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", idx + 1)))?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", idx + 1)));
            }
            if entries.iter().any(|(_, k, _)| *k == key) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", idx + 1)));
            }
            entries.push((idx + 1, key, value.trim().to_string()));
        }
        let kind_value = entries
            .iter()
            .find(|(_, k, _)| k == "kind")
            .map(|(_, _, v)| v.clone())
            .ok_or_else(|| Error::Config("missing `kind`".into()))?;
        let kind = ExperimentKind::from_name(&kind_value)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{kind_value}`")))?;
        let mut cfg = Self::defaults(kind);
        for (line, key, value) in &entries {
            cfg.set(key, value).map_err(|msg| Error::Config(format!("line {line}: `{key}`: {msg}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Overrides one key, then revalidates. `kind` cannot be changed this way.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "kind" || !KEYS.contains(&key) {
            return Err(Error::Config(format!("cannot override `{key}`")));
        }
        self.set(key, value.trim()).map_err(|msg| Error::Config(format!("`{key}`: {msg}")))?;
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.settings;
        match key {
            "kind" => {}
            "n" => self.n = scalar(value)?,
            "gamma" => self.params.gamma = scalar(value)?,
            "c11" => self.params.c[0][0] = scalar(value)?,
            "c12" => {
                let c: f64 = scalar(value)?;
                self.params.c[0][1] = c;
                self.params.c[1][0] = c;
            }
            "c22" => self.params.c[1][1] = scalar(value)?,
            "alpha" => self.alpha = optional(value, "none")?,
            "i0" => self.i0 = optional(value, "auto")?,
            "replicates" => self.replicates = scalar(value)?,
            "seed" => self.seed = scalar(value)?,
            "methods" => {
                let mut methods = Vec::new();
                for tag in list::<String>(value)? {
                    let m = Method::from_tag(&tag).ok_or_else(|| format!("unknown method `{tag}`"))?;
                    if !methods.contains(&m) {
                        methods.push(m);
                    }
                }
                methods.sort_by_key(|m| Method::ALL.iter().position(|x| x == m));
                self.methods = methods;
            }
            "sweep_n" => self.sweep_n = list(value)?,
            "sweep_alpha" => self.sweep_alpha = list(value)?,
            "input" => self.input = optional::<String>(value, "none")?.map(PathBuf::from),
            "output" => self.output = PathBuf::from(value),
            "gamma_grid" => self.gamma_grid = list(value)?,
            "subgraph_size" => self.subgraph_size = scalar(value)?,
            "bp_init" => {
                self.bp_init = match value {
                    "default" => BpInit::Default,
                    "truth" => BpInit::Truth,
                    other => return Err(format!("expected `default` or `truth`, got `{other}`")),
                }
            }
            "bp_tol" => s.fit.bp.tol = scalar(value)?,
            "bp_max_sweeps" => s.fit.bp.max_sweeps = scalar(value)?,
            "bp_damping" => s.fit.bp.damping = scalar(value)?,
            "bp_init_noise" => s.fit.bp.init_noise = scalar(value)?,
            "em_tol" => s.fit.tol = scalar(value)?,
            "em_max_rounds" => s.fit.max_rounds = scalar(value)?,
            "em_restarts" => s.fit.restarts = scalar(value)?,
            "spectral_tol" => s.spectral.tol = scalar(value)?,
            "spectral_max_iter" => s.spectral.max_iter = scalar(value)?,
            "minres_tol" => s.minres.tol = scalar(value)?,
            "minres_max_iter" => s.minres.max_iter = scalar(value)?,
            "pagerank_damping" => s.damping = scalar(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if !self.sweep_n.is_empty() && !self.sweep_alpha.is_empty() {
            return bad("sweep_n and sweep_alpha are mutually exclusive".into());
        }
        if self.kind == ExperimentKind::RealNetwork {
            if self.input.is_none() {
                return bad("real-network runs need `input`".into());
            }
        } else {
            self.params.validate()?;
            for point in self.sweep_points() {
                if point.n < 2 {
                    return bad(format!("n must be at least 2, got {}", point.n));
                }
                self.params.check_probabilities(point.n)?;
                if let Some(alpha) = point.alpha {
                    if !(alpha > 2.0) {
                        return Err(Error::InvalidExponent(alpha));
                    }
                }
            }
        }
        let s = &self.settings;
        if !(0.0..1.0).contains(&s.damping) {
            return bad(format!("pagerank_damping must be in [0, 1), got {}", s.damping));
        }
        if !(0.0..1.0).contains(&s.fit.bp.damping) {
            return bad(format!("bp_damping must be in [0, 1), got {}", s.fit.bp.damping));
        }
        if self.gamma_grid.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return bad("gamma_grid entries must lie in (0, 1)".into());
        }
        Ok(())
    }

    /// The resolved configuration in the same format [`ExperimentConfig::parse`] reads.
    pub fn manifest(&self) -> String {
        let s = &self.settings;
        let tags: Vec<&str> = self.methods.iter().map(|m| m.tag()).collect();
        let values: [String; 30] = [
            self.kind.name().to_string(),
            self.n.to_string(),
            self.params.gamma.to_string(),
            self.params.c[0][0].to_string(),
            self.params.c[0][1].to_string(),
            self.params.c[1][1].to_string(),
            self.alpha.map_or("none".into(), |a| a.to_string()),
            self.i0.map_or("auto".into(), |i| i.to_string()),
            self.replicates.to_string(),
            self.seed.to_string(),
            format!("[{}]", tags.join(", ")),
            format_list(&self.sweep_n),
            format_list(&self.sweep_alpha),
            self.input.as_ref().map_or("none".into(), |p| p.display().to_string()),
            self.output.display().to_string(),
            format_list(&self.gamma_grid),
            self.subgraph_size.to_string(),
            self.bp_init.name().to_string(),
            s.fit.bp.tol.to_string(),
            s.fit.bp.max_sweeps.to_string(),
            s.fit.bp.damping.to_string(),
            s.fit.bp.init_noise.to_string(),
            s.fit.tol.to_string(),
            s.fit.max_rounds.to_string(),
            s.fit.restarts.to_string(),
            s.spectral.tol.to_string(),
            s.spectral.max_iter.to_string(),
            s.minres.tol.to_string(),
            s.minres.max_iter.to_string(),
            s.damping.to_string(),
        ];
        let mut out = String::new();
        for (key, value) in KEYS.iter().zip(values) {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }

    pub fn sweep_variable(&self) -> Option<SweepVariable> {
        if !self.sweep_n.is_empty() {
            Some(SweepVariable::N)
        } else if !self.sweep_alpha.is_empty() {
            Some(SweepVariable::Alpha)
        } else {
            None
        }
    }

    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        match self.sweep_variable() {
            Some(SweepVariable::N) => {
                self.sweep_n.iter().map(|&n| SweepPoint { value: Some(n as f64), n, alpha: self.alpha }).collect()
            }
            Some(SweepVariable::Alpha) => {
                self.sweep_alpha.iter().map(|&a| SweepPoint { value: Some(a), n: self.n, alpha: Some(a) }).collect()
            }
            None => vec![SweepPoint { value: None, n: self.n, alpha: self.alpha }],
        }
    }
}

fn scalar<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

fn optional<T: std::str::FromStr>(value: &str, none: &str) -> std::result::Result<Option<T>, String> {
    if value == none {
        Ok(None)
    } else {
        scalar(value).map(Some)
    }
}

fn list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{value}`"))?;
    inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(scalar).collect()
}

fn format_list<T: ToString>(values: &[T]) -> String {
    let items: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// One model configuration of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    /// Value of the swept variable, if any.
    pub value: Option<f64>,
    pub n: usize,
    pub alpha: Option<f64>,
}

/// Seed of replicate `replicate` at sweep point `point`.
pub fn replicate_seed(base: u64, point: usize, replicate: usize) -> u64 {
    let mut z = base ^ (((point as u64) << 32) | replicate as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Score vectors for one graph, plus the SBM fit when BP was requested.
#[derive(Clone, Debug)]
pub struct ScoreSet {
    pub scores: Vec<CentralityScores>,
    pub fit: Option<FitResult>,
}

impl ScoreSet {
    pub fn get(&self, method: Method) -> Option<&CentralityScores> {
        self.scores.iter().find(|s| s.method == method)
    }
}

/// Computes `methods` on `g`. BP fits the SBM starting from `init`.
pub fn compute_scores(
    g: &Graph,
    methods: &[Method],
    settings: &ScoreSettings,
    init: &BlockModelParams,
    seed: u64,
) -> Result<ScoreSet> {
    let mut scores = Vec::with_capacity(methods.len());
    let mut fit = None;
    for &method in methods {
        let s = match method {
            Method::Degree => degree_centrality(g),
            Method::Eigenvector => eigenvector_centrality(g, settings.spectral)?,
            Method::Minres => minres_coreness(g, settings.minres)?,
            Method::NonBacktracking => nbt_centrality(g, settings.spectral)?,
            Method::PageRank => pagerank(g, settings.damping, settings.spectral)?,
            Method::BeliefPropagation => {
                let result = fit_sbm(g, init, &settings.fit, seed)?;
                let mut s = CentralityScores::new(Method::BeliefPropagation, result.marginals.coreness());
                s.iterations = result.rounds;
                s.converged = result.converged && result.marginals.converged;
                fit = Some(result);
                s
            }
        };
        scores.push(s);
    }
    Ok(ScoreSet { scores, fit })
}

/// One value of the per-replicate table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub sweep: Option<f64>,
    pub replicate: usize,
    pub seed: u64,
    pub method: String,
    pub metric: String,
    pub value: Option<f64>,
}

/// Median and IQR of one (sweep value, method, metric) group.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub sweep: Option<f64>,
    pub method: String,
    pub metric: String,
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureRow {
    pub sweep: Option<f64>,
    pub replicate: usize,
    pub seed: u64,
    pub error: String,
}

/// Outcome of [`run_experiment`].
#[derive(Clone, Debug)]
pub struct EvaluationReport {
    pub config: ExperimentConfig,
    pub rows: Vec<MetricRow>,
    pub aggregates: Vec<AggregateRow>,
    pub failures: Vec<FailureRow>,
    pub attempted: usize,
    pub network: Option<NetworkReport>,
}

/// Fraction of failed replicates above which a report is invalid.
pub const MAX_FAILURE_RATE: f64 = 0.2;

impl EvaluationReport {
    pub fn failure_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.failures.len() as f64 / self.attempted as f64
        }
    }

    pub fn is_valid(&self) -> bool {
        self.failure_rate() <= MAX_FAILURE_RATE
    }

    /// Per-replicate values of `metric` for `method` at sweep value `sweep`.
    pub fn values(&self, sweep: Option<f64>, method: &str, metric: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.sweep == sweep && r.method == method && r.metric == metric)
            .filter_map(|r| r.value)
            .collect()
    }

    pub fn aggregate(&self, sweep: Option<f64>, method: &str, metric: &str) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|r| r.sweep == sweep && r.method == method && r.metric == metric)
    }

    pub fn median(&self, sweep: Option<f64>, method: &str, metric: &str) -> Option<f64> {
        self.aggregate(sweep, method, metric).map(|a| a.median)
    }
}

/// Samples one replicate's graph. Degree-corrected graphs are relabeled by
/// a random permutation, since the generator places the core first.
pub fn sample_replicate(cfg: &ExperimentConfig, point: &SweepPoint, seed: u64) -> Result<(Graph, Labeling, u64)> {
    let mut rng = rng_from_seed(seed);
    let graph_seed: u64 = rng.random();
    let bp_seed: u64 = rng.random();
    match point.alpha {
        None => {
            let (g, truth) = sample_sbm(&cfg.params, point.n, graph_seed)?;
            Ok((g, truth, bp_seed))
        }
        Some(alpha) => {
            let i0 = match cfg.i0 {
                Some(i0) => i0,
                None => default_offset(alpha, point.n, cfg.params.max_affinity())?,
            };
            let corr = power_law_corrections(alpha, point.n, i0)?;
            let (g, truth) = sample_dc_sbm(&cfg.params, &corr, graph_seed)?;
            let mut perm: Vec<usize> = (0..point.n).collect();
            perm.shuffle(&mut rng);
            let mut groups = truth.groups().to_vec();
            for (old, &new) in perm.iter().enumerate() {
                groups[new] = truth.get(old);
            }
            Ok((g.permuted(&perm), Labeling::new(groups), bp_seed))
        }
    }
}

fn run_replicate(cfg: &ExperimentConfig, point: &SweepPoint, replicate: usize, seed: u64) -> Result<Vec<MetricRow>> {
    let (g, truth, bp_seed) = sample_replicate(cfg, point, seed)?;
    let init = match cfg.bp_init {
        BpInit::Default => default_init(&g),
        BpInit::Truth => cfg.params,
    };
    let set = compute_scores(&g, &cfg.methods, &cfg.settings, &init, bp_seed)?;
    let eval = evaluate_scores(&set.scores, Some(&truth))?;
    let mut rows = Vec::new();
    let mut push = |method: &str, metric: &str, value: Option<f64>| {
        rows.push(MetricRow {
            sweep: point.value,
            replicate,
            seed,
            method: method.to_string(),
            metric: metric.to_string(),
            value,
        })
    };
    push("GRAPH", "nodes", Some(g.node_count() as f64));
    push("GRAPH", "edges", Some(g.edge_count() as f64));
    push("GRAPH", "mean_degree", Some(g.mean_degree()));
    push("GRAPH", "core_size", Some(truth.core_size() as f64));
    push_method_rows(&mut push, &set, &eval);
    Ok(rows)
}

fn push_method_rows(push: &mut impl FnMut(&str, &str, Option<f64>), set: &ScoreSet, eval: &ReplicateEvaluation) {
    for (scores, e) in set.scores.iter().zip(&eval.methods) {
        let tag = scores.method.tag();
        push(tag, "ipr", Some(e.ipr));
        push(tag, "agreement", e.agreement);
        push(tag, "overlap", e.overlap);
        push(tag, "converged", Some(if scores.converged { 1.0 } else { 0.0 }));
        push(tag, "iterations", Some(scores.iterations as f64));
        for other in &set.scores {
            if other.method != scores.method {
                let o = other.method.tag();
                push(tag, &format!("pearson_{o}"), eval.pearson.get(scores.method, other.method));
                push(tag, &format!("spearman_{o}"), eval.spearman.get(scores.method, other.method));
            }
        }
    }
    if let Some(fit) = &set.fit {
        push("BP", "fitted_gamma", Some(fit.params.gamma));
        push("BP", "fitted_c11", Some(fit.params.c[0][0]));
        push("BP", "fitted_c12", Some(fit.params.c[0][1]));
        push("BP", "fitted_c22", Some(fit.params.c[1][1]));
        push("BP", "implied_core_size", Some(fit.marginals.implied_core_size() as f64));
        push("BP", "em_rounds", Some(fit.rounds as f64));
        push("BP", "em_restarts", Some(fit.restarts as f64));
    }
}

/// Runs every replicate of a synthetic ensemble on the current rayon pool,
/// or analyzes the input network for `real-network` runs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    if cfg.kind == ExperimentKind::RealNetwork {
        let path = cfg.input.as_ref().expect("validated");
        let network = real_network_report(path, &cfg.gamma_grid, cfg)?;
        let mut rows = Vec::new();
        let mut push = |method: &str, metric: &str, value: Option<f64>| {
            rows.push(MetricRow {
                sweep: None,
                replicate: 0,
                seed: cfg.seed,
                method: method.to_string(),
                metric: metric.to_string(),
                value,
            })
        };
        push("GRAPH", "nodes", Some(network.full.graph.node_count() as f64));
        push("GRAPH", "edges", Some(network.full.graph.edge_count() as f64));
        push("GRAPH", "mean_degree", Some(network.full.graph.mean_degree()));
        push_method_rows(&mut push, &network.full.scores, &network.full.evaluation);
        let aggregates = aggregate(&rows);
        return Ok(EvaluationReport { config: cfg.clone(), rows, aggregates, failures: Vec::new(), attempted: 1, network: Some(network) });
    }

    let points = cfg.sweep_points();
    let jobs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|p| (0..cfg.replicates).map(move |r| (p, r))).collect();
    let outcomes: Vec<(SweepPoint, usize, u64, Result<Vec<MetricRow>>)> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let seed = replicate_seed(cfg.seed, p, r);
            (points[p], r, seed, run_replicate(cfg, &points[p], r, seed))
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (point, replicate, seed, outcome) in outcomes {
        match outcome {
            Ok(r) => rows.extend(r),
            Err(err) => {
                log::warn!("replicate {replicate} (seed {seed}) at {:?} failed: {err}", point.value);
                failures.push(FailureRow { sweep: point.value, replicate, seed, error: err.to_string() });
            }
        }
    }
    let aggregates = aggregate(&rows);
    let report = EvaluationReport { config: cfg.clone(), rows, aggregates, failures, attempted: jobs.len(), network: None };
    if !report.is_valid() {
        log::error!("{} of {} replicates failed; report is invalid", report.failures.len(), report.attempted);
    }
    Ok(report)
}

/// Median and IQR per (sweep value, method, metric), in first-seen order.
pub fn aggregate(rows: &[MetricRow]) -> Vec<AggregateRow> {
    let mut order: Vec<(Option<f64>, &str, &str)> = Vec::new();
    let mut groups: HashMap<(u64, &str, &str), Vec<f64>> = HashMap::new();
    for row in rows {
        let key = (row.sweep.map_or(u64::MAX, f64::to_bits), row.method.as_str(), row.metric.as_str());
        let values = groups.entry(key).or_insert_with(|| {
            order.push((row.sweep, row.method.as_str(), row.metric.as_str()));
            Vec::new()
        });
        if let Some(v) = row.value {
            values.push(v);
        }
    }
    order
        .into_iter()
        .filter_map(|(sweep, method, metric)| {
            let values = &groups[&(sweep.map_or(u64::MAX, f64::to_bits), method, metric)];
            summarize(values).map(|s| AggregateRow {
                sweep,
                method: method.to_string(),
                metric: metric.to_string(),
                count: s.count,
                median: s.median,
                q1: s.q1,
                q3: s.q3,
            })
        })
        .collect()
}

fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn write_csv(path: &Path, header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for record in records {
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    fs::write(path, bytes)?;
    Ok(())
}

/// Writes the report's CSV files and manifest into `dir`. Returns the paths written.
pub fn write_report(report: &EvaluationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let manifest = dir.join("manifest.txt");
    fs::write(&manifest, report.config.manifest())?;
    written.push(manifest);

    let sweep_col = report.config.sweep_variable().map(SweepVariable::column);
    let with_sweep = |tail: &[&'static str]| -> Vec<&'static str> { sweep_col.into_iter().chain(tail.iter().copied()).collect() };
    let sweep_cell = |v: Option<f64>| -> Vec<String> { sweep_col.map(|_| cell(v)).into_iter().collect() };

    let path = dir.join("replicates.csv");
    write_csv(
        &path,
        &with_sweep(&["replicate", "seed", "method", "metric", "value"]),
        report.rows.iter().map(|r| {
            let mut rec = sweep_cell(r.sweep);
            rec.extend([r.replicate.to_string(), r.seed.to_string(), r.method.clone(), r.metric.clone(), cell(r.value)]);
            rec
        }),
    )?;
    written.push(path);

    let path = dir.join("aggregate.csv");
    write_csv(
        &path,
        &with_sweep(&["method", "metric", "count", "median", "q1", "q3"]),
        report.aggregates.iter().map(|a| {
            let mut rec = sweep_cell(a.sweep);
            rec.extend([
                a.method.clone(),
                a.metric.clone(),
                a.count.to_string(),
                a.median.to_string(),
                a.q1.to_string(),
                a.q3.to_string(),
            ]);
            rec
        }),
    )?;
    written.push(path);

    let path = dir.join("failures.csv");
    write_csv(
        &path,
        &with_sweep(&["replicate", "seed", "error"]),
        report.failures.iter().map(|f| {
            let mut rec = sweep_cell(f.sweep);
            rec.extend([f.replicate.to_string(), f.seed.to_string(), f.error.clone()]);
            rec
        }),
    )?;
    written.push(path);

    if let Some(network) = &report.network {
        written.extend(write_network(&network.full, dir, "")?);
        if let Some(sub) = &network.subgraph {
            written.extend(write_network(sub, dir, &format!("top{}_", sub.graph.node_count()))?);
        }
    }
    Ok(written)
}

/// Runs `f` on a pool with `threads` workers, falling back to
/// `CORENESS_THREADS` and then to rayon's default.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a count")))?),
            Err(_) => None,
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// A graph read from an edge list together with the external node ids.
#[derive(Clone, Debug)]
pub struct EdgeList {
    pub graph: Graph,
    /// `ids[i]` is the external id of node `i`, in order of first appearance.
    pub ids: Vec<String>,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped; ids are arbitrary tokens.
pub fn load_edge_list(path: &Path) -> Result<EdgeList> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, path)
}

pub fn parse_edge_list<'t>(text: &'t str, path: &Path) -> Result<EdgeList> {
    let mut index: HashMap<&'t str, usize> = HashMap::new();
    let mut ids = Vec::new();
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected two node ids, found {} fields", tokens.len()),
            });
        }
        let mut lookup = |id: &'t str| -> usize {
            let next = ids.len();
            *index.entry(id).or_insert_with(|| {
                ids.push(id.to_string());
                next
            })
        };
        let a = lookup(tokens[0]);
        let b = lookup(tokens[1]);
        pairs.push((a, b));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGraph(path.to_path_buf()));
    }
    let (graph, report) = Graph::build(ids.len(), pairs)?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph(path.to_path_buf()));
    }
    Ok(EdgeList { graph, ids, self_loops: report.self_loops, duplicates: report.duplicates })
}

/// Scores and correlations of one network.
#[derive(Clone, Debug)]
pub struct NetworkAnalysis {
    pub graph: Graph,
    pub ids: Vec<String>,
    pub scores: ScoreSet,
    pub evaluation: ReplicateEvaluation,
    pub pearson: CorrelationMatrix,
    pub spearman: CorrelationMatrix,
    pub core_agreement: Vec<CoreAgreement>,
}

impl NetworkAnalysis {
    pub fn fit(&self) -> Option<&FitResult> {
        self.scores.fit.as_ref()
    }
}

/// Agreement between the top-`k` sets of two methods.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreAgreement {
    pub gamma: f64,
    pub k: usize,
    pub a: Method,
    pub b: Method,
    pub agreement: f64,
}

#[derive(Clone, Debug)]
pub struct NetworkReport {
    pub full: NetworkAnalysis,
    /// The same analysis on the subgraph induced by the highest-degree nodes.
    pub subgraph: Option<NetworkAnalysis>,
}

/// Fits the SBM, computes every configured score on the network at `path`
/// and compares the methods' top-`gamma` cores over `gamma_grid`.
pub fn real_network_report(path: &Path, gamma_grid: &[f64], cfg: &ExperimentConfig) -> Result<NetworkReport> {
    let edges = load_edge_list(path)?;
    log::info!(
        "{}: {} nodes, {} edges ({} self-loops, {} duplicates dropped)",
        path.display(),
        edges.graph.node_count(),
        edges.graph.edge_count(),
        edges.self_loops,
        edges.duplicates
    );
    let full = analyze_network(edges.graph, edges.ids, gamma_grid, cfg)?;
    let subgraph = if cfg.subgraph_size > 0 && cfg.subgraph_size < full.graph.node_count() {
        let degrees = full.graph.degrees();
        let mut order: Vec<usize> = (0..degrees.len()).collect();
        order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
        let mut keep = order[..cfg.subgraph_size].to_vec();
        keep.sort_unstable();
        let ids = keep.iter().map(|&i| full.ids[i].clone()).collect();
        Some(analyze_network(full.graph.induced_subgraph(&keep), ids, gamma_grid, cfg)?)
    } else {
        None
    };
    Ok(NetworkReport { full, subgraph })
}

pub fn analyze_network(graph: Graph, ids: Vec<String>, gamma_grid: &[f64], cfg: &ExperimentConfig) -> Result<NetworkAnalysis> {
    let init = default_init(&graph);
    let scores = compute_scores(&graph, &cfg.methods, &cfg.settings, &init, cfg.seed)?;
    let evaluation = evaluate_scores(&scores.scores, None)?;
    let pearson = pearson_matrix(&scores.scores)?;
    let spearman = spearman_matrix(&scores.scores)?;
    let n = graph.node_count();
    let mut grid: Vec<f64> = gamma_grid.to_vec();
    if let Some(fit) = &scores.fit {
        grid.push(fit.params.gamma);
    }
    let mut core_agreement = Vec::new();
    for &gamma in &grid {
        let k = core_size(gamma, n);
        let tops: Vec<Labeling> = scores.scores.iter().map(|s| top_k_assignment(&s.scores, k)).collect();
        for a in 0..tops.len() {
            for b in a + 1..tops.len() {
                core_agreement.push(CoreAgreement {
                    gamma,
                    k,
                    a: scores.scores[a].method,
                    b: scores.scores[b].method,
                    agreement: agreement(&tops[a], &tops[b])?,
                });
            }
        }
    }
    Ok(NetworkAnalysis { graph, ids, scores, evaluation, pearson, spearman, core_agreement })
}

fn write_matrix(path: &Path, m: &CorrelationMatrix) -> Result<()> {
    let mut header = vec!["method"];
    header.extend(m.methods.iter().map(|x| x.tag()));
    write_csv(
        path,
        &header,
        m.methods.iter().zip(&m.values).map(|(method, row)| {
            let mut rec = vec![method.tag().to_string()];
            rec.extend(row.iter().map(|v| cell(*v)));
            rec
        }),
    )
}

fn write_network(a: &NetworkAnalysis, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let g = &a.graph;

    let path = dir.join(format!("{prefix}network.csv"));
    let mut summary = vec![
        ("nodes".to_string(), g.node_count().to_string()),
        ("edges".to_string(), g.edge_count().to_string()),
        ("mean_degree".to_string(), g.mean_degree().to_string()),
    ];
    if let Some(fit) = a.fit() {
        summary.extend([
            ("fitted_gamma".to_string(), fit.params.gamma.to_string()),
            ("fitted_c11".to_string(), fit.params.c[0][0].to_string()),
            ("fitted_c12".to_string(), fit.params.c[0][1].to_string()),
            ("fitted_c22".to_string(), fit.params.c[1][1].to_string()),
            ("implied_core_size".to_string(), fit.marginals.implied_core_size().to_string()),
            ("em_rounds".to_string(), fit.rounds.to_string()),
            ("em_converged".to_string(), fit.converged.to_string()),
            ("bp_converged".to_string(), fit.marginals.converged.to_string()),
        ]);
    }
    for s in &a.scores.scores {
        summary.push((format!("{}_converged", s.method.tag()), s.converged.to_string()));
        if let Some(e) = &a.evaluation.method(s.method) {
            summary.push((format!("{}_ipr", s.method.tag()), e.ipr.to_string()));
        }
    }
    write_csv(&path, &["quantity", "value"], summary.into_iter().map(|(k, v)| vec![k, v]))?;
    written.push(path);

    let path = dir.join(format!("{prefix}scores_by_degree.csv"));
    let degrees = g.degrees();
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&x, &y| degrees[y].cmp(&degrees[x]).then(x.cmp(&y)));
    let mut header = vec!["rank", "node", "id", "degree"];
    header.extend(a.scores.scores.iter().map(|s| s.method.tag()));
    write_csv(
        &path,
        &header,
        order.iter().enumerate().map(|(rank, &i)| {
            let mut rec = vec![rank.to_string(), i.to_string(), a.ids[i].clone(), degrees[i].to_string()];
            rec.extend(a.scores.scores.iter().map(|s| s.scores[i].to_string()));
            rec
        }),
    )?;
    written.push(path);

    let path = dir.join(format!("{prefix}pearson.csv"));
    write_matrix(&path, &a.pearson)?;
    written.push(path);
    let path = dir.join(format!("{prefix}spearman.csv"));
    write_matrix(&path, &a.spearman)?;
    written.push(path);

    let path = dir.join(format!("{prefix}core_agreement.csv"));
    write_csv(
        &path,
        &["gamma", "k", "method_a", "method_b", "agreement"],
        a.core_agreement.iter().map(|r| {
            vec![r.gamma.to_string(), r.k.to_string(), r.a.tag().to_string(), r.b.tag().to_string(), r.agreement.to_string()]
        }),
    )?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides_and_lists() {
        let cfg = ExperimentConfig::parse(
            "# ranking\nkind = homogeneous-ranking\nn = 300\nc12 = 5\nmethods = [ec, DEGREE, bp]\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.n, 300);
        assert_eq!(cfg.params.c[0][1], 5.0);
        assert_eq!(cfg.params.c[1][0], 5.0);
        assert_eq!(cfg.methods, vec![Method::BeliefPropagation, Method::Degree, Method::Eigenvector]);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("n = 3\n").is_err());
        assert!(ExperimentConfig::parse("kind = nope\n").is_err());
        assert!(ExperimentConfig::parse("kind = ipr-scaling\nfoo = 1\n").is_err());
        assert!(ExperimentConfig::parse("kind = ipr-scaling\nreplicates = 0\n").is_err());
        assert!(ExperimentConfig::parse("kind = ipr-scaling\nsweep_n = 1, 2\n").is_err());
        assert!(ExperimentConfig::parse("kind = alpha-sweep\nsweep_n = [100]\n").is_err());
        assert!(ExperimentConfig::parse("kind = real-network\n").is_err());
        assert!(ExperimentConfig::parse("kind = homogeneous-ranking\nn = 5\n").is_err());
    }

    #[test]
    fn manifest_round_trips() {
        for kind in ExperimentKind::ALL {
            let mut cfg = ExperimentConfig::defaults(kind);
            if kind == ExperimentKind::RealNetwork {
                cfg.input = Some(PathBuf::from("as.txt"));
            }
            cfg.alpha = Some(3.5);
            cfg.i0 = Some(4);
            let back = ExperimentConfig::parse(&cfg.manifest()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.manifest(), cfg.manifest());
        }
    }

    #[test]
    fn replicate_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for p in 0..5 {
            for r in 0..100 {
                assert!(seen.insert(replicate_seed(1, p, r)));
            }
        }
    }

    #[test]
    fn edge_list_examples() {
        let path = Path::new("mem");
        let e = parse_edge_list("0 1\n1 2\n", path).unwrap();
        assert_eq!(e.graph.node_count(), 3);
        assert_eq!(e.graph.edges(), &[(0, 1), (1, 2)]);

        let e = parse_edge_list("# comment\n1 2\n2 1\n\n", path).unwrap();
        assert_eq!(e.graph.edge_count(), 1);
        assert_eq!(e.ids, vec!["1", "2"]);
        assert_eq!(e.duplicates, 1);

        let e = parse_edge_list("as7 as3  \n\tas3 as9\n", path).unwrap();
        assert_eq!(e.ids, vec!["as7", "as3", "as9"]);
        assert_eq!(e.graph.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_list_errors() {
        let path = Path::new("mem");
        match parse_edge_list("0 1\n2\n", path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1 2\n", path), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("", path), Err(Error::EmptyGraph(_))));
        assert!(matches!(parse_edge_list("# only\n\n", path), Err(Error::EmptyGraph(_))));
        assert!(matches!(parse_edge_list("4 4\n", path), Err(Error::EmptyGraph(_))));
    }

    #[test]
    fn aggregate_skips_missing_values() {
        let row = |v: Option<f64>| MetricRow {
            sweep: None,
            replicate: 0,
            seed: 0,
            method: "EC".into(),
            metric: "ipr".into(),
            value: v,
        };
        let agg = aggregate(&[row(Some(1.0)), row(None), row(Some(3.0))]);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].count, 2);
        assert_eq!(agg[0].median, 2.0);
    }
}
