//! Belief propagation for the two-block stochastic block model and the
//! expectation-maximization loop that fits its parameters.
//!
//! Messages `eta^{i->j}` live on directed edges. The product over
//! non-neighbors in the cavity update is replaced by a shared external field
//! `h_a = sum_k sum_b q_b^k log(1 - p_ab)`, from which each node subtracts the
//! contributions of itself and its neighbors, so a sweep costs `O(n + m)`.
//! When the non-edge factor `1 - p_ab` is separable (`(1-p12)^2 = (1-p11)(1-p22)`)
//! this field is exact and BP on a tree reproduces the posterior exactly.
//!
//! [`BpMode::Dense`] keeps a message for every ordered pair and evaluates the
//! full product over all other nodes. It is quadratic per sweep and meant for
//! small graphs and cross-checks.
//!
//! All arithmetic is in the log domain. Every per-group quantity is a sum of
//! two terms, so swapping the block labels of the parameters and of the state
//! yields bit-identical swapped marginals.

use rand::Rng;

use crate::error::{Error, Result};
use crate::generators::{rng_from_seed, BlockModelParams};
use crate::graph::{Graph, Group, Labeling};

/// Smallest and largest edge probability fed to the logarithms.
const P_FLOOR: f64 = 1e-15;
const P_CEIL: f64 = 1.0 - 1e-12;

/// Largest graph accepted by [`BpMode::Dense`].
pub const DENSE_MAX_NODES: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BpMode {
    #[default]
    Field,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpConfig {
    /// Stop when the largest message change of a sweep drops below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Weight of the previous message, in `[0, 1)`.
    pub damping: f64,
    /// Amplitude of the uniform perturbation of the initial messages.
    pub init_noise: f64,
    pub mode: BpMode,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self { tol: 1e-6, max_sweeps: 1000, damping: 0.0, init_noise: 0.1, mode: BpMode::Field }
    }
}

impl BpConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("BP tolerance must be positive, got {}", self.tol)));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParameter(format!("damping must lie in [0, 1), got {}", self.damping)));
        }
        if !(0.0..=1.0).contains(&self.init_noise) {
            return Err(Error::InvalidParameter(format!("init noise must lie in [0, 1], got {}", self.init_noise)));
        }
        Ok(())
    }
}

/// Log-domain view of the parameters for a graph on `n` nodes.
#[derive(Clone, Copy, Debug)]
struct LogParams {
    log_prior: [f64; 2],
    /// Edge probabilities `p_ab`, clamped away from 0 and 1.
    p: [[f64; 2]; 2],
    /// `log(1 - p_ab)`.
    log_absent: [[f64; 2]; 2],
}

impl LogParams {
    fn new(params: &BlockModelParams, n: usize) -> Self {
        let prior = params.priors();
        let mut p = [[0.0; 2]; 2];
        let mut log_absent = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                p[a][b] = (params.c[a][b] / n as f64).clamp(P_FLOOR, P_CEIL);
                log_absent[a][b] = (-p[a][b]).ln_1p();
            }
        }
        Self { log_prior: [prior[0].ln(), prior[1].ln()], p, log_absent }
    }

    /// `log sum_b eta_b w_ab` for both `a`.
    #[inline]
    fn log_link(eta: [f64; 2], w: &[[f64; 2]; 2]) -> [f64; 2] {
        [(eta[0] * w[0][0] + eta[1] * w[0][1]).ln(), (eta[0] * w[1][0] + eta[1] * w[1][1]).ln()]
    }

    /// `sum_b q_b log(1 - p_ab)` for both `a`.
    #[inline]
    fn absent_field(&self, q: [f64; 2]) -> [f64; 2] {
        let l = &self.log_absent;
        [q[0] * l[0][0] + q[1] * l[0][1], q[0] * l[1][0] + q[1] * l[1][1]]
    }

    fn absent_weights(&self) -> [[f64; 2]; 2] {
        let mut w = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                w[a][b] = 1.0 - self.p[a][b];
            }
        }
        w
    }
}

#[inline]
fn log_sum_exp(x: [f64; 2]) -> f64 {
    let m = x[0].max(x[1]);
    m + ((x[0] - m).exp() + (x[1] - m).exp()).ln()
}

#[inline]
fn normalize_log(x: [f64; 2]) -> [f64; 2] {
    let z = log_sum_exp(x);
    [(x[0] - z).exp(), (x[1] - z).exp()]
}

#[inline]
fn sub(x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    [x[0] - y[0], x[1] - y[1]]
}

#[inline]
fn add(x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    [x[0] + y[0], x[1] + y[1]]
}

fn perturbed(rng: &mut impl Rng, prior: [f64; 2], amplitude: f64) -> [f64; 2] {
    if amplitude == 0.0 {
        return prior;
    }
    let mut x = [0.0; 2];
    for a in 0..2 {
        let u: f64 = rng.random();
        x[a] = (prior[a] + amplitude * (2.0 * u - 1.0)).max(1e-6);
    }
    let s = x[0] + x[1];
    [x[0] / s, x[1] / s]
}

/// Messages, node beliefs and the external field of a BP run.
#[derive(Clone, Debug)]
pub struct BpState {
    params: BlockModelParams,
    logp: LogParams,
    n: usize,
    mode: BpMode,
    /// Field mode: one entry per directed edge. Dense mode: `n * n` entries,
    /// `i * n + j` holding `i -> j`.
    messages: Vec<[f64; 2]>,
    beliefs: Vec<[f64; 2]>,
    field: [f64; 2],
    reverse: Vec<usize>,
    adjacent: Vec<bool>,
    residual: f64,
    sweeps: usize,
}

impl BpState {
    /// Messages and beliefs start at the priors perturbed by uniform noise of
    /// amplitude `cfg.init_noise`.
    pub fn new(g: &Graph, params: &BlockModelParams, cfg: &BpConfig, seed: u64) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let n = g.node_count();
        if n == 0 {
            return Err(Error::InvalidParameter("BP needs at least one node".into()));
        }
        if cfg.mode == BpMode::Dense && n > DENSE_MAX_NODES {
            return Err(Error::InvalidParameter(format!("dense BP supports at most {DENSE_MAX_NODES} nodes, got {n}")));
        }
        let prior = params.priors();
        let mut rng = rng_from_seed(seed);
        let message_count = match cfg.mode {
            BpMode::Field => g.directed_edge_count(),
            BpMode::Dense => n * n,
        };
        let messages = (0..message_count).map(|_| perturbed(&mut rng, prior, cfg.init_noise)).collect();
        let beliefs = (0..n).map(|_| perturbed(&mut rng, prior, cfg.init_noise)).collect();
        let adjacent = match cfg.mode {
            BpMode::Field => Vec::new(),
            BpMode::Dense => {
                let mut adj = vec![false; n * n];
                for &(i, j) in g.edges() {
                    adj[i * n + j] = true;
                    adj[j * n + i] = true;
                }
                adj
            }
        };
        let mut state = Self {
            params: *params,
            logp: LogParams::new(params, n),
            n,
            mode: cfg.mode,
            messages,
            beliefs,
            field: [0.0; 2],
            reverse: g.reverse_edges(),
            adjacent,
            residual: f64::INFINITY,
            sweeps: 0,
        };
        state.refresh_field();
        Ok(state)
    }

    pub fn params(&self) -> &BlockModelParams {
        &self.params
    }

    /// Replaces the parameters while keeping messages (warm start).
    pub fn set_params(&mut self, params: &BlockModelParams) -> Result<()> {
        params.validate()?;
        self.params = *params;
        self.logp = LogParams::new(params, self.n);
        self.refresh_field();
        Ok(())
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn mode(&self) -> BpMode {
        self.mode
    }

    /// External field `h_a`.
    pub fn field(&self) -> [f64; 2] {
        self.field
    }

    pub fn beliefs(&self) -> &[[f64; 2]] {
        &self.beliefs
    }

    /// Field mode: indexed by directed-edge id. Dense mode: `i * n + j`.
    pub fn messages(&self) -> &[[f64; 2]] {
        &self.messages
    }

    /// Message `k -> i`. In field mode `k` must be a neighbor of `i`.
    pub fn message(&self, g: &Graph, k: usize, i: usize) -> Option<[f64; 2]> {
        match self.mode {
            BpMode::Dense => (k != i).then(|| self.messages[k * self.n + i]),
            BpMode::Field => {
                let pos = g.neighbors(k).binary_search(&i).ok()?;
                Some(self.messages[g.out_edges(k).start + pos])
            }
        }
    }

    /// Exchanges the roles of the two blocks in parameters, messages and beliefs.
    pub fn swap_labels(&mut self) {
        self.params = self.params.swapped();
        self.logp = LogParams::new(&self.params, self.n);
        for m in self.messages.iter_mut().chain(self.beliefs.iter_mut()) {
            m.swap(0, 1);
        }
        self.refresh_field();
    }

    fn refresh_field(&mut self) {
        let mut h = [0.0; 2];
        for q in &self.beliefs {
            h = add(h, self.logp.absent_field(*q));
        }
        self.field = h;
    }

    /// Log-terms `log sum_b eta_b^{k->i} p_ab` for every neighbor `k` of `i`
    /// (field mode) and the unnormalized log-belief of `i`.
    fn field_node_terms(&self, g: &Graph, i: usize, incoming: &mut Vec<[f64; 2]>) -> [f64; 2] {
        incoming.clear();
        let lp = &self.logp;
        let mut total = [0.0; 2];
        let mut local = lp.absent_field(self.beliefs[i]);
        for e in g.out_edges(i) {
            let k = g.target(e);
            let t = LogParams::log_link(self.messages[self.reverse[e]], &lp.p);
            total = add(total, t);
            incoming.push(t);
            local = add(local, lp.absent_field(self.beliefs[k]));
        }
        add(add(lp.log_prior, total), sub(self.field, local))
    }

    /// Same for dense mode: one term per other node.
    fn dense_node_terms(&self, i: usize, incoming: &mut Vec<[f64; 2]>) -> [f64; 2] {
        incoming.clear();
        let n = self.n;
        let present = self.logp.p;
        let absent = self.logp.absent_weights();
        let mut total = [0.0; 2];
        for k in 0..n {
            if k == i {
                incoming.push([0.0; 2]);
                continue;
            }
            let w = if self.adjacent[i * n + k] { &present } else { &absent };
            let t = LogParams::log_link(self.messages[k * n + i], w);
            total = add(total, t);
            incoming.push(t);
        }
        add(self.logp.log_prior, total)
    }

    /// One asynchronous pass over all directed edges in `(source, target)`
    /// order. Returns the largest absolute message change.
    pub fn sweep(&mut self, g: &Graph, damping: f64) -> f64 {
        debug_assert_eq!(g.node_count(), self.n);
        self.refresh_field();
        let mut incoming = Vec::new();
        let mut residual: f64 = 0.0;
        for i in 0..self.n {
            let (base, first) = match self.mode {
                BpMode::Field => (self.field_node_terms(g, i, &mut incoming), g.out_edges(i).start),
                BpMode::Dense => (self.dense_node_terms(i, &mut incoming), i * self.n),
            };
            for (idx, t) in incoming.iter().enumerate() {
                if self.mode == BpMode::Dense && idx == i {
                    continue;
                }
                let e = first + idx;
                let fresh = normalize_log(sub(base, *t));
                let old = self.messages[e];
                let new = if damping > 0.0 {
                    [(1.0 - damping) * fresh[0] + damping * old[0], (1.0 - damping) * fresh[1] + damping * old[1]]
                } else {
                    fresh
                };
                residual = residual.max((new[0] - old[0]).abs()).max((new[1] - old[1]).abs());
                self.messages[e] = new;
            }
            let q = normalize_log(base);
            let old = self.beliefs[i];
            self.field = add(self.field, sub(self.logp.absent_field(q), self.logp.absent_field(old)));
            self.beliefs[i] = q;
        }
        self.residual = residual;
        self.sweeps += 1;
        residual
    }

    /// Sweeps until the residual drops below `cfg.tol` or `cfg.max_sweeps`
    /// more sweeps were made. Returns whether it converged.
    pub fn run(&mut self, g: &Graph, cfg: &BpConfig) -> bool {
        for _ in 0..cfg.max_sweeps {
            if self.sweep(g, cfg.damping) < cfg.tol {
                return true;
            }
        }
        false
    }

    /// Node and edge marginals from the current messages.
    pub fn marginals(&self, g: &Graph, converged: bool) -> Marginals {
        let mut incoming = Vec::new();
        let mut q = Vec::with_capacity(self.n);
        let mut log_z = 0.0;
        let mut absent_pairs = 0.0;
        for i in 0..self.n {
            let base = match self.mode {
                BpMode::Field => {
                    let base = self.field_node_terms(g, i, &mut incoming);
                    let node_field = sub(base, self.logp.log_prior);
                    let link_total = incoming.iter().fold([0.0; 2], |acc, t| add(acc, *t));
                    let non_neighbor = sub(node_field, link_total);
                    let qi = normalize_log(base);
                    absent_pairs += 0.5 * (qi[0] * non_neighbor[0] + qi[1] * non_neighbor[1]);
                    base
                }
                BpMode::Dense => self.dense_node_terms(i, &mut incoming),
            };
            log_z += log_sum_exp(base);
            q.push(normalize_log(base));
        }
        let pair_q: Vec<[[f64; 2]; 2]> = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                let (x, y) = self.edge_messages(g, i, j);
                let mut m = [[0.0; 2]; 2];
                let mut z = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        m[a][b] = x[a] * y[b] * self.logp.p[a][b];
                        z += m[a][b];
                    }
                }
                log_z -= z.ln();
                m.iter_mut().flatten().for_each(|v| *v /= z);
                m
            })
            .collect();
        match self.mode {
            BpMode::Field => log_z -= absent_pairs,
            BpMode::Dense => {
                let absent = self.logp.absent_weights();
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        if self.adjacent[i * self.n + j] {
                            continue;
                        }
                        let x = self.messages[i * self.n + j];
                        let y = self.messages[j * self.n + i];
                        let z: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| x[a] * y[b] * absent[a][b]).sum();
                        log_z -= z.ln();
                    }
                }
            }
        }
        Marginals { q, pair_q, converged, log_likelihood_proxy: log_z, sweeps: self.sweeps, residual: self.residual }
    }

    fn edge_messages(&self, g: &Graph, i: usize, j: usize) -> ([f64; 2], [f64; 2]) {
        match self.mode {
            BpMode::Dense => (self.messages[i * self.n + j], self.messages[j * self.n + i]),
            BpMode::Field => {
                let pos = g.neighbors(i).binary_search(&j).expect("edge exists");
                let e = g.out_edges(i).start + pos;
                (self.messages[e], self.messages[self.reverse[e]])
            }
        }
    }
}

/// BP estimates of the posterior marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals {
    /// Per node `[P(core), P(periphery)]`.
    pub q: Vec<[f64; 2]>,
    /// Per undirected edge, in [`Graph::edges`] order, `q_ab^{ij}` with `i < j`.
    pub pair_q: Vec<[[f64; 2]; 2]>,
    pub converged: bool,
    /// Bethe estimate of `log P(A | p, gamma)`.
    pub log_likelihood_proxy: f64,
    pub sweeps: usize,
    pub residual: f64,
}

impl Marginals {
    /// Probability of belonging to the core, per node.
    pub fn coreness(&self) -> Vec<f64> {
        self.q.iter().map(|q| q[0]).collect()
    }

    /// Number of nodes more likely core than periphery.
    pub fn implied_core_size(&self) -> usize {
        self.q.iter().filter(|q| q[0] > 0.5).count()
    }

    /// Marginals built from a hard labeling.
    pub fn from_labels(g: &Graph, labels: &Labeling) -> Self {
        let q: Vec<[f64; 2]> = labels.groups().iter().map(|grp| if *grp == Group::Core { [1.0, 0.0] } else { [0.0, 1.0] }).collect();
        let pair_q = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                let mut m = [[0.0; 2]; 2];
                m[labels.get(i).index()][labels.get(j).index()] = 1.0;
                m
            })
            .collect();
        Self { q, pair_q, converged: true, log_likelihood_proxy: f64::NAN, sweeps: 0, residual: 0.0 }
    }

    fn swap_labels(&mut self) {
        for q in &mut self.q {
            q.swap(0, 1);
        }
        for m in &mut self.pair_q {
            *m = [[m[1][1], m[1][0]], [m[0][1], m[0][0]]];
        }
    }
}

/// Initializes a field-mode BP state with the default configuration.
pub fn init_bp(g: &Graph, params: &BlockModelParams, seed: u64) -> Result<BpState> {
    BpState::new(g, params, &BpConfig::default(), seed)
}

/// One sweep; see [`BpState::sweep`].
pub fn bp_sweep(state: &mut BpState, g: &Graph) -> f64 {
    state.sweep(g, 0.0)
}

/// Runs BP from a fresh state and assembles the marginals.
pub fn run_bp(g: &Graph, params: &BlockModelParams, cfg: &BpConfig, seed: u64) -> Result<Marginals> {
    let mut state = BpState::new(g, params, cfg, seed)?;
    let converged = state.run(g, cfg);
    Ok(state.marginals(g, converged))
}

/// Threshold on a group's total marginal mass below which it counts as empty.
const EMPTY_GROUP_MASS: f64 = 1e-8;

/// M-step: `p_ab` as the ratio of expected edges to expected pairs between
/// the groups (non-edge pairs factorized as `q_a^i q_b^j`) and `gamma_a` as
/// the mean marginal. Returns `c_ab = n p_ab`.
pub fn em_update(g: &Graph, marg: &Marginals) -> Result<BlockModelParams> {
    let n = g.node_count();
    if marg.q.len() != n {
        return Err(Error::LengthMismatch { left: marg.q.len(), right: n });
    }
    if marg.pair_q.len() != g.edge_count() {
        return Err(Error::LengthMismatch { left: marg.pair_q.len(), right: g.edge_count() });
    }
    let mut mass = [0.0; 2];
    let mut self_pairs = [[0.0; 2]; 2];
    for q in &marg.q {
        for a in 0..2 {
            mass[a] += q[a];
            for b in 0..2 {
                self_pairs[a][b] += q[a] * q[b];
            }
        }
    }
    for (a, &m) in mass.iter().enumerate() {
        if m < EMPTY_GROUP_MASS {
            return Err(Error::DegenerateGroup { group: a + 1, mass: m });
        }
    }
    // Ordered pairs: each edge contributes q^{ij}_ab and its transpose.
    let mut linked = [[0.0; 2]; 2];
    let mut correction = [[0.0; 2]; 2];
    for (&(i, j), m) in g.edges().iter().zip(&marg.pair_q) {
        for a in 0..2 {
            for b in 0..2 {
                let both = m[a][b] + m[b][a];
                linked[a][b] += both;
                correction[a][b] += both - marg.q[i][a] * marg.q[j][b] - marg.q[j][a] * marg.q[i][b];
            }
        }
    }
    let mut c = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let pairs = mass[a] * mass[b] - self_pairs[a][b] + correction[a][b];
            let p = if pairs > 0.0 { linked[a][b] / pairs } else { 0.0 };
            c[a][b] = n as f64 * p;
        }
    }
    let sym = 0.5 * (c[0][1] + c[1][0]);
    c[0][1] = sym;
    c[1][0] = sym;
    let gamma = (mass[0] / n as f64).clamp(EMPTY_GROUP_MASS, 1.0 - EMPTY_GROUP_MASS);
    Ok(BlockModelParams { gamma, c })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    /// Stop when `max |delta c_ab|` between rounds drops below this.
    pub tol: f64,
    pub max_rounds: usize,
    /// Fresh starts allowed after a degenerate group.
    pub restarts: usize,
    pub bp: BpConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { tol: 1e-4, max_rounds: 50, restarts: 3, bp: BpConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub params: BlockModelParams,
    pub marginals: Marginals,
    pub rounds: usize,
    pub converged: bool,
    pub restarts: usize,
}

/// Generic starting point: `gamma = 0.5`, `c = [2d d; d d/2]` with `d` the
/// observed mean degree.
pub fn default_init(g: &Graph) -> BlockModelParams {
    let d = g.mean_degree().max(1e-3);
    BlockModelParams { gamma: 0.5, c: [[2.0 * d, d], [d, 0.5 * d]] }
}

/// Alternates BP and the M-step until the affinities settle. The block with
/// the larger fitted diagonal affinity is reported as the core.
pub fn fit_sbm(g: &Graph, init: &BlockModelParams, cfg: &FitConfig, seed: u64) -> Result<FitResult> {
    init.validate()?;
    let mut last_err = None;
    for restart in 0..=cfg.restarts {
        let attempt_seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(restart as u64));
        match fit_once(g, init, cfg, attempt_seed) {
            Ok(mut fit) => {
                fit.restarts = restart;
                return Ok(fit);
            }
            Err(err @ Error::DegenerateGroup { .. }) => {
                log::debug!("EM restart {restart} after {err}");
                last_err = Some(err);
            }
            Err(err) => return Err(err),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn fit_once(g: &Graph, init: &BlockModelParams, cfg: &FitConfig, seed: u64) -> Result<FitResult> {
    let mut state = BpState::new(g, init, &cfg.bp, seed)?;
    let mut params = *init;
    let mut rounds = 0;
    let mut converged = false;
    let mut marginals;
    loop {
        let bp_converged = state.run(g, &cfg.bp);
        marginals = state.marginals(g, bp_converged);
        let next = em_update(g, &marginals)?;
        rounds += 1;
        let delta = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| (next.c[a][b] - params.c[a][b]).abs()).fold(0.0, f64::max);
        params = next;
        if delta < cfg.tol {
            converged = true;
            break;
        }
        if rounds >= cfg.max_rounds {
            break;
        }
        state.set_params(&params)?;
    }
    if params.c[0][0] < params.c[1][1] {
        params = params.swapped();
        marginals.swap_labels();
    }
    Ok(FitResult { params, marginals, rounds, converged, restarts: 0 })
}

/// Log of the degree-only odds ratio `q_1^i / q_2^i`:
/// `log(gamma_1/gamma_2) - k_1 + k_2 + sum_{k~i} log[(eta_1 c11 + eta_2 c12) / (eta_1 c21 + eta_2 c22)]`
/// with `k_a = sum_b c_ab gamma_b` and incoming messages `eta^{k->i}`.
pub fn log_degree_odds_ratio(g: &Graph, params: &BlockModelParams, state: &BpState, node: usize) -> f64 {
    let gamma = params.priors();
    let c = &params.c;
    let k1 = c[0][0] * gamma[0] + c[0][1] * gamma[1];
    let k2 = c[1][0] * gamma[0] + c[1][1] * gamma[1];
    let mut log_ratio = (gamma[0] / gamma[1]).ln() - k1 + k2;
    for &k in g.neighbors(node) {
        let eta = state.message(g, k, node).expect("neighbor message");
        log_ratio += ((eta[0] * c[0][0] + eta[1] * c[0][1]) / (eta[0] * c[1][0] + eta[1] * c[1][1])).ln();
    }
    log_ratio
}

pub fn degree_odds_ratio(g: &Graph, params: &BlockModelParams, state: &BpState, node: usize) -> f64 {
    log_degree_odds_ratio(g, params, state, node).exp()
}
