//! Node centrality and coreness scores: degree, eigenvector, MINRES,
//! non-backtracking and PageRank.
//!
//! The spectral measures use power iteration started from the uniform vector.
//! Iterating `M + I` instead of `M` leaves the eigenvectors unchanged and
//! makes the Perron root strictly dominant even on bipartite graphs, where
//! `-lambda_1` is also an eigenvalue.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Degree,
    Eigenvector,
    Minres,
    NonBacktracking,
    PageRank,
    BeliefPropagation,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::BeliefPropagation, Method::Degree, Method::Eigenvector, Method::Minres, Method::NonBacktracking, Method::PageRank];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Degree => "DEGREE",
            Method::Eigenvector => "EC",
            Method::Minres => "MINRES",
            Method::NonBacktracking => "NBT",
            Method::PageRank => "PR",
            Method::BeliefPropagation => "BP",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag().eq_ignore_ascii_case(tag))
    }

    /// Normalization declared for this method's scores.
    pub fn norm(self) -> Norm {
        match self {
            Method::Degree => Norm::Raw,
            Method::Eigenvector | Method::Minres | Method::NonBacktracking => Norm::L2,
            Method::PageRank => Norm::L1,
            Method::BeliefPropagation => Norm::Probability,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// Unit Euclidean norm.
    L2,
    /// Entries sum to one.
    L1,
    /// Unscaled counts.
    Raw,
    /// Each entry is a probability.
    Probability,
}

/// Nonnegative per-node scores tagged with the method that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityScores {
    pub method: Method,
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Leading eigenvalue for EC and NBT.
    pub eigenvalue: Option<f64>,
    /// Euclidean norm of the unnormalized MINRES minimizer.
    pub raw_norm: Option<f64>,
}

impl CentralityScores {
    pub fn new(method: Method, scores: Vec<f64>) -> Self {
        Self { method, scores, iterations: 0, converged: true, eigenvalue: None, raw_norm: None }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn norm(&self) -> Norm {
        self.method.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub const SPECTRAL: SolverConfig = SolverConfig { tol: 1e-10, max_iter: 100_000 };
    pub const MINRES: SolverConfig = SolverConfig { tol: 1e-8, max_iter: 10_000 };
}

pub const DEFAULT_DAMPING: f64 = 0.85;

fn l2_normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn degree_centrality(g: &Graph) -> CentralityScores {
    CentralityScores::new(Method::Degree, g.degrees().into_iter().map(|d| d as f64).collect())
}

/// `y = A x`.
fn adjacency_product(g: &Graph, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = g.neighbors(i).iter().map(|&j| x[j]).sum();
    }
}

/// Leading eigenvector of the adjacency matrix, unit L2 norm, nonnegative.
pub fn eigenvector_centrality(g: &Graph, cfg: SolverConfig) -> Result<CentralityScores> {
    if g.edge_count() == 0 {
        return Err(Error::NoSpectrum("eigenvector centrality of an edgeless graph"));
    }
    let n = g.node_count();
    let mut u = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        adjacency_product(g, &u, &mut next);
        next.iter_mut().zip(&u).for_each(|(y, x)| *y += x);
        l2_normalize(&mut next);
        iterations += 1;
        let change = max_abs_diff(&next, &u);
        std::mem::swap(&mut u, &mut next);
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    adjacency_product(g, &u, &mut next);
    let lambda = u.iter().zip(&next).map(|(a, b)| a * b).sum::<f64>();
    Ok(CentralityScores { method: Method::Eigenvector, scores: u, iterations, converged, eigenvalue: Some(lambda), raw_norm: None })
}

/// Off-diagonal residual `H_B[u] = sum_{i != j} (A_ij - u_i u_j)^2` over
/// ordered pairs, in `O(n + m)`.
pub fn minres_objective(g: &Graph, u: &[f64]) -> f64 {
    let s2: f64 = u.iter().map(|x| x * x).sum();
    let s4: f64 = u.iter().map(|x| x.powi(4)).sum();
    let cross: f64 = g.edges().iter().map(|&(i, j)| u[i] * u[j]).sum();
    2.0 * g.edge_count() as f64 - 4.0 * cross + (s2 * s2 - s4)
}

/// Coordinate-wise minimizer of `H_B` over `u_i >= 0` with the rest fixed.
fn minres_target(g: &Graph, u: &[f64], i: usize, sum_sq: f64) -> f64 {
    let num: f64 = g.neighbors(i).iter().map(|&j| u[j]).sum();
    let den = sum_sq - u[i] * u[i];
    if den > 0.0 {
        (num / den).max(0.0)
    } else {
        0.0
    }
}

/// Largest violation of `u_i = (sum_j A_ij u_j) / (sum_{j != i} u_j^2)`.
pub fn minres_stationarity(g: &Graph, u: &[f64]) -> f64 {
    let sum_sq: f64 = u.iter().map(|x| x * x).sum();
    (0..u.len()).map(|i| (u[i] - minres_target(g, u, i, sum_sq)).abs()).fold(0.0, f64::max)
}

/// Factor `s` minimizing `H_B[s v]`.
pub fn minres_scale(g: &Graph, v: &[f64]) -> f64 {
    let s2: f64 = v.iter().map(|x| x * x).sum();
    let s4: f64 = v.iter().map(|x| x.powi(4)).sum();
    let cross: f64 = 2.0 * g.edges().iter().map(|&(i, j)| v[i] * v[j]).sum::<f64>();
    let denom = s2 * s2 - s4;
    if denom > 0.0 && cross > 0.0 {
        (cross / denom).sqrt()
    } else {
        1.0
    }
}

#[derive(Clone, Debug)]
pub struct MinresSolution {
    /// Unnormalized minimizer.
    pub u: Vec<f64>,
    /// Objective at the rescaled eigenvector start.
    pub initial_objective: f64,
    pub final_objective: f64,
    pub cycles: usize,
    pub converged: bool,
}

/// Cyclic coordinate descent on `H_B` from the optimally scaled eigenvector
/// centrality vector. Each update is an exact coordinate minimizer, so the
/// objective never increases.
pub fn minres_solve(g: &Graph, cfg: SolverConfig) -> Result<MinresSolution> {
    let ec = eigenvector_centrality(g, SolverConfig::SPECTRAL)?;
    Ok(minres_descent(g, &ec.scores, cfg))
}

/// Coordinate descent from an arbitrary nonnegative start, rescaled first.
pub fn minres_descent(g: &Graph, start: &[f64], cfg: SolverConfig) -> MinresSolution {
    let scale = minres_scale(g, start);
    let mut u: Vec<f64> = start.iter().map(|x| x * scale).collect();
    let initial_objective = minres_objective(g, &u);
    let mut cycles = 0;
    let mut converged = false;
    while cycles < cfg.max_iter {
        // Recomputed each cycle so rounding in the running sum cannot build up.
        let mut sum_sq: f64 = u.iter().map(|x| x * x).sum();
        let mut change: f64 = 0.0;
        for i in 0..u.len() {
            let target = minres_target(g, &u, i, sum_sq);
            change = change.max((target - u[i]).abs());
            sum_sq += target * target - u[i] * u[i];
            u[i] = target;
        }
        cycles += 1;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    let final_objective = minres_objective(g, &u);
    MinresSolution { u, initial_objective, final_objective, cycles, converged }
}

/// MINRES coreness, L2-normalized; the raw norm is kept in `raw_norm`.
pub fn minres_coreness(g: &Graph, cfg: SolverConfig) -> Result<CentralityScores> {
    let sol = minres_solve(g, cfg)?;
    let mut scores = sol.u;
    let raw = l2_normalize(&mut scores);
    if raw == 0.0 {
        return Err(Error::NoSpectrum("MINRES collapsed to the zero vector"));
    }
    Ok(CentralityScores { method: Method::Minres, scores, iterations: sol.cycles, converged: sol.converged, eigenvalue: None, raw_norm: Some(raw) })
}

/// Non-backtracking centrality from the `2n x 2n` companion operator
/// `[[A, I - D], [I, 0]]`, applied matrix-free. The first `n` entries of its
/// leading eigenvector equal `u_j = sum_i A_ij v_{i->j}` for the leading
/// eigenvector `v` of the non-backtracking matrix.
pub fn nbt_centrality(g: &Graph, cfg: SolverConfig) -> Result<CentralityScores> {
    if !g.two_core().iter().any(|&x| x) {
        return Err(Error::NoSpectrum("non-backtracking centrality of a forest"));
    }
    let n = g.node_count();
    let deg = g.degrees();
    // The uniform vector is itself an eigenvector (eigenvalue 1), so start
    // from the image of the all-ones edge vector: x = A d - d, y = d.
    let mut y: Vec<f64> = deg.iter().map(|&d| d as f64).collect();
    let mut x = vec![0.0; n];
    adjacency_product(g, &y, &mut x);
    x.iter_mut().zip(&y).for_each(|(a, d)| *a -= d);
    let norm = x.iter().chain(y.iter()).map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().chain(y.iter_mut()).for_each(|v| *v /= norm);
    let mut ax = vec![0.0; n];
    let mut nx = vec![0.0; n];
    let mut ny = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        adjacency_product(g, &x, &mut ax);
        for i in 0..n {
            nx[i] = ax[i] + (1.0 - deg[i] as f64) * y[i] + x[i];
            ny[i] = x[i] + y[i];
        }
        let norm = nx.iter().chain(ny.iter()).map(|v| v * v).sum::<f64>().sqrt();
        nx.iter_mut().chain(ny.iter_mut()).for_each(|v| *v /= norm);
        iterations += 1;
        let change = max_abs_diff(&nx, &x).max(max_abs_diff(&ny, &y));
        std::mem::swap(&mut x, &mut nx);
        std::mem::swap(&mut y, &mut ny);
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    // At the fixed point x = mu y.
    let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let yy: f64 = y.iter().map(|b| b * b).sum();
    let mu = xy / yy;
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut scores: Vec<f64> = x.iter().map(|v| (sign * v).max(0.0)).collect();
    l2_normalize(&mut scores);
    Ok(CentralityScores { method: Method::NonBacktracking, scores, iterations, converged, eigenvalue: Some(mu), raw_norm: None })
}

/// PageRank power iteration. Mass sitting on isolated nodes is spread
/// uniformly, so every iterate sums to one.
#[derive(Clone, Debug)]
pub struct PageRankIteration<'g> {
    g: &'g Graph,
    damping: f64,
    rank: Vec<f64>,
    next: Vec<f64>,
    iterations: usize,
}

impl<'g> PageRankIteration<'g> {
    pub fn new(g: &'g Graph, damping: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&damping) {
            return Err(Error::InvalidParameter(format!("damping must lie in [0, 1), got {damping}")));
        }
        let n = g.node_count();
        if n == 0 {
            return Err(Error::InvalidParameter("PageRank of an empty graph".into()));
        }
        Ok(Self { g, damping, rank: vec![1.0 / n as f64; n], next: vec![0.0; n], iterations: 0 })
    }

    pub fn rank(&self) -> &[f64] {
        &self.rank
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Applies one update; returns the L1 change.
    pub fn step(&mut self) -> f64 {
        let n = self.g.node_count();
        let d = self.damping;
        let dangling: f64 = (0..n).filter(|&j| self.g.degree(j) == 0).map(|j| self.rank[j]).sum();
        let base = (1.0 - d) / n as f64 + d * dangling / n as f64;
        for i in 0..n {
            let flow: f64 = self.g.neighbors(i).iter().map(|&j| self.rank[j] / self.g.degree(j) as f64).sum();
            self.next[i] = base + d * flow;
        }
        let change = self.rank.iter().zip(&self.next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut self.rank, &mut self.next);
        self.iterations += 1;
        change
    }
}

pub fn pagerank(g: &Graph, damping: f64, cfg: SolverConfig) -> Result<CentralityScores> {
    let mut it = PageRankIteration::new(g, damping)?;
    let mut converged = false;
    while it.iterations < cfg.max_iter {
        if it.step() < cfg.tol {
            converged = true;
            break;
        }
    }
    let iterations = it.iterations;
    let mut scores = it.rank;
    let total: f64 = scores.iter().sum();
    scores.iter_mut().for_each(|x| *x /= total);
    Ok(CentralityScores { method: Method::PageRank, scores, iterations, converged, eigenvalue: None, raw_norm: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn star(leaves: usize) -> Graph {
        let pairs: Vec<_> = (1..=leaves).map(|j| (0, j)).collect();
        build_graph(leaves + 1, &pairs).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        build_graph(n, &pairs).unwrap()
    }

    #[test]
    fn degree_of_star() {
        let s = degree_centrality(&star(5));
        assert_eq!(s.scores, vec![5.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigenvector_of_star() {
        let ec = eigenvector_centrality(&star(5), SolverConfig::SPECTRAL).unwrap();
        assert!((ec.scores[0] - 0.5f64.sqrt()).abs() < 1e-9);
        for &x in &ec.scores[1..] {
            assert!((x - 0.1f64.sqrt()).abs() < 1e-9);
        }
        assert!((ec.eigenvalue.unwrap() - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn eigenvector_of_regular_graph_is_uniform() {
        let ec = eigenvector_centrality(&cycle(7), SolverConfig::SPECTRAL).unwrap();
        let u = 1.0 / 7f64.sqrt();
        assert!(ec.scores.iter().all(|&x| (x - u).abs() < 1e-12));
        assert!((ec.eigenvalue.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_has_no_spectrum() {
        let g = Graph::empty(3);
        assert!(matches!(eigenvector_centrality(&g, SolverConfig::SPECTRAL), Err(Error::NoSpectrum(_))));
        assert!(matches!(minres_coreness(&g, SolverConfig::MINRES), Err(Error::NoSpectrum(_))));
    }

    #[test]
    fn nbt_rejects_forests() {
        assert!(matches!(nbt_centrality(&star(4), SolverConfig::SPECTRAL), Err(Error::NoSpectrum(_))));
    }

    #[test]
    fn nbt_of_cycle_is_uniform() {
        let s = nbt_centrality(&cycle(6), SolverConfig::SPECTRAL).unwrap();
        let u = 1.0 / 6f64.sqrt();
        assert!(s.scores.iter().all(|&x| (x - u).abs() < 1e-12));
        assert!((s.eigenvalue.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pagerank_without_damping_is_uniform() {
        let g = build_graph(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        let pr = pagerank(&g, 0.0, SolverConfig::SPECTRAL).unwrap();
        assert!(pr.scores.iter().all(|&x| x == 0.2));
    }

    #[test]
    fn pagerank_of_regular_graph_is_uniform() {
        let pr = pagerank(&cycle(9), 0.85, SolverConfig::SPECTRAL).unwrap();
        assert!(pr.scores.iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-14));
    }

    #[test]
    fn pagerank_with_isolated_nodes_conserves_mass() {
        let g = build_graph(6, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut it = PageRankIteration::new(&g, 0.85).unwrap();
        for _ in 0..50 {
            it.step();
            assert!((it.rank().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pagerank_rejects_bad_damping() {
        assert!(pagerank(&cycle(3), 1.0, SolverConfig::SPECTRAL).is_err());
    }

    #[test]
    fn minres_objective_matches_direct_sum() {
        let g = build_graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let u = [0.3, 0.7, 1.1, 0.2, 0.05];
        let mut direct = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                    direct += (a - u[i] * u[j]) * (a - u[i] * u[j]);
                }
            }
        }
        assert!((minres_objective(&g, &u) - direct).abs() < 1e-12);
    }

    #[test]
    fn minres_is_stationary_and_improves_on_start() {
        let params = crate::generators::BlockModelParams::new(0.3, 10.0, 6.0, 1.0).unwrap();
        let (g, _) = crate::generators::sample_sbm(&params, 300, 2).unwrap();
        let sol = minres_solve(&g, SolverConfig::MINRES).unwrap();
        assert!(sol.converged);
        assert!(sol.final_objective <= sol.initial_objective);
        assert!(minres_stationarity(&g, &sol.u) < 1e-7);
    }

    #[test]
    fn method_tags_roundtrip() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
    }
}
