//! Localization and recovery metrics.

use crate::centrality::{CentralityScores, Method};
use crate::error::{Error, Result};
use crate::generators::core_size;
use crate::graph::{Group, Labeling};

/// Inverse participation ratio `sum_i v_i^4` of the L2-normalized scores.
pub fn ipr(scores: &CentralityScores) -> Result<f64> {
    ipr_of(&scores.scores)
}

pub fn ipr_of(v: &[f64]) -> Result<f64> {
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 || !norm_sq.is_finite() {
        return Err(Error::ZeroVector);
    }
    // One division at the end keeps uniform vectors at exactly 1 / n.
    Ok(v.iter().map(|x| x.powi(4)).sum::<f64>() / (norm_sq * norm_sq))
}

/// Labels the `round(gamma * n)` highest-scoring nodes as core. Ties go to
/// the lower node index.
pub fn top_core_assignment(scores: &CentralityScores, gamma: f64) -> Labeling {
    top_k_assignment(&scores.scores, core_size(gamma, scores.len()))
}

pub fn top_k_assignment(scores: &[f64], k: usize) -> Labeling {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut groups = vec![Group::Periphery; scores.len()];
    for &i in order.iter().take(k) {
        groups[i] = Group::Core;
    }
    Labeling::new(groups)
}

fn check_lengths(t: &Labeling, truth: &Labeling) -> Result<()> {
    if t.len() != truth.len() {
        return Err(Error::LengthMismatch { left: t.len(), right: truth.len() });
    }
    if t.is_empty() {
        return Err(Error::InvalidParameter("empty labeling".into()));
    }
    Ok(())
}

/// Fraction of nodes whose label matches the truth.
pub fn agreement(t: &Labeling, truth: &Labeling) -> Result<f64> {
    check_lengths(t, truth)?;
    let hits = t.groups().iter().zip(truth.groups()).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / t.len() as f64)
}

/// Agreement rescaled so that the majority-group baseline scores 0 and a
/// perfect labeling scores 1. Group fractions come from the truth.
pub fn overlap(t: &Labeling, truth: &Labeling) -> Result<f64> {
    let a = agreement(t, truth)?;
    let largest = truth.fractions().into_iter().fold(0.0, f64::max);
    if largest >= 1.0 {
        return Err(Error::DegenerateTruth);
    }
    Ok((a - largest) / (1.0 - largest))
}

/// Pearson correlation; `None` when either vector is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Symmetric method-by-method correlation matrix. Entries involving a
/// constant score vector are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub methods: Vec<Method>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Method, b: Method) -> Option<f64> {
        let i = self.methods.iter().position(|&m| m == a)?;
        let j = self.methods.iter().position(|&m| m == b)?;
        self.values[i][j]
    }
}

fn correlation_matrix(vectors: &[CentralityScores], corr: fn(&[f64], &[f64]) -> Option<f64>) -> Result<CorrelationMatrix> {
    if let Some(first) = vectors.first() {
        for v in vectors {
            if v.len() != first.len() {
                return Err(Error::LengthMismatch { left: v.len(), right: first.len() });
            }
        }
        if first.len() < 2 {
            return Err(Error::InvalidParameter("correlations need at least two nodes".into()));
        }
    }
    let k = vectors.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&vectors[i].scores, &vectors[i].scores).map(|_| 1.0)
            } else {
                corr(&vectors[i].scores, &vectors[j].scores)
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { methods: vectors.iter().map(|v| v.method).collect(), values })
}

/// Pearson correlations between raw score vectors.
pub fn pearson_matrix(vectors: &[CentralityScores]) -> Result<CorrelationMatrix> {
    correlation_matrix(vectors, pearson)
}

/// Spearman rank correlations between score vectors.
pub fn spearman_matrix(vectors: &[CentralityScores]) -> Result<CorrelationMatrix> {
    correlation_matrix(vectors, spearman)
}

/// Recovery and localization of one method on one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodEvaluation {
    pub method: Method,
    pub ipr: f64,
    /// `None` when there is no ground truth.
    pub agreement: Option<f64>,
    pub overlap: Option<f64>,
}

/// Everything measured on one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateEvaluation {
    pub methods: Vec<MethodEvaluation>,
    pub pearson: CorrelationMatrix,
    pub spearman: CorrelationMatrix,
}

impl ReplicateEvaluation {
    pub fn method(&self, m: Method) -> Option<&MethodEvaluation> {
        self.methods.iter().find(|e| e.method == m)
    }
}

/// Scores every method against `truth` using the true core fraction to size
/// the predicted core.
pub fn evaluate_scores(vectors: &[CentralityScores], truth: Option<&Labeling>) -> Result<ReplicateEvaluation> {
    let mut methods = Vec::with_capacity(vectors.len());
    for v in vectors {
        let (agreement, overlap) = match truth {
            Some(truth) => {
                let t = top_k_assignment(&v.scores, truth.core_size());
                (Some(self::agreement(&t, truth)?), Some(self::overlap(&t, truth)?))
            }
            None => (None, None),
        };
        methods.push(MethodEvaluation { method: v.method, ipr: ipr(v)?, agreement, overlap });
    }
    Ok(ReplicateEvaluation { methods, pearson: pearson_matrix(vectors)?, spearman: spearman_matrix(vectors)? })
}

/// Median and interquartile range of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(Summary {
        count: sorted.len(),
        median: quantile_sorted(&sorted, 0.5),
        q1: quantile_sorted(&sorted, 0.25),
        q3: quantile_sorted(&sorted, 0.75),
    })
}

pub fn median(values: &[f64]) -> Option<f64> {
    summarize(values).map(|s| s.median)
}
