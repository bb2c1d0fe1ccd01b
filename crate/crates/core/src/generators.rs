//! Planted core-periphery samplers: the two-block stochastic block model and
//! its degree-corrected variant with power-law corrections.
//!
//! Edges are drawn with geometric skipping over candidate lists (Batagelj and
//! Brandes for constant probabilities, Miller and Hagberg for the
//! non-increasing probabilities of the degree-corrected model), which visits
//! pairs in a fixed order and keeps sampling `O(n + m)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Group, Labeling};

/// Seeded, portable generator used by every stochastic routine in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Core fraction and scaled affinity matrix `c` (edge probability `c / n`).
/// Index 0 is the core, index 1 the periphery.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockModelParams {
    pub gamma: f64,
    pub c: [[f64; 2]; 2],
}

impl BlockModelParams {
    pub fn new(gamma: f64, c11: f64, c12: f64, c22: f64) -> Result<Self> {
        let params = Self { gamma, c: [[c11, c12], [c12, c22]] };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if self.c[0][1] != self.c[1][0] {
            return Err(Error::InvalidParameter("affinity matrix must be symmetric".into()));
        }
        if self.c.iter().flatten().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter("affinities must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Group priors `[gamma, 1 - gamma]`.
    pub fn priors(&self) -> [f64; 2] {
        [self.gamma, 1.0 - self.gamma]
    }

    /// True when `c11 > c12 > c22`.
    pub fn is_core_periphery(&self) -> bool {
        self.c[0][0] > self.c[0][1] && self.c[0][1] > self.c[1][1]
    }

    /// Expected mean degree `sum_ab gamma_a gamma_b c_ab`.
    pub fn mean_degree(&self) -> f64 {
        let g = self.priors();
        (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| g[a] * g[b] * self.c[a][b]).sum()
    }

    pub fn max_affinity(&self) -> f64 {
        self.c.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// The same model with the roles of the two blocks exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            gamma: 1.0 - self.gamma,
            c: [[self.c[1][1], self.c[1][0]], [self.c[0][1], self.c[0][0]]],
        }
    }

    /// Errors when some `c_ab / n` exceeds 1.
    pub fn check_probabilities(&self, n: usize) -> Result<()> {
        for a in 0..2 {
            for b in 0..2 {
                if self.c[a][b] / n as f64 > 1.0 {
                    return Err(Error::ProbabilityOverflow { a: a + 1, b: b + 1, value: self.c[a][b], n });
                }
            }
        }
        Ok(())
    }
}

/// Unit-mean, non-increasing degree corrections.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCorrections {
    w: Vec<f64>,
    alpha: f64,
    i0: usize,
    rho: f64,
}

impl DegreeCorrections {
    /// Rescales arbitrary positive non-increasing weights to unit mean.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("empty weight sequence".into()));
        }
        if weights.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter("weights must be positive and finite".into()));
        }
        if weights.windows(2).any(|p| p[1] > p[0]) {
            return Err(Error::InvalidParameter("weights must be non-increasing".into()));
        }
        Ok(Self::normalized(weights, f64::INFINITY, 0))
    }

    pub fn uniform(n: usize) -> Self {
        Self::normalized(vec![1.0; n], f64::INFINITY, 0)
    }

    fn normalized(mut w: Vec<f64>, alpha: f64, i0: usize) -> Self {
        let n = w.len() as f64;
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x *= n / total;
        }
        let rho = 1.0 / w.iter().sum::<f64>();
        Self { w, alpha, i0, rho }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Tail exponent; infinite for sequences not built from a power law.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn i0(&self) -> usize {
        self.i0
    }

    /// `1 / sum(w)`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn max_min_ratio(&self) -> f64 {
        self.w[0] / self.w[self.w.len() - 1]
    }
}

/// `w_i ∝ (i0 + i)^(-1 / (alpha - 1))` for `i = 0..n`, rescaled to unit mean.
pub fn power_law_corrections(alpha: f64, n: usize, i0: usize) -> Result<DegreeCorrections> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidExponent(alpha));
    }
    if i0 < 1 {
        return Err(Error::InvalidParameter("offset i0 must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let exponent = -1.0 / (alpha - 1.0);
    let w = (0..n).map(|i| ((i0 + i) as f64).powf(exponent)).collect();
    Ok(DegreeCorrections::normalized(w, alpha, i0))
}

/// Largest unit-mean weight for a given offset; non-increasing in `i0`.
fn leading_weight(alpha: f64, n: usize, i0: usize) -> f64 {
    let exponent = -1.0 / (alpha - 1.0);
    let total: f64 = (0..n).map(|i| ((i0 + i) as f64).powf(exponent)).sum();
    (i0 as f64).powf(exponent) * n as f64 / total
}

/// Smallest offset `i0 >= 1` for which the heaviest pair never needs capping:
/// `w_0^2 * rho * max_c <= 1`.
pub fn default_offset(alpha: f64, n: usize, max_affinity: f64) -> Result<usize> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidExponent(alpha));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    // rho = 1 / n after unit-mean scaling.
    let fits = |i0: usize| {
        let w0 = leading_weight(alpha, n, i0);
        w0 * w0 * max_affinity / n as f64 <= 1.0
    };
    if fits(1) {
        return Ok(1);
    }
    let limit = 1usize << 40;
    let mut hi = 2usize;
    while !fits(hi) {
        hi *= 2;
        if hi > limit {
            return Err(Error::InvalidParameter(format!(
                "no offset keeps edge probabilities below 1 (max affinity {max_affinity}, n = {n})"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Nearest integer to `gamma * n`, halves rounded toward the core.
pub fn core_size(gamma: f64, n: usize) -> usize {
    let k = (gamma * n as f64).round() as usize;
    k.min(n)
}

/// Visits a Bernoulli(p) subset of `0..len` in increasing order.
fn for_each_bernoulli(rng: &mut SeededRng, len: usize, p: f64, mut visit: impl FnMut(usize)) {
    if p <= 0.0 || len == 0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(visit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut k = 0usize;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if skip >= (len - k) as f64 {
            return;
        }
        k += skip as usize;
        visit(k);
        k += 1;
        if k >= len {
            return;
        }
    }
}

/// Two-block SBM: each node is core with probability `gamma`, each pair is
/// linked independently with probability `c_{g_i g_j} / n`.
pub fn sample_sbm(params: &BlockModelParams, n: usize, seed: u64) -> Result<(Graph, Labeling)> {
    params.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    params.check_probabilities(n)?;
    let mut rng = rng_from_seed(seed);
    let groups: Vec<Group> = (0..n)
        .map(|_| if rng.random::<f64>() < params.gamma { Group::Core } else { Group::Periphery })
        .collect();
    let mut members: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, g) in groups.iter().enumerate() {
        members[g.index()].push(i);
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        let a = groups[i].index();
        for (b, list) in members.iter().enumerate() {
            let start = list.partition_point(|&j| j <= i);
            let candidates = &list[start..];
            let p = params.c[a][b] / n as f64;
            for_each_bernoulli(&mut rng, candidates.len(), p, |k| pairs.push((i, candidates[k])));
        }
    }
    let (graph, _) = Graph::build(n, pairs)?;
    Ok((graph, Labeling::new(groups)))
}

/// Degree-corrected SBM. The `round(gamma * n)` heaviest nodes form the core
/// and the pair `(i, j)` is linked with probability
/// `min(1, w_i w_j rho c_{g_i g_j})`.
pub fn sample_dc_sbm(params: &BlockModelParams, corr: &DegreeCorrections, seed: u64) -> Result<(Graph, Labeling)> {
    params.validate()?;
    let n = corr.len();
    let k = core_size(params.gamma, n);
    if k == 0 {
        return Err(Error::InvalidParameter(format!("gamma * n = {} rounds to an empty core", params.gamma * n as f64)));
    }
    // Weights are non-increasing, so the core is a prefix.
    let groups: Vec<Group> = (0..n).map(|i| if i < k { Group::Core } else { Group::Periphery }).collect();
    let w = corr.weights();
    let blocks = [0..k, k..n];
    let mut rng = rng_from_seed(seed);
    let mut pairs = Vec::new();
    for i in 0..n {
        let a = groups[i].index();
        for (b, block) in blocks.iter().enumerate() {
            let start = block.start.max(i + 1);
            if start >= block.end {
                continue;
            }
            let scale = w[i] * corr.rho() * params.c[a][b];
            let prob = |j: usize| (scale * w[j]).min(1.0);
            let mut j = start;
            let mut p = prob(j);
            while j < block.end && p > 0.0 {
                if p < 1.0 {
                    let u: f64 = rng.random();
                    let skip = ((1.0 - u).ln() / (-p).ln_1p()).floor();
                    if skip >= (block.end - j) as f64 {
                        break;
                    }
                    j += skip as usize;
                }
                let q = prob(j);
                if rng.random::<f64>() < q / p {
                    pairs.push((i, j));
                }
                p = q;
                j += 1;
            }
        }
    }
    let (graph, _) = Graph::build(n, pairs)?;
    Ok((graph, Labeling::new(groups)))
}

/// Number of pairs whose uncapped dc-SBM probability exceeds 1.
pub fn capped_pair_count(params: &BlockModelParams, corr: &DegreeCorrections) -> usize {
    let n = corr.len();
    let k = core_size(params.gamma, n);
    let w = corr.weights();
    let blocks = [0..k, k..n];
    let mut count = 0;
    for i in 0..n {
        let a = usize::from(i >= k);
        for (b, block) in blocks.iter().enumerate() {
            let start = block.start.max(i + 1);
            if start >= block.end {
                continue;
            }
            let scale = w[i] * corr.rho() * params.c[a][b];
            count += w[start..block.end].partition_point(|&wj| scale * wj > 1.0);
        }
    }
    count
}
