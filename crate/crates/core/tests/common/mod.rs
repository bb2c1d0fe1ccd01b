//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use coreness::generators::{rng_from_seed, BlockModelParams, SeededRng};
use coreness::graph::{build_graph, Graph};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Exact posterior node marginals `P(g_i = core | A)` and `log P(A)` under
/// the two-block model with `p_ab = c_ab / n`, by summing over all `2^n`
/// assignments.
pub fn enumerate_posterior(g: &Graph, params: &BlockModelParams) -> (Vec<f64>, f64) {
    let n = g.node_count();
    assert!(n <= 20, "enumeration is exponential");
    let prior = [params.gamma, 1.0 - params.gamma];
    let mut weight = [[0.0; 2]; 2];
    let mut absent = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let p = params.c[a][b] / n as f64;
            weight[a][b] = p.ln();
            absent[a][b] = (1.0 - p).ln();
        }
    }
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in g.edges() {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let mut logs = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let group = |i: usize| ((mask >> i) & 1) as usize;
        let mut lp = 0.0;
        for i in 0..n {
            lp += prior[group(i)].ln();
            for j in i + 1..n {
                let (a, b) = (group(i), group(j));
                lp += if adj[i][j] { weight[a][b] } else { absent[a][b] };
            }
        }
        logs.push(lp);
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    let mut core = vec![0.0; n];
    for (mask, l) in logs.iter().enumerate() {
        let w = (l - max).exp() / z;
        for (i, c) in core.iter_mut().enumerate() {
            if (mask >> i) & 1 == 0 {
                *c += w;
            }
        }
    }
    (core, max + z.ln())
}

/// Block affinities whose non-edge factor `1 - p_ab` factorizes over the two
/// endpoints, `(1 - p12)^2 = (1 - p11)(1 - p22)`, with `p11 > p12 > p22`.
pub fn separable_params(rng: &mut SeededRng, n: usize) -> BlockModelParams {
    loop {
        let gamma = rng.random_range(0.2..0.5);
        let p11: f64 = rng.random_range(0.25..0.6);
        let p12: f64 = rng.random_range(0.08..0.25);
        let p22 = 1.0 - (1.0 - p12).powi(2) / (1.0 - p11);
        if p22 > 0.005 && p22 < p12 && p12 < p11 {
            let nf = n as f64;
            return BlockModelParams::new(gamma, nf * p11, nf * p12, nf * p22).unwrap();
        }
    }
}

/// Uniform random labeled tree (random attachment order).
pub fn random_tree(rng: &mut SeededRng, n: usize) -> Graph {
    let pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    build_graph(n, &pairs).unwrap()
}

/// Random tree plus `extra` random chords (fewer if the graph fills up).
pub fn random_connected(rng: &mut SeededRng, n: usize, extra: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    let extra = extra.min(n * (n - 1) / 2 - (n - 1));
    let mut added = 0;
    while added < extra {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j && !pairs.contains(&(i.min(j), i.max(j))) && !pairs.contains(&(i.max(j), i.min(j))) {
            pairs.push((i, j));
            added += 1;
        }
    }
    build_graph(n, &pairs).unwrap()
}

pub fn seeded(seed: u64) -> SeededRng {
    rng_from_seed(seed)
}

pub fn adjacency_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

/// Leading eigenpair of the adjacency matrix from a dense symmetric solver.
pub fn dense_leading_eigenvector(g: &Graph) -> (f64, Vec<f64>) {
    let eig = adjacency_matrix(g).symmetric_eigen();
    let (idx, &lambda) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let v = eig.eigenvectors.column(idx);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    (lambda, v.iter().map(|x| sign * x).collect())
}

/// PageRank from the dense linear system `(I - d P) x = (1 - d) / n`, with
/// isolated nodes spreading their mass uniformly.
pub fn dense_pagerank(g: &Graph, d: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut p = DMatrix::zeros(n, n);
    for j in 0..n {
        let k = g.degree(j);
        if k == 0 {
            for i in 0..n {
                p[(i, j)] = 1.0 / n as f64;
            }
        } else {
            for &i in g.neighbors(j) {
                p[(i, j)] = 1.0 / k as f64;
            }
        }
    }
    let m = DMatrix::identity(n, n) - p * d;
    let b = DVector::from_element(n, (1.0 - d) / n as f64);
    m.lu().solve(&b).unwrap().iter().copied().collect()
}

/// Non-backtracking centrality from the explicit `2m x 2m` matrix
/// `B_{k->l, i->j} = delta_{kj} (1 - delta_{il})`, by power iteration on
/// `B + I` (the shift removes periodicity without moving the Perron vector),
/// then `u_j = sum_i A_ij v_{i->j}`.
pub fn dense_nbt(g: &Graph) -> (f64, Vec<f64>) {
    let mut directed = Vec::new();
    for &(i, j) in g.edges() {
        directed.push((i, j));
        directed.push((j, i));
    }
    let k = directed.len();
    let mut b = DMatrix::zeros(k, k);
    for (row, &(kk, l)) in directed.iter().enumerate() {
        for (col, &(i, j)) in directed.iter().enumerate() {
            if kk == j && i != l {
                b[(row, col)] = 1.0;
            }
        }
    }
    let shifted = &b + DMatrix::identity(k, k);
    let mut v = DVector::from_element(k, 1.0 / (k as f64).sqrt());
    for _ in 0..1_000_000 {
        let mut next = &shifted * &v;
        next /= next.norm();
        let change = (&next - &v).amax();
        v = next;
        if change < 1e-14 {
            break;
        }
    }
    let mu = v.dot(&(&b * &v));
    let mut u = vec![0.0; g.node_count()];
    for (e, &(_, j)) in directed.iter().enumerate() {
        u[j] += v[e];
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    (mu, u.iter().map(|x| x / norm).collect())
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// `H_B` evaluated directly over ordered pairs.
pub fn minres_objective_direct(g: &Graph, u: &[f64]) -> f64 {
    let n = g.node_count();
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                h += (a - u[i] * u[j]).powi(2);
            }
        }
    }
    h
}

/// Exact posterior core marginals on a tree when the non-edge factor is
/// separable, `1 - p_ab = s_a s_b`. The posterior is then a tree-structured
/// MRF with node potentials `gamma_a s_a^(n - 1 - d_i)` and edge potentials
/// `p_ab`, solved by two-pass sum-product from node 0.
pub fn tree_posterior(g: &Graph, params: &BlockModelParams) -> Vec<f64> {
    let n = g.node_count();
    assert_eq!(g.edge_count(), n - 1, "not a tree");
    let nf = n as f64;
    let p = |a: usize, b: usize| params.c[a][b] / nf;
    let log_s = [0.5 * (1.0 - p(0, 0)).ln(), 0.5 * (1.0 - p(1, 1)).ln()];
    assert!(((log_s[0] + log_s[1]).exp() - (1.0 - p(0, 1))).abs() < 1e-12, "non-edge factor is not separable");
    let prior = params.priors();
    let phi: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let free = (n - 1 - g.degree(i)) as f64;
            [prior[0].ln() + free * log_s[0], prior[1].ln() + free * log_s[1]]
        })
        .collect();

    let mut parent = vec![usize::MAX; n];
    let mut order = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for &k in g.neighbors(i) {
            if !seen[k] {
                seen[k] = true;
                parent[k] = i;
                order.push(k);
            }
        }
    }
    assert_eq!(order.len(), n, "tree is disconnected");

    let lse = |x: [f64; 2]| {
        let m = x[0].max(x[1]);
        m + ((x[0] - m).exp() + (x[1] - m).exp()).ln()
    };
    // up[i][b]: log message from i to its parent, as a function of the parent's group b.
    let mut inside = phi.clone();
    let mut up = vec![[0.0; 2]; n];
    for &i in order.iter().rev() {
        if i == 0 {
            continue;
        }
        for b in 0..2 {
            up[i][b] = lse([inside[i][0] + p(0, b).ln(), inside[i][1] + p(1, b).ln()]);
        }
        let par = parent[i];
        inside[par][0] += up[i][0];
        inside[par][1] += up[i][1];
    }
    // outside[i][a]: log weight of everything outside i's subtree given g_i = a.
    let mut outside = vec![[0.0; 2]; n];
    for &i in &order {
        if i == 0 {
            continue;
        }
        let par = parent[i];
        let rest = [inside[par][0] - up[i][0] + outside[par][0], inside[par][1] - up[i][1] + outside[par][1]];
        for a in 0..2 {
            outside[i][a] = lse([rest[0] + p(0, a).ln(), rest[1] + p(1, a).ln()]);
        }
    }
    (0..n)
        .map(|i| {
            let b = [inside[i][0] + outside[i][0], inside[i][1] + outside[i][1]];
            (b[0] - lse(b)).exp()
        })
        .collect()
}

/// Longest shortest path of a tree, by double BFS.
pub fn tree_diameter(g: &Graph) -> usize {
    let bfs = |s: usize| {
        let mut dist = vec![usize::MAX; g.node_count()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        let mut last = s;
        while let Some(i) = queue.pop_front() {
            last = i;
            for &k in g.neighbors(i) {
                if dist[k] == usize::MAX {
                    dist[k] = dist[i] + 1;
                    queue.push_back(k);
                }
            }
        }
        (last, dist[last])
    };
    let (far, _) = bfs(0);
    bfs(far).1
}
