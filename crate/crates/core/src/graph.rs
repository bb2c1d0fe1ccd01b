//! Sparse undirected simple graphs.
//!
//! Adjacency is stored in compressed form: the neighbors of node `i` are
//! `targets[offsets[i]..offsets[i + 1]]`, sorted ascending. The position of a
//! neighbor in that array doubles as the index of the directed edge `i -> j`,
//! so directed edges are naturally ordered by `(source, target)`.

use crate::error::{Error, Result};

/// Group label of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Core,
    Periphery,
}

impl Group {
    /// 0 for core, 1 for periphery.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Group::Core => 0,
            Group::Periphery => 1,
        }
    }

    #[inline]
    pub fn from_index(a: usize) -> Self {
        if a == 0 {
            Group::Core
        } else {
            Group::Periphery
        }
    }

    #[inline]
    pub fn other(self) -> Self {
        match self {
            Group::Core => Group::Periphery,
            Group::Periphery => Group::Core,
        }
    }
}

/// Per-node core/periphery assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    groups: Vec<Group>,
}

impl Labeling {
    pub fn new(groups: Vec<Group>) -> Self {
        Self { groups }
    }

    /// Builds a labeling from the 1 = core / 2 = periphery integer encoding.
    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        codes
            .iter()
            .map(|&c| match c {
                1 => Ok(Group::Core),
                2 => Ok(Group::Periphery),
                other => Err(Error::InvalidParameter(format!("group code {other} not in {{1, 2}}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn get(&self, i: usize) -> Group {
        self.groups[i]
    }

    pub fn codes(&self) -> Vec<u8> {
        self.groups.iter().map(|g| g.index() as u8 + 1).collect()
    }

    pub fn core_size(&self) -> usize {
        self.groups.iter().filter(|&&g| g == Group::Core).count()
    }

    /// Fractions `[core, periphery]`.
    pub fn fractions(&self) -> [f64; 2] {
        let n = self.len() as f64;
        let core = self.core_size() as f64;
        [core / n, (n - core) / n]
    }

    pub fn complement(&self) -> Self {
        Self::new(self.groups.iter().map(|g| g.other()).collect())
    }
}

/// What `build_graph` discarded while normalizing the input pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable undirected simple graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Normalizes `pairs` into a simple graph: self-loops dropped, unordered
    /// duplicates merged, adjacency sorted.
    pub fn build(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<(Self, BuildReport)> {
        let mut report = BuildReport::default();
        let mut edges = Vec::new();
        for (i, j) in pairs {
            for node in [i, j] {
                if node >= n {
                    return Err(Error::InvalidNode { node, n });
                }
            }
            if i == j {
                report.self_loops += 1;
                continue;
            }
            edges.push((i.min(j), i.max(j)));
        }
        let raw = edges.len();
        edges.sort_unstable();
        edges.dedup();
        report.duplicates = raw - edges.len();
        Ok((Self::from_sorted_edges(n, edges), report))
    }

    /// `edges` must be sorted, deduplicated and satisfy `i < j < n`.
    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(i, j) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; 2 * edges.len()];
        // Edges are sorted by (i, j), so every row fills in ascending order:
        // lower neighbors of a node all precede its upper neighbors.
        for &(i, j) in &edges {
            targets[fill[i]] = j;
            fill[i] += 1;
            targets[fill[j]] = i;
            fill[j] += 1;
        }
        Self { n, edges, offsets, targets }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.n as f64
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Range of directed-edge ids leaving `i`.
    #[inline]
    pub fn out_edges(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Target of directed edge `e`.
    #[inline]
    pub fn target(&self, e: usize) -> usize {
        self.targets[e]
    }

    pub fn directed_edge_count(&self) -> usize {
        self.targets.len()
    }

    /// For every directed edge `i -> j`, the id of `j -> i`.
    pub fn reverse_edges(&self) -> Vec<usize> {
        let mut rev = vec![0usize; self.targets.len()];
        for i in 0..self.n {
            for e in self.out_edges(i) {
                let j = self.targets[e];
                let pos = self.neighbors(j).binary_search(&i).expect("adjacency is symmetric");
                rev[e] = self.offsets[j] + pos;
            }
        }
        rev
    }

    /// Source node of every directed edge.
    pub fn edge_sources(&self) -> Vec<usize> {
        let mut src = Vec::with_capacity(self.targets.len());
        for i in 0..self.n {
            src.extend(std::iter::repeat_n(i, self.degree(i)));
        }
        src
    }

    /// Nodes of the 2-core (repeatedly strip nodes of degree < 2).
    pub fn two_core(&self) -> Vec<bool> {
        let mut deg = self.degrees();
        let mut alive = vec![true; self.n];
        let mut stack: Vec<usize> = (0..self.n).filter(|&i| deg[i] < 2).collect();
        while let Some(i) = stack.pop() {
            if !alive[i] {
                continue;
            }
            alive[i] = false;
            for &j in self.neighbors(i) {
                if alive[j] {
                    deg[j] -= 1;
                    if deg[j] < 2 {
                        stack.push(j);
                    }
                }
            }
        }
        alive
    }

    /// Subgraph induced by `nodes`, relabeled in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let pairs = self
            .edges
            .iter()
            .filter(|&&(i, j)| index[i] != usize::MAX && index[j] != usize::MAX)
            .map(|&(i, j)| (index[i], index[j]));
        Self::build(nodes.len(), pairs).expect("indices are in range").0
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::build(self.n, self.edges.iter().map(|&(i, j)| (perm[i], perm[j])))
            .expect("permutation stays in range")
            .0
    }
}

/// Convenience wrapper over [`Graph::build`] that drops the report.
pub fn build_graph(n: usize, pairs: &[(usize, usize)]) -> Result<Graph> {
    Graph::build(n, pairs.iter().copied()).map(|(g, _)| g)
}

/// Degree of every node.
pub fn degrees(g: &Graph) -> Vec<usize> {
    g.degrees()
}
