//! Edge-weighted undirected graphs, shortest-path metrics and Cartesian
//! products.
//!
//! Weights and distances are exact unsigned integers. Distance matrices are
//! computed densely with the Floyd–Warshall recurrence, which is plenty for
//! the graph sizes this crate targets (tens of vertices).

use std::fmt;

use thiserror::Error;

/// Rule broken by a graph description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    ZeroWeight,
    SelfLoop,
    DuplicateEdge,
    VertexOutOfRange,
    NoVertices,
    EdgeCountMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::ZeroWeight => "edge weights must be positive integers",
            Rule::SelfLoop => "self-loops are not allowed",
            Rule::DuplicateEdge => "each unordered vertex pair may appear at most once",
            Rule::VertexOutOfRange => "vertex index out of range",
            Rule::NoVertices => "a graph needs at least one vertex",
            Rule::EdgeCountMismatch => "edge count does not match the header",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}{rule}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, rule: Rule },
    #[error("graph is disconnected")]
    Disconnected,
}

/// An undirected edge `u -- v` with positive weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: u64,
}

/// A simple undirected graph with positive integer edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, u64)>>,
}

impl WeightedGraph {
    /// Validates and builds a graph. Edge order is preserved.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Self::build(n, edges.into_iter().map(|e| (None, e)))
    }

    fn build(
        n: usize,
        edges: impl IntoIterator<Item = (Option<usize>, Edge)>,
    ) -> Result<Self, GraphError> {
        let invalid = |line, rule| GraphError::Validation { line, rule };
        if n == 0 {
            return Err(invalid(None, Rule::NoVertices));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::new();
        for (line, e) in edges {
            if e.u >= n || e.v >= n {
                return Err(invalid(line, Rule::VertexOutOfRange));
            }
            if e.u == e.v {
                return Err(invalid(line, Rule::SelfLoop));
            }
            if e.w == 0 {
                return Err(invalid(line, Rule::ZeroWeight));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(invalid(line, Rule::DuplicateEdge));
            }
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
            kept.push(e);
        }
        Ok(Self { n, edges: kept, adj })
    }

    /// Builds a graph from `(u, v, w)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, u64)]) -> Result<Self, GraphError> {
        Self::new(n, triples.iter().map(|&(u, v, w)| Edge { u, v, w }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        self.adj[u].iter().find(|&&(x, _)| x == v).map(|&(_, w)| w)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// True when the graph is a single cycle on all of its vertices.
    pub fn is_cycle(&self) -> bool {
        self.n >= 3
            && self.edges.len() == self.n
            && self.adj.iter().all(|a| a.len() == 2)
            && self.is_connected()
    }

    /// Edge weights in traversal order around the cycle starting at vertex 0,
    /// together with the visiting order. `None` if the graph is not a cycle.
    pub fn cycle_order(&self) -> Option<(Vec<usize>, Vec<u64>)> {
        if !self.is_cycle() {
            return None;
        }
        let mut order = vec![0];
        let mut weights = Vec::with_capacity(self.n);
        let (mut prev, mut cur) = (usize::MAX, 0);
        loop {
            let &(next, w) = self.adj[cur].iter().find(|&&(x, _)| x != prev)?;
            weights.push(w);
            if next == 0 {
                break;
            }
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some((order, weights))
    }

    /// Vertex order and edge weights along the path, if the graph is a path.
    pub fn path_order(&self) -> Option<(Vec<usize>, Vec<u64>)> {
        if !self.is_tree() {
            return None;
        }
        if self.n == 1 {
            return Some((vec![0], vec![]));
        }
        if self.adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let start = (0..self.n).find(|&v| self.adj[v].len() == 1)?;
        let mut order = vec![start];
        let mut weights = Vec::new();
        let (mut prev, mut cur) = (usize::MAX, start);
        while let Some(&(next, w)) = self.adj[cur].iter().find(|&&(x, _)| x != prev) {
            order.push(next);
            weights.push(w);
            prev = cur;
            cur = next;
        }
        Some((order, weights))
    }

    /// Shortest-path distances between all vertex pairs.
    pub fn distances(&self) -> Result<DistanceMatrix, GraphError> {
        all_pairs_distances(self)
    }

    /// True iff every edge is a shortest path between its endpoints.
    pub fn is_weight_minimal(&self) -> Result<bool, GraphError> {
        is_weight_minimal(self)
    }

    /// Renders the graph in the text format read by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        }
        s
    }
}

/// Symmetric matrix of shortest-path distances with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major entries. The caller guarantees symmetry
    /// and a zero diagonal; [`DistanceMatrix::is_metric`] can check the rest.
    pub fn from_rows(rows: &[Vec<u64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        let d: Vec<u64> = rows.iter().flatten().copied().collect();
        let m = Self { n, d };
        let ok = (0..n).all(|i| m.get(i, i) == 0 && (0..n).all(|j| m.get(i, j) == m.get(j, i)));
        ok.then_some(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.d[u * self.n + v]
    }

    pub fn diameter(&self) -> u64 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Every distance multiplied by `lambda`.
    pub fn scaled(&self, lambda: u64) -> Self {
        Self { n: self.n, d: self.d.iter().map(|&x| x * lambda).collect() }
    }

    /// Sum of `d(i, j)` over unordered pairs.
    pub fn pair_sum(&self) -> u64 {
        self.pairs().map(|(i, j)| self.get(i, j)).sum()
    }

    /// Unordered pairs `i < j` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
    }

    /// Positive off-diagonal entries and the triangle inequality.
    pub fn is_metric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.get(i, j) == 0 {
                    return false;
                }
                for k in 0..n {
                    if self.get(i, j) > self.get(i, k) + self.get(k, j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The metric closure: a complete graph weighted by these distances.
    pub fn closure_graph(&self) -> WeightedGraph {
        let edges = self.pairs().map(|(u, v)| Edge { u, v, w: self.get(u, v) }).collect();
        WeightedGraph::new(self.n, edges).expect("metric closure of a valid matrix")
    }

    /// Restriction to the listed vertices, in the given order.
    pub fn submatrix(&self, vertices: &[usize]) -> Self {
        let n = vertices.len();
        let mut d = Vec::with_capacity(n * n);
        for &a in vertices {
            for &b in vertices {
                d.push(self.get(a, b));
            }
        }
        Self { n, d }
    }
}

/// All-pairs shortest path distances by dense dynamic programming.
pub fn all_pairs_distances(g: &WeightedGraph) -> Result<DistanceMatrix, GraphError> {
    const INF: u64 = u64::MAX / 4;
    let n = g.n;
    let mut d = vec![INF; n * n];
    for i in 0..n {
        d[i * n + i] = 0;
    }
    for e in &g.edges {
        d[e.u * n + e.v] = d[e.u * n + e.v].min(e.w);
        d[e.v * n + e.u] = d[e.v * n + e.u].min(e.w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    if d.iter().any(|&x| x >= INF) {
        return Err(GraphError::Disconnected);
    }
    Ok(DistanceMatrix { n, d })
}

pub fn is_weight_minimal(g: &WeightedGraph) -> Result<bool, GraphError> {
    let dm = all_pairs_distances(g)?;
    Ok(g.edges.iter().all(|e| dm.get(e.u, e.v) == e.w))
}

pub fn diameter(g: &WeightedGraph) -> Result<u64, GraphError> {
    Ok(all_pairs_distances(g)?.diameter())
}

/// Cartesian product. Vertex `(i, j)` of the product has index `i * n2 + j`.
pub fn cartesian_product(g1: &WeightedGraph, g2: &WeightedGraph) -> WeightedGraph {
    let n2 = g2.n;
    let mut edges = Vec::with_capacity(g1.edges.len() * n2 + g2.edges.len() * g1.n);
    for e in &g1.edges {
        for j in 0..n2 {
            edges.push(Edge { u: e.u * n2 + j, v: e.v * n2 + j, w: e.w });
        }
    }
    for i in 0..g1.n {
        for e in &g2.edges {
            edges.push(Edge { u: i * n2 + e.u, v: i * n2 + e.v, w: e.w });
        }
    }
    WeightedGraph::new(g1.n * n2, edges).expect("product of valid graphs is valid")
}

/// Left-folded Cartesian product of several factors.
pub fn product_of(factors: &[WeightedGraph]) -> Option<WeightedGraph> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, g| cartesian_product(&acc, g)))
}

/// Parses the plain-text graph format: a header line `n m`, then `m` lines
/// `u v w`. Lines starting with `#` and blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let parse_err = |line, message: String| GraphError::Parse { line, message };
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let nums = parse_fields::<usize>(header, hline)?;
    let [n, m] = nums[..] else {
        return Err(parse_err(hline, format!("expected `n m`, found {} fields", nums.len())));
    };

    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f = parse_fields::<i64>(l, line)?;
        let [u, v, w] = f[..] else {
            return Err(parse_err(line, format!("expected `u v w`, found {} fields", f.len())));
        };
        if w <= 0 {
            return Err(GraphError::Validation { line: Some(line), rule: Rule::ZeroWeight });
        }
        if u < 0 || v < 0 {
            return Err(GraphError::Validation { line: Some(line), rule: Rule::VertexOutOfRange });
        }
        edges.push((Some(line), Edge { u: u as usize, v: v as usize, w: w as u64 }));
    }
    if edges.len() != m {
        return Err(GraphError::Validation { line: None, rule: Rule::EdgeCountMismatch });
    }
    WeightedGraph::build(n, edges)
}

fn parse_fields<T: std::str::FromStr>(l: &str, line: usize) -> Result<Vec<T>, GraphError> {
    l.split_whitespace()
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| GraphError::Parse { line, message: format!("not an integer: `{t}`") })
        })
        .collect()
}

/// Constructors for the graph families used throughout the crate.
pub mod families {
    use super::{Edge, WeightedGraph};

    /// Path whose consecutive edges carry `weights`.
    pub fn path(weights: &[u64]) -> WeightedGraph {
        let edges = weights.iter().enumerate().map(|(i, &w)| Edge { u: i, v: i + 1, w }).collect();
        WeightedGraph::new(weights.len() + 1, edges).expect("positive path weights")
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0` with edge `i` joining `i` and `i+1`.
    pub fn cycle(weights: &[u64]) -> WeightedGraph {
        let n = weights.len();
        assert!(n >= 3, "a cycle needs at least three vertices");
        let edges =
            weights.iter().enumerate().map(|(i, &w)| Edge { u: i, v: (i + 1) % n, w }).collect();
        WeightedGraph::new(n, edges).expect("positive cycle weights")
    }

    pub fn unit_cycle(n: usize) -> WeightedGraph {
        cycle(&vec![1; n])
    }

    /// Complete graph with every edge of weight `w`.
    pub fn complete(n: usize, w: u64) -> WeightedGraph {
        let edges =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge { u, v, w })).collect::<Vec<_>>();
        WeightedGraph::new(n, edges).expect("positive clique weight")
    }

    /// Star with centre 0 and leaves `1..=weights.len()`.
    pub fn star(weights: &[u64]) -> WeightedGraph {
        let edges = weights.iter().enumerate().map(|(i, &w)| Edge { u: 0, v: i + 1, w }).collect();
        WeightedGraph::new(weights.len() + 1, edges).expect("positive star weights")
    }

    /// Complete multipartite graph with `m` parts of size two (unit weights).
    pub fn cocktail_party(m: usize) -> WeightedGraph {
        let n = 2 * m;
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u / 2 != v / 2)
            .map(|(u, v)| Edge { u, v, w: 1 })
            .collect();
        WeightedGraph::new(n, edges).expect("valid cocktail party graph")
    }
}
