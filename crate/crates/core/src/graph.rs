//! Weighted undirected graphs over a fixed vertex set, stored as a sparse
//! vector over the `n(n-1)/2` canonical edge slots.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{domain, Result};
use crate::linalg;

/// Index of an unordered vertex pair `{u, v}` under the lexicographic order
/// `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Number of edge slots `N = n(n-1)/2` of the complete graph on `n` vertices.
pub fn slot_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// First slot index whose smaller endpoint is `u`.
fn row_start(u: usize, n: usize) -> usize {
    u * n - u * (u + 1) / 2
}

/// Canonical slot of the pair `{u, v}`; symmetric in its arguments.
pub fn edge_id(u: usize, v: usize, n: usize) -> Result<EdgeId> {
    if u == v {
        return domain(format!("self-loop on vertex {u}"));
    }
    if u >= n || v >= n {
        return domain(format!("vertex pair ({u}, {v}) out of range for n = {n}"));
    }
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    Ok(EdgeId(row_start(a, n) + (b - a - 1)))
}

impl EdgeId {
    /// Inverse of [`edge_id`]: the endpoints `(u, v)` with `u < v`.
    pub fn endpoints(self, n: usize) -> Result<(usize, usize)> {
        if self.0 >= slot_count(n) {
            return domain(format!("edge slot {} out of range for n = {n}", self.0));
        }
        // row_start(lo) <= id < row_start(hi); row_start(n - 1) = N.
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if row_start(mid, n) <= self.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = lo;
        let v = self.0 - row_start(u, n) + u + 1;
        Ok((u, v))
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Undirected weighted graph on vertices `0..n`.
///
/// Weights are stored sparsely; an absent slot has weight zero. A slot may be
/// stored with an explicit zero weight, which marks it as part of the topology
/// (it counts toward the unweighted degree) without contributing to cuts.
///
/// Graphs built through [`Graph::set_weight`] are non-negative. Cut releases
/// produce signed graphs through [`Graph::set_signed_weight`].
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    weights: BTreeMap<EdgeId, f64>,
}

impl Graph {
    /// Empty graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            weights: BTreeMap::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v, w) in edges {
            g.set_weight(u, v, w)?;
        }
        Ok(g)
    }

    /// Complete graph with every slot at weight `w`.
    pub fn complete(n: usize, w: f64) -> Result<Self> {
        let mut g = Graph::new(n);
        for e in 0..slot_count(n) {
            g.set_slot(EdgeId(e), w)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edge slots `N`.
    pub fn slots(&self) -> usize {
        slot_count(self.n)
    }

    pub fn set_weight(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        let e = edge_id(u, v, self.n)?;
        self.set_slot(e, w)
    }

    /// Stores a non-negative weight on slot `e`.
    pub fn set_slot(&mut self, e: EdgeId, w: f64) -> Result<()> {
        if !(w >= 0.0) || !w.is_finite() {
            return domain(format!("weight {w} on {e} must be finite and non-negative"));
        }
        self.set_signed_slot(e, w)
    }

    /// Stores any finite weight on slot `e`, including negative values.
    pub fn set_signed_slot(&mut self, e: EdgeId, w: f64) -> Result<()> {
        if !w.is_finite() {
            return domain(format!("weight {w} on {e} must be finite"));
        }
        if e.0 >= self.slots() {
            return domain(format!("edge slot {} out of range for n = {}", e.0, self.n));
        }
        self.weights.insert(e, w);
        Ok(())
    }

    pub fn set_signed_weight(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        let e = edge_id(u, v, self.n)?;
        self.set_signed_slot(e, w)
    }

    pub fn remove_slot(&mut self, e: EdgeId) -> Option<f64> {
        self.weights.remove(&e)
    }

    /// Weight of the pair `{u, v}` (zero when absent).
    pub fn weight(&self, u: usize, v: usize) -> Result<f64> {
        Ok(self.slot_weight(edge_id(u, v, self.n)?))
    }

    pub fn slot_weight(&self, e: EdgeId) -> f64 {
        self.weights.get(&e).copied().unwrap_or(0.0)
    }

    pub fn contains_slot(&self, e: EdgeId) -> bool {
        self.weights.contains_key(&e)
    }

    /// Stored slots in increasing [`EdgeId`] order.
    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, f64)> + '_ {
        self.weights.iter().map(|(&e, &w)| (e, w))
    }

    /// Stored slots as `(u, v, w)` triples with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(move |(&e, &w)| {
            let (u, v) = e.endpoints(self.n).expect("stored slot is in range");
            (u, v, w)
        })
    }

    /// Number of stored slots, zero-weight ones included.
    pub fn stored_slots(&self) -> usize {
        self.weights.len()
    }

    /// `‖w‖₀`: number of strictly positive weights.
    pub fn nnz(&self) -> usize {
        self.weights.values().filter(|&&w| w > 0.0).count()
    }

    /// `‖w‖₁`. For signed graphs this is the sum of absolute values.
    pub fn total_weight(&self) -> f64 {
        self.weights.values().map(|w| w.abs()).sum()
    }

    /// `‖w‖_∞`.
    pub fn max_weight(&self) -> f64 {
        self.weights.values().fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|&w| w >= 0.0)
    }

    /// Weighted degree `d(u)` of every vertex.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (u, v, w) in self.edges() {
            d[u] += w;
            d[v] += w;
        }
        d
    }

    /// Stored-slot count incident on each vertex.
    pub fn unweighted_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for (u, v, _) in self.edges() {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Neighbor lists restricted to strictly positive weights.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v, w) in self.edges() {
            if w > 0.0 {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
        }
        adj
    }

    /// Whether the positive-weight edges connect all vertices.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Graph {
        Graph {
            n: self.n,
            weights: self.weights.iter().map(|(&e, &w)| (e, w * factor)).collect(),
        }
    }
}

/// Dense graph Laplacian `L = D − A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(pub DMatrix<f64>);

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `xᵀ L y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..n {
                row += self.0[(i, j)] * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }
}

pub fn laplacian(g: &Graph) -> LaplacianMatrix {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for (u, v, w) in g.edges() {
        l[(u, u)] += w;
        l[(v, v)] += w;
        l[(u, v)] -= w;
        l[(v, u)] -= w;
    }
    LaplacianMatrix(l)
}

/// A pair of disjoint vertex subsets `(S, T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutQuery {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

impl CutQuery {
    pub fn new(s: Vec<usize>, t: Vec<usize>) -> Self {
        CutQuery { s, t }
    }

    /// `(S, V∖S)`.
    pub fn complement(s: Vec<usize>, n: usize) -> Self {
        let mut in_s = vec![false; n];
        for &v in &s {
            if v < n {
                in_s[v] = true;
            }
        }
        let t = (0..n).filter(|&v| !in_s[v]).collect();
        CutQuery { s, t }
    }

    /// Inverse of [`CutQuery::labels`].
    pub fn from_labels(side: &[u8]) -> Self {
        let pick = |l| side.iter().enumerate().filter(|&(_, &x)| x == l).map(|(v, _)| v).collect();
        CutQuery { s: pick(1), t: pick(2) }
    }

    /// Membership labels: 1 for S, 2 for T, 0 otherwise.
    pub fn labels(&self, n: usize) -> Result<Vec<u8>> {
        let mut side = vec![0u8; n];
        for &v in &self.s {
            if v >= n {
                return domain(format!("vertex {v} in S out of range for n = {n}"));
            }
            side[v] = 1;
        }
        for &v in &self.t {
            if v >= n {
                return domain(format!("vertex {v} in T out of range for n = {n}"));
            }
            if side[v] == 1 {
                return domain(format!("vertex {v} is in both S and T"));
            }
            side[v] = 2;
        }
        Ok(side)
    }
}

/// `Φ_G(S, T)`: total weight of edges with one endpoint in S and the other in T.
pub fn cut_value(g: &Graph, q: &CutQuery) -> Result<f64> {
    let side = q.labels(g.n())?;
    Ok(cut_value_by_labels(g, &side))
}

/// `Φ_G(S, T)` for membership labels as produced by [`CutQuery::labels`].
pub fn cut_value_by_labels(g: &Graph, side: &[u8]) -> f64 {
    g.edges()
        .filter(|&(u, v, _)| side[u] | side[v] == 3)
        .map(|(_, _, w)| w)
        .sum()
}

/// `Δ(G)`: largest number of stored slots incident on a single vertex.
pub fn max_unweighted_degree(g: &Graph) -> usize {
    g.unweighted_degrees().into_iter().max().unwrap_or(0)
}

/// `‖L_{G1} − L_{G2}‖₂` by power iteration from a random start.
///
/// On hitting the iteration cap the error carries the best estimate so far.
pub fn spectral_norm_diff<R: Rng + ?Sized>(g1: &Graph, g2: &Graph, rng: &mut R) -> Result<f64> {
    if g1.n() != g2.n() {
        return domain(format!("vertex counts differ: {} vs {}", g1.n(), g2.n()));
    }
    let diff = laplacian(g1).0 - laplacian(g2).0;
    let n = diff.nrows();
    linalg::power_iteration_norm(&diff, 1e-9, 10 * n + 1000, rng)
}

/// Smallest nonzero Laplacian eigenvalue together with the connectivity it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGap {
    pub value: f64,
    /// True when exactly one eigenvalue lies below the zero threshold.
    pub connected: bool,
}

pub fn spectral_gap(g: &Graph) -> SpectralGap {
    let eig = linalg::sorted_eigenvalues(&laplacian(g).0);
    let cutoff = linalg::zero_cutoff(&eig);
    let zeros = eig.iter().filter(|&&x| x.abs() <= cutoff).count();
    let value = eig.iter().copied().find(|&x| x > cutoff).unwrap_or(0.0);
    SpectralGap {
        value,
        connected: zeros == 1 && g.n() >= 1,
    }
}

impl From<Graph> for LaplacianMatrix {
    fn from(g: Graph) -> Self {
        laplacian(&g)
    }
}
