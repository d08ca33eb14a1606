//! Laplacian pseudoinverse and random-walk statistics: effective resistance,
//! commute, cover and hitting times, exact and private.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::dp::{laplace_unchecked, BudgetLedger, PrivacyBudget};
use crate::error::{domain, Error, Result};
use crate::graph::{laplacian, max_unweighted_degree, spectral_gap, Graph, LaplacianMatrix};
use crate::linalg::ZERO_EIGEN_RELATIVE;
use crate::spectral::spectral_release_with_rng;

/// Share of ε given to the spectral release inside the private estimators.
pub const RELEASE_FRACTION: f64 = 1.0 / 8.0;

/// `L†` with the rank and zero threshold used to build it.
#[derive(Debug, Clone)]
pub struct Pseudoinverse {
    pub matrix: DMatrix<f64>,
    pub rank: usize,
    pub zero_threshold: f64,
}

impl Pseudoinverse {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// `b_{uv}ᵀ L† b_{uv}`.
    pub fn resistance(&self, u: usize, v: usize) -> f64 {
        let m = &self.matrix;
        m[(u, u)] + m[(v, v)] - 2.0 * m[(u, v)]
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }
}

/// `Σ_{λ_i > cutoff} u_i u_iᵀ / λ_i` with cutoff `1e-10 · λ_max`.
pub fn pseudoinverse(l: &LaplacianMatrix) -> Result<Pseudoinverse> {
    let m = l.matrix();
    let n = m.nrows();
    if n == 0 {
        return Ok(Pseudoinverse {
            matrix: DMatrix::zeros(0, 0),
            rank: 0,
            zero_threshold: 0.0,
        });
    }
    let scale = m.amax();
    if (m - m.transpose()).amax() > 1e-12 * scale.max(1.0) {
        return domain("pseudoinverse needs a symmetric matrix");
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1000 * n.max(10)).ok_or(Error::NotConverged {
        estimate: f64::NAN,
        iterations: 1000 * n.max(10),
    })?;
    let top = eig.eigenvalues.amax();
    let zero_threshold = ZERO_EIGEN_RELATIVE * top;
    let mut out = DMatrix::zeros(n, n);
    let mut rank = 0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > zero_threshold {
            let u = eig.eigenvectors.column(i);
            out.ger(1.0 / lambda, &u, &u, 1.0);
            rank += 1;
        }
    }
    Ok(Pseudoinverse {
        matrix: out,
        rank,
        zero_threshold,
    })
}

fn connected_pinv(g: &Graph) -> Result<Pseudoinverse> {
    if g.n() == 0 {
        return domain("graph has no vertices");
    }
    if !g.is_nonnegative() {
        return domain("random-walk statistics need non-negative weights");
    }
    if !g.is_connected() {
        return domain("graph is disconnected");
    }
    pseudoinverse(&laplacian(g))
}

fn check_vertex(n: usize, v: usize) -> Result<()> {
    if v >= n {
        return domain(format!("vertex {v} out of range for n = {n}"));
    }
    Ok(())
}

pub fn effective_resistance(g: &Graph, u: usize, v: usize) -> Result<f64> {
    check_vertex(g.n(), u)?;
    check_vertex(g.n(), v)?;
    if u == v {
        return domain("effective resistance needs distinct vertices");
    }
    Ok(connected_pinv(g)?.resistance(u, v))
}

/// All-pairs `R_eff` as a symmetric matrix with zero diagonal.
pub fn resistance_matrix(g: &Graph) -> Result<DMatrix<f64>> {
    let p = connected_pinv(g)?;
    let n = g.n();
    Ok(DMatrix::from_fn(n, n, |u, v| if u == v { 0.0 } else { p.resistance(u, v) }))
}

/// `|R_eff(0,1)|` in unit `K_n` minus the same with edge `{0,1}` removed.
pub fn resistance_sensitivity_demo(n: usize) -> Result<f64> {
    if n < 3 {
        return domain(format!("n = {n}: removing an edge from K_n must keep it connected"));
    }
    let full = Graph::complete(n, 1.0)?;
    let mut cut = full.clone();
    cut.remove_slot(crate::graph::edge_id(0, 1, n)?);
    Ok((effective_resistance(&full, 0, 1)? - effective_resistance(&cut, 0, 1)?).abs())
}

/// Unordered pairs `u < v` to values.
pub type PairMap = BTreeMap<(usize, usize), f64>;

/// `C_{uv} = 2‖w‖₁ R_eff(u, v)` for every pair.
pub fn commute_times_exact(g: &Graph) -> Result<PairMap> {
    let p = connected_pinv(g)?;
    let w = g.total_weight();
    Ok(pairs(g.n()).map(|(u, v)| ((u, v), 2.0 * w * p.resistance(u, v))).collect())
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// Outcome of the spectral-gap condition that backs the private estimators' guarantees.
#[derive(Debug, Clone, Serialize)]
pub struct GapCheck {
    pub spectral_gap: f64,
    pub max_degree: usize,
    /// `Δ(G) ln²n / (ε λ(G))`; the guarantee needs this below ½.
    pub ratio: f64,
    pub satisfied: bool,
}

pub fn gap_check(g: &Graph, epsilon: f64) -> GapCheck {
    let gap = spectral_gap(g).value;
    let delta = max_unweighted_degree(g);
    let ln = (g.n() as f64).ln();
    let ratio = delta as f64 * ln * ln / (epsilon * gap);
    GapCheck {
        spectral_gap: gap,
        max_degree: delta,
        ratio,
        satisfied: ratio < 0.5,
    }
}

/// The released graph the private estimators invert, after connectivity repair.
#[derive(Debug, Clone)]
pub struct RepairedRelease {
    pub graph: Graph,
    /// True when `K_n` at weight `1/n` was overlaid.
    pub repaired: bool,
    pub m_hat: usize,
}

fn private_release<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    beta: f64,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<RepairedRelease> {
    private_release_at(g, epsilon * RELEASE_FRACTION, "spectral release at ε/8", beta, ledger, rng)
}

fn private_release_at<R: Rng + ?Sized>(
    g: &Graph,
    release_epsilon: f64,
    scope: &str,
    beta: f64,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<RepairedRelease> {
    let r = spectral_release_with_rng(g, release_epsilon, beta, rng)?;
    ledger.absorb(scope, r.ledger);
    let mut graph = r.graph;
    let repaired = !graph.is_connected();
    if repaired {
        let n = graph.n();
        let fill = 1.0 / n as f64;
        for e in 0..graph.slots() {
            let id = crate::graph::EdgeId(e);
            graph.set_slot(id, graph.slot_weight(id) + fill)?;
        }
    }
    Ok(RepairedRelease {
        graph,
        repaired,
        m_hat: r.m_hat,
    })
}

fn check_private_inputs(g: &Graph, epsilon: f64) -> Result<()> {
    PrivacyBudget::pure(epsilon)?;
    if !g.is_nonnegative() {
        return domain("random-walk statistics need non-negative weights");
    }
    if !g.is_connected() {
        return domain("graph is disconnected");
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PrivateCommute {
    pub values: PairMap,
    pub total_weight_estimate: f64,
    pub release: RepairedRelease,
    pub gap: GapCheck,
    pub ledger: BudgetLedger,
}

/// `Ĉ_{uv} = 2Ŵ · b_{uv}ᵀ L_Ĝ† b_{uv}`, `Ŵ = ‖w‖₁ + Lap(2/ε)`; `(ε, 0)`-DP.
///
/// The factor 2 comes from `C = 2‖w‖₁ R_eff`; without it the estimate tends to `C/2`.
pub fn private_commute_times<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<PrivateCommute> {
    check_private_inputs(g, epsilon)?;
    let gap = gap_check(g, epsilon);
    let mut ledger = BudgetLedger::new();
    let release = private_release(g, epsilon, beta, &mut ledger, rng)?;
    let w_hat = g.total_weight() + laplace_unchecked(2.0 / epsilon, rng);
    ledger.charge("total weight", PrivacyBudget::pure(epsilon / 2.0)?);
    let p = pseudoinverse(&laplacian(&release.graph))?;
    let values = pairs(g.n()).map(|(u, v)| ((u, v), 2.0 * w_hat * p.resistance(u, v))).collect();
    Ok(PrivateCommute {
        values,
        total_weight_estimate: w_hat,
        release,
        gap,
        ledger,
    })
}

#[derive(Debug, Clone)]
pub struct PrivateResistance {
    pub values: PairMap,
    pub release: RepairedRelease,
    pub gap: GapCheck,
    pub ledger: BudgetLedger,
}

/// All-pairs `R_eff` on a spectral release at ε/4 (four parts, total `(ε, 0)`), repaired if disconnected.
pub fn private_resistances<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<PrivateResistance> {
    check_private_inputs(g, epsilon)?;
    let gap = gap_check(g, epsilon);
    let mut ledger = BudgetLedger::new();
    let release = private_release_at(g, epsilon / 4.0, "spectral release at ε/4", beta, &mut ledger, rng)?;
    let p = pseudoinverse(&laplacian(&release.graph))?;
    let values = pairs(g.n()).map(|(u, v)| ((u, v), p.resistance(u, v))).collect();
    Ok(PrivateResistance {
        values,
        release,
        gap,
        ledger,
    })
}

/// Matthews' bracket `(max C / 2, max C · (1 + ln n))`, with `n` read off the largest vertex index.
pub fn cover_time_bounds(commute: &PairMap) -> Result<(f64, f64)> {
    let Some(n) = commute.keys().map(|&(u, v)| u.max(v) + 1).max() else {
        return domain("cover time bounds need at least one commute time");
    };
    let top = commute.values().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((top / 2.0, top * (1.0 + (n as f64).ln())))
}

/// Expected steps from each vertex to first reach `target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingVector {
    pub target: usize,
    pub values: Vec<f64>,
}

/// `d^t`: the degree vector with `d(t) − 2‖w‖₁` at the target.
pub fn target_degree_vector(g: &Graph, t: usize) -> DVector<f64> {
    let mut d = DVector::from_vec(g.weighted_degrees());
    d[t] -= 2.0 * g.total_weight();
    d
}

fn shifted(p: &Pseudoinverse, rhs: &DVector<f64>, t: usize) -> HittingVector {
    let h = p.apply(rhs);
    let c = -h[t];
    let mut values: Vec<f64> = h.iter().map(|x| x + c).collect();
    values[t] = 0.0;
    HittingVector { target: t, values }
}

/// Solves `L h = d^t` through `L†` and shifts so `h[t] = 0`.
pub fn hitting_times_exact(g: &Graph, t: usize) -> Result<HittingVector> {
    check_vertex(g.n(), t)?;
    let p = connected_pinv(g)?;
    Ok(shifted(&p, &target_degree_vector(g, t), t))
}

/// Hitting vectors for every target from one pseudoinverse.
pub fn hitting_times_all_exact(g: &Graph) -> Result<Vec<HittingVector>> {
    let p = connected_pinv(g)?;
    Ok((0..g.n()).map(|t| shifted(&p, &target_degree_vector(g, t), t)).collect())
}

/// Largest violation of `h_u = 1 + Σ_v (w_uv / d_u) h_v` over `u ≠ t`.
pub fn hitting_residual(g: &Graph, h: &HittingVector) -> f64 {
    let adj = g.adjacency();
    let d = g.weighted_degrees();
    (0..g.n())
        .filter(|&u| u != h.target)
        .map(|u| {
            let step: f64 = adj[u].iter().map(|&(v, w)| w / d[u] * h.values[v]).sum();
            (h.values[u] - 1.0 - step).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct PrivateHitting {
    pub vectors: Vec<HittingVector>,
    /// Published `d̂ = d + z`, `z_i ~ Lap(4/ε)`; entries may be negative.
    pub degrees: Vec<f64>,
    pub release: RepairedRelease,
    pub gap: GapCheck,
    pub ledger: BudgetLedger,
}

/// `ĥ_{*,t} = L_Ĝ† d̂^t + ĉ_t 1` for every target, sharing one degree perturbation; `(ε, 0)`-DP.
pub fn private_hitting_times<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<PrivateHitting> {
    check_private_inputs(g, epsilon)?;
    let n = g.n();
    let gap = gap_check(g, epsilon);
    let mut ledger = BudgetLedger::new();
    let release = private_release(g, epsilon, beta, &mut ledger, rng)?;
    let z: Vec<f64> = (0..n).map(|_| laplace_unchecked(4.0 / epsilon, rng)).collect();
    ledger.charge("degree vector", PrivacyBudget::pure(epsilon / 2.0)?);
    let z_sum: f64 = z.iter().sum();
    let p = pseudoinverse(&laplacian(&release.graph))?;
    let vectors = (0..n)
        .map(|t| {
            let mut rhs = target_degree_vector(g, t);
            for (i, zi) in z.iter().enumerate() {
                rhs[i] += zi;
            }
            rhs[t] -= z_sum;
            shifted(&p, &rhs, t)
        })
        .collect();
    let degrees = g.weighted_degrees().iter().zip(&z).map(|(d, z)| d + z).collect();
    Ok(PrivateHitting {
        vectors,
        degrees,
        release,
        gap,
        ledger,
    })
}

/// Ordered pairs `(u, v)` to `h_{u,v}` by
/// `h_{uv} = ‖w‖₁ R(u,v) + Σ_i (d_i / 2)(R(v,i) − R(i,u))`.
pub fn hitting_times_tetali(g: &Graph) -> Result<BTreeMap<(usize, usize), f64>> {
    let r = resistance_matrix(g)?;
    let d = g.weighted_degrees();
    let w = g.total_weight();
    let n = g.n();
    let mut out = BTreeMap::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let s: f64 = (0..n).map(|i| d[i] / 2.0 * (r[(v, i)] - r[(i, u)])).sum();
            out.insert((u, v), w * r[(u, v)] + s);
        }
    }
    Ok(out)
}

/// `ζu² / (1 − ζu)` when `ζu < 1`.
pub fn pseudoinverse_perturbation_bound(zeta: f64, u: f64) -> Option<f64> {
    let zu = zeta * u;
    (zu < 1.0).then(|| zeta * u * u / (1.0 - zu))
}

/// Weighted random walk on a graph with positive degrees.
pub struct Walker {
    neighbors: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
}

impl Walker {
    pub fn new(g: &Graph) -> Result<Self> {
        let adj = g.adjacency();
        let mut neighbors = Vec::with_capacity(adj.len());
        let mut cumulative = Vec::with_capacity(adj.len());
        for (u, list) in adj.into_iter().enumerate() {
            if list.is_empty() && g.n() > 1 {
                return domain(format!("vertex {u} is isolated"));
            }
            let mut acc = 0.0;
            cumulative.push(
                list.iter()
                    .map(|&(_, w)| {
                        acc += w;
                        acc
                    })
                    .collect(),
            );
            neighbors.push(list.into_iter().map(|(v, _)| v).collect());
        }
        Ok(Walker { neighbors, cumulative })
    }

    pub fn step<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> usize {
        let c = &self.cumulative[u];
        let x = rng.gen::<f64>() * c[c.len() - 1];
        let i = c.partition_point(|&a| a <= x).min(c.len() - 1);
        self.neighbors[u][i]
    }

    /// Steps from `start` until `target` is first reached.
    pub fn hit<R: Rng + ?Sized>(&self, start: usize, target: usize, rng: &mut R) -> u64 {
        let (mut u, mut steps) = (start, 0);
        while u != target {
            u = self.step(u, rng);
            steps += 1;
        }
        steps
    }

    /// Steps from `start` until every vertex has been visited.
    pub fn cover<R: Rng + ?Sized>(&self, start: usize, rng: &mut R) -> u64 {
        let n = self.neighbors.len();
        let mut seen = vec![false; n];
        seen[start] = true;
        let (mut left, mut u, mut steps) = (n - 1, start, 0);
        while left > 0 {
            u = self.step(u, rng);
            steps += 1;
            if !seen[u] {
                seen[u] = true;
                left -= 1;
            }
        }
        steps
    }
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

fn estimate(samples: impl Iterator<Item = u64>) -> Estimate {
    let (mut k, mut s, mut s2) = (0.0, 0.0, 0.0);
    for x in samples {
        let x = x as f64;
        k += 1.0;
        s += x;
        s2 += x * x;
    }
    let mean = s / k;
    let var = if k > 1.0 { (s2 - k * mean * mean) / (k - 1.0) } else { 0.0 };
    Estimate {
        mean,
        std_error: (var.max(0.0) / k).sqrt(),
    }
}

pub fn simulate_hitting_time<R: Rng + ?Sized>(
    g: &Graph,
    start: usize,
    target: usize,
    walks: usize,
    rng: &mut R,
) -> Result<Estimate> {
    check_vertex(g.n(), start)?;
    check_vertex(g.n(), target)?;
    if !g.is_connected() {
        return domain("graph is disconnected");
    }
    let w = Walker::new(g)?;
    Ok(estimate((0..walks.max(1)).map(|_| w.hit(start, target, rng))))
}

pub fn simulate_cover_time<R: Rng + ?Sized>(g: &Graph, start: usize, walks: usize, rng: &mut R) -> Result<Estimate> {
    check_vertex(g.n(), start)?;
    if !g.is_connected() {
        return domain("graph is disconnected");
    }
    let w = Walker::new(g)?;
    Ok(estimate((0..walks.max(1)).map(|_| w.cover(start, rng))))
}
