//! Pure-DP synthetic graph approximating the Laplacian spectrum.
//!
//! Three mechanisms run in sequence: a noisy edge count `m̂` (ε), a topology
//! draw of `m̂` slots (charged 2ε), and Laplace-perturbed weights on the drawn
//! slots clamped at zero (ε). The release is `(4ε, 0)`-DP.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dp::{laplace_unchecked, BudgetLedger, PrivacyBudget};
use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::topology::topology_sample;
use crate::ReleaseRng;

/// Output of [`spectral_release`].
#[derive(Debug, Clone)]
pub struct SpectralRelease {
    /// Synthetic graph with exactly `m_hat` stored slots.
    pub graph: Graph,
    pub m_hat: usize,
    pub ledger: BudgetLedger,
    pub seed: Option<u64>,
    pub beta: f64,
    pub epsilon: f64,
}

impl SpectralRelease {
    pub fn budget(&self) -> PrivacyBudget {
        self.ledger.total()
    }
}

/// `m̂` for a given Laplace draw `noise`: `min{N, ⌈m + noise + ln(1/β)/ε⌉}`, floored at 0.
pub fn edge_count_with_noise(m: usize, slots: usize, epsilon: f64, beta: f64, noise: f64) -> usize {
    let raw = (m as f64 + noise + (1.0 / beta).ln() / epsilon).ceil();
    if raw <= 0.0 {
        0
    } else {
        (raw as usize).min(slots)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return domain(format!("epsilon = {epsilon} must be positive and finite"));
    }
    Ok(())
}

/// Noisy edge count, biased upward so that `m̂ ≥ m` with probability at least `1 − β`.
///
/// Accepts any `β ∈ (0, 1)`; charges nothing (callers record the ε spent).
pub fn perturbed_edge_count<R: Rng + ?Sized>(
    m: usize,
    slots: usize,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<usize> {
    check_epsilon(epsilon)?;
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("beta = {beta} must lie in (0, 1)"));
    }
    if m > slots {
        return domain(format!("m = {m} exceeds the {slots} edge slots"));
    }
    let z = laplace_unchecked(1.0 / epsilon, rng);
    Ok(edge_count_with_noise(m, slots, epsilon, beta, z))
}

/// Runs the release with a ChaCha stream seeded from `seed`.
pub fn spectral_release(g: &Graph, epsilon: f64, beta: f64, seed: u64) -> Result<SpectralRelease> {
    let mut rng = ReleaseRng::seed_from_u64(seed);
    let mut release = spectral_release_with_rng(g, epsilon, beta, &mut rng)?;
    release.seed = Some(seed);
    Ok(release)
}

pub fn spectral_release_with_rng<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    beta: f64,
    rng: &mut R,
) -> Result<SpectralRelease> {
    check_epsilon(epsilon)?;
    if !(beta > 0.0 && beta < 0.5) {
        return domain(format!("beta = {beta} must lie in (0, 1/2)"));
    }
    if !g.is_nonnegative() {
        return domain("input graph has negative weights");
    }
    let mut ledger = BudgetLedger::new();
    let m_hat = perturbed_edge_count(g.nnz(), g.slots(), epsilon, beta, rng)?;
    ledger.charge("edge count", PrivacyBudget::pure(epsilon)?);

    let chosen = topology_sample(g, m_hat, epsilon, &mut ledger, rng)?;

    let mut out = Graph::new(g.n());
    for &e in &chosen {
        let w = (g.slot_weight(e) + laplace_unchecked(1.0 / epsilon, rng)).max(0.0);
        out.set_slot(e, w)?;
    }
    ledger.charge("edge weights", PrivacyBudget::pure(epsilon)?);

    Ok(SpectralRelease {
        graph: out,
        m_hat,
        ledger,
        seed: None,
        beta,
        epsilon,
    })
}

/// Serializable summary written next to a released graph.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralMeta {
    pub mechanism: &'static str,
    pub n: usize,
    pub m: usize,
    pub m_hat: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub seed: Option<u64>,
    pub budget: PrivacyBudget,
    pub ledger: BudgetLedger,
    pub wall_time_secs: f64,
}
