//! `(5ε, δ)`-DP synthetic graph approximating every `(S, T)` cut.
//!
//! The heavy part reweighs a topology sample `Ê` with unclamped Laplace noise;
//! the light part synthesizes the residual graph `(V, E∖Ê)` with the mirror
//! descent synthesizer. The release is their coordinatewise sum.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dp::{laplace_unchecked, BudgetLedger, PrivacyBudget};
use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::mirror::{mirror_descent_synthesize, MirrorDescentConfig, MirrorDescentPlan};
use crate::spectral::perturbed_edge_count;
use crate::topology::topology_sample;
use crate::ReleaseRng;

/// Coordinatewise weight sum over the union of stored slots.
pub fn graph_sum(g1: &Graph, g2: &Graph) -> Result<Graph> {
    if g1.n() != g2.n() {
        return domain(format!("vertex counts differ: {} vs {}", g1.n(), g2.n()));
    }
    let mut out = g1.clone();
    for (e, w) in g2.iter() {
        out.set_signed_slot(e, out.slot_weight(e) + w)?;
    }
    Ok(out)
}

/// `1/(ln n)^{1/4}`, replaced by ½ where that is not below 1 (n ≤ 2).
pub fn default_cut_beta(n: usize) -> f64 {
    let b = (n as f64).ln().powf(-0.25);
    if b.is_finite() && b > 0.0 && b < 1.0 {
        b
    } else {
        0.5
    }
}

#[derive(Debug, Clone)]
pub struct CutRelease {
    /// `Ĝ₁ + Ĝ₂`; may carry negative weights.
    pub graph: Graph,
    pub heavy_part: Graph,
    pub light_part: Graph,
    pub m_hat: usize,
    /// Largest weight left in `E∖Ê`.
    pub residual_max_weight: f64,
    pub residual_edges: usize,
    pub plan: MirrorDescentPlan,
    pub ledger: BudgetLedger,
    pub seed: Option<u64>,
    pub beta: f64,
}

impl CutRelease {
    pub fn budget(&self) -> PrivacyBudget {
        self.ledger.total()
    }
}

pub fn cut_release(
    g: &Graph,
    epsilon: f64,
    delta: f64,
    beta: Option<f64>,
    config: &MirrorDescentConfig,
    seed: u64,
) -> Result<CutRelease> {
    let mut rng = ReleaseRng::seed_from_u64(seed);
    let mut r = cut_release_with_rng(g, epsilon, delta, beta, config, &mut rng)?;
    r.seed = Some(seed);
    Ok(r)
}

pub fn cut_release_with_rng<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    delta: f64,
    beta: Option<f64>,
    config: &MirrorDescentConfig,
    rng: &mut R,
) -> Result<CutRelease> {
    PrivacyBudget::new(epsilon, delta)?;
    if !(delta > 0.0) {
        return domain("cut release needs delta > 0");
    }
    if !g.is_nonnegative() {
        return domain("input graph has negative weights");
    }
    let beta = beta.unwrap_or_else(|| default_cut_beta(g.n()));
    let mut ledger = BudgetLedger::new();

    let m_hat = perturbed_edge_count(g.nnz(), g.slots(), epsilon, beta, rng)?;
    ledger.charge("edge count", PrivacyBudget::pure(epsilon)?);
    let chosen = topology_sample(g, m_hat, epsilon, &mut ledger, rng)?;

    let mut heavy = Graph::new(g.n());
    for &e in &chosen {
        heavy.set_signed_slot(e, g.slot_weight(e) + laplace_unchecked(1.0 / epsilon, rng))?;
    }
    ledger.charge("heavy weights", PrivacyBudget::pure(epsilon)?);

    let mut residual = g.clone();
    for &e in &chosen {
        residual.remove_slot(e);
    }
    let residual_max_weight = residual.max_weight();
    let residual_edges = residual.nnz();

    let mut md_ledger = BudgetLedger::new();
    let (light, plan) = mirror_descent_synthesize(&residual, epsilon, delta, config, &mut md_ledger, rng)?;
    ledger.absorb("light part", md_ledger);

    Ok(CutRelease {
        graph: graph_sum(&heavy, &light)?,
        heavy_part: heavy,
        light_part: light,
        m_hat,
        residual_max_weight,
        residual_edges,
        plan,
        ledger,
        seed: None,
        beta,
    })
}

/// Serializable summary written next to a cut release.
#[derive(Debug, Clone, Serialize)]
pub struct CutMeta {
    pub mechanism: &'static str,
    pub n: usize,
    pub m: usize,
    pub m_hat: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub seed: Option<u64>,
    pub heavy_slots: usize,
    pub light_slots: usize,
    pub residual_edges: usize,
    pub residual_max_weight: f64,
    pub mirror_descent: MirrorDescentPlan,
    pub budget: PrivacyBudget,
    pub ledger: BudgetLedger,
    pub wall_time_secs: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_value, edge_id, CutQuery};
    use approx::assert_relative_eq;

    #[test]
    fn sum_examples() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 0.5)]).unwrap();
        assert_eq!(graph_sum(&g, &Graph::new(4)).unwrap(), g);
        let e = Graph::from_edges(4, [(0, 1, 1.0)]).unwrap();
        assert_eq!(graph_sum(&e, &e).unwrap().weight(0, 1).unwrap(), 2.0);
        let d = Graph::from_edges(4, [(1, 2, 3.0)]).unwrap();
        let s = graph_sum(&e, &d).unwrap();
        assert_eq!(s.stored_slots(), 2);
        assert_eq!(s.weight(1, 2).unwrap(), 3.0);
        assert!(graph_sum(&e, &Graph::new(5)).is_err());
    }

    #[test]
    fn default_beta_values() {
        assert_relative_eq!(default_cut_beta(10), 10f64.ln().powf(-0.25));
        assert_eq!(default_cut_beta(2), 0.5);
        assert_eq!(default_cut_beta(1), 0.5);
        assert!(default_cut_beta(3) < 1.0);
    }

    #[test]
    fn budget_is_five_epsilon_delta() {
        let g = Graph::from_edges(6, [(0, 1, 1.0), (1, 2, 1.0), (3, 5, 2.0)]).unwrap();
        let r = cut_release(&g, 0.4, 1e-6, None, &MirrorDescentConfig::default(), 3).unwrap();
        let b = r.budget();
        assert_relative_eq!(b.epsilon, 5.0 * 0.4, max_relative = 1e-15);
        assert_eq!(b.delta, 1e-6);
        assert_eq!(r.heavy_part.stored_slots(), r.m_hat);
    }

    #[test]
    fn release_is_sum_of_parts() {
        let g = Graph::from_edges(5, [(0, 1, 1.0), (1, 2, 4.0), (2, 4, 1.0)]).unwrap();
        let r = cut_release(&g, 1.0, 1e-6, None, &MirrorDescentConfig::default(), 8).unwrap();
        for (e, w) in r.graph.iter() {
            assert_eq!(w, r.heavy_part.slot_weight(e) + r.light_part.slot_weight(e));
        }
        let q = CutQuery::new(vec![0, 2], vec![1, 4]);
        let whole = cut_value(&r.graph, &q).unwrap();
        let parts = cut_value(&r.heavy_part, &q).unwrap() + cut_value(&r.light_part, &q).unwrap();
        assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0));
    }

    #[test]
    fn heavy_weights_are_not_clamped() {
        let g = Graph::new(8);
        let negative = (0..20).any(|seed| {
            let r = cut_release(&g, 1.0, 1e-6, None, &MirrorDescentConfig::default(), seed).unwrap();
            let neg = r.heavy_part.iter().any(|(_, w)| w < 0.0);
            neg
        });
        assert!(negative);
    }

    #[test]
    fn residual_is_light() {
        let n = 12;
        let mut g = Graph::new(n);
        g.set_weight(0, 1, 60.0).unwrap();
        g.set_weight(2, 3, 1.0).unwrap();
        let eps = 1.0;
        let bound = 10.0 * (n as f64).ln() / eps;
        // The guarantee holds on the event m̂ ≥ m, which β = 0.01 makes near certain.
        let mut covered = 0;
        for seed in 0..30 {
            let r = cut_release(&g, eps, 1e-6, Some(0.01), &MirrorDescentConfig::default(), seed).unwrap();
            if r.m_hat >= g.nnz() {
                covered += 1;
                assert!(r.residual_max_weight <= bound, "seed {seed}: {}", r.residual_max_weight);
                assert!(r.heavy_part.contains_slot(edge_id(0, 1, n).unwrap()));
            }
        }
        assert!(covered >= 25, "{covered}");
    }
}
