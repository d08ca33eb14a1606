//! The topology sampler: draws `k` edge slots with probability proportional to
//! `∏_{e∈S} exp(ε·w_e)` over all size-`k` subsets of the `N` slots.
//!
//! Each slot becomes an independent coin with log-odds `ε·w_e`; conditioning
//! the coins on exactly `k` successes gives the target distribution.

use rand::Rng;

use crate::dp::{BudgetLedger, PrivacyBudget};
use crate::error::{domain, Result};
use crate::graph::{EdgeId, Graph};
use crate::sampler::{BernoulliProfile, ConditionalSampler};

/// Multiplier on ε charged for one topology draw.
pub const TOPOLOGY_CHARGE_FACTOR: f64 = 2.0;

/// Coin profile over all `N` slots: slot `e` has log-odds `ε·w_e` (absent slots have `w_e = 0`).
pub fn topology_profile(g: &Graph, epsilon: f64) -> Result<BernoulliProfile> {
    check_inputs(g, epsilon)?;
    let mut log_odds = vec![0.0; g.slots()];
    for (e, w) in g.iter() {
        log_odds[e.0] = epsilon * w;
    }
    BernoulliProfile::from_log_odds(log_odds)
}

fn check_inputs(g: &Graph, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return domain(format!("epsilon = {epsilon} must be positive and finite"));
    }
    if !g.is_nonnegative() {
        return domain("topology sampling needs non-negative weights");
    }
    Ok(())
}

/// Draws a size-`k` slot set and charges `(2ε, 0)` to `ledger`.
pub fn topology_sample<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    epsilon: f64,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<Vec<EdgeId>> {
    let slots = g.slots();
    if k > slots {
        return domain(format!("k = {k} exceeds the {slots} edge slots"));
    }
    check_inputs(g, epsilon)?;
    ledger.charge(
        format!("topology sampler (charged {TOPOLOGY_CHARGE_FACTOR}·ε)"),
        PrivacyBudget::pure(TOPOLOGY_CHARGE_FACTOR * epsilon)?,
    );
    if slots == 0 {
        return Ok(Vec::new());
    }
    let profile = topology_profile(g, epsilon)?;
    let sampler = ConditionalSampler::new(&profile, k)?;
    let bits = sampler.sample(rng)?;
    Ok(selected(&bits))
}

/// Slots set in a sampler configuration.
pub fn selected(bits: &[bool]) -> Vec<EdgeId> {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| EdgeId(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_id;
    use crate::sampler::enumerate_conditional;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    #[test]
    fn zero_weights_give_uniform_pairs() {
        let g = Graph::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts: BTreeMap<Vec<EdgeId>, usize> = BTreeMap::new();
        let draws = 100_000;
        for _ in 0..draws {
            let mut ledger = BudgetLedger::new();
            *counts.entry(topology_sample(&g, 2, 1.0, &mut ledger, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let tv: f64 = counts.values().map(|&c| (c as f64 / draws as f64 - 1.0 / 3.0).abs()).sum::<f64>() / 2.0;
        assert!(tv <= 0.01, "tv {tv}");
    }

    #[test]
    fn full_count_takes_every_slot() {
        let g = Graph::from_edges(4, [(0, 1, 3.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut ledger = BudgetLedger::new();
        let s = topology_sample(&g, 6, 0.5, &mut ledger, &mut rng).unwrap();
        assert_eq!(s, (0..6).map(EdgeId).collect::<Vec<_>>());
        assert_eq!(ledger.total(), PrivacyBudget { epsilon: 1.0, delta: 0.0 });
    }

    #[test]
    fn rejects_oversized_k_and_bad_epsilon() {
        let g = Graph::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ledger = BudgetLedger::new();
        assert!(topology_sample(&g, 4, 1.0, &mut ledger, &mut rng).is_err());
        assert!(topology_sample(&g, 1, 0.0, &mut ledger, &mut rng).is_err());
        assert!(ledger.charges().is_empty());
    }

    #[test]
    fn gibbs_weights_on_three_slots() {
        // w = (1, 0, 0), ε = 1, k = 2: subsets {0,1}, {0,2} have mass e, {1,2} has mass 1.
        let g = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        let prof = topology_profile(&g, 1.0).unwrap();
        let d = enumerate_conditional(&prof, 2).unwrap();
        let e = std::f64::consts::E;
        assert!((d[&0b011] - e / (2.0 * e + 1.0)).abs() < 1e-12);
        assert!((d[&0b101] - e / (2.0 * e + 1.0)).abs() < 1e-12);
        assert!((d[&0b110] - 1.0 / (2.0 * e + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn heavy_edge_is_retained() {
        let n = 20;
        let slots = crate::graph::slot_count(n);
        let eps = 1.0;
        let heavy = (100.0 * slots as f64).ln() / eps;
        let mut g = Graph::new(n);
        g.set_weight(3, 7, heavy).unwrap();
        let target = edge_id(3, 7, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut hits = 0;
        for _ in 0..1000 {
            let mut ledger = BudgetLedger::new();
            if topology_sample(&g, 1, eps, &mut ledger, &mut rng).unwrap().contains(&target) {
                hits += 1;
            }
        }
        assert!(hits >= 980, "{hits}");
    }

    #[test]
    fn single_vertex_graph_has_no_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ledger = BudgetLedger::new();
        assert!(topology_sample(&Graph::new(1), 0, 1.0, &mut ledger, &mut rng).unwrap().is_empty());
    }
}
