//! Comparison mechanisms.

use rand::Rng;

use crate::dp::{laplace_noise, BudgetLedger, PrivacyBudget};
use crate::error::Result;
use crate::graph::{EdgeId, Graph};

/// Adds `Lap(1/ε)` to every one of the `N` slots; `(ε, 0)`-DP, weights unclamped.
pub fn naive_laplace_release<R: Rng + ?Sized>(
    g: &Graph,
    epsilon: f64,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<Graph> {
    let budget = PrivacyBudget::pure(epsilon)?;
    let mut out = Graph::new(g.n());
    for i in 0..g.slots() {
        let e = EdgeId(i);
        out.set_signed_slot(e, g.slot_weight(e) + laplace_noise(1.0 / epsilon, rng)?)?;
    }
    ledger.charge("laplace on every slot", budget);
    Ok(out)
}
