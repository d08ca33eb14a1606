//! Laplace noise and privacy-budget accounting.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// An `(ε, δ)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    /// The identity charge `(0, 0)`.
    pub const ZERO: PrivacyBudget = PrivacyBudget {
        epsilon: 0.0,
        delta: 0.0,
    };

    /// `ε > 0`, `0 ≤ δ < 1`.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return domain(format!("epsilon = {epsilon} must be positive and finite"));
        }
        if !(0.0..1.0).contains(&delta) {
            return domain(format!("delta = {delta} must lie in [0, 1)"));
        }
        Ok(PrivacyBudget { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

impl fmt::Display for PrivacyBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.epsilon, self.delta)
    }
}

/// Componentwise sum of the charges.
pub fn compose_sequential<'a>(charges: impl IntoIterator<Item = &'a PrivacyBudget>) -> PrivacyBudget {
    charges.into_iter().fold(PrivacyBudget::ZERO, |acc, c| PrivacyBudget {
        epsilon: acc.epsilon + c.epsilon,
        delta: acc.delta + c.delta,
    })
}

/// `k`-fold adaptive composition of an `(ε, δ)` mechanism:
/// `(√(2k ln(1/δ′))·ε + k·ε·(e^ε − 1), k·δ + δ′)`.
///
/// `k = 0` is the empty composition and returns `(0, δ′)`.
pub fn compose_advanced(epsilon: f64, delta: f64, k: usize, delta_prime: f64) -> Result<PrivacyBudget> {
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return domain(format!("delta' = {delta_prime} must lie in (0, 1)"));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return domain(format!("epsilon = {epsilon} must be non-negative and finite"));
    }
    if !(0.0..1.0).contains(&delta) {
        return domain(format!("delta = {delta} must lie in [0, 1)"));
    }
    let kf = k as f64;
    let eps = (2.0 * kf * (1.0 / delta_prime).ln()).sqrt() * epsilon + kf * epsilon * epsilon.exp_m1();
    Ok(PrivacyBudget {
        epsilon: eps,
        delta: kf * delta + delta_prime,
    })
}

/// Ordered record of privacy charges. Reports totals; never refuses a charge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    charges: Vec<Charge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub label: String,
    pub budget: PrivacyBudget,
}

impl BudgetLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: impl Into<String>, budget: PrivacyBudget) {
        self.charges.push(Charge {
            label: label.into(),
            budget,
        });
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    /// Appends every charge of `other`, prefixing labels with `scope`.
    pub fn absorb(&mut self, scope: &str, other: BudgetLedger) {
        for c in other.charges {
            self.charge(format!("{scope}/{}", c.label), c.budget);
        }
    }

    /// Sequential composition of all charges.
    pub fn total(&self) -> PrivacyBudget {
        compose_sequential(self.charges.iter().map(|c| &c.budget))
    }
}

/// One draw from `Lap(0, b)` by inverse CDF: `−b·sgn(u−½)·ln(1 − 2|u−½|)`, `u ∈ (0, 1)`.
pub fn laplace_noise<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return domain(format!("Laplace scale {scale} must be positive and finite"));
    }
    Ok(laplace_unchecked(scale, rng))
}

pub(crate) fn laplace_unchecked<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let c = u - 0.5;
    -scale * c.signum() * (-2.0 * c.abs()).ln_1p()
}
