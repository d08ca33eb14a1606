//! Private multiplicative-weights synthesizer for cut queries.
//!
//! The synthetic graph is a positive weight vector over all `N` slots. A share
//! of the budget buys a noisy total mass `M̂`; the vector starts uniform at
//! that mass. Each round draws a random disjoint `(S, T)` pair, answers it on
//! the private graph with Laplace noise, and multiplies every slot crossing
//! `S × T` by `exp(∓η)` depending on whether the synthetic cut is too large or
//! too small, then renormalizes to `M̂`. The output is the average iterate.
//!
//! Rounds are accounted by advanced composition, so `T` rounds at `ε_r` plus
//! the mass estimate compose to the requested `(ε, δ)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dp::{compose_advanced, laplace_unchecked, BudgetLedger, PrivacyBudget};
use crate::error::{domain, Error, Result};
use crate::graph::{cut_value_by_labels, EdgeId, Graph};

/// How queries are drawn each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuerySampler {
    /// Each vertex independently lands in S, T or neither; redrawn until S and T are non-empty.
    #[default]
    UniformTernary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorDescentConfig {
    /// Rounds `T`; `None` means `⌈n ln n⌉`.
    pub iterations: Option<usize>,
    /// Step size `η`; `None` means `1/√T`.
    pub step_size: Option<f64>,
    /// Fraction of ε spent on the total-mass estimate.
    pub mass_fraction: f64,
    pub queries: QuerySampler,
}

impl Default for MirrorDescentConfig {
    fn default() -> Self {
        MirrorDescentConfig {
            iterations: None,
            step_size: None,
            mass_fraction: 0.5,
            queries: QuerySampler::UniformTernary,
        }
    }
}

/// Resolved schedule and budget split for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorDescentPlan {
    pub n: usize,
    pub iterations: usize,
    pub step_size: f64,
    pub epsilon_mass: f64,
    pub epsilon_round: f64,
    /// `compose_advanced(ε_r, 0, T, δ)`.
    pub rounds_budget: PrivacyBudget,
    /// Charged total: mass plus rounds.
    pub budget: PrivacyBudget,
}

impl MirrorDescentPlan {
    /// Laplace scale of the mass estimate, the error floor on an empty input.
    pub fn noise_floor(&self) -> f64 {
        1.0 / self.epsilon_mass
    }

    /// Laplace scale of each round's query answer.
    pub fn query_scale(&self) -> f64 {
        1.0 / self.epsilon_round
    }
}

pub fn default_iterations(n: usize) -> usize {
    if n < 2 {
        1
    } else {
        (n as f64 * (n as f64).ln()).ceil() as usize
    }
}

/// Largest `ε_r` with `compose_advanced(ε_r, 0, T, δ).ε ≤ target`, by bisection.
pub fn per_round_epsilon(target: f64, rounds: usize, delta: f64) -> Result<f64> {
    let composed = |e: f64| compose_advanced(e, 0.0, rounds, delta).map(|b| b.epsilon);
    let mut hi = target;
    while composed(hi)? < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Config("per-round budget search diverged".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if composed(mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

pub fn plan(n: usize, epsilon: f64, delta: f64, config: &MirrorDescentConfig) -> Result<MirrorDescentPlan> {
    PrivacyBudget::new(epsilon, delta)?;
    if !(delta > 0.0) {
        return domain("mirror descent needs delta > 0");
    }
    let f = config.mass_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Config(format!("mass_fraction = {f} must lie in (0, 1)")));
    }
    let iterations = config.iterations.unwrap_or_else(|| default_iterations(n));
    if iterations == 0 {
        return Err(Error::Config("mirror descent needs at least one iteration".into()));
    }
    let step_size = config.step_size.unwrap_or(1.0 / (iterations as f64).sqrt());
    if !(step_size > 0.0) || !step_size.is_finite() {
        return Err(Error::Config(format!("step size {step_size} must be positive")));
    }
    let epsilon_mass = f * epsilon;
    let epsilon_round = per_round_epsilon((1.0 - f) * epsilon, iterations, delta)?;
    // Below this the query noise swamps any graph and the float search is meaningless.
    if !(epsilon_round > 1e-12) {
        return Err(Error::Config(format!(
            "{iterations} rounds leave no usable per-round budget from epsilon = {epsilon}"
        )));
    }
    let rounds_budget = compose_advanced(epsilon_round, 0.0, iterations, delta)?;
    Ok(MirrorDescentPlan {
        n,
        iterations,
        step_size,
        epsilon_mass,
        epsilon_round,
        rounds_budget,
        budget: PrivacyBudget { epsilon, delta },
    })
}

fn sample_query<R: Rng + ?Sized>(n: usize, labels: &mut [u8], rng: &mut R) {
    loop {
        let (mut s, mut t) = (false, false);
        for l in labels.iter_mut() {
            *l = rng.gen_range(0..3u8);
            s |= *l == 1;
            t |= *l == 2;
        }
        if s && t {
            return;
        }
        debug_assert!(n >= 2);
    }
}

/// Synthesizes a non-negative graph whose cuts track `light`'s, charging `(ε, δ)`.
pub fn mirror_descent_synthesize<R: Rng + ?Sized>(
    light: &Graph,
    epsilon: f64,
    delta: f64,
    config: &MirrorDescentConfig,
    ledger: &mut BudgetLedger,
    rng: &mut R,
) -> Result<(Graph, MirrorDescentPlan)> {
    let n = light.n();
    let plan = plan(n, epsilon, delta, config)?;
    ledger.charge("mirror descent: total mass", PrivacyBudget::pure(plan.epsilon_mass)?);
    ledger.charge(
        format!("mirror descent: {} rounds (advanced composition)", plan.iterations),
        PrivacyBudget {
            epsilon: epsilon - plan.epsilon_mass,
            delta,
        },
    );

    let slots = light.slots();
    let mass = (light.total_weight() + laplace_unchecked(1.0 / plan.epsilon_mass, rng)).max(0.0);
    let mut out = Graph::new(n);
    if slots == 0 || mass == 0.0 {
        return Ok((out, plan));
    }

    let mut ends = Vec::with_capacity(slots);
    for i in 0..slots {
        ends.push(EdgeId(i).endpoints(n)?);
    }
    let mut x = vec![mass / slots as f64; slots];
    let mut avg = vec![0.0; slots];
    let mut labels = vec![0u8; n];
    let crosses = |labels: &[u8], (u, v): (usize, usize)| {
        let (a, b) = (labels[u], labels[v]);
        (a == 1 && b == 2) || (a == 2 && b == 1)
    };

    for _ in 0..plan.iterations {
        match config.queries {
            QuerySampler::UniformTernary => sample_query(n, &mut labels, rng),
        }
        let answer = cut_value_by_labels(light, &labels) + laplace_unchecked(plan.query_scale(), rng);
        let synthetic: f64 = x
            .iter()
            .zip(&ends)
            .filter(|(_, &e)| crosses(&labels, e))
            .map(|(w, _)| w)
            .sum();
        let factor = if synthetic > answer {
            (-plan.step_size).exp()
        } else if synthetic < answer {
            plan.step_size.exp()
        } else {
            1.0
        };
        if factor != 1.0 {
            let mut total = 0.0;
            for (w, &e) in x.iter_mut().zip(&ends) {
                if crosses(&labels, e) {
                    *w *= factor;
                }
                total += *w;
            }
            let scale = mass / total;
            x.iter_mut().for_each(|w| *w *= scale);
        }
        for (a, w) in avg.iter_mut().zip(&x) {
            *a += w;
        }
    }
    let t = plan.iterations as f64;
    for (i, a) in avg.into_iter().enumerate() {
        out.set_slot(EdgeId(i), a / t)?;
    }
    Ok((out, plan))
}
