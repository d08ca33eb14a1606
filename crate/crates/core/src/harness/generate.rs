//! Random input graphs.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{edge_id, slot_count, EdgeId, Graph};

/// Distribution of a single edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    Constant { value: f64 },
    /// Uniform on `[0, max]`.
    Uniform { max: f64 },
    /// `scale · Bernoulli(p) + Uniform[0, 1]`.
    Heavy { scale: f64, p: f64 },
}

impl Default for WeightLaw {
    fn default() -> Self {
        WeightLaw::Constant { value: 1.0 }
    }
}

impl WeightLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightLaw::Constant { value } => value >= 0.0 && value.is_finite(),
            WeightLaw::Uniform { max } => max >= 0.0 && max.is_finite(),
            WeightLaw::Heavy { scale, p } => scale >= 0.0 && scale.is_finite() && (0.0..=1.0).contains(&p),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid weight law {self:?}"))
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightLaw::Constant { value } => value,
            WeightLaw::Uniform { max } => rng.gen::<f64>() * max,
            WeightLaw::Heavy { scale, p } => {
                let heavy = if rng.gen_bool(p) { scale } else { 0.0 };
                heavy + rng.gen::<f64>()
            }
        }
    }
}

/// `m` distinct slots chosen uniformly, weights from `law`.
pub fn uniform_graph<R: Rng + ?Sized>(n: usize, m: usize, law: WeightLaw, rng: &mut R) -> Result<Graph> {
    law.validate()?;
    let slots = slot_count(n);
    if m > slots {
        return domain(format!("m = {m} exceeds the {slots} slots of n = {n}"));
    }
    let mut chosen = sample(rng, slots, m).into_vec();
    chosen.sort_unstable();
    let mut g = Graph::new(n);
    for i in chosen {
        g.set_slot(EdgeId(i), law.draw(rng))?;
    }
    Ok(g)
}

/// Random graph with every unweighted degree at most `max_degree`.
///
/// Proposes uniform pairs and rejects those that would exceed the cap or
/// repeat an edge, stopping at `⌊n·Δ/2⌋` edges or after `50·n·Δ` proposals.
pub fn degree_capped_graph<R: Rng + ?Sized>(
    n: usize,
    max_degree: usize,
    law: WeightLaw,
    rng: &mut R,
) -> Result<Graph> {
    law.validate()?;
    if n >= 2 && max_degree > n - 1 {
        return domain(format!("degree cap {max_degree} exceeds n − 1 = {}", n - 1));
    }
    let mut g = Graph::new(n);
    if n < 2 || max_degree == 0 {
        return Ok(g);
    }
    let target = n * max_degree / 2;
    let mut degree = vec![0usize; n];
    let mut edges = 0;
    for _ in 0..50 * n * max_degree {
        if edges == target {
            break;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || degree[u] == max_degree || degree[v] == max_degree {
            continue;
        }
        let e = edge_id(u, v, n)?;
        if g.contains_slot(e) {
            continue;
        }
        g.set_slot(e, law.draw(rng))?;
        degree[u] += 1;
        degree[v] += 1;
        edges += 1;
    }
    Ok(g)
}

/// Random spanning tree plus uniform extra edges, `m ≥ n − 1` in total; weights
/// from `law` shifted by `floor` so every edge is positive.
pub fn connected_graph<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    law: WeightLaw,
    floor: f64,
    rng: &mut R,
) -> Result<Graph> {
    law.validate()?;
    if n == 0 {
        return domain("connected graph needs a vertex");
    }
    if m + 1 < n || m > slot_count(n) {
        return domain(format!("m = {m} outside [{}, {}]", n - 1, slot_count(n)));
    }
    if !(floor > 0.0) {
        return domain("weight floor must be positive");
    }
    let mut g = Graph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.set_weight(u, v, floor + law.draw(rng))?;
    }
    let free: Vec<usize> = (0..g.slots()).filter(|&i| !g.contains_slot(EdgeId(i))).collect();
    let extra = m - (n - 1);
    for j in sample(rng, free.len(), extra).into_vec() {
        g.set_slot(EdgeId(free[j]), floor + law.draw(rng))?;
    }
    Ok(g)
}
