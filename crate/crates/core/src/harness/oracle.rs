//! Exhaustive `(S, T)` cut search.

use crate::error::{domain, Error, Result};
use crate::graph::{CutQuery, Graph};

/// Largest `n` for the `3ⁿ` enumeration.
pub const MAX_BRUTE_FORCE_N: usize = 13;

/// `max_{S∩T=∅} |Φ_G(S,T) − Φ_H(S,T)|` with a maximizing query.
///
/// Assignments are visited as base-3 numbers with vertex 0 the most
/// significant digit (0 = neither, 1 = S, 2 = T); the first maximizer wins.
pub fn brute_force_max_cut_error(g: &Graph, h: &Graph) -> Result<(f64, CutQuery)> {
    let n = g.n();
    if h.n() != n {
        return domain(format!("vertex counts differ: {} vs {}", n, h.n()));
    }
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Capacity(format!(
            "brute-force cut search supports n ≤ {MAX_BRUTE_FORCE_N}, got {n}"
        )));
    }
    let mut diff = vec![vec![0.0; n]; n];
    for (u, v, w) in g.edges() {
        diff[u][v] += w;
    }
    for (u, v, w) in h.edges() {
        diff[u][v] -= w;
    }
    let edges: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| (u, v, diff[u][v]))
        .filter(|&(_, _, w)| w != 0.0)
        .collect();

    let mut side = vec![0u8; n];
    let mut best = (0.0f64, side.clone());
    loop {
        let value: f64 = edges
            .iter()
            .filter(|&&(u, v, _)| side[u] | side[v] == 3)
            .map(|&(_, _, w)| w)
            .sum();
        if value.abs() > best.0 {
            best = (value.abs(), side.clone());
        }
        // Increment with vertex n−1 as the least significant digit.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok((best.0, CutQuery::from_labels(&best.1)));
            }
            i -= 1;
            if side[i] < 2 {
                side[i] += 1;
                break;
            }
            side[i] = 0;
        }
    }
}
