//! Brute-force conditional distribution over all `2^N` configurations.

use std::collections::BTreeMap;

use super::{log_add, BernoulliProfile};
use crate::error::{domain, Error, Result};

/// Largest N accepted by [`enumerate_conditional`].
pub const MAX_ENUMERATION_COINS: usize = 22;

/// Bitmask with bit `i` set when coin `i` is one.
pub fn mask_of(config: &[bool]) -> u64 {
    config
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0u64, |m, (i, _)| m | 1 << i)
}

/// `Pr⊗[X = x | nnz(X) = k]` for every `x` with `k` ones, keyed by [`mask_of`].
///
/// Configurations of zero product mass are omitted.
pub fn enumerate_conditional(profile: &BernoulliProfile, k: usize) -> Result<BTreeMap<u64, f64>> {
    let n = profile.len();
    if n > MAX_ENUMERATION_COINS {
        return Err(Error::Capacity(format!(
            "enumeration over {n} coins exceeds {MAX_ENUMERATION_COINS}"
        )));
    }
    if k > n {
        return domain(format!("k = {k} exceeds the number of coins {n}"));
    }
    let mut log_mass = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let lw: f64 = (0..n)
            .map(|i| {
                let (lp, lq) = profile.log_pair(i);
                if mask >> i & 1 == 1 {
                    lp
                } else {
                    lq
                }
            })
            .sum();
        if lw > f64::NEG_INFINITY {
            log_mass.push((mask, lw));
        }
    }
    let total = log_mass.iter().fold(f64::NEG_INFINITY, |acc, &(_, lw)| log_add(acc, lw));
    if total == f64::NEG_INFINITY {
        return domain(format!("no configuration with {k} ones has positive probability"));
    }
    Ok(log_mass.into_iter().map(|(m, lw)| (m, (lw - total).exp())).collect())
}
