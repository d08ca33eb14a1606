//! Exact rational-arithmetic mode for small profiles.
//!
//! Every floating-point probability is an exact dyadic rational, so the tail
//! table, the sampler's path probabilities, and the brute-force conditional
//! can be compared with no rounding at all.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Largest N accepted by the exact routines.
pub const MAX_EXACT_COINS: usize = 16;

/// Probabilities converted exactly from `f64`.
pub fn exact_probabilities(p: &[f64]) -> Result<Vec<BigRational>> {
    p.iter()
        .enumerate()
        .map(|(i, &x)| {
            if !(0.0..1.0).contains(&x) {
                return domain(format!("p[{i}] = {x} outside [0, 1)"));
            }
            BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("p[{i}] not finite")))
        })
        .collect()
}

fn check(p: &[BigRational], k: usize) -> Result<()> {
    if p.is_empty() || p.len() > MAX_EXACT_COINS {
        return Err(Error::Capacity(format!(
            "exact mode supports 1..={MAX_EXACT_COINS} coins, got {}",
            p.len()
        )));
    }
    if k > p.len() {
        return domain(format!("k = {k} exceeds the number of coins {}", p.len()));
    }
    Ok(())
}

/// Exact tail table: `table[i][q] = Pr⊗[nnz(X_i..X_{N-1}) = q]`, `i ∈ 0..=N`, `q ∈ 0..=k`.
pub fn exact_table(p: &[BigRational], k: usize) -> Result<Vec<Vec<BigRational>>> {
    check(p, k)?;
    let n = p.len();
    let mut rows = vec![vec![BigRational::zero(); k + 1]; n + 1];
    rows[n][0] = BigRational::one();
    for i in (0..n).rev() {
        let not_p = BigRational::one() - &p[i];
        for q in 0..=k.min(n - i) {
            let mut v = &not_p * &rows[i + 1][q];
            if q > 0 {
                v += &p[i] * &rows[i + 1][q - 1];
            }
            rows[i][q] = v;
        }
    }
    Ok(rows)
}

/// Exact probability that the sequential sampler emits `config`.
pub fn exact_path_probability(p: &[BigRational], k: usize, config: &[bool]) -> Result<BigRational> {
    let table = exact_table(p, k)?;
    if config.len() != p.len() {
        return domain("configuration length does not match the profile");
    }
    let n = p.len();
    let mut remaining = k;
    let mut prob = BigRational::one();
    for i in 0..n - 1 {
        if prob.is_zero() {
            return Ok(prob);
        }
        let next = &table[i + 1];
        let take = if remaining == 0 {
            BigRational::zero()
        } else {
            &p[i] * &next[remaining - 1]
        };
        let skip = (BigRational::one() - &p[i]) * &next[remaining];
        let denom = &take + &skip;
        if denom.is_zero() {
            return Err(Error::Invariant(format!("zero denominator at coin {i}")));
        }
        if config[i] {
            if remaining == 0 {
                return Ok(BigRational::zero());
            }
            prob *= take / denom;
            remaining -= 1;
        } else {
            prob *= skip / denom;
        }
    }
    let last = config[n - 1] as usize;
    Ok(if remaining == last { prob } else { BigRational::zero() })
}

/// Exact `Pr⊗[X = x | nnz(X) = k]` by summing the product measure over all `x` with `k` ones.
pub fn exact_enumeration(p: &[BigRational], k: usize) -> Result<BTreeMap<u64, BigRational>> {
    check(p, k)?;
    let n = p.len();
    let mut mass = BTreeMap::new();
    let mut total = BigRational::zero();
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut w = BigRational::one();
        for (i, pi) in p.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w *= pi;
            } else {
                w *= BigRational::one() - pi;
            }
        }
        if !w.is_zero() {
            total += &w;
            mass.insert(mask, w);
        }
    }
    if total.is_zero() {
        return domain(format!("no configuration with {k} ones has positive probability"));
    }
    Ok(mass.into_iter().map(|(m, w)| (m, w / &total)).collect())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `1/2` as an exact rational; handy for symmetric test profiles.
pub fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}
