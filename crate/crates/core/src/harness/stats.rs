//! Summary statistics and the sampler goodness-of-fit test.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::sampler::{enumerate_conditional, mask_of, BernoulliProfile, ConditionalSampler, MAX_ENUMERATION_COINS};

/// Largest profile accepted by [`sampler_distribution_test`].
pub const MAX_TEST_COINS: usize = 20;

/// Linear-interpolation quantile of already sorted data (`q ∈ [0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub p10: f64,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let mean = if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
        Summary {
            count: v.len(),
            mean,
            min: v.first().copied().unwrap_or(f64::NAN),
            p10: quantile_sorted(&v, 0.1),
            median: quantile_sorted(&v, 0.5),
            p90: quantile_sorted(&v, 0.9),
            max: v.last().copied().unwrap_or(f64::NAN),
        }
    }
}

/// Empirical fit of a sampler to the enumerated conditional law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionTest {
    pub tv_distance: f64,
    pub chi2: f64,
    pub dof: usize,
    pub chi2_pvalue: f64,
    /// Draws that landed outside the support.
    pub out_of_support: usize,
}

/// Runs the exact sampler `draws` times against the enumeration oracle.
pub fn sampler_distribution_test<R: Rng + ?Sized>(
    profile: &BernoulliProfile,
    k: usize,
    draws: usize,
    rng: &mut R,
) -> Result<DistributionTest> {
    check_size(profile)?;
    let sampler = ConditionalSampler::new(profile, k)?;
    distribution_test_with(profile, k, draws, || sampler.sample(rng))
}

fn check_size(profile: &BernoulliProfile) -> Result<()> {
    if profile.len() > MAX_TEST_COINS.min(MAX_ENUMERATION_COINS) {
        return Err(Error::Capacity(format!(
            "distribution test supports at most {MAX_TEST_COINS} coins, got {}",
            profile.len()
        )));
    }
    Ok(())
}

/// Same test for an arbitrary draw function, so alternative samplers can be checked.
///
/// χ² pools every configuration of the support; any draw outside the support
/// makes the statistic infinite and the p-value 0.
pub fn distribution_test_with<F>(profile: &BernoulliProfile, k: usize, draws: usize, mut draw: F) -> Result<DistributionTest>
where
    F: FnMut() -> Result<Vec<bool>>,
{
    check_size(profile)?;
    if draws == 0 {
        return crate::error::domain("distribution test needs at least one draw");
    }
    let expected = enumerate_conditional(profile, k)?;
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    let mut out_of_support = 0;
    for _ in 0..draws {
        let config = draw()?;
        let mask = mask_of(&config);
        if expected.contains_key(&mask) {
            *counts.entry(mask).or_default() += 1;
        } else {
            out_of_support += 1;
        }
    }
    let total = draws as f64;
    let mut tv = out_of_support as f64 / total;
    let mut chi2 = if out_of_support > 0 { f64::INFINITY } else { 0.0 };
    for (mask, &p) in &expected {
        let observed = counts.get(mask).copied().unwrap_or(0) as f64;
        tv += (observed / total - p).abs();
        let e = p * total;
        if e > 0.0 {
            chi2 += (observed - e).powi(2) / e;
        }
    }
    tv /= 2.0;
    let dof = expected.len().saturating_sub(1);
    let chi2_pvalue = if chi2.is_infinite() {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Invariant(e.to_string()))?;
        dist.sf(chi2)
    };
    Ok(DistributionTest {
        tv_distance: tv,
        chi2,
        dof,
        chi2_pvalue,
        out_of_support,
    })
}
