//! Exact sampling of independent coins conditioned on the number of heads.
//!
//! Given success probabilities `p_0, ..., p_{N-1}` and a target count `k`, the
//! sampler draws `x ∈ {0,1}^N` with probability `Pr⊗[X = x | nnz(X) = k]`.
//! It walks the coins in index order; coin `i` is set with its marginal
//! conditioned on the coins already fixed, which needs the tail-count
//! probabilities `Pr⊗[nnz(X_i..X_{N-1}) = q]` for the suffix after `i`.
//!
//! Those tail probabilities live in a [`ConditionalTable`] and are kept in
//! log-space: topology sampling feeds probabilities `e^{εw}/(1+e^{εw})` whose
//! complements underflow for heavy edges.

mod enumerate;
pub mod rational;

use rand::Rng;

use crate::error::{domain, Error, Result};

pub use enumerate::{enumerate_conditional, mask_of, MAX_ENUMERATION_COINS};

/// Upper bound on materialized table entries.
pub const MAX_TABLE_ENTRIES: usize = 2_000_000_000;

/// Tables up to this many entries are materialized in full by [`ConditionalSampler`];
/// larger ones keep every `⌈√N⌉`-th row and recompute the rest block by block.
pub const FULL_TABLE_ENTRIES: usize = 1 << 24;

/// `ln(e^a + e^b)`.
#[inline]
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + (-(a - b).abs()).exp().ln_1p()
}

/// `ln σ(x) = −ln(1 + e^{−x})`.
#[inline]
fn log_sigmoid(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    -((-x).max(0.0) + (-x.abs()).exp().ln_1p())
}

/// Success probabilities of N independent coins, held as log-odds.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliProfile {
    log_odds: Vec<f64>,
    log_p: Vec<f64>,
    log_q: Vec<f64>,
}

impl BernoulliProfile {
    /// Each `p_i` must lie in `[0, 1)`.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let mut log_odds = Vec::with_capacity(p.len());
        for (i, &pi) in p.iter().enumerate() {
            if !(0.0..1.0).contains(&pi) {
                return domain(format!("p[{i}] = {pi} outside [0, 1)"));
            }
            log_odds.push(if pi == 0.0 { f64::NEG_INFINITY } else { pi.ln() - (-pi).ln_1p() });
        }
        Self::from_log_odds(log_odds)
    }

    /// Log-odds `ln(p/(1−p))`; `−∞` encodes `p = 0`, `+∞` (`p = 1`) is rejected.
    pub fn from_log_odds(log_odds: Vec<f64>) -> Result<Self> {
        if log_odds.is_empty() {
            return domain("profile needs at least one coin");
        }
        for (i, &x) in log_odds.iter().enumerate() {
            if x.is_nan() || x == f64::INFINITY {
                return domain(format!("log-odds[{i}] = {x} is not a probability below 1"));
            }
        }
        let log_p = log_odds.iter().map(|&x| log_sigmoid(x)).collect();
        let log_q = log_odds.iter().map(|&x| log_sigmoid(-x)).collect();
        Ok(BernoulliProfile {
            log_odds,
            log_p,
            log_q,
        })
    }

    pub fn len(&self) -> usize {
        self.log_odds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_odds.is_empty()
    }

    pub fn log_odds(&self) -> &[f64] {
        &self.log_odds
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.log_p[i].exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_p.iter().map(|x| x.exp()).collect()
    }

    /// `(ln p_i, ln(1 − p_i))`.
    pub fn log_pair(&self, i: usize) -> (f64, f64) {
        (self.log_p[i], self.log_q[i])
    }
}

/// One backward step: row `i` from row `i + 1`, for `q ≤ q_max`; entries above are `−∞`.
#[inline]
fn fill_row(next: &[f64], log_p: f64, log_q: f64, q_max: usize, out: &mut [f64]) {
    out[0] = log_q + next[0];
    for q in 1..=q_max {
        out[q] = log_add(log_p + next[q - 1], log_q + next[q]);
    }
    for x in &mut out[q_max + 1..] {
        *x = f64::NEG_INFINITY;
    }
}

fn base_row(width: usize) -> Vec<f64> {
    let mut row = vec![f64::NEG_INFINITY; width];
    row[0] = 0.0;
    row
}

fn check_count(profile: &BernoulliProfile, k: usize) -> Result<()> {
    if k > profile.len() {
        return domain(format!("k = {k} exceeds the number of coins {}", profile.len()));
    }
    Ok(())
}

/// Log tail-count probabilities `ln Pr⊗[nnz(X_i..X_{N-1}) = q]` for `i ∈ 0..=N`, `q ∈ 0..=k`.
///
/// Row `N` is the empty suffix (`q = 0` with probability one).
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    coins: usize,
    k: usize,
    rows: Vec<f64>,
}

impl ConditionalTable {
    pub fn coins(&self) -> usize {
        self.coins
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `ln Pr⊗[nnz(X_i..X_{N-1}) = q]`; `−∞` outside the table.
    pub fn log_tail(&self, i: usize, q: usize) -> f64 {
        if i > self.coins || q > self.k {
            return f64::NEG_INFINITY;
        }
        self.rows[i * (self.k + 1) + q]
    }

    pub fn tail(&self, i: usize, q: usize) -> f64 {
        self.log_tail(i, q).exp()
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.k + 1;
        &self.rows[i * w..(i + 1) * w]
    }
}

/// Fills the tail-count table backwards from the empty suffix in `O(N·k)`.
pub fn build_table(profile: &BernoulliProfile, k: usize) -> Result<ConditionalTable> {
    check_count(profile, k)?;
    let n = profile.len();
    let width = k + 1;
    let entries = (n + 1).saturating_mul(width);
    if entries > MAX_TABLE_ENTRIES {
        return Err(Error::Capacity(format!(
            "conditional table with {entries} entries exceeds {MAX_TABLE_ENTRIES}; \
             use a smaller k or the blocked sampler"
        )));
    }
    let mut rows = vec![f64::NEG_INFINITY; entries];
    rows[n * width] = 0.0;
    for i in (0..n).rev() {
        let (head, tail) = rows.split_at_mut((i + 1) * width);
        let (lp, lq) = profile.log_pair(i);
        fill_row(&tail[..width], lp, lq, k.min(n - i), &mut head[i * width..]);
    }
    Ok(ConditionalTable { coins: n, k, rows })
}

/// `ln Pr⊗[X_i = 1 | nnz(X_i..X_{N-1}) = remaining]` from the row after `i`.
fn log_marginal(next: &[f64], log_p: f64, log_q: f64, remaining: usize) -> Result<f64> {
    let take = if remaining == 0 {
        f64::NEG_INFINITY
    } else {
        log_p + next[remaining - 1]
    };
    let skip = log_q + next.get(remaining).copied().unwrap_or(f64::NEG_INFINITY);
    let denom = log_add(take, skip);
    if denom == f64::NEG_INFINITY || denom.is_nan() {
        return Err(Error::Invariant(format!(
            "conditional marginal has zero denominator at remaining = {remaining}"
        )));
    }
    Ok(take - denom)
}

/// `Pr⊗[X_i = 1 | nnz(X_i..X_{N-1}) = remaining]` for 0-based coin `i`.
pub fn conditional_marginal(
    profile: &BernoulliProfile,
    table: &ConditionalTable,
    i: usize,
    remaining: usize,
) -> Result<f64> {
    if i >= table.coins() || profile.len() != table.coins() {
        return domain(format!("coin {i} out of range for a table over {} coins", table.coins()));
    }
    if remaining > table.k() {
        return domain(format!("remaining = {remaining} exceeds table width k = {}", table.k()));
    }
    let (lp, lq) = profile.log_pair(i);
    Ok(log_marginal(table.row(i + 1), lp, lq, remaining)?.exp())
}

enum Storage {
    Full(ConditionalTable),
    /// Rows at multiples of `block`, plus the empty-suffix row.
    Blocked {
        block: usize,
        checkpoints: Vec<Vec<f64>>,
    },
}

/// Reusable sampler for a fixed profile and count.
///
/// The table is built once; each draw is a single forward pass. Tables larger
/// than [`FULL_TABLE_ENTRIES`] are kept as checkpoints, which trades a second
/// `O(N·k)` pass per draw for `O(√N·k)` memory.
pub struct ConditionalSampler<'a> {
    profile: &'a BernoulliProfile,
    k: usize,
    storage: Storage,
}

impl<'a> ConditionalSampler<'a> {
    pub fn new(profile: &'a BernoulliProfile, k: usize) -> Result<Self> {
        let n = profile.len();
        let entries = (n + 1).saturating_mul(k + 1);
        if entries <= FULL_TABLE_ENTRIES {
            return Ok(ConditionalSampler {
                profile,
                k,
                storage: Storage::Full(build_table(profile, k)?),
            });
        }
        let block = ((n + 1) as f64).sqrt().ceil() as usize;
        Self::blocked(profile, k, block)
    }

    /// Forces checkpointed storage with the given block length.
    pub fn blocked(profile: &'a BernoulliProfile, k: usize, block: usize) -> Result<Self> {
        check_count(profile, k)?;
        if block == 0 {
            return domain("block length must be positive");
        }
        let n = profile.len();
        let width = k + 1;
        let slots = n / block + 1;
        if slots.saturating_mul(width) > MAX_TABLE_ENTRIES {
            return Err(Error::Capacity(format!("{slots} checkpoints of width {width} exceed the table limit")));
        }
        let mut checkpoints = vec![Vec::new(); slots];
        let mut current = base_row(width);
        let mut scratch = vec![f64::NEG_INFINITY; width];
        if n % block == 0 {
            checkpoints[n / block] = current.clone();
        }
        for i in (0..n).rev() {
            let (lp, lq) = profile.log_pair(i);
            fill_row(&current, lp, lq, k.min(n - i), &mut scratch);
            std::mem::swap(&mut current, &mut scratch);
            if i % block == 0 {
                checkpoints[i / block] = current.clone();
            }
        }
        Ok(ConditionalSampler {
            profile,
            k,
            storage: Storage::Blocked { block, checkpoints },
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Draws one configuration with exactly `k` ones.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<bool>> {
        let n = self.profile.len();
        let mut out = vec![false; n];
        let mut remaining = self.k;
        let mut decide = |i: usize, next: &[f64], remaining: &mut usize| -> Result<()> {
            let (lp, lq) = self.profile.log_pair(i);
            let p = log_marginal(next, lp, lq, *remaining)?.exp();
            if rng.gen::<f64>() < p {
                out[i] = true;
                *remaining -= 1;
            }
            Ok(())
        };
        match &self.storage {
            Storage::Full(table) => {
                for i in 0..n - 1 {
                    decide(i, table.row(i + 1), &mut remaining)?;
                }
            }
            Storage::Blocked { block, checkpoints } => {
                let width = self.k + 1;
                let mut buf = vec![f64::NEG_INFINITY; block * width];
                let mut start = 0;
                while start < n - 1 {
                    let end = (start + block).min(n);
                    // Rows start+1 ..= end; slot r holds row start + 1 + r.
                    let rows = end - start;
                    let anchor = if end == n { base_row(width) } else { checkpoints[end / block].clone() };
                    buf[(rows - 1) * width..rows * width].copy_from_slice(&anchor);
                    for r in (0..rows - 1).rev() {
                        let i = start + 1 + r;
                        let (lp, lq) = self.profile.log_pair(i);
                        let (head, tail) = buf.split_at_mut((r + 1) * width);
                        fill_row(&tail[..width], lp, lq, self.k.min(n - i), &mut head[r * width..]);
                    }
                    for i in start..end.min(n - 1) {
                        let r = i - start;
                        decide(i, &buf[r * width..(r + 1) * width], &mut remaining)?;
                    }
                    start = end;
                }
            }
        }
        match remaining {
            0 => {}
            1 => out[n - 1] = true,
            r => {
                return Err(Error::Invariant(format!(
                    "{r} successes left for the last coin"
                )))
            }
        }
        Ok(out)
    }

    /// Probability the sampler assigns to `config` (product of the marginals along its path).
    pub fn path_probability(&self, config: &[bool]) -> Result<f64> {
        let table = match &self.storage {
            Storage::Full(t) => t.clone(),
            Storage::Blocked { .. } => build_table(self.profile, self.k)?,
        };
        path_probability(self.profile, &table, config)
    }
}

/// Probability that the forward pass over `table` emits `config`.
pub fn path_probability(profile: &BernoulliProfile, table: &ConditionalTable, config: &[bool]) -> Result<f64> {
    let n = profile.len();
    if config.len() != n {
        return domain(format!("configuration length {} != {n}", config.len()));
    }
    let mut remaining = table.k();
    let mut log_prob = 0.0;
    for (i, &bit) in config.iter().enumerate().take(n - 1) {
        if log_prob == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let (lp, lq) = profile.log_pair(i);
        let lm = log_marginal(table.row(i + 1), lp, lq, remaining)?;
        if bit {
            if remaining == 0 {
                return Ok(0.0);
            }
            log_prob += lm;
            remaining -= 1;
        } else {
            log_prob += (-lm.exp()).ln_1p();
        }
    }
    let last = config[n - 1] as usize;
    Ok(if remaining == last { log_prob.exp() } else { 0.0 })
}

/// Draws one configuration from `Pr⊗[X = x | nnz(X) = k]`.
pub fn sample_conditional<R: Rng + ?Sized>(
    profile: &BernoulliProfile,
    k: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    ConditionalSampler::new(profile, k)?.sample(rng)
}
