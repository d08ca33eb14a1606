//! Configured trial runs with JSON reports.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cut::cut_release_with_rng;
use crate::dp::BudgetLedger;
use crate::error::{Error, Result};
use crate::graph::{max_unweighted_degree, spectral_norm_diff, Graph};
use crate::harness::baseline::naive_laplace_release;
use crate::harness::generate::{connected_graph, degree_capped_graph, uniform_graph, WeightLaw};
use crate::harness::oracle::{brute_force_max_cut_error, MAX_BRUTE_FORCE_N};
use crate::harness::stats::{quantile_sorted, Summary};
use crate::mirror::{mirror_descent_synthesize, MirrorDescentConfig};
use crate::spectral::spectral_release_with_rng;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Uniform {
        n: usize,
        m: usize,
        #[serde(default)]
        weights: WeightLaw,
    },
    DegreeCapped {
        n: usize,
        max_degree: usize,
        #[serde(default)]
        weights: WeightLaw,
    },
    Connected {
        n: usize,
        m: usize,
        #[serde(default)]
        weights: WeightLaw,
        #[serde(default = "one")]
        floor: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl GeneratorSpec {
    pub fn n(&self) -> usize {
        match *self {
            GeneratorSpec::Uniform { n, .. }
            | GeneratorSpec::DegreeCapped { n, .. }
            | GeneratorSpec::Connected { n, .. } => n,
        }
    }

    pub fn generate<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match *self {
            GeneratorSpec::Uniform { n, m, weights } => uniform_graph(n, m, weights, rng),
            GeneratorSpec::DegreeCapped { n, max_degree, weights } => degree_capped_graph(n, max_degree, weights, rng),
            GeneratorSpec::Connected { n, m, weights, floor } => connected_graph(n, m, weights, floor, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MechanismSpec {
    Spectral {
        beta: f64,
    },
    Cut {
        #[serde(default)]
        beta: Option<f64>,
        #[serde(default)]
        mirror_descent: MirrorDescentConfig,
    },
    /// The synthesizer alone, run on the whole input.
    MirrorDescent {
        #[serde(default)]
        config: MirrorDescentConfig,
    },
    /// Laplace noise on every slot.
    NaiveLaplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `‖L_G − L_Ĝ‖₂` by power iteration.
    SpectralError,
    /// Brute-force `max |Φ_G − Φ_Ĝ|` over disjoint `(S, T)`.
    MaxCutError,
    /// `max_e |w_e − ŵ_e|` over slots stored in either graph.
    PerEdgeMaxError,
    ReleasedMaxDegree,
    MHat,
    ResidualMaxWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Min,
    Median,
    Max,
    Quantile(f64),
}

impl Statistic {
    pub fn of(&self, values: &[f64]) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        match *self {
            Statistic::Mean => v.iter().sum::<f64>() / v.len() as f64,
            Statistic::Min => quantile_sorted(&v, 0.0),
            Statistic::Median => quantile_sorted(&v, 0.5),
            Statistic::Max => quantile_sorted(&v, 1.0),
            Statistic::Quantile(q) => quantile_sorted(&v, q),
        }
    }
}

/// Bound on one statistic of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub metric: Metric,
    pub statistic: Statistic,
    #[serde(default)]
    pub at_least: Option<f64>,
    #[serde(default)]
    pub at_most: Option<f64>,
}

fn within(value: f64, at_least: Option<f64>, at_most: Option<f64>) -> bool {
    !value.is_nan() && at_least.is_none_or(|lo| value >= lo) && at_most.is_none_or(|hi| value <= hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub generator: GeneratorSpec,
    pub mechanism: MechanismSpec,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Use one input graph for every trial.
    #[serde(default)]
    pub fixed_graph: bool,
    /// Multiplies every generated weight.
    #[serde(default = "one")]
    pub weight_scale: f64,
    /// Empty means the mechanism's defaults.
    #[serde(default)]
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub thresholds: Vec<Threshold>,
    /// Wall-clock times make reports non-reproducible, so they are opt-in.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config(format!("{}: trials must be at least 1", self.name)));
        }
        if !(self.weight_scale >= 0.0) || !self.weight_scale.is_finite() {
            return Err(Error::Config(format!("{}: bad weight_scale", self.name)));
        }
        let needs_delta = matches!(self.mechanism, MechanismSpec::Cut { .. } | MechanismSpec::MirrorDescent { .. });
        if needs_delta && self.delta.is_none() {
            return Err(Error::Config(format!("{}: mechanism needs delta", self.name)));
        }
        for m in self.resolved_metrics() {
            let ok = match m {
                Metric::MaxCutError => self.generator.n() <= MAX_BRUTE_FORCE_N,
                Metric::MHat => matches!(self.mechanism, MechanismSpec::Spectral { .. } | MechanismSpec::Cut { .. }),
                Metric::ResidualMaxWeight => matches!(self.mechanism, MechanismSpec::Cut { .. }),
                _ => true,
            };
            if !ok {
                return Err(Error::Config(format!("{}: metric {m:?} not available here", self.name)));
            }
        }
        Ok(())
    }

    pub fn resolved_metrics(&self) -> Vec<Metric> {
        if !self.metrics.is_empty() {
            return self.metrics.clone();
        }
        let small = self.generator.n() <= MAX_BRUTE_FORCE_N;
        let mut m = match self.mechanism {
            MechanismSpec::Spectral { .. } => vec![
                Metric::SpectralError,
                Metric::PerEdgeMaxError,
                Metric::ReleasedMaxDegree,
                Metric::MHat,
            ],
            MechanismSpec::Cut { .. } => vec![Metric::SpectralError, Metric::ResidualMaxWeight, Metric::MHat],
            MechanismSpec::MirrorDescent { .. } | MechanismSpec::NaiveLaplace => vec![Metric::SpectralError],
        };
        if small && !matches!(self.mechanism, MechanismSpec::Spectral { .. }) {
            m.push(Metric::MaxCutError);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub input_max_degree: usize,
    pub metrics: BTreeMap<Metric, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    pub threshold: Threshold,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summaries: BTreeMap<Metric, Summary>,
    pub thresholds: Vec<ThresholdOutcome>,
    pub passed: bool,
}

impl ErrorReport {
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.metrics.get(&metric).copied()).collect()
    }
}

/// Stream purposes for [`derive_seed`].
pub const GRAPH_STREAM: u64 = 0;
pub const MECHANISM_STREAM: u64 = 1;
pub const METRIC_STREAM: u64 = 2;

/// Seed for `(trial, purpose)` drawn from the root seed's ChaCha stream.
pub fn derive_seed(root: u64, trial: u64, purpose: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(root);
    rng.set_stream(trial.wrapping_mul(4).wrapping_add(purpose));
    rng.next_u64()
}

fn run_trial(cfg: &ExperimentConfig, metrics: &[Metric], trial: usize) -> Result<TrialRecord> {
    let t = trial as u64;
    let graph_seed = derive_seed(cfg.seed, if cfg.fixed_graph { 0 } else { t }, GRAPH_STREAM);
    let mech_seed = derive_seed(cfg.seed, t, MECHANISM_STREAM);
    let mut graph_rng = ChaCha20Rng::seed_from_u64(graph_seed);
    let mut g = cfg.generator.generate(&mut graph_rng)?;
    if cfg.weight_scale != 1.0 {
        g = g.scaled(cfg.weight_scale);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(mech_seed);
    let started = Instant::now();
    let mut ledger = BudgetLedger::new();
    let mut extra: BTreeMap<Metric, f64> = BTreeMap::new();
    let released = match &cfg.mechanism {
        MechanismSpec::Spectral { beta } => {
            let r = spectral_release_with_rng(&g, cfg.epsilon, *beta, &mut rng)?;
            extra.insert(Metric::MHat, r.m_hat as f64);
            r.graph
        }
        MechanismSpec::Cut { beta, mirror_descent } => {
            let delta = cfg.delta.unwrap_or_default();
            let r = cut_release_with_rng(&g, cfg.epsilon, delta, *beta, mirror_descent, &mut rng)?;
            extra.insert(Metric::MHat, r.m_hat as f64);
            extra.insert(Metric::ResidualMaxWeight, r.residual_max_weight);
            r.graph
        }
        MechanismSpec::MirrorDescent { config } => {
            let delta = cfg.delta.unwrap_or_default();
            mirror_descent_synthesize(&g, cfg.epsilon, delta, config, &mut ledger, &mut rng)?.0
        }
        MechanismSpec::NaiveLaplace => naive_laplace_release(&g, cfg.epsilon, &mut ledger, &mut rng)?,
    };
    let runtime = started.elapsed().as_secs_f64();

    let mut metric_rng = ChaCha20Rng::seed_from_u64(derive_seed(cfg.seed, t, METRIC_STREAM));
    let mut values = BTreeMap::new();
    for &m in metrics {
        let v = match m {
            Metric::SpectralError => match spectral_norm_diff(&g, &released, &mut metric_rng) {
                Ok(v) => v,
                Err(Error::NotConverged { estimate, .. }) => estimate,
                Err(e) => return Err(e),
            },
            Metric::MaxCutError => brute_force_max_cut_error(&g, &released)?.0,
            Metric::PerEdgeMaxError => per_edge_max_error(&g, &released),
            Metric::ReleasedMaxDegree => max_unweighted_degree(&released) as f64,
            Metric::MHat | Metric::ResidualMaxWeight => *extra
                .get(&m)
                .ok_or_else(|| Error::Config(format!("metric {m:?} not produced by this mechanism")))?,
        };
        values.insert(m, v);
    }
    Ok(TrialRecord {
        trial,
        seed: mech_seed,
        n: g.n(),
        m: g.nnz(),
        input_max_degree: max_unweighted_degree(&g),
        metrics: values,
        runtime_secs: cfg.record_timing.then_some(runtime),
    })
}

/// `max_e |w_e − ŵ_e|` over slots stored in either graph.
pub fn per_edge_max_error(g: &Graph, h: &Graph) -> f64 {
    let a = g.iter().map(|(e, w)| (w - h.slot_weight(e)).abs());
    let b = h.iter().map(|(e, w)| (w - g.slot_weight(e)).abs());
    a.chain(b).fold(0.0, f64::max)
}

/// Runs every trial; `threads > 1` spreads trials over a worker pool without changing results.
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ErrorReport> {
    cfg.validate()?;
    let metrics = cfg.resolved_metrics();
    let trials: Vec<TrialRecord> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, &metrics, t))
                .collect::<Result<_>>()
        })?
    } else {
        (0..cfg.trials).map(|t| run_trial(cfg, &metrics, t)).collect::<Result<_>>()?
    };
    let mut report = ErrorReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        trials,
        summaries: BTreeMap::new(),
        thresholds: Vec::new(),
        passed: true,
    };
    for &m in &metrics {
        report.summaries.insert(m, Summary::of(&report.values(m)));
    }
    for th in &cfg.thresholds {
        let value = th.statistic.of(&report.values(th.metric));
        let passed = within(value, th.at_least, th.at_most);
        report.passed &= passed;
        report.thresholds.push(ThresholdOutcome {
            threshold: th.clone(),
            value,
            passed,
        });
    }
    Ok(report)
}

/// Ratio of one statistic between two experiments of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub numerator: String,
    pub denominator: String,
    pub metric: Metric,
    pub statistic: Statistic,
    #[serde(default)]
    pub at_least: Option<f64>,
    #[serde(default)]
    pub at_most: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSuite {
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
    #[serde(default, rename = "comparison")]
    pub comparisons: Vec<Comparison>,
}

impl EvalSuite {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub comparison: Comparison,
    pub numerator_value: f64,
    pub denominator_value: f64,
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub experiments: Vec<ErrorReport>,
    pub comparisons: Vec<ComparisonOutcome>,
    pub passed: bool,
}

pub fn run_suite(suite: &EvalSuite, threads: usize) -> Result<SuiteReport> {
    let mut experiments = Vec::with_capacity(suite.experiments.len());
    for cfg in &suite.experiments {
        experiments.push(run_experiment(cfg, threads)?);
    }
    let find = |name: &str| {
        experiments
            .iter()
            .find(|r: &&ErrorReport| r.config.name == name)
            .ok_or_else(|| Error::Config(format!("comparison names unknown experiment {name:?}")))
    };
    let mut comparisons = Vec::new();
    for c in &suite.comparisons {
        let num = c.statistic.of(&find(&c.numerator)?.values(c.metric));
        let den = c.statistic.of(&find(&c.denominator)?.values(c.metric));
        let ratio = num / den;
        comparisons.push(ComparisonOutcome {
            comparison: c.clone(),
            numerator_value: num,
            denominator_value: den,
            ratio,
            passed: within(ratio, c.at_least, c.at_most),
        });
    }
    let passed = experiments.iter().all(|r| r.passed) && comparisons.iter().all(|c| c.passed);
    Ok(SuiteReport {
        schema_version: REPORT_SCHEMA_VERSION,
        experiments,
        comparisons,
        passed,
    })
}
