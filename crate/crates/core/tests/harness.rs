//! Experiment runner, configs and the sampler's statistical test.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use privgraph::harness::experiment::{run_experiment, run_suite, EvalSuite};
use privgraph::harness::stats::{distribution_test_with, sampler_distribution_test};
use privgraph::sampler::{build_table, conditional_marginal, BernoulliProfile};

fn suite(name: &str) -> EvalSuite {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    EvalSuite::from_toml(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectral_error_grows_with_degree() {
    let report = run_suite(&suite("degree_sweep.toml"), 1).unwrap();
    for c in &report.comparisons {
        assert!(c.passed, "{}: ratio {}", c.comparison.name, c.ratio);
    }
}

#[test]
fn cut_release_beats_naive_noise() {
    let report = run_suite(&suite("baseline_comparison.toml"), 1).unwrap();
    let c = &report.comparisons[0];
    assert!(c.numerator_value < c.denominator_value, "{} vs {}", c.numerator_value, c.denominator_value);
    assert!(report.passed);
}

#[test]
fn one_trial_report_is_byte_identical() {
    let mut cfg = suite("cut_utility.toml").experiments.remove(0);
    cfg.trials = 1;
    let a = serde_json::to_string_pretty(&run_experiment(&cfg, 1).unwrap()).unwrap();
    let b = serde_json::to_string_pretty(&run_experiment(&cfg, 1).unwrap()).unwrap();
    assert_eq!(a, b);
    cfg.seed += 1;
    let c = serde_json::to_string_pretty(&run_experiment(&cfg, 1).unwrap()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn shipped_configs_parse() {
    for name in ["spectral_scaling.toml", "cut_utility.toml", "cut_pilot.toml", "baseline_comparison.toml", "degree_sweep.toml"] {
        let s = suite(name);
        assert!(!s.experiments.is_empty(), "{name}");
        for e in &s.experiments {
            e.validate().unwrap_or_else(|err| panic!("{name}/{}: {err}", e.name));
        }
    }
}

#[test]
fn sampler_matches_enumeration_on_fifty_profiles() {
    let mut rng = ChaCha20Rng::seed_from_u64(50);
    for i in 0..50 {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(0..=n);
        let log_odds: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let profile = BernoulliProfile::from_log_odds(log_odds).unwrap();
        let t = sampler_distribution_test(&profile, k, 200_000, &mut rng).unwrap();
        assert!(t.tv_distance <= 0.02, "profile {i} (N = {n}, k = {k}): TV {}", t.tv_distance);
        assert_eq!(t.out_of_support, 0);
    }
}

#[test]
fn off_by_one_sampler_is_caught() {
    let profile = BernoulliProfile::from_probabilities(&[0.3, 0.6, 0.45, 0.2, 0.7, 0.5]).unwrap();
    let k = 3;
    let table = build_table(&profile, k).unwrap();
    let n = profile.len();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    // Looks up the marginal one count too low, then lets the last coin absorb the rest.
    let corrupted = || {
        let mut out = vec![false; n];
        let mut remaining = k;
        for (i, bit) in out.iter_mut().enumerate().take(n - 1) {
            let lookup = if remaining > 1 { remaining - 1 } else { remaining };
            let p = conditional_marginal(&profile, &table, i, lookup)?;
            if remaining > 0 && rng.gen::<f64>() < p {
                *bit = true;
                remaining -= 1;
            }
        }
        out[n - 1] = remaining > 0;
        Ok(out)
    };
    let t = distribution_test_with(&profile, k, 200_000, corrupted).unwrap();
    assert!(t.chi2_pvalue < 1e-6, "p = {}", t.chi2_pvalue);

    let honest = sampler_distribution_test(&profile, k, 200_000, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
    assert!(honest.tv_distance <= 0.02);
    assert!(honest.chi2_pvalue > 1e-6, "p = {}", honest.chi2_pvalue);
}
