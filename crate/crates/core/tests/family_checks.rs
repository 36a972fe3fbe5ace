//! The family-wise formula against a Monte Carlo of whole families.
//!
//! Each experiment's per-experiment significance probability must be an
//! exactly achievable binomial tail (p-values are discrete), so the test
//! finds the achievable alpha nearest the nominal one and compares the
//! closed form against simulated families at that alpha.

mod common;

use rayon::prelude::*;
use replicheck_core::family::{family_probability, FamilyQuery};
use replicheck_core::numeric::{binomial_upper_tail, Probability};
use replicheck_core::simulate::{experiment_stream, sample_binomial_fast, SeedSpec};

#[test]
fn family_formula_matches_simulated_families() {
    let trials_per_experiment = 100u64;
    let experiments_per_family = 9u64;
    let nominal_alpha = 0.3;

    // smallest hit threshold whose exact upper tail is <= nominal alpha,
    // and the alpha actually achieved there
    let mut threshold = 0;
    for k in 0..=trials_per_experiment {
        if binomial_upper_tail(trials_per_experiment, k, Probability::HALF)
            .unwrap()
            .value()
            <= nominal_alpha
        {
            threshold = k;
            break;
        }
    }
    let achieved_alpha = binomial_upper_tail(trials_per_experiment, threshold, Probability::HALF)
        .unwrap()
        .value();
    assert!(achieved_alpha > 0.2 && achieved_alpha <= 0.3);

    let families = 20_000u64;
    let seed = SeedSpec::new(314);
    let significant_counts: Vec<u64> = (0..families)
        .into_par_iter()
        .map(|family| {
            (0..experiments_per_family)
                .filter(|j| {
                    let index = family * experiments_per_family + j;
                    let mut rng = experiment_stream(seed, index);
                    let hits =
                        sample_binomial_fast(trials_per_experiment, Probability::HALF, &mut rng);
                    hits >= threshold
                })
                .count() as u64
        })
        .collect();

    for at_least in [5u64, 6] {
        let hits = significant_counts.iter().filter(|&&c| c >= at_least).count();
        let mc = hits as f64 / families as f64;
        let query = FamilyQuery::new(
            experiments_per_family,
            at_least,
            Probability::new(achieved_alpha).unwrap(),
        )
        .unwrap();
        let closed_form = family_probability(&query).prob_at_least_k.value();
        let se = (closed_form * (1.0 - closed_form) / families as f64).sqrt();
        assert!(
            (mc - closed_form).abs() <= 3.0 * se,
            "k>={at_least}: mc {mc} vs formula {closed_form} (3se = {})",
            3.0 * se
        );
    }
}
