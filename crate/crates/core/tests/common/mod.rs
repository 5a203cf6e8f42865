//! Shared statistics helpers for the verification suites.

// Each suite pulls in a different subset of these helpers.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Critical value of the chi-square distribution with `dof` degrees of
/// freedom at the given significance level.
pub fn chi_square_critical(dof: f64, significance: f64) -> f64 {
    ChiSquared::new(dof)
        .expect("valid dof")
        .inverse_cdf(1.0 - significance)
}

/// One-sample chi-square statistic of observed counts against expected
/// probabilities; returns `(statistic, dof)`. Cells with zero expectation
/// must have zero observations.
pub fn chi_square_statistic(observed: &[u64], probabilities: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&obs, &p) in observed.iter().zip(probabilities) {
        let expected = p * total as f64;
        if expected == 0.0 {
            assert_eq!(obs, 0, "observation in a zero-probability cell");
            continue;
        }
        statistic += (obs as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    (statistic, cells as f64 - 1.0)
}

/// Two-sample chi-square for equal-size samples: `sum (a-b)^2 / (a+b)`
/// over cells with any mass; returns `(statistic, dof)`.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    assert_eq!(a.iter().sum::<u64>(), b.iter().sum::<u64>(), "equal totals required");
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        statistic += (x as f64 - y as f64).powi(2) / (x + y) as f64;
        cells += 1;
    }
    (statistic, cells as f64 - 1.0)
}
