//! Monte Carlo summaries: Bernoulli and sample-mean estimates, joint
//! two-site tables, an independence gap, a mean-field upper-bound check,
//! a radius-stability comparison, and the discordance-dip locator.
//!
//! Every estimate carries its replica count and a standard error so
//! downstream comparisons can express tolerances in sigma units instead of
//! hard-coded absolute numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::meanfield::{f_closed, MeanFieldParams};

/// A scalar Monte Carlo estimate.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// Frequency estimate of a Bernoulli probability from `successes`
    /// hits out of `n` trials; stderr is the binomial plug-in
    /// `sqrt(mean (1 - mean) / n)`.
    pub fn bernoulli(successes: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "an estimate needs at least one replica"));
        }
        if successes > n {
            return Err(Error::invalid("successes", "more successes than trials"));
        }
        let mean = successes as f64 / n as f64;
        let stderr = (mean * (1.0 - mean) / n as f64).sqrt();
        Ok(Estimate { mean, stderr, n })
    }

    /// Sample mean with stderr `s / sqrt(n)` where `s` is the unbiased
    /// sample standard deviation. A single sample yields stderr 0, so a
    /// smoke run with one replica still produces a well-formed record.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len() as u64;
        if n == 0 {
            return Err(Error::invalid("samples", "an estimate needs at least one replica"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "samples must be finite"));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n == 1 {
            0.0
        } else {
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            (var / n as f64).sqrt()
        };
        Ok(Estimate { mean, stderr, n })
    }
}

/// Marginal spin-1 frequency over binary observations.
pub fn estimate_marginal(obs: &[u8]) -> Result<Estimate> {
    if obs.iter().any(|&b| b > 1) {
        return Err(Error::invalid("obs", "observations must be 0 or 1"));
    }
    let successes = obs.iter().map(|&b| b as u64).sum();
    Estimate::bernoulli(successes, obs.len() as u64)
}

/// Empirical joint law of a pair of binary observables. `cells[a][b]` is
/// the frequency of outcome `(a, b)`. The raw counts are kept so that
/// marginals reconstruct the corresponding [`Estimate`] means exactly:
/// summing two rounded frequencies can differ from `(k1 + k2) / n` by an
/// ulp, a count sum cannot.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct JointEstimate {
    pub cells: [[f64; 2]; 2],
    counts: [[u64; 2]; 2],
    pub n: u64,
}

impl JointEstimate {
    pub fn from_counts(counts: [[u64; 2]; 2]) -> Result<Self> {
        let n: u64 = counts.iter().flatten().sum();
        if n == 0 {
            return Err(Error::invalid("counts", "an estimate needs at least one replica"));
        }
        let mut cells = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                cells[a][b] = counts[a][b] as f64 / n as f64;
            }
        }
        Ok(JointEstimate { cells, counts, n })
    }

    pub fn cell(&self, a: u8, b: u8) -> f64 {
        self.cells[a as usize][b as usize]
    }

    pub fn count(&self, a: u8, b: u8) -> u64 {
        self.counts[a as usize][b as usize]
    }

    /// Marginal P(first = 1), identical to the marginal estimate over the
    /// same observations.
    pub fn marginal_first(&self) -> f64 {
        (self.counts[1][0] + self.counts[1][1]) as f64 / self.n as f64
    }

    /// Marginal P(second = 1).
    pub fn marginal_second(&self) -> f64 {
        (self.counts[0][1] + self.counts[1][1]) as f64 / self.n as f64
    }

    /// The table with the two observables swapped.
    pub fn transposed(&self) -> JointEstimate {
        JointEstimate {
            cells: [
                [self.cells[0][0], self.cells[1][0]],
                [self.cells[0][1], self.cells[1][1]],
            ],
            counts: [
                [self.counts[0][0], self.counts[1][0]],
                [self.counts[0][1], self.counts[1][1]],
            ],
            n: self.n,
        }
    }
}

/// Tallies paired binary observations into a joint table.
pub fn estimate_joint(pairs: &[(u8, u8)]) -> Result<JointEstimate> {
    let mut counts = [[0u64; 2]; 2];
    for &(a, b) in pairs {
        if a > 1 || b > 1 {
            return Err(Error::invalid("pairs", "observations must be 0 or 1"));
        }
        counts[a as usize][b as usize] += 1;
    }
    JointEstimate::from_counts(counts)
}

/// `|P(1,0) - P(first=1) P(second=0)|`: zero iff the table factorizes.
/// The deviation from the product law has the same magnitude in every
/// cell of a 2x2 table, so one cell summarizes all four.
pub fn independence_gap(j: &JointEstimate) -> f64 {
    (j.cell(1, 0) - j.marginal_first() * (1.0 - j.marginal_second())).abs()
}

/// True iff `mean <= f_closed(t) + 3 stderr`: the one-sided mean-field
/// comparison with a three-sigma allowance.
pub fn upper_bound_check(e: &Estimate, t: f64, params: &MeanFieldParams) -> bool {
    e.mean <= f_closed(t, params) + 3.0 * e.stderr
}

/// A marginal estimate together with the experiment that produced it,
/// for cross-run comparisons.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub graph: GraphKind,
    pub lambda: f64,
    pub theta: f64,
    pub p: f64,
    pub t: f64,
    pub estimate: Estimate,
}

/// Compares root marginals on tree balls of radius `R` and `R + 1` with
/// everything else equal: true iff the means agree within three combined
/// standard errors. Mismatched descriptors are an input error, not a
/// finding.
pub fn radius_stability(a: &MarginalSummary, b: &MarginalSummary) -> Result<bool> {
    let (GraphKind::TreeBall { branching: na, radius: ra }, GraphKind::TreeBall { branching: nb, radius: rb }) =
        (a.graph, b.graph)
    else {
        return Err(Error::invalid("graph", "radius comparison needs tree balls"));
    };
    if na != nb {
        return Err(Error::invalid("graph", "branching numbers differ"));
    }
    if rb != ra + 1 {
        return Err(Error::invalid("graph", "radii must be R and R + 1"));
    }
    if a.lambda != b.lambda || a.theta != b.theta || a.p != b.p || a.t != b.t {
        return Err(Error::invalid(
            "params",
            "rates, density, and probe time must match",
        ));
    }
    let tol = 3.0 * (a.estimate.stderr.powi(2) + b.estimate.stderr.powi(2)).sqrt();
    Ok((a.estimate.mean - b.estimate.mean).abs() <= tol)
}

/// Finds the probe minimizing the discordant frequency `P(1, 0)` in a
/// time series of joint tables. Returns `(probe_t, value)`; ties resolve
/// to the earliest probe. Needs at least two probes to be a dip search.
pub fn discordance_dip(series: &[(f64, JointEstimate)]) -> Result<(f64, f64)> {
    if series.len() < 2 {
        return Err(Error::invalid("series", "a dip search needs at least two probes"));
    }
    let mut best = (series[0].0, series[0].1.cell(1, 0));
    for &(t, ref j) in &series[1..] {
        let v = j.cell(1, 0);
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}
