//! The density chain and the complete-graph spin dynamics describe the
//! same count process, and these tests check the identification at the
//! level of whole distributions, not just means.
//!
//! On the complete graph a vertex has `n - 1` neighbors while the chain
//! divides by `n`, so the laws line up in two ways: run the engine with
//! the degree-plus-one normalization at equal times, or run it with the
//! plain degree normalization and rescale time by `(n - 1) / n`. Both are
//! exact identities; a two-sample chi-square at the 1e-3 level compares
//! the ones-count histograms.

mod common;

use common::{chi_square_critical, two_sample_chi_square};
use spinlab_core::engine::{run_gillespie, sample_initial, ModelParams};
use spinlab_core::graph::Graph;
use spinlab_core::meanfield::{run_density_chain, MeanFieldParams};
use spinlab_core::rng::RngStream;

const N: u64 = 10;
const LAMBDA: f64 = 2.0;
const THETA: f64 = 1.0;
const P: f64 = 0.4;
const T: f64 = 1.0;
const REPLICAS: u64 = 100_000;

fn chain_histogram(base_seed: u64) -> Vec<u64> {
    let params = MeanFieldParams::new(LAMBDA, THETA, P).unwrap();
    let mut hist = vec![0u64; N as usize + 1];
    for r in 0..REPLICAS {
        let mut rng = RngStream::derive(base_seed, r, "density_chain");
        let path = run_density_chain(N, &params, T, &[T], &mut rng).unwrap();
        hist[path.probe_counts[0].1 as usize] += 1;
    }
    hist
}

fn engine_histogram(base_seed: u64, m: &ModelParams, t: f64) -> Vec<u64> {
    let g = Graph::complete(N as u32).unwrap();
    let mut hist = vec![0u64; N as usize + 1];
    for r in 0..REPLICAS {
        let mut init = RngStream::derive(base_seed, r, "initial");
        let c0 = sample_initial(&g, P, &mut init).unwrap();
        let snaps =
            run_gillespie(&g, m, &c0, t, RngStream::derive(base_seed, r, "gillespie"), &[t])
                .unwrap();
        hist[snaps[0].1.count_ones() as usize] += 1;
    }
    hist
}

fn assert_same_law(chain: &[u64], engine: &[u64], label: &str) {
    let (stat, dof) = two_sample_chi_square(chain, engine);
    let crit = chi_square_critical(dof, 1e-3);
    assert!(
        stat < crit,
        "{label}: chi-square {stat:.2} >= {crit:.2} at {dof} dof\nchain  {chain:?}\nengine {engine:?}"
    );
}

#[test]
fn degree_plus_one_normalization_matches_the_chain_at_equal_times() {
    let m = ModelParams::bias_voter(LAMBDA, THETA).unwrap().with_degree_plus_one();
    let chain = chain_histogram(800);
    let engine = engine_histogram(801, &m, T);
    assert_same_law(&chain, &engine, "degree-plus-one normalization");
}

#[test]
fn degree_normalization_matches_the_chain_under_time_rescaling() {
    // With the plain degree normalization every rate carries an extra
    // factor n / (n - 1), which is a deterministic speed-up: the engine at
    // time t (n - 1) / n has the law of the chain at time t.
    let m = ModelParams::bias_voter(LAMBDA, THETA).unwrap();
    let chain = chain_histogram(802);
    let engine = engine_histogram(803, &m, T * (N as f64 - 1.0) / N as f64);
    assert_same_law(&chain, &engine, "degree normalization, rescaled time");
}
