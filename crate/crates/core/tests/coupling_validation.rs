//! The coupled sampler must be a genuine coupling: each component, viewed
//! on its own, has exactly the law of the corresponding standalone
//! process. These tests compare whole ones-count distributions between the
//! coupled components and independently seeded standalone engines, then
//! spot-check the ordering invariant at integration scale.

mod common;

use common::{chi_square_critical, two_sample_chi_square};
use spinlab_core::coupling::{check_domination, run_coupled};
use spinlab_core::engine::{run_gillespie, sample_initial, Configuration, ModelParams};
use spinlab_core::graph::Graph;
use spinlab_core::rng::RngStream;

const LAMBDA: f64 = 2.0;
const P: f64 = 0.5;
const T: f64 = 1.0;
const REPLICAS: u64 = 100_000;

/// Ones-count histograms of both coupled components at time T.
fn coupled_histograms(g: &Graph, base_seed: u64) -> (Vec<u64>, Vec<u64>) {
    let n = g.vertex_count();
    let (mut eta, mut zeta) = (vec![0u64; n + 1], vec![0u64; n + 1]);
    for r in 0..REPLICAS {
        let mut init = RngStream::derive(base_seed, r, "initial");
        let c0 = sample_initial(g, P, &mut init).unwrap();
        let snaps =
            run_coupled(g, LAMBDA, &c0, T, RngStream::derive(base_seed, r, "coupled"), &[T])
                .unwrap();
        eta[snaps[0].1.eta.count_ones() as usize] += 1;
        zeta[snaps[0].1.zeta.count_ones() as usize] += 1;
    }
    (eta, zeta)
}

fn standalone_histogram(g: &Graph, m: &ModelParams, base_seed: u64) -> Vec<u64> {
    let mut hist = vec![0u64; g.vertex_count() + 1];
    for r in 0..REPLICAS {
        let mut init = RngStream::derive(base_seed, r, "initial");
        let c0 = sample_initial(g, P, &mut init).unwrap();
        let snaps =
            run_gillespie(g, m, &c0, T, RngStream::derive(base_seed, r, "gillespie"), &[T])
                .unwrap();
        hist[snaps[0].1.count_ones() as usize] += 1;
    }
    hist
}

fn assert_same_law(a: &[u64], b: &[u64], label: &str) {
    let (stat, dof) = two_sample_chi_square(a, b);
    let crit = chi_square_critical(dof, 1e-3);
    assert!(
        stat < crit,
        "{label}: chi-square {stat:.2} >= {crit:.2} at {dof} dof\ncoupled    {a:?}\nstandalone {b:?}"
    );
}

#[test]
fn first_component_has_the_standalone_voter_law() {
    let g = Graph::complete(10).unwrap();
    let (eta, _) = coupled_histograms(&g, 820);
    let m = ModelParams::bias_voter(LAMBDA, 1.0).unwrap();
    let voter = standalone_histogram(&g, &m, 821);
    assert_same_law(&eta, &voter, "voter component");
}

#[test]
fn second_component_has_the_standalone_contact_law() {
    let g = Graph::complete(10).unwrap();
    let (_, zeta) = coupled_histograms(&g, 822);
    let m = ModelParams::contact(LAMBDA).unwrap();
    let contact = standalone_histogram(&g, &m, 823);
    assert_same_law(&zeta, &contact, "contact component");
}

#[test]
fn domination_holds_pointwise_on_a_torus_at_integration_scale() {
    let g = Graph::torus(2, 6).unwrap();
    for r in 0..2_000u64 {
        let mut init = RngStream::derive(824, r, "initial");
        let c0 = sample_initial(&g, P, &mut init).unwrap();
        let snaps =
            run_coupled(&g, 1.5, &c0, 4.0, RngStream::derive(824, r, "coupled"), &[1.0, 4.0])
                .unwrap();
        for (t, s) in &snaps {
            assert!(check_domination(s).unwrap(), "replica {r} at t={t}");
            assert!(s.eta.count_ones() >= s.zeta.count_ones());
        }
    }
}

#[test]
fn components_start_identical_and_separate_over_time() {
    // At t = 0 the coupling shares one configuration; by a later probe the
    // voter component should strictly exceed the contact component in
    // aggregate, since the voter never detaches faster and attaches from
    // the same seeds.
    let g = Graph::complete(30).unwrap();
    let c0 = Configuration::new(g.kind(), (0..30).map(|i| u8::from(i < 15)).collect()).unwrap();
    let (mut eta_total, mut zeta_total) = (0u64, 0u64);
    for r in 0..5_000u64 {
        let snaps =
            run_coupled(&g, 3.0, &c0, 2.0, RngStream::derive(825, r, "coupled"), &[0.0, 2.0])
                .unwrap();
        assert_eq!(snaps[0].1.eta, snaps[0].1.zeta, "shared start");
        eta_total += snaps[1].1.eta.count_ones();
        zeta_total += snaps[1].1.zeta.count_ones();
    }
    assert!(
        eta_total > zeta_total,
        "voter component should outgrow the contact component: {eta_total} vs {zeta_total}"
    );
}
