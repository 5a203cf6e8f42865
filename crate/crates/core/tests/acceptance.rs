//! Acceptance criteria for the toolkit, one test per criterion, each
//! driven end to end through the checked-in configuration files.
//!
//! Every test prints one `criterion NN <label>: PASS/FAIL (<numbers>)`
//! line (visible under `cargo test --test acceptance -- --nocapture`) and
//! asserts the same condition. Records are cached across tests so shared
//! configurations run once; runtime budgets are checked against the wall
//! clock recorded inside each run, which caching cannot distort.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Mutex;

use spinlab_core::experiment::{
    emit_csv, run_experiment, ExperimentConfig, ObservableSeries, ProbeValue, ResultRecord,
};
use spinlab_core::meanfield::{f_closed, f_ode, MeanFieldParams};

/// Logistic density at t = 1 for lambda = 2, theta = 1, p = 0.3, frozen
/// from a high-precision evaluation of p e^t / (1 - p + p e^t). The
/// literal deliberately carries more digits than f64 resolves.
#[allow(clippy::excessive_precision)]
const DENSITY_REFERENCE_T1: f64 = 0.538_101_526_224_448_893_29;

/// exp(-0.6), the no-ring probability of the observed directed-clock pair
/// over one time unit on TreeBall(9, 4), frozen from a high-precision
/// evaluation.
#[allow(clippy::excessive_precision)]
const QUIET_REFERENCE: f64 = 0.548_811_636_094_026_432_63;

fn load(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}

/// Runs a config file, bypassing any cache.
fn fresh(name: &str) -> ResultRecord {
    let mut records = run_experiment(&load(name)).unwrap_or_else(|e| panic!("running {name}: {e}"));
    assert_eq!(records.len(), 1);
    records.remove(0)
}

/// Runs a config file once per process; later calls reuse the record.
fn cached(name: &str) -> ResultRecord {
    static REGISTRY: Mutex<Option<HashMap<String, ResultRecord>>> = Mutex::new(None);
    let mut guard = REGISTRY.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    if !map.contains_key(name) {
        let record = fresh(name);
        map.insert(name.to_string(), record);
    }
    map[name].clone()
}

fn series<'r>(rec: &'r ResultRecord, name: &str) -> &'r ObservableSeries {
    rec.observables
        .iter()
        .find(|o| o.observable == name)
        .unwrap_or_else(|| panic!("{}: no observable {name}", rec.experiment))
}

fn at(s: &ObservableSeries, t: f64) -> &ProbeValue {
    s.values
        .iter()
        .find(|v| v.probe_t == t)
        .unwrap_or_else(|| panic!("{}: no probe at t={t}", s.observable))
}

fn report(number: u32, label: &str, pass: bool, details: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {label}: {verdict} ({details})");
    assert!(pass, "criterion {number:02} {label}: {details}");
}

#[test]
fn criterion_01_complete_graph_density_matches_the_logistic_curve() {
    let rec = cached("meanfield_complete_n2000.json");
    let density = at(series(&rec, "density"), 1.0);
    let gap = (density.mean - DENSITY_REFERENCE_T1).abs();
    let pass = gap < 0.02 && rec.wall_clock_seconds < 60.0;
    report(
        1,
        "complete-graph density matches the logistic curve",
        pass,
        &format!(
            "|{:.5} - {DENSITY_REFERENCE_T1:.5}| = {gap:.5} vs 0.02, {:.1}s vs 60s",
            density.mean, rec.wall_clock_seconds
        ),
    );
}

#[test]
fn criterion_02_tree_root_marginal_stays_under_the_logistic_bound() {
    let params = MeanFieldParams::new(2.0, 1.0, 0.3).unwrap();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut flags_ok = true;
    let mut spent = 0.0;
    for name in ["tree_sweep_n2.json", "tree_sweep_n5.json", "tree_sweep_n10.json"] {
        let rec = cached(name);
        spent += rec.wall_clock_seconds;
        for v in &series(&rec, "root_marginal").values {
            let excess = v.mean - (f_closed(v.probe_t, &params) + 3.0 * v.stderr);
            worst_excess = worst_excess.max(excess);
        }
        for v in &series(&rec, "upper_bound_pass").values {
            flags_ok &= v.mean == 1.0;
        }
    }
    let pass = worst_excess <= 0.0 && flags_ok && spent < 300.0;
    report(
        2,
        "tree root marginal stays under the logistic bound",
        pass,
        &format!("worst excess over bound {worst_excess:.5}, {spent:.1}s vs 300s"),
    );
}

#[test]
fn criterion_03_mean_field_gap_shrinks_as_branching_grows() {
    let mut gaps = Vec::new();
    let mut spent = 0.0;
    for name in ["tree_sweep_n5.json", "tree_sweep_n20.json", "tree_sweep_n80.json"] {
        let rec = cached(name);
        spent += rec.wall_clock_seconds;
        let g = at(series(&rec, "mean_field_abs_gap"), 1.0);
        gaps.push((g.mean, g.stderr));
    }
    let far_to_near = gaps[2].0 < gaps[0].0;
    let mut successive = true;
    for w in gaps.windows(2) {
        let slack = 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt();
        successive &= w[1].0 < w[0].0 + slack;
    }
    let pass = far_to_near && successive && spent < 600.0;
    report(
        3,
        "mean-field gap shrinks as branching grows",
        pass,
        &format!(
            "gaps {:.5} -> {:.5} -> {:.5}, {spent:.1}s vs 600s",
            gaps[0].0, gaps[1].0, gaps[2].0
        ),
    );
}

#[test]
fn criterion_04_quiet_edge_frequency_matches_its_closed_form() {
    let rec = cached("quiet_edge.json");
    let freq = at(series(&rec, "quiet_frequency"), 1.0);
    let reference = at(series(&rec, "quiet_reference"), 1.0);
    assert!((reference.mean - QUIET_REFERENCE).abs() < 1e-12, "reference drifted");
    let gap = (freq.mean - QUIET_REFERENCE).abs();
    let pass = gap <= 3.0 * freq.stderr;
    report(
        4,
        "quiet-edge frequency matches its closed form",
        pass,
        &format!("|{:.5} - {QUIET_REFERENCE:.5}| = {gap:.5} vs 3se = {:.5}", freq.mean, 3.0 * freq.stderr),
    );
}

#[test]
fn criterion_05_voter_contact_coupling_maintains_domination() {
    // run_coupled aborts with an invariant-violation error at the first
    // breach, at event times and probe times alike, so a completed record
    // is itself the check; the recorded counter and the aggregate ordering
    // are re-read on top.
    let mut violations = 0.0;
    let mut ordered = true;
    for name in ["coupling_tree.json", "coupling_torus.json"] {
        let rec = cached(name);
        for v in &series(&rec, "domination_violations").values {
            violations += v.mean;
        }
        let eta = series(&rec, "eta_density");
        let zeta = series(&rec, "zeta_density");
        for (e, z) in eta.values.iter().zip(&zeta.values) {
            ordered &= e.mean >= z.mean;
        }
    }
    let pass = violations == 0.0 && ordered;
    report(
        5,
        "voter-contact coupling maintains domination",
        pass,
        &format!("violations {violations}, densities ordered: {ordered}"),
    );
}

#[test]
fn criterion_06_independent_engines_agree_on_the_root_marginal() {
    let rec = cached("engine_equivalence.json");
    let diff = at(series(&rec, "root_marginal_diff"), 1.0);
    let pass = diff.mean < 3.0 * diff.stderr;
    report(
        6,
        "independent engines agree on the root marginal",
        pass,
        &format!("|diff| = {:.5} vs 3se = {:.5}", diff.mean, 3.0 * diff.stderr),
    );
}

#[test]
fn criterion_07_unbiased_voter_density_is_conserved() {
    let rec = cached("martingale_classic.json");
    let mut worst = 0.0f64;
    let mut pass = true;
    for v in &series(&rec, "density").values {
        let gap = (v.mean - rec.p).abs();
        worst = worst.max(gap - 3.0 * v.stderr);
        pass &= gap <= 3.0 * v.stderr;
    }
    report(
        7,
        "unbiased voter density is conserved",
        pass,
        &format!("worst |mean - {}| minus 3se = {worst:.5}", rec.p),
    );
}

#[test]
fn criterion_08_biased_dynamics_drift_to_consensus() {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["delta1_tree.json", "delta1_torus.json"] {
        let rec = cached(name);
        let density = series(&rec, "density");
        let (early, late) = (at(density, 2.0), at(density, 20.0));
        let sigma = (early.stderr.powi(2) + late.stderr.powi(2)).sqrt();
        let grew = late.mean - early.mean > 3.0 * sigma;
        let high = late.mean > 0.9;
        // The dip reports the earliest minimizer, so "minimum attained at
        // the latest probe" means the final discordance equals the dip
        // value (both are frequencies of the same replica set, so exact
        // equality is the right comparison), and the dip must undercut the
        // first probe.
        let dip = &series(&rec, "discordance_dip").values[0];
        let discordance = series(&rec, "edge_discordance");
        let last_t = *rec.probes.last().unwrap();
        let dip_attained_last = at(discordance, last_t).mean == dip.mean;
        let dips_below_start = dip.mean < at(discordance, rec.probes[0]).mean;
        pass &= grew && high && dip_attained_last && dips_below_start;
        notes.push(format!(
            "{}: {:.3} -> {:.3}, dip {:.4} at t={} vs {:.4} at the end",
            rec.graph,
            early.mean,
            late.mean,
            dip.mean,
            dip.probe_t,
            at(discordance, last_t).mean
        ));
    }
    report(8, "biased dynamics drift to consensus", pass, &notes.join("; "));
}

#[test]
fn criterion_09_density_ode_integrates_to_the_closed_form() {
    let step = 1e-3;
    let mut worst = 0.0f64;
    for drift in [0.0, 0.5, 1.0, 3.0] {
        for p in [0.1, 0.5, 0.9] {
            let params = MeanFieldParams::new(1.0 + drift, 1.0, p).unwrap();
            for i in 0..=5000u32 {
                let t = f64::from(i) * step;
                let gap = (f_ode(t, &params, step).unwrap() - f_closed(t, &params)).abs();
                worst = worst.max(gap);
            }
        }
    }
    let pass = worst < 1e-8;
    report(
        9,
        "density ODE integrates to the closed form",
        pass,
        &format!("max |ode - closed| = {worst:.2e} vs 1e-8"),
    );
}

#[test]
fn criterion_10_identical_seeds_reproduce_identical_outputs() {
    // One config per backend: density chain, light-cone sampler, coupled
    // pair, and the two full-state engines side by side.
    let names = [
        "meanfield_complete_n2000.json",
        "tree_sweep_n2.json",
        "coupling_tree.json",
        "engine_equivalence.json",
        "martingale_classic.json",
    ];
    let mut pass = true;
    for name in names {
        let a = cached(name);
        let b = fresh(name);
        let identical = a.estimates_json() == b.estimates_json()
            && emit_csv(std::slice::from_ref(&a)).unwrap() == emit_csv(std::slice::from_ref(&b)).unwrap();
        pass &= identical;
    }
    report(
        10,
        "identical seeds reproduce identical outputs",
        pass,
        &format!("{} configs re-run byte-identically", names.len()),
    );
}
