//! Replica fan-out and aggregation.
//!
//! Each replica derives its own random streams from `(base seed, replica
//! index, purpose)`, so results are identical for any execution
//! interleaving; workers share nothing and aggregation walks replicas in
//! index order over plain counts and sample vectors.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::run_coupled;
use crate::engine::{
    edge_quiet, lightcone, run_gillespie, run_graphical, sample_initial, ModelParams,
};
use crate::error::{Error, Result};
use crate::estimator::{
    discordance_dip, estimate_joint, independence_gap, upper_bound_check, Estimate, JointEstimate,
};
use crate::graph::{Graph, GraphKind};
use crate::meanfield::{f_closed, run_density_chain};
use crate::rng::RngStream;

use super::config::{ExperimentConfig, ExperimentKind};

/// One estimated value at one probe time.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ProbeValue {
    pub probe_t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// One named observable across the probe times.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub observable: String,
    pub values: Vec<ProbeValue>,
}

/// Aggregated output of one experiment run. The parameter echo plus the
/// seed suffice to reproduce the estimates bit for bit; only
/// `wall_clock_seconds` varies between reruns.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: ExperimentKind,
    pub graph: GraphKind,
    pub model: super::config::ModelSpec,
    pub p: f64,
    pub probes: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    pub observables: Vec<ObservableSeries>,
    pub wall_clock_seconds: f64,
}

impl ResultRecord {
    /// JSON of everything except the wall clock (zeroed), for determinism
    /// comparisons.
    pub fn estimates_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_clock_seconds = 0.0;
        serde_json::to_string(&copy).expect("record serializes")
    }
}

/// Runs a validated experiment on the default thread pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    run_experiment_with_jobs(cfg, None)
}

/// Runs with an explicit worker count. The count never affects results,
/// only scheduling.
pub fn run_experiment_with_jobs(
    cfg: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let record = match jobs {
        None => run_validated(cfg)?,
        Some(0) => return Err(Error::invalid("jobs", "at least one worker is required")),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::invalid("jobs", e.to_string()))?;
            pool.install(|| run_validated(cfg))?
        }
    };
    Ok(vec![record])
}

fn run_validated(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let started = Instant::now();
    let observables = match cfg.experiment {
        ExperimentKind::MeanfieldComplete => meanfield_complete(cfg),
        ExperimentKind::MeanfieldTreeSweep => meanfield_tree_sweep(cfg),
        ExperimentKind::QuietEdge => quiet_edge_run(cfg),
        ExperimentKind::CouplingDomination => coupling_domination(cfg),
        ExperimentKind::EngineEquivalence => engine_equivalence(cfg),
        ExperimentKind::MartingaleClassic => martingale_classic(cfg),
        ExperimentKind::Delta1Drift => delta1_drift(cfg),
        ExperimentKind::ConjectureProbe => conjecture_probe(cfg),
    }?;
    Ok(ResultRecord {
        experiment: cfg.experiment,
        graph: cfg.graph,
        model: cfg.model,
        p: cfg.p,
        probes: cfg.probes.clone(),
        replicas: cfg.replicas,
        seed: cfg.seed,
        observables,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Maps replica indices through `work` in parallel, preserving index
/// order in the result. An invariant failure is tagged with the replica
/// and seed that produced it.
fn replica_map<T, F>(cfg: &ExperimentConfig, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            work(r).map_err(|e| match e {
                Error::InvariantViolation(msg) => Error::InvariantViolation(format!(
                    "replica {r} (base seed {}): {msg}",
                    cfg.seed
                )),
                other => other,
            })
        })
        .collect()
}

fn series(observable: &str, values: Vec<ProbeValue>) -> ObservableSeries {
    ObservableSeries {
        observable: observable.to_string(),
        values,
    }
}

/// Per-probe estimates from per-replica rows of f64 samples.
fn sample_series(probes: &[f64], rows: &[Vec<f64>]) -> Result<Vec<ProbeValue>> {
    probes
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let samples: Vec<f64> = rows.iter().map(|row| row[i]).collect();
            let e = Estimate::from_samples(&samples)?;
            Ok(ProbeValue { probe_t: t, mean: e.mean, stderr: e.stderr, n: e.n })
        })
        .collect()
}

/// Per-probe Bernoulli estimates from per-replica rows of 0/1 outcomes.
fn bernoulli_series(probes: &[f64], rows: &[Vec<u8>]) -> Result<Vec<ProbeValue>> {
    probes
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let successes = rows.iter().map(|row| row[i] as u64).sum();
            let e = Estimate::bernoulli(successes, rows.len() as u64)?;
            Ok(ProbeValue { probe_t: t, mean: e.mean, stderr: e.stderr, n: e.n })
        })
        .collect()
}

fn constant_series(probes: &[f64], value: impl Fn(f64) -> f64, n: u64) -> Vec<ProbeValue> {
    probes
        .iter()
        .map(|&t| ProbeValue { probe_t: t, mean: value(t), stderr: 0.0, n })
        .collect()
}

fn as_estimate(v: &ProbeValue) -> Estimate {
    Estimate { mean: v.mean, stderr: v.stderr, n: v.n }
}

/// `|marginal - reference|` with the marginal's own stderr attached.
fn gap_series(marginal: &[ProbeValue], reference: &[ProbeValue]) -> Vec<ProbeValue> {
    marginal
        .iter()
        .zip(reference)
        .map(|(m, r)| ProbeValue {
            probe_t: m.probe_t,
            mean: (m.mean - r.mean).abs(),
            stderr: m.stderr,
            n: m.n,
        })
        .collect()
}

fn meanfield_complete(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let params = cfg.meanfield_reference()?;
    let GraphKind::Complete { n } = cfg.graph else {
        unreachable!("validated");
    };
    let t_end = cfg.horizon();
    let rows: Vec<Vec<f64>> = replica_map(cfg, |r| {
        let mut rng = RngStream::derive(cfg.seed, r, "density_chain");
        let path = run_density_chain(n as u64, &params, t_end, &cfg.probes, &mut rng)?;
        Ok(path
            .probe_counts
            .iter()
            .map(|&(_, k)| k as f64 / n as f64)
            .collect())
    })?;
    let density = sample_series(&cfg.probes, &rows)?;
    let reference = constant_series(&cfg.probes, |t| f_closed(t, &params), cfg.replicas);
    let gap = gap_series(&density, &reference);
    Ok(vec![
        series("density", density),
        series("mean_field_reference", reference),
        series("mean_field_abs_gap", gap),
    ])
}

fn meanfield_tree_sweep(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let params = cfg.meanfield_reference()?;
    let GraphKind::TreeBall { branching, radius } = cfg.graph else {
        unreachable!("validated");
    };
    let m = ModelParams::bias_voter(params.lambda(), params.theta())?;
    let rows: Vec<Vec<(u8, u8)>> = replica_map(cfg, |r| {
        let mut rng = RngStream::derive(cfg.seed, r, "lightcone");
        lightcone::sample_tree_sites(branching, radius, &m, cfg.p, &cfg.probes, &mut rng)
    })?;

    let root_rows: Vec<Vec<u8>> = rows.iter().map(|row| row.iter().map(|&(a, _)| a).collect()).collect();
    let child_rows: Vec<Vec<u8>> = rows.iter().map(|row| row.iter().map(|&(_, b)| b).collect()).collect();
    let root = bernoulli_series(&cfg.probes, &root_rows)?;
    let child = bernoulli_series(&cfg.probes, &child_rows)?;
    let reference = constant_series(&cfg.probes, |t| f_closed(t, &params), cfg.replicas);
    let gap = gap_series(&root, &reference);
    let bound = root
        .iter()
        .map(|v| ProbeValue {
            probe_t: v.probe_t,
            mean: if upper_bound_check(&as_estimate(v), v.probe_t, &params) { 1.0 } else { 0.0 },
            stderr: 0.0,
            n: v.n,
        })
        .collect();

    let mut gaps = Vec::with_capacity(cfg.probes.len());
    for (i, &t) in cfg.probes.iter().enumerate() {
        let pairs: Vec<(u8, u8)> = rows.iter().map(|row| row[i]).collect();
        let joint = estimate_joint(&pairs)?;
        // Conservative scale for the gap: each cell frequency has stderr
        // at most 1/(2 sqrt n), and the gap is one cell against a smooth
        // function of the marginals.
        gaps.push(ProbeValue {
            probe_t: t,
            mean: independence_gap(&joint),
            stderr: 0.5 / (joint.n as f64).sqrt(),
            n: joint.n,
        });
    }

    Ok(vec![
        series("root_marginal", root),
        series("child_marginal", child),
        series("mean_field_reference", reference),
        series("mean_field_abs_gap", gap),
        series("upper_bound_pass", bound),
        series("independence_gap", gaps),
    ])
}

fn quiet_edge_run(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (lambda, theta) = cfg.model.voter_rates()?;
    let m = ModelParams::bias_voter(lambda, theta)?;
    let (x, y) = g.observation_edge();
    let t_end = cfg.horizon();
    let rows: Vec<Vec<u8>> = replica_map(cfg, |r| {
        let mut init = RngStream::derive(cfg.seed, r, "initial");
        let c0 = sample_initial(&g, cfg.p, &mut init)?;
        let rng = RngStream::derive(cfg.seed, r, "graphical");
        let (_, log) = run_graphical(&g, &m, &c0, t_end, rng, &[])?;
        cfg.probes
            .iter()
            .map(|&t| Ok(edge_quiet(&g, &log, x, y, t)? as u8))
            .collect()
    })?;
    let frequency = bernoulli_series(&cfg.probes, &rows)?;
    // Two independent exponential clocks stay silent up to t.
    let rate = (lambda + theta) * (1.0 / g.degree(x) as f64 + 1.0 / g.degree(y) as f64);
    let reference = constant_series(&cfg.probes, |t| (-rate * t).exp(), cfg.replicas);
    Ok(vec![
        series("quiet_frequency", frequency),
        series("quiet_reference", reference),
    ])
}

fn coupling_domination(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (lambda, _) = cfg.model.voter_rates()?;
    let t_end = cfg.horizon();
    let rows: Vec<Vec<(f64, f64)>> = replica_map(cfg, |r| {
        let mut init = RngStream::derive(cfg.seed, r, "initial");
        let c0 = sample_initial(&g, cfg.p, &mut init)?;
        let rng = RngStream::derive(cfg.seed, r, "coupled");
        let snaps = run_coupled(&g, lambda, &c0, t_end, rng, &cfg.probes)?;
        Ok(snaps
            .iter()
            .map(|(_, s)| (s.eta.density(), s.zeta.density()))
            .collect())
    })?;
    let eta_rows: Vec<Vec<f64>> = rows.iter().map(|row| row.iter().map(|&(e, _)| e).collect()).collect();
    let zeta_rows: Vec<Vec<f64>> = rows.iter().map(|row| row.iter().map(|&(_, z)| z).collect()).collect();
    // Reaching this point means no snapshot or event violated domination:
    // run_coupled aborts on the first breach.
    let violations = constant_series(&cfg.probes, |_| 0.0, cfg.replicas);
    Ok(vec![
        series("eta_density", sample_series(&cfg.probes, &eta_rows)?),
        series("zeta_density", sample_series(&cfg.probes, &zeta_rows)?),
        series("domination_violations", violations),
    ])
}

fn engine_equivalence(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (lambda, theta) = cfg.model.voter_rates()?;
    let m = ModelParams::bias_voter(lambda, theta)?;
    let root = g.root();
    let t_end = cfg.horizon();
    type Row = (Vec<u8>, Vec<u8>, Vec<f64>, Vec<f64>);
    let rows: Vec<Row> = replica_map(cfg, |r| {
        let mut init = RngStream::derive(cfg.seed, r, "initial");
        let c0 = sample_initial(&g, cfg.p, &mut init)?;
        let rate_rng = RngStream::derive(cfg.seed, r, "gillespie");
        let rate_snaps = run_gillespie(&g, &m, &c0, t_end, rate_rng, &cfg.probes)?;
        let clock_rng = RngStream::derive(cfg.seed, r, "graphical");
        let (clock_snaps, _) = run_graphical(&g, &m, &c0, t_end, clock_rng, &cfg.probes)?;
        let rate_root: Vec<u8> = rate_snaps.iter().map(|(_, c)| c.spin(root)).collect();
        let clock_root: Vec<u8> = clock_snaps.iter().map(|(_, c)| c.spin(root)).collect();
        let rate_density: Vec<f64> = rate_snaps.iter().map(|(_, c)| c.density()).collect();
        let clock_density: Vec<f64> = clock_snaps.iter().map(|(_, c)| c.density()).collect();
        Ok((rate_root, clock_root, rate_density, clock_density))
    })?;
    let rate_root_rows: Vec<Vec<u8>> = rows.iter().map(|r| r.0.clone()).collect();
    let clock_root_rows: Vec<Vec<u8>> = rows.iter().map(|r| r.1.clone()).collect();
    let rate_density_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.2.clone()).collect();
    let clock_density_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.3.clone()).collect();

    let rate_root = bernoulli_series(&cfg.probes, &rate_root_rows)?;
    let clock_root = bernoulli_series(&cfg.probes, &clock_root_rows)?;
    let diff: Vec<ProbeValue> = rate_root
        .iter()
        .zip(&clock_root)
        .map(|(a, b)| ProbeValue {
            probe_t: a.probe_t,
            mean: (a.mean - b.mean).abs(),
            stderr: (a.stderr.powi(2) + b.stderr.powi(2)).sqrt(),
            n: a.n,
        })
        .collect();
    Ok(vec![
        series("root_marginal_gillespie", rate_root),
        series("root_marginal_graphical", clock_root),
        series("root_marginal_diff", diff),
        series("density_gillespie", sample_series(&cfg.probes, &rate_density_rows)?),
        series("density_graphical", sample_series(&cfg.probes, &clock_density_rows)?),
    ])
}

/// Per-replica, per-probe global densities.
type DensityRows = Vec<Vec<f64>>;
/// Per-replica, per-probe spins of the fixed observation edge.
type EdgePairRows = Vec<Vec<(u8, u8)>>;

/// Gillespie trajectories with per-probe density and the spins of the
/// fixed observation edge; shared by the three site-statistics kinds.
fn site_statistics(cfg: &ExperimentConfig, g: &Graph) -> Result<(DensityRows, EdgePairRows)> {
    let (lambda, theta) = cfg.model.voter_rates()?;
    let m = ModelParams::bias_voter(lambda, theta)?;
    let (x, y) = g.observation_edge();
    let t_end = cfg.horizon();
    type Row = (Vec<f64>, Vec<(u8, u8)>);
    let rows: Vec<Row> = replica_map(cfg, |r| {
        let mut init = RngStream::derive(cfg.seed, r, "initial");
        let c0 = sample_initial(g, cfg.p, &mut init)?;
        let rng = RngStream::derive(cfg.seed, r, "gillespie");
        let snaps = run_gillespie(g, &m, &c0, t_end, rng, &cfg.probes)?;
        let density: Vec<f64> = snaps.iter().map(|(_, c)| c.density()).collect();
        let pairs: Vec<(u8, u8)> = snaps.iter().map(|(_, c)| (c.spin(x), c.spin(y))).collect();
        Ok((density, pairs))
    })?;
    let density: DensityRows = rows.iter().map(|r| r.0.clone()).collect();
    let pairs: EdgePairRows = rows.iter().map(|r| r.1.clone()).collect();
    Ok((density, pairs))
}

/// Per-probe joint tables of the observation-edge spins.
fn edge_joint_series(
    cfg: &ExperimentConfig,
    pairs: &[Vec<(u8, u8)>],
) -> Result<Vec<(f64, JointEstimate)>> {
    cfg.probes
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let at_probe: Vec<(u8, u8)> = pairs.iter().map(|row| row[i]).collect();
            Ok((t, estimate_joint(&at_probe)?))
        })
        .collect()
}

fn martingale_classic(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (density, _) = site_statistics(cfg, &g)?;
    let reference = constant_series(&cfg.probes, |_| cfg.p, cfg.replicas);
    Ok(vec![
        series("density", sample_series(&cfg.probes, &density)?),
        series("initial_density_reference", reference),
    ])
}

fn delta1_drift(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (density, pairs) = site_statistics(cfg, &g)?;
    let joints = edge_joint_series(cfg, &pairs)?;
    let discord_rows: Vec<Vec<u8>> = pairs
        .iter()
        .map(|row| row.iter().map(|&(a, b)| (a == 1 && b == 0) as u8).collect())
        .collect();
    let discordance = bernoulli_series(&cfg.probes, &discord_rows)?;
    let (dip_t, dip_value) = discordance_dip(&joints)?;
    let dip = vec![ProbeValue { probe_t: dip_t, mean: dip_value, stderr: 0.0, n: cfg.replicas }];
    Ok(vec![
        series("density", sample_series(&cfg.probes, &density)?),
        series("edge_discordance", discordance),
        series("discordance_dip", dip),
    ])
}

fn conjecture_probe(cfg: &ExperimentConfig) -> Result<Vec<ObservableSeries>> {
    let g = Graph::from_kind(cfg.graph)?;
    let (density, pairs) = site_statistics(cfg, &g)?;
    let joints = edge_joint_series(cfg, &pairs)?;
    let marginal_rows: Vec<Vec<u8>> = pairs
        .iter()
        .map(|row| row.iter().map(|&(a, _)| a).collect())
        .collect();
    let gap: Vec<ProbeValue> = joints
        .iter()
        .map(|&(t, ref j)| ProbeValue {
            probe_t: t,
            mean: independence_gap(j),
            stderr: 0.5 / (j.n as f64).sqrt(),
            n: j.n,
        })
        .collect();
    let cell10: Vec<ProbeValue> = joints
        .iter()
        .map(|&(t, ref j)| ProbeValue { probe_t: t, mean: j.cell(1, 0), stderr: 0.0, n: j.n })
        .collect();
    Ok(vec![
        series("exploratory_density", sample_series(&cfg.probes, &density)?),
        series("exploratory_marginal", bernoulli_series(&cfg.probes, &marginal_rows)?),
        series("exploratory_independence_gap", gap),
        series("exploratory_edge_cell_10", cell10),
    ])
}
