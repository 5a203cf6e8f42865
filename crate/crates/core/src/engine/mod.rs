//! Exact continuous-time samplers for the spin dynamics.
//!
//! Two independent mechanisms simulate the same processes:
//!
//! - [`Gillespie`] / [`run_gillespie`]: classic direct-method sampling from
//!   the per-vertex flip rates, for both the two-parameter voter dynamics
//!   and the contact process.
//! - [`Graphical`] / [`run_graphical`]: the directed-edge clock-and-coin
//!   construction (voter dynamics only), which additionally produces the
//!   [`EventLog`] that quiet-edge statistics are defined on.
//!
//! The two implementations share nothing beyond [`flip_rate`]-level
//! definitions, so their statistical agreement is a meaningful check; the
//! verification suite enforces it.
//!
//! [`lightcone`] holds a third, specialized sampler: exact root and
//! first-child observables on tree balls obtained by revealing only the
//! clock rings that can influence those sites. It exists because deep tree
//! balls are far too large to materialize, while their root observables
//! over short horizons depend on a few hundred rings.

pub mod fenwick;
mod gillespie;
mod graphical;
pub mod lightcone;

pub use gillespie::Gillespie;
pub use graphical::Graphical;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, VertexId};
use crate::rng::RngStream;
use crate::util::{validate_probes, validate_time};
use serde::{Deserialize, Serialize};

/// Which dynamics drive the flips.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ModelVariant {
    /// 0 -> 1 at rate `lambda * (#1-neighbors) / norm(x)`,
    /// 1 -> 0 at rate `theta * (#0-neighbors) / norm(x)`.
    BiasVoter { lambda: f64, theta: f64 },
    /// 1 -> 0 at rate 1, 0 -> 1 at rate `lambda * (#1-neighbors) / norm(x)`.
    Contact { lambda: f64 },
}

/// Divisor applied to the neighbor count in the rates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RateNorm {
    /// The vertex degree; the standard normalization everywhere.
    Degree,
    /// `degree + 1`. On the complete graph this turns the per-vertex
    /// divisor `n - 1` into `n`, matching the density chain's rates
    /// exactly; it exists only so the chain-equivalence oracle can compare
    /// like with like.
    DegreePlusOne,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ModelParams {
    variant: ModelVariant,
    norm: RateNorm,
}

impl ModelParams {
    /// Voter dynamics with attachment rate `lambda` and detachment rate
    /// `theta`; requires `lambda >= theta > 0`. Equal rates give the
    /// classic voter model (allowed; used by the martingale checks).
    pub fn bias_voter(lambda: f64, theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::invalid("theta", "must be positive and finite"));
        }
        if !lambda.is_finite() || lambda < theta {
            return Err(Error::invalid(
                "lambda",
                "must satisfy lambda >= theta (relabel spins for the opposite bias)",
            ));
        }
        Ok(ModelParams {
            variant: ModelVariant::BiasVoter { lambda, theta },
            norm: RateNorm::Degree,
        })
    }

    /// Contact process with infection rate `lambda` and recovery rate 1.
    pub fn contact(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::invalid("lambda", "must be positive and finite"));
        }
        Ok(ModelParams {
            variant: ModelVariant::Contact { lambda },
            norm: RateNorm::Degree,
        })
    }

    /// Switches the neighbor-count divisor to `degree + 1`.
    pub fn with_degree_plus_one(mut self) -> Self {
        self.norm = RateNorm::DegreePlusOne;
        self
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn norm(&self) -> RateNorm {
        self.norm
    }

    /// Rate from the local picture: own spin, neighbor count, count of
    /// spin-1 neighbors. The engines call this with maintained counts;
    /// [`flip_rate`] recounts from a configuration.
    #[inline]
    pub(crate) fn local_rate(&self, spin: u8, ones: u32, degree: u32) -> f64 {
        let denom = match self.norm {
            RateNorm::Degree => degree as f64,
            RateNorm::DegreePlusOne => (degree + 1) as f64,
        };
        match self.variant {
            ModelVariant::BiasVoter { lambda, theta } => {
                if spin == 0 {
                    lambda * ones as f64 / denom
                } else {
                    theta * (degree - ones) as f64 / denom
                }
            }
            ModelVariant::Contact { lambda } => {
                if spin == 0 {
                    lambda * ones as f64 / denom
                } else {
                    1.0
                }
            }
        }
    }
}

/// Spin assignment on the vertex set of one graph.
#[derive(Clone, PartialEq, Debug)]
pub struct Configuration {
    kind: GraphKind,
    spins: Vec<u8>,
}

impl Configuration {
    pub fn new(kind: GraphKind, spins: Vec<u8>) -> Result<Self> {
        let expected = kind.vertex_count()?;
        if spins.len() as u128 != expected {
            return Err(Error::invalid(
                "spins",
                format!("{} spins for a {expected}-vertex graph", spins.len()),
            ));
        }
        if spins.iter().any(|&s| s > 1) {
            return Err(Error::invalid("spins", "spins must be 0 or 1"));
        }
        Ok(Configuration { kind, spins })
    }

    /// Constant configuration (`delta_0` for 0, `delta_1` for 1).
    pub fn constant(g: &Graph, spin: u8) -> Self {
        Configuration {
            kind: g.kind(),
            spins: vec![spin & 1; g.vertex_count()],
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    #[inline]
    pub fn spin(&self, x: VertexId) -> u8 {
        self.spins[x.0 as usize]
    }

    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    pub fn count_ones(&self) -> u64 {
        self.spins.iter().map(|&s| s as u64).sum()
    }

    pub fn density(&self) -> f64 {
        self.count_ones() as f64 / self.spins.len() as f64
    }

    pub fn is_constant(&self, spin: u8) -> bool {
        self.spins.iter().all(|&s| s == spin)
    }

    pub(crate) fn from_parts(kind: GraphKind, spins: Vec<u8>) -> Self {
        Configuration { kind, spins }
    }
}

/// Product-measure initial condition: each spin independently 1 with
/// probability `p`.
pub fn sample_initial(g: &Graph, p: f64, rng: &mut RngStream) -> Result<Configuration> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", "density must lie in [0, 1]"));
    }
    let spins = (0..g.vertex_count())
        .map(|_| rng.bernoulli(p) as u8)
        .collect();
    Ok(Configuration::from_parts(g.kind(), spins))
}

/// Flip rate of vertex `x` in configuration `c`, recounted from adjacency.
/// Reference definition; the engines maintain the same quantity
/// incrementally.
pub fn flip_rate(g: &Graph, c: &Configuration, x: VertexId, m: &ModelParams) -> f64 {
    debug_assert_eq!(c.kind(), g.kind());
    let ones = g
        .neighbors(x)
        .iter()
        .map(|&y| c.spin(y) as u32)
        .sum::<u32>();
    m.local_rate(c.spin(x), ones, g.degree(x) as u32)
}

/// Coin attached to a clock ring: `Head` occurs with probability
/// `lambda / (lambda + theta)` and lets a 0-spin copy, `Tail` lets a
/// 1-spin copy.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Coin {
    Head,
    Tail,
}

/// One clock ring of the directed edge `(source, target)`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct EventEntry {
    pub time: f64,
    pub source: VertexId,
    pub target: VertexId,
    pub coin: Coin,
    /// Whether the copy rule fired (coin matched the source's spin at the
    /// ring time). Rings that fire without changing the spin still count
    /// as applied.
    pub applied: bool,
}

/// Time-ordered record of every ring produced by a graphical-engine run.
#[derive(Clone, Debug, Default)]
pub struct EventLog {
    /// Horizon of the run that produced the log; quietness can only be
    /// certified up to this time.
    pub t_end: f64,
    pub entries: Vec<EventEntry>,
}

impl EventLog {
    /// Structural invariants: strictly increasing times in `(0, t_end]`,
    /// every entry on an existing directed edge.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut prev = 0.0f64;
        for e in &self.entries {
            if !e.time.is_finite() || e.time <= prev || e.time > self.t_end {
                return Err(Error::InvariantViolation(format!(
                    "event times not strictly increasing within (0, {}]",
                    self.t_end
                )));
            }
            prev = e.time;
            if g.neighbors(e.source).binary_search(&e.target).is_err() {
                return Err(Error::InvariantViolation(format!(
                    "logged ring on non-edge ({}, {})",
                    e.source, e.target
                )));
            }
        }
        Ok(())
    }
}

/// True iff neither directed clock of the edge `{x, y}` rings at or before
/// `t`. This is the quiet-edge event whose probability is exponential
/// in `t`.
pub fn edge_quiet(g: &Graph, log: &EventLog, x: VertexId, y: VertexId, t: f64) -> Result<bool> {
    if g.neighbors(x).binary_search(&y).is_err() {
        return Err(Error::invalid("edge", format!("{x} and {y} are not adjacent")));
    }
    if !(0.0..=log.t_end).contains(&t) {
        return Err(Error::invalid(
            "t",
            format!("quietness is only known on [0, {}]", log.t_end),
        ));
    }
    for e in &log.entries {
        if e.time > t {
            break;
        }
        if (e.source == x && e.target == y) || (e.source == y && e.target == x) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_run_inputs(g: &Graph, c0: &Configuration, t_end: f64, probes: &[f64]) -> Result<()> {
    if c0.kind() != g.kind() || c0.spins().len() != g.vertex_count() {
        return Err(Error::invalid(
            "c0",
            "initial configuration belongs to a different graph",
        ));
    }
    validate_time("t_end", t_end)?;
    validate_probes(probes, t_end)
}

/// Runs the rate-driven sampler to `t_end`, returning the configuration at
/// each probe time. A zero total rate freezes the state; remaining probes
/// see the frozen configuration.
pub fn run_gillespie(
    g: &Graph,
    m: &ModelParams,
    c0: &Configuration,
    t_end: f64,
    rng: RngStream,
    probes: &[f64],
) -> Result<Vec<(f64, Configuration)>> {
    check_run_inputs(g, c0, t_end, probes)?;
    let mut stepper = Gillespie::new(g, m, c0, rng)?;
    let mut out = Vec::with_capacity(probes.len());
    let mut next = 0usize;
    loop {
        let horizon = match stepper.peek_next_time() {
            Some(t_next) if t_next <= t_end => t_next,
            // Next event beyond the horizon, or absorbed: flush the rest.
            _ => break,
        };
        while next < probes.len() && probes[next] < horizon {
            out.push((probes[next], stepper.configuration()));
            next += 1;
        }
        stepper.step();
    }
    while next < probes.len() {
        out.push((probes[next], stepper.configuration()));
        next += 1;
    }
    Ok(out)
}

/// Runs the clock-and-coin sampler to `t_end`. Voter dynamics only: the
/// head/tail construction realizes the attach/detach pair of rates and has
/// no contact-process analogue. Returns probe snapshots and the full ring
/// log.
pub fn run_graphical(
    g: &Graph,
    m: &ModelParams,
    c0: &Configuration,
    t_end: f64,
    rng: RngStream,
    probes: &[f64],
) -> Result<(Vec<(f64, Configuration)>, EventLog)> {
    check_run_inputs(g, c0, t_end, probes)?;
    let mut stepper = Graphical::new(g, m, c0, rng)?;
    let mut out = Vec::with_capacity(probes.len());
    let mut next = 0usize;
    loop {
        let horizon = match stepper.peek_next_time() {
            Some(t_next) if t_next <= t_end => t_next,
            _ => break,
        };
        while next < probes.len() && probes[next] < horizon {
            out.push((probes[next], stepper.configuration()));
            next += 1;
        }
        stepper.step();
    }
    while next < probes.len() {
        out.push((probes[next], stepper.configuration()));
        next += 1;
    }
    Ok((out, stepper.into_log(t_end)))
}
