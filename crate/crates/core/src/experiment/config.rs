//! Experiment descriptions: a JSON-shaped config naming the experiment
//! kind, the graph, the model, and the Monte Carlo plan. Validation is
//! eager and names the offending field, so a bad config fails before any
//! replica runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::meanfield::MeanFieldParams;

/// The eight runnable experiment kinds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Complete-graph density trajectories against the logistic limit.
    MeanfieldComplete,
    /// Root and first-child marginals on a tree ball across probe times,
    /// with the mean-field curve as reference and upper bound.
    MeanfieldTreeSweep,
    /// Frequency of an untouched directed-clock pair on a fixed tree edge.
    QuietEdge,
    /// Voter/contact coupling with pointwise domination checked throughout.
    CouplingDomination,
    /// Same observable from the rate-driven and clock-driven engines.
    EngineEquivalence,
    /// Unbiased voter dynamics; global density must hold its initial mean.
    MartingaleClassic,
    /// Strongly biased dynamics drifting toward all-ones.
    Delta1Drift,
    /// Exploratory lattice independence sweep; never an acceptance gate.
    ConjectureProbe,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::MeanfieldComplete,
        ExperimentKind::MeanfieldTreeSweep,
        ExperimentKind::QuietEdge,
        ExperimentKind::CouplingDomination,
        ExperimentKind::EngineEquivalence,
        ExperimentKind::MartingaleClassic,
        ExperimentKind::Delta1Drift,
        ExperimentKind::ConjectureProbe,
    ];

    /// The snake_case name used in config files and output columns.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MeanfieldComplete => "meanfield_complete",
            ExperimentKind::MeanfieldTreeSweep => "meanfield_tree_sweep",
            ExperimentKind::QuietEdge => "quiet_edge",
            ExperimentKind::CouplingDomination => "coupling_domination",
            ExperimentKind::EngineEquivalence => "engine_equivalence",
            ExperimentKind::MartingaleClassic => "martingale_classic",
            ExperimentKind::Delta1Drift => "delta1_drift",
            ExperimentKind::ConjectureProbe => "conjecture_probe",
        }
    }

    /// One-line summary for `list-experiments`.
    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::MeanfieldComplete => {
                "complete-graph density chain vs the closed-form logistic curve"
            }
            ExperimentKind::MeanfieldTreeSweep => {
                "tree-ball root/child marginals vs the mean-field curve (light-cone sampler)"
            }
            ExperimentKind::QuietEdge => {
                "frequency of an edge with no clock ring up to each probe time"
            }
            ExperimentKind::CouplingDomination => {
                "voter/contact coupling; verifies pointwise domination at every probe"
            }
            ExperimentKind::EngineEquivalence => {
                "rate-driven vs clock-driven engines on the same observable"
            }
            ExperimentKind::MartingaleClassic => {
                "unbiased dynamics; density stays at its initial mean"
            }
            ExperimentKind::Delta1Drift => {
                "biased dynamics drifting to all-ones; tracks the discordance dip"
            }
            ExperimentKind::ConjectureProbe => {
                "exploratory lattice independence-gap sweep (not a gate)"
            }
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Model parameters as they appear in config files.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    BiasVoter { lambda: f64, theta: f64 },
    Contact { lambda: f64 },
}

impl ModelSpec {
    /// The voter rates, or an error: every experiment kind drives the
    /// voter dynamics directly; the contact process enters only inside
    /// the domination coupling.
    pub fn voter_rates(&self) -> Result<(f64, f64)> {
        match *self {
            ModelSpec::BiasVoter { lambda, theta } => Ok((lambda, theta)),
            ModelSpec::Contact { .. } => Err(Error::invalid(
                "model",
                "experiments drive the voter dynamics; the contact process \
                 runs only inside coupling_domination, which derives it from \
                 the voter lambda",
            )),
        }
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            ModelSpec::BiasVoter { lambda, theta } => {
                write!(f, "bias_voter(lambda={lambda},theta={theta})")
            }
            ModelSpec::Contact { lambda } => write!(f, "contact(lambda={lambda})"),
        }
    }
}

/// Largest adjacency-entry count a config may ask to materialize. Keeps a
/// mistyped graph size from exhausting memory before validation can say
/// which field is wrong.
const MAX_ADJACENCY_ENTRIES: u128 = 100_000_000;

/// Horizon guard for the light-cone sampler: expected revealed rings grow
/// like `exp((lambda + theta) t)`, so the exponent is capped.
const MAX_LIGHTCONE_EXPONENT: f64 = 12.0;

/// A complete, self-describing experiment description.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub graph: GraphKind,
    pub model: ModelSpec,
    /// Initial spin-1 probability of the product initial law.
    pub p: f64,
    /// Observation times, sorted ascending; the last one is the horizon.
    pub probes: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    /// Output base path; `.csv` and `.jsonl` are appended. The CLI `--out`
    /// flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    /// Parses and fully validates a config document.
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }

    /// The simulation horizon: the last probe time.
    pub fn horizon(&self) -> f64 {
        self.probes.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::invalid("replicas", "at least one replica is required"));
        }
        if self.probes.is_empty() {
            return Err(Error::invalid("probes", "at least one probe time is required"));
        }
        let mut prev = 0.0f64;
        for &t in &self.probes {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::invalid("probes", "probe times must be finite and >= 0"));
            }
            if t < prev {
                return Err(Error::invalid("probes", "probe times must be sorted ascending"));
            }
            prev = t;
        }
        if !(0.0..=1.0).contains(&self.p) || !self.p.is_finite() {
            return Err(Error::invalid("p", "initial density must lie in [0, 1]"));
        }
        self.graph.validate_params()?;
        let (lambda, theta) = self.model.voter_rates()?;
        if !lambda.is_finite() || !theta.is_finite() || theta <= 0.0 || lambda < theta {
            return Err(Error::invalid(
                "model",
                "voter rates need lambda >= theta > 0",
            ));
        }

        // The tree sweep samples light cones and never materializes its
        // graph; everything else builds explicit adjacency.
        if self.experiment != ExperimentKind::MeanfieldTreeSweep {
            let vertices = self.graph.vertex_count()?;
            let entries: u128 = match self.graph {
                GraphKind::Complete { n } => (n as u128) * (n as u128 - 1),
                GraphKind::TreeBall { .. } => 2 * (vertices - 1),
                GraphKind::Torus { dim, .. } => vertices * 2 * dim as u128,
            };
            if entries > MAX_ADJACENCY_ENTRIES {
                return Err(Error::invalid(
                    "graph",
                    format!(
                        "{} adjacency entries exceed the in-memory budget of {}",
                        entries, MAX_ADJACENCY_ENTRIES
                    ),
                ));
            }
        }

        match self.experiment {
            ExperimentKind::MeanfieldComplete => {
                if !matches!(self.graph, GraphKind::Complete { .. }) {
                    return Err(Error::invalid(
                        "graph",
                        "meanfield_complete runs on a complete graph",
                    ));
                }
                self.meanfield_reference()?;
            }
            ExperimentKind::MeanfieldTreeSweep => {
                if !matches!(self.graph, GraphKind::TreeBall { .. }) {
                    return Err(Error::invalid(
                        "graph",
                        "meanfield_tree_sweep runs on a tree ball",
                    ));
                }
                self.meanfield_reference()?;
                let exponent = (lambda + theta) * self.horizon();
                if exponent > MAX_LIGHTCONE_EXPONENT {
                    return Err(Error::invalid(
                        "probes",
                        format!(
                            "(lambda + theta) * horizon = {exponent:.2} exceeds the \
                             light-cone budget of {MAX_LIGHTCONE_EXPONENT}; the \
                             revealed-ring count grows like exp of that product"
                        ),
                    ));
                }
            }
            ExperimentKind::QuietEdge => {
                let GraphKind::TreeBall { radius, .. } = self.graph else {
                    return Err(Error::invalid("graph", "quiet_edge runs on a tree ball"));
                };
                if radius < 2 {
                    return Err(Error::invalid(
                        "graph",
                        "quiet_edge watches an interior edge; radius >= 2 is required",
                    ));
                }
            }
            ExperimentKind::CouplingDomination => {
                if theta != 1.0 {
                    return Err(Error::invalid(
                        "model",
                        "coupling_domination requires theta = 1 (the contact \
                         recovery rate)",
                    ));
                }
                if lambda <= 1.0 {
                    return Err(Error::invalid(
                        "model",
                        "coupling_domination requires lambda > 1",
                    ));
                }
            }
            ExperimentKind::EngineEquivalence => {}
            ExperimentKind::MartingaleClassic => {
                if lambda != theta {
                    return Err(Error::invalid(
                        "model",
                        "martingale_classic requires lambda = theta",
                    ));
                }
            }
            ExperimentKind::Delta1Drift => {
                if lambda <= theta {
                    return Err(Error::invalid(
                        "model",
                        "delta1_drift requires lambda > theta",
                    ));
                }
                if self.probes.len() < 2 {
                    return Err(Error::invalid(
                        "probes",
                        "delta1_drift locates a dip; at least two probes are required",
                    ));
                }
            }
            ExperimentKind::ConjectureProbe => {
                if !matches!(self.graph, GraphKind::Torus { .. }) {
                    return Err(Error::invalid(
                        "graph",
                        "conjecture_probe runs on a torus",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Mean-field parameters for kinds that compare against the curve;
    /// these need an interior initial density.
    pub(crate) fn meanfield_reference(&self) -> Result<MeanFieldParams> {
        let (lambda, theta) = self.model.voter_rates()?;
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::invalid(
                "p",
                "mean-field comparisons need 0 < p < 1",
            ));
        }
        MeanFieldParams::new(lambda, theta, self.p)
    }
}
