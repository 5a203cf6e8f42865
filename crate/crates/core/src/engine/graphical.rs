//! Clock-and-coin sampler for the voter dynamics.
//!
//! Every directed edge `(x, y)` carries an independent Poisson clock of
//! rate `(lambda + theta) / norm(x)` and every ring an independent coin
//! landing heads with probability `lambda / (lambda + theta)`. At a ring of
//! `(x, y)`: a 0-spin at `x` copies `y`'s spin on heads, a 1-spin copies on
//! tails, otherwise nothing happens. Summing the two coin outcomes over a
//! vertex's out-edges recovers exactly the voter flip rates, which is what
//! the cross-engine equivalence suite verifies.
//!
//! Internally the per-edge clocks are sampled by superposition: one global
//! exponential clock at the summed rate, then a source vertex proportional
//! to its total out-rate and a uniformly chosen neighbor. Per-edge this
//! thins back to the correct Poisson law, with O(1) work per ring.

use crate::engine::fenwick::RateTree;
use crate::engine::{Coin, Configuration, EventEntry, EventLog, ModelParams, ModelVariant, RateNorm};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::RngStream;

enum SourceSampler {
    /// All vertices have the same out-rate (always true for the degree
    /// normalization): a uniform pick suffices.
    Uniform,
    /// Static weighted pick for non-constant out-rates.
    Weighted(RateTree),
}

pub struct Graphical<'g> {
    g: &'g Graph,
    head_prob: f64,
    total_rate: f64,
    source: SourceSampler,
    spins: Vec<u8>,
    t: f64,
    pending_dt: Option<f64>,
    rng: RngStream,
    entries: Vec<EventEntry>,
}

impl<'g> Graphical<'g> {
    pub fn new(
        g: &'g Graph,
        params: &ModelParams,
        c0: &Configuration,
        rng: RngStream,
    ) -> Result<Self> {
        let ModelVariant::BiasVoter { lambda, theta } = params.variant() else {
            return Err(Error::invalid(
                "model",
                "the clock-and-coin construction is defined for voter dynamics only",
            ));
        };
        let ring_rate = lambda + theta;
        let n = g.vertex_count();
        let out_rate = |x: VertexId| {
            let deg = g.degree(x) as f64;
            match params.norm() {
                RateNorm::Degree => ring_rate,
                RateNorm::DegreePlusOne => ring_rate * deg / (deg + 1.0),
            }
        };
        let weights: Vec<f64> = g.vertices().map(out_rate).collect();
        let (lo, hi) = weights
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
        let (source, total_rate) = if lo == hi {
            (SourceSampler::Uniform, hi * n as f64)
        } else {
            let tree = RateTree::with_weights(&weights);
            let total = tree.total();
            (SourceSampler::Weighted(tree), total)
        };
        Ok(Graphical {
            g,
            head_prob: lambda / ring_rate,
            total_rate,
            source,
            spins: c0.spins().to_vec(),
            t: 0.0,
            pending_dt: None,
            rng,
            entries: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::from_parts(self.g.kind(), self.spins.clone())
    }

    /// Time of the next ring (clocks never stop, so this is always
    /// `Some`). Idempotent between steps.
    pub fn peek_next_time(&mut self) -> Option<f64> {
        let dt = match self.pending_dt {
            Some(dt) => dt,
            None => {
                let dt = self.rng.exp(self.total_rate);
                self.pending_dt = Some(dt);
                dt
            }
        };
        Some(self.t + dt)
    }

    /// Executes the next ring: source clock, uniform out-neighbor, coin,
    /// conditional copy. Returns the ring time and the source vertex.
    pub fn step(&mut self) -> Option<(f64, VertexId)> {
        let t_next = self.peek_next_time()?;
        self.pending_dt = None;
        self.t = t_next;

        let src = match &self.source {
            SourceSampler::Uniform => self.rng.pick(self.g.vertex_count()),
            SourceSampler::Weighted(tree) => {
                let target = self.rng.uniform_f64() * tree.total();
                tree.sample(target)
            }
        };
        let x = VertexId(src as u32);
        let nbrs = self.g.neighbors(x);
        let y = nbrs[self.rng.pick(nbrs.len())];
        let head = self.rng.bernoulli(self.head_prob);
        let spin = self.spins[src];
        let applied = (spin == 0 && head) || (spin == 1 && !head);
        if applied {
            self.spins[src] = self.spins[y.0 as usize];
        }
        self.entries.push(EventEntry {
            time: self.t,
            source: x,
            target: y,
            coin: if head { Coin::Head } else { Coin::Tail },
            applied,
        });
        Some((self.t, x))
    }

    /// Finishes the run, yielding the ring log with its horizon.
    pub fn into_log(self, t_end: f64) -> EventLog {
        debug_assert!(self.t <= t_end);
        EventLog {
            t_end,
            entries: self.entries,
        }
    }
}
