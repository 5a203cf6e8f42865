//! Direct-method sampler driven by per-vertex flip rates.

use crate::engine::fenwick::RateTree;
use crate::engine::{Configuration, ModelParams, ModelVariant};
use crate::error::Result;
use crate::graph::{Graph, VertexId};
use crate::rng::RngStream;

/// Exact continuous-time stepper: exponential holding times at the total
/// rate, vertex choice proportional to its rate, O(deg log |V|) rate
/// maintenance per flip.
///
/// The stepper exposes the next event time separately from the event
/// itself so callers can interleave probe snapshots without disturbing the
/// random stream: `peek_next_time` draws (and caches) the holding time,
/// `step` consumes it.
pub struct Gillespie<'g> {
    g: &'g Graph,
    params: ModelParams,
    spins: Vec<u8>,
    /// Count of spin-1 neighbors per vertex, maintained incrementally.
    ones: Vec<u32>,
    rates: RateTree,
    t: f64,
    pending_dt: Option<f64>,
    rng: RngStream,
}

impl<'g> Gillespie<'g> {
    pub fn new(
        g: &'g Graph,
        params: &ModelParams,
        c0: &Configuration,
        rng: RngStream,
    ) -> Result<Self> {
        let n = g.vertex_count();
        let spins: Vec<u8> = c0.spins().to_vec();
        let mut ones = vec![0u32; n];
        for x in g.vertices() {
            ones[x.0 as usize] = g
                .neighbors(x)
                .iter()
                .map(|&y| spins[y.0 as usize] as u32)
                .sum();
        }
        let weights: Vec<f64> = (0..n)
            .map(|i| params.local_rate(spins[i], ones[i], g.degree(VertexId(i as u32)) as u32))
            .collect();
        Ok(Gillespie {
            g,
            params: *params,
            spins,
            ones,
            rates: RateTree::with_weights(&weights),
            t: 0.0,
            pending_dt: None,
            rng,
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

    /// Current flip rate of a vertex (maintained value).
    pub fn rate_of(&self, x: VertexId) -> f64 {
        self.rates.get(x.0 as usize)
    }

    pub fn total_rate(&self) -> f64 {
        self.rates.total()
    }

    /// True when no vertex can flip (the state is absorbing).
    pub fn absorbed(&self) -> bool {
        self.rates.active() == 0
    }

    /// Time of the next event, drawing its holding time if not already
    /// drawn. `None` once absorbed. Idempotent between steps.
    pub fn peek_next_time(&mut self) -> Option<f64> {
        if self.absorbed() {
            return None;
        }
        let dt = match self.pending_dt {
            Some(dt) => dt,
            None => {
                let dt = self.rng.exp(self.rates.total());
                self.pending_dt = Some(dt);
                dt
            }
        };
        Some(self.t + dt)
    }

    /// Advances by one flip; returns its time and vertex, or `None` once
    /// absorbed.
    pub fn step(&mut self) -> Option<(f64, VertexId)> {
        let t_next = self.peek_next_time()?;
        self.pending_dt = None;
        self.t = t_next;
        let target = self.rng.uniform_f64() * self.rates.total();
        let i = self.rates.sample(target);

        let new_spin = self.spins[i] ^ 1;
        self.spins[i] = new_spin;
        let x = VertexId(i as u32);
        // The flip changes the 1-neighbor count of each neighbor, and this
        // vertex's own rate through its spin.
        for &y in self.g.neighbors(x) {
            let j = y.0 as usize;
            if new_spin == 1 {
                self.ones[j] += 1;
            } else {
                self.ones[j] -= 1;
            }
            let w = self
                .params
                .local_rate(self.spins[j], self.ones[j], self.g.degree(y) as u32);
            self.rates.set(j, w);
        }
        let w = self
            .params
            .local_rate(new_spin, self.ones[i], self.g.degree(x) as u32);
        self.rates.set(i, w);

        if cfg!(debug_assertions) {
            self.assert_absorbing_states();
        }
        Some((self.t, x))
    }

    /// The all-one state admits no voter flip; all-zero admits none under
    /// either dynamics. Checked after every step in debug builds.
    fn assert_absorbing_states(&self) {
        let all_one = self.spins.iter().all(|&s| s == 1);
        let all_zero = self.spins.iter().all(|&s| s == 0);
        if all_zero {
            debug_assert!(self.absorbed(), "all-zero state has live rates");
        }
        if all_one {
            if let ModelVariant::BiasVoter { .. } = self.params.variant() {
                debug_assert!(self.absorbed(), "all-one voter state has live rates");
            }
        }
    }
}
