//! Basic coupling of the voter dynamics (rates `lambda`, `theta = 1`) with
//! the contact process (infection `lambda`, recovery 1) on shared
//! randomness, preserving pointwise domination of the contact component by
//! the voter component.
//!
//! Per vertex the legal joint spins are (0,0), (1,0), (1,1) for
//! (voter, contact); the coupled generator moves them jointly:
//!
//! - (0,0): both to (1,1) at the smaller rate `lambda D_zeta / deg`, the
//!   voter alone to (1,0) at the excess `lambda (D_eta - D_zeta) / deg`.
//! - (1,1): both to (0,0) at the smaller rate `(deg - D_eta) / deg`, the
//!   contact spin alone to (1,0) at the excess `D_eta / deg`.
//! - (1,0): the components flip independently at their own rates.
//!
//! Here `D_eta`, `D_zeta` count spin-1 neighbors in each component. Under
//! domination `D_eta >= D_zeta`, so every excess is nonnegative and the
//! state (0,1) is unreachable. A domination violation therefore certifies
//! an implementation bug; it aborts the run rather than poisoning
//! estimates.

use crate::engine::fenwick::RateTree;
use crate::engine::Configuration;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::RngStream;
use crate::util::{validate_probes, validate_time};

/// Paired voter and contact configurations on the same graph.
#[derive(Clone, PartialEq, Debug)]
pub struct CoupledState {
    pub eta: Configuration,
    pub zeta: Configuration,
}

/// True iff `eta(x) >= zeta(x)` everywhere.
pub fn check_domination(s: &CoupledState) -> Result<bool> {
    if s.eta.kind() != s.zeta.kind() || s.eta.spins().len() != s.zeta.spins().len() {
        return Err(Error::invalid(
            "state",
            "components live on different graphs",
        ));
    }
    Ok(s.eta
        .spins()
        .iter()
        .zip(s.zeta.spins())
        .all(|(&e, &z)| e >= z))
}

/// Joint stepper. Exposes the same peek/step protocol as the single
/// engines.
pub struct CoupledGillespie<'g> {
    g: &'g Graph,
    lambda: f64,
    eta: Vec<u8>,
    zeta: Vec<u8>,
    d_eta: Vec<u32>,
    d_zeta: Vec<u32>,
    rates: RateTree,
    t: f64,
    pending_dt: Option<f64>,
    rng: RngStream,
}

impl<'g> CoupledGillespie<'g> {
    /// Both components start from `c0`. Requires `lambda > 1`: the voter
    /// component runs with detachment rate normalized to 1 and must keep
    /// its bias.
    pub fn new(g: &'g Graph, lambda: f64, c0: &Configuration, rng: RngStream) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 1.0 {
            return Err(Error::invalid("lambda", "coupling requires lambda > 1"));
        }
        if c0.kind() != g.kind() || c0.spins().len() != g.vertex_count() {
            return Err(Error::invalid(
                "c0",
                "initial configuration belongs to a different graph",
            ));
        }
        let spins = c0.spins().to_vec();
        let mut counts = vec![0u32; g.vertex_count()];
        for x in g.vertices() {
            counts[x.0 as usize] = g
                .neighbors(x)
                .iter()
                .map(|&y| spins[y.0 as usize] as u32)
                .sum();
        }
        let mut s = CoupledGillespie {
            g,
            lambda,
            eta: spins.clone(),
            zeta: spins,
            d_eta: counts.clone(),
            d_zeta: counts,
            rates: RateTree::new(g.vertex_count()),
            t: 0.0,
            pending_dt: None,
            rng,
        };
        for x in g.vertices() {
            let w = s.joint_rate(x.0 as usize);
            s.rates.set(x.0 as usize, w);
        }
        Ok(s)
    }

    fn joint_rate(&self, i: usize) -> f64 {
        let deg = self.g.degree(VertexId(i as u32)) as f64;
        match (self.eta[i], self.zeta[i]) {
            (0, 0) => self.lambda * self.d_eta[i] as f64 / deg,
            (1, 1) => 1.0,
            (1, 0) => {
                (deg - self.d_eta[i] as f64) / deg + self.lambda * self.d_zeta[i] as f64 / deg
            }
            _ => unreachable!("domination excludes (eta, zeta) = (0, 1)"),
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> CoupledState {
        CoupledState {
            eta: Configuration::from_parts(self.g.kind(), self.eta.clone()),
            zeta: Configuration::from_parts(self.g.kind(), self.zeta.clone()),
        }
    }

    pub fn absorbed(&self) -> bool {
        self.rates.active() == 0
    }

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

    /// Executes the next joint transition. Returns its time and vertex.
    /// A post-move domination violation at the vertex aborts with an
    /// internal error.
    pub fn step(&mut self) -> Result<Option<(f64, VertexId)>> {
        let Some(t_next) = self.peek_next_time() else {
            return Ok(None);
        };
        self.pending_dt = None;
        self.t = t_next;
        let target = self.rng.uniform_f64() * self.rates.total();
        let i = self.rates.sample(target);
        let x = VertexId(i as u32);
        let deg = self.g.degree(x) as f64;

        let (flip_eta, flip_zeta) = match (self.eta[i], self.zeta[i]) {
            (0, 0) => {
                // Rate sanity: attachment dominates infection at equal
                // sites because D_eta >= D_zeta under domination.
                debug_assert!(self.d_eta[i] >= self.d_zeta[i]);
                let both = self.lambda * self.d_zeta[i] as f64 / deg;
                let u = self.rng.uniform_f64() * self.rates.get(i);
                if u < both {
                    (true, true)
                } else {
                    (true, false)
                }
            }
            (1, 1) => {
                // Voter detachment (deg - D_eta)/deg never exceeds the
                // recovery rate 1.
                let both = (deg - self.d_eta[i] as f64) / deg;
                let u = self.rng.uniform_f64() * self.rates.get(i);
                if u < both {
                    (true, true)
                } else {
                    (false, true)
                }
            }
            (1, 0) => {
                let eta_down = (deg - self.d_eta[i] as f64) / deg;
                let u = self.rng.uniform_f64() * self.rates.get(i);
                if u < eta_down {
                    (true, false)
                } else {
                    (false, true)
                }
            }
            _ => unreachable!("domination excludes (eta, zeta) = (0, 1)"),
        };

        if flip_eta {
            let new = self.eta[i] ^ 1;
            self.eta[i] = new;
            for &y in self.g.neighbors(x) {
                let j = y.0 as usize;
                if new == 1 {
                    self.d_eta[j] += 1;
                } else {
                    self.d_eta[j] -= 1;
                }
            }
        }
        if flip_zeta {
            let new = self.zeta[i] ^ 1;
            self.zeta[i] = new;
            for &y in self.g.neighbors(x) {
                let j = y.0 as usize;
                if new == 1 {
                    self.d_zeta[j] += 1;
                } else {
                    self.d_zeta[j] -= 1;
                }
            }
        }
        for &y in self.g.neighbors(x) {
            let j = y.0 as usize;
            let w = self.joint_rate(j);
            self.rates.set(j, w);
        }
        let w = self.joint_rate(i);
        self.rates.set(i, w);

        if self.eta[i] < self.zeta[i] {
            return Err(Error::InvariantViolation(format!(
                "domination violated at vertex {x} at time {}",
                self.t
            )));
        }
        #[cfg(debug_assertions)]
        {
            debug_assert!(
                self.eta.iter().zip(&self.zeta).all(|(&e, &z)| e >= z),
                "pointwise domination violated"
            );
        }
        Ok(Some((self.t, x)))
    }
}

/// Runs the coupling to `t_end`, snapshotting both components at each
/// probe. Domination is re-verified on every snapshot; any violation
/// aborts.
pub fn run_coupled(
    g: &Graph,
    lambda: f64,
    c0: &Configuration,
    t_end: f64,
    rng: RngStream,
    probes: &[f64],
) -> Result<Vec<(f64, CoupledState)>> {
    validate_time("t_end", t_end)?;
    validate_probes(probes, t_end)?;
    let mut stepper = CoupledGillespie::new(g, lambda, c0, rng)?;
    let mut out = Vec::with_capacity(probes.len());
    let mut next = 0usize;
    let snapshot = |stepper: &CoupledGillespie, t: f64| -> Result<(f64, CoupledState)> {
        let state = stepper.state();
        if !check_domination(&state)? {
            return Err(Error::InvariantViolation(format!(
                "domination violated in a probe snapshot at time {t}"
            )));
        }
        Ok((t, state))
    };
    loop {
        let horizon = match stepper.peek_next_time() {
            Some(t_next) if t_next <= t_end => t_next,
            _ => break,
        };
        while next < probes.len() && probes[next] < horizon {
            out.push(snapshot(&stepper, probes[next])?);
            next += 1;
        }
        stepper.step()?;
    }
    while next < probes.len() {
        out.push(snapshot(&stepper, probes[next])?);
        next += 1;
    }
    Ok(out)
}
