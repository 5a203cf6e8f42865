//! The logistic mean-field limit of the biased voter density, three ways:
//! in closed form, by explicit ODE integration, and as the exact two-rate
//! birth-death chain that the density of the complete-graph model follows.
//!
//! With bias `delta = lambda - theta` and initial density `p`, the limit is
//!
//! ```text
//! f(t) = p e^{delta t} / (1 - p + p e^{delta t})
//! ```
//!
//! the solution of `f' = delta f (1 - f)`, `f(0) = p`. The three routes are
//! independent implementations and are cross-checked in the test suites.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::util::{validate_probes, validate_time};

/// Parameters of the mean-field flow: attachment rate `lambda`, detachment
/// rate `theta`, initial density `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldParams {
    lambda: f64,
    theta: f64,
    p: f64,
}

impl MeanFieldParams {
    /// Requires `lambda >= theta > 0` (swap the spin roles to express the
    /// opposite bias) and `0 < p < 1`.
    pub fn new(lambda: f64, theta: f64, p: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::invalid("theta", "must be positive and finite"));
        }
        if !lambda.is_finite() || lambda < theta {
            return Err(Error::invalid(
                "lambda",
                "must satisfy lambda >= theta (relabel spins for the opposite bias)",
            ));
        }
        if p.is_nan() || p <= 0.0 || p >= 1.0 {
            return Err(Error::invalid("p", "initial density must lie in (0, 1)"));
        }
        Ok(MeanFieldParams { lambda, theta, p })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn delta(&self) -> f64 {
        self.lambda - self.theta
    }
}

/// Closed-form density at time `t >= 0`.
///
/// Evaluated as `p / (p + (1-p) e^{-delta t})`, which stays in `[p, 1)` for
/// any bias without overflowing, even for large `delta * t`.
pub fn f_closed(t: f64, params: &MeanFieldParams) -> f64 {
    debug_assert!(t >= 0.0 && t.is_finite());
    let p = params.p();
    let decay = (-params.delta() * t).exp();
    p / (p + (1.0 - p) * decay)
}

/// Density at `t` by fixed-step fourth-order Runge-Kutta on the logistic
/// flow. The requested `step` is an upper bound: the interval is split into
/// equal steps no longer than it. Exists as an independent check on
/// [`f_closed`]; agreement is asserted by the verification suite.
pub fn f_ode(t: f64, params: &MeanFieldParams, step: f64) -> Result<f64> {
    validate_time("t", t)?;
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::invalid("step", "must be positive and finite"));
    }
    if t == 0.0 {
        return Ok(params.p());
    }
    let delta = params.delta();
    let rhs = |f: f64| delta * f * (1.0 - f);
    let steps = (t / step).ceil() as u64;
    let h = t / steps as f64;
    let mut f = params.p();
    for _ in 0..steps {
        let k1 = rhs(f);
        let k2 = rhs(f + 0.5 * h * k1);
        let k3 = rhs(f + 0.5 * h * k2);
        let k4 = rhs(f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(f)
}

/// One trajectory of the two-rate density chain on `n` sites.
///
/// The chain moves `k -> k+1` at rate `lambda k (n-k) / n` and `k -> k-1` at
/// rate `theta k (n-k) / n`; the states `0` and `n` are absorbing. This is
/// exactly the law of the number of ones under the complete-graph spin
/// dynamics, collapsed to its density coordinate.
#[derive(Clone, Debug)]
pub struct DensityPath {
    /// Number of sites `n`.
    pub population: u64,
    /// Count of ones at time 0 (binomial-`p` initial condition).
    pub initial_count: u64,
    /// `(event time, count after the event)`, strictly increasing in time.
    pub events: Vec<(f64, u64)>,
    /// Counts observed at the requested probe times.
    pub probe_counts: Vec<(f64, u64)>,
}

impl DensityPath {
    /// Count in effect at time `t` (right-continuous in the events).
    pub fn count_at(&self, t: f64) -> u64 {
        let mut k = self.initial_count;
        for &(s, c) in &self.events {
            if s > t {
                break;
            }
            k = c;
        }
        k
    }
}

/// Runs the chain to `t_end`, capturing counts at each probe time.
pub fn run_density_chain(
    n: u64,
    params: &MeanFieldParams,
    t_end: f64,
    probes: &[f64],
    rng: &mut RngStream,
) -> Result<DensityPath> {
    if n < 2 {
        return Err(Error::invalid("n", "density chain needs at least 2 sites"));
    }
    validate_time("t_end", t_end)?;
    validate_probes(probes, t_end)?;

    let mut k: u64 = 0;
    for _ in 0..n {
        if rng.bernoulli(params.p()) {
            k += 1;
        }
    }
    let initial_count = k;

    let lambda = params.lambda();
    let theta = params.theta();
    let mut events = Vec::new();
    let mut probe_counts = Vec::with_capacity(probes.len());
    let mut next_probe = 0usize;
    let mut t = 0.0f64;

    loop {
        let pairs = (k * (n - k)) as f64 / n as f64;
        let up = lambda * pairs;
        let down = theta * pairs;
        let total = up + down;
        if total == 0.0 {
            // Absorbed at consensus; remaining probes see the frozen count.
            break;
        }
        let dt = rng.exp(total);
        let t_next = t + dt;
        while next_probe < probes.len() && probes[next_probe] < t_next {
            probe_counts.push((probes[next_probe], k));
            next_probe += 1;
        }
        if t_next > t_end {
            break;
        }
        t = t_next;
        if rng.uniform_f64() * total < up {
            k += 1;
        } else {
            k -= 1;
        }
        debug_assert!(k <= n);
        events.push((t, k));
    }
    while next_probe < probes.len() {
        probe_counts.push((probes[next_probe], k));
        next_probe += 1;
    }

    Ok(DensityPath {
        population: n,
        initial_count,
        events,
        probe_counts,
    })
}
