//! Sample-size estimation: bootstrap a lower bound on the optimal spread,
//! then size the final sample from it.
//!
//! Round `i` targets `x = n / 2^i`, extends the store to `ceil(lambda' / x)`
//! sets, runs greedy selection and accepts `x` when the estimated spread
//! clears `(1 + sqrt(2) * eps) * x`. The accepted estimate, discounted by the
//! same factor, becomes `LB`, and the final sample size is
//! `ceil(lambda* / LB)`.

use std::f64::consts::{E, LN_2, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::sampler::{generate_rr_sets, Model, RrStore, WorkerConfig};
use crate::selector::select_seeds;

/// Parameters of one influence maximization run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImmParams {
    pub k: usize,
    pub epsilon: f64,
    /// Failure exponent: the guarantee holds with probability `1 - n^-ell`.
    pub ell: f64,
    pub model: Model,
    pub workers: WorkerConfig,
}

impl ImmParams {
    pub fn new(k: usize, epsilon: f64) -> Self {
        ImmParams {
            k,
            epsilon,
            ell: 1.0,
            model: Model::Ic,
            workers: WorkerConfig::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.workers.seed
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidParameter(format!(
                "k={} must lie in [1, {n}]",
                self.k
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon={} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ell={} must be positive",
                self.ell
            )));
        }
        self.workers.validate()
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "C({n}, {k}) undefined: k > n"
        )));
    }
    let k = k.min(n - k);
    Ok((0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum())
}

/// Per-round sample constant:
/// `(2 + 2/3 eps') (ln C(n,k) + ell ln n + ln log2 n) n / eps'^2` with
/// `eps' = sqrt(2) eps`.
pub fn lambda_prime(n: usize, k: usize, epsilon: f64, ell: f64) -> Result<f64> {
    let eps = SQRT_2 * epsilon;
    let nf = n as f64;
    let log_term = ln_binomial(n, k)? + ell * nf.ln() + nf.log2().ln();
    Ok((2.0 + 2.0 / 3.0 * eps) * log_term * nf / (eps * eps))
}

/// Final sample constant:
/// `2n ((1 - 1/e) alpha + beta)^2 / eps^2` with `alpha = sqrt(ell ln n + ln 2)`
/// and `beta = sqrt((1 - 1/e)(ln C(n,k) + ell ln n + ln 2))`.
pub fn lambda_star(n: usize, k: usize, epsilon: f64, ell: f64) -> Result<f64> {
    let nf = n as f64;
    let c = 1.0 - 1.0 / E;
    let alpha = (ell * nf.ln() + LN_2).sqrt();
    let beta = (c * (ln_binomial(n, k)? + ell * nf.ln() + LN_2)).sqrt();
    Ok(2.0 * nf * (c * alpha + beta).powi(2) / (epsilon * epsilon))
}

/// Number of bootstrap rounds: every integer `i` with `1 <= i <= log2(n) - 1`.
pub fn round_count(n: usize) -> u32 {
    if n < 4 {
        0
    } else {
        n.ilog2() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u32,
    pub x: f64,
    /// `ceil(lambda' / x)`, the store size after this round.
    pub theta: u64,
    /// Fraction of stored sets covered by the round's seed set.
    pub coverage: f64,
    pub accepted: bool,
}

impl fmt::Display for RoundRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round={} x={} theta={} coverage={:.6} decision={}",
            self.round,
            self.x,
            self.theta,
            self.coverage,
            if self.accepted { "accept" } else { "reject" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationTrace {
    pub rounds: Vec<RoundRecord>,
    pub lambda_prime: f64,
    pub lambda_star: f64,
    pub lower_bound: f64,
    pub theta: u64,
}

/// The bootstrap loop, independent of what is being sampled.
///
/// `spread_scale` is the range of the spread estimate (`n`). `extend(t)`
/// must grow the sample to exactly `t` sets; `coverage()` selects seeds on
/// the current sample and returns the covered fraction.
pub(crate) fn bootstrap(
    spread_scale: usize,
    epsilon: f64,
    lambda_prime: f64,
    lambda_star: f64,
    mut extend: impl FnMut(u64) -> Result<()>,
    mut coverage: impl FnMut() -> Result<f64>,
) -> Result<EstimationTrace> {
    let n = spread_scale as f64;
    let discount = 1.0 + SQRT_2 * epsilon;
    let mut rounds = Vec::new();
    let mut lower_bound = 1.0;
    for i in 1..=round_count(spread_scale) {
        let x = n / 2f64.powi(i as i32);
        let theta = (lambda_prime / x).ceil() as u64;
        extend(theta)?;
        let fraction = coverage()?;
        let accepted = n * fraction >= discount * x;
        rounds.push(RoundRecord {
            round: i,
            x,
            theta,
            coverage: fraction,
            accepted,
        });
        if accepted {
            lower_bound = n * fraction / discount;
            break;
        }
    }
    Ok(EstimationTrace {
        rounds,
        lambda_prime,
        lambda_star,
        lower_bound,
        theta: (lambda_star / lower_bound).ceil() as u64,
    })
}

/// Runs the bootstrap on `graph`, accumulating samples in `store`, and
/// returns the final sample size with the per-round trace.
pub fn estimate_theta(
    graph: &CsrGraph,
    params: &ImmParams,
    store: &mut RrStore,
) -> Result<(u64, EstimationTrace)> {
    let n = graph.n();
    params.validate(n)?;
    let lp = lambda_prime(n, params.k, params.epsilon, params.ell)?;
    let ls = lambda_star(n, params.k, params.epsilon, params.ell)?;
    let store = std::cell::RefCell::new(store);
    let trace = bootstrap(
        n,
        params.epsilon,
        lp,
        ls,
        |theta| {
            generate_rr_sets(
                graph,
                theta as usize,
                params.model,
                &params.workers,
                &mut store.borrow_mut(),
            )
            .map(|_| ())
        },
        || {
            let store = store.borrow();
            let r = select_seeds(&store, params.k, graph)?;
            Ok(r.covered as f64 / store.len() as f64)
        },
    )?;
    Ok((trace.theta, trace))
}
