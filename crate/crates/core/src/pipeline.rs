//! End-to-end runs: estimate the sample size, sample, select.

use std::cell::RefCell;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::estimator::{bootstrap, lambda_prime, lambda_star, EstimationTrace, ImmParams};
use crate::graph::CsrGraph;
use crate::sampler::{generate_rr_sets, Model, RrStore, SamplerStats};
use crate::selector::{select_seeds, SeedResult};

/// Wall-clock seconds per phase. Estimation rounds count toward the phase
/// they spend time in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub sampling_secs: f64,
    pub selection_secs: f64,
    pub total_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImmOutcome {
    pub result: SeedResult,
    pub trace: EstimationTrace,
    pub sampler: SamplerStats,
    pub timings: PhaseTimings,
}

/// Runs the whole pipeline and also returns the final store.
pub fn run_imm_with_store(graph: &CsrGraph, params: &ImmParams) -> Result<(ImmOutcome, RrStore)> {
    let start = Instant::now();
    let n = graph.n();
    params.validate(n)?;
    if params.model == Model::Lt {
        graph.check_lt_weights()?;
    }
    let lp = lambda_prime(n, params.k, params.epsilon, params.ell)?;
    let ls = lambda_star(n, params.k, params.epsilon, params.ell)?;
    let pool = params.workers.thread_pool()?;
    let mut store = RrStore::new(n);
    let mut timings = PhaseTimings::default();
    let mut stats = SamplerStats::default();

    let cell = RefCell::new((&mut store, &mut timings, &mut stats));
    let trace = bootstrap(
        n,
        params.epsilon,
        lp,
        ls,
        |theta| {
            let (store, timings, stats) = &mut *cell.borrow_mut();
            let t = Instant::now();
            let s = generate_rr_sets(graph, theta as usize, params.model, &params.workers, store)?;
            stats.merge(&s);
            timings.sampling_secs += t.elapsed().as_secs_f64();
            Ok(())
        },
        || {
            let (store, timings, _) = &mut *cell.borrow_mut();
            let t = Instant::now();
            let r = pool.install(|| select_seeds(store, params.k, graph))?;
            timings.selection_secs += t.elapsed().as_secs_f64();
            Ok(r.covered as f64 / store.len() as f64)
        },
    )?;

    let t = Instant::now();
    if store.len() > trace.theta as usize {
        store.truncate(trace.theta as usize);
    } else {
        stats.merge(&generate_rr_sets(
            graph,
            trace.theta as usize,
            params.model,
            &params.workers,
            &mut store,
        )?);
    }
    timings.sampling_secs += t.elapsed().as_secs_f64();
    let t = Instant::now();
    let result = pool.install(|| select_seeds(&store, params.k, graph))?;
    timings.selection_secs += t.elapsed().as_secs_f64();
    timings.total_secs = start.elapsed().as_secs_f64();
    Ok((
        ImmOutcome {
            result,
            trace,
            sampler: stats,
            timings,
        },
        store,
    ))
}

/// Selects `params.k` seeds with the `(1 - 1/e - eps)` guarantee.
pub fn run_imm(graph: &CsrGraph, params: &ImmParams) -> Result<ImmOutcome> {
    run_imm_with_store(graph, params).map(|(outcome, _)| outcome)
}
