//! Multi-round influence maximization.
//!
//! `T` independent diffusion rounds run on the same graph; a node counts once
//! if it is influenced in any round. RR sets range over `(node, round)`
//! pairs: one root, one independent reverse sample per round, all pairs
//! unioned. Pair `(v, t)` is stored as the element id `t * n + v`, so with
//! `T = 1` every structure coincides with the single-round one.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{bootstrap, lambda_prime, lambda_star, EstimationTrace, ImmParams};
use crate::graph::{CsrGraph, NodeId};
use crate::pipeline::PhaseTimings;
use crate::rng::SetStream;
use crate::sampler::{fill_store, Model, RrSampler, RrStore, SamplerStats, WorkerConfig};
use crate::selector::{degree_fill_order, CoverageState};

/// RR store over `(node, round)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct MrRrStore {
    n: usize,
    rounds: u32,
    store: RrStore,
}

impl MrRrStore {
    pub fn new(n: usize, rounds: u32) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidParameter(
                "at least one round required".into(),
            ));
        }
        let universe = n
            .checked_mul(rounds as usize)
            .filter(|&u| u <= NodeId::MAX as usize)
            .ok_or_else(|| Error::InvalidParameter("n * rounds exceeds the id range".into()))?;
        Ok(MrRrStore {
            n,
            rounds,
            store: RrStore::new(universe),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// The underlying store of encoded pair ids.
    pub fn inner(&self) -> &RrStore {
        &self.store
    }

    pub fn pair_id(&self, node: NodeId, round: u32) -> NodeId {
        round * self.n as NodeId + node
    }

    pub fn decode(&self, pair: NodeId) -> (NodeId, u32) {
        (pair % self.n as NodeId, pair / self.n as NodeId)
    }

    pub fn set_pairs(&self, i: usize) -> Vec<(NodeId, u32)> {
        self.store.set(i).iter().map(|&p| self.decode(p)).collect()
    }

    pub fn truncate(&mut self, count: usize) {
        self.store.truncate(count);
    }
}

fn sample_pairs_into(
    sampler: &mut RrSampler,
    graph: &CsrGraph,
    root: NodeId,
    rounds: u32,
    stream: &SetStream,
    model: Model,
    out: &mut Vec<NodeId>,
) {
    let n = graph.n() as NodeId;
    for t in 0..rounds {
        let set = sampler.sample(graph, root, model, &stream.round(t));
        out.extend(set.iter().map(|v| t * n + v));
    }
}

/// Union over `rounds` independent reverse samples from `root`, as
/// `(node, round)` pairs.
pub fn sample_mr_rr_set(
    graph: &CsrGraph,
    root: NodeId,
    rounds: u32,
    stream: &SetStream,
    model: Model,
) -> Vec<(NodeId, u32)> {
    let n = graph.n() as NodeId;
    let mut sampler = RrSampler::new(graph.n(), &WorkerConfig::with_workers(1, 0));
    let mut out = Vec::new();
    sample_pairs_into(&mut sampler, graph, root, rounds, stream, model, &mut out);
    out.into_iter().map(|p| (p % n, p / n)).collect()
}

/// Extends `store` to exactly `count` multi-round sets.
pub fn generate_mr_rr_sets(
    graph: &CsrGraph,
    count: usize,
    model: Model,
    cfg: &WorkerConfig,
    store: &mut MrRrStore,
) -> Result<SamplerStats> {
    if graph.n() == 0 || graph.n() != store.n {
        return Err(Error::InvalidParameter(
            "store does not belong to this graph".into(),
        ));
    }
    let (n, rounds, seed) = (graph.n(), store.rounds, cfg.seed);
    fill_store(&mut store.store, count, n, cfg, |sampler, index, out| {
        let stream = SetStream::new(seed, index);
        let root = stream.root(n);
        sample_pairs_into(sampler, graph, root, rounds, &stream, model, out);
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MrSeedResult {
    /// Seeds of each round, in pick order.
    pub per_round: Vec<Vec<NodeId>>,
    pub original_per_round: Vec<Vec<u64>>,
    /// `(node, round)` picks in order, with the sets each newly covered.
    pub picks: Vec<(NodeId, u32, u64)>,
    pub theta: u64,
    pub covered: u64,
    /// Estimated number of nodes influenced in at least one round.
    pub spread_estimate: f64,
}

/// Greedy coverage over pairs with at most `k` seeds per round; rounds that
/// run out of coverage are filled by out-degree.
pub fn select_mr_seeds(store: &MrRrStore, k: usize, graph: &CsrGraph) -> Result<MrSeedResult> {
    let n = graph.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k={k} must lie in [1, {n}] per round"
        )));
    }
    if store.n != n {
        return Err(Error::InvalidParameter(
            "store does not belong to this graph".into(),
        ));
    }
    let rounds = store.rounds as usize;
    let state = CoverageState::new(&store.store);
    let mut excluded = vec![false; n * rounds];
    let mut per_round: Vec<Vec<NodeId>> = vec![Vec::with_capacity(k); rounds];
    let mut picks = Vec::with_capacity(k * rounds);
    let mut covered = 0u64;
    while picks.len() < k * rounds {
        let pair = state.argmax(&excluded)?;
        if state.occurrence(pair) == 0 {
            break;
        }
        let newly = state.retire_covered(&store.store, pair);
        excluded[pair as usize] = true;
        let (v, t) = store.decode(pair);
        per_round[t as usize].push(v);
        picks.push((v, t, newly));
        covered += newly;
        if per_round[t as usize].len() == k {
            excluded[t as usize * n..(t as usize + 1) * n].fill(true);
        }
    }
    if picks.len() < k * rounds {
        let order = degree_fill_order(graph);
        for (t, round) in per_round.iter_mut().enumerate() {
            for &v in &order {
                if round.len() == k {
                    break;
                }
                let pair = t * n + v as usize;
                if !excluded[pair] {
                    excluded[pair] = true;
                    round.push(v);
                    picks.push((v, t as u32, 0));
                }
            }
        }
    }
    let theta = store.len() as u64;
    Ok(MrSeedResult {
        original_per_round: per_round
            .iter()
            .map(|r| r.iter().map(|&v| graph.original_id(v)).collect())
            .collect(),
        per_round,
        picks,
        theta,
        covered,
        spread_estimate: if theta == 0 {
            0.0
        } else {
            n as f64 * covered as f64 / theta as f64
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MrimOutcome {
    pub result: MrSeedResult,
    pub trace: EstimationTrace,
    pub sampler: SamplerStats,
    pub timings: PhaseTimings,
}

/// Full multi-round pipeline. The sample-size constants use the pair ground
/// set: `n * rounds` elements and `k * rounds` picks.
pub fn run_mrim(graph: &CsrGraph, params: &ImmParams, rounds: u32) -> Result<MrimOutcome> {
    let start = Instant::now();
    let n = graph.n();
    params.validate(n)?;
    if params.model == Model::Lt {
        graph.check_lt_weights()?;
    }
    let mut store = MrRrStore::new(n, rounds)?;
    let ground = n * rounds as usize;
    let picks = params.k * rounds as usize;
    let lp = lambda_prime(ground, picks, params.epsilon, params.ell)?;
    let ls = lambda_star(ground, picks, params.epsilon, params.ell)?;
    let pool = params.workers.thread_pool()?;
    let mut timings = PhaseTimings::default();
    let mut stats = SamplerStats::default();

    let cell = std::cell::RefCell::new((&mut store, &mut timings, &mut stats));
    let trace = bootstrap(
        n,
        params.epsilon,
        lp,
        ls,
        |theta| {
            let (store, timings, stats) = &mut *cell.borrow_mut();
            let t = Instant::now();
            let s =
                generate_mr_rr_sets(graph, theta as usize, params.model, &params.workers, store)?;
            stats.merge(&s);
            timings.sampling_secs += t.elapsed().as_secs_f64();
            Ok(())
        },
        || {
            let (store, timings, _) = &mut *cell.borrow_mut();
            let t = Instant::now();
            let r = pool.install(|| select_mr_seeds(store, params.k, graph))?;
            timings.selection_secs += t.elapsed().as_secs_f64();
            Ok(r.covered as f64 / store.len() as f64)
        },
    )?;

    let t = Instant::now();
    if store.len() > trace.theta as usize {
        store.truncate(trace.theta as usize);
    } else {
        stats.merge(&generate_mr_rr_sets(
            graph,
            trace.theta as usize,
            params.model,
            &params.workers,
            &mut store,
        )?);
    }
    timings.sampling_secs += t.elapsed().as_secs_f64();
    let t = Instant::now();
    let result = pool.install(|| select_mr_seeds(&store, params.k, graph))?;
    timings.selection_secs += t.elapsed().as_secs_f64();
    timings.total_secs = start.elapsed().as_secs_f64();
    Ok(MrimOutcome {
        result,
        trace,
        sampler: stats,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightScheme;
    use crate::sampler::{generate_rr_sets, RrSampler};
    use crate::selector::select_seeds;

    fn diamond(p: f64) -> CsrGraph {
        CsrGraph::from_edges(
            4,
            &[(0, 1, p), (0, 2, p), (1, 3, p), (2, 3, p)],
            WeightScheme::FromFile,
        )
        .unwrap()
    }

    #[test]
    fn single_round_matches_plain_sample() {
        let g = diamond(0.5);
        let cfg = WorkerConfig::with_workers(1, 0);
        let mut sampler = RrSampler::new(4, &cfg);
        for i in 0..100 {
            let stream = SetStream::new(4, i);
            let plain = sampler.sample_ic(&g, 3, &stream).to_vec();
            let pairs = sample_mr_rr_set(&g, 3, 1, &stream, Model::Ic);
            assert_eq!(pairs, plain.iter().map(|&v| (v, 0)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_probability_rounds_hold_root_only() {
        let g = diamond(0.0);
        let pairs = sample_mr_rr_set(&g, 2, 4, &SetStream::new(0, 0), Model::Ic);
        assert_eq!(pairs, vec![(2, 0), (2, 1), (2, 2), (2, 3)]);
    }

    #[test]
    fn pair_encoding() {
        let s = MrRrStore::new(10, 3).unwrap();
        assert_eq!(s.pair_id(7, 2), 27);
        assert_eq!(s.decode(27), (7, 2));
        assert!(MrRrStore::new(10, 0).is_err());
    }

    #[test]
    fn single_round_store_and_selection_reduce() {
        let g = crate::graph::barabasi_albert(150, 2, 2, 8).unwrap();
        let cfg = WorkerConfig::with_workers(3, 5);
        let mut plain = RrStore::new(150);
        generate_rr_sets(&g, 3000, Model::Ic, &cfg, &mut plain).unwrap();
        let mut mr = MrRrStore::new(150, 1).unwrap();
        generate_mr_rr_sets(&g, 3000, Model::Ic, &cfg, &mut mr).unwrap();
        assert_eq!(mr.inner(), &plain);
        let a = select_seeds(&plain, 7, &g).unwrap();
        let b = select_mr_seeds(&mr, 7, &g).unwrap();
        assert_eq!(a.seeds, b.per_round[0]);
        assert_eq!(a.covered, b.covered);
        assert_eq!(a.spread_estimate, b.spread_estimate);
    }

    #[test]
    fn every_round_gets_k_seeds() {
        let g = diamond(0.5);
        let mut mr = MrRrStore::new(4, 3).unwrap();
        generate_mr_rr_sets(
            &g,
            500,
            Model::Ic,
            &WorkerConfig::with_workers(2, 1),
            &mut mr,
        )
        .unwrap();
        mr.inner().check_invariants().unwrap();
        let r = select_mr_seeds(&mr, 4, &g).unwrap();
        for round in &r.per_round {
            let mut s = round.clone();
            s.sort();
            assert_eq!(s, vec![0, 1, 2, 3]);
        }
        assert!(select_mr_seeds(&mr, 5, &g).is_err());
    }

    #[test]
    fn symmetric_rounds_pick_equivalent_nodes() {
        // two disjoint certain edges: 0->1 and 2->3; k=1 per round
        let g =
            CsrGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)], WeightScheme::FromFile).unwrap();
        let mut mr = MrRrStore::new(4, 2).unwrap();
        generate_mr_rr_sets(
            &g,
            4000,
            Model::Ic,
            &WorkerConfig::with_workers(1, 2),
            &mut mr,
        )
        .unwrap();
        let r = select_mr_seeds(&mr, 1, &g).unwrap();
        // every root's set holds its ancestor in both rounds, so the pair
        // counters of 0 and 2 dominate and the tie-break decides order
        let mut firsts: Vec<NodeId> = r.per_round.iter().map(|s| s[0]).collect();
        firsts.sort();
        assert!(firsts.iter().all(|&v| v == 0 || v == 2), "{firsts:?}");
    }
}
