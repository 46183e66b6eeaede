//! Ground truth for verification: forward Monte-Carlo diffusion, and exact
//! IC spread / optimum by enumerating instance graphs on tiny inputs.
//!
//! Nothing here touches the RR sampler, so it can be used to check it.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::sampler::Model;

pub const DEFAULT_TRIALS: usize = 10_000;
pub const MAX_EXACT_EDGES: usize = 20;
pub const MAX_OPT_NODES: usize = 12;
pub const MAX_OPT_EDGES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Streaming mean and variance (Welford, merged with Chan's update).
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count as f64 / count as f64,
            m2: self.m2 + other.m2 + d * d * (self.count * other.count) as f64 / count as f64,
        }
    }
}

fn check_seeds(graph: &CsrGraph, seeds: &[NodeId]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("seed set is empty".into()));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s as usize >= graph.n()) {
        return Err(Error::InvalidParameter(format!("seed {bad} not in graph")));
    }
    Ok(())
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One forward IC cascade: each newly active node tries each out-edge once.
fn cascade_ic(graph: &CsrGraph, seeds: &[NodeId], rng: &mut impl Rng, active: &mut [bool]) -> u32 {
    active.fill(false);
    let mut queue = VecDeque::new();
    let mut count = 0;
    for &s in seeds {
        if !active[s as usize] {
            active[s as usize] = true;
            queue.push_back(s);
            count += 1;
        }
    }
    while let Some(u) = queue.pop_front() {
        let (targets, probs) = graph.out_neighbors(u);
        for (&v, &p) in targets.iter().zip(probs) {
            if !active[v as usize] && rng.gen::<f64>() < p {
                active[v as usize] = true;
                queue.push_back(v);
                count += 1;
            }
        }
    }
    count
}

/// One forward LT diffusion with fresh uniform thresholds, run to fixpoint.
fn cascade_lt(
    graph: &CsrGraph,
    seeds: &[NodeId],
    rng: &mut impl Rng,
    active: &mut [bool],
    weight_in: &mut [f64],
    threshold: &mut [f64],
) -> u32 {
    active.fill(false);
    weight_in.fill(0.0);
    for t in threshold.iter_mut() {
        *t = rng.gen::<f64>();
    }
    let mut queue = VecDeque::new();
    let mut count = 0;
    for &s in seeds {
        if !active[s as usize] {
            active[s as usize] = true;
            queue.push_back(s);
            count += 1;
        }
    }
    while let Some(u) = queue.pop_front() {
        let (targets, probs) = graph.out_neighbors(u);
        for (&v, &p) in targets.iter().zip(probs) {
            let v = v as usize;
            if active[v] {
                continue;
            }
            weight_in[v] += p;
            if weight_in[v] >= threshold[v] {
                active[v] = true;
                queue.push_back(v as NodeId);
                count += 1;
            }
        }
    }
    count
}

/// Spread of each of `trials` independent forward diffusions.
pub fn simulate_spread_samples(
    graph: &CsrGraph,
    seeds: &[NodeId],
    model: Model,
    trials: usize,
    seed: u64,
) -> Result<Vec<u32>> {
    check_seeds(graph, seeds)?;
    if model == Model::Lt {
        graph.check_lt_weights()?;
    }
    let n = graph.n();
    Ok((0..trials as u64)
        .into_par_iter()
        .map_init(
            || (vec![false; n], vec![0.0; n], vec![0.0; n]),
            |(active, weight_in, threshold), t| {
                let mut rng = trial_rng(seed, t);
                match model {
                    Model::Ic => cascade_ic(graph, seeds, &mut rng, active),
                    Model::Lt => cascade_lt(graph, seeds, &mut rng, active, weight_in, threshold),
                }
            },
        )
        .collect())
}

/// Monte-Carlo estimate of the expected spread of `seeds`.
pub fn simulate_spread(
    graph: &CsrGraph,
    seeds: &[NodeId],
    model: Model,
    trials: usize,
    seed: u64,
) -> Result<SpreadEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "at least one trial required".into(),
        ));
    }
    let samples = simulate_spread_samples(graph, seeds, model, trials, seed)?;
    Ok(summarize(&samples))
}

fn summarize(samples: &[u32]) -> SpreadEstimate {
    let m = samples
        .par_chunks(4096)
        .map(|chunk| {
            let mut m = Moments::default();
            for &x in chunk {
                m.push(x as f64);
            }
            m
        })
        .reduce(Moments::default, Moments::merge);
    let var = if m.count > 1 {
        m.m2 / (m.count - 1) as f64
    } else {
        0.0
    };
    SpreadEstimate {
        mean: m.mean,
        std_error: (var / m.count as f64).sqrt(),
        trials: samples.len(),
    }
}

/// Monte-Carlo estimate of the number of nodes active in at least one of
/// several independent diffusions, one per entry of `per_round`.
pub fn simulate_union_spread(
    graph: &CsrGraph,
    per_round: &[Vec<NodeId>],
    model: Model,
    trials: usize,
    seed: u64,
) -> Result<SpreadEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "at least one trial required".into(),
        ));
    }
    for seeds in per_round {
        check_seeds(graph, seeds)?;
    }
    if model == Model::Lt {
        graph.check_lt_weights()?;
    }
    let n = graph.n();
    let samples: Vec<u32> = (0..trials as u64)
        .into_par_iter()
        .map_init(
            || (vec![false; n], vec![false; n], vec![0.0; n], vec![0.0; n]),
            |(union, active, weight_in, threshold), t| {
                let mut rng = trial_rng(seed, t);
                union.fill(false);
                for seeds in per_round {
                    match model {
                        Model::Ic => cascade_ic(graph, seeds, &mut rng, active),
                        Model::Lt => {
                            cascade_lt(graph, seeds, &mut rng, active, weight_in, threshold)
                        }
                    };
                    for (u, &a) in union.iter_mut().zip(active.iter()) {
                        *u |= a;
                    }
                }
                union.iter().filter(|&&u| u).count() as u32
            },
        )
        .collect();
    Ok(summarize(&samples))
}

/// Nodes reachable from `seeds` over edges marked live in `live` (indexed
/// by forward edge position).
pub fn reachable_count(graph: &CsrGraph, seeds: &[NodeId], live: &[bool]) -> u32 {
    let mut seen = vec![false; graph.n()];
    let mut stack: Vec<NodeId> = Vec::new();
    let mut count = 0;
    for &s in seeds {
        if !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
            count += 1;
        }
    }
    while let Some(u) = stack.pop() {
        for e in graph.out_edge_range(u) {
            let v = graph.col_indices()[e] as usize;
            if live[e] && !seen[v] {
                seen[v] = true;
                stack.push(v as NodeId);
                count += 1;
            }
        }
    }
    count
}

/// Spreads obtained by first sampling a whole instance graph (every edge
/// kept independently) and then counting nodes reachable from `seeds`.
/// Same distribution as [`simulate_spread_samples`] under IC, different route.
pub fn instance_graph_spreads(
    graph: &CsrGraph,
    seeds: &[NodeId],
    trials: usize,
    seed: u64,
) -> Result<Vec<u32>> {
    check_seeds(graph, seeds)?;
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let live: Vec<bool> = graph
                .weights()
                .iter()
                .map(|&p| rng.gen::<f64>() < p)
                .collect();
            reachable_count(graph, seeds, &live)
        })
        .collect())
}

fn instance_probability(weights: &[f64], mask: u32) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(e, &p)| if mask >> e & 1 == 1 { p } else { 1.0 - p })
        .product()
}

/// Exact expected IC spread by summing over all `2^m` instance graphs.
pub fn exact_spread(graph: &CsrGraph, seeds: &[NodeId]) -> Result<f64> {
    check_seeds(graph, seeds)?;
    let m = graph.m();
    if m > MAX_EXACT_EDGES {
        return Err(Error::TooLarge(format!(
            "{m} edges, at most {MAX_EXACT_EDGES} supported"
        )));
    }
    let total: f64 = (0..1u32 << m)
        .into_par_iter()
        .map_init(
            || vec![false; m],
            |live, mask| {
                let prob = instance_probability(graph.weights(), mask);
                if prob == 0.0 {
                    return 0.0;
                }
                for (e, l) in live.iter_mut().enumerate() {
                    *l = mask >> e & 1 == 1;
                }
                prob * reachable_count(graph, seeds, live) as f64
            },
        )
        .sum();
    Ok(total)
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best `k`-seed set and its exact expected IC spread, by exhaustive search.
/// Ties go to the lexicographically smallest set.
pub fn exact_opt(graph: &CsrGraph, k: usize) -> Result<(Vec<NodeId>, f64)> {
    let (n, m) = (graph.n(), graph.m());
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k={k} must lie in [1, {n}]"
        )));
    }
    if n > MAX_OPT_NODES || m > MAX_OPT_EDGES {
        return Err(Error::TooLarge(format!(
            "n={n}, m={m}; at most {MAX_OPT_NODES} nodes and {MAX_OPT_EDGES} edges supported"
        )));
    }
    // per instance graph: probability and the reachability closure of every node
    let instances: Vec<(f64, Vec<u16>)> = (0..1u32 << m)
        .map(|mask| {
            let live: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
            let closure = (0..n as NodeId)
                .map(|v| reach_mask(graph, v, &live))
                .collect();
            (instance_probability(graph.weights(), mask), closure)
        })
        .filter(|(p, _)| *p > 0.0)
        .collect();
    let mut best: Option<(Vec<NodeId>, f64)> = None;
    for_each_combination(n, k, |subset| {
        let value: f64 = instances
            .iter()
            .map(|(p, closure)| {
                let reach = subset.iter().fold(0u16, |acc, &s| acc | closure[s]);
                p * reach.count_ones() as f64
            })
            .sum();
        if best.as_ref().is_none_or(|(_, b)| value > b + 1e-12) {
            best = Some((subset.iter().map(|&s| s as NodeId).collect(), value));
        }
    });
    Ok(best.expect("at least one subset"))
}

fn reach_mask(graph: &CsrGraph, source: NodeId, live: &[bool]) -> u16 {
    let mut mask = 1u16 << source;
    let mut stack = vec![source];
    while let Some(u) = stack.pop() {
        for e in graph.out_edge_range(u) {
            let v = graph.col_indices()[e];
            if live[e] && mask >> v & 1 == 0 {
                mask |= 1 << v;
                stack.push(v);
            }
        }
    }
    mask
}
