//! Greedy maximum coverage over an [`RrStore`].
//!
//! Each pick takes the node with the largest occurrence counter, marks every
//! uncovered set containing it as covered, and decrements the counters of
//! all members of those sets.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::sampler::RrStore;

/// Outcome of seed selection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedResult {
    /// Selected dense node ids, in pick order.
    pub seeds: Vec<NodeId>,
    /// Selected seeds as original ids.
    pub original_seeds: Vec<u64>,
    /// Sets newly covered by each seed.
    pub marginal_coverage: Vec<u64>,
    /// Number of sets the selection ran on.
    pub theta: u64,
    pub covered: u64,
    /// `n * covered / theta`.
    pub spread_estimate: f64,
}

/// Mutable coverage state: a working copy of the occurrence counters plus
/// per-set covered flags.
#[derive(Debug)]
pub struct CoverageState {
    occur: Vec<AtomicU32>,
    covered: Vec<AtomicBool>,
}

impl CoverageState {
    pub fn new(store: &RrStore) -> Self {
        CoverageState {
            occur: store
                .occurrences()
                .into_iter()
                .map(AtomicU32::new)
                .collect(),
            covered: (0..store.len()).map(|_| AtomicBool::new(false)).collect(),
        }
    }

    pub fn occurrence(&self, v: NodeId) -> u32 {
        self.occur[v as usize].load(Ordering::Relaxed)
    }

    pub fn occurrences(&self) -> Vec<u32> {
        self.occur
            .iter()
            .map(|c| c.load(Ordering::Relaxed))
            .collect()
    }

    pub fn is_covered(&self, set: usize) -> bool {
        self.covered[set].load(Ordering::Relaxed)
    }

    pub fn argmax(&self, excluded: &[bool]) -> Result<NodeId> {
        argmax_by(self.occur.len(), excluded, |i| {
            self.occur[i].load(Ordering::Relaxed)
        })
    }

    /// Covers every uncovered set containing `u` and returns how many sets
    /// were newly covered. Sets are dealt to the current pool's threads by
    /// stride.
    pub fn retire_covered(&self, store: &RrStore, u: NodeId) -> u64 {
        let stride = rayon::current_num_threads().max(1);
        let count = store.len();
        (0..stride)
            .into_par_iter()
            .map(|lane| {
                let mut newly = 0u64;
                for i in (lane..count).step_by(stride) {
                    if self.covered[i].load(Ordering::Relaxed) {
                        continue;
                    }
                    let set = store.set(i);
                    if !set.contains(&u) {
                        continue;
                    }
                    // the flag swap makes a second retirement of the same set a no-op
                    if self.covered[i].swap(true, Ordering::AcqRel) {
                        continue;
                    }
                    for &w in set {
                        self.occur[w as usize].fetch_sub(1, Ordering::Relaxed);
                    }
                    newly += 1;
                }
                newly
            })
            .sum()
    }
}

const REDUCE_CHUNK: usize = 1 << 14;

/// Parallel arg-max over `0..len` skipping excluded entries; ties go to the
/// smallest index.
fn argmax_by(len: usize, excluded: &[bool], get: impl Fn(usize) -> u32 + Sync) -> Result<NodeId> {
    let better = |a: Option<(u32, usize)>, b: Option<(u32, usize)>| match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
            y
        } else {
            x
        }),
        (x, None) => x,
        (None, y) => y,
    };
    let partials: Vec<Option<(u32, usize)>> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            let mut best: Option<(u32, usize)> = None;
            for (i, &skip) in excluded.iter().enumerate().take(hi).skip(lo) {
                if skip {
                    continue;
                }
                let v = get(i);
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, i));
                }
            }
            best
        })
        .collect();
    partials
        .into_iter()
        .fold(None, better)
        .map(|(_, i)| i as NodeId)
        .ok_or_else(|| Error::InvalidParameter("every node is excluded".into()))
}

/// Non-excluded node with the largest counter, smallest id on ties.
pub fn argmax_occurrence(occur: &[u32], excluded: &[bool]) -> Result<NodeId> {
    assert_eq!(occur.len(), excluded.len());
    argmax_by(occur.len(), excluded, |i| occur[i])
}

/// Unselected nodes ordered by decreasing out-degree, then id.
pub(crate) fn degree_fill_order(graph: &CsrGraph) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..graph.n() as NodeId).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.out_degree(v)), v));
    order
}

/// Greedy k-cover on `store`. Once no remaining node covers a new set, the
/// remaining slots go to the highest out-degree unselected nodes.
pub fn select_seeds(store: &RrStore, k: usize, graph: &CsrGraph) -> Result<SeedResult> {
    let n = graph.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k={k} must lie in [1, {n}]"
        )));
    }
    if store.universe() != n {
        return Err(Error::InvalidParameter(
            "store does not belong to this graph".into(),
        ));
    }
    let state = CoverageState::new(store);
    let mut excluded = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    let mut marginal = Vec::with_capacity(k);
    let mut covered = 0u64;
    while seeds.len() < k {
        let u = state.argmax(&excluded)?;
        if state.occurrence(u) == 0 {
            break;
        }
        let newly = state.retire_covered(store, u);
        debug_assert_eq!(state.occurrence(u), 0);
        excluded[u as usize] = true;
        seeds.push(u);
        marginal.push(newly);
        covered += newly;
    }
    if seeds.len() < k {
        for v in degree_fill_order(graph) {
            if seeds.len() == k {
                break;
            }
            if !excluded[v as usize] {
                excluded[v as usize] = true;
                seeds.push(v);
                marginal.push(0);
            }
        }
    }
    let theta = store.len() as u64;
    let spread_estimate = if theta == 0 {
        0.0
    } else {
        n as f64 * covered as f64 / theta as f64
    };
    Ok(SeedResult {
        original_seeds: seeds.iter().map(|&v| graph.original_id(v)).collect(),
        seeds,
        marginal_coverage: marginal,
        theta,
        covered,
        spread_estimate,
    })
}
