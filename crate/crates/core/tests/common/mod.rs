//! Test-only oracles, kept independent of the code paths they check.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rrim::graph::{CsrGraph, NodeId, WeightScheme};
use rrim::SetStream;

/// Random directed graph with exactly `m` distinct non-loop edges and
/// probabilities drawn from `lo..hi`.
pub fn random_graph(rng: &mut impl Rng, n: usize, m: usize, lo: f64, hi: f64) -> CsrGraph {
    let mut pairs: Vec<(NodeId, NodeId)> = (0..n as NodeId)
        .flat_map(|u| {
            (0..n as NodeId)
                .filter(move |&v| v != u)
                .map(move |v| (u, v))
        })
        .collect();
    pairs.shuffle(rng);
    let edges: Vec<_> = pairs[..m.min(pairs.len())]
        .iter()
        .map(|&(u, v)| (u, v, rng.gen_range(lo..hi)))
        .collect();
    CsrGraph::from_edges(n, &edges, WeightScheme::FromFile).unwrap()
}

/// Edge list of `g` as (source, target, probability) in forward order.
pub fn edges_of(g: &CsrGraph) -> Vec<(NodeId, NodeId, f64)> {
    let mut out = Vec::new();
    for u in 0..g.n() as NodeId {
        let (t, w) = g.out_neighbors(u);
        for (&v, &p) in t.iter().zip(w) {
            out.push((u, v, p));
        }
    }
    out
}

/// Pr[u reaches v] in a random IC instance graph, by enumerating all 2^m
/// edge subsets.
pub fn reach_probability(g: &CsrGraph, u: NodeId, v: NodeId) -> f64 {
    let edges = edges_of(g);
    let m = edges.len();
    assert!(m <= 20);
    let mut total = 0.0;
    for mask in 0u32..1 << m {
        let mut prob = 1.0;
        let mut adj = vec![Vec::new(); g.n()];
        for (e, &(a, b, p)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                prob *= p;
                adj[a as usize].push(b);
            } else {
                prob *= 1.0 - p;
            }
        }
        let mut seen = vec![false; g.n()];
        let mut stack = vec![u];
        seen[u as usize] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        if seen[v as usize] {
            total += prob;
        }
    }
    total
}

/// Expected occurrence frequency of `u` in a random RR set:
/// (1/n) * sum over roots v of Pr[u reaches v].
pub fn root_marginal(g: &CsrGraph, u: NodeId) -> f64 {
    (0..g.n() as NodeId)
        .map(|v| reach_probability(g, u, v))
        .sum::<f64>()
        / g.n() as f64
}

/// Reverse BFS with an unbounded queue, using the same per-edge coins as the
/// sampler (coin of in-edge at transpose position `pos` is `stream.uniform(pos)`).
pub fn reference_rr_set(g: &CsrGraph, root: NodeId, stream: &SetStream) -> Vec<NodeId> {
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::from([root]);
    seen[root as usize] = true;
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        out.push(u);
        for pos in g.in_edge_range(u) {
            let v = g.transpose_col_indices()[pos];
            if !seen[v as usize] && stream.uniform(pos as u64) < g.transpose_weights()[pos] {
                seen[v as usize] = true;
                queue.push_back(v);
            }
        }
    }
    out
}

pub fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.sort_unstable();
    v
}

/// Largest number of sets covered by any k elements, by exhaustive search.
pub fn brute_force_max_cover(sets: &[Vec<NodeId>], universe: usize, k: usize) -> usize {
    let mut best = 0;
    rrim::oracle::for_each_combination(universe, k.min(universe), |chosen| {
        let covered = sets
            .iter()
            .filter(|s| s.iter().any(|v| chosen.contains(&(*v as usize))))
            .count();
        best = best.max(covered);
    });
    best
}

/// Pearson chi-square statistic for observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - alpha)
}

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic critical value.
pub fn ks_two_sample(a: &[u32], b: &[u32], alpha: f64) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let max = (*a.last().unwrap()).max(*b.last().unwrap());
    let mut d: f64 = 0.0;
    for x in 0..=max {
        let fa = a.partition_point(|&y| y <= x) as f64 / a.len() as f64;
        let fb = b.partition_point(|&y| y <= x) as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    (d, c * ((na + nb) / (na * nb)).sqrt())
}

/// Greedy max cover by recomputing every marginal gain from scratch; ties
/// go to the smallest id, and zero-gain slots to the largest `degree`.
pub fn naive_greedy(
    sets: &[Vec<NodeId>],
    universe: usize,
    k: usize,
    degree: &[usize],
) -> Vec<NodeId> {
    let mut covered = vec![false; sets.len()];
    let mut chosen: Vec<NodeId> = Vec::new();
    while chosen.len() < k {
        let gain = |v: NodeId| {
            sets.iter()
                .zip(&covered)
                .filter(|(s, c)| !**c && s.contains(&v))
                .count()
        };
        let best = (0..universe as NodeId)
            .filter(|v| !chosen.contains(v))
            .map(|v| (gain(v), v))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((g, v)) if g > 0 => {
                for (s, c) in sets.iter().zip(covered.iter_mut()) {
                    if s.contains(&v) {
                        *c = true;
                    }
                }
                chosen.push(v);
            }
            _ => break,
        }
    }
    let mut rest: Vec<NodeId> = (0..universe as NodeId)
        .filter(|v| !chosen.contains(v))
        .collect();
    rest.sort_by_key(|&v| (std::cmp::Reverse(degree[v as usize]), v));
    chosen.extend(rest.into_iter().take(k - chosen.len()));
    chosen
}

/// Per-node IC activation probabilities from `seeds`, by enumerating all
/// 2^m instance graphs.
pub fn reference_activation(g: &CsrGraph, seeds: &[NodeId]) -> Vec<f64> {
    let edges = edges_of(g);
    assert!(edges.len() <= 20);
    let mut out = vec![0.0; g.n()];
    for mask in 0u32..1 << edges.len() {
        let mut prob = 1.0;
        let mut adj = vec![Vec::new(); g.n()];
        for (e, &(a, b, p)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                prob *= p;
                adj[a as usize].push(b);
            } else {
                prob *= 1.0 - p;
            }
        }
        let mut seen = vec![false; g.n()];
        let mut queue: VecDeque<NodeId> = seeds.iter().copied().collect();
        for &s in seeds {
            seen[s as usize] = true;
        }
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        for (o, s) in out.iter_mut().zip(&seen) {
            if *s {
                *o += prob;
            }
        }
    }
    out
}

/// Expected IC spread of `seeds`, by enumerating all 2^m instance graphs.
pub fn reference_spread(g: &CsrGraph, seeds: &[NodeId]) -> f64 {
    reference_activation(g, seeds).iter().sum()
}

/// Random store of `count` sets over `universe` nodes, each set non-empty
/// with distinct members.
pub fn random_sets(rng: &mut impl Rng, universe: usize, count: usize) -> Vec<Vec<NodeId>> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=universe.min(4));
            let mut nodes: Vec<NodeId> = (0..universe as NodeId).collect();
            nodes.shuffle(rng);
            nodes.truncate(len);
            nodes
        })
        .collect()
}

/// Expected LT spread of `seeds` by enumerating every live-edge choice: each
/// node keeps at most one in-edge, edge `e` with probability `w_e`.
pub fn reference_lt_spread(g: &CsrGraph, seeds: &[NodeId]) -> f64 {
    let n = g.n();
    // per node: list of (source, probability) options, the last being "none"
    let options: Vec<Vec<(Option<NodeId>, f64)>> = (0..n as NodeId)
        .map(|v| {
            let (src, w) = g.in_neighbors(v);
            let mut o: Vec<_> = src.iter().zip(w).map(|(&u, &p)| (Some(u), p)).collect();
            o.push((None, 1.0 - w.iter().sum::<f64>()));
            o
        })
        .collect();
    let mut choice = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut prob = 1.0;
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            let (src, p) = options[v][choice[v]];
            prob *= p;
            if let Some(u) = src {
                adj[u as usize].push(v);
            }
        }
        if prob > 0.0 {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = seeds.iter().map(|&s| s as usize).collect();
            for &s in &stack {
                seen[s] = true;
            }
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            total += prob * seen.iter().filter(|&&s| s).count() as f64;
        }
        // odometer over choices
        let mut i = 0;
        loop {
            if i == n {
                return total;
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
