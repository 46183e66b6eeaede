mod common;

use std::f64::consts::SQRT_2;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrim::estimator::{estimate_theta, lambda_prime, lambda_star, round_count, ImmParams};
use rrim::graph::{barabasi_albert, CsrGraph, NodeId};
use rrim::oracle::{for_each_combination, simulate_spread};
use rrim::sampler::{generate_rr_sets, Model, RrStore, WorkerConfig};

fn params(k: usize, epsilon: f64, model: Model, seed: u64) -> ImmParams {
    ImmParams {
        model,
        workers: WorkerConfig::with_workers(2, seed),
        ..ImmParams::new(k, epsilon)
    }
}

/// Checks every trace invariant for one run and returns the store.
fn check_run(g: &CsrGraph, p: &ImmParams) -> RrStore {
    let n = g.n();
    let mut store = RrStore::new(n);
    let (theta, trace) = estimate_theta(g, p, &mut store).unwrap();
    let lp = lambda_prime(n, p.k, p.epsilon, p.ell).unwrap();
    let ls = lambda_star(n, p.k, p.epsilon, p.ell).unwrap();
    let discount = 1.0 + SQRT_2 * p.epsilon;
    assert!(trace.rounds.len() <= round_count(n) as usize);
    for (i, r) in trace.rounds.iter().enumerate() {
        let x = n as f64 / 2f64.powi(i as i32 + 1);
        assert_eq!(r.round, i as u32 + 1);
        assert_eq!(r.x, x);
        assert_eq!(r.theta, (lp / x).ceil() as u64);
        assert!((0.0..=1.0).contains(&r.coverage));
        assert_eq!(r.accepted, n as f64 * r.coverage >= discount * x);
        if i + 1 < trace.rounds.len() {
            assert!(!r.accepted);
            assert!(r.theta <= trace.rounds[i + 1].theta);
        }
    }
    match trace.rounds.last() {
        Some(last) if last.accepted => {
            assert_eq!(trace.lower_bound, n as f64 * last.coverage / discount);
            assert!(trace.lower_bound >= last.x);
        }
        Some(_) => {
            assert_eq!(trace.rounds.len(), round_count(n) as usize);
            assert_eq!(trace.lower_bound, 1.0);
        }
        None => assert_eq!(trace.lower_bound, 1.0),
    }
    assert!(trace.lower_bound > 0.0 && trace.lower_bound <= n as f64);
    assert_eq!(theta, (ls / trace.lower_bound).ceil() as u64);
    assert_eq!(trace.theta, theta);

    // sampling is cumulative: the store holds exactly the last round's target
    // and equals a single batch of that size
    let expect = trace.rounds.last().map_or(0, |r| r.theta) as usize;
    assert_eq!(store.len(), expect);
    let mut fresh = RrStore::new(n);
    generate_rr_sets(g, expect, p.model, &p.workers, &mut fresh).unwrap();
    assert_eq!(fresh, store);
    store
}

#[test]
fn trace_invariants_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for run in 0..12 {
        let n = rng.gen_range(4..=40);
        let m = rng.gen_range(n..=3 * n);
        let g = random_graph(&mut rng, n, m, 0.05, 0.6);
        let k = rng.gen_range(1..=3.min(n));
        let eps = [0.3, 0.5, 0.8][run % 3];
        check_run(&g, &params(k, eps, Model::Ic, run as u64));
    }
}

#[test]
fn trace_invariants_on_ba_graphs() {
    for (seed, model) in [(1, Model::Ic), (2, Model::Lt), (3, Model::Ic)] {
        let g = barabasi_albert(300, 2, 3, seed).unwrap();
        check_run(&g, &params(5, 0.4, model, seed));
    }
}

#[test]
fn fewer_than_four_nodes_skip_the_bootstrap() {
    let g =
        CsrGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)], rrim::WeightScheme::FromFile).unwrap();
    let store = check_run(&g, &params(1, 0.5, Model::Ic, 0));
    assert!(store.is_empty());
}

#[test]
fn round_targets_double() {
    let lp = lambda_prime(1024, 5, 0.2, 1.0).unwrap();
    let targets: Vec<u64> = (1..=round_count(1024))
        .map(|i| (lp / (1024.0 / 2f64.powi(i as i32))).ceil() as u64)
        .collect();
    assert_eq!(targets.len(), 9);
    for w in targets.windows(2) {
        assert!(w[1] >= 2 * w[0] - 1 && w[1] <= 2 * w[0]);
    }
}

#[test]
fn lower_bound_plug_in() {
    let lb = 100.0 * 0.6 / (1.0 + SQRT_2 * 0.1);
    assert!((lb - 52.566).abs() < 5e-4);
}

proptest! {
    #[test]
    fn lambdas_monotone(n in 4usize..5000, k in 1usize..20, e1 in 0.01f64..0.99, e2 in 0.01f64..0.99, ell in 0.1f64..3.0) {
        prop_assume!(k <= n / 2);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(lambda_star(n, k, lo, ell).unwrap() >= lambda_star(n, k, hi, ell).unwrap());
        prop_assert!(lambda_prime(n, k, lo, ell).unwrap() >= lambda_prime(n, k, hi, ell).unwrap());
        prop_assert!(lambda_star(n, k + 1, lo, ell).unwrap() >= lambda_star(n, k, lo, ell).unwrap());
        prop_assert!(lambda_star(n, k, lo, ell + 0.5).unwrap() >= lambda_star(n, k, lo, ell).unwrap());
        let ratio = lambda_star(n, k, lo / 2.0, ell).unwrap() / lambda_star(n, k, lo, ell).unwrap();
        prop_assert!((ratio - 4.0).abs() < 1e-9);
    }

    #[test]
    fn theta_decreases_with_lower_bound(ls in 1.0f64..1e9, a in 1.0f64..1e5, b in 1.0f64..1e5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!((ls / lo).ceil() >= (ls / hi).ceil());
    }
}

/// An upper confidence value for the optimal spread: screen every k-subset
/// with a modest number of trials, then re-estimate the best few precisely.
fn opt_upper(g: &CsrGraph, k: usize) -> f64 {
    let mut scored = Vec::new();
    let mut index = 0u64;
    for_each_combination(g.n(), k, |c| {
        let seeds: Vec<NodeId> = c.iter().map(|&v| v as NodeId).collect();
        let est = simulate_spread(g, &seeds, Model::Ic, 400, index).unwrap();
        scored.push((est.mean, seeds));
        index += 1;
    });
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored
        .iter()
        .take(8)
        .map(|(_, s)| {
            let est = simulate_spread(g, s, Model::Ic, 40_000, 7).unwrap();
            est.mean + 3.0 * est.std_error
        })
        .fold(0.0, f64::max)
}

#[test]
fn lower_bound_never_exceeds_optimum_on_ba_graph() {
    let g = barabasi_albert(50, 2, 2, 17).unwrap();
    let opt = opt_upper(&g, 2);
    let mut ok = 0;
    for run in 0..100 {
        let mut store = RrStore::new(50);
        let (_, trace) =
            estimate_theta(&g, &params(2, 0.1, Model::Ic, 1000 + run), &mut store).unwrap();
        if trace.lower_bound <= opt {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok}/100 runs had LB <= OPT ({opt})");
}
