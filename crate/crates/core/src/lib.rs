//! Parallel influence maximization by reverse influence sampling.
//!
//! The pipeline samples random reverse-reachable sets on the transpose of a
//! CSR graph with a pool of workers ([`sampler`]), sizes the sample with a
//! bootstrapped lower bound on the optimal spread ([`estimator`]), and picks
//! seeds by counter-based greedy maximum coverage ([`selector`]). [`mrim`]
//! extends this to several diffusion rounds and [`oracle`] provides
//! independent ground truth.

pub mod error;
pub mod estimator;
pub mod graph;
pub mod mrim;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod sampler;
pub mod selector;

pub use error::{Error, Result};
pub use estimator::{estimate_theta, lambda_prime, lambda_star, EstimationTrace, ImmParams};
pub use graph::{barabasi_albert, load_edge_list, CsrGraph, NodeId, WeightScheme};
pub use mrim::{run_mrim, MrRrStore, MrSeedResult, MrimOutcome};
pub use oracle::{exact_opt, exact_spread, simulate_spread, SpreadEstimate};
pub use pipeline::{run_imm, run_imm_with_store, ImmOutcome, PhaseTimings};
pub use rng::SetStream;
pub use sampler::{generate_rr_sets, Model, RrSampler, RrStore, SamplerStats, WorkerConfig};
pub use selector::{select_seeds, SeedResult};
