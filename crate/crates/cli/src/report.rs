//! JSON report layouts. Key names and order are fixed so runs can be diffed.

use rrim::{EstimationTrace, Model, PhaseTimings, SpreadEstimate};
use serde::Serialize;

#[derive(Serialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
    pub n: usize,
    pub m: usize,
    pub weights: String,
    pub undirected: bool,
}

#[derive(Serialize)]
pub struct ParamsEcho {
    pub k: usize,
    pub epsilon: f64,
    pub ell: f64,
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    pub seed: u64,
    /// As given on the command line, so reports do not depend on the host.
    pub workers: String,
    pub queue: usize,
    pub verify_trials: usize,
}

#[derive(Serialize)]
pub struct RoundSummary {
    pub round: u32,
    pub x: f64,
    pub theta: u64,
    pub coverage: f64,
    pub decision: &'static str,
}

#[derive(Serialize)]
pub struct TraceSummary {
    pub lambda_prime: f64,
    pub lambda_star: f64,
    pub lower_bound: f64,
    pub rounds: Vec<RoundSummary>,
}

impl From<&EstimationTrace> for TraceSummary {
    fn from(t: &EstimationTrace) -> Self {
        TraceSummary {
            lambda_prime: t.lambda_prime,
            lambda_star: t.lambda_star,
            lower_bound: t.lower_bound,
            rounds: t
                .rounds
                .iter()
                .map(|r| RoundSummary {
                    round: r.round,
                    x: r.x,
                    theta: r.theta,
                    coverage: r.coverage,
                    decision: if r.accepted { "accept" } else { "reject" },
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input: InputInfo,
    pub params: ParamsEcho,
    pub theta: u64,
    pub estimation: TraceSummary,
    pub seeds: Vec<u64>,
    pub marginal_coverage: Vec<u64>,
    pub spread_estimate: f64,
    pub verification: Option<SpreadEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<PhaseTimings>,
}

#[derive(Serialize)]
pub struct MrimReport {
    pub command: &'static str,
    pub input: InputInfo,
    pub params: ParamsEcho,
    pub theta: u64,
    pub estimation: TraceSummary,
    pub seeds_per_round: Vec<Vec<u64>>,
    pub spread_estimate: f64,
    pub verification: Option<SpreadEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<PhaseTimings>,
}

#[derive(Serialize)]
pub struct SpreadReport {
    pub command: &'static str,
    pub input: InputInfo,
    pub model: Model,
    pub seeds: Vec<u64>,
    pub seed: u64,
    pub estimate: SpreadEstimate,
}
