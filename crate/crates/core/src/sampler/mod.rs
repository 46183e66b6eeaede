//! Concurrent generation of random reverse-reachable (RR) sets.
//!
//! Each worker owns a bounded [`FrontierQueue`], a [`ReservoirQueue`] for
//! overflow, an epoch-stamped visited array, and a chunked scratch list for
//! the set under construction. Sets are sampled on the transpose graph: a
//! node's in-edges are scanned in batches of `lane_width`, and every edge
//! carries a coin drawn from the set's counter-based stream at the edge's
//! transpose position. The resulting set therefore depends only on
//! `(seed, set index)`, not on the worker that produced it or on the order
//! the frontier was drained.

mod queue;
mod store;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

pub use queue::{refill, spill, spill_threshold, FrontierQueue, ReservoirQueue};
pub use store::RrStore;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::rng::SetStream;

/// Diffusion model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Independent cascade.
    Ic,
    /// Linear threshold.
    Lt,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Ic => "ic",
            Model::Lt => "lt",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(Model::Ic),
            "lt" => Ok(Model::Lt),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

pub const DEFAULT_LANE_WIDTH: usize = 32;
pub const DEFAULT_QUEUE_CAPACITY: usize = 384;
const OVERSUBSCRIPTION: usize = 4;

/// Worker pool shape and the global seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerConfig {
    pub workers: usize,
    /// Edges expanded per batch.
    pub lane_width: usize,
    /// Frontier queue capacity.
    pub queue_capacity: usize,
    pub seed: u64,
}

impl Default for WorkerConfig {
    fn default() -> Self {
        WorkerConfig {
            workers: default_workers(),
            lane_width: DEFAULT_LANE_WIDTH,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            seed: 0,
        }
    }
}

/// Hardware threads times an oversubscription factor of 4.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        * OVERSUBSCRIPTION
}

impl WorkerConfig {
    pub fn with_workers(workers: usize, seed: u64) -> Self {
        WorkerConfig {
            workers,
            seed,
            ..WorkerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidParameter(
                "at least one worker required".into(),
            ));
        }
        if self.lane_width == 0 {
            return Err(Error::InvalidParameter(
                "lane width must be positive".into(),
            ));
        }
        if self.queue_capacity < 2 * self.lane_width {
            return Err(Error::InvalidParameter(format!(
                "queue capacity {} must be at least twice the lane width {}",
                self.queue_capacity, self.lane_width
            )));
        }
        Ok(())
    }

    /// A rayon pool with `workers` threads, for the selection phase.
    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))
    }
}

const TMP_CHUNK: usize = 256;

/// Growable scratch list of fixed-size chunks holding the set under
/// construction. Chunks are kept across samples.
#[derive(Debug, Default)]
pub struct RrTmp {
    chunks: Vec<[NodeId; TMP_CHUNK]>,
    len: usize,
}

impl RrTmp {
    #[inline]
    pub fn push(&mut self, v: NodeId) {
        let (chunk, slot) = (self.len / TMP_CHUNK, self.len % TMP_CHUNK);
        if chunk == self.chunks.len() {
            self.chunks.push([0; TMP_CHUNK]);
        }
        self.chunks[chunk][slot] = v;
        self.len += 1;
    }

    pub fn clear(&mut self) {
        self.len = 0;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.chunks
            .iter()
            .flat_map(|c| c.iter())
            .take(self.len)
            .copied()
    }

    pub fn append_to(&self, out: &mut Vec<NodeId>) {
        let full = self.len / TMP_CHUNK;
        for c in &self.chunks[..full] {
            out.extend_from_slice(&c[..]);
        }
        let rest = self.len % TMP_CHUNK;
        if rest > 0 {
            out.extend_from_slice(&self.chunks[full][..rest]);
        }
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        let mut v = Vec::with_capacity(self.len);
        self.append_to(&mut v);
        v
    }
}

/// Instrumentation gathered while sampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SamplerStats {
    pub samples: u64,
    pub max_frontier: usize,
    pub spills: u64,
    pub refills: u64,
}

impl SamplerStats {
    pub fn merge(&mut self, other: &SamplerStats) {
        self.samples += other.samples;
        self.max_frontier = self.max_frontier.max(other.max_frontier);
        self.spills += other.spills;
        self.refills += other.refills;
    }
}

/// Per-worker sampling scratch.
#[derive(Debug)]
pub struct RrSampler {
    frontier: FrontierQueue,
    reservoir: ReservoirQueue,
    lane_width: usize,
    visited: Vec<u32>,
    epoch: u32,
    rr_tmp: RrTmp,
    stats: SamplerStats,
}

impl RrSampler {
    pub fn new(n: usize, cfg: &WorkerConfig) -> Self {
        RrSampler {
            frontier: FrontierQueue::new(cfg.queue_capacity),
            reservoir: ReservoirQueue::new(cfg.lane_width),
            lane_width: cfg.lane_width,
            visited: vec![0; n],
            epoch: 0,
            rr_tmp: RrTmp::default(),
            stats: SamplerStats::default(),
        }
    }

    pub fn stats(&self) -> &SamplerStats {
        &self.stats
    }

    /// The most recently sampled set, in dequeue order.
    pub fn current(&self) -> &RrTmp {
        &self.rr_tmp
    }

    fn begin(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.visited.fill(0);
            self.epoch = 1;
        }
        self.frontier.clear();
        self.reservoir.clear();
        self.rr_tmp.clear();
        self.stats.samples += 1;
    }

    #[inline]
    fn visit(&mut self, v: NodeId) -> bool {
        let slot = &mut self.visited[v as usize];
        if *slot == self.epoch {
            return false;
        }
        *slot = self.epoch;
        true
    }

    #[inline]
    fn enqueue(&mut self, v: NodeId) {
        self.frontier.push(v);
        self.stats.max_frontier = self.stats.max_frontier.max(self.frontier.len());
    }

    /// Samples the IC RR set of `root`: randomized BFS over in-edges, each
    /// edge live iff its coin falls below its probability.
    pub fn sample_ic(&mut self, graph: &CsrGraph, root: NodeId, stream: &SetStream) -> &RrTmp {
        self.begin();
        let cols = graph.transpose_col_indices();
        let weights = graph.transpose_weights();
        self.visit(root);
        self.enqueue(root);
        while let Some(u) = self.frontier.pop_front() {
            self.rr_tmp.push(u);
            let range = graph.in_edge_range(u);
            let mut batch = range.start;
            while batch < range.end {
                if spill(&mut self.frontier, &mut self.reservoir) {
                    self.stats.spills += 1;
                }
                let end = (batch + self.lane_width).min(range.end);
                for pos in batch..end {
                    let v = cols[pos];
                    if self.visited[v as usize] == self.epoch {
                        continue;
                    }
                    if stream.uniform(pos as u64) < weights[pos] {
                        self.visit(v);
                        self.enqueue(v);
                    }
                }
                batch = end;
            }
            if refill(&mut self.frontier, &mut self.reservoir) {
                self.stats.refills += 1;
            }
        }
        &self.rr_tmp
    }

    /// Samples the LT RR set of `root`: a reverse random walk that picks at
    /// most one in-neighbor per step and stops on a revisit or when the draw
    /// lands beyond the total in-weight.
    pub fn sample_lt(&mut self, graph: &CsrGraph, root: NodeId, stream: &SetStream) -> &RrTmp {
        self.begin();
        let cols = graph.transpose_col_indices();
        let weights = graph.transpose_weights();
        self.visit(root);
        self.enqueue(root);
        while let Some(u) = self.frontier.pop_front() {
            self.rr_tmp.push(u);
            let range = graph.in_edge_range(u);
            let x = stream.node_uniform(u);
            if let Some(i) = select_in_edge(&weights[range.clone()], x) {
                let v = cols[range.start + i];
                if self.visit(v) {
                    self.enqueue(v);
                }
            }
        }
        &self.rr_tmp
    }

    pub fn sample(
        &mut self,
        graph: &CsrGraph,
        root: NodeId,
        model: Model,
        stream: &SetStream,
    ) -> &RrTmp {
        match model {
            Model::Ic => self.sample_ic(graph, root, stream),
            Model::Lt => self.sample_lt(graph, root, stream),
        }
    }
}

/// Index of the in-edge whose prefix interval of `weights` contains `x`, or
/// `None` when `x` lies at or beyond the total weight.
#[inline]
pub fn select_in_edge(weights: &[f64], x: f64) -> Option<usize> {
    let mut prefix = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        prefix += w;
        if x < prefix {
            return Some(i);
        }
    }
    None
}

/// Root of set `index` under `seed`.
pub fn root_for(n: usize, seed: u64, index: u64) -> NodeId {
    SetStream::new(seed, index).root(n)
}

/// Samples set `index` exactly as [`generate_rr_sets`] would.
pub fn sample_indexed(
    graph: &CsrGraph,
    model: Model,
    cfg: &WorkerConfig,
    index: u64,
) -> Vec<NodeId> {
    let mut sampler = RrSampler::new(graph.n(), cfg);
    let stream = SetStream::new(cfg.seed, index);
    let root = stream.root(graph.n());
    sampler.sample(graph, root, model, &stream).to_vec()
}

const BATCH_SETS: usize = 1 << 16;
const CLAIM: u64 = 32;

/// Runs `kernel` for every set index in `store.len()..count` across
/// `cfg.workers` threads and appends the results in index order.
///
/// The kernel appends the elements of set `index` to the buffer. Workers
/// claim indices from a shared counter and bump occurrence counters
/// atomically; offsets are assigned by index so the final layout does not
/// depend on scheduling.
pub(crate) fn fill_store<K>(
    store: &mut RrStore,
    count: usize,
    scratch_n: usize,
    cfg: &WorkerConfig,
    kernel: K,
) -> Result<SamplerStats>
where
    K: Fn(&mut RrSampler, u64, &mut Vec<NodeId>) + Sync,
{
    cfg.validate()?;
    if count > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "{count} sets exceed the 32-bit occurrence counters"
        )));
    }
    let mut stats = SamplerStats::default();
    if count <= store.len() {
        return Ok(stats);
    }
    let mut samplers: Vec<RrSampler> = (0..cfg.workers.min(count - store.len()))
        .map(|_| RrSampler::new(scratch_n, cfg))
        .collect();

    let mut batch_start = store.len();
    while batch_start < count {
        let batch_end = (batch_start + BATCH_SETS).min(count);
        let next = AtomicU64::new(batch_start as u64);
        let occur: &[AtomicU32] = &store.occur;
        let kernel = &kernel;
        let outputs: Vec<WorkerOutput> = std::thread::scope(|scope| {
            let handles: Vec<_> = samplers
                .iter_mut()
                .map(|sampler| {
                    let next = &next;
                    scope.spawn(move || {
                        let mut out = WorkerOutput::default();
                        loop {
                            let first = next.fetch_add(CLAIM, Ordering::Relaxed);
                            if first >= batch_end as u64 {
                                break;
                            }
                            let last = (first + CLAIM).min(batch_end as u64);
                            for index in first..last {
                                let start = out.data.len();
                                kernel(sampler, index, &mut out.data);
                                for &v in &out.data[start..] {
                                    occur[v as usize].fetch_add(1, Ordering::Relaxed);
                                }
                                out.records.push((index, start, out.data.len() - start));
                            }
                        }
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling worker panicked"))
                .collect()
        });

        let mut sizes = vec![0u64; batch_end - batch_start];
        for out in &outputs {
            for &(index, _, len) in &out.records {
                sizes[index as usize - batch_start] = len as u64;
            }
        }
        let added: u64 = sizes.iter().sum();
        store
            .data
            .try_reserve(added as usize)
            .map_err(|e| Error::OutOfMemory(format!("growing RR store: {e}")))?;
        store
            .offsets
            .try_reserve(sizes.len())
            .map_err(|e| Error::OutOfMemory(format!("growing RR offsets: {e}")))?;
        let base = store.data.len();
        let mut cursor = *store.offsets.last().unwrap();
        for s in &sizes {
            cursor += s;
            store.offsets.push(cursor);
        }
        store.data.resize(base + added as usize, 0);
        for out in &outputs {
            for &(index, start, len) in &out.records {
                let at = store.offsets[index as usize] as usize;
                store.data[at..at + len].copy_from_slice(&out.data[start..start + len]);
            }
        }
        batch_start = batch_end;
    }
    for s in &samplers {
        stats.merge(s.stats());
    }
    Ok(stats)
}

#[derive(Default)]
struct WorkerOutput {
    data: Vec<NodeId>,
    records: Vec<(u64, usize, usize)>,
}

/// Extends `store` to exactly `count` RR sets (no-op if it already has that
/// many). Set `i` is rooted at a uniform node drawn from the stream for
/// `(cfg.seed, i)`.
pub fn generate_rr_sets(
    graph: &CsrGraph,
    count: usize,
    model: Model,
    cfg: &WorkerConfig,
    store: &mut RrStore,
) -> Result<SamplerStats> {
    if graph.n() == 0 {
        return Err(Error::InvalidParameter("graph has no nodes".into()));
    }
    if store.universe() != graph.n() {
        return Err(Error::InvalidParameter(format!(
            "store universe {} does not match graph size {}",
            store.universe(),
            graph.n()
        )));
    }
    let n = graph.n();
    let seed = cfg.seed;
    fill_store(store, count, n, cfg, |sampler, index, out| {
        let stream = SetStream::new(seed, index);
        let root = stream.root(n);
        sampler.sample(graph, root, model, &stream).append_to(out);
    })
}
