//! Bounded frontier queue with a chunked overflow stack.
//!
//! The frontier holds at most `capacity` nodes. Before each batch of
//! `lane_width` edges is expanded, [`spill`] moves `lane_width` nodes to the
//! reservoir whenever the frontier holds more than `capacity - lane_width`,
//! so a full batch of discoveries always fits. [`refill`] brings one chunk
//! back once the frontier drains.

use crate::graph::NodeId;

/// Fixed-capacity circular queue of node ids.
#[derive(Clone, Debug)]
pub struct FrontierQueue {
    buf: Box<[NodeId]>,
    head: usize,
    len: usize,
}

impl FrontierQueue {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "frontier capacity must be positive");
        FrontierQueue {
            buf: vec![0; capacity].into_boxed_slice(),
            head: 0,
            len: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.buf.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn clear(&mut self) {
        self.head = 0;
        self.len = 0;
    }

    /// Appends at the back. Panics on overflow; callers keep the spill
    /// threshold so this never happens.
    #[inline]
    pub fn push(&mut self, v: NodeId) {
        assert!(self.len < self.buf.len(), "frontier queue overflow");
        let cap = self.buf.len();
        self.buf[(self.head + self.len) % cap] = v;
        self.len += 1;
    }

    #[inline]
    pub fn pop_front(&mut self) -> Option<NodeId> {
        if self.len == 0 {
            return None;
        }
        let v = self.buf[self.head];
        self.head = (self.head + 1) % self.buf.len();
        self.len -= 1;
        Some(v)
    }

    #[inline]
    pub fn pop_back(&mut self) -> Option<NodeId> {
        if self.len == 0 {
            return None;
        }
        self.len -= 1;
        Some(self.buf[(self.head + self.len) % self.buf.len()])
    }
}

/// Stack of full chunks of exactly `lane_width` node ids.
#[derive(Clone, Debug)]
pub struct ReservoirQueue {
    lane_width: usize,
    // flat storage; length is always a multiple of lane_width
    nodes: Vec<NodeId>,
}

impl ReservoirQueue {
    pub fn new(lane_width: usize) -> Self {
        assert!(lane_width > 0);
        ReservoirQueue {
            lane_width,
            nodes: Vec::new(),
        }
    }

    pub fn lane_width(&self) -> usize {
        self.lane_width
    }

    pub fn chunks(&self) -> usize {
        self.nodes.len() / self.lane_width
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
    }
}

/// Spill threshold `capacity - lane_width`.
#[inline]
pub fn spill_threshold(capacity: usize, lane_width: usize) -> usize {
    capacity - lane_width
}

/// Moves `lane_width` nodes from the frontier's tail into a new reservoir
/// chunk if the frontier holds more than the spill threshold. Returns whether
/// a spill happened.
#[inline]
pub fn spill(frontier: &mut FrontierQueue, reservoir: &mut ReservoirQueue) -> bool {
    let lane = reservoir.lane_width;
    if frontier.len() <= spill_threshold(frontier.capacity(), lane) {
        return false;
    }
    for _ in 0..lane {
        let v = frontier
            .pop_back()
            .expect("frontier above threshold holds a full lane");
        reservoir.nodes.push(v);
    }
    true
}

/// If the frontier is empty, moves the most recent reservoir chunk back into
/// it. Returns whether a refill happened.
#[inline]
pub fn refill(frontier: &mut FrontierQueue, reservoir: &mut ReservoirQueue) -> bool {
    if !frontier.is_empty() || reservoir.is_empty() {
        return false;
    }
    let start = reservoir.nodes.len() - reservoir.lane_width;
    for &v in &reservoir.nodes[start..] {
        frontier.push(v);
    }
    reservoir.nodes.truncate(start);
    true
}
