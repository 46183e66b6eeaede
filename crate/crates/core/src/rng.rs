//! Counter-based random streams.
//!
//! Every RR set `i` gets a stream keyed by `(global_seed, i)`. A draw is a
//! pure function of `(key, counter)`, so the coin attached to a given edge in
//! a given sample does not depend on which worker runs the sample or in what
//! order the edges are examined.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_GAMMA: u64 = 0xd1b5_4a32_d192_ed03;
const ROUND_GAMMA: u64 = 0x8cb9_2ba7_2f3d_8dd7;

/// Counter offset for per-node draws (LT in-edge selection). Edge draws use
/// the edge position itself, which is always far below this.
pub(crate) const NODE_DRAW_BASE: u64 = 1 << 62;
const ROOT_DRAW: u64 = u64::MAX;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A random stream for one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetStream {
    key: u64,
}

impl SetStream {
    pub fn new(global_seed: u64, index: u64) -> Self {
        let base = mix64(global_seed.wrapping_add(GAMMA));
        SetStream {
            key: mix64(base ^ index.wrapping_mul(STREAM_GAMMA).wrapping_add(GAMMA)),
        }
    }

    /// Independent stream for diffusion round `round`; round 0 is the stream itself.
    pub fn round(&self, round: u32) -> Self {
        if round == 0 {
            return *self;
        }
        SetStream {
            key: mix64(self.key ^ u64::from(round).wrapping_mul(ROUND_GAMMA)),
        }
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)),
        )
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draw attached to node `node` (one per node per sample).
    #[inline]
    pub fn node_uniform(&self, node: u32) -> f64 {
        self.uniform(NODE_DRAW_BASE + u64::from(node))
    }

    /// Uniform root in `[0, n)`.
    pub fn root(&self, n: usize) -> u32 {
        debug_assert!(n > 0);
        ((u128::from(self.bits(ROOT_DRAW)) * n as u128) >> 64) as u32
    }
}
