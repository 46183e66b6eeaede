use std::io::Write;
use std::sync::atomic::{AtomicU32, Ordering};

use crate::graph::NodeId;

/// All sampled RR sets, concatenated, with an offsets index and per-element
/// occurrence counters.
///
/// Set `i` is `data[offsets[i]..offsets[i + 1]]`. `occur[v]` counts the sets
/// containing `v`. Elements are node ids for ordinary sampling and
/// `(node, round)` pair ids for multi-round sampling, so `universe` is the
/// number of distinct element ids.
#[derive(Debug)]
pub struct RrStore {
    universe: usize,
    pub(crate) data: Vec<NodeId>,
    pub(crate) offsets: Vec<u64>,
    pub(crate) occur: Vec<AtomicU32>,
}

impl Clone for RrStore {
    fn clone(&self) -> Self {
        RrStore {
            universe: self.universe,
            data: self.data.clone(),
            offsets: self.offsets.clone(),
            occur: self
                .occur
                .iter()
                .map(|c| AtomicU32::new(c.load(Ordering::Relaxed)))
                .collect(),
        }
    }
}

impl PartialEq for RrStore {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe
            && self.data == other.data
            && self.offsets == other.offsets
            && self.occurrences() == other.occurrences()
    }
}

impl RrStore {
    pub fn new(universe: usize) -> Self {
        RrStore {
            universe,
            data: Vec::new(),
            offsets: vec![0],
            occur: (0..universe).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    /// Builds a store from explicit sets. Each set must be non-empty and
    /// duplicate-free.
    pub fn from_sets<S: AsRef<[NodeId]>>(universe: usize, sets: &[S]) -> Self {
        let mut store = RrStore::new(universe);
        for s in sets {
            store.push_set(s.as_ref());
        }
        store
    }

    pub(crate) fn push_set(&mut self, set: &[NodeId]) {
        debug_assert!(!set.is_empty());
        for &v in set {
            *self.occur[v as usize].get_mut() += 1;
        }
        self.data.extend_from_slice(set);
        self.offsets.push(self.data.len() as u64);
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Number of completed sets.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of stored element ids.
    pub fn tail(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[NodeId] {
        &self.data
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn set(&self, i: usize) -> &[NodeId] {
        &self.data[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn sets(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        (0..self.len()).map(move |i| self.set(i))
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

    /// Keeps only the first `count` sets.
    pub fn truncate(&mut self, count: usize) {
        if count >= self.len() {
            return;
        }
        let cut = self.offsets[count] as usize;
        for &v in &self.data[cut..] {
            *self.occur[v as usize].get_mut() -= 1;
        }
        self.data.truncate(cut);
        self.offsets.truncate(count + 1);
    }

    /// Number of sets containing at least one element of `members`.
    pub fn count_intersecting(&self, members: &[NodeId]) -> usize {
        let mut mask = vec![false; self.universe];
        for &v in members {
            mask[v as usize] = true;
        }
        self.sets()
            .filter(|s| s.iter().any(|&v| mask[v as usize]))
            .count()
    }

    /// Verifies the structural invariants: strictly increasing offsets,
    /// duplicate-free sets, and counters equal to recomputed membership.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.offsets.first() != Some(&0) {
            return Err("offsets must start at 0".into());
        }
        if *self.offsets.last().unwrap() as usize != self.data.len() {
            return Err("last offset must equal tail".into());
        }
        if self.offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err("offsets not strictly increasing".into());
        }
        let mut seen = vec![u64::MAX; self.universe];
        let mut counts = vec![0u32; self.universe];
        for (i, s) in self.sets().enumerate() {
            for &v in s {
                let v = v as usize;
                if v >= self.universe {
                    return Err(format!("set {i} holds element {v} outside universe"));
                }
                if seen[v] == i as u64 {
                    return Err(format!("set {i} repeats element {v}"));
                }
                seen[v] = i as u64;
                counts[v] += 1;
            }
        }
        if counts != self.occurrences() {
            return Err("occurrence counters disagree with set contents".into());
        }
        Ok(())
    }

    /// Debug dump: one "i: v1 v2 ..." line per set.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, s) in self.sets().enumerate() {
            write!(out, "{i}:")?;
            for v in s {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_sets_counts_and_dump() {
        let s = RrStore::from_sets(4, &[vec![1, 2], vec![2, 3], vec![2]]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.tail(), 5);
        assert_eq!(s.offsets(), &[0, 2, 4, 5]);
        assert_eq!(s.occurrences(), vec![0, 1, 3, 1]);
        s.check_invariants().unwrap();
        let mut buf = Vec::new();
        s.write_dump(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0: 1 2\n1: 2 3\n2: 2\n");
        assert_eq!(s.count_intersecting(&[3]), 1);
        assert_eq!(s.count_intersecting(&[1, 3]), 2);
    }

    #[test]
    fn truncate_keeps_counters_consistent() {
        let mut s = RrStore::from_sets(4, &[vec![1, 2], vec![2, 3], vec![0]]);
        s.truncate(1);
        assert_eq!(s.len(), 1);
        assert_eq!(s.occurrences(), vec![0, 1, 1, 0]);
        s.check_invariants().unwrap();
        s.truncate(5);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn invariant_violations_detected() {
        let mut s = RrStore::from_sets(3, &[vec![0, 1]]);
        s.data[1] = 0;
        assert!(s.check_invariants().unwrap_err().contains("repeats"));
        let mut s = RrStore::from_sets(3, &[vec![0, 1]]);
        *s.occur[2].get_mut() = 1;
        assert!(s.check_invariants().is_err());
    }
}
