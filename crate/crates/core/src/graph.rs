//! Compressed sparse row graphs with per-edge influence probabilities.
//!
//! A [`CsrGraph`] keeps both the forward adjacency (out-neighbors, used by
//! forward diffusion) and the transposed adjacency (in-neighbors, used by
//! reverse-reachable sampling). Rows are sorted by neighbor id so the
//! transpose of the transpose reproduces the original arrays exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// How edge probabilities are assigned at load time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightScheme {
    /// `p_uv = 1 / in_degree(v)`.
    WeightedCascade,
    /// Every edge gets the same probability.
    UniformConstant(f64),
    /// Probabilities are read from the third column of the edge list.
    FromFile,
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::UniformConstant(p) if !(0.0..=1.0).contains(&p) => Err(
                Error::InvalidParameter(format!("uniform probability {p} outside [0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

/// Directed graph in CSR form, plus its transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrGraph {
    row_offsets: Vec<usize>,
    col_indices: Vec<NodeId>,
    weights: Vec<f64>,
    t_row_offsets: Vec<usize>,
    t_col_indices: Vec<NodeId>,
    t_weights: Vec<f64>,
    /// Original id of every dense node id.
    original_ids: Vec<u64>,
}

/// Transposes CSR arrays with a stable counting sort. Rows of the result are
/// sorted by source id.
pub fn transpose_arrays(
    n: usize,
    row_offsets: &[usize],
    col_indices: &[NodeId],
    weights: &[f64],
) -> (Vec<usize>, Vec<NodeId>, Vec<f64>) {
    let m = col_indices.len();
    let mut t_offsets = vec![0usize; n + 1];
    for &v in col_indices {
        t_offsets[v as usize + 1] += 1;
    }
    for i in 0..n {
        t_offsets[i + 1] += t_offsets[i];
    }
    let mut cursor = t_offsets[..n].to_vec();
    let mut t_cols = vec![0 as NodeId; m];
    let mut t_weights = vec![0.0; m];
    for u in 0..n {
        for e in row_offsets[u]..row_offsets[u + 1] {
            let v = col_indices[e] as usize;
            let slot = cursor[v];
            cursor[v] += 1;
            t_cols[slot] = u as NodeId;
            t_weights[slot] = weights[e];
        }
    }
    (t_offsets, t_cols, t_weights)
}

impl CsrGraph {
    /// Builds a graph over dense ids `0..n`. Self-loops are dropped,
    /// duplicate edges keep their first occurrence, and `scheme` decides the
    /// final weights (`FromFile` keeps the given ones).
    pub fn from_edges(
        n: usize,
        edges: &[(NodeId, NodeId, f64)],
        scheme: WeightScheme,
    ) -> Result<Self> {
        let ids = (0..n as u64).collect();
        Self::build(n, edges.to_vec(), scheme, ids)
    }

    fn build(
        n: usize,
        mut edges: Vec<(NodeId, NodeId, f64)>,
        scheme: WeightScheme,
        original_ids: Vec<u64>,
    ) -> Result<Self> {
        scheme.validate()?;
        if n > NodeId::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "{n} nodes exceed the id range"
            )));
        }
        for &(u, v, p) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) outside node range {n}"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        edges.retain(|&(u, v, _)| u != v);
        // stable: the first occurrence of a duplicate survives dedup
        edges.sort_by_key(|&(u, v, _)| (u, v));
        edges.dedup_by_key(|&mut (u, v, _)| (u, v));

        let mut in_degree = vec![0usize; n];
        for &(_, v, _) in &edges {
            in_degree[v as usize] += 1;
        }
        let weight = |v: NodeId, p: f64| match scheme {
            WeightScheme::WeightedCascade => 1.0 / in_degree[v as usize] as f64,
            WeightScheme::UniformConstant(c) => c,
            WeightScheme::FromFile => p,
        };

        let mut row_offsets = vec![0usize; n + 1];
        for &(u, _, _) in &edges {
            row_offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let col_indices: Vec<NodeId> = edges.iter().map(|e| e.1).collect();
        let weights: Vec<f64> = edges.iter().map(|&(_, v, p)| weight(v, p)).collect();
        let (t_row_offsets, t_col_indices, t_weights) =
            transpose_arrays(n, &row_offsets, &col_indices, &weights);
        Ok(CsrGraph {
            row_offsets,
            col_indices,
            weights,
            t_row_offsets,
            t_col_indices,
            t_weights,
            original_ids,
        })
    }

    pub fn n(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[NodeId] {
        &self.col_indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn transpose_row_offsets(&self) -> &[usize] {
        &self.t_row_offsets
    }

    pub fn transpose_col_indices(&self) -> &[NodeId] {
        &self.t_col_indices
    }

    pub fn transpose_weights(&self) -> &[f64] {
        &self.t_weights
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn original_id(&self, v: NodeId) -> u64 {
        self.original_ids[v as usize]
    }

    /// Dense id of an original id, if present.
    pub fn dense_id(&self, original: u64) -> Option<NodeId> {
        // linear scan; only used for CLI lookups
        self.original_ids
            .iter()
            .position(|&o| o == original)
            .map(|i| i as NodeId)
    }

    /// Positions of `u`'s out-edges in the forward arrays.
    #[inline]
    pub fn out_edge_range(&self, u: NodeId) -> Range<usize> {
        self.row_offsets[u as usize]..self.row_offsets[u as usize + 1]
    }

    /// Positions of `v`'s in-edges in the transpose arrays.
    #[inline]
    pub fn in_edge_range(&self, v: NodeId) -> Range<usize> {
        self.t_row_offsets[v as usize]..self.t_row_offsets[v as usize + 1]
    }

    pub fn out_neighbors(&self, u: NodeId) -> (&[NodeId], &[f64]) {
        let r = self.out_edge_range(u);
        (&self.col_indices[r.clone()], &self.weights[r])
    }

    pub fn in_neighbors(&self, v: NodeId) -> (&[NodeId], &[f64]) {
        let r = self.in_edge_range(v);
        (&self.t_col_indices[r.clone()], &self.t_weights[r])
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_edge_range(u).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_edge_range(v).len()
    }

    /// The reversed graph. Its forward arrays are this graph's transpose arrays.
    pub fn transpose(&self) -> CsrGraph {
        let (t_row_offsets, t_col_indices, t_weights) = transpose_arrays(
            self.n(),
            &self.row_offsets,
            &self.col_indices,
            &self.weights,
        );
        let (row_offsets, col_indices, weights) =
            transpose_arrays(self.n(), &t_row_offsets, &t_col_indices, &t_weights);
        CsrGraph {
            row_offsets: t_row_offsets,
            col_indices: t_col_indices,
            weights: t_weights,
            t_row_offsets: row_offsets,
            t_col_indices: col_indices,
            t_weights: weights,
            original_ids: self.original_ids.clone(),
        }
    }

    /// Checks the linear-threshold constraint: in-weights of every node sum to at most one.
    pub fn check_lt_weights(&self) -> Result<()> {
        const SLACK: f64 = 1e-9;
        for v in 0..self.n() as NodeId {
            let total: f64 = self.in_neighbors(v).1.iter().sum();
            if total > 1.0 + SLACK {
                return Err(Error::Constraint(format!(
                    "in-weights of node {} sum to {total} > 1",
                    self.original_id(v)
                )));
            }
        }
        Ok(())
    }

    /// Checks all structural invariants; used by tests and after cache reload.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Cache(m));
        let n = self.n();
        for (offsets, cols, weights, what) in [
            (
                &self.row_offsets,
                &self.col_indices,
                &self.weights,
                "forward",
            ),
            (
                &self.t_row_offsets,
                &self.t_col_indices,
                &self.t_weights,
                "transpose",
            ),
        ] {
            if offsets.len() != n + 1 || offsets[0] != 0 || offsets[n] != cols.len() {
                return bad(format!("{what} offsets inconsistent"));
            }
            if offsets.windows(2).any(|w| w[0] > w[1]) {
                return bad(format!("{what} offsets decrease"));
            }
            if cols.iter().any(|&c| c as usize >= n) {
                return bad(format!("{what} column out of range"));
            }
            if weights.len() != cols.len() || weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return bad(format!("{what} weight out of range"));
            }
        }
        if self.original_ids.len() != n {
            return bad("id table length mismatch".into());
        }
        let expected = transpose_arrays(n, &self.row_offsets, &self.col_indices, &self.weights);
        if expected.0 != self.t_row_offsets
            || expected.1 != self.t_col_indices
            || expected.2 != self.t_weights
        {
            return bad("transpose does not match forward arrays".into());
        }
        Ok(())
    }

    /// Writes the graph as "u v p" lines using original ids. Edges are ordered
    /// so that reloading assigns the same dense ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.n();
        // group edges by their larger endpoint; node j is then introduced by
        // an edge to an already-seen node, or by (j-1, j) when j-1 has none
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut src = vec![0 as NodeId; self.m()];
        for u in 0..n {
            for e in self.out_edge_range(u as NodeId) {
                src[e] = u as NodeId;
                let hi = (u as NodeId).max(self.col_indices[e]);
                groups[hi as usize].push(e);
            }
        }
        let mut introduced = 0usize;
        let write_edge = |out: &mut W, e: usize, introduced: &mut usize| {
            let (u, v) = (src[e], self.col_indices[e]);
            *introduced = (*introduced).max(u.max(v) as usize + 1);
            writeln!(
                out,
                "{} {} {}",
                self.original_ids[u as usize], self.original_ids[v as usize], self.weights[e]
            )
        };
        // a node the edges cannot introduce in order is declared by a
        // self-loop line, which the parser numbers and then drops
        let declare = |out: &mut W, upto: usize, introduced: &mut usize| {
            while *introduced < upto {
                let id = self.original_ids[*introduced];
                writeln!(out, "{id} {id} 0")?;
                *introduced += 1;
            }
            Ok::<(), std::io::Error>(())
        };
        for (j, group) in groups.iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            let lead = if introduced + 1 == j {
                group
                    .iter()
                    .position(|&e| src[e] as usize == j - 1 && self.col_indices[e] as usize == j)
            } else {
                None
            };
            match lead {
                Some(lead) => {
                    write_edge(&mut out, group[lead], &mut introduced)?;
                    for (i, &e) in group.iter().enumerate() {
                        if i != lead {
                            write_edge(&mut out, e, &mut introduced)?;
                        }
                    }
                }
                None => {
                    declare(&mut out, j, &mut introduced)?;
                    for &e in group {
                        write_edge(&mut out, e, &mut introduced)?;
                    }
                }
            }
        }
        declare(&mut out, n, &mut introduced)?;
        Ok(())
    }

    /// Writes the binary cache: magic "GCSR", version byte, little-endian
    /// u64 `n` and `m`, then row offsets (u64), columns (u32), weights (f64),
    /// transpose row offsets (u64), transpose columns (u32), followed by the
    /// original id table (u64).
    pub fn write_binary<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&[CACHE_VERSION])?;
        out.write_all(&(self.n() as u64).to_le_bytes())?;
        out.write_all(&(self.m() as u64).to_le_bytes())?;
        for &o in &self.row_offsets {
            out.write_all(&(o as u64).to_le_bytes())?;
        }
        for &c in &self.col_indices {
            out.write_all(&c.to_le_bytes())?;
        }
        for &w in &self.weights {
            out.write_all(&w.to_le_bytes())?;
        }
        for &o in &self.t_row_offsets {
            out.write_all(&(o as u64).to_le_bytes())?;
        }
        for &c in &self.t_col_indices {
            out.write_all(&c.to_le_bytes())?;
        }
        for &id in &self.original_ids {
            out.write_all(&id.to_le_bytes())?;
        }
        out.flush()
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut magic = [0u8; 5];
        read_exact(&mut input, &mut magic)?;
        if &magic[..4] != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        if magic[4] != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {}", magic[4])));
        }
        let n = read_u64(&mut input)? as usize;
        let m = read_u64(&mut input)? as usize;
        if n > NodeId::MAX as usize {
            return Err(Error::Cache("node count out of range".into()));
        }
        let row_offsets = read_vec(&mut input, n + 1, |b| read_u64(b).map(|x| x as usize))?;
        let col_indices = read_vec(&mut input, m, read_u32)?;
        let weights = read_vec(&mut input, m, |b| read_u64(b).map(f64::from_bits))?;
        let t_row_offsets = read_vec(&mut input, n + 1, |b| read_u64(b).map(|x| x as usize))?;
        let t_col_indices = read_vec(&mut input, m, read_u32)?;
        let original_ids = read_vec(&mut input, n, read_u64)?;

        let mut g = CsrGraph {
            row_offsets,
            col_indices,
            weights,
            t_weights: Vec::new(),
            t_row_offsets,
            t_col_indices,
            original_ids,
        };
        // transpose weights are recovered from the forward rows, which are sorted
        let mut t_weights = Vec::with_capacity(m);
        for v in 0..n {
            if g.t_row_offsets.get(v + 1).is_none_or(|&e| e > m) {
                return Err(Error::Cache("transpose offsets inconsistent".into()));
            }
            for e in g.t_row_offsets[v]..g.t_row_offsets[v + 1] {
                let u = g.t_col_indices[e];
                if u as usize >= n {
                    return Err(Error::Cache("transpose column out of range".into()));
                }
                let r = g.out_edge_range(u);
                let pos = g.col_indices[r.clone()]
                    .binary_search(&(v as NodeId))
                    .map_err(|_| {
                        Error::Cache("transpose edge missing from forward arrays".into())
                    })?;
                t_weights.push(g.weights[r.start + pos]);
            }
        }
        g.t_weights = t_weights;
        g.validate()?;
        Ok(g)
    }
}

const CACHE_MAGIC: &[u8; 4] = b"GCSR";
const CACHE_VERSION: u8 = 1;

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::Cache(format!("truncated input: {e}")))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_vec<R: Read, T>(
    r: &mut R,
    len: usize,
    mut f: impl FnMut(&mut R) -> Result<T>,
) -> Result<Vec<T>> {
    let mut v = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        v.push(f(r)?);
    }
    Ok(v)
}

/// Parses a whitespace-separated edge list ("u v" or "u v p" per line).
/// Blank lines and lines starting with `#` or `%` are skipped.
pub fn parse_edge_list<R: BufRead>(
    input: R,
    scheme: WeightScheme,
    directed: bool,
) -> Result<CsrGraph> {
    let mut remap: HashMap<u64, NodeId> = HashMap::new();
    let mut original_ids: Vec<u64> = Vec::new();
    let mut edges = Vec::new();
    let mut dense = |id: u64, original_ids: &mut Vec<u64>| -> NodeId {
        *remap.entry(id).or_insert_with(|| {
            original_ids.push(id);
            (original_ids.len() - 1) as NodeId
        })
    };

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!(
                    "expected \"u v\" or \"u v p\", found {} fields",
                    fields.len()
                ),
            });
        }
        let id = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad node id {s:?}"),
            })
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let p = match fields.get(2) {
            Some(s) => {
                let p: f64 = s.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad probability {s:?}"),
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidProbability {
                        line: lineno,
                        value: p,
                    });
                }
                p
            }
            None if scheme == WeightScheme::FromFile => {
                return Err(Error::MissingProbability { line: lineno })
            }
            None => 0.0,
        };
        let du = dense(u, &mut original_ids);
        let dv = dense(v, &mut original_ids);
        if original_ids.len() > NodeId::MAX as usize {
            return Err(Error::InvalidParameter("too many nodes".into()));
        }
        edges.push((du, dv, p));
        if !directed {
            edges.push((dv, du, p));
        }
    }
    let n = original_ids.len();
    CsrGraph::build(n, edges, scheme, original_ids)
}

/// Loads an edge-list file. See [`parse_edge_list`].
pub fn load_edge_list(path: &Path, scheme: WeightScheme, directed: bool) -> Result<CsrGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), scheme, directed).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Undirected edges of a Barabasi-Albert graph: a clique on `r0` nodes, then
/// each new node attaches to `r` distinct existing nodes chosen with
/// probability proportional to their current degree.
pub fn barabasi_albert_edges(
    n: usize,
    r: usize,
    r0: usize,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>> {
    if r == 0 {
        return Err(Error::InvalidParameter(
            "attachment degree r must be positive".into(),
        ));
    }
    if r > r0 {
        return Err(Error::InvalidParameter(format!(
            "attachment degree r={r} exceeds initial clique size r0={r0}"
        )));
    }
    if r0 > n {
        return Err(Error::InvalidParameter(format!(
            "initial clique size r0={r0} exceeds node count n={n}"
        )));
    }
    if n > NodeId::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "{n} nodes exceed the id range"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(r0 * r0.saturating_sub(1) / 2 + r * (n - r0));
    // every node appears once per incident edge, so a uniform pick from this
    // list is a degree-proportional pick
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    for a in 0..r0 as NodeId {
        for b in a + 1..r0 as NodeId {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(r);
    for new in r0..n {
        chosen.clear();
        while chosen.len() < r {
            // a lone seed node has no degree mass yet
            let t = if endpoints.is_empty() {
                rng.gen_range(0..new as NodeId)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, new as NodeId));
            endpoints.extend([t, new as NodeId]);
        }
    }
    Ok(edges)
}

/// Barabasi-Albert graph as a symmetric directed CSR graph with weighted
/// cascade probabilities.
pub fn barabasi_albert(n: usize, r: usize, r0: usize, seed: u64) -> Result<CsrGraph> {
    let undirected = barabasi_albert_edges(n, r, r0, seed)?;
    let mut edges = Vec::with_capacity(2 * undirected.len());
    for (a, b) in undirected {
        edges.push((a, b, 0.0));
        edges.push((b, a, 0.0));
    }
    CsrGraph::from_edges(n, &edges, WeightScheme::WeightedCascade)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, scheme: WeightScheme, directed: bool) -> Result<CsrGraph> {
        parse_edge_list(text.as_bytes(), scheme, directed)
    }

    #[test]
    fn csr_of_small_edge_list() {
        let g = parse("0 1\n0 2\n1 2\n", WeightScheme::UniformConstant(0.5), true).unwrap();
        assert_eq!(g.row_offsets(), &[0, 2, 3, 3]);
        assert_eq!(g.col_indices(), &[1, 2, 2]);
        assert_eq!(g.transpose_row_offsets(), &[0, 0, 1, 3]);
        assert_eq!(g.transpose_col_indices(), &[0, 0, 1]);
        g.validate().unwrap();
    }

    #[test]
    fn weighted_cascade_splits_in_degree() {
        let g = parse("0 2\n1 2\n2 0\n", WeightScheme::WeightedCascade, true).unwrap();
        let (zero, two) = (g.dense_id(0).unwrap(), g.dense_id(2).unwrap());
        assert_eq!(g.in_neighbors(two).1, &[0.5, 0.5]);
        assert_eq!(g.in_neighbors(zero).1, &[1.0]);
        g.check_lt_weights().unwrap();
    }

    #[test]
    fn remap_is_first_appearance_order() {
        let g = parse("10 7\n7 3\n", WeightScheme::WeightedCascade, true).unwrap();
        assert_eq!(g.original_ids(), &[10, 7, 3]);
        assert_eq!(g.dense_id(3), Some(2));
        assert_eq!(g.dense_id(4), None);
    }

    #[test]
    fn undirected_duplicates_and_self_loops() {
        let g = parse(
            "# comment\n1 2 0.3\n2 1 0.9\n1 1 0.5\n\n1 2 0.4\n",
            WeightScheme::FromFile,
            false,
        )
        .unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.m(), 2);
        // (1,2) first seen with 0.3, (2,1) first seen with 0.3 from expansion
        assert_eq!(g.weights(), &[0.3, 0.3]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("0 1 1.5\n", WeightScheme::FromFile, true),
            Err(Error::InvalidProbability { line: 1, .. })
        ));
        assert!(matches!(
            parse("0 1 0.5\n1 2\n", WeightScheme::FromFile, true),
            Err(Error::MissingProbability { line: 2 })
        ));
        assert!(matches!(
            parse("0 x\n", WeightScheme::WeightedCascade, true),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("0 1 0.1 4\n", WeightScheme::WeightedCascade, true),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_edge_list(
                Path::new("/nonexistent/graph.txt"),
                WeightScheme::WeightedCascade,
                true
            ),
            Err(Error::Io { .. })
        ));
        assert!(WeightScheme::UniformConstant(1.1).validate().is_err());
    }

    #[test]
    fn lt_constraint_violation_detected() {
        let g = parse("0 2 0.7\n1 2 0.6\n", WeightScheme::FromFile, true).unwrap();
        assert!(matches!(g.check_lt_weights(), Err(Error::Constraint(_))));
    }

    #[test]
    fn edge_list_round_trip_needs_reordering() {
        // node 3 is reached from row 0 before node 2 is introduced
        let text = "5 6 0.25\n7 8 0.5\n5 8 0.75\n6 5 1\n";
        let g = parse(text, WeightScheme::FromFile, true).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let h = parse_edge_list(&buf[..], WeightScheme::FromFile, true).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn binary_cache_round_trip() {
        let g = barabasi_albert(60, 2, 3, 9).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"GCSR");
        assert_eq!(buf[4], 1);
        assert_eq!(u64::from_le_bytes(buf[5..13].try_into().unwrap()), 60);
        let h = CsrGraph::read_binary(&buf[..]).unwrap();
        assert_eq!(g, h);
        assert!(CsrGraph::read_binary(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(CsrGraph::read_binary(&bad[..]).is_err());
    }

    #[test]
    fn ba_edge_counts() {
        let e = barabasi_albert_edges(5, 2, 3, 1).unwrap();
        assert_eq!(e.len(), 3 + 2 * 2);
        let clique = barabasi_albert_edges(6, 2, 6, 1).unwrap();
        assert_eq!(clique.len(), 15);
        let g = barabasi_albert(5, 2, 3, 1).unwrap();
        assert_eq!(g.m(), 14);
        g.validate().unwrap();
    }

    #[test]
    fn ba_errors_and_reproducibility() {
        assert!(barabasi_albert_edges(10, 4, 3, 0).is_err());
        assert!(barabasi_albert_edges(3, 2, 4, 0).is_err());
        assert!(barabasi_albert_edges(3, 0, 2, 0).is_err());
        assert_eq!(
            barabasi_albert_edges(500, 3, 5, 77).unwrap(),
            barabasi_albert_edges(500, 3, 5, 77).unwrap()
        );
        assert_ne!(
            barabasi_albert_edges(500, 3, 5, 77).unwrap(),
            barabasi_albert_edges(500, 3, 5, 78).unwrap()
        );
    }

    #[test]
    fn ba_attachments_are_distinct() {
        let g = barabasi_albert(300, 1, 1, 5).unwrap();
        assert_eq!(g.m(), 2 * 299);
        let g = barabasi_albert(300, 4, 4, 5).unwrap();
        assert_eq!(g.m(), 2 * (6 + 4 * 296));
    }
}
