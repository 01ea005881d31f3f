//! Binary undirected graphs in compressed sparse row form.

mod degree;
mod generate;
mod parse;
mod spmm;

use std::io::{self, Write};

use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};

pub use degree::{degree_distribution, DegreeHistogram};
pub use generate::{gen_erdos_renyi, gen_preferential_attachment, gen_sbm};
pub use parse::{parse_edge_list, parse_edge_list_str};
pub use spmm::{spmm, spmv};

/// Symmetric, loop-free, unweighted adjacency structure.
///
/// Immutable once built. `node_ids[i]` is the external id of dense node `i`
/// (the identity for generated graphs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGraph {
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    node_ids: Vec<u64>,
}

impl SparseGraph {
    /// Builds a graph on `n` nodes from an arbitrary edge multiset. Pairs are
    /// symmetrized, duplicates collapsed and self-loops dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n < 2 {
            return domain(format!("a graph needs at least 2 nodes, got {n}"));
        }
        if n > u32::MAX as usize {
            return domain(format!("{n} nodes exceeds the 32-bit index space"));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return domain(format!("edge ({u}, {v}) references a node outside 0..{n}"));
            }
            if u != v {
                pairs.push((u as u32, v as u32));
            }
        }
        Ok(Self::from_pairs(n, pairs))
    }

    fn from_pairs(n: usize, pairs: Vec<(u32, u32)>) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut cols = vec![0u32; offsets[n]];
        for (u, v) in pairs {
            cols[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            cols[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        // sort + dedup each row, compacting in place
        let mut write = 0usize;
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        for i in 0..n {
            let row = &mut cols[offsets[i]..offsets[i + 1]];
            row.sort_unstable();
            let mut last: Option<u32> = None;
            for r in offsets[i]..offsets[i + 1] {
                let c = cols[r];
                if last != Some(c) {
                    cols[write] = c;
                    write += 1;
                    last = Some(c);
                }
            }
            row_offsets.push(write);
        }
        cols.truncate(write);
        cols.shrink_to_fit();
        Self {
            row_offsets,
            col_indices: cols,
            node_ids: (0..n as u64).collect(),
        }
    }

    /// Attaches external node ids (one per dense node, strictly increasing).
    pub fn with_node_ids(mut self, node_ids: Vec<u64>) -> Result<Self> {
        if node_ids.len() != self.n() {
            return Err(Error::Dimension(format!(
                "{} node ids for {} nodes",
                node_ids.len(),
                self.n()
            )));
        }
        if node_ids.windows(2).any(|w| w[0] >= w[1]) {
            return domain("node ids must be strictly increasing");
        }
        self.node_ids = node_ids;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.col_indices.len() / 2
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Squared Frobenius norm of the adjacency matrix (= 2 · edges).
    pub fn frobenius_sq(&self) -> f64 {
        self.col_indices.len() as f64
    }

    /// Bytes held by the CSR arrays and id map.
    pub fn memory_bytes(&self) -> usize {
        self.row_offsets.len() * std::mem::size_of::<usize>()
            + self.col_indices.len() * std::mem::size_of::<u32>()
            + self.node_ids.len() * std::mem::size_of::<u64>()
    }

    /// Checks every structural invariant of the type.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return domain("fewer than 2 nodes");
        }
        if self.row_offsets[0] != 0 || *self.row_offsets.last().unwrap() != self.col_indices.len() {
            return domain("row offsets do not span the column array");
        }
        if self.row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return domain("row offsets decrease");
        }
        if !self.col_indices.len().is_multiple_of(2) {
            return domain("odd number of stored entries");
        }
        if self.node_ids.len() != n || self.node_ids.windows(2).any(|w| w[0] >= w[1]) {
            return domain("node id map is not strictly increasing over all nodes");
        }
        for i in 0..n {
            let row = self.neighbors(i);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return domain(format!("row {i} is not strictly increasing"));
            }
            for &j in row {
                let j = j as usize;
                if j >= n {
                    return domain(format!("row {i} references node {j}"));
                }
                if j == i {
                    return domain(format!("self-loop at {i}"));
                }
                if !self.has_edge(j, i) {
                    return domain(format!("entry ({i}, {j}) has no mirror"));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 over the node count and the canonical edge list.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        for &id in &self.node_ids {
            h.update(id.to_le_bytes());
        }
        for (u, v) in self.edges() {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
        }
        h.finalize().into()
    }

    /// Writes the canonical edge list (external ids, `u < v`, sorted) in the
    /// whitespace-separated format accepted by [`parse_edge_list`].
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# nodes: {} edges: {}", self.n(), self.edge_count())?;
        let mut isolated = Vec::new();
        for u in 0..self.n() {
            if self.degree(u) == 0 {
                isolated.push(self.node_ids[u]);
            }
        }
        for (u, v) in self.edges() {
            writeln!(w, "{}\t{}", self.node_ids[u], self.node_ids[v])?;
        }
        // isolated nodes survive the round trip as self-loops, which the
        // parser registers as nodes and then drops
        for id in isolated {
            writeln!(w, "{id}\t{id}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_canonicalizes() {
        let g = SparseGraph::from_edges(4, [(0, 1), (1, 0), (2, 2), (3, 1), (1, 3)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 3]);
        assert_eq!(g.degree(2), 0);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_tiny_or_out_of_range() {
        assert!(SparseGraph::from_edges(1, []).is_err());
        assert!(SparseGraph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn digest_tracks_structure() {
        let a = SparseGraph::from_edges(3, [(0, 1)]).unwrap();
        let b = SparseGraph::from_edges(3, [(1, 0), (0, 1)]).unwrap();
        let c = SparseGraph::from_edges(3, [(1, 2)]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn node_ids_must_increase() {
        let g = SparseGraph::from_edges(2, [(0, 1)]).unwrap();
        assert!(g.clone().with_node_ids(vec![5, 5]).is_err());
        assert_eq!(g.with_node_ids(vec![5, 7]).unwrap().node_ids(), &[5, 7]);
    }
}
