//! Digraphs, the blow-up construction and uniform subgraph sampling.

mod blowup;
mod format;

pub use blowup::{
    build_blowup, enumerate_subgraphs, enumerate_subgraphs_with_cap, sample_subgraph,
    BlowupDigraph, SampledSubgraph, SubgraphIter, DEFAULT_ENUMERATION_CAP, MAX_SAMPLED_K,
};
pub use format::GraphDocument;

use crate::{Error, Result};

/// A simple digraph on vertices `0..n`: no self-loops, no parallel edges.
///
/// Loops are excluded because a permutation may fix any vertex anyway, so a
/// loop never changes a count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    /// Sorted, deduplicated.
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDigraph("vertex count must be positive".into()));
        }
        let mut edges: Vec<_> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidDigraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidDigraph(format!("self-loop at vertex {u}")));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDigraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Digraph { n, edges })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Digraph::new(n, std::iter::empty())
    }

    /// The directed cycle `0 -> 1 -> ... -> n-1 -> 0`, `n >= 2`.
    pub fn directed_cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDigraph("a directed cycle needs n >= 2".into()));
        }
        Digraph::new(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    /// Copy of `self` with one more edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        Digraph::new(self.n, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Out-neighbourhoods as bit masks; requires `n <= 64`.
    pub fn out_masks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::TooLarge {
                what: "bit-mask adjacency",
                got: self.n,
                limit: 64,
            });
        }
        let mut rows = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            rows[u] |= 1 << v;
        }
        Ok(rows)
    }
}
