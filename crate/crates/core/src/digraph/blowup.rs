use rand::Rng;

use super::Digraph;
use crate::{Error, Result, Seed};

/// Default bound on the number of subgraphs [`enumerate_subgraphs`] will walk.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Layers of a [`SampledSubgraph`] store rows as `u64` masks.
pub const MAX_SAMPLED_K: usize = 64;

/// The blow-up `D(k, ell)` of a directed `ell`-cycle: each cycle vertex becomes
/// a part of `k` vertices and each cycle edge a complete bipartite layer.
///
/// Parts are numbered `0..ell` in cycle order and part `c` feeds part
/// `(c + 1) % ell`. Vertex `i` of part `c` has global index `c * k + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlowupDigraph {
    k: usize,
    ell: usize,
}

pub fn build_blowup(k: usize, ell: usize) -> Result<BlowupDigraph> {
    if k < 1 || ell < 2 {
        return Err(Error::InvalidBlowup { k, ell });
    }
    Ok(BlowupDigraph { k, ell })
}

impl BlowupDigraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn vertex_count(&self) -> usize {
        self.k * self.ell
    }

    pub fn edge_count(&self) -> usize {
        self.k * self.k * self.ell
    }

    pub fn vertex(&self, part: usize, i: usize) -> usize {
        part * self.k + i
    }

    pub fn successor(&self, part: usize) -> usize {
        (part + 1) % self.ell
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        (0..self.ell)
            .map(|c| (0..self.k).map(|i| self.vertex(c, i)).collect())
            .collect()
    }

    /// Edge `index` in `0..k*k*ell` as `(layer, source row, target column)`.
    pub fn edge_at(&self, index: usize) -> (usize, usize, usize) {
        let kk = self.k * self.k;
        (index / kk, (index % kk) / self.k, index % self.k)
    }

    pub fn to_general(&self) -> Digraph {
        SampledSubgraph::full(*self)
            .expect("full blow-up within mask width")
            .to_general()
    }
}

/// A subgraph of `D(k, ell)`. Layer `c` is a `k x k` 0/1 matrix whose row `i`
/// is the out-neighbourhood of vertex `i` of part `c` inside part `c + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampledSubgraph {
    base: BlowupDigraph,
    m: usize,
    /// Row masks, layer-major: `rows[c * k + i]`.
    rows: Vec<u64>,
}

impl SampledSubgraph {
    fn check_width(base: &BlowupDigraph) -> Result<()> {
        if base.k > MAX_SAMPLED_K {
            return Err(Error::TooLarge {
                what: "subgraph layer width k",
                got: base.k,
                limit: MAX_SAMPLED_K,
            });
        }
        Ok(())
    }

    pub fn empty(base: BlowupDigraph) -> Result<Self> {
        Self::check_width(&base)?;
        Ok(SampledSubgraph {
            base,
            m: 0,
            rows: vec![0; base.k * base.ell],
        })
    }

    pub fn full(base: BlowupDigraph) -> Result<Self> {
        Self::check_width(&base)?;
        let row = if base.k == 64 { u64::MAX } else { (1u64 << base.k) - 1 };
        Ok(SampledSubgraph {
            base,
            m: base.edge_count(),
            rows: vec![row; base.k * base.ell],
        })
    }

    /// Subgraph holding the given edge indices (see [`BlowupDigraph::edge_at`]).
    pub fn from_edge_indices(
        base: BlowupDigraph,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut g = Self::empty(base)?;
        for e in indices {
            if e >= base.edge_count() {
                return Err(Error::InvalidDigraph(format!("edge index {e} out of range")));
            }
            let (c, i, j) = base.edge_at(e);
            g.insert(c, i, j)?;
        }
        Ok(g)
    }

    /// Reads a general digraph as a subgraph of a blow-up whose parts are
    /// listed in cycle order. Vertices inside a part keep the listed order.
    pub fn from_parts(g: &Digraph, parts: &[Vec<usize>]) -> Result<Self> {
        let ell = parts.len();
        let k = parts.first().map_or(0, Vec::len);
        let base = build_blowup(k, ell)?;
        if parts.iter().any(|p| p.len() != k) {
            return Err(Error::InvalidDigraph("parts must all have the same size".into()));
        }
        if k * ell != g.n() {
            return Err(Error::InvalidDigraph(format!(
                "parts cover {} vertices but the graph has {}",
                k * ell,
                g.n()
            )));
        }
        let mut position = vec![None; g.n()];
        for (c, part) in parts.iter().enumerate() {
            for (i, &v) in part.iter().enumerate() {
                if v >= g.n() || position[v].is_some() {
                    return Err(Error::InvalidDigraph(format!(
                        "vertex {v} is out of range or listed twice in parts"
                    )));
                }
                position[v] = Some((c, i));
            }
        }
        let mut sub = Self::empty(base)?;
        for &(u, v) in g.edges() {
            let (cu, iu) = position[u].expect("parts cover every vertex");
            let (cv, iv) = position[v].expect("parts cover every vertex");
            if cv != base.successor(cu) {
                return Err(Error::InvalidDigraph(format!(
                    "edge ({u}, {v}) does not go from a part to its successor"
                )));
            }
            sub.insert(cu, iu, iv)?;
        }
        Ok(sub)
    }

    fn insert(&mut self, layer: usize, i: usize, j: usize) -> Result<()> {
        let row = &mut self.rows[layer * self.base.k + i];
        if *row & (1 << j) != 0 {
            return Err(Error::InvalidDigraph(format!(
                "duplicate edge in layer {layer}: ({i}, {j})"
            )));
        }
        *row |= 1 << j;
        self.m += 1;
        Ok(())
    }

    /// Copy with the edge `(layer, i, j)` added; errors if already present.
    pub fn with_edge(&self, layer: usize, i: usize, j: usize) -> Result<Self> {
        if layer >= self.base.ell || i >= self.base.k || j >= self.base.k {
            return Err(Error::InvalidDigraph("edge coordinates out of range".into()));
        }
        let mut next = self.clone();
        next.insert(layer, i, j)?;
        Ok(next)
    }

    pub fn base(&self) -> &BlowupDigraph {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn layer(&self, c: usize) -> &[u64] {
        let k = self.base.k;
        &self.rows[c * k..(c + 1) * k]
    }

    pub fn has_edge(&self, layer: usize, i: usize, j: usize) -> bool {
        self.layer(layer)[i] & (1 << j) != 0
    }

    /// Flat digraph using the numbering `c * k + i`.
    pub fn to_general(&self) -> Digraph {
        let b = &self.base;
        let mut edges = Vec::with_capacity(self.m);
        for c in 0..b.ell {
            let next = b.successor(c);
            for (i, &row) in self.layer(c).iter().enumerate() {
                for j in (0..b.k).filter(|&j| row & (1 << j) != 0) {
                    edges.push((b.vertex(c, i), b.vertex(next, j)));
                }
            }
        }
        Digraph::new(b.vertex_count(), edges).expect("blow-up edges are simple")
    }
}

/// Uniform `m`-subset of the edges of `base`, via a partial Fisher-Yates
/// shuffle of the edge index array driven by `seed`.
pub fn sample_subgraph(base: &BlowupDigraph, m: usize, seed: Seed) -> Result<SampledSubgraph> {
    let total = base.edge_count();
    if m > total {
        return Err(Error::EdgeCountOutOfRange { m, max: total });
    }
    SampledSubgraph::check_width(base)?;
    let mut rng = seed.rng();
    let mut idx: Vec<usize> = (0..total).collect();
    for t in 0..m {
        let j = rng.random_range(t..total);
        idx.swap(t, j);
    }
    SampledSubgraph::from_edge_indices(*base, idx[..m].iter().copied())
}

/// Every `m`-edge subgraph of `base`, in lexicographic order of edge indices.
pub fn enumerate_subgraphs(base: &BlowupDigraph, m: usize) -> Result<SubgraphIter> {
    enumerate_subgraphs_with_cap(base, m, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_subgraphs_with_cap(
    base: &BlowupDigraph,
    m: usize,
    cap: u64,
) -> Result<SubgraphIter> {
    let total = base.edge_count();
    if m > total {
        return Err(Error::EdgeCountOutOfRange { m, max: total });
    }
    SampledSubgraph::check_width(base)?;
    // C(total, m) computed incrementally; stop as soon as it passes the cap.
    let mut count: u128 = 1;
    for t in 0..m.min(total - m) {
        count = count * (total - t) as u128 / (t + 1) as u128;
        if count > cap as u128 {
            return Err(Error::EnumerationCap { total, m, cap });
        }
    }
    Ok(SubgraphIter {
        base: *base,
        total,
        combo: Some((0..m).collect()),
    })
}

pub struct SubgraphIter {
    base: BlowupDigraph,
    total: usize,
    combo: Option<Vec<usize>>,
}

impl Iterator for SubgraphIter {
    type Item = SampledSubgraph;

    fn next(&mut self) -> Option<SampledSubgraph> {
        let current = self.combo.take()?;
        let out = SampledSubgraph::from_edge_indices(self.base, current.iter().copied())
            .expect("combination indices are in range");
        let m = current.len();
        let mut next = current;
        // Advance to the next m-combination of 0..total.
        let mut pos = m;
        while pos > 0 {
            pos -= 1;
            if next[pos] < self.total - m + pos {
                next[pos] += 1;
                for q in pos + 1..m {
                    next[q] = next[q - 1] + 1;
                }
                self.combo = Some(next);
                break;
            }
        }
        Some(out)
    }
}
