//! Text and JSON graph formats.
//!
//! Edge list: a header line `n m`, then `m` lines `u v` with 0-based vertices.
//! JSON: `{"n": 4, "edges": [[0, 2], ...], "parts": [[0, 1], [2, 3]]}` where
//! `parts` is optional and lists the blow-up parts in cycle order.

use serde::{Deserialize, Serialize};

use super::{BlowupDigraph, Digraph, SampledSubgraph};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<usize>>>,
}

impl GraphDocument {
    pub fn from_digraph(g: &Digraph, parts: Option<Vec<Vec<usize>>>) -> Self {
        GraphDocument {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            parts,
        }
    }

    pub fn from_blowup(d: &BlowupDigraph) -> Self {
        Self::from_digraph(&d.to_general(), Some(d.parts()))
    }

    pub fn from_subgraph(s: &SampledSubgraph) -> Self {
        Self::from_digraph(&s.to_general(), Some(s.base().parts()))
    }

    pub fn to_digraph(&self) -> Result<Digraph> {
        Digraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Interprets the document as a blow-up subgraph; requires `parts`.
    pub fn to_subgraph(&self) -> Result<SampledSubgraph> {
        let parts = self.parts.as_ref().ok_or_else(|| {
            Error::InvalidDigraph("layered view needs a \"parts\" field".into())
        })?;
        SampledSubgraph::from_parts(&self.to_digraph()?, parts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Digraph {
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count());
        for &(u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let (n, m) = parse_pair(header, 1)?;
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines {
            edges.push(parse_pair(line, lineno + 1)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Digraph::new(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let fields: Vec<_> = line.split_whitespace().collect();
    let bad = || Error::Parse(format!("line {lineno}: expected two integers, got {line:?}"));
    if fields.len() != 2 {
        return Err(bad());
    }
    let a = fields[0].parse().map_err(|_| bad())?;
    let b = fields[1].parse().map_err(|_| bad())?;
    Ok((a, b))
}
