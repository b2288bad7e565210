//! Finite digraphs with loops on the dense vertex set `0..n`.
//!
//! The text format is line oriented: the first non-comment line holds the
//! vertex count `n`, every following non-empty line an edge `u v`. Lines
//! starting with `#` are comments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite directed graph with loops allowed, including the null digraph.
///
/// Edges are kept sorted and free of duplicates, so structural equality is
/// equality of vertex count and edge set.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DigraphRepr", into = "DigraphRepr")]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    adj: Vec<bool>,
}

/// Wire form used by the JSON formats: `{"n": 3, "edges": [[0, 1], ...]}`.
#[derive(Serialize, Deserialize)]
struct DigraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<DigraphRepr> for Digraph {
    type Error = Error;

    fn try_from(r: DigraphRepr) -> Result<Self> {
        Digraph::new(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Digraph> for DigraphRepr {
    fn from(g: Digraph) -> Self {
        DigraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            list.push((u, v));
        }
        Ok(Self::from_checked(n, list))
    }

    fn from_checked(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut adj = vec![false; n * n];
        for &(u, v) in &edges {
            out[u].push(v);
            inn[v].push(u);
            adj[u * n + v] = true;
        }
        // `out` is sorted by construction; `inn` is filled in order of the
        // source vertex so it is sorted as well.
        Digraph {
            n,
            edges,
            out,
            inn,
            adj,
        }
    }

    /// The digraph with no vertices.
    pub fn null() -> Self {
        Self::from_checked(0, Vec::new())
    }

    pub fn edgeless(n: usize) -> Self {
        Self::from_checked(n, Vec::new())
    }

    /// Directed cycle `0 → 1 → … → n-1 → 0`; `cycle(1)` is a single loop.
    pub fn cycle(n: usize) -> Self {
        Self::from_checked(n, (0..n).map(|v| (v, (v + 1) % n)).collect())
    }

    /// Directed path `0 → 1 → … → n-1`.
    pub fn path(n: usize) -> Self {
        Self::from_checked(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    /// Disjoint union, with the vertices of `other` shifted past ours.
    pub fn disjoint_union(&self, other: &Digraph) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_checked(self.n + other.n, edges)
    }

    /// Builds a digraph from an adjacency code: bit `n²-1-(u·n+v)` is set iff
    /// `(u, v)` is an edge, so reading the code from the most significant bit
    /// gives the row-major adjacency matrix.
    pub fn from_code(n: usize, code: u64) -> Self {
        let nn = n * n;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if code >> (nn - 1 - (u * n + v)) & 1 == 1 {
                    edges.push((u, v));
                }
            }
        }
        Self::from_checked(n, edges)
    }

    /// Inverse of [`Digraph::from_code`]. Requires `n² ≤ 64`.
    pub fn code(&self) -> u64 {
        let nn = self.n * self.n;
        assert!(nn <= 64, "adjacency code needs n² ≤ 64");
        self.edges
            .iter()
            .fold(0u64, |acc, &(u, v)| acc | 1 << (nn - 1 - (u * self.n + v)))
    }

    /// Image under the vertex permutation `v ↦ perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        Ok(Self::from_checked(
            self.n,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect(),
        ))
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

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// `v⁺` without a range check.
    #[inline]
    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// `v⁻` without a range check.
    #[inline]
    pub fn inn(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Out-neighbourhood `v⁺ = {u : (v,u) ∈ E}`, sorted ascending.
    pub fn out_neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.out[v])
    }

    /// In-neighbourhood `v⁻ = {u : (u,v) ∈ E}`, sorted ascending.
    pub fn in_neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_vertex(v)?;
        Ok(&self.inn[v])
    }

    /// Vertices with a loop.
    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(v, v))
    }

    pub fn classify_vertices(&self) -> VertexClassification {
        let tags: Vec<VertexClass> = (0..self.n)
            .map(|v| match (self.inn[v].is_empty(), self.out[v].is_empty()) {
                (true, true) => VertexClass::Isolated,
                (true, false) => VertexClass::Source,
                (false, true) => VertexClass::Sink,
                (false, false) => VertexClass::Smooth,
            })
            .collect();
        let sources = (0..self.n).filter(|&v| self.inn[v].is_empty()).collect();
        let sinks = (0..self.n).filter(|&v| self.out[v].is_empty()).collect();
        VertexClassification {
            tags,
            sources,
            sinks,
        }
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out[v].is_empty()
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.inn[v].is_empty()
    }

    /// Canonical text form: vertex count, then the sorted edge list.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, {:?})", self.n, self.edges)
    }
}

impl FromStr for Digraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_digraph(text)
    }
}

/// Parses the digraph text format. Errors name the 1-based line number.
pub fn parse_digraph(text: &str) -> Result<Digraph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let parse_int = |tok: &str| -> Result<usize> {
            if tok.starts_with('-') {
                return Err(err(format!("negative value `{tok}`")));
            }
            tok.parse::<usize>()
                .map_err(|_| err(format!("expected a non-negative integer, found `{tok}`")))
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if tokens.len() != 1 {
                    return Err(err("expected the vertex count on its own line".into()));
                }
                n = Some(parse_int(tokens[0])?);
            }
            Some(count) => {
                if tokens.len() != 2 {
                    return Err(err(format!("expected `u v`, found `{line}`")));
                }
                let (u, v) = (parse_int(tokens[0])?, parse_int(tokens[1])?);
                for w in [u, v] {
                    if w >= count {
                        return Err(err(format!(
                            "vertex {w} out of range for a digraph on {count} vertices"
                        )));
                    }
                }
                edges.push((u, v));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing vertex count".into(),
    })?;
    Ok(Digraph::from_checked(n, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    Source,
    Sink,
    Isolated,
    Smooth,
}

/// Per-vertex tags plus the source set `S⁻(G)` and sink set `S⁺(G)`.
///
/// Isolated vertices carry their own tag but belong to both sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClassification {
    pub tags: Vec<VertexClass>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}
