//! Finite connected networks with positive edge conductances.
//!
//! Vertices are dense labels `0..n`. Every constructor funnels through
//! [`Network::build`], so any `Network` value is connected, loop-free and
//! carries one entry per unordered vertex pair.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Resampling cap for disconnected G(n, p) draws.
pub const GNP_MAX_ATTEMPTS: usize = 1000;

/// An undirected edge `(u, v)` with conductance `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    vertex_weight: Vec<f64>,
}

impl Network {
    /// Validates `edges` and builds a connected network on `n` vertices.
    pub fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("a network needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut vertex_weight = vec![0.0; n];
        for (u, v, c) in edges {
            check_edge(n, u, v, c)?;
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidEdge {
                    u,
                    v,
                    reason: "duplicate unordered pair".into(),
                });
            }
            stored.push(Edge { u, v, conductance: c });
            adjacency[u].push((v, c));
            adjacency[v].push((u, c));
            vertex_weight[u] += c;
            vertex_weight[v] += c;
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(w, _)| w);
        }
        let network = Network {
            n,
            edges: stored,
            adjacency,
            vertex_weight,
        };
        if let Some(vertex) = network.first_unreachable() {
            return Err(Error::Disconnected { vertex });
        }
        Ok(network)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
        }
        Self::build(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("complete graph needs n >= 2, got {n}")));
        }
        Self::build(
            n,
            (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0))),
        )
    }

    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("path needs n >= 2, got {n}")));
        }
        Self::build(n, (0..n - 1).map(|i| (i, i + 1, 1.0)))
    }

    /// Discrete torus with `side^dim` vertices and unit conductances.
    ///
    /// Vertex `x` encodes coordinates in mixed radix, least significant first:
    /// `x = c_0 + c_1 * side + ... + c_{d-1} * side^(d-1)`. The origin is 0.
    pub fn torus(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 || side < 3 {
            return Err(Error::InvalidSize(format!(
                "torus needs d >= 1 and n >= 3, got d={dim}, n={side}"
            )));
        }
        let n = u32::try_from(dim)
            .ok()
            .and_then(|d| side.checked_pow(d))
            .ok_or_else(|| Error::InvalidSize("torus vertex count overflows".into()))?;
        let mut edges = Vec::with_capacity(dim * n);
        for x in 0..n {
            let mut stride = 1;
            for _ in 0..dim {
                let coord = (x / stride) % side;
                let next = if coord + 1 == side {
                    x - coord * stride
                } else {
                    x + stride
                };
                edges.push((x, next, 1.0));
                stride *= side;
            }
        }
        Self::build(n, edges)
    }

    /// Connected Erdős–Rényi sample, a pure function of `(n, p, seed)`.
    ///
    /// Attempt `i` draws one uniform per vertex pair `u < v` in lexicographic
    /// order from a ChaCha8 stream seeded with `derive_seed(seed, i)`; the
    /// edge is present when the draw is below `p`. Disconnected samples are
    /// discarded.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("G(n, p) needs n >= 1".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidSize(format!("G(n, p) needs 0 < p <= 1, got {p}")));
        }
        for attempt in 0..GNP_MAX_ATTEMPTS {
            let edges = gnp_edges(n, p, derive_seed(seed, attempt as u64));
            match Self::build(n, edges) {
                Ok(net) => return Ok(net),
                Err(Error::Disconnected { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::RetriesExhausted {
            n,
            p,
            attempts: GNP_MAX_ATTEMPTS,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `x` with their conductances, sorted by neighbor label.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    /// `c(x)`: total conductance at `x`.
    pub fn vertex_weight(&self, x: usize) -> f64 {
        self.vertex_weight[x]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    /// Graph distances from `source` by breadth-first search.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// True when the vertices admit a proper 2-colouring.
    pub fn is_bipartite(&self) -> bool {
        let dist = self.distances_from(0);
        self.edges.iter().all(|e| dist[e.u] % 2 != dist[e.v] % 2)
    }

    fn first_unreachable(&self) -> Option<usize> {
        self.distances_from(0).iter().position(|&d| d == usize::MAX)
    }

    /// Parses the edge-list text format: a vertex count line followed by
    /// `u v c` lines. Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let Some(count) = n else {
                let count: usize = line
                    .parse()
                    .map_err(|_| parse_err(format!("expected vertex count, found {line:?}")))?;
                n = Some(count);
                continue;
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected `u v c`, found {line:?}")));
            }
            let u: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad vertex {:?}", fields[0])))?;
            let v: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad vertex {:?}", fields[1])))?;
            let c: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(format!("bad conductance {:?}", fields[2])))?;
            check_edge(count, u, v, c).map_err(|e| parse_err(e.to_string()))?;
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(parse_err(format!("duplicate edge ({u}, {v})")));
            }
            edges.push((u, v, c));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing vertex count".into(),
        })?;
        Self::build(n, edges)
    }

    /// Edge-list text; conductances use the shortest exact decimal form.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {:?}", e.u, e.v, e.conductance);
        }
        out
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

fn check_edge(n: usize, u: usize, v: usize, c: f64) -> Result<()> {
    let invalid = |reason: &str| {
        Err(Error::InvalidEdge {
            u,
            v,
            reason: reason.into(),
        })
    };
    if u >= n || v >= n {
        return invalid("vertex index out of range");
    }
    if u == v {
        return invalid("self-loop");
    }
    if !c.is_finite() || c <= 0.0 {
        return invalid("conductance must be positive and finite");
    }
    Ok(())
}

/// One Bernoulli(p) draw per pair `u < v`, lexicographic order.
fn gnp_edges(n: usize, p: f64, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    edges
}
