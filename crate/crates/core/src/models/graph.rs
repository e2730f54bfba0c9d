//! Undirected simple graphs and the triangle-free test-instance generator.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{stream_rng, INSTANCE_STREAM};
use crate::{Error, Result};

/// Undirected simple graph stored as sorted adjacency lists.
///
/// Construction rejects self-loops, duplicate edges and out-of-range
/// endpoints, so every `Graph` value satisfies the symmetric-adjacency
/// invariant and `max_degree` is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    max_degree: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        Graph::from_edges(repr.n, repr.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adjacency: vec![Vec::new(); n],
            max_degree: 0,
        }
    }

    /// Builds a graph from an edge list, validating every edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph(format!("too many vertices: {n}")));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {})", w[0])));
            }
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            n,
            adjacency,
            max_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sorted open neighbourhood N(v).
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Some triple of mutually adjacent vertices `u < v < w`, if one exists.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        for (u, v) in self.edges() {
            let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i] as usize;
                        if w > v {
                            return Some((u, v, w));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// Complete graph K_k.
    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v)));
        Self::from_edges(k, edges).expect("complete graph is simple")
    }

    /// Cycle C_k (k >= 3).
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3, "cycle needs at least 3 vertices");
        Self::from_edges(k, (0..k).map(|u| (u, (u + 1) % k))).expect("cycle is simple")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).expect("star is simple")
    }

    /// The Petersen graph (n = 10, 3-regular, girth 5).
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Self::from_edges(10, outer.chain(spokes).chain(inner)).expect("petersen is simple")
    }

    /// Parses the `u v` per-line edge-list format (0-indexed).
    ///
    /// Blank lines and lines starting with `#` are ignored. The vertex count is
    /// `n` when given, otherwise one more than the largest endpoint.
    pub fn from_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| -> Result<usize> {
                let tok = parts.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("missing {what} endpoint"),
                })?;
                tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("invalid vertex `{tok}`"),
                })
            };
            let u = next("first")?;
            let v = next("second")?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected exactly two vertices".into(),
                });
            }
            edges.push((u, v));
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = match n {
            Some(n) if n < inferred => {
                return Err(Error::InvalidGraph(format!(
                    "edge endpoint {} exceeds declared vertex count {n}",
                    inferred - 1
                )))
            }
            Some(n) => n,
            None => inferred,
        };
        Self::from_edges(n, edges)
    }

    pub fn read_edge_list(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_edge_list(&text, None)
    }

    /// Serialises to the edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// True iff no three vertices are mutually adjacent.
pub fn validate_triangle_free(graph: &Graph) -> bool {
    graph.is_triangle_free()
}

/// Attempts allowed before [`gen_bipartite_regular`] gives up.
const PAIRING_ATTEMPTS: usize = 200;
/// Random stub draws tried before falling back to an exhaustive scan.
const LOCAL_REJECTIONS: usize = 64;

/// Random bipartite `d`-regular graph on two parts of size `n / 2`.
///
/// Configuration model: every vertex carries `d` stubs and left stubs are
/// paired with uniformly random right stubs, rejecting any pairing that would
/// duplicate an existing edge. If the remaining stubs admit no valid pair the
/// attempt restarts. Vertices `0..n/2` form the left part.
pub fn gen_bipartite_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n must be even, got {n}")));
    }
    let half = n / 2;
    if d > half {
        return Err(Error::InvalidParameter(format!("degree {d} exceeds part size {half}")));
    }
    let mut rng = stream_rng(seed, INSTANCE_STREAM);
    for _ in 0..PAIRING_ATTEMPTS {
        if let Some(edges) = try_pairing(half, d, &mut rng) {
            return Graph::from_edges(n, edges);
        }
    }
    Err(Error::RejectionBudget {
        attempts: PAIRING_ATTEMPTS,
    })
}

fn try_pairing<R: Rng>(half: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut left: Vec<usize> = (0..half).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    let mut right: Vec<usize> = left.clone();
    left.shuffle(rng);
    right.shuffle(rng);
    // neighbour sets of left vertices, indexed by right vertex
    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(d); half];
    let mut edges = Vec::with_capacity(half * d);

    while let Some(u) = left.pop() {
        let mut chosen = None;
        for _ in 0..LOCAL_REJECTIONS {
            let k = rng.random_range(0..right.len());
            if !adj[u].contains(&(right[k] as u32)) {
                chosen = Some(k);
                break;
            }
        }
        if chosen.is_none() {
            chosen = right.iter().position(|&w| !adj[u].contains(&(w as u32)));
        }
        let k = chosen?;
        let w = right.swap_remove(k);
        adj[u].push(w as u32);
        edges.push((u, half + w));
    }
    Some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_detection_examples() {
        assert!(validate_triangle_free(&Graph::empty(5)));
        assert!(!validate_triangle_free(&Graph::complete(3)));
        assert!(validate_triangle_free(&Graph::cycle(5)));
        assert!(!validate_triangle_free(&Graph::complete(4)));
        assert!(validate_triangle_free(&Graph::petersen()));
        assert_eq!(Graph::complete(3).find_triangle(), Some((0, 1, 2)));
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(Graph::from_edges(3, [(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(Graph::from_edges(3, [(0, 3)]), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn perfect_matching_for_degree_one() {
        let g = gen_bipartite_regular(4, 1, 11).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!((0..4).all(|v| g.degree(v) == 1));
        assert!(validate_triangle_free(&g));
    }

    #[test]
    fn regular_bipartite_degrees_exact() {
        let g = gen_bipartite_regular(200, 16, 3).unwrap();
        assert!((0..200).all(|v| g.degree(v) == 16));
        assert_eq!(g.max_degree(), 16);
        assert!(validate_triangle_free(&g));
        // bipartition respected
        assert!(g.edges().all(|(u, v)| u < 100 && v >= 100));
    }

    #[test]
    fn generator_is_deterministic() {
        let a = gen_bipartite_regular(60, 5, 99).unwrap();
        let b = gen_bipartite_regular(60, 5, 99).unwrap();
        let c = gen_bipartite_regular(60, 5, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dense_regular_bipartite_is_reachable() {
        // full bipartite graph: every pairing is forced
        let g = gen_bipartite_regular(20, 10, 1).unwrap();
        assert_eq!(g.edge_count(), 100);
    }

    #[test]
    fn generator_parameter_errors() {
        assert!(gen_bipartite_regular(5, 1, 0).is_err());
        assert!(gen_bipartite_regular(6, 4, 0).is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::petersen();
        let text = g.to_edge_list();
        assert_eq!(Graph::from_edge_list(&text, None).unwrap(), g);
        let parsed = Graph::from_edge_list("# header\n0 1\n\n1 2\n", Some(5)).unwrap();
        assert_eq!(parsed.n(), 5);
        assert!(matches!(
            Graph::from_edge_list("0 x\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(Graph::from_edge_list("0 1 2\n", None).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let g = Graph::cycle(6);
        let js = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"n":2,"edges":[[0,0]]}"#;
        assert!(serde_json::from_str::<Graph>(bad).is_err());
    }
}
