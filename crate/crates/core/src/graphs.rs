//! Catalog of ADE and T-shaped bipartite graphs with a distinguished star
//! vertex.
//!
//! Canonical layouts (vertex ids are stable across runs and releases):
//!
//! * `A<n>`: chain `a1 - a2 - ... - an`.
//! * `D<n>` (n >= 4): chain `c1 - c2 - ... - c(n-2)` plus fork tips `f1`, `f2`
//!   both adjacent to `c(n-2)`; the trivalent vertex is `c(n-2)`.
//! * `E6|E7|E8`: chain `a1 - ... - am` (m = 5, 6, 7) with an extra vertex `b`
//!   adjacent to `a3`.
//! * `T<k>,<n>` (2 <= k <= n): chain `a1 - ... - an` with an extra vertex `b`
//!   adjacent to `ak`. `T2,n` is the same underlying graph as `D(n+1)`.
//!
//! The default star is the first vertex of the chain (`a1` or `c1`); the
//! designator `trivalent` selects the unique degree-3 vertex where one exists.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown graph name `{0}` (expected A<n>, D<n>, E6|E7|E8, or T<k>,<n>)")]
    UnknownName(String),
    #[error("rank {rank} out of range for family {family}")]
    RankOutOfRange { family: char, rank: usize },
    #[error("star designator `{0}` does not select a vertex of this graph")]
    StarNotFound(String),
    #[error("graph `{0}` is not a Coxeter-Dynkin graph of type A, D, or E")]
    NotAde(String),
}

/// Star vertex selection for [`build_graph`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StarSpec {
    /// First vertex of the long chain (`a1` or `c1`).
    #[default]
    Default,
    /// The unique degree-3 vertex; an error if the graph has none.
    Trivalent,
    /// A vertex selected by id, e.g. `c3`.
    Named(String),
}

/// Vertex parity of the bipartite 2-coloring; the star is always even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A connected bipartite graph with 0/1 adjacency and a distinguished star
/// vertex. Vertices are addressed by index into [`Self::vertex_names`], in
/// canonical order.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    name: String,
    vertex_names: Vec<String>,
    adj: Vec<Vec<usize>>,
    star: usize,
    coloring: Vec<Parity>,
}

impl BipartiteGraph {
    /// Assembles a graph from an edge list and validates the invariants:
    /// connectedness, proper 2-coloring (the graph must be bipartite), and a
    /// valid star index. Edges may be given in either orientation.
    pub fn from_edges(
        name: impl Into<String>,
        vertex_names: Vec<String>,
        edges: &[(usize, usize)],
        star: usize,
    ) -> Result<Self, GraphError> {
        let name = name.into();
        let n = vertex_names.len();
        assert!(star < n, "star index out of bounds");
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n && u != v, "invalid edge ({u}, {v})");
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }

        // BFS from the star both 2-colors the graph and checks connectivity.
        let mut coloring = vec![None; n];
        coloring[star] = Some(Parity::Even);
        let mut queue = std::collections::VecDeque::from([star]);
        let mut seen = 1usize;
        while let Some(v) = queue.pop_front() {
            let next = match coloring[v].unwrap() {
                Parity::Even => Parity::Odd,
                Parity::Odd => Parity::Even,
            };
            for &w in &adj[v] {
                match coloring[w] {
                    None => {
                        coloring[w] = Some(next);
                        seen += 1;
                        queue.push_back(w);
                    }
                    Some(p) => assert!(p == next, "graph `{name}` is not bipartite"),
                }
            }
        }
        assert!(seen == n, "graph `{name}` is not connected");
        let coloring = coloring.into_iter().map(Option::unwrap).collect();
        Ok(Self {
            name,
            vertex_names,
            adj,
            star,
            coloring,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|s| s == name)
    }

    /// Index of the distinguished star vertex.
    pub fn star(&self) -> usize {
        self.star
    }

    /// Returns a copy of the graph with the star moved to `star`.
    pub fn with_star(&self, star: usize) -> Self {
        let edges = self.edge_list();
        Self::from_edges(self.name.clone(), self.vertex_names.clone(), &edges, star)
            .expect("re-pointing a valid graph cannot fail")
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn parity(&self, v: usize) -> Parity {
        self.coloring[v]
    }

    /// Edges as index pairs `(u, v)` with `u < v`, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.edge_list().len()
    }

    /// Dense symmetric 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.vertex_count();
        let mut a = nalgebra::DMatrix::zeros(n, n);
        for (u, v) in self.edge_list() {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// The unique degree-3 vertex, if the graph has exactly one.
    pub fn trivalent_vertex(&self) -> Option<usize> {
        let mut found = None;
        for v in 0..self.vertex_count() {
            if self.degree(v) == 3 {
                if found.is_some() {
                    return None;
                }
                found = Some(v);
            }
        }
        found
    }

    /// DOT rendering (undirected); the star vertex carries `shape=doublecircle`.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph \"{}\" {{\n", self.name));
        out.push_str("  node [shape=circle];\n");
        for (v, name) in self.vertex_names.iter().enumerate() {
            if v == self.star {
                out.push_str(&format!("  \"{name}\" [shape=doublecircle];\n"));
            } else {
                out.push_str(&format!("  \"{name}\";\n"));
            }
        }
        for (u, v) in self.edge_list() {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\";\n",
                self.vertex_names[u], self.vertex_names[v]
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Shape classification of a graph within the simply-laced families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeType {
    A(usize),
    D(usize),
    E(usize),
}

/// Recognizes the underlying A/D/E shape of a graph regardless of its vertex
/// naming, so that e.g. `T2,4` classifies as `D5`.
pub fn classify_ade(g: &BipartiteGraph) -> Option<AdeType> {
    let n = g.vertex_count();
    if g.edge_count() + 1 != n {
        return None; // not a tree
    }
    let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    if max_deg <= 2 {
        return Some(AdeType::A(n));
    }
    if max_deg > 3 {
        return None;
    }
    let center = g.trivalent_vertex()?;
    // Arm lengths: edge counts of the three chains hanging off the center.
    let mut arms: Vec<usize> = g
        .neighbors(center)
        .iter()
        .map(|&first| {
            let mut len = 1;
            let (mut prev, mut cur) = (center, first);
            while let Some(&next) = g.neighbors(cur).iter().find(|&&w| w != prev) {
                prev = cur;
                cur = next;
                len += 1;
            }
            len
        })
        .collect();
    arms.sort_unstable();
    match arms.as_slice() {
        [1, 1, m] => Some(AdeType::D(m + 3)),
        [1, 2, 2] => Some(AdeType::E(6)),
        [1, 2, 3] => Some(AdeType::E(7)),
        [1, 2, 4] => Some(AdeType::E(8)),
        _ => None,
    }
}

/// The Coxeter number `h` of an ADE graph: `A_n -> n+1`, `D_n -> 2n-2`,
/// `E6, E7, E8 -> 12, 18, 30`. The graph norm is `2 cos(pi/h)`.
pub fn coxeter_number(g: &BipartiteGraph) -> Result<usize, GraphError> {
    match classify_ade(g) {
        Some(AdeType::A(n)) => Ok(n + 1),
        Some(AdeType::D(n)) => Ok(2 * n - 2),
        Some(AdeType::E(6)) => Ok(12),
        Some(AdeType::E(7)) => Ok(18),
        Some(AdeType::E(8)) => Ok(30),
        _ => Err(GraphError::NotAde(g.name().to_string())),
    }
}

fn chain_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn chain_edges(count: usize) -> Vec<(usize, usize)> {
    (0..count.saturating_sub(1)).map(|i| (i, i + 1)).collect()
}

/// Builds a catalog graph by name: `A<n>` (n >= 1), `D<n>` (n >= 4),
/// `E6|E7|E8`, or `T<k>,<n>` (2 <= k <= n).
pub fn build_graph(name: &str, star: StarSpec) -> Result<BipartiteGraph, GraphError> {
    let unknown = || GraphError::UnknownName(name.to_string());
    let (family, rest) = name.split_at(name.len().min(1));
    let g = match family {
        "A" => {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n < 1 {
                return Err(GraphError::RankOutOfRange { family: 'A', rank: n });
            }
            BipartiteGraph::from_edges(name, chain_names("a", n), &chain_edges(n), 0)?
        }
        "D" => {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n < 4 {
                return Err(GraphError::RankOutOfRange { family: 'D', rank: n });
            }
            let mut names = chain_names("c", n - 2);
            names.push("f1".into());
            names.push("f2".into());
            let mut edges = chain_edges(n - 2);
            edges.push((n - 3, n - 2)); // c(n-2) -- f1
            edges.push((n - 3, n - 1)); // c(n-2) -- f2
            BipartiteGraph::from_edges(name, names, &edges, 0)?
        }
        "E" => {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if !(6..=8).contains(&n) {
                return Err(GraphError::RankOutOfRange { family: 'E', rank: n });
            }
            build_t_graph(name, 3, n - 1)?
        }
        "T" => {
            let (k, n) = rest.split_once(',').ok_or_else(unknown)?;
            let k: usize = k.parse().map_err(|_| unknown())?;
            let n: usize = n.parse().map_err(|_| unknown())?;
            if k < 2 || k > n {
                return Err(GraphError::RankOutOfRange { family: 'T', rank: k });
            }
            build_t_graph(name, k, n)?
        }
        _ => return Err(unknown()),
    };
    let star = match star {
        StarSpec::Default => g.star(),
        StarSpec::Trivalent => g
            .trivalent_vertex()
            .ok_or_else(|| GraphError::StarNotFound("trivalent".into()))?,
        StarSpec::Named(id) => g
            .vertex_index(&id)
            .ok_or(GraphError::StarNotFound(id))?,
    };
    Ok(g.with_star(star))
}

fn build_t_graph(name: &str, k: usize, n: usize) -> Result<BipartiteGraph, GraphError> {
    let mut names = chain_names("a", n);
    names.push("b".into());
    let mut edges = chain_edges(n);
    edges.push((k - 1, n)); // ak -- b
    BipartiteGraph::from_edges(name, names, &edges, 0)
}

/// The ADE graphs shipped in the catalog: `A2..A20`, `D4..D20`, `E6..E8`,
/// each at its default star.
pub fn ade_catalog() -> Vec<BipartiteGraph> {
    let mut out = Vec::new();
    for n in 2..=20 {
        out.push(build_graph(&format!("A{n}"), StarSpec::Default).unwrap());
    }
    for n in 4..=20 {
        out.push(build_graph(&format!("D{n}"), StarSpec::Default).unwrap());
    }
    for n in 6..=8 {
        out.push(build_graph(&format!("E{n}"), StarSpec::Default).unwrap());
    }
    out
}
