//! String algebras on a pointed bipartite graph: path bases per level,
//! block-matrix algebra elements, Bratteli inclusions, the Markov trace,
//! Jones projection matrices, subalgebra generation, and trace-orthogonal
//! conditional expectations.
//!
//! The level-`m` algebra has matrix units indexed by pairs of length-`m`
//! paths from the star that share an endpoint; it decomposes into one square
//! block per reachable endpoint vertex. Paths are ordered lexicographically
//! on their vertex-index sequences, so every matrix index is reproducible
//! across runs.

use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix};
use serde_json::json;
use thiserror::Error;

use crate::graphs::BipartiteGraph;
use crate::spectrum::{spectral_data, SpectralData};

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("tower depth must be at least 1")]
    ZeroDepth,
    #[error("graph `{0}` has no edges; the level-1 path basis is empty")]
    NoEdges(String),
    #[error("level {level} dimension {dim} exceeds the bound {bound}")]
    LevelTooLarge {
        level: usize,
        dim: usize,
        bound: usize,
    },
    #[error("level {target} is beyond the tower depth {depth}")]
    LevelOutOfRange { target: usize, depth: usize },
    #[error("jones projection e_{i} needs level {needed} but the tower depth is {depth}")]
    JonesIndexOutOfRange {
        i: usize,
        needed: usize,
        depth: usize,
    },
    #[error("subalgebra dimension exceeded the cap {cap}; runaway generation")]
    SubalgebraCapExceeded { cap: usize },
    #[error("basis is not orthonormal in the trace inner product (residual {residual:.3e})")]
    BasisNotOrthonormal { residual: f64 },
}

/// Total block dimension allowed per level (sum of squared path counts).
pub const LEVEL_DIMENSION_BOUND: usize = 4_000_000;

/// Square block of the level-`m` algebra: the paths of length `m` from the
/// star that end at `vertex`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct LevelBlock {
    vertex: usize,
    paths: Vec<Vec<usize>>,
}

impl LevelBlock {
    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn size(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }
}

/// Path basis of one tower level.
#[derive(Debug, Clone)]
pub struct Level {
    blocks: Vec<LevelBlock>,
}

impl Level {
    pub fn blocks(&self) -> &[LevelBlock] {
        &self.blocks
    }

    /// Algebra dimension: the sum of squared block sizes.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.size() * b.size()).sum()
    }

    fn block_position(&self, vertex: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.vertex == vertex)
    }

    /// Locates a path, returning `(block position, row index)`.
    pub fn locate(&self, path: &[usize]) -> Option<(usize, usize)> {
        let vertex = *path.last()?;
        let bpos = self.block_position(vertex)?;
        let idx = self.blocks[bpos]
            .paths
            .binary_search_by(|p| p.as_slice().cmp(path))
            .ok()?;
        Some((bpos, idx))
    }
}

/// The tower of path algebras over a pointed bipartite graph, levels
/// `0..=depth`, together with the spectral data that weights the Markov
/// trace.
#[derive(Debug)]
pub struct Tower {
    graph: BipartiteGraph,
    spectral: SpectralData,
    depth: usize,
    levels: Vec<Level>,
}

impl Tower {
    /// Builds the tower with Perron-Frobenius weights computed from the
    /// graph.
    pub fn build(graph: BipartiteGraph, depth: usize) -> Result<Arc<Self>, TowerError> {
        let spectral = spectral_data(&graph);
        Self::with_spectral(graph, spectral, depth)
    }

    /// Builds the tower with caller-supplied spectral data. The relation
    /// suites only pass when the data is the true eigenpair; feeding weights
    /// from a different graph is the standard negative control.
    pub fn with_spectral(
        graph: BipartiteGraph,
        spectral: SpectralData,
        depth: usize,
    ) -> Result<Arc<Self>, TowerError> {
        if depth == 0 {
            return Err(TowerError::ZeroDepth);
        }
        if graph.edge_count() == 0 {
            return Err(TowerError::NoEdges(graph.name().to_string()));
        }
        let mut levels = Vec::with_capacity(depth + 1);
        levels.push(Level {
            blocks: vec![LevelBlock {
                vertex: graph.star(),
                paths: vec![vec![graph.star()]],
            }],
        });
        for m in 1..=depth {
            let prev = &levels[m - 1];
            let mut by_vertex: Vec<Vec<Vec<usize>>> = vec![Vec::new(); graph.vertex_count()];
            for block in &prev.blocks {
                for path in &block.paths {
                    for &next in graph.neighbors(block.vertex) {
                        let mut extended = path.clone();
                        extended.push(next);
                        by_vertex[next].push(extended);
                    }
                }
            }
            let mut blocks = Vec::new();
            for (vertex, mut paths) in by_vertex.into_iter().enumerate() {
                if paths.is_empty() {
                    continue;
                }
                paths.sort_unstable();
                blocks.push(LevelBlock { vertex, paths });
            }
            let level = Level { blocks };
            let dim = level.dimension();
            if dim > LEVEL_DIMENSION_BOUND {
                return Err(TowerError::LevelTooLarge {
                    level: m,
                    dim,
                    bound: LEVEL_DIMENSION_BOUND,
                });
            }
            levels.push(level);
        }
        Ok(Arc::new(Self {
            graph,
            spectral,
            depth,
            levels,
        }))
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn tau(&self) -> f64 {
        self.spectral.tau()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, m: usize) -> &Level {
        &self.levels[m]
    }

    /// Markov trace weight of a diagonal entry at level `m` in the block of
    /// `vertex`: `mu(vertex) / beta^m` (with `mu(star) = 1`).
    pub fn trace_weight(&self, m: usize, vertex: usize) -> f64 {
        self.spectral.weight(vertex) * self.spectral.norm().powi(-(m as i32))
    }

    /// Level dimensions as JSON:
    /// `{graph, star, levels: [{m, blocks: [{vertex, size}], dim}]}`.
    pub fn dimensions_json(&self) -> serde_json::Value {
        let levels: Vec<_> = self
            .levels
            .iter()
            .enumerate()
            .map(|(m, level)| {
                let blocks: Vec<_> = level
                    .blocks
                    .iter()
                    .map(|b| {
                        json!({
                            "vertex": self.graph.vertex_name(b.vertex),
                            "size": b.size(),
                        })
                    })
                    .collect();
                json!({ "m": m, "blocks": blocks, "dim": level.dimension() })
            })
            .collect();
        json!({
            "graph": self.graph.name(),
            "star": self.graph.vertex_name(self.graph.star()),
            "levels": levels,
        })
    }

    /// Bratteli diagram in DOT: one rank per level, one node per block,
    /// inclusion edges between consecutive levels.
    pub fn bratteli_dot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "graph \"bratteli_{}_{}\" {{\n  rankdir=TB;\n  node [shape=box];\n",
            self.graph.name(),
            self.graph.vertex_name(self.graph.star())
        ));
        for (m, level) in self.levels.iter().enumerate() {
            out.push_str("  { rank=same;");
            for b in &level.blocks {
                out.push_str(&format!(
                    " \"l{}_{}\" [label=\"{}:{} ({})\"];",
                    m,
                    self.graph.vertex_name(b.vertex),
                    m,
                    self.graph.vertex_name(b.vertex),
                    b.size()
                ));
            }
            out.push_str(" }\n");
        }
        for m in 0..self.depth {
            for b in &self.levels[m].blocks {
                for &w in self.graph.neighbors(b.vertex) {
                    if self.levels[m + 1].block_position(w).is_some() {
                        out.push_str(&format!(
                            "  \"l{}_{}\" -- \"l{}_{}\";\n",
                            m,
                            self.graph.vertex_name(b.vertex),
                            m + 1,
                            self.graph.vertex_name(w)
                        ));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// An element of the level-`m` path algebra: one square matrix per block,
/// aligned with the blocks of `tower.level(level)`. Real elements use
/// `f64`; the braid representations use `Complex<f64>`.
#[derive(Debug, Clone)]
pub struct MultiMatrix<S: ComplexField<RealField = f64>> {
    tower: Arc<Tower>,
    level: usize,
    blocks: Vec<DMatrix<S>>,
}

impl<S: ComplexField<RealField = f64>> MultiMatrix<S> {
    pub fn zeros(tower: &Arc<Tower>, level: usize) -> Self {
        let blocks = tower
            .level(level)
            .blocks()
            .iter()
            .map(|b| DMatrix::zeros(b.size(), b.size()))
            .collect();
        Self {
            tower: Arc::clone(tower),
            level,
            blocks,
        }
    }

    pub fn identity(tower: &Arc<Tower>, level: usize) -> Self {
        let blocks = tower
            .level(level)
            .blocks()
            .iter()
            .map(|b| DMatrix::identity(b.size(), b.size()))
            .collect();
        Self {
            tower: Arc::clone(tower),
            level,
            blocks,
        }
    }

    /// Wraps raw blocks; the shapes must match the level's block sizes.
    pub fn from_blocks(tower: &Arc<Tower>, level: usize, blocks: Vec<DMatrix<S>>) -> Self {
        let sizes: Vec<usize> = tower.level(level).blocks().iter().map(|b| b.size()).collect();
        assert_eq!(sizes.len(), blocks.len(), "block count mismatch");
        for (b, &s) in blocks.iter().zip(&sizes) {
            assert!(b.nrows() == s && b.ncols() == s, "block shape mismatch");
        }
        Self {
            tower: Arc::clone(tower),
            level,
            blocks,
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[DMatrix<S>] {
        &self.blocks
    }

    pub fn block(&self, pos: usize) -> &DMatrix<S> {
        &self.blocks[pos]
    }

    pub fn block_mut(&mut self, pos: usize) -> &mut DMatrix<S> {
        &mut self.blocks[pos]
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.tower, &other.tower),
            "elements live in different towers"
        );
        assert_eq!(self.level, other.level, "elements live at different levels");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }

    pub fn scaled(&self, s: S) -> Self {
        let blocks = self.blocks.iter().map(|b| b * s.clone()).collect();
        Self {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        Self {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }

    /// The Markov trace `tr(x) = sum_v mu(v) beta^-m sum_{paths to v} x_path,path`,
    /// normalized so the identity has trace 1.
    pub fn trace(&self) -> S {
        let level = self.tower.level(self.level);
        let mut total = S::zero();
        for (block, info) in self.blocks.iter().zip(level.blocks()) {
            let w = self.tower.trace_weight(self.level, info.vertex());
            total += block.trace() * S::from_real(w);
        }
        total
    }

    /// Trace inner product `<x, y> = tr(y* x)`.
    pub fn inner(&self, other: &Self) -> S {
        self.assert_compatible(other);
        let level = self.tower.level(self.level);
        let mut total = S::zero();
        for ((a, b), info) in self.blocks.iter().zip(&other.blocks).zip(level.blocks()) {
            let w = S::from_real(self.tower.trace_weight(self.level, info.vertex()));
            let mut dot = S::zero();
            for (x, y) in a.iter().zip(b.iter()) {
                dot += y.clone().conjugate() * x.clone();
            }
            total += dot * w;
        }
        total
    }

    /// Hilbert-Schmidt norm in the trace inner product.
    pub fn hs_norm(&self) -> f64 {
        self.inner(self).real().max(0.0).sqrt()
    }

    /// Largest entry modulus across all blocks.
    pub fn norm_max(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0, |m, z| m.max(z.clone().modulus()))
    }

    /// The unital *-homomorphism into a higher level, extending each matrix
    /// unit over all one-step continuations of its paths; preserves products,
    /// adjoints, and the Markov trace.
    pub fn embed(&self, target: usize) -> Result<Self, TowerError> {
        if target < self.level {
            return Err(TowerError::LevelOutOfRange {
                target,
                depth: self.tower.depth(),
            });
        }
        if target > self.tower.depth() {
            return Err(TowerError::LevelOutOfRange {
                target,
                depth: self.tower.depth(),
            });
        }
        let mut current = self.clone();
        for _ in self.level..target {
            current = current.embed_step();
        }
        Ok(current)
    }

    fn embed_step(&self) -> Self {
        let m = self.level;
        let tower = &self.tower;
        let next = tower.level(m + 1);
        let here = tower.level(m);
        let mut blocks = Vec::with_capacity(next.blocks().len());
        for info in next.blocks() {
            let paths = info.paths();
            // Prefix lookup: (block position, row index) at level m.
            let prefix: Vec<(usize, usize)> = paths
                .iter()
                .map(|p| here.locate(&p[..p.len() - 1]).expect("prefix must exist"))
                .collect();
            let mut block = DMatrix::zeros(paths.len(), paths.len());
            for r in 0..paths.len() {
                for c in 0..paths.len() {
                    let (rb, ri) = prefix[r];
                    let (cb, ci) = prefix[c];
                    if rb == cb {
                        block[(r, c)] = self.blocks[rb][(ri, ci)].clone();
                    }
                }
            }
            blocks.push(block);
        }
        Self {
            tower: Arc::clone(tower),
            level: m + 1,
            blocks,
        }
    }
}

impl MultiMatrix<f64> {
    /// Promotes a real element to complex scalars.
    pub fn to_complex(&self) -> MultiMatrix<nalgebra::Complex<f64>> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.map(|x| nalgebra::Complex::new(x, 0.0)))
            .collect();
        MultiMatrix {
            tower: Arc::clone(&self.tower),
            level: self.level,
            blocks,
        }
    }
}

impl<S: ComplexField<RealField = f64>> std::ops::Add for &MultiMatrix<S> {
    type Output = MultiMatrix<S>;
    fn add(self, rhs: Self) -> MultiMatrix<S> {
        MultiMatrix::add(self, rhs)
    }
}

impl<S: ComplexField<RealField = f64>> std::ops::Sub for &MultiMatrix<S> {
    type Output = MultiMatrix<S>;
    fn sub(self, rhs: Self) -> MultiMatrix<S> {
        MultiMatrix::sub(self, rhs)
    }
}

impl<S: ComplexField<RealField = f64>> std::ops::Mul for &MultiMatrix<S> {
    type Output = MultiMatrix<S>;
    fn mul(self, rhs: Self) -> MultiMatrix<S> {
        MultiMatrix::mul(self, rhs)
    }
}

/// The Jones projection `e_i` as a level-`(i+1)` element. Its matrix hits
/// pairs of paths that agree everywhere except at position `i`, where both
/// make a round trip `v -> w -> v` from the shared position-`(i-1)` vertex
/// `v`; the entry between round trips through `w` and `w'` is
/// `sqrt(mu(w) mu(w')) / (beta mu(v))`.
pub fn jones_projection_matrix(
    tower: &Arc<Tower>,
    i: usize,
) -> Result<MultiMatrix<f64>, TowerError> {
    if i == 0 || i + 1 > tower.depth() {
        return Err(TowerError::JonesIndexOutOfRange {
            i,
            needed: i + 1,
            depth: tower.depth(),
        });
    }
    let level = i + 1;
    let beta = tower.spectral().norm();
    let mu = |v: usize| tower.spectral().weight(v);
    let mut out = MultiMatrix::zeros(tower, level);
    for (bpos, info) in tower.level(level).blocks().iter().enumerate() {
        let paths = info.paths();
        let block = out.block_mut(bpos);
        for (r, xi) in paths.iter().enumerate() {
            if xi[i - 1] != xi[i + 1] {
                continue;
            }
            for (c, eta) in paths.iter().enumerate() {
                if eta[i - 1] != eta[i + 1] {
                    continue;
                }
                if xi[..i] != eta[..i] || xi[i + 1..] != eta[i + 1..] {
                    continue;
                }
                block[(r, c)] = (mu(xi[i]) * mu(eta[i])).sqrt() / (beta * mu(xi[i - 1]));
            }
        }
    }
    Ok(out)
}

/// Tolerance below which a Gram-Schmidt residual is treated as linearly
/// dependent.
pub const RANK_TOL: f64 = 1e-10;

fn orthonormal_complement(
    basis: &[MultiMatrix<f64>],
    candidate: &MultiMatrix<f64>,
) -> Option<MultiMatrix<f64>> {
    let mut r = candidate.clone();
    // Two rounds of classical Gram-Schmidt keep the basis orthonormal to
    // machine precision.
    for _ in 0..2 {
        for b in basis {
            let coeff = r.inner(b);
            r = r.sub(&b.scaled(coeff));
        }
    }
    let norm = r.hs_norm();
    if norm > RANK_TOL {
        Some(r.scaled(norm.recip()))
    } else {
        None
    }
}

/// Closes the span of `{identity} ∪ gens` under multiplication and adjoints,
/// returning an orthonormal basis in the trace inner product. Errors if the
/// dimension exceeds `cap`.
pub fn generated_subalgebra(
    tower: &Arc<Tower>,
    level: usize,
    gens: &[MultiMatrix<f64>],
    cap: usize,
) -> Result<Vec<MultiMatrix<f64>>, TowerError> {
    let mut basis: Vec<MultiMatrix<f64>> = Vec::new();
    let push = |basis: &mut Vec<MultiMatrix<f64>>, x: &MultiMatrix<f64>| -> Result<bool, TowerError> {
        match orthonormal_complement(basis, x) {
            Some(nb) => {
                if basis.len() + 1 > cap {
                    return Err(TowerError::SubalgebraCapExceeded { cap });
                }
                basis.push(nb);
                Ok(true)
            }
            None => Ok(false),
        }
    };
    push(&mut basis, &MultiMatrix::identity(tower, level))?;
    for g in gens {
        assert!(Arc::ptr_eq(g.tower(), tower) && g.level() == level);
        push(&mut basis, g)?;
        push(&mut basis, &g.adjoint())?;
    }
    // Multiply until the span stabilizes; new elements are appended and take
    // part in later rounds.
    let mut frontier_start = 0;
    loop {
        let len = basis.len();
        let mut grew = false;
        for i in 0..len {
            for j in 0..len {
                if i < frontier_start && j < frontier_start {
                    continue; // both factors already closed in earlier rounds
                }
                let product = basis[i].mul(&basis[j]);
                if push(&mut basis, &product)? {
                    grew = true;
                }
                let adj = product.adjoint();
                if push(&mut basis, &adj)? {
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(basis);
        }
        frontier_start = len;
    }
}

/// Trace-orthogonal conditional expectation onto the span of an orthonormal
/// basis: `E(x) = sum_b <x, b> b`. Idempotent, trace-preserving, identity on
/// the subalgebra.
pub fn conditional_expectation(
    basis: &[MultiMatrix<f64>],
    x: &MultiMatrix<f64>,
) -> Result<MultiMatrix<f64>, TowerError> {
    const ORTHO_TOL: f64 = 1e-8;
    let mut residual = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let g = a.inner(b);
            let expected = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((g - expected).abs());
        }
    }
    if residual >= ORTHO_TOL {
        return Err(TowerError::BasisNotOrthonormal { residual });
    }
    let mut out = MultiMatrix::zeros(x.tower(), x.level());
    for b in basis {
        let coeff = x.inner(b);
        out = out.add(&b.scaled(coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_graph, StarSpec};

    fn d5_tower(depth: usize) -> Arc<Tower> {
        let g = build_graph("D5", StarSpec::Trivalent).unwrap();
        Tower::build(g, depth).unwrap()
    }

    /// Deterministic pseudo-random element, xorshift-filled blocks.
    fn pseudo_random(tower: &Arc<Tower>, level: usize, seed: u64) -> MultiMatrix<f64> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let blocks = tower
            .level(level)
            .blocks()
            .iter()
            .map(|b| DMatrix::from_fn(b.size(), b.size(), |_, _| next()))
            .collect();
        MultiMatrix::from_blocks(tower, level, blocks)
    }

    #[test]
    fn d5_level_dimensions() {
        let t = d5_tower(3);
        assert_eq!(t.level(0).dimension(), 1);
        assert_eq!(t.level(1).dimension(), 3);
        assert_eq!(t.level(2).dimension(), 10);
        let names: Vec<&str> = t
            .level(1)
            .blocks()
            .iter()
            .map(|b| t.graph().vertex_name(b.vertex()))
            .collect();
        assert_eq!(names, vec!["c2", "f1", "f2"]);
        let sizes: Vec<usize> = t.level(2).blocks().iter().map(|b| b.size()).collect();
        assert_eq!(sizes, vec![1, 3]); // c1 then c3
    }

    #[test]
    fn a2_level_two_is_one_dimensional() {
        let g = build_graph("A2", StarSpec::Default).unwrap();
        let t = Tower::build(g, 2).unwrap();
        assert_eq!(t.level(2).dimension(), 1);
    }

    #[test]
    fn path_counts_satisfy_the_recurrence() {
        let t = d5_tower(6);
        let g = t.graph();
        for m in 0..6 {
            for w in 0..g.vertex_count() {
                let count_next = t
                    .level(m + 1)
                    .blocks()
                    .iter()
                    .find(|b| b.vertex() == w)
                    .map_or(0, |b| b.size());
                let sum_prev: usize = g
                    .neighbors(w)
                    .iter()
                    .map(|&v| {
                        t.level(m)
                            .blocks()
                            .iter()
                            .find(|b| b.vertex() == v)
                            .map_or(0, |b| b.size())
                    })
                    .sum();
                assert_eq!(count_next, sum_prev, "level {} vertex {}", m + 1, w);
            }
        }
    }

    #[test]
    fn paths_step_along_edges_and_start_at_star() {
        let t = d5_tower(4);
        let g = t.graph();
        for m in 0..=4 {
            for block in t.level(m).blocks() {
                for path in block.paths() {
                    assert_eq!(path.len(), m + 1);
                    assert_eq!(path[0], g.star());
                    assert_eq!(*path.last().unwrap(), block.vertex());
                    for step in path.windows(2) {
                        assert!(g.neighbors(step[0]).contains(&step[1]));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_normalized_and_projections_have_trace_tau() {
        let t = d5_tower(4);
        for m in 1..=4 {
            let id = MultiMatrix::<f64>::identity(&t, m);
            assert!((id.trace() - 1.0).abs() < 1e-12, "level {m}");
        }
        for i in 1..4 {
            let e = jones_projection_matrix(&t, i).unwrap();
            assert!((e.trace() - t.tau()).abs() < 1e-12, "tr(e_{i})");
        }
    }

    #[test]
    fn jones_projections_satisfy_tl_relations() {
        let t = d5_tower(5);
        let tau = t.tau();
        let e: Vec<MultiMatrix<f64>> = (1..5)
            .map(|i| jones_projection_matrix(&t, i).unwrap().embed(5).unwrap())
            .collect();
        for (k, ei) in e.iter().enumerate() {
            assert!(ei.sub(&ei.adjoint()).norm_max() == 0.0, "e_{} adjoint", k + 1);
            assert!(ei.mul(ei).sub(ei).norm_max() < 1e-12, "e_{} idempotent", k + 1);
        }
        for k in 0..3 {
            let lhs = e[k].mul(&e[k + 1]).mul(&e[k]);
            assert!(lhs.sub(&e[k].scaled(tau)).norm_max() < 1e-12);
            let lhs = e[k + 1].mul(&e[k]).mul(&e[k + 1]);
            assert!(lhs.sub(&e[k + 1].scaled(tau)).norm_max() < 1e-12);
        }
        for a in 0..4 {
            for b in a + 2..4 {
                assert!(e[a].mul(&e[b]).sub(&e[b].mul(&e[a])).norm_max() < 1e-14);
            }
        }
        assert!(jones_projection_matrix(&t, 5).is_err());
        assert!(jones_projection_matrix(&t, 0).is_err());
    }

    #[test]
    fn embedding_is_a_trace_preserving_homomorphism() {
        let t = d5_tower(4);
        let id2 = MultiMatrix::<f64>::identity(&t, 2);
        let id3 = MultiMatrix::<f64>::identity(&t, 3);
        assert!(id2.embed(3).unwrap().sub(&id3).norm_max() == 0.0);

        let x = pseudo_random(&t, 2, 7);
        let y = pseudo_random(&t, 2, 11);
        assert!((x.embed(3).unwrap().trace() - x.trace()).abs() < 1e-12);
        assert!((x.embed(4).unwrap().trace() - x.trace()).abs() < 1e-12);
        let xy = x.mul(&y);
        let lhs = xy.embed(4).unwrap();
        let rhs = x.embed(4).unwrap().mul(&y.embed(4).unwrap());
        assert!(lhs.sub(&rhs).norm_max() < 1e-12);
        let adj = x.adjoint().embed(3).unwrap();
        assert!(adj.sub(&x.embed(3).unwrap().adjoint()).norm_max() == 0.0);
        assert!(x.embed(1).is_err());
        assert!(x.embed(5).is_err());
    }

    #[test]
    fn empty_generating_set_gives_the_identity_algebra() {
        let t = d5_tower(3);
        let basis = generated_subalgebra(&t, 2, &[], 100).unwrap();
        assert_eq!(basis.len(), 1);
        let id = MultiMatrix::<f64>::identity(&t, 2);
        let coeff = id.inner(&basis[0]);
        assert!(id.sub(&basis[0].scaled(coeff)).norm_max() < 1e-12);
    }

    #[test]
    fn tl_subalgebra_dimension_at_level_three() {
        // alg(e_1, e_2) at level 3 of an A-type tower realizes TL_3, dimension 5.
        let g = build_graph("A5", StarSpec::Default).unwrap();
        let t = Tower::build(g, 3).unwrap();
        let e1 = jones_projection_matrix(&t, 1).unwrap().embed(3).unwrap();
        let e2 = jones_projection_matrix(&t, 2).unwrap();
        let basis = generated_subalgebra(&t, 3, &[e1, e2], 100).unwrap();
        assert_eq!(basis.len(), 5);
    }

    #[test]
    fn subalgebra_cap_signals_runaway_generation() {
        let t = d5_tower(3);
        let x = pseudo_random(&t, 3, 3);
        let err = generated_subalgebra(&t, 3, &[x], 4);
        assert!(matches!(err, Err(TowerError::SubalgebraCapExceeded { cap: 4 })));
    }

    #[test]
    fn conditional_expectation_properties() {
        let t = d5_tower(3);
        let e1 = jones_projection_matrix(&t, 1).unwrap().embed(3).unwrap();
        let e2 = jones_projection_matrix(&t, 2).unwrap();
        let basis = generated_subalgebra(&t, 3, &[e1.clone(), e2], 100).unwrap();
        for b in &basis {
            let eb = conditional_expectation(&basis, b).unwrap();
            assert!(eb.sub(b).norm_max() < 1e-10);
        }
        let x = pseudo_random(&t, 3, 42);
        let ex = conditional_expectation(&basis, &x).unwrap();
        assert!((ex.trace() - x.trace()).abs() < 1e-10);
        // idempotent
        let exx = conditional_expectation(&basis, &ex).unwrap();
        assert!(exx.sub(&ex).norm_max() < 1e-10);
        // bimodule property: E(b x b') = b E(x) b'
        let b = &basis[1];
        let lhs = conditional_expectation(&basis, &b.mul(&x).mul(b)).unwrap();
        let rhs = b.mul(&ex).mul(b);
        assert!(lhs.sub(&rhs).norm_max() < 1e-9);

        let skewed = vec![basis[0].scaled(2.0)];
        assert!(matches!(
            conditional_expectation(&skewed, &x),
            Err(TowerError::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn negative_control_wrong_weights_break_the_relations() {
        let g = build_graph("D5", StarSpec::Trivalent).unwrap();
        let honest = spectral_data(&g);
        let mut weights = honest.weights().to_vec();
        weights[3] *= 1.01; // perturb mu(f1)
        let t = Tower::with_spectral(g, SpectralData::from_parts(honest.norm(), weights), 3)
            .unwrap();
        let e1 = jones_projection_matrix(&t, 1).unwrap();
        let residual = e1.mul(&e1).sub(&e1).norm_max();
        assert!(residual > 1e-4, "perturbed weights must fail, got {residual}");
    }

    #[test]
    fn dimensions_json_shape() {
        let t = d5_tower(2);
        let v = t.dimensions_json();
        assert_eq!(v["graph"], "D5");
        assert_eq!(v["star"], "c3");
        assert_eq!(v["levels"][2]["dim"], 10);
        assert_eq!(v["levels"][1]["blocks"][0]["vertex"], "c2");
    }

    #[test]
    fn bratteli_dot_contains_ranks_and_edges() {
        let t = d5_tower(2);
        let dot = t.bratteli_dot();
        assert!(dot.contains("rank=same"));
        assert!(dot.contains("\"l0_c3\" -- \"l1_c2\";"));
        assert!(dot.contains("\"l1_f1\" -- \"l2_c3\";"));
    }

    #[test]
    fn zero_depth_and_edgeless_graphs_are_rejected() {
        let g = build_graph("D5", StarSpec::Trivalent).unwrap();
        assert!(matches!(Tower::build(g, 0), Err(TowerError::ZeroDepth)));
        let a1 = build_graph("A1", StarSpec::Default).unwrap();
        assert!(matches!(Tower::build(a1, 2), Err(TowerError::NoEdges(_))));
    }
}
