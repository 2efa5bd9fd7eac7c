//! Spectral data of catalog graphs: the graph norm `beta`, the
//! Perron-Frobenius weight vector `mu`, and the derived parameter
//! `tau = beta^-2`, plus the admissibility classification of `tau` against
//! the T-graph norm series.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{build_graph, BipartiteGraph, StarSpec};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("tau must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("T-graph arm position k must be at least 2, got {0}")]
    ArmTooSmall(usize),
}

/// Perron-Frobenius eigendata of a pointed graph: the norm `beta`, the
/// positive eigenvector `mu` normalized so that `mu(star) = 1`, and
/// `tau = beta^-2`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    norm: f64,
    weights: Vec<f64>,
    tau: f64,
}

impl SpectralData {
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `max_v |(A mu)(v) - beta mu(v)|`, the eigenpair residual on `g`.
    pub fn residual(&self, g: &BipartiteGraph) -> f64 {
        let a = g.adjacency_matrix();
        let mu = DVector::from_column_slice(&self.weights);
        (&a * &mu - self.norm * &mu).amax()
    }

    /// Test hook: assembles spectral data without solving the eigenproblem.
    /// Feeding one graph's weights to another graph's tower is the standard
    /// negative control for the relation suites.
    pub fn from_parts(norm: f64, weights: Vec<f64>) -> Self {
        Self {
            norm,
            tau: norm.powi(-2),
            weights,
        }
    }
}

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 20_000;

/// Computes the Perron-Frobenius eigenpair of the adjacency matrix by power
/// iteration on `A + I` (the shift separates `+beta` from `-beta`, which have
/// equal modulus on a bipartite graph), starting from the all-ones vector.
/// Falls back to shifted inverse iteration when the spectral gap is too small
/// for power iteration to converge, seeding the shift from the bisection norm
/// when the graph is a tree.
pub fn spectral_data(g: &BipartiteGraph) -> SpectralData {
    let n = g.vertex_count();
    let a = g.adjacency_matrix();
    let shifted = &a + DMatrix::identity(n, n);
    let mut v = DVector::from_element(n, 1.0);
    v /= v.norm();
    let mut beta = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        let w = &shifted * &v;
        v = &w / w.norm();
        beta = v.dot(&(&a * &v));
        residual = (&a * &v - beta * &v).amax();
        if residual < POWER_TOL {
            break;
        }
    }
    if residual >= POWER_TOL {
        if is_tree(g) {
            beta = tree_largest_eigenvalue(g, POWER_TOL);
        }
        for _ in 0..16 {
            let m = &a - DMatrix::identity(n, n) * (beta + 1e-10);
            let Some(w) = m.lu().solve(&v) else { break };
            v = &w / w.norm();
            beta = v.dot(&(&a * &v));
            residual = (&a * &v - beta * &v).amax();
            if residual < POWER_TOL {
                break;
            }
        }
    }
    // Orient positively and normalize at the star.
    if v[g.star()] < 0.0 {
        v = -v;
    }
    let weights: Vec<f64> = (&v / v[g.star()]).iter().copied().collect();
    SpectralData {
        norm: beta,
        tau: beta.powi(-2),
        weights,
    }
}

fn is_tree(g: &BipartiteGraph) -> bool {
    g.edge_count() + 1 == g.vertex_count()
}

/// Number of adjacency eigenvalues strictly greater than `x`, via the inertia
/// of `A - xI` computed by fill-in-free elimination in leaf-first order.
/// Requires a tree.
fn eigenvalues_above(g: &BipartiteGraph, x: f64) -> usize {
    let n = g.vertex_count();
    debug_assert!(is_tree(g));
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut diag = vec![0.0f64; n];
    let mut above = 0;
    for &v in order.iter().rev() {
        let mut d = -x;
        for &w in g.neighbors(v) {
            if parent[w] == v {
                d -= 1.0 / diag[w];
            }
        }
        if d == 0.0 {
            d = -1e-300;
        }
        if d > 0.0 {
            above += 1;
        }
        diag[v] = d;
    }
    above
}

/// Largest adjacency eigenvalue of a tree by inertia bisection; exact to
/// `tol`. Independent of the power-iteration route in [`spectral_data`].
pub fn tree_largest_eigenvalue(g: &BipartiteGraph, tol: f64) -> f64 {
    assert!(is_tree(g), "inertia bisection requires a tree");
    // Trees of maximum degree <= 3 have norm < 2*sqrt(2); 3.0 is a safe cap
    // for anything in the catalog, and the loop widens if it is not.
    let (mut lo, mut hi) = (0.0f64, 3.0f64);
    while eigenvalues_above(g, hi) > 0 {
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eigenvalues_above(g, mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Norm of the T-shaped graph `T_{k,n}` (chain of `n` vertices with a pendant
/// attached at position `k`).
pub fn t_graph_norm(k: usize, n: usize) -> Result<f64, SpectrumError> {
    if k < 2 {
        return Err(SpectrumError::ArmTooSmall(k));
    }
    assert!(n >= k, "T_{{k,n}} requires n >= k");
    let g = build_graph(&format!("T{k},{n}"), StarSpec::Default)
        .expect("T-graph construction cannot fail for k <= n");
    Ok(tree_largest_eigenvalue(&g, 1e-13))
}

/// Norm of the infinite graph `T_{k,infinity}`, the supremum of the finite
/// `T_{k,n}` norms. For `k = 2` this is exactly 2 (the infinite `D` chain);
/// for `k >= 3` it is the unique root above 2 of the bound-state equation
/// `Q_{k+1}(x) = (t(x) + 1/x) Q_k(x)`, where `Q` is the Chebyshev-like chain
/// polynomial (`Q_0 = 0`, `Q_1 = 1`, `Q_{j+1} = x Q_j - Q_{j-1}`) and
/// `t(x) = (x - sqrt(x^2 - 4))/2` is the decay rate of an eigenvector along
/// the infinite arm.
pub fn t_graph_limit_norm(k: usize) -> Result<f64, SpectrumError> {
    if k < 2 {
        return Err(SpectrumError::ArmTooSmall(k));
    }
    if k == 2 {
        return Ok(2.0);
    }
    let f = |x: f64| {
        let t = (x - (x * x - 4.0).sqrt()) / 2.0;
        let (mut q_prev, mut q) = (0.0f64, 1.0f64);
        for _ in 1..k {
            let next = x * q - q_prev;
            q_prev = q;
            q = next;
        }
        let q_next = x * q - q_prev;
        q_next - (t + 1.0 / x) * q
    };
    let (mut lo, mut hi) = (2.0 + 1e-12, 3.0);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Admissibility of a Temperley-Lieb parameter `tau` against the T-graph norm
/// series at arm position `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "classification", rename_all = "lowercase")]
pub enum TauClass {
    /// `tau = 1/||T_{k,n}||^2` within tolerance for this `n`. For `k = 2` the
    /// graph is `D_{n+1}`.
    Admissible { n: usize },
    /// `tau` exceeds the `T_{k,infinity}` threshold but matches no finite
    /// graph in the searched range.
    Inadmissible,
    /// `tau <= 1/||T_{k,infinity}||^2`: the norm series imposes no constraint.
    Unconstrained,
}

/// Default upper bound on `n` in [`classify_tau`]. The norm series is
/// monotone, so the search brackets and never scans the whole range.
pub const DEFAULT_CLASSIFY_BOUND: usize = 1000;

/// Classifies `tau` against `1/||T_{k,n}||^2`: `Unconstrained` below the
/// `T_{k,infinity}` threshold (1/4 for `k = 2`), otherwise `Admissible(n)`
/// when some `n <= bound` matches within `tol`, else `Inadmissible`.
pub fn classify_tau(
    tau: f64,
    k: usize,
    tol: f64,
    bound: usize,
) -> Result<TauClass, SpectrumError> {
    if !(tau > 0.0) {
        return Err(SpectrumError::NonPositiveTau(tau));
    }
    if k < 2 {
        return Err(SpectrumError::ArmTooSmall(k));
    }
    let limit = t_graph_limit_norm(k)?;
    if tau <= 1.0 / (limit * limit) {
        return Ok(TauClass::Unconstrained);
    }
    // tau_n = 1/||T_{k,n}||^2 decreases strictly in n; bracket the target.
    let tau_of = |n: usize| -> f64 {
        let norm = t_graph_norm(k, n).expect("k validated above");
        1.0 / (norm * norm)
    };
    let bound = bound.max(k);
    let (mut lo, mut hi) = (k, bound);
    if tau <= tau_of(bound) + tol {
        lo = bound;
    } else {
        // Invariant: tau_of(lo) >= tau (up to tol), tau_of(hi) < tau.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tau_of(mid) >= tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    for n in lo.saturating_sub(1).max(k)..=(lo + 1).min(bound) {
        if (tau - tau_of(n)).abs() < tol {
            return Ok(TauClass::Admissible { n });
        }
    }
    Ok(TauClass::Inadmissible)
}

/// Default truncation for [`jones_admissible_indices`] at `bound = 4`, where
/// the series accumulates.
pub const DEFAULT_INDEX_MAX_K: usize = 64;

/// The index values `4 cos^2(pi/k)`, `k = 3, 4, 5, ...`, strictly below
/// `bound`, ascending, truncated after `max_k`. The enumeration starts at
/// `k = 3` literally, so index 1 is included; callers wanting subfactor
/// indices above 1 should start at `k = 4`.
pub fn jones_admissible_indices(bound: f64, max_k: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 3..=max_k {
        let value = 4.0 * (std::f64::consts::PI / k as f64).cos().powi(2);
        if value >= bound {
            break;
        }
        out.push(value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{ade_catalog, coxeter_number};
    use std::f64::consts::PI;

    #[test]
    fn a2_eigenpair() {
        let g = build_graph("A2", StarSpec::Default).unwrap();
        let s = spectral_data(&g);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.weight(0) - 1.0).abs() < 1e-12);
        assert!((s.weight(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d5_norm_is_2cos_pi_over_8() {
        let g = build_graph("D5", StarSpec::Trivalent).unwrap();
        let s = spectral_data(&g);
        assert!((s.norm() - 2.0 * (PI / 8.0).cos()).abs() < 1e-12);
        assert!((s.tau() - 1.0 / (2.0 + 2.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn e6_norm_matches_independent_bisection() {
        let g = build_graph("E6", StarSpec::Default).unwrap();
        let s = spectral_data(&g);
        assert!((s.norm() - 2.0 * (PI / 12.0).cos()).abs() < 1e-10);
        let bisect = tree_largest_eigenvalue(&g, 1e-13);
        assert!((s.norm() - bisect).abs() < 1e-11);
    }

    #[test]
    fn catalog_norms_and_residuals() {
        for g in ade_catalog() {
            let s = spectral_data(&g);
            let h = coxeter_number(&g).unwrap() as f64;
            assert!(
                (s.norm() - 2.0 * (PI / h).cos()).abs() < 1e-9,
                "norm of {}",
                g.name()
            );
            assert!(s.residual(&g) < 1e-9, "residual of {}", g.name());
            assert!(s.weights().iter().all(|&w| w > 0.0), "{}", g.name());
        }
    }

    #[test]
    fn power_iteration_agrees_with_bisection_on_catalog() {
        for g in ade_catalog() {
            let s = spectral_data(&g);
            let b = tree_largest_eigenvalue(&g, 1e-13);
            assert!((s.norm() - b).abs() < 1e-10, "{}", g.name());
        }
    }

    #[test]
    fn t2n_norms_match_closed_form() {
        for n in 2..=12 {
            let norm = t_graph_norm(2, n).unwrap();
            let expected = 2.0 * (PI / (2.0 * n as f64)).cos();
            assert!((norm - expected).abs() < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn t_limit_norms() {
        assert_eq!(t_graph_limit_norm(2).unwrap(), 2.0);
        // For k >= 3 the limit caps the finite norms; the finite series
        // approaches it exponentially fast, so at n = 400 the two agree to
        // machine precision.
        for k in 3..=6 {
            let limit = t_graph_limit_norm(k).unwrap();
            assert!(limit > 2.0 && limit < 2.0 * 2.0f64.sqrt());
            let small = t_graph_norm(k, k + 8).unwrap();
            let large = t_graph_norm(k, 400).unwrap();
            assert!(small < large);
            assert!(large < limit + 1e-10);
            assert!((large - limit).abs() < 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        let tau_d5 = 1.0 / (4.0 * (PI / 8.0).cos().powi(2));
        assert_eq!(
            classify_tau(tau_d5, 2, 1e-9, DEFAULT_CLASSIFY_BOUND).unwrap(),
            TauClass::Admissible { n: 4 }
        );
        let tau_odd = 1.0 / (4.0 * (PI / 7.0).cos().powi(2));
        assert_eq!(
            classify_tau(tau_odd, 2, 1e-9, DEFAULT_CLASSIFY_BOUND).unwrap(),
            TauClass::Inadmissible
        );
        assert_eq!(
            classify_tau(0.2, 2, 1e-9, DEFAULT_CLASSIFY_BOUND).unwrap(),
            TauClass::Unconstrained
        );
        assert!(classify_tau(-0.1, 2, 1e-9, 100).is_err());
        assert!(classify_tau(0.3, 1, 1e-9, 100).is_err());
    }

    #[test]
    fn classify_far_beyond_series_is_inadmissible() {
        // tau above 1/||T_{2,2}||^2 = 1/2 matches nothing.
        assert_eq!(
            classify_tau(0.9, 2, 1e-9, DEFAULT_CLASSIFY_BOUND).unwrap(),
            TauClass::Inadmissible
        );
    }

    #[test]
    fn admissible_indices_series() {
        let tiny = jones_admissible_indices(1.5, 64);
        assert_eq!(tiny.len(), 1);
        assert!((tiny[0] - 1.0).abs() < 1e-12);
        let below_3_5 = jones_admissible_indices(3.5, 64);
        let expected = [1.0, 2.0, 2.618033988749895, 3.0, 3.246979603717467, 3.414213562373095];
        assert_eq!(below_3_5.len(), expected.len());
        for (got, want) in below_3_5.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        let near_four = jones_admissible_indices(4.0, 64);
        assert!(near_four.windows(2).all(|w| w[0] < w[1]));
        assert!(near_four.iter().all(|&x| x < 4.0));
        assert_eq!(near_four.len(), 64 - 2);
    }
}
