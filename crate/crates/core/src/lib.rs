//! Computation and verification toolkit for Temperley-Lieb diagram algebras,
//! string (path) algebras on pointed Coxeter-Dynkin graphs, and the forked
//! Temperley-Lieb systems living at the trivalent vertex of `D_n`.
//!
//! The crate has two independent models of the Temperley-Lieb algebra:
//!
//! * [`diagrams`] — the planar diagram basis with skein multiplication and the
//!   Markov trace, parameter-free diagrams with the loop value supplied at
//!   multiplication time;
//! * [`paths`] — the string-algebra realization on a pointed bipartite graph,
//!   with Jones projections as explicit block matrices and the Markov trace
//!   weighted by the Perron-Frobenius eigenvector.
//!
//! The two models are kept deliberately separate so that each can serve as an
//! oracle for the other: traces of words in the Jones projections must agree.
//!
//! On top of the path model, [`fork`] constructs the pair of fork projections
//! `(p, q)` of the `D_n` string algebra at the trivalent vertex and verifies
//! the forked Temperley-Lieb and Evans-Gould relations numerically, while
//! [`angles`] computes the angle invariant between the two intermediate
//! algebras three ways (closed form, Coxeter-number formula, and the fully
//! numeric conditional-expectation pipeline) together with fusion-dimension
//! polynomials and unitary braid-group generators.

pub mod angles;
pub mod diagrams;
pub mod fork;
pub mod graphs;
pub mod paths;
pub mod report;
pub mod spectrum;

pub use angles::{AngleResult, FusionDims, NumericAngle};
pub use diagrams::{TLDiagram, TLElement};
pub use fork::ForkedSystem;
pub use graphs::{BipartiteGraph, StarSpec};
pub use paths::{MultiMatrix, Tower};
pub use report::{Check, VerificationReport};
pub use spectrum::{SpectralData, TauClass};

/// Default tolerance for residual checks. All acceptance targets are
/// well-conditioned at double precision.
pub const DEFAULT_TOL: f64 = 1e-9;
