//! Graded-ring classification of Leavitt path algebras of finite graphs.
//!
//! The crate decides whether `L_K(E)` is strongly graded, a crossed product,
//! a skew group ring or a group ring, computes the graded matricial
//! representation of no-exit graphs, and cross-checks verdicts against a
//! bounded rewriting oracle for the graph monoid.

pub mod classify;
pub mod graph;
pub mod lattice;
pub mod matricial;
pub mod matrix_ring;
pub mod monoid;
pub mod report;

pub use classify::{check_edl, classify_lpa, ClassificationReport, EdlReport};
pub use graph::{parse_graph, parse_graph_with, Cycle, Graph, GraphError, ParseOptions};
pub use matricial::{canonicalize, k_theory_presentation, matricial_representation, GradedMatricialAlgebra};
pub use matrix_ring::{classify_matrix_ring, MatrixRingClassification, ShiftedMatrixRing};
pub use monoid::{MonoidBounds, MonoidElement, OracleOutcome};
pub use report::{emit_dot, run_cli};
