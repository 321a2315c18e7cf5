//! Conservative constraint satisfaction: a classifier that decides whether a
//! conservative constraint language is tractable, and a solver for tractable
//! instances built from local consistency, as-component exclusion, a
//! retraction step and a semilattice-free base solver.

pub mod analysis;
pub mod consistency;
pub mod error;
pub mod harness;
pub mod model;
pub mod reductions;
pub mod solver;
pub mod structure;

pub use analysis::{
    check_uniformity_laws, classify_language, classify_pair, derive_m, synthesize_uniform_ops, ClassifierVerdict,
    ConstraintLanguage, EdgeLabeledGraph, Orientation, PairLabel, TernaryTable,
};
pub use error::{Error, Result};
pub use model::{
    close_under_ops, validate_instance, Algebra, Assignment, Constraint, Elem, ElemSet, Instance, Op, Relation,
    SolveResult, Tuple, Violation,
};
pub use solver::{classify_and_solve, solve, solve_instance, SolveTrace, SolverConfig, Verdict};
