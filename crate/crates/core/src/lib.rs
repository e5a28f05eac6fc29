//! Canonical-dual heuristics for max-cut.
//!
//! A weighted graph is turned into a ±1 quadratic program by pinning one
//! vertex, the β-perturbed canonical dual of that program is maximized by
//! gradient ascent over the positive-definite cone, and the rounded dual
//! solution is repaired by fixing near-binary coordinates and re-solving the
//! rest, followed by single-flip improvement.
//!
//! ```
//! use cdmaxcut::{solve_graph, AlgorithmId, SolveOptions, WeightedGraph};
//!
//! let g = WeightedGraph::single_edge(5.0);
//! let report = solve_graph(&g, AlgorithmId::Cda1, &SolveOptions::default()).unwrap();
//! assert_eq!(report.solution.cut_weight, 5.0);
//! ```

// Negated comparisons below are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compensation;
pub mod drivers;
pub mod dual;
pub mod error;
pub mod fixtures;
pub mod instance;
pub mod linalg;
pub mod oracle;
pub mod parallel;
pub mod perturbation;
pub mod reduction;
pub mod tsplib;

pub use drivers::{best_of, cda1, cda2, cda3, solve_batch, solve_graph, SolveOptions, SolveReport};
pub use dual::{algorithm1, Algorithm1Outcome, Certificate, DualIterate, PerturbationConfig, SolverSettings};
pub use error::{Error, Result};
pub use instance::{build_primal, build_primal_default, cut_value, primal_value, AlgorithmId, CutSolution, PrimalProblem, WeightedGraph};
pub use oracle::{brute_force_maxcut, DEFAULT_ORACLE_LIMIT};
pub use parallel::Execution;
pub use perturbation::{AlphaMode, BetaMode, PerturbationPolicy};
pub use tsplib::{read_tsplib_file, DistanceConvention};
