//! Graph concordance of outcomes observed on a single network.
//!
//! Graph concordance compares how strongly an outcome correlates across
//! linked vertex pairs with how strongly it correlates across unlinked pairs.
//! This crate estimates it, builds permutation confidence intervals and
//! one-sided tests around a studentized statistic whose variance accounts for
//! dependence along edges, and runs Monte Carlo coverage studies on random
//! graphs.
//!
//! ```
//! use netconcord::{estimate_gc, Graph, OutcomeVector};
//!
//! let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
//! let y = OutcomeVector::new(vec![1.0, 1.0, -1.0, -1.0]).unwrap();
//! let est = estimate_gc(&g, &y).unwrap();
//! assert_eq!(est.c_hat, 2.0);
//! ```

pub mod dgp;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod graph;
pub mod homophily;
pub mod io;
pub mod permutation;
pub mod random_graphs;
pub mod rng;
pub mod sim;
pub mod sum;
pub mod variance;

pub use dgp::{generate_outcomes, true_gc_monte_carlo, DgpConfig, OutcomeProcess, TrueGc};
pub use error::{Error, Result};
pub use estimator::{
    estimate_gc, estimate_gc_matrix, estimate_gc_with, neighbor_averages, standardize,
    Complement, ConcordanceEstimate, OutcomeVector,
};
pub use exec::Execution;
pub use graph::{build_graph, degree_stats, degree_stats_of_edges, two_neighborhood, DegreeStats, Graph};
pub use homophily::{inbreeding_homophily, HomophilyEstimate};
pub use permutation::{
    asymptotic_ci, confidence_interval, critical_value, infer, permutation_statistic,
    sample_permutations, test_positive_gc, Inference, InferenceOptions, InferenceResult, Method,
    OneSidedTest, PermutationDistribution, PermutationDraw, Sided,
};
pub use random_graphs::{barabasi_albert, erdos_renyi, BaConfig, ErConfig};
pub use sim::{run_coverage_experiment, GraphSpec, SimulationConfig, SimulationReport};
pub use variance::{
    degree_class_means, q_values, studentize, t_statistic, variance_estimate, VarianceEstimate,
};
