//! Information propagation on weighted directed networks and the associated
//! influence-maximization problem.
//!
//! The dynamics are a bounded-linear map: each node linearly aggregates its
//! in-neighbors' influence and clips the result between a time-dependent
//! lower bound (critical mass) and upper bound (saturation). Pushing the
//! bounds to their extremes recovers pure linear cascades on one end and
//! all-or-threshold dynamics on the other; a ramped multi-valued threshold
//! model is an exact reparameterization in between.
//!
//! On top of the dynamics sits the budget-constrained seed-selection problem:
//! choose `k` nodes to activate at their maximum initial values so that the
//! time-discounted influence over the whole network is maximal. In the linear
//! regime the problem is solved exactly by ranking nodes on Katz centrality;
//! away from it, a customized direct search polls swap neighborhoods from
//! that warm start. Brute-force ranking, random sampling, and centrality
//! baselines support accuracy and rank comparisons, and the `experiment`
//! module drives the reproducible parameter sweeps behind them.
//!
//! See the `examples/` directory for one runnable walkthrough per capability,
//! and the `gipmax` binary for the command-line interface.

// `!(x > 0.0)` guards double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centrality;
pub mod experiment;
pub mod graph;
pub mod im;
pub mod propagation;

pub use centrality::{degree_centrality, katz_centrality, top_k, CentralityKind, CentralityVector};
pub use graph::{
    compose_networks, generate_er, generate_lattice, generate_sbm, load_edge_list, write_edge_list,
    CompositeConfig, Graph, GraphError, SbmConfig,
};
pub use im::{
    accuracy, brute_force, cds_solve, centrality_method, exact_linear_solution, neighborhood,
    random_sampling, rank_metric, CdsParams, CentralityMethod, ImError, ImProblem, RankingTable,
    Restart, SeedVector, SolverOutcome, TwoBlockPartition,
};
pub use propagation::{
    bound_eval, eic_closed_form, elt_step, evaluate_influence, gip_step, mlt_step,
    right_derivative, validate_eic_limit, BoundSchedule, MltParams, NodeValues, PropagationConfig,
    PropagationError, PropagationResult, StateVector, ThresholdBounds, UpperBound,
};
