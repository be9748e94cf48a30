//! Metric-entropy toolkit: distances between hypotheses, covers and
//! packings with exact oracles, the complexity estimate `C_{ε,σ}`,
//! VC and Graph dimensions, exact Rademacher complexity, and bound
//! evaluators.

mod bounds;
mod complexity;
mod cover;
mod dimension;
pub mod lemmas;
mod rademacher;
mod view;

pub use bounds::{
    eval_regret_bound, graph_dimension_bound, graph_entropy_bound, haussler_cover_bound, rewa_regret_bound,
    BoundTerm, RegretBound,
};
pub use complexity::{
    cover_number, estimate_complexity_c, finite_class_builder, ComplexityCell, ComplexityEstimate, ComplexityGrid,
    CoverMethod, EXACT_ORACLE_LIMIT,
};
pub use cover::{
    exact_cover_number, exact_packing_number, greedy_cover, is_cover, is_packing, maximal_packing, within,
    EXACT_LIMIT, SCALE_TOL,
};
pub use dimension::{graph_dimension, loss_class_rows, shatters, vc_dimension, VC_POINT_LIMIT};
pub use rademacher::{rademacher_exact, RADEMACHER_LIMIT};
pub use view::{d_mu_estimate, empirical_distance, label_rows, DistanceEstimate, FiniteMetricView};
