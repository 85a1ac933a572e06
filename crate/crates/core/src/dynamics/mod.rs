//! Nonlinear layer: reaction term, equilibria, exponential-Euler flow, the
//! graph-transform construction of the slow manifold, attractor samples and
//! the Hausdorff metric.

mod attractor;
mod equilibria;
mod flow;
mod manifold;
mod reaction;

pub use attractor::{
    attractor_gap, attractor_sample, hausdorff, limit_attractor_sample, AttractorGap,
    AttractorSample, HausdorffReport,
};
pub use equilibria::{
    limit_equilibria, perturbed_equilibria, Equilibrium, LimitEquilibrium, PerturbedEquilibria,
};
pub use flow::{step, ModalBasis};
pub use manifold::{
    exponential_attraction_check, graph_transform, invariance_residual, reduced_flow_gap,
    section_distance, solve_manifold, AttractionReport, GraphSection, ManifoldConfig,
    ManifoldSolution,
};
pub use reaction::Reaction;
