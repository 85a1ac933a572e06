//! Piecewise-linear Galerkin discretization of `A_ε = -(p_ε u')' + (λ + V_ε) u`
//! with natural (Neumann) boundary conditions on an interval.

mod assembly;
mod mesh;
mod projection;
mod tridiag;

pub use assembly::{
    assemble, norm, solve_elliptic, CoefficientField, DiscreteOperator, NormKind,
};
pub use mesh::IntervalMesh;
pub use projection::{average, AveragingProjection};
pub use tridiag::{NonSymTridiagonal, SymTridiagonal, TridiagonalFactor};
