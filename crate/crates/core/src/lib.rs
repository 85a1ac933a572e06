//! Numerical verification of convergence rates for the reaction-diffusion
//! family `u_t - (p_ε u')' + (λ + V_ε) u = f(u)` on an interval with Neumann
//! boundary conditions, as the diffusion `p_ε` grows without bound.
//!
//! The crate is split into four layers:
//!
//! * [`discretization`]: piecewise-linear Galerkin assembly of the operator
//!   family, the energy inner product and the averaging projection.
//! * [`spectral`]: generalized eigenpairs, contour-integral spectral
//!   projections and the linear gap quantities (resolvent, projection,
//!   eigenspace, semigroup, norm non-equivalence).
//! * [`dynamics`]: the nonlinear layer (equilibria, exponential time
//!   stepping, the invariant-manifold graph transform and attractor
//!   distances).
//! * [`harness`]: scale families, ε-sweeps, log-log rate fits, config and
//!   CSV/summary reporting used by the `largediff` binary.
//!
//! Every rate-checked quantity is compared against the composite rate
//! `δ(ε) = τ(ε) + p(ε)^{-1/2}` where `τ(ε) = ‖V_ε - V_0‖_{L¹}` and
//! `p(ε) = min p_ε`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discretization;
pub mod dynamics;
mod error;
pub mod exec;
pub mod harness;
pub mod spectral;

pub use error::{Error, Result};
