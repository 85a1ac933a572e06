//! Eigenstructure of the discrete pencil `(G, M)` and the linear gap
//! quantities that measure how far `A_ε` is from its averaged limit.
//!
//! All operator norms are exact on the discrete level: an operator `E` acting
//! from `(ℝⁿ, ‖·‖_M)` (the discrete `L²`) into `(ℝⁿ, ‖·‖_G)` (the energy
//! space) has norm `σ_max(Rᵀ E L⁻ᵀ)` with `G = R Rᵀ`, `M = L Lᵀ`.

mod eigen;
mod gaps;
mod opnorm;
mod riesz;
mod semigroup;

pub use eigen::{eigensolve, eigensolve_all, SpectralDecomposition};
pub use gaps::{
    eigenspace_hausdorff, norm_ratio_probe, projection_gap, resolvent_gap,
    sector_resolvent_gap, SectorDomain,
};
pub(crate) use opnorm::dense_cholesky;
pub use opnorm::{energy_operator_norm, energy_operator_norm_complex, DenseFactors};
pub use riesz::{default_radius, riesz_projection, RieszProjection, DEFAULT_QUADRATURE_POINTS};
pub use semigroup::{semigroup_decay_check, slow_semigroup_gap, DecaySample};
