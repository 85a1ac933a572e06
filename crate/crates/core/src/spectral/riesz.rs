use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::{eigensolve, SpectralDecomposition};
use super::opnorm::dense_cholesky;
use crate::discretization::DiscreteOperator;
use crate::{Error, Result};

pub const DEFAULT_QUADRATURE_POINTS: usize = 32;

/// Spectral projection onto the eigenvalues of `(G, M)` enclosed by the
/// circle `|z - center| = radius`, computed by trapezoidal quadrature of the
/// resolvent `(z - M⁻¹G)⁻¹ = (zM - G)⁻¹ M`.
#[derive(Debug, Clone)]
pub struct RieszProjection {
    pub matrix: DMatrix<f64>,
    pub center: f64,
    pub radius: f64,
    pub n_quad: usize,
    /// Number of eigenvalues inside the contour (by inertia count).
    pub enclosed: usize,
    /// Max-entry distance to the eigen-expansion projector.
    pub eigen_agreement: f64,
}

impl RieszProjection {
    /// Singular values of `Q` as an operator on the discrete `L²`, descending.
    pub fn singular_values(&self, op: &DiscreteOperator) -> Result<Vec<f64>> {
        let l = dense_cholesky(op.mass(), "mass matrix")?.unpack();
        // Lᵀ Q L⁻ᵀ
        let xt = l
            .solve_lower_triangular(&self.matrix.transpose())
            .expect("nonsingular factor");
        let c = l.transpose() * xt.transpose();
        let mut s: Vec<f64> = c.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Operator-norm defect `‖Q² - Q‖` in max-entry form.
    pub fn idempotency_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).amax()
    }
}

/// `0.5 · min(λ̄ - m0 + 1, λ_2 - λ̄)`.
pub fn default_radius(lambda_bar: f64, m0: f64, dec: &SpectralDecomposition) -> f64 {
    let gap = if dec.len() > 1 {
        dec.value(1) - lambda_bar
    } else {
        f64::INFINITY
    };
    0.5 * (lambda_bar - m0 + 1.0).min(gap)
}

pub fn riesz_projection(
    op: &DiscreteOperator,
    center: f64,
    radius: f64,
    n_quad: usize,
) -> Result<RieszProjection> {
    if n_quad == 0 || !n_quad.is_multiple_of(2) {
        return Err(Error::Domain(format!("n_quad = {n_quad} must be even and positive")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let (g, m) = (op.gram(), op.mass());
    for sigma in [center - radius, center + radius] {
        // inertia counts are only reliable well above the rounding level
        let tol = 1e-10 * sigma.abs().max(1.0);
        if g.count_below(m, sigma - tol) != g.count_below(m, sigma + tol) {
            return Err(Error::ContourCollision {
                center,
                radius,
                eigenvalue: sigma,
            });
        }
    }
    let below_hi = g.count_below(m, center + radius);
    let below_lo = g.count_below(m, center - radius);
    let enclosed = below_hi.saturating_sub(below_lo);

    let n = op.dim();
    let mass_dense = m.to_dense();
    let mut acc = DMatrix::<Complex64>::from_element(n, n, Complex64::new(0.0, 0.0));
    // nodes at half-offset angles never touch the real axis
    for k in 0..n_quad {
        let theta = 2.0 * PI * (k as f64 + 0.5) / n_quad as f64;
        let w = Complex64::from_polar(radius, theta);
        let z = Complex64::new(center, 0.0) + w;
        let r = g.solve_shifted(m, z, &mass_dense)?;
        acc += r * w;
    }
    let matrix = acc.map(|c| c.re / n_quad as f64);

    let eigen = if enclosed > 0 {
        let dec = eigensolve(op, below_hi)?;
        let inside: Vec<usize> = (0..dec.len())
            .filter(|&j| (dec.value(j) - center).abs() < radius)
            .collect();
        dec.projector(op, inside)
    } else {
        DMatrix::zeros(n, n)
    };
    let eigen_agreement = (&matrix - &eigen).amax() / eigen.amax().max(1.0);
    if eigen_agreement > 1e-6 {
        return Err(Error::QuadratureResolution(eigen_agreement));
    }
    Ok(RieszProjection {
        matrix,
        center,
        radius,
        n_quad,
        enclosed,
        eigen_agreement,
    })
}
