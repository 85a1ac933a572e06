use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::eigen::SpectralDecomposition;
use super::opnorm::{dense_cholesky, energy_operator_norm, energy_operator_norm_complex};
use super::riesz::RieszProjection;
use crate::discretization::{AveragingProjection, DiscreteOperator};
use crate::{Error, Result};

fn check_dims(op: &DiscreteOperator, proj: &AveragingProjection) -> Result<()> {
    if proj.dim() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            got: proj.dim(),
        });
    }
    Ok(())
}

/// Dense `A_ε⁻¹ = G⁻¹ M` acting on nodal vectors.
pub(crate) fn inverse_operator(op: &DiscreteOperator) -> Result<DMatrix<f64>> {
    let fac = op.gram().factor_spd()?;
    let n = op.dim();
    let mut out = DMatrix::zeros(n, n);
    let m = op.mass().to_dense();
    for j in 0..n {
        let col = fac.solve(m.column(j).as_slice());
        out.set_column(j, &DVector::from_vec(col));
    }
    Ok(out)
}

/// `‖A_ε⁻¹ - A_0⁻¹ P‖` from `L²` into the energy space, where `A_0` is
/// multiplication by `lambda_bar = λ + V_0` on the constants.
pub fn resolvent_gap(
    op: &DiscreteOperator,
    lambda_bar: f64,
    proj: &AveragingProjection,
) -> Result<f64> {
    check_dims(op, proj)?;
    if !(lambda_bar > 0.0) {
        return Err(Error::Domain(format!("limit eigenvalue {lambda_bar} must be positive")));
    }
    let e = inverse_operator(op)? - proj.to_dense() / lambda_bar;
    energy_operator_norm(op, &e)
}

/// Admissible region for sector resolvent samples: `|μ + λ̄| >= r` and
/// `|arg(μ + λ̄)| <= φ`, which excludes the ray `(-∞, -λ̄]` carrying the
/// spectrum of `-A_ε`.
#[derive(Debug, Clone, Copy)]
pub struct SectorDomain {
    pub r: f64,
    pub phi: f64,
}

impl Default for SectorDomain {
    fn default() -> Self {
        Self {
            r: 0.25,
            phi: 0.9 * std::f64::consts::PI,
        }
    }
}

impl SectorDomain {
    pub fn contains(&self, mu: Complex64, lambda_bar: f64) -> bool {
        let w = mu + lambda_bar;
        w.norm() >= self.r && w.arg().abs() <= self.phi
    }
}

/// `‖(μ + A_ε)⁻¹ - (μ + A_0)⁻¹ P‖` from `L²` into the energy space.
pub fn sector_resolvent_gap(
    op: &DiscreteOperator,
    lambda_bar: f64,
    proj: &AveragingProjection,
    mu: Complex64,
    domain: SectorDomain,
) -> Result<f64> {
    check_dims(op, proj)?;
    if !domain.contains(mu, lambda_bar) {
        return Err(Error::Domain(format!(
            "mu = {mu} outside the sector around -{lambda_bar} (r = {}, phi = {})",
            domain.r, domain.phi
        )));
    }
    let m = op.mass().to_dense();
    // (μM + G)⁻¹ M = -((-μ)M - G)⁻¹ M
    let r = op.gram().solve_shifted(op.mass(), -mu, &m)?;
    let limit = Complex64::new(1.0, 0.0) / (mu + lambda_bar);
    let p = proj.to_dense();
    let e = DMatrix::from_fn(op.dim(), op.dim(), |i, j| -r[(i, j)] - limit * p[(i, j)]);
    energy_operator_norm_complex(op, &e)
}

/// `‖Q_ε - P‖` from `L²` into the energy space.
pub fn projection_gap(
    q: &RieszProjection,
    proj: &AveragingProjection,
    op: &DiscreteOperator,
) -> Result<f64> {
    check_dims(op, proj)?;
    let e = &q.matrix - proj.to_dense();
    energy_operator_norm(op, &e)
}

/// Sampled points per segment in [`eigenspace_hausdorff`].
pub const SEGMENT_SAMPLES: usize = 65;

/// Hausdorff distance (sum of both directed distances, energy norm) between
/// the unit balls of the first eigenspace and of the constants.
///
/// The generator of the limit space is `P φ_1`, which carries the same sign
/// as `φ_1`. Both generators are normalized in the energy norm.
pub fn eigenspace_hausdorff(
    dec: &SpectralDecomposition,
    op: &DiscreteOperator,
    proj: &AveragingProjection,
) -> Result<f64> {
    check_dims(op, proj)?;
    let phi: Vec<f64> = dec.vector(0).iter().copied().collect();
    let limit = proj.apply(&phi)?;
    let a = normalized(op, phi)?;
    let b = normalized(op, limit)?;
    Ok(directed_segment_distance(op, &a, &b) + directed_segment_distance(op, &b, &a))
}

fn normalized(op: &DiscreteOperator, mut v: Vec<f64>) -> Result<Vec<f64>> {
    let n = op.energy_norm(&v);
    if !(n > 1e-14) {
        return Err(Error::Degenerate(format!("generator with energy norm {n:e}")));
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(v)
}

/// `sup_{|t| <= 1} dist(t a, {s b : |s| <= 1})` over a uniform grid of `t`,
/// with the inner distance computed exactly by clamped projection.
fn directed_segment_distance(op: &DiscreteOperator, a: &[f64], b: &[f64]) -> f64 {
    let ab = op.energy_inner(a, b);
    let bb = op.energy_inner(b, b);
    let mut worst = 0.0f64;
    let mut diff = vec![0.0; a.len()];
    for i in 0..SEGMENT_SAMPLES {
        let t = -1.0 + 2.0 * i as f64 / (SEGMENT_SAMPLES - 1) as f64;
        let s = (t * ab / bb).clamp(-1.0, 1.0);
        for ((d, x), y) in diff.iter_mut().zip(a).zip(b) {
            *d = t * x - s * y;
        }
        worst = worst.max(op.energy_norm(&diff));
    }
    worst
}

/// `sup_u ‖u‖²_energy / ‖u‖²_{H¹}`: the largest eigenvalue of the pencil
/// `(G, K + M)`.
pub fn norm_ratio_probe(op: &DiscreteOperator) -> Result<f64> {
    let l = dense_cholesky(&op.h1_gram(), "H1 Gram matrix")?.unpack();
    let g = op.gram().to_dense();
    let y = l.solve_lower_triangular(&g).expect("nonsingular factor");
    let c = l
        .solve_lower_triangular(&y.transpose())
        .expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, 1e-15, 100_000).ok_or_else(|| Error::Numerical {
        what: "norm ratio pencil".into(),
        residual: f64::NAN,
    })?;
    Ok(eig.eigenvalues.max())
}
