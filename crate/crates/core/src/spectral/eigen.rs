use nalgebra::{DMatrix, DVector, DVectorView, SymmetricEigen};

use super::opnorm::dense_cholesky;
use crate::discretization::DiscreteOperator;
use crate::{Error, Result};

/// The `k` smallest eigenpairs of `G φ = λ M φ`, ascending, with
/// `M`-orthonormal eigenvectors. Each eigenvector is signed so that its
/// largest-magnitude entry is positive; for the first mode this makes every
/// entry positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvalue of mode `j` (0-based: `value(0)` is `λ_1`).
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> DVectorView<'_, f64> {
        self.vectors.column(j)
    }

    /// Modal coefficients `Φᵀ M u`.
    pub fn coefficients(&self, op: &DiscreteOperator, u: &[f64]) -> DVector<f64> {
        let mu = DVector::from_vec(op.mass().mul_vec(u));
        self.vectors.tr_mul(&mu)
    }

    /// Eigen-expansion projector `Σ_{j ∈ modes} φ_j φ_jᵀ M`.
    pub fn projector(&self, op: &DiscreteOperator, modes: impl IntoIterator<Item = usize>) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        let mut q = DMatrix::zeros(n, n);
        for j in modes {
            let phi = self.vectors.column(j).clone_owned();
            let mphi = DVector::from_vec(op.mass().mul_vec(phi.as_slice()));
            q += &phi * mphi.transpose();
        }
        q
    }
}

pub fn eigensolve(op: &DiscreteOperator, k: usize) -> Result<SpectralDecomposition> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("requested {k} eigenpairs of a {n}-dimensional pencil")));
    }
    let chol = dense_cholesky(op.mass(), "mass matrix")?;
    let l = chol.l();
    let g = op.gram().to_dense();
    // C = L⁻¹ G L⁻ᵀ
    let y = l.solve_lower_triangular(&g).expect("nonsingular factor");
    let c = l
        .solve_lower_triangular(&y.transpose())
        .expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, 1e-15, 100_000).ok_or_else(|| Error::Numerical {
        what: "symmetric eigensolver".into(),
        residual: f64::NAN,
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    let mut values = Vec::with_capacity(k);
    let mut vectors = DMatrix::zeros(n, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let yv = eig.eigenvectors.column(idx).clone_owned();
        let mut phi = lt.solve_upper_triangular(&yv).expect("nonsingular factor");
        let imax = phi.iamax();
        if phi[imax] < 0.0 {
            phi.neg_mut();
        }
        values.push(eig.eigenvalues[idx]);
        vectors.set_column(col, &phi);
    }
    let next = order.get(1).map(|&i| eig.eigenvalues[i]);
    refine_first_mode(op, &mut values, &mut vectors, next)?;
    let dec = SpectralDecomposition { values, vectors };
    verify(op, &dec)?;
    Ok(dec)
}

/// The dense solver resolves eigenvalues only to about `eps · λ_max`, which is
/// coarse for the slow mode once `p` is large. Shifted inverse iteration on the
/// tridiagonal pencil, with a shift below `λ_1` so the factorization stays
/// positive definite, restores full accuracy for `φ_1` and `λ_1`.
fn refine_first_mode(
    op: &DiscreteOperator,
    values: &mut [f64],
    vectors: &mut DMatrix<f64>,
    next: Option<f64>,
) -> Result<()> {
    let l1 = values[0];
    let gap = next.map_or(1.0, |l2| (l2 - l1).max(0.0));
    let sigma = l1 - 1e-3 * gap.min(l1.abs().max(1e-3));
    let Ok(fac) = op.gram().axpy(-sigma, op.mass()).factor_spd() else {
        return Ok(());
    };
    let mut x: Vec<f64> = vectors.column(0).iter().copied().collect();
    for _ in 0..3 {
        x = fac.solve(&op.mass().mul_vec(&x));
        let nrm = op.mass().quad_form(&x).sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    let imax = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map_or(0, |(i, _)| i);
    if x[imax] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    values[0] = op.energy_inner(&x, &x) / op.mass().quad_form(&x);
    vectors.set_column(0, &DVector::from_vec(x));
    Ok(())
}

/// Full decomposition (every mode of the pencil).
pub fn eigensolve_all(op: &DiscreteOperator) -> Result<SpectralDecomposition> {
    eigensolve(op, op.dim())
}

fn verify(op: &DiscreteOperator, dec: &SpectralDecomposition) -> Result<()> {
    // floating-point evaluation of Gφ alone carries an error of order eps·‖G‖
    let roundoff = 16.0 * f64::EPSILON * op.gram().norm();
    for j in 0..dec.len() {
        let phi = dec.vector(j);
        let gphi = op.gram().mul_vec(phi.as_slice());
        let mphi = op.mass().mul_vec(phi.as_slice());
        let lam = dec.value(j);
        let res = gphi
            .iter()
            .zip(&mphi)
            .map(|(a, b)| (a - lam * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if res > 1e-9 * lam.abs() + roundoff * phi.amax() {
            return Err(Error::Numerical {
                what: format!("eigenpair {j} residual"),
                residual: res,
            });
        }
    }
    // M-orthonormality, checked against a sample of pairs for large k
    let step = (dec.len() / 16).max(1);
    for i in (0..dec.len()).step_by(step) {
        for j in (0..dec.len()).step_by(step) {
            let ip = op.mass_inner(dec.vector(i).as_slice(), dec.vector(j).as_slice());
            let target = if i == j { 1.0 } else { 0.0 };
            if (ip - target).abs() > 1e-10 {
                return Err(Error::Numerical {
                    what: format!("M-orthonormality of modes {i},{j}"),
                    residual: (ip - target).abs(),
                });
            }
        }
    }
    if dec.value(0) < op.m0() * (1.0 - 1e-12) {
        return Err(Error::Numerical {
            what: "coercivity floor of the first eigenvalue".into(),
            residual: op.m0() - dec.value(0),
        });
    }
    Ok(())
}
