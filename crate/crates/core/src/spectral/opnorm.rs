use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::discretization::{DiscreteOperator, SymTridiagonal};
use crate::{Error, Result};

/// Dense Cholesky factors of the energy and mass Gram matrices.
#[derive(Debug, Clone)]
pub struct DenseFactors {
    /// `G = R Rᵀ`, `R` lower triangular.
    pub gram_l: DMatrix<f64>,
    /// `M = L Lᵀ`, `L` lower triangular.
    pub mass_l: DMatrix<f64>,
}

pub(crate) fn dense_cholesky(a: &SymTridiagonal, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a.to_dense()).ok_or_else(|| Error::Numerical {
        what: format!("Cholesky factorization of {what}"),
        residual: f64::NAN,
    })
}

impl DenseFactors {
    pub fn new(op: &DiscreteOperator) -> Result<Self> {
        Ok(Self {
            gram_l: dense_cholesky(op.gram(), "energy Gram matrix")?.unpack(),
            mass_l: dense_cholesky(op.mass(), "mass matrix")?.unpack(),
        })
    }

    /// `Rᵀ E L⁻ᵀ`.
    fn whiten(&self, e: &DMatrix<f64>) -> DMatrix<f64> {
        // X = E L⁻ᵀ  <=>  L Xᵀ = Eᵀ
        let xt = self
            .mass_l
            .solve_lower_triangular(&e.transpose())
            .expect("mass factor is nonsingular");
        self.gram_l.transpose() * xt.transpose()
    }
}

/// Operator norm of `e` from the discrete `L²` into the energy space.
pub fn energy_operator_norm(op: &DiscreteOperator, e: &DMatrix<f64>) -> Result<f64> {
    let f = DenseFactors::new(op)?;
    energy_operator_norm_with(&f, e)
}

pub(crate) fn energy_operator_norm_with(f: &DenseFactors, e: &DMatrix<f64>) -> Result<f64> {
    let c = f.whiten(e);
    largest_singular_value(c)
}

pub fn energy_operator_norm_complex(
    op: &DiscreteOperator,
    e: &DMatrix<Complex64>,
) -> Result<f64> {
    let f = DenseFactors::new(op)?;
    let re = f.whiten(&e.map(|z| z.re));
    let im = f.whiten(&e.map(|z| z.im));
    let c = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
    largest_singular_value(c)
}

fn largest_singular_value<T: nalgebra::ComplexField<RealField = f64>>(c: DMatrix<T>) -> Result<f64> {
    let svd = c.try_svd(false, false, 1e-15, 10_000).ok_or_else(|| Error::Numerical {
        what: "singular value decomposition".into(),
        residual: f64::NAN,
    })?;
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}
