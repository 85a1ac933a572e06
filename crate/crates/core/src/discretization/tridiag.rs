use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
///
/// All P1 matrices on an interval have this structure, so solves and inertia
/// counts are linear in the number of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Adds the symmetric 2x2 block `[[d0, o], [o, d1]]` at rows `i, i+1`.
    pub(crate) fn add_block(&mut self, i: usize, d0: f64, o: f64, d1: f64) {
        self.diag[i] += d0;
        self.diag[i + 1] += d1;
        self.off[i] += o;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    pub fn mul_dvec(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.mul_vec(x.as_slice()))
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let y = self.mul_vec(x);
        y.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        ay.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `self * B` for a dense `B`.
    pub fn mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        assert_eq!(b.nrows(), n);
        let mut out = DMatrix::zeros(n, b.ncols());
        for c in 0..b.ncols() {
            let col = self.mul_vec(b.column(c).as_slice());
            out.set_column(c, &DVector::from_vec(col));
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * s).collect(),
            off: self.off.iter().map(|o| o * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + s * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + s * b).collect(),
        }
    }

    /// `self - diag(d) * other`, i.e. scales the columns of `other` before
    /// subtracting. Used for Jacobians `G - M diag(f'(u))`.
    pub fn minus_col_scaled(&self, other: &Self, d: &[f64]) -> NonSymTridiagonal {
        let n = self.dim();
        assert_eq!(other.dim(), n);
        assert_eq!(d.len(), n);
        let diag = (0..n).map(|i| self.diag[i] - other.diag[i] * d[i]).collect();
        // column scaling: (M diag(d))_{i,j} = M_{ij} d_j
        let upper = (0..n - 1).map(|i| self.off[i] - other.off[i] * d[i + 1]).collect();
        let lower = (0..n - 1).map(|i| self.off[i] - other.off[i] * d[i]).collect();
        NonSymTridiagonal { lower, diag, upper }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|v| v * v).sum();
        let o: f64 = self.off.iter().map(|v| v * v).sum();
        (d + 2.0 * o).sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..n.saturating_sub(1) {
            m[(i, i + 1)] = self.off[i];
            m[(i + 1, i)] = self.off[i];
        }
        m
    }

    /// LDLᵀ factorization. Fails if a pivot is not strictly positive, so a
    /// successful factorization certifies positive definiteness.
    pub fn factor_spd(&self) -> Result<TridiagonalFactor> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 0..n {
            if i > 0 {
                l[i - 1] = self.off[i - 1] / d[i - 1];
                d[i] = self.diag[i] - l[i - 1] * self.off[i - 1];
            }
            if !(d[i] > 0.0) || !d[i].is_finite() {
                return Err(Error::Invariant(format!(
                    "matrix not positive definite (pivot {} = {:e})",
                    i, d[i]
                )));
            }
        }
        Ok(TridiagonalFactor { d, l })
    }

    /// Number of eigenvalues of the pencil `(self, b)` strictly below `sigma`,
    /// by Sylvester's law of inertia applied to `self - sigma * b` (requires
    /// `b` positive definite).
    pub fn count_below(&self, b: &Self, sigma: f64) -> usize {
        let shifted = self.axpy(-sigma, b);
        let n = shifted.dim();
        let mut count = 0;
        let mut d_prev = shifted.diag[0];
        if d_prev < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let mut dp = d_prev;
            if dp == 0.0 {
                dp = f64::EPSILON * shifted.norm().max(1.0);
            }
            let d = shifted.diag[i] - shifted.off[i - 1] * shifted.off[i - 1] / dp;
            if d < 0.0 {
                count += 1;
            }
            d_prev = d;
        }
        count
    }

    /// Solves `(z * b - self) X = R` column by column for complex `z` off the
    /// real axis.
    pub fn solve_shifted(
        &self,
        b: &Self,
        z: Complex64,
        rhs: &DMatrix<f64>,
    ) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        assert_eq!(rhs.nrows(), n);
        let diag: Vec<Complex64> = (0..n).map(|i| z * b.diag[i] - self.diag[i]).collect();
        let off: Vec<Complex64> = (0..n - 1).map(|i| z * b.off[i] - self.off[i]).collect();
        let mut pivots = vec![Complex64::new(0.0, 0.0); n];
        let mut mult = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        pivots[0] = diag[0];
        for i in 1..n {
            mult[i - 1] = off[i - 1] / pivots[i - 1];
            pivots[i] = diag[i] - mult[i - 1] * off[i - 1];
        }
        let scale = self.norm().max(b.norm() * z.norm());
        if let Some(p) = pivots.iter().find(|p| p.norm() <= 1e-15 * scale) {
            return Err(Error::Numerical {
                what: "shifted tridiagonal solve".into(),
                residual: p.norm(),
            });
        }
        let mut out = DMatrix::from_element(n, rhs.ncols(), Complex64::new(0.0, 0.0));
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..rhs.ncols() {
            y[0] = Complex64::new(rhs[(0, c)], 0.0);
            for i in 1..n {
                y[i] = Complex64::new(rhs[(i, c)], 0.0) - mult[i - 1] * y[i - 1];
            }
            y[n - 1] /= pivots[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = (y[i] - off[i] * y[i + 1]) / pivots[i];
            }
            for i in 0..n {
                out[(i, c)] = y[i];
            }
        }
        Ok(out)
    }
}

/// `LDLᵀ` factors of a symmetric positive-definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagonalFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        assert_eq!(rhs.len(), n);
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.l[i - 1] * y[i - 1];
        }
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi /= di;
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.l[i] * y[i + 1];
        }
        y
    }

    pub fn min_pivot(&self) -> f64 {
        self.d.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// General tridiagonal matrix (Newton Jacobians are not symmetric once the
/// reaction derivative multiplies the mass matrix).
#[derive(Debug, Clone)]
pub struct NonSymTridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl NonSymTridiagonal {
    /// Thomas algorithm without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut y = rhs.to_vec();
        let mut piv = self.diag[0];
        let scale = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            if i > 0 {
                piv = self.diag[i] - self.lower[i - 1] * c[i - 1];
                y[i] -= self.lower[i - 1] * y[i - 1];
            }
            if piv.abs() <= 1e-14 * scale || !piv.is_finite() {
                return Err(Error::Numerical {
                    what: "tridiagonal Jacobian solve".into(),
                    residual: piv,
                });
            }
            if i + 1 < n {
                c[i] = self.upper[i] / piv;
            }
            y[i] /= piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.upper[i];
                m[(i + 1, i)] = self.lower[i];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymTridiagonal {
        SymTridiagonal::from_parts(vec![4.0, 5.0, 6.0, 3.0], vec![-1.0, 2.0, 0.5])
    }

    #[test]
    fn solve_matches_dense() {
        let a = sample();
        let f = a.factor_spd().unwrap();
        let b = vec![1.0, -2.0, 0.25, 3.0];
        let x = f.solve(&b);
        let ax = a.mul_vec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = SymTridiagonal::from_parts(vec![1.0, -1.0], vec![0.0]);
        assert!(a.factor_spd().is_err());
    }

    #[test]
    fn inertia_counts_eigenvalues() {
        let a = sample();
        let eye = SymTridiagonal::from_parts(vec![1.0; 4], vec![0.0; 3]);
        let ev = nalgebra::SymmetricEigen::new(a.to_dense()).eigenvalues;
        for sigma in [-10.0, 2.0, 4.5, 6.0, 100.0] {
            let expected = ev.iter().filter(|&&l| l < sigma).count();
            assert_eq!(a.count_below(&eye, sigma), expected, "sigma {sigma}");
        }
    }

    #[test]
    fn nonsymmetric_solve() {
        let a = sample();
        let eye = SymTridiagonal::from_parts(vec![1.0; 4], vec![0.3; 3]);
        let j = a.minus_col_scaled(&eye, &[0.5, -1.0, 2.0, 0.1]);
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let x = j.solve(&b).unwrap();
        let r = j.to_dense() * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.norm() < 1e-12);
        // dense check of the column scaling convention
        let dense = a.to_dense() - eye.to_dense() * DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -1.0, 2.0, 0.1]));
        assert!((dense - j.to_dense()).norm() < 1e-15);
    }
}
