use nalgebra::{DMatrix, DVector};

use super::reaction::Reaction;
use crate::discretization::DiscreteOperator;
use crate::spectral::{eigensolve_all, SpectralDecomposition};
use crate::{Error, Result};

/// Full eigenbasis of `(G, M)` together with `MΦ`, so that modal
/// coefficients are a single matrix-vector product.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    op: DiscreteOperator,
    dec: SpectralDecomposition,
    mphi: DMatrix<f64>,
}

impl ModalBasis {
    pub fn new(op: &DiscreteOperator) -> Result<Self> {
        let dec = eigensolve_all(op)?;
        let phi = dec.vectors();
        let mut mphi = DMatrix::zeros(phi.nrows(), phi.ncols());
        for j in 0..phi.ncols() {
            let col = op.mass().mul_vec(phi.column(j).as_slice());
            mphi.set_column(j, &DVector::from_vec(col));
        }
        Ok(Self {
            op: op.clone(),
            dec,
            mphi,
        })
    }

    pub fn op(&self) -> &DiscreteOperator {
        &self.op
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.dec
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn value(&self, j: usize) -> f64 {
        self.dec.value(j)
    }

    pub fn values(&self) -> &[f64] {
        self.dec.values()
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        self.dec.vectors()
    }

    /// `Φᵀ M u`.
    pub fn coefficients(&self, u: &[f64]) -> DVector<f64> {
        self.mphi.tr_mul(&DVector::from_column_slice(u))
    }

    /// `φ_jᵀ M u` for `j < k` only.
    pub fn leading_coefficients(&self, u: &[f64], k: usize) -> DVector<f64> {
        let u = DVector::from_column_slice(u);
        self.mphi.columns(0, k).tr_mul(&u)
    }

    pub fn synthesize(&self, c: &DVector<f64>) -> Vec<f64> {
        (self.phi() * c).as_slice().to_vec()
    }

    /// `Σ_{j<k} c_j φ_j` for a coefficient slice of length `k`.
    pub fn synthesize_leading(&self, c: &[f64]) -> Vec<f64> {
        let k = c.len();
        let c = DVector::from_column_slice(c);
        (self.phi().columns(0, k) * c).as_slice().to_vec()
    }
}

pub(crate) fn checked_reaction(reaction: &Reaction, u: &[f64]) -> Result<Vec<f64>> {
    let f = reaction.apply(u);
    if let Some(i) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::Blowup(format!(
            "reaction term not finite at node {i} (u = {})",
            u[i]
        )));
    }
    Ok(f)
}

/// Exponential-Euler weights `(e^{-λ dt}, (1 - e^{-λ dt}) / λ)`.
pub(crate) fn exp_euler_weights(lambda: f64, dt: f64) -> (f64, f64) {
    let decay = (-lambda * dt).exp();
    let phi1 = if (lambda * dt).abs() < 1e-8 {
        dt * (1.0 - 0.5 * lambda * dt)
    } else {
        -(-lambda * dt).exp_m1() / lambda
    };
    (decay, phi1)
}

/// One exponential-Euler step `u⁺ = e^{-A dt} u + A⁻¹(I - e^{-A dt}) f(u)`
/// evaluated mode by mode.
pub fn step(basis: &ModalBasis, reaction: &Reaction, u: &[f64], dt: f64) -> Result<Vec<f64>> {
    if u.len() != basis.dim() {
        return Err(Error::Dimension {
            expected: basis.dim(),
            got: u.len(),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step {dt} must be positive")));
    }
    let f = checked_reaction(reaction, u)?;
    let cu = basis.coefficients(u);
    let cf = basis.coefficients(&f);
    let next = DVector::from_iterator(
        cu.len(),
        (0..cu.len()).map(|j| {
            let (decay, w) = exp_euler_weights(basis.value(j), dt);
            decay * cu[j] + w * cf[j]
        }),
    );
    let out = basis.synthesize(&next);
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Blowup("state not finite after step".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, CoefficientField, IntervalMesh};

    fn f1_operator(n: usize, eps: f64) -> DiscreteOperator {
        let mesh = IntervalMesh::uniform(0.0, 1.0, n).unwrap();
        let coeff = CoefficientField::from_fns(
            &mesh,
            |_| 1.0 / eps,
            |x| eps * (2.0 * std::f64::consts::PI * x).sin(),
            0.5,
            0.1,
        )
        .unwrap();
        assemble(&mesh, &coeff).unwrap()
    }

    #[test]
    fn pure_linear_decay_of_first_mode() {
        let op = f1_operator(32, 0.25);
        let basis = ModalBasis::new(&op).unwrap();
        let phi1: Vec<f64> = basis.phi().column(0).iter().copied().collect();
        let zero = Reaction::Linear { slope: 0.0 };
        let dt = 0.1;
        let next = step(&basis, &zero, &phi1, dt).unwrap();
        let decay = (-basis.value(0) * dt).exp();
        for (a, b) in next.iter().zip(&phi1) {
            assert!((a - decay * b).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_equilibrium_is_a_fixed_point() {
        let mesh = IntervalMesh::uniform(0.0, 1.0, 32).unwrap();
        let coeff = CoefficientField::constant(&mesh, 4.0, 0.0, 0.5, 0.1).unwrap();
        let op = assemble(&mesh, &coeff).unwrap();
        let basis = ModalBasis::new(&op).unwrap();
        let u = vec![0.5f64.sqrt(); op.dim()];
        let next = step(&basis, &Reaction::Cubic, &u, 0.05).unwrap();
        let diff: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        assert!(op.energy_norm(&diff) <= 1e-9);
    }

    #[test]
    fn first_order_self_convergence() {
        let op = f1_operator(32, 0.25);
        let basis = ModalBasis::new(&op).unwrap();
        let u0: Vec<f64> = op
            .mesh()
            .nodes()
            .iter()
            .map(|&x| 0.3 + 0.4 * (std::f64::consts::PI * x).cos())
            .collect();
        let run = |dt: f64| {
            let steps = (1.0 / dt).round() as usize;
            let mut u = u0.clone();
            for _ in 0..steps {
                u = step(&basis, &Reaction::Cubic, &u, dt).unwrap();
            }
            u
        };
        let (a, b, c) = (run(0.02), run(0.01), run(0.005));
        let d = |x: &[f64], y: &[f64]| {
            let diff: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            op.energy_norm(&diff)
        };
        let ratio = d(&a, &b) / d(&b, &c);
        assert!((ratio - 2.0).abs() <= 0.3, "ratio {ratio}");
    }

    #[test]
    fn blowup_is_reported() {
        let op = f1_operator(8, 0.25);
        let basis = ModalBasis::new(&op).unwrap();
        let u = vec![1e200; op.dim()];
        assert!(matches!(
            step(&basis, &Reaction::Cubic, &u, 0.1),
            Err(Error::Blowup(_))
        ));
    }
}
