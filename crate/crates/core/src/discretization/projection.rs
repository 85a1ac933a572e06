use nalgebra::DMatrix;

use super::DiscreteOperator;
use crate::{Error, Result};

/// Averaging projection `P u = |Ω|⁻¹ ∫ u`, represented by a weight vector
/// with `wᵀ u` equal to the mean of the piecewise-linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingProjection {
    weights: Vec<f64>,
}

impl AveragingProjection {
    pub fn new(op: &DiscreteOperator) -> Self {
        let raw = op.mass().mul_vec(&vec![1.0; op.dim()]);
        let total: f64 = raw.iter().sum();
        // total equals |Ω| up to rounding; normalizing by it makes P1 = 1
        let weights = raw.into_iter().map(|w| w / total).collect();
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let c = average(u, self)?;
        Ok(vec![c; u.len()])
    }

    /// Dense matrix `1 wᵀ`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |_, j| self.weights[j])
    }
}

pub fn average(u: &[f64], proj: &AveragingProjection) -> Result<f64> {
    if u.len() != proj.dim() {
        return Err(Error::Dimension {
            expected: proj.dim(),
            got: u.len(),
        });
    }
    Ok(proj.weights.iter().zip(u).map(|(w, v)| w * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, CoefficientField, IntervalMesh};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn op(nodes: Vec<f64>) -> DiscreteOperator {
        let mesh = IntervalMesh::from_nodes(nodes).unwrap();
        let c = CoefficientField::constant(&mesh, 1.0, 0.0, 1.0, 0.5).unwrap();
        assemble(&mesh, &c).unwrap()
    }

    #[test]
    fn constants_and_linear_functions() {
        let o = op(vec![0.0, 0.1, 0.35, 0.5, 0.9, 1.0]);
        let p = AveragingProjection::new(&o);
        assert!((average(&[3.0; 6], &p).unwrap() - 3.0).abs() < 1e-14);
        let x = o.mesh().nodes().to_vec();
        assert!((average(&x, &p).unwrap() - 0.5).abs() < 1e-14);
        assert!(average(&[1.0; 2], &p).is_err());
    }

    #[test]
    fn mean_of_sine_vanishes() {
        let mesh = IntervalMesh::uniform(0.0, 1.0, 128).unwrap();
        let c = CoefficientField::constant(&mesh, 1.0, 0.0, 1.0, 0.5).unwrap();
        let o = assemble(&mesh, &c).unwrap();
        let p = AveragingProjection::new(&o);
        let u = mesh.interpolate(|x| (2.0 * PI * x).sin());
        // composite trapezoid oracle on the same nodes
        let trap: f64 = mesh
            .nodes()
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * ((2.0 * PI * w[0]).sin() + (2.0 * PI * w[1]).sin()))
            .sum();
        let a = average(&u, &p).unwrap();
        assert!(a.abs() < 1e-4);
        assert!((a - trap).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(vals in proptest::collection::vec(-10.0f64..10.0, 9)) {
            let o = op((0..9).map(|i| (i as f64 / 8.0).powf(1.3)).collect());
            let p = AveragingProjection::new(&o);
            let pu = p.apply(&vals).unwrap();
            let ppu = p.apply(&pu).unwrap();
            for (a, b) in pu.iter().zip(&ppu) {
                prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
            }
        }
    }
}
