use super::eigen::SpectralDecomposition;
use crate::discretization::DiscreteOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    /// `‖e^{-A t} z‖_energy · e^{λ_2 t} / ‖z‖_energy`.
    pub ratio: f64,
}

/// Evaluates the fast-space linear flow by eigen-expansion and reports the
/// decay relative to `e^{-λ_2 t}`. Every ratio is bounded by one in the energy
/// norm.
pub fn semigroup_decay_check(
    dec: &SpectralDecomposition,
    op: &DiscreteOperator,
    t_samples: &[f64],
    z: &[f64],
) -> Result<Vec<DecaySample>> {
    if dec.len() < 2 {
        return Err(Error::Domain("need at least two modes".into()));
    }
    if z.len() != op.dim() {
        return Err(Error::Dimension {
            expected: op.dim(),
            got: z.len(),
        });
    }
    let c = dec.coefficients(op, z);
    let zl2 = op.mass().quad_form(z).max(0.0).sqrt();
    if c[0].abs() > 1e-10 * zl2.max(f64::MIN_POSITIVE) {
        return Err(Error::Projection(c[0].abs()));
    }
    let z_energy = op.energy_norm(z);
    if !(z_energy > 0.0) {
        return Err(Error::Degenerate("zero initial datum".into()));
    }
    let beta = dec.value(1);
    t_samples
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::Domain(format!("time sample {t} must be positive")));
            }
            let sq: f64 = (1..dec.len())
                .map(|j| {
                    let lam = dec.value(j);
                    lam * c[j] * c[j] * (-2.0 * (lam - beta) * t).exp()
                })
                .sum();
            Ok(DecaySample {
                t,
                ratio: sq.sqrt() / z_energy,
            })
        })
        .collect()
}

/// `max_t |e^{-λ_1 t} - e^{-λ̄ t}|` over `t_samples` (intended for `t <= 0`):
/// the scalar backward comparison of the slow semigroups.
pub fn slow_semigroup_gap(dec: &SpectralDecomposition, lambda_bar: f64, t_samples: &[f64]) -> f64 {
    let l1 = dec.value(0);
    t_samples
        .iter()
        .map(|&t| ((-l1 * t).exp() - (-lambda_bar * t).exp()).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, CoefficientField, IntervalMesh};
    use crate::spectral::eigensolve_all;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn f1_op(n: usize, eps: f64) -> DiscreteOperator {
        let mesh = IntervalMesh::uniform(0.0, 1.0, n).unwrap();
        let c = CoefficientField::from_fns(&mesh, |_| 1.0 / eps, |x| eps * (2.0 * PI * x).sin(), 0.5, 0.1)
            .unwrap();
        assemble(&mesh, &c).unwrap()
    }

    #[test]
    fn fast_space_decay_is_bounded() {
        let op = f1_op(64, 1.0 / 32.0);
        let dec = eigensolve_all(&op).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let times: Vec<f64> = (0..20).map(|i| 10f64.powf(-4.0 + 0.2 * i as f64)).collect();
        for _ in 0..5 {
            let c = nalgebra::DVector::from_fn(dec.len(), |j, _| if j == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) });
            let z: Vec<f64> = (dec.vectors() * c).iter().copied().collect();
            let samples = semigroup_decay_check(&dec, &op, &times, &z).unwrap();
            assert_eq!(samples.len(), 20);
            for s in samples {
                assert!(s.ratio <= 1.0 + 1e-6, "t = {} ratio {}", s.t, s.ratio);
            }
        }
    }

    #[test]
    fn pure_second_mode_decays_exactly() {
        let op = f1_op(32, 0.25);
        let dec = eigensolve_all(&op).unwrap();
        let z: Vec<f64> = dec.vector(1).iter().copied().collect();
        for s in semigroup_decay_check(&dec, &op, &[0.01, 0.1], &z).unwrap() {
            assert!((s.ratio - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn slow_component_is_rejected() {
        let op = f1_op(16, 0.25);
        let dec = eigensolve_all(&op).unwrap();
        let ones = vec![1.0; op.dim()];
        assert!(matches!(
            semigroup_decay_check(&dec, &op, &[0.1], &ones),
            Err(Error::Projection(_))
        ));
    }

    #[test]
    fn slow_gap_vanishes_for_matching_eigenvalue() {
        let mesh = IntervalMesh::uniform(0.0, 1.0, 16).unwrap();
        let c = CoefficientField::constant(&mesh, 4.0, 0.0, 0.5, 0.1).unwrap();
        let op = assemble(&mesh, &c).unwrap();
        let dec = eigensolve_all(&op).unwrap();
        assert!(slow_semigroup_gap(&dec, 0.5, &[-2.0, -1.0, 0.0]) <= 1e-12);
        assert!(slow_semigroup_gap(&dec, 0.6, &[-1.0]) > 0.05);
    }
}
