use super::equilibria::Equilibrium;
use super::flow::ModalBasis;
use super::manifold::GraphSection;
use crate::discretization::{AveragingProjection, DiscreteOperator};
use crate::{Error, Result};

/// Finite sample of an interval attractor `{v φ_1 + s(v) : v ∈ [v_lo, v_hi]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorSample {
    pub points: Vec<Vec<f64>>,
    pub v_lo: f64,
    pub v_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffReport {
    /// `sup_{a ∈ A} dist(a, B)`.
    pub dist_ab: f64,
    /// `sup_{b ∈ B} dist(b, A)`.
    pub dist_ba: f64,
    /// Sum of the two directed distances.
    pub d_h: f64,
}

fn lin(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Samples `n_pts` points of the manifold between the slow coordinates of
/// the extremal equilibria.
pub fn attractor_sample(
    basis: &ModalBasis,
    section: &GraphSection,
    equilibria: &[Equilibrium],
    n_pts: usize,
) -> Result<AttractorSample> {
    if equilibria.is_empty() || n_pts == 0 {
        return Err(Error::Domain("attractor sample needs equilibria and points".into()));
    }
    let vs: Vec<f64> = equilibria
        .iter()
        .map(|e| basis.leading_coefficients(&e.value, 1)[0])
        .collect();
    let v_lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
    let v_hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = section.v_range();
    for v in [v_lo, v_hi] {
        if v < lo || v > hi {
            return Err(Error::Range { value: v, lo, hi });
        }
    }
    let points = (0..n_pts)
        .map(|i| section.lift(basis, lin(v_lo, v_hi, n_pts, i)))
        .collect();
    Ok(AttractorSample { points, v_lo, v_hi })
}

/// The limit attractor `[lo, hi]` of constants, sampled on `dim` nodes.
pub fn limit_attractor_sample(lo: f64, hi: f64, n_pts: usize, dim: usize) -> Result<AttractorSample> {
    if n_pts == 0 || !(lo <= hi) {
        return Err(Error::Domain(format!("limit attractor [{lo}, {hi}] with {n_pts} points")));
    }
    let points = (0..n_pts).map(|i| vec![lin(lo, hi, n_pts, i); dim]).collect();
    Ok(AttractorSample {
        points,
        v_lo: lo,
        v_hi: hi,
    })
}

fn directed(a: &[Vec<f64>], b: &[Vec<f64>], op: &DiscreteOperator) -> f64 {
    a.iter()
        .map(|x| {
            b.iter()
                .map(|y| {
                    let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                    op.energy_norm(&d)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Brute-force Hausdorff components in the energy norm.
pub fn hausdorff(a: &AttractorSample, b: &AttractorSample, op: &DiscreteOperator) -> Result<HausdorffReport> {
    if a.points.is_empty() || b.points.is_empty() {
        return Err(Error::Domain("Hausdorff distance of an empty set".into()));
    }
    for p in a.points.iter().chain(&b.points) {
        if p.len() != op.dim() {
            return Err(Error::Dimension {
                expected: op.dim(),
                got: p.len(),
            });
        }
    }
    let dist_ab = directed(&a.points, &b.points, op);
    let dist_ba = directed(&b.points, &a.points, op);
    Ok(HausdorffReport {
        dist_ab,
        dist_ba,
        d_h: dist_ab + dist_ba,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorGap {
    /// `d_H(𝒜_ε, 𝒜_0)`.
    pub total: f64,
    /// `d_H(𝒜_ε, Q𝒜_ε)`, `d_H(Q𝒜_ε, PQ𝒜_ε)`, `d_H(PQ𝒜_ε, 𝒜_0)`.
    pub legs: [f64; 3],
}

/// Distance between the perturbed and limit attractor samples, with the
/// three intermediate legs through the slow projection `Q u = (φ_1ᵀ M u) φ_1`
/// and the averaging projection `P`.
pub fn attractor_gap(
    basis: &ModalBasis,
    eps_sample: &AttractorSample,
    limit_sample: &AttractorSample,
) -> Result<AttractorGap> {
    if eps_sample.points.len() != limit_sample.points.len() {
        return Err(Error::Dimension {
            expected: eps_sample.points.len(),
            got: limit_sample.points.len(),
        });
    }
    let op = basis.op();
    let phi1: Vec<f64> = basis.phi().column(0).iter().copied().collect();
    let q = AttractorSample {
        points: eps_sample
            .points
            .iter()
            .map(|u| {
                let v = basis.leading_coefficients(u, 1)[0];
                phi1.iter().map(|p| v * p).collect()
            })
            .collect(),
        ..*eps_sample
    };
    let avg = AveragingProjection::new(op);
    let pq = AttractorSample {
        points: q
            .points
            .iter()
            .map(|u| avg.apply(u))
            .collect::<Result<_>>()?,
        ..*eps_sample
    };
    let total = hausdorff(eps_sample, limit_sample, op)?.d_h;
    let legs = [
        hausdorff(eps_sample, &q, op)?.d_h,
        hausdorff(&q, &pq, op)?.d_h,
        hausdorff(&pq, limit_sample, op)?.d_h,
    ];
    Ok(AttractorGap { total, legs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, CoefficientField, IntervalMesh};

    fn half_op(n: usize) -> DiscreteOperator {
        let mesh = IntervalMesh::uniform(0.0, 1.0, n).unwrap();
        let coeff = CoefficientField::constant(&mesh, 1.0, 0.0, 0.5, 0.1).unwrap();
        assemble(&mesh, &coeff).unwrap()
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let op = half_op(16);
        let a = limit_attractor_sample(-0.5, 0.5, 9, op.dim()).unwrap();
        assert_eq!(hausdorff(&a, &a, &op).unwrap().d_h, 0.0);
    }

    #[test]
    fn two_point_sets() {
        let op = half_op(16);
        let c = 1.0 / op.energy_norm(&vec![1.0; op.dim()]);
        let a = AttractorSample {
            points: vec![vec![0.0; op.dim()]],
            v_lo: 0.0,
            v_hi: 0.0,
        };
        let b = AttractorSample {
            points: vec![vec![0.0; op.dim()], vec![c; op.dim()]],
            v_lo: 0.0,
            v_hi: c,
        };
        let rep = hausdorff(&a, &b, &op).unwrap();
        assert_eq!(rep.dist_ab, 0.0);
        assert!((rep.dist_ba - 1.0).abs() <= 1e-12);
        assert!((rep.d_h - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn nested_constant_intervals() {
        let op = half_op(32);
        let a = limit_attractor_sample(0.0, 1.0, 11, op.dim()).unwrap();
        let b = limit_attractor_sample(0.0, 2.0, 21, op.dim()).unwrap();
        let rep = hausdorff(&a, &b, &op).unwrap();
        assert!((rep.d_h - 0.5f64.sqrt()).abs() <= 1e-12, "{}", rep.d_h);
    }

    #[test]
    fn empty_set_is_rejected() {
        let op = half_op(8);
        let a = AttractorSample {
            points: vec![],
            v_lo: 0.0,
            v_hi: 0.0,
        };
        let b = limit_attractor_sample(0.0, 1.0, 3, op.dim()).unwrap();
        assert!(matches!(hausdorff(&a, &b, &op), Err(Error::Domain(_))));
    }
}
