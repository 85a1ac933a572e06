use nalgebra::DVector;

use super::{IntervalMesh, SymTridiagonal};
use crate::{Error, Result};

/// Diffusion and potential sampled at element midpoints, plus the shift `λ`
/// and the coercivity floor `m0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    diffusion: Vec<f64>,
    potential: Vec<f64>,
    lambda: f64,
    m0: f64,
}

impl CoefficientField {
    /// Validates `min p >= m0` and `min (λ + V) >= m0`.
    pub fn new(diffusion: Vec<f64>, potential: Vec<f64>, lambda: f64, m0: f64) -> Result<Self> {
        if diffusion.len() != potential.len() {
            return Err(Error::Dimension {
                expected: diffusion.len(),
                got: potential.len(),
            });
        }
        if !(m0 > 0.0) {
            return Err(Error::CoefficientFloor(format!("floor m0 = {m0} must be positive")));
        }
        let p_min = diffusion.iter().copied().fold(f64::INFINITY, f64::min);
        if !(p_min >= m0) {
            return Err(Error::CoefficientFloor(format!(
                "min diffusion {p_min} below m0 = {m0}"
            )));
        }
        let q_min = potential.iter().map(|v| lambda + v).fold(f64::INFINITY, f64::min);
        if !(q_min >= m0) {
            return Err(Error::CoefficientFloor(format!(
                "min lambda + V = {q_min} below m0 = {m0}"
            )));
        }
        Ok(Self {
            diffusion,
            potential,
            lambda,
            m0,
        })
    }

    /// Samples `p` and `V` at the element midpoints of `mesh`.
    pub fn from_fns(
        mesh: &IntervalMesh,
        p: impl Fn(f64) -> f64,
        v: impl Fn(f64) -> f64,
        lambda: f64,
        m0: f64,
    ) -> Result<Self> {
        let diffusion = mesh.midpoints().map(&p).collect();
        let potential = mesh.midpoints().map(&v).collect();
        Self::new(diffusion, potential, lambda, m0)
    }

    /// Constant `p`, constant `V`.
    pub fn constant(mesh: &IntervalMesh, p: f64, v: f64, lambda: f64, m0: f64) -> Result<Self> {
        Self::from_fns(mesh, |_| p, |_| v, lambda, m0)
    }

    pub fn diffusion(&self) -> &[f64] {
        &self.diffusion
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn min_diffusion(&self) -> f64 {
        self.diffusion.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_diffusion(&self) -> f64 {
        self.diffusion.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_reaction(&self) -> f64 {
        self.potential
            .iter()
            .map(|v| self.lambda + v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_reaction(&self) -> f64 {
        self.potential
            .iter()
            .map(|v| self.lambda + v)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Assembled matrices of one member of the operator family.
///
/// * `S`: `∫ p u' v'` (kernel contains the constants),
/// * `W`: `∫ (λ + V) u v`,
/// * `M`: `∫ u v`,
/// * `K`: `∫ u' v'` with unit diffusion (for the `H¹` norm),
/// * `G = S + W`: the energy Gram matrix.
///
/// Immutable after assembly.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    mesh: IntervalMesh,
    coeff: CoefficientField,
    stiffness: SymTridiagonal,
    potential: SymTridiagonal,
    mass: SymTridiagonal,
    unit_stiffness: SymTridiagonal,
    gram: SymTridiagonal,
}

/// Elementwise-midpoint P1 assembly. With elementwise-constant coefficients
/// every integral is exact.
pub fn assemble(mesh: &IntervalMesh, coeff: &CoefficientField) -> Result<DiscreteOperator> {
    let ne = mesh.n_elems();
    if coeff.diffusion().len() != ne {
        return Err(Error::Dimension {
            expected: ne,
            got: coeff.diffusion().len(),
        });
    }
    let n = mesh.n_nodes();
    let mut stiffness = SymTridiagonal::zeros(n);
    let mut potential = SymTridiagonal::zeros(n);
    let mut mass = SymTridiagonal::zeros(n);
    let mut unit_stiffness = SymTridiagonal::zeros(n);
    for e in 0..ne {
        let h = mesh.element_length(e);
        let p = coeff.diffusion()[e];
        let q = coeff.lambda() + coeff.potential()[e];
        stiffness.add_block(e, p / h, -p / h, p / h);
        unit_stiffness.add_block(e, 1.0 / h, -1.0 / h, 1.0 / h);
        mass.add_block(e, h / 3.0, h / 6.0, h / 3.0);
        potential.add_block(e, q * h / 3.0, q * h / 6.0, q * h / 3.0);
    }
    let gram = stiffness.axpy(1.0, &potential);
    gram.factor_spd()?;
    Ok(DiscreteOperator {
        mesh: mesh.clone(),
        coeff: coeff.clone(),
        stiffness,
        potential,
        mass,
        unit_stiffness,
        gram,
    })
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.mesh.n_nodes()
    }

    pub fn mesh(&self) -> &IntervalMesh {
        &self.mesh
    }

    pub fn coefficients(&self) -> &CoefficientField {
        &self.coeff
    }

    pub fn stiffness(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    pub fn potential(&self) -> &SymTridiagonal {
        &self.potential
    }

    pub fn mass(&self) -> &SymTridiagonal {
        &self.mass
    }

    pub fn unit_stiffness(&self) -> &SymTridiagonal {
        &self.unit_stiffness
    }

    pub fn gram(&self) -> &SymTridiagonal {
        &self.gram
    }

    /// Gram matrix of the unit-coefficient `H¹` inner product, `K + M`.
    pub fn h1_gram(&self) -> SymTridiagonal {
        self.unit_stiffness.axpy(1.0, &self.mass)
    }

    pub fn m0(&self) -> f64 {
        self.coeff.m0()
    }

    pub fn ones(&self) -> DVector<f64> {
        DVector::from_element(self.dim(), 1.0)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn energy_norm(&self, u: &[f64]) -> f64 {
        self.energy_inner(u, u).max(0.0).sqrt()
    }

    /// `uᵀ G v` summed element by element. Working with nodal differences keeps
    /// the relative accuracy of small, smooth vectors when `p` is large.
    pub fn energy_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim());
        debug_assert_eq!(v.len(), self.dim());
        let mut acc = 0.0;
        for e in 0..self.mesh.n_elems() {
            let h = self.mesh.element_length(e);
            let p = self.coeff.diffusion()[e];
            let q = self.coeff.lambda() + self.coeff.potential()[e];
            let (ua, ub, va, vb) = (u[e], u[e + 1], v[e], v[e + 1]);
            acc += p / h * (ub - ua) * (vb - va)
                + q * h / 6.0 * (2.0 * ua * va + 2.0 * ub * vb + ua * vb + ub * va);
        }
        acc
    }

    /// `G u` assembled element by element from nodal differences, so the
    /// diffusion part vanishes exactly on constants.
    pub fn apply_gram(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.dim());
        let mut out = vec![0.0; u.len()];
        for e in 0..self.mesh.n_elems() {
            let h = self.mesh.element_length(e);
            let p = self.coeff.diffusion()[e];
            let q = self.coeff.lambda() + self.coeff.potential()[e];
            let (ua, ub) = (u[e], u[e + 1]);
            let flux = p / h * (ub - ua);
            out[e] += -flux + q * h / 6.0 * (2.0 * ua + ub);
            out[e + 1] += flux + q * h / 6.0 * (ua + 2.0 * ub);
        }
        out
    }

    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass.bilinear(u, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `√(uᵀGu)`, the norm of the fractional power space.
    Energy,
    /// `√(uᵀ(K+M)u)`, unit diffusion and unit zeroth-order weight.
    H1,
    /// `√(uᵀMu)`.
    L2,
}

pub fn norm(u: &[f64], op: &DiscreteOperator, which: NormKind) -> Result<f64> {
    op.check_len(u.len())?;
    let (q, scale) = match which {
        NormKind::Energy => (op.energy_inner(u, u), diag_scale(&op.gram, u)),
        NormKind::H1 => {
            let h1 = op.h1_gram();
            (h1.quad_form(u), diag_scale(&h1, u))
        }
        NormKind::L2 => (op.mass.quad_form(u), diag_scale(&op.mass, u)),
    };
    if q < -1e-14 * scale.max(1.0) {
        return Err(Error::Invariant(format!("negative quadratic form {q:e}")));
    }
    Ok(q.max(0.0).sqrt())
}

fn diag_scale(a: &SymTridiagonal, u: &[f64]) -> f64 {
    a.diag().iter().zip(u).map(|(d, x)| d.abs() * x * x).sum()
}

/// Galerkin solution of the Neumann problem `A_ε u = g`, i.e. `G u = M g`.
pub fn solve_elliptic(op: &DiscreteOperator, g: &[f64]) -> Result<Vec<f64>> {
    op.check_len(g.len())?;
    let rhs = op.mass.mul_vec(g);
    let u = op.gram.factor_spd()?.solve(&rhs);
    let gu = op.gram.mul_vec(&u);
    let res: f64 = gu.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let rhs_norm: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if res > 1e-10 * rhs_norm {
        return Err(Error::Invariant(format!(
            "elliptic residual {res:e} exceeds 1e-10 * {rhs_norm:e}"
        )));
    }
    Ok(u)
}
