use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::discretization::{assemble, CoefficientField, DiscreteOperator, IntervalMesh};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    F1,
    F2,
    Const,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(FamilyKind::F1),
            "f2" => Ok(FamilyKind::F2),
            "const" => Ok(FamilyKind::Const),
            _ => Err(Error::Config(format!("unknown family '{s}' (expected f1, f2 or const)"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::F1 => "f1",
            FamilyKind::F2 => "f2",
            FamilyKind::Const => "const",
        })
    }
}

/// `p_ε ≡ p̄ ε^{-a}` and `V_ε = V_0 + ε^b w(x)` on `(0, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaleFamily {
    pub kind: FamilyKind,
    pub p_bar: f64,
    pub a: f64,
    pub v0: f64,
    pub lambda: f64,
    pub b: f64,
    pub w: fn(f64) -> f64,
    w_l1: f64,
}

fn sine(x: f64) -> f64 {
    (2.0 * PI * x).sin()
}

fn half_sine(x: f64) -> f64 {
    0.5 * (2.0 * PI * x).sin()
}

fn zero(_: f64) -> f64 {
    0.0
}

/// Midpoint rule for `∫_0^1 |w|`.
fn l1_norm(w: fn(f64) -> f64) -> f64 {
    let n = 1 << 16;
    let h = 1.0 / n as f64;
    (0..n).map(|i| w((i as f64 + 0.5) * h).abs()).sum::<f64>() * h
}

impl ScaleFamily {
    pub fn new(kind: FamilyKind, p_bar: f64, a: f64, v0: f64, lambda: f64, b: f64, w: fn(f64) -> f64) -> Self {
        Self {
            kind,
            p_bar,
            a,
            v0,
            lambda,
            b,
            w,
            w_l1: l1_norm(w),
        }
    }

    pub fn of(kind: FamilyKind) -> Self {
        match kind {
            FamilyKind::F1 => Self::new(kind, 1.0, 1.0, 0.0, 0.5, 1.0, sine),
            // amplitude 1/2 keeps λ + V_ε >= 0.1 at ε = 1/4
            FamilyKind::F2 => Self::new(kind, 1.0, 1.0, 0.0, 0.5, 0.25, half_sine),
            FamilyKind::Const => Self::new(kind, 1.0, 1.0, 0.0, 0.5, 1.0, zero),
        }
    }

    /// `λ + V_0`, the eigenvalue of the limit operator.
    pub fn lambda_bar(&self) -> f64 {
        self.lambda + self.v0
    }

    pub fn p(&self, eps: f64) -> f64 {
        self.p_bar * eps.powf(-self.a)
    }

    /// `τ(ε) = ε^b ‖w‖_{L¹}`.
    pub fn tau(&self, eps: f64) -> f64 {
        eps.powf(self.b) * self.w_l1
    }

    pub fn delta(&self, eps: f64) -> f64 {
        self.tau(eps) + self.p(eps).powf(-0.5)
    }

    pub fn coefficients(&self, mesh: &IntervalMesh, eps: f64, m0: f64) -> Result<CoefficientField> {
        let p = self.p(eps);
        let scale = eps.powf(self.b);
        let (v0, w) = (self.v0, self.w);
        CoefficientField::from_fns(mesh, |_| p, |x| v0 + scale * w(x), self.lambda, m0)
    }

    pub fn operator(&self, n: usize, eps: f64, m0: f64) -> Result<DiscreteOperator> {
        let mesh = IntervalMesh::uniform(0.0, 1.0, n)?;
        assemble(&mesh, &self.coefficients(&mesh, eps, m0)?)
    }
}
