use crate::{Error, Result};

/// Nodewise reaction term `f` with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reaction {
    /// `f(u) = u - u³`.
    Cubic,
    /// `f(u) = c u`.
    Linear { slope: f64 },
}

impl Reaction {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Reaction::Cubic => u - u * u * u,
            Reaction::Linear { slope } => slope * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Reaction::Cubic => 1.0 - 3.0 * u * u,
            Reaction::Linear { slope } => slope,
        }
    }

    /// `(ū, c̄)` with `f(u)/u <= -c̄ < 0` for `|u| >= ū`, if `f` is dissipative.
    pub fn dissipativity_margin(&self) -> Option<(f64, f64)> {
        match *self {
            Reaction::Cubic => Some((2.0, 3.0)),
            Reaction::Linear { slope } if slope < 0.0 => Some((1.0, -slope)),
            Reaction::Linear { .. } => None,
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| self.value(x)).collect()
    }

    pub fn apply_derivative(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| self.derivative(x)).collect()
    }

    /// Central-difference check of `f'` on 21 points of `[-3, 3]` and the
    /// sign condition `f(u)/u <= -c̄` at `±ū`.
    pub fn validate(&self) -> Result<()> {
        let h = 1e-5;
        for i in 0..21 {
            let u = -3.0 + 0.3 * i as f64;
            let fd = (self.value(u + h) - self.value(u - h)) / (2.0 * h);
            let err = (fd - self.derivative(u)).abs();
            if err > 1e-6 {
                return Err(Error::Domain(format!("derivative mismatch {err:e} at u = {u}")));
            }
        }
        let (ubar, cbar) = self
            .dissipativity_margin()
            .ok_or_else(|| Error::Domain(format!("{self:?} is not dissipative")))?;
        for u in [-ubar, ubar] {
            if self.value(u) / u > -cbar {
                return Err(Error::Domain(format!("dissipativity fails at u = {u}")));
            }
        }
        Ok(())
    }
}
