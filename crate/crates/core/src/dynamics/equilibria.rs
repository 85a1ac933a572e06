use nalgebra::SymmetricEigen;

use super::reaction::Reaction;
use crate::discretization::{DiscreteOperator, SymTridiagonal, TridiagonalFactor};
use crate::spectral::dense_cholesky;
use crate::{Error, Result};

const HYPERBOLICITY_FLOOR: f64 = 1e-8;
const NEWTON_STEPS: usize = 50;
const NEWTON_TOL: f64 = 1e-10;
const SAME_POINT: f64 = 1e-6;

/// Root of `λ̄ u = f(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEquilibrium {
    pub value: f64,
    /// `|λ̄ - f'(u)|`.
    pub margin: f64,
    pub stable: bool,
}

impl LimitEquilibrium {
    /// The constant nodal vector with this value.
    pub fn embed(&self, dim: usize) -> Vec<f64> {
        vec![self.value; dim]
    }
}

/// Solution of `G u = M f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub value: Vec<f64>,
    /// Smallest eigenvalue magnitude of the linearization `A_ε - f'(u)`.
    pub margin: f64,
    pub stable: bool,
    /// Dual-norm residual `‖G u - M f(u)‖_{G⁻¹}`.
    pub residual: f64,
    /// Newton from perturbed seeds lands on the same point.
    pub locally_unique: bool,
}

#[derive(Debug, Clone)]
pub struct PerturbedEquilibria {
    /// Each equilibrium with its energy distance to the seed.
    pub items: Vec<(Equilibrium, f64)>,
    /// Pairs of seeds that converged to the same point.
    pub collisions: Vec<(usize, usize)>,
}

fn polish(g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    while (b - a).abs() > 1e-14 * a.abs().max(b.abs()).max(1.0) {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let d = dg(x);
        if d == 0.0 {
            break;
        }
        let next = x - g(x) / d;
        if (next - x).abs() > 1e-10 * x.abs().max(1.0) {
            break;
        }
        x = next;
    }
    x
}

/// Roots of `g(u) = λ̄ u - f(u)` in `bracket`, ascending, by sign-change scan,
/// bisection and a Newton polish.
pub fn limit_equilibria(
    reaction: &Reaction,
    lambda_bar: f64,
    bracket: (f64, f64),
    n_scan: usize,
) -> Result<Vec<LimitEquilibrium>> {
    let (lo, hi) = bracket;
    if !(lo < hi) || n_scan == 0 {
        return Err(Error::Domain(format!(
            "bad scan bracket [{lo}, {hi}] with {n_scan} cells"
        )));
    }
    let g = |u: f64| lambda_bar * u - reaction.value(u);
    let dg = |u: f64| lambda_bar - reaction.derivative(u);
    let node = |i: usize| lo + (hi - lo) * i as f64 / n_scan as f64;
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n_scan {
        let (a, b) = (node(i), node(i + 1));
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
        } else if gb != 0.0 && (ga < 0.0) != (gb < 0.0) {
            roots.push(polish(g, dg, a, b));
        }
    }
    if g(hi) == 0.0 {
        roots.push(hi);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    roots
        .into_iter()
        .map(|u| {
            let slope = dg(u);
            if slope.abs() <= HYPERBOLICITY_FLOOR {
                return Err(Error::Hyperbolicity {
                    value: u,
                    margin: slope.abs(),
                });
            }
            Ok(LimitEquilibrium {
                value: u,
                margin: slope.abs(),
                stable: slope > 0.0,
            })
        })
        .collect()
}

struct Newton<'a> {
    op: &'a DiscreteOperator,
    reaction: &'a Reaction,
    gram: TridiagonalFactor,
}

impl Newton<'_> {
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let gu = self.op.apply_gram(u);
        let mf = self.op.mass().mul_vec(&self.reaction.apply(u));
        gu.iter().zip(&mf).map(|(a, b)| a - b).collect()
    }

    fn dual(&self, r: &[f64]) -> f64 {
        let y = self.gram.solve(r);
        r.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    fn solve(&self, seed: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut u = seed.to_vec();
        let mut r = self.residual(&u);
        let mut dual = self.dual(&r);
        for _ in 0..NEWTON_STEPS {
            if dual <= NEWTON_TOL {
                return Ok((u, dual));
            }
            let jac = self
                .op
                .gram()
                .minus_col_scaled(self.op.mass(), &self.reaction.apply_derivative(&u));
            let du = jac.solve(&r)?;
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=8 {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a - t * d).collect();
                let rt = self.residual(&trial);
                let dt = self.dual(&rt);
                if dt.is_finite() && dt < dual {
                    accepted = Some((trial, rt, dt));
                    break;
                }
                t *= 0.5;
            }
            let Some((trial, rt, dt)) = accepted else {
                break;
            };
            u = trial;
            r = rt;
            dual = dt;
        }
        if dual <= NEWTON_TOL {
            return Ok((u, dual));
        }
        Err(Error::NonConvergence {
            what: "Newton iteration for an equilibrium".into(),
            iterations: NEWTON_STEPS,
            residual: dual,
        })
    }
}

/// `(margin, stable)` from the spectrum of the symmetric pencil
/// `(G - M_{f'(u)}, M)`, where `M_{f'}` weights the mass matrix elementwise by
/// the average of `f'` over each element.
fn linearization_margin(op: &DiscreteOperator, reaction: &Reaction, u: &[f64]) -> Result<(f64, bool)> {
    let df = reaction.apply_derivative(u);
    let mesh = op.mesh();
    let mut weighted = SymTridiagonal::zeros(op.dim());
    for e in 0..mesh.n_elems() {
        let h = mesh.element_length(e);
        let q = 0.5 * (df[e] + df[e + 1]);
        weighted.add_block(e, q * h / 3.0, q * h / 6.0, q * h / 3.0);
    }
    let lin = op.gram().axpy(-1.0, &weighted).to_dense();
    let chol = dense_cholesky(op.mass(), "mass matrix")?;
    let l = chol.l();
    let y = l.solve_lower_triangular(&lin).expect("nonsingular factor");
    let c = l
        .solve_lower_triangular(&y.transpose())
        .expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, 1e-15, 100_000).ok_or_else(|| Error::Numerical {
        what: "linearization eigensolver".into(),
        residual: f64::NAN,
    })?;
    let margin = eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let stable = eig.eigenvalues.iter().all(|&v| v > 0.0);
    Ok((margin, stable))
}

/// Newton continuation of each limit equilibrium to the discrete problem.
pub fn perturbed_equilibria(
    op: &DiscreteOperator,
    reaction: &Reaction,
    seeds: &[LimitEquilibrium],
) -> Result<PerturbedEquilibria> {
    if seeds.is_empty() {
        return Err(Error::Domain("no seeds".into()));
    }
    let newton = Newton {
        op,
        reaction,
        gram: op.gram().factor_spd()?,
    };
    let n = op.dim();
    let wiggle: Vec<f64> = op
        .mesh()
        .nodes()
        .iter()
        .map(|&x| (std::f64::consts::PI * (x - op.mesh().a()) / op.mesh().length()).cos())
        .collect();
    let mut items = Vec::with_capacity(seeds.len());
    for (i, seed) in seeds.iter().enumerate() {
        let s = seed.embed(n);
        let (u, residual) = newton.solve(&s)?;
        let spacing = seeds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| (o.value - seed.value).abs())
            .fold(1.0f64, f64::min);
        let delta = 0.5 * spacing;
        let mut locally_unique = true;
        for sign in [-1.0, 1.0] {
            let start: Vec<f64> = s
                .iter()
                .zip(&wiggle)
                .map(|(a, w)| a + sign * 0.1 * delta * w)
                .collect();
            let same = match newton.solve(&start) {
                Ok((v, _)) => {
                    let diff: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
                    op.energy_norm(&diff) <= 1e-8
                }
                Err(_) => false,
            };
            locally_unique &= same;
        }
        let (margin, stable) = linearization_margin(op, reaction, &u)?;
        if margin <= HYPERBOLICITY_FLOOR {
            return Err(Error::Hyperbolicity {
                value: seed.value,
                margin,
            });
        }
        let diff: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a - b).collect();
        let dist = op.energy_norm(&diff);
        items.push((
            Equilibrium {
                value: u,
                margin,
                stable,
                residual,
                locally_unique,
            },
            dist,
        ));
    }
    let mut collisions = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let diff: Vec<f64> = items[i]
                .0
                .value
                .iter()
                .zip(&items[j].0.value)
                .map(|(a, b)| a - b)
                .collect();
            if op.energy_norm(&diff) <= SAME_POINT {
                collisions.push((i, j));
            }
        }
    }
    Ok(PerturbedEquilibria { items, collisions })
}
