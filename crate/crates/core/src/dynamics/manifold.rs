use rand::Rng;

use super::flow::{checked_reaction, exp_euler_weights, step, ModalBasis};
use super::reaction::Reaction;
use crate::exec::Execution;
use crate::{Error, Result};

/// Numerical parameters of the graph-transform construction.
#[derive(Debug, Clone, Copy)]
pub struct ManifoldConfig {
    pub n_grid: usize,
    /// Slow mode plus `k_modes - 1` resolved fast modes.
    pub k_modes: usize,
    /// Fractional widening of the equilibrium range on each side.
    pub widen: f64,
    /// RK4 steps of the backward slow trajectory.
    pub n_time: usize,
    /// Backward horizon is `-ln(horizon_tol) / λ_2`.
    pub horizon_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Lipschitz bound `Δ` of the admissible sections.
    pub lipschitz_bound: f64,
    pub exec: Execution,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        Self {
            n_grid: 129,
            k_modes: 12,
            widen: 0.2,
            n_time: 64,
            horizon_tol: 1e-10,
            tol: 1e-9,
            max_iter: 100,
            lipschitz_bound: 1.0,
            exec: Execution::default(),
        }
    }
}

/// Sampled map `s: Y_ε → Z_ε`, stored as fast modal coefficients
/// (modes `2..=k`) on a uniform grid of the slow coordinate `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSection {
    v_grid: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    sup_norm: f64,
    lipschitz: f64,
    clamped: bool,
}

fn fast_energy(basis: &ModalBasis, c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, x)| basis.value(j + 1) * x * x)
        .sum::<f64>()
        .sqrt()
}

impl GraphSection {
    pub fn new(basis: &ModalBasis, v_grid: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if v_grid.len() < 2 || coeffs.len() != v_grid.len() {
            return Err(Error::Dimension {
                expected: v_grid.len().max(2),
                got: coeffs.len(),
            });
        }
        if v_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("v-grid must be strictly increasing".into()));
        }
        let k = coeffs[0].len();
        if k + 1 > basis.dim() || coeffs.iter().any(|c| c.len() != k) {
            return Err(Error::Domain(format!("inconsistent fast coefficient count {k}")));
        }
        let sup_norm = coeffs.iter().map(|c| fast_energy(basis, c)).fold(0.0, f64::max);
        let slow = basis.value(0).sqrt();
        let lipschitz = (0..v_grid.len() - 1)
            .map(|i| {
                let d: Vec<f64> = coeffs[i + 1].iter().zip(&coeffs[i]).map(|(a, b)| a - b).collect();
                fast_energy(basis, &d) / ((v_grid[i + 1] - v_grid[i]) * slow)
            })
            .fold(0.0, f64::max);
        Ok(Self {
            v_grid,
            coeffs,
            sup_norm,
            lipschitz,
            clamped: false,
        })
    }

    /// The zero section on `n_grid` uniform points of `[lo, hi]`.
    pub fn zero(basis: &ModalBasis, lo: f64, hi: f64, n_grid: usize, k_modes: usize) -> Result<Self> {
        let grid = uniform_grid(lo, hi, n_grid)?;
        let coeffs = vec![vec![0.0; k_modes.saturating_sub(1)]; grid.len()];
        Self::new(basis, grid, coeffs)
    }

    /// A smooth random section whose energy norm is at most `amplitude`.
    pub fn random(
        basis: &ModalBasis,
        lo: f64,
        hi: f64,
        n_grid: usize,
        k_modes: usize,
        amplitude: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let grid = uniform_grid(lo, hi, n_grid)?;
        let nf = k_modes.saturating_sub(1);
        let scale = amplitude / (nf.max(1) as f64).sqrt();
        let params: Vec<(f64, f64, f64)> = (0..nf)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0), rng.gen_range(0.0..6.3)))
            .collect();
        let coeffs = grid
            .iter()
            .map(|&v| {
                params
                    .iter()
                    .enumerate()
                    .map(|(j, &(a, w, th))| scale * a * (w * v + th).sin() / basis.value(j + 1).sqrt())
                    .collect()
            })
            .collect();
        Self::new(basis, grid, coeffs)
    }

    pub fn v_grid(&self) -> &[f64] {
        &self.v_grid
    }

    pub fn v_range(&self) -> (f64, f64) {
        (self.v_grid[0], *self.v_grid.last().unwrap())
    }

    /// Fast coefficients per grid point.
    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn n_fast(&self) -> usize {
        self.coeffs[0].len()
    }

    /// `|||s||| = max_v ‖s(v)‖_energy`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Largest adjacent quotient `‖s(v') - s(v)‖ / ‖(v' - v) φ_1‖`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Whether a backward trajectory was clamped to the grid range while
    /// building this section.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// Piecewise-linear fast coefficients at `v`, clamped to the grid range.
    pub fn eval(&self, v: f64) -> Vec<f64> {
        let (lo, hi) = self.v_range();
        let v = v.clamp(lo, hi);
        let n = self.v_grid.len();
        let h = (hi - lo) / (n - 1) as f64;
        let i = (((v - lo) / h).floor() as usize).min(n - 2);
        let t = ((v - self.v_grid[i]) / (self.v_grid[i + 1] - self.v_grid[i])).clamp(0.0, 1.0);
        self.coeffs[i]
            .iter()
            .zip(&self.coeffs[i + 1])
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }

    /// `s(v)` as a nodal vector.
    pub fn z_at(&self, basis: &ModalBasis, v: f64) -> Vec<f64> {
        let mut c = vec![0.0];
        c.extend(self.eval(v));
        basis.synthesize_leading(&c)
    }

    /// Nodal vectors `s(v_i)` on the grid.
    pub fn z_values(&self, basis: &ModalBasis) -> Vec<Vec<f64>> {
        self.v_grid.iter().map(|&v| self.z_at(basis, v)).collect()
    }

    /// The point `v φ_1 + s(v)` of the manifold.
    pub fn lift(&self, basis: &ModalBasis, v: f64) -> Vec<f64> {
        let mut c = vec![v];
        c.extend(self.eval(v));
        basis.synthesize_leading(&c)
    }
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo < hi) || n < 2 {
        return Err(Error::Domain(format!("grid [{lo}, {hi}] with {n} points")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// `max_v ‖s_1(v) - s_2(v)‖_energy` over a shared grid.
pub fn section_distance(a: &GraphSection, b: &GraphSection, basis: &ModalBasis) -> Result<f64> {
    if a.v_grid != b.v_grid || a.n_fast() != b.n_fast() {
        return Err(Error::Domain("sections live on different grids".into()));
    }
    Ok(a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| {
            let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            fast_energy(basis, &d)
        })
        .fold(0.0, f64::max))
}

/// `(∫_0^1 e^{-a s} ds, ∫_0^1 s e^{-a s} ds)`.
fn exp_moments(a: f64) -> (f64, f64) {
    if a < 1e-4 {
        (
            1.0 - a / 2.0 + a * a / 6.0,
            0.5 - a / 3.0 + a * a / 8.0,
        )
    } else {
        let e = (-a).exp();
        ((1.0 - e) / a, (1.0 - e - a * e) / (a * a))
    }
}

/// Modal projections `φ_jᵀ M f(v φ_1 + s(v))`, `j < k`.
fn forcing(basis: &ModalBasis, reaction: &Reaction, s: &GraphSection, v: f64) -> Result<Vec<f64>> {
    let u = s.lift(basis, v);
    let f = checked_reaction(reaction, &u)?;
    Ok(basis
        .leading_coefficients(&f, s.n_fast() + 1)
        .as_slice()
        .to_vec())
}

/// One application of `Φ_ε`: for each grid value `η` the slow equation is
/// integrated backward from `v(τ) = η`, and the fast coefficients are the
/// truncated Duhamel integrals along that trajectory.
pub fn graph_transform(
    basis: &ModalBasis,
    reaction: &Reaction,
    s: &GraphSection,
    cfg: &ManifoldConfig,
) -> Result<GraphSection> {
    let k = s.n_fast() + 1;
    if k > basis.dim() || k < 2 {
        return Err(Error::Domain(format!("{k} modes requested of {}", basis.dim())));
    }
    if cfg.n_time == 0 || !(cfg.horizon_tol > 0.0 && cfg.horizon_tol < 1.0) {
        return Err(Error::Domain("bad time discretization of the graph transform".into()));
    }
    let l1 = basis.value(0);
    let horizon = -cfg.horizon_tol.ln() / basis.value(1);
    let h = horizon / cfg.n_time as f64;
    let (lo, hi) = s.v_range();
    let weights: Vec<(f64, f64, f64)> = (1..k)
        .map(|j| {
            let lam = basis.value(j);
            let (i0, i1) = exp_moments(lam * h);
            (lam * h, i0, i1)
        })
        .collect();
    let rows = cfg.exec.map(s.v_grid(), |&eta| -> Result<(Vec<f64>, bool)> {
        let slow = |v: f64, g0: f64| -l1 * v + g0;
        let mut clamped = false;
        let mut v = eta;
        let mut g = forcing(basis, reaction, s, v)?;
        let mut acc = vec![0.0; k - 1];
        for m in 0..cfg.n_time {
            let k1 = slow(v, g[0]);
            let v2 = v - 0.5 * h * k1;
            let k2 = slow(v2, forcing(basis, reaction, s, v2)?[0]);
            let v3 = v - 0.5 * h * k2;
            let k3 = slow(v3, forcing(basis, reaction, s, v3)?[0]);
            let v4 = v - h * k3;
            let k4 = slow(v4, forcing(basis, reaction, s, v4)?[0]);
            let mut next = v - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !next.is_finite() {
                return Err(Error::Blowup(format!("backward slow trajectory from v = {eta}")));
            }
            if next < lo || next > hi {
                clamped = true;
                next = next.clamp(lo, hi);
            }
            let g_next = forcing(basis, reaction, s, next)?;
            for (j, &(a, i0, i1)) in weights.iter().enumerate() {
                let damp = (-(m as f64) * a).exp();
                if damp == 0.0 {
                    continue;
                }
                acc[j] += damp * h * (g[j + 1] * (i0 - i1) + g_next[j + 1] * i1);
            }
            v = next;
            g = g_next;
        }
        Ok((acc, clamped))
    });
    let mut coeffs = Vec::with_capacity(rows.len());
    let mut clamped = false;
    for row in rows {
        let (c, cl) = row?;
        coeffs.push(c);
        clamped |= cl;
    }
    let mut out = GraphSection::new(basis, s.v_grid.clone(), coeffs)?;
    out.clamped = clamped;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ManifoldSolution {
    pub section: GraphSection,
    pub iterations: usize,
    /// `|||Φ^{m+1}(0) - Φ^m(0)|||` per iteration.
    pub increments: Vec<f64>,
    /// Ratios of successive increments above the round-off floor.
    pub contraction_factors: Vec<f64>,
    /// `|||Φ(s_*) - s_*|||` after convergence.
    pub fixed_point_residual: f64,
    /// The Lipschitz quotient of some iterate exceeded the bound `Δ`.
    pub lipschitz_warning: bool,
}

impl ManifoldSolution {
    pub fn max_contraction(&self) -> f64 {
        self.contraction_factors.iter().copied().fold(0.0, f64::max)
    }
}

/// Fixed point of [`graph_transform`] from `s ≡ 0`. `v_range` is the range of
/// slow coordinates of the equilibria; the grid widens it by `cfg.widen` on
/// each side.
pub fn solve_manifold(
    basis: &ModalBasis,
    reaction: &Reaction,
    cfg: &ManifoldConfig,
    v_range: (f64, f64),
) -> Result<ManifoldSolution> {
    let (a, b) = v_range;
    if !(a <= b) {
        return Err(Error::Domain(format!("empty slow range [{a}, {b}]")));
    }
    let width = if b - a > 0.0 { b - a } else { 1.0 };
    let (lo, hi) = (a - cfg.widen * width, b + cfg.widen * width);
    let mut s = GraphSection::zero(basis, lo, hi, cfg.n_grid, cfg.k_modes)?;
    let mut increments = Vec::new();
    let mut factors = Vec::new();
    let mut lipschitz_warning = false;
    let floor = 1e-13;
    for it in 1..=cfg.max_iter {
        let next = graph_transform(basis, reaction, &s, cfg)?;
        lipschitz_warning |= next.lipschitz() > cfg.lipschitz_bound;
        let inc = section_distance(&next, &s, basis)?;
        if let Some(&prev) = increments.last() {
            if prev > floor && inc > floor {
                factors.push(inc / prev);
            }
        }
        increments.push(inc);
        s = next;
        if inc <= cfg.tol {
            let again = graph_transform(basis, reaction, &s, cfg)?;
            let fixed_point_residual = section_distance(&again, &s, basis)?;
            return Ok(ManifoldSolution {
                section: s,
                iterations: it,
                increments,
                contraction_factors: factors,
                fixed_point_residual,
                lipschitz_warning,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "graph-transform iteration".into(),
        iterations: cfg.max_iter,
        residual: increments.last().copied().unwrap_or(f64::NAN),
    })
}

fn split(basis: &ModalBasis, s: &GraphSection, u: &[f64]) -> (f64, Vec<f64>) {
    let v = basis.leading_coefficients(u, 1)[0];
    let z: Vec<f64> = u
        .iter()
        .zip(basis.phi().column(0).iter())
        .map(|(a, p)| a - v * p)
        .collect();
    let zs = s.z_at(basis, v);
    let xi = z.iter().zip(&zs).map(|(a, b)| a - b).collect();
    (v, xi)
}

/// Largest `‖z(t) - s(v(t))‖_energy` along the trajectory started on the
/// manifold at slow coordinate `v0`.
pub fn invariance_residual(
    basis: &ModalBasis,
    reaction: &Reaction,
    s: &GraphSection,
    v0: f64,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    let steps = (t_end / dt).round() as usize;
    let mut u = s.lift(basis, v0);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        u = step(basis, reaction, &u, dt)?;
        let (_, xi) = split(basis, s, &u);
        worst = worst.max(basis.op().energy_norm(&xi));
    }
    Ok(worst)
}

/// Largest gap between the slow coordinate of the full trajectory and the
/// reduced equation `v̇ + λ_1 v = φ_1ᵀ M f(v φ_1 + s(v))`, both advanced by the
/// same exponential-Euler step.
pub fn reduced_flow_gap(
    basis: &ModalBasis,
    reaction: &Reaction,
    s: &GraphSection,
    v0: f64,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    let steps = (t_end / dt).round() as usize;
    let (decay, w) = exp_euler_weights(basis.value(0), dt);
    let mut u = s.lift(basis, v0);
    let mut v = v0;
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let g = forcing(basis, reaction, s, v)?[0];
        v = decay * v + w * g;
        u = step(basis, reaction, &u, dt)?;
        let vu = basis.leading_coefficients(&u, 1)[0];
        worst = worst.max((vu - v).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractionReport {
    /// Fitted decay rate of `‖ξ(t)‖`.
    pub rate: f64,
    /// `‖ξ‖` never increased after the initial transient.
    pub monotone: bool,
    pub xi_initial: f64,
    pub xi_final: f64,
    /// Fit window `[t0, t1]`.
    pub window: (f64, f64),
}

/// Tracks the off-manifold component `ξ = z - s(v)` in the resolved fast
/// modes and fits its exponential decay rate. The fit window is
/// `[0.1, 1] · min(1, 10 / λ_2)`, long enough for `ξ` to fall by `e^{-9}`.
pub fn exponential_attraction_check(
    basis: &ModalBasis,
    reaction: &Reaction,
    s: &GraphSection,
    u0_batch: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<AttractionReport>> {
    const STEPS: usize = 400;
    let k = s.n_fast() + 1;
    let t1 = (10.0 / basis.value(1)).min(1.0);
    let t0 = 0.1 * t1;
    let dt = t1 / STEPS as f64;
    let resolved_xi = |u: &[f64]| -> f64 {
        let c = basis.leading_coefficients(u, k);
        let sv = s.eval(c[0]);
        let d: Vec<f64> = (1..k).map(|j| c[j] - sv[j - 1]).collect();
        fast_energy(basis, &d)
    };
    let reports = exec.map(u0_batch, |u0| -> Result<AttractionReport> {
        if u0.len() != basis.dim() {
            return Err(Error::Dimension {
                expected: basis.dim(),
                got: u0.len(),
            });
        }
        let mut u = u0.clone();
        let xi_initial = resolved_xi(&u);
        let mut samples = Vec::with_capacity(STEPS);
        for i in 1..=STEPS {
            u = step(basis, reaction, &u, dt)?;
            samples.push((i as f64 * dt, resolved_xi(&u)));
        }
        let floor = 1e-13 * xi_initial.max(1.0);
        let settle = STEPS / 10;
        let monotone = samples[settle..]
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) + floor);
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(t, x)| *t >= t0 - 0.5 * dt && *x > floor)
            .map(|&(t, x)| (t, x.ln()))
            .collect();
        let rate = if pts.len() >= 4 {
            -slope(&pts)
        } else {
            f64::INFINITY
        };
        Ok(AttractionReport {
            rate,
            monotone,
            xi_initial,
            xi_final: samples.last().map_or(xi_initial, |s| s.1),
            window: (t0, t1),
        })
    });
    reports.into_iter().collect()
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{assemble, CoefficientField, DiscreteOperator, IntervalMesh};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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

    fn constant_operator(n: usize, p: f64) -> DiscreteOperator {
        let mesh = IntervalMesh::uniform(0.0, 1.0, n).unwrap();
        let coeff = CoefficientField::constant(&mesh, p, 0.0, 0.5, 0.1).unwrap();
        assemble(&mesh, &coeff).unwrap()
    }

    fn small_cfg() -> ManifoldConfig {
        ManifoldConfig {
            n_grid: 33,
            ..ManifoldConfig::default()
        }
    }

    #[test]
    fn linear_reaction_leaves_zero_section_fixed() {
        let basis = ModalBasis::new(&f1_operator(48, 1.0 / 16.0)).unwrap();
        let cfg = small_cfg();
        let lin = Reaction::Linear { slope: -1.0 };
        let s0 = GraphSection::zero(&basis, -1.0, 1.0, cfg.n_grid, cfg.k_modes).unwrap();
        let s1 = graph_transform(&basis, &lin, &s0, &cfg).unwrap();
        assert!(s1.sup_norm() <= 1e-8, "{}", s1.sup_norm());
    }

    #[test]
    fn constant_coefficients_give_flat_manifold() {
        let basis = ModalBasis::new(&constant_operator(48, 16.0)).unwrap();
        let r = 0.5f64.sqrt() / basis.phi()[(0, 0)];
        let sol = solve_manifold(&basis, &Reaction::Cubic, &small_cfg(), (-r, r)).unwrap();
        assert!(sol.section.sup_norm() <= 1e-6);
        for z in sol.section.z_values(&basis) {
            assert!(basis.leading_coefficients(&z, 1)[0].abs() <= 1e-10);
        }
    }

    #[test]
    fn transform_contracts_for_small_eps() {
        let basis = ModalBasis::new(&f1_operator(48, 1.0 / 16.0)).unwrap();
        let cfg = small_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s1 = GraphSection::random(&basis, -1.0, 1.0, cfg.n_grid, cfg.k_modes, 0.05, &mut rng).unwrap();
        let s2 = GraphSection::random(&basis, -1.0, 1.0, cfg.n_grid, cfg.k_modes, 0.05, &mut rng).unwrap();
        let before = section_distance(&s1, &s2, &basis).unwrap();
        let a = graph_transform(&basis, &Reaction::Cubic, &s1, &cfg).unwrap();
        let b = graph_transform(&basis, &Reaction::Cubic, &s2, &cfg).unwrap();
        let after = section_distance(&a, &b, &basis).unwrap();
        assert!(after <= 0.5 * before, "{after} vs {before}");
    }

    #[test]
    fn manifold_is_invariant_and_attracting() {
        let basis = ModalBasis::new(&f1_operator(48, 1.0 / 16.0)).unwrap();
        let cfg = small_cfg();
        let sol = solve_manifold(&basis, &Reaction::Cubic, &cfg, (-0.75, 0.75)).unwrap();
        assert!(sol.fixed_point_residual <= 1e-8);
        assert!(sol.max_contraction() <= 0.9);
        let res = invariance_residual(&basis, &Reaction::Cubic, &sol.section, 0.3, 1e-3, 1.0).unwrap();
        assert!(res <= 1e-3, "{res}");
        let gap = reduced_flow_gap(&basis, &Reaction::Cubic, &sol.section, 0.3, 1e-3, 1.0).unwrap();
        assert!(gap <= 1e-3, "{gap}");
        let mut u0 = sol.section.lift(&basis, 0.2);
        for (i, x) in basis.phi().column(1).iter().enumerate() {
            u0[i] += 0.1 * x;
        }
        let rep = exponential_attraction_check(&basis, &Reaction::Cubic, &sol.section, &[u0], Execution::Sequential)
            .unwrap();
        assert!(rep[0].rate >= 0.5 * basis.value(1));
        assert!(rep[0].monotone);
    }

    #[test]
    fn linear_decay_rate_matches_second_eigenvalue() {
        let basis = ModalBasis::new(&f1_operator(48, 1.0 / 16.0)).unwrap();
        let cfg = small_cfg();
        let lin = Reaction::Linear { slope: -1.0 };
        let sol = solve_manifold(&basis, &lin, &cfg, (0.0, 0.0)).unwrap();
        assert!(sol.section.sup_norm() <= 1e-8);
        let u0: Vec<f64> = basis.phi().column(1).iter().map(|x| 0.1 * x).collect();
        let rep = exponential_attraction_check(&basis, &lin, &sol.section, &[u0], Execution::Sequential).unwrap();
        let l2 = basis.value(1);
        assert!((rep[0].rate - l2).abs() <= 0.02 * l2, "{} vs {l2}", rep[0].rate);
        assert!((rep[0].rate - (l2 + 1.0)).abs() <= 0.02 * (l2 + 1.0));
    }

    #[test]
    fn random_section_respects_amplitude() {
        let basis = ModalBasis::new(&f1_operator(24, 0.25)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = GraphSection::random(&basis, -1.0, 1.0, 17, 6, 0.3, &mut rng).unwrap();
        assert!(s.sup_norm() <= 0.3 + 1e-12);
        let z = s.z_at(&basis, 0.1);
        assert!(basis.leading_coefficients(&z, 1)[0].abs() <= 1e-10);
    }
}
