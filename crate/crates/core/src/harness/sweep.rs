use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::family::ScaleFamily;
use super::fit::{RateRow, RateSeries};
use crate::discretization::{AveragingProjection, DiscreteOperator};
use crate::dynamics::{
    attractor_gap, attractor_sample, exponential_attraction_check, invariance_residual,
    limit_attractor_sample, limit_equilibria, perturbed_equilibria, reduced_flow_gap,
    solve_manifold, LimitEquilibrium, ManifoldConfig, ManifoldSolution, ModalBasis,
    PerturbedEquilibria, Reaction,
};
use crate::exec::Execution;
use crate::spectral::{
    default_radius, eigenspace_hausdorff, norm_ratio_probe, projection_gap, resolvent_gap,
    riesz_projection, semigroup_decay_check,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Resolvent,
    Projection,
    Eigenspace,
    Equilibria,
    Manifold,
    Attractor,
    NormRatio,
    SpectrumGap,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Resolvent,
        Quantity::Projection,
        Quantity::Eigenspace,
        Quantity::Equilibria,
        Quantity::Manifold,
        Quantity::Attractor,
        Quantity::NormRatio,
        Quantity::SpectrumGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Resolvent => "resolvent",
            Quantity::Projection => "projection",
            Quantity::Eigenspace => "eigenspace",
            Quantity::Equilibria => "equilibria",
            Quantity::Manifold => "manifold",
            Quantity::Attractor => "attractor",
            Quantity::NormRatio => "norm_ratio",
            Quantity::SpectrumGap => "spectrum_gap",
        }
    }

    /// What the error column measures.
    pub fn description(self) -> &'static str {
        match self {
            Quantity::Resolvent => "L2->energy norm of the inverse minus the averaged limit inverse",
            Quantity::Projection => "L2->energy norm of the slow spectral projection minus averaging",
            Quantity::Eigenspace => "Hausdorff distance of the first eigenspace to the constants",
            Quantity::Equilibria => "largest energy distance of an equilibrium to its limit",
            Quantity::Manifold => "sup energy norm of the slow-manifold graph",
            Quantity::Attractor => "Hausdorff distance of the attractor to the limit interval",
            Quantity::NormRatio => "largest ratio of squared energy to squared H1 norm",
            Quantity::SpectrumGap => "second eigenvalue divided by the minimal diffusion",
        }
    }

    /// Slow-manifold quantities are only expected to behave once ε is small.
    pub(crate) fn flags_checked_below(self) -> f64 {
        match self {
            Quantity::Manifold | Quantity::Attractor => 1.0 / 16.0,
            _ => f64::INFINITY,
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown quantity '{s}'")))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Flags that are logged but never fail a criterion.
pub(crate) const INFORMATIONAL: [&str; 2] = ["clamped", "lipschitz"];

/// Shared per-ε assets, computed on first use.
struct Case<'a> {
    cfg: &'a RunConfig,
    family: ScaleFamily,
    reaction: Reaction,
    index: usize,
    eps: f64,
    exec: Execution,
    op: DiscreteOperator,
    proj: AveragingProjection,
    basis: Option<ModalBasis>,
    equilibria: Option<(Vec<LimitEquilibrium>, PerturbedEquilibria)>,
    manifold: Option<std::result::Result<ManifoldSolution, Error>>,
}

impl<'a> Case<'a> {
    fn new(cfg: &'a RunConfig, index: usize, eps: f64, exec: Execution) -> Result<Self> {
        let family = ScaleFamily::of(cfg.family);
        let op = family.operator(cfg.n, eps, cfg.m0)?;
        let proj = AveragingProjection::new(&op);
        Ok(Self {
            cfg,
            family,
            reaction: cfg.reaction(),
            index,
            eps,
            exec,
            op,
            proj,
            basis: None,
            equilibria: None,
            manifold: None,
        })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream * 1024 + self.index as u64);
        rng
    }

    fn basis(&mut self) -> Result<&ModalBasis> {
        if self.basis.is_none() {
            self.basis = Some(ModalBasis::new(&self.op)?);
        }
        Ok(self.basis.as_ref().unwrap())
    }

    fn bracket(&self) -> (f64, f64) {
        let ubar = self.reaction.dissipativity_margin().map_or(1.0, |m| m.0);
        let b = (1.5 * ubar).max(3.0);
        (-b, b)
    }

    fn equilibria(&mut self) -> Result<&(Vec<LimitEquilibrium>, PerturbedEquilibria)> {
        if self.equilibria.is_none() {
            let limit = limit_equilibria(&self.reaction, self.family.lambda_bar(), self.bracket(), 1000)?;
            let pert = perturbed_equilibria(&self.op, &self.reaction, &limit)?;
            self.equilibria = Some((limit, pert));
        }
        Ok(self.equilibria.as_ref().unwrap())
    }

    fn manifold_config(&self) -> ManifoldConfig {
        ManifoldConfig {
            n_grid: self.cfg.n_grid,
            k_modes: self.cfg.k_modes,
            n_time: self.cfg.n_time,
            exec: self.exec,
            ..ManifoldConfig::default()
        }
    }

    /// Slow coordinates of the perturbed equilibria, ascending.
    fn slow_coordinates(&mut self) -> Result<Vec<f64>> {
        self.equilibria()?;
        self.basis()?;
        let basis = self.basis.as_ref().unwrap();
        let (_, pert) = self.equilibria.as_ref().unwrap();
        Ok(pert
            .items
            .iter()
            .map(|(e, _)| basis.leading_coefficients(&e.value, 1)[0])
            .collect())
    }

    fn manifold(&mut self) -> Result<std::result::Result<&ManifoldSolution, &Error>> {
        if self.manifold.is_none() {
            let vs = self.slow_coordinates()?;
            let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cfg = self.manifold_config();
            let sol = solve_manifold(self.basis.as_ref().unwrap(), &self.reaction, &cfg, (lo, hi));
            match sol {
                Err(e @ Error::NonConvergence { .. }) => self.manifold = Some(Err(e)),
                other => self.manifold = Some(Ok(other?)),
            }
        }
        Ok(self.manifold.as_ref().unwrap().as_ref())
    }

    fn row(&self, error: f64, flags: Vec<String>) -> RateRow {
        RateRow {
            eps: self.eps,
            delta: self.family.delta(self.eps),
            error,
            flags,
        }
    }

    fn evaluate(&mut self, q: Quantity) -> Result<RateRow> {
        let lambda_bar = self.family.lambda_bar();
        match q {
            Quantity::Resolvent => {
                let e = resolvent_gap(&self.op, lambda_bar, &self.proj)?;
                Ok(self.row(e, vec![]))
            }
            Quantity::Projection => {
                let m0 = self.cfg.m0;
                let n_quad = self.cfg.n_quad;
                let dec = self.basis()?.decomposition().clone();
                let radius = default_radius(lambda_bar, m0, &dec);
                let q = riesz_projection(&self.op, lambda_bar, radius, n_quad)?;
                let e = projection_gap(&q, &self.proj, &self.op)?;
                let sv = q.singular_values(&self.op)?;
                let mut flags = vec![];
                if q.enclosed != 1 {
                    flags.push("enclosed".into());
                }
                if sv.get(1).copied().unwrap_or(0.0) > 1e-6 {
                    flags.push("rank".into());
                }
                Ok(self.row(e, flags))
            }
            Quantity::Eigenspace => {
                let dec = self.basis()?.decomposition().clone();
                let e = eigenspace_hausdorff(&dec, &self.op, &self.proj)?;
                Ok(self.row(e, vec![]))
            }
            Quantity::Equilibria => {
                let vs = self.slow_coordinates()?;
                let (limit, pert) = self.equilibria()?;
                let e = pert.items.iter().map(|(_, d)| *d).fold(0.0, f64::max);
                let mut flags = vec![];
                if !pert.collisions.is_empty() || pert.items.len() != limit.len() {
                    flags.push("collision".into());
                }
                if pert.items.iter().any(|(eq, _)| !eq.locally_unique) {
                    flags.push("unique".into());
                }
                if pert.items.iter().zip(limit).any(|((eq, _), l)| eq.stable != l.stable) {
                    flags.push("stability".into());
                }
                if vs.windows(2).any(|w| !(w[1] > w[0])) {
                    flags.push("order".into());
                }
                Ok(self.row(e, flags))
            }
            Quantity::Manifold => self.manifold_row(),
            Quantity::Attractor => self.attractor_row(),
            Quantity::NormRatio => {
                let e = norm_ratio_probe(&self.op)?;
                Ok(self.row(e, vec![]))
            }
            Quantity::SpectrumGap => {
                let p = self.family.p(self.eps);
                let mut rng = self.rng(1);
                let basis = self.basis()?;
                let e = basis.value(1) / p;
                let mut flags = vec![];
                if e < 0.5 * PI * PI {
                    flags.push("gap".into());
                }
                let n = basis.dim();
                let c = DVector::from_fn(n, |j, _| {
                    if j == 0 {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0) / basis.value(j).sqrt()
                    }
                });
                let z = basis.synthesize(&c);
                let times: Vec<f64> = (0..20).map(|i| 10f64.powf(-4.0 + 4.0 * i as f64 / 19.0)).collect();
                let worst = semigroup_decay_check(basis.decomposition(), basis.op(), &times, &z)?
                    .iter()
                    .map(|s| s.ratio)
                    .fold(0.0, f64::max);
                if worst > 1.0 + 1e-6 {
                    flags.push("semigroup".into());
                }
                Ok(self.row(e, flags))
            }
        }
    }

    fn manifold_row(&mut self) -> Result<RateRow> {
        let vs = self.slow_coordinates()?;
        let (v_lo, v_hi) = (
            vs.iter().copied().fold(f64::INFINITY, f64::min),
            vs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let (dt, t_end, n_att, exec) = (self.cfg.dt, self.cfg.t_end, self.cfg.n_attraction, self.exec);
        let mut rng = self.rng(2);
        let reaction = self.reaction;
        let sol = match self.manifold()? {
            Ok(sol) => sol.clone(),
            Err(Error::NonConvergence { residual, .. }) => {
                let r = *residual;
                return Ok(self.row(r, vec!["nonconvergence".into()]));
            }
            Err(e) => return Err(Error::Invariant(e.to_string())),
        };
        let basis = self.basis.as_ref().unwrap();
        let s = &sol.section;
        let mut flags: Vec<String> = vec![];
        if s.clamped() {
            flags.push("clamped".into());
        }
        if sol.lipschitz_warning {
            flags.push("lipschitz".into());
        }
        if sol.max_contraction() > 0.9 {
            flags.push("contraction".into());
        }
        if sol.fixed_point_residual > 1e-8 {
            flags.push("fixed_point".into());
        }
        let v0 = if v_hi > v_lo { v_lo + 0.75 * (v_hi - v_lo) } else { 0.5 };
        if invariance_residual(basis, &reaction, s, v0, dt, t_end)? > 1e-3 {
            flags.push("invariance".into());
        }
        if reduced_flow_gap(basis, &reaction, s, v0, dt, t_end)? > 1e-3 {
            flags.push("reduced".into());
        }
        let (a, b) = if v_hi > v_lo { (v_lo, v_hi) } else { (-0.5, 0.5) };
        let batch: Vec<Vec<f64>> = (0..n_att)
            .map(|_| {
                let mut c = vec![rng.gen_range(a..=b)];
                c.extend((0..5).map(|_| rng.gen_range(-0.2..0.2)));
                basis.synthesize_leading(&c)
            })
            .collect();
        let reports = exponential_attraction_check(basis, &reaction, s, &batch, exec)?;
        let l2 = basis.value(1);
        if reports.iter().any(|r| !(r.rate >= 0.5 * l2)) {
            flags.push("attraction".into());
        }
        if reports.iter().any(|r| !r.monotone) {
            flags.push("nonmonotone".into());
        }
        Ok(self.row(s.sup_norm(), flags))
    }

    fn attractor_row(&mut self) -> Result<RateRow> {
        let n_pts = self.cfg.n_pts;
        let (limit, pert) = self.equilibria()?.clone();
        let sol = match self.manifold()? {
            Ok(sol) => sol.clone(),
            Err(Error::NonConvergence { residual, .. }) => {
                let r = *residual;
                return Ok(self.row(r, vec!["nonconvergence".into()]));
            }
            Err(e) => return Err(Error::Invariant(e.to_string())),
        };
        let basis = self.basis.as_ref().unwrap();
        let eqs: Vec<_> = pert.items.iter().map(|(e, _)| e.clone()).collect();
        let sample = attractor_sample(basis, &sol.section, &eqs, n_pts)?;
        let lo = limit.iter().map(|l| l.value).fold(f64::INFINITY, f64::min);
        let hi = limit.iter().map(|l| l.value).fold(f64::NEG_INFINITY, f64::max);
        let limit_sample = limit_attractor_sample(lo, hi, n_pts, basis.dim())?;
        let gap = attractor_gap(basis, &sample, &limit_sample)?;
        let mut flags = vec![];
        if sol.section.clamped() {
            flags.push("clamped".into());
        }
        if gap.legs.iter().sum::<f64>() < gap.total * (1.0 - 1e-9) - 1e-14 {
            flags.push("triangle".into());
        }
        Ok(self.row(gap.total, flags))
    }
}

/// Computes one row per requested quantity at a single ε.
pub fn evaluate(cfg: &RunConfig, index: usize, eps: f64, quantities: &[Quantity], exec: Execution) -> Result<Vec<RateRow>> {
    let wrap = |e: Error| Error::Sweep {
        eps,
        source: Box::new(e),
    };
    let mut case = Case::new(cfg, index, eps, exec).map_err(wrap)?;
    quantities
        .iter()
        .map(|&q| case.evaluate(q).map_err(wrap))
        .collect()
}

/// Rows for every quantity over the configured ε grid; ε values are
/// processed independently and merged in grid order.
pub fn sweep_all(cfg: &RunConfig, quantities: &[Quantity], exec: Execution) -> Result<Vec<RateSeries>> {
    cfg.validate()?;
    let grid = cfg.eps_grid()?;
    let indexed: Vec<(usize, f64)> = grid.into_iter().enumerate().collect();
    let per_eps = exec.map(&indexed, |&(i, eps)| evaluate(cfg, i, eps, quantities, exec));
    let mut series: Vec<RateSeries> = quantities
        .iter()
        .map(|q| RateSeries {
            quantity: q.name().into(),
            rows: Vec::new(),
        })
        .collect();
    for rows in per_eps {
        for (s, row) in series.iter_mut().zip(rows?) {
            s.rows.push(row);
        }
    }
    for s in &series {
        s.validate()?;
    }
    Ok(series)
}

pub fn sweep(cfg: &RunConfig, quantity: Quantity, exec: Execution) -> Result<RateSeries> {
    Ok(sweep_all(cfg, &[quantity], exec)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("nope".parse::<Quantity>().is_err());
    }
}
