use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::family::FamilyKind;
use crate::dynamics::Reaction;
use crate::exec::Execution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactionKind {
    Cubic,
    Linear,
}

impl FromStr for ReactionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(ReactionKind::Cubic),
            "linear" => Ok(ReactionKind::Linear),
            _ => Err(Error::Config(format!("unknown reaction '{s}' (expected cubic or linear)"))),
        }
    }
}

impl fmt::Display for ReactionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReactionKind::Cubic => "cubic",
            ReactionKind::Linear => "linear",
        })
    }
}

/// Everything a sweep needs. Parsed from flat `key = value` text; keys are
/// the field names.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Mesh elements.
    pub n: usize,
    pub eps_hi: f64,
    pub eps_lo: f64,
    pub family: FamilyKind,
    pub reaction: ReactionKind,
    /// Slope `c` of the linear reaction `f(u) = c u`.
    pub linear_slope: f64,
    pub m0: f64,
    pub n_quad: usize,
    pub k_modes: usize,
    pub n_grid: usize,
    pub n_time: usize,
    pub n_pts: usize,
    pub n_attraction: usize,
    /// Time step and final time of on-manifold trajectories.
    pub dt: f64,
    pub t_end: f64,
    pub slope_floor: f64,
    pub r2_floor: f64,
    pub seed: u64,
    pub parallel: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 256,
            eps_hi: 0.25,
            eps_lo: 1.0 / 1024.0,
            family: FamilyKind::F1,
            reaction: ReactionKind::Cubic,
            linear_slope: -1.0,
            m0: 0.1,
            n_quad: 32,
            k_modes: 12,
            n_grid: 129,
            n_time: 64,
            n_pts: 65,
            n_attraction: 5,
            dt: 1e-3,
            t_end: 1.0,
            slope_floor: 0.9,
            r2_floor: 0.98,
            seed: 0,
            parallel: true,
            out: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse(key, value)?,
            "eps_hi" => self.eps_hi = parse(key, value)?,
            "eps_lo" => self.eps_lo = parse(key, value)?,
            "family" => self.family = value.parse()?,
            "reaction" => self.reaction = value.parse()?,
            "linear_slope" => self.linear_slope = parse(key, value)?,
            "m0" => self.m0 = parse(key, value)?,
            "n_quad" => self.n_quad = parse(key, value)?,
            "k_modes" => self.k_modes = parse(key, value)?,
            "n_grid" => self.n_grid = parse(key, value)?,
            "n_time" => self.n_time = parse(key, value)?,
            "n_pts" => self.n_pts = parse(key, value)?,
            "n_attraction" => self.n_attraction = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "t_end" => self.t_end = parse(key, value)?,
            "slope_floor" => self.slope_floor = parse(key, value)?,
            "r2_floor" => self.r2_floor = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "parallel" => self.parallel = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the defaults. `#` starts a
    /// comment; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps_hi", self.eps_hi),
            ("eps_lo", self.eps_lo),
            ("m0", self.m0),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("r2_floor", self.r2_floor),
            ("slope_floor", self.slope_floor),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("'{k}' must be positive, got {v}")));
            }
        }
        if self.n < 2 {
            return Err(Error::Config("'n' must be at least 2".into()));
        }
        if self.n_quad == 0 || !self.n_quad.is_multiple_of(2) {
            return Err(Error::Config("'n_quad' must be even and positive".into()));
        }
        if self.k_modes < 2 || self.k_modes > self.n {
            return Err(Error::Config(format!("'k_modes' must lie in [2, {}]", self.n)));
        }
        for (k, v) in [
            ("n_grid", self.n_grid),
            ("n_time", self.n_time),
            ("n_pts", self.n_pts),
            ("n_attraction", self.n_attraction),
        ] {
            if v < 2 {
                return Err(Error::Config(format!("'{k}' must be at least 2")));
            }
        }
        if self.dt > self.t_end {
            return Err(Error::Config("'dt' exceeds 't_end'".into()));
        }
        if self.eps_grid()?.len() < 5 {
            return Err(Error::Config(format!(
                "ε grid from {} to {} has fewer than 5 dyadic points",
                self.eps_hi, self.eps_lo
            )));
        }
        Ok(())
    }

    /// `eps_hi, eps_hi/2, …` down to `eps_lo`.
    pub fn eps_grid(&self) -> Result<Vec<f64>> {
        if !(self.eps_lo > 0.0 && self.eps_lo <= self.eps_hi) {
            return Err(Error::Config(format!(
                "need 0 < eps_lo <= eps_hi, got {} and {}",
                self.eps_lo, self.eps_hi
            )));
        }
        let mut out = Vec::new();
        let mut eps = self.eps_hi;
        while eps >= self.eps_lo * (1.0 - 1e-12) {
            out.push(eps);
            eps *= 0.5;
        }
        Ok(out)
    }

    pub fn reaction(&self) -> Reaction {
        match self.reaction {
            ReactionKind::Cubic => Reaction::Cubic,
            ReactionKind::Linear => Reaction::Linear {
                slope: self.linear_slope,
            },
        }
    }

    pub fn execution(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
