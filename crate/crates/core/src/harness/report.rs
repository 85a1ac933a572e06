use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::RunConfig;
use super::fit::{fit_rate, FitResult, RateSeries};
use super::sweep::{Quantity, INFORMATIONAL};
use crate::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// A swept quantity with its fit and verdict.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub quantity: Quantity,
    pub series: RateSeries,
    pub fit: Option<FitResult>,
    pub pass: bool,
    /// Reason for a failure, or a remark on a pass without a fit.
    pub note: String,
}

/// Below this level across the whole sweep a quantity counts as identically
/// zero (the constant-coefficient control) and its fit is only noise.
const VANISHING: f64 = 1e-6;

fn max_error(series: &RateSeries) -> f64 {
    series.rows.iter().map(|r| r.error).fold(0.0, f64::max)
}

fn vanishes(series: &RateSeries) -> bool {
    !series.rows.is_empty() && max_error(series) <= VANISHING
}

fn failing_flags(q: Quantity, series: &RateSeries) -> Vec<String> {
    let limit = q.flags_checked_below();
    let mut out: Vec<String> = series
        .rows
        .iter()
        .filter(|r| r.eps <= limit * (1.0 + 1e-12))
        .flat_map(|r| r.flags.iter())
        .filter(|f| !INFORMATIONAL.contains(&f.as_str()))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

impl Outcome {
    /// Applies the pass criterion of `q` to a series.
    pub fn judge(q: Quantity, series: RateSeries, cfg: &RunConfig) -> Self {
        let mut notes: Vec<String> = Vec::new();
        let (fit, mut pass) = match q {
            Quantity::NormRatio => {
                let fit = fit_rate(&series, f64::NEG_INFINITY).ok();
                let pairs: Vec<f64> = series
                    .rows
                    .windows(2)
                    .filter(|w| w[0].eps <= 1.0 / 16.0 * (1.0 + 1e-12))
                    .map(|w| w[1].error / w[0].error)
                    .collect();
                let worst = pairs.iter().copied().fold(f64::INFINITY, f64::min);
                let ok = !pairs.is_empty() && worst >= 1.5;
                if !ok {
                    notes.push(format!("smallest growth factor {worst:.4}"));
                }
                (fit, ok)
            }
            Quantity::SpectrumGap => {
                let fit = fit_rate(&series, f64::NEG_INFINITY).ok();
                let pi2 = PI * PI;
                let last = series.rows.last().map_or(f64::NAN, |r| r.error);
                let ok = (last / pi2 - 1.0).abs() <= 0.02;
                if !ok {
                    notes.push(format!("final ratio {last:.6} not within 2% of pi^2"));
                }
                (fit, ok)
            }
            _ if vanishes(&series) => {
                notes.push(format!("vanishes, max error {:.3e}", max_error(&series)));
                (None, true)
            }
            _ => match fit_rate(&series, cfg.slope_floor) {
                Ok(fit) => {
                    let mut ok = fit.pass;
                    if !ok {
                        notes.push(format!("slope {:.4} below {}", fit.slope, cfg.slope_floor));
                    }
                    if q == Quantity::Resolvent && fit.r2 < cfg.r2_floor {
                        ok = false;
                        notes.push(format!("R2 {:.4} below {}", fit.r2, cfg.r2_floor));
                    }
                    (Some(fit), ok)
                }
                Err(e) => {
                    notes.push(e.to_string());
                    (None, false)
                }
            },
        };
        let bad = failing_flags(q, &series);
        if !bad.is_empty() {
            pass = false;
            notes.push(format!("flags {}", bad.join("|")));
        }
        Self {
            quantity: q,
            series,
            fit,
            pass,
            note: notes.join("; "),
        }
    }

    pub fn summary_line(&self) -> String {
        let (a, c, r2) = self
            .fit
            .map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.c(), f.r2));
        let mut line = format!(
            "{} alpha={a:.6} C={c:.6e} R2={r2:.6} pass={}",
            self.quantity.name(),
            self.pass
        );
        if !self.note.is_empty() {
            let _ = write!(line, " note=\"{}\"", self.note);
        }
        line
    }
}

/// `eps,delta,error,flag` with 17 significant digits.
pub fn write_csv(series: &RateSeries, path: &Path) -> Result<()> {
    let mut out = String::from("eps,delta,error,flag\n");
    for r in &series.rows {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{}", r.eps, r.delta, r.error, r.flag_text());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes one CSV per quantity plus `summary.txt` and returns the exit code.
pub fn report(outcomes: &[Outcome], dir: &Path) -> Result<i32> {
    if outcomes.is_empty() {
        return Err(Error::Config("no quantities to report".into()));
    }
    fs::create_dir_all(dir)?;
    let mut summary = String::new();
    for o in outcomes {
        write_csv(&o.series, &dir.join(format!("{}.csv", o.quantity.name())))?;
        summary.push_str(&o.summary_line());
        summary.push('\n');
    }
    fs::write(dir.join("summary.txt"), summary)?;
    Ok(if outcomes.iter().all(|o| o.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fit::RateRow;

    fn series(name: &str, f: impl Fn(f64) -> f64) -> RateSeries {
        RateSeries {
            quantity: name.into(),
            rows: (2..=8)
                .map(|k| {
                    let eps = 0.5f64.powi(k);
                    let delta = eps + eps.sqrt();
                    RateRow {
                        eps,
                        delta,
                        error: f(delta),
                        flags: vec![],
                    }
                })
                .collect(),
        }
    }

    fn tmp(name: &str) -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("largediff-report-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        let cfg = RunConfig::default();
        let good = Outcome::judge(Quantity::Resolvent, series("resolvent", |d| d), &cfg);
        let bad = Outcome::judge(Quantity::Manifold, series("manifold", |d| d.sqrt()), &cfg);
        assert!(good.pass && !bad.pass);
        let dir = tmp("codes");
        assert_eq!(report(std::slice::from_ref(&good), &dir).unwrap(), EXIT_PASS);
        assert_eq!(report(&[good, bad], &dir).unwrap(), EXIT_FAIL);
        let summary = fs::read_to_string(dir.join("summary.txt")).unwrap();
        assert!(summary.lines().any(|l| l.starts_with("manifold") && l.contains("pass=false")));
        let csv = fs::read_to_string(dir.join("resolvent.csv")).unwrap();
        assert!(csv.starts_with("eps,delta,error,flag\n2.5000000000000000e-1,"));
        assert!(matches!(report(&[], &dir), Err(Error::Config(_))));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn failing_flags_fail_the_quantity() {
        let cfg = RunConfig::default();
        let mut s = series("manifold", |d| d);
        s.rows[0].flags.push("contraction".into());
        assert!(Outcome::judge(Quantity::Manifold, s.clone(), &cfg).pass);
        s.rows[5].flags.push("clamped".into());
        assert!(Outcome::judge(Quantity::Manifold, s.clone(), &cfg).pass);
        s.rows[5].flags.push("invariance".into());
        assert!(!Outcome::judge(Quantity::Manifold, s, &cfg).pass);
    }

    #[test]
    fn vanishing_control_passes_without_fit() {
        let cfg = RunConfig::default();
        let o = Outcome::judge(Quantity::Attractor, series("attractor", |_| 1e-15), &cfg);
        assert!(o.pass && o.fit.is_none());
    }
}
