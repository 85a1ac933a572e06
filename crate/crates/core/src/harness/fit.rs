use crate::{Error, Result};

/// Errors at or below this level are treated as solver noise and excluded
/// from rate fits.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub eps: f64,
    /// `τ(ε) + p(ε)^{-1/2}`.
    pub delta: f64,
    pub error: f64,
    /// Diagnostic flags raised while computing the row.
    pub flags: Vec<String>,
}

impl RateRow {
    pub fn flag_text(&self) -> String {
        if self.flags.is_empty() {
            "ok".into()
        } else {
            self.flags.join("|")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub quantity: String,
    pub rows: Vec<RateRow>,
}

impl RateSeries {
    pub fn validate(&self) -> Result<()> {
        if self.rows.windows(2).any(|w| !(w[1].eps < w[0].eps)) {
            return Err(Error::Invariant(format!("{}: ε must strictly decrease", self.quantity)));
        }
        for r in &self.rows {
            for x in [r.eps, r.delta, r.error] {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(Error::Invariant(format!(
                        "{}: non-finite or negative entry {x} at ε = {}",
                        self.quantity, r.eps
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub log_c: f64,
    pub r2: f64,
    pub usable: usize,
    pub pass: bool,
}

impl FitResult {
    pub fn c(&self) -> f64 {
        self.log_c.exp()
    }
}

/// Least squares on `(log δ, log E)` over rows with `E > 1e-13`.
pub fn fit_rate(series: &RateSeries, slope_floor: f64) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = series
        .rows
        .iter()
        .filter(|r| r.error > NOISE_FLOOR && r.delta > 0.0 && r.error.is_finite())
        .map(|r| (r.delta.ln(), r.error.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData {
            usable: pts.len(),
            needed: 4,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all δ values coincide".into()));
    }
    let slope = sxy / sxx;
    let log_c = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - log_c - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(FitResult {
        slope,
        log_c,
        r2,
        usable: pts.len(),
        pass: slope >= slope_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(f: impl Fn(f64, usize) -> f64) -> RateSeries {
        let rows = (2..=10)
            .enumerate()
            .map(|(i, k)| {
                let eps = 0.5f64.powi(k);
                let delta = eps + eps.sqrt();
                RateRow {
                    eps,
                    delta,
                    error: f(delta, i),
                    flags: vec![],
                }
            })
            .collect();
        RateSeries {
            quantity: "synthetic".into(),
            rows,
        }
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_rate(&synthetic(|d, _| 2.0 * d), 0.9).unwrap();
        assert!((fit.slope - 1.0).abs() <= 1e-10);
        assert!((fit.c() - 2.0).abs() <= 1e-10);
        assert!(fit.pass);
        let fit = fit_rate(&synthetic(|d, _| 3.0 * d * d), 0.9).unwrap();
        assert!((fit.slope - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn alternating_noise() {
        let fit = fit_rate(&synthetic(|d, i| d * (1.0 + 0.05 * if i % 2 == 0 { 1.0 } else { -1.0 })), 0.9).unwrap();
        assert!((0.9..=1.1).contains(&fit.slope));
    }

    #[test]
    fn noise_rows_are_dropped() {
        let series = synthetic(|d, i| if i < 6 { d } else { 1e-15 });
        let fit = fit_rate(&series, 0.9).unwrap();
        assert_eq!(fit.usable, 6);
        let series = synthetic(|d, i| if i < 3 { d } else { 0.0 });
        assert!(matches!(fit_rate(&series, 0.9), Err(Error::InsufficientData { usable: 3, .. })));
    }

    proptest! {
        #[test]
        fn recovers_any_power_law(alpha in 0.2f64..3.0, c in 0.01f64..100.0) {
            let fit = fit_rate(&synthetic(|d, _| c * d.powf(alpha)), 0.0).unwrap();
            prop_assert!((fit.slope - alpha).abs() <= 1e-9);
            prop_assert!((fit.c() / c - 1.0).abs() <= 1e-8);
            prop_assert!(fit.r2 > 1.0 - 1e-12);
        }
    }
}
