//! ε-families, sweeps over dyadic ε grids, log-log rate fits, run
//! configuration and report emission.

mod config;
mod family;
mod fit;
mod report;
mod sweep;

pub use config::{ReactionKind, RunConfig};
pub use family::{FamilyKind, ScaleFamily};
pub use fit::{fit_rate, FitResult, RateRow, RateSeries};
pub use report::{report, write_csv, Outcome, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
pub use sweep::{evaluate, sweep, sweep_all, Quantity};
