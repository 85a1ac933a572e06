use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use largediff::harness::{
    report, sweep_all, FamilyKind, Outcome, Quantity, RunConfig, EXIT_CONFIG, EXIT_FAIL,
};
use largediff::Error;

#[derive(Parser)]
#[command(name = "largediff", version, about = "Rate sweeps for reaction-diffusion problems with large diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolvent gap against the averaged limit.
    ResolventRate(Common),
    /// Spectral gap, slow projection and first eigenspace.
    Spectrum(Common),
    /// Distance of the discrete equilibria to the limit roots.
    Equilibria(Common),
    /// Size of the slow invariant manifold, with invariance and attraction checks.
    Manifold(Common),
    /// Hausdorff distance of the attractors.
    AttractorRate(Common),
    /// Growth of the energy to H1 norm ratio.
    NormRatio(Common),
    /// Every quantity.
    ReportAll(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    eps_hi: Option<f64>,
    #[arg(long)]
    eps_lo: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = ["f1", "f2", "const"])]
    family: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(v) = self.eps_hi {
            cfg.eps_hi = v;
        }
        if let Some(v) = self.eps_lo {
            cfg.eps_lo = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(f) = &self.family {
            cfg.family = f.parse::<FamilyKind>()?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Errors caused by the configuration rather than by a failed criterion.
fn is_setup_error(e: &Error) -> bool {
    match e {
        Error::Config(_) | Error::Io(_) | Error::CoefficientFloor(_) => true,
        Error::Sweep { source, .. } => is_setup_error(source),
        _ => false,
    }
}

fn run(common: &Common, quantities: &[Quantity]) -> i32 {
    let cfg = match common.config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let series = match sweep_all(&cfg, quantities, cfg.execution()) {
        Ok(s) => s,
        Err(e) if is_setup_error(&e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("sweep failed: {e}");
            return EXIT_FAIL;
        }
    };
    let outcomes: Vec<Outcome> = quantities
        .iter()
        .zip(series)
        .map(|(&q, s)| Outcome::judge(q, s, &cfg))
        .collect();
    for o in &outcomes {
        println!("{}", o.summary_line());
    }
    match report(&outcomes, &cfg.out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::ResolventRate(c) => run(c, &[Quantity::Resolvent]),
        Command::Spectrum(c) => run(c, &[Quantity::SpectrumGap, Quantity::Projection, Quantity::Eigenspace]),
        Command::Equilibria(c) => run(c, &[Quantity::Equilibria]),
        Command::Manifold(c) => run(c, &[Quantity::Manifold]),
        Command::AttractorRate(c) => run(c, &[Quantity::Attractor]),
        Command::NormRatio(c) => run(c, &[Quantity::NormRatio]),
        Command::ReportAll(c) => run(c, &Quantity::ALL),
    };
    ExitCode::from(code as u8)
}
