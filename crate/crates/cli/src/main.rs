use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use sinegordon_cli::{run, Settings};

const FORMATS: &str = "\
Outputs (one directory per run, indexed by report.json):
  CSV files start with '#' lines holding the tool version, config hash and
  resolved config, then a header row.
  spectrum.csv    index,re,im[,label_re,label_im]   (labels: two-site translation eigenvalue)
  operator.csv    row,col,re,im                     (nonzero matrix elements; basis in operator.json)
  roots.csv       index,quantum_number,rapidity
  dispersion.csv  rapidity,energy,momentum,source   (physical units; source FiniteLattice|Continuum|Relativistic)
  vacuum.csv      theta,h,integral,residue_series,pole_term,singular
  series.csv      theta,h,value,provenance
  singular.csv    theta,h,value,provenance          (background-subtracted energy)
  plot.csv        x,y,fit                           (x = h = exp(-theta))
Exit status: 0 if every check passes, 1 if a check fails, 2 on error.";

#[derive(Parser, Debug)]
#[command(name = "sglab", version, about = "Lattice Sine-Gordon runs from the alternating six-vertex chain", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Flat key = value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the invariant suites (Yang-Baxter, commutation, Hamiltonians, decoupling, Bethe vs exact).
    Check,
    /// Diagonalize one magnetization sector.
    Diag,
    /// Solve the Bethe equations for the ground state of a sector.
    Bethe,
    /// Hole dispersion on a finite chain against the continuum curve.
    Dispersion,
    /// Vacuum-energy integral over the theta grid.
    Vacuum,
    /// Mass or vacuum-energy scan over the theta grid with a power-law fit.
    Scan,
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Number of sites (even).
    #[arg(long = "L", global = true)]
    sites: Option<String>,
    /// Number of up spins.
    #[arg(long = "M", global = true)]
    magnetization: Option<String>,
    /// Comma list or start:stop:count.
    #[arg(long, global = true)]
    theta_grid: Option<String>,
    #[arg(long, global = true)]
    eta_grid: Option<String>,
    #[arg(long = "L-grid", global = true)]
    sites_grid: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Run directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, global = true)]
    workers: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// mass | energy
    #[arg(long, global = true)]
    observable: Option<String>,
    /// bethe | continuum
    #[arg(long, global = true)]
    source: Option<String>,
    /// logderiv | local
    #[arg(long, global = true)]
    convention: Option<String>,
    #[arg(long, global = true)]
    dim_cap: Option<String>,
    #[arg(long, global = true)]
    levels: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    dump_operator: bool,
}

fn settings(cli: &Cli) -> anyhow::Result<Settings> {
    let base = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let mut over = Settings::default();
    let command = match cli.command {
        Cmd::Check => "check",
        Cmd::Diag => "diag",
        Cmd::Bethe => "bethe",
        Cmd::Dispersion => "dispersion",
        Cmd::Vacuum => "vacuum",
        Cmd::Scan => "scan",
    };
    over.set("command", command)?;
    let f = &cli.flags;
    let pairs = [
        ("eta", &f.eta),
        ("theta", &f.theta),
        ("L", &f.sites),
        ("M", &f.magnetization),
        ("theta_grid", &f.theta_grid),
        ("eta_grid", &f.eta_grid),
        ("L_grid", &f.sites_grid),
        ("tol", &f.tol),
        ("out", &f.out),
        ("workers", &f.workers),
        ("seed", &f.seed),
        ("observable", &f.observable),
        ("source", &f.source),
        ("convention", &f.convention),
        ("dim_cap", &f.dim_cap),
        ("levels", &f.levels),
        ("samples", &f.samples),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            over.set(k, v)?;
        }
    }
    if f.dump_operator {
        over.set("dump_operator", "true")?;
    }
    Ok(base.merge(over))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = settings(&cli)
        .and_then(|s| s.resolve())
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            for c in &report.checks {
                println!(
                    "{:<28} {}  residual {:.3e}  tol {:.0e}",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.residual,
                    c.tolerance
                );
            }
            println!("config hash {}", report.provenance.config_hash);
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
