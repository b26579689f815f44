//! `domes`: reduce integral curves to rhombi, validate ledgers, run moduli
//! certificates and collect reduction statistics.
//!
//! Exit codes: 0 success, 1 semantic failure, 2 input or usage error.

mod census;

use clap::{Args, Parser, Subcommand};
use domes_core::cobordism::{plane_choices, pentagon_splitters, steinitz_strategies, Reducer};
use domes_core::geom::Tolerance;
use domes_core::io::{CurveFile, LedgerFile};
use domes_core::moduli::{certificates, CertificateConfig, ModuliError, Target};
use domes_core::surface::{validate_ledger, DomeChain, LedgerReport, SurfaceError};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad input, unreadable files, unknown names.
    Input(String),
    /// The input was fine but a check or certificate failed.
    Semantic(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Semantic(m) => m,
        }
    }
}

pub type Outcome = Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "domes", version, about = "Rhombus cobordisms of integral curves and dome moduli certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct TolArgs {
    /// Geometric tolerance for unit-length and coincidence tests.
    #[arg(long = "tol", default_value_t = 1e-9)]
    geom_eps: f64,
    /// Relative singular-value threshold for numerical rank.
    #[arg(long, default_value_t = 1e-7)]
    rank_eps: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance, Failure> {
        Tolerance::new(self.geom_eps, self.rank_eps).map_err(|e| Failure::Input(e.to_string()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a curve file to rhombi and write the ledger.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accepted for a uniform interface; the reduction is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the dome cells as an OFF mesh.
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        steinitz: String,
        #[arg(long, default_value = "least-squares")]
        plane: String,
        #[arg(long, default_value = "rotating")]
        split: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Replay and check a ledger file.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run a moduli certificate (dims, kernel, isotropy, rank) and print a JSON report.
    Moduli {
        certificate: String,
        /// Catalog surface `NAME[:k=K]` or `polygon:k=K[:copies=C]`.
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Reduce random curves and write one CSV row per instance.
    Census(census::CensusArgs),
    /// List the registered strategies and catalog surfaces.
    List,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_report(report: &LedgerReport) {
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
}

fn reduce(
    input: &Path,
    out: &Path,
    off: Option<&Path>,
    steinitz: &str,
    plane: &str,
    split: &str,
    tol: TolArgs,
) -> Outcome {
    let tol = tol.tolerance()?;
    let curve = CurveFile::parse(&read(input)?)
        .and_then(|f| f.to_curve(&tol))
        .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let reducer = Reducer::with_names(tol, steinitz, plane, split).map_err(|e| Failure::Input(e.to_string()))?;
    let ledger = reducer.reduce(&curve).map_err(|e| Failure::Semantic(format!("reduction failed: {e}")))?;
    write(out, &LedgerFile::from_ledger(&ledger).to_json())?;
    if let Some(off) = off {
        write(off, &DomeChain::from_ledger_cells(&ledger).to_off(&tol))?;
    }
    let report = validate_ledger(&ledger, &tol);
    if !report.passed() {
        print_report(&report);
        return Err(Failure::Semantic("ledger failed validation".into()));
    }
    eprintln!("n = {}, k = {} (budget {})", ledger.n(), ledger.k(), ledger.budget());
    Ok(())
}

fn validate(input: &Path, tol: TolArgs) -> Outcome {
    let tol = tol.tolerance()?;
    let file = LedgerFile::parse(&read(input)?).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let ledger = file.to_ledger();
    let report = validate_ledger(&ledger, &tol);
    print_report(&report);
    let stats_ok = file.stats.n == ledger.n() && file.stats.k == ledger.k() && file.stats.budget == ledger.budget();
    eprintln!(
        "{} stats: recorded n={} k={} budget={}",
        if stats_ok { "ok  " } else { "FAIL" },
        file.stats.n,
        file.stats.k,
        file.stats.budget
    );
    if report.passed() && stats_ok {
        Ok(())
    } else {
        Err(Failure::Semantic("ledger failed validation".into()))
    }
}

fn moduli_failure(e: ModuliError) -> Failure {
    match e {
        ModuliError::BadTarget(_) | ModuliError::Surface(SurfaceError::UnknownName(_) | SurfaceError::BadSpec(_)) => {
            Failure::Input(e.to_string())
        }
        other => Failure::Semantic(other.to_string()),
    }
}

fn moduli(name: &str, surface: &str, seed: u64, trials: usize, out: Option<&Path>, tol: TolArgs) -> Outcome {
    let tol = tol.tolerance()?;
    let cert = certificates().get(name).map_err(|e| Failure::Input(e.to_string()))?;
    let target = Target::parse(surface).map_err(moduli_failure)?;
    let report = cert.run(&target, &CertificateConfig { seed, trials, tol }).map_err(moduli_failure)?;
    let text = serde_json::to_string_pretty(&report).expect("plain data") + "\n";
    match out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Semantic(format!("{name} certificate failed on {surface}")))
    }
}

fn list() -> Outcome {
    println!("steinitz: {}", steinitz_strategies().names().join(", "));
    println!("plane: {}", plane_choices().names().join(", "));
    println!("split: {}", pentagon_splitters().names().join(", "));
    println!("certificates: {}", certificates().names().join(", "));
    println!("surfaces: {}", domes_core::surface::surface_catalog().names().join(", "));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reduce {
            input,
            out,
            seed: _,
            off,
            steinitz,
            plane,
            split,
            tol,
        } => reduce(&input, &out, off.as_deref(), &steinitz, &plane, &split, tol),
        Command::Validate { input, tol } => validate(&input, tol),
        Command::Moduli {
            certificate,
            surface,
            seed,
            trials,
            out,
            tol,
        } => moduli(&certificate, &surface, seed, trials, out.as_deref(), tol),
        Command::Census(args) => census::run(&args),
        Command::List => list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
