//! Random-curve census: one reduction per instance, in parallel.

use crate::{Failure, Outcome};
use clap::Args;
use domes_core::cobordism::{rhombus_budget, CobordismLedger, Reducer};
use domes_core::curve::{random_closed_curve, regular_polygon, IntegralCurve};
use domes_core::geom::Tolerance;
use domes_core::surface::validate_ledger;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

pub const CSV_VERSION: u32 = 1;

#[derive(Args, Debug, Clone)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 6)]
    n_min: usize,
    #[arg(long, default_value_t = 24)]
    n_max: usize,
    /// Instances per edge count.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Prepend a row for the regular unit pentagon.
    #[arg(long)]
    fixture: bool,
    #[arg(long = "tol", default_value_t = 1e-9)]
    geom_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub budget: usize,
    pub planarize: usize,
    pub pack: usize,
    pub splits: usize,
    pub fixes: usize,
    /// Empty for fixture rows.
    pub seed: Option<u64>,
}

const HEADER: [&str; 9] = ["version", "n", "k", "budget", "planarize", "pack", "splits", "fixes", "seed"];

/// Seed of instance `i`, independent of scheduling.
fn instance_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add(1)
}

fn row(ledger: &CobordismLedger, seed: Option<u64>) -> CensusRow {
    let c = &ledger.components[0];
    CensusRow {
        version: CSV_VERSION,
        n: ledger.n(),
        k: ledger.k(),
        budget: ledger.budget(),
        planarize: c.planarize_moves,
        pack: c.pack_moves,
        splits: c.splits,
        fixes: c.fix_pivots,
        seed,
    }
}

fn instance(curve: &IntegralCurve, seed: Option<u64>, tol: &Tolerance) -> Result<CensusRow, String> {
    let ledger = Reducer::new(*tol).reduce(curve).map_err(|e| e.to_string())?;
    let report = validate_ledger(&ledger, tol);
    if let Some(bad) = report.failures().next() {
        return Err(format!("check {} failed: {}", bad.name, bad.detail));
    }
    if ledger.k() > rhombus_budget(curve.len()) {
        return Err(format!("k = {} exceeds the budget {}", ledger.k(), rhombus_budget(curve.len())));
    }
    Ok(row(&ledger, seed))
}

pub fn run(args: &CensusArgs) -> Outcome {
    if args.n_min < 5 || args.n_max < args.n_min {
        return Err(Failure::Input(format!("need 5 <= n-min <= n-max, got {}..={}", args.n_min, args.n_max)));
    }
    let tol = Tolerance::default().with_geom_eps(args.geom_eps).map_err(|e| Failure::Input(e.to_string()))?;
    let jobs: Vec<(usize, u64)> = (args.n_min..=args.n_max)
        .flat_map(|n| std::iter::repeat_n(n, args.samples))
        .enumerate()
        .map(|(i, n)| (n, instance_seed(args.seed, i)))
        .collect();
    let mut results: Vec<Result<CensusRow, String>> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let curve = IntegralCurve::new(vec![random_closed_curve(n, &mut rng)], &tol).map_err(|e| e.to_string())?;
            instance(&curve, Some(seed), &tol).map_err(|e| format!("n = {n}, seed = {seed}: {e}"))
        })
        .collect();
    if args.fixture {
        let pentagon = IntegralCurve::new(vec![regular_polygon(5)], &tol).expect("regular pentagon has unit edges");
        results.insert(0, instance(&pentagon, None, &tol).map_err(|e| format!("pentagon fixture: {e}")));
    }

    let sink: Box<dyn Write> = match &args.csv {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    let io = |e: csv::Error| Failure::Input(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => w.serialize(row).map_err(io)?,
            Err(e) => failures.push(e),
        }
    }
    w.flush().map_err(|e| Failure::Input(e.to_string()))?;
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(Failure::Semantic(format!("{} instances failed; first: {first}", failures.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| instance_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(instance_seed(7, 0), instance_seed(8, 0));
    }

    #[test]
    fn pentagon_fixture_row() {
        let tol = Tolerance::default();
        let c = IntegralCurve::new(vec![regular_polygon(5)], &tol).unwrap();
        let r = instance(&c, None, &tol).unwrap();
        assert_eq!((r.n, r.k, r.budget, r.splits, r.fixes), (5, 2, 23, 1, 0));
    }
}
