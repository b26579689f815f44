//! One pass/fail line per acceptance criterion. Exits non-zero if any fails.

use domes_core::cobordism::{
    pack_component, pair_budget, pentagon_split, planarize_component, reduce_to_rhombi, rhombus_budget, AutoOrder,
    CobordismLedger, LeastSquaresPlane, STEINITZ_BOUND,
};
use domes_core::curve::{
    best_fit_plane, max_distance_from, planarity_residual, random_closed_curve, regular_polygon, IntegralCurve,
};
use domes_core::geom::{Tolerance, Vec3};
use domes_core::moduli::{
    constraint_jacobian, d_delta, kernel_angle, max_residual, polygon_tangent_basis, polyhedron_realization,
    polyhedron_tangent_basis, so3_orbit_tangent, Certificate, CertificateConfig, IsotropyCertificate,
    PolygonRealization, PolyhedronRealization, RankCertificate, Target, ISOTROPY_RATIO, KERNEL_ANGLE, RANK_GAP,
};
use domes_core::surface::{catalog, hexagon_join, ledger_chain_defect, rhombus_pair_for_join, validate_ledger};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const CORPUS_SEED: u64 = 20_240_601;
const CORPUS_SIZE: usize = 100;
const N_RANGE: std::ops::RangeInclusive<usize> = 6..=24;
const REDUCE_TIME_LIMIT: Duration = Duration::from_secs(10);
const PLANAR_RESIDUAL: f64 = 1e-9;
const PACK_SLACK: f64 = 1e-9;
const APEX_TOL: f64 = 1e-6;
const MODULI_TRIALS: usize = 20;
const COLLAPSE_TRIALS: usize = 10;
const COLLAPSE_TOL: f64 = 1e-10;
const HEXAGON_TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn corpus() -> Vec<IntegralCurve> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let span = N_RANGE.end() - N_RANGE.start() + 1;
    (0..CORPUS_SIZE)
        .map(|i| {
            let n = N_RANGE.start() + i % span;
            IntegralCurve::new(vec![random_closed_curve(n, &mut rng)], &tol).expect("generator makes unit curves")
        })
        .collect()
}

fn end_to_end(curves: &[IntegralCurve], ledgers: &mut Vec<CobordismLedger>) -> Outcome {
    let tol = Tolerance::default();
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (i, c) in curves.iter().enumerate() {
        match reduce_to_rhombi(c, &tol) {
            Ok(l) => {
                let report = validate_ledger(&l, &tol);
                let budget = rhombus_budget(c.len());
                worst = worst.max(l.k() as f64 / budget as f64);
                if !report.passed() || l.k() > budget {
                    bad.push(format!("#{i} (n={}, k={}, checks ok={})", c.len(), l.k(), report.passed()));
                }
                ledgers.push(l);
            }
            Err(e) => bad.push(format!("#{i}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed <= REDUCE_TIME_LIMIT,
        format!(
            "{} curves, n in {}..={}, max k/budget {worst:.3}, {:.2?} (limit {REDUCE_TIME_LIMIT:?}), failures {bad:?}",
            curves.len(),
            N_RANGE.start(),
            N_RANGE.end(),
            elapsed
        ),
    )
}

fn planarize_and_pack(curves: &[IntegralCurve]) -> (Outcome, Outcome) {
    let tol = Tolerance::default();
    let (mut plan_bad, mut pack_bad) = (Vec::new(), Vec::new());
    let (mut worst_res, mut worst_dist, mut worst_prefix) = (0.0f64, 0.0f64, 0.0f64);
    for (i, c) in curves.iter().enumerate() {
        let mut pts = c.components()[0].clone();
        let n = pts.len();
        let moves = match planarize_component(&mut pts, 0, &LeastSquaresPlane, &tol) {
            Ok(m) => m,
            Err(e) => {
                plan_bad.push(format!("#{i}: {e}"));
                continue;
            }
        };
        let res = planarity_residual(&pts, &best_fit_plane(&pts));
        worst_res = worst_res.max(res);
        if res > PLANAR_RESIDUAL || moves.len() > pair_budget(n) {
            plan_bad.push(format!("#{i}: residual {res:.2e}, moves {}/{}", moves.len(), pair_budget(n)));
        }
        match pack_component(&mut pts, 0, &AutoOrder, &tol) {
            Ok(p) => {
                let dist = max_distance_from(&pts, 0);
                worst_dist = worst_dist.max(dist);
                worst_prefix = worst_prefix.max(p.max_prefix_norm);
                if dist > STEINITZ_BOUND + PACK_SLACK
                    || p.max_prefix_norm > STEINITZ_BOUND + PACK_SLACK
                    || p.moves.len() > pair_budget(n)
                {
                    pack_bad.push(format!("#{i}: dist {dist}, prefix {}, moves {}", p.max_prefix_norm, p.moves.len()));
                }
            }
            Err(e) => pack_bad.push(format!("#{i}: {e}")),
        }
    }
    (
        outcome(
            plan_bad.is_empty(),
            format!("max residual {worst_res:.2e} (limit {PLANAR_RESIDUAL:e}), failures {plan_bad:?}"),
        ),
        outcome(
            pack_bad.is_empty(),
            format!("max distance {worst_dist:.6}, max prefix norm {worst_prefix:.6} (limit 2+{PACK_SLACK:e}), failures {pack_bad:?}"),
        ),
    )
}

fn regular_pentagon() -> Outcome {
    let tol = Tolerance::default();
    let pent = regular_polygon(5);
    let (split, pts) = match pentagon_split(&pent, &tol) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    // circumradius of the unit regular pentagon, which also circumscribes v1 v3 v4
    let r = 1.0 / (2.0 * 36f64.to_radians().sin());
    let oracle = (1.0 - r * r).sqrt();
    let v = |k: usize| pts[(split.rotation + k) % 5];
    let (a, c, d) = (v(0), v(2), v(3));
    let normal = (c - a).cross(&(d - a)).normalize();
    let height = (split.apex - a).dot(&normal).abs();
    let k = reduce_to_rhombi(&IntegralCurve::new(vec![pent], &tol).unwrap(), &tol).map(|l| l.k());
    let ok = split.fixes.is_empty() && (height - oracle).abs() <= APEX_TOL && k == Ok(2);
    outcome(
        ok,
        format!(
            "2 rhombi, 1 face, fixes {}, apex height {height:.6} vs oracle {oracle:.6}, reduced k = {k:?}",
            split.fixes.len()
        ),
    )
}

fn chain_identity(ledgers: &[CobordismLedger]) -> Outcome {
    let tol = Tolerance::default();
    let mut extra = Vec::new();
    let mixed = IntegralCurve::new(vec![regular_polygon(3), regular_polygon(4), regular_polygon(5), regular_polygon(9)], &tol)
        .unwrap();
    extra.push(reduce_to_rhombi(&mixed, &tol).expect("mixed curve reduces"));
    let bad: Vec<usize> = ledgers
        .iter()
        .chain(&extra)
        .enumerate()
        .filter(|(_, l)| !ledger_chain_defect(l, &tol).is_zero())
        .map(|(i, _)| i)
        .collect();
    outcome(bad.is_empty(), format!("{} ledgers, non-zero defect in {bad:?}", ledgers.len() + extra.len()))
}

fn tangent_dimensions() -> Outcome {
    let tol = Tolerance::default();
    let mut bad = Vec::new();
    for k in 3..=8 {
        for seed in 0..MODULI_TRIALS as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = PolygonRealization::random(&[k], &mut rng);
            let d = polygon_tangent_basis(&p, &tol).ncols();
            if d != 2 * k - 3 {
                bad.push(format!("k={k} seed={seed}: {d}"));
            }
        }
    }
    let e = Vec3::x();
    let flat = PolygonRealization::new(vec![vec![e, -e, e, -e]]);
    let flat_dim = polygon_tangent_basis(&flat, &tol).ncols();
    let tri = PolygonRealization::from_cycles(&[regular_polygon(3)]);
    let tri_moduli = polygon_tangent_basis(&tri, &tol).ncols() as i64 - so3_orbit_tangent(&tri, &tol).ncols() as i64;
    outcome(
        bad.is_empty() && flat_dim == 6 && tri_moduli == 0,
        format!("generic 2k-3 for k=3..8 x {MODULI_TRIALS}, mismatches {bad:?}; parallel 4-gon {flat_dim}; triangle moduli {tri_moduli}"),
    )
}

fn kernel_of_form() -> Outcome {
    let tol = Tolerance::default();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (label, ks) in [("one", vec![5]), ("two", vec![4, 6])] {
        for seed in 0..MODULI_TRIALS as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let p = PolygonRealization::random(&ks, &mut rng);
            let (kd, od, angle) = kernel_angle(&p, &tol);
            worst = worst.max(angle);
            if kd != od || angle > KERNEL_ANGLE {
                bad.push(format!("{label} seed={seed}: dims {kd}/{od}, angle {angle:.2e}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("max principal angle {worst:.2e} (limit {KERNEL_ANGLE:e}), failures {bad:?}"))
}

fn isotropy() -> Outcome {
    let cfg = CertificateConfig { seed: 7, trials: MODULI_TRIALS, ..Default::default() };
    let mut parts = Vec::new();
    let mut ok = true;
    for spec in ["antiprism_band:k=4", "antiprism_band:k=5", "antiprism_band:k=6", "pentagon_pants"] {
        match Target::parse(spec).and_then(|t| IsotropyCertificate.run(&t, &cfg)) {
            Ok(r) => {
                ok &= r.passed;
                parts.push(format!("{spec} {:.1e}", r.details["max_ratio"].as_f64().unwrap_or(f64::NAN)));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{spec}: {e}"));
            }
        }
    }
    outcome(ok, format!("max ratio per surface (limit {ISOTROPY_RATIO:e}): {}", parts.join(", ")))
}

fn rank() -> Outcome {
    let cfg = CertificateConfig { seed: 11, trials: MODULI_TRIALS, ..Default::default() };
    match Target::parse("three_rhombus_pants").and_then(|t| RankCertificate.run(&t, &cfg)) {
        Ok(r) => outcome(
            r.passed,
            format!(
                "rank mod orbits {}, projected rank {} (bound 3 < 4), min gap {} (need {RANK_GAP}x)",
                r.details["rank_moduli"], r.details["rank_projected"], r.details["min_gap_ratio"]
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn collapse_restriction() -> Outcome {
    let tol = Tolerance::default();
    let c = catalog("antiprism_band:k=4").unwrap();
    let s = &c.surface;
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut bad = Vec::new();
    for seed in 0..COLLAPSE_TRIALS as u64 {
        let q = match polyhedron_realization(&c, Some(seed), &tol) {
            Ok(q) => q,
            Err(e) => return outcome(false, e.to_string()),
        };
        let basis = polyhedron_tangent_basis(s, &q, &tol).unwrap();
        for (t, g) in s.collapsible() {
            let (s2, map) = s.collapse_with_map(t, g).unwrap();
            let q2 = q.restrict(&map);
            let mut err = max_residual(&s2, &q2).unwrap();
            let jac = constraint_jacobian(&s2, &q2).unwrap();
            for j in 0..basis.ncols() {
                let t1 = PolyhedronRealization::from_flat(&basis.column(j).into_owned()).restrict(&map);
                err = err.max((&jac * t1.flat()).amax());
                // the boundary image closes up around every rewritten walk
                let img = d_delta(&s2, &t1.flat());
                let mut at = 0;
                for w in s2.boundary() {
                    let sum: Vec3 = (at..at + w.len()).map(|j| Vec3::new(img[3 * j], img[3 * j + 1], img[3 * j + 2])).sum();
                    err = err.max(sum.amax());
                    at += w.len();
                }
            }
            worst = worst.max(err);
            checked += 1;
            if err > COLLAPSE_TOL {
                bad.push(format!("seed={seed} triangle={t}: {err:.2e}"));
            }
        }
    }
    outcome(
        bad.is_empty() && checked > 0,
        format!("{checked} collapses, max violation {worst:.2e} (limit {COLLAPSE_TOL:e}), failures {bad:?}"),
    )
}

fn hexagon() -> Outcome {
    let tol = Tolerance::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for alpha in [1.2f64, 1.5, 2.0] {
        let joined = rhombus_pair_for_join(alpha).and_then(|(r1, r2)| hexagon_join(&r1, &r2, &tol).map(|h| (h, r1, r2)));
        match joined {
            Ok((h, r1, r2)) => {
                let comp = &h.hexagon.components()[0];
                let err = (0..comp.len())
                    .map(|i| ((comp[(i + 1) % comp.len()] - comp[i]).norm() - 1.0).abs())
                    .fold(0.0, f64::max);
                let zero = h.chain_defect(&r1, &r2, &tol).is_zero();
                ok &= comp.len() == 6 && err <= HEXAGON_TOL && zero;
                parts.push(format!("alpha {alpha}: {} edges, err {err:.1e}, chain zero {zero}", comp.len()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("alpha {alpha}: {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let curves = corpus();
    let mut ledgers = Vec::new();
    let c1 = end_to_end(&curves, &mut ledgers);
    let (c2, c3) = planarize_and_pack(&curves);
    let results = [
        ("end-to-end reduction", c1),
        ("planarize", c2),
        ("pack", c3),
        ("regular pentagon split", regular_pentagon()),
        ("chain identity", chain_identity(&ledgers)),
        ("polygon tangent dimensions", tangent_dimensions()),
        ("kernel of omega", kernel_of_form()),
        ("isotropy", isotropy()),
        ("rank bound", rank()),
        ("collapse and restriction", collapse_restriction()),
        ("hexagon join", hexagon()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
