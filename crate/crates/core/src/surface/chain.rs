//! Formal 2-chains of unit cells and the ledger boundary check.

use crate::cobordism::{replay, rhombus_budget, CobordismLedger, ReplayError, SeamPair, TriangleFace};
use crate::curve::{IntegralCurve, Rhombus};
use crate::geom::{Point, Tolerance};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Identifies points closer than `eps` through a hash grid of cell size `eps`.
///
/// A point within `eps` of two different stored points is counted as a
/// collision (and attached to the nearer one) rather than merging them.
#[derive(Clone, Debug)]
pub struct VertexKeyer {
    eps: f64,
    grid: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<Point>,
    collisions: usize,
}

impl VertexKeyer {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            grid: HashMap::new(),
            points: Vec::new(),
            collisions: 0,
        }
    }

    fn cell(&self, p: &Point) -> [i64; 3] {
        [p.x, p.y, p.z].map(|c| (c / self.eps).floor() as i64)
    }

    pub fn key(&mut self, p: &Point) -> usize {
        let c = self.cell(p);
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        for &id in ids {
                            let d = (self.points[id] - p).norm();
                            if d <= self.eps {
                                hits.push((d, id));
                            }
                        }
                    }
                }
            }
        }
        if hits.len() > 1 {
            self.collisions += 1;
        }
        if let Some(&(_, id)) = hits.iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
            return id;
        }
        let id = self.points.len();
        self.points.push(*p);
        self.grid.entry(c).or_default().push(id);
        id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn collisions(&self) -> usize {
        self.collisions
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Triangle(TriangleFace),
    /// Counted through its boundary `[a b c d]`.
    Rhombus(Rhombus),
    Seam(SeamPair),
}

impl Cell {
    /// Oriented boundary segments.
    pub fn boundary(&self) -> Vec<(Point, Point)> {
        match self {
            Cell::Triangle(t) => t.edges().to_vec(),
            Cell::Rhombus(r) => r.edges().to_vec(),
            Cell::Seam(s) => vec![(s.first.from, s.first.to), (s.second.from, s.second.to)],
        }
    }

    /// Largest deviation of a side from unit length.
    pub fn side_error(&self) -> f64 {
        self.boundary()
            .iter()
            .map(|(a, b)| ((b - a).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// An integer combination of unit cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DomeChain {
    pub cells: Vec<(i64, Cell)>,
}

/// Signed segment multiplicities of a 1-chain over keyed vertices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChainDefect {
    /// Keyed segments with non-zero total multiplicity.
    pub nonzero: usize,
    /// Segments whose two ends received the same key.
    pub collapsed: usize,
    pub collisions: usize,
    pub segments: usize,
}

impl ChainDefect {
    pub fn is_zero(&self) -> bool {
        self.nonzero == 0 && self.collapsed == 0 && self.collisions == 0
    }
}

/// Accumulates `coefficient · [a → b]` over keyed vertices.
#[derive(Debug)]
pub struct SegmentTally {
    keyer: VertexKeyer,
    counts: BTreeMap<(usize, usize), i64>,
    collapsed: usize,
}

impl SegmentTally {
    pub fn new(tol: &Tolerance) -> Self {
        Self {
            keyer: VertexKeyer::new(tol.geom_eps),
            counts: BTreeMap::new(),
            collapsed: 0,
        }
    }

    pub fn add(&mut self, coefficient: i64, a: &Point, b: &Point) {
        let (ka, kb) = (self.keyer.key(a), self.keyer.key(b));
        if ka == kb {
            self.collapsed += 1;
            return;
        }
        let (key, sign) = if ka < kb { ((ka, kb), 1) } else { ((kb, ka), -1) };
        *self.counts.entry(key).or_insert(0) += sign * coefficient;
    }

    pub fn add_cycle(&mut self, coefficient: i64, cycle: &[Point]) {
        for i in 0..cycle.len() {
            self.add(coefficient, &cycle[i], &cycle[(i + 1) % cycle.len()]);
        }
    }

    pub fn add_chain(&mut self, coefficient: i64, chain: &DomeChain) {
        for (c, cell) in &chain.cells {
            for (a, b) in cell.boundary() {
                self.add(coefficient * c, &a, &b);
            }
        }
    }

    pub fn defect(&self) -> ChainDefect {
        ChainDefect {
            nonzero: self.counts.values().filter(|&&c| c != 0).count(),
            collapsed: self.collapsed,
            collisions: self.keyer.collisions(),
            segments: self.counts.len(),
        }
    }
}

impl DomeChain {
    /// Every triangle, rhombus and seam pair of the ledger, each with coefficient 1.
    pub fn from_ledger_cells(l: &CobordismLedger) -> Self {
        let cells = l
            .triangles
            .iter()
            .map(|t| Cell::Triangle(*t))
            .chain(l.rhombi.iter().map(|r| Cell::Rhombus(*r)))
            .chain(l.seams.iter().map(|s| Cell::Seam(*s)))
            .map(|c| (1, c))
            .collect();
        Self { cells }
    }

    pub fn count(&self, pred: impl Fn(&Cell) -> bool) -> usize {
        self.cells.iter().filter(|(_, c)| pred(c)).count()
    }

    /// OFF mesh of the triangle and rhombus cells. Rhombi are split along the
    /// diagonal `a c`; this is for display only.
    pub fn to_off(&self, tol: &Tolerance) -> String {
        let mut keyer = VertexKeyer::new(tol.geom_eps);
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for (_, cell) in &self.cells {
            match cell {
                Cell::Triangle(t) => faces.push(t.vertices.iter().map(|p| keyer.key(p)).collect()),
                Cell::Rhombus(r) => {
                    let k: Vec<usize> = r.vertices.iter().map(|p| keyer.key(p)).collect();
                    faces.push(vec![k[0], k[1], k[2]]);
                    faces.push(vec![k[0], k[2], k[3]]);
                }
                Cell::Seam(_) => {}
            }
        }
        let mut out = String::from("OFF\n# rhombus cells are split along a diagonal for display only\n");
        let _ = writeln!(out, "{} {} 0", keyer.points().len(), faces.len());
        for p in keyer.points() {
            let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
        }
        for f in &faces {
            let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
        }
        out
    }
}

/// Replays the ledger and, if it regenerates exactly the recorded cells,
/// returns the dome chain over them.
pub fn assemble_from_ledger(l: &CobordismLedger, tol: &Tolerance) -> Result<DomeChain, ReplayError> {
    let r = replay(l, tol)?;
    let step = l.steps.len();
    let differs = |what: &str| ReplayError::Mismatch {
        step,
        reason: format!("recorded {what} differ from the replayed ones"),
    };
    if r.triangles != l.triangles {
        return Err(differs("triangles"));
    }
    if r.rhombi != l.rhombi {
        return Err(differs("rhombi"));
    }
    if r.seams != l.seams {
        return Err(differs("seams"));
    }
    if r.final_curve != l.final_curve {
        return Err(differs("final curves"));
    }
    Ok(DomeChain::from_ledger_cells(l))
}

/// `∂(chain) − γ_initial + γ_final` over keyed vertices; zero for a sound ledger.
pub fn ledger_chain_defect(l: &CobordismLedger, tol: &Tolerance) -> ChainDefect {
    let mut tally = SegmentTally::new(tol);
    tally.add_chain(1, &DomeChain::from_ledger_cells(l));
    for c in l.initial.components() {
        tally.add_cycle(-1, c);
    }
    for c in l.final_curve.components() {
        tally.add_cycle(1, c);
    }
    tally.defect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LedgerReport {
    pub checks: Vec<Check>,
}

impl LedgerReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

/// Runs every ledger check; failures are report entries, never errors.
pub fn validate_ledger(l: &CobordismLedger, tol: &Tolerance) -> LedgerReport {
    let mut report = LedgerReport::default();
    let eps = tol.geom_eps;

    let input = IntegralCurve::new(l.initial.components().to_vec(), tol);
    report.push(
        "input",
        input.is_ok(),
        input.map_or_else(|e| e.to_string(), |c| format!("{} unit edges", c.len())),
    );

    let replayed = replay(l, tol);
    match (&replayed, assemble_from_ledger(l, tol)) {
        (_, Ok(_)) => report.push("replay", true, format!("replaying {} steps reproduces every cell", l.steps.len())),
        (_, Err(e)) => report.push("replay", false, e.to_string()),
    }

    let tri_err = l.triangles.iter().map(|t| t.side_error()).fold(0.0, f64::max);
    let rho_err = l.rhombi.iter().map(|r| r.side_error()).fold(0.0, f64::max);
    report.push(
        "unit-cells",
        tri_err <= eps && rho_err <= eps,
        format!("max side error: triangles {tri_err:.3e}, rhombi {rho_err:.3e}"),
    );

    let seam_err = l.seams.iter().map(|s| s.mismatch()).fold(0.0, f64::max);
    let seam_len = l
        .seams
        .iter()
        .map(|s| ((s.first.to - s.first.from).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    report.push(
        "seams",
        seam_err <= eps && seam_len <= eps,
        format!("{} seam pairs, endpoint mismatch {seam_err:.3e}, length error {seam_len:.3e}", l.seams.len()),
    );

    let d = ledger_chain_defect(l, tol);
    report.push(
        "chain",
        d.is_zero(),
        format!(
            "{} keyed segments, {} with non-zero multiplicity, {} collapsed, {} key collisions",
            d.segments, d.nonzero, d.collapsed, d.collisions
        ),
    );

    let (ok, detail) = match &replayed {
        Ok(r) => {
            let over: Vec<String> = l
                .initial
                .components()
                .iter()
                .zip(&r.rhombi_per_component)
                .enumerate()
                .filter(|(_, (c, &k))| k > rhombus_budget(c.len()))
                .map(|(i, (c, k))| format!("component {i}: {k} > {}", rhombus_budget(c.len())))
                .collect();
            (over.is_empty(), if over.is_empty() { format!("k = {} within {}", l.k(), l.budget()) } else { over.join("; ") })
        }
        Err(_) => (l.k() <= l.budget(), format!("k = {}, total budget {}", l.k(), l.budget())),
    };
    report.push("budget", ok, detail);

    report.push(
        "reduced",
        l.final_curve.is_empty(),
        format!("{} edges left", l.final_curve.len()),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobordism::reduce_to_rhombi;
    use crate::curve::{random_closed_curve, regular_polygon, IntegralCurve};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ledger(pts: Vec<Point>) -> CobordismLedger {
        let tol = Tolerance::default();
        reduce_to_rhombi(&IntegralCurve::new(vec![pts], &tol).unwrap(), &tol).unwrap()
    }

    #[test]
    fn keyer_merges_and_flags() {
        let mut k = VertexKeyer::new(1e-9);
        let a = k.key(&Point::new(0.0, 0.0, 0.0));
        assert_eq!(k.key(&Point::new(3e-10, 0.0, 0.0)), a);
        assert_ne!(k.key(&Point::new(1.0, 0.0, 0.0)), a);
        assert_eq!(k.collisions(), 0);
        let b = k.key(&Point::new(1.5e-9, 0.0, 0.0));
        assert_ne!(b, a);
        k.key(&Point::new(0.8e-9, 0.0, 0.0));
        assert_eq!(k.collisions(), 1);
    }

    #[test]
    fn pentagon_chain() {
        let tol = Tolerance::default();
        let l = ledger(regular_polygon(5));
        let chain = assemble_from_ledger(&l, &tol).unwrap();
        assert_eq!(chain.count(|c| matches!(c, Cell::Triangle(_))), 1);
        assert_eq!(chain.count(|c| matches!(c, Cell::Rhombus(_))), 2);
        assert_eq!(chain.count(|c| matches!(c, Cell::Seam(_))), 3);
        assert!(validate_ledger(&l, &tol).passed());
    }

    #[test]
    fn rhombus_ledger_has_no_pivot_cells() {
        let tol = Tolerance::default();
        let l = ledger(regular_polygon(4));
        assert_eq!(l.steps.len(), 1);
        assert!(ledger_chain_defect(&l, &tol).is_zero());
    }

    #[test]
    fn perturbed_rhombus_fails() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut l = ledger(random_closed_curve(9, &mut rng));
        assert!(validate_ledger(&l, &tol).passed());
        l.rhombi[0].vertices[1].y += 1e-3;
        let r = validate_ledger(&l, &tol);
        let failed: Vec<&str> = r.failures().map(|c| c.name).collect();
        assert!(failed.contains(&"unit-cells"));
        assert!(failed.contains(&"chain"));
        assert!(failed.contains(&"replay"));
    }

    #[test]
    fn off_export_counts_faces() {
        let tol = Tolerance::default();
        let l = ledger(regular_polygon(5));
        let off = DomeChain::from_ledger_cells(&l).to_off(&tol);
        let mut lines = off.lines().filter(|l| !l.starts_with('#'));
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("6 5 0"));
    }
}
