//! Dimension, kernel, isotropy and rank certificates, selectable by name.

use super::linalg::{max_principal_angle, project_out, rank_summary, RankSummary};
use super::polygon::{kernel_of_omega, omega_gram, polygon_tangent_basis, so3_orbit_tangent, PolygonRealization};
use super::polyhedron::{
    boundary_realization, d_delta_matrix, max_residual, polyhedron_realization, polyhedron_tangent_basis,
    PolyhedronRealization,
};
use super::ModuliError;
use crate::geom::Tolerance;
use crate::registry::{Named, Registry};
use crate::surface::{catalog, CatalogSurface, GraphSurface};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

/// Pullbacks of ω must vanish to this fraction of the largest ω entry.
pub const ISOTROPY_RATIO: f64 = 1e-8;
/// Kernel of ω and rotation orbits must agree to this principal angle.
pub const KERNEL_ANGLE: f64 = 1e-6;
/// Kept singular values must exceed the threshold by this factor.
pub const RANK_GAP: f64 = 10.0;
/// Below this the ω scale is treated as zero and 1 is used instead.
const SCALE_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// `copies` independent random polygons with `k` edges each.
    Polygon { k: usize, copies: usize },
    Surface(CatalogSurface),
}

impl Target {
    /// `polygon:k=K[:copies=C]` or a catalog surface spec.
    pub fn parse(spec: &str) -> Result<Self, ModuliError> {
        let Some(rest) = spec.strip_prefix("polygon") else {
            return Ok(Target::Surface(catalog(spec)?));
        };
        let (mut k, mut copies) = (None, 1);
        for part in rest.split(':').filter(|p| !p.is_empty()) {
            let bad = || ModuliError::BadTarget(spec.to_string());
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value: usize = value.trim().parse().map_err(|_| bad())?;
            match key.trim() {
                "k" => k = Some(value),
                "copies" => copies = value,
                _ => return Err(bad()),
            }
        }
        match k {
            Some(k) if k >= 3 && copies >= 1 => Ok(Target::Polygon { k, copies }),
            _ => Err(ModuliError::BadTarget(spec.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Polygon { k, copies } => format!("polygon:k={k}:copies={copies}"),
            Target::Surface(c) => c.name.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: Tolerance,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 20,
            tol: Tolerance::default(),
        }
    }
}

impl CertificateConfig {
    /// Independent seed of trial `i`.
    pub fn trial_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64 + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub certificate: &'static str,
    pub target: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub details: Value,
}

pub trait Certificate: Named + Send + Sync {
    fn run(&self, target: &Target, cfg: &CertificateConfig) -> Result<CertificateReport, ModuliError>;
}

fn report(name: &'static str, target: &Target, cfg: &CertificateConfig, passed: bool, details: Value) -> CertificateReport {
    CertificateReport {
        certificate: name,
        target: target.label(),
        seed: cfg.seed,
        trials: cfg.trials,
        passed,
        details,
    }
}

/// Largest `|ω|` Gram entry on an orthonormal tangent basis of `p`; 1 if that is negligible.
pub fn omega_scale(p: &PolygonRealization, tol: &Tolerance) -> f64 {
    let s = omega_gram(p, &polygon_tangent_basis(p, tol)).amax();
    if s > SCALE_FLOOR {
        s
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropyReport {
    pub tangent_dim: usize,
    pub max_pairing: f64,
    pub scale: f64,
    pub ratio: f64,
    pub residual: f64,
}

impl IsotropyReport {
    pub fn passed(&self) -> bool {
        self.ratio <= ISOTROPY_RATIO
    }
}

/// `max |ω(dδ s_i, dδ s_j)|` over an orthonormal tangent basis at `q`.
pub fn isotropy_certificate(
    s: &GraphSurface,
    q: &PolyhedronRealization,
    tol: &Tolerance,
) -> Result<IsotropyReport, ModuliError> {
    s.check_orientable().map_err(|e| ModuliError::NotOrientable(e.to_string()))?;
    let basis = polyhedron_tangent_basis(s, q, tol)?;
    let p = boundary_realization(s, q);
    let images = d_delta_matrix(s, &basis);
    let max_pairing = omega_gram(&p, &images).amax();
    let scale = omega_scale(&p, tol);
    Ok(IsotropyReport {
        tangent_dim: basis.ncols(),
        max_pairing,
        scale,
        ratio: max_pairing / scale,
        residual: max_residual(s, q)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    /// Moduli dimension of one boundary rhombus.
    pub m: usize,
    pub tangent_dim: usize,
    pub rank_moduli: usize,
    pub rank_projected: usize,
    pub bound_moduli: usize,
    pub bound_projected: usize,
    pub moduli_svd: RankSummary,
    pub projected_svd: RankSummary,
    pub residual: f64,
}

impl RankReport {
    pub fn passed(&self) -> bool {
        self.rank_moduli <= self.bound_moduli
            && self.rank_projected <= self.bound_projected
            && self.rank_projected < 2 * self.m
            && self.moduli_svd.has_gap(RANK_GAP)
            && self.projected_svd.has_gap(RANK_GAP)
    }
}

/// Rank of `dδ` with the rotation orbits of the boundary factors projected
/// out, for a surface whose boundary is three 4-gons; also after dropping the
/// third factor.
pub fn rank_certificate(
    s: &GraphSurface,
    q: &PolyhedronRealization,
    tol: &Tolerance,
) -> Result<RankReport, ModuliError> {
    let (polys, _) = s.boundary_polygons();
    let shape: Vec<usize> = polys.iter().map(|p| p.lengths.len()).collect();
    if shape != [4, 4, 4] {
        return Err(ModuliError::BoundaryShapeMismatch(shape));
    }
    let basis = polyhedron_tangent_basis(s, q, tol)?;
    let p = boundary_realization(s, q);
    let images = d_delta_matrix(s, &basis);

    let single = PolygonRealization::new(vec![p.polygons[0].clone()]);
    let m = polygon_tangent_basis(&single, tol).ncols() - so3_orbit_tangent(&single, tol).ncols();

    let orbit = so3_orbit_tangent(&p, tol);
    let moduli_svd = rank_summary(&project_out(&orbit, &images), tol.rank_rel_eps);

    let rows = 3 * (p.polygons[0].len() + p.polygons[1].len());
    let first_two = PolygonRealization::new(p.polygons[..2].to_vec());
    let orbit2 = so3_orbit_tangent(&first_two, tol);
    let projected = images.rows(0, rows).into_owned();
    let projected_svd = rank_summary(&project_out(&orbit2, &projected), tol.rank_rel_eps);

    Ok(RankReport {
        m,
        tangent_dim: basis.ncols(),
        rank_moduli: moduli_svd.rank,
        rank_projected: projected_svd.rank,
        bound_moduli: 3 * m / 2,
        bound_projected: 3 * m / 2,
        moduli_svd,
        projected_svd,
        residual: max_residual(s, q)?,
    })
}

/// Principal angle between the kernel of ω and the rotation orbit tangent.
pub fn kernel_angle(p: &PolygonRealization, tol: &Tolerance) -> (usize, usize, f64) {
    let k = kernel_of_omega(p, tol);
    let o = so3_orbit_tangent(p, tol);
    (k.ncols(), o.ncols(), max_principal_angle(&k, &o))
}

fn realizations(c: &CatalogSurface, cfg: &CertificateConfig) -> Result<Vec<PolyhedronRealization>, ModuliError> {
    (0..cfg.trials.max(1))
        .map(|i| polyhedron_realization(c, Some(cfg.trial_seed(i)), &cfg.tol))
        .collect()
}

/// Tangent dimensions of polygons (expected `2k − 3`, moduli `2k − 6`) or of
/// a surface scheme and its boundary.
#[derive(Clone, Copy, Debug, Default)]
pub struct DimsCertificate;

impl Named for DimsCertificate {
    fn name(&self) -> &'static str {
        "dims"
    }
}

impl Certificate for DimsCertificate {
    fn run(&self, target: &Target, cfg: &CertificateConfig) -> Result<CertificateReport, ModuliError> {
        let tol = &cfg.tol;
        match target {
            Target::Polygon { k, copies } => {
                let mut rows = Vec::new();
                let mut ok = true;
                for i in 0..cfg.trials.max(1) {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.trial_seed(i));
                    let p = PolygonRealization::random(&vec![*k; *copies], &mut rng);
                    let scheme = polygon_tangent_basis(&p, tol).ncols();
                    let orbit = so3_orbit_tangent(&p, tol).ncols();
                    let expected = copies * (2 * k - 3);
                    ok &= scheme == expected && orbit == 3 * copies;
                    rows.push(json!({"scheme": scheme, "orbit": orbit, "moduli": scheme - orbit}));
                }
                let first = &rows[0];
                let details = json!({
                    "scheme": first["scheme"],
                    "moduli": first["moduli"],
                    "expected_scheme": copies * (2 * k - 3),
                    "expected_moduli": copies * (2 * k - 3) - 3 * copies,
                    "trials": rows,
                });
                Ok(report(self.name(), target, cfg, ok, details))
            }
            Target::Surface(c) => {
                let mut rows = Vec::new();
                let mut dims = Vec::new();
                let mut worst = 0.0f64;
                for q in realizations(c, cfg)? {
                    let t = polyhedron_tangent_basis(&c.surface, &q, tol)?.ncols();
                    let p = boundary_realization(&c.surface, &q);
                    let target_dim = polygon_tangent_basis(&p, tol).ncols();
                    worst = worst.max(max_residual(&c.surface, &q)?);
                    dims.push(t);
                    rows.push(json!({"scheme": t, "moduli": t.saturating_sub(3), "boundary_scheme": target_dim}));
                }
                let ok = dims.iter().all(|&d| d == dims[0] && d >= 3) && worst <= super::PROJECTION_RESIDUAL;
                let details = json!({"scheme": dims[0], "max_residual": worst, "trials": rows});
                Ok(report(self.name(), target, cfg, ok, details))
            }
        }
    }
}

/// The kernel of ω coincides with the rotation orbit directions.
#[derive(Clone, Copy, Debug, Default)]
pub struct KernelCertificate;

impl Named for KernelCertificate {
    fn name(&self) -> &'static str {
        "kernel"
    }
}

impl Certificate for KernelCertificate {
    fn run(&self, target: &Target, cfg: &CertificateConfig) -> Result<CertificateReport, ModuliError> {
        let samples: Vec<PolygonRealization> = match target {
            Target::Polygon { k, copies } => (0..cfg.trials.max(1))
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.trial_seed(i));
                    PolygonRealization::random(&vec![*k; *copies], &mut rng)
                })
                .collect(),
            Target::Surface(c) => realizations(c, cfg)?
                .iter()
                .map(|q| boundary_realization(&c.surface, q))
                .collect(),
        };
        let mut worst = 0.0f64;
        let mut ok = true;
        let mut rows = Vec::new();
        for p in &samples {
            let (kd, od, angle) = kernel_angle(p, &cfg.tol);
            worst = worst.max(angle);
            ok &= kd == od && angle <= KERNEL_ANGLE;
            rows.push(json!({"kernel": kd, "orbit": od, "angle": angle}));
        }
        Ok(report(self.name(), target, cfg, ok, json!({"max_angle": worst, "trials": rows})))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IsotropyCertificate;

impl Named for IsotropyCertificate {
    fn name(&self) -> &'static str {
        "isotropy"
    }
}

impl Certificate for IsotropyCertificate {
    fn run(&self, target: &Target, cfg: &CertificateConfig) -> Result<CertificateReport, ModuliError> {
        let Target::Surface(c) = target else {
            return Err(ModuliError::BadTarget(format!("isotropy needs a surface, got {}", target.label())));
        };
        let mut rows = Vec::new();
        let (mut ok, mut worst) = (true, 0.0f64);
        for q in realizations(c, cfg)? {
            let r = isotropy_certificate(&c.surface, &q, &cfg.tol)?;
            ok &= r.passed();
            worst = worst.max(r.ratio);
            rows.push(serde_json::to_value(&r).expect("plain numbers"));
        }
        let details = json!({"max_ratio": worst, "bound": ISOTROPY_RATIO, "trials": rows});
        Ok(report(self.name(), target, cfg, ok, details))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RankCertificate;

impl Named for RankCertificate {
    fn name(&self) -> &'static str {
        "rank"
    }
}

impl Certificate for RankCertificate {
    fn run(&self, target: &Target, cfg: &CertificateConfig) -> Result<CertificateReport, ModuliError> {
        let Target::Surface(c) = target else {
            return Err(ModuliError::BadTarget(format!("rank needs a surface, got {}", target.label())));
        };
        let mut rows = Vec::new();
        let mut ok = true;
        let (mut rank_moduli, mut rank_projected, mut min_gap) = (0, 0, f64::INFINITY);
        for q in realizations(c, cfg)? {
            let r = rank_certificate(&c.surface, &q, &cfg.tol)?;
            ok &= r.passed();
            rank_moduli = rank_moduli.max(r.rank_moduli);
            rank_projected = rank_projected.max(r.rank_projected);
            min_gap = min_gap.min(r.moduli_svd.gap_ratio()).min(r.projected_svd.gap_ratio());
            rows.push(serde_json::to_value(&r).expect("plain numbers"));
        }
        let details = json!({
            "rank_moduli": rank_moduli,
            "rank_projected": rank_projected,
            "min_gap_ratio": if min_gap.is_finite() { json!(min_gap) } else { Value::Null },
            "trials": rows,
        });
        Ok(report(self.name(), target, cfg, ok, details))
    }
}

pub fn certificates() -> Registry<dyn Certificate> {
    Registry::<dyn Certificate>::new("certificate")
        .with(Arc::new(DimsCertificate))
        .with(Arc::new(KernelCertificate))
        .with(Arc::new(IsotropyCertificate))
        .with(Arc::new(RankCertificate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_parse() {
        assert_eq!(Target::parse("polygon:k=4").unwrap(), Target::Polygon { k: 4, copies: 1 });
        assert_eq!(Target::parse("polygon:k=4:copies=2").unwrap(), Target::Polygon { k: 4, copies: 2 });
        assert!(Target::parse("polygon:k=2").is_err());
        assert!(Target::parse("polygon").is_err());
        assert!(matches!(Target::parse("antiprism_band:k=5").unwrap(), Target::Surface(_)));
        assert!(Target::parse("klein_bottle").is_err());
    }

    #[test]
    fn pentagon_pants_is_isotropic() {
        let tol = Tolerance::default();
        let c = catalog("pentagon_pants").unwrap();
        let q = polyhedron_realization(&c, Some(9), &tol).unwrap();
        let r = isotropy_certificate(&c.surface, &q, &tol).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.tangent_dim >= 3);
    }

    #[test]
    fn rank_needs_three_rhombi() {
        let tol = Tolerance::default();
        let c = catalog("pentagon_pants").unwrap();
        let q = PolyhedronRealization::from_catalog(&c);
        assert!(matches!(rank_certificate(&c.surface, &q, &tol), Err(ModuliError::BoundaryShapeMismatch(_))));
    }

    #[test]
    fn dims_of_a_square() {
        let cfg = CertificateConfig { trials: 3, ..Default::default() };
        let r = DimsCertificate.run(&Target::Polygon { k: 4, copies: 1 }, &cfg).unwrap();
        assert!(r.passed);
        assert_eq!(r.details["scheme"], 5);
        assert_eq!(r.details["moduli"], 2);
    }
}
