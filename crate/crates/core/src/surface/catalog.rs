//! Named surfaces with explicit unit-edge coordinates.

use super::{GraphSurface, SurfaceError};
use crate::curve::regular_polygon;
use crate::geom::{apex_at_unit_distance, Point, Side, Tolerance};
use crate::registry::{Named, Registry};
use std::f64::consts::PI;
use std::sync::Arc;

/// A surface together with coordinates realizing its edge lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogSurface {
    pub name: String,
    pub surface: GraphSurface,
    pub coords: Vec<Point>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SurfaceParams {
    pub k: Option<usize>,
}

pub trait SurfaceBuilder: Named + Send + Sync {
    fn build(&self, params: &SurfaceParams) -> Result<CatalogSurface, SurfaceError>;
}

/// Splits `NAME[:k=K]` into a name and parameters.
pub fn parse_surface_spec(spec: &str) -> Result<(String, SurfaceParams), SurfaceError> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default().trim().to_string();
    let mut params = SurfaceParams::default();
    for p in parts {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| SurfaceError::BadSpec(format!("expected key=value, got `{p}`")))?;
        match key.trim() {
            "k" => {
                params.k = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| SurfaceError::BadSpec(format!("k must be an integer, got `{value}`")))?,
                )
            }
            other => return Err(SurfaceError::BadSpec(format!("unknown parameter `{other}`"))),
        }
    }
    Ok((name, params))
}

fn done(name: String, coords: Vec<Point>, tris: &[[usize; 3]], walks: &[Vec<usize>]) -> Result<CatalogSurface, SurfaceError> {
    let surface = GraphSurface::from_cycles(&coords, tris, walks, 0)?;
    Ok(CatalogSurface { name, surface, coords })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TriangleDisk;

impl Named for TriangleDisk {
    fn name(&self) -> &'static str {
        "triangle_disk"
    }
}

impl SurfaceBuilder for TriangleDisk {
    fn build(&self, _: &SurfaceParams) -> Result<CatalogSurface, SurfaceError> {
        done(self.name().into(), regular_polygon(3), &[[0, 1, 2]], &[vec![0, 1, 2]])
    }
}

/// `2k` unit triangles between a regular unit `k`-gon and a copy rotated by
/// `π/k` and lifted. Bottom vertices are `0..k`, top vertices `k..2k`.
#[derive(Clone, Copy, Debug, Default)]
pub struct AntiprismBand;

impl Named for AntiprismBand {
    fn name(&self) -> &'static str {
        "antiprism_band"
    }
}

impl SurfaceBuilder for AntiprismBand {
    fn build(&self, params: &SurfaceParams) -> Result<CatalogSurface, SurfaceError> {
        let k = params.k.unwrap_or(4);
        if k < 3 {
            return Err(SurfaceError::BadSpec(format!("antiprism_band needs k >= 3, got {k}")));
        }
        let kf = k as f64;
        let r = 0.5 / (PI / kf).sin();
        let h = (1.0 - ((PI / (2.0 * kf)).sin() / (PI / kf).sin()).powi(2)).sqrt();
        let mut coords = Vec::with_capacity(2 * k);
        for j in 0..k {
            let a = 2.0 * PI * j as f64 / kf;
            coords.push(Point::new(r * a.cos(), r * a.sin(), 0.0));
        }
        for j in 0..k {
            let a = 2.0 * PI * j as f64 / kf + PI / kf;
            coords.push(Point::new(r * a.cos(), r * a.sin(), h));
        }
        let mut tris = Vec::with_capacity(2 * k);
        for j in 0..k {
            let (b0, b1, t0, t1) = (j, (j + 1) % k, k + j, k + (j + 1) % k);
            tris.push([b0, b1, t0]);
            tris.push([t0, b1, t1]);
        }
        let bottom: Vec<usize> = (0..k).collect();
        let top: Vec<usize> = (k..2 * k).rev().collect();
        done(format!("antiprism_band:k={k}"), coords, &tris, &[bottom, top])
    }
}

/// Regular unit pentagon `v1..v5` (vertices 0..5) with the apex `z` (vertex 5)
/// over `v1, v3, v4`: one triangle `[v3 v4 z]` and boundary walks the
/// pentagon and the two rhombi `[v1 z v3 v2]`, `[v1 v5 v4 z]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PentagonPants;

impl Named for PentagonPants {
    fn name(&self) -> &'static str {
        "pentagon_pants"
    }
}

impl SurfaceBuilder for PentagonPants {
    fn build(&self, _: &SurfaceParams) -> Result<CatalogSurface, SurfaceError> {
        let mut coords = regular_polygon(5);
        let z = apex_at_unit_distance(&coords[0], &coords[2], &coords[3], Side::Positive, &Tolerance::default())?
            .ok_or(SurfaceError::Malformed("pentagon has no apex".into()))?;
        coords.push(z);
        done(
            self.name().into(),
            coords,
            &[[2, 3, 5]],
            &[vec![0, 1, 2, 3, 4], vec![0, 5, 2, 1], vec![0, 4, 3, 5]],
        )
    }
}

/// A pair of pants whose three boundary walks are all unit rhombi: the
/// pentagon of [`PentagonPants`] is taken with `|v1 v3| = 1` and capped by the
/// triangle `[v3 v2 v1]`, leaving the rhombus `[v3 v4 v5 v1]` as third boundary.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThreeRhombusPants;

impl Named for ThreeRhombusPants {
    fn name(&self) -> &'static str {
        "three_rhombus_pants"
    }
}

impl SurfaceBuilder for ThreeRhombusPants {
    fn build(&self, _: &SurfaceParams) -> Result<CatalogSurface, SurfaceError> {
        let theta = 100f64.to_radians();
        let d = crate::geom::Vec3::new(theta.cos(), theta.sin(), 0.0);
        let v1 = Point::origin();
        let v3 = Point::new(1.0, 0.0, 0.0);
        let v2 = Point::new(0.5, -(3f64.sqrt()) / 2.0, 0.0);
        let v4 = v3 + d;
        let v5 = v1 + d;
        let z = apex_at_unit_distance(&v1, &v3, &v4, Side::Positive, &Tolerance::default())?
            .ok_or(SurfaceError::Malformed("no apex over v1 v3 v4".into()))?;
        done(
            self.name().into(),
            vec![v1, v2, v3, v4, v5, z],
            &[[2, 3, 5], [2, 1, 0]],
            &[vec![0, 5, 2, 1], vec![0, 4, 3, 5], vec![2, 3, 4, 0]],
        )
    }
}

pub fn surface_catalog() -> Registry<dyn SurfaceBuilder> {
    Registry::<dyn SurfaceBuilder>::new("surface")
        .with(Arc::new(TriangleDisk))
        .with(Arc::new(AntiprismBand))
        .with(Arc::new(PentagonPants))
        .with(Arc::new(ThreeRhombusPants))
}

/// Looks up `NAME[:k=K]` in the catalog and builds it.
pub fn catalog(spec: &str) -> Result<CatalogSurface, SurfaceError> {
    let (name, params) = parse_surface_spec(spec)?;
    surface_catalog().get(&name)?.build(&params)
}
