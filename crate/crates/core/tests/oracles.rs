//! Reference values computed independently of the library code paths.

use approx::assert_abs_diff_eq;
use domes_core::cobordism::{max_prefix_norm, rhombus_budget, steinitz_order, Vec2, STEINITZ_BOUND};
use domes_core::curve::{is_planar, regular_polygon};
use domes_core::geom::{
    apex_at_unit_distance, circumradius, point_on_circle_nearest_plane, unit_ball_intersection, Circle3, Plane, Point,
    Side, Tolerance, Vec3,
};
use domes_core::moduli::{polygon_tangent_basis, so3_orbit_tangent, PolygonRealization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Circumradius from side lengths alone: `abc / 4A` with Heron's area.
fn heron_circumradius(a: f64, b: f64, c: f64) -> f64 {
    let s = (a + b + c) / 2.0;
    let area = (s * (s - a) * (s - b) * (s - c)).sqrt();
    a * b * c / (4.0 * area)
}

#[test]
fn golden_triangle_circumradius() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let oracle = heron_circumradius(phi, 1.0, phi);
    assert_abs_diff_eq!(oracle, 0.85065, epsilon = 1e-5);
    let p = regular_polygon(5);
    assert_abs_diff_eq!(circumradius(&p[0], &p[2], &p[3], &tol()).unwrap(), oracle, epsilon = 1e-12);
}

#[test]
fn pentagon_apex_height() {
    let p = regular_polygon(5);
    let r = heron_circumradius((p[2] - p[0]).norm(), 1.0, (p[3] - p[0]).norm());
    let apex = apex_at_unit_distance(&p[0], &p[2], &p[3], Side::Positive, &tol()).unwrap().unwrap();
    for v in [p[0], p[2], p[3]] {
        assert_abs_diff_eq!((apex - v).norm(), 1.0, epsilon = 1e-12);
    }
    // all of the pentagon lies in z = 0
    assert_abs_diff_eq!(apex.z.abs(), (1.0 - r * r).sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(apex.z.abs(), 0.52573, epsilon = 1e-5);
}

#[test]
fn ball_intersection_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let d: f64 = rng.random_range(0.05..2.0);
        let u = Point::new(rng.random(), rng.random(), rng.random());
        let w = u + Vec3::new(0.3, -0.4, 0.5).normalize() * d;
        let c = unit_ball_intersection(&u, &w, &tol()).unwrap();
        assert_abs_diff_eq!(c.radius, (1.0 - d * d / 4.0).sqrt(), epsilon = 1e-12);
        for k in 0..12 {
            let p = c.point_at(k as f64 * 0.5);
            assert_abs_diff_eq!((p - u).norm(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!((p - w).norm(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn tilted_circle_meets_plane() {
    let r = 3f64.sqrt() / 2.0;
    let c = Circle3::new(Point::new(0.5, 0.0, 0.5), r, Vec3::x()).unwrap();
    let h = Plane::new(Point::origin(), Vec3::z()).unwrap();
    let p = point_on_circle_nearest_plane(&c, &h);
    assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-12);
    // solved by hand: y² + (z − ½)² = ¾ at z = 0 gives |y| = 1/√2
    assert_abs_diff_eq!(p.y.abs(), 0.5f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(p.x, 0.5, epsilon = 1e-12);
}

#[test]
fn folded_rhombus_is_not_planar() {
    let a = std::f64::consts::FRAC_PI_3;
    // a 60° rhombus on the diagonal v0 v2, with v3 rotated 90° about that diagonal
    let v1 = Point::new(a.cos(), a.sin(), 0.0);
    let v2 = Point::new(1.0, 0.0, 0.0);
    let v3 = Point::new(a.cos(), 0.0, -a.sin());
    let quad = [Point::origin(), v1, v2, v3];
    for i in 0..4 {
        assert_abs_diff_eq!((quad[(i + 1) % 4] - quad[i]).norm(), 1.0, epsilon = 1e-12);
    }
    assert!(is_planar(&quad, &tol()).is_none());
}

#[test]
fn budget_closed_form() {
    for n in 5..60 {
        assert_eq!(rhombus_budget(n), n * (n - 1) + 3 * (n - 4));
    }
    assert_eq!(rhombus_budget(6), 36);
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn random_zero_sum(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    // a random closed planar unit polygon: n − 2 free edges plus the two-edge closing
    loop {
        let mut v: Vec<Vec2> = (0..n - 2)
            .map(|_| {
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let s: Vec2 = v.iter().sum();
        let d = s.norm();
        if !(1e-3..2.0).contains(&d) {
            continue;
        }
        let mid = -s / 2.0;
        let h = (1.0 - d * d / 4.0).sqrt();
        let perp = Vec2::new(-s.y, s.x) / d;
        let a = mid + perp * h;
        v.push(a);
        v.push(-s - a);
        return v;
    }
}

#[test]
fn steinitz_against_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [4, 6] {
        let perms = permutations(n);
        assert_eq!(perms.len(), (1..=n).product::<usize>());
        for _ in 0..30 {
            let v = random_zero_sum(n, &mut rng);
            let best = perms.iter().map(|p| max_prefix_norm(&v, p)).fold(f64::INFINITY, f64::min);
            assert!(best <= STEINITZ_BOUND + 1e-9, "exhaustive optimum {best}");
            let order = steinitz_order(&v, &tol()).unwrap();
            let got = max_prefix_norm(&v, &order);
            assert!(got <= STEINITZ_BOUND + 1e-9);
            assert!(got >= best - 1e-12);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        }
    }
}

#[test]
fn square_scheme_and_moduli_dimensions() {
    let p = PolygonRealization::from_cycles(&[regular_polygon(4)]);
    let scheme = polygon_tangent_basis(&p, &tol()).ncols();
    assert_eq!(scheme, 5);
    assert_eq!(scheme - so3_orbit_tangent(&p, &tol()).ncols(), 2);
}
