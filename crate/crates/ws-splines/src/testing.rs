//! Test-only oracles and generators, shared by unit, integration, and
//! acceptance tests. Independent of the evaluation paths they check.
#![doc(hidden)]

use crate::geom::{Point, Triangle};
use crate::local::Hessian;
use rand::Rng;

/// Published Hermite values rho_j(B_i): sparse entries (i, j, num, den) with
/// 0-based basis index i and operator index j. Entries not listed are zero.
pub const TABLE_A2_B: &[(usize, usize, i64, i64)] = &[
    (0, 0, 1, 1),
    (0, 3, -9, 1),
    (0, 4, -9, 1),
    (0, 9, 54, 1),
    (0, 10, 54, 1),
    (0, 15, 54, 1),
    (1, 1, 1, 1),
    (1, 5, -9, 1),
    (1, 6, -9, 1),
    (1, 11, 54, 1),
    (1, 12, 54, 1),
    (1, 16, 54, 1),
    (2, 2, 1, 1),
    (2, 7, -9, 1),
    (2, 8, -9, 1),
    (2, 13, 54, 1),
    (2, 14, 54, 1),
    (2, 17, 54, 1),
    (3, 3, 9, 1),
    (3, 9, -81, 1),
    (3, 15, -54, 1),
    (3, 18, -27, 32),
    (3, 21, 75, 2),
    (4, 4, 9, 1),
    (4, 10, -81, 1),
    (4, 15, -54, 1),
    (4, 20, -27, 32),
    (4, 22, 75, 2),
    (5, 5, 9, 1),
    (5, 11, -81, 1),
    (5, 16, -54, 1),
    (5, 19, -27, 32),
    (5, 23, 75, 2),
    (6, 6, 9, 1),
    (6, 12, -81, 1),
    (6, 16, -54, 1),
    (6, 18, -27, 32),
    (6, 24, 75, 2),
    (7, 7, 9, 1),
    (7, 13, -81, 1),
    (7, 17, -54, 1),
    (7, 20, -27, 32),
    (7, 25, 75, 2),
    (8, 8, 9, 1),
    (8, 14, -81, 1),
    (8, 17, -54, 1),
    (8, 19, -27, 32),
    (8, 26, 75, 2),
    (9, 9, 27, 1),
    (9, 18, -189, 32),
    (9, 21, 31, 2),
    (9, 24, 49, 1),
    (10, 10, 27, 1),
    (10, 20, -189, 32),
    (10, 22, 31, 2),
    (10, 25, 49, 1),
    (11, 11, 27, 1),
    (11, 19, -189, 32),
    (11, 23, 31, 2),
    (11, 26, 49, 1),
    (12, 12, 27, 1),
    (12, 18, -189, 32),
    (12, 21, 49, 1),
    (12, 24, 31, 2),
    (13, 13, 27, 1),
    (13, 20, -189, 32),
    (13, 22, 49, 1),
    (13, 25, 31, 2),
    (14, 14, 27, 1),
    (14, 19, -189, 32),
    (14, 23, 49, 1),
    (14, 26, 31, 2),
    (15, 15, 54, 1),
    (15, 18, 9, 8),
    (15, 20, 9, 8),
    (15, 21, -63, 1),
    (15, 22, -63, 1),
    (16, 16, 54, 1),
    (16, 18, 9, 8),
    (16, 19, 9, 8),
    (16, 23, -63, 1),
    (16, 24, -63, 1),
    (17, 17, 54, 1),
    (17, 19, 9, 8),
    (17, 20, 9, 8),
    (17, 25, -63, 1),
    (17, 26, -63, 1),
    (18, 18, 45, 4),
    (18, 21, -120, 1),
    (18, 24, -120, 1),
    (19, 19, 45, 4),
    (19, 23, -120, 1),
    (19, 26, -120, 1),
    (20, 20, 45, 4),
    (20, 22, -120, 1),
    (20, 25, -120, 1),
    (21, 21, 54, 1),
    (21, 22, 27, 1),
    (21, 27, 1, 12),
    (22, 21, 27, 1),
    (22, 22, 54, 1),
    (22, 27, 1, 12),
    (23, 23, 54, 1),
    (23, 24, 27, 1),
    (23, 27, 1, 12),
    (24, 23, 27, 1),
    (24, 24, 54, 1),
    (24, 27, 1, 12),
    (25, 25, 54, 1),
    (25, 26, 27, 1),
    (25, 27, 1, 12),
    (26, 25, 27, 1),
    (26, 26, 54, 1),
    (26, 27, 1, 12),
    (27, 27, 1, 2),
];

/// Published values rho_j(Btilde_i) for the alternative-basis rows 22..28
/// (0-based 21..27); rows 1..21 coincide with TABLE_A2_B.
pub const TABLE_A2_BTILDE: &[(usize, usize, i64, i64)] = &[
    (21, 21, 81, 1),
    (21, 27, 1, 4),
    (22, 22, 81, 1),
    (22, 27, 1, 4),
    (23, 23, 81, 1),
    (23, 27, 1, 4),
    (24, 24, 81, 1),
    (24, 27, 1, 4),
    (25, 25, 81, 1),
    (25, 27, 1, 4),
    (26, 26, 81, 1),
    (26, 27, 1, 4),
    (27, 27, -1, 2),
];

/// Published second-derivative values rho_j(Btilde_i) for j = 29..34
/// (0-based 28..33).
pub const TABLE_A3: &[(usize, usize, i64, i64)] = &[
    (3, 28, 27, 2),
    (3, 29, 54, 1),
    (3, 30, 27, 1),
    (6, 31, 27, 2),
    (6, 32, 27, 2),
    (6, 33, -27, 2),
    (9, 28, -45, 2),
    (9, 30, -27, 1),
    (9, 31, 9, 1),
    (9, 32, 81, 1),
    (9, 33, 27, 1),
    (12, 28, 9, 1),
    (12, 29, 36, 1),
    (12, 30, -18, 1),
    (12, 31, -45, 2),
    (12, 32, 63, 2),
    (12, 33, 9, 2),
    (15, 29, -81, 1),
    (15, 30, -27, 1),
    (16, 32, -27, 1),
    (16, 33, 27, 1),
    (18, 29, -90, 1),
    (18, 30, 45, 1),
    (18, 32, -180, 1),
    (18, 33, -45, 1),
    (21, 29, 81, 1),
    (24, 32, 81, 1),
];

/// Dense 28x28 matrix [j][i] from the sparse B table.
pub fn table_a2_dense() -> Vec<[f64; 28]> {
    let mut m = vec![[0.0; 28]; 28];
    for &(i, j, n, d) in TABLE_A2_B {
        m[j][i] = n as f64 / d as f64;
    }
    m
}

/// Dense 34x28 matrix [j][i] of rho_j(Btilde_i): rows 0..28 from the B table
/// with the published alternative rows 22..28 replaced, rows 28..34 from
/// TABLE_A3.
pub fn table_a2_a3_tilde_dense() -> Vec<[f64; 28]> {
    let mut m = vec![[0.0; 28]; 34];
    for &(i, j, n, d) in TABLE_A2_B {
        if i < 21 {
            m[j][i] = n as f64 / d as f64;
        }
    }
    for &(i, j, n, d) in TABLE_A2_BTILDE {
        m[j][i] = n as f64 / d as f64;
    }
    for &(i, j, n, d) in TABLE_A3 {
        m[j][i] = n as f64 / d as f64;
    }
    m
}

/// Cox-de Boor evaluation of all normalized B-splines of the given degree on
/// a knot vector, at parameter t. Standard recursion on the full triangle of
/// intermediate values; the right end is closed.
pub fn bspline_basis(knots: &[f64], degree: usize, t: f64) -> Vec<f64> {
    let n = knots.len() - degree - 1;
    let mut vals = vec![0.0; knots.len() - 1];
    let last = knots[knots.len() - 1];
    for j in 0..vals.len() {
        let hit = if t < last {
            knots[j] <= t && t < knots[j + 1]
        } else {
            // Closed right end: the last nonempty span wins.
            knots[j] < knots[j + 1] && t <= knots[j + 1] && knots[j + 1] >= last
        };
        vals[j] = if hit { 1.0 } else { 0.0 };
    }
    // Keep only the first span flagged when several empty spans share knots.
    if let Some(first) = vals.iter().position(|&v| v == 1.0) {
        for v in vals.iter_mut().skip(first + 1) {
            *v = 0.0;
        }
    }
    for k in 1..=degree {
        for j in 0..knots.len() - k - 1 {
            let left = if knots[j + k] > knots[j] {
                (t - knots[j]) / (knots[j + k] - knots[j]) * vals[j]
            } else {
                0.0
            };
            let right = if knots[j + k + 1] > knots[j + 1] {
                (knots[j + k + 1] - t) / (knots[j + k + 1] - knots[j + 1]) * vals[j + 1]
            } else {
                0.0
            };
            vals[j] = left + right;
        }
    }
    vals.truncate(n);
    vals
}

/// The univariate oracle for edge restrictions: C^2 cubic B-splines on the
/// open knot vector {0 x4, 1/3, 2/3, 1 x4}.
pub fn edge_bsplines(t: f64) -> Vec<f64> {
    let knots = [
        0.0,
        0.0,
        0.0,
        0.0,
        1.0 / 3.0,
        2.0 / 3.0,
        1.0,
        1.0,
        1.0,
        1.0,
    ];
    bspline_basis(&knots, 3, t)
}

/// Central finite-difference gradient of a scalar field.
pub fn fd_gradient<F: Fn(Point) -> f64>(f: &F, p: Point, h: f64) -> [f64; 2] {
    [
        (f(Point::new(p.x + h, p.y)) - f(Point::new(p.x - h, p.y))) / (2.0 * h),
        (f(Point::new(p.x, p.y + h)) - f(Point::new(p.x, p.y - h))) / (2.0 * h),
    ]
}

/// A bivariate cubic polynomial with analytic derivatives; the reconstruction
/// oracle for Hermite and smoothness tests.
#[derive(Debug, Clone)]
pub struct CubicPoly {
    /// Coefficients of x^a y^b for a + b <= 3, ordered by (a, b).
    pub coef: Vec<(u32, u32, f64)>,
}

impl CubicPoly {
    pub fn random<R: Rng>(rng: &mut R) -> CubicPoly {
        let mut coef = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=(3 - a) {
                coef.push((a, b, rng.gen_range(-2.0..2.0)));
            }
        }
        CubicPoly { coef }
    }

    pub fn constant(c: f64) -> CubicPoly {
        CubicPoly {
            coef: vec![(0, 0, c)],
        }
    }

    pub fn coordinate_x() -> CubicPoly {
        CubicPoly {
            coef: vec![(1, 0, 1.0)],
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.coef
            .iter()
            .map(|&(a, b, c)| c * p.x.powi(a as i32) * p.y.powi(b as i32))
            .sum()
    }

    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for &(a, b, c) in &self.coef {
            if a > 0 {
                g[0] += c * a as f64 * p.x.powi(a as i32 - 1) * p.y.powi(b as i32);
            }
            if b > 0 {
                g[1] += c * b as f64 * p.x.powi(a as i32) * p.y.powi(b as i32 - 1);
            }
        }
        g
    }

    pub fn hessian(&self, p: Point) -> Hessian {
        let mut h = Hessian::default();
        for &(a, b, c) in &self.coef {
            let (a, b) = (a as i32, b as i32);
            if a >= 2 {
                h.xx += c * (a * (a - 1)) as f64 * p.x.powi(a - 2) * p.y.powi(b);
            }
            if a >= 1 && b >= 1 {
                h.xy += c * (a * b) as f64 * p.x.powi(a - 1) * p.y.powi(b - 1);
            }
            if b >= 2 {
                h.yy += c * (b * (b - 1)) as f64 * p.x.powi(a) * p.y.powi(b - 2);
            }
        }
        h
    }
}

/// Random triangle with bounded aspect: vertices in [-1, 2]^2, area at least
/// `min_area`.
pub fn random_triangle<R: Rng>(rng: &mut R, min_area: f64) -> Triangle {
    loop {
        let mut p = || Point::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
        let (a, b, c) = (p(), p(), p());
        if let Ok(t) = Triangle::new(a, b, c) {
            let h = t.longest_edge();
            if t.area() >= min_area && t.area() >= 0.05 * h * h {
                return t;
            }
        }
    }
}

/// A near-degenerate triangle with the stated base : height aspect.
pub fn sliver_triangle(aspect: f64) -> Triangle {
    Triangle::new(
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.5, 1.0 / aspect),
    )
    .unwrap()
}

/// Two triangles sharing the edge (a, c) of a strictly convex quadrilateral
/// a, b, c, d; returns (left, right) with positive areas.
pub fn random_triangle_pair<R: Rng>(rng: &mut R) -> (Triangle, Triangle) {
    loop {
        let mut p = || Point::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
        let (a, b, c, d) = (p(), p(), p(), p());
        let cross = |o: Point, u: Point, v: Point| (u.x - o.x) * (v.y - o.y) - (u.y - o.y) * (v.x - o.x);
        // Convex and counterclockwise, with margin.
        let margin = 0.08;
        let sides = [
            cross(a, b, c),
            cross(b, c, d),
            cross(c, d, a),
            cross(d, a, b),
        ];
        if sides.iter().any(|&s| s < margin) {
            continue;
        }
        let left = Triangle::new(a, c, d);
        let right = Triangle::new(a, b, c);
        if let (Ok(l), Ok(r)) = (left, right) {
            let shape_ok = |t: &Triangle| {
                let h = t.longest_edge();
                t.area() >= 0.04 * h * h
            };
            if shape_ok(&l) && shape_ok(&r) {
                return (l, r);
            }
        }
    }
}

/// Uniform point inside a triangle.
pub fn random_point_in<R: Rng>(rng: &mut R, t: &Triangle) -> Point {
    let mut u: f64 = rng.gen_range(0.0..1.0);
    let mut v: f64 = rng.gen_range(0.0..1.0);
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    let [a, b, c] = t.vertices();
    Point::new(
        a.x + u * (b.x - a.x) + v * (c.x - a.x),
        a.y + u * (b.y - a.y) + v * (c.y - a.y),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn edge_bsplines_partition_unity() {
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let v = edge_bsplines(t);
            assert_eq!(v.len(), 6);
            assert_relative_eq!(v.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(v.iter().all(|&x| x >= -1e-12));
        }
        // Endpoint values.
        let v0 = edge_bsplines(0.0);
        assert_relative_eq!(v0[0], 1.0, epsilon = 1e-12);
        let v1 = edge_bsplines(1.0);
        assert_relative_eq!(v1[5], 1.0, epsilon = 1e-12);
    }
}
