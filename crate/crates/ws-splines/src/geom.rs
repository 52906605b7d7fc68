//! Triangles, barycentric coordinates, Wang-Shi split arrangements,
//! sign-vector point location, and spline-space dimension formulas.

use crate::exact::{rat_i, rat_to_f64, Rat, RatPt, RatSplit, MAX_SPLIT_DEGREE};
use num_traits::{Signed, ToPrimitive};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate triangle: vertices are collinear (doubled area {0:.3e})")]
    DegenerateTriangle(f64),
    #[error("point ({0}, {1}) is outside the triangle")]
    OutOfDomain(f64, f64),
    #[error("split degree {0} out of supported range 1..={max}", max = MAX_SPLIT_DEGREE)]
    DegreeOutOfRange(u32),
    #[error("invalid smoothness order r={r} for degree d={d}; need 0 <= r <= d-1")]
    InvalidSmoothness { d: u32, r: u32 },
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }
}

/// Barycentric coordinates with respect to some triangle; components sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bary {
    pub b: [f64; 3],
}

impl Bary {
    pub fn new(b1: f64, b2: f64, b3: f64) -> Bary {
        Bary { b: [b1, b2, b3] }
    }
}

/// An oriented triangle with cached area. Construction rejects collinear
/// vertices and reorients clockwise input (swapping the second and third
/// vertex), recording that in `reoriented`.
#[derive(Debug, Clone)]
pub struct Triangle {
    vertices: [Point; 3],
    area: f64,
    reoriented: bool,
}

impl Triangle {
    pub fn new(p1: Point, p2: Point, p3: Point) -> Result<Triangle, GeomError> {
        let signed2 = cross(p1, p2, p3);
        let scale = longest_edge([p1, p2, p3]);
        if signed2.abs() <= 1e-14 * scale * scale {
            return Err(GeomError::DegenerateTriangle(signed2));
        }
        if signed2 > 0.0 {
            Ok(Triangle {
                vertices: [p1, p2, p3],
                area: signed2 / 2.0,
                reoriented: false,
            })
        } else {
            Ok(Triangle {
                vertices: [p1, p3, p2],
                area: -signed2 / 2.0,
                reoriented: true,
            })
        }
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// True when the constructor swapped vertices to restore counterclockwise
    /// orientation.
    pub fn reoriented(&self) -> bool {
        self.reoriented
    }

    /// Length of the longest edge.
    pub fn longest_edge(&self) -> f64 {
        longest_edge(self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = self.vertices;
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// Maps a point of the plane to barycentric coordinates.
    pub fn to_bary(&self, p: Point) -> Bary {
        let [a, b, c] = self.vertices;
        let area2 = 2.0 * self.area;
        let b1 = cross(p, b, c) / area2;
        let b2 = cross(a, p, c) / area2;
        let b3 = 1.0 - b1 - b2;
        Bary::new(b1, b2, b3)
    }

    pub fn from_bary(&self, b: Bary) -> Point {
        let [p1, p2, p3] = self.vertices;
        Point::new(
            b.b[0] * p1.x + b.b[1] * p2.x + b.b[2] * p3.x,
            b.b[0] * p1.y + b.b[1] * p2.y + b.b[2] * p3.y,
        )
    }

    /// Barycentric direction of a plane vector: the differential of `to_bary`.
    pub fn dir_to_bary(&self, dx: f64, dy: f64) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let area2 = 2.0 * self.area;
        // Gradient of b1 is perpendicular to edge (b, c), etc.
        let g1 = ((b.y - c.y) / area2, (c.x - b.x) / area2);
        let g2 = ((c.y - a.y) / area2, (a.x - c.x) / area2);
        let d1 = g1.0 * dx + g1.1 * dy;
        let d2 = g2.0 * dx + g2.1 * dy;
        [d1, d2, -d1 - d2]
    }

    /// Gradients of the three barycentric coordinate functions.
    pub fn bary_gradients(&self) -> [[f64; 2]; 3] {
        let gx = self.dir_to_bary(1.0, 0.0);
        let gy = self.dir_to_bary(0.0, 1.0);
        [[gx[0], gy[0]], [gx[1], gy[1]], [gx[2], gy[2]]]
    }

    /// Inward unit normal of the edge opposite vertex `k`.
    pub fn inward_normal(&self, k: usize) -> [f64; 2] {
        let [a, b] = match k {
            0 => [self.vertices[1], self.vertices[2]],
            1 => [self.vertices[2], self.vertices[0]],
            _ => [self.vertices[0], self.vertices[1]],
        };
        let (tx, ty) = (b.x - a.x, b.y - a.y);
        let len = (tx * tx + ty * ty).sqrt();
        // Vertices are counterclockwise, so the interior lies left of (a, b).
        [-ty / len, tx / len]
    }
}

fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn longest_edge(v: [Point; 3]) -> f64 {
    let mut h = 0.0f64;
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        h = h.max(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
    }
    h
}

/// Normalized line equation a*x + b*y + c with a^2 + b^2 = 1 and the first
/// nonzero of (a, b) positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEq {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineEq {
    fn from_raw(a: f64, b: f64, c: f64) -> LineEq {
        let norm = (a * a + b * b).sqrt();
        let (mut a, mut b, mut c) = (a / norm, b / norm, c / norm);
        let lead = if a.abs() > 1e-14 { a } else { b };
        if lead < 0.0 {
            a = -a;
            b = -b;
            c = -c;
        }
        LineEq { a, b, c }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }
}

/// Identifier of a polygonal cell in a [`WsSplit`].
pub type CellId = usize;

/// The Wang-Shi split of a macro-triangle: the line arrangement of the
/// complete graph on the 3d uniform boundary points, with a sign-vector cell
/// index for point location. Immutable after construction.
pub struct WsSplit {
    triangle: Triangle,
    degree: u32,
    canonical: Arc<RatSplit>,
    boundary_points: Vec<Point>,
    interior_lines: Vec<LineEq>,
    /// Signed-distance functionals in plane coordinates, oriented to agree
    /// with the canonical barycentric sign convention.
    oriented: Vec<(f64, f64, f64)>,
    vertices: Vec<Point>,
    tie_tol: f64,
}

impl WsSplit {
    pub fn new(triangle: Triangle, degree: u32) -> Result<WsSplit, GeomError> {
        if !(1..=MAX_SPLIT_DEGREE).contains(&degree) {
            return Err(GeomError::DegreeOutOfRange(degree));
        }
        let canonical = canonical_split(degree);
        Ok(WsSplit::with_canonical(triangle, canonical))
    }

    pub(crate) fn with_canonical(triangle: Triangle, canonical: Arc<RatSplit>) -> WsSplit {
        let to_plane = |p: &RatPt| {
            let b = p.bary();
            triangle.from_bary(Bary::new(
                rat_to_f64(&b[0]),
                rat_to_f64(&b[1]),
                rat_to_f64(&b[2]),
            ))
        };
        let boundary_points: Vec<Point> = canonical.boundary_points.iter().map(to_plane).collect();
        let vertices: Vec<Point> = canonical.vertices.iter().map(to_plane).collect();

        // Compose each barycentric functional with the plane-to-barycentric
        // map, then rescale to a unit normal without flipping orientation.
        let g = triangle.bary_gradients();
        let [p1, _, _] = triangle.vertices();
        let mut interior_lines = Vec::new();
        let mut oriented = Vec::new();
        for line in &canonical.interior_lines {
            let (la, lb, lc) = (
                rat_to_f64(&line.a),
                rat_to_f64(&line.b),
                rat_to_f64(&line.c),
            );
            // f(x, y) = la*b1(x,y) + lb*b2(x,y) + lc
            let ax = la * g[0][0] + lb * g[1][0];
            let ay = la * g[0][1] + lb * g[1][1];
            // b1(p1) = 1, b2(p1) = 0.
            let c0 = la + lc - (ax * p1.x + ay * p1.y);
            let norm = (ax * ax + ay * ay).sqrt();
            oriented.push((ax / norm, ay / norm, c0 / norm));
            interior_lines.push(LineEq::from_raw(ax, ay, c0));
        }
        let tie_tol = 1e-12 * triangle.longest_edge();
        WsSplit {
            triangle,
            degree: canonical.degree,
            canonical,
            boundary_points,
            interior_lines,
            oriented,
            vertices,
            tie_tol,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn triangle(&self) -> &Triangle {
        &self.triangle
    }

    pub fn boundary_points(&self) -> &[Point] {
        &self.boundary_points
    }

    pub fn interior_lines(&self) -> &[LineEq] {
        &self.interior_lines
    }

    /// All arrangement vertices (boundary points included), deduplicated.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cell_count(&self) -> usize {
        self.canonical.cells.len()
    }

    /// Vertex-id loop (counterclockwise) of one cell polygon.
    pub fn cell_polygon(&self, cell: CellId) -> &[usize] {
        &self.canonical.cells[cell].loop_vertices
    }

    /// Sign-vector key of a cell.
    pub fn cell_key(&self, cell: CellId) -> u128 {
        self.canonical.cells[cell].key
    }

    /// Map from sign-vector key to cell id.
    pub fn keys(&self) -> HashMap<u128, CellId> {
        self.canonical.key_to_cell.clone()
    }

    /// A point strictly inside the given cell.
    pub fn cell_sample(&self, cell: CellId) -> Point {
        let b = self.canonical.cells[cell].sample.bary();
        self.triangle.from_bary(Bary::new(
            rat_to_f64(&b[0]),
            rat_to_f64(&b[1]),
            rat_to_f64(&b[2]),
        ))
    }

    pub(crate) fn canonical(&self) -> &RatSplit {
        &self.canonical
    }

    /// Sign-vector key of an arbitrary point, with the on-line tie rule:
    /// functional values within `1e-12 * h` of zero count as positive.
    pub fn sign_key(&self, p: Point) -> u128 {
        let mut key = 0u128;
        for (bit, (a, b, c)) in self.oriented.iter().enumerate() {
            if a * p.x + b * p.y + c >= -self.tie_tol {
                key |= 1u128 << bit;
            }
        }
        key
    }

    /// Locates the cell whose interior contains `p`. Points on knot lines
    /// resolve to the adjacent cell selected by the tie rule; all candidate
    /// cells give identical spline values there by C^2 continuity.
    pub fn locate(&self, p: Point) -> Result<CellId, GeomError> {
        let bary = self.triangle.to_bary(p);
        let tol = self.tie_tol / self.triangle.longest_edge();
        if bary.b.iter().any(|&v| v < -1e3 * tol) {
            return Err(GeomError::OutOfDomain(p.x, p.y));
        }
        let key = self.sign_key(p);
        if let Some(&cell) = self.canonical.key_to_cell.get(&key) {
            return Ok(cell);
        }
        // The all-positive assignment at a multi-line concurrence may not be a
        // realizable sign pattern. Flip the nearly-zero bits, fewest flips and
        // lowest bit pattern first, until a real cell key appears.
        let near: Vec<usize> = self
            .oriented
            .iter()
            .enumerate()
            .filter(|(_, (a, b, c))| (a * p.x + b * p.y + c).abs() <= self.tie_tol)
            .map(|(i, _)| i)
            .collect();
        let mut masks: Vec<u32> = (1u32..(1 << near.len())).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for m in masks {
            let mut k = key;
            for (j, &bit) in near.iter().enumerate() {
                if m & (1 << j) != 0 {
                    k &= !(1u128 << bit);
                }
            }
            if let Some(&cell) = self.canonical.key_to_cell.get(&k) {
                return Ok(cell);
            }
        }
        // Still nothing: p sits outside every cell's sign pattern, which for
        // an in-domain point only happens under heavy rounding. Fall back to
        // the nearest cell sample.
        let mut best = (f64::INFINITY, 0usize);
        for id in 0..self.cell_count() {
            let s = self.cell_sample(id);
            let d2 = (s.x - p.x).powi(2) + (s.y - p.y).powi(2);
            if d2 < best.0 {
                best = (d2, id);
            }
        }
        Ok(best.1)
    }

    /// Cross-cut statistics of this split: every interior line is a full
    /// chord of the triangle.
    pub fn crosscut_stats(&self) -> CrossCutStats {
        let interior_vertices = self
            .canonical
            .interior_vertex_multiplicities()
            .into_iter()
            .map(|(p, m)| {
                let b = p.bary();
                (
                    self.triangle.from_bary(Bary::new(
                        rat_to_f64(&b[0]),
                        rat_to_f64(&b[1]),
                        rat_to_f64(&b[2]),
                    )),
                    m,
                )
            })
            .collect();
        CrossCutStats {
            cross_cuts: self.interior_lines.len(),
            interior_vertices,
        }
    }
}

/// Cross-cut partition statistics: the number of cross-cuts and, per interior
/// vertex, how many cross-cuts pass through it.
#[derive(Debug, Clone)]
pub struct CrossCutStats {
    pub cross_cuts: usize,
    pub interior_vertices: Vec<(Point, usize)>,
}

impl CrossCutStats {
    pub fn empty() -> CrossCutStats {
        CrossCutStats {
            cross_cuts: 0,
            interior_vertices: Vec::new(),
        }
    }
}

/// Dimension of the C^r spline space of degree d over a cross-cut partition
/// of a simply connected domain.
pub fn crosscut_dimension(d: u32, r: u32, stats: &CrossCutStats) -> Result<i64, GeomError> {
    if d == 0 || r > d - 1 {
        return Err(GeomError::InvalidSmoothness { d, r });
    }
    let (d, r) = (d as i64, r as i64);
    let mut dim = rat_i((d + 2) * (d + 1) / 2) + rat_i(stats.cross_cuts as i64 * binom2(d - r + 1));
    for &(_, mk) in &stats.interior_vertices {
        dim += varsigma(d, r, mk as i64);
    }
    debug_assert!(dim.is_integer());
    Ok(dim.to_integer().to_i64().expect("dimension fits i64"))
}

fn binom2(n: i64) -> i64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// The vertex correction term of the cross-cut dimension formula.
fn varsigma(d: i64, r: i64, l: i64) -> Rat {
    assert!(l >= 2, "at least two cross-cuts meet at an interior vertex");
    let fl = (r + 1).div_euclid(l - 1);
    let first = (d - r - fl).max(0);
    let second = (l - 1) * d - (l + 1) * r + (l - 3) + (l - 1) * fl;
    rat_i(first) * rat_i(second) / rat_i(2)
}

/// Dimension of the C^{d-1} spline space on the WS_d split of one triangle:
/// dim P_d plus the number of interior lines. Valid while at most d+1 lines
/// meet at an interior vertex, which holds through d = 8.
pub fn ws_dimension(d: u32) -> i64 {
    let d = d as i64;
    (d + 2) * (d + 1) / 2 + 3 * d * (d - 1)
}

// Canonical splits are triangle-independent; cache them per degree.
static CANONICAL: std::sync::OnceLock<std::sync::Mutex<HashMap<u32, Arc<RatSplit>>>> =
    std::sync::OnceLock::new();

pub(crate) fn canonical_split(degree: u32) -> Arc<RatSplit> {
    let cache = CANONICAL.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("canonical split cache poisoned");
    guard
        .entry(degree)
        .or_insert_with(|| Arc::new(RatSplit::build(degree)))
        .clone()
}

/// Exact sign of the i-th interior line at a plane point, used by tests as a
/// brute-force oracle for `locate`.
pub fn brute_force_key(split: &WsSplit, p: Point) -> u128 {
    let bary = split.triangle().to_bary(p);
    let pb = RatPt::new(
        Rat::from_float(bary.b[0]).expect("finite"),
        Rat::from_float(bary.b[1]).expect("finite"),
    );
    let mut key = 0u128;
    for (bit, line) in split.canonical().interior_lines.iter().enumerate() {
        let v = line.eval(&pb);
        if !v.is_negative() {
            key |= 1u128 << bit;
        }
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tri() -> Triangle {
        Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn to_bary_identities() {
        let t = Triangle::new(
            Point::new(0.3, -0.2),
            Point::new(2.1, 0.4),
            Point::new(0.7, 1.9),
        )
        .unwrap();
        let b = t.to_bary(t.vertex(0));
        assert_relative_eq!(b.b[0], 1.0, epsilon = 1e-12);
        let c = t.to_bary(t.centroid());
        for v in c.b {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-12);
        }
        // p_{1,2} = (2/3) p2 + (1/3) p3 has barycentric (0, 2/3, 1/3).
        let [_, p2, p3] = t.vertices();
        let p12 = Point::new(
            (2.0 * p2.x + p3.x) / 3.0,
            (2.0 * p2.y + p3.y) / 3.0,
        );
        let b = t.to_bary(p12);
        assert_relative_eq!(b.b[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(b.b[1], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(b.b[2], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn clockwise_input_is_reindexed() {
        let t = Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
        )
        .unwrap();
        assert!(t.reoriented());
        assert!(t.area() > 0.0);
        assert!(Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0)
        )
        .is_err());
    }

    #[test]
    fn split_counts() {
        for (d, lines, verts) in [(2u32, 6, 10), (3, 18, 58)] {
            let s = WsSplit::new(tri(), d).unwrap();
            assert_eq!(s.interior_lines().len(), lines);
            assert_eq!(s.vertices().len(), verts);
        }
        let s1 = WsSplit::new(tri(), 1).unwrap();
        assert_eq!(s1.interior_lines().len(), 0);
        assert_eq!(s1.vertices().len(), 3);
        assert_eq!(s1.cell_count(), 1);
    }

    #[test]
    fn locate_returns_cell_of_sample_points() {
        let s = WsSplit::new(tri(), 3).unwrap();
        for id in 0..s.cell_count() {
            assert_eq!(s.locate(s.cell_sample(id)).unwrap(), id);
        }
        assert!(s.locate(Point::new(2.0, 2.0)).is_err());
    }

    #[test]
    fn locate_centroid_matches_brute_force_signs() {
        let s = WsSplit::new(tri(), 3).unwrap();
        let q = s.triangle().centroid();
        let id = s.locate(q).unwrap();
        // The centroid is an arrangement vertex; the returned cell's closed
        // polygon must contain it.
        let poly = s.cell_polygon(id);
        let verts = s.vertices();
        for k in 0..poly.len() {
            let a = verts[poly[k]];
            let b = verts[poly[(k + 1) % poly.len()]];
            let orient = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
            assert!(orient >= -1e-12);
        }
    }

    #[test]
    fn crosscut_dimension_formulas() {
        let stats3 = WsSplit::new(tri(), 3).unwrap().crosscut_stats();
        assert_eq!(crosscut_dimension(3, 2, &stats3).unwrap(), 28);
        let stats2 = WsSplit::new(tri(), 2).unwrap().crosscut_stats();
        assert_eq!(crosscut_dimension(2, 1, &stats2).unwrap(), 12);
        assert_eq!(crosscut_dimension(1, 0, &CrossCutStats::empty()).unwrap(), 3);
        assert_eq!(ws_dimension(1), 3);
        assert_eq!(ws_dimension(2), 12);
        assert_eq!(ws_dimension(3), 28);
        assert!(crosscut_dimension(3, 3, &CrossCutStats::empty()).is_err());
    }

    #[test]
    fn crosscut_matches_ws_dimension_for_supported_degrees() {
        for d in [2u32, 3, 4] {
            let stats = WsSplit::new(tri(), d).unwrap().crosscut_stats();
            assert_eq!(
                crosscut_dimension(d, d - 1, &stats).unwrap(),
                ws_dimension(d),
                "degree {d}"
            );
        }
    }

    #[test]
    fn interior_vertex_multiplicities_are_at_least_two() {
        let stats = WsSplit::new(tri(), 3).unwrap().crosscut_stats();
        assert!(stats.interior_vertices.iter().all(|&(_, m)| m >= 2));
        // 49 strictly interior vertices for the WS3 split.
        assert_eq!(stats.interior_vertices.len(), 49);
    }

    #[test]
    fn cell_polygon_areas_sum_to_triangle_area() {
        let t = Triangle::new(
            Point::new(0.1, 0.2),
            Point::new(2.3, 0.1),
            Point::new(0.8, 1.7),
        )
        .unwrap();
        let area = t.area();
        let s = WsSplit::new(t, 3).unwrap();
        let verts = s.vertices();
        let mut total = 0.0;
        for id in 0..s.cell_count() {
            let poly = s.cell_polygon(id);
            let mut a2 = 0.0;
            for k in 0..poly.len() {
                let p = verts[poly[k]];
                let q = verts[poly[(k + 1) % poly.len()]];
                a2 += p.x * q.y - q.x * p.y;
            }
            total += a2 / 2.0;
        }
        assert_relative_eq!(total, area, epsilon = 1e-9 * area);
    }
}
