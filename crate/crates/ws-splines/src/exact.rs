//! Exact rational kernel: the Wang-Shi arrangement in barycentric coordinates,
//! homogeneous cubic polynomials, and an exact simplex-spline evaluator.
//!
//! Everything here works in the barycentric plane of a canonical triangle with
//! corners P1 = (1,0), P2 = (0,1), P3 = (0,0), where a point (x, y) has
//! barycentric coordinates (x, y, 1-x-y). The split geometry and all basis
//! polynomials are triangle-independent in these coordinates, so they are
//! built once and reused for every macro-triangle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

pub(crate) type Rat = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational convertible to f64")
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub(crate) struct RatPt {
    pub x: Rat,
    pub y: Rat,
}

impl RatPt {
    pub fn new(x: Rat, y: Rat) -> Self {
        RatPt { x, y }
    }

    pub fn from_i64(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        RatPt::new(rat(xn, xd), rat(yn, yd))
    }

    /// Barycentric triple (b1, b2, b3) of the point.
    pub fn bary(&self) -> [Rat; 3] {
        let b3 = Rat::one() - &self.x - &self.y;
        [self.x.clone(), self.y.clone(), b3]
    }

    pub fn from_bary(b: &[Rat; 3]) -> Self {
        RatPt::new(b[0].clone(), b[1].clone())
    }
}

/// Twice the signed area of the triangle (a, b, c).
pub(crate) fn orient2(a: &RatPt, b: &RatPt, c: &RatPt) -> Rat {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// Affine functional a*x + b*y + c in the barycentric plane, canonicalized so
/// that the first nonzero of (a, b) equals one. Two collinear point pairs thus
/// map to the same representation, with a fixed orientation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub(crate) struct RatLine {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl RatLine {
    pub fn through(p: &RatPt, q: &RatPt) -> Self {
        let a = &p.y - &q.y;
        let b = &q.x - &p.x;
        let c = -(&a * &p.x) - &b * &p.y;
        RatLine { a, b, c }.canonical()
    }

    fn canonical(self) -> Self {
        let s = if !self.a.is_zero() {
            self.a.clone()
        } else {
            self.b.clone()
        };
        debug_assert!(!s.is_zero(), "degenerate line");
        RatLine {
            a: &self.a / &s,
            b: &self.b / &s,
            c: &self.c / &s,
        }
    }

    pub fn eval(&self, p: &RatPt) -> Rat {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn contains(&self, p: &RatPt) -> bool {
        self.eval(p).is_zero()
    }

    pub fn intersect(&self, other: &RatLine) -> Option<RatPt> {
        let det = &self.a * &other.b - &other.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let x = (&self.b * &other.c - &other.b * &self.c) / &det;
        let y = (&other.a * &self.c - &self.a * &other.c) / &det;
        Some(RatPt::new(x, y))
    }
}

/// One polygonal cell of the arrangement.
#[derive(Clone, Debug)]
pub(crate) struct RatCell {
    /// Counterclockwise loop of vertex ids.
    pub loop_vertices: Vec<usize>,
    /// A point strictly inside the cell (vertex average).
    pub sample: RatPt,
    /// Sign-vector key over the interior lines.
    pub key: u128,
}

/// The WS_d arrangement of the canonical triangle, exact.
pub(crate) struct RatSplit {
    pub degree: u32,
    pub boundary_points: Vec<RatPt>,
    pub interior_lines: Vec<RatLine>,
    pub vertices: Vec<RatPt>,
    pub cells: Vec<RatCell>,
    pub key_to_cell: HashMap<u128, usize>,
}

/// Maximum degree for which the sign vector fits the 128-bit key.
pub(crate) const MAX_SPLIT_DEGREE: u32 = 7;

fn corners() -> [RatPt; 3] {
    [
        RatPt::from_i64(1, 1, 0, 1),
        RatPt::from_i64(0, 1, 1, 1),
        RatPt::from_i64(0, 1, 0, 1),
    ]
}

fn in_closed_triangle(p: &RatPt) -> bool {
    !p.x.is_negative() && !p.y.is_negative() && !(Rat::one() - &p.x - &p.y).is_negative()
}

/// Orders direction vectors counterclockwise starting from the positive x-axis.
fn dir_cmp(u: &(Rat, Rat), v: &(Rat, Rat)) -> Ordering {
    fn half(d: &(Rat, Rat)) -> u8 {
        if d.1.is_negative() || (d.1.is_zero() && d.0.is_negative()) {
            1
        } else {
            0
        }
    }
    let (hu, hv) = (half(u), half(v));
    if hu != hv {
        return hu.cmp(&hv);
    }
    let cross = &u.0 * &v.1 - &u.1 * &v.0;
    if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

impl RatSplit {
    pub fn build(degree: u32) -> RatSplit {
        assert!(
            (1..=MAX_SPLIT_DEGREE).contains(&degree),
            "split degree must be in 1..={MAX_SPLIT_DEGREE}"
        );
        let d = degree as i64;
        let [p1, p2, p3] = corners();
        let edge_cycle = [(&p1, &p2), (&p2, &p3), (&p3, &p1)];

        // 3d boundary points, d per edge, corners included once.
        let mut boundary_points = Vec::new();
        for (a, b) in edge_cycle {
            for k in 0..d {
                let t = rat(k, d);
                boundary_points.push(RatPt::new(
                    &a.x + (&b.x - &a.x) * &t,
                    &a.y + (&b.y - &a.y) * &t,
                ));
            }
        }

        let edge_lines: Vec<RatLine> = edge_cycle
            .iter()
            .map(|(a, b)| RatLine::through(a, b))
            .collect();

        // Complete graph on the boundary points; keep distinct lines that are
        // not one of the triangle edges.
        let mut interior: BTreeSet<RatLine> = BTreeSet::new();
        for i in 0..boundary_points.len() {
            for j in (i + 1)..boundary_points.len() {
                let (u, v) = (&boundary_points[i], &boundary_points[j]);
                if edge_lines
                    .iter()
                    .any(|e| e.contains(u) && e.contains(v))
                {
                    continue;
                }
                interior.insert(RatLine::through(u, v));
            }
        }
        let interior_lines: Vec<RatLine> = interior.into_iter().collect();
        assert!(
            interior_lines.len() <= 128,
            "sign vector exceeds the 128-bit key"
        );

        // Vertices: all pairwise intersections inside the closed triangle.
        let mut all_lines = interior_lines.clone();
        all_lines.extend(edge_lines.iter().cloned());
        let mut vset: BTreeSet<RatPt> = BTreeSet::new();
        for i in 0..all_lines.len() {
            for j in (i + 1)..all_lines.len() {
                if let Some(p) = all_lines[i].intersect(&all_lines[j]) {
                    if in_closed_triangle(&p) {
                        vset.insert(p);
                    }
                }
            }
        }
        let vertices: Vec<RatPt> = vset.into_iter().collect();

        // Arrangement edges: consecutive vertices along each line.
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for line in &all_lines {
            let mut on_line: Vec<usize> = (0..vertices.len())
                .filter(|&i| line.contains(&vertices[i]))
                .collect();
            let dir = (line.b.clone(), -line.a.clone());
            on_line.sort_by(|&i, &j| {
                let ti = &dir.0 * &vertices[i].x + &dir.1 * &vertices[i].y;
                let tj = &dir.0 * &vertices[j].x + &dir.1 * &vertices[j].y;
                ti.cmp(&tj)
            });
            for w in on_line.windows(2) {
                edges.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }

        // Half-edge face extraction. Outgoing darts per vertex, CCW order.
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        let mut darts: Vec<(usize, usize)> = Vec::new();
        for &(u, v) in &edges {
            darts.push((u, v));
            darts.push((v, u));
        }
        for (di, &(u, _)) in darts.iter().enumerate() {
            out[u].push(di);
        }
        for (u, list) in out.iter_mut().enumerate() {
            list.sort_by(|&a, &b| {
                let (_, va) = darts[a];
                let (_, vb) = darts[b];
                let da = (&vertices[va].x - &vertices[u].x, &vertices[va].y - &vertices[u].y);
                let db = (&vertices[vb].x - &vertices[u].x, &vertices[vb].y - &vertices[u].y);
                dir_cmp(&da, &db)
            });
        }
        let dart_index: HashMap<(usize, usize), usize> = darts
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| ((u, v), i))
            .collect();
        // Next dart of the face on the left of (u -> v): step clockwise from
        // the reversed dart around v.
        let next_dart = |d: usize| -> usize {
            let (u, v) = darts[d];
            let rev = dart_index[&(v, u)];
            let ring = &out[v];
            let pos = ring.iter().position(|&x| x == rev).unwrap();
            ring[(pos + ring.len() - 1) % ring.len()]
        };

        let mut face_of = vec![usize::MAX; darts.len()];
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for start in 0..darts.len() {
            if face_of[start] != usize::MAX {
                continue;
            }
            let fid = faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = fid;
                cycle.push(d);
                d = next_dart(d);
                if d == start {
                    break;
                }
            }
            faces.push(cycle);
        }

        let mut cells = Vec::new();
        let mut outer_faces = 0usize;
        for cycle in &faces {
            let loop_vertices: Vec<usize> = cycle.iter().map(|&d| darts[d].0).collect();
            let mut area2 = Rat::zero();
            for k in 0..loop_vertices.len() {
                let a = &vertices[loop_vertices[k]];
                let b = &vertices[loop_vertices[(k + 1) % loop_vertices.len()]];
                area2 += &a.x * &b.y - &b.x * &a.y;
            }
            if !area2.is_positive() {
                outer_faces += 1;
                continue;
            }
            let n = rat_i(loop_vertices.len() as i64);
            let mut sx = Rat::zero();
            let mut sy = Rat::zero();
            for &v in &loop_vertices {
                sx += &vertices[v].x;
                sy += &vertices[v].y;
            }
            let sample = RatPt::new(sx / &n, sy / &n);
            cells.push(RatCell {
                loop_vertices,
                sample,
                key: 0,
            });
        }
        assert_eq!(outer_faces, 1, "arrangement must have a single outer face");
        // Euler check: V - E + F = 2.
        assert_eq!(
            vertices.len() as i64 - edges.len() as i64 + (cells.len() as i64 + 1),
            2,
            "Euler characteristic violated"
        );

        cells.sort_by(|a, b| a.sample.cmp(&b.sample));
        let mut key_to_cell = HashMap::new();
        for (i, cell) in cells.iter_mut().enumerate() {
            let mut key = 0u128;
            for (bit, line) in interior_lines.iter().enumerate() {
                let v = line.eval(&cell.sample);
                assert!(!v.is_zero(), "cell sample on an interior line");
                if v.is_positive() {
                    key |= 1u128 << bit;
                }
            }
            cell.key = key;
            let prev = key_to_cell.insert(key, i);
            assert!(prev.is_none(), "duplicate sign-vector key");
        }

        RatSplit {
            degree,
            boundary_points,
            interior_lines,
            vertices,
            cells,
            key_to_cell,
        }
    }

    /// Number of interior lines through each strictly interior vertex,
    /// together with the vertex itself. Boundary vertices are skipped.
    pub fn interior_vertex_multiplicities(&self) -> Vec<(RatPt, usize)> {
        let mut res = Vec::new();
        for v in &self.vertices {
            let b = v.bary();
            if b.iter().any(|c| !c.is_positive()) {
                continue;
            }
            let m = self
                .interior_lines
                .iter()
                .filter(|l| l.contains(v))
                .count();
            res.push((v.clone(), m));
        }
        res
    }

    /// Index of a cell whose closed polygon contains `p`; cells are convex.
    pub fn cell_containing(&self, p: &RatPt) -> Option<usize> {
        'cells: for (i, cell) in self.cells.iter().enumerate() {
            let n = cell.loop_vertices.len();
            for k in 0..n {
                let a = &self.vertices[cell.loop_vertices[k]];
                let b = &self.vertices[cell.loop_vertices[(k + 1) % n]];
                if orient2(a, b, p).is_negative() {
                    continue 'cells;
                }
            }
            return Some(i);
        }
        None
    }

    /// Locates the cell containing a strictly interior point by its exact
    /// sign vector; `p` must not lie on any interior line.
    pub fn locate_strict(&self, p: &RatPt) -> Option<usize> {
        let mut key = 0u128;
        for (bit, line) in self.interior_lines.iter().enumerate() {
            let v = line.eval(p);
            if v.is_zero() {
                return None;
            }
            if v.is_positive() {
                key |= 1u128 << bit;
            }
        }
        self.key_to_cell.get(&key).copied()
    }
}

// ---------------------------------------------------------------------------
// Homogeneous cubics in barycentric coordinates.
// ---------------------------------------------------------------------------

/// Exponent triples (a, b, c), a+b+c = 3, in the fixed monomial order used by
/// the 10-coefficient representation.
pub(crate) const CUBIC_EXPONENTS: [[u8; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

/// A homogeneous cubic in (b1, b2, b3) with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub(crate) struct Poly3 {
    pub coeffs: [Rat; 10],
}

/// Affine form a*b1 + b*b2 + c*b3 + d; homogenized via d*(b1+b2+b3).
#[derive(Clone, Debug)]
pub(crate) struct LinForm {
    pub coef: [Rat; 3],
}

impl LinForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> LinForm {
        LinForm {
            coef: [rat_i(a + d), rat_i(b + d), rat_i(c + d)],
        }
    }

    pub fn eval(&self, b: &[Rat; 3]) -> Rat {
        &self.coef[0] * &b[0] + &self.coef[1] * &b[1] + &self.coef[2] * &b[2]
    }
}

impl Poly3 {
    pub fn zero() -> Poly3 {
        Poly3::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &Rat) -> Poly3 {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &Poly3) -> Poly3 {
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        out
    }

    /// Product of three linear forms.
    pub fn from_linear_product(fs: [&LinForm; 3]) -> Poly3 {
        let mut out = Poly3::zero();
        for (i, ci) in fs[0].coef.iter().enumerate() {
            for (j, cj) in fs[1].coef.iter().enumerate() {
                for (k, ck) in fs[2].coef.iter().enumerate() {
                    let mut e = [0u8; 3];
                    e[i] += 1;
                    e[j] += 1;
                    e[k] += 1;
                    let idx = CUBIC_EXPONENTS.iter().position(|x| *x == e).unwrap();
                    out.coeffs[idx] += ci * cj * ck;
                }
            }
        }
        out
    }

    pub fn cube(f: &LinForm) -> Poly3 {
        Poly3::from_linear_product([f, f, f])
    }

    pub fn eval(&self, b: &[Rat; 3]) -> Rat {
        let mut acc = Rat::zero();
        for (c, e) in self.coeffs.iter().zip(&CUBIC_EXPONENTS) {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (bi, &ei) in b.iter().zip(e) {
                for _ in 0..ei {
                    term *= bi;
                }
            }
            acc += term;
        }
        acc
    }

    /// Directional derivative along a barycentric direction (sums to zero),
    /// evaluated at `b`.
    pub fn eval_d(&self, b: &[Rat; 3], dir: &[Rat; 3]) -> Rat {
        let mut acc = Rat::zero();
        for (c, e) in self.coeffs.iter().zip(&CUBIC_EXPONENTS) {
            if c.is_zero() {
                continue;
            }
            for i in 0..3 {
                if e[i] == 0 || dir[i].is_zero() {
                    continue;
                }
                let mut term = c * rat_i(e[i] as i64) * &dir[i];
                for j in 0..3 {
                    let pow = if j == i { e[j] - 1 } else { e[j] };
                    for _ in 0..pow {
                        term *= &b[j];
                    }
                }
                acc += term;
            }
        }
        acc
    }

    /// Second directional derivative D_{d1} D_{d2} evaluated at `b`.
    pub fn eval_dd(&self, b: &[Rat; 3], d1: &[Rat; 3], d2: &[Rat; 3]) -> Rat {
        let mut acc = Rat::zero();
        for (c, e) in self.coeffs.iter().zip(&CUBIC_EXPONENTS) {
            if c.is_zero() {
                continue;
            }
            for i in 0..3 {
                if e[i] == 0 {
                    continue;
                }
                for j in 0..3 {
                    let ej = if j == i { e[i] - 1 } else { e[j] };
                    if ej == 0 {
                        continue;
                    }
                    let factor = rat_i(e[i] as i64) * rat_i(ej as i64);
                    let mut term = c * factor * &d1[i] * &d2[j];
                    if term.is_zero() {
                        continue;
                    }
                    for k in 0..3 {
                        let mut pow = e[k];
                        if k == i {
                            pow -= 1;
                        }
                        if k == j {
                            pow -= 1;
                        }
                        for _ in 0..pow {
                            term *= &b[k];
                        }
                    }
                    acc += term;
                }
            }
        }
        acc
    }

    /// Applies a vertex permutation: returns q with q(b) = p(b∘perm), i.e.
    /// the polynomial of the image basis function on the image cell.
    pub fn permute(&self, perm: &[usize; 3]) -> Poly3 {
        let mut out = Poly3::zero();
        for (c, e) in self.coeffs.iter().zip(&CUBIC_EXPONENTS) {
            if c.is_zero() {
                continue;
            }
            let mut e2 = [0u8; 3];
            for k in 0..3 {
                e2[perm[k]] = e[k];
            }
            let idx = CUBIC_EXPONENTS.iter().position(|x| *x == e2).unwrap();
            out.coeffs[idx] = c.clone();
        }
        out
    }

    pub fn to_f64(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = rat_to_f64(c);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Exact bivariate simplex spline evaluation (B-recurrence).
// ---------------------------------------------------------------------------

/// Evaluates the unit-integral simplex spline with the given knots at `p`,
/// exactly. Returns `None` when `p` lies on a knot line (a line through two
/// distinct knots), where the pointwise recurrence is not reliable.
pub(crate) fn simplex_eval_exact(knots: &[RatPt], p: &RatPt) -> Option<Rat> {
    assert!(knots.len() >= 3 && knots.len() <= 32);
    // Reject points on knot lines.
    for i in 0..knots.len() {
        for j in (i + 1)..knots.len() {
            if knots[i] == knots[j] {
                continue;
            }
            if RatLine::through(&knots[i], &knots[j]).contains(p) {
                return None;
            }
        }
    }
    let full: u32 = (1u32 << knots.len()) - 1;
    let mut memo: HashMap<u32, Rat> = HashMap::new();
    Some(eval_mask(knots, p, full, &mut memo))
}

fn eval_mask(knots: &[RatPt], p: &RatPt, mask: u32, memo: &mut HashMap<u32, Rat>) -> Rat {
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let idx: Vec<usize> = (0..knots.len()).filter(|i| mask & (1 << i) != 0).collect();
    let value = if idx.len() == 3 {
        let (a, b, c) = (&knots[idx[0]], &knots[idx[1]], &knots[idx[2]]);
        let area2 = orient2(a, b, c);
        if area2.is_zero() {
            // Degenerate hull: zero off its supporting line, and the caller
            // guarantees p is off every knot line.
            Rat::zero()
        } else {
            let bary = bary_wrt(a, b, c, p, &area2);
            if bary.iter().all(|t| t.is_positive()) {
                (rat_i(2) / area2).abs()
            } else {
                Rat::zero()
            }
        }
    } else {
        let d = idx.len() as i64 - 3;
        // First affinely independent triple in sequence order.
        let mut triple = None;
        'outer: for a in 0..idx.len() {
            for b in (a + 1)..idx.len() {
                for c in (b + 1)..idx.len() {
                    if !orient2(&knots[idx[a]], &knots[idx[b]], &knots[idx[c]]).is_zero() {
                        triple = Some((idx[a], idx[b], idx[c]));
                        break 'outer;
                    }
                }
            }
        }
        match triple {
            // All remaining knots are collinear: the spline is supported on a
            // knot line of the original multiset, hence zero at p.
            None => Rat::zero(),
            Some((i, j, k)) => {
                let area2 = orient2(&knots[i], &knots[j], &knots[k]);
                let bary = bary_wrt(&knots[i], &knots[j], &knots[k], p, &area2);
                let mut acc = Rat::zero();
                for (slot, coeff) in [i, j, k].into_iter().zip(bary) {
                    if coeff.is_zero() {
                        continue;
                    }
                    acc += coeff * eval_mask(knots, p, mask & !(1 << slot), memo);
                }
                acc * rat_i(d + 2) / rat_i(d)
            }
        }
    };
    memo.insert(mask, value.clone());
    value
}

fn bary_wrt(a: &RatPt, b: &RatPt, c: &RatPt, p: &RatPt, area2: &Rat) -> [Rat; 3] {
    [
        orient2(p, b, c) / area2,
        orient2(a, p, c) / area2,
        orient2(a, b, p) / area2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_counts_match_known_values() {
        for (d, lines, verts) in [(1u32, 0usize, 3usize), (2, 6, 10), (3, 18, 58)] {
            let s = RatSplit::build(d);
            assert_eq!(s.interior_lines.len(), lines, "lines for d={d}");
            assert_eq!(s.vertices.len(), verts, "vertices for d={d}");
        }
        assert_eq!(RatSplit::build(1).cells.len(), 1);
        assert_eq!(RatSplit::build(2).cells.len(), 12);
        assert_eq!(RatSplit::build(3).cells.len(), 75);
    }

    #[test]
    fn ws3_interior_lines_contain_two_boundary_points() {
        let s = RatSplit::build(3);
        for line in &s.interior_lines {
            let n = s
                .boundary_points
                .iter()
                .filter(|p| line.contains(p))
                .count();
            assert_eq!(n, 2);
        }
    }

    #[test]
    fn cell_areas_sum_to_triangle_area() {
        let s = RatSplit::build(3);
        let mut total = Rat::zero();
        for cell in &s.cells {
            let n = cell.loop_vertices.len();
            let mut a2 = Rat::zero();
            for k in 0..n {
                let p = &s.vertices[cell.loop_vertices[k]];
                let q = &s.vertices[cell.loop_vertices[(k + 1) % n]];
                a2 += &p.x * &q.y - &q.x * &p.y;
            }
            assert!(a2.is_positive());
            total += a2;
        }
        assert_eq!(total, rat_i(1), "total doubled area");
    }

    #[test]
    fn cells_are_convex() {
        let s = RatSplit::build(3);
        for cell in &s.cells {
            let n = cell.loop_vertices.len();
            for k in 0..n {
                let a = &s.vertices[cell.loop_vertices[k]];
                let b = &s.vertices[cell.loop_vertices[(k + 1) % n]];
                let c = &s.vertices[cell.loop_vertices[(k + 2) % n]];
                assert!(!orient2(a, b, c).is_negative());
            }
        }
    }

    #[test]
    fn degree_zero_simplex_spline_is_inverse_area() {
        // Triangle with doubled area 2 => area 1 => M = 1 inside.
        let knots = [
            RatPt::from_i64(0, 1, 0, 1),
            RatPt::from_i64(2, 1, 0, 1),
            RatPt::from_i64(0, 1, 1, 1),
        ];
        let inside = RatPt::from_i64(1, 2, 1, 4);
        let v = simplex_eval_exact(&knots, &inside).unwrap();
        assert_eq!(v, rat_i(1));
        let outside = RatPt::from_i64(3, 1, 3, 1);
        assert_eq!(simplex_eval_exact(&knots, &outside).unwrap(), Rat::zero());
    }

    #[test]
    fn knot_insertion_identity_holds_exactly() {
        // C-recurrence spot check at degree 1: M with knots K equals the
        // mixture sum after inserting the hull centroid.
        let k = [
            RatPt::from_i64(0, 1, 0, 1),
            RatPt::from_i64(1, 1, 0, 1),
            RatPt::from_i64(0, 1, 1, 1),
            RatPt::from_i64(1, 1, 1, 1),
        ];
        let y = RatPt::from_i64(1, 3, 1, 4);
        // y = c0*k0 + c1*k1 + c2*k2 with c = (5/12, 1/3, 1/4) summing to 1.
        let c = [rat(5, 12), rat(1, 3), rat(1, 4)];
        let p = RatPt::from_i64(2, 5, 3, 7);
        let lhs = simplex_eval_exact(&k, &p).unwrap();
        let mut rhs = Rat::zero();
        for (i, ci) in c.iter().enumerate() {
            let mut child: Vec<RatPt> = k.to_vec();
            child[i] = y.clone();
            rhs += ci * simplex_eval_exact(&child, &p).unwrap();
        }
        assert_eq!(lhs, rhs);
    }
}
