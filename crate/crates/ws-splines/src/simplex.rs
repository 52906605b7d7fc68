//! Generic bivariate simplex splines: evaluation, differentiation, and knot
//! insertion through the three recurrences.

use crate::geom::Point;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("a simplex spline needs at least three knots, got {0}")]
    TooFewKnots(usize),
    #[error("degenerate knot set: the convex hull has no area")]
    DegenerateKnotSet,
    #[error("evaluation point lies on a knot line")]
    OnKnotLine,
    #[error("insertion point is outside the affine span of the knots")]
    OutsideAffineSpan,
}

/// What to do when an evaluation point lies on a knot line, where the
/// pointwise recurrences break down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnLinePolicy {
    /// Report [`SimplexError::OnKnotLine`].
    Error,
    /// Move the point by 1e-9 times the hull diameter into the cell on the
    /// positive side of every nearby knot line (the tie rule), and evaluate
    /// there. For C^2 splines the perturbed value is correct to about 1e-8.
    #[default]
    Perturb,
}

/// A multiset of planar knots; repetitions encode multiplicity. The spline
/// degree is `len - 3`.
#[derive(Debug, Clone)]
pub struct KnotMultiset {
    knots: Vec<Point>,
    scale: f64,
}

impl KnotMultiset {
    pub fn new(knots: Vec<Point>) -> Result<KnotMultiset, SimplexError> {
        if knots.len() < 3 {
            return Err(SimplexError::TooFewKnots(knots.len()));
        }
        assert!(knots.len() <= 24, "knot multiset too large");
        let scale = diameter(&knots);
        let ks = KnotMultiset { knots, scale };
        if !ks.has_independent_triple() {
            return Err(SimplexError::DegenerateKnotSet);
        }
        Ok(ks)
    }

    pub fn knots(&self) -> &[Point] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.len() - 3
    }

    fn has_independent_triple(&self) -> bool {
        let n = self.knots.len();
        let tol = 1e-13 * self.scale * self.scale;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    if orient(self.knots[i], self.knots[j], self.knots[k]).abs() > tol {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Distinct knot lines: lines through at least two distinct knots.
    fn knot_lines(&self) -> Vec<(f64, f64, f64)> {
        let mut lines: Vec<(f64, f64, f64)> = Vec::new();
        let tol = 1e-12 * self.scale;
        for i in 0..self.knots.len() {
            for j in (i + 1)..self.knots.len() {
                let (p, q) = (self.knots[i], self.knots[j]);
                let (dx, dy) = (q.x - p.x, q.y - p.y);
                let len = (dx * dx + dy * dy).sqrt();
                if len <= tol {
                    continue;
                }
                let (a, b) = (-dy / len, dx / len);
                let c = -(a * p.x + b * p.y);
                if !lines.iter().any(|&(la, lb, lc)| {
                    (la * a + lb * b).abs() > 1.0 - 1e-12
                        && (lc - (la * a + lb * b).signum() * c).abs() <= tol
                }) {
                    lines.push((a, b, c));
                }
            }
        }
        lines
    }

    /// Value of the unit-integral simplex spline M at `p`.
    pub fn eval(&self, p: Point, policy: OnLinePolicy) -> Result<f64, SimplexError> {
        let p = self.resolve_point(p, policy)?;
        let mut memo = HashMap::new();
        Ok(self.eval_mask(self.full_mask(), p, &mut memo))
    }

    /// Directional derivative D_dir M at `p` via the differentiation formula.
    pub fn eval_derivative(
        &self,
        p: Point,
        dir: [f64; 2],
        policy: OnLinePolicy,
    ) -> Result<f64, SimplexError> {
        let p = self.resolve_point(p, policy)?;
        let d = self.degree();
        if d == 0 {
            return Ok(0.0);
        }
        let mask = self.full_mask();
        let (i, j, k) = self
            .independent_triple(mask)
            .expect("validated at construction");
        // Solve sum a_m knot_m = dir with sum a_m = 0 over the triple.
        let (ki, kj, kk) = (self.knots[i], self.knots[j], self.knots[k]);
        let det = orient(ki, kj, kk);
        let ai = (dir[0] * (kj.y - kk.y) - dir[1] * (kj.x - kk.x)) / det;
        let aj = (dir[1] * (ki.x - kk.x) - dir[0] * (ki.y - kk.y)) / det;
        let ak = -ai - aj;
        let mut memo = HashMap::new();
        let mut acc = 0.0;
        for (slot, coeff) in [(i, ai), (j, aj), (k, ak)] {
            if coeff == 0.0 {
                continue;
            }
            acc += coeff * self.eval_mask(mask & !(1 << slot), p, &mut memo);
        }
        Ok((d as f64 + 2.0) * acc)
    }

    /// Knot insertion: returns (c_i, multiset with knot i replaced by y) terms
    /// whose spline mixture reproduces M exactly. Coefficients are chosen to
    /// use the fewest knots: an exact knot match, then a two-knot segment
    /// through y, then the first affinely independent triple.
    pub fn insert_knot(&self, y: Point) -> Result<Vec<(f64, KnotMultiset)>, SimplexError> {
        let tol = 1e-12 * self.scale.max(1.0);
        let child = |slot: usize| -> KnotMultiset {
            let mut knots = self.knots.clone();
            knots[slot] = y;
            let scale = diameter(&knots);
            KnotMultiset { knots, scale }
        };
        // y equal to an existing knot: identity decomposition.
        for (slot, k) in self.knots.iter().enumerate() {
            if (k.x - y.x).abs() <= tol && (k.y - y.y).abs() <= tol {
                return Ok(vec![(1.0, self.clone())]);
            }
            let _ = slot;
        }
        // Two-term: y on the segment spanned by two knots.
        for i in 0..self.knots.len() {
            for j in (i + 1)..self.knots.len() {
                let (a, b) = (self.knots[i], self.knots[j]);
                let (ux, uy) = (b.x - a.x, b.y - a.y);
                let len2 = ux * ux + uy * uy;
                if len2 <= tol * tol {
                    continue;
                }
                let cross = (y.x - a.x) * uy - (y.y - a.y) * ux;
                if cross.abs() > tol * len2.sqrt() {
                    continue;
                }
                let t = ((y.x - a.x) * ux + (y.y - a.y) * uy) / len2;
                return Ok(vec![(1.0 - t, child(i)), (t, child(j))]);
            }
        }
        // General: barycentric over the first independent triple.
        let (i, j, k) = self
            .independent_triple(self.full_mask())
            .ok_or(SimplexError::DegenerateKnotSet)?;
        let (ki, kj, kk) = (self.knots[i], self.knots[j], self.knots[k]);
        let det = orient(ki, kj, kk);
        let ci = orient(y, kj, kk) / det;
        let cj = orient(ki, y, kk) / det;
        let ck = 1.0 - ci - cj;
        Ok(vec![(ci, child(i)), (cj, child(j)), (ck, child(k))])
    }

    fn full_mask(&self) -> u32 {
        (1u32 << self.knots.len()) - 1
    }

    fn resolve_point(&self, p: Point, policy: OnLinePolicy) -> Result<Point, SimplexError> {
        let tol = 1e-12 * self.scale;
        let near: Vec<(f64, f64, f64)> = self
            .knot_lines()
            .into_iter()
            .filter(|&(a, b, c)| (a * p.x + b * p.y + c).abs() <= tol)
            .collect();
        if near.is_empty() {
            return Ok(p);
        }
        match policy {
            OnLinePolicy::Error => Err(SimplexError::OnKnotLine),
            OnLinePolicy::Perturb => {
                // Step toward the positive side of every nearby line.
                let (mut dx, mut dy) = (0.0, 0.0);
                for &(a, b, _) in &near {
                    dx += a;
                    dy += b;
                }
                let len = (dx * dx + dy * dy).sqrt();
                if len <= 1e-6 {
                    let (a, b, _) = near[0];
                    dx = -b;
                    dy = a;
                }
                let len = (dx * dx + dy * dy).sqrt();
                let step = 1e-9 * self.scale;
                Ok(Point::new(p.x + step * dx / len, p.y + step * dy / len))
            }
        }
    }

    fn independent_triple(&self, mask: u32) -> Option<(usize, usize, usize)> {
        let idx: Vec<usize> = (0..self.knots.len())
            .filter(|i| mask & (1 << i) != 0)
            .collect();
        let tol = 1e-13 * self.scale * self.scale;
        let mut fallback = None;
        for a in 0..idx.len() {
            for b in (a + 1)..idx.len() {
                for c in (b + 1)..idx.len() {
                    let (i, j, k) = (idx[a], idx[b], idx[c]);
                    if orient(self.knots[i], self.knots[j], self.knots[k]).abs() <= tol {
                        continue;
                    }
                    if fallback.is_none() {
                        fallback = Some((i, j, k));
                    }
                    // Prefer a triple whose children keep a nondegenerate hull.
                    if [i, j, k]
                        .iter()
                        .all(|&s| self.mask_has_area(mask & !(1 << s), tol))
                    {
                        return Some((i, j, k));
                    }
                }
            }
        }
        fallback
    }

    fn mask_has_area(&self, mask: u32, tol: f64) -> bool {
        let idx: Vec<usize> = (0..self.knots.len())
            .filter(|i| mask & (1 << i) != 0)
            .collect();
        for a in 0..idx.len() {
            for b in (a + 1)..idx.len() {
                for c in (b + 1)..idx.len() {
                    if orient(self.knots[idx[a]], self.knots[idx[b]], self.knots[idx[c]]).abs()
                        > tol
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn eval_mask(&self, mask: u32, p: Point, memo: &mut HashMap<u32, f64>) -> f64 {
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let value = if mask.count_ones() == 3 {
            let idx: Vec<usize> = (0..self.knots.len())
                .filter(|i| mask & (1 << i) != 0)
                .collect();
            let (a, b, c) = (self.knots[idx[0]], self.knots[idx[1]], self.knots[idx[2]]);
            let area2 = orient(a, b, c);
            if area2.abs() <= 1e-13 * self.scale * self.scale {
                // Degenerate child: zero off its supporting line, and the
                // evaluation point has been moved off every knot line.
                0.0
            } else {
                let b1 = orient(p, b, c) / area2;
                let b2 = orient(a, p, c) / area2;
                let b3 = 1.0 - b1 - b2;
                if b1 > 0.0 && b2 > 0.0 && b3 > 0.0 {
                    2.0 / area2.abs()
                } else {
                    0.0
                }
            }
        } else {
            let d = mask.count_ones() as f64 - 3.0;
            match self.independent_triple(mask) {
                None => 0.0, // all remaining knots collinear
                Some((i, j, k)) => {
                    let (ki, kj, kk) = (self.knots[i], self.knots[j], self.knots[k]);
                    let det = orient(ki, kj, kk);
                    let b1 = orient(p, kj, kk) / det;
                    let b2 = orient(ki, p, kk) / det;
                    let b3 = 1.0 - b1 - b2;
                    let mut acc = 0.0;
                    for (slot, coeff) in [(i, b1), (j, b2), (k, b3)] {
                        if coeff == 0.0 {
                            continue;
                        }
                        acc += coeff * self.eval_mask(mask & !(1 << slot), p, memo);
                    }
                    acc * (d + 2.0) / d
                }
            }
        };
        memo.insert(mask, value);
        value
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn diameter(knots: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..knots.len() {
        for j in (i + 1)..knots.len() {
            let (a, b) = (knots[i], knots[j]);
            d = d.max(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn triple_point_is_rejected() {
        let a = Point::new(0.5, 0.5);
        assert!(matches!(
            KnotMultiset::new(vec![a, a, a]),
            Err(SimplexError::DegenerateKnotSet)
        ));
    }

    #[test]
    fn degree_zero_value_is_inverse_area() {
        // Area-2 triangle.
        let ks = KnotMultiset::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 2.0),
        ])
        .unwrap();
        let v = ks.eval(Point::new(0.4, 0.3), OnLinePolicy::Error).unwrap();
        assert_relative_eq!(v, 0.5, epsilon = 1e-14);
        let outside = ks.eval(Point::new(3.0, 3.0), OnLinePolicy::Error).unwrap();
        assert_eq!(outside, 0.0);
    }

    #[test]
    fn support_and_nonnegativity_sampled() {
        let mut rng = StdRng::seed_from_u64(42);
        let ks = KnotMultiset::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.1),
            Point::new(0.8, 0.9),
            Point::new(0.1, 1.0),
            Point::new(0.5, 0.4),
            Point::new(0.9, 0.5),
        ])
        .unwrap();
        for _ in 0..1000 {
            let p = Point::new(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
            let hull_margin = 1.5;
            let v = match ks.eval(p, OnLinePolicy::Error) {
                Ok(v) => v,
                Err(SimplexError::OnKnotLine) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(v >= -1e-12, "nonnegativity at ({}, {})", p.x, p.y);
            let far = p.x < -0.1 || p.y < -0.1 || p.x > hull_margin || p.y > hull_margin;
            if far {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn knot_order_does_not_change_values() {
        let base = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.3, 0.6),
        ];
        let ks = KnotMultiset::new(base.clone()).unwrap();
        let mut rev = base.clone();
        rev.reverse();
        let ks2 = KnotMultiset::new(rev).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let p = Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let (a, b) = match (ks.eval(p, OnLinePolicy::Error), ks2.eval(p, OnLinePolicy::Error)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let ks = KnotMultiset::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.4, 0.2),
            Point::new(0.7, 0.8),
        ])
        .unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 50 {
            let p = Point::new(rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
            let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let exact = match ks.eval_derivative(p, dir, OnLinePolicy::Error) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let fp = ks.eval(
                Point::new(p.x + h * dir[0], p.y + h * dir[1]),
                OnLinePolicy::Perturb,
            );
            let fm = ks.eval(
                Point::new(p.x - h * dir[0], p.y - h * dir[1]),
                OnLinePolicy::Perturb,
            );
            let (fp, fm) = match (fp, fm) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let fd = (fp - fm) / (2.0 * h);
            if exact.abs() > 1e-3 {
                assert_relative_eq!(exact, fd, max_relative = 1e-5);
                checked += 1;
            }
        }
    }

    #[test]
    fn zero_direction_gives_zero_derivative() {
        let ks = KnotMultiset::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.5),
        ])
        .unwrap();
        let v = ks
            .eval_derivative(Point::new(0.3, 0.3001), [0.0, 0.0], OnLinePolicy::Perturb)
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn insert_knot_reproduces_spline() {
        let ks = KnotMultiset::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.9, 1.1),
            Point::new(0.2, 0.7),
            Point::new(0.8, 0.3),
        ])
        .unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        // Existing knot, a midpoint of two knots, and a centroid of three
        // (off every knot line, so the sparse search settles on a triple).
        let cases = [
            (Point::new(1.0, 0.0), 1),
            (Point::new(0.5, 0.0), 2),
            (Point::new(1.0 / 3.0, 1.0 / 3.0), 3),
        ];
        for (y, terms) in cases {
            let dec = ks.insert_knot(y).unwrap();
            assert_eq!(dec.len(), terms);
            assert_relative_eq!(dec.iter().map(|(c, _)| c).sum::<f64>(), 1.0, epsilon = 1e-12);
            for _ in 0..100 {
                let p = Point::new(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
                let lhs = match ks.eval(p, OnLinePolicy::Error) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let mut rhs = 0.0;
                let mut ok = true;
                for (c, child) in &dec {
                    match child.eval(p, OnLinePolicy::Error) {
                        Ok(v) => rhs += c * v,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    assert_relative_eq!(lhs, rhs, epsilon = 1e-9, max_relative = 1e-9);
                }
            }
        }
    }
}
