//! The 28-member simplex spline bases B and B-tilde of the C^2 cubic space on
//! the WS3 split of one macro-triangle: construction, table-driven evaluation
//! and derivatives, Hermite machinery, domain points, control nets, Marsden
//! duals, and conditioning.

use crate::exact::{
    rat_i, rat_to_f64, Poly3, Rat, RatPt, RatSplit, simplex_eval_exact, CUBIC_EXPONENTS,
};
use crate::geom::{canonical_split, Bary, GeomError, Point, Triangle, WsSplit};
use crate::tables::{self, HermiteOp, KNOT_MULTISETS, MARSDEN_TRIPLES, RHO_OPS, S3};
use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use std::sync::Arc;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("collocation matrix is numerically singular")]
    SingularSystem,
    #[error("expected {expected} values, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("operation requires {expected:?} coefficients, got {got:?}")]
    WrongTag { expected: BasisTag, got: BasisTag },
}

/// Which of the two local bases a coefficient vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    B,
    BTilde,
}

/// Coefficients of a spline in one of the two local bases.
#[derive(Debug, Clone)]
pub struct LocalCoeffs {
    pub values: [f64; 28],
    pub tag: BasisTag,
}

impl LocalCoeffs {
    pub fn new(values: [f64; 28], tag: BasisTag) -> LocalCoeffs {
        LocalCoeffs { values, tag }
    }

    pub fn zeros(tag: BasisTag) -> LocalCoeffs {
        LocalCoeffs { values: [0.0; 28], tag }
    }
}

/// Symmetric 2x2 Hessian, stored as (xx, xy, yy).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hessian {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Hessian {
    /// Directional second derivative v^T H w.
    pub fn bilinear(&self, v: [f64; 2], w: [f64; 2]) -> f64 {
        v[0] * self.xx * w[0] + (v[0] * w[1] + v[1] * w[0]) * self.xy + v[1] * self.yy * w[1]
    }
}

/// Control net of a spline: the 28 control points (domain point, coefficient)
/// plus a fixed combinatorial face list over the indices.
#[derive(Debug, Clone)]
pub struct ControlNet {
    pub points: Vec<(Point, f64)>,
    pub faces: Vec<Vec<usize>>,
}

// ---------------------------------------------------------------------------
// Canonical (triangle-independent) basis data.
// ---------------------------------------------------------------------------

pub(crate) struct CanonicalBasis {
    pub split: Arc<RatSplit>,
    /// piece[i][cell]: polynomial of B_i on that cell, exact.
    pub piece: Vec<Vec<Poly3>>,
    /// f64 mirror of `piece` for evaluation.
    pub piece_f64: Vec<Vec<[f64; 10]>>,
    /// Interior line functionals as f64 (a, b, c) over (b1, b2).
    pub lines_f64: Vec<(f64, f64, f64)>,
    /// rho_j(B_i), exact, j in 0..34 rows, i in 0..28 columns.
    pub rho_b: Vec<[Rat; 28]>,
    /// rho_j(Btilde_i), exact.
    pub rho_bt: Vec<[Rat; 28]>,
    pub conversion: Vec<Vec<Rat>>,
    pub conversion_inv: Vec<Vec<Rat>>,
    pub conversion_f64: [[f64; 28]; 28],
    pub conversion_inv_f64: [[f64; 28]; 28],
    pub domain_points: [[f64; 3]; 28],
    pub alt_domain_points: [[f64; 3]; 28],
}

static CANONICAL_BASIS: OnceLock<CanonicalBasis> = OnceLock::new();

pub(crate) fn canonical_basis() -> &'static CanonicalBasis {
    CANONICAL_BASIS.get_or_init(build_canonical_basis)
}

fn knot_points_rat() -> [RatPt; 9] {
    std::array::from_fn(|i| {
        let b = tables::site_bary(i);
        RatPt::new(b[0].clone(), b[1].clone())
    })
}

/// Ten cubic-lattice points of a nondegenerate triangle strictly inside the
/// given cell; unisolvent for cubics, so exact agreement there is exact
/// polynomial equality.
fn cell_probe_points(split: &RatSplit, cell: usize) -> Vec<RatPt> {
    let c = &split.cells[cell];
    let sample = &c.sample;
    let verts: Vec<&RatPt> = c.loop_vertices.iter().map(|&v| &split.vertices[v]).collect();
    // Three non-collinear anchor points (2*sample + vertex)/3.
    let shrink = |v: &RatPt| {
        RatPt::new(
            (rat_i(2) * &sample.x + &v.x) / rat_i(3),
            (rat_i(2) * &sample.y + &v.y) / rat_i(3),
        )
    };
    let t0 = shrink(verts[0]);
    let mut anchors = vec![t0.clone()];
    for v in verts.iter().skip(1) {
        let t = shrink(v);
        if anchors.len() == 1 {
            if t != anchors[0] {
                anchors.push(t);
            }
        } else if anchors.len() == 2
            && !crate::exact::orient2(&anchors[0], &anchors[1], &t).is_zero()
        {
            anchors.push(t);
            break;
        }
    }
    assert_eq!(anchors.len(), 3, "cell has three non-collinear shrunk vertices");
    let mut pts = Vec::with_capacity(10);
    for e in CUBIC_EXPONENTS {
        let mut x = Rat::zero();
        let mut y = Rat::zero();
        for (k, a) in anchors.iter().enumerate() {
            x += rat_i(e[k] as i64) * &a.x;
            y += rat_i(e[k] as i64) * &a.y;
        }
        pts.push(RatPt::new(x / rat_i(3), y / rat_i(3)));
    }
    pts
}

fn build_canonical_basis() -> CanonicalBasis {
    let split = canonical_split(3);
    let n_cells = split.cells.len();
    let points = knot_points_rat();
    let weights = tables::weight_fractions();
    // Canonical triangle area is 1/2.
    let area = rat(1, 2);

    let mut piece: Vec<Vec<Poly3>> = vec![vec![Poly3::zero(); n_cells]; 28];
    let mut filled: Vec<Vec<bool>> = vec![vec![false; n_cells]; 28];

    // Match every cell of each representative to a published polynomial by
    // exact evaluation at ten unisolvent points.
    for (rep, candidates) in tables::representative_pieces() {
        let knots: Vec<RatPt> = KNOT_MULTISETS[rep]
            .iter()
            .map(|&k| points[k].clone())
            .collect();
        let w = &weights[rep] * &area / rat_i(15);
        for cell in 0..n_cells {
            let probes = cell_probe_points(&split, cell);
            let values: Vec<Rat> = probes
                .iter()
                .map(|p| {
                    let m = simplex_eval_exact(&knots, p)
                        .expect("probe points are off every knot line");
                    m * &w
                })
                .collect();
            let zero_match = values.iter().all(|v| v.is_zero());
            let mut found: Option<&Poly3> = None;
            for cand in &candidates {
                let ok = probes
                    .iter()
                    .zip(&values)
                    .all(|(p, v)| cand.eval(&p.bary()) == *v);
                if ok {
                    if let Some(prev) = found {
                        assert_eq!(prev, cand, "ambiguous match for basis {rep} cell {cell}");
                    } else {
                        found = Some(cand);
                    }
                }
            }
            match found {
                Some(poly) => piece[rep][cell] = poly.clone(),
                None => {
                    assert!(
                        zero_match,
                        "basis {rep} cell {cell}: recurrence values match no published piece"
                    );
                }
            }
            filled[rep][cell] = true;
        }
    }

    // Symmetry closure: transport each representative's table along the six
    // vertex permutations. Overlapping writes must agree, which re-checks the
    // tables along every orbit stabilizer.
    for perm in &S3 {
        let sigma = tables::index_permutation(perm);
        for (rep, _) in tables::representative_pieces() {
            let target = sigma[rep];
            for cell in 0..n_cells {
                let sample = &split.cells[cell].sample;
                let b = sample.bary();
                let img_b = [
                    b[inv_perm(perm)[0]].clone(),
                    b[inv_perm(perm)[1]].clone(),
                    b[inv_perm(perm)[2]].clone(),
                ];
                let img = RatPt::new(img_b[0].clone(), img_b[1].clone());
                let img_cell = split
                    .locate_strict(&img)
                    .expect("permuted cell sample stays strictly interior");
                let poly = piece[rep][cell].permute(perm);
                if filled[target][img_cell] {
                    assert_eq!(
                        piece[target][img_cell], poly,
                        "symmetry closure conflict: basis {target} cell {img_cell}"
                    );
                } else {
                    piece[target][img_cell] = poly;
                    filled[target][img_cell] = true;
                }
            }
        }
    }
    assert!(filled.iter().all(|f| f.iter().all(|&x| x)));

    // Partition of unity, exactly, on every cell.
    for cell in 0..n_cells {
        let mut total = Poly3::zero();
        for p in piece.iter() {
            total = total.add(&p[cell]);
        }
        let one = Poly3::cube(&crate::exact::LinForm::new(0, 0, 0, 1));
        assert_eq!(total, one, "partition of unity fails on cell {cell}");
    }

    let conversion = tables::conversion_matrix();
    let conversion_inv = tables::conversion_matrix_inv();

    // Btilde_i = sum_j CI[j][i] B_j.
    let bt_piece: Vec<Vec<Poly3>> = (0..28)
        .map(|i| {
            (0..n_cells)
                .map(|cell| {
                    let mut acc = Poly3::zero();
                    for j in 0..28 {
                        let t = &conversion_inv[j][i];
                        if !t.is_zero() {
                            acc = acc.add(&piece[j][cell].scale(t));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let rho_b = rho_table(&split, &piece);
    let rho_bt = rho_table(&split, &bt_piece);

    let piece_f64: Vec<Vec<[f64; 10]>> = piece
        .iter()
        .map(|row| row.iter().map(|p| p.to_f64()).collect())
        .collect();
    let lines_f64 = split
        .interior_lines
        .iter()
        .map(|l| (rat_to_f64(&l.a), rat_to_f64(&l.b), rat_to_f64(&l.c)))
        .collect();

    let mut conversion_f64 = [[0.0; 28]; 28];
    let mut conversion_inv_f64 = [[0.0; 28]; 28];
    for i in 0..28 {
        for j in 0..28 {
            conversion_f64[i][j] = rat_to_f64(&conversion[i][j]);
            conversion_inv_f64[i][j] = rat_to_f64(&conversion_inv[i][j]);
        }
    }
    let domain_points =
        std::array::from_fn(|i| std::array::from_fn(|k| point_f64(&tables::DOMAIN_POINTS[i][k])));
    let alt_domain_points = std::array::from_fn(|i| {
        std::array::from_fn(|k| point_f64(&tables::ALT_DOMAIN_POINTS[i][k]))
    });

    CanonicalBasis {
        split,
        piece,
        piece_f64,
        lines_f64,
        rho_b,
        rho_bt,
        conversion,
        conversion_inv,
        conversion_f64,
        conversion_inv_f64,
        domain_points,
        alt_domain_points,
    }
}

fn point_f64(p: &(i64, i64)) -> f64 {
    p.0 as f64 / p.1 as f64
}

fn rat(n: i64, d: i64) -> Rat {
    crate::exact::rat(n, d)
}

fn inv_perm(perm: &[usize; 3]) -> [usize; 3] {
    let mut inv = [0usize; 3];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Exact rho_j(f) for all 34 operators applied to 28 piecewise functions.
fn rho_table(split: &RatSplit, pieces: &[Vec<Poly3>]) -> Vec<[Rat; 28]> {
    let mut out = Vec::with_capacity(34);
    for op in &RHO_OPS {
        let site = tables::site_bary(op.site);
        let pt = RatPt::new(site[0].clone(), site[1].clone());
        let cell = split
            .cell_containing(&pt)
            .expect("operator sites lie inside the triangle");
        let row: [Rat; 28] = std::array::from_fn(|i| {
            let poly = &pieces[i][cell];
            apply_op_exact(op, poly, &site)
        });
        out.push(row);
    }
    out
}

fn op_dir(pair: (usize, usize)) -> [Rat; 3] {
    let a = tables::site_bary(pair.0);
    let b = tables::site_bary(pair.1);
    std::array::from_fn(|k| &b[k] - &a[k])
}

fn apply_op_exact(op: &HermiteOp, poly: &Poly3, site: &[Rat; 3]) -> Rat {
    match (op.dirs[0], op.dirs[1]) {
        (None, _) => poly.eval(site),
        (Some(d), None) => poly.eval_d(site, &op_dir(d)),
        (Some(d1), Some(d2)) => poly.eval_dd(site, &op_dir(d1), &op_dir(d2)),
    }
}

// ---------------------------------------------------------------------------
// f64 polynomial evaluation.
// ---------------------------------------------------------------------------

fn poly_eval(c: &[f64; 10], b: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for (ci, e) in c.iter().zip(&CUBIC_EXPONENTS) {
        if *ci == 0.0 {
            continue;
        }
        let mut t = *ci;
        for k in 0..3 {
            for _ in 0..e[k] {
                t *= b[k];
            }
        }
        acc += t;
    }
    acc
}

fn poly_grad_bary(c: &[f64; 10], b: &[f64; 3]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (ci, e) in c.iter().zip(&CUBIC_EXPONENTS) {
        if *ci == 0.0 {
            continue;
        }
        for i in 0..3 {
            if e[i] == 0 {
                continue;
            }
            let mut t = *ci * e[i] as f64;
            for k in 0..3 {
                let pow = if k == i { e[k] - 1 } else { e[k] };
                for _ in 0..pow {
                    t *= b[k];
                }
            }
            g[i] += t;
        }
    }
    g
}

fn poly_hess_bary(c: &[f64; 10], b: &[f64; 3]) -> [[f64; 3]; 3] {
    let mut h = [[0.0; 3]; 3];
    for (ci, e) in c.iter().zip(&CUBIC_EXPONENTS) {
        if *ci == 0.0 {
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
                let mut t = *ci * e[i] as f64 * ej as f64;
                for k in 0..3 {
                    let mut pow = e[k];
                    if k == i {
                        pow -= 1;
                    }
                    if k == j {
                        pow -= 1;
                    }
                    for _ in 0..pow {
                        t *= b[k];
                    }
                }
                h[i][j] += t;
            }
        }
    }
    h
}

// ---------------------------------------------------------------------------
// The public local basis.
// ---------------------------------------------------------------------------

/// The 28 scaled simplex splines on one macro-triangle, with the piecewise
/// polynomial tables, domain points, weights, Hermite machinery, and the
/// conversion to the alternative basis. Immutable after construction.
pub struct LocalBasis {
    triangle: Triangle,
    split: WsSplit,
    weights: [f64; 28],
}

impl LocalBasis {
    pub fn new(triangle: Triangle) -> LocalBasis {
        let canon = canonical_basis();
        let split = WsSplit::with_canonical(triangle.clone(), canon.split.clone());
        let area = triangle.area();
        let weights = std::array::from_fn(|i| {
            rat_to_f64(&tables::weight_fractions()[i]) * area / 15.0
        });
        LocalBasis {
            triangle,
            split,
            weights,
        }
    }

    pub fn triangle(&self) -> &Triangle {
        &self.triangle
    }

    pub fn split(&self) -> &WsSplit {
        &self.split
    }

    /// Scaling weights w_i; they sum to the triangle area.
    pub fn weights(&self) -> &[f64; 28] {
        &self.weights
    }

    /// Knot multiset of basis function i, as plane points.
    pub fn knots(&self, i: usize) -> Vec<Point> {
        KNOT_MULTISETS[i]
            .iter()
            .map(|&k| {
                let b = tables::site_bary(k);
                self.triangle.from_bary(Bary::new(
                    rat_to_f64(&b[0]),
                    rat_to_f64(&b[1]),
                    rat_to_f64(&b[2]),
                ))
            })
            .collect()
    }

    pub fn domain_points(&self) -> [Bary; 28] {
        std::array::from_fn(|i| Bary {
            b: canonical_basis().domain_points[i],
        })
    }

    pub fn alt_domain_points(&self) -> [Bary; 28] {
        std::array::from_fn(|i| Bary {
            b: canonical_basis().alt_domain_points[i],
        })
    }

    /// Locates the WS3 cell of a barycentric point using the sign-vector key
    /// and the on-line tie rule; shape-independent.
    pub fn locate_bary(&self, b: &[f64; 3]) -> Result<usize, GeomError> {
        let canon = canonical_basis();
        let tol = 1e-12;
        if b.iter().any(|&v| v < -1e-9) {
            let p = self.triangle.from_bary(Bary { b: *b });
            return Err(GeomError::OutOfDomain(p.x, p.y));
        }
        let mut key = 0u128;
        for (bit, (la, lb, lc)) in canon.lines_f64.iter().enumerate() {
            if la * b[0] + lb * b[1] + lc >= -tol {
                key |= 1u128 << bit;
            }
        }
        if let Some(&cell) = canon.split.key_to_cell.get(&key) {
            return Ok(cell);
        }
        // Multi-line concurrence: flip near-zero bits until a real key shows.
        let near: Vec<usize> = canon
            .lines_f64
            .iter()
            .enumerate()
            .filter(|(_, (la, lb, lc))| (la * b[0] + lb * b[1] + lc).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        let mut masks: Vec<u32> = (1u32..(1 << near.len().min(20))).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for m in masks {
            let mut k = key;
            for (j, &bit) in near.iter().enumerate() {
                if m & (1 << j) != 0 {
                    k &= !(1u128 << bit);
                }
            }
            if let Some(&cell) = canon.split.key_to_cell.get(&k) {
                return Ok(cell);
            }
        }
        let p = self.triangle.from_bary(Bary { b: *b });
        self.split.locate(p)
    }

    /// Values of all 28 basis functions at a point of the closed triangle.
    pub fn eval(&self, p: Point) -> Result<[f64; 28], GeomError> {
        self.eval_bary(&self.triangle.to_bary(p).b)
    }

    pub fn eval_bary(&self, b: &[f64; 3]) -> Result<[f64; 28], GeomError> {
        let canon = canonical_basis();
        let cell = self.locate_bary(b)?;
        Ok(std::array::from_fn(|i| {
            poly_eval(&canon.piece_f64[i][cell], b)
        }))
    }

    /// Gradients of all basis functions, in plane coordinates.
    pub fn gradients(&self, p: Point) -> Result<[[f64; 2]; 28], GeomError> {
        let b = self.triangle.to_bary(p).b;
        let canon = canonical_basis();
        let cell = self.locate_bary(&b)?;
        let g = self.triangle.bary_gradients();
        Ok(std::array::from_fn(|i| {
            let gb = poly_grad_bary(&canon.piece_f64[i][cell], &b);
            [
                gb[0] * g[0][0] + gb[1] * g[1][0] + gb[2] * g[2][0],
                gb[0] * g[0][1] + gb[1] * g[1][1] + gb[2] * g[2][1],
            ]
        }))
    }

    /// Hessians of all basis functions, in plane coordinates.
    pub fn hessians(&self, p: Point) -> Result<[Hessian; 28], GeomError> {
        let b = self.triangle.to_bary(p).b;
        let canon = canonical_basis();
        let cell = self.locate_bary(&b)?;
        let g = self.triangle.bary_gradients();
        Ok(std::array::from_fn(|i| {
            let hb = poly_hess_bary(&canon.piece_f64[i][cell], &b);
            let mut h = Hessian::default();
            for r in 0..3 {
                for s in 0..3 {
                    h.xx += hb[r][s] * g[r][0] * g[s][0];
                    h.xy += hb[r][s] * g[r][0] * g[s][1];
                    h.yy += hb[r][s] * g[r][1] * g[s][1];
                }
            }
            h
        }))
    }

    /// The matrix [rho_j(B_i)] with rows j and columns i; identical for every
    /// triangle because the operators differentiate along edge vectors.
    pub fn hermite_matrix(&self) -> DMatrix<f64> {
        let canon = canonical_basis();
        DMatrix::from_fn(28, 28, |j, i| rat_to_f64(&canon.rho_b[j][i]))
    }

    /// rho_j applied to the alternative basis functions, rows j in 0..34.
    pub fn hermite_matrix_alt(&self) -> DMatrix<f64> {
        let canon = canonical_basis();
        DMatrix::from_fn(34, 28, |j, i| rat_to_f64(&canon.rho_bt[j][i]))
    }

    /// Value of a spline given by local coefficients.
    pub fn eval_spline(&self, coeffs: &LocalCoeffs, p: Point) -> Result<f64, GeomError> {
        let b = self.to_b_tag(coeffs);
        let vals = self.eval(p)?;
        Ok(dot28(&b, &vals))
    }

    pub fn eval_spline_gradient(
        &self,
        coeffs: &LocalCoeffs,
        p: Point,
    ) -> Result<[f64; 2], GeomError> {
        let b = self.to_b_tag(coeffs);
        let g = self.gradients(p)?;
        let mut out = [0.0; 2];
        for i in 0..28 {
            out[0] += b[i] * g[i][0];
            out[1] += b[i] * g[i][1];
        }
        Ok(out)
    }

    pub fn eval_spline_hessian(
        &self,
        coeffs: &LocalCoeffs,
        p: Point,
    ) -> Result<Hessian, GeomError> {
        let b = self.to_b_tag(coeffs);
        let h = self.hessians(p)?;
        let mut out = Hessian::default();
        for i in 0..28 {
            out.xx += b[i] * h[i].xx;
            out.xy += b[i] * h[i].xy;
            out.yy += b[i] * h[i].yy;
        }
        Ok(out)
    }

    fn to_b_tag(&self, coeffs: &LocalCoeffs) -> [f64; 28] {
        match coeffs.tag {
            BasisTag::B => coeffs.values,
            BasisTag::BTilde => convert(coeffs).values,
        }
    }

    /// The Marsden dual values psi_i(y): sum_i psi_i(y) B_i(x) reproduces
    /// (1 + y.x)^3 for x in the triangle.
    pub fn marsden_duals(&self, y: [f64; 2]) -> [f64; 28] {
        let pt = |idx: usize| {
            let b = tables::site_bary(idx);
            self.triangle.from_bary(Bary::new(
                rat_to_f64(&b[0]),
                rat_to_f64(&b[1]),
                rat_to_f64(&b[2]),
            ))
        };
        let lin = |idx: usize| {
            let p = pt(idx);
            1.0 + y[0] * p.x + y[1] * p.y
        };
        let mut out = [0.0; 28];
        for (i, tri) in MARSDEN_TRIPLES.iter().enumerate() {
            out[i] = lin(tri[0]) * lin(tri[1]) * lin(tri[2]);
        }
        let q = lin(tables::QC);
        out[27] = q
            * (2.0 * q * q
                - (lin(tables::P13) * lin(tables::P23)
                    + lin(tables::P32) * lin(tables::P12)
                    + lin(tables::P31) * lin(tables::P21))
                    / 3.0);
        out
    }

    /// Control net of a B-tagged coefficient vector.
    pub fn control_net(&self, coeffs: &LocalCoeffs) -> Result<ControlNet, BasisError> {
        if coeffs.tag != BasisTag::B {
            return Err(BasisError::WrongTag {
                expected: BasisTag::B,
                got: coeffs.tag,
            });
        }
        let points = self
            .domain_points()
            .iter()
            .zip(&coeffs.values)
            .map(|(b, &v)| (self.triangle.from_bary(*b), v))
            .collect();
        Ok(ControlNet {
            points,
            faces: tables::control_net_faces(),
        })
    }

    /// Infinity norm of the inverse collocation matrix at the domain points.
    /// Bounded by 37 independently of the triangle shape.
    pub fn collocation_condition(&self) -> Result<f64, BasisError> {
        let canon = canonical_basis();
        let mut a = DMatrix::zeros(28, 28);
        for (r, xi) in canon.domain_points.iter().enumerate() {
            let vals = self
                .eval_bary(xi)
                .expect("domain points lie in the triangle");
            for c in 0..28 {
                a[(r, c)] = vals[c];
            }
        }
        let inv = a.try_inverse().ok_or(BasisError::SingularSystem)?;
        Ok(inf_norm(&inv))
    }

    /// Solves the Hermite interpolation problem: 28 data values ordered as
    /// [`hermite_data_order`] describes, producing B-tagged coefficients.
    pub fn hermite_interpolate(&self, data: &[f64]) -> Result<LocalCoeffs, BasisError> {
        if data.len() != 28 {
            return Err(BasisError::DataLength {
                expected: 28,
                got: data.len(),
            });
        }
        let a = self.hermite_collocation_matrix()?;
        let rhs = nalgebra::DVector::from_column_slice(data);
        let lu = a.lu();
        let sol = lu.solve(&rhs).ok_or(BasisError::SingularSystem)?;
        let mut values = [0.0; 28];
        for i in 0..28 {
            values[i] = sol[i];
        }
        Ok(LocalCoeffs::new(values, BasisTag::B))
    }

    /// Rows: the 28 Hermite functionals of the local interpolation problem;
    /// columns: the basis functions.
    pub fn hermite_collocation_matrix(&self) -> Result<DMatrix<f64>, BasisError> {
        let mut a = DMatrix::zeros(28, 28);
        let verts = self.triangle.vertices();
        let mut row = 0usize;
        for k in 0..3 {
            let p = verts[k];
            let vals = self.eval(p)?;
            let grads = self.gradients(p)?;
            let hess = self.hessians(p)?;
            for i in 0..28 {
                a[(row, i)] = vals[i];
                a[(row + 1, i)] = grads[i][0];
                a[(row + 2, i)] = grads[i][1];
                a[(row + 3, i)] = hess[i].xx;
                a[(row + 4, i)] = hess[i].xy;
                a[(row + 5, i)] = hess[i].yy;
            }
            row += 6;
        }
        // First normal derivatives at the edge midpoints.
        for k in 0..3 {
            let q = self.edge_midpoint(k);
            let n = self.triangle.inward_normal(k);
            let grads = self.gradients(q)?;
            for i in 0..28 {
                a[(row, i)] = grads[i][0] * n[0] + grads[i][1] * n[1];
            }
            row += 1;
        }
        // Second normal derivatives at the p_{k,l} edge points.
        for (site, k) in Self::SECOND_NORMAL_SITES {
            let p = self.site_point(site);
            let n = self.triangle.inward_normal(k);
            let hess = self.hessians(p)?;
            for i in 0..28 {
                a[(row, i)] = hess[i].bilinear(n, n);
            }
            row += 1;
        }
        let q = self.triangle.centroid();
        let vals = self.eval(q)?;
        for i in 0..28 {
            a[(row, i)] = vals[i];
        }
        Ok(a)
    }

    const SECOND_NORMAL_SITES: [(usize, usize); 6] = [
        (tables::P12, 0),
        (tables::P13, 0),
        (tables::P21, 1),
        (tables::P23, 1),
        (tables::P31, 2),
        (tables::P32, 2),
    ];

    /// Midpoint of the edge opposite vertex k.
    pub fn edge_midpoint(&self, k: usize) -> Point {
        let v = self.triangle.vertices();
        let (a, b) = match k {
            0 => (v[1], v[2]),
            1 => (v[0], v[2]),
            _ => (v[0], v[1]),
        };
        Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    }

    fn site_point(&self, idx: usize) -> Point {
        let b = tables::site_bary(idx);
        self.triangle.from_bary(Bary::new(
            rat_to_f64(&b[0]),
            rat_to_f64(&b[1]),
            rat_to_f64(&b[2]),
        ))
    }

    /// Evaluates the Hermite data vector of a C^2 function given by closures
    /// for value, gradient and Hessian, ordered for `hermite_interpolate`.
    pub fn hermite_data_of<FV, FG, FH>(&self, f: FV, g: FG, h: FH) -> [f64; 28]
    where
        FV: Fn(Point) -> f64,
        FG: Fn(Point) -> [f64; 2],
        FH: Fn(Point) -> Hessian,
    {
        let mut data = [0.0; 28];
        let verts = self.triangle.vertices();
        let mut row = 0;
        for k in 0..3 {
            let p = verts[k];
            let hh = h(p);
            data[row] = f(p);
            let gg = g(p);
            data[row + 1] = gg[0];
            data[row + 2] = gg[1];
            data[row + 3] = hh.xx;
            data[row + 4] = hh.xy;
            data[row + 5] = hh.yy;
            row += 6;
        }
        for k in 0..3 {
            let q = self.edge_midpoint(k);
            let n = self.triangle.inward_normal(k);
            let gg = g(q);
            data[row] = gg[0] * n[0] + gg[1] * n[1];
            row += 1;
        }
        for (site, k) in Self::SECOND_NORMAL_SITES {
            let p = self.site_point(site);
            let n = self.triangle.inward_normal(k);
            data[row] = h(p).bilinear(n, n);
            row += 1;
        }
        data[row] = f(self.triangle.centroid());
        data
    }
}

/// Converts coefficients between the two bases; a round trip is the identity
/// up to rounding.
pub fn convert(coeffs: &LocalCoeffs) -> LocalCoeffs {
    let canon = canonical_basis();
    let (m, tag) = match coeffs.tag {
        BasisTag::B => (&canon.conversion_f64, BasisTag::BTilde),
        BasisTag::BTilde => (&canon.conversion_inv_f64, BasisTag::B),
    };
    let mut out = [0.0; 28];
    for (i, row) in m.iter().enumerate() {
        let mut acc = 0.0;
        for (j, &c) in row.iter().enumerate() {
            if c != 0.0 {
                acc += c * coeffs.values[j];
            }
        }
        out[i] = acc;
    }
    LocalCoeffs::new(out, tag)
}

/// Infinity norms of the conversion matrix and its inverse, computed exactly
/// and returned as f64; both equal 3.
pub fn conversion_norms() -> (f64, f64) {
    let canon = canonical_basis();
    let inf = |m: &Vec<Vec<Rat>>| {
        m.iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<Rat>())
            .max()
            .unwrap()
    };
    (
        rat_to_f64(&inf(&canon.conversion)),
        rat_to_f64(&inf(&canon.conversion_inv)),
    )
}

fn dot28(a: &[f64; 28], b: &[f64; 28]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Build the local basis for a triangle; the spec-level constructor.
pub fn build_local_basis(triangle: Triangle) -> LocalBasis {
    LocalBasis::new(triangle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_basis() -> LocalBasis {
        LocalBasis::new(
            Triangle::new(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            )
            .unwrap(),
        )
    }

    #[test]
    fn canonical_basis_builds() {
        let canon = canonical_basis();
        assert_eq!(canon.split.cells.len(), 75);
    }

    #[test]
    fn weights_and_domain_point_examples() {
        let basis = unit_basis();
        let area = 0.5;
        assert_relative_eq!(basis.weights()[0], area / 90.0, epsilon = 1e-15);
        assert_relative_eq!(basis.weights()[27], area / 15.0, epsilon = 1e-15);
        assert_relative_eq!(basis.weights().iter().sum::<f64>(), area, epsilon = 1e-12);
        let dp = basis.domain_points();
        assert_relative_eq!(dp[3].b[0], 8.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(dp[3].b[1], 1.0 / 9.0, epsilon = 1e-15);
        let adp = basis.alt_domain_points();
        assert_relative_eq!(adp[21].b[0], 15.0 / 27.0, epsilon = 1e-15);
        assert_relative_eq!(adp[21].b[1], 7.0 / 27.0, epsilon = 1e-15);
        assert_relative_eq!(adp[21].b[2], 5.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn vertex_evaluation_is_kronecker() {
        let basis = unit_basis();
        let vals = basis.eval(Point::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        for (i, v) in vals.iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-12, "B_{} at p1 = {v}", i + 1);
        }
    }

    #[test]
    fn partition_of_unity_at_random_points() {
        let basis = unit_basis();
        let mut rng_state = 12345u64;
        let mut rand01 = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for _ in 0..2000 {
            let mut b1 = rand01();
            let mut b2 = rand01();
            if b1 + b2 > 1.0 {
                b1 = 1.0 - b1;
                b2 = 1.0 - b2;
            }
            let vals = basis.eval(Point::new(b2 * 1.0, 1.0 - b1 - b2)).unwrap();
            let s: f64 = vals.iter().sum();
            assert!((s - 1.0).abs() <= 1e-10);
            assert!(vals.iter().all(|&v| v >= -1e-12));
        }
    }

    #[test]
    fn conversion_round_trip_and_norms() {
        let mut values = [0.0; 28];
        for (i, v) in values.iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin();
        }
        let c = LocalCoeffs::new(values, BasisTag::B);
        let back = convert(&convert(&c));
        for i in 0..28 {
            assert_relative_eq!(back.values[i], c.values[i], epsilon = 1e-14);
        }
        let ones = LocalCoeffs::new([1.0; 28], BasisTag::B);
        let t = convert(&ones);
        for v in t.values {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
        let (n, ni) = conversion_norms();
        assert_eq!(n, 3.0);
        assert_eq!(ni, 3.0);
    }
}
