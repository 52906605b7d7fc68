//! Fixed data of the 28-member WS3 simplex spline basis: the nine boundary
//! knots, the 28 knot multisets, scaling weights, domain points, the basis
//! conversion matrix, the Hermite operators, the Marsden dual points, the
//! published piecewise-polynomial representatives, and the control net.
//!
//! Everything is stated in barycentric coordinates and exact rationals, so
//! the tables are triangle-independent.

use crate::exact::{rat, rat_i, LinForm, Poly3, Rat};

/// Indices of the nine boundary knot points.
pub const P1: usize = 0;
pub const P2: usize = 1;
pub const P3: usize = 2;
pub const P12: usize = 3;
pub const P13: usize = 4;
pub const P21: usize = 5;
pub const P23: usize = 6;
pub const P31: usize = 7;
pub const P32: usize = 8;

/// Barycentric coordinates of the nine boundary knots, as (num, den) triples.
/// The edge points sit at the thirds: p_{k,l} = (2/3) p_l + (1/3) p_m.
pub const KNOT_POINTS: [[(i64, i64); 3]; 9] = [
    [(1, 1), (0, 1), (0, 1)], // p1
    [(0, 1), (1, 1), (0, 1)], // p2
    [(0, 1), (0, 1), (1, 1)], // p3
    [(0, 1), (2, 3), (1, 3)], // p_{1,2}
    [(0, 1), (1, 3), (2, 3)], // p_{1,3}
    [(2, 3), (0, 1), (1, 3)], // p_{2,1}
    [(1, 3), (0, 1), (2, 3)], // p_{2,3}
    [(2, 3), (1, 3), (0, 1)], // p_{3,1}
    [(1, 3), (2, 3), (0, 1)], // p_{3,2}
];

/// Additional operator sites: edge midpoints q1, q2, q3, the centroid q, and
/// the Marsden points m1, m2, m3.
pub const Q1: usize = 9;
pub const Q2: usize = 10;
pub const Q3: usize = 11;
pub const QC: usize = 12;
pub const M1: usize = 13;
pub const M2: usize = 14;
pub const M3: usize = 15;

pub const EXTRA_POINTS: [[(i64, i64); 3]; 7] = [
    [(0, 1), (1, 2), (1, 2)], // q1 = midpoint of p2 p3
    [(1, 2), (0, 1), (1, 2)], // q2 = midpoint of p1 p3
    [(1, 2), (1, 2), (0, 1)], // q3 = midpoint of p1 p2
    [(1, 3), (1, 3), (1, 3)], // q  = centroid
    [(2, 5), (2, 5), (1, 5)], // m1
    [(1, 5), (2, 5), (2, 5)], // m2
    [(2, 5), (1, 5), (2, 5)], // m3
];

pub fn site_bary(idx: usize) -> [Rat; 3] {
    let t = if idx < 9 {
        KNOT_POINTS[idx]
    } else {
        EXTRA_POINTS[idx - 9]
    };
    [rat(t[0].0, t[0].1), rat(t[1].0, t[1].1), rat(t[2].0, t[2].1)]
}

/// The 28 knot multisets, as sorted index lists into [`KNOT_POINTS`].
/// Repeated indices encode multiplicity; every multiset has six knots.
pub const KNOT_MULTISETS: [[usize; 6]; 28] = [
    [P1, P1, P1, P1, P21, P31],      // 1
    [P2, P2, P2, P2, P12, P32],      // 2
    [P3, P3, P3, P3, P13, P23],      // 3
    [P1, P1, P1, P21, P31, P32],     // 4
    [P1, P1, P1, P21, P23, P31],     // 5
    [P2, P2, P2, P12, P13, P32],     // 6
    [P2, P2, P2, P12, P31, P32],     // 7
    [P3, P3, P3, P13, P21, P23],     // 8
    [P3, P3, P3, P12, P13, P23],     // 9
    [P1, P1, P2, P21, P31, P32],     // 10
    [P1, P1, P3, P21, P23, P31],     // 11
    [P2, P2, P3, P12, P13, P32],     // 12
    [P1, P2, P2, P12, P31, P32],     // 13
    [P1, P3, P3, P13, P21, P23],     // 14
    [P2, P3, P3, P12, P13, P23],     // 15
    [P1, P1, P21, P23, P31, P32],    // 16
    [P2, P2, P12, P13, P31, P32],    // 17
    [P3, P3, P12, P13, P21, P23],    // 18
    [P1, P2, P12, P21, P31, P32],    // 19
    [P2, P3, P12, P13, P23, P32],    // 20
    [P1, P3, P13, P21, P23, P31],    // 21
    [P1, P12, P21, P23, P31, P32],   // 22
    [P1, P13, P21, P23, P31, P32],   // 23
    [P2, P12, P13, P23, P31, P32],   // 24
    [P2, P12, P13, P21, P31, P32],   // 25
    [P3, P12, P13, P21, P23, P31],   // 26
    [P3, P12, P13, P21, P23, P32],   // 27
    [P12, P13, P21, P23, P31, P32],  // 28
];

/// Scaling factors: w_i = |triangle| / 15 * WEIGHT_FRACTIONS[i]. They sum to
/// the triangle area.
pub fn weight_fractions() -> [Rat; 28] {
    let f = |n: i64, d: i64| rat(n, d);
    [
        f(1, 6), f(1, 6), f(1, 6),
        f(1, 3), f(1, 3), f(1, 3), f(1, 3), f(1, 3), f(1, 3),
        f(1, 2), f(1, 2), f(1, 2), f(1, 2), f(1, 2), f(1, 2),
        f(2, 3), f(2, 3), f(2, 3),
        f(5, 6), f(5, 6), f(5, 6),
        f(2, 3), f(2, 3), f(2, 3), f(2, 3), f(2, 3), f(2, 3),
        f(1, 1),
    ]
}

/// Barycentric coordinates of the 28 domain points of the basis B.
pub const DOMAIN_POINTS: [[(i64, i64); 3]; 28] = [
    [(1, 1), (0, 1), (0, 1)],
    [(0, 1), (1, 1), (0, 1)],
    [(0, 1), (0, 1), (1, 1)],
    [(8, 9), (1, 9), (0, 1)],
    [(8, 9), (0, 1), (1, 9)],
    [(0, 1), (8, 9), (1, 9)],
    [(1, 9), (8, 9), (0, 1)],
    [(1, 9), (0, 1), (8, 9)],
    [(0, 1), (1, 9), (8, 9)],
    [(2, 3), (1, 3), (0, 1)],
    [(2, 3), (0, 1), (1, 3)],
    [(0, 1), (2, 3), (1, 3)],
    [(1, 3), (2, 3), (0, 1)],
    [(1, 3), (0, 1), (2, 3)],
    [(0, 1), (1, 3), (2, 3)],
    [(7, 9), (1, 9), (1, 9)],
    [(1, 9), (7, 9), (1, 9)],
    [(1, 9), (1, 9), (7, 9)],
    [(7, 15), (7, 15), (1, 15)],
    [(1, 15), (7, 15), (7, 15)],
    [(7, 15), (1, 15), (7, 15)],
    [(5, 9), (1, 3), (1, 9)],
    [(5, 9), (1, 9), (1, 3)],
    [(1, 9), (5, 9), (1, 3)],
    [(1, 3), (5, 9), (1, 9)],
    [(1, 3), (1, 9), (5, 9)],
    [(1, 9), (1, 3), (5, 9)],
    [(1, 3), (1, 3), (1, 3)],
];

/// Barycentric coordinates of the 28 alternative-basis domain points.
pub const ALT_DOMAIN_POINTS: [[(i64, i64); 3]; 28] = [
    [(1, 1), (0, 1), (0, 1)],
    [(0, 1), (1, 1), (0, 1)],
    [(0, 1), (0, 1), (1, 1)],
    [(8, 9), (1, 9), (0, 1)],
    [(8, 9), (0, 1), (1, 9)],
    [(0, 1), (8, 9), (1, 9)],
    [(1, 9), (8, 9), (0, 1)],
    [(1, 9), (0, 1), (8, 9)],
    [(0, 1), (1, 9), (8, 9)],
    [(2, 3), (1, 3), (0, 1)],
    [(2, 3), (0, 1), (1, 3)],
    [(0, 1), (2, 3), (1, 3)],
    [(1, 3), (2, 3), (0, 1)],
    [(1, 3), (0, 1), (2, 3)],
    [(0, 1), (1, 3), (2, 3)],
    [(7, 9), (1, 9), (1, 9)],
    [(1, 9), (7, 9), (1, 9)],
    [(1, 9), (1, 9), (7, 9)],
    [(7, 15), (7, 15), (1, 15)],
    [(1, 15), (7, 15), (7, 15)],
    [(7, 15), (1, 15), (7, 15)],
    [(15, 27), (7, 27), (5, 27)],
    [(15, 27), (5, 27), (7, 27)],
    [(5, 27), (15, 27), (7, 27)],
    [(7, 27), (15, 27), (5, 27)],
    [(7, 27), (5, 27), (15, 27)],
    [(5, 27), (7, 27), (15, 27)],
    [(1, 3), (1, 3), (1, 3)],
];

/// Conversion matrix C with btilde = C b. Identity outside rows/columns
/// 22..28 (1-based). Its inverse has the 2x2 blocks [2, -1; -1, 2].
pub fn conversion_matrix() -> Vec<Vec<Rat>> {
    let mut c: Vec<Vec<Rat>> = (0..28)
        .map(|i| {
            (0..28)
                .map(|j| if i == j { rat_i(1) } else { rat_i(0) })
                .collect()
        })
        .collect();
    for (a, b) in [(21, 22), (23, 24), (25, 26)] {
        c[a][a] = rat(2, 3);
        c[a][b] = rat(1, 3);
        c[b][b] = rat(2, 3);
        c[b][a] = rat(1, 3);
    }
    for j in 21..27 {
        c[27][j] = rat(1, 3);
    }
    c[27][27] = rat_i(-1);
    c
}

pub fn conversion_matrix_inv() -> Vec<Vec<Rat>> {
    let mut c: Vec<Vec<Rat>> = (0..28)
        .map(|i| {
            (0..28)
                .map(|j| if i == j { rat_i(1) } else { rat_i(0) })
                .collect()
        })
        .collect();
    for (a, b) in [(21, 22), (23, 24), (25, 26)] {
        c[a][a] = rat_i(2);
        c[a][b] = rat_i(-1);
        c[b][b] = rat_i(2);
        c[b][a] = rat_i(-1);
    }
    for j in 21..27 {
        c[27][j] = rat(1, 3);
    }
    c[27][27] = rat_i(-1);
    c
}

/// One Hermite operator: an evaluation site and up to two directional
/// derivatives, each a (from, to) pair of site indices.
#[derive(Clone, Copy, Debug)]
pub struct HermiteOp {
    pub site: usize,
    pub dirs: [Option<(usize, usize)>; 2],
}

const fn val(site: usize) -> HermiteOp {
    HermiteOp { site, dirs: [None, None] }
}
const fn d1(site: usize, a: usize, b: usize) -> HermiteOp {
    HermiteOp { site, dirs: [Some((a, b)), None] }
}
const fn d2(site: usize, a: usize, b: usize) -> HermiteOp {
    HermiteOp { site, dirs: [Some((a, b)), Some((a, b))] }
}
const fn dm(site: usize, a1: usize, b1: usize, a2: usize, b2: usize) -> HermiteOp {
    HermiteOp { site, dirs: [Some((a1, b1)), Some((a2, b2))] }
}

/// The 34 operators rho_1..rho_34. Directions D_{ab} point from a to b and
/// are not normalized.
pub const RHO_OPS: [HermiteOp; 34] = [
    val(P1),
    val(P2),
    val(P3),
    d1(P1, P1, P2),
    d1(P1, P1, P3),
    d1(P2, P2, P3),
    d1(P2, P2, P1),
    d1(P3, P3, P1),
    d1(P3, P3, P2),
    d2(P1, P1, P2),
    d2(P1, P1, P3),
    d2(P2, P2, P3),
    d2(P2, P2, P1),
    d2(P3, P3, P1),
    d2(P3, P3, P2),
    dm(P1, P1, P2, P1, P3),
    dm(P2, P2, P3, P2, P1),
    dm(P3, P3, P1, P3, P2),
    d1(Q3, Q3, P3),
    d1(Q1, Q1, P1),
    d1(Q2, Q2, P2),
    d2(P31, P31, P3),
    d2(P21, P21, P2),
    d2(P12, P12, P1),
    d2(P32, P32, P3),
    d2(P23, P23, P2),
    d2(P13, P13, P1),
    val(QC),
    d2(P31, P1, P2),
    d2(P31, P1, P3),
    dm(P31, P1, P3, P1, P2),
    d2(P32, P1, P2),
    d2(P32, P1, P3),
    dm(P32, P1, P3, P1, P2),
];

/// Marsden dual polynomials: psi_i for i < 27 is the product of the three
/// factors (1 + y . point); psi_28 has its own bracketed form.
pub const MARSDEN_TRIPLES: [[usize; 3]; 27] = [
    [P1, P1, P1],
    [P2, P2, P2],
    [P3, P3, P3],
    [P1, P1, P31],
    [P1, P1, P21],
    [P2, P2, P12],
    [P2, P2, P32],
    [P3, P3, P23],
    [P3, P3, P13],
    [P1, P31, P32],
    [P1, P23, P21],
    [P2, P12, P13],
    [P2, P31, P32],
    [P3, P23, P21],
    [P3, P12, P13],
    [P1, P31, P21],
    [P2, P32, P12],
    [P3, P13, P23],
    [P31, P32, M1],
    [P12, P13, M2],
    [P23, P21, M3],
    [P31, P32, P21],
    [P31, P23, P21],
    [P32, P12, P13],
    [P31, P32, P12],
    [P13, P23, P21],
    [P12, P13, P23],
];

/// Indices (0-based) of the alternative domain points associated with each
/// vertex slot: the six points whose k-th barycentric coordinate is >= 2/3.
pub const VERTEX_POINT_SETS: [[usize; 6]; 3] = [
    [0, 3, 4, 9, 10, 15],
    [1, 5, 6, 11, 12, 16],
    [2, 7, 8, 13, 14, 17],
];

/// Alternative domain points associated with each edge slot, keyed by the
/// vertex-slot pair of the edge.
pub const EDGE_POINT_SETS: [([usize; 2], [usize; 3]); 3] = [
    ([0, 1], [18, 21, 24]),
    ([0, 2], [20, 22, 25]),
    ([1, 2], [19, 23, 26]),
];

/// The domain point owned by the triangle itself.
pub const TRIANGLE_POINT: usize = 27;

/// Indices of the six basis functions that are nonzero on each edge, ordered
/// along the edge from its first vertex; their restrictions are the univariate
/// C^2 cubic B-splines on an open uniform knot vector with two interior knots.
pub const EDGE_RESTRICTION: [([usize; 2], [usize; 6]); 3] = [
    ([0, 1], [0, 3, 9, 12, 6, 1]),
    ([1, 2], [1, 5, 11, 14, 8, 2]),
    ([0, 2], [0, 4, 10, 13, 7, 2]),
];

/// Control net connectivity over the 28 domain points (0-based). The corner
/// caps and the three band triangles per edge carry the geometric reading of
/// the C^1 smoothness conditions; the rest fills the interior ring.
pub fn control_net_faces() -> Vec<Vec<usize>> {
    let tri = |a: usize, b: usize, c: usize| vec![a - 1, b - 1, c - 1];
    vec![
        // Corner caps.
        tri(1, 4, 5),
        tri(2, 7, 6),
        tri(3, 9, 8),
        // Corner wedges.
        tri(4, 16, 5),
        tri(7, 17, 6),
        tri(9, 18, 8),
        // Edge bands.
        tri(4, 10, 16),
        tri(10, 13, 19),
        tri(13, 7, 17),
        tri(6, 12, 17),
        tri(12, 15, 20),
        tri(15, 9, 18),
        tri(8, 14, 18),
        tri(14, 11, 21),
        tri(11, 5, 16),
        // Strip between the inner dodecagon and the hexagon ring.
        tri(16, 10, 22),
        tri(10, 19, 22),
        tri(19, 25, 22),
        tri(19, 13, 25),
        tri(13, 17, 25),
        tri(17, 25, 24),
        tri(17, 12, 24),
        tri(12, 20, 24),
        tri(20, 24, 27),
        tri(20, 15, 27),
        tri(15, 18, 27),
        tri(18, 27, 26),
        tri(18, 14, 26),
        tri(14, 21, 26),
        tri(21, 26, 23),
        tri(21, 11, 23),
        tri(11, 16, 23),
        tri(16, 23, 22),
        // Hexagon fan around the center.
        tri(22, 25, 28),
        tri(25, 24, 28),
        tri(24, 27, 28),
        tri(27, 26, 28),
        tri(26, 23, 28),
        tri(23, 22, 28),
    ]
}

// ---------------------------------------------------------------------------
// Published piecewise polynomial representatives (appendix data).
// ---------------------------------------------------------------------------

/// The cubed line forms l_{i,j}; `li(name)` returns the cube as a Poly3.
fn lf(a: i64, b: i64, c: i64, d: i64) -> LinForm {
    LinForm::new(a, b, c, d)
}

fn l12() -> Poly3 { Poly3::cube(&lf(0, 0, 1, 0)) }
fn l13() -> Poly3 { Poly3::cube(&lf(0, 1, 0, 0)) }
fn l16() -> Poly3 { Poly3::cube(&lf(0, -1, 2, 0)) }
fn l23() -> Poly3 { Poly3::cube(&lf(1, 0, 0, 0)) }
fn l29() -> Poly3 { Poly3::cube(&lf(1, 0, -2, 0)) }
fn l46() -> Poly3 { Poly3::cube(&lf(0, 3, -3, -1)) }
fn l48() -> Poly3 { Poly3::cube(&lf(3, -3, 0, -1)) }
fn l49() -> Poly3 { Poly3::cube(&lf(3, 0, 0, -2)) }
fn l56() -> Poly3 { Poly3::cube(&lf(0, 3, 0, -2)) }
fn l57() -> Poly3 { Poly3::cube(&lf(-3, 3, 0, -1)) }
fn l58() -> Poly3 { Poly3::cube(&lf(3, 0, 0, -1)) }
fn l59() -> Poly3 { Poly3::cube(&lf(3, 0, -3, -1)) }
fn l68() -> Poly3 { Poly3::cube(&lf(-3, 0, 3, -1)) }
fn l69() -> Poly3 { Poly3::cube(&lf(0, 0, 3, -1)) }
fn l78() -> Poly3 { Poly3::cube(&lf(0, 0, 3, -2)) }
fn l79() -> Poly3 { Poly3::cube(&lf(0, -3, 3, -1)) }

fn b1() -> LinForm { lf(1, 0, 0, 0) }
fn b2() -> LinForm { lf(0, 1, 0, 0) }
fn b3() -> LinForm { lf(0, 0, 1, 0) }

fn combo(terms: &[(i64, i64, Poly3)]) -> Poly3 {
    let mut acc = Poly3::zero();
    for (n, d, p) in terms {
        acc = acc.add(&p.scale(&rat(*n, *d)));
    }
    acc
}

/// The distinct polynomial pieces of the seven representative basis functions
/// B1, B4, B10, B16, B19, B22, B28 (0-based ids 0, 3, 9, 15, 18, 21, 27).
/// Remaining basis functions follow by the vertex-permutation symmetry.
pub fn representative_pieces() -> Vec<(usize, Vec<Poly3>)> {
    let b1_pieces = vec![l49()];

    let b4_pieces = vec![
        combo(&[(1, 4, l59())]),
        combo(&[(1, 4, l59()), (-2, 1, l49())]),
    ];

    let b10_pieces = vec![
        Poly3::from_linear_product([&b2(), &b2(), &lf(6, -5, -12, 0)]).scale(&rat(9, 4)),
        combo(&[(9, 2, l29()), (-3, 4, l59())]),
        combo(&[(9, 2, l29())]),
    ];

    let q16 = Poly3::from_linear_product([&b2(), &b3(), &lf(9, 0, 0, -5)]).scale(&rat(27, 2));
    let b16_pieces = vec![
        combo(&[(1, 2, l58())]),
        combo(&[(1, 2, l58()), (-1, 2, l59())]),
        combo(&[(1, 2, l58()), (-1, 2, l48())]),
        q16.clone(),
        q16.add(&l49().scale(&rat_i(-4))),
    ];

    // (45/2) b3 (b3^2 + 6 b1 b2 - 1), homogenized with 1 = (b1+b2+b3)^2.
    let q19 = {
        let one = lf(0, 0, 0, 1);
        let t1 = Poly3::from_linear_product([&b3(), &b3(), &b3()]);
        let t2 = Poly3::from_linear_product([&b1(), &b2(), &b3()]).scale(&rat_i(6));
        let t3 = Poly3::from_linear_product([&b3(), &one, &one]);
        t1.add(&t2).add(&t3.scale(&rat_i(-1))).scale(&rat(45, 2))
    };
    let b19_pieces = vec![
        combo(&[(45, 4, l13())]),
        combo(&[(45, 4, l23())]),
        combo(&[(-5, 2, l69())]),
        combo(&[(45, 4, l13()), (45, 4, l16())]),
        combo(&[(45, 4, l23()), (-45, 4, l29())]),
        combo(&[(-5, 2, l69()), (45, 4, l16())]),
        combo(&[(-5, 2, l69()), (-45, 4, l29())]),
        combo(&[(45, 4, l13()), (5, 4, l49())]),
        combo(&[(45, 4, l23()), (5, 4, l56())]),
        combo(&[(45, 4, l13()), (45, 4, l16()), (5, 4, l49())]),
        combo(&[(45, 4, l23()), (-45, 4, l29()), (5, 4, l56())]),
        q19,
        combo(&[(-5, 2, l69()), (45, 4, l16()), (-45, 4, l29())]),
    ];

    let q22a = Poly3::from_linear_product([&b3(), &b3(), &lf(3, 0, 0, -1)]).scale(&rat_i(27));
    let q22b = Poly3::from_linear_product([&b3(), &b3(), &lf(0, 3, -2, 0)]).scale(&rat_i(27));
    let q22c = Poly3::from_linear_product([&b2(), &b2(), &lf(7, 0, 1, -3)]).scale(&rat(27, 4));
    let q22d = Poly3::from_linear_product([&b2(), &b2(), &lf(0, -1, 6, 0)]).scale(&rat(27, 4));
    let b22_pieces = vec![
        combo(&[(-1, 2, l56())]),
        combo(&[(-1, 2, l56()), (-1, 1, l58())]),
        q22a.clone(),
        q22a.add(&l46().scale(&rat(2, 3))),
        q22b.clone(),
        q22b.add(&l49().scale(&rat_i(2))),
        combo(&[(-1, 2, l56()), (2, 3, l46())]),
        combo(&[(-1, 2, l56()), (2, 3, l46()), (-1, 1, l58())]),
        combo(&[(-1, 12, l68())]),
        combo(&[(-1, 12, l68()), (-1, 1, l58())]),
        q22c.clone(),
        q22c.add(&l69().scale(&rat_i(2))),
        q22d.clone(),
        q22d.clone().add(&l49().scale(&rat_i(2))),
        combo(&[(-1, 12, l68()), (2, 1, l69())]),
        combo(&[(-1, 12, l68()), (2, 1, l69()), (-1, 1, l58())]),
        q22d.add(&l49().scale(&rat_i(2))).add(&l48().scale(&rat(-1, 3))),
    ];

    let b28_pieces = vec![
        combo(&[(81, 2, l12())]),
        combo(&[(81, 2, l23())]),
        combo(&[(81, 2, l13())]),
        combo(&[(-3, 2, l56())]),
        combo(&[(-3, 2, l78())]),
        combo(&[(-3, 2, l49())]),
        combo(&[(81, 2, l12()), (1, 2, l46())]),
        combo(&[(81, 2, l12()), (1, 2, l59())]),
        combo(&[(-3, 2, l56()), (1, 2, l57())]),
        combo(&[(81, 2, l23()), (1, 2, l68())]),
        combo(&[(81, 2, l13()), (1, 2, l48())]),
        combo(&[(81, 2, l13()), (1, 2, l79())]),
        combo(&[(-3, 2, l49()), (1, 2, l48())]),
        combo(&[(-3, 2, l56()), (1, 2, l46())]),
        combo(&[(-3, 2, l78()), (1, 2, l79())]),
        combo(&[(-3, 2, l78()), (1, 2, l68())]),
        combo(&[(81, 2, l23()), (1, 2, l57())]),
        combo(&[(-3, 2, l49()), (1, 2, l59())]),
        combo(&[(-3, 2, l49()), (1, 2, l48()), (1, 2, l59())]),
        combo(&[(81, 2, l12()), (1, 2, l46()), (1, 2, l59())]),
        combo(&[(-3, 2, l56()), (1, 2, l57()), (1, 2, l46())]),
        combo(&[(81, 2, l23()), (1, 2, l68()), (1, 2, l57())]),
        combo(&[(-3, 2, l78()), (1, 2, l68()), (1, 2, l79())]),
        combo(&[(81, 2, l13()), (1, 2, l48()), (1, 2, l79())]),
    ];

    vec![
        (0, b1_pieces),
        (3, b4_pieces),
        (9, b10_pieces),
        (15, b16_pieces),
        (18, b19_pieces),
        (21, b22_pieces),
        (27, b28_pieces),
    ]
}

/// Action of a vertex permutation on the nine knot-point indices.
/// `perm[k]` is the image of vertex k (0-based).
pub fn point_permutation(perm: &[usize; 3]) -> [usize; 9] {
    // p_{k,l} = (2/3) p_l + (1/3) p_m with m the remaining index.
    const EDGE_LABELS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
    let mut out = [0usize; 9];
    for k in 0..3 {
        out[k] = perm[k];
    }
    for (i, &(k, l)) in EDGE_LABELS.iter().enumerate() {
        let (pk, pl) = (perm[k], perm[l]);
        let pos = EDGE_LABELS
            .iter()
            .position(|&(a, b)| (a, b) == (pk, pl))
            .unwrap();
        out[3 + i] = 3 + pos;
    }
    out
}

/// Action of a vertex permutation on the 28 basis indices, derived from the
/// knot multiset images.
pub fn index_permutation(perm: &[usize; 3]) -> [usize; 28] {
    let pp = point_permutation(perm);
    let mut out = [usize::MAX; 28];
    for (i, ms) in KNOT_MULTISETS.iter().enumerate() {
        let mut img: Vec<usize> = ms.iter().map(|&k| pp[k]).collect();
        img.sort_unstable();
        let j = KNOT_MULTISETS
            .iter()
            .position(|m| {
                let mut s = *m;
                s.sort_unstable();
                s[..] == img[..]
            })
            .expect("knot multisets closed under vertex permutations");
        out[i] = j;
    }
    out
}

/// All six vertex permutations of S3.
pub const S3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
    [1, 2, 0],
    [2, 0, 1],
];

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    #[test]
    fn weights_sum_to_fifteen() {
        let total: Rat = weight_fractions().iter().cloned().sum();
        assert_eq!(total, rat_i(15));
    }

    #[test]
    fn multisets_are_closed_under_s3() {
        for perm in &S3 {
            let sigma = index_permutation(perm);
            let mut seen = [false; 28];
            for &j in &sigma {
                assert!(!seen[j]);
                seen[j] = true;
            }
        }
        // The documented swap p1 <-> p2 images.
        let sigma = index_permutation(&[1, 0, 2]);
        assert_eq!(sigma[0], 1);
        assert_eq!(sigma[3], 6); // 4 <-> 7
        assert_eq!(sigma[4], 5); // 5 <-> 6
        assert_eq!(sigma[9], 12); // 10 <-> 13
        assert_eq!(sigma[15], 16); // 16 <-> 17
        assert_eq!(sigma[21], 24); // 22 <-> 25
        assert_eq!(sigma[22], 23); // 23 <-> 24
        assert_eq!(sigma[27], 27);
    }

    #[test]
    fn conversion_matrices_are_inverse_and_have_norm_three() {
        let c = conversion_matrix();
        let ci = conversion_matrix_inv();
        for i in 0..28 {
            for j in 0..28 {
                let mut acc = rat_i(0);
                for k in 0..28 {
                    acc += &c[i][k] * &ci[k][j];
                }
                assert_eq!(acc, if i == j { rat_i(1) } else { rat_i(0) });
            }
        }
        let inf = |m: &Vec<Vec<Rat>>| {
            m.iter()
                .map(|row| row.iter().map(|v| v.abs()).sum::<Rat>())
                .max()
                .unwrap()
        };
        assert_eq!(inf(&c), rat_i(3));
        assert_eq!(inf(&ci), rat_i(3));
    }

    #[test]
    fn alt_domain_points_follow_conversion() {
        // alt point i = sum_j C[i][j] * point j, per affine reproduction.
        let c = conversion_matrix();
        for i in 0..28 {
            for axis in 0..3 {
                let mut acc = rat_i(0);
                for j in 0..28 {
                    let p = DOMAIN_POINTS[j][axis];
                    acc += &c[i][j] * rat(p.0, p.1);
                }
                let q = ALT_DOMAIN_POINTS[i][axis];
                assert_eq!(acc, rat(q.0, q.1), "row {i} axis {axis}");
            }
        }
    }

    #[test]
    fn domain_points_sum_to_one() {
        for p in DOMAIN_POINTS.iter().chain(ALT_DOMAIN_POINTS.iter()) {
            let s: Rat = p.iter().map(|&(n, d)| rat(n, d)).sum();
            assert!(s.is_one());
        }
    }

    #[test]
    fn control_net_covers_all_indices() {
        let faces = control_net_faces();
        let mut used = [false; 28];
        for f in &faces {
            for &i in f {
                used[i] = true;
            }
        }
        assert!(used.iter().all(|&u| u));
        // The five C1 band triangles along edge p1 p2 are present (0-based).
        for tri in [[0, 3, 4], [3, 9, 15], [9, 12, 18], [12, 6, 16], [6, 1, 5]] {
            let mut t = tri;
            t.sort_unstable();
            assert!(
                faces.iter().any(|f| {
                    let mut g: Vec<usize> = f.clone();
                    g.sort_unstable();
                    g == t
                }),
                "missing face {t:?}"
            );
        }
    }
}
