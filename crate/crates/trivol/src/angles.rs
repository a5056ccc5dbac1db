//! Tangential angle structures, curvature admissibility, and constructive
//! existence of circle-valued angle structures.
//!
//! A tangential angle structure (TAS) is a rational quad weight vector with
//! zero sum in each tetrahedron and zero edge-weighted sums. A circle-valued
//! angle structure assigns each quad an angle theta(q) with tetrahedron sums
//! congruent to pi and edge sums congruent to the prescribed curvature turn,
//! both mod 2 pi. Points produced by construction keep their angles as exact
//! rational multiples of pi.

use num::{BigRational, Zero};
use thiserror::Error;

use crate::linalg::RatMatrix;
use crate::rq::{is_multiple_of, parse_rat, reduce_mod, ri, rz, to_f64};
use crate::tri::Triangulation;

/// A tangential angle structure: one rational weight per quad.
pub type TasVector = Vec<BigRational>;

#[derive(Debug, Error)]
pub enum AngleError {
    #[error("inadmissible curvature: {0}")]
    Inadmissible(CurvatureViolation),
    #[error("lattice search exhausted at L1 bound {bound} (diagnostic only; widen the search)")]
    LatticeSearchExhausted { bound: usize },
    #[error("curvature parse error at line {line}: {msg}")]
    CurvatureParse { line: usize, msg: String },
    #[error("curvature assigns edge {edge} but the triangulation has {num_edges} edge classes")]
    CurvatureEdgeOutOfRange { edge: usize, num_edges: usize },
}

/// Why a curvature assignment fails the admissibility congruences.
#[derive(Clone, Debug)]
pub enum CurvatureViolation {
    /// The total turning number over all edges is not an integer.
    Global { sum: BigRational },
    /// The end-weighted turning sum at a vertex class is not an integer.
    Vertex { vertex: usize, sum: BigRational },
}

impl std::fmt::Display for CurvatureViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvatureViolation::Global { sum } => {
                write!(f, "total turning number {} is not an integer", sum)
            }
            CurvatureViolation::Vertex { vertex, sum } => write!(
                f,
                "turning sum {} at vertex class {} is not an integer",
                sum, vertex
            ),
        }
    }
}

/// Edge curvature as rational turning numbers a(e), representing
/// k(e) = exp(2 pi i a(e)); stored reduced mod 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureAssignment {
    pub turns: Vec<BigRational>,
}

impl CurvatureAssignment {
    /// k = 1 on every edge.
    pub fn trivial(tri: &Triangulation) -> Self {
        CurvatureAssignment {
            turns: vec![rz(); tri.num_edges()],
        }
    }

    pub fn from_turns(tri: &Triangulation, turns: Vec<BigRational>) -> Self {
        assert_eq!(turns.len(), tri.num_edges());
        CurvatureAssignment {
            turns: turns.iter().map(|a| reduce_mod(a, &ri(1))).collect(),
        }
    }

    /// File format: lines `edge <id> <p>/<q>`; unlisted edges default to 0.
    pub fn parse(tri: &Triangulation, text: &str) -> Result<Self, AngleError> {
        let mut turns = vec![rz(); tri.num_edges()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let ["edge", id, val] = toks.as_slice() else {
                return Err(AngleError::CurvatureParse {
                    line,
                    msg: format!("expected `edge <id> <p>/<q>`, got {l:?}"),
                });
            };
            let edge: usize = id.parse().map_err(|_| AngleError::CurvatureParse {
                line,
                msg: format!("bad edge id {id:?}"),
            })?;
            if edge >= tri.num_edges() {
                return Err(AngleError::CurvatureEdgeOutOfRange {
                    edge,
                    num_edges: tri.num_edges(),
                });
            }
            let a = parse_rat(val).ok_or_else(|| AngleError::CurvatureParse {
                line,
                msg: format!("bad rational {val:?}"),
            })?;
            turns[edge] = reduce_mod(&a, &ri(1));
        }
        Ok(CurvatureAssignment { turns })
    }
}

/// Checks the two admissibility congruences: the total turning number is an
/// integer, and at each vertex class the end-weighted turning sum is an
/// integer (an edge loop at the vertex counts twice).
pub fn curvature_admissible(
    tri: &Triangulation,
    k: &CurvatureAssignment,
) -> Result<(), CurvatureViolation> {
    let total: BigRational = k.turns.iter().sum();
    if !is_multiple_of(&total, &ri(1)) {
        return Err(CurvatureViolation::Global { sum: total });
    }
    for v in 0..tri.num_vertices() {
        let mut sum = rz();
        for (e, cls) in tri.edge_classes().iter().enumerate() {
            let m = cls.ends_at(v);
            if m > 0 {
                sum += &k.turns[e] * ri(m as i64);
            }
        }
        if !is_multiple_of(&sum, &ri(1)) {
            return Err(CurvatureViolation::Vertex { vertex: v, sum });
        }
    }
    Ok(())
}

/// The matrix of the linear map B: rows are edge equations
/// sum_q i(q,e) x(q) followed by tetrahedron equations sum_{q in sigma} x(q).
/// Tangential angle structures form its kernel.
pub fn tas_matrix(tri: &Triangulation) -> RatMatrix {
    let (ne, nt, nq) = (tri.num_edges(), tri.tet_count(), tri.num_quads());
    let mut m = RatMatrix::zeros(ne + nt, nq);
    for e in 0..ne {
        for q in 0..nq {
            let i = tri.quad_edge_index(q, e);
            if i > 0 {
                m.set(e, q, ri(i as i64));
            }
        }
    }
    for t in 0..nt {
        for k in 0..3 {
            m.set(ne + t, 3 * t + k, ri(1));
        }
    }
    m
}

/// Exact rational basis of the space of tangential angle structures.
pub fn tas_basis(tri: &Triangulation) -> Vec<TasVector> {
    tas_matrix(tri).nullspace()
}

/// B(x) = (edge sums, tetrahedron sums), evaluated exactly.
pub fn b_map(tri: &Triangulation, x: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let out = tas_matrix(tri).mul_vec(x);
    let ne = tri.num_edges();
    (out[..ne].to_vec(), out[ne..].to_vec())
}

/// A(h)(q) = h(tet of q) + sum_e i(q,e) h(e) for h = (h_edges, h_tets).
pub fn a_map(
    tri: &Triangulation,
    h_edges: &[BigRational],
    h_tets: &[BigRational],
) -> Vec<BigRational> {
    assert_eq!(h_edges.len(), tri.num_edges());
    assert_eq!(h_tets.len(), tri.tet_count());
    let mut h = h_edges.to_vec();
    h.extend_from_slice(h_tets);
    crate::normal::a_matrix(tri).mul_vec(&h)
}

/// Float versions of the constraint sums, for optimizer residuals.
pub fn b_map_f64(tri: &Triangulation, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut edges = vec![0.0; tri.num_edges()];
    let mut tets = vec![0.0; tri.tet_count()];
    for q in 0..tri.num_quads() {
        for (e, sum) in edges.iter_mut().enumerate() {
            let i = tri.quad_edge_index(q, e);
            if i > 0 {
                *sum += i as f64 * x[q];
            }
        }
        tets[q / 3] += x[q];
    }
    (edges, tets)
}

/// An argument-space representative of a circle-valued angle structure:
/// one angle per quad. Points built by construction carry their angles as
/// exact rational multiples of pi alongside the float view.
#[derive(Clone, Debug)]
pub struct SasPoint {
    /// Angles in radians.
    pub theta: Vec<f64>,
    /// Exact theta / pi, when available.
    pub exact: Option<Vec<BigRational>>,
}

impl SasPoint {
    pub fn from_exact(coeffs: Vec<BigRational>) -> Self {
        let theta = coeffs
            .iter()
            .map(|c| to_f64(c) * std::f64::consts::PI)
            .collect();
        SasPoint {
            theta,
            exact: Some(coeffs),
        }
    }

    pub fn from_theta(theta: Vec<f64>) -> Self {
        SasPoint { theta, exact: None }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Exact membership check for a point with rational pi-coefficients:
/// per tetrahedron sum(c) = 1 mod 2, per edge sum(i(q,e) c(q)) = 2 a(e) mod 2.
pub fn sas_check_exact(
    tri: &Triangulation,
    k: &CurvatureAssignment,
    coeffs: &[BigRational],
) -> bool {
    let (edges, tets) = b_map(tri, coeffs);
    let two = ri(2);
    for (e, s) in edges.iter().enumerate() {
        if !is_multiple_of(&(s - ri(2) * &k.turns[e]), &two) {
            return false;
        }
    }
    for s in &tets {
        if !is_multiple_of(&(s - ri(1)), &two) {
            return false;
        }
    }
    true
}

/// Maximum distance of the constraint sums from their targets, measured
/// mod 2 pi. Zero for exact members.
pub fn sas_residual(tri: &Triangulation, k: &CurvatureAssignment, theta: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let dist_mod = |x: f64| -> f64 {
        let m = x.rem_euclid(2.0 * PI);
        m.min(2.0 * PI - m)
    };
    let (edges, tets) = b_map_f64(tri, theta);
    let mut worst: f64 = 0.0;
    for (e, s) in edges.iter().enumerate() {
        worst = worst.max(dist_mod(s - 2.0 * PI * to_f64(&k.turns[e])));
    }
    for s in &tets {
        worst = worst.max(dist_mod(s - PI));
    }
    worst
}

/// Knobs for the integer lattice-offset search inside `find_sas_point`.
#[derive(Clone, Copy, Debug)]
pub struct LatticeSearchOpts {
    /// Largest L1 norm of the offset vector to try.
    pub max_l1: usize,
    /// Per-coordinate bound on offsets.
    pub max_coord: i64,
}

impl Default for LatticeSearchOpts {
    fn default() -> Self {
        LatticeSearchOpts {
            max_l1: 12,
            max_coord: 6,
        }
    }
}

/// Constructs a point of SAS(T, k): solves the rational linear system
/// B(c) = target + 2m in pi-units with lattice offset m = 0 first, then
/// searches integer offsets in shells of increasing L1 norm until the
/// system becomes consistent. Admissible curvature guarantees termination;
/// exhaustion of the configured bounds is reported as a diagnostic.
pub fn find_sas_point(
    tri: &Triangulation,
    k: &CurvatureAssignment,
    opts: &LatticeSearchOpts,
) -> Result<SasPoint, AngleError> {
    curvature_admissible(tri, k).map_err(AngleError::Inadmissible)?;
    let (ne, nt) = (tri.num_edges(), tri.tet_count());
    if tri.tet_count() == 0 {
        return Ok(SasPoint::from_exact(Vec::new()));
    }
    let b = tas_matrix(tri);
    let mut target: Vec<BigRational> = Vec::with_capacity(ne + nt);
    for e in 0..ne {
        target.push(ri(2) * &k.turns[e]);
    }
    target.extend(std::iter::repeat_n(ri(1), nt));

    // Consistency of B c = target + 2m depends only on the dot products of
    // the right-hand side with a kernel basis of B^t.
    let cokernel = b.transpose().nullspace();
    let solve_with = |m: &[i64]| -> Option<Vec<BigRational>> {
        let rhs: Vec<BigRational> = target
            .iter()
            .zip(m)
            .map(|(t, &mi)| t + ri(2 * mi))
            .collect();
        b.solve(&rhs)
    };
    let consistent = |m: &[i64]| -> bool {
        cokernel.iter().all(|g| {
            let mut acc = rz();
            for ((t, &mi), gi) in target.iter().zip(m).zip(g) {
                if !gi.is_zero() {
                    acc += (t + ri(2 * mi)) * gi;
                }
            }
            acc.is_zero()
        })
    };

    let dim = ne + nt;
    let mut m = vec![0i64; dim];
    if consistent(&m) {
        let c = solve_with(&m).expect("cokernel-orthogonal system is consistent");
        return Ok(SasPoint::from_exact(c));
    }
    for l1 in 1..=opts.max_l1 {
        if let Some(found) = search_shell(&mut m, 0, l1 as i64, opts.max_coord, &consistent) {
            let c = solve_with(&found).expect("cokernel-orthogonal system is consistent");
            return Ok(SasPoint::from_exact(c));
        }
    }
    Err(AngleError::LatticeSearchExhausted { bound: opts.max_l1 })
}

/// Depth-first enumeration of integer vectors with exactly `remaining` L1
/// mass left to distribute over coordinates `from..`; deterministic order.
fn search_shell(
    m: &mut Vec<i64>,
    from: usize,
    remaining: i64,
    max_coord: i64,
    consistent: &dyn Fn(&[i64]) -> bool,
) -> Option<Vec<i64>> {
    if remaining == 0 {
        return consistent(m).then(|| m.clone());
    }
    if from == m.len() {
        return None;
    }
    // zero at this coordinate
    if let Some(found) = search_shell(m, from + 1, remaining, max_coord, consistent) {
        return Some(found);
    }
    for mag in 1..=remaining.min(max_coord) {
        for sign in [1i64, -1] {
            m[from] = sign * mag;
            if let Some(found) = search_shell(m, from + 1, remaining - mag, max_coord, consistent) {
                m[from] = 0;
                return Some(found);
            }
        }
    }
    m[from] = 0;
    None
}

/// Moves along a tangential direction: theta'(q) = theta(q) + t v(q), with
/// t given as a rational multiple of pi so exact points stay exact.
pub fn exp_move(x: &SasPoint, v: &[BigRational], t_over_pi: &BigRational) -> SasPoint {
    match &x.exact {
        Some(c) => {
            let coeffs: Vec<BigRational> = c
                .iter()
                .zip(v)
                .map(|(ci, vi)| reduce_mod(&(ci + t_over_pi * vi), &ri(2)))
                .collect();
            SasPoint::from_exact(coeffs)
        }
        None => {
            let t = to_f64(t_over_pi) * std::f64::consts::PI;
            exp_move_f64(x, &v.iter().map(to_f64).collect::<Vec<_>>(), t)
        }
    }
}

/// Float-mode move: theta'(q) = theta(q) + t d(q), reduced mod 2 pi.
pub fn exp_move_f64(x: &SasPoint, d: &[f64], t: f64) -> SasPoint {
    let theta = x
        .theta
        .iter()
        .zip(d)
        .map(|(th, di)| (th + t * di).rem_euclid(2.0 * std::f64::consts::PI))
        .collect();
    SasPoint::from_theta(theta)
}

/// Feasibility flags for the classical angle-structure systems: the
/// real-valued (generalized) system with tetrahedron sums pi and edge sums
/// 2 pi exists iff every vertex link has zero Euler characteristic; the
/// positive (Casson-Rivin) polytope additionally demands all angles
/// positive, decided here by exact Fourier-Motzkin elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngleFeasibility {
    pub generalized: bool,
    pub positive: bool,
}

pub fn angle_structure_feasibility(tri: &Triangulation) -> AngleFeasibility {
    let generalized = tri.vertex_links().iter().all(|l| l.euler_char == 0);
    if !generalized || tri.tet_count() == 0 {
        return AngleFeasibility {
            generalized,
            positive: generalized && tri.tet_count() == 0,
        };
    }
    // particular solution of the affine system in pi-units: edge sums 2,
    // tetrahedron sums 1
    let b = tas_matrix(tri);
    let mut rhs = vec![ri(2); tri.num_edges()];
    rhs.extend(std::iter::repeat_n(ri(1), tri.tet_count()));
    let Some(c0) = b.solve(&rhs) else {
        // links can balance while the rational system is inconsistent only
        // in theory; report honestly
        return AngleFeasibility {
            generalized: false,
            positive: false,
        };
    };
    let tas = tas_basis(tri);
    // inequalities c0(q) + sum_i t_i u_i(q) > 0, one per quad
    let rows: Vec<Vec<BigRational>> = (0..tri.num_quads())
        .map(|q| {
            let mut row: Vec<BigRational> = tas.iter().map(|u| u[q].clone()).collect();
            row.push(c0[q].clone());
            row
        })
        .collect();
    AngleFeasibility {
        generalized,
        positive: fourier_motzkin_feasible(rows, tas.len()),
    }
}

/// Strict-inequality feasibility of { t : row[..vars] . t + row[vars] > 0 }
/// by variable elimination.
fn fourier_motzkin_feasible(mut rows: Vec<Vec<BigRational>>, vars: usize) -> bool {
    use num::Signed;
    for var in (0..vars).rev() {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut rest = Vec::new();
        for row in rows {
            if row[var].is_positive() {
                lower.push(row);
            } else if row[var].is_negative() {
                upper.push(row);
            } else {
                rest.push(row);
            }
        }
        for lo in &lower {
            for hi in &upper {
                // cancel the eliminated variable with positive multipliers
                let (a, b) = (lo[var].abs(), hi[var].abs());
                let mut combined: Vec<BigRational> =
                    lo.iter().zip(hi).map(|(l, h)| l * &b + h * &a).collect();
                combined[var] = rz();
                rest.push(normalize_row(combined));
            }
        }
        rest.sort();
        rest.dedup();
        rows = rest;
    }
    rows.iter().all(|row| row[vars].is_positive())
}

fn normalize_row(mut row: Vec<BigRational>) -> Vec<BigRational> {
    use num::Signed;
    if let Some(scale) = row.iter().find(|x| !x.is_zero()).map(Signed::abs) {
        for x in &mut row {
            *x /= &scale;
        }
    }
    row
}

/// The tangential direction attached to an edge class:
/// v_e(r) = sum_q i(q,e) omega(r,q). Membership in TAS is exactly the
/// Neumann-Zagier identities.
pub fn edge_generator(tri: &Triangulation, e: usize) -> TasVector {
    let nz = tri.nz_form();
    let nq = tri.num_quads();
    let mut v = vec![rz(); nq];
    for q in 0..nq {
        let i = tri.quad_edge_index(q, e);
        if i == 0 {
            continue;
        }
        for (r, slot) in v.iter_mut().enumerate() {
            let w = nz.omega(r, q);
            if w != 0 {
                *slot += ri(i as i64 * w as i64);
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, dot};
    use crate::rq::rq;
    use crate::tri::parse_triangulation;

    const DOUBLE_TET: &str = include_str!("../../../fixtures/double_tet.tri");
    const FIG8: &str = include_str!("../../../fixtures/fig8.tri");
    const ONE_TET: &str = include_str!("../../../fixtures/one_tet_rigid.tri");
    const CYCLIC3: &str = include_str!("../../../fixtures/cyclic3.tri");

    #[test]
    fn tas_dimension_formula() {
        for (text, expect) in [(FIG8, 3i64), (DOUBLE_TET, 2), (ONE_TET, 1)] {
            let tri = parse_triangulation(text).unwrap();
            let dim =
                tri.num_vertices() as i64 - tri.num_edges() as i64 + 2 * tri.tet_count() as i64;
            assert_eq!(dim, expect);
            assert_eq!(tas_basis(&tri).len() as i64, dim);
        }
        let tri = parse_triangulation(CYCLIC3).unwrap();
        let dim = tri.num_vertices() as i64 - tri.num_edges() as i64 + 2 * tri.tet_count() as i64;
        assert_eq!(tas_basis(&tri).len() as i64, dim);
    }

    #[test]
    fn basis_vectors_in_kernel() {
        let tri = parse_triangulation(FIG8).unwrap();
        let m = tas_matrix(&tri);
        for u in tas_basis(&tri) {
            assert!(linalg::is_zero_vec(&m.mul_vec(&u)));
        }
    }

    #[test]
    fn b_map_on_unit_vectors() {
        let tri = parse_triangulation(FIG8).unwrap();
        let zero = vec![rz(); tri.num_quads()];
        let (be, bt) = b_map(&tri, &zero);
        assert!(linalg::is_zero_vec(&be) && linalg::is_zero_vec(&bt));
        for q in 0..tri.num_quads() {
            let mut x = zero.clone();
            x[q] = ri(1);
            let (be, bt) = b_map(&tri, &x);
            for (e, v) in be.iter().enumerate() {
                assert_eq!(*v, ri(tri.quad_edge_index(q, e) as i64));
            }
            for (t, v) in bt.iter().enumerate() {
                assert_eq!(*v, if t == q / 3 { ri(1) } else { rz() });
            }
        }
    }

    #[test]
    fn a_map_gives_kr_projections() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let kr = crate::normal::kr_basis(&tri);
        let ne = tri.num_edges();
        for e in 0..ne {
            let mut he = vec![rz(); ne];
            he[e] = ri(1);
            let img = a_map(&tri, &he, &vec![rz(); tri.tet_count()]);
            assert_eq!(img, crate::normal::project_quad(&kr.w_edge[e]));
        }
    }

    #[test]
    fn adjoint_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for text in [FIG8, DOUBLE_TET, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            let (ne, nt, nq) = (tri.num_edges(), tri.tet_count(), tri.num_quads());
            for _ in 0..20 {
                let rand_rat = |rng: &mut rand_chacha::ChaCha8Rng| {
                    rq(rng.gen_range(-9..=9), rng.gen_range(1..=9))
                };
                let x: Vec<BigRational> = (0..nq).map(|_| rand_rat(&mut rng)).collect();
                let he: Vec<BigRational> = (0..ne).map(|_| rand_rat(&mut rng)).collect();
                let ht: Vec<BigRational> = (0..nt).map(|_| rand_rat(&mut rng)).collect();
                let (be, bt) = b_map(&tri, &x);
                let lhs = dot(&be, &he) + dot(&bt, &ht);
                let rhs = dot(&x, &a_map(&tri, &he, &ht));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        assert!(curvature_admissible(&tri, &k).is_ok());
        // single edge with turn 1/2 violates the global congruence
        let k = CurvatureAssignment::from_turns(&tri, vec![rq(1, 2), rz()]);
        assert!(matches!(
            curvature_admissible(&tri, &k),
            Err(CurvatureViolation::Global { .. })
        ));
        // both edges 1/2: global sum 1, and both edges are loops at the
        // single vertex so the vertex sum is 2 * (1/2 + 1/2) = 2
        let k = CurvatureAssignment::from_turns(&tri, vec![rq(1, 2), rq(1, 2)]);
        assert!(curvature_admissible(&tri, &k).is_ok());
        // vertex violation on the double: global sum integral, vertex sum not
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let mut turns = vec![rz(); tri.num_edges()];
        turns[0] = rq(1, 2);
        turns[5] = rq(1, 2);
        let k = CurvatureAssignment::from_turns(&tri, turns);
        assert!(matches!(
            curvature_admissible(&tri, &k),
            Err(CurvatureViolation::Vertex { .. })
        ));
    }

    #[test]
    fn curvature_file_parse() {
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::parse(&tri, "# comment\nedge 1 -1/3\n").unwrap();
        assert_eq!(k.turns[0], rz());
        assert_eq!(k.turns[1], rq(2, 3)); // stored reduced mod 1
        assert!(CurvatureAssignment::parse(&tri, "edge 7 1/2\n").is_err());
        assert!(CurvatureAssignment::parse(&tri, "edge 0 x\n").is_err());
        assert_eq!(
            CurvatureAssignment::parse(&tri, "").unwrap(),
            CurvatureAssignment::trivial(&tri)
        );
    }

    #[test]
    fn sas_point_construction() {
        for text in [FIG8, DOUBLE_TET, ONE_TET, CYCLIC3] {
            let tri = parse_triangulation(text).unwrap();
            let k = CurvatureAssignment::trivial(&tri);
            let p = find_sas_point(&tri, &k, &LatticeSearchOpts::default()).unwrap();
            assert!(sas_check_exact(&tri, &k, p.exact.as_ref().unwrap()));
            assert!(sas_residual(&tri, &k, &p.theta) < 1e-12);
        }
    }

    #[test]
    fn sas_empty_triangulation() {
        let tri = parse_triangulation("tets 0\n").unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let p = find_sas_point(&tri, &k, &LatticeSearchOpts::default()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn fig8_uniform_point_is_valid() {
        // theta = pi/3 on all six quads satisfies every congruence
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let coeffs = vec![rq(1, 3); 6];
        assert!(sas_check_exact(&tri, &k, &coeffs));
        let p = SasPoint::from_exact(coeffs);
        assert!(sas_residual(&tri, &k, &p.theta) < 1e-12);
    }

    #[test]
    fn nontrivial_curvatures_on_fig8() {
        let tri = parse_triangulation(FIG8).unwrap();
        for (a, b) in [
            (rq(1, 2), rq(1, 2)),
            (rq(1, 3), rq(2, 3)),
            (rq(1, 4), rq(3, 4)),
        ] {
            let k = CurvatureAssignment::from_turns(&tri, vec![a, b]);
            assert!(curvature_admissible(&tri, &k).is_ok());
            let p = find_sas_point(&tri, &k, &LatticeSearchOpts::default()).unwrap();
            assert!(sas_check_exact(&tri, &k, p.exact.as_ref().unwrap()));
            assert!(sas_residual(&tri, &k, &p.theta) < 1e-12);
        }
    }

    #[test]
    fn exp_move_preserves_membership() {
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let p = find_sas_point(&tri, &k, &LatticeSearchOpts::default()).unwrap();
        let basis = tas_basis(&tri);
        // exact mode
        let q = exp_move(&p, &basis[0], &rq(5, 7));
        assert!(sas_check_exact(&tri, &k, q.exact.as_ref().unwrap()));
        // t = 0 is the identity up to the mod-2pi reduction
        let q0 = exp_move(&p, &basis[0], &rz());
        let reduced: Vec<BigRational> = p
            .exact
            .as_ref()
            .unwrap()
            .iter()
            .map(|c| reduce_mod(c, &ri(2)))
            .collect();
        assert_eq!(q0.exact.as_ref().unwrap(), &reduced);
        // float mode keeps the residual tiny
        let d: Vec<f64> = basis[1].iter().map(to_f64).collect();
        let qf = exp_move_f64(&p, &d, 0.37);
        assert!(sas_residual(&tri, &k, &qf.theta) < 1e-12);
        // additivity up to the mod-2pi reduction
        let a = exp_move(&exp_move(&p, &basis[0], &rq(1, 3)), &basis[0], &rq(1, 6));
        let b = exp_move(&p, &basis[0], &rq(1, 2));
        assert_eq!(a.exact.unwrap(), b.exact.unwrap());
    }

    #[test]
    fn feasibility_flags() {
        // the fig-8 gluing has a torus link and carries the regular positive
        // structure (all angles pi/3)
        let tri = parse_triangulation(FIG8).unwrap();
        let f = angle_structure_feasibility(&tri);
        assert!(f.generalized && f.positive);
        // sphere links rule out even the real-valued system
        for text in [DOUBLE_TET, CYCLIC3] {
            let tri = parse_triangulation(text).unwrap();
            let f = angle_structure_feasibility(&tri);
            assert!(!f.generalized && !f.positive);
        }
    }

    #[test]
    fn edge_generators_are_tangential() {
        for text in [FIG8, DOUBLE_TET, ONE_TET, CYCLIC3] {
            let tri = parse_triangulation(text).unwrap();
            let m = tas_matrix(&tri);
            let basis = tas_basis(&tri);
            for e in 0..tri.num_edges() {
                let v = edge_generator(&tri, e);
                assert!(linalg::is_zero_vec(&m.mul_vec(&v)), "v_e not in ker B");
                assert!(linalg::in_span(&basis, &v));
            }
        }
    }
}
