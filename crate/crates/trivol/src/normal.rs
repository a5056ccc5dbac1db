//! Normal surface equations, the Kang-Rubinstein basis of their solution
//! space, quad-coordinate projection and lifting, and rigidity detection.
//!
//! Solution vectors live in Q^tris x Q^quads. One matching equation is
//! written per normal-arc class: the triangle and quad meeting the arc on
//! one side balance those on the other side. All computations here are
//! exact.

use num::{BigRational, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, RatMatrix};
use crate::rq::{denom_lcm, rat_str, ri, rz};
use crate::tri::{Triangulation, EDGE_MISSING_QUAD};

/// An element of the solution space of the matching equations, in
/// triangle + quad coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSolution {
    pub t_coords: Vec<BigRational>,
    pub q_coords: Vec<BigRational>,
}

impl NormalSolution {
    pub fn zero(tri: &Triangulation) -> Self {
        NormalSolution {
            t_coords: vec![rz(); tri.num_tris()],
            q_coords: vec![rz(); tri.num_quads()],
        }
    }

    fn as_flat(&self) -> Vec<BigRational> {
        let mut v = self.t_coords.clone();
        v.extend(self.q_coords.iter().cloned());
        v
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        NormalSolution {
            t_coords: self.t_coords.iter().map(|x| x * k).collect(),
            q_coords: self.q_coords.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        NormalSolution {
            t_coords: self
                .t_coords
                .iter()
                .zip(&other.t_coords)
                .map(|(a, b)| a + b)
                .collect(),
            q_coords: self
                .q_coords
                .iter()
                .zip(&other.q_coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.t_coords
            .iter()
            .chain(&self.q_coords)
            .all(|x| x.denom().is_one())
    }
}

/// The Kang-Rubinstein spanning set: one vector per tetrahedron and one per
/// edge class.
#[derive(Clone, Debug)]
pub struct KrBasis {
    pub w_tet: Vec<NormalSolution>,
    pub w_edge: Vec<NormalSolution>,
}

impl KrBasis {
    pub fn stacked(&self) -> Vec<Vec<BigRational>> {
        self.w_edge
            .iter()
            .chain(&self.w_tet)
            .map(NormalSolution::as_flat)
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum NormalError {
    #[error("quad vector is not in the projection of the solution space")]
    NotInProjection,
    #[error("no nonnegative representative: quad coordinates contain a negative entry")]
    NoNonnegativeRepresentative,
}

/// The matching-equation matrix: one row per normal-arc class, columns
/// indexed by triangles then quads, entries accumulated when classes
/// coincide on both sides of a face.
pub fn matching_matrix(tri: &Triangulation) -> RatMatrix {
    let (nt, nq) = (tri.num_tris(), tri.num_quads());
    let mut m = RatMatrix::zeros(tri.arc_classes().len(), nt + nq);
    for (row, arc) in tri.arc_classes().iter().enumerate() {
        let mut add = |col: usize, delta: i64| {
            let v = m.get(row, col) + ri(delta);
            m.set(row, col, v);
        };
        let sides = arc.reps;
        for (side, sign) in sides.iter().zip([1i64, -1]) {
            let (t, f, c) = *side;
            // the triangle at the arc's corner and the quad missing edge {f, c}
            let tri_col = 4 * t + c as usize;
            let e = crate::tri::edge_index(f, c);
            let quad_col = nt + 3 * t + EDGE_MISSING_QUAD[e];
            add(tri_col, sign);
            add(quad_col, sign);
        }
    }
    m
}

/// The vectors W_sigma (+1 on a tetrahedron's quads, -1 on its triangles)
/// and W_e (i(q,e) on quads, -i(t,e) on triangles).
pub fn kr_basis(tri: &Triangulation) -> KrBasis {
    let mut w_tet = Vec::with_capacity(tri.tet_count());
    for t in 0..tri.tet_count() {
        let mut s = NormalSolution::zero(tri);
        for k in 0..3 {
            s.q_coords[3 * t + k] = ri(1);
        }
        for v in 0..4 {
            s.t_coords[4 * t + v] = ri(-1);
        }
        w_tet.push(s);
    }
    let mut w_edge = Vec::with_capacity(tri.num_edges());
    for e in 0..tri.num_edges() {
        let mut s = NormalSolution::zero(tri);
        for q in 0..tri.num_quads() {
            s.q_coords[q] = ri(tri.quad_edge_index(q, e) as i64);
        }
        for t in 0..tri.num_tris() {
            s.t_coords[t] = ri(-(tri.tri_edge_index(t, e) as i64));
        }
        w_edge.push(s);
    }
    KrBasis { w_tet, w_edge }
}

/// True iff all matching equations vanish exactly.
pub fn sns_membership(tri: &Triangulation, x: &NormalSolution) -> bool {
    let m = matching_matrix(tri);
    linalg::is_zero_vec(&m.mul_vec(&x.as_flat()))
}

/// Forgets triangle coordinates.
pub fn project_quad(x: &NormalSolution) -> Vec<BigRational> {
    x.q_coords.clone()
}

/// The matrix of the map A: Q^E x Q^T -> Q^quads,
/// A(h)(q) = h(tet of q) + sum_e i(q,e) h(e). Columns: edges then tets.
pub fn a_matrix(tri: &Triangulation) -> RatMatrix {
    let (ne, nt) = (tri.num_edges(), tri.tet_count());
    let mut m = RatMatrix::zeros(tri.num_quads(), ne + nt);
    for q in 0..tri.num_quads() {
        for e in 0..ne {
            let i = tri.quad_edge_index(q, e);
            if i > 0 {
                m.set(q, e, ri(i as i64));
            }
        }
        m.set(q, ne + q / 3, ri(1));
    }
    m
}

/// Lifts a quad vector to a full normal solution: solves A(h) = z for
/// h in Q^E x Q^T (deterministic pivot order, free variables zero) and
/// assembles sum h(e) W_e + sum h(sigma) W_sigma. The input must be
/// orthogonal to the tangential angle structures, which is checked exactly.
pub fn lift_from_quad(
    tri: &Triangulation,
    tas_basis: &[Vec<BigRational>],
    z: &[BigRational],
) -> Result<NormalSolution, NormalError> {
    assert_eq!(z.len(), tri.num_quads());
    for u in tas_basis {
        if !linalg::dot(z, u).is_zero() {
            return Err(NormalError::NotInProjection);
        }
    }
    let a = a_matrix(tri);
    let h = a.solve(z).ok_or(NormalError::NotInProjection)?;
    let kr = kr_basis(tri);
    let ne = tri.num_edges();
    let mut s = NormalSolution::zero(tri);
    for (e, he) in h[..ne].iter().enumerate() {
        if !he.is_zero() {
            s = s.add(&kr.w_edge[e].scale(he));
        }
    }
    for (t, ht) in h[ne..].iter().enumerate() {
        if !ht.is_zero() {
            s = s.add(&kr.w_tet[t].scale(ht));
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidPair {
    pub q1: usize,
    pub q2: usize,
    /// ratio lambda with x(q1) = lambda * x(q2) on all of TAS
    pub ratio: String,
}

/// Angle-rigid quads (coordinate identically zero on TAS) and 2-angle-rigid
/// pairs (proportional nonzero coordinate functionals), decided exactly
/// from a TAS basis.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub angle_rigid: Vec<usize>,
    pub two_angle_rigid: Vec<RigidPair>,
}

/// The coordinate functional of quad `q` on the TAS basis: the q-th column.
fn tas_column(tas_basis: &[Vec<BigRational>], q: usize) -> Vec<BigRational> {
    tas_basis.iter().map(|u| u[q].clone()).collect()
}

pub fn rigidity_report(tri: &Triangulation, tas_basis: &[Vec<BigRational>]) -> RigidityReport {
    let nq = tri.num_quads();
    let cols: Vec<Vec<BigRational>> = (0..nq).map(|q| tas_column(tas_basis, q)).collect();
    let angle_rigid: Vec<usize> = (0..nq).filter(|&q| linalg::is_zero_vec(&cols[q])).collect();
    let mut two_angle_rigid = Vec::new();
    for q1 in 0..nq {
        if linalg::is_zero_vec(&cols[q1]) {
            continue;
        }
        for q2 in q1 + 1..nq {
            if linalg::is_zero_vec(&cols[q2]) {
                continue;
            }
            if let Some(lambda) = linalg::proportionality(&cols[q1], &cols[q2]) {
                two_angle_rigid.push(RigidPair {
                    q1,
                    q2,
                    ratio: rat_str(&lambda),
                });
            }
        }
    }
    RigidityReport {
        angle_rigid,
        two_angle_rigid,
    }
}

/// Exact proportionality partners of the coordinate functional at `q0`:
/// `None` if the functional vanishes identically, otherwise the list of
/// (q1, lambda) with x(q0) = lambda * x(q1) on TAS.
pub fn rigidity_partners(
    tri: &Triangulation,
    tas_basis: &[Vec<BigRational>],
    q0: usize,
) -> Option<Vec<(usize, BigRational)>> {
    let col0 = tas_column(tas_basis, q0);
    if linalg::is_zero_vec(&col0) {
        return None;
    }
    let mut partners = Vec::new();
    for q1 in 0..tri.num_quads() {
        if q1 == q0 {
            continue;
        }
        let col1 = tas_column(tas_basis, q1);
        if linalg::is_zero_vec(&col1) {
            continue;
        }
        if let Some(lambda) = linalg::proportionality(&col0, &col1) {
            partners.push((q1, lambda));
        }
    }
    Some(partners)
}

/// Normal coordinates of the vertex link: one unit of each normal triangle
/// at the vertex class, no quads.
pub fn vertex_link_vector(tri: &Triangulation, v: usize) -> NormalSolution {
    let mut s = NormalSolution::zero(tri);
    for &(t, w) in &tri.vertex_classes()[v] {
        s.t_coords[4 * t + w as usize] += ri(1);
    }
    s
}

/// Scales `s` by a positive integer and adds vertex-link vectors so that
/// all coordinates become nonnegative integers, when possible. Link vectors
/// have no quad support, so mixed-sign or negative quad coordinates cannot
/// be repaired.
pub fn normalize_to_nonnegative(
    tri: &Triangulation,
    s: &NormalSolution,
) -> Result<NormalSolution, NormalError> {
    if s.q_coords.iter().any(Signed::is_negative) {
        return Err(NormalError::NoNonnegativeRepresentative);
    }
    let all: Vec<BigRational> = s.as_flat();
    let k = BigRational::from_integer(denom_lcm(&all));
    let mut out = s.scale(&k);
    for v in 0..tri.num_vertices() {
        // smallest m_v >= 0 clearing the negative triangle coordinates at v
        let mut m = rz();
        for &(t, w) in &tri.vertex_classes()[v] {
            let c = &out.t_coords[4 * t + w as usize];
            if c.is_negative() && -c.clone() > m {
                m = -c.clone();
            }
        }
        if !m.is_zero() {
            out = out.add(&vertex_link_vector(tri, v).scale(&m));
        }
    }
    debug_assert!(out.is_integer());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::tas_basis;
    use crate::tri::parse_triangulation;

    const DOUBLE_TET: &str = include_str!("../../../fixtures/double_tet.tri");
    const FIG8: &str = include_str!("../../../fixtures/fig8.tri");
    const ONE_TET: &str = include_str!("../../../fixtures/one_tet_rigid.tri");

    #[test]
    fn matching_matrix_shape_and_kernel() {
        for text in [DOUBLE_TET, FIG8, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            let m = matching_matrix(&tri);
            assert_eq!(m.rows(), 6 * tri.tet_count());
            assert_eq!(m.cols(), 7 * tri.tet_count());
            let kernel_dim = m.nullspace().len();
            assert_eq!(kernel_dim, tri.num_edges() + tri.tet_count());
        }
    }

    #[test]
    fn zero_is_a_solution() {
        let tri = parse_triangulation(FIG8).unwrap();
        assert!(sns_membership(&tri, &NormalSolution::zero(&tri)));
    }

    #[test]
    fn kr_vectors_solve_matching() {
        for text in [DOUBLE_TET, FIG8, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            let kr = kr_basis(&tri);
            for w in kr.w_tet.iter().chain(&kr.w_edge) {
                assert!(sns_membership(&tri, w));
            }
            // rank equals |E| + |T|
            let rank = RatMatrix::from_rows(kr.stacked()).rank();
            assert_eq!(rank, tri.num_edges() + tri.tet_count());
        }
    }

    #[test]
    fn w_sigma_shape() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let kr = kr_basis(&tri);
        let w = &kr.w_tet[0];
        for k in 0..3 {
            assert_eq!(w.q_coords[k], ri(1));
            assert_eq!(w.q_coords[3 + k], rz());
        }
        for v in 0..4 {
            assert_eq!(w.t_coords[v], ri(-1));
            assert_eq!(w.t_coords[4 + v], rz());
        }
        // projection of W_e is the index vector
        let we = &kr.w_edge[0];
        for q in 0..tri.num_quads() {
            assert_eq!(we.q_coords[q], ri(tri.quad_edge_index(q, 0) as i64));
        }
    }

    #[test]
    fn single_quad_not_in_sns() {
        let tri = parse_triangulation(FIG8).unwrap();
        let mut x = NormalSolution::zero(&tri);
        x.q_coords[0] = ri(1);
        assert!(!sns_membership(&tri, &x));
    }

    #[test]
    fn lift_recovers_projections() {
        for text in [DOUBLE_TET, FIG8, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            let tas = tas_basis(&tri);
            // zero lifts to zero
            let z = vec![rz(); tri.num_quads()];
            let s = lift_from_quad(&tri, &tas, &z).unwrap();
            assert_eq!(s, NormalSolution::zero(&tri));
            // projections of KR vectors lift back into the solution space
            let kr = kr_basis(&tri);
            for w in kr.w_edge.iter().chain(&kr.w_tet) {
                let z = project_quad(w);
                let s = lift_from_quad(&tri, &tas, &z).unwrap();
                assert!(sns_membership(&tri, &s));
                assert_eq!(project_quad(&s), z);
            }
        }
    }

    #[test]
    fn lift_rejects_non_orthogonal() {
        let tri = parse_triangulation(FIG8).unwrap();
        let tas = tas_basis(&tri);
        let mut z = vec![rz(); tri.num_quads()];
        z[0] = ri(1); // fig-8 has no rigid quads, so q* is never orthogonal to TAS
        assert!(matches!(
            lift_from_quad(&tri, &tas, &z),
            Err(NormalError::NotInProjection)
        ));
    }

    #[test]
    fn rigidity_on_fixtures() {
        let tri = parse_triangulation(ONE_TET).unwrap();
        let tas = tas_basis(&tri);
        let rep = rigidity_report(&tri, &tas);
        // the quad missing both degree-1 edges is angle-rigid
        assert_eq!(rep.angle_rigid, vec![0]);

        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let tas = tas_basis(&tri);
        let rep = rigidity_report(&tri, &tas);
        assert!(rep.angle_rigid.is_empty());
        // one pair per opposite-edge pair: (q0k, q1k) for k = 0,1,2
        let pairs: Vec<(usize, usize)> = rep.two_angle_rigid.iter().map(|p| (p.q1, p.q2)).collect();
        assert_eq!(pairs, vec![(0, 3), (1, 4), (2, 5)]);
        for p in &rep.two_angle_rigid {
            assert_eq!(p.ratio, "-1");
        }

        let tri = parse_triangulation(FIG8).unwrap();
        let tas = tas_basis(&tri);
        let rep = rigidity_report(&tri, &tas);
        assert!(rep.angle_rigid.is_empty());
        assert!(rep.two_angle_rigid.is_empty());
    }

    #[test]
    fn link_vectors() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let mut total = NormalSolution::zero(&tri);
        for v in 0..tri.num_vertices() {
            let lv = vertex_link_vector(&tri, v);
            assert!(sns_membership(&tri, &lv));
            let support: usize = lv.t_coords.iter().filter(|c| !c.is_zero()).count();
            assert_eq!(support, 2);
            total = total.add(&lv);
        }
        // each triangle class has exactly one vertex
        assert!(total.t_coords.iter().all(|c| *c == ri(1)));
    }

    #[test]
    fn normalize_cases() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        // already nonnegative integers: unchanged
        let lv = vertex_link_vector(&tri, 0);
        assert_eq!(normalize_to_nonnegative(&tri, &lv).unwrap(), lv);
        // W_sigma: negative triangle coordinates get repaired by links
        let kr = kr_basis(&tri);
        let fixed = normalize_to_nonnegative(&tri, &kr.w_tet[0]).unwrap();
        assert!(fixed
            .t_coords
            .iter()
            .chain(&fixed.q_coords)
            .all(|c| !c.is_negative()));
        assert!(sns_membership(&tri, &fixed));
        assert_eq!(fixed.q_coords, kr.w_tet[0].q_coords);
        // mixed-sign quads cannot be repaired
        let mut bad = NormalSolution::zero(&tri);
        bad.q_coords[0] = ri(1);
        bad.q_coords[1] = ri(-1);
        assert!(matches!(
            normalize_to_nonnegative(&tri, &bad),
            Err(NormalError::NoNonnegativeRepresentative)
        ));
    }
}
