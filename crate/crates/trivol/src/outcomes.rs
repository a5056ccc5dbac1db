//! Converts a classified critical point into its advertised output: a
//! verified solution of the gluing equations in the smooth case, or exact
//! 2-quad-type solutions of the normal surface equations (and clusters of
//! them) in the non-smooth case.
//!
//! Shape parameters are extracted from a smooth point by
//! z(q) = x(q) * prod_r sin(arg x(r))^{omega(q, r)}; within each
//! tetrahedron this is z(q_i) = x_i sin(arg x_j) / sin(arg x_k) with
//! omega(q_i, q_j) = 1. The relation z(q')(1 - z(q)) = 1 and the
//! tetrahedron product -1 hold for any smooth point; the per-edge product
//! condition is exactly what criticality adds.

use num::complex::Complex64;
use num::{BigRational, Signed};
use thiserror::Error;

use crate::angles::{b_map_f64, tas_basis, CurvatureAssignment, SasPoint, TasVector};
use crate::linalg::{self, fl, RatMatrix};
use crate::normal::{a_matrix, lift_from_quad, rigidity_partners, NormalSolution};
use crate::rq::{denom_lcm, ri, rz, to_f64};
use crate::tri::Triangulation;
use crate::volume::{classify_point, smooth_gradient};

#[derive(Debug, Error)]
pub enum OutcomeError {
    #[error("non-smooth input: quad {quad} has a flat angle")]
    NonSmoothInput { quad: usize },
    #[error("point is not critical: TAS-projected gradient norm {norm}")]
    NotCritical { norm: f64 },
    #[error("no proportionality at quad {q0}: it does not support a 2-quad certificate")]
    NoProportionality { q0: usize },
    #[error(transparent)]
    Normal(#[from] crate::normal::NormalError),
}

/// A complex shape-parameter assignment, one per quad.
#[derive(Clone, Debug)]
pub struct ThurstonSolution {
    pub z: Vec<Complex64>,
}

/// Shape parameters of any smooth point (criticality not required).
pub fn shape_parameters(
    tri: &Triangulation,
    x: &SasPoint,
    eps_flat: f64,
) -> Result<ThurstonSolution, OutcomeError> {
    let nz = tri.nz_form();
    let nq = tri.num_quads();
    for q in 0..nq {
        if x.theta[q].sin().abs() <= eps_flat {
            return Err(OutcomeError::NonSmoothInput { quad: q });
        }
    }
    let mut z = Vec::with_capacity(nq);
    for q in 0..nq {
        let mut modulus = 1.0f64;
        let t = q / 3;
        for r in 3 * t..3 * t + 3 {
            match nz.omega(q, r) {
                1 => modulus *= x.theta[r].sin(),
                -1 => modulus /= x.theta[r].sin(),
                _ => {}
            }
        }
        z.push(Complex64::from_polar(
            modulus.abs(),
            x.theta[q]
                + if modulus < 0.0 {
                    std::f64::consts::PI
                } else {
                    0.0
                },
        ));
    }
    Ok(ThurstonSolution { z })
}

/// Shape parameters of a smooth critical point. The criticality gate is the
/// TAS-projected gradient norm.
pub fn thurston_from_smooth(
    tri: &Triangulation,
    x: &SasPoint,
    eps_flat: f64,
    crit_tol: f64,
) -> Result<ThurstonSolution, OutcomeError> {
    let cls = classify_point(tri, &x.theta, eps_flat);
    if let Some(&q) = cls.flat_quads.first() {
        return Err(OutcomeError::NonSmoothInput { quad: q });
    }
    let g = smooth_gradient(&x.theta, eps_flat).expect("smooth point");
    let basis: Vec<Vec<f64>> = tas_basis(tri)
        .iter()
        .map(|u| u.iter().map(to_f64).collect())
        .collect();
    let norm = fl::norm(&fl::project(&fl::orthonormalize(&basis), &g));
    if norm > crit_tol {
        return Err(OutcomeError::NotCritical { norm });
    }
    shape_parameters(tri, x, eps_flat)
}

/// Residual report for the gluing equations.
#[derive(Clone, Debug)]
pub struct ThurstonReport {
    /// max |z(q')(1 - z(q)) - 1| over pairs with omega(q, q') = 1
    pub pair_residual: f64,
    /// max |prod_{q in sigma} z(q) + 1| over tetrahedra
    pub tet_residual: f64,
    /// max |prod_q z(q)^{2 i(q,e)} - k(e)^2| over edges
    pub edge_residual: f64,
    /// per-edge sign in prod z^{i(q,e)} = sign * k(e)
    pub edge_signs: Vec<i8>,
    /// max | prod z^{i(q,e)} - sign * k(e) | over edges
    pub edge_sign_residual: f64,
    /// all shapes real to the given tolerance
    pub real_solution: bool,
}

pub fn verify_thurston(
    tri: &Triangulation,
    z: &ThurstonSolution,
    k: &CurvatureAssignment,
    tol: f64,
) -> ThurstonReport {
    let nz = tri.nz_form();
    let nq = tri.num_quads();
    let one = Complex64::new(1.0, 0.0);

    let mut pair_residual = 0.0f64;
    for q in 0..nq {
        for q2 in 0..nq {
            if nz.omega(q, q2) == 1 {
                let r = (z.z[q2] * (one - z.z[q]) - one).norm();
                pair_residual = pair_residual.max(r);
            }
        }
    }

    let mut tet_residual = 0.0f64;
    for t in 0..tri.tet_count() {
        let prod = z.z[3 * t] * z.z[3 * t + 1] * z.z[3 * t + 2];
        tet_residual = tet_residual.max((prod + one).norm());
    }

    let mut edge_residual = 0.0f64;
    let mut edge_signs = Vec::with_capacity(tri.num_edges());
    let mut edge_sign_residual = 0.0f64;
    for e in 0..tri.num_edges() {
        let mut prod = one;
        for q in 0..nq {
            let i = tri.quad_edge_index(q, e);
            if i > 0 {
                prod *= z.z[q].powi(i as i32);
            }
        }
        let turn = 2.0 * std::f64::consts::PI * to_f64(&k.turns[e]);
        let ke = Complex64::from_polar(1.0, turn);
        edge_residual = edge_residual.max((prod * prod - ke * ke).norm());
        let (sign, res) = if (prod - ke).norm() <= (prod + ke).norm() {
            (1i8, (prod - ke).norm())
        } else {
            (-1i8, (prod + ke).norm())
        };
        edge_signs.push(sign);
        edge_sign_residual = edge_sign_residual.max(res);
    }

    let real_solution = z.z.iter().all(|w| w.im.abs() <= tol);
    ThurstonReport {
        pair_residual,
        tet_residual,
        edge_residual,
        edge_signs,
        edge_sign_residual,
        real_solution,
    }
}

/// The log-sine quad vector of a smooth critical point together with an
/// exact least-squares lift through the map A.
#[derive(Clone, Debug)]
pub struct LogSineLift {
    /// y(q) = -ln|sin(arg x(q))|
    pub y: Vec<f64>,
    /// max |<y, u>| over the TAS basis (the criticality test)
    pub orthogonality_residual: f64,
    /// least-squares solution h of A(h) ~ y (edges then tetrahedra)
    pub h: Vec<f64>,
    /// sup-norm residual |A(h) - y|
    pub lift_residual: f64,
}

pub fn log_sine_vector(
    tri: &Triangulation,
    x: &SasPoint,
    tas: &[TasVector],
    tol: f64,
) -> Result<LogSineLift, OutcomeError> {
    let y: Vec<f64> = x.theta.iter().map(|t| -t.sin().abs().ln()).collect();
    if let Some(q) = y.iter().position(|v| !v.is_finite()) {
        return Err(OutcomeError::NonSmoothInput { quad: q });
    }
    let mut ortho = 0.0f64;
    for u in tas {
        let uf: Vec<f64> = u.iter().map(to_f64).collect();
        ortho = ortho.max(fl::dot(&y, &uf).abs());
    }
    if ortho > tol {
        return Err(OutcomeError::NotCritical { norm: ortho });
    }
    // exact least squares through the integer matrix A: the normal
    // equations A^t A h = A^t y are always consistent over the rationals
    let a = a_matrix(tri);
    let at = a.transpose();
    let y_rat: Vec<BigRational> = y
        .iter()
        .map(|&v| BigRational::from_float(v).expect("finite"))
        .collect();
    let rhs = at.mul_vec(&y_rat);
    let mut ata = RatMatrix::zeros(at.rows(), at.rows());
    for i in 0..at.rows() {
        for j in 0..at.rows() {
            ata.set(i, j, linalg::dot(at.row(i), at.row(j)));
        }
    }
    let h_rat = ata.solve(&rhs).expect("normal equations are consistent");
    let lift = a.mul_vec(&h_rat);
    let lift_residual = lift
        .iter()
        .zip(&y_rat)
        .map(|(l, t)| to_f64(&(l - t)).abs())
        .fold(0.0f64, f64::max);
    Ok(LogSineLift {
        y,
        orthogonality_residual: ortho,
        h: h_rat.iter().map(to_f64).collect(),
        lift_residual,
    })
}

/// An exact 2-quad-type solution of the normal surface equations: integer
/// coordinates, quad support in {q0, q1}, nonzero at q0.
#[derive(Clone, Debug)]
pub struct TwoQuadCertificate {
    pub q0: usize,
    /// Partner quad; absent when the coordinate functional at q0 vanishes
    /// identically (one-quad case).
    pub q1: Option<usize>,
    /// lambda with x(q0) = lambda x(q1) on TAS.
    pub lambda: Option<BigRational>,
    /// Other quads that would serve as q1 (lowest-index partner is chosen).
    pub alternates: Vec<usize>,
    pub solution: NormalSolution,
}

/// Builds the certificate at q0 by the exact proportionality test on TAS
/// coordinate functionals: the quad vector q0* - lambda q1* (or q0* alone)
/// lies in the orthogonal complement of TAS, lifts to a normal solution,
/// and is scaled to integers with positive q0 coordinate.
pub fn two_quad_certificate(
    tri: &Triangulation,
    tas: &[TasVector],
    q0: usize,
) -> Result<TwoQuadCertificate, OutcomeError> {
    let nq = tri.num_quads();
    assert!(q0 < nq);
    let mut zvec = vec![rz(); nq];
    let (q1, lambda, alternates) = match rigidity_partners(tri, tas, q0) {
        None => {
            zvec[q0] = ri(1);
            (None, None, Vec::new())
        }
        Some(partners) => {
            let Some((q1, lambda)) = partners.first().cloned() else {
                return Err(OutcomeError::NoProportionality { q0 });
            };
            zvec[q0] = ri(1);
            zvec[q1] = -lambda.clone();
            let alternates = partners.iter().skip(1).map(|(q, _)| *q).collect();
            (Some(q1), Some(lambda), alternates)
        }
    };
    let s = lift_from_quad(tri, tas, &zvec)?;
    // scale to integers, sign-normalized so the q0 coordinate is positive
    let all: Vec<BigRational> = s.t_coords.iter().chain(&s.q_coords).cloned().collect();
    let mut scale = BigRational::from_integer(denom_lcm(&all));
    if s.q_coords[q0].is_negative() {
        scale = -scale;
    }
    let solution = s.scale(&scale);
    debug_assert!(solution.is_integer());
    debug_assert!(solution.q_coords[q0].is_positive());
    Ok(TwoQuadCertificate {
        q0,
        q1,
        lambda,
        alternates,
        solution,
    })
}

/// A tetrahedron all three of whose quads carry 2-quad-type solutions.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub tet: usize,
    pub certificates: [TwoQuadCertificate; 3],
}

/// Finds every tetrahedron whose three quads all admit certificates.
pub fn cluster_detect(tri: &Triangulation, tas: &[TasVector]) -> Vec<Cluster> {
    let mut clusters = Vec::new();
    for t in 0..tri.tet_count() {
        let certs: Vec<TwoQuadCertificate> = (0..3)
            .filter_map(|k| two_quad_certificate(tri, tas, 3 * t + k).ok())
            .collect();
        if let Ok(certificates) = <[TwoQuadCertificate; 3]>::try_from(certs) {
            clusters.push(Cluster {
                tet: t,
                certificates,
            });
        }
    }
    clusters
}

/// True when the smooth criticality gate passes (used by callers that need
/// the boolean rather than the extraction).
pub fn is_smooth_critical(tri: &Triangulation, x: &SasPoint, eps_flat: f64, tol: f64) -> bool {
    thurston_from_smooth(tri, x, eps_flat, tol).is_ok()
}

/// Residual of tangency for a float vector (diagnostic helper).
pub fn tangency_residual(tri: &Triangulation, b: &[f64]) -> f64 {
    let (be, bt) = b_map_f64(tri, b);
    be.iter().chain(&bt).fold(0.0f64, |m, v| m.max(v.abs()))
}
