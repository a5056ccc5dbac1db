//! The volume functional on circle-valued angle structures, its gradient
//! and subderivatives, ascent-based maximization, and the smooth /
//! non-smooth classification of critical points.
//!
//! The volume of a point is the sum of Lobachevsky values of its quad
//! angles. It is smooth exactly where no angle is congruent to 0 mod pi;
//! at flat coordinates only one-sided subderivative information exists
//! (with a possible log |t| blow-up), and the optimizer switches from
//! projected gradient ascent to subderivative probing there.

use num::{BigRational, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::angles::{
    self, exp_move, find_sas_point, tas_basis, CurvatureAssignment, LatticeSearchOpts, SasPoint,
    TasVector,
};
use crate::linalg::fl;
use crate::lobachevsky::{lambda_max, lobachevsky};
use crate::rq::{ri, rq, rz, to_f64};
use crate::tri::Triangulation;

const ARMIJO_SLOPE: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_STEP0: f64 = 1.0;
const MIN_STEP: f64 = 1e-14;
const ESCAPE_STEP0: f64 = 0.25;
/// Tolerance on subderivative probes when declaring a flat point critical.
const SUB_TOL: f64 = 1e-8;
/// Volumes within this distance are merged as ties (broken by seed index).
const TIE_TOL: f64 = 1e-10;
/// Residual bound on the non-smooth balance identity for verification.
const EQ_BALANCE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum VolumeError {
    #[error("non-smooth point: |sin theta| <= eps_flat at quad {quad}")]
    NonSmoothPoint { quad: usize },
    #[error("direction is not tangent: constraint sum {value} at {which}")]
    NotTangent { which: String, value: f64 },
    #[error(transparent)]
    Angle(#[from] crate::angles::AngleError),
    #[error("did not converge within the iteration cap")]
    DidNotConverge(Box<CriticalReport>),
}

/// Total volume: sum of Lobachevsky values over all quads.
pub fn volume(theta: &[f64]) -> f64 {
    theta.iter().map(|&t| lobachevsky(t)).sum()
}

/// Upper bound 3 |T| Lambda(pi/6) for |V|.
pub fn volume_bound(tri: &Triangulation) -> f64 {
    3.0 * tri.tet_count() as f64 * lambda_max()
}

/// The vector g(q) = -ln|sin theta(q)|; for tangential v the pairing
/// <g, v> is the directional derivative of the volume along e^{tv}.
pub fn smooth_gradient(theta: &[f64], eps_flat: f64) -> Result<Vec<f64>, VolumeError> {
    theta
        .iter()
        .enumerate()
        .map(|(q, &t)| {
            let s = t.sin().abs();
            if s <= eps_flat {
                Err(VolumeError::NonSmoothPoint { quad: q })
            } else {
                Ok(-s.ln())
            }
        })
        .collect()
}

/// Flat structure of a point: Y, Y', and the flat / partially flat
/// tetrahedra. A quad is flat when |sin theta(q)| <= eps_flat; a
/// tetrahedron is flat when all three of its quads are, partially flat
/// when exactly one is. Y' collects the flat quads whose other two
/// tetrahedron mates are non-flat.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Classification {
    pub flat_quads: Vec<usize>,
    pub y_prime: Vec<usize>,
    pub flat_tets: Vec<usize>,
    pub partially_flat_tets: Vec<usize>,
}

impl Classification {
    pub fn is_smooth(&self) -> bool {
        self.flat_quads.is_empty()
    }
}

pub fn classify_point(tri: &Triangulation, theta: &[f64], eps_flat: f64) -> Classification {
    let mut cls = Classification::default();
    for t in 0..tri.tet_count() {
        let flats: Vec<usize> = (0..3)
            .map(|k| 3 * t + k)
            .filter(|&q| theta[q].sin().abs() <= eps_flat)
            .collect();
        match flats.len() {
            0 => {}
            1 => {
                cls.partially_flat_tets.push(t);
                cls.y_prime.extend(&flats);
                cls.flat_quads.extend(&flats);
            }
            3 => {
                cls.flat_tets.push(t);
                cls.flat_quads.extend(&flats);
            }
            _ => {
                // two flat angles cannot happen at an exact structure (the
                // tetrahedron sum forces the third flat); classify the flats
                // into Y without flat/partially-flat tet status
                cls.flat_quads.extend(&flats);
            }
        }
    }
    cls
}

/// Per-tetrahedron contribution to a directional subderivative.
#[derive(Clone, Debug, Serialize)]
pub struct TetTerm {
    pub tet: usize,
    pub flat_count: usize,
    pub log_coeff: f64,
    pub finite_part: f64,
}

/// Directional subderivative data: the derivative of the volume along
/// e^{tb} behaves as -log_coeff * ln|t| + finite_part + o(1) as t -> 0,
/// so the limit is +inf when log_coeff > 0, -inf when log_coeff < 0, and
/// finite_part otherwise. log_coeff equals the sum of b over Y'.
#[derive(Clone, Debug)]
pub struct Subderivative {
    pub log_coeff: f64,
    pub finite_part: f64,
    pub tet_terms: Vec<TetTerm>,
}

impl Subderivative {
    pub fn limit(&self) -> f64 {
        if self.log_coeff > 0.0 {
            f64::INFINITY
        } else if self.log_coeff < 0.0 {
            f64::NEG_INFINITY
        } else {
            self.finite_part
        }
    }
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.abs().ln()
    }
}

pub fn directional_subderivative(
    tri: &Triangulation,
    theta: &[f64],
    b: &[f64],
    eps_flat: f64,
) -> Result<Subderivative, VolumeError> {
    let scale = 1.0 + b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (be, bt) = angles::b_map_f64(tri, b);
    for (e, v) in be.iter().enumerate() {
        if v.abs() > 1e-8 * scale {
            return Err(VolumeError::NotTangent {
                which: format!("edge {e}"),
                value: *v,
            });
        }
    }
    for (t, v) in bt.iter().enumerate() {
        if v.abs() > 1e-8 * scale {
            return Err(VolumeError::NotTangent {
                which: format!("tet {t}"),
                value: *v,
            });
        }
    }

    let mut tet_terms = Vec::with_capacity(tri.tet_count());
    let mut log_coeff = 0.0;
    let mut finite_part = 0.0;
    for t in 0..tri.tet_count() {
        let quads = [3 * t, 3 * t + 1, 3 * t + 2];
        let flat: Vec<bool> = quads
            .iter()
            .map(|&q| theta[q].sin().abs() <= eps_flat)
            .collect();
        let nflat = flat.iter().filter(|&&f| f).count();
        let mut term = TetTerm {
            tet: t,
            flat_count: nflat,
            log_coeff: 0.0,
            finite_part: 0.0,
        };
        for (i, &q) in quads.iter().enumerate() {
            if flat[i] {
                // only flat quads whose two tetrahedron mates are non-flat
                // carry a log term; in a fully flat tetrahedron the log
                // coefficients cancel because tangency forces sum b = 0
                if nflat == 1 {
                    term.log_coeff += b[q];
                }
                term.finite_part -= x_ln_x(b[q]);
            } else {
                term.finite_part -= b[q] * theta[q].sin().abs().ln();
            }
        }
        log_coeff += term.log_coeff;
        finite_part += term.finite_part;
        tet_terms.push(term);
    }
    Ok(Subderivative {
        log_coeff,
        finite_part,
        tet_terms,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct MaximizeOpts {
    pub grad_tol: f64,
    pub eps_flat: f64,
    pub max_iters: usize,
    pub multistart: usize,
    pub seed: u64,
    pub lattice: LatticeSearchOpts,
}

impl Default for MaximizeOpts {
    fn default() -> Self {
        MaximizeOpts {
            grad_tol: 1e-9,
            eps_flat: 1e-7,
            max_iters: 10_000,
            multistart: 8,
            seed: 0,
            lattice: LatticeSearchOpts::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub volume: f64,
    pub grad_norm: Option<f64>,
    pub step: Option<f64>,
    pub flat_count: usize,
}

/// Criticality evidence attached to a report. The smooth test is the
/// TAS-projected gradient norm; the non-smooth test combines subderivative
/// probes, the exact vanishing of sum_{q in Y'} b(q) on a rational TAS
/// basis, and the residual of the non-smooth balance identity.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalityCheck {
    pub smooth_gradient_norm: Option<f64>,
    pub subderivative_max: Option<f64>,
    pub yprime_sum_zero_exact: Option<bool>,
    pub balance_residual: Option<f64>,
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Smooth,
    NonSmooth,
}

/// Outcome of a volume maximization run.
#[derive(Clone, Debug)]
pub struct CriticalReport {
    pub kind: PointKind,
    pub point: SasPoint,
    pub volume: f64,
    pub classification: Classification,
    pub criticality: CriticalityCheck,
    pub converged: bool,
    pub iterations: usize,
    pub seed_index: usize,
    pub trace: Vec<TraceRecord>,
}

struct Run {
    point: SasPoint,
    volume: f64,
    converged: bool,
    iterations: usize,
    seed_index: usize,
    trace: Vec<TraceRecord>,
}

/// Maximizes the volume over SAS(T, k): projected gradient ascent along the
/// tangential span with backtracking line search, subderivative probing at
/// flat coordinates, and deterministic multistart. Reports the best run by
/// (volume desc within a tie tolerance, seed asc) and verifies criticality
/// of the returned point.
pub fn maximize(
    tri: &Triangulation,
    k: &CurvatureAssignment,
    opts: &MaximizeOpts,
) -> Result<CriticalReport, VolumeError> {
    let base = find_sas_point(tri, k, &opts.lattice)?;
    let tas_rat = tas_basis(tri);
    let basis_f = fl::orthonormalize(
        &tas_rat
            .iter()
            .map(|u| u.iter().map(to_f64).collect::<Vec<f64>>())
            .collect::<Vec<_>>(),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut runs: Vec<Run> = Vec::new();
    let starts = opts.multistart.max(1);
    for seed_index in 0..starts {
        let start = if seed_index == 0 {
            base.clone()
        } else {
            let p = random_tas_perturbation(&mut rng, &tas_rat, tri.num_quads());
            exp_move(&base, &p, &ri(1))
        };
        let run = ascend(tri, &basis_f, start, seed_index, opts);
        runs.push(run);
    }

    let best = runs
        .into_iter()
        .min_by(|a, b| {
            (!a.converged)
                .cmp(&!b.converged)
                .then_with(|| {
                    if (a.volume - b.volume).abs() <= TIE_TOL {
                        std::cmp::Ordering::Equal
                    } else {
                        b.volume.partial_cmp(&a.volume).unwrap()
                    }
                })
                .then(a.seed_index.cmp(&b.seed_index))
        })
        .expect("at least one run");

    let classification = classify_point(tri, &best.point.theta, opts.eps_flat);
    let kind = if classification.is_smooth() {
        PointKind::Smooth
    } else {
        PointKind::NonSmooth
    };
    let criticality = verify_criticality(
        tri,
        &best.point.theta,
        &classification,
        &tas_rat,
        &basis_f,
        opts,
    );
    let report = CriticalReport {
        kind,
        volume: best.volume,
        point: best.point,
        classification,
        criticality,
        converged: best.converged,
        iterations: best.iterations,
        seed_index: best.seed_index,
        trace: best.trace,
    };
    if report.converged {
        Ok(report)
    } else {
        Err(VolumeError::DidNotConverge(Box::new(report)))
    }
}

/// Random tangential perturbation with rational coefficients, scaled to
/// sup-norm at most 1/8 in pi-units (so at most pi/8 in radians).
fn random_tas_perturbation(
    rng: &mut ChaCha8Rng,
    tas_rat: &[TasVector],
    nq: usize,
) -> Vec<BigRational> {
    let mut p = vec![rz(); nq];
    for u in tas_rat {
        let c = rq(rng.gen_range(-16..=16), 64);
        if c.is_zero() {
            continue;
        }
        for (pi, ui) in p.iter_mut().zip(u) {
            *pi += &c * ui;
        }
    }
    let max_abs = p.iter().map(Signed::abs).max().unwrap_or_else(rz);
    if max_abs > rq(1, 8) {
        let scale = rq(1, 8) / max_abs;
        for pi in &mut p {
            *pi *= &scale;
        }
    }
    p
}

fn ascend(
    tri: &Triangulation,
    basis_f: &[Vec<f64>],
    start: SasPoint,
    seed_index: usize,
    opts: &MaximizeOpts,
) -> Run {
    let mut point = start;
    let mut v = volume(&point.theta);
    let mut trace = Vec::new();
    if basis_f.is_empty() {
        // no tangential directions: the initial point is critical trivially
        trace.push(TraceRecord {
            iter: 0,
            volume: v,
            grad_norm: None,
            step: None,
            flat_count: classify_point(tri, &point.theta, opts.eps_flat)
                .flat_quads
                .len(),
        });
        return Run {
            point,
            volume: v,
            converged: true,
            iterations: 0,
            seed_index,
            trace,
        };
    }

    let mut converged = false;
    let mut iter = 0;
    while iter < opts.max_iters {
        let cls = classify_point(tri, &point.theta, opts.eps_flat);
        if cls.is_smooth() {
            let g = smooth_gradient(&point.theta, opts.eps_flat).expect("smooth point");
            let pg = fl::project(basis_f, &g);
            let gn = fl::norm(&pg);
            if gn < opts.grad_tol {
                trace.push(TraceRecord {
                    iter,
                    volume: v,
                    grad_norm: Some(gn),
                    step: None,
                    flat_count: 0,
                });
                converged = true;
                break;
            }
            let slope = gn * gn;
            let mut s = ARMIJO_STEP0;
            let mut accepted = false;
            while s > MIN_STEP {
                let mut cand = point.theta.clone();
                fl::axpy(&mut cand, s, &pg);
                let vc = volume(&cand);
                let crosses_flat = !classify_point(tri, &cand, opts.eps_flat).is_smooth();
                let ok = if crosses_flat {
                    vc > v
                } else {
                    vc >= v + ARMIJO_SLOPE * s * slope
                };
                if ok {
                    point = SasPoint::from_theta(cand);
                    v = vc;
                    accepted = true;
                    trace.push(TraceRecord {
                        iter,
                        volume: v,
                        grad_norm: Some(gn),
                        step: Some(s),
                        flat_count: 0,
                    });
                    break;
                }
                s *= ARMIJO_SHRINK;
            }
            if !accepted {
                // no step of any size makes progress: numerically critical
                trace.push(TraceRecord {
                    iter,
                    volume: v,
                    grad_norm: Some(gn),
                    step: None,
                    flat_count: 0,
                });
                converged = gn < opts.grad_tol * 1e3;
                break;
            }
        } else {
            // flat coordinates present: probe subderivatives along the
            // tangential basis in both directions
            let mut best_dir: Option<&Vec<f64>> = None;
            let mut best_sign = 1.0;
            let mut best_score = f64::NEG_INFINITY;
            for u in basis_f {
                for sign in [1.0, -1.0] {
                    let d: Vec<f64> = u.iter().map(|x| sign * x).collect();
                    let sub = directional_subderivative(tri, &point.theta, &d, opts.eps_flat)
                        .expect("basis directions are tangent");
                    let score = if sub.log_coeff.abs() <= SUB_TOL {
                        sub.finite_part
                    } else {
                        sub.limit()
                    };
                    if score > best_score {
                        best_score = score;
                        best_dir = Some(u);
                        best_sign = sign;
                    }
                }
            }
            trace.push(TraceRecord {
                iter,
                volume: v,
                grad_norm: None,
                step: None,
                flat_count: cls.flat_quads.len(),
            });
            if best_score <= SUB_TOL {
                // no outward direction increases the volume
                converged = true;
                break;
            }
            let u = best_dir.expect("nonempty basis");
            let d: Vec<f64> = u.iter().map(|x| best_sign * x).collect();
            let mut t = ESCAPE_STEP0;
            let mut accepted = false;
            while t > MIN_STEP {
                let mut cand = point.theta.clone();
                fl::axpy(&mut cand, t, &d);
                let vc = volume(&cand);
                if vc > v {
                    point = SasPoint::from_theta(cand);
                    v = vc;
                    accepted = true;
                    break;
                }
                t *= ARMIJO_SHRINK;
            }
            if !accepted {
                // subderivative promised ascent but no finite step realizes
                // it; numerically at the flat maximum
                converged = true;
                break;
            }
        }
        iter += 1;
    }
    Run {
        point,
        volume: v,
        converged,
        iterations: iter,
        seed_index,
        trace,
    }
}

fn verify_criticality(
    tri: &Triangulation,
    theta: &[f64],
    cls: &Classification,
    tas_rat: &[TasVector],
    basis_f: &[Vec<f64>],
    opts: &MaximizeOpts,
) -> CriticalityCheck {
    if cls.is_smooth() {
        let gn = match smooth_gradient(theta, opts.eps_flat) {
            Ok(g) => fl::norm(&fl::project(basis_f, &g)),
            Err(_) => f64::NAN,
        };
        return CriticalityCheck {
            smooth_gradient_norm: Some(gn),
            subderivative_max: None,
            yprime_sum_zero_exact: None,
            balance_residual: None,
            verified: gn <= opts.grad_tol.max(1e-8),
        };
    }
    // exact vanishing of the Y' functional on TAS
    let yprime_zero = tas_rat.iter().all(|u| {
        let mut acc = rz();
        for &q in &cls.y_prime {
            acc += &u[q];
        }
        acc.is_zero()
    });
    // subderivative probes
    let mut sub_max = f64::NEG_INFINITY;
    let mut balance = 0.0f64;
    for u in basis_f {
        for sign in [1.0, -1.0] {
            let d: Vec<f64> = u.iter().map(|x| sign * x).collect();
            if let Ok(sub) = directional_subderivative(tri, theta, &d, opts.eps_flat) {
                let score = if sub.log_coeff.abs() <= SUB_TOL {
                    sub.finite_part
                } else {
                    sub.limit()
                };
                sub_max = sub_max.max(score);
                // balance identity: sum_{q in Y} b ln|b| =
                // -sum_{q not in Y} b ln|sin theta|
                let flat: std::collections::BTreeSet<usize> =
                    cls.flat_quads.iter().copied().collect();
                let lhs: f64 = flat.iter().map(|&q| x_ln_x(d[q])).sum();
                let rhs: f64 = (0..tri.num_quads())
                    .filter(|q| !flat.contains(q))
                    .map(|q| -d[q] * theta[q].sin().abs().ln())
                    .sum();
                balance = balance.max((lhs - rhs).abs());
            }
        }
    }
    if basis_f.is_empty() {
        sub_max = 0.0;
    }
    CriticalityCheck {
        smooth_gradient_norm: None,
        subderivative_max: Some(sub_max),
        yprime_sum_zero_exact: Some(yprime_zero),
        balance_residual: Some(balance),
        verified: yprime_zero && sub_max <= SUB_TOL && balance <= EQ_BALANCE_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::{exp_move_f64, sas_residual};
    use crate::tri::parse_triangulation;
    use std::f64::consts::PI;

    const DOUBLE_TET: &str = include_str!("../../../fixtures/double_tet.tri");
    const FIG8: &str = include_str!("../../../fixtures/fig8.tri");
    const ONE_TET: &str = include_str!("../../../fixtures/one_tet_rigid.tri");

    #[test]
    fn volume_of_regular_fig8_point() {
        let theta = vec![PI / 3.0; 6];
        let v = volume(&theta);
        assert!((v - 2.029883212819).abs() < 1e-10);
        // pi-periodicity of the summands
        let mut shifted = theta.clone();
        shifted[2] += PI;
        assert!((volume(&shifted) - v).abs() < 1e-12);
        // flat angles contribute nothing
        assert_eq!(volume(&[0.0, PI, 0.0]), 0.0);
    }

    #[test]
    fn volume_bound_holds() {
        let tri = parse_triangulation(FIG8).unwrap();
        let bound = volume_bound(&tri);
        for pattern in [[0.3; 6], [1.1; 6], [PI / 3.0; 6]] {
            assert!(volume(&pattern).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn gradient_constant_at_regular_point() {
        let tri = parse_triangulation(FIG8).unwrap();
        let theta = vec![PI / 3.0; 6];
        let g = smooth_gradient(&theta, 1e-7).unwrap();
        for gi in &g {
            assert!((gi - g[0]).abs() < 1e-15);
        }
        // constant vectors pair to zero with every tangential direction
        for u in tas_basis(&tri) {
            let uf: Vec<f64> = u.iter().map(to_f64).collect();
            assert!(fl::dot(&g, &uf).abs() < 1e-12);
        }
        // the zero-gradient case: all |sin| = 1
        let g = smooth_gradient(&[PI / 2.0, PI / 2.0, PI / 2.0], 1e-7).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
        // flat input errors
        assert!(matches!(
            smooth_gradient(&[0.0, 1.0, 1.0], 1e-7),
            Err(VolumeError::NonSmoothPoint { quad: 0 })
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let tri = parse_triangulation(FIG8).unwrap();
        let theta = vec![0.9, 1.1, PI - 2.0, 1.3, 0.7, PI - 2.0];
        let g = smooth_gradient(&theta, 1e-7).unwrap();
        let h = 1e-5;
        for u in tas_basis(&tri) {
            let uf: Vec<f64> = u.iter().map(to_f64).collect();
            let p = SasPoint::from_theta(theta.clone());
            let vp = volume(&exp_move_f64(&p, &uf, h).theta);
            let vm = volume(&exp_move_f64(&p, &uf, -h).theta);
            let fd = (vp - vm) / (2.0 * h);
            assert!((fl::dot(&g, &uf) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn classify_patterns() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        // smooth
        let cls = classify_point(&tri, &[1.0; 6], 1e-7);
        assert!(cls.is_smooth());
        // partially flat: pattern (0, a, pi - a) in each tetrahedron
        let a = 1.1;
        let theta = [0.0, a, PI - a, 0.0, -a, a - PI];
        let cls = classify_point(&tri, &theta, 1e-7);
        assert_eq!(cls.flat_quads, vec![0, 3]);
        assert_eq!(cls.y_prime, vec![0, 3]);
        assert_eq!(cls.partially_flat_tets, vec![0, 1]);
        assert!(cls.flat_tets.is_empty());
        // fully flat
        let theta = [PI, 0.0, 0.0, -PI, 0.0, 0.0];
        let cls = classify_point(&tri, &theta, 1e-7);
        assert_eq!(cls.flat_quads.len(), 6);
        assert!(cls.y_prime.is_empty());
        assert_eq!(cls.flat_tets, vec![0, 1]);
    }

    #[test]
    fn subderivative_cases() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        // direction with per-tet pattern (1, 1, -2); for this fixture the
        // tangential space is { (x, y, z, -x, -y, -z) : x + y + z = 0 }
        let b = vec![1.0, 1.0, -2.0, -1.0, -1.0, 2.0];
        let b_rat: Vec<BigRational> = b.iter().map(|&x| ri(x as i64)).collect();
        assert!(crate::linalg::in_span(&tas_basis(&tri), &b_rat));

        // case (b): fully flat tetrahedra; per-tet finite part -sum b ln|b|
        let theta = [PI, 0.0, 0.0, -PI, 0.0, 0.0];
        let sub = directional_subderivative(&tri, &theta, &b, 1e-7).unwrap();
        assert_eq!(sub.log_coeff, 0.0);
        let expect = 2.0 * 2.0f64.ln();
        assert!((sub.tet_terms[0].finite_part - expect).abs() < 1e-12);
        assert!((sub.tet_terms[1].finite_part + expect).abs() < 1e-12);
        assert!(sub.finite_part.abs() < 1e-12);

        // case (a): smooth point reduces to the gradient pairing
        let theta = [1.0, 1.1, PI - 2.1, -1.0, -1.1, 2.1 - PI];
        let sub = directional_subderivative(&tri, &theta, &b, 1e-7).unwrap();
        assert_eq!(sub.log_coeff, 0.0);
        let g = smooth_gradient(&theta, 1e-7).unwrap();
        assert!((sub.finite_part - fl::dot(&g, &b)).abs() < 1e-12);

        // case (c): one flat quad per tetrahedron
        let a = 1.2;
        let theta = [0.0, a, PI - a, 0.0, -a, a - PI];
        let sub = directional_subderivative(&tri, &theta, &b, 1e-7).unwrap();
        // log coefficient is b(q0) + b(q3) = 1 + (-1) = 0 here
        assert!(sub.log_coeff.abs() < 1e-15);
        assert_eq!(sub.tet_terms[0].log_coeff, 1.0);
        assert_eq!(sub.tet_terms[1].log_coeff, -1.0);

        // zero direction gives (0, 0)
        let sub = directional_subderivative(&tri, &theta, &[0.0; 6], 1e-7).unwrap();
        assert_eq!(sub.log_coeff, 0.0);
        assert_eq!(sub.finite_part, 0.0);

        // non-tangent direction rejected
        let mut bad = b.clone();
        bad[0] += 0.5;
        assert!(matches!(
            directional_subderivative(&tri, &theta, &bad, 1e-7),
            Err(VolumeError::NotTangent { .. })
        ));
    }

    #[test]
    fn maximize_fig8_reaches_regular_volume() {
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let opts = MaximizeOpts {
            multistart: 4,
            ..Default::default()
        };
        let report = maximize(&tri, &k, &opts).unwrap();
        assert_eq!(report.kind, PointKind::Smooth);
        assert!(report.criticality.verified);
        let target = 6.0 * lobachevsky(PI / 3.0);
        assert!(
            (report.volume - target).abs() < 1e-9,
            "volume {} vs {}",
            report.volume,
            target
        );
        // the point stayed in SAS
        assert!(sas_residual(&tri, &k, &report.point.theta) < 1e-9);
        // ascent property along the trace
        for w in report.trace.windows(2) {
            assert!(w[1].volume >= w[0].volume - 1e-15);
        }
    }

    #[test]
    fn maximize_double_tet_is_nonsmooth() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let report = maximize(&tri, &k, &MaximizeOpts::default()).unwrap();
        assert_eq!(report.kind, PointKind::NonSmooth);
        assert!(report.criticality.verified);
        assert!(report.volume.abs() < 1e-12);
        assert!(!report.classification.flat_quads.is_empty());
    }

    #[test]
    fn maximize_one_tet_nonsmooth_trivially() {
        let tri = parse_triangulation(ONE_TET).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let report = maximize(&tri, &k, &MaximizeOpts::default()).unwrap();
        assert_eq!(report.kind, PointKind::NonSmooth);
        assert!(report.criticality.verified);
        // the rigid quad is flat at every structure
        assert!(report.classification.flat_quads.contains(&0));
    }

    #[test]
    fn maximize_empty_triangulation() {
        let tri = parse_triangulation("tets 0\n").unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let report = maximize(&tri, &k, &MaximizeOpts::default()).unwrap();
        assert_eq!(report.volume, 0.0);
        assert!(report.converged);
    }

    #[test]
    fn determinism_across_runs() {
        let tri = parse_triangulation(FIG8).unwrap();
        let k = CurvatureAssignment::trivial(&tri);
        let opts = MaximizeOpts {
            multistart: 2,
            seed: 7,
            ..Default::default()
        };
        let a = maximize(&tri, &k, &opts).unwrap();
        let b = maximize(&tri, &k, &opts).unwrap();
        assert_eq!(a.volume, b.volume);
        assert_eq!(a.point.theta, b.point.theta);
        assert_eq!(a.seed_index, b.seed_index);
    }
}
