//! JSON views of the library types, used by the command-line tool. All
//! collections are emitted in deterministic order so repeated runs produce
//! byte-identical output.

use serde::Serialize;

use crate::angles::CurvatureAssignment;
use crate::linalg::RatMatrix;
use crate::normal::{kr_basis, matching_matrix, rigidity_report, NormalSolution, RigidityReport};
use crate::outcomes::{Cluster, LogSineLift, ThurstonReport, ThurstonSolution, TwoQuadCertificate};
use crate::rq::rat_str;
use crate::tri::Triangulation;
use crate::volume::{Classification, CriticalReport, CriticalityCheck, PointKind, TraceRecord};
use crate::z2taut::{SolveStatus, Z2Taut};

#[derive(Serialize)]
pub struct EdgeClassJson {
    pub id: usize,
    pub degree: usize,
    pub reps: Vec<(usize, u8)>,
    pub ends: [usize; 2],
}

#[derive(Serialize)]
pub struct ArcClassJson {
    pub id: usize,
    pub face_class: usize,
    pub reps: [(usize, u8, u8); 2],
}

/// Full serialization of a triangulation with its derived classes.
#[derive(Serialize)]
pub struct TriangulationJson {
    pub tets: usize,
    pub gluings: Vec<crate::tri::GluingSpec>,
    pub edge_classes: Vec<EdgeClassJson>,
    pub vertex_classes: Vec<Vec<(usize, u8)>>,
    pub face_classes: Vec<[(usize, u8); 2]>,
    pub arc_classes: Vec<ArcClassJson>,
    pub orientation: Vec<i8>,
    pub quads: usize,
    pub triangles: usize,
}

impl TriangulationJson {
    pub fn new(tri: &Triangulation) -> Self {
        TriangulationJson {
            tets: tri.tet_count(),
            gluings: tri.gluing_specs(),
            edge_classes: tri
                .edge_classes()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeClassJson {
                    id,
                    degree: e.degree(),
                    reps: e.reps.clone(),
                    ends: e.ends,
                })
                .collect(),
            vertex_classes: tri.vertex_classes().to_vec(),
            face_classes: tri.face_classes().to_vec(),
            arc_classes: tri
                .arc_classes()
                .iter()
                .enumerate()
                .map(|(id, a)| ArcClassJson {
                    id,
                    face_class: a.face_class,
                    reps: a.reps,
                })
                .collect(),
            orientation: tri.orientation().to_vec(),
            quads: tri.num_quads(),
            triangles: tri.num_tris(),
        }
    }
}

/// Output of the `check` command: combinatorial counts, the exact linear
/// theory dimensions, vertex link data, and the rigidity report.
#[derive(Serialize)]
pub struct CheckReport {
    pub tets: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub edge_degrees: Vec<usize>,
    pub link_euler_characteristics: Vec<i64>,
    pub link_triangle_counts: Vec<usize>,
    pub dim_tas: usize,
    pub dim_proj_sns: usize,
    pub kr_rank: usize,
    pub matching_kernel_dim: usize,
    /// chi(M) + |T| and |chi(M)| + |T|; these differ for pseudo-manifolds
    /// with chi < 0 and both are reported.
    pub sas_dim_chi_plus_t: i64,
    pub sas_dim_abs_chi_plus_t: i64,
    /// real-valued angle structures exist iff all link Euler
    /// characteristics vanish; the positive polytope is decided exactly
    pub generalized_angle_structure_feasible: bool,
    pub positive_angle_structure_feasible: bool,
    pub rigidity: RigidityReport,
    pub triangulation: TriangulationJson,
}

impl CheckReport {
    pub fn new(tri: &Triangulation) -> Self {
        let tas = crate::angles::tas_basis(tri);
        let links = tri.vertex_links();
        let mut edge_degrees: Vec<usize> = tri.edge_classes().iter().map(|e| e.degree()).collect();
        edge_degrees.sort_unstable();
        let chi = tri.euler_characteristic();
        let kr = kr_basis(tri);
        let kr_rank = if tri.tet_count() == 0 {
            0
        } else {
            RatMatrix::from_rows(kr.stacked()).rank()
        };
        let feasibility = crate::angles::angle_structure_feasibility(tri);
        CheckReport {
            tets: tri.tet_count(),
            vertices: tri.num_vertices(),
            edges: tri.num_edges(),
            faces: tri.num_faces(),
            euler_characteristic: chi,
            edge_degrees,
            link_euler_characteristics: links.iter().map(|l| l.euler_char).collect(),
            link_triangle_counts: links.iter().map(|l| l.triangles.len()).collect(),
            dim_tas: tas.len(),
            dim_proj_sns: tri.num_quads() - tas.len(),
            kr_rank,
            matching_kernel_dim: matching_matrix(tri).nullspace().len(),
            sas_dim_chi_plus_t: chi + tri.tet_count() as i64,
            sas_dim_abs_chi_plus_t: chi.abs() + tri.tet_count() as i64,
            generalized_angle_structure_feasible: feasibility.generalized,
            positive_angle_structure_feasible: feasibility.positive,
            rigidity: rigidity_report(tri, &tas),
            triangulation: TriangulationJson::new(tri),
        }
    }
}

#[derive(Serialize)]
pub struct NormalSolutionJson {
    pub t_coords: Vec<String>,
    pub q_coords: Vec<String>,
}

impl NormalSolutionJson {
    pub fn new(s: &NormalSolution) -> Self {
        NormalSolutionJson {
            t_coords: s.t_coords.iter().map(rat_str).collect(),
            q_coords: s.q_coords.iter().map(rat_str).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct CertificateJson {
    pub q0: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    pub alternates: Vec<usize>,
    pub t_coords: Vec<String>,
    pub q_coords: Vec<String>,
}

impl CertificateJson {
    pub fn new(c: &TwoQuadCertificate) -> Self {
        CertificateJson {
            q0: c.q0,
            q1: c.q1,
            lambda: c.lambda.as_ref().map(rat_str),
            alternates: c.alternates.clone(),
            t_coords: c.solution.t_coords.iter().map(rat_str).collect(),
            q_coords: c.solution.q_coords.iter().map(rat_str).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ClusterJson {
    pub tet: usize,
    pub certificates: Vec<CertificateJson>,
}

impl ClusterJson {
    pub fn new(c: &Cluster) -> Self {
        ClusterJson {
            tet: c.tet,
            certificates: c.certificates.iter().map(CertificateJson::new).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ThurstonResidualsJson {
    pub pair_residual: f64,
    pub tet_residual: f64,
    pub edge_residual: f64,
    pub edge_signs: Vec<i8>,
    pub edge_sign_residual: f64,
    pub real_solution: bool,
}

#[derive(Serialize)]
pub struct ThurstonJson {
    /// z per quad as [re, im]
    pub z: Vec<[f64; 2]>,
    pub residuals: ThurstonResidualsJson,
}

impl ThurstonJson {
    pub fn new(z: &ThurstonSolution, rep: &ThurstonReport) -> Self {
        ThurstonJson {
            z: z.z.iter().map(|w| [w.re, w.im]).collect(),
            residuals: ThurstonResidualsJson {
                pair_residual: rep.pair_residual,
                tet_residual: rep.tet_residual,
                edge_residual: rep.edge_residual,
                edge_signs: rep.edge_signs.clone(),
                edge_sign_residual: rep.edge_sign_residual,
                real_solution: rep.real_solution,
            },
        }
    }
}

#[derive(Serialize)]
pub struct LogSineJson {
    pub y: Vec<f64>,
    pub orthogonality_residual: f64,
    pub h: Vec<f64>,
    pub lift_residual: f64,
}

impl LogSineJson {
    pub fn new(l: &LogSineLift) -> Self {
        LogSineJson {
            y: l.y.clone(),
            orthogonality_residual: l.orthogonality_residual,
            h: l.h.clone(),
            lift_residual: l.lift_residual,
        }
    }
}

#[derive(Serialize)]
pub struct OptimizeReport {
    pub classification: PointKind,
    pub converged: bool,
    pub volume: f64,
    pub theta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_theta_over_pi: Option<Vec<String>>,
    pub flat_quads: Vec<usize>,
    pub partially_flat_quads: Vec<usize>,
    pub flat_tets: Vec<usize>,
    pub partially_flat_tets: Vec<usize>,
    pub criticality: CriticalityCheck,
    pub curvature_turns: Vec<String>,
    pub seed_index: usize,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thurston: Option<ThurstonJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_sine: Option<LogSineJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<CertificateJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<ClusterJson>>,
    pub trace: Vec<TraceRecord>,
}

impl OptimizeReport {
    pub fn new(report: &CriticalReport, k: &CurvatureAssignment) -> Self {
        let Classification {
            flat_quads,
            y_prime,
            flat_tets,
            partially_flat_tets,
        } = report.classification.clone();
        OptimizeReport {
            classification: report.kind,
            converged: report.converged,
            volume: report.volume,
            theta: report
                .point
                .theta
                .iter()
                .map(|t| t.rem_euclid(2.0 * std::f64::consts::PI))
                .collect(),
            exact_theta_over_pi: report
                .point
                .exact
                .as_ref()
                .map(|c| c.iter().map(rat_str).collect()),
            flat_quads,
            partially_flat_quads: y_prime,
            flat_tets,
            partially_flat_tets,
            criticality: report.criticality.clone(),
            curvature_turns: k.turns.iter().map(rat_str).collect(),
            seed_index: report.seed_index,
            iterations: report.iterations,
            thurston: None,
            log_sine: None,
            certificates: None,
            clusters: None,
            trace: report.trace.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CertifyReport {
    pub rigidity: RigidityReport,
    pub certificates: Vec<CertifyEntry>,
    pub clusters: Vec<ClusterJson>,
}

#[derive(Serialize)]
pub struct CertifyEntry {
    pub q0: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct Z2TautReport {
    pub status: String,
    pub count: usize,
    /// one entry per solution: the chosen quad index per tetrahedron
    pub solutions: Vec<Vec<u8>>,
}

impl Z2TautReport {
    pub fn new(solutions: &[Z2Taut], status: SolveStatus) -> Self {
        Z2TautReport {
            status: match status {
                SolveStatus::Complete => "complete".into(),
                SolveStatus::BudgetExhausted => "budget_exhausted".into(),
            },
            count: solutions.len(),
            solutions: solutions.iter().map(|z| z.choice.clone()).collect(),
        }
    }
}
