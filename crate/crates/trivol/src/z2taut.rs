//! Z2-taut structures: a choice of one quad per tetrahedron (the one-hot
//! condition) whose mod-2 edge-weighted sums all vanish.
//!
//! The solver branches over per-tetrahedron choices in lexicographic order
//! with unit propagation on the parity constraints; only edge coefficients
//! i(q,e) that are odd matter. A node budget keeps answers honest: running
//! out is reported as a status distinct from "none exist".

use num::complex::Complex64;
use thiserror::Error;

use crate::outcomes::ThurstonSolution;
use crate::tri::Triangulation;

/// A Z2-taut structure, stored as the chosen quad index (0..3) per
/// tetrahedron; the quad map is f(3t + choice[t]) = 1 and 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z2Taut {
    pub choice: Vec<u8>,
}

impl Z2Taut {
    pub fn quad_map(&self, tri: &Triangulation) -> Vec<u8> {
        let mut f = vec![0u8; tri.num_quads()];
        for (t, &k) in self.choice.iter().enumerate() {
            f[3 * t + k as usize] = 1;
        }
        f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Complete,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
}

#[derive(Debug, Error)]
pub enum Z2Error {
    #[error("solution is not real-valued: quad {quad} has |Im z| = {im}")]
    NotRealValued { quad: usize, im: f64 },
    #[error("real shape at quad {quad} is degenerate (0 or 1)")]
    DegenerateShape { quad: usize },
    #[error("not a taut angle assignment: {msg}")]
    NotTaut { msg: String },
}

/// Both conditions of the definition: one-hot per tetrahedron and even
/// edge-incidence sums.
pub fn z2_check(tri: &Triangulation, f: &[u8]) -> bool {
    one_hot_per_tet(tri, f) && edge_parity_ok(tri, f)
}

fn one_hot_per_tet(tri: &Triangulation, f: &[u8]) -> bool {
    (0..tri.tet_count()).all(|t| f[3 * t] + f[3 * t + 1] + f[3 * t + 2] == 1)
}

fn edge_parity_ok(tri: &Triangulation, f: &[u8]) -> bool {
    (0..tri.num_edges()).all(|e| {
        let sum: usize = (0..tri.num_quads())
            .map(|q| tri.quad_edge_index(q, e) * f[q] as usize)
            .sum();
        sum.is_multiple_of(2)
    })
}

/// The quadratic characterization: per tetrahedron, the linear sum of f is
/// 1 mod 2 and the sum over unordered distinct pairs of f(q) f(q') is
/// 0 mod 2. Equivalent to the one-hot condition.
pub fn verify_quadratic(tri: &Triangulation, f: &[u8]) -> bool {
    (0..tri.tet_count()).all(|t| {
        let (a, b, c) = (f[3 * t] & 1, f[3 * t + 1] & 1, f[3 * t + 2] & 1);
        let linear = (a + b + c) % 2 == 1;
        let quadratic = (a * b + a * c + b * c) % 2 == 0;
        linear && quadratic
    })
}

struct Search<'a> {
    tri: &'a Triangulation,
    /// per-edge list of quads with odd coefficient
    odd_quads: Vec<Vec<usize>>,
    mode: Mode,
    budget: usize,
    nodes: usize,
    solutions: Vec<Z2Taut>,
    exhausted: bool,
}

/// Enumerates Z2-taut structures in lexicographic order by tetrahedron
/// index then quad index. `budget` caps the number of branch nodes.
pub fn solve_z2_taut(tri: &Triangulation, mode: Mode, budget: usize) -> (Vec<Z2Taut>, SolveStatus) {
    let odd_quads: Vec<Vec<usize>> = (0..tri.num_edges())
        .map(|e| {
            (0..tri.num_quads())
                .filter(|&q| tri.quad_edge_index(q, e) % 2 == 1)
                .collect()
        })
        .collect();
    let mut search = Search {
        tri,
        odd_quads,
        mode,
        budget,
        nodes: 0,
        solutions: Vec::new(),
        exhausted: false,
    };
    // candidates[t][k]: whether quad k is still allowed as the choice of t
    let candidates = vec![[true; 3]; tri.tet_count()];
    let choice: Vec<Option<u8>> = vec![None; tri.tet_count()];
    search.branch(&choice, &candidates);
    let status = if search.exhausted {
        SolveStatus::BudgetExhausted
    } else {
        SolveStatus::Complete
    };
    (search.solutions, status)
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.exhausted || (self.mode == Mode::First && !self.solutions.is_empty())
    }

    /// Unit propagation: parity-complete edges must balance; edges with one
    /// undecided odd quad force or forbid that quad; single-candidate
    /// tetrahedra are assigned. Returns false on conflict.
    fn propagate(&self, choice: &mut [Option<u8>], candidates: &mut [[bool; 3]]) -> bool {
        loop {
            let mut changed = false;
            for odd in &self.odd_quads {
                let mut parity = 0usize;
                let mut undecided: Vec<usize> = Vec::new();
                for &q in odd {
                    let (t, k) = (q / 3, (q % 3) as u8);
                    match choice[t] {
                        Some(c) => parity += usize::from(c == k),
                        None => undecided.push(q),
                    }
                }
                match undecided.len() {
                    0 => {
                        if !parity.is_multiple_of(2) {
                            return false;
                        }
                    }
                    1 => {
                        let q = undecided[0];
                        let (t, k) = (q / 3, q % 3);
                        if !parity.is_multiple_of(2) {
                            // q must carry 1: assign the tetrahedron
                            if !candidates[t][k] {
                                return false;
                            }
                            choice[t] = Some(k as u8);
                            changed = true;
                        } else if candidates[t][k] {
                            // q must carry 0: forbid it
                            candidates[t][k] = false;
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            for t in 0..self.tri.tet_count() {
                if choice[t].is_some() {
                    continue;
                }
                let allowed: Vec<u8> = (0..3u8).filter(|&k| candidates[t][k as usize]).collect();
                match allowed.len() {
                    0 => return false,
                    1 => {
                        choice[t] = Some(allowed[0]);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn branch(&mut self, choice: &[Option<u8>], candidates: &[[bool; 3]]) {
        if self.done() {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let mut local_choice = choice.to_vec();
        let mut local_cands = candidates.to_vec();
        if !self.propagate(&mut local_choice, &mut local_cands) {
            return;
        }
        let Some(t) = local_choice.iter().position(Option::is_none) else {
            let f: Vec<u8> = local_choice.iter().map(|c| c.unwrap()).collect();
            let z = Z2Taut { choice: f };
            if z2_check(self.tri, &z.quad_map(self.tri)) {
                self.solutions.push(z);
            }
            return;
        };
        for k in 0..3u8 {
            if !local_cands[t][k as usize] {
                continue;
            }
            let mut next_choice = local_choice.clone();
            next_choice[t] = Some(k);
            self.branch(&next_choice, &local_cands);
            if self.done() {
                return;
            }
        }
    }
}

/// Result of reading a Z2-taut candidate off a real-valued solution of the
/// gluing equations. Condition (a) always holds for genuine real solutions;
/// condition (b) is checked and reported rather than assumed.
#[derive(Clone, Debug)]
pub struct RealSignResult {
    pub f: Vec<u8>,
    pub one_hot_ok: bool,
    pub edge_parity_ok: bool,
}

impl RealSignResult {
    pub fn is_taut(&self) -> bool {
        self.one_hot_ok && self.edge_parity_ok
    }
}

/// f(q) = 0 where z(q) > 0 and 1 where z(q) < 0, for a real solution.
pub fn from_real_solution(
    tri: &Triangulation,
    z: &ThurstonSolution,
    tol: f64,
) -> Result<RealSignResult, Z2Error> {
    let mut f = Vec::with_capacity(z.z.len());
    for (q, w) in z.z.iter().enumerate() {
        if w.im.abs() > tol {
            return Err(Z2Error::NotRealValued { quad: q, im: w.im });
        }
        if w.re.abs() <= tol || (w.re - 1.0).abs() <= tol {
            return Err(Z2Error::DegenerateShape { quad: q });
        }
        f.push(u8::from(w.re < 0.0));
    }
    Ok(RealSignResult {
        one_hot_ok: one_hot_per_tet(tri, &f),
        edge_parity_ok: edge_parity_ok(tri, &f),
        f,
    })
}

/// The per-tetrahedron real shape triple (z, 1/(1-z), (z-1)/z) as complex
/// numbers, used to build synthetic real solutions in tests and examples.
pub fn real_shape_triple(z: f64) -> [Complex64; 3] {
    [
        Complex64::new(z, 0.0),
        Complex64::new(1.0 / (1.0 - z), 0.0),
        Complex64::new((z - 1.0) / z, 0.0),
    ]
}

/// Translates a taut angle assignment g: quads -> {0, pi} (with tetrahedron
/// sums pi and edge-weighted sums 2 pi) into a Z2-taut structure f = g / pi.
pub fn from_taut_angles(tri: &Triangulation, g: &[f64]) -> Result<Z2Taut, Z2Error> {
    use std::f64::consts::PI;
    assert_eq!(g.len(), tri.num_quads());
    let mut f = Vec::with_capacity(g.len());
    for (q, &v) in g.iter().enumerate() {
        if v.abs() <= 1e-12 {
            f.push(0u8);
        } else if (v - PI).abs() <= 1e-12 {
            f.push(1u8);
        } else {
            return Err(Z2Error::NotTaut {
                msg: format!("angle at quad {q} is neither 0 nor pi"),
            });
        }
    }
    for t in 0..tri.tet_count() {
        let s: u8 = (0..3).map(|k| f[3 * t + k]).sum();
        if s != 1 {
            return Err(Z2Error::NotTaut {
                msg: format!("tetrahedron {t} angle sum is {s} pi, not pi"),
            });
        }
    }
    for e in 0..tri.num_edges() {
        let s: usize = (0..tri.num_quads())
            .map(|q| tri.quad_edge_index(q, e) * f[q] as usize)
            .sum();
        if s != 2 {
            return Err(Z2Error::NotTaut {
                msg: format!("edge {e} angle sum is {s} pi, not 2 pi"),
            });
        }
    }
    let choice = (0..tri.tet_count())
        .map(|t| (0..3u8).find(|&k| f[3 * t + k as usize] == 1).unwrap())
        .collect();
    Ok(Z2Taut { choice })
}

/// Brute force over all 3^{|T|} one-hot assignments; the oracle for the
/// solver at desk scale.
pub fn brute_force_z2_taut(tri: &Triangulation) -> Vec<Z2Taut> {
    let n = tri.tet_count();
    let total = 3usize.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        // lexicographic: tetrahedron 0 is the most significant digit
        let mut choice = Vec::with_capacity(n);
        for t in 0..n {
            let place = 3usize.pow((n - 1 - t) as u32);
            choice.push(((code / place) % 3) as u8);
        }
        let z = Z2Taut { choice };
        if z2_check(tri, &z.quad_map(tri)) {
            out.push(z);
        }
    }
    out
}
