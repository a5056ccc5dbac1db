//! Triangulated closed oriented pseudo 3-manifolds.
//!
//! A triangulation is a set of tetrahedra whose 4N faces are identified in
//! pairs by vertex bijections. All simplex classes (edges, vertices, faces,
//! normal arcs) are derived from the face gluings by closing the induced
//! identifications under union-find. Tetrahedron vertices are labelled
//! 0..3, face `f` is the face opposite vertex `f`, and tetrahedron edges
//! are indexed 0..5 in the order 01, 02, 03, 12, 13, 23.
//!
//! Normal quadrilaterals are indexed 0, 1, 2 within each tetrahedron by the
//! pair of opposite edges they miss: (01|23), (02|13), (03|12). Normal
//! triangles are indexed by the vertex they cut off.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Endpoints of tetrahedron edge `e` for e = 0..5.
pub const EDGE_ENDS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// The two tetrahedron edges missed by quad `k`.
pub const QUAD_MISSED_EDGES: [[usize; 2]; 3] = [[0, 5], [1, 4], [2, 3]];

/// The quad missing tetrahedron edge `e`.
pub const EDGE_MISSING_QUAD: [usize; 6] = [0, 1, 2, 2, 1, 0];

/// Tetrahedron edges incident to vertex `v`.
pub const EDGES_AT_VERTEX: [[usize; 3]; 4] = [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]];

pub fn edge_index(u: u8, v: u8) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    EDGE_ENDS
        .iter()
        .position(|&e| e == (a, b))
        .expect("bad edge")
}

/// A permutation of {0,1,2,3}, stored as the image of (0,1,2,3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub fn parse(s: &str) -> Option<Perm4> {
        let bytes = s.as_bytes();
        if bytes.len() != 4 {
            return None;
        }
        let mut img = [0u8; 4];
        let mut seen = [false; 4];
        for (i, &b) in bytes.iter().enumerate() {
            if !(b'0'..=b'3').contains(&b) {
                return None;
            }
            let v = b - b'0';
            if seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
            img[i] = v;
        }
        Some(Perm4(img))
    }

    pub fn apply(&self, v: u8) -> u8 {
        self.0[v as usize]
    }

    pub fn inverse(&self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// Sign of the permutation: +1 even, -1 odd.
    pub fn sign(&self) -> i8 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl std::fmt::Display for Perm4 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Target of a face gluing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub tet: usize,
    pub face: u8,
    pub perm: Perm4,
}

/// One gluing line from an input file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GluingSpec {
    pub tet: usize,
    pub face: u8,
    pub to_tet: usize,
    pub to_face: u8,
    pub perm: String,
}

#[derive(Debug, Error)]
pub enum TriError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("tetrahedron {tet} face {face} is not glued")]
    UngluedFace { tet: usize, face: u8 },
    #[error("tetrahedron {tet} face {face} is glued more than once")]
    DuplicateGluing { tet: usize, face: u8 },
    #[error("tetrahedron {tet} face {face} is glued to itself")]
    SelfGluing { tet: usize, face: u8 },
    #[error("gluing of tetrahedron {tet} face {face} is not involutive")]
    NonInvolutive { tet: usize, face: u8 },
    #[error("permutation {perm} does not map face {face} to face {to_face}")]
    BadPerm { perm: String, face: u8, to_face: u8 },
    #[error("tetrahedron index {tet} out of range")]
    TetOutOfRange { tet: usize },
    #[error("not orientable as glued")]
    NotOrientable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    /// Representatives (tet, edge index), sorted; the first is canonical.
    pub reps: Vec<(usize, u8)>,
    /// Vertex classes of the two ends (sorted; equal for a loop).
    pub ends: [usize; 2],
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    /// Number of ends of this edge class at vertex class `v` (0, 1 or 2).
    pub fn ends_at(&self, v: usize) -> usize {
        self.ends.iter().filter(|&&e| e == v).count()
    }
}

/// A normal-arc class: three per face class. The two representatives are
/// (tet, face, corner) triples on the two sides of the face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcClass {
    pub face_class: usize,
    pub reps: [(usize, u8, u8); 2],
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    tet_count: usize,
    gluings: Vec<[FaceGluing; 4]>,
    edge_classes: Vec<EdgeClass>,
    edge_class_of: Vec<[usize; 6]>,
    vertex_classes: Vec<Vec<(usize, u8)>>,
    vertex_class_of: Vec<[usize; 4]>,
    face_classes: Vec<[(usize, u8); 2]>,
    face_class_of: Vec<[usize; 4]>,
    arc_classes: Vec<ArcClass>,
    orientation: Vec<i8>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root for deterministic classes
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Groups 0..n by root; classes sorted by smallest member.
    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// Parses the text gluing format: a `tets N` header, then one line
/// `glue t f -> t' f' perm:abcd` per tetrahedron face.
pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriError> {
    let mut tet_count: Option<usize> = None;
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["tets", n] => {
                if tet_count.is_some() {
                    return Err(TriError::Parse {
                        line,
                        msg: "duplicate tets header".into(),
                    });
                }
                tet_count = Some(n.parse().map_err(|_| TriError::Parse {
                    line,
                    msg: format!("bad tetrahedron count {n:?}"),
                })?);
            }
            ["glue", t, f, "->", t2, f2, p] => {
                let parse_usize = |s: &str, what: &str| {
                    s.parse::<usize>().map_err(|_| TriError::Parse {
                        line,
                        msg: format!("bad {what} {s:?}"),
                    })
                };
                let tet = parse_usize(t, "tetrahedron index")?;
                let face = parse_usize(f, "face index")?;
                let to_tet = parse_usize(t2, "tetrahedron index")?;
                let to_face = parse_usize(f2, "face index")?;
                let perm = p.strip_prefix("perm:").ok_or_else(|| TriError::Parse {
                    line,
                    msg: format!("expected perm:abcd, got {p:?}"),
                })?;
                if face > 3 || to_face > 3 {
                    return Err(TriError::Parse {
                        line,
                        msg: "face index out of range".into(),
                    });
                }
                specs.push(GluingSpec {
                    tet,
                    face: face as u8,
                    to_tet,
                    to_face: to_face as u8,
                    perm: perm.to_string(),
                });
            }
            _ => {
                return Err(TriError::Parse {
                    line,
                    msg: format!("unrecognized line {l:?}"),
                })
            }
        }
    }
    let tet_count = tet_count.ok_or(TriError::Parse {
        line: 0,
        msg: "missing tets header".into(),
    })?;
    Triangulation::from_gluing_specs(tet_count, &specs)
}

impl Triangulation {
    pub fn from_gluing_specs(tet_count: usize, specs: &[GluingSpec]) -> Result<Self, TriError> {
        let mut table: Vec<[Option<FaceGluing>; 4]> = vec![[None; 4]; tet_count];
        for s in specs {
            if s.tet >= tet_count {
                return Err(TriError::TetOutOfRange { tet: s.tet });
            }
            if s.to_tet >= tet_count {
                return Err(TriError::TetOutOfRange { tet: s.to_tet });
            }
            let perm = Perm4::parse(&s.perm).ok_or_else(|| TriError::Parse {
                line: 0,
                msg: format!("bad permutation {:?}", s.perm),
            })?;
            if perm.apply(s.face) != s.to_face {
                return Err(TriError::BadPerm {
                    perm: s.perm.clone(),
                    face: s.face,
                    to_face: s.to_face,
                });
            }
            if s.tet == s.to_tet && s.face == s.to_face {
                return Err(TriError::SelfGluing {
                    tet: s.tet,
                    face: s.face,
                });
            }
            let slot = &mut table[s.tet][s.face as usize];
            if slot.is_some() {
                return Err(TriError::DuplicateGluing {
                    tet: s.tet,
                    face: s.face,
                });
            }
            *slot = Some(FaceGluing {
                tet: s.to_tet,
                face: s.to_face,
                perm,
            });
        }
        let mut gluings = Vec::with_capacity(tet_count);
        for (t, faces) in table.iter().enumerate() {
            let mut row = [FaceGluing {
                tet: 0,
                face: 0,
                perm: Perm4([0, 1, 2, 3]),
            }; 4];
            for (f, g) in faces.iter().enumerate() {
                row[f] = g.ok_or(TriError::UngluedFace {
                    tet: t,
                    face: f as u8,
                })?;
            }
            gluings.push(row);
        }
        // involutivity
        for t in 0..tet_count {
            for f in 0..4u8 {
                let g = gluings[t][f as usize];
                let back = gluings[g.tet][g.face as usize];
                if back.tet != t || back.face != f || back.perm != g.perm.inverse() {
                    return Err(TriError::NonInvolutive { tet: t, face: f });
                }
            }
        }
        Self::derive(tet_count, gluings)
    }

    fn derive(tet_count: usize, gluings: Vec<[FaceGluing; 4]>) -> Result<Self, TriError> {
        // Union-find passes over tetrahedron edges and vertices. Each face
        // gluing identifies the three edges and three vertices of the face
        // with their images.
        let mut uf_edge = UnionFind::new(6 * tet_count);
        let mut uf_vert = UnionFind::new(4 * tet_count);
        for (t, row) in gluings.iter().enumerate() {
            for f in 0..4u8 {
                let g = row[f as usize];
                for v in 0..4u8 {
                    if v == f {
                        continue;
                    }
                    uf_vert.union(4 * t + v as usize, 4 * g.tet + g.perm.apply(v) as usize);
                }
                for (e, &(u, v)) in EDGE_ENDS.iter().enumerate() {
                    if u == f || v == f {
                        continue;
                    }
                    let e2 = edge_index(g.perm.apply(u), g.perm.apply(v));
                    uf_edge.union(6 * t + e, 6 * g.tet + e2);
                }
            }
        }

        let vert_groups = uf_vert.classes();
        let mut vertex_class_of = vec![[0usize; 4]; tet_count];
        let mut vertex_classes = Vec::with_capacity(vert_groups.len());
        for (ci, group) in vert_groups.iter().enumerate() {
            let mut members = Vec::with_capacity(group.len());
            for &x in group {
                let (t, v) = (x / 4, (x % 4) as u8);
                vertex_class_of[t][v as usize] = ci;
                members.push((t, v));
            }
            vertex_classes.push(members);
        }

        let edge_groups = uf_edge.classes();
        let mut edge_class_of = vec![[0usize; 6]; tet_count];
        let mut edge_classes = Vec::with_capacity(edge_groups.len());
        for (ci, group) in edge_groups.iter().enumerate() {
            let mut reps = Vec::with_capacity(group.len());
            for &x in group {
                let (t, e) = (x / 6, (x % 6) as u8);
                edge_class_of[t][e as usize] = ci;
                reps.push((t, e));
            }
            let (t0, e0) = reps[0];
            let (u, v) = EDGE_ENDS[e0 as usize];
            let mut ends = [
                vertex_class_of[t0][u as usize],
                vertex_class_of[t0][v as usize],
            ];
            ends.sort_unstable();
            edge_classes.push(EdgeClass { reps, ends });
        }

        // face classes: pairs of (tet, face)
        let mut face_class_of = vec![[usize::MAX; 4]; tet_count];
        let mut face_classes = Vec::new();
        for t in 0..tet_count {
            for f in 0..4u8 {
                if face_class_of[t][f as usize] != usize::MAX {
                    continue;
                }
                let g = gluings[t][f as usize];
                let ci = face_classes.len();
                face_class_of[t][f as usize] = ci;
                face_class_of[g.tet][g.face as usize] = ci;
                face_classes.push([(t, f), (g.tet, g.face)]);
            }
        }

        // arc classes: three per face class, one per corner of the face
        let mut arc_classes = Vec::with_capacity(3 * face_classes.len());
        for (fi, pair) in face_classes.iter().enumerate() {
            let (t, f) = pair[0];
            let g = gluings[t][f as usize];
            for c in 0..4u8 {
                if c == f {
                    continue;
                }
                arc_classes.push(ArcClass {
                    face_class: fi,
                    reps: [(t, f, c), (g.tet, g.face, g.perm.apply(c))],
                });
            }
        }

        // orientation by 2-coloring with gluing permutation parity:
        // a gluing is orientation-compatible iff sign(t)*sign(t')*sign(perm) = -1
        let mut orientation = vec![0i8; tet_count];
        for root in 0..tet_count {
            if orientation[root] != 0 {
                continue;
            }
            orientation[root] = 1;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for g in &gluings[t] {
                    let want = -orientation[t] * g.perm.sign();
                    if orientation[g.tet] == 0 {
                        orientation[g.tet] = want;
                        queue.push_back(g.tet);
                    } else if orientation[g.tet] != want {
                        return Err(TriError::NotOrientable);
                    }
                }
            }
        }

        Ok(Triangulation {
            tet_count,
            gluings,
            edge_classes,
            edge_class_of,
            vertex_classes,
            vertex_class_of,
            face_classes,
            face_class_of,
            arc_classes,
            orientation,
        })
    }

    pub fn tet_count(&self) -> usize {
        self.tet_count
    }

    pub fn gluing(&self, tet: usize, face: u8) -> FaceGluing {
        self.gluings[tet][face as usize]
    }

    pub fn edge_classes(&self) -> &[EdgeClass] {
        &self.edge_classes
    }

    pub fn vertex_classes(&self) -> &[Vec<(usize, u8)>] {
        &self.vertex_classes
    }

    pub fn face_classes(&self) -> &[[(usize, u8); 2]] {
        &self.face_classes
    }

    pub fn arc_classes(&self) -> &[ArcClass] {
        &self.arc_classes
    }

    pub fn num_edges(&self) -> usize {
        self.edge_classes.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_classes.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_classes.len()
    }

    /// |quads| = 3|T|; quad id is 3*tet + k.
    pub fn num_quads(&self) -> usize {
        3 * self.tet_count
    }

    /// |triangles| = 4|T|; triangle id is 4*tet + vertex.
    pub fn num_tris(&self) -> usize {
        4 * self.tet_count
    }

    pub fn edge_class_of(&self, tet: usize, edge: usize) -> usize {
        self.edge_class_of[tet][edge]
    }

    pub fn vertex_class_of(&self, tet: usize, v: u8) -> usize {
        self.vertex_class_of[tet][v as usize]
    }

    pub fn face_class_of(&self, tet: usize, f: u8) -> usize {
        self.face_class_of[tet][f as usize]
    }

    /// Orientation sign (+1/-1) of each tetrahedron.
    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    /// Index i(q, e): the number of tetrahedron-edge representatives of `e`
    /// disjoint from quad `q` inside q's tetrahedron. Takes values 0, 1, 2.
    pub fn quad_edge_index(&self, quad: usize, edge: usize) -> usize {
        let (t, k) = (quad / 3, quad % 3);
        QUAD_MISSED_EDGES[k]
            .iter()
            .filter(|&&e| self.edge_class_of[t][e] == edge)
            .count()
    }

    /// Index i(t, e): the number of tetrahedron-edge representatives of `e`
    /// on which triangle `tri` has a vertex. Takes values 0..=3.
    pub fn tri_edge_index(&self, tri: usize, edge: usize) -> usize {
        let (t, v) = (tri / 4, tri % 4);
        EDGES_AT_VERTEX[v]
            .iter()
            .filter(|&&e| self.edge_class_of[t][e] == edge)
            .count()
    }

    /// Euler characteristic |V| - |E| + |F| - |T|.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
            - self.tet_count as i64
    }

    /// The Neumann-Zagier antisymmetric form, fixed by the orientation.
    pub fn nz_form(&self) -> NzForm {
        NzForm {
            signs: self.orientation.clone(),
        }
    }

    /// One triangulated link surface per vertex class.
    pub fn vertex_links(&self) -> Vec<LinkSurface> {
        // union-find over edge ends to count link vertices
        let mut uf = UnionFind::new(12 * self.tet_count);
        let end_id = |t: usize, e: usize, which: usize| (6 * t + e) * 2 + which;
        for t in 0..self.tet_count {
            for f in 0..4u8 {
                let g = self.gluings[t][f as usize];
                for (e, &(u, v)) in EDGE_ENDS.iter().enumerate() {
                    if u == f || v == f {
                        continue;
                    }
                    let (u2, v2) = (g.perm.apply(u), g.perm.apply(v));
                    let e2 = edge_index(u2, v2);
                    let flip = u2 > v2; // image endpoints stored sorted
                    uf.union(end_id(t, e, 0), end_id(g.tet, e2, usize::from(flip)));
                    uf.union(end_id(t, e, 1), end_id(g.tet, e2, usize::from(!flip)));
                }
            }
        }
        let end_vertex = |x: usize| -> usize {
            let which = x % 2;
            let (t, e) = ((x / 2) / 6, (x / 2) % 6);
            let (u, v) = EDGE_ENDS[e];
            let vert = if which == 0 { u } else { v };
            self.vertex_class_of[t][vert as usize]
        };
        let end_groups = uf.classes();

        let mut links = Vec::with_capacity(self.num_vertices());
        for vc in 0..self.num_vertices() {
            let triangles: Vec<(usize, u8)> = self.vertex_classes[vc].clone();
            let index_of = |t: usize, w: u8| {
                triangles
                    .iter()
                    .position(|&c| c == (t, w))
                    .expect("corner in its own link")
            };
            // each corner triangle has three sides, one in each face != w
            let mut adjacency = Vec::with_capacity(triangles.len());
            for &(t, w) in &triangles {
                let mut sides = Vec::with_capacity(3);
                for f in 0..4u8 {
                    if f == w {
                        continue;
                    }
                    let g = self.gluings[t][f as usize];
                    sides.push(index_of(g.tet, g.perm.apply(w)));
                }
                adjacency.push([sides[0], sides[1], sides[2]]);
            }
            let arc_count = self
                .arc_classes
                .iter()
                .filter(|a| {
                    let (t, _, c) = a.reps[0];
                    self.vertex_class_of[t][c as usize] == vc
                })
                .count();
            let vert_count = end_groups.iter().filter(|g| end_vertex(g[0]) == vc).count();
            let euler_char = vert_count as i64 - arc_count as i64 + triangles.len() as i64;
            links.push(LinkSurface {
                vertex_class: vc,
                triangles,
                adjacency,
                euler_char,
            });
        }
        links
    }

    pub fn gluing_specs(&self) -> Vec<GluingSpec> {
        let mut specs = Vec::with_capacity(4 * self.tet_count);
        for t in 0..self.tet_count {
            for f in 0..4u8 {
                let g = self.gluings[t][f as usize];
                specs.push(GluingSpec {
                    tet: t,
                    face: f,
                    to_tet: g.tet,
                    to_face: g.face,
                    perm: g.perm.to_string(),
                });
            }
        }
        specs
    }
}

/// The link of a vertex class: a closed triangulated surface made of the
/// normal triangles at the vertex.
#[derive(Clone, Debug)]
pub struct LinkSurface {
    pub vertex_class: usize,
    /// Normal triangles as (tet, vertex) corners.
    pub triangles: Vec<(usize, u8)>,
    /// For each triangle, the neighbor triangle across each of its three
    /// sides (sides ordered by ascending face index).
    pub adjacency: Vec<[usize; 3]>,
    pub euler_char: i64,
}

/// The Neumann-Zagier antisymmetric bilinear form on quad space. Within a
/// tetrahedron the three quads form a single cycle q1 -> q2 -> q3 -> q1
/// determined by the orientation sign; quads of different tetrahedra pair
/// to zero.
#[derive(Clone, Debug)]
pub struct NzForm {
    signs: Vec<i8>,
}

impl NzForm {
    const CYCLE: [[i8; 3]; 3] = [[0, 1, -1], [-1, 0, 1], [1, -1, 0]];

    pub fn omega(&self, q: usize, q2: usize) -> i8 {
        let (t, k) = (q / 3, q % 3);
        let (t2, k2) = (q2 / 3, q2 % 3);
        if t != t2 {
            return 0;
        }
        self.signs[t] * Self::CYCLE[k][k2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const DOUBLE_TET: &str = include_str!("../../../fixtures/double_tet.tri");
    pub(crate) const FIG8: &str = include_str!("../../../fixtures/fig8.tri");
    pub(crate) const ONE_TET: &str = include_str!("../../../fixtures/one_tet_rigid.tri");

    #[test]
    fn double_tet_classes() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        assert_eq!(tri.tet_count(), 2);
        assert_eq!(tri.num_vertices(), 4);
        assert_eq!(tri.num_edges(), 6);
        assert_eq!(tri.num_faces(), 4);
        for e in tri.edge_classes() {
            assert_eq!(e.degree(), 2);
        }
        assert_eq!(tri.euler_characteristic(), 0);
    }

    #[test]
    fn fig8_classes() {
        let tri = parse_triangulation(FIG8).unwrap();
        assert_eq!(tri.num_vertices(), 1);
        assert_eq!(tri.num_edges(), 2);
        let mut degs: Vec<usize> = tri.edge_classes().iter().map(EdgeClass::degree).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![6, 6]);
        // degree sum equals the number of tetrahedron edges
        assert_eq!(degs.iter().sum::<usize>(), 6 * tri.tet_count());
        assert_eq!(tri.euler_characteristic(), 1);
    }

    #[test]
    fn empty_triangulation() {
        let tri = parse_triangulation("tets 0\n").unwrap();
        assert_eq!(tri.tet_count(), 0);
        assert_eq!(tri.num_vertices(), 0);
        assert_eq!(tri.num_edges(), 0);
        assert_eq!(tri.euler_characteristic(), 0);
        assert!(tri.vertex_links().is_empty());
    }

    #[test]
    fn index_sums() {
        for text in [DOUBLE_TET, FIG8, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            for q in 0..tri.num_quads() {
                let s: usize = (0..tri.num_edges())
                    .map(|e| tri.quad_edge_index(q, e))
                    .sum();
                assert_eq!(s, 2);
            }
            for t in 0..tri.num_tris() {
                let s: usize = (0..tri.num_edges()).map(|e| tri.tri_edge_index(t, e)).sum();
                assert_eq!(s, 3);
            }
        }
    }

    #[test]
    fn index_disjoint_supports() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        // every edge class of the double has one representative per tet, so
        // no quad can be disjoint from a class with no rep in its tet; here
        // all classes touch both tets, so check i(q,e) in {0,1} and row sums.
        for q in 0..tri.num_quads() {
            let nonzero: Vec<usize> = (0..tri.num_edges())
                .filter(|&e| tri.quad_edge_index(q, e) == 1)
                .collect();
            assert_eq!(nonzero.len(), 2);
        }
    }

    #[test]
    fn nz_form_basics() {
        for text in [DOUBLE_TET, FIG8, ONE_TET] {
            let tri = parse_triangulation(text).unwrap();
            let nz = tri.nz_form();
            let n = tri.num_quads();
            for q in 0..n {
                assert_eq!(nz.omega(q, q), 0);
                for q2 in 0..n {
                    assert_eq!(nz.omega(q, q2), -nz.omega(q2, q));
                }
            }
            // within one tetrahedron the cycle has the stated pattern
            for t in 0..tri.tet_count() {
                let s = tri.orientation()[t];
                assert_eq!(nz.omega(3 * t, 3 * t + 1), s);
                assert_eq!(nz.omega(3 * t + 1, 3 * t + 2), s);
                assert_eq!(nz.omega(3 * t + 2, 3 * t), s);
            }
            // row sums vanish (Neumann-Zagier, part a)
            for q2 in 0..n {
                let s: i64 = (0..n).map(|q| nz.omega(q, q2) as i64).sum();
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn vertex_links_fig8() {
        let tri = parse_triangulation(FIG8).unwrap();
        let links = tri.vertex_links();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].triangles.len(), 8);
        assert_eq!(links[0].euler_char, 0); // torus
        assert_eq!(links[0].triangles.len() % 2, 0);
        // closed surface: every triangle is referenced by exactly three sides
        let mut seen = vec![0usize; links[0].triangles.len()];
        for row in &links[0].adjacency {
            for &n in row {
                seen[n] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 3));
    }

    #[test]
    fn vertex_links_double_tet() {
        let tri = parse_triangulation(DOUBLE_TET).unwrap();
        let links = tri.vertex_links();
        assert_eq!(links.len(), 4);
        for l in &links {
            assert_eq!(l.euler_char, 2); // spheres
            assert_eq!(l.triangles.len(), 2);
            assert_eq!(l.triangles.len() % 2, 0);
        }
    }

    #[test]
    fn one_tet_degrees() {
        let tri = parse_triangulation(ONE_TET).unwrap();
        let mut degs: Vec<usize> = tri.edge_classes().iter().map(EdgeClass::degree).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 4]);
        assert_eq!(tri.num_vertices(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        // no content at all
        assert!(matches!(
            parse_triangulation(""),
            Err(TriError::Parse { .. })
        ));
        // unglued face
        let text = "tets 1\nglue 0 0 -> 0 1 perm:1023\nglue 0 1 -> 0 0 perm:1023\n";
        assert!(matches!(
            parse_triangulation(text),
            Err(TriError::UngluedFace { .. })
        ));
        // self-gluing of a face to itself
        let text = "tets 1\nglue 0 0 -> 0 0 perm:0123\n";
        assert!(matches!(
            parse_triangulation(text),
            Err(TriError::SelfGluing { .. }) | Err(TriError::BadPerm { .. })
        ));
        // non-involutive pair
        let text = "tets 2\nglue 0 0 -> 1 0 perm:0132\nglue 1 0 -> 0 0 perm:0123\n\
                    glue 0 1 -> 1 1 perm:0123\nglue 1 1 -> 0 1 perm:0123\n\
                    glue 0 2 -> 1 2 perm:0123\nglue 1 2 -> 0 2 perm:0123\n\
                    glue 0 3 -> 1 3 perm:0123\nglue 1 3 -> 0 3 perm:0123\n";
        assert!(matches!(
            parse_triangulation(text),
            Err(TriError::NonInvolutive { .. })
        ));
        // orientation failure: even permutation on a one-tet pairing
        let text = "tets 1\nglue 0 0 -> 0 1 perm:1032\nglue 0 1 -> 0 0 perm:1032\n\
                    glue 0 2 -> 0 3 perm:0132\nglue 0 3 -> 0 2 perm:0132\n";
        assert!(matches!(
            parse_triangulation(text),
            Err(TriError::NotOrientable)
        ));
    }

    #[test]
    fn perm_basics() {
        let p = Perm4::parse("1230").unwrap();
        assert_eq!(p.sign(), -1);
        assert_eq!(p.inverse(), Perm4::parse("3012").unwrap());
        assert_eq!(Perm4::parse("0123").unwrap().sign(), 1);
        assert!(Perm4::parse("0124").is_none());
        assert!(Perm4::parse("0012").is_none());
    }

    #[test]
    fn relabeling_preserves_degree_multisets() {
        // swap the two tetrahedra of the fig-8 gluing
        let tri = parse_triangulation(FIG8).unwrap();
        let mut specs = tri.gluing_specs();
        for s in &mut specs {
            s.tet = 1 - s.tet;
            s.to_tet = 1 - s.to_tet;
        }
        let tri2 = Triangulation::from_gluing_specs(2, &specs).unwrap();
        let degs = |t: &Triangulation| {
            let mut d: Vec<usize> = t.edge_classes().iter().map(EdgeClass::degree).collect();
            d.sort_unstable();
            d
        };
        assert_eq!(degs(&tri), degs(&tri2));
        assert_eq!(tri.num_vertices(), tri2.num_vertices());
    }
}
