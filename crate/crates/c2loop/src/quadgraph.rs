//! Bipartite quadrangulations, train tracks and the vertex parametrization.
//!
//! Face corners are stored clockwise as `[x, u, y, v]` with `x, y` black.
//! Side `s` of a face joins corners `s` and `s + 1`, so the sides are
//! `UL = x–u`, `UR = u–y`, `LR = y–v`, `LL = v–x`.

use crate::error::{Error, Result};
use crate::quadext::{Rat, Scalar};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const UL: usize = 0;
pub const UR: usize = 1;
pub const LR: usize = 2;
pub const LL: usize = 3;

/// Corner indices inside `corners`.
pub const X: usize = 0;
pub const U: usize = 1;
pub const Y: usize = 2;
pub const V: usize = 3;

/// The two sides meeting at corner `c`.
pub fn sides_at_corner(c: usize) -> [usize; 2] {
    [(c + 3) % 4, c]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub color: Color,
    #[serde(default)]
    pub position: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub corners: Vec<usize>,
    /// Edge id on each side.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub ends: [usize; 2],
    /// `(face, side)` incidences; one for an external edge, two for an internal one.
    pub sides: Vec<(usize, usize)>,
}

impl Edge {
    pub fn is_external(&self) -> bool {
        self.sides.len() == 1
    }

    /// The incidence other than `(face, side)`.
    pub fn across(&self, face: usize, side: usize) -> Option<(usize, usize)> {
        if self.sides.len() != 2 {
            return None;
        }
        if self.sides[0] == (face, side) {
            Some(self.sides[1])
        } else {
            Some(self.sides[0])
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadGraph {
    pub vertices: Vec<Vertex>,
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceWeights<T> {
    pub w: [T; 5],
}

impl<T: Scalar> FaceWeights<T> {
    pub fn new(w1: T, w2: T, w3: T, w4: T, w5: T) -> Self {
        FaceWeights { w: [w1, w2, w3, w4, w5] }
    }

    /// Weight of row `i` in `1..=5`.
    pub fn row(&self, i: usize) -> &T {
        &self.w[i - 1]
    }

    pub fn scaled(&self, c: &T) -> Self {
        FaceWeights { w: self.w.clone().map(|x| x * c.clone()) }
    }
}

#[derive(Serialize, Deserialize)]
struct FaceJson {
    #[serde(default)]
    id: Option<usize>,
    corners: Vec<usize>,
    #[serde(default)]
    edges: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    faces: Vec<FaceJson>,
}

impl QuadGraph {
    /// Builds edges from corner pairs; each unordered pair of vertices is one edge.
    pub fn from_faces(vertices: Vec<Vertex>, corners: Vec<Vec<usize>>) -> QuadGraph {
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut faces = Vec::new();
        for (f, c) in corners.into_iter().enumerate() {
            let n = c.len();
            let mut fe = Vec::with_capacity(n);
            for s in 0..n {
                let (a, b) = (c[s], c[(s + 1) % n]);
                let key = (a.min(b), a.max(b));
                let id = *ids.entry(key).or_insert_with(|| {
                    edges.push(Edge { ends: [key.0, key.1], sides: Vec::new() });
                    edges.len() - 1
                });
                edges[id].sides.push((f, s));
                fe.push(id);
            }
            faces.push(Face { corners: c, edges: fe });
        }
        QuadGraph { vertices, faces, edges }
    }

    /// Builds from explicit side-to-edge ids, allowing repeated vertex pairs (tori).
    pub fn from_faces_and_edges(
        vertices: Vec<Vertex>,
        corners: Vec<Vec<usize>>,
        face_edges: Vec<Vec<usize>>,
    ) -> Result<QuadGraph> {
        let n_edges = face_edges.iter().flatten().max().map(|m| m + 1).unwrap_or(0);
        let mut edges: Vec<Edge> = (0..n_edges).map(|_| Edge { ends: [0, 0], sides: Vec::new() }).collect();
        let mut faces = Vec::new();
        for (f, (c, fe)) in corners.into_iter().zip(face_edges).enumerate() {
            if c.len() != fe.len() {
                return Err(Error::Input(format!("face {f}: corners and edges differ in length")));
            }
            let n = c.len();
            for s in 0..n {
                let (a, b) = (c[s], c[(s + 1) % n]);
                let e = &mut edges[fe[s]];
                let key = [a.min(b), a.max(b)];
                if !e.sides.is_empty() && e.ends != key {
                    return Err(Error::Input(format!("edge {} has inconsistent endpoints", fe[s])));
                }
                e.ends = key;
                e.sides.push((f, s));
            }
            faces.push(Face { corners: c, edges: fe });
        }
        Ok(QuadGraph { vertices, faces, edges })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QuadGraph> {
        let raw: GraphJson = serde_json::from_value(v.clone())?;
        let mut faces = raw.faces;
        if faces.iter().all(|f| f.id.is_some()) {
            faces.sort_by_key(|f| f.id);
        }
        let nv = raw.vertices.len();
        if faces.iter().flat_map(|f| f.corners.iter()).any(|&c| c >= nv) {
            return Err(Error::Input("face corner refers to a missing vertex".into()));
        }
        let corners: Vec<Vec<usize>> = faces.iter().map(|f| f.corners.clone()).collect();
        if faces.iter().all(|f| f.edges.is_some()) && !faces.is_empty() {
            let fe = faces.into_iter().map(|f| f.edges.unwrap()).collect();
            QuadGraph::from_faces_and_edges(raw.vertices, corners, fe)
        } else {
            Ok(QuadGraph::from_faces(raw.vertices, corners))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let faces: Vec<FaceJson> = self
            .faces
            .iter()
            .enumerate()
            .map(|(i, f)| FaceJson { id: Some(i), corners: f.corners.clone(), edges: Some(f.edges.clone()) })
            .collect();
        serde_json::to_value(GraphJson { vertices: self.vertices.clone(), faces }).unwrap()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn external_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_external()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(|e| e.sides.len() == 2)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends[0] == v || e.ends[1] == v).count()
    }

    /// The face across side `side` of face `f`, with its side index.
    pub fn neighbor(&self, f: usize, side: usize) -> Option<(usize, usize)> {
        self.edges[self.faces[f].edges[side]].across(f, side)
    }

    /// Square lattice of `n × m` faces; vertex `(i, j)` is black when `i + j` is even.
    pub fn grid(n: usize, m: usize) -> QuadGraph {
        let vid = |i: usize, j: usize| i * (m + 1) + j;
        let mut vertices = Vec::new();
        for i in 0..=n {
            for j in 0..=m {
                let color = if (i + j) % 2 == 0 { Color::Black } else { Color::White };
                vertices.push(Vertex { color, position: [i as f64, j as f64] });
            }
        }
        let mut corners = Vec::new();
        for i in 0..n {
            for j in 0..m {
                // clockwise with y pointing up
                let cw = [vid(i, j), vid(i, j + 1), vid(i + 1, j + 1), vid(i + 1, j)];
                let start = if (i + j) % 2 == 0 { 0 } else { 1 };
                corners.push((0..4).map(|k| cw[(start + k) % 4]).collect());
            }
        }
        QuadGraph::from_faces(vertices, corners)
    }

    /// A staircase of `n` faces where each face is glued to the previous one alternately
    /// on its right and top side.
    pub fn staircase(n: usize) -> QuadGraph {
        let mut cells = vec![(0usize, 0usize)];
        for k in 1..n {
            let (i, j) = cells[k - 1];
            cells.push(if k % 2 == 1 { (i + 1, j) } else { (i, j + 1) });
        }
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut vid = |p: (usize, usize), vertices: &mut Vec<Vertex>| {
            *ids.entry(p).or_insert_with(|| {
                let color = if (p.0 + p.1).is_multiple_of(2) { Color::Black } else { Color::White };
                vertices.push(Vertex { color, position: [p.0 as f64, p.1 as f64] });
                vertices.len() - 1
            })
        };
        let mut corners = Vec::new();
        for &(i, j) in &cells {
            let cw = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)];
            let start = if (i + j) % 2 == 0 { 0 } else { 1 };
            corners.push((0..4).map(|k| vid(cw[(start + k) % 4], &mut vertices)).collect());
        }
        QuadGraph::from_faces(vertices, corners)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_faces: usize,
    pub euler: i64,
    pub violations: Vec<String>,
}

pub fn validate(g: &QuadGraph) -> ValidationReport {
    let mut viol = Vec::new();
    for (f, face) in g.faces.iter().enumerate() {
        if face.corners.len() != 4 {
            viol.push(format!("FaceDegree: face {f} has degree {}", face.corners.len()));
            continue;
        }
        let want = [Color::Black, Color::White, Color::Black, Color::White];
        for (k, &c) in face.corners.iter().enumerate() {
            if g.vertices[c].color != want[k] {
                viol.push(format!("CornerLabel: face {f} corner {k} has the wrong color"));
            }
        }
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let [a, b] = edge.ends;
        if g.vertices[a].color == g.vertices[b].color {
            viol.push(format!("Bipartite: edge {e} joins two vertices of the same color"));
        }
        if edge.sides.len() > 2 {
            viol.push(format!("Manifold: edge {e} lies on {} faces", edge.sides.len()));
        }
        if edge.sides.len() == 2 {
            // opposite traversal directions on the two faces
            let dir = |(f, s): (usize, usize)| {
                let c = &g.faces[f].corners;
                (c[s], c[(s + 1) % c.len()])
            };
            let (p, q) = (dir(edge.sides[0]), dir(edge.sides[1]));
            if p.0 != p.1 && p != (q.1, q.0) {
                viol.push(format!("Orientation: faces on edge {e} are not coherently clockwise"));
            }
        }
    }
    if !g.is_closed() {
        for (f, face) in g.faces.iter().enumerate() {
            if face.corners.len() == 4 && signed_area(g, &face.corners) > 0.0 {
                viol.push(format!("Orientation: face {f} corners are counterclockwise"));
            }
        }
    }
    let euler = g.n_vertices() as i64 - g.n_edges() as i64 + g.n_faces() as i64;
    let expected = if g.is_closed() { None } else { Some(1) };
    if let Some(x) = expected {
        if euler != x {
            viol.push(format!("Euler: |V|-|E|+|F| = {euler}, expected {x}"));
        }
    }
    ValidationReport {
        valid: viol.is_empty(),
        n_vertices: g.n_vertices(),
        n_edges: g.n_edges(),
        n_faces: g.n_faces(),
        euler,
        violations: viol,
    }
}

fn signed_area(g: &QuadGraph, c: &[usize]) -> f64 {
    let mut a = 0.0;
    for k in 0..c.len() {
        let p = g.vertices[c[k]].position;
        let q = g.vertices[c[(k + 1) % c.len()]].position;
        a += p[0] * q[1] - q[0] * p[1];
    }
    a / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainTrack {
    pub dual_edge_path: Vec<usize>,
    pub is_loop: bool,
}

/// Dual paths that cross every face through opposite sides.
pub fn train_tracks(g: &QuadGraph) -> Vec<TrainTrack> {
    let mut seen = vec![false; g.n_edges()];
    let mut tracks = Vec::new();
    let follow = |start_face: usize, start_side: usize, path: &mut Vec<usize>, seen: &mut Vec<bool>| {
        let (mut f, mut s) = (start_face, start_side);
        loop {
            let out = (s + 2) % 4;
            let e = g.faces[f].edges[out];
            if seen[e] {
                return true;
            }
            seen[e] = true;
            path.push(e);
            match g.edges[e].across(f, out) {
                Some((f2, s2)) => {
                    f = f2;
                    s = s2;
                }
                None => return false,
            }
        }
    };
    for e0 in g.external_edges() {
        if seen[e0] {
            continue;
        }
        seen[e0] = true;
        let mut path = vec![e0];
        let (f, s) = g.edges[e0].sides[0];
        follow(f, s, &mut path, &mut seen);
        tracks.push(TrainTrack { dual_edge_path: path, is_loop: false });
    }
    for e0 in 0..g.n_edges() {
        if seen[e0] {
            continue;
        }
        seen[e0] = true;
        let mut path = vec![e0];
        let (f, s) = g.edges[e0].sides[0];
        follow(f, s, &mut path, &mut seen);
        tracks.push(TrainTrack { dual_edge_path: path, is_loop: true });
    }
    tracks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackCensus {
    pub t: usize,
    pub e_ext: usize,
    pub e_int: usize,
    pub tracks_pair_external_edges: bool,
    pub face_edge_count: bool,
    pub kernel_dimension: bool,
}

impl TrackCensus {
    pub fn all_hold(&self) -> bool {
        self.tracks_pair_external_edges && self.face_edge_count && self.kernel_dimension
    }
}

pub fn track_census(g: &QuadGraph) -> Result<TrackCensus> {
    let tracks = train_tracks(g);
    if tracks.iter().any(|t| t.is_loop) {
        return Err(Error::LoopTrackPresent);
    }
    let t = tracks.len();
    let e_ext = g.external_edges().len();
    let e_int = g.n_edges() - e_ext;
    Ok(TrackCensus {
        t,
        e_ext,
        e_int,
        tracks_pair_external_edges: 2 * t == e_ext,
        face_edge_count: 4 * g.n_faces() == 2 * e_int + e_ext,
        kernel_dimension: t + 1 == g.n_vertices() - g.n_faces(),
    })
}

/// Per-face `h_x + h_y − h_u − h_v`.
pub fn phi(g: &QuadGraph, h: &HashMap<usize, Rat>) -> Result<Vec<Rat>> {
    g.faces
        .iter()
        .map(|f| {
            let val = |k: usize| h.get(&f.corners[k]).cloned().ok_or(Error::MissingValue(f.corners[k]));
            Ok(val(X)? + val(Y)? - val(U)? - val(V)?)
        })
        .collect()
}

/// Vertex weights `g = ∏_f R_f^{exponents[v][f]}` solving `g_x g_y / (g_u g_v) = R_f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    pub exponents: Vec<Vec<Rat>>,
    pub ratios: Vec<Rat>,
    pub g: Vec<f64>,
    /// Input weights divided by the parametrized ones, per face.
    pub scale: Vec<f64>,
}

impl Parametrization {
    /// `g` as exact rationals when every exponent is an integer.
    pub fn g_exact(&self) -> Option<Vec<Rat>> {
        self.exponents
            .iter()
            .map(|row| {
                let mut x = Rat::one();
                for (e, r) in row.iter().zip(&self.ratios) {
                    if !e.is_integer() {
                        return None;
                    }
                    let k = e.to_integer();
                    let k: i64 = num_traits::ToPrimitive::to_i64(&k)?;
                    for _ in 0..k.unsigned_abs() {
                        x = if k > 0 { x * r } else { x / r };
                    }
                }
                Some(x)
            })
            .collect()
    }

    /// Exact check that `Φ(exponents)` is the identity on faces, i.e. every
    /// ratio is reproduced whatever the values of `R_f`.
    pub fn reproduces_ratios(&self, g: &QuadGraph) -> bool {
        let nf = g.n_faces();
        (0..nf).all(|f| {
            let c = &g.faces[f].corners;
            (0..nf).all(|f2| {
                let e = &self.exponents;
                let s = e[c[X]][f2].clone() + e[c[Y]][f2].clone() - e[c[U]][f2].clone() - e[c[V]][f2].clone();
                s == if f == f2 { Rat::one() } else { Rat::zero() }
            })
        })
    }
}

/// Solves `Φ(h) = log R_f` exactly over exponent vectors. Non-pivot vertices,
/// taken in id order, are pinned to `h = 0`.
pub fn solve_ratios(g: &QuadGraph, ratios: &[Rat]) -> Result<Parametrization> {
    if train_tracks(g).iter().any(|t| t.is_loop) {
        return Err(Error::LoopTrackPresent);
    }
    let nf = g.n_faces();
    let nv = g.n_vertices();
    // rows: faces; columns: vertices, then the symbolic right-hand side e_f
    let mut rows: Vec<Vec<Rat>> = (0..nf)
        .map(|f| {
            let mut r = vec![Rat::zero(); nv + nf];
            let c = &g.faces[f].corners;
            r[c[X]] += Rat::one();
            r[c[Y]] += Rat::one();
            r[c[U]] -= Rat::one();
            r[c[V]] -= Rat::one();
            r[nv + f] = Rat::one();
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r0 = 0;
    for col in 0..nv {
        let Some(p) = (r0..nf).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(r0, p);
        let inv = Rat::one() / rows[r0][col].clone();
        for x in rows[r0].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nf {
            if r != r0 && !rows[r][col].is_zero() {
                let k = rows[r][col].clone();
                let piv = rows[r0].clone();
                for (x, y) in rows[r].iter_mut().zip(piv) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push((r0, col));
        r0 += 1;
        if r0 == nf {
            break;
        }
    }
    if r0 < nf {
        return Err(Error::Inconsistent);
    }
    let mut exponents = vec![vec![Rat::zero(); nf]; nv];
    for (r, col) in pivots {
        exponents[col] = rows[r][nv..].to_vec();
    }
    let g_vals = exponents
        .iter()
        .map(|row| {
            row.iter()
                .zip(ratios)
                .map(|(e, r)| e.to_f64() * r.to_f64().ln())
                .sum::<f64>()
                .exp()
        })
        .collect();
    Ok(Parametrization { exponents, ratios: ratios.to_vec(), g: g_vals, scale: vec![1.0; nf] })
}

/// Parametrized face weights from corner values `(g_x, g_y, g_u, g_v)`.
pub fn paramg_weights(gx: f64, gy: f64, gu: f64, gv: f64) -> FaceWeights<f64> {
    let xy = gx * gy;
    let uv = gu * gv;
    let big_x = (xy + uv).sqrt();
    FaceWeights::new(xy, uv, xy.sqrt() * big_x, uv.sqrt() * big_x, (xy * uv).sqrt())
}

/// Finds `g` whose parametrized weights equal `w` up to one positive factor per face.
pub fn solve_parametrization<T: Scalar + RatioExact>(g: &QuadGraph, w: &[FaceWeights<T>]) -> Result<Parametrization> {
    let mut ratios = Vec::with_capacity(w.len());
    for (f, fw) in w.iter().enumerate() {
        if !crate::ffdimers::ff_check(fw) {
            return Err(Error::NotFreeFermionic(format!("face {f}")));
        }
        let r = fw.row(1).clone() / fw.row(5).clone();
        ratios.push(T::square_as_rational(&r).ok_or_else(|| {
            Error::Input(format!("face {f}: (w1/w5)^2 is not rational"))
        })?);
    }
    let mut p = solve_ratios(g, &ratios)?;
    for (f, face) in g.faces.iter().enumerate() {
        let c = &face.corners;
        let pw = paramg_weights(p.g[c[X]], p.g[c[Y]], p.g[c[U]], p.g[c[V]]);
        let k = w[f].row(5).to_f64() / pw.w[4];
        for i in 0..5 {
            let want = w[f].w[i].to_f64();
            if (pw.w[i] * k - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(Error::Inconsistent);
            }
        }
        p.scale[f] = k;
    }
    Ok(p)
}

/// Scalars whose squares can be recognised as rationals.
pub trait RatioExact {
    fn square_as_rational(x: &Self) -> Option<Rat>;
}

impl RatioExact for Rat {
    fn square_as_rational(x: &Self) -> Option<Rat> {
        Some(x * x)
    }
}

impl RatioExact for crate::quadext::QuadExt {
    fn square_as_rational(x: &Self) -> Option<Rat> {
        let s = x.clone() * x.clone();
        s.is_rational().then_some(s.a)
    }
}

impl RatioExact for f64 {
    fn square_as_rational(x: &Self) -> Option<Rat> {
        Rat::from_float(x * x)
    }
}

/// Face weights read from JSON, exact when every entry is a string.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSet {
    Exact(Vec<FaceWeights<crate::quadext::QuadExt>>),
    Float(Vec<FaceWeights<f64>>),
}

/// `{"faces": [[w1, …, w5], …]}` or `{"uniform": [w1, …, w5]}`; entries are
/// numbers or strings accepted by [`crate::quadext::parse_quad`].
pub fn weights_from_json(v: &serde_json::Value, n_faces: usize) -> Result<WeightSet> {
    let rows: Vec<serde_json::Value> = if let Some(u) = v.get("uniform") {
        vec![u.clone(); n_faces]
    } else if let Some(f) = v.get("faces").and_then(|f| f.as_array()) {
        f.clone()
    } else {
        return Err(Error::Input("weights need \"faces\" or \"uniform\"".into()));
    };
    if rows.len() != n_faces {
        return Err(Error::Input(format!("{} weight rows for {n_faces} faces", rows.len())));
    }
    let entries: Vec<Vec<serde_json::Value>> = rows
        .iter()
        .map(|r| match r.as_array() {
            Some(a) if a.len() == 5 => Ok(a.clone()),
            _ => Err(Error::Input("each face needs five weights".into())),
        })
        .collect::<Result<_>>()?;
    if entries.iter().flatten().all(|e| e.is_string()) {
        let exact = entries
            .iter()
            .map(|r| {
                let w: Vec<_> = r
                    .iter()
                    .map(|e| {
                        let s = e.as_str().unwrap();
                        crate::quadext::parse_quad(s).ok_or_else(|| Error::Input(format!("bad weight {s:?}")))
                    })
                    .collect::<Result<_>>()?;
                Ok(FaceWeights { w: w.try_into().unwrap() })
            })
            .collect::<Result<_>>()?;
        return Ok(WeightSet::Exact(exact));
    }
    let float = entries
        .iter()
        .map(|r| {
            let w: Vec<f64> = r
                .iter()
                .map(|e| match e {
                    serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| Error::Input("bad number".into())),
                    serde_json::Value::String(s) => crate::quadext::parse_quad(s)
                        .map(|q| q.to_f64())
                        .ok_or_else(|| Error::Input(format!("bad weight {s:?}"))),
                    _ => Err(Error::Input("weights are numbers or strings".into())),
                })
                .collect::<Result<_>>()?;
            Ok(FaceWeights { w: w.try_into().unwrap() })
        })
        .collect::<Result<_>>()?;
    Ok(WeightSet::Float(float))
}

/// Degree-2 vertices on the outer boundary.
pub fn degree2_boundary(g: &QuadGraph) -> Vec<usize> {
    let mut deg = vec![0usize; g.n_vertices()];
    let mut on_boundary = vec![false; g.n_vertices()];
    for e in &g.edges {
        deg[e.ends[0]] += 1;
        deg[e.ends[1]] += 1;
        if e.is_external() {
            on_boundary[e.ends[0]] = true;
            on_boundary[e.ends[1]] = true;
        }
    }
    (0..g.n_vertices()).filter(|&v| deg[v] == 2 && on_boundary[v]).collect()
}
