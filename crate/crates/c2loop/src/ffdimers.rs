//! Free-fermionic weights, the decorated dimer graph and Kasteleyn free energies.
//!
//! City vertices are indexed `4 f + s` where `s` is the side of face `f`
//! crossed by the road. The city edge at corner `c` joins sides `c − 1` and `c`;
//! it carries `a` at the white corners `u, v` and `b` at the black corners `x, y`.

use crate::error::{Error, Result};
use crate::loopmodel::{for_each_config, weight, BoundarySpec, LoopConfig, PathColor};
use crate::quadext::Scalar;
use crate::quadgraph::{FaceWeights, QuadGraph};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub fn ff_check<T: Scalar>(w: &FaceWeights<T>) -> bool {
    let [w1, w2, w3, w4, w5] = w.w.clone();
    (w1.clone() * w4.clone()).close_to(&(w3.clone() * w5.clone()))
        && (w2.clone() * w3.clone()).close_to(&(w4.clone() * w5.clone()))
        && (w5 * (w1 + w2)).close_to(&(w3 * w4))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FFParams<T> {
    pub lambda: T,
    pub a: T,
    pub b: T,
}

pub fn ff_decompose<T: Scalar>(w: &FaceWeights<T>) -> Result<FFParams<T>> {
    if !w.w.iter().all(|x| x.is_positive()) || !ff_check(w) {
        return Err(Error::NotFreeFermionic(format!("{:?}", w.w)));
    }
    let lambda = w.w[0].clone() + w.w[1].clone();
    Ok(FFParams { a: w.w[2].clone() / lambda.clone(), b: w.w[3].clone() / lambda.clone(), lambda })
}

impl<T: Scalar> FFParams<T> {
    /// `λ (a², b², a, b, ab)`.
    pub fn weights(&self) -> FaceWeights<T> {
        let (l, a, b) = (self.lambda.clone(), self.a.clone(), self.b.clone());
        FaceWeights::new(
            l.clone() * a.clone() * a.clone(),
            l.clone() * b.clone() * b.clone(),
            l.clone() * a.clone(),
            l.clone() * b.clone(),
            l * a * b,
        )
    }

    pub fn is_normalized(&self) -> bool {
        (self.a.clone() * self.a.clone() + self.b.clone() * self.b.clone()).close_to(&T::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    City { face: usize, corner: usize },
    Road { edge: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimerEdge<T> {
    pub ends: [usize; 2],
    pub weight: T,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoratedDimerGraph<T> {
    pub n_vertices: usize,
    pub edges: Vec<DimerEdge<T>>,
    /// `city_edge[f][c]`: edge id of the city edge at corner `c`.
    pub city_edge: Vec<[usize; 4]>,
    /// Road id for each edge of the quadrangulation; `None` for external edges.
    pub road: Vec<Option<usize>>,
}

impl<T: Scalar> DecoratedDimerGraph<T> {
    pub fn n_cities(&self) -> usize {
        self.city_edge.len()
    }

    pub fn n_roads(&self) -> usize {
        self.road.iter().flatten().count()
    }

    pub fn n_dangling(&self) -> usize {
        self.road.iter().filter(|r| r.is_none()).count()
    }

    pub fn incident(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.ends[0]].push(i);
            inc[e.ends[1]].push(i);
        }
        inc
    }
}

pub fn build_gq<T: Scalar>(g: &QuadGraph, params: &[FFParams<T>]) -> DecoratedDimerGraph<T> {
    let mut edges = Vec::new();
    let mut city_edge = Vec::new();
    for (f, p) in params.iter().enumerate() {
        let mut ids = [0; 4];
        for (c, id) in ids.iter_mut().enumerate() {
            let w = if c % 2 == 1 { p.a.clone() } else { p.b.clone() };
            *id = edges.len();
            edges.push(DimerEdge { ends: [4 * f + (c + 3) % 4, 4 * f + c], weight: w, kind: EdgeKind::City { face: f, corner: c } });
        }
        city_edge.push(ids);
    }
    let mut road = vec![None; g.n_edges()];
    for (e, edge) in g.edges.iter().enumerate() {
        if let [(f1, s1), (f2, s2)] = edge.sides[..] {
            road[e] = Some(edges.len());
            edges.push(DimerEdge { ends: [4 * f1 + s1, 4 * f2 + s2], weight: T::one(), kind: EdgeKind::Road { edge: e } });
        }
    }
    DecoratedDimerGraph { n_vertices: 4 * g.n_faces(), edges, city_edge, road }
}

fn components_even<T: Scalar>(gq: &DecoratedDimerGraph<T>) -> bool {
    let inc = gq.incident();
    let mut seen = vec![false; gq.n_vertices];
    for s in 0..gq.n_vertices {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &e in &inc[v] {
                let [a, b] = gq.edges[e].ends;
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if size % 2 == 1 {
            return false;
        }
    }
    true
}

/// Calls `visit` with the edge ids of every perfect matching.
pub fn for_each_matching<T: Scalar, F: FnMut(&[usize])>(gq: &DecoratedDimerGraph<T>, mut visit: F) -> Result<()> {
    if !components_even(gq) {
        return Err(Error::OddVertexCount);
    }
    let inc = gq.incident();
    let mut matched = vec![false; gq.n_vertices];
    let mut chosen = Vec::new();
    fn rec<T: Scalar, F: FnMut(&[usize])>(
        gq: &DecoratedDimerGraph<T>,
        inc: &[Vec<usize>],
        start: usize,
        matched: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        visit: &mut F,
    ) {
        let Some(v) = (start..gq.n_vertices).find(|&v| !matched[v]) else {
            visit(chosen);
            return;
        };
        matched[v] = true;
        for &e in &inc[v] {
            let [a, b] = gq.edges[e].ends;
            let w = if a == v { b } else { a };
            if !matched[w] {
                matched[w] = true;
                chosen.push(e);
                rec(gq, inc, v + 1, matched, chosen, visit);
                chosen.pop();
                matched[w] = false;
            }
        }
        matched[v] = false;
    }
    rec(gq, &inc, 0, &mut matched, &mut chosen, &mut visit);
    Ok(())
}

pub fn matching_weight<T: Scalar>(gq: &DecoratedDimerGraph<T>, m: &[usize]) -> T {
    m.iter().fold(T::one(), |acc, &e| acc * gq.edges[e].weight.clone())
}

pub fn dimer_partition_bruteforce<T: Scalar>(gq: &DecoratedDimerGraph<T>) -> Result<T> {
    let mut z = T::zero();
    for_each_matching(gq, |m| z = z.clone() + matching_weight(gq, m))?;
    Ok(z)
}

fn decompose_all<T: Scalar>(w: &[FaceWeights<T>]) -> Result<Vec<FFParams<T>>> {
    w.iter()
        .enumerate()
        .map(|(f, fw)| ff_decompose(fw).map_err(|_| Error::NotFreeFermionic(format!("face {f}"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport<T> {
    pub z_loop: T,
    pub lambda_product: T,
    pub z_dimer: T,
    pub holds: bool,
}

/// Compares the loop partition function with `∏ λ_f · Z_dim²` on a closed surface.
pub fn verify_correspondence<T: Scalar>(g: &QuadGraph, w: &[FaceWeights<T>]) -> Result<CorrespondenceReport<T>> {
    let params = decompose_all(w)?;
    let z_loop = crate::loopmodel::partition_function(g, w, &BoundarySpec::ClosedSurface)?;
    let gq = build_gq(g, &params);
    let z_dimer = dimer_partition_bruteforce(&gq)?;
    let lambda_product = params.iter().fold(T::one(), |acc, p| acc * p.lambda.clone());
    let rhs = lambda_product.clone() * z_dimer.clone() * z_dimer.clone();
    Ok(CorrespondenceReport { holds: z_loop.close_to(&rhs), z_loop, lambda_product, z_dimer })
}

/// Blue edges plus, at faces whose four sides are blue, which corners the strands turn around
/// (`0` for `u, v`, `1` for `x, y`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BluePaths {
    pub edges: BTreeSet<usize>,
    pub turns: BTreeMap<usize, usize>,
}

impl BluePaths {
    pub fn of(g: &QuadGraph, cfg: &LoopConfig) -> BluePaths {
        let cols = cfg.edge_colors(g);
        let edges = (0..g.n_edges()).filter(|&e| cols[e] == Some(PathColor::Blue)).collect();
        let mut turns = BTreeMap::new();
        for (f, c) in cfg.faces.iter().enumerate() {
            if c.side_colors().iter().all(|&k| k == PathColor::Blue) {
                turns.insert(f, if c.row() == 1 { 0 } else { 1 });
            }
        }
        BluePaths { edges, turns }
    }

    fn realizable(&self, g: &QuadGraph) -> bool {
        g.faces.iter().enumerate().all(|(f, face)| {
            let n = face.edges.iter().filter(|e| self.edges.contains(e)).count();
            match n {
                0 | 2 => !self.turns.contains_key(&f),
                4 => matches!(self.turns.get(&f), Some(0 | 1)),
                _ => false,
            }
        }) && self.edges.iter().all(|&e| e < g.n_edges())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginalReport<T> {
    pub loop_side: T,
    pub dimer_side: T,
    pub holds: bool,
}

/// Loop mass with blue paths `blue` against `∏ λ_f` times the double-dimer mass with those paths.
pub fn verify_blue_marginal<T: Scalar>(g: &QuadGraph, w: &[FaceWeights<T>], blue: &BluePaths) -> Result<MarginalReport<T>> {
    if !blue.realizable(g) {
        return Err(Error::UnrealizablePaths);
    }
    let params = decompose_all(w)?;
    let mut loop_side = T::zero();
    for_each_config(g, &BoundarySpec::ClosedSurface, |c| {
        if BluePaths::of(g, c) == *blue {
            loop_side = loop_side.clone() + weight(g, c, w, true);
        }
    })?;
    let gq = build_gq(g, &params);
    let mut ms: Vec<(Vec<bool>, T)> = Vec::new();
    for_each_matching(&gq, |m| {
        let mut used = vec![false; gq.edges.len()];
        for &e in m {
            used[e] = true;
        }
        ms.push((used, matching_weight(&gq, m)));
    })?;
    let mut dimer_side = T::zero();
    for (ma, wa) in &ms {
        for (mb, wb) in &ms {
            if has_paths(g, &gq, ma, mb, blue) {
                dimer_side = dimer_side.clone() + wa.clone() * wb.clone();
            }
        }
    }
    let lp = params.iter().fold(T::one(), |acc, p| acc * p.lambda.clone());
    dimer_side = dimer_side * lp;
    Ok(MarginalReport { holds: loop_side.close_to(&dimer_side), loop_side, dimer_side })
}

fn has_paths<T: Scalar>(g: &QuadGraph, gq: &DecoratedDimerGraph<T>, ma: &[bool], mb: &[bool], blue: &BluePaths) -> bool {
    for (e, r) in gq.road.iter().enumerate() {
        if let Some(r) = *r {
            if (ma[r] != mb[r]) != blue.edges.contains(&e) {
                return false;
            }
        }
    }
    for (&f, &t) in &blue.turns {
        let ce = gq.city_edge[f];
        // single roads on all four sides: the union of city dimers pairs adjacent sides
        let around_uv = (ma[ce[1]] || mb[ce[1]]) && (ma[ce[3]] || mb[ce[3]]);
        if (t == 0) != around_uv {
            return false;
        }
    }
    let _ = g;
    true
}

/// Probability that `edge` is covered in a single dimer configuration.
pub fn road_probability<T: Scalar>(gq: &DecoratedDimerGraph<T>, edge: usize) -> Result<T> {
    if !matches!(gq.edges.get(edge).map(|e| e.kind), Some(EdgeKind::Road { .. })) {
        return Err(Error::NotARoad(edge));
    }
    let (mut hit, mut z) = (T::zero(), T::zero());
    for_each_matching(gq, |m| {
        let w = matching_weight(gq, m);
        if m.contains(&edge) {
            hit = hit.clone() + w.clone();
        }
        z = z.clone() + w;
    })?;
    if z.is_zero() {
        return Err(Error::DivZero);
    }
    Ok(hit / z)
}

/// Multiplies every edge weight by the gauge values of both endpoints.
pub fn gauge_transform<T: Scalar>(gq: &DecoratedDimerGraph<T>, gauge: &[T]) -> DecoratedDimerGraph<T> {
    let mut out = gq.clone();
    for e in out.edges.iter_mut() {
        e.weight = e.weight.clone() * gauge[e.ends[0]].clone() * gauge[e.ends[1]].clone();
    }
    out
}

/// Faces of `G^Q` as cycles of `(edge, forward)`, oriented clockwise on the
/// surface; `forward` means the cycle runs from `ends[0]` to `ends[1]`.
/// Cycles around boundary vertices of `G` are open and left out.
pub fn gq_faces<T: Scalar>(g: &QuadGraph, gq: &DecoratedDimerGraph<T>) -> Vec<Vec<(usize, bool)>> {
    let mut faces = Vec::new();
    for f in 0..g.n_faces() {
        faces.push((0..4).map(|c| (gq.city_edge[f][c], true)).collect());
    }
    let mut seen = vec![[false; 4]; g.n_faces()];
    for f0 in 0..g.n_faces() {
        for c0 in 0..4 {
            if seen[f0][c0] {
                continue;
            }
            let (mut f, mut c) = (f0, c0);
            let mut cyc = Vec::new();
            let closed = loop {
                seen[f][c] = true;
                cyc.push((gq.city_edge[f][c], false));
                let s = (c + 3) % 4;
                let e = g.faces[f].edges[s];
                let Some(r) = gq.road[e] else { break false };
                cyc.push((r, gq.edges[r].ends[0] == 4 * f + s));
                let (f2, s2) = g.edges[e].across(f, s).unwrap();
                f = f2;
                c = s2;
                if (f, c) == (f0, c0) {
                    break true;
                }
            };
            if closed {
                faces.push(cyc);
            }
        }
    }
    faces
}

/// Proper 2-coloring of `G^Q`; `true` is white.
pub fn gq_bipartition<T: Scalar>(gq: &DecoratedDimerGraph<T>) -> Result<Vec<bool>> {
    let inc = gq.incident();
    let mut col: Vec<Option<bool>> = vec![None; gq.n_vertices];
    for s in 0..gq.n_vertices {
        if col[s].is_some() {
            continue;
        }
        col[s] = Some(true);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &inc[v] {
                let [a, b] = gq.edges[e].ends;
                let w = if a == v { b } else { a };
                match col[w] {
                    None => {
                        col[w] = Some(!col[v].unwrap());
                        stack.push(w);
                    }
                    Some(k) if k == col[v].unwrap() => return Err(Error::Input("G^Q is not bipartite".into())),
                    _ => {}
                }
            }
        }
    }
    Ok(col.into_iter().map(|c| c.unwrap()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KasteleynData {
    /// `true` when the edge points from `ends[0]` to `ends[1]`.
    pub forward: Vec<bool>,
    pub white: Vec<bool>,
}

impl KasteleynData {
    /// `+1` when the edge points from its white end to its black end.
    pub fn sign<T: Scalar>(&self, gq: &DecoratedDimerGraph<T>, e: usize) -> f64 {
        let from = if self.forward[e] { gq.edges[e].ends[0] } else { gq.edges[e].ends[1] };
        if self.white[from] {
            1.0
        } else {
            -1.0
        }
    }
}

/// Counts clockwise edges per face; independent of how the orientation was found.
pub fn kasteleyn_check<T: Scalar>(g: &QuadGraph, gq: &DecoratedDimerGraph<T>, k: &KasteleynData) -> bool {
    gq_faces(g, gq)
        .iter()
        .all(|cyc| cyc.iter().filter(|&&(e, fwd)| k.forward[e] == fwd).count() % 2 == 1)
}

/// Solves the odd-clockwise conditions over GF(2), starting from every edge
/// pointing white to black and flipping only pivot edges.
pub fn kasteleyn_orientation<T: Scalar>(g: &QuadGraph, gq: &DecoratedDimerGraph<T>) -> Result<KasteleynData> {
    let white = gq_bipartition(gq)?;
    let ne = gq.edges.len();
    let base: Vec<bool> = gq.edges.iter().map(|e| white[e.ends[0]]).collect();
    let words = ne.div_ceil(64);
    // unknown y_e flips the base direction; clockwise iff base_e ^ y_e == fwd
    let mut rows: Vec<(Vec<u64>, bool)> = gq_faces(g, gq)
        .iter()
        .map(|cyc| {
            let mut bits = vec![0u64; words];
            let mut rhs = true;
            for &(e, fwd) in cyc {
                bits[e / 64] ^= 1 << (e % 64);
                rhs ^= base[e] ^ fwd ^ true;
            }
            (bits, rhs)
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for col in 0..ne {
        let Some(p) = (r0..rows.len()).find(|&r| rows[r].0[col / 64] >> (col % 64) & 1 == 1) else {
            continue;
        };
        rows.swap(r0, p);
        let piv = rows[r0].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != r0 && row.0[col / 64] >> (col % 64) & 1 == 1 {
                for (x, y) in row.0.iter_mut().zip(&piv.0) {
                    *x ^= y;
                }
                row.1 ^= piv.1;
            }
        }
        pivots.push(col);
        r0 += 1;
    }
    if rows[r0..].iter().any(|r| r.1) {
        return Err(Error::NotFound);
    }
    let mut flip = vec![false; ne];
    for (r, &col) in pivots.iter().enumerate() {
        flip[col] = rows[r].1;
    }
    let forward = (0..ne).map(|e| base[e] ^ flip[e]).collect();
    Ok(KasteleynData { forward, white })
}

/// A doubly periodic quadrangulation given by one fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusDomain {
    pub graph: QuadGraph,
    pub params: Vec<FFParams<f64>>,
    /// For each edge, the period coordinates of the second incident face's copy
    /// relative to the first.
    pub offsets: Vec<[i32; 2]>,
    pub periods: [[i64; 2]; 2],
    /// Signs applied to `z` and `w`, selecting one of the four spin structures.
    pub twist: [i8; 2],
}

#[derive(Serialize, Deserialize)]
struct TorusJson {
    graph: serde_json::Value,
    params: Vec<FFParams<f64>>,
    periods: [[i64; 2]; 2],
    gamma_x: Vec<(usize, i32)>,
    gamma_y: Vec<(usize, i32)>,
    #[serde(default = "no_twist")]
    twist: [i8; 2],
}

fn no_twist() -> [i8; 2] {
    [1, 1]
}

impl TorusDomain {
    pub fn from_json(v: &serde_json::Value) -> Result<TorusDomain> {
        let raw: TorusJson = serde_json::from_value(v.clone())?;
        let graph = QuadGraph::from_json(&raw.graph)?;
        if raw.params.len() != graph.n_faces() {
            return Err(Error::Input("one parameter triple per face is required".into()));
        }
        let mut offsets = vec![[0, 0]; graph.n_edges()];
        for (k, list) in [raw.gamma_x, raw.gamma_y].into_iter().enumerate() {
            for (e, n) in list {
                *offsets.get_mut(e).ok_or_else(|| Error::Input(format!("edge {e} out of range")))?.get_mut(k).unwrap() = n;
            }
        }
        Ok(TorusDomain { graph, params: raw.params, offsets, periods: raw.periods, twist: raw.twist })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pick = |k: usize| {
            (0..self.offsets.len()).filter(|&e| self.offsets[e][k] != 0).map(|e| (e, self.offsets[e][k])).collect()
        };
        serde_json::to_value(TorusJson {
            graph: self.graph.to_json(),
            params: self.params.clone(),
            periods: self.periods,
            gamma_x: pick(0),
            gamma_y: pick(1),
            twist: self.twist,
        })
        .unwrap()
    }

    pub fn gq(&self) -> DecoratedDimerGraph<f64> {
        build_gq(&self.graph, &self.params)
    }
}

/// Precomputed pieces of `K(z, w)`.
pub struct CharPoly {
    n: usize,
    twist: [f64; 2],
    // (white row, black column, signed weight, z power, w power)
    entries: Vec<(usize, usize, f64, i32, i32)>,
}

impl CharPoly {
    pub fn new(domain: &TorusDomain) -> Result<CharPoly> {
        let gq = domain.gq();
        let k = kasteleyn_orientation(&domain.graph, &gq)?;
        let mut idx = vec![0usize; gq.n_vertices];
        let (mut nw, mut nb) = (0, 0);
        for (slot, &white) in idx.iter_mut().zip(&k.white) {
            if white {
                *slot = nw;
                nw += 1;
            } else {
                *slot = nb;
                nb += 1;
            }
        }
        if nw != nb {
            return Err(Error::OddVertexCount);
        }
        let mut entries = Vec::new();
        for (e, edge) in gq.edges.iter().enumerate() {
            let [p, q] = edge.ends;
            let mut d = match edge.kind {
                EdgeKind::Road { edge } => domain.offsets[edge],
                EdgeKind::City { .. } => [0, 0],
            };
            let (wv, bv) = if k.white[p] { (p, q) } else { (q, p) };
            if wv != p {
                d = [-d[0], -d[1]];
            }
            entries.push((idx[wv], idx[bv], k.sign(&gq, e) * edge.weight, d[0], d[1]));
        }
        Ok(CharPoly { n: nw, entries, twist: domain.twist.map(f64::from) })
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let (z, w) = (z * self.twist[0], w * self.twist[1]);
        let mut m = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        for &(r, c, x, dz, dw) in &self.entries {
            m[r * self.n + c] += x * z.powi(dz) * w.powi(dw);
        }
        det(&mut m, self.n)
    }
}

fn det(m: &mut [Complex64], n: usize) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let p = (col..n).max_by(|&a, &b| m[a * n + col].norm().total_cmp(&m[b * n + col].norm())).unwrap();
        if m[p * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != col {
            for k in 0..n {
                m.swap(p * n + k, col * n + k);
            }
            d = -d;
        }
        let piv = m[col * n + col];
        d *= piv;
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            if f != Complex64::new(0.0, 0.0) {
                for k in col..n {
                    let x = m[col * n + k];
                    m[r * n + k] -= f * x;
                }
            }
        }
    }
    d
}

pub fn char_poly_eval(domain: &TorusDomain, z: Complex64, w: Complex64) -> Result<Complex64> {
    Ok(CharPoly::new(domain)?.eval(z, w))
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 8 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `Σ log λ_f + 2 · mean log|P|` over the half-shifted `grid × grid` torus points.
pub fn free_energy(domain: &TorusDomain, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::Input("grid must be positive".into()));
    }
    let cp = CharPoly::new(domain)?;
    let node = |k: usize| Complex64::from_polar(1.0, (2 * k + 1) as f64 * std::f64::consts::PI / grid as f64);
    let row = |k: usize| -> f64 {
        let vals: Vec<f64> = (0..grid).map(|l| cp.eval(node(k), node(l)).norm().max(1e-300).ln()).collect();
        pairwise_sum(&vals)
    };
    let rows = map_rows(grid, row);
    let mean = pairwise_sum(&rows) / (grid * grid) as f64;
    let log_lambda: f64 = domain.params.iter().map(|p| p.lambda.ln()).sum();
    Ok(log_lambda + 2.0 * mean)
}

#[cfg(feature = "parallel")]
fn map_rows<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> Vec<f64> {
    use rayon::prelude::*;
    let threads = std::env::var("C2LOOP_THREADS").ok().and_then(|s| s.parse::<usize>().ok());
    match threads.and_then(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().ok()) {
        Some(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        None => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_rows<F: Fn(usize) -> f64>(n: usize, f: F) -> Vec<f64> {
    (0..n).map(f).collect()
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `L(θ) = −∫₀^θ ln|2 sin t| dt` for `θ ∈ [0, π]`.
pub fn lobachevsky(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    // ln(2 sin t) = ln t + ln(2 sin t / t); the first part integrates in closed form
    let smooth = |t: f64| if t == 0.0 { std::f64::consts::LN_2 } else { (2.0 * t.sin() / t).ln() };
    -(theta * theta.ln() - theta + adaptive_simpson(smooth, 0.0, theta, 1e-13))
}

/// Closed form for the integrable square-lattice example.
pub fn lobachevsky_free_energy(theta: f64) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::DomainError(format!("theta = {theta} not in (0, π/2)")));
    }
    let pi = std::f64::consts::PI;
    Ok(2.0 / pi * lobachevsky(theta)
        + 2.0 / pi * lobachevsky(FRAC_PI_2 - theta)
        + 2.0 * theta / pi * theta.tan().ln()
        + (2.0 * theta.cos()).ln())
}

/// Mean of `log|−2 + cos²θ (z + 1/z) + sin²θ (w + 1/w)|` on the half-shifted grid.
pub fn spectral_curve_mean(theta: f64, grid: usize) -> f64 {
    let (s, c) = theta.sin_cos();
    let node = |k: usize| (2 * k + 1) as f64 * std::f64::consts::PI / grid as f64;
    let rows: Vec<f64> = (0..grid)
        .map(|k| {
            let v: Vec<f64> = (0..grid)
                .map(|l| (-2.0 + 2.0 * c * c * node(k).cos() + 2.0 * s * s * node(l).cos()).abs().ln())
                .collect();
            pairwise_sum(&v)
        })
        .collect();
    pairwise_sum(&rows) / (grid * grid) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cube_sphere, octa_domain};
    use crate::quadext::{rat, QuadExt};

    fn half() -> FaceWeights<QuadExt> {
        let h = QuadExt::rational(rat(1, 2));
        let r = QuadExt::sqrt_rat(&rat(1, 2));
        FaceWeights::new(h.clone(), h.clone(), r.clone(), r, h)
    }

    #[test]
    fn checks_and_decomposition() {
        assert!(ff_check(&half()));
        let p = ff_decompose(&half()).unwrap();
        assert_eq!(p.lambda, QuadExt::rational(rat(1, 1)));
        assert!(p.is_normalized());
        assert_eq!(p.weights(), half());
        let ones = FaceWeights::new(rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1));
        assert!(!ff_check(&ones));
        assert!(ff_decompose(&ones).is_err());
        let t = std::f64::consts::FRAC_PI_3;
        let (s, c) = t.sin_cos();
        let w = FaceWeights::new(s * s, c * c, s, c, s * c);
        assert!(ff_check(&w));
        let p = ff_decompose(&w).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-12 && (p.a - s).abs() < 1e-12);
    }

    #[test]
    fn single_city() {
        let g = QuadGraph::grid(1, 1);
        let p = FFParams { lambda: rat(1, 1), a: rat(3, 5), b: rat(4, 5) };
        let gq = build_gq(&g, &[p]);
        assert_eq!((gq.n_cities(), gq.n_roads(), gq.n_dangling()), (1, 0, 4));
        assert_eq!(dimer_partition_bruteforce(&gq).unwrap(), rat(1, 1));
    }

    #[test]
    fn cube_counts_and_correspondence() {
        let g = cube_sphere();
        let w = vec![half(); 6];
        let gq = build_gq(&g, &vec![ff_decompose(&half()).unwrap(); 6]);
        assert_eq!((gq.n_cities(), gq.n_roads(), gq.edges.len()), (6, 12, 36));
        let r = verify_correspondence(&g, &w).unwrap();
        assert!(r.holds, "{:?}", r);
        for e in 0..gq.edges.len() {
            if matches!(gq.edges[e].kind, EdgeKind::Road { .. }) {
                assert_eq!(road_probability(&gq, e).unwrap(), QuadExt::rational(rat(1, 2)));
            }
        }
        assert!(road_probability(&gq, 0).is_err());
    }

    #[test]
    fn kasteleyn_on_cube() {
        let g = cube_sphere();
        let gq = build_gq(&g, &vec![FFParams { lambda: rat(1, 1), a: rat(3, 5), b: rat(4, 5) }; 6]);
        assert_eq!(gq_faces(&g, &gq).len(), 14);
        let k = kasteleyn_orientation(&g, &gq).unwrap();
        assert!(kasteleyn_check(&g, &gq, &k));
    }

    #[test]
    fn lobachevsky_catalan() {
        let catalan = 0.915_965_594_177_219;
        assert!((lobachevsky(std::f64::consts::FRAC_PI_4) - catalan / 2.0).abs() < 1e-10);
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky_free_energy(0.0).is_err());
    }

    #[test]
    fn octa_polynomial_matches_curve() {
        for theta in [0.3, std::f64::consts::FRAC_PI_4, 1.1] {
            let cp = CharPoly::new(&octa_domain(theta)).unwrap();
            let (s, c) = f64::sin_cos(theta);
            for (x, y) in [(0.3, 1.7), (2.0, -0.4), (1.0, 1.0), (-2.5, 0.9)] {
                let (z, w) = (Complex64::from_polar(1.0, x), Complex64::from_polar(1.0, y));
                let p = cp.eval(z, w).norm();
                let curve = (-2.0 + 2.0 * s * s * x.cos() + 2.0 * c * c * y.cos()).abs();
                assert!((p - curve).abs() < 1e-12, "{theta} {x} {y}: {p} vs {curve}");
            }
        }
        let cp = CharPoly::new(&octa_domain(std::f64::consts::FRAC_PI_4)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(cp.eval(one, one).norm() < 1e-12);
        assert!((cp.eval(-one, -one).norm() - 4.0).abs() < 1e-12);
    }
}
