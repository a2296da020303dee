//! Stepped solids below the corner `(−∞, 0]³` and their boundary surfaces.
//!
//! A solid is stored as the finite set of removed unit cubes `C_p = p + [0,1]³`,
//! `p ≤ −1`. The surface face perpendicular to `e_a` with low corner `q`
//! separates the cube `q − e_a` (inside) from the cube `q` (outside).

use crate::error::{Error, Result};
use crate::laurent::{Reg, RegistryBuilder};
use crate::quadgraph::{Color, QuadGraph, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type P3 = [i64; 3];

pub fn height(p: P3) -> i64 {
    p[0] + p[1] + p[2]
}

pub fn unit(a: usize) -> P3 {
    let mut e = [0; 3];
    e[a] = 1;
    e
}

pub fn add(p: P3, q: P3) -> P3 {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

pub fn sub(p: P3, q: P3) -> P3 {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

pub fn vertex_name(p: P3) -> String {
    format!("g[{},{},{}]", p[0], p[1], p[2])
}

/// `X`, `Y`, `Z` for faces perpendicular to `e_1`, `e_2`, `e_3`.
pub fn face_name(f: FaceKey) -> String {
    let q = f.low;
    format!("{}[{},{},{}]", ["X", "Y", "Z"][f.axis], q[0], q[1], q[2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceKey {
    pub axis: usize,
    pub low: P3,
}

impl FaceKey {
    /// Corners `[x, u, y, v]`, clockwise seen from `(1,1,1)`, starting at the black corner.
    pub fn corners(self) -> [P3; 4] {
        let (b, c) = ((self.axis + 1) % 3, (self.axis + 2) % 3);
        let q = self.low;
        let cyc = [q, add(q, unit(c)), add(add(q, unit(b)), unit(c)), add(q, unit(b))];
        let s = if height(q).rem_euclid(2) == 0 { 0 } else { 1 };
        [cyc[s], cyc[(s + 1) % 4], cyc[(s + 2) % 4], cyc[(s + 3) % 4]]
    }

    pub fn high(self) -> P3 {
        let (b, c) = ((self.axis + 1) % 3, (self.axis + 2) % 3);
        add(add(self.low, unit(b)), unit(c))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SteppedSolid {
    pub removed: BTreeSet<P3>,
}

#[derive(Serialize, Deserialize)]
struct SolidJson {
    removed: Vec<P3>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub r_u: f64,
}

impl SteppedSolid {
    pub fn new<I: IntoIterator<Item = P3>>(removed: I) -> SteppedSolid {
        SteppedSolid { removed: removed.into_iter().collect() }
    }

    pub fn corner() -> SteppedSolid {
        SteppedSolid::default()
    }

    /// All cubes `p ≤ −1` with `h(p) ≥ −n`.
    pub fn corner_slab(n: i64) -> SteppedSolid {
        let mut r = BTreeSet::new();
        for i in -n..=-1 {
            for j in -n..=-1 {
                for k in -n..=-1 {
                    if i + j + k >= -n {
                        r.insert([i, j, k]);
                    }
                }
            }
        }
        SteppedSolid { removed: r }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SteppedSolid> {
        let raw: SolidJson = serde_json::from_value(v.clone())?;
        if let Some(p) = raw.removed.iter().find(|p| p.iter().any(|&x| x > -1)) {
            return Err(Error::Input(format!("cube {p:?} is not in the negative octant")));
        }
        Ok(SteppedSolid::new(raw.removed))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SolidJson { removed: self.removed.iter().copied().collect() }).unwrap()
    }

    pub fn contains_cube(&self, r: P3) -> bool {
        r.iter().all(|&x| x <= -1) && !self.removed.contains(&r)
    }

    pub fn is_complement_monotone(&self) -> bool {
        self.removed.iter().all(|&p| {
            (0..3).all(|a| {
                let q = add(p, unit(a));
                q[a] > -1 || self.removed.contains(&q)
            })
        })
    }

    pub fn is_regular(&self) -> Regularity {
        let mut r: f64 = 0.0;
        for &p in &self.removed {
            for k in 0..8 {
                let c = [p[0] + (k & 1), p[1] + (k >> 1 & 1), p[2] + (k >> 2 & 1)];
                r = r.max(((c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) as f64).sqrt());
            }
        }
        Regularity { regular: self.is_complement_monotone(), r_u: r + 2.0 }
    }

    /// Removed cubes that can be put back: the minimal ones.
    pub fn addable_positions(&self) -> Vec<P3> {
        self.removed
            .iter()
            .copied()
            .filter(|&p| (0..3).all(|a| !self.removed.contains(&sub(p, unit(a)))))
            .collect()
    }

    /// Cubes whose removal keeps the solid monotone.
    pub fn removable_positions(&self, lo: P3) -> Vec<P3> {
        let mut out = Vec::new();
        for i in lo[0]..=-1 {
            for j in lo[1]..=-1 {
                for k in lo[2]..=-1 {
                    let p = [i, j, k];
                    if self.contains_cube(p) && (0..3).all(|a| !self.contains_cube(add(p, unit(a)))) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Removed cubes in the order they are put back: by height, then lexicographically.
    pub fn fill_order(&self) -> Vec<P3> {
        let mut v: Vec<P3> = self.removed.iter().copied().collect();
        v.sort_by_key(|&p| (height(p), p));
        v
    }

    pub fn with_added(&self, p: P3) -> SteppedSolid {
        let mut r = self.removed.clone();
        r.remove(&p);
        SteppedSolid { removed: r }
    }

    pub fn with_removed(&self, p: P3) -> SteppedSolid {
        let mut r = self.removed.clone();
        r.insert(p);
        SteppedSolid { removed: r }
    }

    /// Per-axis minimum over removed cubes (0 when nothing is removed).
    pub fn lower_corner(&self) -> P3 {
        let mut m = [0; 3];
        for p in &self.removed {
            for a in 0..3 {
                m[a] = m[a].min(p[a]);
            }
        }
        m
    }

    pub fn is_surface_face(&self, f: FaceKey) -> bool {
        self.contains_cube(sub(f.low, unit(f.axis))) && !self.contains_cube(f.low)
    }

    /// Surface faces with all four corners in the box `∏ [lo_a, 0]`.
    pub fn faces_in_box(&self, lo: P3) -> Vec<FaceKey> {
        let mut out = Vec::new();
        for axis in 0..3 {
            let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
            for qa in lo[axis]..=0 {
                for qb in lo[b]..=-1 {
                    for qc in lo[c]..=-1 {
                        let mut q = [0; 3];
                        q[axis] = qa;
                        q[b] = qb;
                        q[c] = qc;
                        let f = FaceKey { axis, low: q };
                        if self.is_surface_face(f) {
                            out.push(f);
                        }
                    }
                }
            }
        }
        out.sort_by_key(|f| (height(f.low), f.axis, f.low));
        out
    }
}

/// A finite window of the surface as a quadrangulation with 3D bookkeeping.
#[derive(Clone, Debug)]
pub struct SurfaceGraph {
    pub lo: P3,
    pub quad: QuadGraph,
    pub points: Vec<P3>,
    pub faces: Vec<FaceKey>,
    pub vertex_index: BTreeMap<P3, usize>,
}

impl SurfaceGraph {
    pub fn new(u: &SteppedSolid, lo: P3) -> SurfaceGraph {
        SurfaceGraph::from_face_keys(lo, u.faces_in_box(lo))
    }

    pub fn from_face_keys(lo: P3, faces: Vec<FaceKey>) -> SurfaceGraph {
        let mut vertex_index = BTreeMap::new();
        for f in &faces {
            for c in f.corners() {
                vertex_index.entry(c).or_insert(0);
            }
        }
        let points: Vec<P3> = vertex_index.keys().copied().collect();
        for (i, p) in points.iter().enumerate() {
            vertex_index.insert(*p, i);
        }
        let vertices = points
            .iter()
            .map(|&p| Vertex {
                color: if height(p).rem_euclid(2) == 0 { Color::Black } else { Color::White },
                position: project(p),
            })
            .collect();
        let corners = faces.iter().map(|f| f.corners().iter().map(|c| vertex_index[c]).collect()).collect();
        SurfaceGraph { lo, quad: QuadGraph::from_faces(vertices, corners), points, faces, vertex_index }
    }

    pub fn face_index(&self, f: FaceKey) -> Option<usize> {
        self.faces.iter().position(|&k| k == f)
    }

    /// Vertex variables for every window vertex, one root per window face.
    pub fn registry(&self) -> Result<Reg> {
        let mut b = RegistryBuilder::new();
        for &p in &self.points {
            b.vertex(&vertex_name(p));
        }
        for &f in &self.faces {
            let c = f.corners();
            b.diagonal_root(&face_name(f), &vertex_name(c[0]), &vertex_name(c[2]), &vertex_name(c[1]), &vertex_name(c[3]));
        }
        b.build()
    }
}

/// Planar drawing seen from `(1,1,1)`.
pub fn project(p: P3) -> [f64; 2] {
    [(p[0] - p[2]) as f64, (p[1] - p[2]) as f64]
}

/// The window `[−r, 0]³`; `r` must reach the regularity radius.
pub fn surface_graph(u: &SteppedSolid, window_radius: i64) -> Result<SurfaceGraph> {
    let need = u.is_regular().r_u.ceil() as i64;
    if window_radius < need {
        return Err(Error::WindowTooSmall(window_radius, need));
    }
    Ok(SurfaceGraph::new(u, [-window_radius; 3]))
}

/// Flips the cube with top corner `x` out, or the cube with bottom corner `x` in.
pub fn flip_vertex(u: &SteppedSolid, x: P3) -> Result<SteppedSolid> {
    let below = sub(x, [1, 1, 1]);
    if u.removed.contains(&x) && u.addable_positions().contains(&x) {
        return Ok(u.with_added(x));
    }
    if u.contains_cube(below) && (0..3).all(|a| !u.contains_cube(add(below, unit(a)))) {
        return Ok(u.with_removed(below));
    }
    Err(Error::NotFlippable(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadgraph::validate;

    #[test]
    fn flat_corner_window() {
        let u = SteppedSolid::corner();
        let s = SurfaceGraph::new(&u, [-2; 3]);
        assert_eq!(s.faces.len(), 12);
        assert!(s.points.iter().all(|p| p.contains(&0)));
        let r = validate(&s.quad);
        assert!(r.valid, "{:?}", r.violations);
    }

    #[test]
    fn one_cube() {
        let u = SteppedSolid::new([[-1, -1, -1]]);
        let s = SurfaceGraph::new(&u, u.lower_corner());
        assert_eq!(s.faces.len(), 3);
        assert_eq!(s.points.len(), 7);
        assert!(!s.vertex_index.contains_key(&[0, 0, 0]));
        assert!(validate(&s.quad).valid);
        assert_eq!(u.addable_positions(), vec![[-1, -1, -1]]);
        assert!(SteppedSolid::corner().addable_positions().is_empty());
    }

    #[test]
    fn regularity() {
        assert!(SteppedSolid::corner().is_regular().regular);
        assert_eq!(SteppedSolid::corner().is_regular().r_u, 2.0);
        assert!(!SteppedSolid::new([[-2, -1, -1]]).is_regular().regular);
        let two = SteppedSolid::new([[-1, -1, -1], [-2, -1, -1]]);
        assert!(two.is_regular().regular);
        assert_eq!(two.addable_positions(), vec![[-2, -1, -1]]);
    }

    #[test]
    fn slab_fill_order_heights() {
        let u = SteppedSolid::corner_slab(3);
        let h: Vec<i64> = u.fill_order().iter().map(|&p| height(p)).collect();
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(h[0], -3);
    }

    #[test]
    fn flips() {
        let u0 = SteppedSolid::corner();
        let u1 = flip_vertex(&u0, [0, 0, 0]).unwrap();
        assert_eq!(u1, SteppedSolid::new([[-1, -1, -1]]));
        assert_eq!(flip_vertex(&u1, [-1, -1, -1]).unwrap(), u0);
        assert!(flip_vertex(&u0, [0, -1, -1]).is_err());
    }

    #[test]
    fn surface_radius_guard() {
        let u = SteppedSolid::new([[-1, -1, -1]]);
        assert!(surface_graph(&u, 1).is_err());
        let s = surface_graph(&u, 4).unwrap();
        assert!(validate(&s.quad).valid);
    }
}
