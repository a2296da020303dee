//! Local pictures, gluing, loop tracing and brute-force partition functions.

use crate::error::{Error, Result};
use crate::quadext::Scalar;
use crate::quadgraph::{sides_at_corner, FaceWeights, QuadGraph, LL, LR, U, UL, UR, V, X, Y};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathColor {
    Red,
    Blue,
}

impl PathColor {
    pub fn swap(self) -> PathColor {
        match self {
            PathColor::Red => PathColor::Blue,
            PathColor::Blue => PathColor::Red,
        }
    }
}

/// One of `1a, 1b, …, 5b`, stored as `2 * (row − 1) + variant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalConfig(pub u8);

impl LocalConfig {
    pub const ALL: [LocalConfig; 10] = [
        LocalConfig(0),
        LocalConfig(1),
        LocalConfig(2),
        LocalConfig(3),
        LocalConfig(4),
        LocalConfig(5),
        LocalConfig(6),
        LocalConfig(7),
        LocalConfig(8),
        LocalConfig(9),
    ];

    pub fn new(row: usize, b_variant: bool) -> LocalConfig {
        assert!((1..=5).contains(&row));
        LocalConfig((2 * (row - 1) + b_variant as usize) as u8)
    }

    /// Row `1..=5`, which selects the weight `w_row`.
    pub fn row(self) -> usize {
        self.0 as usize / 2 + 1
    }

    pub fn is_b(self) -> bool {
        self.0 % 2 == 1
    }

    /// The two strands as side pairs, with their colors.
    pub fn strands(self) -> [([usize; 2], PathColor); 2] {
        use PathColor::*;
        let (first, second) = match self.row() {
            1 | 3 => (sides_at_corner(U), sides_at_corner(V)),
            2 | 4 => (sides_at_corner(X), sides_at_corner(Y)),
            _ => ([UL, LR], [UR, LL]),
        };
        let (c1, c2) = match (self.row(), self.is_b()) {
            (1 | 2, false) => (Red, Red),
            (1 | 2, true) => (Blue, Blue),
            (_, false) => (Red, Blue),
            (_, true) => (Blue, Red),
        };
        [(first, c1), (second, c2)]
    }

    pub fn side_colors(self) -> [PathColor; 4] {
        let mut c = [PathColor::Red; 4];
        for (pair, col) in self.strands() {
            c[pair[0]] = col;
            c[pair[1]] = col;
        }
        c
    }

    /// The side joined to `side` inside the face.
    pub fn partner(self, side: usize) -> usize {
        for (pair, _) in self.strands() {
            if pair[0] == side {
                return pair[1];
            }
            if pair[1] == side {
                return pair[0];
            }
        }
        unreachable!()
    }

    pub fn color_swapped(self) -> LocalConfig {
        LocalConfig(self.0 ^ 1)
    }

    pub fn is_crossing(self) -> bool {
        self.row() == 5
    }
}

impl fmt::Display for LocalConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row(), if self.is_b() { 'b' } else { 'a' })
    }
}

impl FromStr for LocalConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if b.len() != 2 || !(b'1'..=b'5').contains(&b[0]) || !(b[1] == b'a' || b[1] == b'b') {
            return Err(Error::Input(format!("unknown local configuration {s:?}")));
        }
        Ok(LocalConfig::new((b[0] - b'0') as usize, b[1] == b'b'))
    }
}

impl Serialize for LocalConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LocalConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One local picture per face, indexed by face id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopConfig {
    pub faces: Vec<LocalConfig>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    faces: BTreeMap<String, LocalConfig>,
}

impl LoopConfig {
    pub fn to_json(&self) -> serde_json::Value {
        let faces = self.faces.iter().enumerate().map(|(i, c)| (i.to_string(), *c)).collect();
        serde_json::to_value(ConfigJson { faces }).unwrap()
    }

    pub fn from_json(v: &serde_json::Value, n_faces: usize) -> Result<LoopConfig> {
        let raw: ConfigJson = serde_json::from_value(v.clone())?;
        let mut faces = vec![None; n_faces];
        for (k, c) in raw.faces {
            let i: usize = k.parse().map_err(|_| Error::Input(format!("bad face id {k}")))?;
            *faces.get_mut(i).ok_or_else(|| Error::Input(format!("face {i} out of range")))? = Some(c);
        }
        let faces = faces
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Input(format!("face {i} missing"))))
            .collect::<Result<_>>()?;
        Ok(LoopConfig { faces })
    }

    pub fn color_swapped(&self) -> LoopConfig {
        LoopConfig { faces: self.faces.iter().map(|c| c.color_swapped()).collect() }
    }

    /// Color of every edge; `None` only for edges absent from all faces.
    pub fn edge_colors(&self, g: &QuadGraph) -> Vec<Option<PathColor>> {
        let mut col = vec![None; g.n_edges()];
        for (f, c) in self.faces.iter().enumerate() {
            for (s, k) in c.side_colors().into_iter().enumerate() {
                col[g.faces[f].edges[s]] = Some(k);
            }
        }
        col
    }

    pub fn is_glued(&self, g: &QuadGraph) -> bool {
        g.edges.iter().all(|e| {
            let cols: Vec<PathColor> =
                e.sides.iter().map(|&(f, s)| self.faces[f].side_colors()[s]).collect();
            cols.windows(2).all(|w| w[0] == w[1])
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BoundarySpec {
    ClosedSurface,
    Free,
    FixedColors { colors: BTreeMap<usize, PathColor> },
    /// Each entry pairs two external edges joined by a path of the given color.
    FixedConnections { pairs: Vec<(usize, usize, PathColor)> },
}

/// A maximal monochromatic strand, as the sequence of edges it runs through.
#[derive(Clone, Debug, PartialEq)]
pub struct Strand {
    pub color: PathColor,
    pub edges: Vec<usize>,
    /// Faces traversed, one entry per passage.
    pub faces: Vec<usize>,
    pub closed: bool,
}

/// Follows pairings through faces. Open strands are listed first, each
/// starting from its lower-numbered external edge.
pub fn strands(g: &QuadGraph, cfg: &LoopConfig) -> Vec<Strand> {
    let mut used = vec![false; g.n_edges()];
    let mut out = Vec::new();
    let run = |e0: usize, used: &mut Vec<bool>| -> Strand {
        let (mut f, mut s) = g.edges[e0].sides[0];
        let color = cfg.faces[f].side_colors()[s];
        used[e0] = true;
        let mut edges = vec![e0];
        let mut faces = Vec::new();
        loop {
            faces.push(f);
            let s2 = cfg.faces[f].partner(s);
            let e = g.faces[f].edges[s2];
            if e == e0 {
                return Strand { color, edges, faces, closed: true };
            }
            used[e] = true;
            edges.push(e);
            match g.edges[e].across(f, s2) {
                Some((f2, t)) => {
                    f = f2;
                    s = t;
                }
                None => return Strand { color, edges, faces, closed: false },
            }
        }
    };
    for e in g.external_edges() {
        if !used[e] {
            out.push(run(e, &mut used));
        }
    }
    for e in 0..g.n_edges() {
        if !used[e] && !g.edges[e].sides.is_empty() {
            out.push(run(e, &mut used));
        }
    }
    out
}

/// Number of closed monochromatic loops; strands reaching the boundary are not counted.
pub fn count_loops(g: &QuadGraph, cfg: &LoopConfig) -> usize {
    strands(g, cfg).iter().filter(|s| s.closed).count()
}

/// `2^N ∏ w_i` with `fugacity`, else the bare product.
pub fn weight<T: Scalar>(g: &QuadGraph, cfg: &LoopConfig, w: &[FaceWeights<T>], fugacity: bool) -> T {
    let mut x = T::one();
    for (f, c) in cfg.faces.iter().enumerate() {
        x = x * w[f].row(c.row()).clone();
    }
    if fugacity {
        for _ in 0..count_loops(g, cfg) {
            x = x * T::from_i64(2);
        }
    }
    x
}

/// Every closed loop crosses strands of the other color an even number of times.
pub fn crossing_parity_check(g: &QuadGraph, cfg: &LoopConfig) -> bool {
    strands(g, cfg)
        .iter()
        .filter(|s| s.closed)
        .all(|s| s.faces.iter().filter(|&&f| cfg.faces[f].is_crossing()).count() % 2 == 0)
}

fn connections_match(g: &QuadGraph, cfg: &LoopConfig, pairs: &[(usize, usize, PathColor)]) -> bool {
    let mut want = BTreeMap::new();
    for &(a, b, c) in pairs {
        want.insert(a, (b, c));
        want.insert(b, (a, c));
    }
    strands(g, cfg).iter().filter(|s| !s.closed).all(|s| {
        let (a, b) = (s.edges[0], *s.edges.last().unwrap());
        want.get(&a) == Some(&(b, s.color))
    })
}

/// Calls `visit` on every gluing-consistent configuration, faces in id order,
/// pictures in `1a..5b` order.
pub fn for_each_config<F: FnMut(&LoopConfig)>(g: &QuadGraph, boundary: &BoundarySpec, mut visit: F) -> Result<()> {
    let mut colors: Vec<Option<PathColor>> = vec![None; g.n_edges()];
    match boundary {
        BoundarySpec::ClosedSurface if !g.is_closed() => {
            return Err(Error::Input("closed_surface boundary on a graph with external edges".into()))
        }
        BoundarySpec::FixedColors { colors: fixed } => {
            for (&e, &c) in fixed {
                if e >= g.n_edges() || !g.edges[e].is_external() {
                    return Err(Error::Input(format!("edge {e} is not external")));
                }
                colors[e] = Some(c);
            }
        }
        BoundarySpec::FixedConnections { pairs } => {
            let mut seen = vec![false; g.n_edges()];
            for &(a, b, c) in pairs {
                for e in [a, b] {
                    if e >= g.n_edges() || !g.edges[e].is_external() || seen[e] {
                        return Err(Error::Input(format!("edge {e} is not a fresh external edge")));
                    }
                    seen[e] = true;
                    colors[e] = Some(c);
                }
            }
            if g.external_edges().iter().any(|&e| !seen[e]) {
                return Err(Error::Input("pairing is not perfect on external edges".into()));
            }
        }
        _ => {}
    }
    let mut cfg = LoopConfig { faces: vec![LocalConfig(0); g.n_faces()] };
    let mut stack_set: Vec<usize> = Vec::new();
    fn rec<F: FnMut(&LoopConfig)>(
        g: &QuadGraph,
        f: usize,
        cfg: &mut LoopConfig,
        colors: &mut Vec<Option<PathColor>>,
        set: &mut Vec<usize>,
        boundary: &BoundarySpec,
        visit: &mut F,
    ) {
        if f == g.n_faces() {
            debug_assert!(cfg.is_glued(g));
            if let BoundarySpec::FixedConnections { pairs } = boundary {
                if !connections_match(g, cfg, pairs) {
                    return;
                }
            }
            visit(cfg);
            return;
        }
        for c in LocalConfig::ALL {
            let mark = set.len();
            let sc = c.side_colors();
            let mut ok = true;
            for (s, &e) in g.faces[f].edges.iter().enumerate() {
                match colors[e] {
                    Some(k) if k != sc[s] => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        colors[e] = Some(sc[s]);
                        set.push(e);
                    }
                }
            }
            if ok {
                cfg.faces[f] = c;
                rec(g, f + 1, cfg, colors, set, boundary, visit);
            }
            for e in set.drain(mark..) {
                colors[e] = None;
            }
        }
    }
    rec(g, 0, &mut cfg, &mut colors, &mut stack_set, boundary, &mut visit);
    Ok(())
}

pub fn enumerate_configs(g: &QuadGraph, boundary: &BoundarySpec) -> Result<Vec<LoopConfig>> {
    let mut out = Vec::new();
    for_each_config(g, boundary, |c| out.push(c.clone()))?;
    Ok(out)
}

pub fn partition_function<T: Scalar>(g: &QuadGraph, w: &[FaceWeights<T>], boundary: &BoundarySpec) -> Result<T> {
    let mut z = T::zero();
    for_each_config(g, boundary, |c| z = z.clone() + weight(g, c, w, true))?;
    Ok(z)
}

/// Sides joined by the `(face, side)` corner strands; used by callers that
/// compare pairings rather than colors.
pub fn pairing_kind(c: LocalConfig) -> usize {
    match c.row() {
        1 | 3 => 0,
        2 | 4 => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadext::{rat, Rat};
    use crate::quadgraph::{Color, Vertex};

    fn two_face_sphere() -> QuadGraph {
        let v = |c| Vertex { color: c, position: [0.0, 0.0] };
        let vs = vec![v(Color::Black), v(Color::White), v(Color::Black), v(Color::White)];
        QuadGraph::from_faces(vs, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]])
    }

    #[test]
    fn names_round_trip() {
        for c in LocalConfig::ALL {
            assert_eq!(c.to_string().parse::<LocalConfig>().unwrap(), c);
        }
        assert!("6a".parse::<LocalConfig>().is_err());
    }

    #[test]
    fn one_face_counts() {
        let g = QuadGraph::grid(1, 1);
        assert_eq!(enumerate_configs(&g, &BoundarySpec::Free).unwrap().len(), 10);
        let w = vec![FaceWeights::new(rat(1, 1), rat(2, 1), rat(3, 1), rat(5, 1), rat(7, 1))];
        assert_eq!(partition_function(&g, &w, &BoundarySpec::Free).unwrap(), rat(36, 1));
        let blue = g.external_edges().into_iter().map(|e| (e, PathColor::Blue)).collect();
        let z = partition_function(&g, &w, &BoundarySpec::FixedColors { colors: blue }).unwrap();
        assert_eq!(z, rat(3, 1));
    }

    #[test]
    fn two_faces_sharing_an_edge() {
        let g = QuadGraph::grid(1, 2);
        assert_eq!(enumerate_configs(&g, &BoundarySpec::Free).unwrap().len(), 50);
    }

    #[test]
    fn two_face_sphere_loops() {
        let g = two_face_sphere();
        let c = LoopConfig { faces: vec!["1a".parse().unwrap(), "1a".parse().unwrap()] };
        assert!(c.is_glued(&g));
        assert_eq!(count_loops(&g, &c), 2);
        for c in enumerate_configs(&g, &BoundarySpec::ClosedSurface).unwrap() {
            assert!(crossing_parity_check(&g, &c));
        }
    }

    #[test]
    fn weight_of_single_picture() {
        let g = QuadGraph::grid(1, 1);
        let w = vec![FaceWeights::new(rat(1, 1), rat(2, 1), rat(3, 1), rat(5, 1), rat(7, 1))];
        let c = LoopConfig { faces: vec!["3a".parse().unwrap()] };
        assert_eq!(weight::<Rat>(&g, &c, &w, true), rat(3, 1));
    }
}
