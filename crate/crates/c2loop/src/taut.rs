//! Taut configurations on a finite window of a stepped surface.
//!
//! A window is the surface inside the box `∏ [lo_a, 0]`, one layer larger than
//! the removed region. Outside it every configuration is the reference σ₀, so
//! a configuration is taut when its boundary pairing is σ₀'s.

use crate::error::{Error, Result};
use crate::kashaev::{self, NumericInit, SymbolicState};
use crate::laurent::{int, LaurentPoly, Monomial, Reg};
use crate::loopmodel::{count_loops, strands, LocalConfig, LoopConfig, PathColor};
use crate::quadext::Rat;
use crate::stepped::{height, sub, unit, FaceKey, SteppedSolid, SurfaceGraph, P3};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// σ₀ on a face of the flat corner: blue strands around the two corners that
/// are neither the lowest nor the highest.
pub fn sigma0_face(f: FaceKey) -> LocalConfig {
    if height(f.low).rem_euclid(2) == 0 {
        LocalConfig::new(1, true)
    } else {
        LocalConfig::new(2, true)
    }
}

pub fn sigma0(window: &SurfaceGraph) -> LoopConfig {
    LoopConfig { faces: window.faces.iter().map(|&f| sigma0_face(f)).collect() }
}

type EdgeKey = (P3, P3);

fn edge_key(w: &SurfaceGraph, e: usize) -> EdgeKey {
    let [a, b] = w.quad.edges[e].ends;
    let (pa, pb) = (w.points[a], w.points[b]);
    (pa.min(pb), pa.max(pb))
}

/// A solid with its window, the boundary pairing of σ₀ and a search order.
#[derive(Clone, Debug)]
pub struct TautWindow {
    pub solid: SteppedSolid,
    pub surface: SurfaceGraph,
    /// `partner[e]` for every external edge `e`.
    pub partner: BTreeMap<usize, usize>,
    order: Vec<usize>,
}

impl TautWindow {
    pub fn new(u: &SteppedSolid) -> Result<TautWindow> {
        TautWindow::with_collar(u, 1)
    }

    pub fn with_collar(u: &SteppedSolid, collar: i64) -> Result<TautWindow> {
        if collar < 1 {
            return Err(Error::Input("collar must be at least 1".into()));
        }
        if !u.is_regular().regular {
            return Err(Error::Input("solid is not regular".into()));
        }
        let lo = u.lower_corner().map(|x| x.min(-1) - collar);
        let surface = SurfaceGraph::new(u, lo);
        let flat = SurfaceGraph::new(&SteppedSolid::corner(), lo);
        let s0 = sigma0(&flat);
        let mut flat_pair = BTreeMap::new();
        for s in strands(&flat.quad, &s0) {
            debug_assert!(!s.closed);
            let (a, b) = (edge_key(&flat, s.edges[0]), edge_key(&flat, *s.edges.last().unwrap()));
            flat_pair.insert(a, b);
            flat_pair.insert(b, a);
        }
        let ext = surface.quad.external_edges();
        let by_key: BTreeMap<EdgeKey, usize> = ext.iter().map(|&e| (edge_key(&surface, e), e)).collect();
        if by_key.len() != flat_pair.len() {
            return Err(Error::Input("window boundary differs from the flat corner".into()));
        }
        let mut partner = BTreeMap::new();
        for (k, &e) in &by_key {
            let other = flat_pair.get(k).and_then(|k2| by_key.get(k2));
            match other {
                Some(&o) => partner.insert(e, o),
                None => return Err(Error::Input("window boundary differs from the flat corner".into())),
            };
        }
        let order = search_order(&surface);
        Ok(TautWindow { solid: u.clone(), surface, partner, order })
    }

    pub fn n_faces(&self) -> usize {
        self.surface.faces.len()
    }

    /// Faces touching `x` on the whole surface: window index or the σ₀ picture outside.
    fn star(&self, x: P3) -> Vec<(FaceKey, Option<usize>)> {
        let mut out = Vec::new();
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            for q in [x, sub(x, unit(b)), sub(x, unit(c)), sub(sub(x, unit(b)), unit(c))] {
                let f = FaceKey { axis: a, low: q };
                if self.solid.is_surface_face(f) {
                    out.push((f, self.surface.face_index(f)));
                }
            }
        }
        out
    }

    pub fn config_json(&self, cfg: &LoopConfig) -> serde_json::Value {
        let faces: BTreeMap<String, String> = self
            .surface
            .faces
            .iter()
            .zip(&cfg.faces)
            .map(|(&f, c)| (crate::stepped::face_name(f), c.to_string()))
            .collect();
        serde_json::json!({ "window": { "lo": self.surface.lo }, "faces": faces })
    }

    pub fn config_from_json(&self, v: &serde_json::Value) -> Result<LoopConfig> {
        let map = v["faces"].as_object().ok_or_else(|| Error::Input("missing faces".into()))?;
        let mut faces = Vec::new();
        for &f in &self.surface.faces {
            let name = crate::stepped::face_name(f);
            let s = map.get(&name).and_then(|x| x.as_str()).ok_or_else(|| Error::Input(format!("face {name} missing")))?;
            faces.push(s.parse()?);
        }
        Ok(LoopConfig { faces })
    }
}

// Faces reached breadth-first from the boundary, so that pairings close early.
fn search_order(w: &SurfaceGraph) -> Vec<usize> {
    let q = &w.quad;
    let mut seen = vec![false; q.n_faces()];
    let mut queue = VecDeque::new();
    for e in q.external_edges() {
        let f = q.edges[e].sides[0].0;
        if !seen[f] {
            seen[f] = true;
            queue.push_back(f);
        }
    }
    let mut out = Vec::new();
    while let Some(f) = queue.pop_front() {
        out.push(f);
        for s in 0..4 {
            if let Some((g, _)) = q.neighbor(f, s) {
                if !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    for (f, s) in seen.iter().enumerate() {
        if !s {
            out.push(f);
        }
    }
    out
}

struct Search<'a> {
    tw: &'a TautWindow,
    colors: Vec<Option<PathColor>>,
    other: Vec<usize>,
    external: Vec<bool>,
    cfg: LoopConfig,
}

impl Search<'_> {
    // joins the strand ends at edges a and b; returns undo data or None on a bad pairing
    fn link(&mut self, a: usize, b: usize, undo: &mut Vec<(usize, usize)>) -> bool {
        let (ea, eb) = (self.other[a], self.other[b]);
        if ea == b {
            return true; // closes a loop
        }
        undo.push((ea, self.other[ea]));
        undo.push((eb, self.other[eb]));
        self.other[ea] = eb;
        self.other[eb] = ea;
        if self.external[ea] && self.external[eb] && ea != eb {
            return self.tw.partner.get(&ea) == Some(&eb);
        }
        true
    }

    fn rec(&mut self, k: usize, visit: &mut dyn FnMut(&LoopConfig)) {
        if k == self.tw.order.len() {
            visit(&self.cfg);
            return;
        }
        let f = self.tw.order[k];
        let edges = self.tw.surface.quad.faces[f].edges.clone();
        for c in LocalConfig::ALL {
            let sc = c.side_colors();
            if (0..4).any(|s| matches!(self.colors[edges[s]], Some(x) if x != sc[s])) {
                continue;
            }
            let mut set = Vec::new();
            for s in 0..4 {
                if self.colors[edges[s]].is_none() {
                    self.colors[edges[s]] = Some(sc[s]);
                    set.push(edges[s]);
                }
            }
            let mut undo = Vec::new();
            let mut ok = true;
            for (pair, _) in c.strands() {
                if !self.link(edges[pair[0]], edges[pair[1]], &mut undo) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.cfg.faces[f] = c;
                self.rec(k + 1, visit);
            }
            for (e, v) in undo.into_iter().rev() {
                self.other[e] = v;
            }
            for e in set {
                self.colors[e] = None;
            }
        }
    }
}

/// Visits every taut configuration of the window.
pub fn for_each_taut(tw: &TautWindow, visit: &mut dyn FnMut(&LoopConfig)) {
    let q = &tw.surface.quad;
    let mut colors = vec![None; q.n_edges()];
    let mut external = vec![false; q.n_edges()];
    for e in q.external_edges() {
        colors[e] = Some(PathColor::Blue);
        external[e] = true;
    }
    let mut s = Search {
        tw,
        colors,
        other: (0..q.n_edges()).collect(),
        external,
        cfg: LoopConfig { faces: vec![LocalConfig(0); q.n_faces()] },
    };
    s.rec(0, visit);
}

/// All taut configurations, sorted.
pub fn enumerate_taut(tw: &TautWindow) -> Vec<LoopConfig> {
    let mut out = Vec::new();
    for_each_taut(tw, &mut |c| out.push(c.clone()));
    out.sort();
    out
}

/// Exponent data of one configuration's weight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TautMonomial {
    pub loops: u32,
    /// Nonzero exponents of vertex variables.
    pub vertices: BTreeMap<P3, i32>,
    pub roots: BTreeSet<FaceKey>,
}

// contribution in half-units of a picture to one corner
fn corner_halves(c: LocalConfig, corner: usize) -> i32 {
    let black = corner.is_multiple_of(2);
    match c.row() {
        1 => 2 * black as i32,
        2 => 2 * !black as i32,
        3 => black as i32,
        4 => !black as i32,
        _ => 1,
    }
}

fn picture_at(cfg: &LoopConfig, f: FaceKey, idx: Option<usize>) -> LocalConfig {
    match idx {
        Some(i) => cfg.faces[i],
        None => sigma0_face(f),
    }
}

fn corner_index(f: FaceKey, x: P3) -> usize {
    f.corners().iter().position(|&c| c == x).unwrap()
}

/// `2^{N} ∏ w ∏ g^{−2}` as exponents, over the window and its σ₀ surroundings.
pub fn taut_monomial(tw: &TautWindow, cfg: &LoopConfig) -> Result<TautMonomial> {
    let mut vertices = BTreeMap::new();
    for &x in &tw.surface.points {
        let mut h = -4;
        for (f, idx) in tw.star(x) {
            h += corner_halves(picture_at(cfg, f, idx), corner_index(f, x));
        }
        if h % 2 != 0 {
            return Err(Error::Input(format!("half-integer exponent at {x:?}")));
        }
        if h != 0 {
            vertices.insert(x, h / 2);
        }
    }
    let roots = tw
        .surface
        .faces
        .iter()
        .zip(&cfg.faces)
        .filter(|(_, c)| matches!(c.row(), 3 | 4))
        .map(|(&f, _)| f)
        .collect();
    Ok(TautMonomial { loops: count_loops(&tw.surface.quad, cfg) as u32, vertices, roots })
}

/// Registry shared with the symbolic recurrence on the same window.
pub fn symbolic_state(tw: &TautWindow) -> Result<SymbolicState> {
    SymbolicState::new(tw.surface.clone())
}

pub fn monomial_poly(reg: &Reg, m: &TautMonomial) -> Result<LaurentPoly> {
    let mut exps: Vec<(String, i32)> = m.vertices.iter().map(|(&p, &e)| (crate::stepped::vertex_name(p), e)).collect();
    exps.extend(m.roots.iter().map(|&f| (crate::stepped::face_name(f), 1)));
    let refs: Vec<(&str, i32)> = exps.iter().map(|(n, e)| (n.as_str(), *e)).collect();
    LaurentPoly::monomial(reg, int(1i64 << m.loops), &refs)
}

pub fn taut_weight_symbolic(tw: &TautWindow, reg: &Reg, cfg: &LoopConfig) -> Result<LaurentPoly> {
    monomial_poly(reg, &taut_monomial(tw, cfg)?)
}

pub fn taut_weight_numeric(tw: &TautWindow, cfg: &LoopConfig, init: &NumericInit) -> Result<f64> {
    let m = taut_monomial(tw, cfg)?;
    let mut w = (1u64 << m.loops) as f64;
    for (&p, &e) in &m.vertices {
        w *= init.value(p).powi(e);
    }
    for f in &m.roots {
        let c = f.corners().map(|p| init.value(p));
        w *= (c[0] * c[2] + c[1] * c[3]).sqrt();
    }
    Ok(w)
}

pub fn y_taut_symbolic(tw: &TautWindow, reg: &Reg) -> Result<LaurentPoly> {
    let mut y = LaurentPoly::zero(reg);
    for c in enumerate_taut(tw) {
        y = y.add(&taut_weight_symbolic(tw, reg, &c)?)?;
    }
    Ok(y)
}

pub fn y_taut_numeric(tw: &TautWindow, init: &NumericInit) -> Result<f64> {
    let mut y = 0.0;
    for c in enumerate_taut(tw) {
        y += taut_weight_numeric(tw, &c, init)?;
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Princ2Report {
    pub n_configs: usize,
    pub y_taut: String,
    pub solution: String,
    pub holds: bool,
}

/// Taut sum against the recurrence, symbolically on the window registry.
pub fn verify_princ2_symbolic(u: &SteppedSolid, order: Option<&[P3]>) -> Result<Princ2Report> {
    let tw = TautWindow::new(u)?;
    let st = symbolic_state(&tw)?;
    let reg = st.reg.clone();
    let fill = u.fill_order();
    let sol = kashaev::solve_on(st, order.unwrap_or(&fill), false)?;
    let configs = enumerate_taut(&tw);
    let mut y = LaurentPoly::zero(&reg);
    for c in &configs {
        y = y.add(&taut_weight_symbolic(&tw, &reg, c)?)?;
    }
    Ok(Princ2Report { n_configs: configs.len(), holds: y == sol, y_taut: y.to_string(), solution: sol.to_string() })
}

pub fn verify_princ2_numeric(u: &SteppedSolid, init: &NumericInit) -> Result<(f64, f64, bool)> {
    let tw = TautWindow::new(u)?;
    let y = y_taut_numeric(&tw, init)?;
    let s = kashaev::solve_origin_numeric(u, init, &u.fill_order())?;
    Ok((y, s, (y - s).abs() <= 1e-9 * s.abs().max(1.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnicReport {
    pub n_configs: usize,
    pub n_monomials: usize,
    pub injective: bool,
    pub vertex_exponents_in_range: bool,
    pub root_exponents_binary: bool,
    pub coefficients_are_loop_powers: bool,
    pub reconstruction_round_trips: bool,
    pub coefficients: Vec<u64>,
}

impl UnicReport {
    pub fn all_hold(&self) -> bool {
        self.n_configs == self.n_monomials
            && self.injective
            && self.vertex_exponents_in_range
            && self.root_exponents_binary
            && self.coefficients_are_loop_powers
            && self.reconstruction_round_trips
    }
}

/// Monomials of the recurrence solution against taut configurations.
pub fn verify_unic(u: &SteppedSolid) -> Result<UnicReport> {
    let tw = TautWindow::new(u)?;
    let st = symbolic_state(&tw)?;
    let reg = st.reg.clone();
    let sol = kashaev::solve_on(st, &u.fill_order(), false)?;
    let configs = enumerate_taut(&tw);
    let monos: Vec<TautMonomial> = configs.iter().map(|c| taut_monomial(&tw, c)).collect::<Result<_>>()?;
    let distinct: BTreeSet<(BTreeMap<P3, i32>, BTreeSet<FaceKey>)> =
        monos.iter().map(|m| (m.vertices.clone(), m.roots.clone())).collect();
    let nv = reg.n_vertex();
    let mut vertex_ok = true;
    let mut root_ok = true;
    let mut coeff_ok = true;
    let mut round = true;
    let mut coefficients = Vec::new();
    for (m, c) in sol.terms() {
        vertex_ok &= m.0[..nv].iter().all(|&e| (-2..=4).contains(&e));
        root_ok &= m.0[nv..].iter().all(|&e| e == 0 || e == 1);
        let cu = c.to_integer().to_u64().unwrap_or(0);
        coefficients.push(cu);
        match reconstruct_from_monomial(&tw, &reg, m, c) {
            Ok(cfg) => {
                let tm = taut_monomial(&tw, &cfg)?;
                coeff_ok &= c.is_integer() && cu == 1u64 << tm.loops;
                round &= configs.binary_search(&cfg).is_ok() && monomial_poly(&reg, &tm)?.coefficient(m) == *c;
            }
            Err(_) => {
                round = false;
                coeff_ok = false;
            }
        }
    }
    coefficients.sort();
    Ok(UnicReport {
        n_configs: configs.len(),
        n_monomials: sol.n_terms(),
        injective: distinct.len() == configs.len(),
        vertex_exponents_in_range: vertex_ok,
        root_exponents_binary: root_ok,
        coefficients_are_loop_powers: coeff_ok,
        reconstruction_round_trips: round,
        coefficients,
    })
}

/// Rebuilds the configuration with the given weight, vertex by vertex: a
/// vertex with a single undecided face fixes that face's row from its own
/// exponent and the presence of the face root, and its colors from a decided
/// neighbor.
pub fn reconstruct_from_monomial(tw: &TautWindow, reg: &Reg, m: &Monomial, coeff: &Rat) -> Result<LoopConfig> {
    let w = &tw.surface;
    let nv = reg.n_vertex();
    if m.0.len() != reg.n_vars() || nv != w.points.len() {
        return Err(Error::NotAMonomial("registry does not match the window".into()));
    }
    let target: Vec<i32> = m.0[..nv].iter().map(|&e| 2 * e + 4).collect();
    let root: Vec<bool> = m.0[nv..].iter().map(|&e| e == 1).collect();
    if m.0[nv..].iter().any(|&e| e != 0 && e != 1) {
        return Err(Error::NotAMonomial("root exponent outside {0, 1}".into()));
    }
    let q = &w.quad;
    let mut known: Vec<Option<LocalConfig>> = vec![None; q.n_faces()];
    let mut remaining = q.n_faces();
    while remaining > 0 {
        let mut progress = false;
        for (xi, &x) in w.points.iter().enumerate() {
            let star = tw.star(x);
            let unknown: Vec<(FaceKey, usize)> =
                star.iter().filter_map(|&(f, i)| i.filter(|&i| known[i].is_none()).map(|i| (f, i))).collect();
            if unknown.len() != 1 {
                continue;
            }
            let (fk, fi) = unknown[0];
            let mut h = target[xi];
            for &(f, i) in &star {
                let pic = match i {
                    Some(i) if i == fi => continue,
                    Some(i) => known[i].unwrap(),
                    None => sigma0_face(f),
                };
                h -= corner_halves(pic, corner_index(f, x));
            }
            let ci = corner_index(fk, x);
            let black = ci.is_multiple_of(2);
            let row = match (root[fi], h, black) {
                (true, 1, true) | (true, 0, false) => 3,
                (true, 1, false) | (true, 0, true) => 4,
                (false, 2, true) | (false, 0, false) => 1,
                (false, 2, false) | (false, 0, true) => 2,
                (false, 1, _) => 5,
                _ => return Err(Error::NotAMonomial(format!("exponent {h} in half units at {x:?}"))),
            };
            let color = side_color(tw, &known, fi).ok_or_else(|| Error::Stuck(format!("no decided side at {x:?}")))?;
            let pic = [LocalConfig::new(row, false), LocalConfig::new(row, true)]
                .into_iter()
                .find(|c| c.side_colors()[color.0] == color.1)
                .unwrap();
            known[fi] = Some(pic);
            remaining -= 1;
            progress = true;
        }
        if !progress {
            return Err(Error::Stuck(format!("{remaining} faces undecided")));
        }
    }
    let cfg = LoopConfig { faces: known.into_iter().map(|c| c.unwrap()).collect() };
    if !cfg.is_glued(q) {
        return Err(Error::NotAMonomial("reconstruction is not glued".into()));
    }
    let tm = taut_monomial(tw, &cfg)?;
    if monomial_poly(reg, &tm)?.coefficient(m) != *coeff {
        return Err(Error::NotAMonomial("weight does not reproduce the monomial".into()));
    }
    Ok(cfg)
}

// a side of face f whose color is already fixed, as (side, color)
fn side_color(tw: &TautWindow, known: &[Option<LocalConfig>], f: usize) -> Option<(usize, PathColor)> {
    let q = &tw.surface.quad;
    for s in 0..4 {
        let e = q.faces[f].edges[s];
        match q.edges[e].across(f, s) {
            None => return Some((s, PathColor::Blue)),
            Some((g, t)) => {
                if let Some(c) = known[g] {
                    return Some((s, c.side_colors()[t]));
                }
            }
        }
    }
    None
}

/// Exact sample proportional to the taut weights.
pub fn sample_taut(tw: &TautWindow, init: &NumericInit, seed: u64) -> Result<LoopConfig> {
    let configs = enumerate_taut(tw);
    let weights: Vec<f64> = configs.iter().map(|c| taut_weight_numeric(tw, c, init)).collect::<Result<_>>()?;
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = rng.gen::<f64>() * total;
    for (c, w) in configs.iter().zip(&weights) {
        if r < *w {
            return Ok(c.clone());
        }
        r -= w;
    }
    Ok(configs.last().unwrap().clone())
}

/// Every regular solid with exactly `n` removed cubes.
pub fn solids_with(n: usize) -> Vec<SteppedSolid> {
    let mut level: BTreeSet<BTreeSet<P3>> = BTreeSet::new();
    level.insert(BTreeSet::new());
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for r in &level {
            let u = SteppedSolid { removed: r.clone() };
            for p in u.removable_positions(u.lower_corner().map(|x| x - 1)) {
                let mut r2 = r.clone();
                r2.insert(p);
                next.insert(r2);
            }
        }
        level = next;
    }
    level.into_iter().map(|removed| SteppedSolid { removed }).collect()
}
