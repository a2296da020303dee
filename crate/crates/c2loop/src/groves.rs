//! The loop-free taut sector and cube groves.

use crate::error::{Error, Result};
use crate::kashaev::{NumericInit, Ring, SymbolicState};
use crate::laurent::LaurentPoly;
use crate::loopmodel::{count_loops, LocalConfig, LoopConfig, PathColor};
use crate::stepped::{SteppedSolid, P3};
use crate::taut::{enumerate_taut, symbolic_state, taut_weight_symbolic, TautWindow};
use serde::{Deserialize, Serialize};
use num_integer::Integer;
use std::collections::BTreeMap;

/// Which diagonal of a face a grove uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagonal {
    /// Between the two black corners.
    Black,
    /// Between the two white corners.
    White,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroveConfig {
    pub diagonals: Vec<Diagonal>,
}

pub fn filter_no_loops(tw: &TautWindow, configs: &[LoopConfig]) -> Vec<LoopConfig> {
    configs.iter().filter(|c| count_loops(&tw.surface.quad, c) == 0).cloned().collect()
}

/// Blue strands around the white corners leave the black diagonal free, and
/// the other way round.
pub fn to_grove(tw: &TautWindow, cfg: &LoopConfig) -> Result<GroveConfig> {
    let n = count_loops(&tw.surface.quad, cfg);
    if n > 0 {
        return Err(Error::HasLoops(n));
    }
    let diagonals = cfg
        .faces
        .iter()
        .map(|c| match (c.row(), c.is_b()) {
            (1, true) => Ok(Diagonal::Black),
            (2, true) => Ok(Diagonal::White),
            _ => Err(Error::Input(format!("picture {c} in a loop-free configuration"))),
        })
        .collect::<Result<_>>()?;
    Ok(GroveConfig { diagonals })
}

pub fn from_grove(g: &GroveConfig) -> LoopConfig {
    LoopConfig {
        faces: g
            .diagonals
            .iter()
            .map(|d| match d {
                Diagonal::Black => LocalConfig::new(1, true),
                Diagonal::White => LocalConfig::new(2, true),
            })
            .collect(),
    }
}

pub fn grove_json(tw: &TautWindow, g: &GroveConfig) -> serde_json::Value {
    let m: BTreeMap<String, Diagonal> =
        tw.surface.faces.iter().zip(&g.diagonals).map(|(&f, &d)| (crate::stepped::face_name(f), d)).collect();
    serde_json::json!({ "diagonals": m })
}

/// No cycle among chosen diagonals of either color.
pub fn is_forest(tw: &TautWindow, g: &GroveConfig) -> bool {
    let n = tw.surface.points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (f, d) in g.diagonals.iter().enumerate() {
        let c = &tw.surface.quad.faces[f].corners;
        let (a, b) = match d {
            Diagonal::Black => (c[0], c[2]),
            Diagonal::White => (c[1], c[3]),
        };
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// `g g₁₂₃ = g₁g₂₃ + g₂g₁₃ + g₃g₁₂` along the fill order.
pub fn cube_step<T: Ring>(g: &[T; 7]) -> Result<T> {
    use crate::kashaev::{G, G1, G12, G13, G2, G23, G3};
    let s = g[G1].mul(&g[G23])?.add(&g[G2].mul(&g[G13])?)?.add(&g[G3].mul(&g[G12])?)?;
    let r = s.div(&g[G])?;
    r.guard()?;
    Ok(r)
}

fn propagate_vertices<T: Ring>(order: &[P3], g: &mut BTreeMap<P3, T>) -> Result<()> {
    for &p in order {
        let corner = |m: usize| [p[0] + (m & 1) as i64, p[1] + (m >> 1 & 1) as i64, p[2] + (m >> 2 & 1) as i64];
        let gv: Vec<T> = (0..7)
            .map(|m| g.get(&corner(m)).cloned().ok_or_else(|| Error::Input(format!("no value at {:?}", corner(m)))))
            .collect::<Result<_>>()?;
        let top = cube_step(&gv.try_into().ok().unwrap())?;
        g.insert(corner(7), top);
    }
    Ok(())
}

pub fn cube_recurrence_numeric(u: &SteppedSolid, init: &NumericInit) -> Result<f64> {
    let tw = TautWindow::new(u)?;
    let mut g: BTreeMap<P3, f64> = tw.surface.points.iter().map(|&p| (p, init.value(p))).collect();
    propagate_vertices(&u.fill_order(), &mut g)?;
    g.get(&[0, 0, 0]).copied().ok_or_else(|| Error::Input("origin not reached".into()))
}

pub fn cube_recurrence_symbolic(tw: &TautWindow, st: &SymbolicState) -> Result<LaurentPoly> {
    let mut g = st.g.clone();
    propagate_vertices(&tw.solid.fill_order(), &mut g)?;
    g.get(&[0, 0, 0]).cloned().ok_or_else(|| Error::Input("origin not reached".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroveReport {
    pub n_taut: usize,
    pub n_loop_free: usize,
    pub loop_free_sum: String,
    pub cube_solution: String,
    pub equal: bool,
    /// Monomials of the full taut sum with odd coefficient are exactly the loop-free ones.
    pub parity_matches: bool,
    pub groves_are_forests: bool,
    pub groves_distinct: bool,
}

impl GroveReport {
    pub fn all_hold(&self) -> bool {
        self.equal && self.parity_matches && self.groves_are_forests && self.groves_distinct
    }
}

pub fn verify_grove_equality(u: &SteppedSolid) -> Result<GroveReport> {
    let tw = TautWindow::new(u)?;
    let st = symbolic_state(&tw)?;
    let reg = st.reg.clone();
    let all = enumerate_taut(&tw);
    let free = filter_no_loops(&tw, &all);
    let mut sum0 = LaurentPoly::zero(&reg);
    let mut groves = Vec::new();
    let mut forests = true;
    for c in &free {
        if c.edge_colors(&tw.surface.quad).contains(&Some(PathColor::Red)) {
            forests = false;
        }
        let g = to_grove(&tw, c)?;
        forests &= is_forest(&tw, &g) && from_grove(&g) == *c;
        groves.push(g);
        sum0 = sum0.add(&taut_weight_symbolic(&tw, &reg, c)?)?;
    }
    let n_groves = groves.len();
    groves.sort();
    groves.dedup();
    let mut full = LaurentPoly::zero(&reg);
    for c in &all {
        full = full.add(&taut_weight_symbolic(&tw, &reg, c)?)?;
    }
    let odd: Vec<_> = full.terms().filter(|(_, c)| c.is_integer() && c.numer().is_odd()).map(|(m, _)| m.clone()).collect();
    let free_monos: Vec<_> = sum0.terms().map(|(m, _)| m.clone()).collect();
    let sol = cube_recurrence_symbolic(&tw, &st)?;
    Ok(GroveReport {
        n_taut: all.len(),
        n_loop_free: free.len(),
        equal: sol == sum0,
        loop_free_sum: sum0.to_string(),
        cube_solution: sol.to_string(),
        parity_matches: odd == free_monos,
        groves_are_forests: forests,
        groves_distinct: groves.len() == n_groves,
    })
}
