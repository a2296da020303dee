//! Exact multivariate Laurent polynomials over ℚ with square-root variables.
//!
//! A [`Registry`] fixes an ordered list of vertex variables and of root
//! variables `s`, each with a defining square `s² = q(vertex vars)`. Every
//! [`LaurentPoly`] is kept in canonical form: no zero coefficients and every
//! root exponent in `{0, 1}`.

use crate::error::{Error, Result};
use crate::quadext::{rat_to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// Dense exponent vector: vertex variables first, then root variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Box<[i32]>);

impl Monomial {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }
}

// graded lexicographic: total degree first, then exponents in registry order
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug)]
pub struct Registry {
    vertex_vars: Vec<String>,
    root_vars: Vec<String>,
    root_squares: Vec<Vec<(Monomial, Rat)>>,
    index: HashMap<String, usize>,
}

pub type Reg = Arc<Registry>;

/// Exponent list and coefficient of one term, by variable name.
pub type TermSpec = (Vec<(String, i32)>, Rat);

#[derive(Default)]
pub struct RegistryBuilder {
    vertex_vars: Vec<String>,
    roots: Vec<(String, Vec<TermSpec>)>,
}

impl RegistryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> &mut Self {
        self.vertex_vars.push(name.to_string());
        self
    }

    /// Root variable with `square = Σ coeff · ∏ var^exp` over vertex variables.
    pub fn root(&mut self, name: &str, square: Vec<TermSpec>) -> &mut Self {
        self.roots.push((name.to_string(), square));
        self
    }

    /// Root whose square is `g_a g_b + g_c g_d`.
    pub fn diagonal_root(&mut self, name: &str, a: &str, b: &str, c: &str, d: &str) -> &mut Self {
        let one = Rat::one();
        let t1 = merge_factors(&[(a, 1), (b, 1)]);
        let t2 = merge_factors(&[(c, 1), (d, 1)]);
        self.root(name, vec![(t1, one.clone()), (t2, one)])
    }

    pub fn build(&self) -> Result<Reg> {
        let mut index = HashMap::new();
        for (i, v) in self.vertex_vars.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate variable {v}")));
            }
        }
        let nv = self.vertex_vars.len();
        for (j, (r, _)) in self.roots.iter().enumerate() {
            if index.insert(r.clone(), nv + j).is_some() {
                return Err(Error::Input(format!("duplicate variable {r}")));
            }
        }
        let n = nv + self.roots.len();
        let mut root_squares = Vec::new();
        for (name, sq) in &self.roots {
            let mut terms: BTreeMap<Monomial, Rat> = BTreeMap::new();
            for (factors, c) in sq {
                let mut e = vec![0i32; n];
                for (v, k) in factors {
                    match index.get(v) {
                        Some(&i) if i < nv => e[i] += k,
                        _ => {
                            return Err(Error::Input(format!(
                                "root {name} refers to unknown vertex variable {v}"
                            )))
                        }
                    }
                }
                *terms.entry(Monomial(e.into())).or_insert_with(Rat::zero) += c;
            }
            root_squares.push(terms.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }
        Ok(Arc::new(Registry {
            vertex_vars: self.vertex_vars.clone(),
            root_vars: self.roots.iter().map(|(r, _)| r.clone()).collect(),
            root_squares,
            index,
        }))
    }
}

fn merge_factors(f: &[(&str, i32)]) -> Vec<(String, i32)> {
    let mut out: Vec<(String, i32)> = Vec::new();
    for (v, k) in f {
        if let Some(slot) = out.iter_mut().find(|(w, _)| w == v) {
            slot.1 += k;
        } else {
            out.push((v.to_string(), *k));
        }
    }
    out
}

impl Registry {
    pub fn n_vertex(&self) -> usize {
        self.vertex_vars.len()
    }

    pub fn n_vars(&self) -> usize {
        self.vertex_vars.len() + self.root_vars.len()
    }

    pub fn vertex_vars(&self) -> &[String] {
        &self.vertex_vars
    }

    pub fn root_vars(&self) -> &[String] {
        &self.root_vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        if i < self.vertex_vars.len() {
            &self.vertex_vars[i]
        } else {
            &self.root_vars[i - self.vertex_vars.len()]
        }
    }

    pub fn is_root(&self, i: usize) -> bool {
        i >= self.vertex_vars.len()
    }

    fn unit(&self) -> Monomial {
        Monomial(vec![0; self.n_vars()].into())
    }

    /// Defining square of root variable `name` as a polynomial.
    pub fn root_square(self: &Arc<Self>, name: &str) -> Option<LaurentPoly> {
        let i = self.index_of(name)?;
        if !self.is_root(i) {
            return None;
        }
        let sq = &self.root_squares[i - self.n_vertex()];
        Some(LaurentPoly {
            reg: self.clone(),
            terms: sq.iter().cloned().collect(),
        })
    }
}

#[derive(Clone)]
pub struct LaurentPoly {
    reg: Reg,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl LaurentPoly {
    pub fn zero(reg: &Reg) -> Self {
        LaurentPoly { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(reg: &Reg, c: Rat) -> Self {
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(reg.unit(), c);
        }
        p
    }

    pub fn one(reg: &Reg) -> Self {
        Self::constant(reg, Rat::one())
    }

    pub fn var(reg: &Reg, name: &str) -> Result<Self> {
        let i = reg
            .index_of(name)
            .ok_or_else(|| Error::MissingAssignment(name.to_string()))?;
        let mut e = vec![0; reg.n_vars()];
        e[i] = 1;
        Ok(Self::from_terms(reg, vec![(Monomial(e.into()), Rat::one())]))
    }

    /// Single term `c · ∏ name^exp`; root exponents are reduced.
    pub fn monomial(reg: &Reg, c: Rat, exps: &[(&str, i32)]) -> Result<Self> {
        let mut e = vec![0; reg.n_vars()];
        for (v, k) in exps {
            let i = reg
                .index_of(v)
                .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
            e[i] += k;
        }
        Self::from_raw(reg, vec![(Monomial(e.into()), c)])
    }

    fn from_terms(reg: &Reg, terms: Vec<(Monomial, Rat)>) -> Self {
        let mut map: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Rat::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentPoly { reg: reg.clone(), terms: map }
    }

    /// Builds from terms whose root exponents may be any nonnegative integer.
    pub fn from_raw(reg: &Reg, terms: Vec<(Monomial, Rat)>) -> Result<Self> {
        let mut acc: HashMap<Monomial, Rat> = HashMap::new();
        for (m, c) in terms {
            reduce_into(reg, m, c, &mut acc)?;
        }
        Ok(Self::from_terms(reg, acc.into_iter().collect()))
    }

    pub fn registry(&self) -> &Reg {
        &self.reg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending term order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exponent of `name` in monomial `m` (0 if absent from the registry).
    pub fn exponent(&self, m: &Monomial, name: &str) -> i32 {
        self.reg.index_of(name).map(|i| m.0[i]).unwrap_or(0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.reg, &other.reg) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Ok(LaurentPoly { reg: self.reg.clone(), terms })
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        LaurentPoly {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc: HashMap<Monomial, Rat> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                reduce_into(&self.reg, m1.add(m2), c1 * c2, &mut acc)?;
            }
        }
        Ok(Self::from_terms(&self.reg, acc.into_iter().collect()))
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(&self.reg);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Exact quotient `r` with `r · q = self`.
    pub fn div_exact(&self, q: &Self) -> Result<Self> {
        self.check(q)?;
        if q.is_zero() {
            return Err(Error::DivZero);
        }
        if q.terms.len() == 1 {
            let (mq, cq) = q.terms.iter().next().unwrap();
            let nv = self.reg.n_vertex();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let e = m.sub(mq);
                if e.0[nv..].iter().any(|&x| x < 0) {
                    return Err(Error::NotDivisible(format!(
                        "negative root exponent dividing {} by {}",
                        self, q
                    )));
                }
                terms.push((e, c / cq));
            }
            return Ok(Self::from_terms(&self.reg, terms));
        }
        let nv = self.reg.n_vertex();
        if q.terms.keys().any(|m| m.0[nv..].iter().any(|&x| x != 0)) {
            return Err(Error::NotDivisible("general divisor carries root variables".into()));
        }
        let (lq, lc) = q.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let min_p = self.terms.keys().next().map(|m| m.degree());
        let min_q = q.terms.keys().next().unwrap().degree();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Rat)> = Vec::new();
        let mut steps = 0usize;
        while let Some((lm, lcoef)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            steps += 1;
            if steps > 1_000_000 {
                return Err(Error::NotDivisible(format!("{} by {}", self, q)));
            }
            let t = lm.sub(&lq);
            if t.0[nv..].iter().any(|&x| x < 0) {
                return Err(Error::NotDivisible(format!("{} by {}", self, q)));
            }
            // a quotient term below this degree cannot reach the lowest term of p
            if let Some(mp) = min_p {
                if t.degree() < mp - min_q {
                    return Err(Error::NotDivisible(format!("{} by {}", self, q)));
                }
            }
            let c = lcoef / &lc;
            let tpoly = Self::from_terms(&self.reg, vec![(t.clone(), c.clone())]);
            rem = rem.sub(&tpoly.mul(q)?)?;
            quot.push((t, c));
        }
        Ok(Self::from_terms(&self.reg, quot))
    }

    /// Floating evaluation; roots are the nonnegative square roots of their squares.
    pub fn eval_f64(&self, assign: &HashMap<String, f64>) -> Result<f64> {
        let vals = self.point_values(assign)?;
        Ok(self.eval_at(&vals))
    }

    fn point_values(&self, assign: &HashMap<String, f64>) -> Result<Vec<f64>> {
        let reg = &self.reg;
        let mut vals = Vec::with_capacity(reg.n_vars());
        for v in &reg.vertex_vars {
            let x = *assign
                .get(v)
                .ok_or_else(|| Error::MissingAssignment(v.clone()))?;
            vals.push(x);
        }
        for (j, sq) in reg.root_squares.iter().enumerate() {
            let s: f64 = sq.iter().map(|(m, c)| rat_to_f64(c) * mono_value(m, &vals)).sum();
            if s < 0.0 {
                return Err(Error::NegativeUnderRoot(reg.root_vars[j].clone()));
            }
            vals.push(s.sqrt());
        }
        Ok(vals)
    }

    fn eval_at(&self, vals: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rat_to_f64(c) * mono_value(m, vals))
            .sum()
    }

    /// Exact evaluation at rational points; only valid without root variables.
    pub fn eval_rat(&self, assign: &HashMap<String, Rat>) -> Result<Rat> {
        let reg = &self.reg;
        let nv = reg.n_vertex();
        let mut out = Rat::zero();
        for (m, c) in &self.terms {
            if m.0[nv..].iter().any(|&x| x != 0) {
                return Err(Error::Input("exact evaluation with a root variable present".into()));
            }
            let mut t = c.clone();
            for (i, &e) in m.0[..nv].iter().enumerate() {
                if e != 0 {
                    let x = assign
                        .get(&reg.vertex_vars[i])
                        .ok_or_else(|| Error::MissingAssignment(reg.vertex_vars[i].clone()))?;
                    if x.is_zero() {
                        return Err(Error::DivZero);
                    }
                    t *= pow_rat(x, e);
                }
            }
            out += t;
        }
        Ok(out)
    }

    /// `x · ∂ log p / ∂x` at a point, with the chain rule through root variables.
    pub fn log_derivative_f64(&self, var: &str, assign: &HashMap<String, f64>) -> Result<f64> {
        let reg = &self.reg;
        let nv = reg.n_vertex();
        let vals = self.point_values(assign)?;
        let Some(iv) = reg.index_of(var).filter(|&i| i < nv) else {
            return Ok(0.0);
        };
        // x ∂s/∂x / s = (x ∂q/∂x) / (2 q)
        let root_logd: Vec<f64> = reg
            .root_squares
            .iter()
            .map(|sq| {
                let q: f64 = sq.iter().map(|(m, c)| rat_to_f64(c) * mono_value(m, &vals)).sum();
                let xdq: f64 = sq
                    .iter()
                    .map(|(m, c)| rat_to_f64(c) * m.0[iv] as f64 * mono_value(m, &vals))
                    .sum();
                xdq / (2.0 * q)
            })
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, c) in &self.terms {
            let t = rat_to_f64(c) * mono_value(m, &vals);
            let mut ld = m.0[iv] as f64;
            for (j, r) in root_logd.iter().enumerate() {
                ld += m.0[nv + j] as f64 * r;
            }
            num += t * ld;
            den += t;
        }
        Ok(num / den)
    }

    /// Replaces each variable by a polynomial in a (possibly different) registry.
    /// Root variables must be mapped to polynomials whose square matches.
    pub fn substitute(&self, target: &Reg, images: &[LaurentPoly]) -> Result<LaurentPoly> {
        let reg = &self.reg;
        assert_eq!(images.len(), reg.n_vars());
        let mut out = LaurentPoly::zero(target);
        let mut inverses: HashMap<usize, LaurentPoly> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = LaurentPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&images[i].pow(e as u32)?)?;
                } else if e < 0 {
                    if let std::collections::hash_map::Entry::Vacant(e) = inverses.entry(i) {
                        let img = &images[i];
                        if img.n_terms() != 1 {
                            return Err(Error::NotDivisible(format!(
                                "negative power of non-monomial image for {}",
                                reg.name(i)
                            )));
                        }
                        e.insert(LaurentPoly::one(target).div_exact(img)?);
                    }
                    t = t.mul(&inverses[&i].pow((-e) as u32)?)?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Same polynomial viewed in another registry that contains all used names.
    pub fn rebase(&self, target: &Reg) -> Result<LaurentPoly> {
        let images = (0..self.reg.n_vars())
            .map(|i| LaurentPoly::var(target, self.reg.name(i)))
            .collect::<Result<Vec<_>>>()?;
        self.substitute(target, &images)
    }

    pub fn to_json(&self) -> Value {
        let reg = &self.reg;
        let roots: Vec<Value> = reg
            .root_vars
            .iter()
            .enumerate()
            .map(|(j, r)| {
                json!({"name": r, "square": terms_json(reg, reg.root_squares[j].iter().rev().map(|(m, c)| (m, c)))})
            })
            .collect();
        json!({
            "vars": reg.vertex_vars,
            "roots": roots,
            "terms": terms_json(reg, self.terms.iter().rev()),
        })
    }

    pub fn from_json(v: &Value) -> Result<LaurentPoly> {
        let bad = |s: &str| Error::Input(format!("polynomial JSON: {s}"));
        let vars = v["vars"].as_array().ok_or_else(|| bad("vars"))?;
        let mut b = RegistryBuilder::new();
        for x in vars {
            b.vertex(x.as_str().ok_or_else(|| bad("var name"))?);
        }
        if let Some(roots) = v["roots"].as_array() {
            for r in roots {
                let name = r["name"].as_str().ok_or_else(|| bad("root name"))?;
                let sq = parse_terms(&r["square"])?
                    .into_iter()
                    .map(|(e, c)| (e.into_iter().collect(), c))
                    .collect();
                b.root(name, sq);
            }
        }
        let reg = b.build()?;
        let mut terms = Vec::new();
        for (e, c) in parse_terms(&v["terms"])? {
            let mut m = vec![0; reg.n_vars()];
            for (name, k) in e {
                let i = reg.index_of(&name).ok_or_else(|| bad("unknown variable"))?;
                m[i] += k;
            }
            terms.push((Monomial(m.into()), c));
        }
        LaurentPoly::from_raw(&reg, terms)
    }
}

fn terms_json<'a>(reg: &Registry, it: impl Iterator<Item = (&'a Monomial, &'a Rat)>) -> Value {
    Value::Array(
        it.map(|(m, c)| {
            let mut exps = serde_json::Map::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    exps.insert(reg.name(i).to_string(), json!(e));
                }
            }
            json!({"coeff": c.to_string(), "exps": exps})
        })
        .collect(),
    )
}

fn parse_terms(v: &Value) -> Result<Vec<TermSpec>> {
    let bad = |s: &str| Error::Input(format!("polynomial JSON: {s}"));
    let arr = v.as_array().ok_or_else(|| bad("terms"))?;
    let mut out = Vec::new();
    for t in arr {
        let c: Rat = t["coeff"]
            .as_str()
            .ok_or_else(|| bad("coeff"))?
            .parse()
            .map_err(|_| bad("coeff value"))?;
        let mut e = Vec::new();
        if let Some(obj) = t["exps"].as_object() {
            for (k, x) in obj {
                e.push((k.clone(), x.as_i64().ok_or_else(|| bad("exponent"))? as i32));
            }
        }
        out.push((e, c));
    }
    Ok(out)
}

fn mono_value(m: &Monomial, vals: &[f64]) -> f64 {
    let mut t = 1.0;
    for (i, &e) in m.0.iter().enumerate() {
        if e != 0 {
            t *= vals[i].powi(e);
        }
    }
    t
}

fn pow_rat(x: &Rat, e: i32) -> Rat {
    let mut r = Rat::one();
    for _ in 0..e.unsigned_abs() {
        r *= x;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

/// Accumulates `c · m` after rewriting every root power `s^e` with e ≥ 2.
fn reduce_into(reg: &Registry, m: Monomial, c: Rat, acc: &mut HashMap<Monomial, Rat>) -> Result<()> {
    let nv = reg.n_vertex();
    let mut hit = None;
    for (j, &e) in m.0[nv..].iter().enumerate() {
        if e < 0 {
            return Err(Error::NotDivisible(format!(
                "negative exponent of root {}",
                reg.root_vars[j]
            )));
        }
        if e >= 2 && hit.is_none() {
            hit = Some(j);
        }
    }
    match hit {
        None => {
            *acc.entry(m).or_insert_with(Rat::zero) += c;
            Ok(())
        }
        Some(j) => {
            let mut base = m.0.to_vec();
            base[nv + j] -= 2;
            let base = Monomial(base.into());
            for (sm, sc) in &reg.root_squares[j] {
                reduce_into(reg, base.add(sm), &c * sc, acc)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.reg.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.reg.name(i), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", a, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, o).expect("registry mismatch")
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, o).expect("registry mismatch")
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, o).expect("registry mismatch")
    }
}

pub fn lp_add(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly> {
    p.add(q)
}

pub fn lp_mul(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly> {
    p.mul(q)
}

pub fn lp_div_exact(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly> {
    p.div_exact(q)
}

pub fn lp_eval(p: &LaurentPoly, assign: &HashMap<String, f64>) -> Result<f64> {
    p.eval_f64(assign)
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// g, g1, g2, g3, g12, g13, g23 with X, Y, Z.
    fn cube_reg() -> Reg {
        let mut b = RegistryBuilder::new();
        for v in ["g", "g1", "g2", "g3", "g12", "g13", "g23"] {
            b.vertex(v);
        }
        b.diagonal_root("X", "g", "g23", "g2", "g3");
        b.diagonal_root("Y", "g", "g13", "g1", "g3");
        b.diagonal_root("Z", "g", "g12", "g1", "g2");
        b.build().unwrap()
    }

    fn v(r: &Reg, n: &str) -> LaurentPoly {
        LaurentPoly::var(r, n).unwrap()
    }

    fn ones(r: &Reg) -> HashMap<String, f64> {
        r.vertex_vars().iter().map(|n| (n.clone(), 1.0)).collect()
    }

    #[test]
    fn zero_is_additive_identity() {
        let r = cube_reg();
        let p = &v(&r, "g1") + &v(&r, "g2");
        assert_eq!(&p + &LaurentPoly::zero(&r), p);
    }

    #[test]
    fn cancellation() {
        let r = cube_reg();
        let p = &(&v(&r, "g1") + &v(&r, "g2")) + &(&v(&r, "g1") - &v(&r, "g2"));
        assert_eq!(p, v(&r, "g1").scale(&int(2)));
    }

    #[test]
    fn disjoint_supports() {
        let r = cube_reg();
        let a = LaurentPoly::monomial(&r, int(2), &[("g1", 1), ("g2", 1), ("g3", 1), ("g", -2)]).unwrap();
        let b = LaurentPoly::monomial(&r, int(1), &[("g1", 1), ("g23", 1), ("g", -1)]).unwrap();
        let s = &a + &b;
        let mut cs: Vec<Rat> = s.terms().map(|(_, c)| c.clone()).collect();
        cs.sort();
        assert_eq!(cs, vec![int(1), int(2)]);
    }

    #[test]
    fn root_squares_to_its_definition() {
        let r = cube_reg();
        let x = v(&r, "X");
        let want = &(&v(&r, "g") * &v(&r, "g23")) + &(&v(&r, "g2") * &v(&r, "g3"));
        assert_eq!(&x * &x, want);
    }

    #[test]
    fn xyz_squared() {
        let r = cube_reg();
        let xyz = &(&v(&r, "X") * &v(&r, "Y")) * &v(&r, "Z");
        let sq = |a: &str, b: &str, c: &str, d: &str| &(&v(&r, a) * &v(&r, b)) + &(&v(&r, c) * &v(&r, d));
        let want = &(&sq("g", "g23", "g2", "g3") * &sq("g", "g13", "g1", "g3")) * &sq("g", "g12", "g1", "g2");
        assert_eq!(&xyz * &xyz, want);
    }

    #[test]
    fn unit_divisor() {
        let r = cube_reg();
        let g123 = &LaurentPoly::monomial(&r, int(2), &[("g1", 1), ("g2", 1), ("g3", 1)]).unwrap()
            + &LaurentPoly::monomial(&r, int(2), &[("X", 1), ("Y", 1), ("Z", 1)]).unwrap();
        let g0 = LaurentPoly::monomial(&r, int(1), &[("g", 0)]).unwrap();
        assert_eq!(g123.div_exact(&g0).unwrap(), g123);
    }

    #[test]
    fn monomial_and_common_factor_division() {
        let r = cube_reg();
        let p = LaurentPoly::monomial(&r, int(1), &[("g1", 2), ("g2", 1)]).unwrap();
        assert_eq!(p.div_exact(&v(&r, "g1")).unwrap(), &v(&r, "g1") * &v(&r, "g2"));
        let q = &(&v(&r, "g1") * &v(&r, "g2")) + &(&v(&r, "g1") * &v(&r, "g3"));
        assert_eq!(q.div_exact(&v(&r, "g1")).unwrap(), &v(&r, "g2") + &v(&r, "g3"));
    }

    #[test]
    fn general_division() {
        let r = cube_reg();
        let a = &v(&r, "g1") + &v(&r, "g2").scale(&int(3));
        let b = &(&v(&r, "g") * &v(&r, "g12")) - &LaurentPoly::monomial(&r, int(1), &[("g3", -1)]).unwrap();
        let p = &a * &b;
        assert_eq!(p.div_exact(&b).unwrap(), a);
        let bad = &p + &LaurentPoly::one(&r);
        assert!(matches!(bad.div_exact(&b), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn evaluation_examples() {
        let r = cube_reg();
        let p = LaurentPoly::monomial(&r, int(1), &[("g1", 1), ("g23", 1), ("g", -1)]).unwrap();
        assert_eq!(p.eval_f64(&ones(&r)).unwrap(), 1.0);
        let q = LaurentPoly::monomial(&r, int(2), &[("X", 1), ("Y", 1), ("Z", 1), ("g", -2)]).unwrap();
        assert!((q.eval_f64(&ones(&r)).unwrap() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn negative_root_exponent_is_rejected() {
        let r = cube_reg();
        let one = LaurentPoly::one(&r);
        assert!(matches!(one.div_exact(&v(&r, "X")), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn json_round_trip() {
        let r = cube_reg();
        let p = &LaurentPoly::monomial(&r, int(2), &[("X", 1), ("Y", 1), ("Z", 1), ("g", -2)]).unwrap()
            + &LaurentPoly::monomial(&r, Rat::new(3.into(), 7.into()), &[("g1", 1), ("g", -1)]).unwrap();
        let j = p.to_json();
        let back = LaurentPoly::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
        assert_eq!(back.to_string(), p.to_string());
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let r = cube_reg();
        let p = &LaurentPoly::monomial(&r, int(2), &[("X", 1), ("Y", 1), ("Z", 1), ("g", -2)]).unwrap()
            + &LaurentPoly::monomial(&r, int(1), &[("g1", 1), ("g23", 1), ("g", -1)]).unwrap();
        let mut a: HashMap<String, f64> = ones(&r);
        a.insert("g".into(), 1.3);
        a.insert("g23".into(), 0.7);
        let ld = p.log_derivative_f64("g", &a).unwrap();
        let h = 1e-6;
        let f = |x: f64| {
            let mut b = a.clone();
            b.insert("g".into(), x);
            p.eval_f64(&b).unwrap().ln()
        };
        let fd = 1.3 * (f(1.3 + h) - f(1.3 - h)) / (2.0 * h);
        assert!((ld - fd).abs() < 1e-7, "{ld} vs {fd}");
    }
}
