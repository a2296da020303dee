//! Height-periodic initial data `a, b, c` and the limit shape.
//!
//! `Y_N` is the origin value on the corner slab of depth `N`; by translation
//! this is the taut partition function of the cone below any point of height
//! `N`. The observable `ρ(x)` is the logarithmic derivative of that partition
//! function with respect to the weight at `−x` in the translated frame.

use crate::error::{Error, Result};
use crate::kashaev::{solve_origin_numeric, solve_origin_symbolic, NumericInit};
use crate::laurent::LaurentPoly;
use crate::stepped::{height, vertex_name, SteppedSolid, P3};
use crate::taut::{enumerate_taut, taut_monomial, taut_weight_numeric, TautWindow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub s: f64,
}

pub fn intrinsic_residual(r: f64, s: f64) -> f64 {
    r * r * s * s - 6.0 * r * s - 4.0 * r - 4.0 * s - 3.0
}

fn check_intrinsic(r: f64, s: f64) -> Result<()> {
    let scale = (r * r * s * s).max(6.0 * r * s).max(4.0 * r).max(4.0 * s).max(3.0);
    let res = intrinsic_residual(r, s);
    if res.is_nan() || res.abs() > 1e-9 * scale {
        return Err(Error::IntrinsicViolated(res));
    }
    Ok(())
}

/// Greatest root in `t` of the intrinsic relation with the other variable at `r`.
/// The relation is symmetric, so this maps `R ↦ S` and `S ↦ R`.
pub fn partner_root(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::DomainError(format!("R = {r} must be positive")));
    }
    let p = 6.0 * r + 4.0;
    let q = 4.0 * r + 3.0;
    Ok((p + (p * p + 4.0 * r * r * q).sqrt()) / (2.0 * r * r))
}

pub fn rs_from_abc(a: f64, b: f64, c: f64) -> Result<AbcParams> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || ![a, b, c].iter().all(|x| x.is_finite()) {
        return Err(Error::DomainError(format!("a, b, c must be positive: {a}, {b}, {c}")));
    }
    let d = (2.0 * b.powi(3) + 3.0 * a * b * c + 2.0 * (a * c + b * b).powf(1.5)) / (a * a);
    let r = a * c / (b * b);
    let s = b * d / (c * c);
    check_intrinsic(r, s)?;
    Ok(AbcParams { a, b, c, d, r, s })
}

/// `(Y_N, X_N)` from the closed forms.
pub fn y_closed_form(n: u32, a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let p = rs_from_abc(a, b, c)?;
    Ok((y_at(n as i64, &p), x_at(n as i64, &p)))
}

fn y_at(n: i64, p: &AbcParams) -> f64 {
    let m = n.div_euclid(2) as f64;
    if n % 2 == 0 {
        p.a.powf(1.0 - 2.0 * m) * p.b.powf(2.0 * m) * p.r.powf(m * m) * p.s.powf(m * m - m)
    } else {
        p.a.powf(-2.0 * m) * p.b.powf(2.0 * m + 1.0) * p.r.powf(m * m + m) * p.s.powf(m * m)
    }
}

fn x_at(n: i64, p: &AbcParams) -> f64 {
    if n % 2 == 0 {
        (1.0 + p.r).sqrt() * y_at(n + 1, p)
    } else {
        (1.0 + p.s).sqrt() * y_at(n + 1, p)
    }
}

/// Initial data of period three in height, with `a` at height `−shift`.
pub fn periodic_init(a: f64, b: f64, c: f64, shift: i64) -> NumericInit {
    NumericInit::Periodic([a, b, c], shift)
}

/// `Y_N` from the recurrence on the corner slab.
pub fn y_recurrence(n: i64, a: f64, b: f64, c: f64) -> Result<f64> {
    let u = SteppedSolid::corner_slab(n);
    solve_origin_numeric(&u, &periodic_init(a, b, c, n), &u.fill_order())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub gamma_p: f64,
}

impl RhoCoeffs {
    pub fn theta(&self) -> f64 {
        self.gamma * self.gamma_p
    }

    fn line(&self, even: bool) -> [f64; 3] {
        if even {
            [self.alpha, self.beta, self.gamma]
        } else {
            [self.alpha_p, self.beta_p, self.gamma_p]
        }
    }
}

pub fn rho_coeffs(r: f64, s: f64) -> Result<RhoCoeffs> {
    check_intrinsic(r, s)?;
    let (qr, qs) = ((1.0 + r).sqrt(), (1.0 + s).sqrt());
    Ok(RhoCoeffs {
        alpha: (3.0 + 3.0 * qr - 2.0 * r * s) / (r * s),
        beta: (2.0 + 2.0 * qr + r) / (r * r * s),
        gamma: (1.0 + qr) / (r * s),
        alpha_p: (3.0 + 3.0 * qs - 2.0 * r * s) / (r * s),
        beta_p: (2.0 + 2.0 * qs + s) / (r * s * s),
        gamma_p: (1.0 + qs) / (r * s),
    })
}

/// `(2 + 2√(1+S) + R)/(RS²)`, which differs from `β′` unless `R = S`.
pub fn beta_p_with_r(r: f64, s: f64) -> f64 {
    (2.0 + 2.0 * (1.0 + s).sqrt() + r) / (r * s * s)
}

pub fn rho_coeffs_from_r(r: f64) -> Result<RhoCoeffs> {
    rho_coeffs(r, partner_root(r)?)
}

/// ρ on `ℕ³ ∩ {h ≤ N}`; zero off `ℕ³`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoField {
    pub n: i64,
    pub r: f64,
    pub s: f64,
    pub coeffs: RhoCoeffs,
    #[serde(skip)]
    values: HashMap<P3, f64>,
}

impl RhoField {
    pub fn get(&self, p: P3) -> f64 {
        self.values.get(&p).copied().unwrap_or(0.0)
    }

    /// Points sorted by height then lexicographically.
    pub fn points(&self) -> Vec<P3> {
        let mut v: Vec<P3> = self.values.keys().copied().collect();
        v.sort_by_key(|&p| (height(p), p));
        v
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn predicted(&self, y: P3) -> f64 {
        let x = [y[0] - 1, y[1] - 1, y[2] - 1];
        let [al, be, ga] = self.coeffs.line(height(x).rem_euclid(2) == 0);
        let e = |d: [i64; 3]| self.get([x[0] + d[0], x[1] + d[1], x[2] + d[2]]);
        al * e([0, 0, 0])
            + be * (e([1, 0, 0]) + e([0, 1, 0]) + e([0, 0, 1]))
            + ga * (e([1, 1, 0]) + e([1, 0, 1]) + e([0, 1, 1]))
    }

    /// Largest defect of the linear relations over all points of height ≥ 3.
    pub fn max_relation_defect(&self) -> f64 {
        self.values
            .iter()
            .filter(|(p, _)| height(**p) >= 3)
            .map(|(&p, &v)| (v - self.predicted(p)).abs() / (1.0 + v.abs()))
            .fold(0.0, f64::max)
    }
}

fn simplex_points(n: i64) -> impl Iterator<Item = P3> {
    (0..=n).flat_map(move |h| {
        (0..=h).flat_map(move |i| (0..=h - i).map(move |j| [i, j, h - i - j]))
    })
}

pub fn rho_field(n: i64, r: f64) -> Result<RhoField> {
    let s = partner_root(r)?;
    rho_field_with(n, r, s, rho_coeffs(r, s)?)
}

/// Same fill with explicit coefficients.
pub fn rho_field_with(n: i64, r: f64, s: f64, coeffs: RhoCoeffs) -> Result<RhoField> {
    if n < 3 {
        return Err(Error::DomainError(format!("N = {n} must be at least 3")));
    }
    let mut f = RhoField { n, r, s, coeffs, values: HashMap::new() };
    for p in simplex_points(n) {
        let v = if height(p) < 3 {
            (p == [0, 0, 0]) as i32 as f64
        } else {
            f.predicted(p)
        };
        f.values.insert(p, v);
    }
    Ok(f)
}

/// Exact symbolic solution on a corner slab, for log-derivatives.
pub struct SlabSolution {
    pub n: i64,
    pub poly: LaurentPoly,
}

impl SlabSolution {
    pub fn new(n: i64) -> Result<SlabSolution> {
        let u = SteppedSolid::corner_slab(n);
        let poly = solve_origin_symbolic(&u, &u.fill_order())?;
        Ok(SlabSolution { n, poly })
    }

    fn assignment(&self, a: f64, b: f64, c: f64) -> HashMap<String, f64> {
        let init = periodic_init(a, b, c, self.n);
        let reg = self.poly.registry();
        reg.vertex_vars()
            .iter()
            .map(|name| {
                let inner = name.trim_start_matches("g[").trim_end_matches(']');
                let p: Vec<i64> = inner.split(',').map(|s| s.parse().unwrap()).collect();
                (name.clone(), init.value([p[0], p[1], p[2]]))
            })
            .collect()
    }

    pub fn value(&self, a: f64, b: f64, c: f64) -> Result<f64> {
        self.poly.eval_f64(&self.assignment(a, b, c))
    }

    /// ρ(x) for `h(x) = N`.
    pub fn rho(&self, x: P3, a: f64, b: f64, c: f64) -> Result<f64> {
        if height(x) != self.n {
            return Err(Error::Input(format!("{x:?} is not at height {}", self.n)));
        }
        let var = vertex_name([-x[0], -x[1], -x[2]]);
        self.poly.log_derivative_f64(&var, &self.assignment(a, b, c))
    }
}

/// ρ(x) through the symbolic solution; the delta on heights below 3.
pub fn rho_oracle(x: P3, a: f64, b: f64, c: f64) -> Result<f64> {
    let n = height(x);
    if x.iter().any(|&t| t < 0) || n < 0 {
        return Err(Error::DomainError(format!("{x:?} is not in ℕ³")));
    }
    if n < 3 {
        return Ok((x == [0, 0, 0]) as i32 as f64);
    }
    SlabSolution::new(n)?.rho(x, a, b, c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoExpectation {
    /// `E[n₀]`.
    pub mean_exponent: f64,
    /// `E[Σ ε_f]` over faces at the vertex.
    pub mean_crossings: f64,
    /// `E[Σ ε_f · x ∂ log r_f / ∂x]`, the root contribution by the chain rule.
    pub root_term: f64,
    pub prefactor_fixed: f64,
    pub expectation_fixed: f64,
    pub expectation_chain_rule: f64,
}

/// Expectation over random taut configurations on the slab of depth `h(x)`,
/// tracked at the vertex `−x`. `expectation_fixed` uses `1/(2(1+R))` for every
/// face around the vertex.
pub fn rho_expectation(x: P3, a: f64, b: f64, c: f64) -> Result<RhoExpectation> {
    let n = height(x);
    let u = SteppedSolid::corner_slab(n);
    let tw = TautWindow::new(&u)?;
    let init = periodic_init(a, b, c, n);
    let v = [-x[0], -x[1], -x[2]];
    let r = a * c / (b * b);
    let (mut z, mut e0, mut eps, mut root) = (0.0, 0.0, 0.0, 0.0);
    for cfg in enumerate_taut(&tw) {
        let w = taut_weight_numeric(&tw, &cfg, &init)?;
        let m = taut_monomial(&tw, &cfg)?;
        z += w;
        e0 += w * *m.vertices.get(&v).unwrap_or(&0) as f64;
        for f in &m.roots {
            let cs = f.corners();
            if let Some(i) = cs.iter().position(|&p| p == v) {
                let val = cs.map(|p| init.value(p));
                let diag = val[i] * val[(i + 2) % 4];
                eps += w;
                root += w * diag / (2.0 * (val[0] * val[2] + val[1] * val[3]));
            }
        }
    }
    let pf = 1.0 / (2.0 * (1.0 + r));
    Ok(RhoExpectation {
        mean_exponent: e0 / z,
        mean_crossings: eps / z,
        root_term: root / z,
        prefactor_fixed: pf,
        expectation_fixed: (e0 + pf * eps) / z,
        expectation_chain_rule: (e0 + root) / z,
    })
}

/// Both forms of the generating-function denominator.
pub fn h_denominator(co: &RhoCoeffs, x: f64, y: f64, z: f64) -> (f64, f64) {
    let (e1, e2, e3) = (x + y + z, x * y + x * z + y * z, x * y * z);
    let direct = (co.alpha * e3 + co.gamma * e1) * (co.alpha_p * e3 + co.gamma_p * e1)
        - (1.0 - co.beta * e2) * (1.0 - co.beta_p * e2);
    let th = co.theta();
    let factored = th * (x * x - 1.0) * (y * y - 1.0) * (z * z - 1.0)
        + (1.0 - th) * (x * y - 1.0) * (x * z - 1.0) * (y * z - 1.0);
    (direct, factored)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n_r: usize,
    pub n_points: usize,
    pub max_defect: f64,
    pub holds: bool,
}

/// Compares the two forms at random points for random `R`.
pub fn identity_check(n_r: usize, n_points: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_r {
        let r = 10f64.powf(rng.gen_range(-1.5..1.5));
        let co = rho_coeffs_from_r(r)?;
        for _ in 0..n_points {
            let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let (u, v) = h_denominator(&co, p[0], p[1], p[2]);
            worst = worst.max((u - v).abs() / (1.0 + u.abs().max(v.abs())));
        }
    }
    Ok(IdentityReport { n_r, n_points, max_defect: worst, holds: worst <= 1e-9 })
}

pub fn lambda_param(r: f64) -> Result<f64> {
    let th = rho_coeffs_from_r(r)?.theta();
    Ok(2.0 * (1.0 + 3.0 * th) / (1.0 - th))
}

/// `[x, y, z]` on the plane `x + y + z = −1`.
pub type PlanePoint = [f64; 3];

#[derive(Clone, Debug, Serialize)]
pub struct DualCurve {
    pub lambda: f64,
    pub outer: Vec<PlanePoint>,
    pub inner: Vec<PlanePoint>,
}

const CENTER: PlanePoint = [-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];

/// Coordinates in the plane, centred on `(−1/3, −1/3, −1/3)`.
pub fn to_plane_2d(p: PlanePoint) -> [f64; 2] {
    let q = [p[0] - CENTER[0], p[1] - CENTER[1], p[2] - CENTER[2]];
    [(q[0] - q[1]) / 2f64.sqrt(), (q[0] + q[1] - 2.0 * q[2]) / 6f64.sqrt()]
}

fn cubic_gradient(lambda: f64, p: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = p;
    [
        2.0 * x * y + y * y + 2.0 * x * z + z * z + lambda * y * z,
        x * x + 2.0 * x * y + 2.0 * y * z + z * z + lambda * x * z,
        x * x + y * y + 2.0 * x * z + 2.0 * y * z + lambda * x * y,
    ]
}

pub fn cubic_value(lambda: f64, p: [f64; 3]) -> f64 {
    let [x, y, z] = p;
    x * x * y + x * y * y + x * x * z + x * z * z + y * y * z + y * z * z + lambda * x * y * z
}

/// Tangent planes of the real points of the symmetric cubic, sampled over the
/// chart `Z = 1` with `X = tan φ`.
pub fn dual_curve(lambda: f64, n_points: usize) -> Result<DualCurve> {
    if !(lambda > 2.0 && lambda <= 3.0 + 1e-12) {
        return Err(Error::DomainError(format!("λ = {lambda} outside (2, 3]")));
    }
    let mut branches = [Vec::new(), Vec::new()];
    let n = n_points.max(8);
    for k in 0..n {
        let phi = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let x = phi.tan();
        let (qa, qb, qc) = (x + 1.0, x * x + lambda * x + 1.0, x * x + x);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 || qa.abs() < 1e-10 {
            continue;
        }
        for (bi, s) in [(0usize, 1.0), (1, -1.0)] {
            let y = (-qb + s * disc.sqrt()) / (2.0 * qa);
            let g = cubic_gradient(lambda, [x, y, 1.0]);
            let t: f64 = g.iter().sum();
            if t.abs() < 1e-10 * g.iter().map(|v| v.abs()).fold(1.0, f64::max) {
                continue;
            }
            let p = g.map(|v| -v / t);
            if p.iter().all(|v| v.is_finite()) {
                branches[bi].push(p);
            }
        }
    }
    for b in &mut branches {
        b.sort_by(|p, q| {
            let (u, v) = (to_plane_2d(*p), to_plane_2d(*q));
            u[1].atan2(u[0]).total_cmp(&v[1].atan2(v[0]))
        });
    }
    let [outer, inner] = branches;
    Ok(DualCurve { lambda, outer, inner })
}

pub fn export_heatmap(field: &RhoField, path: &Path) -> Result<()> {
    std::fs::write(path, heatmap_csv(field))?;
    Ok(())
}

pub fn heatmap_csv(field: &RhoField) -> String {
    let mut s = String::from("i,j,k,rho\n");
    for p in field.points() {
        let _ = writeln!(s, "{},{},{},{}", p[0], p[1], p[2], crate::fmt_sig(field.get(p)));
    }
    s
}

pub fn export_curve(curve: &DualCurve, path: &Path) -> Result<()> {
    std::fs::write(path, curve_svg(curve))?;
    Ok(())
}

/// The triangle `x, y, z ≤ 0` and the curve branches, 400 px wide.
pub fn curve_svg(curve: &DualCurve) -> String {
    let scale = 400.0 / 2f64.sqrt();
    let (cx, cy) = (250.0, 250.0);
    let map = |p: PlanePoint| {
        let q = to_plane_2d(p);
        (cx + scale * q[0], cy - scale * q[1])
    };
    let poly = |pts: &[PlanePoint]| {
        let mut s = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = map(p);
            let _ = write!(s, "{}{x:.4},{y:.4}", if i == 0 { "" } else { " " });
        }
        s
    };
    let tri = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="500" height="500" viewBox="0 0 500 500">"#);
    let _ = writeln!(s, r#"<polygon points="{}" fill="none" stroke="black"/>"#, poly(&tri));
    for (pts, color) in [(&curve.outer, "blue"), (&curve.inner, "red")] {
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(s, r#"<polygon points="{}" fill="none" stroke="{color}"/>"#, poly(pts));
    }
    s.push_str("</svg>\n");
    s
}

/// ρ values keyed by point, for JSON output.
pub fn field_map(field: &RhoField) -> BTreeMap<String, f64> {
    field.points().into_iter().map(|p| (format!("{},{},{}", p[0], p[1], p[2]), field.get(p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_data() {
        let p = rs_from_abc(1.0, 1.0, 1.0).unwrap();
        let s = 5.0 + 4.0 * 2f64.sqrt();
        assert!((p.d - s).abs() < 1e-12 && (p.s - s).abs() < 1e-12 && p.r == 1.0);
        assert_eq!(intrinsic_residual(3.0, 3.0), 0.0);
        assert_eq!(intrinsic_residual(1.0, 1.0), -16.0);
        assert!((partner_root(0.2).unwrap() - 130.7).abs() < 0.05);
    }

    #[test]
    fn critical_point() {
        let co = rho_coeffs(3.0, 3.0).unwrap();
        assert!((co.alpha + 1.0).abs() < 1e-14);
        assert!((co.beta - 1.0 / 3.0).abs() < 1e-14 && (co.gamma - 1.0 / 3.0).abs() < 1e-14);
        assert!((lambda_param(3.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(rho_coeffs(1.0, 1.0), Err(Error::IntrinsicViolated(_))));
    }

    #[test]
    fn field_start() {
        let f = rho_field(5, 1.0).unwrap();
        let want = -(5.0 + 3.0 * 2f64.sqrt()) / 7.0;
        assert!((f.get([1, 1, 1]) - want).abs() < 1e-12);
        assert_eq!(f.get([0, 0, 0]), 1.0);
        assert_eq!(f.get([1, 0, 1]), 0.0);
        assert!(f.max_relation_defect() < 1e-12);
    }

    #[test]
    fn circle_at_three() {
        let c = dual_curve(3.0, 720).unwrap();
        for p in &c.outer {
            let q = to_plane_2d(*p);
            assert!((q[0].hypot(q[1]) - 1.0 / 6f64.sqrt()).abs() < 1e-9);
        }
        for p in &c.inner {
            let q = to_plane_2d(*p);
            assert!(q[0].hypot(q[1]) < 1e-6);
        }
    }
}
