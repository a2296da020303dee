use c2loop::kashaev::{kashaev_relation_residual, G, G1, G12, G123, G13, G2, G23, G3};
use c2loop::limitshape::{
    beta_p_with_r, cubic_value, curve_svg, dual_curve, export_curve, export_heatmap, heatmap_csv, identity_check,
    intrinsic_residual, lambda_param, partner_root, rho_coeffs, rho_expectation, rho_field, rho_field_with, rho_oracle,
    rs_from_abc, to_plane_2d, y_closed_form, y_recurrence, PlanePoint, RhoCoeffs,
};
use c2loop::stepped::height;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_abc(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn published_numbers() {
    assert_eq!(intrinsic_residual(3.0, 3.0), 0.0);
    assert!((lambda_param(3.0).unwrap() - 3.0).abs() < 1e-12);
    let r = partner_root(0.2).unwrap();
    assert!((r - 130.7).abs() < 0.1, "{r}");
    assert!(intrinsic_residual(0.2, r).abs() < 1e-9 * r * r);
    let p = rs_from_abc(1.0, 1.0, 1.0).unwrap();
    assert!(close(p.s, 10.65685424949238, 1e-12));
    assert!(close(p.d, 10.65685424949238, 1e-12));
}

#[test]
fn lambda_is_symmetric_and_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let r: f64 = rng.gen_range(0.05..50.0);
        let s = partner_root(r).unwrap();
        let (lr, ls) = (lambda_param(r).unwrap(), lambda_param(s).unwrap());
        assert!(close(lr, ls, 1e-9), "{r}: {lr} vs {ls}");
        assert!(lr > 2.0 && lr <= 3.0 + 1e-12);
        assert!(close(partner_root(s).unwrap(), r, 1e-9));
    }
}

#[test]
fn closed_form_matches_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..6 {
        let (a, b, c) = random_abc(&mut rng);
        for n in 0..10u32 {
            let (y, _) = y_closed_form(n, a, b, c).unwrap();
            let rec = y_recurrence(n as i64, a, b, c).unwrap();
            assert!(close(y, rec, 1e-9), "N = {n}: {y} vs {rec}");
        }
    }
}

#[test]
fn closed_form_solves_height_only_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (a, b, c) = random_abc(&mut rng);
        let y = |n: u32| y_closed_form(n, a, b, c).unwrap();
        for n in 0..=12u32 {
            let (y0, x0) = y(n);
            let (y1, y2, y3) = (y(n + 1).0, y(n + 2).0, y(n + 3).0);
            let mut g = [0.0; 8];
            g[G] = y0;
            for i in [G1, G2, G3] {
                g[i] = y1;
            }
            for i in [G12, G13, G23] {
                g[i] = y2;
            }
            g[G123] = y3;
            let res = kashaev_relation_residual(&g).unwrap();
            assert!(res.abs() <= 1e-9 * (y0 * y3).powi(2).max(y1.powi(4)), "N = {n}: residual {res}");
            assert!(close(x0 * x0, y0 * y2 + y1 * y1, 1e-12));
        }
    }
}

#[test]
fn field_matches_symbolic_oracle_at_low_heights() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let (a, b, c) = random_abc(&mut rng);
        let p = rs_from_abc(a, b, c).unwrap();
        let f = rho_field(6, p.r).unwrap();
        for x in f.points().into_iter().filter(|x| (3..=4).contains(&height(*x))) {
            let want = rho_oracle(x, a, b, c).unwrap();
            assert!(close(f.get(x), want, 1e-9), "{x:?} at ({a}, {b}, {c}): {} vs {want}", f.get(x));
        }
    }
}

#[test]
fn unit_corner_value() {
    let want = -(5.0 + 3.0 * 2f64.sqrt()) / 7.0;
    assert!((rho_field(3, 1.0).unwrap().get([1, 1, 1]) - want).abs() < 1e-12);
    assert!((rho_oracle([1, 1, 1], 1.0, 1.0, 1.0).unwrap() - want).abs() < 1e-12);
}

#[test]
fn chain_rule_expectation_equals_log_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let (a, b, c) = random_abc(&mut rng);
        for x in [[1, 1, 1], [2, 1, 1], [1, 2, 1]] {
            let e = rho_expectation(x, a, b, c).unwrap();
            let want = rho_oracle(x, a, b, c).unwrap();
            assert!(close(e.expectation_chain_rule, want, 1e-9), "{x:?}: {} vs {want}", e.expectation_chain_rule);
        }
    }
}

#[test]
fn two_form_identity() {
    let r = identity_check(20, 500, 99).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn printed_beta_prime_destabilises_the_field() {
    let (r, s) = (0.2, partner_root(0.2).unwrap());
    let good = rho_field(40, r).unwrap();
    let co = rho_coeffs(r, s).unwrap();
    let alt = RhoCoeffs { beta_p: beta_p_with_r(r, s), ..co };
    let bad = rho_field_with(40, r, s, alt).unwrap();
    let max = |f: &c2loop::limitshape::RhoField| f.points().iter().map(|&p| f.get(p).abs()).fold(0.0, f64::max);
    assert!(max(&good) < 5.0, "{}", max(&good));
    assert!(max(&bad) > 50.0, "{}", max(&bad));
}

#[test]
fn deep_corners_vanish() {
    let f = rho_field(40, 0.2).unwrap();
    for p in [[40, 0, 0], [0, 40, 0], [0, 0, 40], [38, 1, 1]] {
        assert!(f.get(p).abs() < 1e-6, "{p:?}: {}", f.get(p));
    }
}

/// Discriminant of the cubic form restricted to the line `p · q = 0`; zero
/// exactly when the line is tangent to the curve.
fn tangency_defect(lambda: f64, p: PlanePoint) -> f64 {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let p = p.map(|v| v / n);
    let seed = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |u: [f64; 3], v: [f64; 3]| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let e1 = cross(p, seed);
    let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = e1.map(|v| v / l);
    let e2 = cross(p, e1);
    // F(u e1 + v e2) = a u³ + b u²v + c uv² + d v³
    let f = |u: f64, v: f64| cubic_value(lambda, std::array::from_fn(|i| u * e1[i] + v * e2[i]));
    let (f10, f01, f11, f1m) = (f(1.0, 0.0), f(0.0, 1.0), f(1.0, 1.0), f(1.0, -1.0));
    let (a, d) = (f10, f01);
    let b = (f11 - f1m) / 2.0 - d;
    let c = (f11 + f1m) / 2.0 - a;
    let disc = 18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * a * c.powi(3) - 27.0 * a * a * d * d;
    let scale = [a, b, c, d].iter().fold(0.0f64, |m, v| m.max(v.abs())).powi(4);
    disc / scale.max(1e-300)
}

#[test]
fn dual_curve_points_are_tangent_lines() {
    for lambda in [2.2, 2.5, 2.8, 3.0] {
        let c = dual_curve(lambda, 400).unwrap();
        assert!(!c.outer.is_empty() && !c.inner.is_empty());
        // at λ = 3 the inner branch is the dual point of the line component x + y + z = 0
        let inner: &[PlanePoint] = if lambda == 3.0 { &[] } else { &c.inner };
        for p in c.outer.iter().chain(inner) {
            assert!((p.iter().sum::<f64>() + 1.0).abs() < 1e-12);
            let t = tangency_defect(lambda, *p);
            assert!(t.abs() < 1e-8, "λ = {lambda}, {p:?}: {t}");
        }
    }
}

#[test]
fn dual_curve_has_threefold_symmetry() {
    let c = dual_curve(2.6, 3000).unwrap();
    let pts = &c.outer;
    let d2 = |u: [f64; 2], v: [f64; 2]| (u[0] - v[0]).hypot(u[1] - v[1]);
    let flat: Vec<[f64; 2]> = pts.iter().map(|&p| to_plane_2d(p)).collect();
    let spacing = flat.windows(2).map(|w| d2(w[0], w[1])).fold(0.0, f64::max);
    for &p in pts {
        let q = to_plane_2d([p[1], p[2], p[0]]);
        let near = flat.iter().map(|&f| d2(f, q)).fold(f64::INFINITY, f64::min);
        assert!(near <= spacing, "{p:?}: {near} > {spacing}");
    }
}

#[test]
fn exports_are_deterministic() {
    let dir = std::env::temp_dir().join(format!("c2loop-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = rho_field(12, 0.7).unwrap();
    let c = dual_curve(lambda_param(0.7).unwrap(), 300).unwrap();
    for k in 0..2 {
        export_heatmap(&f, &dir.join(format!("h{k}.csv"))).unwrap();
        export_curve(&c, &dir.join(format!("c{k}.svg"))).unwrap();
    }
    let read = |n: &str| std::fs::read(dir.join(n)).unwrap();
    assert_eq!(read("h0.csv"), read("h1.csv"));
    assert_eq!(read("c0.svg"), read("c1.svg"));
    assert_eq!(read("h0.csv"), heatmap_csv(&rho_field(12, 0.7).unwrap()).into_bytes());
    assert_eq!(read("c0.svg"), curve_svg(&c).into_bytes());
    assert!(heatmap_csv(&f).starts_with("i,j,k,rho\n0,0,0,1\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn domain_errors() {
    assert!(rho_field(2, 1.0).is_err());
    assert!(dual_curve(3.5, 10).is_err());
    assert!(dual_curve(2.0, 10).is_err());
    assert!(rs_from_abc(-1.0, 1.0, 1.0).is_err());
    assert!(partner_root(0.0).is_err());
}
