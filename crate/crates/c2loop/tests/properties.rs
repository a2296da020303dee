use c2loop::ffdimers::{build_gq, dimer_partition_bruteforce, ff_check, ff_decompose, gauge_transform, FFParams};
use c2loop::fixtures::cube_sphere;
use c2loop::kashaev::{
    duality_check, kashaev_relation_residual, kashaev_roots, kashaev_step, numeric_bottom, G, G1, G12, G123, G13, G2,
    G23, G3,
};
use c2loop::laurent::{LaurentPoly, Reg, RegistryBuilder};
use c2loop::loopmodel::{enumerate_configs, weight, BoundarySpec};
use c2loop::quadext::{rat, QuadExt, Rat};
use c2loop::quadgraph::{phi, validate, FaceWeights, QuadGraph};
use c2loop::stepped::{add, flip_vertex, surface_graph, SteppedSolid};
use proptest::prelude::*;
use std::collections::HashMap;

const VARS: [&str; 3] = ["a", "b", "c"];

fn reg() -> Reg {
    let mut b = RegistryBuilder::new();
    for v in VARS {
        b.vertex(v);
    }
    b.vertex("d").diagonal_root("X", "a", "b", "c", "d");
    b.build().unwrap()
}

type Term = (i64, [i32; 3]);

fn term() -> impl Strategy<Value = Term> {
    (-5i64..=5, [-2i32..=3, -2i32..=3, -2i32..=3])
}

fn poly(reg: &Reg, terms: &[Term]) -> LaurentPoly {
    let mut p = LaurentPoly::zero(reg);
    for (c, e) in terms {
        let exps: Vec<(&str, i32)> = VARS.iter().copied().zip(e.iter().copied()).collect();
        p = p.add(&LaurentPoly::monomial(reg, rat(*c, 1), &exps).unwrap()).unwrap();
    }
    p
}

fn polys() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(term(), 0..5)
}

fn rat_assign() -> HashMap<String, Rat> {
    [("a", rat(2, 3)), ("b", rat(-5, 2)), ("c", rat(7, 1)), ("d", rat(3, 11))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(p in polys(), q in polys(), r in polys()) {
        let reg = reg();
        let (p, q, r) = (poly(&reg, &p), poly(&reg, &q), poly(&reg, &r));
        prop_assert_eq!(p.add(&q).unwrap(), q.add(&p).unwrap());
        prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
        prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
        prop_assert_eq!(
            p.mul(&q.add(&r).unwrap()).unwrap(),
            p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
        );
        prop_assert!(p.sub(&p).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_division_undoes_multiplication(p in polys(), q in prop::collection::vec(term(), 1..4)) {
        let reg = reg();
        let (p, q) = (poly(&reg, &p), poly(&reg, &q));
        prop_assume!(!q.is_zero());
        let prod = p.mul(&q).unwrap();
        prop_assert_eq!(prod.div_exact(&q).unwrap(), p);
    }

    #[test]
    fn rational_evaluation_is_multiplicative(p in polys(), q in polys()) {
        let reg = reg();
        let (p, q) = (poly(&reg, &p), poly(&reg, &q));
        let at = rat_assign();
        let lhs = p.mul(&q).unwrap().eval_rat(&at).unwrap();
        prop_assert_eq!(lhs, p.eval_rat(&at).unwrap() * q.eval_rat(&at).unwrap());
    }

    #[test]
    fn float_evaluation_is_multiplicative(p in polys(), q in polys()) {
        let reg = reg();
        let (p, q) = (poly(&reg, &p), poly(&reg, &q));
        let at: HashMap<String, f64> =
            [("a", 0.7), ("b", 1.3), ("c", 2.1), ("d", 0.4)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let (x, y, z) = (p.eval_f64(&at).unwrap(), q.eval_f64(&at).unwrap(), p.mul(&q).unwrap().eval_f64(&at).unwrap());
        prop_assert!((z - x * y).abs() <= 1e-12 * (1.0 + (x * y).abs()) * 64.0, "{z} vs {}", x * y);
    }

    #[test]
    fn root_products_stay_reduced(p in polys()) {
        let reg = reg();
        let p = poly(&reg, &p);
        let x = LaurentPoly::var(&reg, "X").unwrap();
        let xx = x.mul(&x).unwrap();
        prop_assert_eq!(&xx, &reg.root_square("X").unwrap());
        let px = p.mul(&x).unwrap();
        // reducing once more changes nothing
        prop_assert_eq!(px.mul(&LaurentPoly::one(&reg)).unwrap(), px.clone());
        prop_assert_eq!(px.mul(&x).unwrap(), p.mul(&xx).unwrap());
        prop_assert!(px.terms().all(|(m, _)| px.exponent(m, "X") <= 1));
    }

    #[test]
    fn json_round_trip(p in polys()) {
        let reg = reg();
        let p = poly(&reg, &p);
        let back = LaurentPoly::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), p.to_json());
    }

    #[test]
    fn quadratic_field_axioms(a in -9i64..9, b in -9i64..9, c in -9i64..9, e in -9i64..9, n in 1i64..5) {
        let x = QuadExt::new(rat(a, n), rat(b, 1), 2);
        let y = QuadExt::new(rat(c, 1), rat(e, n), 2);
        let f = |q: &QuadExt| c2loop::quadext::Scalar::to_f64(q);
        prop_assert!((f(&(x.clone() * y.clone())) - f(&x) * f(&y)).abs() < 1e-9 * (1.0 + (f(&x) * f(&y)).abs()));
        if !num_traits::Zero::is_zero(&y) {
            prop_assert_eq!((x.clone() / y.clone()) * y.clone(), x.clone());
        }
        prop_assert_eq!(x.clone() * x.conj(), QuadExt::rational(x.norm()));
    }

    #[test]
    fn phi_is_linear(h in prop::collection::vec(-20i64..20, 16), k in prop::collection::vec(-20i64..20, 16)) {
        let g = QuadGraph::grid(3, 3);
        let to_map = |v: &[i64]| -> HashMap<usize, Rat> { v.iter().enumerate().map(|(i, &x)| (i, rat(x, 1))).collect() };
        let sum: Vec<i64> = h.iter().zip(&k).map(|(a, b)| a + b).collect();
        let (ph, pk, ps) = (phi(&g, &to_map(&h)).unwrap(), phi(&g, &to_map(&k)).unwrap(), phi(&g, &to_map(&sum)).unwrap());
        for f in 0..g.n_faces() {
            prop_assert_eq!(ps[f].clone(), ph[f].clone() + pk[f].clone());
        }
    }

    #[test]
    fn free_fermionic_decomposition(l in 1i64..20, p in 1i64..20, q in 1i64..20) {
        prop_assume!(p < q);
        let t = rat(p, q);
        let one = rat(1, 1);
        let a = (one.clone() - t.clone() * t.clone()) / (one.clone() + t.clone() * t.clone());
        let b = rat(2, 1) * t.clone() / (one.clone() + t.clone() * t);
        let params = FFParams { lambda: rat(l, 3), a, b };
        let w = params.weights();
        prop_assert!(ff_check(&w));
        prop_assert_eq!(ff_decompose(&w).unwrap(), params);
        let bent = FaceWeights { w: [w.w[0].clone() + rat(1, 1), w.w[1].clone(), w.w[2].clone(), w.w[3].clone(), w.w[4].clone()] };
        prop_assert!(!ff_check(&bent));
    }

    #[test]
    fn color_swap_preserves_weight(ws in prop::collection::vec(1i64..9, 5)) {
        let g = QuadGraph::grid(1, 2);
        let w = vec![FaceWeights { w: std::array::from_fn(|i| rat(ws[i], 1)) }; g.n_faces()];
        let configs = enumerate_configs(&g, &BoundarySpec::Free).unwrap();
        for c in &configs {
            let s = c.color_swapped();
            prop_assert!(configs.contains(&s));
            prop_assert_eq!(weight(&g, c, &w, true), weight(&g, &s, &w, true));
        }
    }

    #[test]
    fn gauge_scales_partition_function(gs in prop::collection::vec(1i64..6, 64)) {
        let g = cube_sphere();
        let params = vec![FFParams { lambda: rat(1, 1), a: rat(3, 5), b: rat(4, 5) }; g.n_faces()];
        let gq = build_gq(&g, &params);
        let n = gq.incident().len();
        let gauge: Vec<Rat> = (0..n).map(|i| rat(gs[i % gs.len()], 1 + (i as i64 % 3))).collect();
        let z = dimer_partition_bruteforce(&gq).unwrap();
        let zg = dimer_partition_bruteforce(&gauge_transform(&gq, &gauge)).unwrap();
        let factor = gauge.iter().fold(rat(1, 1), |acc, x| acc * x.clone());
        prop_assert_eq!(zg, z * factor);
    }

    #[test]
    fn kashaev_cube(g in prop::array::uniform7(0.1f64..5.0)) {
        let c = kashaev_step(&numeric_bottom(g)).unwrap();
        let res = kashaev_relation_residual(&c.g).unwrap();
        let scale = c.g.iter().fold(1.0f64, |m, x| m.max(*x)).powi(4);
        prop_assert!(res.abs() <= 1e-9 * scale, "residual {res}");
        prop_assert!(duality_check(&c).unwrap());
        let (lo, hi) = kashaev_roots(&g);
        prop_assert!(lo <= hi);
        prop_assert!((hi - c.g[G123]).abs() <= 1e-9 * hi.abs().max(1.0));
        let [x, y, z] = c.faces;
        let [x1, y2, z3] = c.top;
        let lhs = (x1 * y2 * z3 + c.g[G12] * c.g[G13] * c.g[G23]) / c.g[G123];
        let rhs = (x * y * z + c.g[G1] * c.g[G2] * c.g[G3]) / c.g[G];
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }
}

fn random_solid(steps: &[usize]) -> SteppedSolid {
    let mut u = SteppedSolid::corner();
    for &s in steps {
        let opts = u.removable_positions([-3; 3]);
        if opts.is_empty() {
            break;
        }
        u = u.with_removed(opts[s % opts.len()]);
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stepped_surfaces(steps in prop::collection::vec(0usize..100, 0..=8)) {
        let u = random_solid(&steps);
        prop_assert!(u.is_regular().regular);
        let s = surface_graph(&u, 6).unwrap();
        let v = validate(&s.quad);
        prop_assert!(v.valid, "{:?}", v.violations);
        let addable = u.addable_positions();
        prop_assert_eq!(addable.is_empty(), u.removed.is_empty());
        for p in addable {
            let filled = flip_vertex(&u, p).unwrap();
            prop_assert!(filled.is_regular().regular);
            prop_assert_eq!(flip_vertex(&filled, add(p, [1, 1, 1])).unwrap(), u.clone());
        }
        let order = u.fill_order();
        let mut part = u.clone();
        for p in order {
            part = part.with_added(p);
            prop_assert!(part.is_regular().regular);
        }
        prop_assert!(part.removed.is_empty());
    }
}

#[test]
fn grid_counting_identities() {
    for (n, m) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
        let g = QuadGraph::grid(n, m);
        let c = c2loop::quadgraph::track_census(&g).unwrap();
        assert!(c.all_hold(), "{n}x{m}: {c:?}");
    }
    let _ = [G, G1, G2, G3, G12, G13, G23];
}
