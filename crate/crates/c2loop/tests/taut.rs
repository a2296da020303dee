use c2loop::groves::{cube_recurrence_numeric, verify_grove_equality};
use c2loop::kashaev::{
    kashaev_step, numeric_bottom, random_fill_order, solve_origin_numeric, solve_origin_symbolic, NumericInit,
};
use c2loop::stepped::{add, SteppedSolid, P3};
use c2loop::taut::{
    enumerate_taut, sample_taut, solids_with, taut_weight_numeric, verify_princ2_numeric, verify_princ2_symbolic,
    verify_unic, y_taut_numeric, TautWindow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn random_values(tw: &TautWindow, rng: &mut ChaCha8Rng) -> BTreeMap<P3, f64> {
    tw.surface.points.iter().map(|&p| (p, rng.gen_range(1..20) as f64 / rng.gen_range(1..10) as f64)).collect()
}

fn corner(p: P3, m: usize) -> P3 {
    add(p, [(m & 1) as i64, (m >> 1 & 1) as i64, (m >> 2 & 1) as i64])
}

#[test]
fn one_cube_by_hand() {
    let u = SteppedSolid::new([[-1, -1, -1]]);
    let want = 5.0 + 4.0 * 2f64.sqrt();
    let got = solve_origin_numeric(&u, &NumericInit::Uniform(1.0), &u.fill_order()).unwrap();
    assert!((got - want).abs() < 1e-12);
    let tw = TautWindow::new(&u).unwrap();
    assert_eq!(enumerate_taut(&tw).len(), 5);
    assert!((y_taut_numeric(&tw, &NumericInit::Uniform(1.0)).unwrap() - want).abs() < 1e-12);

    // generic values: (g₁g₂₃ + g₂g₁₃ + g₃g₁₂)/g + 2g₁g₂g₃/g² + 2XYZ/g²
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let vals = random_values(&tw, &mut rng);
    let g = |m: usize| vals[&corner([-1, -1, -1], m)];
    let face = |a: usize, b: usize, c: usize, d: usize| (g(a) * g(b) + g(c) * g(d)).sqrt();
    let (x, y, z) = (face(0, 6, 2, 4), face(0, 5, 1, 4), face(0, 3, 1, 2));
    let hand = (g(1) * g(6) + g(2) * g(5) + g(4) * g(3)) / g(0)
        + 2.0 * g(1) * g(2) * g(4) / (g(0) * g(0))
        + 2.0 * x * y * z / (g(0) * g(0));
    let init = NumericInit::Values(vals, 1.0);
    assert!((y_taut_numeric(&tw, &init).unwrap() - hand).abs() < 1e-9 * hand);
}

#[test]
fn taut_sum_is_the_solution_up_to_three_cubes() {
    for n in 0..=3 {
        for u in solids_with(n) {
            let r = verify_princ2_symbolic(&u, None).unwrap();
            assert!(r.holds, "{:?}: {} vs {}", u.removed, r.y_taut, r.solution);
        }
    }
}

#[test]
fn numeric_taut_sums_on_two_cubes() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let solids = solids_with(2);
    for k in 0..50 {
        let u = &solids[k % solids.len()];
        let tw = TautWindow::new(u).unwrap();
        let init = NumericInit::Values(random_values(&tw, &mut rng), 1.0);
        let (y, s, ok) = verify_princ2_numeric(u, &init).unwrap();
        assert!(ok, "{:?}: {y} vs {s}", u.removed);
    }
}

#[test]
fn monomials_match_configurations_up_to_four_cubes() {
    for n in 0..=4 {
        for u in solids_with(n) {
            let r = verify_unic(&u).unwrap();
            assert!(r.all_hold(), "{:?}: {r:?}", u.removed);
        }
    }
    let one = verify_unic(&SteppedSolid::new([[-1, -1, -1]])).unwrap();
    assert_eq!(one.coefficients, vec![1, 1, 1, 2, 2]);
}

#[test]
fn fill_orders_agree() {
    for n in 1..=4 {
        for u in solids_with(n) {
            let canon = solve_origin_symbolic(&u, &u.fill_order()).unwrap().to_json();
            for seed in 0..10 {
                let other = solve_origin_symbolic(&u, &random_fill_order(&u, seed)).unwrap();
                assert_eq!(other.to_json(), canon, "{:?} seed {seed}", u.removed);
            }
        }
    }
}

#[test]
fn taut_sum_survives_filling_a_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=3 {
        for u in solids_with(n) {
            let tw = TautWindow::new(&u).unwrap();
            let vals = random_values(&tw, &mut rng);
            let before = y_taut_numeric(&tw, &NumericInit::Values(vals.clone(), 1.0)).unwrap();
            for p in u.addable_positions() {
                let bottom = numeric_bottom(std::array::from_fn(|m| vals[&corner(p, m)]));
                let top = kashaev_step(&bottom).unwrap().g[7];
                let mut vals2 = vals.clone();
                vals2.insert(add(p, [1, 1, 1]), top);
                let filled = u.with_added(p);
                let after = y_taut_numeric(&TautWindow::new(&filled).unwrap(), &NumericInit::Values(vals2, 1.0)).unwrap();
                assert!((after - before).abs() <= 1e-9 * before, "{:?} + {p:?}: {after} vs {before}", u.removed);
            }
        }
    }
}

#[test]
fn groves_up_to_three_cubes() {
    for n in 0..=3 {
        for u in solids_with(n) {
            let r = verify_grove_equality(&u).unwrap();
            assert!(r.all_hold(), "{:?}: {r:?}", u.removed);
        }
    }
    // one cube: g g₁₂₃ = g₁g₂₃ + g₂g₁₃ + g₃g₁₂ gives 3 at all ones
    let u = SteppedSolid::new([[-1, -1, -1]]);
    assert_eq!(cube_recurrence_numeric(&u, &NumericInit::Uniform(1.0)).unwrap(), 3.0);
}

#[test]
fn sampling_frequencies() {
    let u = SteppedSolid::new([[-1, -1, -1]]);
    let tw = TautWindow::new(&u).unwrap();
    let init = NumericInit::Uniform(1.0);
    let configs = enumerate_taut(&tw);
    let w: Vec<f64> = configs.iter().map(|c| taut_weight_numeric(&tw, c, &init).unwrap()).collect();
    let total: f64 = w.iter().sum();
    let n = 4000;
    let mut counts = vec![0usize; configs.len()];
    for seed in 0..n {
        let c = sample_taut(&tw, &init, seed as u64).unwrap();
        counts[configs.iter().position(|x| *x == c).unwrap()] += 1;
    }
    for (k, &c) in counts.iter().enumerate() {
        let p = w[k] / total;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sigma, "config {k}: {c} vs {}", n as f64 * p);
    }
    assert_eq!(sample_taut(&tw, &init, 7).unwrap(), sample_taut(&tw, &init, 7).unwrap());
}
