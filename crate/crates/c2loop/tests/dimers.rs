use c2loop::ffdimers::{
    build_gq, dimer_partition_bruteforce, free_energy, lobachevsky, road_probability, verify_blue_marginal,
    verify_correspondence, BluePaths, EdgeKind, FFParams,
};
use c2loop::fixtures::{cube_sphere, octa_domain, two_face_sphere};
use c2loop::loopmodel::{enumerate_configs, BoundarySpec};
use c2loop::quadext::{rat, QuadExt, Rat};
use c2loop::quadgraph::{FaceWeights, QuadGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn circle_point(rng: &mut ChaCha8Rng) -> (Rat, Rat) {
    let q = rng.gen_range(2..15);
    let t = rat(rng.gen_range(1..q), q);
    let one = rat(1, 1);
    let d = one.clone() + t.clone() * t.clone();
    ((one - t.clone() * t.clone()) / d.clone(), rat(2, 1) * t / d)
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<FaceWeights<Rat>> {
    (0..n)
        .map(|_| {
            let (a, b) = circle_point(rng);
            FFParams { lambda: rat(rng.gen_range(1..9), rng.gen_range(1..9)), a, b }.weights()
        })
        .collect()
}

fn half() -> FaceWeights<QuadExt> {
    let h = QuadExt::rational(rat(1, 2));
    let r = QuadExt::sqrt_rat(&rat(1, 2));
    FaceWeights::new(h.clone(), h.clone(), r.clone(), r, h)
}

#[test]
fn correspondence_on_spheres() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in [cube_sphere(), two_face_sphere()] {
        let r = verify_correspondence(&g, &vec![half(); g.n_faces()]).unwrap();
        assert!(r.holds);
        for _ in 0..20 {
            let w = random_weights(&mut rng, g.n_faces());
            let r = verify_correspondence(&g, &w).unwrap();
            assert_eq!(r.z_loop, r.lambda_product.clone() * r.z_dimer.clone() * r.z_dimer.clone());
        }
    }
}

#[test]
fn cube_sphere_half_weights_value() {
    let g = cube_sphere();
    let r = verify_correspondence(&g, &vec![half(); 6]).unwrap();
    // (6 + 4√2)² = 68 + 48√2
    let z = QuadExt::new(rat(6, 1), rat(4, 1), 2);
    assert_eq!(r.z_dimer, z);
    assert_eq!(r.z_loop, z.clone() * z);
}

#[test]
fn blue_marginals_on_cube() {
    let g = cube_sphere();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_weights(&mut rng, g.n_faces());
    let mut seen: Vec<BluePaths> =
        enumerate_configs(&g, &BoundarySpec::ClosedSurface).unwrap().iter().map(|c| BluePaths::of(&g, c)).collect();
    seen.sort();
    seen.dedup();
    assert!(seen.len() > 1);
    for b in &seen {
        let r = verify_blue_marginal(&g, &w, b).unwrap();
        assert!(r.holds, "{b:?}: {:?} vs {:?}", r.loop_side, r.dimer_side);
    }
}

#[test]
fn roads_are_half() {
    let g = cube_sphere();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let params: Vec<FFParams<Rat>> = (0..g.n_faces())
            .map(|_| {
                let (a, b) = circle_point(&mut rng);
                FFParams { lambda: rat(1, 1), a, b }
            })
            .collect();
        let gq = build_gq(&g, &params);
        assert!(dimer_partition_bruteforce(&gq).unwrap() > rat(0, 1));
        for e in 0..gq.edges.len() {
            if matches!(gq.edges[e].kind, EdgeKind::Road { .. }) {
                assert_eq!(road_probability(&gq, e).unwrap(), rat(1, 2));
            }
        }
    }
}

#[test]
fn open_grid_has_no_closed_correspondence() {
    let g = QuadGraph::grid(1, 1);
    assert!(verify_correspondence(&g, &[half()]).is_err());
}

/// `2 · (1/4π²) ∬ log|−2 + 2c² cos x + 2s² cos y|`, doing the `x` integral in
/// closed form: the mean of `log|A + B cos x|` is `log((|A| + √(A² − B²))/2)`
/// when `|A| ≥ |B|` and `log(|B|/2)` otherwise.
fn spectral_oracle(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let b = 2.0 * c * c;
    let inner = |y: f64| {
        let a = -2.0 + 2.0 * s * s * y.cos();
        if a.abs() >= b {
            ((a.abs() + (a * a - b * b).sqrt()) / 2.0).ln()
        } else {
            (b / 2.0).ln()
        }
    };
    let n = 200_000;
    let h = 2.0 * PI / n as f64;
    let mean = (0..n).map(|k| inner((k as f64 + 0.5) * h)).sum::<f64>() / n as f64;
    2.0 * mean
}

#[test]
fn free_energy_matches_spectral_integral() {
    for theta in [PI / 6.0, PI / 4.0, PI / 3.0, 0.4] {
        let f = free_energy(&octa_domain(theta), 512).unwrap();
        let want = spectral_oracle(theta);
        assert!((f - want).abs() < 2e-4, "θ = {theta}: {f} vs {want}");
    }
}

#[test]
fn free_energy_converges() {
    let d = octa_domain(PI / 5.0);
    let f: Vec<f64> = [16, 32, 64, 128, 256].iter().map(|&g| free_energy(&d, g).unwrap()).collect();
    let gaps: Vec<f64> = f.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn lobachevsky_series() {
    // L(θ) = ½ Σ sin(2kθ)/k²
    for theta in [0.2, PI / 6.0, 1.0, PI / 3.0, 1.4] {
        let series: f64 = 0.5 * (1..200_000u64).map(|k| (2.0 * k as f64 * theta).sin() / (k * k) as f64).sum::<f64>();
        assert!((lobachevsky(theta) - series).abs() < 1e-6, "{theta}: {} vs {series}", lobachevsky(theta));
    }
    assert!(lobachevsky(PI / 2.0).abs() < 1e-10);
}
