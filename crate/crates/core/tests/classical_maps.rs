use std::f64::consts::PI;

use kharper::classical::{
    canonical_transform, canonical_transform_inverse, dkrm_half_steps, dkrm_resonant_map, equivalence_residual,
    khm_map, trajectory, ClassicalMap, PhasePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PARAMS: [(f64, f64); 3] = [(1.3, 0.7), (1.0, 1.0), (3.9, 3.9)];

fn random_points(seed: u64, n: usize) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| PhasePoint::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(-PI..PI))).collect()
}

#[test]
fn dkrm_is_conjugate_to_khm() {
    for (k1, k2) in PARAMS {
        let worst = random_points(1, 100_000).into_iter().map(|pt| equivalence_residual(pt, k1, k2)).fold(0.0, f64::max);
        assert!(worst < 1e-12, "({k1}, {k2}): {worst:e}");
    }
    for pt in random_points(2, 1000) {
        assert_eq!(equivalence_residual(pt, 0.0, 0.0), 0.0);
    }
}

#[test]
fn half_steps_compose_to_closed_form() {
    for (k1, k2) in PARAMS {
        for pt in random_points(3, 100_000) {
            let a = dkrm_half_steps(pt, k1, k2);
            let b = dkrm_resonant_map(pt, k1, k2);
            assert!((a.q - b.q).abs().max((a.p - b.p).abs()) < 1e-12);
        }
    }
}

#[test]
fn transform_round_trip() {
    for pt in random_points(4, 100_000) {
        let back = canonical_transform_inverse(canonical_transform(pt));
        assert!((back.q - pt.q).abs() < 1e-15 && (back.p - pt.p).abs() < 1e-15);
    }
}

#[test]
fn zero_kicks_are_identity() {
    for pt in random_points(5, 1000) {
        assert_eq!(khm_map(pt, 0.0, 0.0), pt);
    }
}

#[test]
fn jacobians_match_finite_differences() {
    let h = 1e-6;
    let maps = [
        ClassicalMap::Khm { k: 1.3, l: 0.7 },
        ClassicalMap::Khm { k: 3.9, l: 3.9 },
        ClassicalMap::DkrmResonant { k1: 1.3, k2: 0.7 },
        ClassicalMap::DkrmResonant { k1: 3.9, k2: 3.9 },
    ];
    for map in maps {
        for pt in random_points(6, 2000) {
            let j = map.jacobian(pt);
            let plus_q = map.apply(PhasePoint::new(pt.q + h, pt.p));
            let minus_q = map.apply(PhasePoint::new(pt.q - h, pt.p));
            let plus_p = map.apply(PhasePoint::new(pt.q, pt.p + h));
            let minus_p = map.apply(PhasePoint::new(pt.q, pt.p - h));
            let fd = [
                [(plus_q.q - minus_q.q) / (2.0 * h), (plus_p.q - minus_p.q) / (2.0 * h)],
                [(plus_q.p - minus_q.p) / (2.0 * h), (plus_p.p - minus_p.p) / (2.0 * h)],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    assert!((j[r][c] - fd[r][c]).abs() < 1e-6, "{map:?} at {pt:?}: {j:?} vs {fd:?}");
                }
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert!((det - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn inverse_maps_undo_forward_maps() {
    let maps = [ClassicalMap::Khm { k: 1.3, l: 0.7 }, ClassicalMap::DkrmResonant { k1: 3.9, k2: 3.9 }];
    for map in maps {
        for pt in random_points(7, 10_000) {
            let back = map.inverse(map.apply(pt));
            assert!(back.distance(&pt) < 1e-12);
        }
    }
}

#[test]
fn trajectories_reverse_inside_the_central_island() {
    // K = L = 1: the origin is elliptic (trace 2 - KL = 1), so orbits started
    // near it stay regular and round-off grows only slowly.
    let map = ClassicalMap::Khm { k: 1.0, l: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let pt0 = PhasePoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        for n in [1usize, 10, 100, 1000] {
            let mut pt = pt0;
            for _ in 0..n {
                pt = map.apply(pt);
            }
            for _ in 0..n {
                pt = map.inverse(pt);
            }
            assert!(pt.distance(&pt0) < 1e-9, "n = {n}, start {pt0:?}: {:e}", pt.distance(&pt0));
        }
    }
}

#[test]
fn trajectory_reports_wrapped_iterates() {
    let map = ClassicalMap::DkrmResonant { k1: 1.0, k2: 1.0 };
    let pt0 = PhasePoint::new(1.0, 0.3);
    let t = trajectory(map, pt0, 200);
    assert_eq!(t.len(), 200);
    assert!(t.iter().all(|p| (0.0..2.0 * PI).contains(&p.q)));
    let mut pt = pt0;
    for want in &t {
        pt = map.apply(pt);
        assert!(pt.wrapped().distance(want) < 1e-12);
    }
}
