use std::f64::consts::PI;

use kharper_web::{butterfly_pairs, diffusion_pairs, portrait_pairs};

#[test]
fn free_butterfly_sits_at_zero() {
    let v = butterfly_pairs("resonant-dkrm", 0.0, 0.0, 6, 4).unwrap();
    assert!(!v.is_empty() && v.len().is_multiple_of(2));
    for pair in v.chunks(2) {
        assert!(pair[0] > 0.0 && pair[0] <= 4.0 * PI + 1e-12);
        assert!(pair[1].abs() < 1e-12);
    }
}

#[test]
fn butterfly_quasienergies_lie_in_the_principal_branch() {
    let v = butterfly_pairs("khm", 1.0, 1.0, 10, 8).unwrap();
    assert!(v.chunks(2).all(|p| p[1] > -PI - 1e-12 && p[1] <= PI + 1e-12));
}

#[test]
fn diffusion_without_kicks_stays_put() {
    let v = diffusion_pairs("khm", 0.0, 0.0, 1.0, 20).unwrap();
    assert_eq!(v.len(), 40);
    for (i, pair) in v.chunks(2).enumerate() {
        assert_eq!(pair[0], (i + 1) as f64);
        assert_eq!(pair[1], 0.0);
    }
}

#[test]
fn first_kick_spreads_by_half_the_strength_squared() {
    // one resonant period with only the first kick: ⟨p²⟩ = K²/2
    let v = diffusion_pairs("resonant-dkrm", 3.0, 0.0, 1.5, 1).unwrap();
    assert!((v[1] - 4.5).abs() < 1e-9, "{}", v[1]);
}

#[test]
fn portrait_layout() {
    let v = portrait_pairs("resonant-dkrm", 1.0, 0.5, 3, 10).unwrap();
    assert_eq!(v.len(), 2 * 3 * 11);
    assert!(v.chunks(2).all(|p| (0.0..2.0 * PI).contains(&p[0])));
}

#[test]
fn bad_requests_are_rejected() {
    assert!(butterfly_pairs("rotor", 1.0, 1.0, 5, 4).is_err());
    assert!(butterfly_pairs("khm", 1.0, 1.0, 0, 4).is_err());
    assert!(butterfly_pairs("khm", 1.0, 1.0, 500, 4).is_err());
    assert!(diffusion_pairs("khm", 1.0, 1.0, -1.0, 5).is_err());
    assert!(diffusion_pairs("khm", 1.0, 1.0, 1.0, 0).is_err());
    assert!(portrait_pairs("khm", 1.0, 1.0, 0, 5).is_err());
    assert!(portrait_pairs("khm", f64::NAN, 1.0, 2, 5).is_err());
}
