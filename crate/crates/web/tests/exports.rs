use cdpp_web::{bessel_density_rs, bessel_matrix_rs, gamma_density_rs, sample_charlier_rs};

#[test]
fn bessel_density_is_a_probability_profile() {
    let d = bessel_density_rs(1.0, &[0.3], -30, 30).unwrap();
    assert_eq!(d.len(), 61);
    assert!(d.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    // far left is filled, far right is empty
    assert!(d[0] > 0.999 && d[60] < 1e-6);
}

#[test]
fn bessel_matrix_matches_density() {
    let m = bessel_matrix_rs(2.0, &[], -3, 3).unwrap();
    let d = bessel_density_rs(2.0, &[], -3, 3).unwrap();
    for i in 0..7 {
        assert!((m[i * 7 + i] - d[i]).abs() < 1e-15);
        for j in 0..7 {
            assert_eq!(m[i * 7 + j], m[j * 7 + i]);
        }
    }
}

#[test]
fn gamma_density_in_unit_interval() {
    for u in [None, Some(0.3)] {
        let d = gamma_density_rs(0.3, 0.4, u, -4, 3).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.iter().all(|&v| (0.0..=1.0).contains(&v)), "{u:?}: {d:?}");
    }
}

#[test]
fn samples_have_n_points_and_repeat() {
    let a = sample_charlier_rs(2.0, 3, &[1.5], 40, 11, 20).unwrap();
    assert_eq!(a.len(), 60);
    assert_eq!(a, sample_charlier_rs(2.0, 3, &[1.5], 40, 11, 20).unwrap());
}

#[test]
fn bad_inputs_are_errors() {
    assert!(bessel_density_rs(1.0, &[1.0], 0, 3).is_err());
    assert!(bessel_density_rs(1.0, &[], 3, 0).is_err());
    assert!(bessel_density_rs(1.0, &[], -100, 100).is_err());
    assert!(gamma_density_rs(0.3, 0.4, Some(0.5), 0, 2).is_err());
}
