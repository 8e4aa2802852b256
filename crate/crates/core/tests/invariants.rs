use cdpp::christoffel::{deformed_kernel, DeformationSpec, EnsembleSpec};
use cdpp::kernels::{deformed_bessel_kernel, psi, psi_dx, psi_integral, zmeas_deformed_kernel, HalfInt, ZParams};
use cdpp::oracle::partition::{partition_dim, partitions_of_size, syt_count};
use cdpp::oracle::OpeSampler;
use cdpp::orthopoly::WeightFamily;
use cdpp::{PrecisionContext, XReal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: usize = 128;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P).unwrap()
}

fn near(a: &XReal, b: &XReal, tol: f64) -> bool {
    (a - b).abs().to_f64() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn deformed_bessel_is_symmetric_with_diagonal_in_unit_interval(
        alpha in 0.2f64..3.0,
        ut in -4.0f64..4.0,
        x in -6i64..6,
        y in -6i64..6,
    ) {
        prop_assume!((ut - ut.round()).abs() > 0.05);
        let c = ctx();
        let k = deformed_bessel_kernel(&c.real(alpha), &[c.real(ut)], &c).unwrap();
        let kxy = k.eval_f64(x as f64, y as f64, P).unwrap();
        let kyx = k.eval_f64(y as f64, x as f64, P).unwrap();
        prop_assert!(near(&kxy, &kyx, 1e-25));
        let d = k.eval_f64(x as f64, x as f64, P).unwrap().to_f64();
        prop_assert!((-1e-25..=1.0 + 1e-25).contains(&d));
    }

    #[test]
    fn charlier_kernel_trace_is_n(a in 0.3f64..3.0, u in 0.1f64..0.9, n in 1usize..4) {
        let c = ctx();
        let fam = WeightFamily::charlier(c.real(a)).unwrap();
        let spec = EnsembleSpec::new(fam, n, DeformationSpec::new(vec![c.real(u)]).unwrap()).unwrap();
        let k = deformed_kernel(&spec, &c).unwrap();
        let mut tr = XReal::zero(P);
        for x in 0..spec.support_cutoff(P) {
            tr = tr + &k.eval_f64(x as f64, x as f64, P).unwrap();
        }
        prop_assert!((tr.to_f64() - n as f64).abs() < 1e-20);
    }

    #[test]
    fn psi_is_symmetric_in_z_and_zprime(
        re in -0.8f64..0.8,
        im in 0.1f64..1.0,
        xi in 0.1f64..0.8,
        xh in -4i64..4,
        ah in -3i64..3,
    ) {
        let zp = ZParams::principal(re, im, xi, P).unwrap();
        let x = XReal::from_f64(xh as f64 + 0.5, P);
        let a = HalfInt::from_f64(ah as f64 + 0.5).unwrap();
        let l = psi(a, &x, &zp).unwrap();
        let r = psi(a, &x, &zp.swapped()).unwrap();
        prop_assert!((l - r).abs().to_f64() < 1e-25);
    }
}

// 1/Γ(c) vanishes for the leading terms when x + a + 1 <= -1; the series
// must not stop on those zeros
#[test]
fn psi_below_the_pole_row() {
    let c = ctx();
    let zp = ZParams::principal(0.3, 0.4, 0.5, P).unwrap();
    for (x, a) in [(-1.5, -2.5), (-2.5, -1.5), (-3.5, -0.5)] {
        let ah = HalfInt::from_f64(a).unwrap();
        let xr = c.real(x);
        let v = psi(ah, &xr, &zp).unwrap();
        let w = psi_integral(ah, &xr, &zp, None, &c).unwrap();
        assert!(!v.is_zero(), "psi vanished at x={x} a={a}");
        assert!((v.clone() - &w).abs().to_f64() < 1e-25, "x={x} a={a}");

        let h = XReal::one(P).ldexp(-40);
        let d = psi_dx(ah, &xr, &zp).unwrap();
        let fp = psi(ah, &(&xr + &h), &zp).unwrap();
        let fm = psi(ah, &(&xr - &h), &zp).unwrap();
        let fd = (fp - &fm).scale(&(&h + &h).recip());
        assert!((d - &fd).abs().to_f64() < 1e-20, "x={x} a={a}");
    }
}

#[test]
fn zmeasure_kernel_is_real_symmetric_and_bounded() {
    let c = ctx();
    let zp = ZParams::principal(0.3, 0.4, 0.5, P).unwrap();
    let k = zmeas_deformed_kernel(&zp, &[c.real(0.3)], &c).unwrap();
    let pts = [-2.5, -1.5, -0.5, 0.5, 1.5];
    for &x in &pts {
        let d = k.eval_f64(x, x, P).unwrap().to_f64();
        assert!((0.0..=1.0).contains(&d), "K({x},{x}) = {d}");
        for &y in &pts {
            let a = k.eval_f64(x, y, P).unwrap();
            let b = k.eval_f64(y, x, P).unwrap();
            assert!(near(&a, &b, 1e-25));
        }
    }
}

#[test]
fn hook_length_matches_tableaux_count() {
    for n in 1..=9 {
        for lam in partitions_of_size(n).unwrap() {
            assert_eq!(partition_dim(&lam), syt_count(&lam), "{:?}", lam.parts());
        }
    }
}

#[test]
fn sampler_returns_n_distinct_points() {
    let c = ctx();
    let fam = WeightFamily::meixner(c.real(1.5), c.real(0.3)).unwrap();
    let spec = EnsembleSpec::new(fam, 3, DeformationSpec::new(vec![c.real(0.5)]).unwrap()).unwrap();
    let s = OpeSampler::new(&spec, 60, &c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let pts = s.sample(&mut rng).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().all(|&x| x <= 60));
    }
    let tr: f64 = s.diagonal().iter().sum();
    assert!((tr - 3.0).abs() < 1e-9);
}
