use std::f64::consts::PI;

use num_complex::Complex64;
use padic_fractal::profiles::{for_each_fraction, Depth, Profile};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn builtins(p: u32) -> Vec<Profile> {
    vec![
        Profile::digit(p).unwrap(),
        Profile::digit_normalized(p).unwrap(),
        Profile::exponential(p).unwrap(),
    ]
}

#[test]
fn eval_examples() {
    assert_eq!(
        Profile::digit(2).unwrap().eval_ratio(1, 2).unwrap(),
        c(1.0, 0.0)
    );
    assert_eq!(
        Profile::digit_normalized(5)
            .unwrap()
            .eval_ratio(3, 5)
            .unwrap(),
        c(0.75, 0.0)
    );
    assert_eq!(
        Profile::exponential(3).unwrap().eval_ratio(0, 1).unwrap(),
        c(0.0, 0.0)
    );
    assert!(Profile::digit(3).unwrap().eval_ratio(1, 2).is_err());
}

#[test]
fn exponential_truncation_reads_first_digit() {
    let e = Profile::exponential(2).unwrap();
    let t = e.truncate(1);
    assert_eq!(t.depth(), Depth::Finite(1));
    // [3/4]_1 = 1/2, and the half turn is (e^{i pi} - 1)/2
    let v = t.eval_ratio(3, 4).unwrap();
    assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    assert!((v - e.eval_ratio(1, 2).unwrap()).norm() < 1e-15);
    let z = e.truncate(0);
    assert_eq!(z.eval_ratio(5, 8).unwrap(), e.phi_zero());
}

#[test]
fn closed_form_constants() {
    for p in [2u32, 3, 5] {
        let dn = Profile::digit_normalized(p).unwrap();
        let nu = dn.nu(1).unwrap();
        assert!(nu.exact);
        assert_eq!(nu.value, 1.0 / (p - 1) as f64);
        assert!((dn.sigma(1).unwrap() - 1.0 / p as f64).abs() < 1e-15);
        let e = Profile::exponential(p).unwrap();
        let want = (PI / p as f64).sin();
        let nu = e.nu(6).unwrap();
        assert!((nu.value - want).abs() < 1e-12, "p={p}: {nu:?}");
        let sigma = 1.0 / (1.0 + 1.0 / want);
        assert!((e.sigma(6).unwrap() - sigma).abs() < 1e-12);
    }
    let zero = Profile::constant(3, c(0.0, 0.0)).unwrap();
    assert_eq!(zero.nu(2).unwrap().value, 0.0);
    assert_eq!(zero.sigma(2).unwrap(), 0.0);
}

#[test]
fn builtins_respect_declared_bound() {
    for p in [2u32, 3, 5] {
        for phi in builtins(p) {
            let mut worst = 0.0f64;
            let depth = if p == 2 { 10 } else { 5 };
            for_each_fraction(p, depth, |digits| {
                worst = worst.max(phi.eval_digits(digits).norm());
            })
            .unwrap();
            let bound = if matches!(phi.name().as_str(), "digit") {
                (p - 1) as f64
            } else {
                1.0
            };
            assert!(worst <= bound + 1e-15, "{} p={p}: {worst}", phi.name());
        }
    }
}

#[test]
fn truncation_is_idempotent() {
    let e = Profile::exponential(3).unwrap();
    for m in 0..4 {
        let once = e.truncate(m);
        let twice = once.truncate(m);
        for_each_fraction(3, 6, |d| {
            assert_eq!(once.eval_digits(d), twice.eval_digits(d));
        })
        .unwrap();
    }
}

#[test]
fn modulus_decreases() {
    let e = Profile::exponential(2).unwrap();
    let r = e.p_continuity_modulus(3, 12).unwrap();
    assert!(r.upper <= 2.0 * PI / 8.0);
    assert!(r.sampled <= r.upper);
    let mut prev = f64::INFINITY;
    for m in 1..8 {
        let r = e.p_continuity_modulus(m, 14).unwrap();
        assert!(r.sampled < prev);
        prev = r.sampled;
    }
    let d = Profile::digit(3).unwrap();
    assert_eq!(d.p_continuity_modulus(1, 6).unwrap().upper, 0.0);
}

#[test]
fn truncated_nu_converges() {
    let e = Profile::exponential(3).unwrap();
    let target = (PI / 3.0).sin();
    let mut prev = f64::INFINITY;
    for m in 1..7 {
        let nu = e.truncate(m).nu(m).unwrap();
        let band = 2.0 * e.p_continuity_modulus(m, m + 4).unwrap().upper;
        assert!((nu.value - target).abs() <= band + 1e-12, "m={m}");
        assert!(band < prev);
        prev = band;
    }
}

#[test]
fn tabulated_from_csv() {
    let text = "numerator,denominator,re,im\n0,1,0,0\n1,3,0.5,0.25\n2,3,-1,0\n";
    let t = Profile::from_csv_reader(3, text.as_bytes()).unwrap();
    assert_eq!(t.depth(), Depth::Finite(1));
    assert_eq!(t.eval_ratio(1, 3).unwrap(), c(0.5, 0.25));
    assert_eq!(t.eval_ratio(7, 9).unwrap(), c(-1.0, 0.0));
    let bad = "numerator,denominator,re,im\n1,2,0,0\n";
    assert!(Profile::from_csv_reader(3, bad.as_bytes()).is_err());
}
