use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use padic_fractal::integrate::{
    haar_integral, holomorphy_residual, integral_s_derivative, path_sweep, s_of_d, straight_path,
    write_sweep_csv, Domain, Integrand,
};
use padic_fractal::maps::{DistortionOptions, MapParams};
use padic_fractal::padic::{Ball, DigitWord, Region};
use padic_fractal::profiles::Profile;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn digit2(s: Complex64) -> MapParams {
    MapParams::upsilon(Profile::digit(2).unwrap(), s).unwrap()
}

fn zp() -> Domain {
    Domain::Bounded(Region::single(Ball::unit(2).unwrap()))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

fn lebesgue_1d(f: impl Fn(f64) -> Complex64, a: f64, b: f64, density: f64) -> Complex64 {
    let h = (b - a) / 2.0;
    gauss_legendre(24)
        .into_iter()
        .map(|(x, w)| f(a + h * (x + 1.0)) * (w * h))
        .sum::<Complex64>()
        * density
}

/// Integral over `[-2/3, 4/3] x (1/sqrt 2)[-2/3, 4/3]` with density `1/(2 sqrt 2)`.
fn lebesgue_rect(f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let k = 1.0 / SQRT_2;
    let density = 1.0 / (2.0 * SQRT_2);
    lebesgue_1d(
        |x| lebesgue_1d(|y| f(c(x, y)), -2.0 / 3.0 * k, 4.0 / 3.0 * k, 1.0),
        -2.0 / 3.0,
        4.0 / 3.0,
        density,
    )
}

/// `E[Upsilon^k]` for `Upsilon = sum x_n s^n` with fair bits: moments of a sum
/// of independent `x_n s^n` via the cumulant series.
fn digit_moment(s: Complex64, k: u32) -> Complex64 {
    let mean = 0.5 / (1.0 - s);
    match k {
        0 => c(1.0, 0.0),
        1 => mean,
        // Var = sum (1/4) s^{2n}
        2 => mean * mean + 0.25 / (1.0 - s * s),
        _ => unreachable!(),
    }
}

#[test]
fn lebesgue_oracle_matches_digit_moments() {
    let s = c(-0.5, 0.0);
    for k in 0..3 {
        let leb = lebesgue_1d(|x| c(x.powi(k as i32), 0.0), -2.0 / 3.0, 4.0 / 3.0, 0.5);
        assert!((leb - digit_moment(s, k)).norm() < 1e-13, "k={k}");
    }
    let s2 = c(0.0, -1.0 / SQRT_2);
    let leb = lebesgue_rect(|z| z);
    // the principal branch gives the conjugate image of the rectangle
    assert!((leb.conj() - digit_moment(s2, 1)).norm() < 1e-13);
}

#[test]
fn endpoint_d1() {
    let pt = s_of_d(c(1.0, 0.0), PI, 2).unwrap();
    let params = digit2(pt.s);
    let want = [c(1.0, 0.0), c(1.0 / 3.0, 0.0), c(4.0 / 9.0, 0.0)];
    for (k, w) in want.iter().enumerate() {
        let r = haar_integral(&params, &zp(), &Integrand::Monomial(k as u32), 20).unwrap();
        assert!(r.contains(*w), "k={k}: {r:?}");
        assert!(r.error_bound < 5e-3);
        let leb = lebesgue_1d(|x| c(x.powi(k as i32), 0.0), -2.0 / 3.0, 4.0 / 3.0, 0.5);
        assert!((leb - w).norm() < 1e-13);
    }
    let r = haar_integral(&params, &zp(), &Integrand::Monomial(3), 20).unwrap();
    let leb = lebesgue_1d(|x| c(x.powi(3), 0.0), -2.0 / 3.0, 4.0 / 3.0, 0.5);
    assert!(r.contains(leb), "{r:?} vs {leb}");
}

#[test]
fn endpoint_d2() {
    let pt = s_of_d(c(2.0, 0.0), PI, 2).unwrap();
    let params = digit2(pt.s);
    let r = haar_integral(&params, &zp(), &Integrand::Monomial(1), 20).unwrap();
    let want = c(1.0, -1.0 / SQRT_2) / 3.0;
    assert!(r.contains(want), "{r:?}");
    for k in 0..=3u32 {
        let r = haar_integral(&params, &zp(), &Integrand::Monomial(k), 20).unwrap();
        let leb = lebesgue_rect(|z| z.conj().powu(k));
        assert!(r.contains(leb), "k={k}: {r:?} vs {leb}");
    }
    // i/sqrt(2) is the conjugate branch
    let r = haar_integral(
        &digit2(c(0.0, 1.0 / SQRT_2)),
        &zp(),
        &Integrand::Monomial(1),
        20,
    )
    .unwrap();
    assert!(r.contains(c(1.0, 1.0 / SQRT_2) / 3.0));
}

#[test]
fn half_s_mean_is_one() {
    let r = haar_integral(&digit2(c(0.5, 0.0)), &zp(), &Integrand::Monomial(1), 18).unwrap();
    assert!(r.contains(c(1.0, 0.0)));
    assert!(r.error_bound < 1e-4);
}

#[test]
fn constant_gives_haar_volume() {
    let params = MapParams::upsilon(Profile::exponential(3).unwrap(), c(0.2, 0.1)).unwrap();
    let ball = Ball::new(DigitWord::new(3, 0, vec![2]).unwrap(), 1).unwrap();
    let r = haar_integral(
        &params,
        &Domain::Bounded(Region::single(ball)),
        &Integrand::parse("1").unwrap(),
        6,
    )
    .unwrap();
    assert!((r.value - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    assert_eq!(r.cells, 729);
}

#[test]
fn deeper_results_nest() {
    let params = digit2(c(0.35, 0.1));
    let f = Integrand::Exp(c(0.25, 0.0));
    let coarse = haar_integral(&params, &zp(), &f, 8).unwrap();
    let fine = haar_integral(&params, &zp(), &f, 16).unwrap();
    assert!((fine.value - coarse.value).norm() + fine.error_bound <= coarse.error_bound);
}

#[test]
fn quadrature_is_linear() {
    let params = digit2(c(0.3, -0.2));
    let (a, b) = (c(2.0, 1.0), c(-0.5, 0.25));
    let f = Integrand::Monomial(2);
    let g = Integrand::Exp(c(0.0, 1.0));
    let lin = Integrand::Linear(vec![(a, f.clone()), (b, g.clone())]);
    let i = |h: &Integrand| haar_integral(&params, &zp(), h, 14).unwrap().value;
    assert!((i(&lin) - (a * i(&f) + b * i(&g))).norm() < 1e-13);
}

#[test]
fn modulus_bounded_by_volume_times_sup() {
    let params = digit2(c(-0.4, 0.3));
    let r = haar_integral(&params, &zp(), &Integrand::Monomial(2), 12).unwrap();
    let sup = 1.0 / (1.0 - 0.5f64);
    assert!(r.value.norm() <= sup * sup + r.error_bound);
}

#[test]
fn first_derivative_matches_finite_difference() {
    let s = c(0.3, 0.2);
    let params = digit2(s);
    let region = Region::single(Ball::unit(2).unwrap());
    let f = Integrand::Monomial(2);
    let d = integral_s_derivative(&params, &region, &f, 1, 0, 18).unwrap();
    let h = 1e-4;
    let ip = haar_integral(&digit2(s + h), &zp(), &f, 18).unwrap();
    let im = haar_integral(&digit2(s - h), &zp(), &f, 18).unwrap();
    let fd = (ip.value - im.value) / (2.0 * h);
    assert!((fd - d.value).norm() < 1e-6, "{fd} vs {:?}", d);
    // holomorphic integrand: the antiholomorphic derivative vanishes
    let dbar = integral_s_derivative(&params, &region, &f, 0, 1, 12).unwrap();
    assert!(dbar.value.norm() <= dbar.error_bound);
    // order zero reduces to the plain integral
    let d0 = integral_s_derivative(&params, &region, &f, 0, 0, 12).unwrap();
    let i0 = haar_integral(&params, &zp(), &f, 12).unwrap();
    assert_eq!(d0, i0);
}

#[test]
fn first_derivative_of_mean_closed_form() {
    // d/ds (1/2)/(1-s) = (1/2)/(1-s)^2
    let s = c(-0.2, 0.3);
    let region = Region::single(Ball::unit(2).unwrap());
    let d = integral_s_derivative(&digit2(s), &region, &Integrand::Monomial(1), 1, 0, 20).unwrap();
    assert!(d.contains(0.5 / ((1.0 - s) * (1.0 - s))), "{d:?}");
}

#[test]
fn cauchy_riemann() {
    let params = digit2(c(0.35, 0.1));
    let region = Region::single(Ball::unit(2).unwrap());
    let hol =
        holomorphy_residual(&params, &region, &Integrand::Exp(c(0.25, 0.0)), 1e-3, 16).unwrap();
    assert!(hol.residual < 1e-4 + hol.budget(), "{hol:?}");
    let anti =
        holomorphy_residual(&params, &region, &Integrand::ConjMonomial(1), 1e-3, 16).unwrap();
    // d/dsbar of conj(E[Upsilon]) = conj((1/2)/(1-s)^2)
    let want = (0.5 / ((1.0 - params.s()) * (1.0 - params.s()))).norm();
    assert!((anti.residual - want).abs() < 1e-5, "{anti:?}");
    assert!(anti.residual > 10.0 * hol.residual);
    let flat = holomorphy_residual(
        &params,
        &region,
        &Integrand::parse("2-i").unwrap(),
        1e-3,
        10,
    )
    .unwrap();
    assert!(flat.residual <= flat.budget());
}

#[test]
fn gaussian_over_whole_space() {
    // d = 1: Upsilon(Q_2) is the real line with density 1/2
    let r = haar_integral(
        &digit2(c(-0.5, 0.0)),
        &Domain::Whole { shells: 6 },
        &Integrand::Gaussian,
        16,
    )
    .unwrap();
    let want = 0.5 * PI.sqrt();
    assert!(r.contains(c(want, 0.0)), "{r:?} vs {want}");
    assert!(r.error_bound < 1e-2);
    // d = 2: the plane with density 1/(2 sqrt 2)
    let r = haar_integral(
        &digit2(c(0.0, -1.0 / SQRT_2)),
        &Domain::Whole { shells: 10 },
        &Integrand::Gaussian,
        14,
    )
    .unwrap();
    let want = PI / (2.0 * SQRT_2);
    assert!(r.contains(c(want, 0.0)), "{r:?} vs {want}");
}

#[test]
fn whole_space_needs_decay() {
    let e = haar_integral(
        &digit2(c(-0.5, 0.0)),
        &Domain::Whole { shells: 3 },
        &Integrand::Monomial(1),
        8,
    );
    assert!(e.is_err());
}

#[test]
fn sweep_flags_out_of_domain() {
    let region = Region::single(Ball::unit(2).unwrap());
    let mut path = straight_path(c(1.0, 0.0), c(2.0, 0.0), 3);
    path.push(c(-1.0, 0.0));
    let rows = path_sweep(
        &path,
        PI,
        &Profile::digit(2).unwrap(),
        &region,
        &Integrand::Monomial(1),
        14,
        &DistortionOptions::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].integral.unwrap().contains(c(1.0 / 3.0, 0.0)));
    assert!(rows[3].s.is_none() && !rows[3].certified);
    // the sweep is continuous along the path
    for w in rows[..3].windows(2) {
        let (a, b) = (w[0].integral.unwrap(), w[1].integral.unwrap());
        assert!((a.value - b.value).norm() < 0.5);
    }
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("d_re,d_im,s_re,s_im,D_s,I_re,I_im,err,certified\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn single_point_sweep_equals_integral() {
    let region = Region::single(Ball::unit(2).unwrap());
    let f = Integrand::Monomial(2);
    let rows = path_sweep(
        &[c(1.3, 0.1)],
        PI,
        &Profile::digit(2).unwrap(),
        &region,
        &f,
        12,
        &DistortionOptions::default(),
    )
    .unwrap();
    let pt = s_of_d(c(1.3, 0.1), PI, 2).unwrap();
    let direct = haar_integral(&digit2(pt.s), &zp(), &f, 12).unwrap();
    assert_eq!(rows[0].integral.unwrap(), direct);
}
