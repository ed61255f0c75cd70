//! `omega_nu^phi(tau, x) = sum_n (a^{(n)})^{-nu} phi(((x)_a^n + tau) / a^{(n)})`
//! and its embedding `Omega` into R^3.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::EvalResult;
use crate::error::{Error, Result};
use crate::padic::{ASequence, AWord};
use crate::profiles::{PeriodicFunction, Profile};

const U: f64 = f64::EPSILON;

#[derive(Clone, Debug)]
pub struct SolenoidParams {
    pub a: Arc<ASequence>,
    pub nu: Complex64,
    pub alpha: Complex64,
    pub profile: Profile,
}

impl SolenoidParams {
    pub fn new(
        a: Arc<ASequence>,
        nu: Complex64,
        alpha: Complex64,
        profile: Profile,
    ) -> Result<Self> {
        if !(nu.re > 0.0) {
            return Err(Error::OutOfDomain(format!("need Re(nu) > 0, got {nu}")));
        }
        Ok(Self {
            a,
            nu,
            alpha,
            profile,
        })
    }
}

/// Residual of `d/dtau omega_nu^phi = omega_{nu+1}^{phi'}` for the truncated
/// sums, with the Taylor and rounding budget of the central difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauCheck {
    pub residual: f64,
    pub budget: f64,
}

struct Parts {
    value: Complex64,
    tail: f64,
    rounding: f64,
}

fn omega_parts(
    f: &dyn PeriodicFunction,
    a: &ASequence,
    nu: Complex64,
    tau: f64,
    x: &AWord,
    depth: usize,
) -> Result<Parts> {
    if x.len() < depth {
        return Err(Error::Window(format!(
            "depth {depth} needs {depth} digits, word has {}",
            x.len()
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut xn: u128 = 0;
    for n in 0..depth {
        xn += x.digits()[n] as u128 * a.partial_product(n as i64 - 1);
        let an = a.partial_product(n as i64) as f64;
        let weight = (-nu * an.ln()).exp();
        let arg = xn as f64 / an + tau / an;
        value += weight * f.value(arg);
        abs_sum += weight.norm();
    }
    let sup = f.sup_bound();
    let g = 2f64.powf(-nu.re);
    // a_k >= 2 gives a^{(n)} >= a^{(depth)} 2^{n - depth}
    let lead = if depth < a.len() {
        (a.partial_product(depth as i64) as f64).powf(-nu.re)
    } else {
        (a.partial_product(depth as i64 - 1) as f64).powf(-nu.re) * g
    };
    Ok(Parts {
        value,
        tail: sup * lead / (1.0 - g),
        rounding: U * sup * abs_sum * (16.0 + 4.0 * depth as f64 + 8.0 * (1.0 + tau.abs())),
    })
}

/// `omega` with an arbitrary periodic profile.
pub fn omega_with(
    f: &dyn PeriodicFunction,
    a: &ASequence,
    nu: Complex64,
    tau: f64,
    x: &AWord,
    depth: usize,
) -> Result<EvalResult> {
    let parts = omega_parts(f, a, nu, tau, x, depth)?;
    Ok(EvalResult {
        value: parts.value,
        error_bound: parts.tail + parts.rounding,
    })
}

/// `omega_nu^phi(tau, x)` summed over `n < depth`.
pub fn omega(sp: &SolenoidParams, tau: f64, x: &AWord, depth: usize) -> Result<EvalResult> {
    omega_with(&sp.profile, &sp.a, sp.nu, tau, x, depth)
}

/// Cartesian point of `Omega(tau, x)`: radius `Re(omega + alpha)`, height
/// `Im(omega + alpha)`, angle `2 pi tau mod 2 pi`.
pub fn solenoid_point(sp: &SolenoidParams, tau: f64, x: &AWord, depth: usize) -> Result<[f64; 3]> {
    let w = omega(sp, tau, x, depth)?.value + sp.alpha;
    let angle = (2.0 * PI * tau).rem_euclid(2.0 * PI);
    Ok([w.re * angle.cos(), w.re * angle.sin(), w.im])
}

/// Central difference of the truncated `omega` in `tau` against the truncated
/// `omega_{nu+1}^{phi'}`; the two agree up to the Taylor remainder.
pub fn tau_derivative_check(
    sp: &SolenoidParams,
    tau: f64,
    x: &AWord,
    h: f64,
    depth: usize,
) -> Result<TauCheck> {
    let deriv = sp.profile.derivative()?;
    let plus = omega_parts(&sp.profile, &sp.a, sp.nu, tau + h, x, depth)?;
    let minus = omega_parts(&sp.profile, &sp.a, sp.nu, tau - h, x, depth)?;
    let fd = (plus.value - minus.value) / (2.0 * h);
    let exact = omega_parts(&deriv, &sp.a, sp.nu + 1.0, tau, x, depth)?;
    // |phi'''| <= (2 pi)^3 sup|phi| for the single-harmonic profiles
    let third: f64 = (0..depth)
        .map(|n| (sp.a.partial_product(n as i64) as f64).powf(-sp.nu.re - 3.0))
        .sum::<f64>()
        * (2.0 * PI).powi(3)
        * sp.profile.sup_bound();
    let budget = h * h / 6.0 * third
        + (plus.rounding + minus.rounding) / (2.0 * h)
        + exact.rounding
        + 4.0 * U * (plus.value.norm() + minus.value.norm()) / (2.0 * h);
    Ok(TauCheck {
        residual: (fd - exact.value).norm(),
        budget,
    })
}
