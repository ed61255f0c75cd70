//! The scaling-covariant family `d_s^l Upsilon_s^phi : Q_p -> C`, its
//! embedding diagnostics and the solenoid maps.

mod distortion;
mod kappa;
mod solenoid;
pub(crate) mod walker;

pub use distortion::{
    delta_bounds, delta_plus, delta_plus_lower, delta_small, delta_small_lower, nu_margin_bound,
    nu_margin_bound_scaled, transfer_band, DeltaBounds, DistortionOptions, DistortionReport,
};
pub use kappa::{empirical_kappa, kappa_from_bounds, kappa_perturbation_bound};
pub use solenoid::{
    omega, omega_with, solenoid_point, tau_derivative_check, SolenoidParams, TauCheck,
};
pub use walker::{ball_images, image_points, BallImage};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{interleave_q, DigitWord};
use crate::profiles::Profile;

const U: f64 = f64::EPSILON;

/// One member `(p, s, phi, l)` of the map family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    profile: Profile,
    s: Complex64,
    order: i32,
}

impl MapParams {
    pub fn new(profile: Profile, s: Complex64, order: i32) -> Result<Self> {
        check_s(s)?;
        if order < 0 && profile.phi_zero().norm() != 0.0 {
            return Err(Error::UnsupportedProfile(format!(
                "order {order} needs phi(0) = 0, got {}",
                profile.phi_zero()
            )));
        }
        Ok(Self { profile, s, order })
    }

    /// `Upsilon_s^phi` itself (order 0).
    pub fn upsilon(profile: Profile, s: Complex64) -> Result<Self> {
        Self::new(profile, s, 0)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn base(&self) -> u32 {
        self.profile.base()
    }

    pub fn with_s(&self, s: Complex64) -> Result<Self> {
        Self::new(self.profile.clone(), s, self.order)
    }

    pub fn with_order(&self, order: i32) -> Result<Self> {
        Self::new(self.profile.clone(), self.s, order)
    }

    pub fn with_profile(&self, profile: Profile) -> Result<Self> {
        Self::new(profile, self.s, self.order)
    }

    /// `D_s = -ln p / ln |s|`.
    pub fn dimension(&self) -> f64 {
        -(self.base() as f64).ln() / self.s.norm().ln()
    }
}

pub(crate) fn check_s(s: Complex64) -> Result<()> {
    let r = s.norm();
    if !r.is_finite() || r <= 0.0 || r >= 1.0 {
        return Err(Error::OutOfDomain(format!(
            "need 0 < |s| < 1, got |s| = {r}"
        )));
    }
    Ok(())
}

/// A value together with the radius of a disk certified to contain the exact
/// result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_bound: f64,
}

impl EvalResult {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.value).norm() <= self.error_bound
    }

    /// Whether the two disks intersect.
    pub fn overlaps(&self, other: &EvalResult) -> bool {
        (self.value - other.value).norm() <= self.error_bound + other.error_bound
    }
}

/// `n (n-1) ... (n-k+1)`, defined for negative `n` as well.
pub fn falling_factorial(n: i64, k: u32) -> f64 {
    (0..k as i64).map(|j| (n - j) as f64).product()
}

/// Coefficient of `phi_n` in `d_s^l Upsilon` and the power of `s` it
/// multiplies: `(n)_l s^{n-l}` for `l >= 0`, `s^{n+|l|} / ((n+1)...(n+|l|))`
/// for `l < 0`.
pub fn series_coefficient(n: i64, order: i32) -> (f64, i64) {
    if order >= 0 {
        (falling_factorial(n, order as u32), n - order as i64)
    } else {
        let l = (-order) as i64;
        let den: f64 = (1..=l).map(|j| (n + j) as f64).product();
        (1.0 / den, n + l)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Majorant of `sum_{n >= start} |coefficient_n| r^{power_n}` for the order-`l`
/// series, i.e. the tail with `|phi| <= 1`.
pub fn tail_majorant(r: f64, start: i64, order: i32) -> f64 {
    if order < 0 {
        let l = (-order) as i64;
        let n0 = start.max(0);
        let den: f64 = (1..=l).map(|j| (n0 + j) as f64).product();
        return r.powi((n0 + l) as i32) / ((1.0 - r) * den);
    }
    let l = order as u32;
    let mut acc = 0.0;
    let mut n0 = start;
    // finitely many negative indices are summed directly
    while n0 < 0 {
        acc += falling_factorial(n0, l).abs() * r.powi((n0 - l as i64) as i32);
        n0 += 1;
    }
    // d^l/dr^l [r^N / (1 - r)] by Leibniz
    let big_n = n0;
    for k in 0..=l {
        let ff = falling_factorial(big_n, k);
        if ff == 0.0 {
            continue;
        }
        acc += binomial(l, k) * ff * r.powi((big_n - k as i64) as i32) * factorial(l - k)
            / (1.0 - r).powi((l - k + 1) as i32);
    }
    acc
}

/// `d_s^l Upsilon_s^phi(x)` summed over `n < depth`, with a certified error
/// radius. The order is taken from `params`.
///
/// Consumes digits of `x` with index `< depth`; for `l < 0` the word must lie in
/// `Z_p`.
pub fn upsilon_deriv(params: &MapParams, x: &DigitWord, depth: i64) -> Result<EvalResult> {
    if x.base() != params.base() {
        return Err(Error::BaseMismatch(params.base(), x.base()));
    }
    if x.top() < depth {
        return Err(Error::Window(format!(
            "depth {depth} needs digits below index {depth}, word is known up to {}",
            x.top()
        )));
    }
    let order = params.order;
    let phi = &params.profile;
    let s = params.s;
    let r = s.norm();
    let v = x.valuation();
    if order < 0 {
        if let Some(v) = v {
            if v < 0 {
                return Err(Error::OutOfDomain(format!(
                    "order {order} is defined on Z_p only, valuation is {v}"
                )));
            }
        }
    }
    let start = match v {
        Some(v) if v < depth => v,
        // nothing is summed; all unknown digits sit at index >= depth
        _ => depth,
    };
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut count = 0u64;
    let digits = x.digits();
    for n in start..depth {
        let upto = (n - x.v0()) as usize;
        let phi_n = phi.eval_digits(&digits[..=upto]);
        let (c, pw) = series_coefficient(n, order);
        if c == 0.0 {
            continue;
        }
        let term = phi_n * s.powi(pw as i32) * c;
        value += term;
        abs_sum += c.abs() * r.powi(pw as i32) * phi.sup_bound().max(phi_n.norm());
        count += 1;
    }
    let tail = phi.sup_bound() * tail_majorant(r, depth.max(start), order);
    let rounding = U * (8.0 + 4.0 * count as f64 + 2.0 * order.unsigned_abs() as f64) * abs_sum
        + phi.eval_error() * abs_sum / phi.sup_bound().max(f64::MIN_POSITIVE);
    Ok(EvalResult {
        value,
        error_bound: tail + rounding,
    })
}

/// `Upsilon_s^phi(x)` summed over `n < depth`; the order in `params` is
/// ignored.
pub fn upsilon(params: &MapParams, x: &DigitWord, depth: i64) -> Result<EvalResult> {
    if params.order == 0 {
        upsilon_deriv(params, x, depth)
    } else {
        upsilon_deriv(&params.with_order(0)?, x, depth)
    }
}

/// Residual of `Upsilon(p^k x) = s^k Upsilon(x)` and the combined error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub residual: f64,
    pub budget: f64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.budget
    }
}

/// `|Upsilon(p x) - s Upsilon(x)|`.
pub fn scaling_check(params: &MapParams, x: &DigitWord, depth: i64) -> Result<IdentityCheck> {
    scaling_check_iter(params, x, depth, 1)
}

/// `|Upsilon(p^k x) - s^k Upsilon(x)|`.
pub fn scaling_check_iter(
    params: &MapParams,
    x: &DigitWord,
    depth: i64,
    k: i64,
) -> Result<IdentityCheck> {
    let shifted = upsilon(params, &x.shift(k), depth + k)?;
    let plain = upsilon(params, x, depth)?;
    let sk = params.s.powi(k as i32);
    Ok(IdentityCheck {
        residual: (shifted.value - sk * plain.value).norm(),
        budget: shifted.error_bound + sk.norm() * plain.error_bound,
    })
}

/// `|Upsilon_s(q(x, y)) - Upsilon_{s^2}(x) - s Upsilon_{s^2}(y)|` for profiles
/// that read only the digit at `p^{-1}`.
pub fn interleave_identity_check(
    params: &MapParams,
    x: &DigitWord,
    y: &DigitWord,
    depth: i64,
) -> Result<IdentityCheck> {
    if params.profile.window() != 1 {
        return Err(Error::UnsupportedProfile(format!(
            "interleave identity needs a single-digit profile, {} reads {} digits",
            params.profile.name(),
            params.profile.window()
        )));
    }
    let s = params.s;
    let sq = params.with_s(s * s)?.with_order(0)?;
    let z = interleave_q(x, y)?;
    let lhs = upsilon(params, &z, 2 * depth)?;
    let ux = upsilon(&sq, x, depth)?;
    let uy = upsilon(&sq, y, depth)?;
    Ok(IdentityCheck {
        residual: (lhs.value - ux.value - s * uy.value).norm(),
        budget: lhs.error_bound + ux.error_bound + s.norm() * uy.error_bound,
    })
}
