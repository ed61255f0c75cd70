//! Distortion between two members of the map family.

use super::{upsilon_deriv, DeltaBounds, MapParams};
use crate::error::{Error, Result};
use crate::padic::DigitWord;
use crate::profiles::sup_distance;

/// Upper bound on `kappa = -ln min(Delta^+, Delta^-)` from certified bounds.
pub fn kappa_from_bounds(bounds: &DeltaBounds) -> f64 {
    let m = bounds.plus.lower.min(bounds.minus.lower);
    if m > 0.0 {
        -m.ln()
    } else {
        f64::INFINITY
    }
}

/// `2 / (1 - |s|) * e^{kappa_known} * ||phi1 - phi2||`, with the sup distance
/// certified on probes up to `p^probe_depth` (or analytically for
/// truncations).
pub fn kappa_perturbation_bound(
    params1: &MapParams,
    params2: &MapParams,
    kappa_known: f64,
    probe_depth: u32,
) -> Result<f64> {
    if params1.s() != params2.s() || params1.order() != params2.order() {
        return Err(Error::Invalid(
            "kappa bound compares profiles at the same s and order".into(),
        ));
    }
    let dist = sup_distance(params1.profile(), params2.profile(), probe_depth)?;
    if dist.upper == 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 / (1.0 - params1.s().norm());
    Ok(c * kappa_known.exp() * dist.upper)
}

/// `sup |d1 - d2| / (d1 + d2)` over the sampled pairs, where `d_i` is the
/// distance between the images under map `i`; `0` for an empty sample.
pub fn empirical_kappa(
    params1: &MapParams,
    params2: &MapParams,
    pairs: &[(DigitWord, DigitWord)],
    depth: i64,
) -> Result<f64> {
    let mut best = 0.0f64;
    for (x, y) in pairs {
        let d1 = (upsilon_deriv(params1, x, depth)?.value
            - upsilon_deriv(params1, y, depth)?.value)
            .norm();
        let d2 = (upsilon_deriv(params2, x, depth)?.value
            - upsilon_deriv(params2, y, depth)?.value)
            .norm();
        if d1 + d2 > 0.0 {
            best = best.max((d1 - d2).abs() / (d1 + d2));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Profile;
    use num_complex::Complex64;

    #[test]
    fn identical_params() {
        let p =
            MapParams::upsilon(Profile::exponential(2).unwrap(), Complex64::new(0.3, 0.0)).unwrap();
        assert_eq!(kappa_perturbation_bound(&p, &p, 1.0, 8).unwrap(), 0.0);
        let x = DigitWord::from_i64(2, 5, 12).unwrap();
        let y = DigitWord::from_i64(2, 2, 12).unwrap();
        assert_eq!(empirical_kappa(&p, &p, &[(x, y)], 12).unwrap(), 0.0);
        assert_eq!(empirical_kappa(&p, &p, &[], 12).unwrap(), 0.0);
    }
}
