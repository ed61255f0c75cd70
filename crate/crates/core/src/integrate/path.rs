use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A point on the dimension path `d -> s(d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathPoint {
    pub d: Complex64,
    pub theta: f64,
    pub s: Complex64,
    /// `-ln p / ln|s|`.
    pub dimension: f64,
}

impl PathPoint {
    /// `|1/D_s - Re((1/d)(1 + i theta / ln p))|`.
    pub fn consistency_residual(&self, p: u32) -> f64 {
        let lp = (p as f64).ln();
        let rhs = (self.d.inv() * Complex64::new(1.0, self.theta / lp)).re;
        (1.0 / self.dimension - rhs).abs()
    }
}

/// `s = exp(-(ln p + i theta) / d)` on the principal branch.
pub fn s_of_d(d: Complex64, theta: f64, p: u32) -> Result<PathPoint> {
    if p < 2 {
        return Err(Error::InvalidBase(p));
    }
    if !d.is_finite() || d.norm() == 0.0 || !theta.is_finite() {
        return Err(Error::Invalid(format!(
            "d = {d} and theta = {theta} must be finite, d != 0"
        )));
    }
    let s = (-Complex64::new((p as f64).ln(), theta) / d).exp();
    let r = s.norm();
    if !(r < 1.0) {
        return Err(Error::OutOfDomain(format!("|s(d)| = {r} >= 1 at d = {d}")));
    }
    Ok(PathPoint {
        d,
        theta,
        s,
        dimension: -(p as f64).ln() / r.ln(),
    })
}

/// `n` evenly spaced points on the segment from `d0` to `d1`.
pub fn straight_path(d0: Complex64, d1: Complex64, n: usize) -> Vec<Complex64> {
    match n {
        0 => vec![],
        1 => vec![d0],
        _ => (0..n)
            .map(|i| d0 + (d1 - d0) * (i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn endpoints() {
        let a = s_of_d(Complex64::new(1.0, 0.0), PI, 2).unwrap();
        assert!((a.s - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((a.dimension - 1.0).abs() < 1e-15);
        let b = s_of_d(Complex64::new(2.0, 0.0), PI, 2).unwrap();
        assert!((b.s - Complex64::new(0.0, -0.5f64.sqrt())).norm() < 1e-15);
        assert!((b.dimension - 2.0).abs() < 1e-14);
        let c = s_of_d(Complex64::new(1.0, 0.0), 0.0, 3).unwrap();
        assert!((c.s - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        for pt in [a, b, c] {
            assert!(pt.consistency_residual(if pt.theta == 0.0 { 3 } else { 2 }) < 1e-14);
        }
    }

    #[test]
    fn out_of_domain() {
        // Re(1/d) < 0 pushes |s| above 1
        let e = s_of_d(Complex64::new(-1.0, 0.0), PI, 2).unwrap_err();
        assert!(matches!(e, Error::OutOfDomain(_)));
    }
}
