use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::walker::Walker;
use crate::maps::MapParams;
use crate::padic::{haar_volume, Rational, Region};

const U: f64 = f64::EPSILON;

/// Query sets in the plane. All sets are closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Query {
    Rect {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// `{z : Re(z * conj(normal)) <= offset}`.
    HalfPlane {
        normal: Complex64,
        offset: f64,
    },
    /// `s * inner`.
    Scaled {
        inner: Box<Query>,
        s: Complex64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Inside,
    Outside,
    Boundary,
}

impl Query {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Query::Rect { x0, x1, y0, y1 } => x0 <= x1 && y0 <= y1,
            Query::Disk { center, radius } => center.is_finite() && *radius >= 0.0,
            Query::HalfPlane { normal, offset } => {
                normal.is_finite() && normal.norm() > 0.0 && offset.is_finite()
            }
            Query::Scaled { inner, s } => return inner.validate().and(check_scale(*s)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("unsupported query region {self:?}")))
        }
    }

    pub fn scaled(self, s: Complex64) -> Query {
        Query::Scaled {
            inner: Box::new(self),
            s,
        }
    }

    /// Where the closed disk `D(c, rho)` lies relative to the set.
    pub fn classify(&self, c: Complex64, rho: f64) -> Classification {
        let rho = rho + 8.0 * U * (c.norm() + rho);
        match self {
            Query::Rect { x0, x1, y0, y1 } => {
                let dx = (x0 - c.re).max(c.re - x1).max(0.0);
                let dy = (y0 - c.im).max(c.im - y1).max(0.0);
                if dx.hypot(dy) > rho {
                    Classification::Outside
                } else if c.re - rho >= *x0
                    && c.re + rho <= *x1
                    && c.im - rho >= *y0
                    && c.im + rho <= *y1
                {
                    Classification::Inside
                } else {
                    Classification::Boundary
                }
            }
            Query::Disk { center, radius } => {
                let d = (c - center).norm();
                if d + rho <= *radius {
                    Classification::Inside
                } else if d - rho > *radius {
                    Classification::Outside
                } else {
                    Classification::Boundary
                }
            }
            Query::HalfPlane { normal, offset } => {
                let v = (c * normal.conj()).re;
                let spread = rho * normal.norm();
                if v + spread <= *offset {
                    Classification::Inside
                } else if v - spread > *offset {
                    Classification::Outside
                } else {
                    Classification::Boundary
                }
            }
            Query::Scaled { inner, s } => inner.classify(c / s, rho / s.norm()),
        }
    }
}

fn check_scale(s: Complex64) -> Result<()> {
    if s.is_finite() && s.norm() > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "scale factor {s} must be finite and nonzero"
        )))
    }
}

/// Haar measure on a region pushed forward by `Upsilon`.
#[derive(Clone, Debug)]
pub struct PushforwardMeasure {
    pub params: MapParams,
    pub region: Region,
}

impl PushforwardMeasure {
    pub fn new(params: MapParams, region: Region) -> Result<Self> {
        if params.base() != region.base() {
            return Err(Error::BaseMismatch(params.base(), region.base()));
        }
        Ok(Self { params, region })
    }

    /// `chi(Lambda)`.
    pub fn total_mass(&self) -> Result<Rational> {
        self.region.haar_measure()
    }
}

/// Mass of cells whose image disks lie inside the query, and of those that
/// straddle its boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassInterval {
    pub inside: Rational,
    pub boundary: Rational,
}

impl MassInterval {
    pub fn lower(&self) -> Rational {
        self.inside
    }

    pub fn upper(&self) -> Rational {
        self.inside + self.boundary
    }

    pub fn contains(&self, m: Rational) -> bool {
        self.lower() <= m && m <= self.upper()
    }
}

/// Brackets `chi(Upsilon^{-1}(A))` over all cells `depth` levels below the
/// balls of the region.
pub fn pushforward_mass(pm: &PushforwardMeasure, a: &Query, depth: u32) -> Result<MassInterval> {
    a.validate()?;
    let p = pm.params.base();
    let mut inside = Rational::zero();
    let mut boundary = Rational::zero();
    for ball in pm.region.balls() {
        let w = Walker::new(pm.params.profile(), pm.params.s(), 1, ball, depth)?;
        let radius = w.radius(0);
        let tallies = w.walk(
            || [0u64; 2],
            |acc, sums| match a.classify(sums[0], radius) {
                Classification::Inside => acc[0] += 1,
                Classification::Boundary => acc[1] += 1,
                Classification::Outside => {}
            },
        );
        let (ins, bnd) = tallies
            .iter()
            .fold((0u64, 0u64), |(i, b), t| (i + t[0], b + t[1]));
        let cell = haar_volume(p, ball.level() + depth as i64)?;
        inside += cell * Rational::from_integer(ins as i128);
        boundary += cell * Rational::from_integer(bnd as i128);
    }
    Ok(MassInterval { inside, boundary })
}

/// Interval for `mu(s A) / mu(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioCheck {
    pub lower: Rational,
    /// `None` when the denominator's lower bound is zero.
    pub upper: Option<Rational>,
    /// Both masses are certainly zero.
    pub undefined: bool,
    pub numerator: MassInterval,
    pub denominator: MassInterval,
}

impl RatioCheck {
    pub fn contains(&self, r: Rational) -> bool {
        !self.undefined && self.lower <= r && self.upper.is_none_or(|u| r <= u)
    }
}

/// `pushforward_mass(s^k A) / pushforward_mass(A)` with `s` from the map.
pub fn scale_covariance_check(
    pm: &PushforwardMeasure,
    a: &Query,
    iterations: u32,
    depth: u32,
) -> Result<RatioCheck> {
    let s = pm.params.s().powi(iterations as i32);
    let den = pushforward_mass(pm, a, depth)?;
    let num = pushforward_mass(pm, &a.clone().scaled(s), depth)?;
    let undefined = den.upper().is_zero() && num.upper().is_zero();
    let lower = if den.upper().is_zero() {
        Rational::zero()
    } else {
        num.lower() / den.upper()
    };
    let upper = (!den.lower().is_zero()).then(|| num.upper() / den.lower());
    Ok(RatioCheck {
        lower,
        upper,
        undefined,
        numerator: num,
        denominator: den,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_shapes() {
        let d = Query::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        };
        assert_eq!(
            d.classify(Complex64::new(0.2, 0.0), 0.1),
            Classification::Inside
        );
        assert_eq!(
            d.classify(Complex64::new(2.0, 0.0), 0.5),
            Classification::Outside
        );
        assert_eq!(
            d.classify(Complex64::new(1.0, 0.0), 0.1),
            Classification::Boundary
        );
        let h = Query::HalfPlane {
            normal: Complex64::new(0.0, 1.0),
            offset: 0.0,
        };
        assert_eq!(
            h.classify(Complex64::new(5.0, -1.0), 0.5),
            Classification::Inside
        );
        let r = Query::Rect {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        };
        assert_eq!(
            r.classify(Complex64::new(1.2, 1.2), 0.2),
            Classification::Outside
        );
        let sc = r.scaled(Complex64::new(0.0, 2.0));
        // 2i * [0,1]^2 = [-2,0] x [0,2]
        assert_eq!(
            sc.classify(Complex64::new(-1.0, 1.0), 0.1),
            Classification::Inside
        );
    }
}
