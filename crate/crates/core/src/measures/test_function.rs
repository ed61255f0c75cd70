use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A gauge `zeta(r)` for generalized Hausdorff measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `r^D`.
    Power { d: f64 },
    /// `prod_{k=0}^{N} (log_b^{(k)}(1/r))^{-D_k}` with `log^{(0)}(t) = t`.
    IterLog { exponents: Vec<f64>, base: f64 },
    /// Tabulated `(r, zeta)` pairs, interpolated linearly in log-log scale and
    /// extended by the end slopes.
    Custom { points: Vec<(f64, f64)> },
}

impl TestFunction {
    pub fn power(d: f64) -> Self {
        TestFunction::Power { d }
    }

    pub fn iter_log(exponents: Vec<f64>, base: f64) -> Result<Self> {
        if exponents.is_empty() || !(base > 1.0) {
            return Err(Error::Invalid(
                "iterated-log gauge needs exponents and a base > 1".into(),
            ));
        }
        Ok(TestFunction::IterLog { exponents, base })
    }

    pub fn custom(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 || points.iter().any(|&(r, z)| !(r > 0.0) || !(z > 0.0)) {
            return Err(Error::Invalid(
                "custom gauge needs at least two positive (r, zeta) points".into(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points
            .windows(2)
            .any(|w| w[0].0 == w[1].0 || w[0].1 > w[1].1)
        {
            return Err(Error::Invalid(
                "custom gauge must be strictly increasing in r and nondecreasing".into(),
            ));
        }
        Ok(TestFunction::Custom { points })
    }

    /// Leading scale dimension `D`.
    pub fn dimension(&self) -> f64 {
        match self {
            TestFunction::Power { d } => *d,
            TestFunction::IterLog { exponents, .. } => exponents[0],
            TestFunction::Custom { points } => {
                let (a, b) = (points[0], points[1]);
                (b.1 / a.1).ln() / (b.0 / a.0).ln()
            }
        }
    }

    /// `zeta(r)`; `+inf` when an iterated logarithm is not positive.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            TestFunction::Power { d } => r.powf(*d),
            TestFunction::IterLog { exponents, base } => {
                let lb = base.ln();
                let mut t = 1.0 / r;
                let mut acc = 1.0;
                for (k, &dk) in exponents.iter().enumerate() {
                    if k > 0 {
                        t = t.ln() / lb;
                    }
                    if !(t > 0.0) {
                        return f64::INFINITY;
                    }
                    acc *= t.powf(-dk);
                }
                acc
            }
            TestFunction::Custom { points } => {
                let lr = r.ln();
                let i = points.partition_point(|&(x, _)| x < r);
                let (a, b) = if i == 0 {
                    (points[0], points[1])
                } else if i >= points.len() {
                    (points[points.len() - 2], points[points.len() - 1])
                } else {
                    (points[i - 1], points[i])
                };
                let (la, lb) = (a.0.ln(), b.0.ln());
                let t = (lr - la) / (lb - la);
                (a.1.ln() + t * (b.1.ln() - a.1.ln())).exp()
            }
        }
    }
}
