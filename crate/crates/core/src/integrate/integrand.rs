use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::maps::falling_factorial;

/// Built-in integrands with closed-form Wirtinger derivatives
/// `d_z^q d_zbar^qbar f`, evaluated over disks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Integrand {
    Constant(Complex64),
    /// `z^k`.
    Monomial(u32),
    /// `conj(z)^k`.
    ConjMonomial(u32),
    /// `exp(a z)`.
    Exp(Complex64),
    /// `exp(-|z|^2)`.
    Gaussian,
    Linear(Vec<(Complex64, Integrand)>),
}

fn binom(n: u32, k: u32) -> f64 {
    falling_factorial(n as i64, k) / falling_factorial(k as i64, k)
}

impl Integrand {
    /// Parses `1`, `z^k`, `conj(z)^k`, `exp(a z)` (e.g. `exp(0.25z)`) or
    /// `gauss`.
    pub fn parse(spec: &str) -> Result<Self> {
        let t: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("unknown integrand {spec:?}"));
        let power = |rest: &str| -> Result<u32> {
            if rest.is_empty() {
                Ok(1)
            } else {
                rest.strip_prefix('^')
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(bad)
            }
        };
        if t == "gauss" || t == "exp(-|z|^2)" {
            return Ok(Integrand::Gaussian);
        }
        if let Some(rest) = t.strip_prefix("conj(z)").or_else(|| t.strip_prefix("zbar")) {
            return Ok(Integrand::ConjMonomial(power(rest)?));
        }
        if let Some(rest) = t.strip_prefix('z') {
            return Ok(Integrand::Monomial(power(rest)?));
        }
        if let Some(inner) = t.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
            let coef = inner.strip_suffix('z').ok_or_else(bad)?;
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let a = match coef {
                "" => Complex64::new(1.0, 0.0),
                "-" => Complex64::new(-1.0, 0.0),
                c => parse_complex(c.trim_start_matches('(').trim_end_matches(')'))?,
            };
            return Ok(Integrand::Exp(a));
        }
        parse_complex(&t)
            .map(Integrand::Constant)
            .map_err(|_| bad())
    }

    pub fn is_holomorphic(&self) -> bool {
        match self {
            Integrand::Constant(_) | Integrand::Monomial(_) | Integrand::Exp(_) => true,
            Integrand::ConjMonomial(k) => *k == 0,
            Integrand::Gaussian => false,
            Integrand::Linear(terms) => terms.iter().all(|(_, f)| f.is_holomorphic()),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_disk(0, 0, Disk::exact(z)).center
    }

    /// Enclosure of `d_z^q d_zbar^qbar f` over the disk.
    pub fn eval_disk(&self, q: u32, qbar: u32, z: Disk) -> Disk {
        match self {
            Integrand::Constant(c) => {
                if q == 0 && qbar == 0 {
                    Disk::exact(*c)
                } else {
                    Disk::zero()
                }
            }
            Integrand::Monomial(k) => {
                if qbar > 0 || q > *k {
                    Disk::zero()
                } else {
                    z.powi(k - q).scale(falling_factorial(*k as i64, q))
                }
            }
            Integrand::ConjMonomial(k) => {
                if q > 0 || qbar > *k {
                    Disk::zero()
                } else {
                    z.conj()
                        .powi(k - qbar)
                        .scale(falling_factorial(*k as i64, qbar))
                }
            }
            Integrand::Exp(a) => {
                if qbar > 0 {
                    Disk::zero()
                } else {
                    z.scale_c(*a).exp().scale_c(a.powi(q as i32))
                }
            }
            Integrand::Gaussian => {
                let g = (-(z * z.conj())).exp();
                let mut acc = Disk::zero();
                for j in 0..=q.min(qbar) {
                    let c = binom(q, j) * falling_factorial(qbar as i64, j);
                    let sign = if qbar % 2 == 1 { -1.0 } else { 1.0 };
                    let term = z.powi(qbar - j) * (-z.conj()).powi(q - j) * g;
                    acc = acc + term.scale(sign * c);
                }
                acc
            }
            Integrand::Linear(terms) => terms.iter().fold(Disk::zero(), |acc, (c, f)| {
                acc + f.eval_disk(q, qbar, z).scale_c(*c)
            }),
        }
    }

    /// `sup_{|z| >= r} |f(z)|` when the integrand decays, `None` otherwise.
    pub fn sup_outside(&self, r: f64) -> Option<f64> {
        match self {
            Integrand::Constant(c) => (c.norm() == 0.0).then_some(0.0),
            Integrand::Gaussian => Some((-r * r).exp()),
            Integrand::Linear(terms) => terms
                .iter()
                .map(|(c, f)| f.sup_outside(r).map(|v| c.norm() * v))
                .sum(),
            _ => None,
        }
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let imag_part = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        });
        return match split {
            Some(i) => Ok(Complex64::new(
                body[..i].parse().map_err(|_| bad())?,
                imag_part(&body[i..])?,
            )),
            None => Ok(Complex64::new(0.0, imag_part(body)?)),
        };
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(Integrand::parse("z^2").unwrap(), Integrand::Monomial(2));
        assert_eq!(Integrand::parse("z").unwrap(), Integrand::Monomial(1));
        assert_eq!(
            Integrand::parse("conj(z)").unwrap(),
            Integrand::ConjMonomial(1)
        );
        assert_eq!(
            Integrand::parse("exp(0.25z)").unwrap(),
            Integrand::Exp(Complex64::new(0.25, 0.0))
        );
        assert_eq!(Integrand::parse("gauss").unwrap(), Integrand::Gaussian);
        assert_eq!(
            Integrand::parse("1").unwrap(),
            Integrand::Constant(Complex64::new(1.0, 0.0))
        );
        assert!(Integrand::parse("sin(z)").is_err());
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), Complex64::new(0.3, 0.1));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3-2e-1i").unwrap(),
            Complex64::new(1e-3, -0.2)
        );
    }

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let f = Integrand::Gaussian;
        let z = Complex64::new(0.4, -0.3);
        let h = 1e-5;
        let dx = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        let dy =
            (f.eval(z + Complex64::new(0.0, h)) - f.eval(z - Complex64::new(0.0, h))) / (2.0 * h);
        let dz = (dx - Complex64::i() * dy) / 2.0;
        let dzb = (dx + Complex64::i() * dy) / 2.0;
        assert!((f.eval_disk(1, 0, Disk::exact(z)).center - dz).norm() < 1e-9);
        assert!((f.eval_disk(0, 1, Disk::exact(z)).center - dzb).norm() < 1e-9);
        // d_z d_zbar e^{-z zbar} = (z zbar - 1) e^{-z zbar}
        let zz = z.norm_sqr();
        let want = (zz - 1.0) * (-zz).exp();
        assert!((f.eval_disk(1, 1, Disk::exact(z)).center - want).norm() < 1e-15);
    }

    #[test]
    fn disk_encloses_values() {
        let f = Integrand::Exp(Complex64::new(0.25, 0.0));
        let d = Disk::new(Complex64::new(0.5, 0.2), 0.1);
        let e = f.eval_disk(0, 0, d);
        for k in 0..16 {
            let w = d.center + Complex64::from_polar(0.1, k as f64);
            assert!(e.contains(f.eval(w)));
        }
    }
}
