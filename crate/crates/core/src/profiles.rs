//! Profile functions `phi : Z(p^inf) -> C` driving the map family.
//!
//! Profiles are evaluated on exact fractional digit strings. A digit slice is
//! always ordered from least to most significant, so the last element is the
//! digit at `p^{-1}`; missing low digits are zero.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PadicFraction;

/// Largest table or enumeration (in entries) the diagnostics will walk.
pub const MAX_ENUMERATION: u64 = 1 << 24;

/// Digit dependence of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Depth {
    Finite(u32),
    Infinite,
}

impl Depth {
    pub fn finite(self) -> Option<u32> {
        match self {
            Depth::Finite(m) => Some(m),
            Depth::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `phi(x) = x_{-1}`.
    Digit,
    /// `phi(x) = x_{-1} / (p - 1)`.
    DigitNormalized,
    /// `phi(x) = (exp(2 pi i {x}) - 1) / 2`, scaled so that `|phi| <= 1`.
    Exponential,
    /// `[phi]_m(x) = phi(p^{-m} [p^m x])`.
    Truncated { inner: Box<Profile>, m: u32 },
    /// Values on `l / p^m`, indexed by `l`.
    Tabulated { m: u32, values: Vec<Complex64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    base: u32,
    kind: ProfileKind,
    sup_bound: f64,
}

/// Estimate of `nu[phi]` over fractions with denominator up to `p^depth`.
///
/// `value` is the enumerated infimum; the true infimum lies in
/// `[value - uncertainty, value]`, and `uncertainty == 0` when `exact`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuEstimate {
    pub value: f64,
    pub uncertainty: f64,
    pub exact: bool,
    pub depth: u32,
}

impl NuEstimate {
    pub fn lower(&self) -> f64 {
        (self.value - self.uncertainty).max(0.0)
    }
}

/// Sampled and certified values of a sup-distance between two profiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusReport {
    /// Max over the probe set, a lower bound.
    pub sampled: f64,
    /// Certified upper bound, `inf` if none is known.
    pub upper: f64,
    pub probe_depth: u32,
}

/// A period-1 function on the reals, the form in which profiles enter the
/// solenoid maps.
pub trait PeriodicFunction: Send + Sync {
    fn value(&self, t: f64) -> Complex64;
    fn sup_bound(&self) -> f64;
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    Ok(())
}

/// Number of low digits that can still move an `f64` fraction.
fn significant_digits(base: u32) -> usize {
    (62.0 / (base as f64).log2()).ceil() as usize + 1
}

fn exponential_at(t: f64) -> Complex64 {
    let (sn, cs) = (PI * t).sin_cos();
    Complex64::new(-sn * sn, sn * cs)
}

impl Profile {
    pub fn digit(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(Self {
            base,
            kind: ProfileKind::Digit,
            sup_bound: (base - 1) as f64,
        })
    }

    pub fn digit_normalized(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(Self {
            base,
            kind: ProfileKind::DigitNormalized,
            sup_bound: 1.0,
        })
    }

    pub fn exponential(base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(Self {
            base,
            kind: ProfileKind::Exponential,
            sup_bound: 1.0,
        })
    }

    /// Profile with explicit values on `l / p^m`, `l = 0 .. p^m`.
    pub fn tabulated(base: u32, m: u32, values: Vec<Complex64>) -> Result<Self> {
        check_base(base)?;
        let expected = (base as u64)
            .checked_pow(m)
            .filter(|&n| n <= MAX_ENUMERATION)
            .ok_or_else(|| Error::Overflow(format!("table of {base}^{m} entries")))?;
        if values.len() as u64 != expected {
            return Err(Error::Invalid(format!(
                "table for denominator {base}^{m} needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("table has non-finite values".into()));
        }
        let sup_bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Self {
            base,
            kind: ProfileKind::Tabulated { m, values },
            sup_bound,
        })
    }

    /// The constant profile.
    pub fn constant(base: u32, value: Complex64) -> Result<Self> {
        Self::tabulated(base, 0, vec![value])
    }

    /// Loads a table from CSV rows `numerator,denominator,re,im`. Every
    /// fraction `l / p^M` (with `p^M` the largest denominator present) must be
    /// determined, either directly or through a coarser row in lowest terms.
    pub fn from_csv(base: u32, path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(base, file)
    }

    pub fn from_csv_reader(base: u32, reader: impl std::io::Read) -> Result<Self> {
        check_base(base)?;
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<(PadicFraction, Complex64)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(Error::Invalid(format!(
                    "profile table row {} has {} fields, expected 4",
                    line + 1,
                    rec.len()
                )));
            }
            let num = rec[0].parse::<u128>();
            if num.is_err() && line == 0 {
                continue; // header
            }
            let bad = |what: &str| Error::Invalid(format!("row {}: bad {what}", line + 1));
            let num = num.map_err(|_| bad("numerator"))?;
            let den = rec[1].parse::<u128>().map_err(|_| bad("denominator"))?;
            let re = rec[2].parse::<f64>().map_err(|_| bad("re"))?;
            let im = rec[3].parse::<f64>().map_err(|_| bad("im"))?;
            if num >= den {
                return Err(Error::Invalid(format!(
                    "row {}: {num}/{den} is not in [0, 1)",
                    line + 1
                )));
            }
            rows.push((PadicFraction::new(base, num, den)?, Complex64::new(re, im)));
        }
        if rows.is_empty() {
            return Err(Error::Invalid("empty profile table".into()));
        }
        let m = rows.iter().map(|(q, _)| q.exponent()).max().unwrap_or(0);
        let size = (base as u64)
            .checked_pow(m)
            .filter(|&n| n <= MAX_ENUMERATION)
            .ok_or_else(|| Error::Overflow(format!("table of {base}^{m} entries")))?
            as usize;
        let mut values: Vec<Option<Complex64>> = vec![None; size];
        for (q, v) in &rows {
            let scale = (base as u128).pow(m - q.exponent());
            let idx = (q.numerator() * scale) as usize;
            match values[idx] {
                Some(old) if old != *v => {
                    return Err(Error::Invalid(format!(
                        "conflicting values for {}/{}^{}",
                        q.numerator(),
                        base,
                        q.exponent()
                    )))
                }
                _ => values[idx] = Some(*v),
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(l, v)| {
                v.ok_or_else(|| Error::Invalid(format!("table has no value for {l}/{base}^{m}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::tabulated(base, m, values)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Declared bound on `|phi|`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Replaces the declared sup bound after checking it on every fraction with
    /// denominator up to `p^probe_depth`.
    pub fn with_sup_bound(mut self, declared: f64, probe_depth: u32) -> Result<Self> {
        let observed = self.sampled_sup(probe_depth)?;
        if !(declared >= observed) {
            return Err(Error::Invalid(format!(
                "declared sup bound {declared} is below sampled sup {observed}"
            )));
        }
        self.sup_bound = declared;
        Ok(self)
    }

    /// Largest `|phi(q)|` over fractions with denominator `p^probe_depth`.
    pub fn sampled_sup(&self, probe_depth: u32) -> Result<f64> {
        let mut best = 0.0f64;
        for_each_fraction(self.base, probe_depth, |digits| {
            best = best.max(self.eval_digits(digits).norm());
        })?;
        Ok(best)
    }

    /// Short name used in manifests and CLI flags.
    pub fn name(&self) -> String {
        match &self.kind {
            ProfileKind::Digit => "digit".into(),
            ProfileKind::DigitNormalized => "digit-normalized".into(),
            ProfileKind::Exponential => "exponential".into(),
            ProfileKind::Truncated { inner, m } => format!("{}@{m}", inner.name()),
            ProfileKind::Tabulated { m, .. } => format!("table{m}"),
        }
    }

    pub fn depth(&self) -> Depth {
        match &self.kind {
            ProfileKind::Digit | ProfileKind::DigitNormalized => Depth::Finite(1),
            ProfileKind::Exponential => Depth::Infinite,
            ProfileKind::Truncated { inner, m } => match inner.depth() {
                Depth::Finite(k) => Depth::Finite(k.min(*m)),
                Depth::Infinite => Depth::Finite(*m),
            },
            ProfileKind::Tabulated { m, .. } => Depth::Finite(*m),
        }
    }

    /// Number of trailing fractional digits that `eval_digits` actually reads.
    pub fn window(&self) -> usize {
        match self.depth() {
            Depth::Finite(m) => m as usize,
            Depth::Infinite => significant_digits(self.base),
        }
    }

    /// `phi(0)`.
    pub fn phi_zero(&self) -> Complex64 {
        self.eval_digits(&[])
    }

    /// Upper bound on `sup |phi(a) - phi(b)|`.
    pub fn oscillation_bound(&self) -> f64 {
        match &self.kind {
            ProfileKind::Digit => (self.base - 1) as f64,
            ProfileKind::DigitNormalized | ProfileKind::Exponential => 1.0,
            ProfileKind::Truncated { inner, .. } => inner.oscillation_bound(),
            ProfileKind::Tabulated { values, .. } => {
                if values.len() > 4096 {
                    return 2.0 * self.sup_bound;
                }
                let mut osc = 0.0f64;
                for (i, a) in values.iter().enumerate() {
                    for b in &values[i + 1..] {
                        osc = osc.max((a - b).norm());
                    }
                }
                osc
            }
        }
    }

    /// Absolute error of one `eval_digits` call relative to the exact value.
    pub fn eval_error(&self) -> f64 {
        match &self.kind {
            ProfileKind::Exponential => 8.0 * f64::EPSILON,
            ProfileKind::Truncated { inner, .. } => inner.eval_error(),
            _ => 0.0,
        }
    }

    /// `phi` of the fraction whose digits (least significant first) are given;
    /// the last element is the digit at `p^{-1}`.
    pub fn eval_digits(&self, digits: &[u32]) -> Complex64 {
        match &self.kind {
            ProfileKind::Digit => Complex64::new(digits.last().copied().unwrap_or(0) as f64, 0.0),
            ProfileKind::DigitNormalized => Complex64::new(
                digits.last().copied().unwrap_or(0) as f64 / (self.base - 1) as f64,
                0.0,
            ),
            ProfileKind::Exponential => {
                let k = significant_digits(self.base).min(digits.len());
                let p = self.base as f64;
                let t = digits[digits.len() - k..]
                    .iter()
                    .fold(0.0, |t, &d| (t + d as f64) / p);
                exponential_at(t)
            }
            ProfileKind::Truncated { inner, m } => {
                let k = (*m as usize).min(digits.len());
                inner.eval_digits(&digits[digits.len() - k..])
            }
            ProfileKind::Tabulated { m, values } => {
                let k = (*m as usize).min(digits.len());
                let idx = digits[digits.len() - k..]
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &d| acc * self.base as usize + d as usize);
                // missing low digits are zeros, i.e. a shift of the index
                let idx = idx * (self.base as usize).pow(*m - k as u32);
                values[idx]
            }
        }
    }

    /// `phi(q)` for an exact fraction.
    pub fn eval(&self, q: &PadicFraction) -> Result<Complex64> {
        if q.base() != self.base {
            return Err(Error::BaseMismatch(self.base, q.base()));
        }
        Ok(self.eval_digits(&q.digits_low_to_high()))
    }

    /// `phi(num / den)`; `den` must be a power of the base.
    pub fn eval_ratio(&self, num: u128, den: u128) -> Result<Complex64> {
        self.eval(&PadicFraction::new(self.base, num, den)?)
    }

    /// `[phi]_m`.
    pub fn truncate(&self, m: u32) -> Profile {
        if let Depth::Finite(k) = self.depth() {
            if k <= m {
                return self.clone();
            }
        }
        let (inner, m) = match &self.kind {
            ProfileKind::Truncated { inner, m: k } => (inner.clone(), m.min(*k)),
            _ => (Box::new(self.clone()), m),
        };
        let sup_bound = inner.sup_bound;
        Profile {
            base: self.base,
            kind: ProfileKind::Truncated { inner, m },
            sup_bound,
        }
    }

    /// `nu[phi]` over `tau` with denominator up to `p^depth`.
    pub fn nu(&self, depth: u32) -> Result<NuEstimate> {
        let p = self.base;
        let mut best = f64::INFINITY;
        let mut shifted = Vec::new();
        for_each_fraction(p, depth, |digits| {
            let base_val = self.eval_digits(digits);
            shifted.clear();
            shifted.extend_from_slice(digits);
            if shifted.is_empty() {
                shifted.push(0);
            }
            let top = *shifted.last().unwrap();
            for a in 1..p {
                *shifted.last_mut().unwrap() = (top + a) % p;
                let d = (self.eval_digits(&shifted) - base_val).norm();
                if d < best {
                    best = d;
                }
            }
        })?;
        let (exact, uncertainty) = match self.depth() {
            Depth::Finite(m) if m <= depth.max(1) => (true, 0.0),
            _ => (false, 2.0 * self.p_continuity_modulus(depth, depth)?.upper),
        };
        Ok(NuEstimate {
            value: best,
            uncertainty,
            exact,
            depth,
        })
    }

    /// `nu` at the depth where it is exact, or at `fallback` for
    /// infinite-depth profiles.
    pub fn nu_default(&self, fallback: u32) -> Result<NuEstimate> {
        match self.depth() {
            Depth::Finite(m) => self.nu(m.max(1)),
            Depth::Infinite => self.nu(fallback),
        }
    }

    /// `sigma = nu / (1 + nu)` from the enumerated `nu`.
    pub fn sigma(&self, fallback: u32) -> Result<f64> {
        let nu = self.nu_default(fallback)?.value;
        Ok(nu / (1.0 + nu))
    }

    /// `||phi - [phi]_m||` sampled on denominators up to `p^probe_depth`, with
    /// a certified upper bound.
    pub fn p_continuity_modulus(&self, m: u32, probe_depth: u32) -> Result<ModulusReport> {
        let upper = self.modulus_upper(m);
        let probe = probe_depth.max(m);
        let truncated = self.truncate(m);
        let sampled = sup_distance_sampled(self, &truncated, probe)?;
        let upper = match self.depth() {
            Depth::Finite(k) if k <= probe => sampled,
            _ => upper.max(sampled),
        };
        Ok(ModulusReport {
            sampled,
            upper,
            probe_depth: probe,
        })
    }

    fn modulus_upper(&self, m: u32) -> f64 {
        if let Depth::Finite(k) = self.depth() {
            if k <= m {
                return 0.0;
            }
        }
        match &self.kind {
            // |e^{2 pi i t} - e^{2 pi i t'}| / 2 <= pi |t - t'| < pi p^{-m}
            ProfileKind::Exponential => PI * (self.base as f64).powi(-(m as i32)),
            ProfileKind::Truncated { inner, .. } => inner.modulus_upper(m),
            _ => self.oscillation_bound(),
        }
    }

    /// The derivative `phi'` as a periodic function, when `phi` is smooth.
    pub fn derivative(&self) -> Result<ProfileDerivative> {
        match &self.kind {
            ProfileKind::Exponential => Ok(ProfileDerivative { zero: false }),
            ProfileKind::Tabulated { m: 0, .. } => Ok(ProfileDerivative { zero: true }),
            _ => Err(Error::UnsupportedProfile(format!(
                "{} is not continuously differentiable",
                self.name()
            ))),
        }
    }
}

impl PeriodicFunction for Profile {
    fn value(&self, t: f64) -> Complex64 {
        let frac = t - t.floor();
        match &self.kind {
            ProfileKind::Exponential => exponential_at(frac),
            _ => {
                // read off the leading digits of the real fraction
                let k = self.window();
                let p = self.base as f64;
                let mut digits = vec![0u32; k];
                let mut r = frac;
                for slot in digits.iter_mut().rev() {
                    r *= p;
                    let d = (r.floor() as u32).min(self.base - 1);
                    *slot = d;
                    r -= d as f64;
                }
                self.eval_digits(&digits)
            }
        }
    }

    fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

/// `phi'` for the smooth built-in profiles.
#[derive(Clone, Copy, Debug)]
pub struct ProfileDerivative {
    zero: bool,
}

impl PeriodicFunction for ProfileDerivative {
    fn value(&self, t: f64) -> Complex64 {
        if self.zero {
            return Complex64::new(0.0, 0.0);
        }
        // d/dt (e^{2 pi i t} - 1) / 2
        let (sn, cs) = (2.0 * PI * t).sin_cos();
        Complex64::new(-PI * sn, PI * cs)
    }

    fn sup_bound(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            PI
        }
    }
}

/// Calls `f` with the digits (least significant first) of every `l / p^depth`.
pub fn for_each_fraction(base: u32, depth: u32, mut f: impl FnMut(&[u32])) -> Result<()> {
    let count = (base as u64)
        .checked_pow(depth)
        .filter(|&n| n <= MAX_ENUMERATION)
        .ok_or_else(|| Error::Overflow(format!("{base}^{depth} probe fractions")))?;
    let mut digits = vec![0u32; depth as usize];
    for _ in 0..count {
        f(&digits);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                break;
            }
            *d = 0;
        }
    }
    Ok(())
}

fn sup_distance_sampled(a: &Profile, b: &Profile, probe_depth: u32) -> Result<f64> {
    let mut best = 0.0f64;
    for_each_fraction(a.base, probe_depth, |digits| {
        best = best.max((a.eval_digits(digits) - b.eval_digits(digits)).norm());
    })?;
    Ok(best)
}

/// `||phi1 - phi2||` over `Z(p^inf)`: sampled on denominators up to
/// `p^probe_depth`, certified when both profiles have finite depth within the
/// probe or when one is a truncation of the other.
pub fn sup_distance(a: &Profile, b: &Profile, probe_depth: u32) -> Result<ModulusReport> {
    if a.base != b.base {
        return Err(Error::BaseMismatch(a.base, b.base));
    }
    let sampled = sup_distance_sampled(a, b, probe_depth)?;
    let within = |p: &Profile| matches!(p.depth(), Depth::Finite(k) if k <= probe_depth);
    let upper = if a == b {
        0.0
    } else if within(a) && within(b) {
        sampled
    } else if let Some(m) = truncation_level(a, b) {
        a.modulus_upper(m).max(sampled)
    } else if let Some(m) = truncation_level(b, a) {
        b.modulus_upper(m).max(sampled)
    } else {
        f64::INFINITY
    };
    Ok(ModulusReport {
        sampled,
        upper,
        probe_depth,
    })
}

/// `Some(m)` when `b == [a]_m`.
fn truncation_level(a: &Profile, b: &Profile) -> Option<u32> {
    match &b.kind {
        ProfileKind::Truncated { inner, m } if **inner == *a => Some(*m),
        _ => None,
    }
}
