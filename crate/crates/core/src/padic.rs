//! Finite-precision digit words over `Q_p` (and mixed-radix `Z_{a}`), balls,
//! and exact Haar-measure bookkeeping.
//!
//! A [`DigitWord`] stores digits on a window `[v0, v0 + N)`. Digits below the
//! window are zero, digits above it are unknown. Every operation states which
//! digits it consumes so that truncation errors downstream can be certified.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used for Haar weights and fractional parts.
pub type Rational = Ratio<i128>;

/// Default upper limit on output indices produced by [`j_map`].
pub const DEFAULT_J_WINDOW: u64 = 1 << 20;

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    Ok(())
}

/// `base^exp` as an exact `i128`, or an overflow error.
pub fn pow_i128(base: u32, exp: u32) -> Result<i128> {
    (base as i128)
        .checked_pow(exp)
        .ok_or_else(|| Error::Overflow(format!("{base}^{exp} exceeds i128")))
}

/// Haar volume `p^{-level}` of a ball at `level`, as an exact rational.
pub fn haar_volume(base: u32, level: i64) -> Result<Rational> {
    let e = u32::try_from(level.unsigned_abs())
        .map_err(|_| Error::Overflow(format!("level {level}")))?;
    let pk = pow_i128(base, e)?;
    Ok(if level >= 0 {
        Ratio::new(1, pk)
    } else {
        Ratio::from_integer(pk)
    })
}

/// A finite window of p-adic digits.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitWord {
    base: u32,
    v0: i64,
    digits: Vec<u32>,
}

impl fmt::Debug for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitWord(p={}, v0={}, [", self.base, self.v0)?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "])")
    }
}

impl DigitWord {
    /// Builds a word with `digits[k]` at index `v0 + k`.
    pub fn new(base: u32, v0: i64, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        for (k, &d) in digits.iter().enumerate() {
            if d >= base {
                return Err(Error::DigitOutOfRange {
                    index: v0 + k as i64,
                    digit: d as u64,
                    base: base as u64,
                });
            }
        }
        Ok(Self { base, v0, digits })
    }

    /// The all-zero word on `[v0, v0 + len)`.
    pub fn zero(base: u32, v0: i64, len: usize) -> Result<Self> {
        check_base(base)?;
        Ok(Self {
            base,
            v0,
            digits: vec![0; len],
        })
    }

    /// The p-adic expansion of an integer (negative values wrap as in `Z_p`),
    /// on the window `[0, len)`.
    pub fn from_i64(base: u32, value: i64, len: usize) -> Result<Self> {
        check_base(base)?;
        let p = base as i128;
        let mut v = value as i128;
        let mut digits = Vec::with_capacity(len);
        for _ in 0..len {
            digits.push(v.rem_euclid(p) as u32);
            v = v.div_euclid(p);
        }
        Ok(Self {
            base,
            v0: 0,
            digits,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Lowest represented index.
    pub fn v0(&self) -> i64 {
        self.v0
    }

    /// Number of represented digits.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// One past the highest represented index.
    pub fn top(&self) -> i64 {
        self.v0 + self.digits.len() as i64
    }

    /// Digits in window order (index `v0` first).
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at `index`: zero below the window, `None` above it.
    pub fn digit(&self, index: i64) -> Option<u32> {
        if index < self.v0 {
            Some(0)
        } else if index < self.top() {
            Some(self.digits[(index - self.v0) as usize])
        } else {
            None
        }
    }

    /// Index of the lowest nonzero digit; `None` stands for `+inf` (no nonzero
    /// digit in the window).
    pub fn valuation(&self) -> Option<i64> {
        self.digits
            .iter()
            .position(|&d| d != 0)
            .map(|k| self.v0 + k as i64)
    }

    /// `base^{-valuation}`, and `0` for the zero word.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Some(v) => (self.base as f64).powi(-(v as i32)),
            None => 0.0,
        }
    }

    /// Sum of the digits with negative index, `sum d_n p^n` for `n < 0`.
    pub fn frac_part(&self) -> Result<Rational> {
        if self.v0 <= -64 {
            return Err(Error::Window(format!(
                "fractional part needs v0 > -64, got {}",
                self.v0
            )));
        }
        if self.v0 >= 0 {
            return Ok(Rational::zero());
        }
        let den = pow_i128(self.base, (-self.v0) as u32)?;
        let mut num: i128 = 0;
        let mut scale: i128 = 1;
        for idx in self.v0..0.min(self.top()) {
            let d = self.digits[(idx - self.v0) as usize] as i128;
            num = d
                .checked_mul(scale)
                .and_then(|t| t.checked_add(num))
                .ok_or_else(|| Error::Overflow("fractional part".into()))?;
            scale *= self.base as i128;
        }
        Ok(Ratio::new(num, den))
    }

    /// The word with all negative-index digits cleared.
    pub fn integer_part(&self) -> DigitWord {
        let lo = self.v0.max(0);
        let hi = self.top().max(lo);
        let digits = (lo..hi)
            .map(|i| self.digit(i).unwrap_or(0))
            .collect::<Vec<_>>();
        DigitWord {
            base: self.base,
            v0: lo,
            digits,
        }
    }

    /// The finite sum `sum_k digits[k] p^{v0+k}` (unknown digits read as zero).
    pub fn truncated_value(&self) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (k, &d) in self.digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let idx = self.v0 + k as i64;
            let w = haar_volume(self.base, -idx)?;
            acc += w * Rational::from_integer(d as i128);
        }
        Ok(acc)
    }

    /// Multiplication by `p^k`: digits move up by `k`.
    pub fn shift(&self, k: i64) -> DigitWord {
        DigitWord {
            base: self.base,
            v0: self.v0 + k,
            digits: self.digits.clone(),
        }
    }

    /// Extends the window with zero digits up to `top` (no-op if already there).
    pub fn extend_zeros(&self, top: i64) -> DigitWord {
        let mut w = self.clone();
        if top > w.top() {
            w.digits.resize((top - w.v0) as usize, 0);
        }
        w
    }

    /// Forgets every digit at index `>= top`.
    pub fn truncate(&self, top: i64) -> DigitWord {
        let mut w = self.clone();
        let keep = (top - w.v0).clamp(0, w.digits.len() as i64) as usize;
        w.digits.truncate(keep);
        w
    }

    fn combine(&self, other: &DigitWord, negate: bool) -> Result<DigitWord> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        let lo = self.v0.min(other.v0);
        let hi = self.top().min(other.top()).max(lo);
        let p = self.base as i64;
        let mut carry = 0i64;
        let mut digits = Vec::with_capacity((hi - lo) as usize);
        for i in lo..hi {
            let a = self.digit(i).unwrap_or(0) as i64;
            let b = other.digit(i).unwrap_or(0) as i64;
            let t = if negate { a - b } else { a + b } + carry;
            digits.push(t.rem_euclid(p) as u32);
            carry = t.div_euclid(p);
        }
        Ok(DigitWord {
            base: self.base,
            v0: lo,
            digits,
        })
    }

    /// Digitwise sum with carry on the common known window.
    pub fn add(&self, other: &DigitWord) -> Result<DigitWord> {
        self.combine(other, false)
    }

    /// Digitwise difference with borrow on the common known window.
    pub fn sub(&self, other: &DigitWord) -> Result<DigitWord> {
        self.combine(other, true)
    }
}

/// Digit `n` of `x` goes to index `2n`, digit `n` of `y` to index `2n + 1`.
pub fn interleave_q(x: &DigitWord, y: &DigitWord) -> Result<DigitWord> {
    if x.base != y.base {
        return Err(Error::BaseMismatch(x.base, y.base));
    }
    let lo = 2 * x.v0.min(y.v0);
    let hi = (2 * x.top().min(y.top())).max(lo);
    let digits = (lo..hi)
        .map(|i| {
            let n = i.div_euclid(2);
            let src = if i.rem_euclid(2) == 0 { x } else { y };
            src.digit(n).unwrap_or(0)
        })
        .collect();
    Ok(DigitWord {
        base: x.base,
        v0: lo,
        digits,
    })
}

/// Inverse of [`interleave_q`].
pub fn deinterleave_q(z: &DigitWord) -> (DigitWord, DigitWord) {
    let v0 = z.v0.div_euclid(2);
    let x_top = (z.top() + 1).div_euclid(2).max(v0);
    let y_top = z.top().div_euclid(2).max(v0);
    let pick = |parity: i64, top: i64| DigitWord {
        base: z.base,
        v0,
        digits: (v0..top)
            .map(|n| z.digit(2 * n + parity).unwrap_or(0))
            .collect(),
    };
    (pick(0, x_top), pick(1, y_top))
}

/// `Theta_K`: digit `n` moves to index `K n`, intermediate digits are zero.
pub fn theta(x: &DigitWord, k: u32) -> Result<DigitWord> {
    if k == 0 {
        return Err(Error::Invalid("theta needs K >= 1".into()));
    }
    let k = k as i64;
    let lo = k * x.v0;
    let hi = k * x.top();
    let mut digits = vec![0u32; (hi - lo) as usize];
    for (j, &d) in x.digits.iter().enumerate() {
        digits[(k * j as i64) as usize] = d;
    }
    Ok(DigitWord {
        base: x.base,
        v0: lo,
        digits,
    })
}

/// `exp_base^{(m)}(n)` (an `m`-fold tower), `None` on overflow or when the
/// value exceeds `limit`.
pub fn iterated_exp(base: u32, m: u32, n: u64, limit: u64) -> Option<u64> {
    let mut t = n;
    for _ in 0..m {
        let e = u32::try_from(t).ok()?;
        t = (base as u64).checked_pow(e)?;
        if t > limit {
            return None;
        }
    }
    (t <= limit).then_some(t)
}

/// `J^m`: digit `n` moves to index `exp_p^{(m)}(n)`; only words in `Z_p` are
/// accepted. The output window is `[0, exp_p^{(m)}(top))`; any digit index
/// whose target exceeds `max_index` is reported.
pub fn j_map(x: &DigitWord, m: u32, max_index: u64) -> Result<DigitWord> {
    if m == 0 {
        return Err(Error::Invalid("J^m needs m >= 1".into()));
    }
    if let Some(v) = x.valuation() {
        if v < 0 {
            return Err(Error::Window(format!(
                "J^m is defined on Z_p only; nonzero digit at index {v}"
            )));
        }
    }
    let top = x.top().max(0) as u64;
    let mut targets = Vec::with_capacity(top as usize);
    for n in 0..=top {
        match iterated_exp(x.base, m, n, max_index) {
            Some(t) => targets.push(t),
            None => {
                return Err(Error::WindowOverflow {
                    digit_index: n as i64,
                    target: format!("exp_{}^({m})({n})", x.base),
                    limit: max_index,
                })
            }
        }
    }
    let end = targets[top as usize] as usize;
    let mut digits = vec![0u32; end];
    for n in 0..top as usize {
        digits[targets[n] as usize] = x.digit(n as i64).unwrap_or(0);
    }
    Ok(DigitWord {
        base: x.base,
        v0: 0,
        digits,
    })
}

/// An element `num / p^exp` of `Z(p^inf) = {l / p^k : 0 <= l < p^k}`, kept in
/// lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicFraction {
    base: u32,
    num: u128,
    exp: u32,
}

impl PadicFraction {
    /// `num / den` reduced mod 1; `den` must be a power of `base`.
    pub fn new(base: u32, num: u128, den: u128) -> Result<Self> {
        check_base(base)?;
        if den == 0 {
            return Err(Error::NotPowerOfBase(den, base));
        }
        let mut exp = 0u32;
        let mut d = den;
        while d.is_multiple_of(base as u128) {
            d /= base as u128;
            exp += 1;
        }
        if d != 1 {
            return Err(Error::NotPowerOfBase(den, base));
        }
        Ok(Self::reduced(base, num % den, exp))
    }

    /// Builds `sum_j digits[j] p^{-(j+1)}` from most-significant-first digits.
    pub fn from_digits(base: u32, msd_first: &[u32]) -> Result<Self> {
        check_base(base)?;
        let mut num: u128 = 0;
        for (j, &d) in msd_first.iter().enumerate() {
            if d >= base {
                return Err(Error::DigitOutOfRange {
                    index: -(j as i64) - 1,
                    digit: d as u64,
                    base: base as u64,
                });
            }
            num = num
                .checked_mul(base as u128)
                .and_then(|t| t.checked_add(d as u128))
                .ok_or_else(|| Error::Overflow("fraction numerator".into()))?;
        }
        Ok(Self::reduced(base, num, msd_first.len() as u32))
    }

    fn reduced(base: u32, mut num: u128, mut exp: u32) -> Self {
        if num == 0 {
            return Self {
                base,
                num: 0,
                exp: 0,
            };
        }
        while exp > 0 && num.is_multiple_of(base as u128) {
            num /= base as u128;
            exp -= 1;
        }
        Self { base, num, exp }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    /// `k` in the lowest-terms denominator `p^k`.
    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// Digits of the fraction ordered from least to most significant; the last
    /// entry is the digit at `p^{-1}`.
    pub fn digits_low_to_high(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.exp as usize);
        let mut n = self.num;
        for _ in 0..self.exp {
            out.push((n % self.base as u128) as u32);
            n /= self.base as u128;
        }
        out
    }

    /// `[q]^m = p^{-m} [p^m q]`: keeps the top `m` fractional digits.
    pub fn truncate(&self, m: u32) -> Self {
        if self.exp <= m {
            return *self;
        }
        let drop = self.exp - m;
        let num = self.num / (self.base as u128).pow(drop);
        Self::reduced(self.base, num, m)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.base as f64).powi(self.exp as i32)
    }

    pub fn to_rational(&self) -> Result<Rational> {
        let den = pow_i128(self.base, self.exp)?;
        Ok(Ratio::new(self.num as i128, den))
    }
}

/// The closed-open ball `{x : |x - center|_p <= p^{-level}}`; membership only
/// looks at digits with index `< level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    center: DigitWord,
    level: i64,
}

impl Ball {
    /// The center must know every digit below `level`; digits at or above it are
    /// dropped.
    pub fn new(center: DigitWord, level: i64) -> Result<Self> {
        if center.top() < level {
            return Err(Error::Window(format!(
                "ball center known up to index {} but level is {level}",
                center.top()
            )));
        }
        let lo = center.v0.min(level);
        let center = DigitWord {
            base: center.base,
            v0: lo,
            digits: (lo..level).map(|i| center.digit(i).unwrap_or(0)).collect(),
        };
        Ok(Self { center, level })
    }

    /// `Z_p`.
    pub fn unit(base: u32) -> Result<Self> {
        Self::new(DigitWord::zero(base, 0, 0)?, 0)
    }

    /// `Lambda_N = p^{-N} Z_p = {|x|_p <= p^N}`.
    pub fn lambda(base: u32, n: i64) -> Result<Self> {
        Self::new(DigitWord::zero(base, -n, 0)?, -n)
    }

    pub fn center(&self) -> &DigitWord {
        &self.center
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn base(&self) -> u32 {
        self.center.base
    }

    /// `chi(B) = p^{-level}`.
    pub fn haar_measure(&self) -> Result<Rational> {
        haar_volume(self.base(), self.level)
    }

    /// `None` when `x` does not know all digits below `level`.
    pub fn contains(&self, x: &DigitWord) -> Option<bool> {
        if x.base != self.base() || x.top() < self.level {
            return None;
        }
        let lo = x.v0.min(self.center.v0);
        Some((lo..self.level).all(|i| x.digit(i) == self.center.digit(i)))
    }

    /// Whether `other` is contained in `self`.
    pub fn includes(&self, other: &Ball) -> bool {
        other.level >= self.level && self.contains(&other.center) == Some(true)
    }

    /// Enumerates the `p^depth` sub-balls at level `level + depth`, in
    /// lexicographic order of the new digits (lowest index varies slowest).
    pub fn sub_balls(&self, depth: u32) -> Result<SubBalls> {
        let count = (self.base() as u128)
            .checked_pow(depth)
            .filter(|&c| c <= u64::MAX as u128)
            .ok_or_else(|| Error::Overflow(format!("{}^{depth} sub-balls", self.base())))?;
        let weight = haar_volume(self.base(), self.level + depth as i64)?;
        Ok(SubBalls {
            parent: self.clone(),
            depth,
            next: 0,
            count: count as u64,
            weight,
        })
    }
}

/// Iterator over sub-balls with their Haar weights; see [`Ball::sub_balls`].
pub struct SubBalls {
    parent: Ball,
    depth: u32,
    next: u64,
    count: u64,
    weight: Rational,
}

impl Iterator for SubBalls {
    type Item = (Ball, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.count {
            return None;
        }
        let p = self.parent.base() as u64;
        let mut c = self.next;
        self.next += 1;
        let mut extra = vec![0u32; self.depth as usize];
        for slot in extra.iter_mut().rev() {
            *slot = (c % p) as u32;
            c /= p;
        }
        let mut digits = self.parent.center.digits.clone();
        digits.extend_from_slice(&extra);
        let center = DigitWord {
            base: self.parent.base(),
            v0: self.parent.center.v0,
            digits,
        };
        let ball = Ball {
            center,
            level: self.parent.level + self.depth as i64,
        };
        Some((ball, self.weight))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

/// A finite union of pairwise disjoint balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    balls: Vec<Ball>,
}

impl Region {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::Invalid("empty region".into()));
        }
        let base = balls[0].base();
        for (i, a) in balls.iter().enumerate() {
            if a.base() != base {
                return Err(Error::BaseMismatch(base, a.base()));
            }
            for b in &balls[i + 1..] {
                if a.includes(b) || b.includes(a) {
                    return Err(Error::Invalid("region balls overlap".into()));
                }
            }
        }
        Ok(Self { balls })
    }

    pub fn single(ball: Ball) -> Self {
        Self { balls: vec![ball] }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn base(&self) -> u32 {
        self.balls[0].base()
    }

    pub fn haar_measure(&self) -> Result<Rational> {
        self.balls
            .iter()
            .try_fold(Rational::zero(), |acc, b| Ok(acc + b.haar_measure()?))
    }

    pub fn contains(&self, x: &DigitWord) -> Option<bool> {
        let mut any_unknown = false;
        for b in &self.balls {
            match b.contains(x) {
                Some(true) => return Some(true),
                None => any_unknown = true,
                Some(false) => {}
            }
        }
        if any_unknown {
            None
        } else {
            Some(false)
        }
    }
}

impl From<Ball> for Region {
    fn from(b: Ball) -> Self {
        Region::single(b)
    }
}

/// Every sub-ball `depth` levels below each ball of `region`, with its exact
/// Haar weight.
pub fn enumerate_prefixes(
    region: &Region,
    depth: u32,
) -> Result<impl Iterator<Item = (Ball, Rational)>> {
    let iters = region
        .balls
        .iter()
        .map(|b| b.sub_balls(depth))
        .collect::<Result<Vec<_>>>()?;
    Ok(iters.into_iter().flatten())
}

/// Mixed radix `a_0, a_1, ...` with cached partial products
/// `a^{(n)} = a_0 a_1 ... a_n` (and `a^{(-1)} = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ASequence {
    radices: Vec<u64>,
    products: Vec<u128>,
}

impl ASequence {
    /// Radices are checked to be `>= 2` and the products to fit in `u128`.
    pub fn from_radices(radices: Vec<u64>) -> Result<Self> {
        let mut products = Vec::with_capacity(radices.len());
        let mut acc: u128 = 1;
        for (k, &a) in radices.iter().enumerate() {
            if a < 2 {
                return Err(Error::Invalid(format!("a_{k} = {a} must be >= 2")));
            }
            acc = acc
                .checked_mul(a as u128)
                .ok_or_else(|| Error::Overflow(format!("a^({k}) exceeds u128")))?;
            products.push(acc);
        }
        Ok(Self { radices, products })
    }

    /// `a_k = p` for `k < len`.
    pub fn constant(p: u64, len: usize) -> Result<Self> {
        Self::from_radices(vec![p; len])
    }

    /// `a_k = (k + offset)!` for `k < len`.
    pub fn factorial(offset: u64, len: usize) -> Result<Self> {
        let radices = (0..len as u64)
            .map(|k| {
                (1..=k + offset)
                    .try_fold(1u64, |acc, j| acc.checked_mul(j))
                    .ok_or_else(|| Error::Overflow(format!("({}+{offset})!", k)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_radices(radices)
    }

    /// Number of radices known.
    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    pub fn radix(&self, k: usize) -> u64 {
        self.radices[k]
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// `a^{(n)}`, with `a^{(-1)} = 1`.
    pub fn partial_product(&self, n: i64) -> u128 {
        if n < 0 {
            1
        } else {
            self.products[n as usize]
        }
    }
}

/// A finite word `x_0, x_1, ...` in `Z_{a}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AWord {
    seq: Arc<ASequence>,
    digits: Vec<u64>,
}

impl AWord {
    pub fn new(seq: Arc<ASequence>, digits: Vec<u64>) -> Result<Self> {
        if digits.len() > seq.len() {
            return Err(Error::Window(format!(
                "word of length {} but only {} radices",
                digits.len(),
                seq.len()
            )));
        }
        for (k, &d) in digits.iter().enumerate() {
            if d >= seq.radix(k) {
                return Err(Error::DigitOutOfRange {
                    index: k as i64,
                    digit: d,
                    base: seq.radix(k),
                });
            }
        }
        Ok(Self { seq, digits })
    }

    /// Mixed-radix expansion of an integer (negative values wrap) on `[0, len)`.
    pub fn from_i64(seq: Arc<ASequence>, value: i64, len: usize) -> Result<Self> {
        if len > seq.len() {
            return Err(Error::Window(format!("len {len} > {}", seq.len())));
        }
        let mut v = value as i128;
        let mut digits = Vec::with_capacity(len);
        for k in 0..len {
            let a = seq.radix(k) as i128;
            digits.push(v.rem_euclid(a) as u64);
            v = v.div_euclid(a);
        }
        Ok(Self { seq, digits })
    }

    pub fn sequence(&self) -> &Arc<ASequence> {
        &self.seq
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Index of the lowest nonzero digit, `None` for the zero word.
    pub fn valuation(&self) -> Option<i64> {
        self.digits.iter().position(|&d| d != 0).map(|k| k as i64)
    }

    /// `(x)_a^n = sum_{k=0}^n x_k a^{(k-1)}`, exact. Requires `n < len`.
    pub fn partial_value(&self, n: usize) -> Result<u128> {
        if n >= self.digits.len() {
            return Err(Error::Window(format!(
                "(x)_a^{n} needs digit {n}, word has {}",
                self.digits.len()
            )));
        }
        Ok((0..=n)
            .map(|k| self.digits[k] as u128 * self.seq.partial_product(k as i64 - 1))
            .sum())
    }

    /// Adds an integer with carry propagation inside the window.
    pub fn add_integer(&self, n: i64) -> AWord {
        let mut carry = n as i128;
        let mut digits = self.digits.clone();
        for (k, d) in digits.iter_mut().enumerate() {
            let a = self.seq.radix(k) as i128;
            let t = *d as i128 + carry;
            *d = t.rem_euclid(a) as u64;
            carry = t.div_euclid(a);
        }
        AWord {
            seq: self.seq.clone(),
            digits,
        }
    }

    /// All words of length `depth`, each with Haar weight `1 / a^{(depth-1)}`.
    pub fn enumerate_prefixes(
        seq: Arc<ASequence>,
        depth: usize,
    ) -> Result<impl Iterator<Item = (AWord, Rational)>> {
        if depth > seq.len() {
            return Err(Error::Window(format!("depth {depth} > {}", seq.len())));
        }
        let total = seq.partial_product(depth as i64 - 1);
        let total_i = i128::try_from(total).map_err(|_| Error::Overflow("a^(n)".into()))?;
        let weight = Ratio::new(1, total_i);
        Ok((0..total).map(move |c| {
            let mut c = c;
            let digits = (0..depth)
                .map(|k| {
                    let a = seq.radix(k) as u128;
                    let d = (c % a) as u64;
                    c /= a;
                    d
                })
                .collect();
            (
                AWord {
                    seq: seq.clone(),
                    digits,
                },
                weight,
            )
        }))
    }
}

/// Exact `1` as a [`Rational`].
pub fn rational_one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(base: u32, v0: i64, digits: &[u32]) -> DigitWord {
        DigitWord::new(base, v0, digits.to_vec()).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(w(2, 0, &[1, 0, 0]).valuation(), Some(0));
        assert_eq!(DigitWord::from_i64(2, 8, 6).unwrap().valuation(), Some(3));
        assert_eq!(w(3, 0, &[1]).shift(3).valuation(), Some(3));
        assert_eq!(DigitWord::zero(5, -3, 12).unwrap().valuation(), None);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(w(2, 0, &[1]).norm(), 1.0);
        assert_eq!(w(3, -2, &[1, 0, 0]).norm(), 9.0);
        assert_eq!(DigitWord::zero(2, 0, 4).unwrap().norm(), 0.0);
    }

    #[test]
    fn frac_part_examples() {
        assert_eq!(w(2, -1, &[1, 1]).frac_part().unwrap(), Ratio::new(1, 2));
        assert_eq!(w(3, -2, &[2, 0, 1]).frac_part().unwrap(), Ratio::new(2, 9));
        assert_eq!(w(7, 0, &[3, 4]).frac_part().unwrap(), Rational::zero());
        assert_eq!(w(7, 2, &[3, 4]).frac_part().unwrap(), Rational::zero());
        assert!(matches!(
            DigitWord::zero(2, -64, 70).unwrap().frac_part(),
            Err(Error::Window(_))
        ));
    }

    #[test]
    fn bad_digits_rejected() {
        assert!(DigitWord::new(3, 0, vec![0, 3]).is_err());
        assert!(DigitWord::new(1, 0, vec![]).is_err());
    }

    #[test]
    fn shift_examples() {
        let one = w(2, 0, &[1]);
        assert_eq!(
            one.shift(1).truncated_value().unwrap(),
            Rational::from_integer(2)
        );
        assert_eq!(one.shift(0), one);
    }

    #[test]
    fn interleave_examples() {
        let one = DigitWord::from_i64(2, 1, 4).unwrap();
        let zero = DigitWord::from_i64(2, 0, 4).unwrap();
        let z = interleave_q(&one, &zero).unwrap();
        assert_eq!(z.truncated_value().unwrap(), Rational::from_integer(1));
        let z = interleave_q(&one, &one).unwrap();
        assert_eq!(z.truncated_value().unwrap(), Rational::from_integer(3));
        let z = interleave_q(&zero, &zero).unwrap();
        assert_eq!(z.valuation(), None);
    }

    #[test]
    fn theta_examples() {
        let x = DigitWord::from_i64(2, 3, 4).unwrap();
        assert_eq!(theta(&x, 1).unwrap(), x);
        let t = theta(&x, 2).unwrap();
        assert_eq!(t.truncated_value().unwrap(), Rational::from_integer(5));
        let y = DigitWord::from_i64(3, 9, 5).unwrap();
        assert_eq!(theta(&y, 3).unwrap().valuation(), Some(6));
    }

    #[test]
    fn j_map_examples() {
        // digit at n = 2 lands at exp_2(2) = 4
        let x = w(2, 0, &[0, 0, 1]);
        let j = j_map(&x, 1, 1024).unwrap();
        assert_eq!(j.valuation(), Some(4));
        // exp_2(0) = 1
        let x = w(2, 0, &[1, 0]);
        assert_eq!(j_map(&x, 1, 1024).unwrap().valuation(), Some(1));
        let z = DigitWord::zero(2, 0, 5).unwrap();
        assert_eq!(j_map(&z, 1, 1024).unwrap().valuation(), None);
    }

    #[test]
    fn j_map_overflow_names_index() {
        let x = DigitWord::zero(2, 0, 12).unwrap();
        match j_map(&x, 1, 1000) {
            Err(Error::WindowOverflow { digit_index, .. }) => assert_eq!(digit_index, 10),
            other => panic!("expected overflow, got {other:?}"),
        }
        // exp_2(exp_2(3)) = 256 fits, exp_2(exp_2(4)) = 65536 does not
        let x = DigitWord::zero(2, 0, 4).unwrap();
        assert!(matches!(
            j_map(&x, 2, 1000),
            Err(Error::WindowOverflow { digit_index: 4, .. })
        ));
    }

    #[test]
    fn prefix_enumeration() {
        let zp = Region::single(Ball::unit(3).unwrap());
        let items: Vec<_> = enumerate_prefixes(&zp, 1).unwrap().collect();
        assert_eq!(items.len(), 3);
        assert!(items.iter().all(|(_, wt)| *wt == Ratio::new(1, 3)));
        let items: Vec<_> = enumerate_prefixes(&zp, 0).unwrap().collect();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].0, Ball::unit(3).unwrap());
        assert_eq!(items[0].1, Rational::one());
    }

    #[test]
    fn region_rejects_overlap() {
        let a = Ball::unit(2).unwrap();
        let b = Ball::new(w(2, 0, &[1]), 1).unwrap();
        assert!(Region::new(vec![a, b]).is_err());
    }

    #[test]
    fn lambda_ball_volume() {
        assert_eq!(
            Ball::lambda(2, 2).unwrap().haar_measure().unwrap(),
            Rational::from_integer(4)
        );
    }

    #[test]
    fn padic_fraction_basics() {
        let q = PadicFraction::new(2, 3, 4).unwrap();
        assert_eq!(q.exponent(), 2);
        assert_eq!(q.truncate(1), PadicFraction::new(2, 1, 2).unwrap());
        assert_eq!(q.digits_low_to_high(), vec![1, 1]);
        assert!(PadicFraction::new(2, 1, 6).is_err());
        assert_eq!(PadicFraction::new(3, 3, 9).unwrap().exponent(), 1);
    }

    #[test]
    fn a_sequence_products() {
        let a = ASequence::factorial(2, 6).unwrap();
        assert_eq!(a.partial_product(-1), 1);
        assert_eq!(a.partial_product(0), 2);
        assert_eq!(a.partial_product(1), 12);
        assert!(ASequence::factorial(2, 11).is_err());
    }

    #[test]
    fn a_word_partial_value() {
        let a = Arc::new(ASequence::factorial(2, 4).unwrap());
        let x = AWord::new(a.clone(), vec![1, 5, 3]).unwrap();
        assert_eq!(x.partial_value(0).unwrap(), 1);
        // 1 + 5*2 + 3*12
        assert_eq!(x.partial_value(2).unwrap(), 47);
        assert!(AWord::new(a, vec![2]).is_err());
    }

    #[test]
    fn a_word_constant_matches_digit_word() {
        let a = Arc::new(ASequence::constant(3, 6).unwrap());
        let x = AWord::from_i64(a, 200, 6).unwrap();
        let y = DigitWord::from_i64(3, 200, 6).unwrap();
        let xd: Vec<u32> = x.digits().iter().map(|&d| d as u32).collect();
        assert_eq!(xd, y.digits());
        assert_eq!(x.valuation(), y.valuation());
    }

    #[test]
    fn a_word_add_integer_carries() {
        let a = Arc::new(ASequence::factorial(2, 3).unwrap());
        let x = AWord::new(a.clone(), vec![1, 5, 0]).unwrap();
        assert_eq!(x.add_integer(1).digits(), &[0, 0, 1]);
        assert_eq!(x.add_integer(1).add_integer(-1), x);
    }
}
