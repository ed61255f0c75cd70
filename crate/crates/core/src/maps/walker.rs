//! Depth-first enumeration of sub-balls with incremental partial sums of
//! `Upsilon` and its `s`-derivatives.
//!
//! A leaf is represented by the partial sum over its known digits; every point
//! of the leaf ball maps into the disk of radius [`Walker::radius`] around it.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{series_coefficient, tail_majorant, MapParams};
use crate::error::{Error, Result};
use crate::padic::{Ball, Region};
use crate::profiles::Profile;

const U: f64 = f64::EPSILON;

/// Number of top-level prefixes handed to the thread pool.
const TASKS: u64 = 512;

/// The image of one ball: every point of the ball maps into the disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallImage {
    pub center: Complex64,
    pub radius: f64,
}

pub(crate) struct Walker<'a> {
    profile: &'a Profile,
    orders: usize,
    ball: &'a Ball,
    depth: u32,
    /// `mult[n - v0][k]`: coefficient times power of `s` for order `k`.
    mult: Vec<Vec<Complex64>>,
    radius: Vec<f64>,
}

struct State {
    digits: Vec<u32>,
    sums: Vec<Complex64>,
    nonzero: bool,
}

impl<'a> Walker<'a> {
    /// Tracks orders `0..orders` below `ball`, refined by `depth` digits.
    pub fn new(
        profile: &'a Profile,
        s: Complex64,
        orders: usize,
        ball: &'a Ball,
        depth: u32,
    ) -> Result<Self> {
        if ball.base() != profile.base() {
            return Err(Error::BaseMismatch(profile.base(), ball.base()));
        }
        let v0 = ball.center().v0();
        let top = ball.level() + depth as i64;
        let len = (top - v0).max(0) as usize;
        let r = s.norm();
        let mut mult = Vec::with_capacity(len);
        let mut abs_sums = vec![0.0f64; orders];
        for i in 0..len {
            let n = v0 + i as i64;
            let row = (0..orders)
                .map(|k| {
                    let (c, pw) = series_coefficient(n, k as i32);
                    abs_sums[k] += c.abs() * r.powi(pw as i32);
                    s.powi(pw as i32) * c
                })
                .collect();
            mult.push(row);
        }
        let sup = profile.sup_bound();
        let radius = (0..orders)
            .map(|k| {
                sup * tail_majorant(r, top, k as i32)
                    + (U * (8.0 + 6.0 * len as f64) * sup + profile.eval_error()) * abs_sums[k]
            })
            .collect();
        Ok(Self {
            profile,
            orders,
            ball,
            depth,
            mult,
            radius,
        })
    }

    /// Certified radius of the order-`k` image disk of each leaf.
    pub fn radius(&self, k: usize) -> f64 {
        self.radius[k]
    }

    fn push_digit(&self, st: &mut State, d: u32) {
        st.digits.push(d);
        st.nonzero |= d != 0;
        if st.nonzero {
            let i = st.digits.len() - 1;
            let phi = self.profile.eval_digits(&st.digits);
            for (k, sum) in st.sums.iter_mut().enumerate() {
                *sum += phi * self.mult[i][k];
            }
        }
    }

    fn dfs<A>(
        &self,
        st: &mut State,
        remaining: u32,
        acc: &mut A,
        visit: &(impl Fn(&mut A, &[Complex64]) + Sync),
    ) {
        if remaining == 0 {
            visit(acc, &st.sums);
            return;
        }
        let saved_sums = st.sums.clone();
        let saved_nonzero = st.nonzero;
        for d in 0..self.profile.base() {
            self.push_digit(st, d);
            self.dfs(st, remaining - 1, acc, visit);
            st.digits.pop();
            st.sums.copy_from_slice(&saved_sums);
            st.nonzero = saved_nonzero;
        }
    }

    fn root(&self) -> State {
        let mut st = State {
            digits: Vec::with_capacity(self.mult.len()),
            sums: vec![Complex64::new(0.0, 0.0); self.orders],
            nonzero: false,
        };
        for &d in self.ball.center().digits() {
            self.push_digit(&mut st, d);
        }
        st
    }

    /// Visits every leaf in lexicographic digit order (lowest new digit
    /// slowest). Returns one accumulator per parallel task, in order.
    pub fn walk<A: Send>(
        &self,
        init: impl Fn() -> A + Sync,
        visit: impl Fn(&mut A, &[Complex64]) + Sync,
    ) -> Vec<A> {
        let p = self.profile.base() as u64;
        let mut split = 0u32;
        let mut tasks = 1u64;
        while split < self.depth && tasks * p <= TASKS {
            tasks *= p;
            split += 1;
        }
        let root = self.root();
        (0..tasks)
            .into_par_iter()
            .map(|t| {
                let mut st = State {
                    digits: root.digits.clone(),
                    sums: root.sums.clone(),
                    nonzero: root.nonzero,
                };
                let mut prefix = vec![0u32; split as usize];
                let mut c = t;
                for slot in prefix.iter_mut().rev() {
                    *slot = (c % p) as u32;
                    c /= p;
                }
                for &d in &prefix {
                    self.push_digit(&mut st, d);
                }
                let mut acc = init();
                self.dfs(&mut st, self.depth - split, &mut acc, &visit);
                acc
            })
            .collect()
    }
}

/// Representative images of all sub-balls `depth` levels below each ball of
/// `region`, in enumeration order.
pub fn image_points(params: &MapParams, region: &Region, depth: u32) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for ball in region.balls() {
        let w = Walker::new(params.profile(), params.s(), 1, ball, depth)?;
        for chunk in w.walk(Vec::new, |acc: &mut Vec<Complex64>, sums| acc.push(sums[0])) {
            out.extend(chunk);
        }
    }
    Ok(out)
}

/// Image disks of all sub-balls, as [`image_points`] with radii.
pub fn ball_images(params: &MapParams, region: &Region, depth: u32) -> Result<Vec<BallImage>> {
    let mut out = Vec::new();
    for ball in region.balls() {
        let w = Walker::new(params.profile(), params.s(), 1, ball, depth)?;
        let radius = w.radius(0);
        for chunk in w.walk(Vec::new, |acc: &mut Vec<Complex64>, sums| acc.push(sums[0])) {
            out.extend(chunk.into_iter().map(|center| BallImage { center, radius }));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::upsilon;
    use crate::padic::{enumerate_prefixes, DigitWord};

    #[test]
    fn leaves_match_direct_evaluation() {
        let profile = Profile::exponential(3).unwrap();
        let params = MapParams::upsilon(profile, Complex64::new(0.2, -0.3)).unwrap();
        let ball = Ball::new(DigitWord::new(3, -1, vec![2, 0]).unwrap(), 1).unwrap();
        let region = Region::single(ball.clone());
        let pts = image_points(&params, &region, 4).unwrap();
        let direct: Vec<_> = enumerate_prefixes(&region, 4)
            .unwrap()
            .map(|(b, _)| upsilon(&params, b.center(), b.level()).unwrap())
            .collect();
        assert_eq!(pts.len(), direct.len());
        for (a, b) in pts.iter().zip(&direct) {
            assert!((a - b.value).norm() < 1e-13);
        }
        let w = Walker::new(params.profile(), params.s(), 1, &ball, 4).unwrap();
        assert!((w.radius(0) - direct[0].error_bound).abs() < 1e-12);
    }
}
