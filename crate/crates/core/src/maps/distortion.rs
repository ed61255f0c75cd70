//! Certified bounds for `Delta^{+-}` and `delta` by branch and bound over digit
//! prefixes.
//!
//! For a profile reading `m` digits, term `n` of a difference
//! `Upsilon(x) - Upsilon(y)` only sees digits `n-m+1 ..= n`, so the search
//! state is the last `m-1` digits of each word plus the partial sum. States
//! whose partial sums land in the same cell are merged into one disk when the
//! frontier grows past `max_states`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::MapParams;
use crate::error::{Error, Result};
use crate::profiles::{Depth, Profile, MAX_ENUMERATION};

const U: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionOptions {
    /// Number of digits (levels) explored at most.
    pub max_depth: u32,
    /// Frontier size above which states are merged.
    pub max_states: usize,
    /// Merge cell size relative to the remaining tail bound.
    pub merge_eta: f64,
    /// Stop once `upper - lower` is at most this.
    pub target_width: f64,
    /// Stop once the interval lies strictly on one side of this value.
    pub threshold: Option<f64>,
    /// Disable pruning and merging (brute force; exponential cost).
    pub exact: bool,
}

impl Default for DistortionOptions {
    fn default() -> Self {
        Self {
            max_depth: 24,
            max_states: 1 << 14,
            merge_eta: 0.05,
            target_width: 0.0,
            threshold: None,
            exact: false,
        }
    }
}

/// A certified interval `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionReport {
    pub lower: f64,
    pub upper: f64,
    /// Levels explored.
    pub depth: u32,
    /// Largest frontier seen.
    pub peak_states: usize,
    /// Extreme `|partial sum|` over the final frontier (no tail correction).
    pub partial: f64,
}

impl DistortionReport {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// `Some(true)` if the whole interval exceeds `t`, `Some(false)` if it
    /// lies at or below, `None` if it straddles `t`.
    pub fn exceeds(&self, t: f64) -> Option<bool> {
        if self.lower > t {
            Some(true)
        } else if self.upper <= t {
            Some(false)
        } else {
            None
        }
    }
}

/// `Delta^+` (inf distance) and `Delta^-` (inverse sup distance) over pairs with
/// `|x - y|_p = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaBounds {
    pub plus: DistortionReport,
    pub minus: DistortionReport,
    pub inf_distance: DistortionReport,
    pub sup_distance: DistortionReport,
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    PairInf,
    PairSup,
    SingleInf,
}

#[derive(Clone, Copy)]
struct Node {
    kx: u32,
    ky: u32,
    sum: Complex64,
    slack: f64,
}

struct Engine {
    table: Vec<Complex64>,
    p: u32,
    m: u32,
    s: Complex64,
    bound: f64,
    eval_error: f64,
}

impl Engine {
    fn new(profile: &Profile, s: Complex64, mode: Mode) -> Result<Self> {
        let m = match profile.depth() {
            Depth::Finite(m) => m.max(1),
            Depth::Infinite => {
                return Err(Error::UnsupportedProfile(format!(
                    "{} has infinite digit dependence; truncate it first",
                    profile.name()
                )))
            }
        };
        let p = profile.base();
        let size = (p as u64)
            .checked_pow(m)
            .filter(|&n| n <= MAX_ENUMERATION)
            .ok_or_else(|| Error::Overflow(format!("{p}^{m} profile windows")))?;
        let mut table = Vec::with_capacity(size as usize);
        let mut window = vec![0u32; m as usize];
        for code in 0..size {
            let mut c = code;
            for slot in window.iter_mut() {
                *slot = (c % p as u64) as u32;
                c /= p as u64;
            }
            table.push(profile.eval_digits(&window));
        }
        let bound = match mode {
            Mode::SingleInf => profile.sup_bound(),
            _ => profile.oscillation_bound(),
        };
        Ok(Self {
            table,
            p,
            m,
            s,
            bound,
            eval_error: profile.eval_error(),
        })
    }

    fn high(&self) -> u32 {
        self.p.pow(self.m - 1)
    }

    /// Terms `n+1, n+2, ...` when every later digit is zero.
    fn completion(&self, mode: Mode, n: i64, kx: u32, ky: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut a, mut b) = (kx, ky);
        let mut pw = self.s.powi((n + 1) as i32);
        for _ in 1..self.m {
            let term = match mode {
                Mode::SingleInf => self.table[a as usize],
                _ => self.table[a as usize] - self.table[b as usize],
            };
            acc += term * pw;
            pw *= self.s;
            a /= self.p;
            b /= self.p;
        }
        if mode == Mode::SingleInf {
            acc += self.table[0] * pw / (Complex64::new(1.0, 0.0) - self.s);
        }
        acc
    }

    fn run(&self, mode: Mode, opts: &DistortionOptions) -> DistortionReport {
        let r = self.s.norm();
        let p = self.p;
        let high = self.high();
        let mut nodes: Vec<Node> = match mode {
            Mode::SingleInf => vec![Node {
                kx: 0,
                ky: 0,
                sum: Complex64::new(0.0, 0.0),
                slack: 0.0,
            }],
            // shared digits below index 0 still feed the first m-1 terms
            _ => (0..high)
                .map(|k| Node {
                    kx: k,
                    ky: k,
                    sum: Complex64::new(0.0, 0.0),
                    slack: 0.0,
                })
                .collect(),
        };
        let minimize = mode != Mode::PairSup;
        let mut best = if minimize { f64::INFINITY } else { 0.0 };
        let mut pruned_extreme = if minimize { f64::INFINITY } else { 0.0 };
        let mut running = if minimize { 0.0 } else { f64::INFINITY };
        let mut peak = nodes.len();
        let mut partial = 0.0;
        let mut depth = 0;
        let mut pw = Complex64::new(1.0, 0.0);
        let mut children: Vec<Node> = Vec::new();
        for n in 0..opts.max_depth as i64 {
            let tail = self.bound * r.powi((n + 1) as i32) / (1.0 - r);
            let rnd = U * (16.0 + 8.0 * n as f64) * self.bound / (1.0 - r)
                + 2.0 * self.eval_error / (1.0 - r);
            children.clear();
            for node in &nodes {
                for dx in 0..p {
                    let cx = node.kx + dx * high;
                    let fx = self.table[cx as usize];
                    if mode == Mode::SingleInf {
                        if n == 0 && dx == 0 {
                            continue;
                        }
                        children.push(Node {
                            kx: cx / p,
                            ky: 0,
                            sum: node.sum + fx * pw,
                            slack: node.slack,
                        });
                        continue;
                    }
                    for dy in 0..p {
                        // the distance is symmetric, so x_0 < y_0 suffices
                        if n == 0 && dx >= dy {
                            continue;
                        }
                        let cy = node.ky + dy * high;
                        let fy = self.table[cy as usize];
                        children.push(Node {
                            kx: cx / p,
                            ky: cy / p,
                            sum: node.sum + (fx - fy) * pw,
                            slack: node.slack,
                        });
                    }
                }
            }
            for c in &children {
                let z = (c.sum + self.completion(mode, n, c.kx, c.ky)).norm();
                if minimize {
                    best = best.min(z + c.slack + rnd);
                } else {
                    best = best.max(z - c.slack - rnd);
                }
            }
            let mut level_extreme = pruned_extreme;
            let mut kept = Vec::with_capacity(children.len());
            partial = if minimize { f64::INFINITY } else { 0.0 };
            for c in &children {
                let a = c.sum.norm();
                if minimize {
                    partial = partial.min(a);
                    let lo = a - c.slack - tail - rnd;
                    if !opts.exact && lo > best {
                        pruned_extreme = pruned_extreme.min(lo);
                    } else {
                        kept.push(*c);
                    }
                    level_extreme = level_extreme.min(lo);
                } else {
                    partial = partial.max(a);
                    let hi = a + c.slack + tail + rnd;
                    if !opts.exact && hi < best {
                        pruned_extreme = pruned_extreme.max(hi);
                    } else {
                        kept.push(*c);
                    }
                    level_extreme = level_extreme.max(hi);
                }
            }
            if minimize {
                running = running.max(level_extreme.max(0.0));
            } else {
                running = running.min(level_extreme);
            }
            depth = n as u32 + 1;
            if !opts.exact && kept.len() > opts.max_states {
                kept = merge(&kept, opts.merge_eta * tail, opts.max_states);
            }
            peak = peak.max(kept.len());
            nodes = kept;
            pw *= self.s;
            let (lo, hi) = if minimize {
                (running, best)
            } else {
                (best, running)
            };
            if hi - lo <= opts.target_width {
                break;
            }
            if let Some(t) = opts.threshold {
                if lo > t || hi <= t {
                    break;
                }
            }
        }
        let (lower, upper) = if minimize {
            (running, best.max(running))
        } else {
            (best.max(0.0), running.max(best))
        };
        DistortionReport {
            lower,
            upper,
            depth,
            peak_states: peak,
            partial,
        }
    }
}

/// Groups nodes by key and quantized partial sum; each group becomes a disk
/// at its cell center. The cell doubles until the frontier fits.
fn merge(nodes: &[Node], cell: f64, max_states: usize) -> Vec<Node> {
    let mut cell = if cell > 0.0 { cell } else { f64::MIN_POSITIVE };
    loop {
        let mut groups: BTreeMap<(u32, u32, i64, i64), f64> = BTreeMap::new();
        for n in nodes {
            // round() is symmetric under negation, which keeps s and conj(s) alike
            let ix = (n.sum.re / cell).round() as i64;
            let iy = (n.sum.im / cell).round() as i64;
            let center = Complex64::new(ix as f64 * cell, iy as f64 * cell);
            let slack = n.slack + (n.sum - center).norm() * (1.0 + 4.0 * U);
            let e = groups.entry((n.kx, n.ky, ix, iy)).or_insert(0.0);
            *e = e.max(slack);
        }
        if groups.len() <= max_states {
            return groups
                .into_iter()
                .map(|((kx, ky, ix, iy), slack)| Node {
                    kx,
                    ky,
                    sum: Complex64::new(ix as f64 * cell, iy as f64 * cell),
                    slack,
                })
                .collect();
        }
        cell *= 2.0;
    }
}

/// Certified `Delta^{+-}` intervals for a finite-depth profile.
pub fn delta_bounds(params: &MapParams, opts: &DistortionOptions) -> Result<DeltaBounds> {
    let inf_engine = Engine::new(params.profile(), params.s(), Mode::PairInf)?;
    let inf = inf_engine.run(Mode::PairInf, opts);
    let sup_opts = DistortionOptions {
        threshold: None,
        ..*opts
    };
    let sup = inf_engine.run(Mode::PairSup, &sup_opts);
    let minus = DistortionReport {
        lower: if sup.upper > 0.0 {
            1.0 / sup.upper
        } else {
            f64::INFINITY
        },
        upper: if sup.lower > 0.0 {
            1.0 / sup.lower
        } else {
            f64::INFINITY
        },
        depth: sup.depth,
        peak_states: sup.peak_states,
        partial: if sup.partial > 0.0 {
            1.0 / sup.partial
        } else {
            f64::INFINITY
        },
    };
    Ok(DeltaBounds {
        plus: inf,
        minus,
        inf_distance: inf,
        sup_distance: sup,
    })
}

/// Certified `Delta^+` alone, skipping the sup search of [`delta_bounds`].
pub fn delta_plus(params: &MapParams, opts: &DistortionOptions) -> Result<DistortionReport> {
    let e = Engine::new(params.profile(), params.s(), Mode::PairInf)?;
    Ok(e.run(Mode::PairInf, opts))
}

/// Certified interval for `delta = inf_{|x|_p = 1} |Upsilon(x)|`.
pub fn delta_small(params: &MapParams, opts: &DistortionOptions) -> Result<DistortionReport> {
    let e = Engine::new(params.profile(), params.s(), Mode::SingleInf)?;
    Ok(e.run(Mode::SingleInf, opts))
}

/// `max(0, nu - |s| / (1 - |s|))`.
pub fn nu_margin_bound(nu: f64, s: Complex64) -> f64 {
    let r = s.norm();
    (nu - r / (1.0 - r)).max(0.0)
}

/// `max(0, nu - osc |s| / (1 - |s|))`, valid without assuming `osc <= 1`.
pub fn nu_margin_bound_scaled(nu: f64, osc: f64, s: Complex64) -> f64 {
    let r = s.norm();
    (nu - osc * r / (1.0 - r)).max(0.0)
}

/// How far pairwise distances of `Upsilon^phi` and `Upsilon^{[phi]_m}` can
/// differ: `2 ||phi - [phi]_m|| / (1 - |s|)`.
pub fn transfer_band(params: &MapParams, m: u32, probe_depth: u32) -> Result<f64> {
    let modulus = params.profile().p_continuity_modulus(m, probe_depth)?;
    Ok(2.0 * modulus.upper / (1.0 - params.s().norm()))
}

/// Certified lower bound for `Delta^+`; profiles with infinite digit
/// dependence are truncated to `trunc` digits and corrected by the transfer
/// band.
pub fn delta_plus_lower(params: &MapParams, opts: &DistortionOptions, trunc: u32) -> Result<f64> {
    match params.profile().depth() {
        Depth::Finite(_) => Ok(delta_bounds(params, opts)?.plus.lower),
        Depth::Infinite => {
            let q = params.with_profile(params.profile().truncate(trunc))?;
            let band = transfer_band(params, trunc, trunc)?;
            Ok(delta_bounds(&q, opts)?.plus.lower - band)
        }
    }
}

/// Certified lower bound for `delta`, truncating as in [`delta_plus_lower`].
pub fn delta_small_lower(params: &MapParams, opts: &DistortionOptions, trunc: u32) -> Result<f64> {
    match params.profile().depth() {
        Depth::Finite(_) => Ok(delta_small(params, opts)?.lower),
        Depth::Infinite => {
            let q = params.with_profile(params.profile().truncate(trunc))?;
            let band = transfer_band(params, trunc, trunc)?;
            Ok(delta_small(&q, opts)?.lower - band / 2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u32, s: Complex64) -> MapParams {
        MapParams::upsilon(Profile::digit(p).unwrap(), s).unwrap()
    }

    #[test]
    fn digit_s03_meets_nu_margin() {
        let pr = params(2, Complex64::new(0.3, 0.0));
        let b = delta_bounds(&pr, &DistortionOptions::default()).unwrap();
        assert!(b.plus.lower >= 4.0 / 7.0 - 0.05);
        assert!(b.plus.lower <= 4.0 / 7.0 + 1e-12 && b.plus.upper >= 4.0 / 7.0 - 1e-12);
        // all-ones against all-zeros: 1/(1-s)
        assert!(b.sup_distance.lower <= 1.0 / 0.7 + 1e-12);
        assert!(b.sup_distance.upper >= 1.0 / 0.7 - 1e-12);
    }

    #[test]
    fn delta_small_positive() {
        let pr = params(2, Complex64::new(0.3, 0.0));
        let d = delta_small(&pr, &DistortionOptions::default()).unwrap();
        assert!(d.lower > 0.0);
        assert!(d.lower <= 1.0 && d.upper >= 1.0 - 1e-12);
    }

    #[test]
    fn zero_profile_delta_small() {
        let z = Profile::constant(2, Complex64::new(0.0, 0.0)).unwrap();
        let pr = MapParams::upsilon(z, Complex64::new(0.3, 0.0)).unwrap();
        let d = delta_small(&pr, &DistortionOptions::default()).unwrap();
        assert_eq!(d.lower, 0.0);
        assert!(d.upper < 1e-12);
    }

    #[test]
    fn infinite_depth_rejected() {
        let pr =
            MapParams::upsilon(Profile::exponential(2).unwrap(), Complex64::new(0.3, 0.0)).unwrap();
        assert!(matches!(
            delta_bounds(&pr, &DistortionOptions::default()),
            Err(Error::UnsupportedProfile(_))
        ));
    }

    #[test]
    fn nu_margin_algebra() {
        let s = Complex64::new(0.5, 0.0);
        assert_eq!(nu_margin_bound(1.0, s), 0.0);
        assert_eq!(nu_margin_bound(0.0, Complex64::new(0.1, 0.0)), 0.0);
        assert!(nu_margin_bound(1.0, Complex64::new(0.3, 0.0)) > 0.0);
    }
}
