use num_complex::Complex64;
use serde::Serialize;

use super::{s_of_d, Integrand};
use crate::disk::Disk;
use crate::error::{Error, Result};
use crate::maps::walker::Walker;
use crate::maps::{delta_plus_lower, delta_small_lower, DistortionOptions, MapParams};
use crate::padic::{Ball, DigitWord, Region};
use crate::profiles::Profile;

const U: f64 = f64::EPSILON;

/// Integration domain in `Q_p`.
#[derive(Clone, Debug)]
pub enum Domain {
    Bounded(Region),
    /// All of `Q_p`: `Z_p` plus the shells `|x|_p = p^n` for `n = 1..=shells`,
    /// with the remaining shells bounded through the decay of the integrand.
    Whole {
        shells: u32,
    },
}

impl From<Region> for Domain {
    fn from(r: Region) -> Self {
        Domain::Bounded(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_bound: f64,
    pub depth: u32,
    pub cells: u64,
}

impl QuadratureResult {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.value).norm() <= self.error_bound
    }

    pub fn disk(&self) -> Disk {
        Disk::new(self.value, self.error_bound)
    }
}

#[derive(Clone, Copy, Default)]
struct Acc {
    center: Complex64,
    radius: f64,
    abs: f64,
    count: u64,
}

/// Partial Bell polynomials `B_{n,k}(x_1, ...)` for `n, k <= l`, from
/// `B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i,k-1}`.
fn bell_table(l: usize, x: &[Disk]) -> Vec<Vec<Disk>> {
    let mut b = vec![vec![Disk::zero(); l + 1]; l + 1];
    b[0][0] = Disk::one();
    for n in 1..=l {
        for k in 1..=n {
            let mut acc = Disk::zero();
            for i in 1..=n - k + 1 {
                let c = binom(n - 1, i - 1);
                acc = acc + (x[i] * b[n - i][k - 1]).scale(c);
            }
            b[n][k] = acc;
        }
    }
    b
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `d_s^l d_sbar^lbar f(Upsilon_s(x))` over a leaf, from the order-`k` image
/// disks `ups[k]`.
fn chain_rule(f: &Integrand, ups: &[Disk], l: usize, lbar: usize) -> Disk {
    let z = ups[0];
    if l == 0 && lbar == 0 {
        return f.eval_disk(0, 0, z);
    }
    let b = bell_table(l, ups);
    let bbar_src: Vec<Disk> = ups.iter().map(|d| d.conj()).collect();
    let bb = bell_table(lbar, &bbar_src);
    let mut acc = Disk::zero();
    for q in 0..=l {
        let bq = b[l][q];
        if bq.mag() == 0.0 {
            continue;
        }
        for qb in 0..=lbar {
            let bqb = bb[lbar][qb];
            if bqb.mag() == 0.0 {
                continue;
            }
            acc = acc + f.eval_disk(q as u32, qb as u32, z) * bq * bqb;
        }
    }
    acc
}

fn integrate_ball(
    profile: &Profile,
    s: Complex64,
    ball: &Ball,
    f: &Integrand,
    l: usize,
    lbar: usize,
    depth: u32,
) -> Result<(Disk, u64)> {
    let orders = l.max(lbar) + 1;
    let w = Walker::new(profile, s, orders, ball, depth)?;
    let radii: Vec<f64> = (0..orders).map(|k| w.radius(k)).collect();
    let parts = w.walk(Acc::default, |acc, sums| {
        let ups: Vec<Disk> = sums
            .iter()
            .zip(&radii)
            .map(|(&c, &r)| Disk::new(c, r))
            .collect();
        let v = chain_rule(f, &ups, l, lbar);
        acc.center += v.center;
        acc.radius += v.radius;
        acc.abs += v.center.norm();
        acc.count += 1;
    });
    let mut total = Acc::default();
    for a in parts {
        total.center += a.center;
        total.radius += a.radius;
        total.abs += a.abs;
        total.count += a.count;
    }
    let weight = (profile.base() as f64).powi(-(ball.level() as i32 + depth as i32));
    let rounding = U * (total.count as f64 + 2.0) * total.abs;
    Ok((
        Disk::new(
            total.center * weight,
            weight * (total.radius + rounding) + 2.0 * U * (total.center * weight).norm(),
        ),
        total.count,
    ))
}

/// Balls at level `1 - n` with `x_{-n} != 0`: the shell `|x|_p = p^n`.
fn shell(p: u32, n: u32) -> Result<Vec<Ball>> {
    (1..p)
        .map(|a| Ball::new(DigitWord::new(p, -(n as i64), vec![a])?, 1 - n as i64))
        .collect()
}

fn shell_tail(params: &MapParams, f: &Integrand, shells: u32) -> Result<f64> {
    let p = params.base() as f64;
    let r = params.s().norm();
    let delta = delta_small_lower(params, &DistortionOptions::default(), 8)?;
    if !(delta > 0.0) {
        return Err(Error::NotCertified(format!(
            "delta lower bound {delta} is not positive at s = {}",
            params.s()
        )));
    }
    let mut tail = 0.0;
    let mut prev = f64::INFINITY;
    for n in shells + 1..shells + 4096 {
        let sup = f.sup_outside(delta * r.powi(-(n as i32))).ok_or_else(|| {
            Error::Invalid("an unbounded domain needs an integrand with decay data".into())
        })?;
        let term = (p - 1.0) * p.powi(n as i32 - 1) * sup;
        tail += term;
        if term == 0.0 || (term < prev && term <= 1e-3 * U * tail) {
            return Ok(tail * (1.0 + 1e-3));
        }
        prev = term;
    }
    Ok(f64::INFINITY)
}

fn integrate_domain(
    params: &MapParams,
    domain: &Domain,
    f: &Integrand,
    l: usize,
    lbar: usize,
    depth: u32,
) -> Result<QuadratureResult> {
    let p = params.base();
    let (balls, tail) = match domain {
        Domain::Bounded(region) => {
            if region.base() != p {
                return Err(Error::BaseMismatch(p, region.base()));
            }
            (region.balls().to_vec(), 0.0)
        }
        Domain::Whole { shells } => {
            if l + lbar > 0 {
                return Err(Error::Invalid(
                    "s-derivatives are supported on bounded domains only".into(),
                ));
            }
            let tail = shell_tail(params, f, *shells)?;
            let mut balls = vec![Ball::unit(p)?];
            for n in 1..=*shells {
                balls.extend(shell(p, n)?);
            }
            (balls, tail)
        }
    };
    let mut total = Disk::zero();
    let mut cells = 0;
    for ball in &balls {
        let (d, c) = integrate_ball(params.profile(), params.s(), ball, f, l, lbar, depth)?;
        total = total + d;
        cells += c;
    }
    Ok(QuadratureResult {
        value: total.center,
        error_bound: total.radius + tail,
        depth,
        cells,
    })
}

/// `int_Lambda chi(dx) f(Upsilon_s(x))` over cells `depth` levels below each
/// ball of the domain.
pub fn haar_integral(
    params: &MapParams,
    domain: &Domain,
    f: &Integrand,
    depth: u32,
) -> Result<QuadratureResult> {
    integrate_domain(params, domain, f, 0, 0, depth)
}

/// `d_s^l d_sbar^lbar` of the integral, by the chain rule under the integral.
pub fn integral_s_derivative(
    params: &MapParams,
    region: &Region,
    f: &Integrand,
    l: u32,
    lbar: u32,
    depth: u32,
) -> Result<QuadratureResult> {
    integrate_domain(
        params,
        &Domain::Bounded(region.clone()),
        f,
        l as usize,
        lbar as usize,
        depth,
    )
}

/// Cauchy-Riemann residual `|dI/dsbar|` from four evaluations at `s +- h`,
/// `s +- ih`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolomorphyCheck {
    pub residual: f64,
    /// Quadrature errors propagated through the stencil, `sum eps / (4h)`.
    pub quadrature_budget: f64,
    /// Estimated stencil truncation `h^2 / 3 |I'''(s)|`.
    pub truncation_estimate: f64,
}

impl HolomorphyCheck {
    pub fn budget(&self) -> f64 {
        self.quadrature_budget + self.truncation_estimate
    }
}

pub fn holomorphy_residual(
    params: &MapParams,
    region: &Region,
    f: &Integrand,
    h: f64,
    depth: u32,
) -> Result<HolomorphyCheck> {
    let s = params.s();
    let eval =
        |ds: Complex64| haar_integral(&params.with_s(s + ds)?, &region.clone().into(), f, depth);
    let xp = eval(Complex64::new(h, 0.0))?;
    let xm = eval(Complex64::new(-h, 0.0))?;
    let yp = eval(Complex64::new(0.0, h))?;
    let ym = eval(Complex64::new(0.0, -h))?;
    let dx = (xp.value - xm.value) / (2.0 * h);
    let dy = (yp.value - ym.value) / (2.0 * h);
    let residual = (dx + Complex64::i() * dy).norm() / 2.0;
    let eps = xp.error_bound + xm.error_bound + yp.error_bound + ym.error_bound;
    let third = integral_s_derivative(params, region, f, 3, 0, depth.min(14))?;
    Ok(HolomorphyCheck {
        residual,
        quadrature_budget: eps / (4.0 * h) + 8.0 * U * residual,
        truncation_estimate: h * h / 3.0 * (third.value.norm() + third.error_bound),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: Complex64,
    pub s: Option<Complex64>,
    pub dimension: Option<f64>,
    pub integral: Option<QuadratureResult>,
    /// `Delta^+` has a certified positive lower bound.
    pub certified: bool,
    pub note: Option<String>,
}

/// One row per path point; out-of-domain points and failed certifications
/// are flagged, never dropped.
pub fn path_sweep(
    path: &[Complex64],
    theta: f64,
    profile: &Profile,
    region: &Region,
    f: &Integrand,
    depth: u32,
    opts: &DistortionOptions,
) -> Result<Vec<SweepRow>> {
    let p = profile.base();
    path.iter()
        .map(|&d| {
            let pt = match s_of_d(d, theta, p) {
                Ok(pt) => pt,
                Err(Error::OutOfDomain(msg)) => {
                    return Ok(SweepRow {
                        d,
                        s: None,
                        dimension: None,
                        integral: None,
                        certified: false,
                        note: Some(msg),
                    })
                }
                Err(e) => return Err(e),
            };
            let params = MapParams::upsilon(profile.clone(), pt.s)?;
            let integral = haar_integral(&params, &Domain::Bounded(region.clone()), f, depth)?;
            let (certified, note) = match delta_plus_lower(&params, opts, 8) {
                Ok(lo) => (lo > 0.0, None),
                Err(e) => (false, Some(e.to_string())),
            };
            Ok(SweepRow {
                d,
                s: Some(pt.s),
                dimension: Some(pt.dimension),
                integral: Some(integral),
                certified,
                note,
            })
        })
        .collect()
}

/// CSV with header `d_re,d_im,s_re,s_im,D_s,I_re,I_im,err,certified`; missing
/// values are written as `nan`.
pub fn write_sweep_csv(rows: &[SweepRow], w: impl std::io::Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "d_re",
        "d_im",
        "s_re",
        "s_im",
        "D_s",
        "I_re",
        "I_im",
        "err",
        "certified",
    ])?;
    let nan = f64::NAN;
    for r in rows {
        let s = r.s.unwrap_or(Complex64::new(nan, nan));
        let (i, e) = r
            .integral
            .map(|q| (q.value, q.error_bound))
            .unwrap_or((Complex64::new(nan, nan), nan));
        let fields = [
            r.d.re,
            r.d.im,
            s.re,
            s.im,
            r.dimension.unwrap_or(nan),
            i.re,
            i.im,
            e,
        ];
        let mut rec: Vec<String> = fields.iter().map(|v| v.to_string()).collect();
        rec.push(r.certified.to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
