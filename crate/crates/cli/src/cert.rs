use num_complex::Complex64;
use padic_fractal::maps::{delta_plus, delta_small, transfer_band, DistortionOptions, MapParams};
use padic_fractal::profiles::Depth;
use padic_fractal::Result;
use serde::Serialize;

/// Outcome of a certified threshold test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
    /// `s` is not in the open unit disk (or is zero).
    Outside,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Undecided => "undecided",
            Verdict::Outside => "outside",
        }
    }
}

/// Certified enclosure `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    /// `Yes` only when the whole interval lies above `t`.
    pub fn verdict(&self, t: f64) -> Verdict {
        if self.lower > t {
            Verdict::Yes
        } else if self.upper <= t {
            Verdict::No
        } else {
            Verdict::Undecided
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertOptions {
    pub max_depth: u32,
    pub max_states: usize,
    pub truncation: u32,
}

#[derive(Clone, Copy)]
enum Which {
    Plus,
    Small,
}

fn enclose(params: &MapParams, which: Which, t: f64, opts: CertOptions) -> Result<Interval> {
    let (target, band) = match params.profile().depth() {
        Depth::Finite(_) => (params.clone(), 0.0),
        Depth::Infinite => (
            params.with_profile(params.profile().truncate(opts.truncation))?,
            transfer_band(params, opts.truncation, opts.truncation)?,
        ),
    };
    // distances move by at most `band`, single values by `band / 2`
    let slack = match which {
        Which::Plus => band,
        Which::Small => band / 2.0,
    };
    let d = DistortionOptions {
        max_depth: opts.max_depth,
        max_states: opts.max_states,
        threshold: Some(t + slack),
        ..Default::default()
    };
    let r = match which {
        Which::Plus => delta_plus(&target, &d)?,
        Which::Small => delta_small(&target, &d)?,
    };
    Ok(Interval {
        lower: (r.lower - slack).max(0.0),
        upper: r.upper + slack,
    })
}

/// Enclosure of `Delta^+`, refined until it clears `t` or the depth runs out.
pub fn delta_plus_interval(params: &MapParams, t: f64, opts: CertOptions) -> Result<Interval> {
    enclose(params, Which::Plus, t, opts)
}

/// Enclosure of `delta`, as [`delta_plus_interval`].
pub fn delta_small_interval(params: &MapParams, t: f64, opts: CertOptions) -> Result<Interval> {
    enclose(params, Which::Small, t, opts)
}

/// Both mask verdicts at one grid point.
pub fn mask_point(
    params: Option<&MapParams>,
    plus_t: f64,
    small_t: f64,
    opts: CertOptions,
) -> Result<(Verdict, Verdict)> {
    match params {
        None => Ok((Verdict::Outside, Verdict::Outside)),
        Some(m) => Ok((
            delta_plus_interval(m, plus_t, opts)?.verdict(plus_t),
            delta_small_interval(m, small_t, opts)?.verdict(small_t),
        )),
    }
}

/// `s` if it lies in the punctured open unit disk.
pub fn in_domain(s: Complex64) -> bool {
    let r = s.norm();
    r > 0.0 && r < 1.0
}
