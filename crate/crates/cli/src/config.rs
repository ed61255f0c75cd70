use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use padic_fractal::integrate::{parse_complex, s_of_d, Domain, Integrand, PathPoint};
use padic_fractal::maps::MapParams;
use padic_fractal::padic::{ASequence, Ball, Region};
use padic_fractal::profiles::Profile;
use padic_fractal::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Everything needed to regenerate an output, apart from where it is written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: u32,
    /// `digit`, `digit-normalized`, `exponential` or `csv:<path>`.
    pub profile: String,
    pub theta: f64,
    pub depth: u32,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    /// Map parameter; takes precedence over `d`.
    pub s: Option<String>,
    /// Point on the dimension path, `s = exp(-(ln p + i theta) / d)`.
    pub d: Option<String>,
    /// `zp`, `lambda:<N>` for `p^-N Z_p`, or `whole:<shells>`.
    pub region: String,
    pub integrands: Vec<String>,
    pub write_points: bool,
    pub require_embedding: bool,
    pub mask: MaskConfig,
    pub sweep: SweepConfig,
    pub scales: ScaleConfig,
    pub solenoid: SolenoidConfig,
    pub nu_depth: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub plus_threshold: f64,
    pub small_threshold: f64,
    pub max_depth: u32,
    /// Search frontier size above which states are merged.
    pub max_states: usize,
    /// Digits kept when an infinite-depth profile is truncated.
    pub truncation: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub from: String,
    pub to: String,
    pub points: usize,
    pub integrand: String,
    pub frames: bool,
    pub frame_depth: u32,
}

/// Box-counting window `|s|^coarse_level diam .. |s|^(depth - fine_margin) diam`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    pub coarse_level: u32,
    pub fine_margin: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolenoidConfig {
    /// `factorial:<offset>` for `a_k = (k + offset)!`, or `constant:<a>`.
    pub a: String,
    pub profile: String,
    pub nu: String,
    pub alpha: String,
    pub samples: usize,
    pub depth: usize,
    /// Box-counting window `extent / coarse .. extent / fine`.
    pub coarse: f64,
    pub fine: f64,
    pub scale_count: usize,
    pub step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: 2,
            profile: "digit".into(),
            theta: PI,
            depth: 20,
            seed: 0,
            width: 512,
            height: 512,
            s: None,
            d: None,
            region: "zp".into(),
            integrands: vec!["1".into(), "z".into(), "z^2".into()],
            write_points: true,
            require_embedding: false,
            mask: MaskConfig::default(),
            sweep: SweepConfig::default(),
            scales: ScaleConfig::default(),
            solenoid: SolenoidConfig::default(),
            nu_depth: 8,
        }
    }
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            re: [-1.0, 1.0],
            im: [-1.0, 1.0],
            plus_threshold: 2f64.powi(-12),
            small_threshold: 2f64.powi(-10),
            max_depth: 24,
            max_states: 1 << 10,
            truncation: 8,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            from: "1".into(),
            to: "2".into(),
            points: 12,
            integrand: "z".into(),
            frames: true,
            frame_depth: 16,
        }
    }
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            coarse_level: 6,
            fine_margin: 2,
            count: 10,
        }
    }
}

impl Default for SolenoidConfig {
    fn default() -> Self {
        Self {
            a: "factorial:2".into(),
            profile: "exponential".into(),
            nu: "2".into(),
            alpha: "1".into(),
            samples: 100_000,
            depth: 7,
            coarse: 16.0,
            fine: 1024.0,
            scale_count: 10,
            step: 1e-3,
        }
    }
}

impl RunConfig {
    /// Reads a config file; a manifest written next to an output is accepted
    /// too, in which case its `config` entry is used.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let inner = match value.get("config") {
            Some(c) if value.get("command").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn profile(&self) -> Result<Profile> {
        self.named_profile(&self.profile)
    }

    pub fn named_profile(&self, name: &str) -> Result<Profile> {
        match name {
            "digit" => Profile::digit(self.p),
            "digit-normalized" => Profile::digit_normalized(self.p),
            "exponential" => Profile::exponential(self.p),
            other => match other.strip_prefix("csv:") {
                Some(path) => Profile::from_csv(self.p, path),
                None => Err(Error::Invalid(format!("unknown profile {other:?}"))),
            },
        }
    }

    /// `s`, and the path point when it came from `d` (default `d = 1`).
    pub fn s(&self) -> Result<(Complex64, Option<PathPoint>)> {
        if let Some(text) = &self.s {
            let s = parse_complex(text)?;
            if !(s.norm() < 1.0) {
                return Err(Error::OutOfDomain(format!("|s| = {} >= 1", s.norm())));
            }
            return Ok((s, None));
        }
        let d = parse_complex(self.d.as_deref().unwrap_or("1"))?;
        let pt = s_of_d(d, self.theta, self.p)?;
        Ok((pt.s, Some(pt)))
    }

    pub fn params(&self) -> Result<MapParams> {
        MapParams::upsilon(self.profile()?, self.s()?.0)
    }

    pub fn domain(&self) -> Result<Domain> {
        let bad = || Error::Invalid(format!("unknown region {:?}", self.region));
        if self.region == "zp" {
            return Ok(Domain::Bounded(Region::single(Ball::unit(self.p)?)));
        }
        let (kind, arg) = self.region.split_once(':').ok_or_else(bad)?;
        match kind {
            "lambda" => {
                let n: i64 = arg.parse().map_err(|_| bad())?;
                Ok(Domain::Bounded(Region::single(Ball::lambda(self.p, n)?)))
            }
            "whole" => Ok(Domain::Whole {
                shells: arg.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }

    pub fn bounded_region(&self) -> Result<Region> {
        match self.domain()? {
            Domain::Bounded(r) => Ok(r),
            Domain::Whole { .. } => Err(Error::Invalid(format!(
                "region {:?} is unbounded; this command needs a bounded one",
                self.region
            ))),
        }
    }

    pub fn integrands(&self) -> Result<Vec<Integrand>> {
        if self.integrands.is_empty() {
            return Err(Error::Invalid("no integrand given".into()));
        }
        self.integrands
            .iter()
            .map(|f| Integrand::parse(f))
            .collect()
    }

    pub fn a_sequence(&self, len: usize) -> Result<Arc<ASequence>> {
        let spec = &self.solenoid.a;
        let bad = || Error::Invalid(format!("unknown a-sequence {spec:?}"));
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        let n: u64 = arg.parse().map_err(|_| bad())?;
        let seq = match kind {
            "factorial" => ASequence::factorial(n, len)?,
            "constant" => ASequence::constant(n, len)?,
            _ => return Err(bad()),
        };
        Ok(Arc::new(seq))
    }

    pub fn check(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidBase(self.p));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Invalid("raster size must be positive".into()));
        }
        let [r0, r1] = self.mask.re;
        let [i0, i1] = self.mask.im;
        if !(r0 < r1 && i0 < i1) {
            return Err(Error::Invalid(
                "mask window must have positive extent".into(),
            ));
        }
        Ok(())
    }
}
