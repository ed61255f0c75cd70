use serde::Serialize;
use serde_json::json;

use super::{covering_sum, PointCloud, TestFunction};
use crate::error::Result;
use crate::maps::{upsilon, MapParams};
use crate::padic::{enumerate_prefixes, j_map, Ball, Region, DEFAULT_J_WINDOW};

/// `Upsilon(J^m(x))` over all prefixes `x` of `Z_p` with `depth` digits.
pub fn zero_fractal_cloud(m: u32, params: &MapParams, depth: u32) -> Result<PointCloud> {
    let p = params.base();
    let region = Region::single(Ball::unit(p)?);
    let mut pts = Vec::new();
    for (ball, _) in enumerate_prefixes(&region, depth)? {
        let jx = j_map(ball.center(), m, DEFAULT_J_WINDOW)?;
        pts.push(upsilon(params, &jx, jx.top())?.value);
    }
    let manifest = json!({
        "kind": "zero_fractal",
        "m": m,
        "p": p,
        "profile": params.profile().name(),
        "s": [params.s().re, params.s().im],
        "depth": depth,
    });
    Ok(PointCloud::from_complex(&pts, manifest))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub scale: f64,
    /// Covering sums for `r^eps`, one per probed exponent.
    pub power: Vec<f64>,
    pub iter_log: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTable {
    pub exponents: Vec<f64>,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    /// Every power-law column strictly decreases as the scale shrinks.
    pub fn power_decreasing(&self) -> bool {
        (0..self.exponents.len())
            .all(|j| self.rows.windows(2).all(|w| w[1].power[j] < w[0].power[j]))
    }

    /// `max / min` of the iterated-log column.
    pub fn iter_log_band(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
                (lo.min(r.iter_log), hi.max(r.iter_log))
            });
        hi / lo
    }
}

/// Covering sums of the `J^m` cloud for `r^eps` and for the dimension-zero
/// gauge `1 / log_p^{(m)}(1/r)`. Scales are probed in the given order.
pub fn zero_fractal_probe(
    m: u32,
    params: &MapParams,
    scales: &[f64],
    depth: u32,
    exponents: &[f64],
) -> Result<ProbeTable> {
    let cloud = zero_fractal_cloud(m, params, depth)?;
    let mut ex = vec![0.0; m as usize + 1];
    ex[m as usize] = 1.0;
    let gauge = TestFunction::iter_log(ex, params.base() as f64)?;
    let rows = scales
        .iter()
        .map(|&scale| ProbeRow {
            scale,
            power: exponents
                .iter()
                .map(|&e| covering_sum(&cloud, &TestFunction::power(e), scale))
                .collect(),
            iter_log: covering_sum(&cloud, &gauge, scale),
        })
        .collect();
    Ok(ProbeTable {
        exponents: exponents.to_vec(),
        rows,
    })
}
