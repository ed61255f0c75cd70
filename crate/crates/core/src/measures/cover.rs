use rayon::prelude::*;

use super::{PointCloud, TestFunction};
use crate::error::{Error, Result};

/// Number of occupied origin-anchored half-open grid cells of side `scale`.
pub fn box_count(cloud: &PointCloud, scale: f64) -> usize {
    let dim = cloud.dim();
    let mut keys: Vec<[i64; 3]> = cloud
        .points()
        .map(|p| {
            let mut k = [0i64; 3];
            for (slot, &c) in k.iter_mut().zip(p) {
                *slot = (c / scale).floor() as i64;
            }
            k
        })
        .collect();
    debug_assert!(dim <= 3);
    keys.par_sort_unstable();
    keys.dedup();
    keys.len()
}

/// Grid-cover approximation of `k_zeta`: occupied cells times
/// `zeta(scale * sqrt(dim))`.
pub fn covering_sum(cloud: &PointCloud, zeta: &TestFunction, scale: f64) -> f64 {
    if cloud.is_empty() {
        return 0.0;
    }
    let diameter = scale * (cloud.dim() as f64).sqrt();
    box_count(cloud, scale) as f64 * zeta.eval(diameter)
}

/// Least-squares box-counting dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDimension {
    pub estimate: f64,
    /// `(scale, occupied cells)` per probed scale.
    pub counts: Vec<(f64, usize)>,
    /// Root-mean-square residual of the fit in `ln(count)`.
    pub residual: f64,
}

/// Slope of `ln N(scale)` against `ln(1/scale)`.
pub fn box_dimension(cloud: &PointCloud, scales: &[f64]) -> Result<BoxDimension> {
    if scales.len() < 2 {
        return Err(Error::Invalid(
            "box dimension needs at least two scales".into(),
        ));
    }
    if scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Invalid("scales must be positive".into()));
    }
    let counts: Vec<(f64, usize)> = scales.iter().map(|&s| (s, box_count(cloud, s))).collect();
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(s, n)| ((1.0 / s).ln(), (n.max(1) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("box dimension needs distinct scales".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BoxDimension {
        estimate: slope,
        counts,
        residual,
    })
}

/// `count` scales spaced evenly in `ln` from `hi` down to `lo`.
pub fn log_spaced_scales(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn single_point() {
        let c = PointCloud::new(2, vec![0.3, 0.7], Value::Null).unwrap();
        let z = TestFunction::power(1.0);
        assert!((covering_sum(&c, &z, 0.1) - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        let d = box_dimension(&c, &[0.1, 0.01, 0.001]).unwrap();
        assert_eq!(d.estimate, 0.0);
    }

    #[test]
    fn empty_cloud_sum_is_zero() {
        let c = PointCloud::new(2, vec![], Value::Null).unwrap();
        assert_eq!(covering_sum(&c, &TestFunction::power(0.5), 0.1), 0.0);
    }

    #[test]
    fn segment_power_one() {
        let n = 100_000;
        let coords: Vec<f64> = (0..n)
            .flat_map(|i| [(i as f64 + 0.5) / n as f64, 0.25])
            .collect();
        let c = PointCloud::new(2, coords, Value::Null).unwrap();
        for eps in [0.01, 0.001] {
            let s = covering_sum(&c, &TestFunction::power(1.0), eps);
            assert!((s - 2f64.sqrt()).abs() < 0.02, "{s}");
        }
    }
}
