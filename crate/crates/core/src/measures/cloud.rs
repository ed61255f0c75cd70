use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};

/// Points in R^2 or R^3, stored flat, with the manifest that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    pub manifest: Value,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, manifest: Value) -> Result<Self> {
        if !(dim == 2 || dim == 3) || !coords.len().is_multiple_of(dim) {
            return Err(Error::Invalid(format!(
                "point cloud needs dimension 2 or 3 and a whole number of points, got dim {dim} and {} coordinates",
                coords.len()
            )));
        }
        Ok(Self {
            dim,
            coords,
            manifest,
        })
    }

    pub fn from_complex(points: &[Complex64], manifest: Value) -> Self {
        let coords = points.iter().flat_map(|z| [z.re, z.im]).collect();
        Self {
            dim: 2,
            coords,
            manifest,
        }
    }

    pub fn from_points3(points: &[[f64; 3]], manifest: Value) -> Self {
        Self {
            dim: 3,
            coords: points.iter().flatten().copied().collect(),
            manifest,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The cloud scaled by `lambda` about the origin.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * lambda).collect(),
            manifest: self.manifest.clone(),
        }
    }

    /// Largest coordinate-wise extent.
    pub fn extent(&self) -> f64 {
        (0..self.dim)
            .map(|k| {
                let (lo, hi) = self
                    .points()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[k]), hi.max(p[k]))
                    });
                if hi >= lo {
                    hi - lo
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// Writes `x,y[,z]` rows with a header line.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "{}", ["x", "y", "z"][..self.dim].join(","))?;
        for p in self.points() {
            if self.dim == 2 {
                writeln!(w, "{},{}", p[0], p[1])?;
            } else {
                writeln!(w, "{},{},{}", p[0], p[1], p[2])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cloud written by [`PointCloud::write_csv`]; the manifest is
    /// taken from `<path>.json` when present.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let r = BufReader::new(std::fs::File::open(path)?);
        let mut coords = Vec::new();
        let mut dim = 0;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if i == 0 && fields[0].trim().parse::<f64>().is_err() {
                dim = fields.len();
                continue;
            }
            if dim == 0 {
                dim = fields.len();
            }
            if fields.len() != dim {
                return Err(Error::Invalid(format!(
                    "line {}: expected {dim} fields",
                    i + 1
                )));
            }
            for f in fields {
                coords.push(
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("line {}: bad number {f:?}", i + 1)))?,
                );
            }
        }
        let manifest_path = manifest_path(path);
        let manifest = if manifest_path.exists() {
            serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?
        } else {
            Value::Null
        };
        Self::new(dim.max(2), coords, manifest)
    }

    /// Writes the manifest as pretty JSON next to `path`.
    pub fn write_manifest(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(manifest_path(path.as_ref()), text + "\n")?;
        Ok(())
    }
}

/// `<file>.json` for a data file `<file>`.
pub fn manifest_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let cloud = PointCloud::from_complex(
            &[Complex64::new(0.1, -2.5), Complex64::new(1.0 / 3.0, 0.0)],
            serde_json::json!({"depth": 1}),
        );
        cloud.write_csv(&path).unwrap();
        cloud.write_manifest(&path).unwrap();
        let back = PointCloud::read_csv(&path).unwrap();
        assert_eq!(back, cloud);
    }
}
