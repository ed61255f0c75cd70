use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use padic_fractal::Result;

/// An 8-bit RGB image, rows top to bottom.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            rgb: vec![0; 3 * width as usize * height as usize],
        }
    }

    pub fn set(&mut self, col: u32, row: u32, color: [u8; 3]) {
        let i = 3 * (row as usize * self.width as usize + col as usize);
        self.rgb[i..i + 3].copy_from_slice(&color);
    }

    pub fn get(&self, col: u32, row: u32) -> [u8; 3] {
        let i = 3 * (row as usize * self.width as usize + col as usize);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    /// Binary PPM (P6).
    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(f, "P6\n{} {}\n255\n", self.width, self.height)?;
        f.write_all(&self.rgb)?;
        f.flush()?;
        Ok(())
    }
}

/// Square viewport `[-r, r]^2` around `center`, mapped onto a pixel grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub half_width: f64,
    pub width: u32,
    pub height: u32,
}

impl Viewport {
    /// Pixel `(col, row)` containing `z`, or `None` outside the viewport.
    pub fn pixel(&self, z: Complex64) -> Option<(u32, u32)> {
        let u = (z.re - self.center.re + self.half_width) / (2.0 * self.half_width);
        let v = (self.center.im + self.half_width - z.im) / (2.0 * self.half_width);
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return None;
        }
        let col = ((u * self.width as f64) as u32).min(self.width - 1);
        let row = ((v * self.height as f64) as u32).min(self.height - 1);
        Some((col, row))
    }

    /// Center of pixel `(col, row)`.
    pub fn point(&self, col: u32, row: u32) -> Complex64 {
        let u = (col as f64 + 0.5) / self.width as f64;
        let v = (row as f64 + 0.5) / self.height as f64;
        Complex64::new(
            self.center.re - self.half_width + 2.0 * self.half_width * u,
            self.center.im + self.half_width - 2.0 * self.half_width * v,
        )
    }
}

/// Hit counts per pixel, row-major.
pub fn hit_counts(points: &[Complex64], view: &Viewport) -> (Vec<u64>, usize) {
    let mut counts = vec![0u64; view.width as usize * view.height as usize];
    let mut missed = 0;
    for &z in points {
        match view.pixel(z) {
            Some((c, r)) => counts[r as usize * view.width as usize + c as usize] += 1,
            None => missed += 1,
        }
    }
    (counts, missed)
}

/// Grey levels `255 ln(1 + n) / ln(1 + max n)`.
pub fn tone_map(counts: &[u64], width: u32, height: u32) -> Raster {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut img = Raster::new(width, height);
    if max == 0 {
        return img;
    }
    let norm = (max as f64).ln_1p();
    for (i, &n) in counts.iter().enumerate() {
        let g = (255.0 * (n as f64).ln_1p() / norm).round() as u8;
        img.rgb[3 * i..3 * i + 3].copy_from_slice(&[g, g, g]);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_roundtrip() {
        let v = Viewport {
            center: Complex64::new(0.5, -0.25),
            half_width: 2.0,
            width: 40,
            height: 30,
        };
        for (c, r) in [(0, 0), (39, 29), (17, 3)] {
            assert_eq!(v.pixel(v.point(c, r)), Some((c, r)));
        }
        assert_eq!(v.pixel(Complex64::new(10.0, 0.0)), None);
    }

    #[test]
    fn tone_map_extremes() {
        let img = tone_map(&[0, 1, 7], 3, 1);
        assert_eq!(img.get(0, 0), [0, 0, 0]);
        assert_eq!(img.get(2, 0), [255, 255, 255]);
        assert_eq!(
            img.get(1, 0)[0],
            (255.0 * 2f64.ln() / 8f64.ln()).round() as u8
        );
    }
}
