//! Complex disk arithmetic: a center and a radius certified to contain the
//! exact value, with floating-point rounding folded into the radius.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const U: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn exact(center: Complex64) -> Self {
        Self {
            center,
            radius: 0.0,
        }
    }

    pub fn real(x: f64) -> Self {
        Self::exact(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.center.conj(), self.radius)
    }

    /// Largest modulus in the disk.
    pub fn mag(self) -> f64 {
        self.center.norm() + self.radius
    }

    pub fn contains(self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Multiplication by an exact real scalar.
    pub fn scale(self, k: f64) -> Self {
        let c = self.center * k;
        Self::new(c, self.radius * k.abs() + U * c.norm())
    }

    /// Multiplication by an exact complex scalar.
    pub fn scale_c(self, k: Complex64) -> Self {
        self * Disk::exact(k)
    }

    pub fn widen(self, r: f64) -> Self {
        Self::new(self.center, self.radius + r)
    }

    /// `exp` over the disk: `|e^{z} - e^{c}| <= |e^{c}| (e^{r} - 1)`.
    pub fn exp(self) -> Self {
        let e = self.center.exp();
        let r = e.norm() * self.radius.exp_m1() + 4.0 * U * e.norm();
        Self::new(e, r)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, k: u32) -> Self {
        let mut acc = Disk::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl Add for Disk {
    type Output = Disk;
    fn add(self, o: Disk) -> Disk {
        let c = self.center + o.center;
        Disk::new(c, self.radius + o.radius + U * c.norm())
    }
}

impl Sub for Disk {
    type Output = Disk;
    fn sub(self, o: Disk) -> Disk {
        self + (-o)
    }
}

impl Neg for Disk {
    type Output = Disk;
    fn neg(self) -> Disk {
        Disk::new(-self.center, self.radius)
    }
}

impl Mul for Disk {
    type Output = Disk;
    fn mul(self, o: Disk) -> Disk {
        let c = self.center * o.center;
        // complex product rounding is below 2 sqrt(2) u |a||b|
        let r = self.center.norm() * o.radius
            + o.center.norm() * self.radius
            + self.radius * o.radius
            + 3.0 * U * self.center.norm() * o.center.norm();
        Disk::new(c, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn product_encloses(ar in -3.0..3.0f64, ai in -3.0..3.0f64, br in -3.0..3.0f64,
                            bi in -3.0..3.0f64, ra in 0.0..0.5f64, rb in 0.0..0.5f64,
                            t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
            let a = Disk::new(Complex64::new(ar, ai), ra);
            let b = Disk::new(Complex64::new(br, bi), rb);
            let x = a.center + Complex64::from_polar(ra * t1, 6.0 * t2);
            let y = b.center + Complex64::from_polar(rb * t2, 5.0 * t1);
            prop_assert!((a * b).contains(x * y));
            prop_assert!((a + b).contains(x + y));
            prop_assert!(a.exp().contains(x.exp()));
        }
    }
}
