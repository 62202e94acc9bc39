//! Minkowski four-vectors with signature (+,-,-,-).
//!
//! `FourVector` holds real components (x0, x1, x2, x3); `CFourVector` is the
//! complex extension used for polarization vectors and current amplitudes,
//! with the same bilinear (not sesquilinear) Minkowski product.

use num_complex::Complex64;
use std::ops::{Add, Index, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        FourVector([x0, x1, x2, x3])
    }

    /// Null momentum from spatial components: k0 = |kvec| exactly.
    pub fn null_from_spatial(k1: f64, k2: f64, k3: f64) -> Self {
        FourVector([(k1 * k1 + k2 * k2 + k3 * k3).sqrt(), k1, k2, k3])
    }

    pub fn spatial_norm(&self) -> f64 {
        let [_, x, y, z] = self.0;
        (x * x + y * y + z * z).sqrt()
    }

    /// Minkowski product a.b = a0 b0 - a1 b1 - a2 b2 - a3 b3.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2] - self.0[3] * other.0[3]
    }

    /// Euclidean norm of the components; used for residual reports, where a
    /// Minkowski norm could vanish on a nonzero vector.
    pub fn component_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> CFourVector {
        CFourVector(self.0.map(|x| Complex64::new(x, 0.0)))
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|x| -x))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|x| x * s))
    }
}

/// Complex four-vector; components transform like a vector, the product is
/// the bilinear extension of the Minkowski form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFourVector(pub [Complex64; 4]);

impl CFourVector {
    pub const ZERO: CFourVector = CFourVector([Complex64::new(0.0, 0.0); 4]);

    /// Bilinear Minkowski product; no conjugation on either factor.
    pub fn dot(&self, other: &CFourVector) -> Complex64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2] - self.0[3] * other.0[3]
    }

    pub fn conj(&self) -> CFourVector {
        CFourVector(self.0.map(|x| x.conj()))
    }

    pub fn component_norm(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CFourVector {
        CFourVector(self.0.map(|x| x * s))
    }
}

impl Index<usize> for CFourVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for CFourVector {
    type Output = CFourVector;
    fn add(self, rhs: CFourVector) -> CFourVector {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0.iter()) {
            *o += r;
        }
        CFourVector(out)
    }
}

impl Sub for CFourVector {
    type Output = CFourVector;
    fn sub(self, rhs: CFourVector) -> CFourVector {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0.iter()) {
            *o -= r;
        }
        CFourVector(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_momentum_is_null() {
        let k = FourVector::null_from_spatial(0.3, -1.2, 2.5);
        assert_eq!(k[0], k.spatial_norm(), "k0 is defined as |kvec|");
        assert!(k.dot(&k).abs() <= 4.0 * f64::EPSILON * k[0] * k[0]);
    }

    #[test]
    fn signature_is_mostly_minus() {
        let t = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let x = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(t.dot(&t), 1.0);
        assert_eq!(x.dot(&x), -1.0);
        assert_eq!(t.dot(&x), 0.0);
    }

    #[test]
    fn complex_dot_is_bilinear_not_sesquilinear() {
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let v = CFourVector([zero, i, zero, zero]);
        // bilinear form: v.v = -(i*i) = +1; a sesquilinear form would give -|i|^2 = -1
        assert_eq!(v.dot(&v), Complex64::new(1.0, 0.0));
    }
}
