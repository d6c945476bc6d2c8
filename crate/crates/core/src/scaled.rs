//! Complex numbers carried as `m · exp(e)` to survive the exponential growth
//! of eigenfunctions at large spectral parameters.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub m: Complex64,
    pub e: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { m: Complex64 { re: 0.0, im: 0.0 }, e: 0.0 };

    pub fn new(m: Complex64, e: f64) -> Self {
        ScaledComplex { m, e }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        ScaledComplex::new(z, 0.0)
    }

    pub fn from_real(x: f64) -> Self {
        ScaledComplex::new(Complex64::new(x, 0.0), 0.0)
    }

    fn normalized(self) -> Self {
        let n = self.m.norm();
        if n == 0.0 || !n.is_finite() {
            return ScaledComplex { m: self.m, e: if n == 0.0 { 0.0 } else { self.e } };
        }
        let k = n.ln();
        ScaledComplex { m: self.m / n, e: self.e + k }
    }

    /// Natural log of the modulus.
    pub fn ln_norm(&self) -> f64 {
        let n = self.m.norm();
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            n.ln() + self.e
        }
    }

    pub fn arg(&self) -> f64 {
        self.m.arg()
    }

    pub fn is_zero(&self) -> bool {
        self.m == Complex64::new(0.0, 0.0)
    }

    /// Plain value; overflows to infinity for huge exponents.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return self.m;
        }
        self.m * self.e.exp()
    }

    pub fn conj(&self) -> Self {
        ScaledComplex { m: self.m.conj(), e: self.e }
    }

    /// `self / other`, returned as a plain complex number.
    pub fn ratio(&self, other: &ScaledComplex) -> Complex64 {
        (self.m / other.m) * (self.e - other.e).exp()
    }

    pub fn scale_ln(&self, de: f64) -> Self {
        ScaledComplex { m: self.m, e: self.e + de }
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;
    fn add(self, o: ScaledComplex) -> ScaledComplex {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let e = self.e.max(o.e);
        ScaledComplex::new(self.m * (self.e - e).exp() + o.m * (o.e - e).exp(), e)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;
    fn neg(self) -> ScaledComplex {
        ScaledComplex { m: -self.m, e: self.e }
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;
    fn sub(self, o: ScaledComplex) -> ScaledComplex {
        self + (-o)
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, o: ScaledComplex) -> ScaledComplex {
        ScaledComplex::new(self.m * o.m, self.e + o.e)
    }
}

impl Mul<Complex64> for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, o: Complex64) -> ScaledComplex {
        ScaledComplex::new(self.m * o, self.e)
    }
}

impl Mul<f64> for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, o: f64) -> ScaledComplex {
        ScaledComplex::new(self.m * o, self.e)
    }
}
