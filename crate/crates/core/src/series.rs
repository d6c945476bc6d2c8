//! Truncated power series arithmetic used to expand rational coefficient
//! functions about the sonic point.

use std::ops::{Add, Mul, Neg, Sub};

/// Real power series `Σ c_n z^n`, truncated to a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn zero(len: usize) -> Self {
        Series(vec![0.0; len])
    }

    pub fn constant(c: f64, len: usize) -> Self {
        let mut v = vec![0.0; len];
        v[0] = c;
        Series(v)
    }

    /// The series of `a + z`.
    pub fn linear(a: f64, len: usize) -> Self {
        let mut v = vec![0.0; len];
        v[0] = a;
        if len > 1 {
            v[1] = 1.0;
        }
        Series(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        Series(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add_const(&self, s: f64) -> Self {
        let mut v = self.0.clone();
        v[0] += s;
        Series(v)
    }

    /// Quotient `self / d`; requires `d[0] != 0`.
    pub fn div(&self, d: &Series) -> Series {
        let n = self.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= d.0[j] * q[k - j];
            }
            q[k] = acc / d.0[0];
        }
        Series(q)
    }

    /// Term-wise derivative; the last coefficient is lost to truncation.
    pub fn derivative(&self) -> Series {
        let n = self.len();
        let mut v = vec![0.0; n];
        for k in 1..n {
            v[k - 1] = k as f64 * self.0[k];
        }
        Series(v)
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Series {
        let n = self.len();
        let mut v = vec![0.0; n];
        v[1..n].copy_from_slice(&self.0[..n - 1]);
        Series(v)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.len();
        let mut v = vec![0.0; n];
        for i in 0..n {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometric_series_by_division() {
        let one = Series::constant(1.0, 8);
        let d = Series(vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(one.div(&d).0, vec![1.0; 8]);
    }

    #[test]
    fn rational_function_matches_pointwise_value() {
        let n = 30;
        let h = Series::linear(1.0, n);
        let num = &(&h * &h) + &h.scale(-3.0);
        let den = (&h * &h).add_const(2.0);
        let r = num.div(&den);
        let z = 0.2;
        let x = 1.0 + z;
        assert_relative_eq!(r.eval(z), (x * x - 3.0 * x) / (x * x + 2.0), max_relative = 1e-12);
    }

    #[test]
    fn derivative_and_shift() {
        let s = Series(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.derivative().0, vec![2.0, 6.0, 12.0, 0.0]);
        assert_eq!(s.shift().0, vec![0.0, 1.0, 2.0, 3.0]);
    }
}
