//! Truncated power series in one variable, used to differentiate the
//! hypergeometric factor of the even-dimensional GOE moment exactly.

use std::ops::{Add, Mul};

/// Coefficients `c_0 + c_1 s + ... + c_d s^d`; all products are truncated at
/// degree `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn constant(value: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[0] = value;
        Series { coeffs }
    }

    /// `a + b·s`.
    pub fn linear(a: f64, b: f64, degree: usize) -> Self {
        let mut s = Self::constant(a, degree);
        if degree >= 1 {
            s.coeffs[1] = b;
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(mut self, k: f64) -> Self {
        for c in &mut self.coeffs {
            *c *= k;
        }
        self
    }

    /// `self / other`; `other` must have a nonzero constant term.
    pub fn div(&self, other: &Series) -> Series {
        let d = self.degree();
        let b0 = other.coeffs[0];
        let mut q = vec![0.0; d + 1];
        for k in 0..=d {
            let mut acc = self.coeffs[k];
            for i in 1..=k {
                acc -= other.coeffs[i] * q[k - i];
            }
            q[k] = acc / b0;
        }
        Series { coeffs: q }
    }

    /// `log(self)` for a series with positive constant term.
    pub fn ln(&self) -> Series {
        let d = self.degree();
        let a0 = self.coeffs[0];
        let mut g = vec![0.0; d + 1];
        g[0] = a0.ln();
        // k a_0 g_k = k a_k - Σ_{i=1}^{k-1} i g_i a_{k-i}
        for k in 1..=d {
            let mut acc = k as f64 * self.coeffs[k];
            for i in 1..k {
                acc -= i as f64 * g[i] * self.coeffs[k - i];
            }
            g[k] = acc / (k as f64 * a0);
        }
        Series { coeffs: g }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add<&Series> for Series {
    type Output = Series;

    fn add(mut self, rhs: &Series) -> Series {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Mul<&Series> for &Series {
    type Output = Series;

    fn mul(self, rhs: &Series) -> Series {
        let d = self.degree();
        let mut out = vec![0.0; d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs[..=d - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}
