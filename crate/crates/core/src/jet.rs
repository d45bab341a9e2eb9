//! Truncated Taylor series ("jets") with complex coefficients.
//!
//! A jet of order `n` stores `f(t0), f'(t0)/1!, ..., f^(n)(t0)/n!`. Products and
//! quotients of jets give exact derivatives of products and quotients, which is
//! how derivatives of rational expressions in theta values are obtained.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// Builds a jet from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[Complex64]) -> Self {
        assert!(!derivs.is_empty(), "jet needs at least the value");
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(n, d)| {
                if n > 0 {
                    fact *= n as f64;
                }
                d / fact
            })
            .collect();
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// The `n`-th derivative at the expansion point.
    pub fn derivative(&self, n: usize) -> Complex64 {
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        self.coeffs[n] * fact
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.order()).map(|n| self.derivative(n)).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplicative inverse. Panics if the constant term is zero.
    pub fn recip(&self) -> Self {
        let c0 = self.coeffs[0];
        assert!(c0.norm() > 0.0, "jet reciprocal of zero constant term");
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = c0.inv();
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -acc / c0;
        }
        Self { coeffs: out }
    }

    pub fn div(&self, rhs: &Jet) -> Self {
        self * &rhs.recip()
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0), self.order());
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order());
        Jet {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order());
        Jet {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order());
        let n = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                coeffs[i + j] += self.coeffs[i] * rhs.coeffs[j];
            }
        }
        Jet { coeffs }
    }
}
