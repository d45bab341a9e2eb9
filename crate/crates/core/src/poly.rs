//! Sparse polynomials in x₀, x₁, x₂ with complex coefficients.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Coefficients below this modulus are dropped after every operation.
pub const DROP_EPS: f64 = 1e-14;

/// Exponents of `x₀^e₀ x₁^e₁ x₂^e₂`.
pub type Monomial = [u32; 3];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Complex64>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn monomial(exp: Monomial, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p.prune();
        p
    }

    /// The variable `x_i`.
    pub fn var(i: usize) -> Self {
        let mut exp = [0; 3];
        exp[i] = 1;
        Self::monomial(exp, Complex64::new(1.0, 0.0))
    }

    /// `c · x_i`.
    pub fn linear(i: usize, c: Complex64) -> Self {
        let mut exp = [0; 3];
        exp[i] = 1;
        Self::monomial(exp, c)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Complex64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p.prune();
        p
    }

    fn add_term(&mut self, exp: Monomial, c: Complex64) {
        *self.terms.entry(exp).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn prune(&mut self) {
        self.prune_below(DROP_EPS);
    }

    pub fn prune_below(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() >= eps);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Monomial) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc + c.norm_sqr()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut p = Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        };
        p.prune();
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[Complex64; 3]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * x[0].powu(e[0]) * x[1].powu(e[1]) * x[2].powu(e[2]))
            .sum()
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, *c);
        }
        self.prune();
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out.prune();
        out
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out.prune();
        out
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Monomial,
    coeff: Complex64,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr { exp: *e, coeff: *c })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        Ok(MultiPoly::from_terms(terms.into_iter().map(|t| (t.exp, t.coeff))))
    }
}

/// The Hesse cubic `w = x₀³ + x₁³ + x₂³ − 3ψ x₀x₁x₂`.
pub fn hesse_form(psi: Complex64) -> MultiPoly {
    let one = Complex64::new(1.0, 0.0);
    MultiPoly::from_terms([
        ([3, 0, 0], one),
        ([0, 3, 0], one),
        ([0, 0, 3], one),
        ([1, 1, 1], -psi * 3.0),
    ])
}

/// Least-squares scalar relating two polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarFit {
    pub equal: bool,
    pub scalar: Complex64,
    /// `‖p − c·q‖ / (‖p‖ + ‖q‖)`.
    pub residual: f64,
}

/// Decides `p ≐ q`: finds `c` minimizing `Σ|p_m − c q_m|²` and accepts when the
/// residual is below `tol · (‖p‖ + ‖q‖)`.
pub fn equal_up_to_scalar(p: &MultiPoly, q: &MultiPoly, tol: f64) -> Result<ScalarFit> {
    if q.is_zero() {
        return Err(Error::ZeroReference);
    }
    let qq: f64 = q.terms.values().map(|c| c.norm_sqr()).sum();
    let qp: Complex64 = q.terms.iter().map(|(e, c)| c.conj() * p.coeff(e)).sum();
    let scalar = qp / qq;
    let diff = p - &q.scale(scalar);
    let residual = diff.coeff_norm() / (p.coeff_norm() + q.coeff_norm());
    Ok(ScalarFit {
        equal: residual < tol && scalar.norm() > 0.0,
        scalar,
        residual,
    })
}
