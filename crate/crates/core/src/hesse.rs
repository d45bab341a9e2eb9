//! Points of P² and the Hesse cubic `x₀³+x₁³+x₂³ − 3ψ x₀x₁x₂ = 0`.
//!
//! The group law is never needed in general: only negation (swap of the last two
//! coordinates) and the tangent-line map `a ↦ −2a`, which has a closed form on
//! the Hesse cubic.

use crate::error::{Error, Result};
use crate::theta::{theta_triple, ThetaContext};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of P², stored with its largest-modulus coordinate scaled to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Complex64; 3]", into = "[Complex64; 3]")]
pub struct ProjectivePoint {
    coords: [Complex64; 3],
}

impl ProjectivePoint {
    pub fn new(coords: [Complex64; 3]) -> Result<Self> {
        let max = coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::AllZero);
        }
        // lowest index among the (near-)maximal coordinates
        let pivot = coords
            .iter()
            .position(|c| c.norm() >= max * (1.0 - 1e-12))
            .expect("max attained");
        let s = coords[pivot];
        let mut out = [coords[0] / s, coords[1] / s, coords[2] / s];
        out[pivot] = Complex64::new(1.0, 0.0);
        Ok(Self { coords: out })
    }

    pub fn from_real(coords: [f64; 3]) -> Result<Self> {
        Self::new(coords.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn coords(&self) -> [Complex64; 3] {
        self.coords
    }

    pub fn min_modulus(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<[Complex64; 3]> for ProjectivePoint {
    type Error = Error;
    fn try_from(value: [Complex64; 3]) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ProjectivePoint> for [Complex64; 3] {
    fn from(p: ProjectivePoint) -> Self {
        p.coords
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub psi: Complex64,
    pub proj_tol: f64,
}

impl CurveConfig {
    pub const DEFAULT_PROJ_TOL: f64 = 1e-8;

    pub fn new(psi: Complex64) -> Result<Self> {
        Self::with_tol(psi, Self::DEFAULT_PROJ_TOL)
    }

    pub fn with_tol(psi: Complex64, proj_tol: f64) -> Result<Self> {
        // ψ³ = −1 makes the cubic a union of three lines
        if (psi.powu(3) + 1.0).norm() < 1e-12 {
            return Err(Error::SingularCurve);
        }
        Ok(Self { psi, proj_tol })
    }
}

/// `[θ₀(z) : θ₁(z) : θ₂(z)]`.
pub fn embed(z: Complex64, ctx: &ThetaContext) -> Result<ProjectivePoint> {
    let t = theta_triple(z, ctx, 0)?[0];
    ProjectivePoint::new(t)
}

/// `1 − |⟨P,Q⟩|² / (‖P‖²‖Q‖²)`: zero exactly on equal projective classes.
pub fn proj_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    proj_distance_raw(&p.coords, &q.coords)
}

pub(crate) fn proj_distance_raw(p: &[Complex64; 3], q: &[Complex64; 3]) -> f64 {
    let inner: Complex64 = p.iter().zip(q).map(|(a, b)| a.conj() * b).sum();
    let pp: f64 = p.iter().map(|a| a.norm_sqr()).sum();
    let qq: f64 = q.iter().map(|a| a.norm_sqr()).sum();
    (1.0 - inner.norm_sqr() / (pp * qq)).clamp(0.0, 1.0)
}

/// `|a₀³+a₁³+a₂³ − 3ψ a₀a₁a₂|` on the normalized representative.
pub fn on_curve(p: &ProjectivePoint, cfg: &CurveConfig) -> f64 {
    hesse_value(&p.coords, cfg.psi).norm()
}

pub(crate) fn hesse_value(a: &[Complex64; 3], psi: Complex64) -> Complex64 {
    a[0].powu(3) + a[1].powu(3) + a[2].powu(3) - psi * a[0] * a[1] * a[2] * 3.0
}

/// `−P = [a₀ : a₂ : a₁]`.
pub fn negate(p: &ProjectivePoint) -> ProjectivePoint {
    let [a0, a1, a2] = p.coords;
    ProjectivePoint::new([a0, a2, a1]).expect("swap keeps a nonzero coordinate")
}

/// The tangent-line map without the nonvanishing check:
/// `[a₀(a₂³−a₁³) : a₁(a₀³−a₂³) : a₂(a₁³−a₀³)]`.
///
/// On the curve this is defined everywhere, including E[3] where it fixes the
/// point; [`double_neg`] refuses those points.
pub fn double_neg_polynomial(p: &ProjectivePoint) -> Result<ProjectivePoint> {
    ProjectivePoint::new(double_neg_coords(&p.coords))
}

pub(crate) fn double_neg_coords(a: &[Complex64; 3]) -> [Complex64; 3] {
    let [a0, a1, a2] = *a;
    let (c0, c1, c2) = (a0.powu(3), a1.powu(3), a2.powu(3));
    [a0 * (c2 - c1), a1 * (c0 - c2), a2 * (c1 - c0)]
}

/// `−2a` for a point off E[3].
pub fn double_neg(p: &ProjectivePoint) -> Result<ProjectivePoint> {
    if p.min_modulus() < CurveConfig::DEFAULT_PROJ_TOL {
        return Err(Error::DenominatorZero { iteration: None });
    }
    double_neg_polynomial(p).map_err(|_| Error::DenominatorZero { iteration: None })
}

/// `(−2)^l a`, by repeated [`double_neg`].
pub fn iterate_double_neg(p: &ProjectivePoint, l: usize) -> Result<ProjectivePoint> {
    let mut cur = *p;
    for i in 0..l {
        cur = double_neg(&cur).map_err(|_| Error::DenominatorZero { iteration: Some(i) })?;
    }
    Ok(cur)
}

/// The points `a, −2a, 4a, …, (−2)^l a`.
pub fn double_neg_orbit(p: &ProjectivePoint, l: usize) -> Result<Vec<ProjectivePoint>> {
    let mut out = Vec::with_capacity(l + 1);
    out.push(*p);
    for i in 0..l {
        let next = double_neg(&out[i]).map_err(|_| Error::DenominatorZero { iteration: Some(i) })?;
        out.push(next);
    }
    Ok(out)
}

/// E[3] on the Hesse cubic is the nine inflection points, i.e. the points with a
/// vanishing coordinate.
pub fn is_three_torsion(p: &ProjectivePoint, cfg: &CurveConfig) -> bool {
    p.min_modulus() < cfg.proj_tol
}
