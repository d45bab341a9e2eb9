//! Moore matrices `M_{a,x}`, their partners `L_{a,x}` with `M·L = w·I`, and
//! their derivatives in the point `a`.

use crate::error::{Error, Result};
use crate::hesse::{embed, hesse_value, CurveConfig, ProjectivePoint};
use crate::jet::Jet;
use crate::matrix::{det, eval_matrix, PolyMatrix};
use crate::poly::{equal_up_to_scalar, hesse_form, MultiPoly};
use crate::report::{Check, CheckReport};
use crate::theta::{theta_jets, theta_triple, ThetaContext, MAX_ORDER};
use num_complex::Complex64;
use serde::Serialize;

/// `(a-index, x-index)` of each Moore entry.
const MOORE_PATTERN: [[(usize, usize); 3]; 3] = [
    [(0, 0), (2, 2), (1, 1)],
    [(2, 1), (1, 0), (0, 2)],
    [(1, 2), (0, 1), (2, 0)],
];

/// `(p, s)` of each `L` entry: `x_p² / a_s − a_s² x_q x_r / (a₀a₁a₂)`, `{q, r}`
/// being the complement of `p`.
const L_PATTERN: [[(usize, usize); 3]; 3] = [
    [(0, 0), (1, 2), (2, 1)],
    [(2, 2), (0, 1), (1, 0)],
    [(1, 1), (2, 0), (0, 2)],
];

/// Moore matrix with the given (not necessarily normalized) coordinates.
pub fn moore_from_coords(a: &[Complex64; 3]) -> PolyMatrix {
    PolyMatrix::from_fn(3, 3, |r, c| {
        let (ai, xi) = MOORE_PATTERN[r][c];
        MultiPoly::linear(xi, a[ai])
    })
}

/// `M_{a,x}` on the normalized representative of `a`.
pub fn moore_matrix(a: &ProjectivePoint) -> PolyMatrix {
    moore_from_coords(&a.coords())
}

fn l_entry(p: usize, inv_s: Complex64, cross: Complex64) -> MultiPoly {
    let mut sq = [0u32; 3];
    sq[p] = 2;
    let mut qr = [1u32; 3];
    qr[p] = 0;
    MultiPoly::from_terms([(sq, inv_s), (qr, cross)])
}

/// Every a-derivative of `L` up to the jets' order, `out[n] = ∂ⁿL/∂aⁿ`.
pub fn l_from_jets(a: &[Jet; 3]) -> Result<Vec<PolyMatrix>> {
    let scale = a.iter().map(|j| j.value().norm()).fold(0.0, f64::max);
    if a.iter().any(|j| j.value().norm() < CurveConfig::DEFAULT_PROJ_TOL * scale) {
        return Err(Error::DenominatorZero { iteration: None });
    }
    let order = a[0].order();
    let inv = [a[0].recip(), a[1].recip(), a[2].recip()];
    let inv_prod = &(&inv[0] * &inv[1]) * &inv[2];
    let cross: Vec<Jet> = (0..3)
        .map(|s| (&a[s].powi(2) * &inv_prod).scale(Complex64::new(-1.0, 0.0)))
        .collect();
    Ok((0..=order)
        .map(|n| {
            PolyMatrix::from_fn(3, 3, |r, c| {
                let (p, s) = L_PATTERN[r][c];
                l_entry(p, inv[s].derivative(n), cross[s].derivative(n))
            })
        })
        .collect())
}

/// `L_{a,x}` for the given coordinates.
pub fn l_from_coords(a: &[Complex64; 3]) -> Result<PolyMatrix> {
    let jets = a.map(|v| Jet::constant(v, 0));
    Ok(l_from_jets(&jets)?.remove(0))
}

/// `L_{a,x}` on the normalized representative; fails on E[3].
pub fn l_matrix(a: &ProjectivePoint) -> Result<PolyMatrix> {
    l_from_coords(&a.coords())
}

fn check_order(i: usize) -> Result<()> {
    if i > MAX_ORDER {
        Err(Error::OrderTooHigh { order: i, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

/// `M^{(n)}_{a,x}` for `n = 0..=max_order`, with `a_j = θ_j(a_z)` unnormalized.
pub fn moore_derivatives(a_z: Complex64, ctx: &ThetaContext, max_order: usize) -> Result<Vec<PolyMatrix>> {
    check_order(max_order)?;
    Ok(theta_triple(a_z, ctx, max_order)?
        .iter()
        .map(moore_from_coords)
        .collect())
}

/// `M^{(i)}_{a,x} = ∂ⁱ/∂aⁱ M_{a,x}`.
pub fn moore_derivative(a_z: Complex64, ctx: &ThetaContext, i: usize) -> Result<PolyMatrix> {
    Ok(moore_derivatives(a_z, ctx, i)?.pop().expect("nonempty"))
}

/// `L^{(n)}_{a,x}` for `n = 0..=max_order`, by jet arithmetic through the
/// `1/(a₀a₁a₂)` prefactor.
pub fn l_derivatives(a_z: Complex64, ctx: &ThetaContext, max_order: usize) -> Result<Vec<PolyMatrix>> {
    check_order(max_order)?;
    l_from_jets(&theta_jets(a_z, ctx, max_order)?)
}

pub fn l_derivative(a_z: Complex64, ctx: &ThetaContext, i: usize) -> Result<PolyMatrix> {
    Ok(l_derivatives(a_z, ctx, i)?.pop().expect("nonempty"))
}

/// A rank-one matrix factorization `(M_{a,x}, L_{a,x})` of the Hesse cubic.
#[derive(Debug, Clone, Serialize)]
pub struct MoorePair {
    pub m: PolyMatrix,
    pub l: PolyMatrix,
    pub psi: Complex64,
    pub point: ProjectivePoint,
}

impl MoorePair {
    pub fn new(point: ProjectivePoint, cfg: &CurveConfig) -> Result<Self> {
        let residual = hesse_value(&point.coords(), cfg.psi).norm();
        if residual > cfg.proj_tol {
            return Err(Error::OffCurve { residual });
        }
        Ok(Self {
            m: moore_matrix(&point),
            l: l_matrix(&point)?,
            psi: cfg.psi,
            point,
        })
    }

    pub fn verify(&self) -> Result<CheckReport> {
        verify_rank_one(&self.point, self.psi)
    }
}

/// Tolerances for the rank-one factorization checks.
pub const FACTORIZATION_TOL: f64 = 1e-8;
pub const OFFDIAG_TOL: f64 = 1e-12;
pub const SCALAR_TOL: f64 = 1e-8;

fn off_diagonal_norm(m: &PolyMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                acc += m.get(i, j).coeff_norm().powi(2);
            }
        }
    }
    acc.sqrt()
}

/// `M·L − w·I`, `L·M − w·I`, vanishing of the off-diagonal of `M·L`, and
/// `det M ≐ w` with scalar `a₀a₁a₂`.
pub fn verify_rank_one(point: &ProjectivePoint, psi: Complex64) -> Result<CheckReport> {
    let a = point.coords();
    let m = moore_matrix(point);
    let l = l_matrix(point)?;
    let w = hesse_form(psi);
    let w_i = PolyMatrix::scalar_identity(3, &w);
    let ml = m.matmul(&l)?;
    let lm = l.matmul(&m)?;

    let mut report = CheckReport::new();
    report.push(Check::new("rank_one.ml_minus_w", ml.sub(&w_i)?.coeff_norm(), FACTORIZATION_TOL).with_input("point", point));
    report.push(Check::new("rank_one.lm_minus_w", lm.sub(&w_i)?.coeff_norm(), FACTORIZATION_TOL).with_input("point", point));
    report.push(Check::new("rank_one.ml_offdiag", off_diagonal_norm(&ml), OFFDIAG_TOL).with_input("point", point));

    let d = det(&m)?;
    let fit = equal_up_to_scalar(&d, &w, SCALAR_TOL)?;
    let expected = a[0] * a[1] * a[2];
    report.push(
        Check::new("rank_one.det_m_vs_w", fit.residual, SCALAR_TOL)
            .with_input("point", point)
            .with_input("scalar", fit.scalar),
    );
    report.push(
        Check::new("rank_one.det_scalar", (fit.scalar - expected).norm() / expected.norm(), SCALAR_TOL)
            .with_input("scalar", fit.scalar)
            .with_input("expected", expected),
    );
    Ok(report)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Maximum scaled residual of the `order`-times differentiated Moore relation
/// `Σ_j C(order, j) M^{(j)}_{a,x} θ^{(order−j)}(z+a) = 0` at `x = embed(z)`.
///
/// Each of the three rows is divided by the sum of the moduli of its terms.
pub fn theta_relation_residual(a_z: Complex64, z: Complex64, ctx: &ThetaContext, order: usize) -> Result<f64> {
    if order > 8 {
        return Err(Error::OrderTooHigh { order, max: 8 });
    }
    let x = embed(z, ctx)?.coords();
    let ms = moore_derivatives(a_z, ctx, order)?;
    let ys = theta_triple(z + a_z, ctx, order)?;
    let mut worst: f64 = 0.0;
    for r in 0..3 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (j, mj) in ms.iter().enumerate() {
            let c = binomial(order, j);
            let row = eval_matrix(mj, &x);
            for col in 0..3 {
                let t = row[(r, col)] * ys[order - j][col] * c;
                sum += t;
                mag += t.norm();
            }
        }
        worst = worst.max(sum.norm() / mag.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Tolerance for the order-`n` relation: 1e-9, 1e-8, then 1e-7.
pub fn theta_relation_tol(order: usize) -> f64 {
    match order {
        0 => 1e-9,
        1 => 1e-8,
        _ => 1e-7,
    }
}

pub fn theta_relation_residuals(a_z: Complex64, z: Complex64, ctx: &ThetaContext, order: usize) -> Result<CheckReport> {
    let residual = theta_relation_residual(a_z, z, ctx, order)?;
    let check = Check::new(format!("moore.theta_relation.order{order}"), residual, theta_relation_tol(order))
        .with_input("a_z", a_z)
        .with_input("z", z)
        .with_input("tau", ctx.tau)
        .with_input("order", order);
    Ok([check].into_iter().collect())
}

/// `‖Σ_j C(i,j) M^{(j)} L^{(i−j)}‖`, the i-th derivative of `M·L`, which is
/// zero for `i ≥ 1`.
pub fn leibniz_residual(a_z: Complex64, ctx: &ThetaContext, i: usize) -> Result<f64> {
    let ms = moore_derivatives(a_z, ctx, i)?;
    let ls = l_derivatives(a_z, ctx, i)?;
    let mut acc = PolyMatrix::zeros(3, 3);
    for j in 0..=i {
        let term = ms[j].matmul(&ls[i - j])?.scale(Complex64::new(binomial(i, j), 0.0));
        acc = acc.add(&term)?;
    }
    Ok(acc.coeff_norm())
}
