//! Rank-`(k+1)` presentations `A_{k+1}` / `B_{k+1}`.
//!
//! The analytic pair is built from a-derivatives of the Moore matrix and its
//! partner; the algebraic `A_{k+1}` from Moore matrices at the points
//! `(−2)^l a`, with one scalar `λ_l` per block offset fitted so that the
//! corank on the curve is `k+1`.

use crate::error::{Error, Result};
use crate::hesse::{double_neg_coords, double_neg_orbit, embed, hesse_value, CurveConfig, ProjectivePoint};
use crate::matrix::{det, equilibrated_rank, eval_matrix, kernel_basis, numeric_rank, CMatrix, CVector, PolyMatrix};
use crate::moore::{binomial, l_derivatives, moore_derivatives, moore_from_coords, moore_matrix};
use crate::poly::{equal_up_to_scalar, hesse_form};
use crate::report::{Check, CheckReport};
use crate::theta::{automorphy_jet, hesse_psi, theta_triple, LatticeVector, ThetaContext};
use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Largest residual [`calibrate_scalars`] accepts.
pub const CALIBRATION_TOL: f64 = 1e-6;
pub const FACTORIZATION_TOL: f64 = 1e-7;
pub const DET_TOL: f64 = 1e-7;
pub const AUTOMORPHY_TOL: f64 = 1e-7;
pub const FIT_TOL: f64 = 1e-8;
pub const CONSEQUENCE_TOL: f64 = 1e-7;
pub const KERNEL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct UlrichSpec {
    pub k: usize,
    pub ctx: ThetaContext,
    /// Analytic parameter, when the point came from `embed(a_z)`.
    pub a_z: Option<C>,
    pub point: ProjectivePoint,
    pub psi: C,
}

impl UlrichSpec {
    pub fn analytic(k: usize, ctx: ThetaContext, a_z: C) -> Result<Self> {
        let point = embed(a_z, &ctx)?;
        let psi = hesse_psi(&ctx)?;
        Self::checked(k, ctx, Some(a_z), point, psi)
    }

    /// A spec from an explicit point, which must lie on the curve of `ctx`.
    pub fn algebraic(k: usize, ctx: ThetaContext, point: ProjectivePoint) -> Result<Self> {
        let psi = hesse_psi(&ctx)?;
        let residual = hesse_value(&point.coords(), psi).norm();
        if residual > CurveConfig::DEFAULT_PROJ_TOL {
            return Err(Error::OffCurve { residual });
        }
        Self::checked(k, ctx, None, point, psi)
    }

    fn checked(k: usize, ctx: ThetaContext, a_z: Option<C>, point: ProjectivePoint, psi: C) -> Result<Self> {
        if point.min_modulus() < CurveConfig::DEFAULT_PROJ_TOL {
            return Err(Error::DenominatorZero { iteration: None });
        }
        CurveConfig::new(psi)?;
        Ok(Self { k, ctx, a_z, point, psi })
    }

    pub fn dim(&self) -> usize {
        3 * (self.k + 1)
    }

    pub fn curve(&self) -> CurveConfig {
        CurveConfig::new(self.psi).expect("validated at construction")
    }

    pub fn a_z(&self) -> Result<C> {
        self.a_z.ok_or(Error::NotAnalytic)
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }
}

/// Upper block-triangular `3(k+1)` matrix with block `(i, j)` equal to
/// `weight(i, j) · blocks[j − i]` for `i ≤ j`.
pub fn assemble<F: Fn(usize, usize) -> f64>(k: usize, blocks: &[PolyMatrix], weight: F) -> PolyMatrix {
    let mut out = PolyMatrix::zeros(3 * (k + 1), 3 * (k + 1));
    for i in 0..=k {
        for j in i..=k {
            let w = weight(i, j);
            if w != 0.0 {
                out.set_block(i, j, &blocks[j - i].scale(C::new(w, 0.0)));
            }
        }
    }
    out
}

/// `C(k−i, j−i)`, the block weight of both constructions.
pub fn binomial_weight(k: usize) -> impl Fn(usize, usize) -> f64 {
    move |i, j| binomial(k - i, j - i)
}

/// `(A, B)` with blocks `C(k−i, j−i)·M^{(j−i)}` and `C(k−i, j−i)·L^{(j−i)}`.
pub fn build_analytic(spec: &UlrichSpec) -> Result<(PolyMatrix, PolyMatrix)> {
    let a_z = spec.a_z()?;
    let ms = moore_derivatives(a_z, &spec.ctx, spec.k)?;
    let ls = l_derivatives(a_z, &spec.ctx, spec.k)?;
    let w = binomial_weight(spec.k);
    Ok((assemble(spec.k, &ms, &w), assemble(spec.k, &ls, &w)))
}

fn require_factorization_shape(a: &PolyMatrix, b: &PolyMatrix) -> Result<()> {
    if !a.is_square() || a.rows() % 3 != 0 || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::SizeMismatch(format!(
            "A is {}x{}, B is {}x{}; need equal square sizes divisible by 3",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Coefficient norms of `A·B − w·I` and `B·A − w·I`, divided by
/// `max(1, ‖A‖·‖B‖)` so that rounding in large derivative blocks is not
/// mistaken for a defect. The unscaled norms are kept as inputs.
pub fn verify_factorization(a: &PolyMatrix, b: &PolyMatrix, psi: C) -> Result<CheckReport> {
    require_factorization_shape(a, b)?;
    let w_i = PolyMatrix::scalar_identity(a.rows(), &hesse_form(psi));
    let scale = (a.coeff_norm() * b.coeff_norm()).max(1.0);
    let ab = a.matmul(b)?.sub(&w_i)?.coeff_norm();
    let ba = b.matmul(a)?.sub(&w_i)?.coeff_norm();
    let size = a.rows();
    Ok([
        Check::new("factorization.ab_minus_w", ab / scale, FACTORIZATION_TOL)
            .with_input("size", size)
            .with_input("absolute", ab),
        Check::new("factorization.ba_minus_w", ba / scale, FACTORIZATION_TOL)
            .with_input("size", size)
            .with_input("absolute", ba),
    ]
    .into_iter()
    .collect())
}

/// `A_{k+1}` with block `(i, j)` equal to `C(k−i, j−i)·λ_{j−i}·M_{(−2)^{j−i}a}`;
/// `lambdas` holds `λ₁..λ_k`.
pub fn build_algebraic(spec: &UlrichSpec, lambdas: &[C]) -> Result<PolyMatrix> {
    if lambdas.len() != spec.k {
        return Err(Error::SizeMismatch(format!(
            "{} scalars for k = {}",
            lambdas.len(),
            spec.k
        )));
    }
    let orbit = double_neg_orbit(&spec.point, spec.k)?;
    let blocks: Vec<PolyMatrix> = orbit
        .iter()
        .enumerate()
        .map(|(l, p)| {
            let m = moore_matrix(p);
            if l == 0 {
                m
            } else {
                m.scale(lambdas[l - 1])
            }
        })
        .collect();
    Ok(assemble(spec.k, &blocks, binomial_weight(spec.k)))
}

/// Least-squares solution of `θ′(a) = s·θ(a) + c·R(a)`, with
/// `R(a) = double_neg(θ(a)) / (θ₀θ₁θ₂)(a)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EliminationFit {
    pub s: C,
    pub c: C,
    /// `‖θ′ − sθ − cR‖ / ‖θ′‖`.
    pub residual: f64,
}

fn rational_double_neg(a: &[C; 3]) -> [C; 3] {
    let d = double_neg_coords(a);
    let p = a[0] * a[1] * a[2];
    d.map(|v| v / p)
}

pub fn derivative_elimination_fit(a_z: C, ctx: &ThetaContext) -> Result<EliminationFit> {
    let t = theta_triple(a_z, ctx, 1)?;
    let (theta, dtheta) = (t[0], t[1]);
    let scale = theta.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if theta.iter().any(|v| v.norm() < CurveConfig::DEFAULT_PROJ_TOL * scale) {
        return Err(Error::DenominatorZero { iteration: None });
    }
    let r = rational_double_neg(&theta);
    let sys = CMatrix::from_fn(3, 2, |i, j| if j == 0 { theta[i] } else { r[i] });
    if numeric_rank(&sys, None) < 2 {
        return Err(Error::IllConditioned);
    }
    let rhs = CVector::from_column_slice(&dtheta);
    let sol = sys
        .clone()
        .svd(true, true)
        .solve(&rhs, 0.0)
        .map_err(|_| Error::IllConditioned)?;
    let residual = (&sys * &sol - &rhs).norm() / rhs.norm();
    Ok(EliminationFit {
        s: sol[0],
        c: sol[1],
        residual,
    })
}

/// `‖M′ − s·M − c·M_R‖ / ‖M′‖` with `M_R` the Moore matrix at `R(a)`.
pub fn elimination_consequence(a_z: C, ctx: &ThetaContext, fit: &EliminationFit) -> Result<f64> {
    let ms = moore_derivatives(a_z, ctx, 1)?;
    let theta = theta_triple(a_z, ctx, 0)?[0];
    let mr = moore_from_coords(&rational_double_neg(&theta));
    let diff = ms[1].sub(&ms[0].scale(fit.s))?.sub(&mr.scale(fit.c))?;
    Ok(diff.coeff_norm() / ms[1].coeff_norm())
}

/// `λ₁` relating the analytic and algebraic offset-one blocks:
/// `c·R(a)/ρ = λ₁·(−2a)` where `θ(a) = ρ·a` on normalized representatives.
pub fn lambda_one(spec: &UlrichSpec, fit: &EliminationFit) -> Result<C> {
    let a = spec.point.coords();
    let target = rational_double_neg(&a).map(|v| v * fit.c);
    let b = double_neg_orbit(&spec.point, 1)?[1].coords();
    let bb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    Ok(b.iter().zip(&target).map(|(x, y)| x.conj() * y).sum::<C>() / bb)
}

/// `‖(M′ − s·M)/ρ − λ₁·M_{−2a}‖ / ‖λ₁·M_{−2a}‖`, block `(0,1)` of the analytic
/// `A₂` after eliminating `s` against the algebraic one.
pub fn offset_one_agreement(spec: &UlrichSpec, fit: &EliminationFit, lambda1: C) -> Result<f64> {
    let a_z = spec.a_z()?;
    let ms = moore_derivatives(a_z, &spec.ctx, 1)?;
    let raw = theta_triple(a_z, &spec.ctx, 0)?[0];
    let a = spec.point.coords();
    let idx = (0..3).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())).expect("3 coords");
    let rho = raw[idx] / a[idx];
    let reduced = ms[1].sub(&ms[0].scale(fit.s))?.scale(rho.inv());
    let b = double_neg_orbit(&spec.point, 1)?[1];
    let expected = moore_matrix(&b).scale(lambda1);
    Ok(reduced.sub(&expected)?.coeff_norm() / expected.coeff_norm())
}

/// Fitted offset scalars and the residual of each fit.
#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub lambdas: Vec<C>,
    pub residuals: Vec<f64>,
    /// `λ_l / λ₁^l`.
    pub normalized: Vec<C>,
}

/// Fits `λ₁..λ_k` so the algebraic `A_{k+1}` has corank `k+1` at every sample.
///
/// `λ₁` comes from the elimination fit when the spec is analytic and is 1
/// otherwise. For `l ≥ 2`, the bottom-right `l`-block of `A_{l+1}` is `A_l`;
/// with `u` the left null vector of `M_a(x)` and `v` ranging over the kernel of
/// `A_l(x)`, corank `l+1` requires `u·Σ_j A_{0j}(x) v_j = 0`, which is linear
/// in `λ_l`.
pub fn calibrate_scalars(spec: &UlrichSpec, samples: &[ProjectivePoint]) -> Result<Calibration> {
    let mut lambdas = Vec::with_capacity(spec.k);
    let mut residuals = Vec::with_capacity(spec.k);
    if spec.k == 0 {
        return Ok(Calibration {
            lambdas,
            residuals,
            normalized: Vec::new(),
        });
    }
    match spec.a_z {
        Some(a_z) => {
            let fit = derivative_elimination_fit(a_z, &spec.ctx)?;
            lambdas.push(lambda_one(spec, &fit)?);
            residuals.push(fit.residual);
        }
        None => {
            lambdas.push(C::new(1.0, 0.0));
            residuals.push(0.0);
        }
    }
    let orbit = double_neg_orbit(&spec.point, spec.k)?;
    let moores: Vec<PolyMatrix> = orbit.iter().map(moore_matrix).collect();

    for l in 2..=spec.k {
        let lower = build_algebraic(&spec.with_k(l - 1), &lambdas)?;
        let mut num = ZERO;
        let mut den = 0.0;
        let mut eqs: Vec<(C, C)> = Vec::new();
        for x in samples {
            let xc = x.coords();
            let left = kernel_basis(&eval_matrix(&moores[0], &xc).adjoint(), 1);
            let u = left[0].adjoint();
            let evals: Vec<CMatrix> = moores.iter().map(|m| eval_matrix(m, &xc)).collect();
            for v in kernel_basis(&eval_matrix(&lower, &xc), l) {
                let mut alpha = ZERO;
                for j in 1..l {
                    let vj = v.rows(3 * (j - 1), 3).into_owned();
                    let t = (&u * &evals[j] * vj)[(0, 0)];
                    alpha += t * lambdas[j - 1] * binomial(l, j);
                }
                let vl = v.rows(3 * (l - 1), 3).into_owned();
                let beta = (&u * &evals[l] * vl)[(0, 0)];
                num -= beta.conj() * alpha;
                den += beta.norm_sqr();
                eqs.push((alpha, beta));
            }
        }
        if den == 0.0 {
            return Err(Error::CalibrationFailed {
                offset: l,
                residual: f64::INFINITY,
            });
        }
        let lambda = num / den;
        let miss: f64 = eqs.iter().map(|(a, b)| (a + lambda * b).norm_sqr()).sum();
        let size: f64 = eqs.iter().map(|(a, b)| a.norm_sqr() + (lambda * b).norm_sqr()).sum();
        let residual = (miss / size).sqrt();
        if !(residual <= CALIBRATION_TOL) {
            return Err(Error::CalibrationFailed { offset: l, residual });
        }
        lambdas.push(lambda);
        residuals.push(residual);
    }
    let normalized = lambdas
        .iter()
        .enumerate()
        .map(|(i, v)| v / lambdas[0].powu(i as u32 + 1))
        .collect();
    Ok(Calibration {
        lambdas,
        residuals,
        normalized,
    })
}

/// Determinant and corank laws for a presentation of rank `k+1`.
pub fn verify_presentation(
    a: &PolyMatrix,
    psi: C,
    k: usize,
    curve_samples: &[ProjectivePoint],
    off_samples: &[ProjectivePoint],
) -> Result<CheckReport> {
    let n = 3 * (k + 1);
    if a.rows() != n || a.cols() != n {
        return Err(Error::SizeMismatch(format!(
            "{}x{} matrix for k = {k}",
            a.rows(),
            a.cols()
        )));
    }
    let mut report = CheckReport::new();
    let d = det(a)?;
    let wk = hesse_form(psi).pow(k as u32 + 1);
    let fit = equal_up_to_scalar(&d, &wk, DET_TOL)?;
    let det_residual = if fit.scalar.norm() > 0.0 { fit.residual } else { 1.0 };
    report.push(
        Check::new("presentation.det_vs_w_power", det_residual, DET_TOL)
            .with_input("k", k)
            .with_input("scalar", fit.scalar),
    );

    let corank_defect = curve_samples
        .iter()
        .map(|x| (n - equilibrated_rank(&eval_matrix(a, &x.coords()), None)).abs_diff(k + 1))
        .max()
        .unwrap_or(0);
    report.push(
        Check::new("presentation.corank_on_curve", corank_defect as f64, 0.0)
            .with_input("k", k)
            .with_input("samples", curve_samples.len()),
    );
    let rank_defect = off_samples
        .iter()
        .map(|x| n - equilibrated_rank(&eval_matrix(a, &x.coords()), None))
        .max()
        .unwrap_or(0);
    report.push(
        Check::new("presentation.full_rank_off_curve", rank_defect as f64, 0.0)
            .with_input("k", k)
            .with_input("samples", off_samples.len()),
    );
    Ok(report)
}

/// A global section `v(z)` of the rank-`k+1` bundle; `components[p]` vanishes
/// for `p > column`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionVector {
    pub components: Vec<C>,
    pub index: usize,
    pub column: usize,
}

/// The `3(k+1)` basis sections, `column` outer and `index` inner. Component `p`
/// of section `(i, m)` is `C(m,p)/C(k,p) · θ_i^{(m−p)}(z+a)`.
pub fn section_basis(spec: &UlrichSpec, z: C) -> Result<Vec<SectionVector>> {
    let a_z = spec.a_z()?;
    let k = spec.k;
    let t = theta_triple(z + a_z, &spec.ctx, k)?;
    let mut out = Vec::with_capacity(3 * (k + 1));
    for m in 0..=k {
        for i in 0..3 {
            let components = (0..=k)
                .map(|p| {
                    if p <= m {
                        t[m - p][i] * (binomial(m, p) / binomial(k, p))
                    } else {
                        ZERO
                    }
                })
                .collect();
            out.push(SectionVector {
                components,
                index: i,
                column: m,
            });
        }
    }
    Ok(out)
}

/// `f_a(λ, z)`: upper triangular with entry `(i, j)` equal to
/// `C(k−i, j−i)·e^{(j−i)}_a(λ, z)`.
pub fn automorphy_block(spec: &UlrichSpec, lambda: LatticeVector, z: C) -> Result<CMatrix> {
    let a_z = spec.a_z()?;
    let k = spec.k;
    let e = automorphy_jet(a_z, lambda, z, &spec.ctx, k)?;
    Ok(CMatrix::from_fn(k + 1, k + 1, |i, j| {
        if j < i {
            ZERO
        } else {
            e.derivative(j - i) * binomial(k - i, j - i)
        }
    }))
}

/// `max ‖f_a(λ,z)·v(z) − v(z+λ)‖ / ‖v(z+λ)‖` over the section basis.
pub fn automorphy_residual(spec: &UlrichSpec, lambda: LatticeVector, z: C) -> Result<f64> {
    let f = automorphy_block(spec, lambda, z)?;
    let here = section_basis(spec, z)?;
    let there = section_basis(spec, z + lambda.to_complex(spec.ctx.tau))?;
    let mut worst: f64 = 0.0;
    for (v, w) in here.iter().zip(&there) {
        let v = CVector::from_column_slice(&v.components);
        let w = CVector::from_column_slice(&w.components);
        worst = worst.max((&f * v - &w).norm() / w.norm());
    }
    Ok(worst)
}

/// `‖f(λ+μ, z) − f(λ, z+μ)·f(μ, z)‖ / ‖f(λ+μ, z)‖`.
pub fn cocycle_residual(spec: &UlrichSpec, lambda: LatticeVector, mu: LatticeVector, z: C) -> Result<f64> {
    let whole = automorphy_block(spec, lambda + mu, z)?;
    let first = automorphy_block(spec, mu, z)?;
    let second = automorphy_block(spec, lambda, z + mu.to_complex(spec.ctx.tau))?;
    Ok((&whole - second * first).norm() / whole.norm())
}

/// The stacked kernel vector of column `m`: block `p` holds the triple of
/// component `p` of the sections `(0, m), (1, m), (2, m)`.
pub fn stacked_section(sections: &[SectionVector], m: usize) -> CVector {
    let k = sections[0].components.len() - 1;
    CVector::from_fn(3 * (k + 1), |r, _| {
        let (p, i) = (r / 3, r % 3);
        sections[3 * m + i].components[p]
    })
}

/// `max_m ‖A(x)·S_m‖ / (‖A(x)‖‖S_m‖)` at `x = embed(z)` over the stacked
/// sections; `m = k` is `(θ^{(k)}, …, θ′, θ)(z+a)`.
pub fn kernel_relation_residual(spec: &UlrichSpec, a: &PolyMatrix, z: C) -> Result<f64> {
    let x = embed(z, &spec.ctx)?.coords();
    let ax = eval_matrix(a, &x);
    let sections = section_basis(spec, z)?;
    let scale = ax.norm();
    Ok((0..=spec.k)
        .map(|m| {
            let s = stacked_section(&sections, m);
            (&ax * &s).norm() / (scale * s.norm())
        })
        .fold(0.0, f64::max))
}

/// `R[r, 3c + j]` = coefficient of `x_j` in `A[r, c]`; `A` must be linear.
pub fn relation_matrix(a: &PolyMatrix) -> Result<CMatrix> {
    if !a.check_linear() {
        return Err(Error::SizeMismatch("relation matrix needs a linear A".into()));
    }
    let units = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    Ok(CMatrix::from_fn(a.rows(), 3 * a.cols(), |r, col| {
        a.get(r, col / 3).coeff(&units[col % 3])
    }))
}

/// Worst scaled residual of `Σ_{c,j} R[r, 3c+j]·x_j(z)·σ_c(z) = 0`, over rows
/// `r` and section components, where column `c = 3b + i` carries the section
/// `(i, k − b)`.
pub fn relation_residual(spec: &UlrichSpec, r: &CMatrix, z: C) -> Result<f64> {
    let k = spec.k;
    let x = embed(z, &spec.ctx)?.coords();
    let sections = section_basis(spec, z)?;
    let paired = |c: usize| &sections[3 * (k - c / 3) + c % 3];
    let mut worst: f64 = 0.0;
    for row in 0..r.nrows() {
        for p in 0..=k {
            let mut sum = ZERO;
            let mut mag = 0.0;
            for col in 0..r.ncols() {
                let (c, j) = (col / 3, col % 3);
                let t = r[(row, col)] * x[j] * paired(c).components[p];
                sum += t;
                mag += t.norm();
            }
            if mag > 0.0 {
                worst = worst.max(sum.norm() / mag);
            }
        }
    }
    Ok(worst)
}
