//! Hesse theta basis θ₀, θ₁, θ₂ on E = ℂ/(ℤ ⊕ ℤτ).
//!
//! Each θ_i is a theta function with rational characteristic evaluated at
//! `(3z, 3τ)`,
//!
//! ```text
//! Θ[c, 1/2](u, σ) = Σ_n exp(πi (n+c)² σ + 2πi (n+c)(u + 1/2))
//! ```
//!
//! multiplied by a root of unity. Which characteristic and phase goes to which
//! index is pinned by invariants (Hesse identity, `[0:1:-1]` at the origin and the
//! negation symmetries), see [`calibrate_basis`]. z-derivatives are taken term
//! by term, so a single pass over the series yields every derivative order.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Highest z-derivative order the engine evaluates.
pub const MAX_ORDER: usize = 12;

const MIN_TERMS: usize = 6;
const MAX_TERMS: usize = 20_000;
const SMALL_RUN: usize = 3;

/// Relative size below which `θ_i(z)` counts as a zero for ratio computations.
pub const DEGENERACY_REL: f64 = 1e-6;

/// Assignment of characteristics and phases to the three basis indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaBasis {
    pub characteristics: [f64; 3],
    pub phases: [Complex64; 3],
}

impl ThetaBasis {
    /// The basis selected by [`calibrate_basis`].
    pub const HESSE: ThetaBasis = ThetaBasis {
        characteristics: [0.5, 1.0 / 6.0, 5.0 / 6.0],
        phases: [
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.5, -0.866_025_403_784_438_6),
        ],
    };

    /// The unpermuted starting point `Θ[1/6 + k/3, 1/2](3z, 3τ)`.
    pub const CANDIDATE: ThetaBasis = ThetaBasis {
        characteristics: [1.0 / 6.0, 0.5, 5.0 / 6.0],
        phases: [
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    };

    pub fn describe(&self) -> String {
        let names: Vec<String> = (0..3)
            .map(|i| {
                format!(
                    "theta{i} = ({:.6}{:+.6}i) * Theta[{}, 1/2](3z, 3tau)",
                    self.phases[i].re,
                    self.phases[i].im,
                    char_name(self.characteristics[i])
                )
            })
            .collect();
        names.join("; ")
    }
}

fn char_name(c: f64) -> String {
    for den in [1u32, 2, 3, 6] {
        let num = c * den as f64;
        if (num - num.round()).abs() < 1e-12 {
            return format!("{}/{}", num.round() as i64, den);
        }
    }
    format!("{c}")
}

/// Series truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Stop once three consecutive terms are below `trunc_eps * (|partial sum| + 1)`
    /// for every derivative order.
    Adaptive,
    /// Sum exactly this many terms, centred on the dominant one.
    FixedTerms(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaContext {
    pub tau: Complex64,
    pub trunc_eps: f64,
    pub check_tol: f64,
    pub basis: ThetaBasis,
}

impl ThetaContext {
    pub const DEFAULT_TRUNC_EPS: f64 = 1e-30;
    pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_tolerances(tau, Self::DEFAULT_TRUNC_EPS, Self::DEFAULT_CHECK_TOL)
    }

    pub fn with_tolerances(tau: Complex64, trunc_eps: f64, check_tol: f64) -> Result<Self> {
        let ctx = Self {
            tau,
            trunc_eps,
            check_tol,
            basis: ThetaBasis::HESSE,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_basis(mut self, basis: ThetaBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.im > 0.0) {
            return Err(Error::NonconvergentSeries(format!(
                "Im(tau) = {} must be positive",
                self.tau.im
            )));
        }
        if !(self.trunc_eps > 0.0) {
            return Err(Error::InvalidContext("trunc_eps must be positive".into()));
        }
        if !(self.check_tol > self.trunc_eps) {
            return Err(Error::InvalidContext(
                "check_tol must exceed trunc_eps".into(),
            ));
        }
        Ok(())
    }
}

/// A single theta value together with what it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub value: Complex64,
    pub order: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
struct SeriesSum {
    derivs: Vec<Complex64>,
    terms: usize,
}

/// Σ_n (6πi(n+c))^m exp(πi(n+c)²σ + 2πi(n+c)(u+1/2)) for m = 0..=max_order,
/// with `u = 3z`, `σ = 3τ`.
fn char_series(
    c: f64,
    z: Complex64,
    tau: Complex64,
    max_order: usize,
    trunc_eps: f64,
    truncation: Truncation,
) -> Result<SeriesSum> {
    let u = z * 3.0;
    let sigma = tau * 3.0;
    let i = Complex64::i();
    let shift = u + 0.5;
    // magnitude of term n peaks near n + c = -Im(u)/Im(σ)
    let centre = (-u.im / sigma.im - c).round() as i64;

    let mut sums = vec![Complex64::new(0.0, 0.0); max_order + 1];
    let mut small_run = 0usize;
    let limit = match truncation {
        Truncation::Adaptive => MAX_TERMS,
        Truncation::FixedTerms(n) => n,
    };

    let mut count = 0usize;
    while count < limit {
        // centre, centre+1, centre-1, centre+2, ...
        let step = count.div_ceil(2) as i64;
        let n = if count % 2 == 1 { centre + step } else { centre - step };
        let nc = n as f64 + c;
        let base = (i * PI * nc * nc * sigma + i * 2.0 * PI * nc * shift).exp();
        let factor = i * 6.0 * PI * nc;

        let mut term = base;
        let mut all_small = true;
        for sum in sums.iter_mut() {
            *sum += term;
            if term.norm() >= trunc_eps * (sum.norm() + 1.0) {
                all_small = false;
            }
            term *= factor;
        }
        count += 1;

        if let Truncation::Adaptive = truncation {
            small_run = if all_small { small_run + 1 } else { 0 };
            if count >= MIN_TERMS && small_run >= SMALL_RUN {
                return Ok(SeriesSum {
                    derivs: sums,
                    terms: count,
                });
            }
        }
    }
    match truncation {
        Truncation::Adaptive => Err(Error::NonconvergentSeries(format!(
            "no convergence after {MAX_TERMS} terms"
        ))),
        Truncation::FixedTerms(_) => Ok(SeriesSum {
            derivs: sums,
            terms: count,
        }),
    }
}

fn check_index(index: usize) {
    assert!(index < 3, "theta index must be 0, 1 or 2, got {index}");
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderTooHigh {
            order,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Derivatives `θ_index^{(m)}(z)` for `m = 0..=max_order`, with an explicit
/// truncation policy. Returns the values and the number of series terms used.
pub fn theta_derivatives_with(
    index: usize,
    z: Complex64,
    ctx: &ThetaContext,
    max_order: usize,
    truncation: Truncation,
) -> Result<(Vec<Complex64>, usize)> {
    check_index(index);
    ctx.validate()?;
    check_order(max_order)?;
    let s = char_series(
        ctx.basis.characteristics[index],
        z,
        ctx.tau,
        max_order,
        ctx.trunc_eps,
        truncation,
    )?;
    let phase = ctx.basis.phases[index];
    Ok((s.derivs.into_iter().map(|d| d * phase).collect(), s.terms))
}

/// `θ_index^{(m)}(z)` for every `m` up to `max_order`.
pub fn theta_derivatives(
    index: usize,
    z: Complex64,
    ctx: &ThetaContext,
    max_order: usize,
) -> Result<Vec<Complex64>> {
    theta_derivatives_with(index, z, ctx, max_order, Truncation::Adaptive).map(|(d, _)| d)
}

/// The `order`-th z-derivative of `θ_index` at `z`.
pub fn theta_eval(index: usize, z: Complex64, ctx: &ThetaContext, order: usize) -> Result<Complex64> {
    Ok(theta_derivatives(index, z, ctx, order)?[order])
}

pub fn theta_value(index: usize, z: Complex64, ctx: &ThetaContext, order: usize) -> Result<ThetaValue> {
    Ok(ThetaValue {
        value: theta_eval(index, z, ctx, order)?,
        order,
        index,
    })
}

/// `[θ₀, θ₁, θ₂]` derivatives at `z`: `out[m][i] = θ_i^{(m)}(z)`.
pub fn theta_triple(z: Complex64, ctx: &ThetaContext, max_order: usize) -> Result<Vec<[Complex64; 3]>> {
    let per_index = [
        theta_derivatives(0, z, ctx, max_order)?,
        theta_derivatives(1, z, ctx, max_order)?,
        theta_derivatives(2, z, ctx, max_order)?,
    ];
    Ok((0..=max_order)
        .map(|m| [per_index[0][m], per_index[1][m], per_index[2][m]])
        .collect())
}

/// Taylor jets of `θ_i` at `z`, one per index.
pub fn theta_jets(z: Complex64, ctx: &ThetaContext, order: usize) -> Result<[Jet; 3]> {
    Ok([
        Jet::from_derivatives(&theta_derivatives(0, z, ctx, order)?),
        Jet::from_derivatives(&theta_derivatives(1, z, ctx, order)?),
        Jet::from_derivatives(&theta_derivatives(2, z, ctx, order)?),
    ])
}

/// Probe points used by [`hesse_psi`].
pub const PSI_PROBES: [(f64, f64); 6] = [
    (0.17, 0.0),
    (0.31, 0.2),
    (0.23, 0.11),
    (0.41, -0.07),
    (0.13, 0.29),
    (0.07, 0.05),
];

fn psi_at(t: &[Complex64; 3]) -> Option<Complex64> {
    let scale = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let n = [t[0] / scale, t[1] / scale, t[2] / scale];
    let prod = n[0] * n[1] * n[2];
    if prod.norm() < DEGENERACY_REL {
        return None;
    }
    Some((n[0].powu(3) + n[1].powu(3) + n[2].powu(3)) / (prod * 3.0))
}

/// The Hesse modulus `ψ(τ) = (θ₀³+θ₁³+θ₂³)/(3θ₀θ₁θ₂)`, checked for probe
/// independence.
pub fn hesse_psi(ctx: &ThetaContext) -> Result<Complex64> {
    let mut values = Vec::with_capacity(PSI_PROBES.len());
    for (re, im) in PSI_PROBES {
        let t = theta_triple(Complex64::new(re, im), ctx, 0)?[0];
        if let Some(p) = psi_at(&t) {
            values.push(p);
        }
    }
    if values.is_empty() {
        return Err(Error::DegenerateProbe);
    }
    let mut spread: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            spread = spread.max((a - b).norm());
        }
    }
    if spread > ctx.check_tol {
        return Err(Error::InconsistentPsi {
            spread,
            tol: ctx.check_tol,
        });
    }
    Ok(values[0])
}

/// Lattice vector `m + nτ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub m: i64,
    pub n: i64,
}

impl LatticeVector {
    pub const ONE: LatticeVector = LatticeVector { m: 1, n: 0 };
    pub const TAU: LatticeVector = LatticeVector { m: 0, n: 1 };

    pub fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }

    pub fn to_complex(self, tau: Complex64) -> Complex64 {
        tau * self.n as f64 + self.m as f64
    }
}

impl std::ops::Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.m + rhs.m, self.n + rhs.n)
    }
}

impl std::fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.m, self.n) {
            (m, 0) => write!(f, "{m}"),
            (0, 1) => write!(f, "tau"),
            (0, n) => write!(f, "{n}tau"),
            (m, n) => write!(f, "{m}+{n}tau"),
        }
    }
}

/// Jet in z of `e_a(λ, z) = θ_i(z+a+λ) / θ_i(z+a)`, using the first index whose
/// denominator does not vanish and cross-checking the other usable indices.
pub fn automorphy_jet(
    a_z: Complex64,
    lambda: LatticeVector,
    z: Complex64,
    ctx: &ThetaContext,
    order: usize,
) -> Result<Jet> {
    check_order(order)?;
    let base = z + a_z;
    let shifted = base + lambda.to_complex(ctx.tau);
    let den = theta_jets(base, ctx, order)?;
    let num = theta_jets(shifted, ctx, order)?;

    let scale = den.iter().map(|j| j.value().norm()).fold(0.0, f64::max);
    let usable: Vec<usize> = (0..3)
        .filter(|&i| den[i].value().norm() > DEGENERACY_REL * scale)
        .collect();
    let Some(&first) = usable.first() else {
        return Err(Error::AllIndicesDegenerate);
    };

    let jets: Vec<Jet> = usable.iter().map(|&i| num[i].div(&den[i])).collect();
    let reference = &jets[0];
    // quotient derivatives lose about a digit per order; allow 1x, 10x, then 100x
    let mut spread: f64 = 0.0;
    for other in &jets[1..] {
        for m in 0..=order {
            let a = reference.derivative(m);
            let b = other.derivative(m);
            let slack = 10f64.powi(m.min(2) as i32);
            spread = spread.max((a - b).norm() / (a.norm().max(b.norm()).max(1.0) * slack));
        }
    }
    if spread > ctx.check_tol {
        return Err(Error::InconsistentFactor { spread });
    }
    debug_assert!(first < 3);
    Ok(jets.into_iter().next().expect("non-empty"))
}

/// The `order`-th z-derivative of the automorphy factor `e_a(λ, z)`.
pub fn automorphy_factor(
    a_z: Complex64,
    lambda: LatticeVector,
    z: Complex64,
    ctx: &ThetaContext,
    order: usize,
) -> Result<Complex64> {
    Ok(automorphy_jet(a_z, lambda, z, ctx, order)?.derivative(order))
}

/// Outcome of the invariant checks for one basis candidate.
#[derive(Debug, Clone, Serialize)]
pub struct BasisCheck {
    pub basis: ThetaBasis,
    pub origin_residual: f64,
    pub symmetry_residual: f64,
    pub hesse_residual: f64,
}

impl BasisCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.origin_residual < tol && self.symmetry_residual < tol && self.hesse_residual < tol
    }
}

const BASIS_PROBES: [(f64, f64); 4] = [(0.23, 0.07), (0.11, -0.13), (0.37, 0.21), (0.05, 0.3)];

/// Measures how far `basis` is from satisfying the Hesse-basis invariants at `tau`.
pub fn check_basis(tau: Complex64, basis: ThetaBasis) -> Result<BasisCheck> {
    let ctx = ThetaContext::new(tau)?.with_basis(basis);
    let at = |z: Complex64| -> Result<[Complex64; 3]> { Ok(theta_triple(z, &ctx, 0)?[0]) };
    let max_norm = |t: &[Complex64; 3]| t.iter().map(|x| x.norm()).fold(0.0, f64::max);

    let o = at(Complex64::new(0.0, 0.0))?;
    let s = max_norm(&o);
    let origin_residual = (o[0].norm() + (o[1] + o[2]).norm()) / s;

    let mut symmetry_residual: f64 = 0.0;
    let mut hesse_residual: f64 = 0.0;
    let psi = {
        let t = at(Complex64::new(PSI_PROBES[0].0, PSI_PROBES[0].1))?;
        psi_at(&t).ok_or(Error::DegenerateProbe)?
    };
    for (re, im) in BASIS_PROBES {
        let z = Complex64::new(re, im);
        let p = at(z)?;
        let m = at(-z)?;
        let s = max_norm(&p);
        let r = [(m[0] + p[0]).norm(), (m[1] + p[2]).norm(), (m[2] + p[1]).norm()];
        symmetry_residual = symmetry_residual.max(r.iter().fold(0.0_f64, |a, b| a.max(*b)) / s);
        let n = [p[0] / s, p[1] / s, p[2] / s];
        let w = n[0].powu(3) + n[1].powu(3) + n[2].powu(3) - psi * n[0] * n[1] * n[2] * 3.0;
        hesse_residual = hesse_residual.max(w.norm());
    }
    Ok(BasisCheck {
        basis,
        origin_residual,
        symmetry_residual,
        hesse_residual,
    })
}

fn permutations3() -> [[usize; 3]; 6] {
    [[0, 1, 2], [1, 0, 2], [0, 2, 1], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Searches index permutations of the candidate characteristics and sixth-root
/// phases on θ₀ and θ₂ (θ₁ fixes the overall scale) for the first assignment that
/// passes every basis invariant. Phases closest to 1 are tried first.
pub fn calibrate_basis(tau: Complex64, tol: f64) -> Result<BasisCheck> {
    let sixth: Vec<Complex64> = [0usize, 3, 2, 5, 4, 1]
        .iter()
        .map(|&k| Complex64::from_polar(1.0, PI * k as f64 / 3.0))
        .collect();
    let cand = ThetaBasis::CANDIDATE.characteristics;
    let mut best: Option<BasisCheck> = None;
    for perm in permutations3() {
        for p0 in &sixth {
            for p2 in &sixth {
                let basis = ThetaBasis {
                    characteristics: [cand[perm[0]], cand[perm[1]], cand[perm[2]]],
                    phases: [*p0, Complex64::new(1.0, 0.0), *p2],
                };
                let check = check_basis(tau, basis)?;
                if check.passes(tol) {
                    return Ok(check);
                }
                let score = check.origin_residual + check.symmetry_residual + check.hesse_residual;
                let better = best.as_ref().is_none_or(|b| {
                    score < b.origin_residual + b.symmetry_residual + b.hesse_residual
                });
                if better {
                    best = Some(check);
                }
            }
        }
    }
    let best = best.expect("at least one candidate");
    Err(Error::InvalidContext(format!(
        "no theta basis passes the invariants; closest: {}",
        best.basis.describe()
    )))
}
