//! The full check suite, parameter sweeps and the emitted matrix bundle.

use crate::error::{Error, Result};
use crate::hesse::{double_neg, embed, hesse_value, proj_distance, CurveConfig, ProjectivePoint};
use crate::latex::{matrix_to_latex, symbolic_layout, Layout};
use crate::matrix::{eval_matrix, numeric_rank, PolyMatrix};
use crate::moore::{l_matrix, moore_matrix, theta_relation_residual, theta_relation_tol, verify_rank_one};
use crate::report::{Check, CheckReport};
use crate::sampling::{curve_points, off_curve_points, random_z, rng};
use crate::theta::{LatticeVector, ThetaContext};
use crate::ulrich::{
    automorphy_residual, build_algebraic, build_analytic, calibrate_scalars, cocycle_residual,
    derivative_elimination_fit, elimination_consequence, kernel_relation_residual, lambda_one,
    offset_one_agreement, relation_matrix, relation_residual, verify_factorization, verify_presentation,
    UlrichSpec, AUTOMORPHY_TOL, CONSEQUENCE_TOL, FIT_TOL, KERNEL_TOL,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;

type C = Complex64;

pub const POINT_MAP_TOL: f64 = 1e-8;
pub const HESSE_TOL: f64 = 1e-9;
pub const PSI_PERTURBATION: f64 = 1e-3;
/// Highest order of the differentiated theta relations in the suite.
pub const RELATION_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PointInput {
    /// `a = embed(a_z)`.
    Analytic(C),
    Projective(ProjectivePoint),
}

/// Deliberate corruptions that the suite must detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// Zero block `(0,1)` of every `A_{k+1}`.
    ZeroBlock,
    /// Drop the binomial `C(k,1)` from block `(0,1)`.
    DropBinomial,
    /// Verify against `ψ + 1e-3`.
    PerturbPsi,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub tau: C,
    pub a: PointInput,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub mutate: Option<Mutation>,
}

impl SuiteConfig {
    pub fn new(tau: C, a: PointInput, ks: Vec<usize>) -> Self {
        Self {
            tau,
            a,
            ks,
            seed: 42,
            samples: 10,
            tol: None,
            mutate: None,
        }
    }
}

fn make_spec(ctx: &ThetaContext, a: PointInput, k: usize) -> Result<UlrichSpec> {
    match a {
        PointInput::Analytic(a_z) => UlrichSpec::analytic(k, ctx.clone(), a_z),
        PointInput::Projective(p) => UlrichSpec::algebraic(k, ctx.clone(), p),
    }
}

/// Keeps the worst check per name; failures rank above passes, then larger
/// residuals. Order of first appearance is preserved.
pub fn merge_worst(checks: impl IntoIterator<Item = Check>) -> CheckReport {
    let mut order: Vec<String> = Vec::new();
    let mut worst: BTreeMap<String, Check> = BTreeMap::new();
    for c in checks {
        match worst.get(&c.name) {
            None => {
                order.push(c.name.clone());
                worst.insert(c.name.clone(), c);
            }
            Some(prev) => {
                let worse = (!c.pass && prev.pass)
                    || (c.pass == prev.pass && (c.residual > prev.residual || c.residual.is_nan()));
                if worse {
                    worst.insert(c.name.clone(), c);
                }
            }
        }
    }
    order.into_iter().map(|n| worst.remove(&n).expect("present")).collect()
}

fn mutate_matrix(a: &mut PolyMatrix, k: usize, mutation: Option<Mutation>) {
    if k == 0 {
        return;
    }
    match mutation {
        Some(Mutation::ZeroBlock) => a.set_block(0, 1, &PolyMatrix::zeros(3, 3)),
        Some(Mutation::DropBinomial) => {
            let b = a.block(0, 1, 3, 3).scale(C::new(1.0 / k as f64, 0.0));
            a.set_block(0, 1, &b);
        }
        _ => {}
    }
}

fn error_check(name: &str, err: &Error) -> Check {
    Check::new(name, f64::INFINITY, 0.0).with_input("error", err.to_string())
}

/// Runs every verification for one `(τ, a)` and each `k` in `cfg.ks`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let ctx = ThetaContext::new(cfg.tau)?;
    let base = make_spec(&ctx, cfg.a, 0)?;
    let psi = base.psi;
    let psi_used = match cfg.mutate {
        Some(Mutation::PerturbPsi) => psi + PSI_PERTURBATION,
        _ => psi,
    };
    let curve = CurveConfig::new(psi)?;
    let mut r = rng(cfg.seed);
    let zs: Vec<C> = (0..cfg.samples).map(|_| random_z(&mut r, cfg.tau)).collect();
    let on = curve_points(&mut rng(cfg.seed.wrapping_add(1)), &curve, cfg.samples);
    let off = off_curve_points(&mut rng(cfg.seed.wrapping_add(2)), psi, cfg.samples);
    let fit_samples = curve_points(&mut rng(cfg.seed.wrapping_add(3)), &curve, 8);

    let mut checks: Vec<Check> = Vec::new();
    let common = |c: Check| c.with_input("tau", cfg.tau).with_input("a", cfg.a);

    for &z in &zs {
        let p = embed(z, &ctx)?;
        checks.push(common(Check::new("theta.hesse_identity", hesse_value(&p.coords(), psi).norm(), HESSE_TOL).with_input("z", z)));
        let image = embed(-2.0 * z, &ctx)?;
        let d = match double_neg(&p) {
            Ok(q) => proj_distance(&q, &image),
            Err(_) => f64::INFINITY,
        };
        checks.push(common(Check::new("hesse.double_neg_vs_embed", d, POINT_MAP_TOL).with_input("z", z)));
    }

    for p in std::iter::once(&base.point).chain(on.iter().take(3)) {
        checks.extend(verify_rank_one(p, psi_used)?.checks.into_iter().map(&common));
    }

    if let PointInput::Analytic(a_z) = cfg.a {
        for &z in zs.iter().take(3) {
            for order in 0..=RELATION_ORDER {
                let res = theta_relation_residual(a_z, z, &ctx, order)?;
                checks.push(common(
                    Check::new(format!("moore.theta_relation.order{order}"), res, theta_relation_tol(order)).with_input("z", z),
                ));
            }
        }
        let fit = derivative_elimination_fit(a_z, &ctx)?;
        checks.push(common(Check::new("elimination.fit", fit.residual, FIT_TOL).with_input("c", fit.c).with_input("s", fit.s)));
        checks.push(common(Check::new("elimination.consequence", elimination_consequence(a_z, &ctx, &fit)?, CONSEQUENCE_TOL)));
        let reference = derivative_elimination_fit(C::new(0.2, 0.05), &ctx)?;
        checks.push(common(
            Check::new("elimination.c_independent_of_a", (fit.c - reference.c).norm() / reference.c.norm(), 1e-6)
                .with_input("c_reference", reference.c),
        ));
        let lambda1 = lambda_one(&base, &fit)?;
        checks.push(common(Check::new("elimination.offset_one_agreement", offset_one_agreement(&base, &fit, lambda1)?, KERNEL_TOL)));
    }

    let mut report = merge_worst(checks);
    for &k in &cfg.ks {
        let mut checks: Vec<Check> = Vec::new();
        let spec = base.with_k(k);
        let tagged = |c: Check| common(c).with_input("k", k);

        if spec.a_z.is_some() {
            let (mut a, b) = build_analytic(&spec)?;
            mutate_matrix(&mut a, k, cfg.mutate);
            checks.extend(verify_factorization(&a, &b, psi_used)?.checks.into_iter().map(&tagged));
            checks.extend(
                verify_presentation(&a, psi_used, k, &on, &off)?
                    .checks
                    .into_iter()
                    .map(|c| tagged(Check { name: c.name.replace("presentation.", "presentation.analytic."), ..c })),
            );
            let z = zs[0];
            checks.push(tagged(Check::new("kernel.stacked_sections", kernel_relation_residual(&spec, &a, z)?, KERNEL_TOL).with_input("z", z)));
            for lambda in [LatticeVector::ONE, LatticeVector::TAU] {
                let res = automorphy_residual(&spec, lambda, z)?;
                checks.push(tagged(
                    Check::new("automorphy.transform", res, AUTOMORPHY_TOL)
                        .with_input("lambda", lambda.to_string())
                        .with_input("z", z),
                ));
            }
            let cocycle = cocycle_residual(&spec, LatticeVector::ONE, LatticeVector::TAU, z)?;
            checks.push(tagged(Check::new("automorphy.cocycle", cocycle, AUTOMORPHY_TOL).with_input("z", z)));

            let rel = relation_matrix(&a)?;
            let rank = numeric_rank(&rel, None);
            checks.push(tagged(Check::new("kernel.relation_rank", rank.abs_diff(spec.dim()) as f64, 0.0).with_input("rank", rank)));
            checks.push(tagged(Check::new("kernel.relation_annihilates_sections", relation_residual(&spec, &rel, z)?, KERNEL_TOL).with_input("z", z)));
        }

        match calibrate_scalars(&spec, &fit_samples) {
            Ok(cal) => {
                let worst = cal.residuals.iter().copied().fold(0.0, f64::max);
                checks.push(tagged(
                    Check::new("calibration.offset_scalars", worst, 1e-6)
                        .with_input("lambdas", &cal.lambdas)
                        .with_input("normalized", &cal.normalized),
                ));
                let mut a = build_algebraic(&spec, &cal.lambdas)?;
                mutate_matrix(&mut a, k, cfg.mutate);
                checks.extend(
                    verify_presentation(&a, psi_used, k, &on, &off)?
                        .checks
                        .into_iter()
                        .map(|c| tagged(Check { name: c.name.replace("presentation.", "presentation.algebraic."), ..c })),
                );
            }
            Err(e) => checks.push(tagged(error_check("calibration.offset_scalars", &e))),
        }
        report.extend(merge_worst(checks));
    }

    Ok(match cfg.tol {
        Some(t) => report
            .checks
            .into_iter()
            .map(|c| if c.tol > 0.0 { c.retol(t) } else { c })
            .collect(),
        None => report,
    })
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub taus: Vec<C>,
    pub points: Vec<PointInput>,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub mutate: Option<Mutation>,
}

/// Runs the suite on every `(τ, a, k)` and keeps, per check name, the maximum
/// residual together with the configuration attaining it. Output is sorted by
/// name; construction errors become failing `construction` entries.
pub fn run_sweep(cfg: &SweepConfig) -> CheckReport {
    let mut grid = Vec::new();
    for &tau in &cfg.taus {
        for &a in &cfg.points {
            for &k in &cfg.ks {
                grid.push((tau, a, k));
            }
        }
    }
    let results: Vec<Vec<Check>> = grid
        .par_iter()
        .map(|&(tau, a, k)| {
            let suite = SuiteConfig {
                tau,
                a,
                ks: vec![k],
                seed: cfg.seed,
                samples: cfg.samples,
                tol: cfg.tol,
                mutate: cfg.mutate,
            };
            let config = json!({"tau": tau, "a": a, "k": k});
            match run_suite(&suite) {
                Ok(r) => r.checks.into_iter().map(|c| c.with_input("config", &config)).collect(),
                Err(e) => vec![error_check("construction", &e).with_input("config", &config)],
            }
        })
        .collect();

    let mut by_name: BTreeMap<String, (Check, usize, bool)> = BTreeMap::new();
    for c in results.into_iter().flatten() {
        let entry = by_name.entry(c.name.clone()).or_insert_with(|| (c.clone(), 0, true));
        entry.1 += 1;
        entry.2 &= c.pass;
        let worse = c.residual > entry.0.residual || (!c.pass && entry.0.pass);
        if worse {
            entry.0 = c;
        }
    }
    by_name
        .into_iter()
        .map(|(name, (worst, count, all_pass))| Check {
            name,
            residual: worst.residual,
            tol: worst.tol,
            pass: all_pass,
            inputs: BTreeMap::from([
                ("configs".to_string(), json!(count)),
                ("worst".to_string(), serde_json::to_value(&worst.inputs).unwrap_or_default()),
            ]),
        })
        .collect()
}

/// The matrices emitted for one `(τ, a, k)`.
#[derive(Debug, Clone, Serialize)]
pub struct EmitBundle {
    pub tau: C,
    pub psi: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_z: Option<C>,
    pub point: ProjectivePoint,
    pub k: usize,
    pub basis: String,
    #[serde(rename = "M")]
    pub m: PolyMatrix,
    #[serde(rename = "L")]
    pub l: PolyMatrix,
    #[serde(rename = "A_analytic", skip_serializing_if = "Option::is_none")]
    pub a_analytic: Option<PolyMatrix>,
    #[serde(rename = "B_analytic", skip_serializing_if = "Option::is_none")]
    pub b_analytic: Option<PolyMatrix>,
    #[serde(rename = "A_algebraic", skip_serializing_if = "Option::is_none")]
    pub a_algebraic: Option<PolyMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<C>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas_normalized: Option<Vec<C>>,
}

/// Builds `M`, `L` and, for `k ≥ 1`, the analytic pair and the calibrated
/// algebraic `A_{k+1}`.
pub fn emit_bundle(tau: C, a: PointInput, k: usize, seed: u64) -> Result<EmitBundle> {
    let ctx = ThetaContext::new(tau)?;
    let spec = make_spec(&ctx, a, k)?;
    let mut bundle = EmitBundle {
        tau,
        psi: spec.psi,
        a_z: spec.a_z,
        point: spec.point,
        k,
        basis: ctx.basis.describe(),
        m: moore_matrix(&spec.point),
        l: l_matrix(&spec.point)?,
        a_analytic: None,
        b_analytic: None,
        a_algebraic: None,
        lambdas: None,
        lambdas_normalized: None,
    };
    if k == 0 {
        return Ok(bundle);
    }
    if spec.a_z.is_some() {
        let (a_mat, b_mat) = build_analytic(&spec)?;
        bundle.a_analytic = Some(a_mat);
        bundle.b_analytic = Some(b_mat);
    }
    let samples = curve_points(&mut rng(seed.wrapping_add(3)), &spec.curve(), 8);
    let cal = calibrate_scalars(&spec, &samples)?;
    bundle.a_algebraic = Some(build_algebraic(&spec, &cal.lambdas)?);
    bundle.lambdas = Some(cal.lambdas);
    bundle.lambdas_normalized = Some(cal.normalized);
    Ok(bundle)
}

/// A LaTeX document fragment with the symbolic layouts and every matrix.
pub fn bundle_latex(b: &EmitBundle, digits: usize) -> String {
    let mut out = String::new();
    let mut section = |title: &str, body: String| {
        out.push_str(&format!("% {title}\n\\[\n{body}\n\\]\n\n"));
    };
    section("M_{a,x}", matrix_to_latex(&b.m, digits));
    section("L_{a,x}", matrix_to_latex(&b.l, digits));
    if b.k > 0 {
        if let (Some(a), Some(bm)) = (&b.a_analytic, &b.b_analytic) {
            section("A analytic, layout", symbolic_layout(b.k, Layout::Analytic));
            section("A analytic", matrix_to_latex(a, digits));
            section("B analytic", matrix_to_latex(bm, digits));
        }
        if let Some(a) = &b.a_algebraic {
            section("A algebraic, layout", symbolic_layout(b.k, Layout::Algebraic));
            section("A algebraic", matrix_to_latex(a, digits));
        }
    }
    out
}

/// Numeric corank of `a` at `x`.
pub fn corank_at(a: &PolyMatrix, x: &ProjectivePoint) -> usize {
    a.rows() - numeric_rank(&eval_matrix(a, &x.coords()), None)
}
