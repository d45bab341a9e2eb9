use hesse_ulrich::error::Error;
use hesse_ulrich::hesse::{embed, proj_distance, ProjectivePoint};
use hesse_ulrich::sampling::{random_z, rng};
use hesse_ulrich::theta::{
    automorphy_factor, hesse_psi, theta_derivatives, theta_derivatives_with, theta_eval, theta_triple,
    LatticeVector, ThetaContext, Truncation,
};
use hesse_ulrich::Complex64;
use proptest::prelude::*;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn ctx_i() -> ThetaContext {
    ThetaContext::new(c(0.0, 1.0)).unwrap()
}

#[test]
fn origin_is_zero_one_minus_one() {
    let t = theta_triple(c(0.0, 0.0), &ctx_i(), 0).unwrap()[0];
    assert!(t[0].norm() < 1e-14);
    assert!((t[1] + t[2]).norm() < 1e-14);
    let p = ProjectivePoint::new(t).unwrap();
    let expect = ProjectivePoint::from_real([0.0, 1.0, -1.0]).unwrap();
    assert!(proj_distance(&p, &expect) < 1e-14);
}

#[test]
fn first_derivative_matches_central_difference() {
    let ctx = ctx_i();
    let h = 1e-5;
    for z in [c(0.13, 0.07), c(0.4, 0.55), c(-0.21, 0.3)] {
        for i in 0..3 {
            let d = theta_eval(i, z, &ctx, 1).unwrap();
            let fd = (theta_eval(i, z + h, &ctx, 0).unwrap() - theta_eval(i, z - h, &ctx, 0).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() / d.norm() < 1e-6, "index {i} at {z}");
        }
    }
}

#[test]
fn higher_derivatives_match_richardson_differences() {
    // Richardson-extrapolated central difference of the (m-1)-th derivative
    let ctx = ctx_i();
    let z = c(0.23, 0.19);
    for i in 0..3 {
        let d = theta_derivatives(i, z, &ctx, 5).unwrap();
        for m in 1..=4 {
            let cd = |h: f64| {
                (theta_eval(i, z + h, &ctx, m - 1).unwrap() - theta_eval(i, z - h, &ctx, m - 1).unwrap()) / (2.0 * h)
            };
            let h = 1e-3;
            let rich = (cd(h / 2.0) * 4.0 - cd(h)) / 3.0;
            assert!((rich - d[m]).norm() / d[m].norm() < 1e-6, "order {m}, index {i}");
        }
    }
}

#[test]
fn hesse_identity_at_random_points() {
    let ctx = ctx_i();
    let psi = hesse_psi(&ctx).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let z = random_z(&mut r, ctx.tau);
        let a = embed(z, &ctx).unwrap().coords();
        let w = a[0].powu(3) + a[1].powu(3) + a[2].powu(3) - psi * a[0] * a[1] * a[2] * 3.0;
        assert!(w.norm() < ctx.check_tol);
    }
}

#[test]
fn psi_is_probe_independent() {
    let ctx = ctx_i();
    let psi = hesse_psi(&ctx).unwrap();
    for z in [c(0.17, 0.0), c(0.31, 0.2)] {
        let t = theta_triple(z, &ctx, 0).unwrap()[0];
        let local = (t[0].powu(3) + t[1].powu(3) + t[2].powu(3)) / (t[0] * t[1] * t[2] * 3.0);
        assert!((local - psi).norm() < 1e-9);
    }
}

#[test]
fn psi_avoids_singular_values() {
    for tau in [c(0.0, 1.0), c(0.3, 1.1)] {
        let psi = hesse_psi(&ThetaContext::new(tau).unwrap()).unwrap();
        assert!((psi.powu(3) + 1.0).norm() > 1e-9);
    }
}

#[test]
fn differentiated_identity_at_origin() {
    let ctx = ctx_i();
    let psi = hesse_psi(&ctx).unwrap();
    let d = theta_triple(c(0.0, 0.0), &ctx, 1).unwrap()[1];
    assert!((psi * d[0] + d[1] + d[2]).norm() < ctx.check_tol);
}

#[test]
fn negation_symmetries() {
    let ctx = ThetaContext::new(c(0.2, 1.3)).unwrap();
    for z in [c(0.11, 0.05), c(0.37, 0.6)] {
        let p = theta_triple(z, &ctx, 0).unwrap()[0];
        let m = theta_triple(-z, &ctx, 0).unwrap()[0];
        assert!((m[0] + p[0]).norm() < 1e-9);
        assert!((m[1] + p[2]).norm() < 1e-9);
        assert!((m[2] + p[1]).norm() < 1e-9);
    }
}

#[test]
fn doubling_truncation_changes_nothing() {
    let ctx = ctx_i();
    let z = c(0.29, 0.41);
    for i in 0..3 {
        let (adaptive, terms) = theta_derivatives_with(i, z, &ctx, 4, Truncation::Adaptive).unwrap();
        let (doubled, _) = theta_derivatives_with(i, z, &ctx, 4, Truncation::FixedTerms(2 * terms)).unwrap();
        for (a, b) in adaptive.iter().zip(&doubled) {
            assert!((a - b).norm() <= ctx.trunc_eps * 10.0 * a.norm().max(1.0));
        }
    }
}

#[test]
fn unit_period_factor() {
    // e(1, z) = -1: the basis is anti-periodic under z -> z + 1
    let ctx = ctx_i();
    for z in [c(0.1, 0.2), c(0.45, 0.7)] {
        let e = automorphy_factor(c(0.3, 0.0), LatticeVector::ONE, z, &ctx, 0).unwrap();
        assert!((e + 1.0).norm() < 1e-9);
        let de = automorphy_factor(c(0.3, 0.0), LatticeVector::ONE, z, &ctx, 1).unwrap();
        assert!(de.norm() < 1e-9);
    }
}

#[test]
fn automorphy_cocycle() {
    let ctx = ctx_i();
    let a = c(0.3, 0.0);
    let z = c(0.21, 0.13);
    let whole = automorphy_factor(a, LatticeVector::ONE + LatticeVector::TAU, z, &ctx, 0).unwrap();
    let first = automorphy_factor(a, LatticeVector::ONE, z + ctx.tau, &ctx, 0).unwrap();
    let second = automorphy_factor(a, LatticeVector::TAU, z, &ctx, 0).unwrap();
    assert!((whole - first * second).norm() / whole.norm() < ctx.check_tol);
}

#[test]
fn automorphy_transforms_every_index() {
    let ctx = ctx_i();
    let a = c(0.3, 0.0);
    let z = c(0.17, 0.29);
    let e = automorphy_factor(a, LatticeVector::TAU, z, &ctx, 0).unwrap();
    let here = theta_triple(z + a, &ctx, 0).unwrap()[0];
    let there = theta_triple(z + a + ctx.tau, &ctx, 0).unwrap()[0];
    for i in 0..3 {
        assert!((e * here[i] - there[i]).norm() / there[i].norm() < ctx.check_tol);
    }
}

#[test]
fn errors() {
    assert!(matches!(ThetaContext::new(c(0.3, 0.0)), Err(Error::NonconvergentSeries(_))));
    assert!(matches!(theta_eval(0, c(0.1, 0.0), &ctx_i(), 13), Err(Error::OrderTooHigh { order: 13, max: 12 })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_is_lattice_invariant(s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let ctx = ctx_i();
        let z = c(s, 0.0) + ctx.tau * t;
        let p = embed(z, &ctx).unwrap();
        prop_assert!(proj_distance(&p, &embed(z + 1.0, &ctx).unwrap()) < 1e-8);
        prop_assert!(proj_distance(&p, &embed(z + ctx.tau, &ctx).unwrap()) < 1e-8);
    }
}
