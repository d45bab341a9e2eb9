//! Deterministic sample generation for the check suites.

use crate::hesse::{hesse_value, CurveConfig, ProjectivePoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_in_disc<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random `z = s + tτ` with `s, t ∈ [0.05, 0.95)`.
pub fn random_z<R: Rng>(rng: &mut R, tau: Complex64) -> Complex64 {
    let s: f64 = rng.gen_range(0.05..0.95);
    let t: f64 = rng.gen_range(0.05..0.95);
    tau * t + s
}

/// Roots of `t³ + p t + q` by Durand–Kerner, polished with Newton steps.
fn depressed_cubic_roots(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let f = |t: Complex64| t * t * t + p * t + q;
    let df = |t: Complex64| t * t * 3.0 + p;
    let radius = 1.0 + p.norm().max(q.norm());
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [seed * radius, seed.powu(2) * radius, seed.powu(3) * radius];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() > 0.0 {
                r[i] -= f(r[i]) / den;
            }
        }
        let moved: f64 = r.iter().zip(&prev).map(|(a, b)| (a - b).norm()).sum();
        if moved < 1e-15 * radius {
            break;
        }
    }
    for root in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*root);
            if d.norm() > 0.0 {
                *root -= f(*root) / d;
            }
        }
    }
    r
}

/// Random points on the Hesse cubic: `x₀, x₁` random, `x₂` a random root of the
/// cubic in `x₂`. Points too close to E[3] are skipped.
pub fn curve_points<R: Rng>(rng: &mut R, cfg: &CurveConfig, count: usize) -> Vec<ProjectivePoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x0 = complex_in_disc(rng);
        let x1 = complex_in_disc(rng);
        let roots = depressed_cubic_roots(-cfg.psi * x0 * x1 * 3.0, x0.powu(3) + x1.powu(3));
        let x2 = roots[rng.gen_range(0..3)];
        let Ok(p) = ProjectivePoint::new([x0, x1, x2]) else {
            continue;
        };
        if p.min_modulus() < 1e-2 {
            continue;
        }
        if hesse_value(&p.coords(), cfg.psi).norm() < 1e-12 {
            out.push(p);
        }
    }
    out
}

/// Random points with `|w| ≥ 0.1` on the normalized representative.
pub fn off_curve_points<R: Rng>(rng: &mut R, psi: Complex64, count: usize) -> Vec<ProjectivePoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords = [complex_in_disc(rng), complex_in_disc(rng), complex_in_disc(rng)];
        let Ok(p) = ProjectivePoint::new(coords) else {
            continue;
        };
        if hesse_value(&p.coords(), psi).norm() >= 0.1 {
            out.push(p);
        }
    }
    out
}
