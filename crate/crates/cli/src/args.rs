use hesse_ulrich::hesse::ProjectivePoint;
use hesse_ulrich::suite::{Mutation, PointInput};
use num_complex::Complex64;
use std::ops::RangeInclusive;

/// `"i"`, `"-0.5"`, `"0.2+1.3i"`, `"1e-3-2j"`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().replace('j', "i");
    let v: Complex64 = t.parse().map_err(|_| format!("not a complex number: {s:?}"))?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(format!("non-finite complex number: {s:?}"));
    }
    Ok(v)
}

/// A complex `a_z`, or a projective triple `"a0:a1:a2"` of complex numbers.
pub fn parse_point(s: &str) -> Result<PointInput, String> {
    if !s.contains(':') {
        return parse_complex(s).map(PointInput::Analytic);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let [a0, a1, a2] = parts.as_slice() else {
        return Err(format!("projective point needs three coordinates: {s:?}"));
    };
    let coords = [parse_complex(a0)?, parse_complex(a1)?, parse_complex(a2)?];
    ProjectivePoint::new(coords)
        .map(PointInput::Projective)
        .map_err(|e| e.to_string())
}

/// `"3"` or an inclusive range `"lo..hi"`; `hi < lo` is empty.
pub fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = |_| format!("not a k or k range: {s:?}");
    match s.split_once("..") {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(bad)?;
            let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(bad)?;
            Ok(lo..=hi)
        }
        None => {
            let k: usize = s.trim().parse().map_err(bad)?;
            Ok(k..=k)
        }
    }
}

pub fn parse_mutation(s: &str) -> Result<Mutation, String> {
    match s {
        "zero-block" => Ok(Mutation::ZeroBlock),
        "drop-binomial" => Ok(Mutation::DropBinomial),
        "perturb-psi" => Ok(Mutation::PerturbPsi),
        _ => Err(format!(
            "unknown mutation {s:?} (expected zero-block, drop-binomial or perturb-psi)"
        )),
    }
}

pub fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("tolerance must be a finite non-negative number: {s:?}")),
    }
}
