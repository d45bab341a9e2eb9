//! LaTeX output: numeric polynomial matrices and the symbolic block layouts.

use crate::matrix::PolyMatrix;
use crate::moore::binomial;
use crate::poly::MultiPoly;
use num_complex::Complex64;

fn coeff(c: Complex64, digits: usize) -> String {
    match (c.re.abs() > 0.0, c.im.abs() > 0.0) {
        (true, false) => format!("{:.*}", digits, c.re),
        (false, true) => format!("{:.*}i", digits, c.im),
        _ => format!("({:.*}{:+.*}i)", digits, c.re, digits, c.im),
    }
}

fn monomial(e: &[u32; 3]) -> String {
    let mut s = String::new();
    for (i, &p) in e.iter().enumerate() {
        match p {
            0 => {}
            1 => s.push_str(&format!("x_{i}")),
            _ => s.push_str(&format!("x_{i}^{{{p}}}")),
        }
    }
    s
}

pub fn poly_to_latex(p: &MultiPoly, digits: usize) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms()
        .map(|(e, c)| format!("{}{}", coeff(*c, digits), monomial(e)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A `bmatrix` with every entry written out to `digits` decimals.
pub fn matrix_to_latex(m: &PolyMatrix, digits: usize) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| poly_to_latex(m.get(i, j), digits))
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect();
    format!("\\begin{{bmatrix}}\n{}\n\\end{{bmatrix}}", rows.join(" \\\\\n"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Blocks `\binom{k-i}{j-i} M^{(j-i)}_{a,x}`.
    Analytic,
    /// Blocks `\binom{k-i}{j-i} M_{(-2)^{j-i}a,x}`.
    Algebraic,
}

fn block_symbol(layout: Layout, offset: usize) -> String {
    match (layout, offset) {
        (_, 0) => "M_{a,x}".into(),
        (Layout::Analytic, 1) => "M'_{a,x}".into(),
        (Layout::Analytic, 2) => "M''_{a,x}".into(),
        (Layout::Analytic, l) => format!("M^{{({l})}}_{{a,x}}"),
        (Layout::Algebraic, 1) => "M_{-2a,x}".into(),
        (Layout::Algebraic, l) => format!("M_{{(-2)^{{{l}}}a,x}}"),
    }
}

/// The `(k+1)×(k+1)` block layout with binomial coefficients, as printed.
pub fn symbolic_layout(k: usize, layout: Layout) -> String {
    let rows: Vec<String> = (0..=k)
        .map(|i| {
            (0..=k)
                .map(|j| {
                    if j < i {
                        return "0".to_string();
                    }
                    let sym = block_symbol(layout, j - i);
                    if binomial(k - i, j - i) == 1.0 {
                        sym
                    } else {
                        format!("\\binom{{{}}}{{{}}} {sym}", k - i, j - i)
                    }
                })
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect();
    format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
}
