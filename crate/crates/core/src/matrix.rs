//! Matrices of polynomials, their determinants, evaluation and numeric rank.

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Sizes above this use evaluation–interpolation in [`det`].
pub const COFACTOR_MAX_SIZE: usize = 9;
/// Largest determinant degree [`det_interpolate`] accepts.
pub const MAX_DET_DEGREE: u32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyMatrixRepr", into = "PolyMatrixRepr")]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
    /// Set by constructors that only produce forms of degree ≤ 1; see
    /// [`PolyMatrix::check_linear`].
    pub linear: bool,
}

#[derive(Serialize, Deserialize)]
struct PolyMatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<MultiPoly>>,
}

impl TryFrom<PolyMatrixRepr> for PolyMatrix {
    type Error = Error;
    fn try_from(r: PolyMatrixRepr) -> Result<Self> {
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(Error::SizeMismatch(format!(
                "entries do not form a {}x{} grid",
                r.rows, r.cols
            )));
        }
        let mut m = PolyMatrix {
            rows: r.rows,
            cols: r.cols,
            entries: r.entries.into_iter().flatten().collect(),
            linear: false,
        };
        m.linear = m.is_linear();
        Ok(m)
    }
}

impl From<PolyMatrix> for PolyMatrixRepr {
    fn from(m: PolyMatrix) -> Self {
        let cols = m.cols;
        let mut entries = Vec::with_capacity(m.rows);
        let mut it = m.entries.into_iter();
        for _ in 0..m.rows {
            entries.push(it.by_ref().take(cols).collect());
        }
        PolyMatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries,
        }
    }
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![MultiPoly::zero(); rows * cols],
            linear: true,
        }
    }

    /// `p · I`.
    pub fn scalar_identity(n: usize, p: &MultiPoly) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, p.clone());
        }
        m.linear = m.is_linear();
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> MultiPoly>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.entries[i * cols + j] = f(i, j);
            }
        }
        m.linear = m.is_linear();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MultiPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> impl Iterator<Item = &MultiPoly> {
        self.entries.iter()
    }

    /// Every entry homogeneous of degree 1 (or zero).
    pub fn is_linear(&self) -> bool {
        self.entries.iter().all(|p| p.is_homogeneous(1))
    }

    /// Verifies the `linear` flag against the entries.
    pub fn check_linear(&self) -> bool {
        !self.linear || self.is_linear()
    }

    /// Copies `block` into position `(bi·h, bj·w)`, `h×w` being the block shape.
    pub fn set_block(&mut self, bi: usize, bj: usize, block: &PolyMatrix) {
        let (h, w) = (block.rows, block.cols);
        assert!((bi + 1) * h <= self.rows && (bj + 1) * w <= self.cols, "block out of range");
        for i in 0..h {
            for j in 0..w {
                self.set(bi * h + i, bj * w + j, block.get(i, j).clone());
            }
        }
        self.linear = self.linear && block.is_linear();
    }

    pub fn block(&self, bi: usize, bj: usize, h: usize, w: usize) -> PolyMatrix {
        PolyMatrix::from_fn(h, w, |i, j| self.get(bi * h + i, bj * w + j).clone())
    }

    pub fn scale(&self, c: Complex64) -> PolyMatrix {
        let mut m = self.clone();
        for e in m.entries.iter_mut() {
            *e = e.scale(c);
        }
        m
    }

    pub fn matmul(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(PolyMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = MultiPoly::zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), rhs.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        }))
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn add(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn zip_with<F: Fn(&MultiPoly, &MultiPoly) -> MultiPoly>(&self, rhs: &PolyMatrix, f: F) -> Result<PolyMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::SizeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(PolyMatrix::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j), rhs.get(i, j))))
    }

    /// Euclidean norm over every coefficient of every entry.
    pub fn coeff_norm(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |acc, p| acc + p.coeff_norm().powi(2))
            .sqrt()
    }

    pub fn max_entry_degree(&self, row: usize) -> u32 {
        (0..self.cols)
            .filter_map(|j| self.get(row, j).degree())
            .max()
            .unwrap_or(0)
    }
}

/// Entrywise evaluation at `x`.
pub fn eval_matrix(m: &PolyMatrix, x: &[Complex64; 3]) -> CMatrix {
    CMatrix::from_fn(m.rows, m.cols, |i, j| m.get(i, j).eval(x))
}

/// Singular values in decreasing order.
pub fn singular_values(n: &CMatrix) -> Vec<f64> {
    if n.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = n.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Default rank threshold relative to the largest singular value.
pub const RANK_REL_TOL: f64 = 1e-7;

/// Number of singular values above `rank_tol`; `None` uses
/// `RANK_REL_TOL × σ_max`.
pub fn numeric_rank(n: &CMatrix, rank_tol: Option<f64>) -> usize {
    let s = singular_values(n);
    let Some(&top) = s.first() else { return 0 };
    let tol = rank_tol.unwrap_or(RANK_REL_TOL * top);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol).count()
}

/// Ruiz equilibration: alternately divides every row and column by the square
/// root of its largest modulus. Diagonal scaling keeps the rank exactly while
/// removing the grading that block-triangular presentations carry.
pub fn equilibrate(n: &CMatrix) -> CMatrix {
    let mut m = n.clone();
    for _ in 0..30 {
        let mut moved: f64 = 0.0;
        for i in 0..m.nrows() {
            let r = m.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if r > 0.0 {
                m.row_mut(i).scale_mut(1.0 / r.sqrt());
                moved = moved.max((1.0 - r).abs());
            }
        }
        for j in 0..m.ncols() {
            let c = m.column(j).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if c > 0.0 {
                m.column_mut(j).scale_mut(1.0 / c.sqrt());
                moved = moved.max((1.0 - c).abs());
            }
        }
        if moved < 1e-3 {
            break;
        }
    }
    m
}

/// [`numeric_rank`] after [`equilibrate`].
pub fn equilibrated_rank(n: &CMatrix, rank_tol: Option<f64>) -> usize {
    numeric_rank(&equilibrate(n), rank_tol)
}

/// Orthonormal basis of the approximate right kernel of dimension `dim`: the
/// right singular vectors of the `dim` smallest singular values.
pub fn kernel_basis(n: &CMatrix, dim: usize) -> Vec<CVector> {
    if n.ncols() == 0 || dim == 0 {
        return Vec::new();
    }
    let padded;
    let m = if n.nrows() < n.ncols() {
        padded = n.clone().resize_vertically(n.ncols(), Complex64::new(0.0, 0.0));
        &padded
    } else {
        n
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    order
        .into_iter()
        .take(dim)
        .map(|i| v_t.row(i).adjoint())
        .collect()
}

/// Determinant, by cofactor expansion up to [`COFACTOR_MAX_SIZE`] and by
/// evaluation–interpolation above.
pub fn det(m: &PolyMatrix) -> Result<MultiPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows <= COFACTOR_MAX_SIZE {
        det_cofactor(m)
    } else {
        det_interpolate(m)
    }
}

/// Laplace expansion along the sparsest remaining row or column, memoized on
/// (row set, column set).
pub fn det_cofactor(m: &PolyMatrix) -> Result<MultiPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    assert!(m.rows <= 64, "cofactor expansion limited to 64x64");
    let full: u64 = if m.rows == 64 { u64::MAX } else { (1u64 << m.rows) - 1 };
    let mut memo = HashMap::new();
    Ok(minor(m, full, full, &mut memo))
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn minor(m: &PolyMatrix, rows: u64, cols: u64, memo: &mut HashMap<(u64, u64), MultiPoly>) -> MultiPoly {
    if rows == 0 {
        return MultiPoly::one();
    }
    if let Some(hit) = memo.get(&(rows, cols)) {
        return hit.clone();
    }

    // sparsest line
    let mut best: Option<(bool, usize, usize)> = None; // (is_row, index, nonzeros)
    for r in bits(rows) {
        let nz = bits(cols).filter(|&c| !m.get(r, c).is_zero()).count();
        if best.is_none_or(|b| nz < b.2) {
            best = Some((true, r, nz));
        }
    }
    for c in bits(cols) {
        let nz = bits(rows).filter(|&r| !m.get(r, c).is_zero()).count();
        if best.is_none_or(|b| nz < b.2) {
            best = Some((false, c, nz));
        }
    }
    let (is_row, line, nz) = best.expect("nonempty minor");

    let mut acc = MultiPoly::zero();
    if nz > 0 {
        if is_row {
            let pos = bits(rows).position(|r| r == line).unwrap();
            for (k, c) in bits(cols).enumerate() {
                let e = m.get(line, c);
                if e.is_zero() {
                    continue;
                }
                let sub = minor(m, rows & !(1 << line), cols & !(1 << c), memo);
                let term = e * &sub;
                acc = if (pos + k) % 2 == 0 { &acc + &term } else { &acc - &term };
            }
        } else {
            let pos = bits(cols).position(|c| c == line).unwrap();
            for (k, r) in bits(rows).enumerate() {
                let e = m.get(r, line);
                if e.is_zero() {
                    continue;
                }
                let sub = minor(m, rows & !(1 << r), cols & !(1 << line), memo);
                let term = e * &sub;
                acc = if (pos + k) % 2 == 0 { &acc + &term } else { &acc - &term };
            }
        }
    }
    memo.insert((rows, cols), acc.clone());
    acc
}

/// Determinant by evaluation on the grid of `(D+1)`-th roots of unity in each
/// variable followed by an inverse 3-D DFT, `D` being the sum of row degrees.
pub fn det_interpolate(m: &PolyMatrix) -> Result<MultiPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let bound: u32 = (0..m.rows).map(|i| m.max_entry_degree(i)).sum();
    if bound > MAX_DET_DEGREE {
        return Err(Error::SizeMismatch(format!(
            "determinant degree bound {bound} exceeds {MAX_DET_DEGREE}"
        )));
    }
    let n = bound as usize + 1;
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect();

    let values: Vec<Complex64> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
            eval_matrix(m, &[roots[a], roots[b], roots[c]]).determinant()
        })
        .collect();

    // inverse DFT along each axis in turn
    let mut grid = values;
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); grid.len()];
        for idx in 0..grid.len() {
            let pos = (idx / stride) % n;
            let base = idx - pos * stride;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += grid[base + k * stride] * roots[(k * pos) % n].conj();
            }
            next[idx] = acc / n as f64;
        }
        grid = next;
    }

    let max = grid.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut out = MultiPoly::from_terms((0..grid.len()).filter_map(|idx| {
        let e = [(idx / (n * n)) as u32, ((idx / n) % n) as u32, (idx % n) as u32];
        (e.iter().sum::<u32>() <= bound).then_some((e, grid[idx]))
    }));
    out.prune_below(1e-13 * max);
    Ok(out)
}
