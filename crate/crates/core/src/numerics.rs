//! Dense complex linear algebra for the precoders and the FSE baseline.
//!
//! Matrices here are at most a few dozen rows on a side, so everything is
//! plain row-major storage with O(n³) kernels.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Column vector of complex scalars.
pub type ComplexVector = Vec<C64>;

/// Relative pivot threshold below which a Gram matrix is treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Relative threshold on `|R_kk|` used by [`qr_decompose`].
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDimensions("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    /// Convenience for real-valued literals in tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn hermitian(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<ComplexVector> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    a.hermitian()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

/// Inverts a square matrix by Gauss-Jordan elimination with partial pivoting.
///
/// A pivot whose modulus falls below `SINGULAR_TOLERANCE` times the largest
/// entry of the input is reported as singular.
pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let tolerance = SINGULAR_TOLERANCE * a.max_abs();
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag <= tolerance || pivot_mag == 0.0 {
            return Err(Error::Singular {
                pivot: pivot_mag,
                tolerance,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                m.data.swap(pivot_row * n + j, col * n + j);
                inv.data.swap(pivot_row * n + j, col * n + j);
            }
        }
        let p = m[(col, col)].inv();
        for j in 0..n {
            m[(col, j)] *= p;
            inv[(col, j)] *= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[(r, col)];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let mv = m[(col, j)];
                let iv = inv[(col, j)];
                m[(r, j)] -= factor * mv;
                inv[(r, j)] -= factor * iv;
            }
        }
    }
    Ok(inv)
}

/// `W = Hᴴ (H Hᴴ + ridge·I)⁻¹`.
///
/// With `ridge == 0` this is the zero-forcing right inverse (`H W = I`);
/// a positive ridge gives the regularized variant.
pub fn right_pseudo_inverse(h: &ComplexMatrix, ridge: f64) -> Result<ComplexMatrix> {
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(Error::InvalidParams(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    if h.rows() > h.cols() {
        return Err(Error::InvalidDimensions(format!(
            "right inverse needs rows <= cols, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let hh = h.hermitian();
    let mut gram = h.matmul(&hh)?;
    for i in 0..gram.rows() {
        gram[(i, i)] += ridge;
    }
    hh.matmul(&invert(&gram)?)
}

/// Thin QR factorization by Householder reflections.
///
/// Returns `(Q, R)` with `Q` of shape `m x n` having orthonormal columns and
/// `R` of shape `n x n` upper triangular with a real, nonnegative diagonal.
pub fn qr_decompose(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::InvalidDimensions(format!(
            "QR needs rows >= cols, got {m}x{n}"
        )));
    }
    let tolerance = RANK_TOLERANCE * a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(m);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n {
        let norm_x = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x <= tolerance {
            return Err(Error::RankDeficient {
                column: k,
                value: norm_x,
            });
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm_x;

        let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= v_norm;
        }

        // R <- (I - 2 v vᴴ) R on rows k..m
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * r[(k + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                r[(k + t, j)] -= 2.0 * vt * dot;
            }
        }
        // Q <- Q (I - 2 v vᴴ) on columns k..m
        for i in 0..m {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| q[(i, k + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                q[(i, k + t)] -= 2.0 * dot * vt.conj();
            }
        }
        for i in k + 1..m {
            r[(i, k)] = zero;
        }
    }

    let mut q_thin = ComplexMatrix::zeros(m, n);
    let mut r_thin = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let d = r[(k, k)];
        let mag = d.norm();
        if mag <= tolerance {
            return Err(Error::RankDeficient { column: k, value: mag });
        }
        let unit = d / mag;
        for j in k..n {
            r_thin[(k, j)] = unit.conj() * r[(k, j)];
        }
        r_thin[(k, k)] = C64::new(mag, 0.0);
        for i in 0..m {
            q_thin[(i, k)] = q[(i, k)] * unit;
        }
    }
    Ok((q_thin, r_thin))
}

/// Largest complex modulus among the entries.
pub fn linf_norm(v: &[C64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(v.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
