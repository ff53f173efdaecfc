use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest asymmetry `max |A - A*|` absorbed by symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data, rejecting bad lengths and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: format!("{c} columns"),
                found: format!("{} columns in row {i}", row.len()),
            });
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        if let Some((k, col)) = cols.iter().enumerate().find(|(_, c)| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: format!("columns of length {rows}"),
                found: format!("length {} in column {k}", col.len()),
            });
        }
        let m = Self::from_fn(rows, cols.len(), |i, j| cols[j][i]);
        m.check_finite()?;
        Ok(m)
    }

    fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            Some(p) => Err(Error::NonFinite {
                row: p / self.cols.max(1),
                col: p % self.cols.max(1),
            }),
            None => Ok(()),
        }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - B_ij|`; panics if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows on the right", self.cols),
                found: format!("{}", rhs.rows),
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Applies the 2x2 unitary `j` to columns `p`, `q` from the right: `A <- A J`.
    pub(crate) fn rotate_columns(&mut self, p: usize, q: usize, j: &[[C64; 2]; 2]) {
        for k in 0..self.rows {
            let ap = self.data[k * self.cols + p];
            let aq = self.data[k * self.cols + q];
            self.data[k * self.cols + p] = ap * j[0][0] + aq * j[1][0];
            self.data[k * self.cols + q] = ap * j[0][1] + aq * j[1][1];
        }
    }

    /// `A <- J* A` on rows `p`, `q`.
    pub(crate) fn rotate_rows_adjoint(&mut self, p: usize, q: usize, j: &[[C64; 2]; 2]) {
        for k in 0..self.cols {
            let ap = self.data[p * self.cols + k];
            let aq = self.data[q * self.cols + k];
            self.data[p * self.cols + k] = j[0][0].conj() * ap + j[1][0].conj() * aq;
            self.data[q * self.cols + k] = j[0][1].conj() * ap + j[1][1].conj() * aq;
        }
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

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Square Hermitian matrix.
///
/// Construction symmetrizes the input as `(A + A*) / 2` and forces the
/// diagonal to be real, so `entries[i][j] == conj(entries[j][i])` holds
/// exactly afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts `a` if it is square, finite and Hermitian up to [`HERMITIAN_TOL`].
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", a.rows, a.cols),
            });
        }
        a.check_finite()?;
        let asymmetry = hermitian_asymmetry(&a);
        if asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self::symmetrize(a))
    }

    /// Symmetrizes without the asymmetry check. Callers guarantee the input is
    /// Hermitian up to roundoff.
    pub(crate) fn symmetrize(mut a: ComplexMatrix) -> Self {
        let n = a.rows;
        for i in 0..n {
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }
        Self { inner: a }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows)?)
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            inner: ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(d[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// `v v*`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::symmetrize(ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    /// `Tr(A B)`, which is real for Hermitian `A`, `B`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let a = self.inner.as_slice();
        let b = other.inner.as_slice();
        // Tr(AB) = sum_ij A_ij B_ji = sum_ij Re(A_ij conj(B_ij)) for Hermitian B.
        a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// `A + s I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.inner[(i, i)] += s;
        }
        out
    }

    /// `U* A U` for a square `u`; symmetrized to absorb roundoff.
    pub fn congruence(&self, u: &ComplexMatrix) -> Self {
        let t = &(&u.adjoint() * &self.inner) * u;
        Self::symmetrize(t)
    }

    /// Removes row and column `drop_index`.
    pub fn principal_submatrix(&self, drop_index: usize) -> Result<Self> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "principal submatrix needs n >= 2".into(),
            ));
        }
        if drop_index >= n {
            return Err(Error::IndexOutOfRange {
                index: drop_index,
                dim: n,
            });
        }
        let keep = |k: usize| if k < drop_index { k } else { k + 1 };
        Ok(Self {
            inner: ComplexMatrix::from_fn(n - 1, n - 1, |i, j| self.inner[(keep(i), keep(j))]),
        })
    }

    /// Inverse of [`Self::principal_submatrix`]: pads a zero row/column at `index`.
    pub fn embed_with_zero(&self, index: usize) -> Self {
        let m = self.dim() + 1;
        let src = |k: usize| {
            if k < index {
                Some(k)
            } else if k == index {
                None
            } else {
                Some(k - 1)
            }
        };
        Self {
            inner: ComplexMatrix::from_fn(m, m, |i, j| match (src(i), src(j)) {
                (Some(a), Some(b)) => self.inner[(a, b)],
                _ => C64::new(0.0, 0.0),
            }),
        }
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

pub fn hermitian_asymmetry(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}
