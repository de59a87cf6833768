//! Dense complex matrices: the workhorse container for every operator, Lax
//! matrix and R-matrix in the crate.
//!
//! Storage is row-major `Vec<Complex64>`. Everything is double precision; the
//! spaces in play are at most a few hundred dimensions, so no sparsity or
//! blocking is attempted. Inversion goes through LU with partial pivoting and
//! a condition-number guard (`cond_inf > 1e12` is treated as an error rather
//! than returning garbage).

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Condition number above which `inverse`/`solve` refuse to answer.
pub const COND_GUARD: f64 = 1e12;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from a row-major slice of entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{}={} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, data: entries.to_vec() })
    }

    /// Diagonal matrix from a slice.
    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product, `self` as the leftmost (slowest-index) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Max-abs entry norm.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Infinity norm (max absolute row sum), used for condition estimates.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// In-place LU with partial pivoting; returns the pivot permutation.
    fn lu(&self, context: &'static str) -> Result<(Vec<Complex64>, Vec<usize>)> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm = Vec::with_capacity(n);
        for col in 0..n {
            let (mut best, mut best_mag) = (col, a[col * n + col].norm());
            for r in col + 1..n {
                let mag = a[r * n + col].norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag == 0.0 {
                return Err(Error::SingularMatrix { context, pivot: best_mag });
            }
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                }
            }
            perm.push(best);
            let piv = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / piv;
                a[r * n + col] = factor;
                for j in col + 1..n {
                    let sub = factor * a[col * n + j];
                    a[r * n + j] -= sub;
                }
            }
        }
        Ok((a, perm))
    }

    fn lu_solve_vec(lu: &[Complex64], perm: &[usize], n: usize, b: &mut [Complex64]) {
        for (col, &p) in perm.iter().enumerate() {
            if p != col {
                b.swap(col, p);
            }
        }
        for i in 1..n {
            for j in 0..i {
                let sub = lu[i * n + j] * b[j];
                b[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = lu[i * n + j] * b[j];
                b[i] -= sub;
            }
            b[i] /= lu[i * n + i];
        }
    }

    /// Solve `self * X = rhs` for X (rhs may have several columns).
    pub fn solve(&self, rhs: &Self, context: &'static str) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: {}x{} vs rhs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let n = self.rows;
        let (lu, perm) = self.lu(context)?;
        let mut out = Self::zeros(n, rhs.cols);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..rhs.cols {
            for i in 0..n {
                col[i] = rhs[(i, j)];
            }
            Self::lu_solve_vec(&lu, &perm, n, &mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        // Guard: cheap condition estimate from the computed inverse action.
        if rhs.cols == n && rhs.is_identity() {
            let cond = self.norm_inf() * out.norm_inf();
            if cond > COND_GUARD {
                return Err(Error::IllConditioned { context, cond });
            }
        }
        Ok(out)
    }

    fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        self.data.iter().enumerate().all(|(idx, z)| {
            let (i, j) = (idx / self.cols, idx % self.cols);
            *z == Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Inverse via LU; errors on singular or badly conditioned input.
    pub fn inverse(&self, context: &'static str) -> Result<Self> {
        self.solve(&Self::identity(self.rows), context)
    }

    /// Inverse of `1 - N` by the terminating Neumann series, for nilpotent `N`.
    ///
    /// Returns an error if the series has not terminated after `max_order`
    /// powers (i.e. the argument was not actually nilpotent at that index).
    pub fn neumann_inverse_one_minus(n: &Self, max_order: usize) -> Result<Self> {
        let dim = n.rows;
        let mut sum = Self::identity(dim);
        let mut power = n.clone();
        for _ in 0..max_order {
            if power.norm_max() < 1e-300 {
                return Ok(sum);
            }
            sum = sum.add(&power);
            power = power.mul(n);
        }
        if power.norm_max() < 1e-300 {
            Ok(sum)
        } else {
            Err(Error::InvalidPoint(format!(
                "Neumann series did not terminate by order {max_order} (residual {:.3e})",
                power.norm_max()
            )))
        }
    }

    /// Integer matrix power (non-negative exponents).
    pub fn pow(&self, mut e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}
