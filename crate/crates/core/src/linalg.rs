//! Small dense matrix kernels: LU with partial pivoting, determinant,
//! inverse, linear solves and numeric rank.

use crate::error::{Result, TensorError};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(TensorError::DataLength {
                shape: vec![rows, cols],
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        Matrix::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(TensorError::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `P A = L U` with unit-lower `L` and upper `U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    packed: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factorizes a square matrix. Never fails on singular input; zero
    /// pivots are kept and show up in [`Lu::pivots`].
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if a.rows != a.cols {
            return Err(TensorError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            if piv == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Lu {
            packed: lu,
            perm,
            sign,
        })
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.packed.rows).map(|k| self.packed[(k, k)]).collect()
    }

    /// Smallest pivot magnitude (infinity for the empty matrix).
    pub fn min_pivot(&self) -> f64 {
        self.pivots()
            .iter()
            .fold(f64::INFINITY, |m, p| m.min(p.abs()))
    }

    pub fn det(&self) -> f64 {
        self.pivots().iter().product::<f64>() * self.sign
    }

    /// Solves `A x = b`; assumes nonzero pivots.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.packed.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.packed[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.packed[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.packed[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.packed.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn det(a: &Matrix) -> Result<f64> {
    Ok(Lu::factor(a)?.det())
}

/// Inverse via LU; `Singular` when a pivot falls below
/// `pivot_tol × max |a_ij|`.
pub fn inverse(a: &Matrix, pivot_tol: f64) -> Result<Matrix> {
    let lu = Lu::factor(a)?;
    let threshold = pivot_tol * a.max_abs();
    let pivot = lu.min_pivot();
    if !(pivot > threshold) {
        return Err(TensorError::Singular { pivot, threshold });
    }
    Ok(lu.inverse())
}

/// Numeric rank by Gaussian elimination with complete pivoting; pivots
/// below `tol × (first pivot)` count as zero.
pub fn rank(a: &Matrix, tol: f64) -> usize {
    let (r, c) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut rank = 0;
    let mut first = 0.0;
    for k in 0..r.min(c) {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..r {
            for j in k..c {
                let v = m[(i, j)].abs();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if k == 0 {
            first = best;
        }
        if best == 0.0 || best <= tol * first {
            break;
        }
        if pi != k {
            for j in 0..c {
                m.data.swap(k * c + j, pi * c + j);
            }
        }
        if pj != k {
            for i in 0..r {
                m.data.swap(i * c + k, i * c + pj);
            }
        }
        let piv = m[(k, k)];
        for i in k + 1..r {
            let f = m[(i, k)] / piv;
            if f != 0.0 {
                for j in k..c {
                    let u = m[(k, j)];
                    m[(i, j)] -= f * u;
                }
            }
        }
        rank += 1;
    }
    rank
}
