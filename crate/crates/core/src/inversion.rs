//! Normal unfolding of even-order hypercubic tensors and inversion through
//! the resulting square ("NS") matrix.
//!
//! The row index collects the first `k` tensor indices and the column index
//! the last `k`, each read as a base-`n` number with the first index most
//! significant. With row-major storage this is a pure reinterpretation of
//! the data, and the order-`k` contraction of two tensors unfolds to the
//! matrix product of their NS matrices.

use crate::error::{Result, TensorError};
use crate::linalg::{self, Lu, Matrix};
use crate::products::contract_k;
use crate::tensor::{max_abs_diff, DenseTensor};

/// Default relative pivot threshold for singularity decisions.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Square `n^k × n^k` matrix obtained by normal unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct NsMatrix {
    n: usize,
    k: usize,
    matrix: Matrix,
}

impl NsMatrix {
    pub fn new(n: usize, k: usize, matrix: Matrix) -> Result<Self> {
        let side = n.checked_pow(k as u32).ok_or_else(|| {
            TensorError::TooLarge(format!("n^k overflows for n={n}, k={k}"))
        })?;
        if matrix.rows() != side || matrix.cols() != side {
            return Err(TensorError::DimensionMismatch(format!(
                "NS matrix for n={n}, k={k} must be {side}x{side}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(NsMatrix { n, k, matrix })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_order(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// Returns `(n, k)` for an even-order hypercubic tensor.
pub fn even_hypercubic(a: &DenseTensor) -> Result<(usize, usize)> {
    let n = a.hypercubic_dim()?;
    if a.order() % 2 != 0 {
        return Err(TensorError::OddOrder(a.order()));
    }
    Ok((n, a.order() / 2))
}

pub fn normal_unfold(a: &DenseTensor) -> Result<NsMatrix> {
    let (n, k) = even_hypercubic(a)?;
    let side = n.pow(k as u32);
    NsMatrix::new(n, k, Matrix::new(side, side, a.data().to_vec())?)
}

/// Inverse of [`normal_unfold`]; fails when the side is not `n^k`.
pub fn normal_fold(m: &Matrix, k: usize, n: usize) -> Result<DenseTensor> {
    let ns = NsMatrix::new(n, k, m.clone())?;
    DenseTensor::new(vec![n; 2 * k], ns.into_matrix().into_data())
}

/// Position (1-based row, column) of a 1-based multi-index in the NS matrix.
pub fn ns_position(idx: &[usize], n: usize) -> (usize, usize) {
    let k = idx.len() / 2;
    let fold = |part: &[usize]| 1 + part.iter().fold(0, |acc, &i| acc * n + (i - 1));
    (fold(&idx[..k]), fold(&idx[k..]))
}

/// Determinant of the NS matrix.
pub fn ns_det(a: &DenseTensor) -> Result<f64> {
    linalg::det(normal_unfold(a)?.matrix())
}

/// Pivot diagnostics of the NS matrix: smallest pivot magnitude, largest
/// entry magnitude, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotReport {
    pub min_pivot: f64,
    pub max_entry: f64,
    pub ratio: f64,
}

pub fn pivot_report(a: &DenseTensor) -> Result<PivotReport> {
    let ns = normal_unfold(a)?;
    let lu = Lu::factor(ns.matrix())?;
    let min_pivot = lu.min_pivot();
    let max_entry = ns.matrix().max_abs();
    let ratio = if max_entry == 0.0 {
        0.0
    } else {
        min_pivot / max_entry
    };
    Ok(PivotReport {
        min_pivot,
        max_entry,
        ratio,
    })
}

/// Inverse tensor under the order-`k` contraction, computed by inverting
/// the NS matrix. `Singular` when a pivot is below `pivot_tol` times the
/// largest NS entry.
pub fn invert(a: &DenseTensor, pivot_tol: f64) -> Result<DenseTensor> {
    let ns = normal_unfold(a)?;
    let (n, k) = (ns.dim(), ns.half_order());
    let inv = linalg::inverse(ns.matrix(), pivot_tol)?;
    normal_fold(&inv, k, n)
}

/// `max |A·B − I|` and `max |B·A − I|` under the order-`k` contraction.
pub fn inverse_residuals(a: &DenseTensor, b: &DenseTensor) -> Result<(f64, f64)> {
    let (n, k) = even_hypercubic(a)?;
    let id = crate::tensor::identity_tensor(k, n)?;
    let ab = max_abs_diff(&contract_k(a, b, k)?, &id)?;
    let ba = max_abs_diff(&contract_k(b, a, k)?, &id)?;
    Ok((ab, ba))
}
