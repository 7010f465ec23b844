//! Commutation and permutation tensors, and the linear independence of
//! permuted outer-product families.

use crate::error::{Result, TensorError};
use crate::linalg::{self, Matrix};
use crate::permutation::Permutation;
use crate::products::{contract_k, outer_chain};
use crate::tensor::DenseTensor;

/// Cap on the entry count of a materialized permutation tensor.
pub const MAX_PERMUTATION_TENSOR_LEN: usize = 1_000_000;
/// Largest `m` for [`permuted_family_rank`].
pub const MAX_FAMILY_ORDER: usize = 5;

/// `K_{p,q}` of shape `p×q×q×p`: `K_{i1 i2 i3 i4} = 1` iff `i1 = i4` and
/// `i2 = i3`.
pub fn commutation_tensor(p: usize, q: usize) -> Result<DenseTensor> {
    DenseTensor::from_fn(&[p, q, q, p], |ix| {
        if ix[0] == ix[3] && ix[1] == ix[2] {
            1.0
        } else {
            0.0
        }
    })
}

/// `K^(σ)` of order `2m`: entry `(i1…im, j1…jm)` is 1 iff
/// `i_k = j_σ(k)` for every `k`.
pub fn permutation_tensor(sigma: &Permutation, n: usize) -> Result<DenseTensor> {
    let m = sigma.len();
    let len = (n as u128).pow(2 * m as u32);
    if len > MAX_PERMUTATION_TENSOR_LEN as u128 {
        return Err(TensorError::TooLarge(format!(
            "permutation tensor with n^(2m) = {len} entries exceeds {MAX_PERMUTATION_TENSOR_LEN}"
        )));
    }
    let img = sigma.zero_based();
    DenseTensor::from_fn(&vec![n; 2 * m], |ix| {
        let (i, j) = ix.split_at(m);
        if (0..m).all(|k| i[k] == j[img[k]]) {
            1.0
        } else {
            0.0
        }
    })
}

/// How [`apply_permutation_tensor`] evaluates `K^(σ)(u1 ⊗ ⋯ ⊗ um)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyPath {
    /// Contract the last `m` modes of a materialized `K^(σ)` with the
    /// outer product.
    Materialized,
    /// Gather the entries of `u1 ⊗ ⋯ ⊗ um` at permuted positions.
    Reorder,
}

pub fn apply_permutation_tensor(
    sigma: &Permutation,
    vectors: &[Vec<f64>],
    path: ApplyPath,
) -> Result<DenseTensor> {
    let m = sigma.len();
    if vectors.len() != m {
        return Err(TensorError::DimensionMismatch(format!(
            "{} vectors for a permutation on {m} points",
            vectors.len()
        )));
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(TensorError::DimensionMismatch(
            "vectors must share one length".into(),
        ));
    }
    match path {
        ApplyPath::Materialized => {
            let k = permutation_tensor(sigma, n)?;
            contract_k(&k, &outer_chain(vectors)?, m)
        }
        ApplyPath::Reorder => {
            // out_i = T_j with j_σ(k) = i_k, where T = u1 ⊗ ⋯ ⊗ um
            let t = outer_chain(vectors)?;
            let img = sigma.zero_based();
            let mut j = vec![0; m];
            DenseTensor::from_fn(&vec![n; m], |i| {
                for k in 0..m {
                    j[img[k]] = i[k];
                }
                t.get(&j)
            })
        }
    }
}

/// Numeric rank of `{u_σ(1) ⊗ ⋯ ⊗ u_σ(m) : σ ∈ P_m}` as vectors in
/// `R^{n^m}`; full rank is `m!`.
pub fn permuted_family_rank(vectors: &[Vec<f64>], tol: f64) -> Result<usize> {
    let m = vectors.len();
    if m == 0 || m > MAX_FAMILY_ORDER {
        return Err(TensorError::TooLarge(format!(
            "family of {m} vectors outside 1..={MAX_FAMILY_ORDER}"
        )));
    }
    let rows: Vec<Vec<f64>> = Permutation::all(m)
        .iter()
        .map(|s| apply_permutation_tensor(s, vectors, ApplyPath::Reorder).map(DenseTensor::into_data))
        .collect::<Result<_>>()?;
    Ok(linalg::rank(&stack(&rows), tol))
}

/// Numeric rank of the vectorized permutation tensors `{K^(σ) : σ ∈ P_m}`.
pub fn permutation_family_rank(m: usize, n: usize, tol: f64) -> Result<usize> {
    if m == 0 || m > MAX_FAMILY_ORDER {
        return Err(TensorError::TooLarge(format!(
            "order {m} outside 1..={MAX_FAMILY_ORDER}"
        )));
    }
    let rows: Vec<Vec<f64>> = Permutation::all(m)
        .iter()
        .map(|s| permutation_tensor(s, n).map(DenseTensor::into_data))
        .collect::<Result<_>>()?;
    Ok(linalg::rank(&stack(&rows), tol))
}

fn stack(rows: &[Vec<f64>]) -> Matrix {
    let cols = rows.first().map_or(0, Vec::len);
    Matrix::new(rows.len(), cols, rows.concat()).expect("rows share a length")
}
