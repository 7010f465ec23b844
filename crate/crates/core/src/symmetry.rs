//! Mode permutations, (anti)symmetrizers, wedge and vee tensors, the
//! standard separable anti-symmetric tensor, separability tests and
//! dimensions of permutation-invariant subspaces.

use crate::error::{Result, TensorError};
use crate::linalg::{self, Matrix};
use crate::permutation::Permutation;
use crate::products::outer_chain;
use crate::tensor::{
    dot, max_abs_diff, next_index, scale, DenseTensor, NormalizationMode,
};

/// Largest permanent side accepted by [`permanent`].
pub const MAX_PERMANENT_SIDE: usize = 14;
/// Largest `n` accepted by [`standard_sas`].
pub const MAX_SAS_DIM: usize = 6;
/// Cap on `n^m` for [`fixed_subspace_dim`].
pub const MAX_SUBSPACE_TUPLES: usize = 1_000_000;

/// `A^(σ)_{i1…im} = A_{iσ(1)…iσ(m)}`.
pub fn permute_modes(a: &DenseTensor, sigma: &Permutation) -> Result<DenseTensor> {
    let m = a.order();
    if sigma.len() != m {
        return Err(TensorError::InvalidPermutation(format!(
            "permutation on {} points applied to an order-{m} tensor",
            sigma.len()
        )));
    }
    let src_strides = a.strides();
    let mut out_shape = vec![0; m];
    let mut out_strides = vec![0; m];
    for (k, &t) in sigma.zero_based().iter().enumerate() {
        out_shape[t] = a.shape()[k];
        out_strides[t] = src_strides[k];
    }
    let data = a.data();
    DenseTensor::from_fn(&out_shape, |idx| {
        let off: usize = idx.iter().zip(&out_strides).map(|(i, s)| i * s).sum();
        data[off]
    })
}

/// `factor(m) · Σ_σ (sign σ)^[signed] · σ(A)`.
///
/// Each orbit of index tuples is summed once, at its sorted
/// representative, and copied to the rest of the orbit with the sign of
/// the sorting permutation, so the output is exactly (anti)symmetric.
pub fn symmetrize(a: &DenseTensor, norm: NormalizationMode, signed: bool) -> Result<DenseTensor> {
    a.hypercubic_dim()?;
    let m = a.order();
    let shape = a.shape().to_vec();
    let strides = a.strides();
    let data = a.data();
    let perms = Permutation::all(m);
    let c = norm.factor(m);
    let offset = |idx: &[usize]| -> usize { idx.iter().zip(&strides).map(|(i, s)| i * s).sum() };

    let mut out = vec![0.0; a.len()];
    let mut idx = vec![0; m];
    let mut moved = vec![0; m];
    loop {
        let sorted = idx.windows(2).all(|w| w[0] <= w[1]);
        let repeated = idx.windows(2).any(|w| w[0] == w[1]);
        if sorted && !(signed && repeated) {
            let mut acc = 0.0;
            for sigma in &perms {
                for (k, &t) in sigma.zero_based().iter().enumerate() {
                    moved[k] = idx[t];
                }
                let w = if signed { sigma.sign() } else { 1.0 };
                acc += w * data[offset(&moved)];
            }
            out[offset(&idx)] = c * acc;
        }
        if !next_index(&mut idx, &shape) {
            break;
        }
    }
    loop {
        let mut rep = idx.clone();
        rep.sort_unstable();
        if rep != idx {
            let v = out[offset(&rep)];
            out[offset(&idx)] = if signed && inversions(&idx) % 2 == 1 { -v } else { v };
        }
        if !next_index(&mut idx, &shape) {
            break;
        }
    }
    DenseTensor::new(shape, out)
}

fn inversions(idx: &[usize]) -> usize {
    (0..idx.len())
        .map(|i| idx[i + 1..].iter().filter(|&&x| x < idx[i]).count())
        .sum()
}

fn check_vectors(vectors: &[Vec<f64>]) -> Result<usize> {
    let n = vectors
        .first()
        .map(Vec::len)
        .ok_or_else(|| TensorError::DimensionMismatch("empty vector list".into()))?;
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(TensorError::DimensionMismatch(
            "vectors must share one nonzero length".into(),
        ));
    }
    Ok(n)
}

/// `v1 ∨ ⋯ ∨ vm`: symmetrized outer product.
pub fn vee(vectors: &[Vec<f64>], norm: NormalizationMode) -> Result<DenseTensor> {
    check_vectors(vectors)?;
    symmetrize(&outer_chain(vectors)?, norm, false)
}

/// `v1 ∧ ⋯ ∧ vm`: antisymmetrized outer product.
pub fn wedge(vectors: &[Vec<f64>], norm: NormalizationMode) -> Result<DenseTensor> {
    check_vectors(vectors)?;
    symmetrize(&outer_chain(vectors)?, norm, true)
}

/// Outcome of a symmetry check: the largest deviation found and the
/// permutation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub max_violation: f64,
    pub worst: Option<Permutation>,
}

/// `max |σ(A) − (sign σ)^[signed] A|`.
fn violation(a: &DenseTensor, sigma: &Permutation, signed: bool) -> Result<f64> {
    let p = permute_modes(a, sigma)?;
    let w = if signed { sigma.sign() } else { 1.0 };
    max_abs_diff(&p, &scale(a, w))
}

fn check_generators(a: &DenseTensor, tol: f64, signed: bool) -> Result<SymmetryCheck> {
    a.hypercubic_dim()?;
    let m = a.order();
    let mut worst = None;
    let mut max_violation = 0.0;
    for k in 1..m {
        let t = Permutation::transposition(m, k, k + 1)?;
        let v = violation(a, &t, signed)?;
        if v > max_violation {
            max_violation = v;
            worst = Some(t);
        }
    }
    Ok(SymmetryCheck {
        holds: max_violation <= tol,
        max_violation,
        worst,
    })
}

/// Invariance under every mode permutation (checked on adjacent
/// transpositions, which generate `P_m`).
pub fn is_symmetric(a: &DenseTensor, tol: f64) -> Result<SymmetryCheck> {
    check_generators(a, tol, false)
}

/// `σ(A) = (−1)^τ(σ) A` for every `σ` (checked on adjacent transpositions).
pub fn is_antisymmetric(a: &DenseTensor, tol: f64) -> Result<SymmetryCheck> {
    check_generators(a, tol, true)
}

/// `σ(A) = (−1)^τ(σ) A` for the single given `σ`.
pub fn is_sign_symmetric(a: &DenseTensor, sigma: &Permutation, tol: f64) -> Result<SymmetryCheck> {
    a.hypercubic_dim()?;
    let v = violation(a, sigma, true)?;
    Ok(SymmetryCheck {
        holds: v <= tol,
        max_violation: v,
        worst: Some(sigma.clone()),
    })
}

/// `σ(A) = A` for the single given `σ`.
pub fn is_sigma_symmetric(a: &DenseTensor, sigma: &Permutation, tol: f64) -> Result<SymmetryCheck> {
    a.hypercubic_dim()?;
    let v = violation(a, sigma, false)?;
    Ok(SymmetryCheck {
        holds: v <= tol,
        max_violation: v,
        worst: Some(sigma.clone()),
    })
}

/// Checks every permutation in `P_m`, not just the generators.
pub fn exhaustive_check(a: &DenseTensor, signed: bool, tol: f64) -> Result<SymmetryCheck> {
    a.hypercubic_dim()?;
    let mut worst = None;
    let mut max_violation = 0.0;
    for sigma in Permutation::all(a.order()) {
        let v = violation(a, &sigma, signed)?;
        if v > max_violation {
            max_violation = v;
            worst = Some(sigma);
        }
    }
    Ok(SymmetryCheck {
        holds: max_violation <= tol,
        max_violation,
        worst,
    })
}

/// Both sides of the Gram identities `⟨L(U), L(V)⟩ = c·det(G)` and
/// `⟨S(U), S(V)⟩ = c·perm(G)` with `G_ij = ⟨u_i, v_j⟩`.
///
/// `c = m!·factor(m)²`, which is 1 for `SqrtFactorial`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramIdentities {
    pub lhs_det: f64,
    pub rhs_det: f64,
    pub lhs_perm: f64,
    pub rhs_perm: f64,
    pub scale: f64,
}

pub fn gram_inner_identities(
    u: &[Vec<f64>],
    v: &[Vec<f64>],
    norm: NormalizationMode,
) -> Result<GramIdentities> {
    let n = check_vectors(u)?;
    if check_vectors(v)? != n || u.len() != v.len() {
        return Err(TensorError::DimensionMismatch(
            "U and V must hold the same number of equally long vectors".into(),
        ));
    }
    let m = u.len();
    let gram = Matrix::from_fn(m, m, |i, j| dot(&u[i], &v[j]));
    let (wu, wv) = (wedge(u, norm)?, wedge(v, norm)?);
    let (su, sv) = (vee(u, norm)?, vee(v, norm)?);
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    Ok(GramIdentities {
        lhs_det: crate::tensor::inner(&wu, &wv)?,
        rhs_det: linalg::det(&gram)?,
        lhs_perm: crate::tensor::inner(&su, &sv)?,
        rhs_perm: permanent(&gram)?,
        scale: fact * norm.factor(m).powi(2),
    })
}

/// Permanent by Ryser's inclusion–exclusion formula, with Gray-code
/// updates of the row sums.
pub fn permanent(a: &Matrix) -> Result<f64> {
    let m = a.rows();
    if a.cols() != m {
        return Err(TensorError::DimensionMismatch(format!(
            "permanent needs a square matrix, got {}x{}",
            m,
            a.cols()
        )));
    }
    if m > MAX_PERMANENT_SIDE {
        return Err(TensorError::TooLarge(format!(
            "permanent of side {m} exceeds {MAX_PERMANENT_SIDE}"
        )));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let mut row_sums = vec![0.0; m];
    let mut total = 0.0;
    let mut gray = 0usize;
    for step in 1..(1usize << m) {
        let bit = step.trailing_zeros() as usize;
        let next = step ^ (step >> 1);
        let adding = next & (1 << bit) != 0 && gray & (1 << bit) == 0;
        gray = next;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += a[(i, bit)];
            } else {
                *s -= a[(i, bit)];
            }
        }
        let prod: f64 = row_sums.iter().product();
        let size = gray.count_ones() as usize;
        if size % 2 == m % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// `‖u1 ∧ ⋯ ∧ um‖` under `SqrtFactorial`, as `sqrt(det(UᵀU))`.
pub fn wedge_norm(u: &[Vec<f64>]) -> Result<f64> {
    let n = check_vectors(u)?;
    let m = u.len();
    if m > n {
        return Ok(0.0);
    }
    let gram = Matrix::from_fn(m, m, |i, j| dot(&u[i], &u[j]));
    Ok(linalg::det(&gram)?.max(0.0).sqrt())
}

/// `Q_n`: order `n`, dimension `n`, entry `sign(i1…in)` when the indices
/// form a permutation and zero otherwise.
pub fn standard_sas(n: usize) -> Result<DenseTensor> {
    if n < 2 {
        return Err(TensorError::DimensionMismatch(format!(
            "standard SAS tensor needs n >= 2, got {n}"
        )));
    }
    if n > MAX_SAS_DIM {
        return Err(TensorError::TooLarge(format!(
            "standard SAS tensor with n = {n} exceeds {MAX_SAS_DIM}"
        )));
    }
    let mut q = DenseTensor::zeros(&vec![n; n])?;
    for sigma in Permutation::all(n) {
        q.set(sigma.zero_based(), sigma.sign());
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    Symmetric,
    Antisymmetric,
}

/// Vectors and a scalar that rebuild a separable tensor as
/// `scale · (v1 ◇ ⋯ ◇ vm)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableWitness {
    pub vectors: Vec<Vec<f64>>,
    pub scale: f64,
    pub kind: SymmetryKind,
    pub normalization: NormalizationMode,
}

impl SeparableWitness {
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let base = match self.kind {
            SymmetryKind::Symmetric => vee(&self.vectors, self.normalization)?,
            SymmetryKind::Antisymmetric => wedge(&self.vectors, self.normalization)?,
        };
        Ok(scale(&base, self.scale))
    }
}

/// Result of [`sas_decompose`]. Both arms carry the candidate built by the
/// procedure and its reconstruction residual `max |scale·∧v − A|`.
#[derive(Debug, Clone, PartialEq)]
pub enum SasVerdict {
    Separable {
        witness: SeparableWitness,
        residual: f64,
    },
    NotDecomposable {
        candidate: Option<SeparableWitness>,
        residual: f64,
    },
}

impl SasVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SasVerdict::Separable { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            SasVerdict::Separable { residual, .. } | SasVerdict::NotDecomposable { residual, .. } => {
                *residual
            }
        }
    }
}

/// Decides whether an antisymmetric tensor is a single wedge.
///
/// Takes the largest-magnitude entry `A_I` (first in row-major order on
/// ties), reads off the `m` fibres of `A` through `I`, wedges them, rescales
/// to match `A_I`, and accepts when the reconstruction is within
/// `tol × max |A|`. For a decomposable tensor the fibres span the same
/// `m`-dimensional subspace, so acceptance is exact up to rounding.
pub fn sas_decompose(a: &DenseTensor, tol: f64) -> Result<SasVerdict> {
    let n = a.hypercubic_dim()?;
    let m = a.order();
    let big = a.max_abs();
    let check = is_antisymmetric(a, tol * big)?;
    if !check.holds {
        return Err(TensorError::InputNotAntisymmetric(check.max_violation));
    }
    if big == 0.0 {
        return Ok(SasVerdict::Separable {
            witness: SeparableWitness {
                vectors: vec![vec![0.0; n]; m],
                scale: 1.0,
                kind: SymmetryKind::Antisymmetric,
                normalization: NormalizationMode::Unit,
            },
            residual: 0.0,
        });
    }
    let pivot = a
        .data()
        .iter()
        .position(|x| x.abs() == big)
        .expect("max entry exists");
    let mut pos = crate::tensor::delinearize(pivot, a.shape())?
        .as_slice()
        .iter()
        .map(|i| i - 1)
        .collect::<Vec<_>>();
    let mut vectors = Vec::with_capacity(m);
    for k in 0..m {
        let keep = pos[k];
        let v: Vec<f64> = (0..n)
            .map(|j| {
                pos[k] = j;
                a.get(&pos)
            })
            .collect();
        pos[k] = keep;
        vectors.push(v);
    }
    let w = wedge(&vectors, NormalizationMode::Unit)?;
    let at_pivot = w.get(&pos);
    if at_pivot == 0.0 {
        return Ok(SasVerdict::NotDecomposable {
            candidate: None,
            residual: big,
        });
    }
    let s = a.get(&pos) / at_pivot;
    let residual = max_abs_diff(&scale(&w, s), a)?;
    let witness = SeparableWitness {
        vectors,
        scale: s,
        kind: SymmetryKind::Antisymmetric,
        normalization: NormalizationMode::Unit,
    };
    if residual <= tol * big {
        Ok(SasVerdict::Separable { witness, residual })
    } else {
        Ok(SasVerdict::NotDecomposable {
            candidate: Some(witness),
            residual,
        })
    }
}

/// Separability of an antisymmetric matrix: a nonzero one is a single
/// wedge exactly when its rank is 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixSeparability {
    pub separable: bool,
    pub rank: usize,
}

pub fn antisym_matrix_separability(m: &DenseTensor, tol: f64) -> Result<MatrixSeparability> {
    if m.order() != 2 {
        return Err(TensorError::DimensionMismatch(format!(
            "expected a matrix, got order {}",
            m.order()
        )));
    }
    let check = is_antisymmetric(m, tol * m.max_abs())?;
    if !check.holds {
        return Err(TensorError::InputNotAntisymmetric(check.max_violation));
    }
    let n = m.shape()[0];
    let mat = Matrix::new(n, n, m.data().to_vec())?;
    let rank = linalg::rank(&mat, tol);
    Ok(MatrixSeparability {
        separable: rank == 0 || rank == 2,
        rank,
    })
}

/// Dimension of `{A ∈ T(m;n) : σ(A) = A}` (unsigned) or
/// `{A : σ(A) = (−1)^τ(σ) A}` (signed), counted from the orbits of the
/// cyclic group generated by `σ` on index tuples.
pub fn fixed_subspace_dim(m: usize, n: usize, sigma: &Permutation, signed: bool) -> Result<usize> {
    if sigma.len() != m {
        return Err(TensorError::InvalidPermutation(format!(
            "permutation on {} points for order {m}",
            sigma.len()
        )));
    }
    let total = (n as u128).pow(m as u32);
    if n == 0 || total > MAX_SUBSPACE_TUPLES as u128 {
        return Err(TensorError::TooLarge(format!(
            "n^m = {total} exceeds {MAX_SUBSPACE_TUPLES}"
        )));
    }
    let total = total as usize;
    let shape = vec![n; m];
    let strides = crate::tensor::strides(&shape);
    let perm = sigma.zero_based();
    let mut visited = vec![false; total];
    let mut idx = vec![0; m];
    let mut img = vec![0; m];
    let mut dim = 0;
    let mut off = 0;
    loop {
        if !visited[off] {
            let mut cur = idx.clone();
            let mut len = 0usize;
            loop {
                let o: usize = cur.iter().zip(&strides).map(|(i, s)| i * s).sum();
                if visited[o] {
                    break;
                }
                visited[o] = true;
                len += 1;
                for k in 0..m {
                    img[k] = cur[perm[k]];
                }
                std::mem::swap(&mut cur, &mut img);
            }
            if !signed || sigma.parity() == 1 || len % 2 == 0 {
                dim += 1;
            }
        }
        off += 1;
        if !next_index(&mut idx, &shape) {
            break;
        }
    }
    Ok(dim)
}
