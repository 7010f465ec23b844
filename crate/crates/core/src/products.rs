//! Tensor multiplications.
//!
//! Every product here is an instance of one general contraction
//! ([`s_product`]): a list of `(mode of A, mode of B)` pairs to sum over and
//! a placement of the surviving modes in the output. Modes are 1-based.

use crate::error::{Result, TensorError};
use crate::tensor::{next_index, DenseTensor, NormalizationMode};

/// Which modes of `A` and `B` are summed together and where the surviving
/// modes land in the output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionSpec {
    /// 1-based `(mode of A, mode of B)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// Output position (1-based) of each surviving mode, listing the
    /// surviving modes of `A` in order followed by those of `B`. `None`
    /// keeps that natural order.
    pub output_order: Option<Vec<usize>>,
}

impl ContractionSpec {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        ContractionSpec {
            pairs,
            output_order: None,
        }
    }

    pub fn with_output_order(mut self, order: Vec<usize>) -> Self {
        self.output_order = Some(order);
        self
    }

    /// Pairs the last `k` modes of an order-`p` tensor with the first `k`
    /// modes of the other operand.
    pub fn trailing_leading(p: usize, k: usize) -> Self {
        ContractionSpec::new((1..=k).map(|i| (p - k + i, i)).collect())
    }
}

struct Plan {
    out_shape: Vec<usize>,
    /// Per output axis: (stride in A, stride in B); one of them is zero.
    out_strides: Vec<(usize, usize)>,
    sum_shape: Vec<usize>,
    sum_strides: Vec<(usize, usize)>,
}

fn plan(a: &DenseTensor, b: &DenseTensor, spec: &ContractionSpec) -> Result<Plan> {
    let (p, q) = (a.order(), b.order());
    let mut used_a = vec![false; p];
    let mut used_b = vec![false; q];
    let (sa, sb) = (a.strides(), b.strides());
    let mut sum_shape = Vec::new();
    let mut sum_strides = Vec::new();
    for &(ma, mb) in &spec.pairs {
        if ma == 0 || ma > p || mb == 0 || mb > q {
            return Err(TensorError::InvalidSpec(format!(
                "pair ({ma},{mb}) out of range for orders {p} and {q}"
            )));
        }
        if std::mem::replace(&mut used_a[ma - 1], true)
            || std::mem::replace(&mut used_b[mb - 1], true)
        {
            return Err(TensorError::InvalidSpec(format!(
                "pair ({ma},{mb}) reuses a mode"
            )));
        }
        let (da, db) = (a.shape()[ma - 1], b.shape()[mb - 1]);
        if da != db {
            return Err(TensorError::InvalidSpec(format!(
                "pair ({ma},{mb}) joins extents {da} and {db}"
            )));
        }
        sum_shape.push(da);
        sum_strides.push((sa[ma - 1], sb[mb - 1]));
    }

    let mut surviving: Vec<(usize, (usize, usize))> = Vec::new();
    for k in (0..p).filter(|&k| !used_a[k]) {
        surviving.push((a.shape()[k], (sa[k], 0)));
    }
    for k in (0..q).filter(|&k| !used_b[k]) {
        surviving.push((b.shape()[k], (0, sb[k])));
    }
    let s = surviving.len();
    let placement: Vec<usize> = match &spec.output_order {
        None => (1..=s).collect(),
        Some(order) => order.clone(),
    };
    let mut seen = vec![false; s];
    if placement.len() != s
        || placement
            .iter()
            .any(|&t| t == 0 || t > s || std::mem::replace(&mut seen[t - 1], true))
    {
        return Err(TensorError::InvalidSpec(format!(
            "output order {placement:?} is not a bijection onto 1..={s}"
        )));
    }
    let mut out_shape = vec![0; s];
    let mut out_strides = vec![(0, 0); s];
    for (src, &dst) in surviving.into_iter().zip(&placement) {
        out_shape[dst - 1] = src.0;
        out_strides[dst - 1] = src.1;
    }
    Ok(Plan {
        out_shape,
        out_strides,
        sum_shape,
        sum_strides,
    })
}

/// General contraction. A full pairing returns the scalar as a 1-extent
/// order-1 tensor.
pub fn s_product(a: &DenseTensor, b: &DenseTensor, spec: &ContractionSpec) -> Result<DenseTensor> {
    let plan = plan(a, b, spec)?;
    let (ad, bd) = (a.data(), b.data());
    let sum_len: usize = plan.sum_shape.iter().product();
    let mut sum_offsets = Vec::with_capacity(sum_len);
    {
        let mut idx = vec![0; plan.sum_shape.len()];
        loop {
            let off = idx
                .iter()
                .zip(&plan.sum_strides)
                .fold((0, 0), |(x, y), (&i, &(s, t))| (x + i * s, y + i * t));
            sum_offsets.push(off);
            if !next_index(&mut idx, &plan.sum_shape) {
                break;
            }
        }
    }

    if plan.out_shape.is_empty() {
        let v = sum_offsets.iter().map(|&(x, y)| ad[x] * bd[y]).sum();
        return DenseTensor::new(vec![1], vec![v]);
    }
    DenseTensor::from_fn(&plan.out_shape, |idx| {
        let (oa, ob) = idx
            .iter()
            .zip(&plan.out_strides)
            .fold((0, 0), |(x, y), (&i, &(s, t))| (x + i * s, y + i * t));
        sum_offsets
            .iter()
            .map(|&(x, y)| ad[oa + x] * bd[ob + y])
            .sum()
    })
}

/// `A ⊗ B`: order `p + q`, the modes of `A` first.
pub fn outer_product(a: &DenseTensor, b: &DenseTensor) -> DenseTensor {
    let mut shape = a.shape().to_vec();
    shape.extend_from_slice(b.shape());
    let mut data = Vec::with_capacity(a.len() * b.len());
    for &x in a.data() {
        data.extend(b.data().iter().map(|&y| x * y));
    }
    DenseTensor::new(shape, data).expect("outer product shape")
}

/// `v1 ⊗ v2 ⊗ ⋯ ⊗ vm`.
pub fn outer_chain(vectors: &[Vec<f64>]) -> Result<DenseTensor> {
    let (first, rest) = vectors
        .split_first()
        .ok_or_else(|| TensorError::DimensionMismatch("empty vector list".into()))?;
    let mut t = DenseTensor::vector(first)?;
    for v in rest {
        t = outer_product(&t, &DenseTensor::vector(v)?);
    }
    Ok(t)
}

/// Scalar `⟨A, B⟩` through a full pairing.
pub fn inner_product(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(TensorError::ShapeMismatch {
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let spec = ContractionSpec::new((1..=a.order()).map(|k| (k, k)).collect());
    Ok(s_product(a, b, &spec)?.data()[0])
}

/// `(A ×_k M)_{…i_k…} = Σ_j A_{…j…} M_{j i_k}`.
///
/// A matrix keeps the order of `A` (mode `k` takes the column extent of
/// `M`); a vector contracts mode `k` away.
pub fn mode_product(a: &DenseTensor, m: &DenseTensor, k: usize) -> Result<DenseTensor> {
    let order = a.order();
    if k == 0 || k > order {
        return Err(TensorError::DimensionMismatch(format!(
            "mode {k} out of range for order {order}"
        )));
    }
    if m.order() > 2 {
        return Err(TensorError::DimensionMismatch(
            "mode product needs a matrix or a vector".into(),
        ));
    }
    if m.shape()[0] != a.shape()[k - 1] {
        return Err(TensorError::DimensionMismatch(format!(
            "mode {k} has extent {} but the factor has {} rows",
            a.shape()[k - 1],
            m.shape()[0]
        )));
    }
    let mut spec = ContractionSpec::new(vec![(k, 1)]);
    if m.order() == 2 {
        // A's surviving modes keep their slots; the column mode of M takes slot k.
        let mut placement: Vec<usize> = (1..=order).filter(|&t| t != k).collect();
        placement.push(k);
        spec = spec.with_output_order(placement);
    }
    s_product(a, m, &spec)
}

/// Contractive product pairing the last `k` modes of `A` with the first
/// `k` modes of `B`.
pub fn contract_k(a: &DenseTensor, b: &DenseTensor, k: usize) -> Result<DenseTensor> {
    let (p, q) = (a.order(), b.order());
    if k > p.min(q) {
        return Err(TensorError::DimensionMismatch(format!(
            "cannot contract {k} modes of orders {p} and {q}"
        )));
    }
    if a.shape()[p - k..] != b.shape()[..k] {
        return Err(TensorError::DimensionMismatch(format!(
            "trailing extents {:?} differ from leading extents {:?}",
            &a.shape()[p - k..],
            &b.shape()[..k]
        )));
    }
    s_product(a, b, &ContractionSpec::trailing_leading(p, k))
}

/// t-product of `A: n1×n2×n3` and `B: n2×n×n3`.
///
/// With `circular` the third index `i3 + 1 − j2` wraps modulo `n3`
/// (facewise circular convolution); without it, out-of-range third
/// indices contribute nothing.
pub fn t_product(a: &DenseTensor, b: &DenseTensor, circular: bool) -> Result<DenseTensor> {
    if a.order() != 3 || b.order() != 3 {
        return Err(TensorError::DimensionMismatch(
            "t-product needs two order-3 tensors".into(),
        ));
    }
    let (n1, n2, n3) = (a.shape()[0], a.shape()[1], a.shape()[2]);
    let n = b.shape()[1];
    if b.shape()[0] != n2 || b.shape()[2] != n3 {
        return Err(TensorError::ShapeMismatch {
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    DenseTensor::from_fn(&[n1, n, n3], |idx| {
        let (i1, i2, i3) = (idx[0], idx[1], idx[2]);
        let mut s = 0.0;
        for j2 in 0..n3 {
            let t = if j2 <= i3 {
                i3 - j2
            } else if circular {
                i3 + n3 - j2
            } else {
                continue;
            };
            for j1 in 0..n2 {
                s += a.get(&[i1, j1, j2]) * b.get(&[j1, i2, t]);
            }
        }
        s
    })
}

/// `A ⊠_j u`: outer product with `u`'s index placed at output position
/// `j` and the modes of `A` filling the other slots in order.
pub fn insert_vector(a: &DenseTensor, u: &[f64], j: usize) -> Result<DenseTensor> {
    let p = a.order() + 1;
    if j == 0 || j > p {
        return Err(TensorError::DimensionMismatch(format!(
            "insertion slot {j} out of range for output order {p}"
        )));
    }
    let mut placement: Vec<usize> = (1..=p).filter(|&t| t != j).collect();
    placement.push(j);
    s_product(
        a,
        &DenseTensor::vector(u)?,
        &ContractionSpec::default().with_output_order(placement),
    )
}

/// Bowtie product `A ⋈ u`, lifting order `p − 1` to order `p`.
///
/// The prefactor is `factor(p) / factor(p − 1)` of the normalization mode
/// (`1/p` for `Projector`, the literal formula). `signed` weights the
/// insertion at slot `j` by `(−1)^(p−j)`; with it, iterating from a single
/// vector reproduces the wedge of the same normalization.
pub fn bowtie(
    a: &DenseTensor,
    u: &[f64],
    signed: bool,
    norm: NormalizationMode,
) -> Result<DenseTensor> {
    let n = a.hypercubic_dim()?;
    if u.len() != n {
        return Err(TensorError::DimensionMismatch(format!(
            "vector of length {} for dimension {n}",
            u.len()
        )));
    }
    let p = a.order() + 1;
    let pre = norm.factor(p) / norm.factor(p - 1);
    let mut acc = vec![0.0; n.pow(p as u32)];
    for j in 1..=p {
        let w = if signed && (p - j) % 2 == 1 { -pre } else { pre };
        let term = insert_vector(a, u, j)?;
        for (d, &x) in acc.iter_mut().zip(term.data()) {
            *d += w * x;
        }
    }
    DenseTensor::new(vec![n; p], acc)
}
