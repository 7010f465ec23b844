//! Dense row-major tensor storage.
//!
//! Multi-indices are 1-based ([`MultiIndex`]); flat offsets and the raw
//! `get`/`set` accessors are 0-based. The only place the two meet is
//! [`linearize`] / [`delinearize`].

use std::fmt;

use rand::Rng;

use crate::error::{Result, TensorError};

/// A 1-based multi-index, one position per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        MultiIndex(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Checks `1 <= index_k <= extent_k` for every mode.
    pub fn validate(&self, shape: &[usize]) -> Result<()> {
        let ok = self.0.len() == shape.len()
            && self.0.iter().zip(shape).all(|(&i, &d)| i >= 1 && i <= d);
        if ok {
            Ok(())
        } else {
            Err(TensorError::IndexOutOfRange {
                index: self.0.clone(),
                shape: shape.to_vec(),
            })
        }
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

/// Row-major flat offset of a 1-based multi-index.
pub fn linearize(idx: &MultiIndex, shape: &[usize]) -> Result<usize> {
    idx.validate(shape)?;
    Ok(idx
        .0
        .iter()
        .zip(shape)
        .fold(0, |acc, (&i, &d)| acc * d + (i - 1)))
}

/// Inverse of [`linearize`].
pub fn delinearize(offset: usize, shape: &[usize]) -> Result<MultiIndex> {
    let total: usize = shape.iter().product();
    if offset >= total {
        return Err(TensorError::IndexOutOfRange {
            index: vec![offset],
            shape: shape.to_vec(),
        });
    }
    let mut rem = offset;
    let mut out = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        out[k] = rem % shape[k] + 1;
        rem /= shape[k];
    }
    Ok(MultiIndex(out))
}

/// Row-major strides for `shape`.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// Advances a 0-based odometer in row-major order. Returns false on wrap.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Scaling convention for the (anti)symmetrizers over `m!` permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationMode {
    /// Plain sum, factor 1.
    Unit,
    /// Factor `1/sqrt(m!)`; makes the symmetrizers isometric on rank-1 inputs.
    SqrtFactorial,
    /// Factor `1/m!`; makes the symmetrizers idempotent projectors.
    Projector,
}

impl NormalizationMode {
    pub fn factor(self, m: usize) -> f64 {
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        match self {
            NormalizationMode::Unit => 1.0,
            NormalizationMode::SqrtFactorial => 1.0 / fact.sqrt(),
            NormalizationMode::Projector => 1.0 / fact,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormalizationMode::Unit => "unit",
            NormalizationMode::SqrtFactorial => "sqrt-factorial",
            NormalizationMode::Projector => "projector",
        }
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unit" => Ok(NormalizationMode::Unit),
            "sqrt-factorial" | "sqrt" => Ok(NormalizationMode::SqrtFactorial),
            "projector" => Ok(NormalizationMode::Projector),
            other => Err(format!(
                "unknown normalization {other:?} (expected unit, sqrt-factorial or projector)"
            )),
        }
    }
}

/// Dense multi-array of `f64`, row-major (last index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        check_shape(&shape)?;
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(TensorError::DataLength {
                shape,
                expected,
                got: data.len(),
            });
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        check_shape(shape)?;
        Ok(DenseTensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        })
    }

    /// Builds a tensor entry by entry; `f` receives the 0-based position.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_shape(shape)?;
        let total: usize = shape.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0; shape.len()];
        loop {
            data.push(f(&idx));
            if !next_index(&mut idx, shape) {
                break;
            }
        }
        Ok(DenseTensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Order-1 tensor holding `v`.
    pub fn vector(v: &[f64]) -> Result<Self> {
        DenseTensor::new(vec![v.len()], v.to_vec())
    }

    /// Order-2 tensor from row slices.
    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(TensorError::DimensionMismatch("ragged matrix rows".into()));
        }
        DenseTensor::new(vec![r, c], rows.concat())
    }

    /// Entries drawn uniformly from `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Result<Self> {
        DenseTensor::from_fn(shape, |_| rng.gen_range(-1.0..1.0))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn is_hypercubic(&self) -> bool {
        self.shape.windows(2).all(|w| w[0] == w[1])
    }

    /// Common extent of a hypercubic tensor.
    pub fn hypercubic_dim(&self) -> Result<usize> {
        if self.is_hypercubic() {
            Ok(self.shape[0])
        } else {
            Err(TensorError::NotHypercubic(self.shape.clone()))
        }
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    /// Entry at a 0-based position. Panics when out of range.
    pub fn get(&self, pos: &[usize]) -> f64 {
        self.data[self.offset0(pos)]
    }

    /// Sets the entry at a 0-based position. Panics when out of range.
    pub fn set(&mut self, pos: &[usize], value: f64) {
        let off = self.offset0(pos);
        self.data[off] = value;
    }

    /// Entry at a 1-based multi-index.
    pub fn entry(&self, idx: &MultiIndex) -> Result<f64> {
        Ok(self.data[linearize(idx, &self.shape)?])
    }

    fn offset0(&self, pos: &[usize]) -> usize {
        assert_eq!(pos.len(), self.shape.len(), "position order mismatch");
        pos.iter().zip(&self.shape).fold(0, |acc, (&i, &d)| {
            assert!(i < d, "position {pos:?} out of range for {:?}", self.shape);
            acc * d + i
        })
    }

    pub fn reshape(self, shape: Vec<usize>) -> Result<Self> {
        DenseTensor::new(shape, self.data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        Err(TensorError::InvalidShape(shape.to_vec()))
    } else {
        Ok(())
    }
}

fn same_shape(a: &DenseTensor, b: &DenseTensor) -> Result<()> {
    if a.shape == b.shape {
        Ok(())
    } else {
        Err(TensorError::ShapeMismatch {
            left: a.shape.clone(),
            right: b.shape.clone(),
        })
    }
}

pub fn add(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    same_shape(a, b)?;
    Ok(DenseTensor {
        shape: a.shape.clone(),
        data: a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
    })
}

pub fn sub(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    same_shape(a, b)?;
    Ok(DenseTensor {
        shape: a.shape.clone(),
        data: a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
    })
}

pub fn scale(a: &DenseTensor, c: f64) -> DenseTensor {
    a.map(|x| c * x)
}

/// `max |a - b|` over all entries.
pub fn max_abs_diff(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    same_shape(a, b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// Frobenius norm, scaled by the largest magnitude to avoid overflow.
pub fn frobenius_norm(a: &DenseTensor) -> f64 {
    let big = a.max_abs();
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    let s: f64 = a.data.iter().map(|x| (x / big) * (x / big)).sum();
    big * s.sqrt()
}

/// Entrywise inner product of equally shaped tensors.
pub fn inner(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    same_shape(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Order-`2k` identity tensor of dimension `n`: `δ_{i1 j1} ⋯ δ_{ik jk}`.
pub fn identity_tensor(k: usize, n: usize) -> Result<DenseTensor> {
    if k == 0 || n == 0 {
        return Err(TensorError::InvalidShape(vec![n; 2 * k]));
    }
    DenseTensor::from_fn(&vec![n; 2 * k], |idx| {
        if idx[..k] == idx[k..] {
            1.0
        } else {
            0.0
        }
    })
}

/// Standard basis vector `e_i` (1-based) in `R^n`.
pub fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i - 1] = 1.0;
    v
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_examples() {
        let i = identity_tensor(1, 2).unwrap();
        assert_eq!(i.data(), &[1.0, 0.0, 0.0, 1.0]);
        let i4 = identity_tensor(2, 2).unwrap();
        assert_eq!(i4.entry(&MultiIndex::new(vec![1, 2, 1, 2])).unwrap(), 1.0);
        assert_eq!(i4.entry(&MultiIndex::new(vec![1, 1, 2, 2])).unwrap(), 0.0);
        let i6 = identity_tensor(3, 3).unwrap();
        assert_eq!(i6.data().iter().filter(|&&x| x == 1.0).count(), 27);
        assert!(i6.data().iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn linearize_examples() {
        let s = [2, 2];
        assert_eq!(linearize(&MultiIndex::new(vec![1, 1]), &s).unwrap(), 0);
        assert_eq!(linearize(&MultiIndex::new(vec![2, 1]), &s).unwrap(), 2);
        assert!(linearize(&MultiIndex::new(vec![3, 1]), &s).is_err());
        assert!(linearize(&MultiIndex::new(vec![0, 1]), &s).is_err());
        assert!(delinearize(4, &s).is_err());
        let s = [2, 3, 2];
        for off in 0..12 {
            let idx = delinearize(off, &s).unwrap();
            assert_eq!(linearize(&idx, &s).unwrap(), off);
        }
    }

    #[test]
    fn elementwise_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DenseTensor::random(&[2, 3, 2], &mut rng).unwrap();
        assert!(add(&a, &scale(&a, -1.0)).unwrap().is_zero());
        assert_eq!(max_abs_diff(&a, &a).unwrap(), 0.0);
        let i3 = scale(&identity_tensor(1, 2).unwrap(), 3.0);
        assert_eq!(i3.data(), &[3.0, 0.0, 0.0, 3.0]);
        let b = DenseTensor::zeros(&[2, 2]).unwrap();
        assert!(matches!(
            add(&a, &b),
            Err(TensorError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn invalid_shapes() {
        assert!(DenseTensor::zeros(&[]).is_err());
        assert!(DenseTensor::zeros(&[2, 0]).is_err());
        assert!(matches!(
            DenseTensor::new(vec![2, 2], vec![0.0; 3]),
            Err(TensorError::DataLength { .. })
        ));
    }

    #[test]
    fn frobenius_examples() {
        let i = identity_tensor(1, 2).unwrap();
        assert!((frobenius_norm(&i) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&DenseTensor::zeros(&[3, 3]).unwrap()), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DenseTensor::random(&[3, 4, 2], &mut rng).unwrap();
        // naive two-pass oracle: sum of squares, then root
        let mut acc = 0.0;
        for &x in a.data() {
            acc += x * x;
        }
        let naive = acc.sqrt();
        assert!((frobenius_norm(&a) - naive).abs() <= 1e-12 * naive);
        for c in [2.5, -3.0, 1e-3] {
            let lhs = frobenius_norm(&scale(&a, c));
            assert!((lhs - c.abs() * naive).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn hypercubic_check() {
        assert!(DenseTensor::zeros(&[3, 3, 3]).unwrap().is_hypercubic());
        assert!(!DenseTensor::zeros(&[3, 2]).unwrap().is_hypercubic());
        assert!(DenseTensor::zeros(&[3, 2]).unwrap().hypercubic_dim().is_err());
    }

    #[test]
    fn normalization_factors() {
        assert_eq!(NormalizationMode::Unit.factor(4), 1.0);
        assert!((NormalizationMode::SqrtFactorial.factor(3) - 1.0 / 6f64.sqrt()).abs() < 1e-16);
        assert!((NormalizationMode::Projector.factor(4) - 1.0 / 24.0).abs() < 1e-16);
    }
}
