//! Dense hypercubic tensor algebra.
//!
//! Row-major `f64` tensors with S-products, even-order inversion through
//! the normal unfolding, symmetric and antisymmetric separable tensors,
//! permutation tensors, tensor eigenpairs and CP rank evidence.
//!
//! Multi-indices and modes in the public API are 1-based; raw positions
//! passed to [`DenseTensor::get`] and [`DenseTensor::set`] are 0-based.

pub mod cp;
pub mod error;
pub mod inversion;
pub mod io;
pub mod linalg;
pub mod permtensor;
pub mod permutation;
pub mod products;
pub mod spectra;
pub mod symmetry;
pub mod tensor;

pub use error::{Result, TensorError};
pub use permutation::Permutation;
pub use tensor::{DenseTensor, MultiIndex, NormalizationMode};
