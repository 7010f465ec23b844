//! Tensor–vector products, the associated homogeneous polynomial,
//! H-eigenpairs and sampling-based definiteness probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, TensorError};
use crate::symmetry::{is_symmetric, symmetrize};
use crate::tensor::{dot, norm2, DenseTensor, NormalizationMode};

/// `(A x^{m−1})_i = Σ A_{i i2…im} x_{i2}⋯x_{im}`.
pub fn tvp(a: &DenseTensor, x: &[f64]) -> Result<Vec<f64>> {
    let n = a.hypercubic_dim()?;
    if a.order() < 2 {
        return Err(TensorError::DimensionMismatch(
            "tensor-vector product needs order >= 2".into(),
        ));
    }
    if x.len() != n {
        return Err(TensorError::DimensionMismatch(format!(
            "vector of length {} for dimension {n}",
            x.len()
        )));
    }
    let mut cur = a.data().to_vec();
    while cur.len() > n {
        cur = cur.chunks_exact(n).map(|row| dot(row, x)).collect();
    }
    Ok(cur)
}

/// `f_A(x) = Σ A_{i1…im} x_{i1}⋯x_{im}`.
pub fn poly_eval(a: &DenseTensor, x: &[f64]) -> Result<f64> {
    if a.order() == 1 {
        a.hypercubic_dim()?;
        if x.len() != a.len() {
            return Err(TensorError::DimensionMismatch(format!(
                "vector of length {} for dimension {}",
                x.len(),
                a.len()
            )));
        }
        return Ok(dot(a.data(), x));
    }
    Ok(dot(x, &tvp(a, x)?))
}

/// `x^{[k]}`: componentwise `k`-th power.
pub fn componentwise_pow(x: &[f64], k: usize) -> Vec<f64> {
    x.iter().map(|v| v.powi(k as i32)).collect()
}

/// `‖A u^{m−1} − λ u^{[m−1]}‖`.
pub fn eigen_residual(a: &DenseTensor, lambda: f64, u: &[f64]) -> Result<f64> {
    let m = a.order();
    let au = tvp(a, u)?;
    let up = componentwise_pow(u, m - 1);
    let diff: Vec<f64> = au.iter().zip(&up).map(|(x, y)| x - lambda * y).collect();
    Ok(norm2(&diff))
}

/// An H-eigenpair candidate `(λ, u)` with its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub u: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Settings for [`sshopm`].
#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    pub shift: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            shift: 0.0,
            seed: 0,
            max_iter: 5000,
            tol: 1e-10,
        }
    }
}

const MAX_RESTARTS: u64 = 8;

fn m_normalize(x: &mut [f64], m: usize) -> bool {
    let s: f64 = x.iter().map(|v| v.abs().powi(m as i32)).sum();
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    let c = s.powf(1.0 / m as f64);
    x.iter_mut().for_each(|v| *v /= c);
    true
}

/// Shifted symmetric power iteration for H-eigenpairs of a symmetric
/// tensor.
///
/// Iterates `y = A x^{m−1} + shift · x^{[m−1]}`,
/// `x ← sign(y)·|y|^{1/(m−1)}` rescaled to unit `m`-norm, and reports
/// `λ = f_A(x) / Σ x_i^m`. For `m = 2` this is the shifted power method.
/// A vanishing iterate triggers a reseeded restart (bounded).
pub fn sshopm(a: &DenseTensor, opts: EigOptions) -> Result<EigenPair> {
    let n = a.hypercubic_dim()?;
    let m = a.order();
    if m < 2 {
        return Err(TensorError::DimensionMismatch(
            "eigenpairs need order >= 2".into(),
        ));
    }
    let check = is_symmetric(a, 1e-12 * a.max_abs().max(1.0))?;
    if !check.holds {
        return Err(TensorError::NotSymmetric(check.max_violation));
    }
    let root = 1.0 / (m - 1) as f64;

    'restart: for attempt in 0..MAX_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(attempt);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if !m_normalize(&mut x, m) {
            continue;
        }
        let mut best = None;
        for it in 0..=opts.max_iter {
            let ax = tvp(a, &x)?;
            let xp = componentwise_pow(&x, m - 1);
            let denom = dot(&x, &xp);
            let lambda = dot(&x, &ax) / denom;
            let residual = norm2(
                &ax.iter()
                    .zip(&xp)
                    .map(|(p, q)| p - lambda * q)
                    .collect::<Vec<_>>(),
            );
            let pair = EigenPair {
                lambda,
                u: x.clone(),
                residual,
                iterations: it,
                converged: residual <= opts.tol,
            };
            if pair.converged || it == opts.max_iter {
                return Ok(pair);
            }
            best = Some(pair);
            let mut y: Vec<f64> = ax
                .iter()
                .zip(&xp)
                .map(|(p, q)| p + opts.shift * q)
                .collect();
            y.iter_mut()
                .for_each(|v| *v = v.signum() * v.abs().powf(root));
            if !m_normalize(&mut y, m) {
                continue 'restart;
            }
            x = y;
        }
        if let Some(p) = best {
            return Ok(p);
        }
    }
    Err(TensorError::NoConvergence(format!(
        "iterate vanished in {MAX_RESTARTS} restarts"
    )))
}

/// A sample point with the polynomial value there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every probe gave `f > 0`. Sampling cannot certify definiteness.
    PositiveDefiniteEvidence,
    /// Every probe gave `f < 0`.
    NegativeDefiniteEvidence,
    /// Points of both signs were found.
    Indefinite { positive: Witness, negative: Witness },
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::PositiveDefiniteEvidence => "positive-definite-evidence",
            Verdict::NegativeDefiniteEvidence => "negative-definite-evidence",
            Verdict::Indefinite { .. } => "indefinite",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub verdict: Verdict,
    /// Smallest and largest `f` seen, with their points.
    pub witnesses: Vec<Witness>,
    pub samples: usize,
}

/// Evaluates `f_A` on seeded unit-sphere samples plus the two extreme
/// eigen-probes of the symmetrization (maximizers of `f` and `−f`), and
/// reports the sign pattern.
pub fn definiteness_probe(a: &DenseTensor, samples: usize, seed: u64) -> Result<ProbeReport> {
    let n = a.hypercubic_dim()?;
    let m = a.order();
    if m % 2 != 0 {
        return Err(TensorError::OddOrder(m));
    }
    let zero_tol = 1e-14 * a.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(samples + 2);
    for _ in 0..samples {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm2(&x);
        if r > 0.0 {
            x.iter_mut().for_each(|v| *v /= r);
            points.push(x);
        }
    }

    let sym = symmetrize(a, NormalizationMode::Projector, false)?;
    let shift = crate::tensor::frobenius_norm(&sym) * (m - 1) as f64;
    let neg = crate::tensor::scale(&sym, -1.0);
    for (k, t) in [&sym, &neg].into_iter().enumerate() {
        let opts = EigOptions {
            shift,
            seed: seed.wrapping_add(k as u64 + 1),
            max_iter: 500,
            tol: 1e-12,
        };
        if let Ok(pair) = sshopm(t, opts) {
            points.push(pair.u);
        }
    }

    let mut lo: Option<Witness> = None;
    let mut hi: Option<Witness> = None;
    for x in points.iter() {
        let f = poly_eval(a, x)?;
        if lo.as_ref().is_none_or(|w| f < w.f) {
            lo = Some(Witness { x: x.clone(), f });
        }
        if hi.as_ref().is_none_or(|w| f > w.f) {
            hi = Some(Witness { x: x.clone(), f });
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Ok(ProbeReport {
            verdict: Verdict::Inconclusive,
            witnesses: Vec::new(),
            samples: points.len(),
        });
    };
    let verdict = if hi.f > zero_tol && lo.f < -zero_tol {
        Verdict::Indefinite {
            positive: hi.clone(),
            negative: lo.clone(),
        }
    } else if lo.f > zero_tol {
        Verdict::PositiveDefiniteEvidence
    } else if hi.f < -zero_tol {
        Verdict::NegativeDefiniteEvidence
    } else {
        Verdict::Inconclusive
    };
    Ok(ProbeReport {
        verdict,
        witnesses: vec![lo, hi],
        samples: points.len(),
    })
}
