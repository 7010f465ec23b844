//! CP decomposition by alternating least squares, and rank evidence
//! tables bracketing the CP rank between a matricization lower bound and
//! the smallest rank ALS can fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, TensorError};
use crate::linalg::{self, Lu, Matrix};
use crate::tensor::{frobenius_norm, next_index, sub, DenseTensor};

/// Tolerance for the matricization ranks behind the lower bound.
pub const LOWER_BOUND_TOL: f64 = 1e-10;

/// One weighted rank-1 term `w · f1 ⊗ ⋯ ⊗ fm` with unit factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CpTerm {
    pub weight: f64,
    pub factors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpModel {
    pub terms: Vec<CpTerm>,
    pub target_shape: Vec<usize>,
}

impl CpModel {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let terms: Vec<(f64, Vec<&[f64]>)> = self
            .terms
            .iter()
            .map(|t| (t.weight, t.factors.iter().map(Vec::as_slice).collect()))
            .collect();
        DenseTensor::new(self.target_shape.clone(), reconstruct_into(&self.target_shape, &terms))
    }
}

/// Row-major data of `Σ_r w_r · f_r1 ⊗ ⋯ ⊗ f_rm`.
fn reconstruct_into(shape: &[usize], terms: &[(f64, Vec<&[f64]>)]) -> Vec<f64> {
    let len: usize = shape.iter().product();
    let mut data = vec![0.0; len];
    let mut idx = vec![0; shape.len()];
    for slot in data.iter_mut() {
        *slot = terms
            .iter()
            .map(|(w, fs)| w * fs.iter().zip(&idx).map(|(f, &i)| f[i]).product::<f64>())
            .sum();
        next_index(&mut idx, shape);
    }
    data
}

/// Settings for [`cp_als`].
#[derive(Debug, Clone, Copy)]
pub struct AlsOptions {
    pub rank: usize,
    pub restarts: usize,
    /// Sweep cap per restart.
    pub iters: usize,
    pub seed: u64,
    /// A restart stops once its fit is at or below this.
    pub fit_tol: f64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        AlsOptions {
            rank: 1,
            restarts: 10,
            iters: 2000,
            seed: 0,
            fit_tol: 1e-8,
        }
    }
}

/// One ALS restart: final model, fit and per-sweep fit history.
#[derive(Debug, Clone, PartialEq)]
pub struct AlsRun {
    pub restart: usize,
    pub model: CpModel,
    pub fit: f64,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlsResult {
    /// Lowest fit, ties broken toward the lower restart index.
    pub best: AlsRun,
    /// Final fit of every restart, by restart index.
    pub fits: Vec<f64>,
}

/// Runs `restarts` independent ALS fits of rank `R` and keeps the best.
///
/// Restart `r` draws its initial factors from a ChaCha8 stream
/// `(seed, r)`, so results do not depend on scheduling.
pub fn cp_als(a: &DenseTensor, opts: AlsOptions) -> Result<AlsResult> {
    if opts.rank == 0 || opts.restarts == 0 {
        return Err(TensorError::InvalidSpec(
            "rank and restarts must be at least 1".into(),
        ));
    }
    let runs: Vec<AlsRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| als_run(a, opts, r))
        .collect::<Result<_>>()?;
    let fits: Vec<f64> = runs.iter().map(|r| r.fit).collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.fit < best.fit { r } else { best })
        .expect("at least one restart");
    Ok(AlsResult { best, fits })
}

fn als_run(a: &DenseTensor, opts: AlsOptions, restart: usize) -> Result<AlsRun> {
    let shape = a.shape();
    let order = shape.len();
    let rank = opts.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(restart as u64);
    // factors[k] is n_k × R, column-major by term: factors[k][r][i]
    let mut factors: Vec<Vec<Vec<f64>>> = shape
        .iter()
        .map(|&n| {
            (0..rank)
                .map(|_| {
                    let mut col: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    normalize(&mut col);
                    col
                })
                .collect()
        })
        .collect();
    let mut weights = vec![1.0; rank];

    let norm_a = frobenius_norm(a);
    let fit_of = |weights: &[f64], factors: &[Vec<Vec<f64>>]| -> f64 {
        if norm_a == 0.0 {
            return 0.0;
        }
        let terms: Vec<(f64, Vec<&[f64]>)> = (0..weights.len())
            .map(|r| (weights[r], factors.iter().map(|f| f[r].as_slice()).collect()))
            .collect();
        let data = reconstruct_into(shape, &terms);
        let diff: f64 = a
            .data()
            .iter()
            .zip(&data)
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        diff.sqrt() / norm_a
    };

    let mut history = Vec::new();
    let mut fit = fit_of(&weights, &factors);
    for _ in 0..opts.iters {
        if fit <= opts.fit_tol {
            break;
        }
        for k in 0..order {
            let cols = update_mode(a, &factors, k)?;
            for (r, mut col) in cols.into_iter().enumerate() {
                weights[r] = normalize(&mut col);
                factors[k][r] = col;
            }
        }
        fit = fit_of(&weights, &factors);
        history.push(fit);
    }

    let terms = (0..rank)
        .map(|r| CpTerm {
            weight: weights[r],
            factors: factors.iter().map(|f| f[r].clone()).collect(),
        })
        .collect();
    Ok(AlsRun {
        restart,
        model: CpModel {
            terms,
            target_shape: shape.to_vec(),
        },
        fit,
        history,
    })
}

/// Least-squares update of mode `k`: `U_k = M V⁻¹` with the MTTKRP `M`
/// and `V` the Hadamard product of the other Gram matrices.
fn update_mode(a: &DenseTensor, factors: &[Vec<Vec<f64>>], k: usize) -> Result<Vec<Vec<f64>>> {
    let shape = a.shape();
    let rank = factors[0].len();
    let nk = shape[k];

    let mut v = Matrix::from_fn(rank, rank, |_, _| 1.0);
    for (j, f) in factors.iter().enumerate() {
        if j == k {
            continue;
        }
        for p in 0..rank {
            for q in 0..rank {
                let g: f64 = f[p].iter().zip(&f[q]).map(|(x, y)| x * y).sum();
                v[(p, q)] *= g;
            }
        }
    }

    // mttkrp[i][r] = Σ A_{…i…} Π_{j≠k} U_j[i_j, r]
    let mut mttkrp = vec![vec![0.0; rank]; nk];
    let mut idx = vec![0; shape.len()];
    for &x in a.data() {
        if x != 0.0 {
            let row = &mut mttkrp[idx[k]];
            for (r, slot) in row.iter_mut().enumerate() {
                let mut p = x;
                for (j, f) in factors.iter().enumerate() {
                    if j != k {
                        p *= f[r][idx[j]];
                    }
                }
                *slot += p;
            }
        }
        next_index(&mut idx, shape);
    }

    let scale = (0..rank).map(|r| v[(r, r)]).fold(0.0, f64::max);
    let mut lu = Lu::factor(&v)?;
    if !(lu.min_pivot() > 1e-13 * scale) {
        let ridge = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for r in 0..rank {
            v[(r, r)] += ridge;
        }
        lu = Lu::factor(&v)?;
    }
    let rows: Vec<Vec<f64>> = mttkrp.iter().map(|m| lu.solve(m)).collect();
    Ok((0..rank)
        .map(|r| rows.iter().map(|row| row[r]).collect())
        .collect())
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// `max_k rank(A_(k))` over the mode-`k` matricizations. Every
/// matricization rank is a lower bound on the CP rank.
pub fn matricization_lower_bound(a: &DenseTensor, tol: f64) -> usize {
    let shape = a.shape();
    let len = a.len();
    (0..shape.len())
        .map(|k| {
            let nk = shape[k];
            let rest = len / nk;
            let mut m = Matrix::zeros(nk, rest);
            let mut idx = vec![0; shape.len()];
            for &x in a.data() {
                let mut col = 0;
                for (j, &i) in idx.iter().enumerate() {
                    if j != k {
                        col = col * shape[j] + i;
                    }
                }
                m[(idx[k], col)] = x;
                next_index(&mut idx, shape);
            }
            linalg::rank(&m, tol)
        })
        .max()
        .unwrap_or(0)
}

/// Best fit found at one trial rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub best_fit: f64,
    pub best_restart: usize,
    /// Restarts whose final fit reached `fit_tol`.
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEvidence {
    pub rows: Vec<RankRow>,
    /// Certified: `rank_CP(A) ≥ lower_bound`.
    pub lower_bound: usize,
    /// Smallest trial rank whose best fit reached `fit_tol`, if any.
    pub estimate: Option<usize>,
    pub fit_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// ALS evidence for every `R` in `1..=max_rank`.
///
/// The estimate is heuristic (an upper bound when found); only the
/// matricization lower bound is certified.
pub fn rank_estimate(
    a: &DenseTensor,
    max_rank: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
    fit_tol: f64,
) -> Result<RankEvidence> {
    let mut rows = Vec::with_capacity(max_rank);
    for rank in 1..=max_rank {
        let res = cp_als(
            a,
            AlsOptions {
                rank,
                restarts,
                iters,
                seed,
                fit_tol,
            },
        )?;
        rows.push(RankRow {
            rank,
            best_fit: res.best.fit,
            best_restart: res.best.restart,
            hits: res.fits.iter().filter(|&&f| f <= fit_tol).count(),
        });
    }
    let estimate = rows.iter().find(|r| r.best_fit <= fit_tol).map(|r| r.rank);
    Ok(RankEvidence {
        rows,
        lower_bound: matricization_lower_bound(a, LOWER_BOUND_TOL),
        estimate,
        fit_tol,
        restarts,
        seed,
    })
}

/// `‖A − model‖ / ‖A‖` (the absolute residual when `A = 0`).
pub fn relative_fit(a: &DenseTensor, model: &CpModel) -> Result<f64> {
    let r = frobenius_norm(&sub(a, &model.reconstruct()?)?);
    let n = frobenius_norm(a);
    Ok(if n > 0.0 { r / n } else { r })
}
