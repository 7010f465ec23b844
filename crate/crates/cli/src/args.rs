use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use htensor::NormalizationMode;

/// Dense hypercubic tensor toolkit.
///
/// Tensor files are text (`.ht`) or binary (`.htb`); the output format
/// follows the `-o` extension and inputs are detected from their content.
/// Vector lists are read from order-1 files (one vector each) or order-2
/// files (one vector per row).
#[derive(Debug, Parser)]
#[command(name = "htensor", version)]
pub struct Cli {
    /// Accept NaN and infinite entries when reading tensor files.
    #[arg(long, global = true)]
    pub allow_non_finite: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a tensor.
    #[command(subcommand)]
    Make(Make),
    /// Multiply tensors.
    #[command(subcommand)]
    Product(Product),
    /// Invert an even-order tensor under the half-order contraction.
    Invert(Invert),
    /// Determinant of the normal unfolding of an even-order tensor.
    Det(Input),
    /// Write the normal unfolding (NS matrix) of an even-order tensor.
    Unfold(InputOutput),
    /// Test a tensor for a symmetry.
    #[command(subcommand)]
    Classify(Classify),
    /// Try to write a tensor as a single wedge.
    #[command(subcommand)]
    Decompose(Decompose),
    /// H-eigenpair by shifted symmetric power iteration.
    Eig(Eig),
    /// Sampling probe of the sign of the associated polynomial.
    Probe(Probe),
    /// CP rank evidence and permuted-family ranks.
    #[command(subcommand)]
    Rank(Rank),
    /// Dimension of the subspace fixed by a mode permutation.
    SubspaceDim(SubspaceDim),
    /// Re-encode a tensor file (format from the output extension).
    Convert(InputOutput),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; `.htb` writes binary, anything else text.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct Input {
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputOutput {
    pub input: PathBuf,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct Norm {
    /// Normalization of the (anti)symmetrizer: unit, sqrt-factorial or projector.
    #[arg(long, default_value = "unit")]
    pub norm: NormalizationMode,
}

#[derive(Debug, Subcommand)]
pub enum Make {
    /// Order-2k identity tensor.
    Identity {
        #[arg(long)]
        half_order: usize,
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Zero tensor of the given extents.
    Zero {
        /// Extents, comma separated, e.g. `2,3,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Standard separable antisymmetric tensor Q_n.
    Sas {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Antisymmetrized outer product of the input vectors.
    Wedge(VectorsNorm),
    /// Symmetrized outer product of the input vectors.
    Vee(VectorsNorm),
    /// Plain outer product of the input vectors.
    FromVectors(Vectors),
}

#[derive(Debug, Args)]
pub struct Vectors {
    #[arg(required = true)]
    pub vectors: Vec<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct VectorsNorm {
    #[command(flatten)]
    pub vectors: Vectors,
    #[command(flatten)]
    pub norm: Norm,
}

#[derive(Debug, Args)]
pub struct Pair {
    pub a: PathBuf,
    pub b: PathBuf,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Subcommand)]
pub enum Product {
    /// Outer product.
    Outer(Pair),
    /// k-mode product with a matrix or vector file.
    Mode {
        #[command(flatten)]
        pair: Pair,
        /// Mode of A (1-based).
        #[arg(long)]
        mode: usize,
    },
    /// t-product of third-order tensors.
    T {
        #[command(flatten)]
        pair: Pair,
        /// Drop out-of-range third indices instead of wrapping them.
        #[arg(long)]
        literal: bool,
    },
    /// General contraction over explicit mode pairs.
    S {
        #[command(flatten)]
        pair: Pair,
        /// Contracted pairs `a:b` of 1-based modes, comma separated; empty for the outer product.
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        /// Output slot of each surviving mode (A's then B's), comma separated.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Contract the last k modes of A with the first k modes of B.
    Contract {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        k: usize,
    },
    /// Bowtie product of a tensor with a vector.
    Bowtie {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        norm: Norm,
        /// Alternate the sign of the insertion slots.
        #[arg(long)]
        signed: bool,
    },
}

#[derive(Debug, Args)]
pub struct Invert {
    #[command(flatten)]
    pub io: InputOutput,
    /// Relative pivot threshold.
    #[arg(long, default_value_t = htensor::inversion::DEFAULT_PIVOT_TOL)]
    pub pivot_tol: f64,
}

#[derive(Debug, Args)]
pub struct Tol {
    /// Absolute tolerance on entry differences.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Classify {
    /// Invariance under every mode permutation.
    Symmetric {
        input: PathBuf,
        #[command(flatten)]
        tol: Tol,
    },
    /// Sign change under every odd mode permutation.
    Antisymmetric {
        input: PathBuf,
        #[command(flatten)]
        tol: Tol,
    },
    /// Invariance (optionally up to sign) under one permutation.
    Sigma {
        input: PathBuf,
        /// Cycle notation like `(2341)` or one-line notation like `2341`.
        #[arg(long)]
        perm: String,
        /// Require A = sign(σ)·σ(A) instead of A = σ(A).
        #[arg(long)]
        signed: bool,
        #[command(flatten)]
        tol: Tol,
    },
}

#[derive(Debug, Subcommand)]
pub enum Decompose {
    /// Separability of an antisymmetric tensor; writes the vectors when found.
    Sas {
        input: PathBuf,
        /// Relative reconstruction tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Where to write the witness vectors (one per row).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Separability of an antisymmetric matrix via its rank.
    AntisymMatrix {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct Eig {
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Where to write the eigenvector.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Probe {
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Rank {
    /// ALS fits for every trial rank up to --max-rank.
    Estimate {
        input: PathBuf,
        #[arg(long)]
        max_rank: usize,
        #[arg(long)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        fit_tol: f64,
        /// Where to write the evidence table.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Rank of all mode-reordered outer products of the input vectors.
    Family {
        #[arg(required = true)]
        vectors: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct SubspaceDim {
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub dim: usize,
    /// Cycle notation like `(2341)` or one-line notation like `2341`.
    #[arg(long)]
    pub perm: String,
    /// Count the sign-twisted subspace.
    #[arg(long)]
    pub signed: bool,
}
