mod args;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use args::{Classify, Cli, Command, Decompose, Make, Pair, Product, Rank};
use clap::Parser;
use htensor::cp::rank_estimate;
use htensor::inversion::{invert, ns_det, normal_unfold, pivot_report};
use htensor::io::{decode_auto, encode_bin, encode_text, format_entry, DecodeOptions};
use htensor::permtensor::permuted_family_rank;
use htensor::products::{
    bowtie, contract_k, mode_product, outer_chain, outer_product, s_product, t_product,
    ContractionSpec,
};
use htensor::spectra::{definiteness_probe, sshopm, EigOptions, Verdict};
use htensor::symmetry::{
    antisym_matrix_separability, exhaustive_check, fixed_subspace_dim, is_sigma_symmetric,
    is_sign_symmetric, sas_decompose, standard_sas, vee, wedge, SasVerdict,
};
use htensor::tensor::{identity_tensor, DenseTensor};
use htensor::{Permutation, TensorError};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

/// Tags a library error with what was being processed and picks the exit
/// code from its kind.
fn fail(context: impl Display) -> impl FnOnce(TensorError) -> Failure {
    move |e| {
        let code = match e {
            TensorError::MalformedHeader(_)
            | TensorError::EntryCountMismatch { .. }
            | TensorError::NonFinite(_)
            | TensorError::InvalidEntry(_)
            | TensorError::DataLength { .. } => EXIT_INPUT,
            TensorError::Singular { .. } | TensorError::NoConvergence(_) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: format!("{context}: {e}"),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    decode: DecodeOptions,
}

impl Ctx {
    fn read(&self, path: &Path) -> Result<DenseTensor, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })?;
        decode_auto(&bytes, self.decode).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })
    }

    fn read_vectors(&self, paths: &[PathBuf]) -> Result<Vec<Vec<f64>>, Failure> {
        let mut out = Vec::new();
        for p in paths {
            let t = self.read(p)?;
            match t.order() {
                1 => out.push(t.into_data()),
                2 => {
                    let n = t.shape()[1];
                    out.extend(t.data().chunks(n).map(<[f64]>::to_vec));
                }
                m => {
                    return Err(Failure::usage(format!(
                        "{}: vector files must have order 1 or 2, got {m}",
                        p.display()
                    )))
                }
            }
        }
        Ok(out)
    }
}

fn write(path: &Path, t: &DenseTensor) -> Outcome {
    let bytes = if path.extension().is_some_and(|e| e == "htb") {
        encode_bin(t)
    } else {
        encode_text(t).into_bytes()
    };
    fs::write(path, bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    println!("wrote {}: {}", path.display(), describe(t));
    Ok(())
}

fn describe(t: &DenseTensor) -> String {
    let dims: Vec<String> = t.shape().iter().map(usize::to_string).collect();
    format!("order {}, dims {}", t.order(), dims.join(" "))
}

fn parse_perm(s: &str, m: usize) -> Result<Permutation, Failure> {
    let p = if s.trim_start().starts_with('(') {
        Permutation::parse_cycles(m, s)
    } else {
        Permutation::parse_images(s)
    }
    .map_err(fail(format!("--perm {s}")))?;
    if p.len() != m {
        return Err(Failure::usage(format!(
            "--perm {s}: permutation on {} points for order {m}",
            p.len()
        )));
    }
    Ok(p)
}

fn parse_pairs(items: &[String]) -> Result<Vec<(usize, usize)>, Failure> {
    items
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let bad = || Failure::usage(format!("--pairs: cannot parse {s:?}, expected a:b"));
            let (a, b) = s.split_once(':').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn run_make(ctx: &Ctx, cmd: Make) -> Outcome {
    let (t, out) = match cmd {
        Make::Identity { half_order, dim, out } => (
            identity_tensor(half_order, dim).map_err(fail("make identity: --half-order/--dim"))?,
            out,
        ),
        Make::Zero { dims, out } => (DenseTensor::zeros(&dims).map_err(fail("make zero: --dims"))?, out),
        Make::Sas { dim, out } => (standard_sas(dim).map_err(fail("make sas: --dim"))?, out),
        Make::Wedge(v) => {
            let vs = ctx.read_vectors(&v.vectors.vectors)?;
            (wedge(&vs, v.norm.norm).map_err(fail("make wedge"))?, v.vectors.out)
        }
        Make::Vee(v) => {
            let vs = ctx.read_vectors(&v.vectors.vectors)?;
            (vee(&vs, v.norm.norm).map_err(fail("make vee"))?, v.vectors.out)
        }
        Make::FromVectors(v) => {
            let vs = ctx.read_vectors(&v.vectors)?;
            (outer_chain(&vs).map_err(fail("make from-vectors"))?, v.out)
        }
    };
    write(&out.output, &t)
}

fn run_product(ctx: &Ctx, cmd: Product) -> Outcome {
    let load = |p: &Pair| -> Result<(DenseTensor, DenseTensor), Failure> { Ok((ctx.read(&p.a)?, ctx.read(&p.b)?)) };
    let names = |p: &Pair| format!("{} {}", p.a.display(), p.b.display());
    let (t, pair) = match cmd {
        Product::Outer(p) => {
            let (a, b) = load(&p)?;
            (outer_product(&a, &b), p)
        }
        Product::Mode { pair, mode } => {
            let (a, m) = load(&pair)?;
            (mode_product(&a, &m, mode).map_err(fail(format!("product mode --mode {mode} {}", names(&pair))))?, pair)
        }
        Product::T { pair, literal } => {
            let (a, b) = load(&pair)?;
            (t_product(&a, &b, !literal).map_err(fail(format!("product t {}", names(&pair))))?, pair)
        }
        Product::S { pair, pairs, order } => {
            let (a, b) = load(&pair)?;
            let mut spec = ContractionSpec::new(parse_pairs(&pairs)?);
            if let Some(o) = order {
                spec = spec.with_output_order(o);
            }
            (s_product(&a, &b, &spec).map_err(fail(format!("product s --pairs/--order {}", names(&pair))))?, pair)
        }
        Product::Contract { pair, k } => {
            let (a, b) = load(&pair)?;
            (contract_k(&a, &b, k).map_err(fail(format!("product contract --k {k} {}", names(&pair))))?, pair)
        }
        Product::Bowtie { pair, norm, signed } => {
            let (a, u) = load(&pair)?;
            if u.order() != 1 {
                return Err(Failure::usage(format!("product bowtie: {} must be a vector", pair.b.display())));
            }
            (bowtie(&a, u.data(), signed, norm.norm).map_err(fail(format!("product bowtie {}", names(&pair))))?, pair)
        }
    };
    write(&pair.out.output, &t)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run_classify(ctx: &Ctx, cmd: Classify) -> Outcome {
    let (input, check, label) = match cmd {
        Classify::Symmetric { input, tol } => {
            let a = ctx.read(&input)?;
            let c = exhaustive_check(&a, false, tol.tol).map_err(fail(input.display()))?;
            (input, c, "symmetric".to_string())
        }
        Classify::Antisymmetric { input, tol } => {
            let a = ctx.read(&input)?;
            let c = exhaustive_check(&a, true, tol.tol).map_err(fail(input.display()))?;
            (input, c, "antisymmetric".to_string())
        }
        Classify::Sigma { input, perm, signed, tol } => {
            let a = ctx.read(&input)?;
            let sigma = parse_perm(&perm, a.order())?;
            let c = if signed {
                is_sign_symmetric(&a, &sigma, tol.tol)
            } else {
                is_sigma_symmetric(&a, &sigma, tol.tol)
            }
            .map_err(fail(input.display()))?;
            let kind = if signed { "sign-symmetric" } else { "symmetric" };
            (input, c, format!("{kind} under {sigma}"))
        }
    };
    println!("{}: {label}: {}", input.display(), yes_no(check.holds));
    println!("max violation: {}", format_entry(check.max_violation));
    if let (false, Some(w)) = (check.holds, &check.worst) {
        println!("worst permutation: {w}");
    }
    Ok(())
}

fn run_decompose(ctx: &Ctx, cmd: Decompose) -> Outcome {
    match cmd {
        Decompose::Sas { input, tol, output } => {
            let a = ctx.read(&input)?;
            let verdict = sas_decompose(&a, tol).map_err(fail(input.display()))?;
            println!("{}: separable: {}", input.display(), yes_no(verdict.is_separable()));
            println!("residual: {}", format_entry(verdict.residual()));
            if let SasVerdict::Separable { witness, .. } = &verdict {
                println!(
                    "scale: {} ({} normalization)",
                    format_entry(witness.scale),
                    witness.normalization.name()
                );
                if let Some(path) = output {
                    let t = DenseTensor::matrix(&witness.vectors).map_err(fail("witness"))?;
                    write(&path, &t)?;
                }
            }
        }
        Decompose::AntisymMatrix { input, tol } => {
            let a = ctx.read(&input)?;
            let s = antisym_matrix_separability(&a, tol).map_err(fail(input.display()))?;
            println!("{}: separable: {}", input.display(), yes_no(s.separable));
            println!("rank: {}", s.rank);
        }
    }
    Ok(())
}

fn run_rank(ctx: &Ctx, cmd: Rank) -> Outcome {
    match cmd {
        Rank::Estimate { input, max_rank, restarts, seed, iters, fit_tol, output } => {
            if max_rank == 0 || restarts == 0 {
                return Err(Failure::usage("--max-rank and --restarts must be at least 1"));
            }
            let a = ctx.read(&input)?;
            let ev = rank_estimate(&a, max_rank, restarts, iters, seed, fit_tol).map_err(fail(input.display()))?;
            let mut table = String::new();
            table.push_str(&format!(
                "# ALS rank evidence for {} (seed {seed}, {restarts} restarts, {iters} sweeps, fit_tol {})\n",
                input.display(),
                format_entry(fit_tol)
            ));
            table.push_str("R best_fit best_restart hits\n");
            for r in &ev.rows {
                table.push_str(&format!(
                    "{} {:.6e} {} {}\n",
                    r.rank, r.best_fit, r.best_restart, r.hits
                ));
            }
            table.push_str(&format!("lower_bound {}\n", ev.lower_bound));
            match ev.estimate {
                Some(r) => table.push_str(&format!("estimate {r}\n")),
                None => table.push_str("estimate none\n"),
            }
            print!("{table}");
            if let Some(path) = output {
                fs::write(&path, &table).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
        }
        Rank::Family { vectors, tol } => {
            let vs = ctx.read_vectors(&vectors)?;
            let rank = permuted_family_rank(&vs, tol).map_err(fail("rank family"))?;
            let full: usize = (1..=vs.len()).product();
            println!("family rank: {rank} of {full}");
            println!("independent: {}", yes_no(rank == full));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        decode: DecodeOptions {
            allow_non_finite: cli.allow_non_finite,
        },
    };
    match cli.command {
        Command::Make(m) => run_make(&ctx, m),
        Command::Product(p) => run_product(&ctx, p),
        Command::Invert(args) => {
            let a = ctx.read(&args.io.input)?;
            let inv = invert(&a, args.pivot_tol).map_err(fail(format!("invert {}", args.io.input.display())))?;
            write(&args.io.out.output, &inv)
        }
        Command::Det(args) => {
            let a = ctx.read(&args.input)?;
            let ctx_name = format!("det {}", args.input.display());
            let d = ns_det(&a).map_err(fail(&ctx_name))?;
            let p = pivot_report(&a).map_err(fail(&ctx_name))?;
            println!("det: {}", format_entry(d));
            println!("min pivot / max entry: {}", format_entry(p.ratio));
            Ok(())
        }
        Command::Unfold(args) => {
            let a = ctx.read(&args.input)?;
            let ns = normal_unfold(&a).map_err(fail(format!("unfold {}", args.input.display())))?;
            let side = ns.side();
            let t = DenseTensor::new(vec![side, side], ns.into_matrix().into_data()).map_err(fail("unfold"))?;
            write(&args.out.output, &t)
        }
        Command::Classify(c) => run_classify(&ctx, c),
        Command::Decompose(d) => run_decompose(&ctx, d),
        Command::Eig(args) => {
            let a = ctx.read(&args.input)?;
            let opts = EigOptions {
                shift: args.shift,
                seed: args.seed,
                max_iter: args.max_iter,
                tol: args.tol,
            };
            let pair = sshopm(&a, opts).map_err(fail(format!("eig {}", args.input.display())))?;
            println!("lambda: {}", format_entry(pair.lambda));
            println!("residual: {}", format_entry(pair.residual));
            println!("iterations: {}", pair.iterations);
            println!("converged: {}", yes_no(pair.converged));
            let u: Vec<String> = pair.u.iter().map(|&x| format_entry(x)).collect();
            println!("u: {}", u.join(" "));
            if let Some(path) = args.output {
                write(&path, &DenseTensor::vector(&pair.u).map_err(fail("eig"))?)?;
            }
            if !pair.converged {
                return Err(Failure {
                    code: EXIT_NUMERIC,
                    message: format!(
                        "eig {}: no convergence after {} iterations (residual {})",
                        args.input.display(),
                        pair.iterations,
                        format_entry(pair.residual)
                    ),
                });
            }
            Ok(())
        }
        Command::Probe(args) => {
            let a = ctx.read(&args.input)?;
            let rep = definiteness_probe(&a, args.samples, args.seed)
                .map_err(fail(format!("probe {}", args.input.display())))?;
            println!("verdict: {}", rep.verdict.label());
            println!("points evaluated: {}", rep.samples);
            let show = |name: &str, x: &[f64], f: f64| {
                let xs: Vec<String> = x.iter().map(|&v| format_entry(v)).collect();
                println!("{name}: f = {} at x = {}", format_entry(f), xs.join(" "));
            };
            if let Verdict::Indefinite { positive, negative } = &rep.verdict {
                show("positive witness", &positive.x, positive.f);
                show("negative witness", &negative.x, negative.f);
            } else if let [lo, hi] = rep.witnesses.as_slice() {
                show("min", &lo.x, lo.f);
                show("max", &hi.x, hi.f);
            }
            Ok(())
        }
        Command::Rank(r) => run_rank(&ctx, r),
        Command::SubspaceDim(args) => {
            let sigma = parse_perm(&args.perm, args.order)?;
            let d = fixed_subspace_dim(args.order, args.dim, &sigma, args.signed)
                .map_err(fail("subspace-dim"))?;
            println!("{d}");
            Ok(())
        }
        Command::Convert(args) => {
            let a = ctx.read(&args.input)?;
            write(&args.out.output, &a)
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(v) = std::env::var("HTENSOR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("HTENSOR_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("HTENSOR_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
