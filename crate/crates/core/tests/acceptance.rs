//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//!
//! Runs without the libtest harness so every line reaches stdout. The
//! process fails when a criterion fails, except for criteria listed in
//! `KNOWN_UNATTAINABLE`, whose failure is expected and reported as such.
//! A known-unattainable criterion that starts passing also fails the run,
//! so the list cannot go stale silently.

use std::time::{Duration, Instant};

use htensor::cp::{matricization_lower_bound, rank_estimate, LOWER_BOUND_TOL};
use htensor::inversion::{invert, inverse_residuals, normal_unfold, pivot_report, DEFAULT_PIVOT_TOL};
use htensor::io::{decode_bin, decode_text, encode_bin, encode_text, DecodeOptions};
use htensor::linalg::{self, Matrix};
use htensor::permtensor::{
    apply_permutation_tensor, commutation_tensor, permutation_family_rank, permuted_family_rank,
    ApplyPath,
};
use htensor::products::{bowtie, contract_k, mode_product, outer_product};
use htensor::spectra::{definiteness_probe, poly_eval, Verdict};
use htensor::symmetry::{
    fixed_subspace_dim, gram_inner_identities, is_antisymmetric, permanent, sas_decompose,
    standard_sas, vee, wedge, wedge_norm,
};
use htensor::tensor::{
    add, frobenius_norm, identity_tensor, max_abs_diff, scale, DenseTensor, NormalizationMode,
};
use htensor::{Permutation, TensorError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose stated outcome contradicts the mathematics; see the
/// notes printed next to them.
const KNOWN_UNATTAINABLE: &[u32] = &[11];

const GOLDEN_Q3: &str = include_str!("golden/q3_rank_evidence.txt");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

fn rand_vecs(r: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| rand_vec(r, n)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn c01_identity_law() -> Outcome {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for k in 1..=2 {
        for n in 2..=3 {
            let id = identity_tensor(k, n).unwrap();
            for _ in 0..50 {
                let a = DenseTensor::random(&vec![n; 2 * k], &mut r).unwrap();
                worst = worst.max(max_abs_diff(&contract_k(&a, &id, k).unwrap(), &a).unwrap());
                worst = worst.max(max_abs_diff(&contract_k(&id, &a, k).unwrap(), &a).unwrap());
            }
        }
    }
    outcome(worst == 0.0, format!("max |A·I − A|, |I·A − A| = {worst:e}"))
}

fn c02_ns_homomorphism_inversion() -> Outcome {
    let mut r = rng(102);
    let (k, n) = (2, 3);
    let id = identity_tensor(k, n).unwrap();
    let (mut hom, mut inv, mut two) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = add(&DenseTensor::random(&[n; 4], &mut r).unwrap(), &scale(&id, 3.0)).unwrap();
        let b = DenseTensor::random(&[n; 4], &mut r).unwrap();
        let lhs = normal_unfold(&contract_k(&a, &b, k).unwrap()).unwrap();
        let rhs = normal_unfold(&a).unwrap().matrix().matmul(normal_unfold(&b).unwrap().matrix()).unwrap();
        hom = hom.max(lhs.matrix().max_abs_diff(&rhs));
        let ai = invert(&a, DEFAULT_PIVOT_TOL).unwrap();
        let (ab, ba) = inverse_residuals(&a, &ai).unwrap();
        inv = inv.max(ab);
        two = two.max(ba);
    }
    outcome(
        hom <= 1e-10 && inv <= 1e-8 && two <= 1e-6,
        format!("homomorphism {hom:e}, A·A⁻¹ − I {inv:e}, A⁻¹·A − I {two:e}"),
    )
}

fn c03_gram_identities() -> Outcome {
    let mut r = rng(103);
    let (mut det_err, mut perm_err, mut ryser) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..100 {
        let m = 1 + case % 4;
        let n = m + (case / 4) % (6 - m);
        let u = rand_vecs(&mut r, m, n);
        let v = rand_vecs(&mut r, m, n);
        let g = gram_inner_identities(&u, &v, NormalizationMode::SqrtFactorial).unwrap();
        det_err = det_err.max(rel(g.lhs_det, g.scale * g.rhs_det));
        perm_err = perm_err.max(rel(g.lhs_perm, g.scale * g.rhs_perm));
        if m <= 3 {
            let gram = Matrix::from_fn(m, m, |i, j| u[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum());
            let naive: f64 = Permutation::all(m)
                .iter()
                .map(|s| (1..=m).map(|i| gram[(i - 1, s.apply(i) - 1)]).product::<f64>())
                .sum();
            ryser = ryser.max(rel(permanent(&gram).unwrap(), naive));
        }
    }
    outcome(
        det_err <= 1e-10 && perm_err <= 1e-10 && ryser <= 1e-10,
        format!("det {det_err:e}, perm {perm_err:e}, Ryser vs naive {ryser:e}"),
    )
}

fn c04_wedge_norm() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let m = 1 + case % 4;
        let n = m + case % 3;
        let u = rand_vecs(&mut r, m, n);
        let w = wedge(&u, NormalizationMode::SqrtFactorial).unwrap();
        worst = worst.max(rel(frobenius_norm(&w), wedge_norm(&u).unwrap()));
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:e}"))
}

fn c05_wedge_vanishing_multilinear_antisymmetric() -> Outcome {
    let mut r = rng(105);
    let norm = NormalizationMode::Projector;
    let (mut dep, mut indep_min, mut lin, mut anti) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    for case in 0..60 {
        let m = 2 + case % 3;
        let n = m + case % 2;
        let mut u = rand_vecs(&mut r, m, n);
        indep_min = indep_min.min(wedge(&u, norm).unwrap().max_abs());

        let w = wedge(&u, norm).unwrap();
        let c = is_antisymmetric(&w, f64::INFINITY).unwrap();
        anti = anti.max(c.max_violation / w.max_abs());

        let j = case % m;
        let extra = rand_vec(&mut r, n);
        let lam: f64 = r.gen_range(-2.0..2.0);
        let mut sum = u.clone();
        sum[j] = u[j].iter().zip(&extra).map(|(a, b)| a + b).collect();
        let mut other = u.clone();
        other[j] = extra;
        let split = add(&w, &wedge(&other, norm).unwrap()).unwrap();
        lin = lin.max(max_abs_diff(&wedge(&sum, norm).unwrap(), &split).unwrap());
        let mut scaled = u.clone();
        scaled[j] = u[j].iter().map(|x| lam * x).collect();
        lin = lin.max(max_abs_diff(&wedge(&scaled, norm).unwrap(), &scale(&w, lam)).unwrap());

        let a: f64 = r.gen_range(-1.0..1.0);
        let b: f64 = r.gen_range(-1.0..1.0);
        // a combination of the other vectors
        u[m - 1] = if m == 2 {
            u[0].iter().map(|x| a * x).collect()
        } else {
            u[0].iter().zip(&u[1]).map(|(x, y)| a * x + b * y).collect()
        };
        dep = dep.max(wedge(&u, norm).unwrap().max_abs());
    }
    outcome(
        dep <= 1e-12 && indep_min > 1e-12 && lin <= 1e-12 && anti <= 1e-14,
        format!(
            "dependent max {dep:e}, independent min {indep_min:e}, multilinearity {lin:e}, antisymmetry {anti:e}"
        ),
    )
}

fn c06_signed_bowtie() -> Outcome {
    let mut r = rng(106);
    let norm = NormalizationMode::Projector;
    let mut worst = 0.0f64;
    for m in 2..=4 {
        for n in 2..=4 {
            let u = rand_vecs(&mut r, m, n);
            let mut acc = DenseTensor::vector(&u[0]).unwrap();
            for v in &u[1..] {
                acc = bowtie(&acc, v, true, norm).unwrap();
            }
            worst = worst.max(max_abs_diff(&acc, &wedge(&u, norm).unwrap()).unwrap());
        }
    }
    outcome(worst <= 1e-12, format!("max |bowtie chain − wedge| = {worst:e}"))
}

fn c07_q3_scaling_and_decomposition() -> Outcome {
    let mut r = rng(107);
    let q = standard_sas(3).unwrap();
    let (mut ident, mut resid, mut all_sep) = (0.0f64, 0.0f64, true);
    for _ in 0..20 {
        let rows = rand_vecs(&mut r, 3, 3);
        let mt = DenseTensor::matrix(&rows).unwrap();
        let mut t = q.clone();
        for k in 1..=3 {
            t = mode_product(&t, &mt, k).unwrap();
        }
        let d = linalg::det(&Matrix::new(3, 3, rows.concat()).unwrap()).unwrap();
        ident = ident.max(max_abs_diff(&t, &scale(&q, d)).unwrap());

        let verdict = sas_decompose(&t, 1e-10).unwrap();
        all_sep &= verdict.is_separable();
        resid = resid.max(verdict.residual() / t.max_abs().max(1.0));
    }
    outcome(
        ident <= 1e-10 && all_sep && resid <= 1e-12,
        format!("max |Q3×M − det(M)Q3| = {ident:e}, all separable {all_sep}, residual {resid:e}"),
    )
}

fn c08_separable_symmetric_singular() -> Outcome {
    let mut r = rng(108);
    let mut worst = 0.0f64;
    let mut all_singular = true;
    for case in 0..20 {
        let (m, n) = if case % 2 == 0 { (2, 3) } else { (4, 5) };
        let a = vee(&rand_vecs(&mut r, m, n), NormalizationMode::Projector).unwrap();
        let p = pivot_report(&a).unwrap();
        worst = worst.max(p.ratio);
        all_singular &= matches!(invert(&a, DEFAULT_PIVOT_TOL), Err(TensorError::Singular { .. }));
    }
    outcome(
        worst < 1e-12 && all_singular,
        format!("max min-pivot / scale = {worst:e}, all Singular {all_singular}"),
    )
}

fn c09_fixed_subspace_dims() -> Outcome {
    let sigma = Permutation::parse_cycles(4, "(2341)").unwrap();
    let beta = Permutation::parse_cycles(4, "(12)").unwrap();
    let d1 = fixed_subspace_dim(4, 2, &sigma, false).unwrap();
    let d2 = fixed_subspace_dim(4, 2, &beta, true).unwrap();
    outcome(d1 == 6 && d2 == 4, format!("dim Ψ_σ = {d1}, dim Ψ_β (signed) = {d2}"))
}

fn c10_permutation_tensors() -> Outcome {
    let mut r = rng(110);
    let mut paths_equal = true;
    for _ in 0..20 {
        for n in 1..=3 {
            let vs = rand_vecs(&mut r, 3, n);
            for s in Permutation::all(3) {
                let a = apply_permutation_tensor(&s, &vs, ApplyPath::Materialized).unwrap();
                let b = apply_permutation_tensor(&s, &vs, ApplyPath::Reorder).unwrap();
                paths_equal &= a == b;
            }
        }
    }
    let (p, q) = (2, 3);
    let x = rand_vec(&mut r, q);
    let y = rand_vec(&mut r, p);
    let xy = outer_product(&DenseTensor::vector(&x).unwrap(), &DenseTensor::vector(&y).unwrap());
    let yx = outer_product(&DenseTensor::vector(&y).unwrap(), &DenseTensor::vector(&x).unwrap());
    let swap = contract_k(&commutation_tensor(p, q).unwrap(), &xy, 2).unwrap() == yx;

    let mut ranks_ok = true;
    for m in 2..=3 {
        let full: usize = (1..=m).product();
        for n in 3..=4 {
            for _ in 0..5 {
                let mut vs = rand_vecs(&mut r, m, n);
                ranks_ok &= permuted_family_rank(&vs, 1e-10).unwrap() == full;
                let c: f64 = r.gen_range(-2.0..2.0);
                vs[m - 1] = vs[0].iter().map(|v| c * v).collect();
                ranks_ok &= permuted_family_rank(&vs, 1e-10).unwrap() < full;
            }
        }
        ranks_ok &= permutation_family_rank(m, 3, 1e-10).unwrap() == full;
    }
    outcome(
        paths_equal && swap && ranks_ok,
        format!("apply paths bitwise equal {paths_equal}, commutation swap {swap}, family ranks {ranks_ok}"),
    )
}

struct GoldenQ3 {
    seed: u64,
    restarts: usize,
    iters: usize,
    max_rank: usize,
    fit_tol: f64,
    table: Vec<(usize, usize, usize)>,
}

fn parse_golden(text: &str) -> GoldenQ3 {
    let mut g = GoldenQ3 {
        seed: 0,
        restarts: 0,
        iters: 0,
        max_rank: 0,
        fit_tol: 0.0,
        table: Vec::new(),
    };
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "seed" => g.seed = parts[1].parse().unwrap(),
            "restarts" => g.restarts = parts[1].parse().unwrap(),
            "iters" => g.iters = parts[1].parse().unwrap(),
            "max_rank" => g.max_rank = parts[1].parse().unwrap(),
            "fit_tol" => g.fit_tol = parts[1].parse().unwrap(),
            "row" => g.table.push((
                parts[1].parse().unwrap(),
                parts[2].parse().unwrap(),
                parts[3].parse().unwrap(),
            )),
            other => panic!("unknown golden key {other}"),
        }
    }
    g
}

fn c11_q3_rank_experiment() -> Outcome {
    let g = parse_golden(GOLDEN_Q3);
    let q = standard_sas(3).unwrap();
    let ev = rank_estimate(&q, g.max_rank, g.restarts, g.iters, g.seed, g.fit_tol).unwrap();
    for row in &ev.rows {
        println!(
            "      R={} best fit {:.3e} (restart {}), {} of {} restarts ≤ {:e}",
            row.rank, row.best_fit, row.best_restart, row.hits, g.restarts, g.fit_tol
        );
    }
    println!("      matricization lower bound {}", ev.lower_bound);
    let observed: Vec<(usize, usize, usize)> =
        ev.rows.iter().map(|r| (r.rank, r.best_restart, r.hits)).collect();
    let reproducible = observed == g.table;
    let r5 = ev.rows[4].best_fit;
    let r6 = ev.rows[5].best_fit;
    let lb = ev.lower_bound <= ev.estimate.unwrap_or(usize::MAX)
        && ev.lower_bound == matricization_lower_bound(&q, LOWER_BOUND_TOL);
    outcome(
        r6 <= 1e-6 && r5 > 1e-3 && reproducible && lb,
        format!(
            "R=6 best fit {r6:.3e} (need ≤ 1e-6), R=5 best fit {r5:.3e} (need > 1e-3), golden table reproduced {reproducible}; \
             R=5 reaches the fit tolerance, so Q3 has CP rank at most 5 and the R=5 half cannot hold"
        ),
    )
}

fn c12_definiteness_witnesses() -> Outcome {
    let mut r = rng(112);
    let mut all_found = true;
    for case in 0..20 {
        let ab = rand_vecs(&mut r, 2, 3);
        let a = vee(&ab, NormalizationMode::Projector).unwrap();
        let rep = definiteness_probe(&a, 200, 1000 + case).unwrap();
        match rep.verdict {
            Verdict::Indefinite { positive, negative } => {
                all_found &= poly_eval(&a, &positive.x).unwrap() > 0.0
                    && poly_eval(&a, &negative.x).unwrap() < 0.0;
            }
            _ => all_found = false,
        }
    }
    for m in [2, 4] {
        let basis: Vec<Vec<f64>> = (1..=m).map(|i| htensor::tensor::basis_vector(m, i)).collect();
        let random = rand_vecs(&mut r, m, m);
        for (name, vs) in [("basis", basis), ("random", random)] {
            let a = vee(&vs, NormalizationMode::Projector).unwrap();
            let rep = definiteness_probe(&a, 10_000, 7).unwrap();
            let (lo, hi) = (rep.witnesses[0].f, rep.witnesses[1].f);
            println!(
                "      conjecture probe m=n={m} ({name} vectors): {} (f range {lo:.3e} .. {hi:.3e})",
                rep.verdict.label()
            );
        }
    }
    outcome(all_found, format!("sign-opposite witnesses for all 20 cases {all_found}"))
}

fn c13_serialization() -> Outcome {
    let mut r = rng(113);
    let opts = DecodeOptions::default();
    let mut ok = true;
    for _ in 0..200 {
        let order = r.gen_range(1..=4);
        let shape: Vec<usize> = (0..order).map(|_| r.gen_range(1..=4)).collect();
        let mut t = DenseTensor::random(&shape, &mut r).unwrap();
        let e: i32 = r.gen_range(-300..300);
        t = t.map(|x| x * 10f64.powi(e));
        let bin = decode_bin(&encode_bin(&t), opts).unwrap();
        let txt = decode_text(encode_text(&t).as_bytes(), opts).unwrap();
        let bits = |u: &DenseTensor| u.data().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ok &= bin.shape() == t.shape() && bits(&bin) == bits(&t);
        ok &= txt.shape() == t.shape() && bits(&txt) == bits(&t);
    }
    let header = decode_text(b"htensor 1\norder 2\ndims 2\nlayout row-major\n1 2\n", opts);
    let count = decode_text(b"htensor 1\norder 1\ndims 3\nlayout row-major\n1 2\n", opts);
    let mut short = encode_bin(&DenseTensor::vector(&[1.0, 2.0]).unwrap());
    short.truncate(short.len() - 8);
    let trunc = decode_bin(&short, opts);
    let nan = decode_text(b"htensor 1\norder 1\ndims 1\nlayout row-major\nNaN\n", opts);
    let classes = matches!(header, Err(TensorError::MalformedHeader(_)))
        && matches!(count, Err(TensorError::EntryCountMismatch { .. }))
        && matches!(trunc, Err(TensorError::EntryCountMismatch { .. }))
        && matches!(nan, Err(TensorError::NonFinite(_)));
    outcome(ok && classes, format!("bitwise round-trips {ok}, malformed error classes {classes}"))
}

fn main() {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 13] = [
        (1, "identity law under contraction", Duration::from_secs(1), c01_identity_law),
        (2, "NS homomorphism and inversion", Duration::from_secs(5), c02_ns_homomorphism_inversion),
        (3, "Gram determinant and permanent identities", Duration::from_secs(10), c03_gram_identities),
        (4, "wedge norm equals sqrt det Gram", Duration::from_secs(2), c04_wedge_norm),
        (5, "wedge vanishing, multilinearity, antisymmetry", Duration::from_secs(5), c05_wedge_vanishing_multilinear_antisymmetric),
        (6, "signed bowtie chain builds the wedge", Duration::from_secs(2), c06_signed_bowtie),
        (7, "det(M) scaling of Q3 and SAS decomposition", Duration::from_secs(2), c07_q3_scaling_and_decomposition),
        (8, "separable symmetric tensors are singular", Duration::from_secs(2), c08_separable_symmetric_singular),
        (9, "fixed subspace dimensions", Duration::from_secs(1), c09_fixed_subspace_dims),
        (10, "permutation tensors and family ranks", Duration::from_secs(5), c10_permutation_tensors),
        (11, "Q3 rank-6 ALS experiment", Duration::from_secs(60), c11_q3_rank_experiment),
        (12, "definiteness witnesses and conjecture probe", Duration::from_secs(10), c12_definiteness_witnesses),
        (13, "serialization round-trips and error classes", Duration::from_secs(2), c13_serialization),
    ];

    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_budget = took <= budget;
        let pass = out.pass && in_budget;
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            _ => "FAIL",
        };
        println!(
            "criterion {id:>2} {tag}: {name} [{:.3}s / {}s budget] {}",
            took.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
        if pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcomes for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: all outcomes as expected");
}
