//! Release acceptance run: one PASS/FAIL line per criterion.
//!
//! Reference values come from routes that share no code with the pipeline
//! under test where that is possible: the uncompressed oracle, bisections
//! written here, closed-form arithmetic and stars-and-bars counts.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symext::bounds::{self, LogIndex, NormKind};
use symext::dps::{self, ExtensionSpec, Verdict, VerdictStatus};
use symext::linalg::{kron_all, min_eigenvalue, partial_trace, partial_transpose, trace_norm};
use symext::oracle::{uncompressed_extendibility, OracleVerdict};
use symext::sdp::{solve, BlockValue, Cone, SdpBuilder, SolverOptions, Status, Term};
use symext::states::{make_family, random_density, random_separable, random_unit_vector};
use symext::symmetric::sym_dim;
use symext::{CMatrix, Complex64, DensityMatrix, Family, FamilyParams};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

/// `F |Φ⟩⟨Φ| + (1 - F)(I - |Φ⟩⟨Φ|)/3` on two qubits, built from scratch.
fn isotropic(f: f64) -> DensityMatrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut m = CMatrix::from_real_diag(&[(1.0 - f) / 3.0; 4]);
    let phi = [0, 3];
    let shift = (f - (1.0 - f) / 3.0) / 2.0;
    for &i in &phi {
        for &j in &phi {
            m[(i, j)] += c(shift);
        }
    }
    DensityMatrix::new(vec![2, 2], m).unwrap()
}

/// Checks the witness against `samples` random product states as well as its own invariants.
fn witness_holds(v: &Verdict, samples: usize, seed: u64) -> Result<(), String> {
    let w = v.witness.as_ref().ok_or("no witness attached")?;
    ensure(w.value_on_state < 0.0, || format!("tr(W rho) = {}", w.value_on_state))?;
    ensure(w.lifted_min_eig >= -1e-7, || format!("lifted min eig {}", w.lifted_min_eig))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let parts: Vec<CMatrix> = w
            .dims
            .iter()
            .map(|&d| CMatrix::projector(&random_unit_vector(&mut rng, d)))
            .collect();
        let sigma = kron_all(parts.iter());
        let val = w.operator.trace_product_re(&sigma);
        ensure(val >= -1e-7, || format!("tr(W sigma) = {val} on a product state"))?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let bell = make_family(Family::Bell, &FamilyParams::default()).map_err(|e| e.to_string())?;
    let spec = ExtensionSpec::new(vec![2, 1]);
    let reference = uncompressed_extendibility(&bell, &spec).map_err(|e| e.to_string())?;
    ensure(reference.verdict == OracleVerdict::NotExtendible, || "oracle finds an extension".into())?;
    ensure((reference.margin - 1.0 / 3.0).abs() <= 0.02, || format!("oracle lambda {}", reference.margin))?;

    let start = Instant::now();
    let v = dps::check_extendible(&bell, &spec).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(v.status == VerdictStatus::NotExtendible, || format!("verdict {}", v.status))?;
    ensure((v.lambda_star - 1.0 / 3.0).abs() <= 0.02, || format!("lambda {}", v.lambda_star))?;
    ensure((v.lambda_star - reference.margin).abs() <= 0.02, || "disagrees with oracle".into())?;
    witness_holds(&v, 1000, 1)?;
    ensure(secs < 10.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "lambda = {:.6} (oracle {:.6}), {:.3}s",
        v.lambda_star, reference.margin, secs
    ))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for levels in [vec![2, 1], vec![3, 1]] {
        let spec = ExtensionSpec::new(levels.clone());
        for seed in 0..50 {
            let rho = random_density(&[2, 2], 20_000 + seed).map_err(|e| e.to_string())?;
            let a = dps::lambda_star(&rho, &spec).map_err(|e| e.to_string())?;
            let b = uncompressed_extendibility(&rho, &spec).map_err(|e| e.to_string())?.margin;
            worst = worst.max((a - b).abs());
            ensure((a - b).abs() <= 1e-5, || format!("levels {levels:?} seed {seed}: {a} vs {b}"))?;
        }
    }
    Ok(format!("max |difference| = {worst:.2e} over 100 solves"))
}

fn criterion_3() -> Outcome {
    let cases: [(&[usize], &[&[usize]]); 2] = [(&[2, 2], &[&[2, 1], &[3, 1]]), (&[2, 2, 2], &[&[2, 2, 1], &[3, 3, 1]])];
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for (dims, level_sets) in cases {
        for seed in 0..100 {
            let terms = 1 + (seed as usize % 6);
            let (rho, _) = random_separable(dims, terms, 30_000 + seed).map_err(|e| e.to_string())?;
            for levels in level_sets {
                let v = dps::check_extendible(&rho, &ExtensionSpec::new(levels.to_vec())).map_err(|e| e.to_string())?;
                solves += 1;
                worst = worst.max(v.lambda_star);
                ensure(v.status == VerdictStatus::Extendible && v.lambda_star <= 1e-5, || {
                    format!("dims {dims:?} levels {levels:?} seed {seed}: {} lambda {}", v.status, v.lambda_star)
                })?;
            }
        }
    }
    Ok(format!("{solves} solves, max lambda = {worst:.2e}"))
}

/// Bisection on `[0, 1]` against the uncompressed oracle.
fn oracle_threshold(k: usize, width: f64) -> Result<f64, String> {
    let spec = ExtensionSpec::new(vec![k, 1]);
    let extendible = |f: f64| -> Result<bool, String> {
        let r = uncompressed_extendibility(&isotropic(f), &spec).map_err(|e| e.to_string())?;
        Ok(r.margin <= spec.verdict_tol)
    };
    if extendible(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if extendible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn criterion_4() -> Outcome {
    let width = 1e-3;
    let mut thresholds = Vec::new();
    for k in 1..=4 {
        let spec = ExtensionSpec::new(vec![k, 1]);
        let t = dps::threshold_scan(Family::Isotropic, (0.0, 1.0), None, &spec, width).map_err(|e| e.to_string())?;
        let o = oracle_threshold(k, width)?;
        ensure((t.value - o).abs() <= 2e-3, || format!("k = {k}: {} vs oracle {o}", t.value))?;
        thresholds.push(t.value);
    }
    ensure(thresholds[0] == 1.0, || format!("F*(1) = {}", thresholds[0]))?;
    ensure(thresholds.windows(2).all(|w| w[1] <= w[0]), || format!("not monotone: {thresholds:?}"))?;
    let (g2, g4) = (thresholds[1] - 0.5, thresholds[3] - 0.5);
    ensure(g4 > 0.0 && g4 < g2, || format!("F*(4) - 1/2 = {g4}, F*(2) - 1/2 = {g2}"))?;
    Ok(format!("F*(1..4) = {thresholds:.4?}"))
}

fn criterion_5() -> Outcome {
    let tiles = make_family(Family::Tiles, &FamilyParams::default()).map_err(|e| e.to_string())?;
    let pt = partial_transpose(tiles.matrix(), &[3, 3], &[1]).map_err(|e| e.to_string())?;
    let pt_min = min_eigenvalue(&pt).map_err(|e| e.to_string())?;
    ensure(pt_min >= -1e-12, || format!("tiles PT min eigenvalue {pt_min}"))?;
    for k in 1..=3 {
        let spec = ExtensionSpec::new(vec![k, 1]).with_ppt("1:2".parse().unwrap());
        let v = dps::check_extendible(&tiles, &spec).map_err(|e| e.to_string())?;
        if v.status == VerdictStatus::NotExtendible {
            witness_holds(&v, 1000, 5)?;
            return Ok(format!(
                "PT min eig = {pt_min:.2e}; detected at level ({k},1), lambda = {:.6}",
                v.lambda_star
            ));
        }
    }
    Err("tiles state not detected at levels up to 3".into())
}

fn criterion_6() -> Outcome {
    let rel = 1e-12;
    let val = |r: symext::Result<bounds::BoundReport>| r.map(|b| b.value).map_err(|e| e.to_string());
    let c = 1.0 / (8.0 * std::f64::consts::LN_2);

    let delta = bounds::two_particle_delta(NormKind::Trace, Some(2), None, 8.0).map_err(|e| e.to_string())?;
    ensure(close(delta, 1.0, rel), || format!("trace delta {delta}"))?;
    let t1 = val(bounds::multiparty_bound_thm1(NormKind::Trace, &[2, 2], &[8, 1]))?;
    ensure(close(t1, 1.0, rel), || format!("trace (2,2) {t1}"))?;
    let t3 = val(bounds::multiparty_bound_thm1(NormKind::Trace, &[2, 2, 2], &[8, 8, 1]))?;
    ensure(close(t3, 2.0, rel), || format!("trace (2,2,2) {t3}"))?;

    let locc = val(bounds::multiparty_bound_thm2(NormKind::Locc, &[2, 16], &[4], LogIndex::Next))?;
    ensure(close(locc, c, rel), || format!("locc {locc}"))?;
    ensure((locc - 0.18034).abs() < 5e-6, || format!("locc {locc} vs 0.18034"))?;
    let frob = val(bounds::multiparty_bound_thm2(NormKind::Frobenius, &[2, 16], &[4], LogIndex::Next))?;
    ensure(close(frob, 153f64.sqrt() * c, rel), || format!("frobenius {frob}"))?;

    let df = bounds::definetti_bound(NormKind::Locc, 2, 1, 2, 2f64.powi(20)).map_err(|e| e.to_string())?;
    ensure(close(df, 1.03125, rel), || format!("de Finetti {df}"))?;

    let ells = bounds::ell_for_error(NormKind::Locc, &[2, 2], 2, 0.5).map_err(|e| e.to_string())?;
    ensure(ells == [1], || format!("ell schedule {ells:?}"))?;
    for eps in [0.1, 0.3, 1.0] {
        for dims in [&[2usize, 2][..], &[2, 3, 4], &[3, 3, 3, 3]] {
            let ells = bounds::ell_for_error(NormKind::Locc, dims, dims.len(), eps).map_err(|e| e.to_string())?;
            let b = val(bounds::multiparty_bound_thm2(NormKind::Locc, dims, &ells, LogIndex::Next))?;
            ensure(b <= eps, || format!("round trip eps {eps} dims {dims:?}: {b}"))?;
        }
    }
    Ok(format!("locc = {locc:.8}, frobenius = {frob:.8}, de Finetti = {df}"))
}

fn binomial(n: u128, r: u128) -> u128 {
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_7() -> Outcome {
    for d in 1..=6usize {
        for k in 0..=8usize {
            let expected = binomial((d + k - 1) as u128, k as u128);
            ensure(sym_dim(d, k) == expected, || format!("sym_dim({d}, {k}) = {}", sym_dim(d, k)))?;
        }
    }
    for d in 2..=6usize {
        for k in 1..=8usize {
            let dim = sym_dim(d, k) * d as u128;
            let formula = d as u128 * ((k + 1) as u128).pow(d as u32 - 1);
            let space = bounds::search_space(&[d, d], &[k as u128, 1]).map_err(|e| e.to_string())?;
            ensure(space.variable_dim == dim, || format!("search space d={d} k={k}"))?;
            if d == 2 {
                ensure(dim == formula, || format!("d=2 k={k}: {dim} != {formula}"))?;
            } else {
                ensure(dim <= formula, || format!("d={d} k={k}: {dim} > {formula}"))?;
            }
        }
    }
    Ok("d <= 6, k <= 8".into())
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &g * g.transpose() + DMatrix::identity(n, n) * 0.1
}

fn sym_terms(m: &DMatrix<f64>) -> Vec<Term> {
    let n = m.nrows();
    (0..n).flat_map(|i| (i..n).map(move |j| Term::new(0, i, j, m[(i, j)]))).collect()
}

fn criterion_8() -> Outcome {
    let opts = SolverOptions::default();

    let mut b = SdpBuilder::new(vec![Cone::Psd(2)]).map_err(|e| e.to_string())?;
    b.add_objective([Term::new(0, 0, 0, 1.0), Term::new(0, 1, 1, 1.0)]);
    b.add_constraint([Term::new(0, 0, 0, 1.0)], 1.0);
    let sol = solve(&b.build(), &opts);
    ensure(sol.status == Status::Optimal, || format!("trace example {:?}", sol.status))?;
    let BlockValue::Psd(x) = &sol.primal[0] else { return Err("wrong block".into()) };
    let e1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    ensure((x - e1).abs().max() <= 1e-6, || format!("X = {x}"))?;

    let mut b = SdpBuilder::new(vec![Cone::Psd(3)]).map_err(|e| e.to_string())?;
    b.add_constraint((0..3).map(|i| Term::new(0, i, i, 1.0)), -1.0);
    let p = b.build();
    let sol = solve(&p, &opts);
    ensure(sol.status == Status::PrimalInfeasible, || format!("infeasible example {:?}", sol.status))?;
    let (by, viol) = p.farkas_primal(&sol.dual);
    ensure(by > 0.0 && viol <= 1e-8, || format!("certificate b.y = {by}, violation {viol}"))?;

    let mut b = SdpBuilder::new(vec![Cone::Psd(2), Cone::Nonneg(1)]).map_err(|e| e.to_string())?;
    b.add_objective([Term::new(1, 0, 0, -1.0)]);
    b.add_constraint([Term::new(0, 0, 0, 1.0)], 1.0);
    b.add_constraint([Term::new(0, 1, 1, 1.0)], 1.0);
    b.add_constraint([Term::new(0, 0, 1, 0.5), Term::new(1, 0, 0, -1.0)], 0.0);
    let sol = solve(&b.build(), &opts);
    let t = sol.primal[1].as_nonneg().map_or(f64::NAN, |v| v[0]);
    ensure(sol.status == Status::Optimal && (t - 1.0).abs() <= 1e-6, || format!("t = {t}"))?;

    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let n = rng.random_range(2..7);
        let m = rng.random_range(1..n * (n + 1) / 2);
        let x0 = random_psd(&mut rng, n);
        let mut c = random_psd(&mut rng, n);
        let mut b = SdpBuilder::new(vec![Cone::Psd(n)]).map_err(|e| e.to_string())?;
        for _ in 0..m {
            let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = (&g + g.transpose()) * 0.5;
            c += &a * rng.random_range(-1.0..1.0);
            b.add_constraint(sym_terms(&a), a.dot(&x0));
        }
        b.add_objective(sym_terms(&c));
        let p = b.build();
        let sol = solve(&p, &opts);
        ensure(sol.status == Status::Optimal, || format!("random seed {seed}: {:?}", sol.status))?;
        let ax = p.apply(&sol.primal);
        let primal = ax.iter().zip(p.rhs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let aty = p.pack(&p.apply_adjoint(&sol.dual));
        let s = p.pack(&sol.slack);
        let dual = p
            .objective()
            .iter()
            .zip(aty.iter().zip(&s))
            .map(|(c, (a, s))| (c - a - s).abs())
            .fold(0.0, f64::max);
        let gap = sol.primal[0].dot(&sol.slack[0]).abs();
        let cone = (-sol.primal[0].min_eigenvalue()).max(-sol.slack[0].min_eigenvalue()).max(0.0);
        let kkt = primal.max(dual).max(gap).max(cone);
        worst = worst.max(kkt);
        ensure(kkt <= 1e-6, || format!("random seed {seed}: KKT residual {kkt:.2e}"))?;
    }
    Ok(format!("3 examples, 10 random problems, max KKT residual {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..100 {
        let dims = [2, 3];
        let rho = random_density(&dims, 40_000 + 2 * seed).map_err(|e| e.to_string())?;
        let sigma = random_density(&dims, 40_001 + 2 * seed).map_err(|e| e.to_string())?;
        let mut diff = rho.matrix().clone();
        diff.add_scaled(sigma.matrix(), Complex64::new(-1.0, 0.0));
        let before = trace_norm(&diff);

        for keep in [&[0usize][..], &[1]] {
            let reduced = partial_trace(&diff, &dims, keep).map_err(|e| e.to_string())?;
            let after = trace_norm(&reduced);
            worst = worst.max(after - before);
            ensure(after <= before + 1e-10, || format!("seed {seed}: partial trace {after} > {before}"))?;
        }
        let p = (seed as f64 + 0.5) / 100.0;
        // Δ_p(X) = (1 - p) X + p tr(X) I / D, and tr(ρ - σ) = 0
        let depolarized = diff.scale_real(1.0 - p);
        let after = trace_norm(&depolarized);
        worst = worst.max(after - before);
        ensure(after <= before + 1e-10, || format!("seed {seed}: depolarizing {after} > {before}"))?;
        let noisy = trace_norm(&{
            let mut m = rho.with_white_noise(p).matrix().clone();
            m.add_scaled(sigma.with_white_noise(p).matrix(), Complex64::new(-1.0, 0.0));
            m
        });
        ensure((noisy - after).abs() <= 1e-10, || format!("seed {seed}: noise channel mismatch"))?;
    }
    Ok(format!("100 inputs, max excess {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Bell certificate", criterion_1),
        ("compression equivalence", criterion_2),
        ("separable soundness", criterion_3),
        ("isotropic hierarchy convergence", criterion_4),
        ("PPT augmentation on tiles", criterion_5),
        ("bound calculators", criterion_6),
        ("dimension formulas", criterion_7),
        ("SDP solver suite", criterion_8),
        ("trace-norm contraction", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
