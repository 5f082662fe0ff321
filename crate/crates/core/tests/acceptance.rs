//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use querybench::adversary::{beta, build_hard_instance, evaluate_adversary, grover_relation, HardInstanceConstruction};
use querybench::harness::{generate, sweep, sweep_exhaustive, Generator, InstanceSpec};
use querybench::lemma::{run_lemma_algorithm_with, verify_lemma_postcondition, LemmaOutcome};
use querybench::measures::{
    block_sensitivity, certificate_complexity, deterministic_complexity, deterministic_complexity_of,
    deterministic_depth,
};
use querybench::model::{
    type_of, Builtin, InputString, PartialAssignment, PartialFunction, PromiseKind, PromiseSet, SymbolSet, TypeVector,
};
use querybench::oracle::oracle_for;
use querybench::symmetric::{
    classical_simulation, estimate_type, hybrid_sequence, maximal_simplified_types, type_distance, HiddenInput,
};
use querybench::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn spec(generator: Generator) -> InstanceSpec {
    InstanceSpec::new(format!("{generator:?}"), generator)
}

fn criterion_1() -> Outcome {
    let r = sweep_exhaustive(4, 3).map_err(|e| e.to_string())?;
    ensure!(r.violations.is_empty(), "violations: {:?}", r.violations);
    let errors: Vec<_> = r.rows.iter().filter(|row| row.error.is_some()).collect();
    ensure!(errors.is_empty(), "instances failed: {:?}", errors.first());
    let checked = r.rows.iter().filter(|row| row.product_bound_checked).count();
    let anomalies: usize = r.rows.iter().map(|row| row.anomalies.len()).sum();
    for row in &r.rows {
        for a in &row.anomalies {
            println!("    anomaly {}: {a}", row.name);
        }
    }
    Ok(format!(
        "{} functions up to symmetry, s <= bs <= C <= D everywhere, C <= 3 bs s on {checked} with s > 0, {anomalies} s = 0 anomalies",
        r.rows.len()
    ))
}

/// Minimax over survivor sets with no memoization and no pruning.
fn plain_minimax(members: &[(InputString, bool)], idx: &[usize], n: usize) -> u32 {
    let first = members[idx[0]].1;
    if idx.iter().all(|&i| members[i].1 == first) {
        return 0;
    }
    let mut best = u32::MAX;
    for q in 0..n {
        let mut parts: HashMap<u8, Vec<usize>> = HashMap::new();
        for &i in idx {
            parts.entry(members[i].0 .0[q]).or_default().push(i);
        }
        if parts.len() < 2 {
            continue;
        }
        let worst = parts.values().map(|p| plain_minimax(members, p, n)).max().unwrap();
        best = best.min(worst + 1);
    }
    best
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut largest = 0;
    for trial in 0..500 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=3usize);
        let all = PromiseSet::total(n, m).unwrap().expand().unwrap();
        let size = rng.gen_range(1..=all.len().min(200));
        let inputs: Vec<InputString> = all.choose_multiple(&mut rng, size).cloned().collect();
        let table = inputs.iter().map(|x| (x.clone(), rng.gen::<bool>())).collect();
        let f = PartialFunction::from_table(PromiseSet::explicit(n, m, inputs).unwrap(), table).unwrap();
        let members = f.members().unwrap();
        let (d, tree) = deterministic_complexity(&f).map_err(|e| e.to_string())?;
        let idx: Vec<usize> = (0..members.len()).collect();
        let plain = plain_minimax(&members, &idx, n);
        ensure!(d == plain, "trial {trial}: memoized {d} vs plain {plain}");
        ensure!(tree.depth() == d, "trial {trial}: tree depth {} vs {d}", tree.depth());
        for (x, v) in &members {
            ensure!(tree.evaluate(x) == Some(*v), "trial {trial}: tree wrong on {x}");
        }
        largest = largest.max(size);
    }
    Ok(format!("500 random explicit instances agree (largest |X| = {largest})"))
}

fn criterion_3() -> Outcome {
    let mut seen = Vec::new();
    for n in [4usize, 6, 8] {
        let f = generate(&spec(Generator::WeightPromise { n })).map_err(|e| e.to_string())?;
        let orbit = deterministic_depth(&f).map_err(|e| e.to_string())?;
        let explicit = deterministic_complexity_of(f.members().unwrap(), n).map_err(|e| e.to_string())?.0;
        let want = (n / 2 + 1) as u32;
        ensure!(orbit == want && explicit == want, "n = {n}: D = {orbit} / {explicit}, expected {want}");
        seen.push(format!("n={n}: D={orbit}"));
    }
    Ok(seen.join(", "))
}

struct LemmaTally {
    instances: usize,
    applicable: usize,
    runs: usize,
    structures: usize,
}

fn check_lemma_instance(f: &PartialFunction, tally: &mut LemmaTally, label: &str) -> Result<(), String> {
    tally.instances += 1;
    let (c, _) = certificate_complexity(f).map_err(|e| e.to_string())?;
    let d = deterministic_depth(f).map_err(|e| e.to_string())? as usize;
    let PromiseKind::SingleType(t) = f.promise().kind() else { return Err("not single type".into()) };
    let members = t.expand().map_err(|e| e.to_string())?;
    for k in c.max(1)..=d {
        if 4 * k * k > d {
            break;
        }
        tally.applicable += 1;
        let oracle = oracle_for(f);
        let mut verified: HashMap<(PartialAssignment, SymbolSet), bool> = HashMap::new();
        let mut structures = 0;
        for x in &members {
            let run = run_lemma_algorithm_with(oracle.as_ref(), k, x).map_err(|e| format!("{label}: {e}"))?;
            tally.runs += 1;
            match &run.outcome {
                LemmaOutcome::Value(v) => {
                    ensure!(f.eval(x) == Some(*v), "{label}: run on {x} returned the wrong value");
                }
                LemmaOutcome::Structure { p, s } => {
                    structures += 1;
                    ensure!(p.size() <= 4 * k * k, "{label}: |p| = {} > 4k^2 on {x}", p.size());
                    ensure!(s.len() <= 4 * k * k, "{label}: |S| = {} > 4k^2 on {x}", s.len());
                    ensure!(run.iterations < 4 * k, "{label}: {} iterations on {x}", run.iterations);
                    let key = (p.clone(), s.clone());
                    if let std::collections::hash_map::Entry::Vacant(e) = verified.entry(key) {
                        let violation = verify_lemma_postcondition(f, k, p, s).map_err(|e| e.to_string())?;
                        ensure!(violation.is_none(), "{label}: postcondition fails: {violation:?}");
                        e.insert(true);
                    }
                }
            }
        }
        ensure!(structures > 0, "{label}, k = {k}: no input produced a structure");
        tally.structures += structures;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut tally = LemmaTally { instances: 0, applicable: 0, runs: 0, structures: 0 };
    for n in [4usize, 6, 8] {
        let f = generate(&spec(Generator::PermInversion { n })).map_err(|e| e.to_string())?;
        check_lemma_instance(&f, &mut tally, &format!("perm-inversion n={n}"))?;
    }
    let perm_applicable = tally.applicable;
    ensure!(perm_applicable >= 1, "perm-inversion never met C <= k <= sqrt(D)/2");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100u64 {
        let m = rng.gen_range(2..=4usize);
        let generator = if i % 2 == 0 {
            Generator::RandomOnType {
                n: rng.gen_range(3..=8),
                m,
                seed: 1000 + i,
                mode: querybench::harness::RandomMode::Free,
                types: None,
            }
        } else {
            Generator::Marker { n: 8, m, seed: 1000 + i }
        };
        let f = generate(&spec(generator.clone())).map_err(|e| e.to_string())?;
        check_lemma_instance(&f, &mut tally, &format!("{generator:?}"))?;
    }
    ensure!(tally.applicable > perm_applicable, "no random instance met the size hypothesis");
    Ok(format!(
        "{} instances, {} (instance, k) pairs meet C <= k <= sqrt(D)/2, {} runs, {} structures all within bounds and verified",
        tally.instances, tally.applicable, tally.runs, tally.structures
    ))
}

fn check_construction(f: &PartialFunction, built: &HardInstanceConstruction) -> Result<(), String> {
    let PromiseKind::SingleType(t) = f.promise().kind() else { return Err("not single type".into()) };
    built.instance.validate_against(f).map_err(|e| e.to_string())?;
    for x in built.instance.zero_side.iter().chain(&built.instance.one_side) {
        ensure!(type_of(x, f.m()) == *t, "{x} is not of the type");
    }
    ensure!(built.r.alphabet().is_disjoint(&built.s), "r uses a symbol of S");
    let mut used: BTreeSet<usize> = built.p.domain().collect();
    for seg in &built.segments {
        for &i in &seg.positions {
            ensure!(used.insert(i), "segment position {i} reused");
        }
    }
    ensure!(used.len() == built.p.size() + built.r.size(), "segments do not cover r");
    for bin in &built.bins {
        for &i in bin {
            ensure!(used.insert(i), "bin position {i} overlaps");
        }
    }
    let bound = evaluate_adversary(&built.instance).map_err(|e| e.to_string())?;
    ensure!(
        bound.m * bound.m_prime == built.alpha * bound.l_max,
        "m m' / l_max = {}/{} but alpha = {}",
        bound.m * bound.m_prime,
        bound.l_max,
        built.alpha
    );
    Ok(())
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for n in [4usize, 9, 16] {
        let f = generate(&spec(Generator::OrTotal { n })).map_err(|e| e.to_string())?;
        let (_, _, blocks) = block_sensitivity(&f).map_err(|e| e.to_string())?;
        let b = evaluate_adversary(&grover_relation(&f, &blocks).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure!(b.m * b.m_prime == n * b.l_max, "n = {n}: m m' / l_max = {}/{}", b.m * b.m_prime, b.l_max);
        notes.push(format!("grover n={n}: {}/{}", b.m * b.m_prime, b.l_max));
    }
    for (half, k, want_alpha) in [(60u32, 3usize, 2usize), (155, 5, 3)] {
        let promise = PromiseSet::single_type(TypeVector(vec![1, half, half])).unwrap();
        let f = PartialFunction::builtin(promise, Builtin::PermInversion).unwrap();
        let n = f.n();
        let mut x: Vec<u8> = (0..n).map(|i| if i < half as usize { 1 } else { 2 }).collect();
        x[n - 1] = 0;
        let oracle = oracle_for(&f);
        let run = run_lemma_algorithm_with(oracle.as_ref(), 1, &InputString(x)).map_err(|e| e.to_string())?;
        let LemmaOutcome::Structure { p, s } = run.outcome else { return Err("lemma returned a value".into()) };
        let built = build_hard_instance(&f, &p, &s, k, 1).map_err(|e| e.to_string())?;
        check_construction(&f, &built)?;
        ensure!(built.alpha == want_alpha, "n = {n}: alpha = {} expected {want_alpha}", built.alpha);
        notes.push(format!("hard instance n={n}, k={k}: alpha={}", built.alpha));
    }
    Ok(notes.join(", "))
}

fn criterion_6() -> Outcome {
    let cube: Vec<f64> = (0..=1_000_000u32).map(|k| (k as f64).cbrt()).collect();
    let mut tightest = f64::INFINITY;
    for c in 1..=1000u32 {
        let cf = c as f64;
        for k in 1..=1_000_000u32 {
            let b = beta(cf, k as f64);
            let ratio = b / cube[k as usize];
            ensure!(ratio >= 1.0 - 1e-9, "C = {c}, k = {k}: beta = {b} < k^(1/3) = {}", cube[k as usize]);
            tightest = tightest.min(ratio);
        }
    }
    Ok(format!("10^9 grid points, min beta / k^(1/3) = {tightest:.12}"))
}

fn criterion_7() -> Outcome {
    let n = 40;
    let x = InputString((0..n).map(|i| (i % 2) as u8).collect());
    let truth = type_of(&x, 2);
    let mut hits = 0;
    for seed in 0..2000u64 {
        let hidden = HiddenInput::new(x.clone());
        let est = estimate_type(&hidden, 2, 5, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        ensure!(est.estimate.total() == n, "estimate does not sum to n");
        if type_distance(&est.estimate, &truth).unwrap() < 6 {
            hits += 1;
        }
    }
    let rate = hits as f64 / 2000.0;
    ensure!(rate >= 2.0 / 3.0 - 0.03, "success rate {rate}");
    Ok(format!("success rate {rate:.4} over 2000 trials"))
}

fn criterion_8() -> Outcome {
    let mut pairs = 0;
    for n in 1..=8 {
        for m in 1..=4 {
            let types = TypeVector::all(n, m);
            for s in &types {
                for t in &types {
                    let seq = hybrid_sequence(s, t).map_err(|e| e.to_string())?;
                    let dst = type_distance(s, t).unwrap();
                    ensure!(seq.first() == Some(s) && seq.last() == Some(t), "{s} -> {t}: bad endpoints");
                    ensure!(seq.len() - 1 <= m, "{s} -> {t}: {} steps", seq.len() - 1);
                    for w in seq.windows(2) {
                        let changed = w[0].0.iter().zip(&w[1].0).filter(|(a, b)| a != b).count();
                        ensure!(changed <= 2, "{s} -> {t}: step changes {changed} coordinates");
                        ensure!(type_distance(&w[0], &w[1]).unwrap() <= dst, "{s} -> {t}: long step");
                        ensure!(
                            type_distance(&w[1], t).unwrap() <= type_distance(&w[0], t).unwrap(),
                            "{s} -> {t}: moved away"
                        );
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} type pairs"))
}

fn criterion_9() -> Outcome {
    let mut cases = 0;
    let mut worst = 0.0f64;
    for m in 1..=3usize {
        for n in 1..=14usize {
            let promise = PromiseSet::total(n, m).unwrap();
            let types = promise.types();
            for alpha in 1..=3u32 {
                let cap = (2 * alpha as usize + 1).pow(m as u32 - 1);
                for a in 0..m as u8 {
                    let mut centers: Vec<Option<(&TypeVector, u32)>> = vec![None];
                    for t in &types {
                        for radius in 1..=3 {
                            centers.push(Some((t, radius)));
                        }
                    }
                    for within in centers {
                        let found = maximal_simplified_types(&promise, alpha, within, Some(a))
                            .map_err(|e| e.to_string())?;
                        ensure!(
                            found.len() <= cap,
                            "n={n}, M={m}, alpha={alpha}, pinned {a}: beta = {} > {cap}",
                            found.len()
                        );
                        worst = worst.max(found.len() as f64 / cap as f64);
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} cases, largest beta / (2 alpha + 1)^(M-1) = {worst:.3}"))
}

fn criterion_10() -> Outcome {
    let f = generate(&spec(Generator::ThresholdSymmetric { n: 6, m: 2, cut: 3 })).map_err(|e| e.to_string())?;
    let alpha = deterministic_depth(&f).map_err(|e| e.to_string())?;
    ensure!(alpha == 6, "D(f) = {alpha}, expected 6");
    let inputs = f.promise().expand().unwrap();
    let mut misses = 0;
    let mut runs = 0;
    for seed in 0..5u64 {
        for (j, x) in inputs.iter().enumerate() {
            let mut attempt = 0u64;
            loop {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + j as u64 + attempt * 1_000_000);
                let hidden = HiddenInput::new(x.clone());
                match classical_simulation(&f, &hidden, alpha, 1, true, &mut rng) {
                    Ok(run) => {
                        ensure!(!run.best_effort, "seed {seed}, x = {x}: run marked best effort");
                        ensure!(run.output == f.eval(x), "seed {seed}, x = {x}: output {:?}", run.output);
                        runs += 1;
                        break;
                    }
                    Err(Error::EstimateMiss { .. }) => {
                        misses += 1;
                        attempt += 1;
                        ensure!(attempt < 50, "x = {x}: 50 consecutive estimate misses");
                    }
                    Err(e) => return Err(format!("seed {seed}, x = {x}: {e}")),
                }
            }
        }
    }
    Ok(format!("{runs} runs correct, 0 conflicts, {misses} estimate misses rerun"))
}

fn criterion_11() -> Outcome {
    let specs: Vec<_> = (4..=12).step_by(2).map(|n| spec(Generator::PermInversion { n })).collect();
    let r = sweep(&specs);
    ensure!(r.violations.is_empty(), "violations: {:?}", r.violations);
    ensure!(r.rows.iter().all(|row| row.error.is_none()), "errors in rows");
    let fit = |measure: &str| r.fits.iter().find(|f| f.measure == measure).map(|f| f.exponent);
    let c = fit("C").ok_or("no C fit")?;
    let d = fit("D").ok_or("no D fit")?;
    ensure!(c.abs() <= 0.01, "C exponent {c}");
    ensure!((d - 1.0).abs() <= 0.1, "D exponent {d}");
    Ok(format!("C exponent {c:.4}, D exponent {d:.4}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "inequality chain, exhaustive single-type n <= 4, M <= 3", criterion_1),
        (2, "memoized D equals plain minimax", criterion_2),
        (3, "weight-promise D = n/2 + 1", criterion_3),
        (4, "certificate-structure search", criterion_4),
        (5, "adversary evaluator and hard instances", criterion_5),
        (6, "beta >= k^(1/3) grid", criterion_6),
        (7, "type sampling success rate", criterion_7),
        (8, "hybrid sequences", criterion_8),
        (9, "maximal simplified type count", criterion_9),
        (10, "classical simulation", criterion_10),
        (11, "perm-inversion scaling fits", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS [{title}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{title}] {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
