use std::collections::BTreeMap;

use proptest::prelude::*;
use querybench::adversary::{evaluate_adversary, grover_relation};
use querybench::harness::{generate, Generator, InstanceSpec, RandomMode};
use querybench::io::InstanceFile;
use querybench::lemma::run_lemma_algorithm;
use querybench::measures::{block_sensitivity, deterministic_complexity, inequality_chain};
use querybench::model::{InputString, PartialFunction, PromiseSet, TypeVector};
use querybench::symmetric::{
    estimate_type, hybrid_sequence, maximal_simplified_types, simplify_type, type_distance, HiddenInput,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Types with `m` entries summing to `n`.
fn type_vector(n: u32, m: usize) -> impl Strategy<Value = TypeVector> {
    prop::collection::vec(0..=n, m - 1).prop_map(move |mut cuts| {
        cuts.sort();
        let mut v = Vec::with_capacity(m);
        let mut prev = 0;
        for c in cuts {
            v.push(c - prev);
            prev = c;
        }
        v.push(n - prev);
        TypeVector(v)
    })
}

fn type_triple() -> impl Strategy<Value = (TypeVector, TypeVector, TypeVector)> {
    (1u32..12, 2usize..5).prop_flat_map(|(n, m)| (type_vector(n, m), type_vector(n, m), type_vector(n, m)))
}

fn random_on_type(n: usize, m: usize, seed: u64) -> PartialFunction {
    let spec = InstanceSpec::new("r", Generator::RandomOnType { n, m, seed, mode: RandomMode::Free, types: None });
    generate(&spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn type_distance_is_a_metric((a, b, c) in type_triple()) {
        let ab = type_distance(&a, &b).unwrap();
        prop_assert_eq!(type_distance(&a, &a).unwrap(), 0);
        prop_assert_eq!(ab, type_distance(&b, &a).unwrap());
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(type_distance(&a, &c).unwrap() <= ab + type_distance(&b, &c).unwrap());
    }

    #[test]
    fn hybrid_steps_are_small_and_monotone((a, b, _) in type_triple()) {
        let seq = hybrid_sequence(&a, &b).unwrap();
        let d = type_distance(&a, &b).unwrap();
        prop_assert_eq!(seq.first(), Some(&a));
        prop_assert_eq!(seq.last(), Some(&b));
        prop_assert!(seq.len() <= a.alphabet_size() + 1);
        for w in seq.windows(2) {
            prop_assert_eq!(w[1].total(), a.total());
            prop_assert!(w[0].0.iter().zip(&w[1].0).filter(|(x, y)| x != y).count() <= 2);
            prop_assert!(type_distance(&w[0], &w[1]).unwrap() <= d);
            prop_assert!(type_distance(&w[1], &b).unwrap() <= type_distance(&w[0], &b).unwrap());
        }
    }

    #[test]
    fn simplification_is_idempotent_and_monotone((a, b, _) in type_triple(), alpha in 1u32..4) {
        let sa = simplify_type(&a, alpha);
        prop_assert_eq!(simplify_type(&TypeVector(sa.v.clone()), alpha), sa.clone());
        prop_assert!(sa.v.iter().all(|&x| x <= 2 * alpha));
        if b.dominates(&a) {
            prop_assert!(sa.dominated_by(&simplify_type(&b, alpha)));
        }
    }

    #[test]
    fn index_permutation_keeps_the_adversary_ratio(n in 2usize..7, seed in any::<u64>()) {
        let f = InstanceFile::from_function(&random_on_type(n, 2, seed)).to_function().unwrap();
        let Ok((_, _, blocks)) = block_sensitivity(&f) else { return Ok(()) };
        if blocks.blocks.is_empty() {
            return Ok(());
        }
        let inst = grover_relation(&f, &blocks).unwrap();
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.rotate_left(seed as usize % n);
        let a = evaluate_adversary(&inst).unwrap();
        let b = evaluate_adversary(&inst.permuted(&sigma)).unwrap();
        prop_assert_eq!(a.ratio(), b.ratio());
    }

    #[test]
    fn generators_are_pure(n in 2usize..7, m in 2usize..4, seed in any::<u64>()) {
        let a = random_on_type(n, m, seed);
        let b = random_on_type(n, m, seed);
        prop_assert_eq!(a.members().unwrap(), b.members().unwrap());
    }

    #[test]
    fn instance_files_round_trip(n in 2usize..6, m in 2usize..4, seed in any::<u64>()) {
        let f = random_on_type(n, m, seed);
        let file = InstanceFile::from_function(&f);
        let back = InstanceFile::parse(&file.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&back, &file);
        let g = back.to_function().unwrap();
        prop_assert_eq!(f.members().unwrap(), g.members().unwrap());
    }

    #[test]
    fn sampling_is_reproducible(x in prop::collection::vec(0u8..3, 6..30), seed in any::<u64>()) {
        let n = x.len();
        let hidden = HiddenInput::new(InputString(x.clone()));
        let a = estimate_type(&hidden, 3, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = estimate_type(&HiddenInput::new(InputString(x)), 3, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.estimate.total(), n);
        prop_assert_eq!(hidden.queries(), a.samples);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measures_are_ordered_on_random_tables(
        n in 2usize..5,
        m in 2usize..4,
        picks in prop::collection::vec((any::<u64>(), any::<bool>()), 2..12),
    ) {
        let size = (m as u64).pow(n as u32);
        let mut table = BTreeMap::new();
        for (code, v) in picks {
            let mut c = code % size;
            let x: Vec<u8> = (0..n).map(|_| { let s = (c % m as u64) as u8; c /= m as u64; s }).collect();
            table.insert(InputString(x), v);
        }
        let promise = PromiseSet::explicit(n, m, table.keys().cloned()).unwrap();
        let f = PartialFunction::from_table(promise, table).unwrap();
        let r = inequality_chain(&f).unwrap();
        prop_assert!(r.s <= r.bs && r.bs <= r.c && r.c as u32 <= r.d);
        let (d, tree) = deterministic_complexity(&f).unwrap();
        prop_assert_eq!(d, r.d);
        prop_assert_eq!(tree.depth(), d);
        for (x, v) in f.members().unwrap() {
            prop_assert_eq!(tree.evaluate(&x), Some(v));
        }
    }

    #[test]
    fn maximal_types_cover_and_form_an_antichain(n in 1usize..8, m in 2usize..4, alpha in 1u32..3) {
        let promise = PromiseSet::total(n, m).unwrap();
        let maximal = maximal_simplified_types(&promise, alpha, None, None).unwrap();
        for (i, a) in maximal.iter().enumerate() {
            for b in &maximal[i + 1..] {
                prop_assert!(!a.simplified.dominated_by(&b.simplified));
                prop_assert!(!b.simplified.dominated_by(&a.simplified));
            }
            prop_assert_eq!(simplify_type(&a.representative, alpha), a.simplified.clone());
        }
        for t in promise.types() {
            let v = simplify_type(&t, alpha);
            prop_assert!(maximal.iter().any(|w| v.dominated_by(&w.simplified)));
        }
    }

    #[test]
    fn lemma_progress_and_growing_state(seed in any::<u64>(), m in 3usize..5) {
        let spec = InstanceSpec::new("marker", Generator::Marker { n: 8, m, seed });
        let f = generate(&spec).unwrap();
        let members = f.members().unwrap();
        let (x, _) = &members[seed as usize % members.len()];
        let run = run_lemma_algorithm(&f, 1, x).unwrap();
        let mut p = querybench::model::PartialAssignment::empty(8);
        let mut s = querybench::model::SymbolSet::new();
        let mut h: BTreeMap<_, _> = run.initial_h.iter().map(|v| (v.certificate.clone(), v.h)).collect();
        for rec in &run.trace {
            prop_assert!(p.agrees_with(&rec.p_after) && p.size() < rec.p_after.size());
            prop_assert!(rec.p_after.size() - p.size() <= 1);
            prop_assert!(s.is_subset(&rec.s_set));
            let progress = |class: bool| {
                rec.h_values
                    .iter()
                    .filter(|v| v.value == class && h.get(&v.certificate).is_some_and(|&before| before > 0))
                    .all(|v| !v.surviving || v.h < h[&v.certificate])
            };
            prop_assert!(progress(false) || progress(true));
            for v in &rec.h_values {
                if let Some(before) = h.get(&v.certificate) {
                    prop_assert!(v.h <= *before);
                }
            }
            h = rec.h_values.iter().map(|v| (v.certificate.clone(), v.h)).collect();
            p = rec.p_after.clone();
            s = rec.s_set.clone();
        }
    }
}
