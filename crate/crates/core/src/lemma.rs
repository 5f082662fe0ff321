//! The small-certificate structure search on type promises.
//!
//! Given `f` on a single type `T` and a size bound `k`, the loop repeatedly
//! picks a small certificate avoiding the current scarce-symbol set `S`,
//! records its symbols, and queries its positions on the hidden input. It
//! ends either with the value of `f(x)` or with a pair `(p, S)` such that
//! every small certificate consistent with `p` uses a symbol of `S` outside
//! `p`.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::model::{
    assignment_difference, is_consistent, InputString, PartialAssignment, PartialFunction, PromiseKind,
    Symbol, SymbolSet, TypeVector,
};
use crate::oracle::{oracle_for, ValueOracle};

/// `|c - p| + |alphabet(c) \ S|` when `c` agrees with `p`, else 0.
pub fn h_measure(c: &PartialAssignment, p: &PartialAssignment, s: &SymbolSet) -> Result<u32> {
    if c.len() != p.len() {
        return Err(Error::DimensionMismatch(format!("lengths {} and {}", c.len(), p.len())));
    }
    if !c.agrees_with(p) {
        return Ok(0);
    }
    let diff = assignment_difference(c, p)?;
    Ok((diff.size() + c.alphabet().difference(s).count()) as u32)
}

/// Lexicographic `k`-combinations of `0..n`.
pub(crate) fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
    if k > n {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return ControlFlow::Continue(());
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Constraints on candidate certificates.
pub struct CertificateFilter<'a> {
    pub max_size: usize,
    /// Candidates must agree with each of these.
    pub agree_with: Vec<&'a PartialAssignment>,
    /// Candidates whose entries outside `p` use a symbol of `S` are skipped.
    pub avoid: Option<(&'a PartialAssignment, &'a SymbolSet)>,
    /// Only certificates of this value.
    pub value: Option<bool>,
    /// Additionally require `c ∪ p` to be consistent with some member.
    pub legal_with: Option<&'a PartialAssignment>,
}

/// Visits non-vacuous certificates in (size, positions, symbols) order.
pub fn search_certificates(
    oracle: &dyn ValueOracle,
    filter: &CertificateFilter<'_>,
    mut visit: impl FnMut(&PartialAssignment, bool) -> ControlFlow<()>,
) -> Result<()> {
    let f = oracle.function();
    let n = f.n();
    let m = f.m();
    // symbol forced at a position by the agreement constraints; None = free,
    // Some(None) = contradictory
    let mut forced: Vec<Option<Option<Symbol>>> = vec![None; n];
    for a in &filter.agree_with {
        for (i, s) in a.entries() {
            forced[i] = match forced[i] {
                None => Some(Some(s)),
                Some(Some(t)) if t == s => Some(Some(s)),
                _ => Some(None),
            };
        }
    }
    let mut err = None;
    let mut checked = 0u128;
    for size in 0..=filter.max_size.min(n) {
        let flow = combinations(n, size, |positions| {
            if positions.iter().any(|&i| forced[i] == Some(None)) {
                return ControlFlow::Continue(());
            }
            let choices: Vec<Vec<Symbol>> = positions
                .iter()
                .map(|&i| match forced[i] {
                    Some(Some(s)) => vec![s],
                    _ => (0..m as Symbol)
                        .filter(|sym| {
                            !filter.avoid.is_some_and(|(p, s)| p.get(i).is_none() && s.contains(sym))
                        })
                        .collect(),
                })
                .collect();
            if choices.iter().any(Vec::is_empty) {
                return ControlFlow::Continue(());
            }
            let mut digits = vec![0usize; positions.len()];
            loop {
                let mut c = PartialAssignment::empty(n);
                for (k, &i) in positions.iter().enumerate() {
                    c.set(i, choices[k][digits[k]]);
                }
                let excluded = filter.avoid.is_some_and(|(p, s)| {
                    c.entries().any(|(i, sym)| p.get(i).is_none() && s.contains(&sym))
                });
                if !excluded {
                    checked += 1;
                    if let Err(e) = budget::check(checked) {
                        err = Some(e);
                        return ControlFlow::Break(());
                    }
                    match oracle.values(&c) {
                        Err(e) => {
                            err = Some(e);
                            return ControlFlow::Break(());
                        }
                        Ok(vs) => {
                            if let Some(v) = vs.single() {
                                let wanted = filter.value.map_or(true, |w| w == v);
                                let legal = match filter.legal_with {
                                    None => Ok(true),
                                    Some(p) => match c.union(p) {
                                        None => Ok(false),
                                        Some(u) => oracle.values(&u).map(|vs| !vs.is_empty()),
                                    },
                                };
                                match legal {
                                    Err(e) => {
                                        err = Some(e);
                                        return ControlFlow::Break(());
                                    }
                                    Ok(true) if wanted => visit(&c, v)?,
                                    _ => {}
                                }
                            }
                        }
                    }
                }
                // odometer, last position fastest
                let mut k = positions.len();
                loop {
                    if k == 0 {
                        return ControlFlow::Continue(());
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < choices[k].len() {
                        break;
                    }
                    digits[k] = 0;
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if flow.is_break() {
            break;
        }
    }
    Ok(())
}

fn single_type(f: &PartialFunction) -> Result<&TypeVector> {
    match f.promise().kind() {
        PromiseKind::SingleType(t) => Ok(t),
        _ => Err(Error::InvalidInput("operation requires a single-type promise".into())),
    }
}

/// All non-vacuous certificates `c` with `|c| <= max_size` agreeing with `p`
/// and with no symbol of `S` in `c - p`, ordered by (size, positions,
/// symbols).
pub fn enumerate_certificates(
    f: &PartialFunction,
    max_size: usize,
    p: &PartialAssignment,
    s: &SymbolSet,
) -> Result<Vec<(PartialAssignment, bool)>> {
    single_type(f)?;
    p.validate(f.n(), f.m())?;
    let oracle = oracle_for(f);
    let mut out = Vec::new();
    let filter = CertificateFilter { max_size, agree_with: vec![p], avoid: Some((p, s)), value: None, legal_with: None };
    search_certificates(oracle.as_ref(), &filter, |c, v| {
        out.push((c.clone(), v));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaOutcome {
    Value(bool),
    Structure { p: PartialAssignment, s: SymbolSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HValue {
    pub certificate: PartialAssignment,
    pub value: bool,
    /// `c ∪ p` is still consistent with some member of the type.
    pub surviving: bool,
    pub h: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub certificate: PartialAssignment,
    pub value: bool,
    pub r_set: SymbolSet,
    pub s_set: SymbolSet,
    pub queried: Vec<(usize, Symbol)>,
    pub p_after: PartialAssignment,
    /// h of every small certificate under the updated `(p, S)`.
    pub h_values: Vec<HValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRun {
    pub k: usize,
    pub input: InputString,
    pub outcome: LemmaOutcome,
    /// Loop entries, including the final one that finds no certificate.
    pub iterations: usize,
    pub initial_h: Vec<HValue>,
    pub trace: Vec<IterationRecord>,
}

impl LemmaRun {
    pub fn structure(&self) -> Option<(&PartialAssignment, &SymbolSet)> {
        match &self.outcome {
            LemmaOutcome::Structure { p, s } => Some((p, s)),
            LemmaOutcome::Value(_) => None,
        }
    }

    pub fn queries(&self) -> usize {
        self.trace.iter().map(|r| r.queried.len()).sum()
    }
}

fn h_snapshot(
    oracle: &dyn ValueOracle,
    small: &[(PartialAssignment, bool)],
    p: &PartialAssignment,
    s: &SymbolSet,
) -> Result<Vec<HValue>> {
    small
        .iter()
        .map(|(c, v)| {
            let surviving = match c.union(p) {
                None => false,
                Some(u) => !oracle.values(&u)?.is_empty(),
            };
            Ok(HValue { certificate: c.clone(), value: *v, surviving, h: h_measure(c, p, s)? })
        })
        .collect()
}

/// Runs the certificate-search loop on hidden input `x`.
pub fn run_lemma_algorithm(f: &PartialFunction, k: usize, x: &InputString) -> Result<LemmaRun> {
    let oracle = oracle_for(f);
    run_lemma_algorithm_with(oracle.as_ref(), k, x)
}

pub fn run_lemma_algorithm_with(oracle: &dyn ValueOracle, k: usize, x: &InputString) -> Result<LemmaRun> {
    let f = oracle.function();
    let t = single_type(f)?.clone();
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    if !f.promise().contains(x) {
        return Err(Error::InvalidInput(format!("{x} is not of type {t}")));
    }
    let n = f.n();
    let threshold = 2 * k as u32;
    let small = {
        let mut all = Vec::new();
        let filter = CertificateFilter { max_size: k, agree_with: vec![], avoid: None, value: None, legal_with: None };
        search_certificates(oracle, &filter, |c, v| {
            all.push((c.clone(), v));
            ControlFlow::Continue(())
        })?;
        all
    };
    let mut p = PartialAssignment::empty(n);
    let mut s_set = SymbolSet::new();
    let mut r_set = SymbolSet::new();
    let initial_h = h_snapshot(oracle, &small, &p, &s_set)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > n + 2 {
            return Err(Error::SelectionFailed {
                r_size: p.size(),
                detail: "loop made no progress".into(),
            });
        }
        let mut chosen = None;
        let filter = CertificateFilter {
            max_size: k,
            agree_with: vec![&p],
            avoid: Some((&p, &s_set)),
            value: None,
            legal_with: None,
        };
        search_certificates(oracle, &filter, |c, v| {
            chosen = Some((c.clone(), v));
            ControlFlow::Break(())
        })?;
        let Some((c, v)) = chosen else {
            return Ok(LemmaRun {
                k,
                input: x.clone(),
                outcome: LemmaOutcome::Structure { p, s: s_set },
                iterations,
                initial_h,
                trace,
            });
        };
        r_set.extend(c.alphabet());
        s_set = r_set
            .iter()
            .copied()
            .filter(|&i| t.get(i).saturating_sub(p.occurrences(i)) < threshold)
            .collect();
        let mut queried = Vec::new();
        for i in c.domain() {
            if p.get(i).is_none() {
                p.set(i, x.0[i]);
                queried.push((i, x.0[i]));
            }
        }
        let h_values = h_snapshot(oracle, &small, &p, &s_set)?;
        trace.push(IterationRecord {
            iteration: iterations,
            certificate: c,
            value: v,
            r_set: r_set.clone(),
            s_set: s_set.clone(),
            queried,
            p_after: p.clone(),
            h_values,
        });
        if let Some(value) = oracle.values(&p)?.single() {
            return Ok(LemmaRun { k, input: x.clone(), outcome: LemmaOutcome::Value(value), iterations, initial_h, trace });
        }
    }
}

/// A witness that the structure property fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostconditionViolation {
    pub input: InputString,
    pub certificate: PartialAssignment,
}

/// Checks that for every `x'` of the type consistent with `p` and every
/// sub-certificate `c` of `x'` with `|c| <= k`, `c - p` uses a symbol of `S`.
/// Returns the first violation, if any.
pub fn verify_lemma_postcondition(
    f: &PartialFunction,
    k: usize,
    p: &PartialAssignment,
    s: &SymbolSet,
) -> Result<Option<PostconditionViolation>> {
    let t = single_type(f)?;
    let oracle = oracle_for(f);
    let n = f.n();
    let mut cache: HashMap<PartialAssignment, bool> = HashMap::new();
    for x in t.expand()? {
        if !is_consistent(p, &x)? {
            continue;
        }
        for size in 0..=k.min(n) {
            let mut found = None;
            let mut err = None;
            let _ = combinations(n, size, |positions| {
                let mask = positions.iter().fold(0u64, |m, &i| m | 1 << i);
                let c = x.restrict(mask);
                let is_cert = match cache.get(&c) {
                    Some(&b) => b,
                    None => match oracle.values(&c) {
                        Ok(vs) => {
                            let b = vs.single().is_some();
                            cache.insert(c.clone(), b);
                            b
                        }
                        Err(e) => {
                            err = Some(e);
                            return ControlFlow::Break(());
                        }
                    },
                };
                if is_cert {
                    let hits = c.entries().any(|(i, sym)| p.get(i).is_none() && s.contains(&sym));
                    if !hits {
                        found = Some(c);
                        return ControlFlow::Break(());
                    }
                }
                ControlFlow::Continue(())
            });
            if let Some(e) = err {
                return Err(e);
            }
            if let Some(c) = found {
                return Ok(Some(PostconditionViolation { input: x, certificate: c }));
            }
        }
    }
    Ok(None)
}

/// Runs the loop on every member (or orbit representative when the type is
/// too large to expand) and returns the first run ending in `Structure`, or
/// the run with the most iterations when none does.
pub fn worst_case_run(f: &PartialFunction, k: usize) -> Result<LemmaRun> {
    let t = single_type(f)?;
    let oracle = oracle_for(f);
    let candidates = match t.expand() {
        Ok(all) => all,
        Err(Error::BudgetExceeded { .. }) => oracle.representatives()?,
        Err(e) => return Err(e),
    };
    let mut best: Option<LemmaRun> = None;
    let mut seen = HashSet::new();
    for x in candidates {
        if !seen.insert(x.clone()) {
            continue;
        }
        let run = run_lemma_algorithm_with(oracle.as_ref(), k, &x)?;
        if run.structure().is_some() {
            return Ok(run);
        }
        if best.as_ref().map_or(true, |b| run.iterations > b.iterations) {
            best = Some(run);
        }
    }
    best.ok_or(Error::EmptyPromise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Builtin, PromiseSet};

    fn perm_inversion(n: usize) -> PartialFunction {
        let p = PromiseSet::single_type(TypeVector(vec![1; n])).unwrap();
        PartialFunction::builtin(p, Builtin::PermInversion).unwrap()
    }

    #[test]
    fn h_examples() {
        let p = PartialAssignment::parse("1,*,*").unwrap();
        let c = PartialAssignment::parse("0,1,*").unwrap();
        assert_eq!(h_measure(&c, &p, &SymbolSet::new()).unwrap(), 0);
        let empty = PartialAssignment::empty(3);
        assert_eq!(h_measure(&c, &empty, &SymbolSet::new()).unwrap(), 4);
        let c1 = PartialAssignment::parse("*,2,*").unwrap();
        assert!(h_measure(&c1, &empty, &SymbolSet::new()).unwrap() <= 2);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        let _ = combinations(4, 2, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        let _ = combinations(3, 0, |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn enumeration_examples() {
        let f = perm_inversion(4);
        let empty = PartialAssignment::empty(4);
        assert!(enumerate_certificates(&f, 0, &empty, &SymbolSet::new()).unwrap().is_empty());
        let certs = enumerate_certificates(&f, 1, &empty, &SymbolSet::new()).unwrap();
        assert_eq!(certs[0], (PartialAssignment::parse("0,*,*,*").unwrap(), false));
        let promise = PromiseSet::single_type(TypeVector(vec![2, 1])).unwrap();
        let constant = PartialFunction::from_fn(promise, |_| true).unwrap();
        let certs = enumerate_certificates(&constant, 1, &PartialAssignment::empty(3), &SymbolSet::new()).unwrap();
        assert_eq!(certs[0], (PartialAssignment::empty(3), true));
    }

    #[test]
    fn constant_function_returns_value_immediately() {
        let promise = PromiseSet::single_type(TypeVector(vec![2, 1])).unwrap();
        let f = PartialFunction::from_fn(promise, |_| false).unwrap();
        let run = run_lemma_algorithm(&f, 1, &InputString(vec![0, 1, 0])).unwrap();
        assert_eq!(run.outcome, LemmaOutcome::Value(false));
        assert_eq!(run.iterations, 1);
        assert_eq!(run.queries(), 0);
    }

    #[test]
    fn perm_inversion_structure_and_postcondition() {
        for n in [8usize, 16] {
            let f = perm_inversion(n);
            let mut x: Vec<u8> = (0..n as u8).collect();
            x.swap(0, 3);
            let run = run_lemma_algorithm(&f, 1, &InputString(x)).unwrap();
            let (p, s) = run.structure().expect("structure");
            assert!(p.size() <= 4 && s.len() <= 4 && run.iterations < 4);
            assert!(s.contains(&0));
            for &sym in s {
                assert!(1 - p.occurrences(sym) < 2);
            }
            if n == 8 {
                assert_eq!(verify_lemma_postcondition(&f, 1, p, s).unwrap(), None);
            }
        }
    }

    #[test]
    fn corrupted_structure_is_caught() {
        let f = perm_inversion(8);
        let run = worst_case_run(&f, 1).unwrap();
        let (p, s) = run.structure().unwrap();
        let mut smaller = s.clone();
        smaller.remove(&0);
        let violation = verify_lemma_postcondition(&f, 1, p, &smaller).unwrap().expect("violation");
        assert!(is_consistent(p, &violation.input).unwrap());
        assert_eq!(violation.certificate.size(), 1);
    }
}
