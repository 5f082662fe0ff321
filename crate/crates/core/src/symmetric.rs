//! Type distance, sampling estimates of a hidden type, hybrid type sequences,
//! simplified types and the classical simulation built from them.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::measures::deterministic_complexity_of;
use crate::model::{
    type_of, InputString, PartialAssignment, PartialFunction, PromiseKind, PromiseSet, Symbol, TypeVector,
};
use crate::oracle::oracle_for;

/// `max_i |T1_i - T2_i|`.
pub fn type_distance(a: &TypeVector, b: &TypeVector) -> Result<u32> {
    if a.0.len() != b.0.len() || a.total() != b.total() {
        return Err(Error::DimensionMismatch(format!("types {a} and {b}")));
    }
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDistanceReport {
    pub d: u32,
    /// Closest differently-valued pair, zero-valued type first.
    pub zero_type: TypeVector,
    pub one_type: TypeVector,
    /// `g = n / d` as a fraction and as a float.
    pub g_numerator: usize,
    pub g_denominator: u32,
    pub g: f64,
}

/// The value of `f` on each type of its symmetric promise.
pub fn typewise_values(f: &PartialFunction) -> Result<BTreeMap<TypeVector, bool>> {
    if !f.promise().is_symmetric() {
        return Err(Error::InvalidInput("promise is not symmetric".into()));
    }
    if let PromiseKind::SingleType(t) = f.promise().kind() {
        let vs = oracle_for(f).values(&PartialAssignment::empty(f.n()))?;
        return match vs.single() {
            Some(v) => Ok(BTreeMap::from([(t.clone(), v)])),
            None => Err(Error::NotTypewiseConstant(t.to_string())),
        };
    }
    let mut out = BTreeMap::new();
    for t in f.promise().types() {
        let mut seen = None;
        for x in t.expand()? {
            let v = f.eval(&x).ok_or_else(|| Error::InvalidInput(format!("{x} outside promise")))?;
            match seen {
                None => seen = Some(v),
                Some(w) if w != v => return Err(Error::NotTypewiseConstant(t.to_string())),
                _ => {}
            }
        }
        out.insert(t, seen.expect("types are non-empty"));
    }
    Ok(out)
}

/// d(f): the least distance between types of different value.
pub fn distinguishing_distance(f: &PartialFunction) -> Result<TypeDistanceReport> {
    let values = typewise_values(f)?;
    let zeros: Vec<&TypeVector> = values.iter().filter(|(_, &v)| !v).map(|(t, _)| t).collect();
    let ones: Vec<&TypeVector> = values.iter().filter(|(_, &v)| v).map(|(t, _)| t).collect();
    let mut best: Option<(u32, &TypeVector, &TypeVector)> = None;
    for &a in &zeros {
        for &b in &ones {
            let d = type_distance(a, b)?;
            if best.map_or(true, |(bd, _, _)| d < bd) {
                best = Some((d, a, b));
            }
        }
    }
    let (d, a, b) = best.ok_or(Error::OneSided)?;
    let n = f.n();
    Ok(TypeDistanceReport {
        d,
        zero_type: a.clone(),
        one_type: b.clone(),
        g_numerator: n,
        g_denominator: d,
        g: n as f64 / d as f64,
    })
}

/// Query access to a hidden input, counting queries.
pub struct HiddenInput {
    x: InputString,
    queries: Cell<usize>,
}

impl HiddenInput {
    pub fn new(x: InputString) -> Self {
        HiddenInput { x, queries: Cell::new(0) }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn query(&self, i: usize) -> Symbol {
        self.queries.set(self.queries.get() + 1);
        self.x.0[i]
    }

    pub fn queries(&self) -> usize {
        self.queries.get()
    }

    /// The hidden input itself, for auditing only.
    pub fn reveal(&self) -> &InputString {
        &self.x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub counts: Vec<u64>,
    pub samples: usize,
    pub estimate: TypeVector,
    pub precision: u32,
    pub delta: f64,
    pub epsilon: f64,
}

/// `ceil((3 / eps^2) ln(2 / delta))` with `eps = d / n`, `delta = 1 / (3M)`.
pub fn sample_count(n: usize, m: usize, d: u32) -> usize {
    let eps = d as f64 / n as f64;
    let delta = 1.0 / (3.0 * m as f64);
    (3.0 / (eps * eps) * (2.0 / delta).ln()).ceil() as usize
}

/// Integer apportionment of `n` proportional to `counts`, largest remainder
/// first, ties to the lower symbol.
fn largest_remainder(counts: &[u64], total: u64, n: usize) -> Vec<u32> {
    let n = n as u64;
    let mut out: Vec<u32> = counts.iter().map(|&r| (r * n / total) as u32).collect();
    let assigned: u64 = out.iter().map(|&v| v as u64).sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(counts[i] * n % total), i));
    for &i in order.iter().take((n - assigned) as usize) {
        out[i] += 1;
    }
    out
}

/// Estimates the hidden input's type from uniform samples with replacement.
pub fn estimate_type(hidden: &HiddenInput, m: usize, d: u32, rng: &mut impl Rng) -> Result<SampleEstimate> {
    let n = hidden.len();
    if d == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidParameters("precision, n and M must be positive".into()));
    }
    let k = sample_count(n, m, d);
    budget::check(k as u128)?;
    let mut counts = vec![0u64; m];
    for _ in 0..k {
        let s = hidden.query(rng.gen_range(0..n));
        counts[s as usize] += 1;
    }
    let estimate = TypeVector(largest_remainder(&counts, k as u64, n));
    Ok(SampleEstimate {
        counts,
        samples: k,
        estimate,
        precision: d,
        delta: 1.0 / (3.0 * m as f64),
        epsilon: d as f64 / n as f64,
    })
}

/// Walks from `s` to `t`, each step fixing the lowest surplus coordinate and
/// moving the excess to the lowest deficit coordinate.
pub fn hybrid_sequence(s: &TypeVector, t: &TypeVector) -> Result<Vec<TypeVector>> {
    type_distance(s, t)?;
    let mut cur = s.clone();
    let mut out = vec![cur.clone()];
    while cur != *t {
        let r = (0..cur.0.len()).find(|&i| cur.0[i] > t.0[i]).expect("surplus exists");
        let r2 = (0..cur.0.len()).find(|&i| cur.0[i] < t.0[i]).expect("deficit exists");
        let moved = cur.0[r] - t.0[r];
        cur.0[r] = t.0[r];
        cur.0[r2] += moved;
        out.push(cur.clone());
    }
    Ok(out)
}

/// `v(S)_i = min(S_i, 2 alpha)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimplifiedType {
    pub v: Vec<u32>,
    pub alpha: u32,
}

impl SimplifiedType {
    pub fn dominated_by(&self, other: &SimplifiedType) -> bool {
        self.v.iter().zip(&other.v).all(|(a, b)| a <= b)
    }
}

pub fn simplify_type(s: &TypeVector, alpha: u32) -> SimplifiedType {
    SimplifiedType { v: s.0.iter().map(|&x| x.min(2 * alpha)).collect(), alpha }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalType {
    pub simplified: SimplifiedType,
    pub representative: TypeVector,
}

/// Maximal simplified types of the promise's types, optionally limited to the
/// open ball `d(S, center) < radius` and to types holding at least `2 alpha`
/// copies of a pinned symbol.
pub fn maximal_simplified_types(
    promise: &PromiseSet,
    alpha: u32,
    within: Option<(&TypeVector, u32)>,
    pinned: Option<Symbol>,
) -> Result<Vec<MaximalType>> {
    if !promise.is_symmetric() {
        return Err(Error::InvalidInput("promise is not symmetric".into()));
    }
    let mut types = promise.types();
    budget::check(types.len() as u128)?;
    types.sort();
    let mut reps: BTreeMap<SimplifiedType, TypeVector> = BTreeMap::new();
    for t in types {
        if let Some((center, radius)) = within {
            if type_distance(&t, center)? >= radius {
                continue;
            }
        }
        if pinned.is_some_and(|a| t.get(a) < 2 * alpha) {
            continue;
        }
        reps.entry(simplify_type(&t, alpha)).or_insert(t);
    }
    let keys: Vec<&SimplifiedType> = reps.keys().collect();
    Ok(reps
        .iter()
        .filter(|(v, _)| !keys.iter().any(|w| *w != *v && v.dominated_by(w)))
        .map(|(v, t)| MaximalType { simplified: v.clone(), representative: t.clone() })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExamineOutcome {
    CertificateFound { certificate: PartialAssignment, value: bool },
    TypeContradicted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub representative: TypeVector,
    pub queries: Vec<(usize, Symbol)>,
    /// `p0` together with every answer received.
    pub revealed: PartialAssignment,
    pub outcome: ExamineOutcome,
}

/// Runs the optimal decision tree for `f` on type `s` given `p0`, answering
/// from the hidden input, for at most `alpha` queries.
pub fn examine(
    f: &PartialFunction,
    s: &TypeVector,
    hidden: &HiddenInput,
    alpha: u32,
    p0: &PartialAssignment,
) -> Result<Transcript> {
    let members = if f.promise().types().contains(s) { f.restrict_to_type(s, p0)? } else { Vec::new() };
    let mut revealed = p0.clone();
    let mut queries = Vec::new();
    let finish = |queries, revealed, outcome| Transcript { representative: s.clone(), queries, revealed, outcome };
    if members.is_empty() {
        return Ok(finish(queries, revealed, ExamineOutcome::TypeContradicted));
    }
    let (_, tree) = deterministic_complexity_of(members, f.n())?;
    let mut node = &tree;
    loop {
        match node {
            crate::measures::DecisionTree::Leaf(v) => {
                let certificate = revealed.clone();
                return Ok(finish(queries, revealed, ExamineOutcome::CertificateFound { certificate, value: *v }));
            }
            crate::measures::DecisionTree::Node { query, children } => {
                if queries.len() as u32 >= alpha {
                    return Ok(finish(queries, revealed, ExamineOutcome::Inconclusive));
                }
                let a = hidden.query(*query);
                queries.push((*query, a));
                revealed.set(*query, a);
                match children.get(&a) {
                    Some(child) => node = child,
                    None => return Ok(finish(queries, revealed, ExamineOutcome::TypeContradicted)),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub symbol: Symbol,
    pub positions: Vec<usize>,
    pub samples: usize,
}

/// Finds `2 alpha` distinct positions holding the estimate's most frequent
/// symbol, sampling at most `10 M alpha` positions.
pub fn reduce_alphabet(
    estimate: &TypeVector,
    alpha: u32,
    hidden: &HiddenInput,
    rng: &mut impl Rng,
) -> Result<Reduction> {
    let m = estimate.alphabet_size();
    let n = hidden.len();
    let symbol = (0..m).max_by_key(|&i| (estimate.0[i], std::cmp::Reverse(i))).unwrap_or(0) as Symbol;
    let need = 2 * alpha as usize;
    let cap = 10 * m * alpha as usize;
    let mut found = BTreeSet::new();
    let mut samples = 0;
    while found.len() < need {
        if samples == cap {
            return Err(Error::NotFound(cap));
        }
        samples += 1;
        let i = rng.gen_range(0..n);
        if hidden.query(i) == symbol {
            found.insert(i);
        }
    }
    Ok(Reduction { symbol, positions: found.into_iter().collect(), samples })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub maximal: MaximalType,
    /// D of `f` on the representative's type given `p0`, when computable.
    pub restricted_depth: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    pub alpha: u32,
    pub estimate: SampleEstimate,
    pub reduction: Option<Reduction>,
    /// Why reduction was skipped or abandoned.
    pub reduction_note: Option<String>,
    pub candidates: Vec<Candidate>,
    pub transcripts: Vec<Transcript>,
    /// Indices of transcripts surviving the pairwise consistency filter.
    pub surviving: Vec<usize>,
    pub output: Option<bool>,
    pub queries: usize,
    /// The depth precondition failed or no surviving certificate was found.
    pub best_effort: bool,
}

fn union_fits(a: &PartialAssignment, b: &PartialAssignment, t: &TypeVector) -> bool {
    match a.union(b) {
        None => false,
        Some(u) => u.counts(t.alphabet_size()).iter().zip(&t.0).all(|(c, m)| c <= m),
    }
}

/// Decides `f(x)` through sampling, simplified types and examinations.
pub fn classical_simulation(
    f: &PartialFunction,
    hidden: &HiddenInput,
    alpha: u32,
    d: u32,
    reduce: bool,
    rng: &mut impl Rng,
) -> Result<SimulationRun> {
    if !f.promise().is_symmetric() {
        return Err(Error::InvalidInput("classical simulation needs a symmetric promise".into()));
    }
    let n = f.n();
    let m = f.m();
    if hidden.len() != n {
        return Err(Error::DimensionMismatch(format!("hidden input has length {}", hidden.len())));
    }
    let start = hidden.queries();
    let estimate = estimate_type(hidden, m, d, rng)?;
    let mut reduction = None;
    let mut reduction_note = None;
    if reduce {
        if n >= 4 * alpha as usize * m {
            match reduce_alphabet(&estimate.estimate, alpha, hidden, rng) {
                Ok(r) => reduction = Some(r),
                Err(Error::NotFound(cap)) => {
                    reduction_note = Some(format!("no symbol found within {cap} samples; unreduced"))
                }
                Err(e) => return Err(e),
            }
        } else {
            reduction_note = Some(format!("n = {n} < 4 alpha M = {}; unreduced", 4 * alpha as usize * m));
        }
    }
    let truth = type_of(hidden.reveal(), m);
    if type_distance(&truth, &estimate.estimate)? >= d {
        return Err(Error::EstimateMiss {
            truth: truth.to_string(),
            estimate: estimate.estimate.to_string(),
            radius: d,
        });
    }
    let mut p0 = PartialAssignment::empty(n);
    if let Some(r) = &reduction {
        for &i in &r.positions {
            p0.set(i, r.symbol);
        }
    }
    let maximal = maximal_simplified_types(
        f.promise(),
        alpha,
        Some((&estimate.estimate, d)),
        reduction.as_ref().map(|r| r.symbol),
    )?;
    let mut candidates = Vec::new();
    let mut transcripts = Vec::new();
    let mut best_effort = false;
    for mt in maximal {
        let members = f.restrict_to_type(&mt.representative, &p0)?;
        let restricted_depth = if members.is_empty() {
            None
        } else {
            Some(deterministic_complexity_of(members, n)?.0)
        };
        if restricted_depth.is_some_and(|dd| dd > alpha) {
            best_effort = true;
        }
        transcripts.push(examine(f, &mt.representative, hidden, alpha, &p0)?);
        candidates.push(Candidate { maximal: mt, restricted_depth });
    }
    let surviving: Vec<usize> = (0..transcripts.len())
        .filter(|&i| {
            let ti = &transcripts[i];
            !matches!(ti.outcome, ExamineOutcome::TypeContradicted)
                && transcripts.iter().all(|tj| union_fits(&ti.revealed, &tj.revealed, &ti.representative))
        })
        .collect();
    let mut output: Option<(bool, usize)> = None;
    for &i in &surviving {
        if let ExamineOutcome::CertificateFound { value, .. } = transcripts[i].outcome {
            match output {
                None => output = Some((value, i)),
                Some((v, j)) if v != value => {
                    return Err(Error::ConflictDetected(
                        transcripts[j].representative.to_string(),
                        transcripts[i].representative.to_string(),
                    ))
                }
                _ => {}
            }
        }
    }
    if output.is_none() {
        best_effort = true;
    }
    Ok(SimulationRun {
        alpha,
        estimate,
        reduction,
        reduction_note,
        candidates,
        transcripts,
        surviving,
        output: output.map(|(v, _)| v),
        queries: hidden.queries() - start,
        best_effort,
    })
}
