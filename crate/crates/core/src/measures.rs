//! Exact D, C, bs and s by exhaustive search, and the inequality chain
//! relating them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::adversary::{strongtype_report, StrongtypeReport};
use crate::budget;
use crate::error::{Error, Result};
use crate::matching::matching_size;
use crate::model::{InputString, PartialAssignment, PartialFunction, PromiseKind, Symbol};
use crate::oracle::{oracle_for, OrbitOracle, ValueOracle};
use crate::symmetric::{distinguishing_distance, TypeDistanceReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionTree {
    Leaf(bool),
    Node {
        query: usize,
        children: BTreeMap<Symbol, DecisionTree>,
    },
}

impl DecisionTree {
    pub fn depth(&self) -> u32 {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { children, .. } => {
                1 + children.values().map(DecisionTree::depth).max().unwrap_or(0)
            }
        }
    }

    /// Follows the tree on `x`; `None` when `x` falls off a branch.
    pub fn evaluate(&self, x: &InputString) -> Option<bool> {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(v) => return Some(*v),
                DecisionTree::Node { query, children } => node = children.get(&x.0[*query])?,
            }
        }
    }
}

/// Minimax over surviving promise subsets, memoized on the sorted survivor
/// index list.
struct SurvivorSearch {
    inputs: Vec<InputString>,
    values: Vec<bool>,
    n: usize,
    memo: HashMap<Vec<u32>, (u32, Option<usize>)>,
}

impl SurvivorSearch {
    fn new(members: Vec<(InputString, bool)>, n: usize) -> Self {
        let (inputs, values) = members.into_iter().unzip();
        SurvivorSearch { inputs, values, n, memo: HashMap::new() }
    }

    fn split(&self, surv: &[u32], i: usize) -> BTreeMap<Symbol, Vec<u32>> {
        let mut parts: BTreeMap<Symbol, Vec<u32>> = BTreeMap::new();
        for &k in surv {
            parts.entry(self.inputs[k as usize].0[i]).or_default().push(k);
        }
        parts
    }

    fn solve(&mut self, surv: &[u32]) -> Result<u32> {
        if let Some(&(d, _)) = self.memo.get(surv) {
            return Ok(d);
        }
        let first = self.values[surv[0] as usize];
        if surv.iter().all(|&k| self.values[k as usize] == first) {
            self.memo.insert(surv.to_vec(), (0, None));
            return Ok(0);
        }
        let mut best = u32::MAX;
        let mut best_q = None;
        for i in 0..self.n {
            let parts = self.split(surv, i);
            if parts.len() < 2 {
                continue;
            }
            let mut worst = 0;
            for part in parts.values() {
                worst = worst.max(self.solve(part)?);
                if worst + 1 >= best {
                    break;
                }
            }
            if worst + 1 < best {
                best = worst + 1;
                best_q = Some(i);
                if best == 1 {
                    break;
                }
            }
        }
        budget::check(self.memo.len() as u128 + 1)?;
        self.memo.insert(surv.to_vec(), (best, best_q));
        Ok(best)
    }

    fn tree(&mut self, surv: &[u32]) -> Result<DecisionTree> {
        self.solve(surv)?;
        match self.memo[surv] {
            (_, None) => Ok(DecisionTree::Leaf(self.values[surv[0] as usize])),
            (_, Some(q)) => {
                let mut children = BTreeMap::new();
                for (s, part) in self.split(surv, q) {
                    children.insert(s, self.tree(&part)?);
                }
                Ok(DecisionTree::Node { query: q, children })
            }
        }
    }
}

/// Exact D(f) with an optimal decision tree (lowest query index among ties).
pub fn deterministic_complexity(f: &PartialFunction) -> Result<(u32, DecisionTree)> {
    deterministic_complexity_of(f.members()?, f.n())
}

/// Same search over an explicit list of members, used for restrictions.
pub fn deterministic_complexity_of(
    members: Vec<(InputString, bool)>,
    n: usize,
) -> Result<(u32, DecisionTree)> {
    if members.is_empty() {
        return Err(Error::EmptyPromise);
    }
    let mut search = SurvivorSearch::new(members, n);
    let all: Vec<u32> = (0..search.inputs.len() as u32).collect();
    let depth = search.solve(&all)?;
    let tree = search.tree(&all)?;
    Ok((depth, tree))
}

/// Exact D(f) using the symmetry-reduced solver for symmetric promises and the
/// survivor search otherwise.
pub fn deterministic_depth(f: &PartialFunction) -> Result<u32> {
    match f.promise().kind() {
        PromiseKind::Explicit { .. } => deterministic_complexity(f).map(|(d, _)| d),
        _ => OrbitOracle::new(f).depth(),
    }
}

/// Iterates `k`-subsets of `{0..n}` as bitmasks in increasing numeric order.
pub(crate) fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = (k <= n).then_some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < limit).then_some(nxt)
        };
        Some(cur)
    })
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > 63 {
        return Err(Error::InvalidInput(format!("n = {n} exceeds the 63-position limit")));
    }
    budget::check(1u128 << n)
}

/// Smallest certificate consistent with `x`, searching subsets by size.
pub fn min_certificate(oracle: &dyn ValueOracle, x: &InputString, v: bool) -> Result<PartialAssignment> {
    let n = x.len();
    check_width(n)?;
    for k in 0..=n {
        for mask in subsets_of_size(n, k) {
            let c = x.restrict(mask);
            if oracle.is_certificate(&c, v)?.holds {
                return Ok(c);
            }
        }
    }
    Ok(x.as_assignment())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub input: InputString,
    pub value: bool,
    pub size: usize,
    pub certificate: PartialAssignment,
}

/// C(f) and per-input C_x over the oracle's representatives.
pub fn certificate_complexity(f: &PartialFunction) -> Result<(usize, Vec<CertificateRow>)> {
    let oracle = oracle_for(f);
    certificate_complexity_with(oracle.as_ref())
}

pub fn certificate_complexity_with(oracle: &dyn ValueOracle) -> Result<(usize, Vec<CertificateRow>)> {
    let f = oracle.function();
    let mut rows = Vec::new();
    for x in oracle.representatives()? {
        let v = f.eval(&x).expect("representative in promise");
        let certificate = min_certificate(oracle, &x, v)?;
        rows.push(CertificateRow { input: x, value: v, size: certificate.size(), certificate });
    }
    let c = rows.iter().map(|r| r.size).max().unwrap_or(0);
    Ok((c, rows))
}

/// Disjoint sensitive blocks of one input with their flipping witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitiveBlockSet {
    pub base: InputString,
    pub blocks: Vec<Vec<usize>>,
    pub witnesses: Vec<InputString>,
}

impl SensitiveBlockSet {
    pub fn validate(&self, f: &PartialFunction) -> Result<()> {
        let fx = f
            .eval(&self.base)
            .ok_or_else(|| Error::InvalidBlocks(format!("base {} outside promise", self.base)))?;
        if self.blocks.len() != self.witnesses.len() {
            return Err(Error::InvalidBlocks("blocks and witnesses differ in number".into()));
        }
        let mut used = 0u64;
        for (b, y) in self.blocks.iter().zip(&self.witnesses) {
            let mask = b.iter().fold(0u64, |m, &i| m | 1 << i);
            if mask & used != 0 {
                return Err(Error::InvalidBlocks("blocks overlap".into()));
            }
            used |= mask;
            if self.base.diff_mask(y) != mask {
                return Err(Error::InvalidBlocks(format!("witness {y} does not differ exactly on {b:?}")));
            }
            match f.eval(y) {
                Some(fy) if fy != fx => {}
                _ => return Err(Error::InvalidBlocks(format!("witness {y} does not flip f"))),
            }
        }
        Ok(())
    }
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Minimal sensitive blocks of `x`: minimal sets `b` such that some member
/// differing from `x` only inside `b` flips the value.
pub fn minimal_sensitive_blocks(oracle: &dyn ValueOracle, x: &InputString, v: bool) -> Result<Vec<u64>> {
    let n = x.len();
    check_width(n)?;
    let full = full_mask(n);
    let mut found: Vec<u64> = Vec::new();
    for k in 1..=n {
        for b in subsets_of_size(n, k) {
            if found.iter().any(|&m| m & b == m) {
                continue;
            }
            if oracle.values(&x.restrict(full & !b))?.contains(!v) {
                found.push(b);
            }
        }
    }
    Ok(found)
}

/// Maximum number of pairwise disjoint masks (exact branch and bound).
pub fn max_disjoint_packing(blocks: &[u64]) -> Vec<u64> {
    let mut sorted = blocks.to_vec();
    sorted.sort_by_key(|b| (b.count_ones(), *b));
    let mut best = Vec::new();
    let mut cur = Vec::new();
    fn rec(blocks: &[u64], idx: usize, used: u64, cur: &mut Vec<u64>, best: &mut Vec<u64>) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if idx == blocks.len() {
            return;
        }
        let free = !used;
        let compatible = blocks[idx..].iter().filter(|&&b| b & used == 0).count();
        let min_size = blocks[idx..]
            .iter()
            .filter(|&&b| b & used == 0)
            .map(|b| b.count_ones())
            .min()
            .unwrap_or(1)
            .max(1);
        let room = (free.count_ones() / min_size) as usize;
        if cur.len() + compatible.min(room) <= best.len() {
            return;
        }
        let b = blocks[idx];
        if b & used == 0 {
            cur.push(b);
            rec(blocks, idx + 1, used | b, cur, best);
            cur.pop();
        }
        rec(blocks, idx + 1, used, cur, best);
    }
    rec(&sorted, 0, 0, &mut cur, &mut best);
    best
}

/// Completes `c` to a promise member with value `target`, assigning free
/// positions in ascending order with the smallest workable symbol.
pub fn find_completion(oracle: &dyn ValueOracle, c: &PartialAssignment, target: bool) -> Result<Option<InputString>> {
    if !oracle.values(c)?.contains(target) {
        return Ok(None);
    }
    let m = oracle.function().m();
    let mut cur = c.clone();
    for i in 0..cur.len() {
        if cur.get(i).is_some() {
            continue;
        }
        let mut placed = false;
        for s in 0..m as Symbol {
            cur.set(i, s);
            if oracle.values(&cur)?.contains(target) {
                placed = true;
                break;
            }
        }
        debug_assert!(placed);
    }
    Ok(Some(InputString(cur.0.into_iter().map(|e| e.unwrap()).collect())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRow {
    pub input: InputString,
    pub bs: usize,
    pub minimal_blocks: usize,
}

/// bs(f), per-input bs_x and a witness packing for an input attaining bs.
pub fn block_sensitivity(f: &PartialFunction) -> Result<(usize, Vec<BlockRow>, SensitiveBlockSet)> {
    let oracle = oracle_for(f);
    block_sensitivity_with(oracle.as_ref())
}

pub fn block_sensitivity_with(
    oracle: &dyn ValueOracle,
) -> Result<(usize, Vec<BlockRow>, SensitiveBlockSet)> {
    let f = oracle.function();
    let mut rows = Vec::new();
    let mut best: Option<(usize, InputString, Vec<u64>)> = None;
    for x in oracle.representatives()? {
        let v = f.eval(&x).expect("representative in promise");
        let blocks = minimal_sensitive_blocks(oracle, &x, v)?;
        let packing = max_disjoint_packing(&blocks);
        rows.push(BlockRow { input: x.clone(), bs: packing.len(), minimal_blocks: blocks.len() });
        if best.as_ref().map_or(true, |b| packing.len() > b.0) {
            best = Some((packing.len(), x, packing));
        }
    }
    let (bs, base, packing) = best.ok_or(Error::EmptyPromise)?;
    let full = full_mask(base.len());
    let v = f.eval(&base).unwrap();
    let mut blocks = Vec::new();
    let mut witnesses = Vec::new();
    for b in packing {
        let y = find_completion(oracle, &base.restrict(full & !b), !v)?
            .expect("sensitive block has a witness");
        blocks.push(mask_to_vec(b));
        witnesses.push(y);
    }
    Ok((bs, rows, SensitiveBlockSet { base, blocks, witnesses }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub input: InputString,
    pub s: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Sensitive pairs `{i, j}` of `x`: some member differing from `x` only
/// inside `{i, j}` flips the value.
pub fn sensitive_pairs(oracle: &dyn ValueOracle, x: &InputString, v: bool) -> Result<Vec<(usize, usize)>> {
    let n = x.len();
    check_width(n)?;
    let full = full_mask(n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = 1u64 << i | 1u64 << j;
            if oracle.values(&x.restrict(full & !b))?.contains(!v) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// s(f) and per-input s_x as maximum matchings of the sensitive-pair graph.
pub fn sensitivity(f: &PartialFunction) -> Result<(usize, Vec<SensitivityRow>)> {
    let oracle = oracle_for(f);
    sensitivity_with(oracle.as_ref())
}

pub fn sensitivity_with(oracle: &dyn ValueOracle) -> Result<(usize, Vec<SensitivityRow>)> {
    let f = oracle.function();
    let mut rows = Vec::new();
    for x in oracle.representatives()? {
        let v = f.eval(&x).expect("representative in promise");
        let edges = sensitive_pairs(oracle, &x, v)?;
        let s = matching_size(x.len(), &edges);
        rows.push(SensitivityRow { input: x, s, edges });
    }
    let s = rows.iter().map(|r| r.s).max().unwrap_or(0);
    Ok((s, rows))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRow {
    pub input: InputString,
    pub value: bool,
    pub c: usize,
    pub bs: usize,
    pub s: usize,
    pub certificate: PartialAssignment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    pub m: usize,
    pub single_type: bool,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "C")]
    pub c: usize,
    pub bs: usize,
    pub s: usize,
    /// One row per input, or per orbit representative for symmetric promises.
    pub per_input: Vec<InputRow>,
    pub r_interval: Interval,
    pub r0_interval: Interval,
    pub q_interval: Interval,
    pub strongtype: Option<StrongtypeReport>,
    pub distance: Option<TypeDistanceReport>,
    pub witness: SensitiveBlockSet,
    /// Whether `C <= 3 bs s` was checked (single-type promise with s > 0).
    pub product_bound_checked: bool,
    pub anomalies: Vec<String>,
}

/// Computes D, C, bs, s and checks `s <= bs <= C <= D` and, on single-type
/// promises with `s > 0`, `C <= 3 bs s`.
pub fn inequality_chain(f: &PartialFunction) -> Result<MeasureReport> {
    let oracle = oracle_for(f);
    let (c, crow) = certificate_complexity_with(oracle.as_ref())?;
    let (bs, brow, witness) = block_sensitivity_with(oracle.as_ref())?;
    let (s, srow) = sensitivity_with(oracle.as_ref())?;
    let d = deterministic_depth(f)?;
    let per_input = crow
        .into_iter()
        .zip(brow)
        .zip(srow)
        .map(|((cr, br), sr)| InputRow {
            input: cr.input,
            value: cr.value,
            c: cr.size,
            bs: br.bs,
            s: sr.s,
            certificate: cr.certificate,
        })
        .collect::<Vec<_>>();
    let single_type = f.promise().is_single_type();
    let describe = || format!("n={}, M={}, promise={:?}, s={s}, bs={bs}, C={c}, D={d}", f.n(), f.m(), f.promise().kind());
    if s > bs {
        return Err(Error::InequalityViolation(format!("s > bs on {}", describe())));
    }
    if bs > c {
        return Err(Error::InequalityViolation(format!("bs > C on {}", describe())));
    }
    if c as u32 > d {
        return Err(Error::InequalityViolation(format!("C > D on {}", describe())));
    }
    let mut anomalies = Vec::new();
    let mut product_bound_checked = false;
    if single_type {
        if s > 0 {
            product_bound_checked = true;
            if c > 3 * bs * s {
                return Err(Error::InequalityViolation(format!("C > 3 bs s on {}", describe())));
            }
        } else if c > 0 {
            anomalies.push(format!("s = 0 while f is non-constant (bs = {bs}, C = {c})"));
        }
    }
    let strongtype = single_type.then(|| strongtype_report(d, c));
    let distance = distinguishing_distance(f).ok();
    let dd = d as f64;
    Ok(MeasureReport {
        n: f.n(),
        m: f.m(),
        single_type,
        d,
        c,
        bs,
        s,
        per_input,
        r_interval: Interval { lower: bs as f64, upper: dd },
        r0_interval: Interval { lower: bs as f64, upper: dd },
        q_interval: Interval { lower: (bs as f64).sqrt().ceil(), upper: dd },
        strongtype,
        distance,
        witness,
        product_bound_checked,
        anomalies,
    })
}
