//! Adversary bounds: evaluating `m m' / l_max` on a relation, the Grover-style
//! relation from sensitive blocks, the hard-instance construction from a
//! lemma structure `(p, S)`, and the strongtype summary.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemma::{search_certificates, CertificateFilter};
use crate::measures::SensitiveBlockSet;
use crate::model::{type_of, InputString, PartialAssignment, PartialFunction, PromiseKind, Symbol, SymbolSet};
use crate::oracle::oracle_for;

/// Inputs split by value and a relation between them, given as index pairs
/// `(zero index, one index)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryInstance {
    pub zero_side: Vec<InputString>,
    pub one_side: Vec<InputString>,
    pub relation: Vec<(usize, usize)>,
}

impl AdversaryInstance {
    /// Relates every zero input to every one input.
    pub fn complete(zero_side: Vec<InputString>, one_side: Vec<InputString>) -> Self {
        let relation = (0..zero_side.len())
            .flat_map(|a| (0..one_side.len()).map(move |b| (a, b)))
            .collect();
        AdversaryInstance { zero_side, one_side, relation }
    }

    /// Checks sides against `f`.
    pub fn validate_against(&self, f: &PartialFunction) -> Result<()> {
        for (side, v) in [(&self.zero_side, false), (&self.one_side, true)] {
            for x in side {
                if f.eval(x) != Some(v) {
                    return Err(Error::InvalidInput(format!("{x} is not a member with value {}", u8::from(v))));
                }
            }
        }
        Ok(())
    }

    /// Applies an index permutation to every input.
    pub fn permuted(&self, sigma: &[usize]) -> AdversaryInstance {
        AdversaryInstance {
            zero_side: self.zero_side.iter().map(|x| x.permuted(sigma)).collect(),
            one_side: self.one_side.iter().map(|x| x.permuted(sigma)).collect(),
            relation: self.relation.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryBound {
    pub m: usize,
    pub m_prime: usize,
    pub l_max: usize,
    /// `sqrt(m m' / l_max)`.
    pub bound: f64,
}

impl AdversaryBound {
    /// `m m' / l_max` as an exact fraction `(numerator, denominator)`.
    pub fn ratio(&self) -> (usize, usize) {
        (self.m * self.m_prime, self.l_max)
    }

    pub fn ratio_f64(&self) -> f64 {
        (self.m * self.m_prime) as f64 / self.l_max as f64
    }
}

/// Evaluates `m`, `m'`, `l_max` and the bound `sqrt(m m' / l_max)`.
pub fn evaluate_adversary(instance: &AdversaryInstance) -> Result<AdversaryBound> {
    if instance.relation.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let n = instance
        .zero_side
        .first()
        .or(instance.one_side.first())
        .map(InputString::len)
        .ok_or(Error::EmptyRelation)?;
    for x in instance.zero_side.iter().chain(&instance.one_side) {
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!("input {x} has length {} not {n}", x.len())));
        }
    }
    let mut deg_a = vec![0usize; instance.zero_side.len()];
    let mut deg_b = vec![0usize; instance.one_side.len()];
    let mut l_a = vec![vec![0usize; n]; instance.zero_side.len()];
    let mut l_b = vec![vec![0usize; n]; instance.one_side.len()];
    for &(a, b) in &instance.relation {
        let x = instance
            .zero_side
            .get(a)
            .ok_or_else(|| Error::InvalidInput(format!("relation index {a} out of range")))?;
        let y = instance
            .one_side
            .get(b)
            .ok_or_else(|| Error::InvalidInput(format!("relation index {b} out of range")))?;
        deg_a[a] += 1;
        deg_b[b] += 1;
        for i in 0..n {
            if x.0[i] != y.0[i] {
                l_a[a][i] += 1;
                l_b[b][i] += 1;
            }
        }
    }
    if let Some(a) = deg_a.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedVertex(instance.zero_side[a].to_string()));
    }
    if let Some(b) = deg_b.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedVertex(instance.one_side[b].to_string()));
    }
    let mut l_max = 0;
    for &(a, b) in &instance.relation {
        let x = &instance.zero_side[a];
        let y = &instance.one_side[b];
        for i in 0..n {
            if x.0[i] != y.0[i] {
                l_max = l_max.max(l_a[a][i] * l_b[b][i]);
            }
        }
    }
    if l_max == 0 {
        return Err(Error::InvalidInput("related inputs are identical".into()));
    }
    let m = *deg_a.iter().min().unwrap();
    let m_prime = *deg_b.iter().min().unwrap();
    let bound = ((m * m_prime) as f64 / l_max as f64).sqrt();
    Ok(AdversaryBound { m, m_prime, l_max, bound })
}

/// `x` against the flipping witnesses of disjoint sensitive blocks, fully
/// related.
pub fn grover_relation(f: &PartialFunction, blocks: &SensitiveBlockSet) -> Result<AdversaryInstance> {
    blocks.validate(f)?;
    if blocks.blocks.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let x = blocks.base.clone();
    let witnesses = blocks.witnesses.clone();
    Ok(if f.eval(&x) == Some(false) {
        AdversaryInstance::complete(vec![x], witnesses)
    } else {
        AdversaryInstance::complete(witnesses, vec![x])
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongtypeReport {
    pub d: u32,
    pub c: usize,
    /// `sqrt(D) / 4`.
    pub k: f64,
    /// `max(sqrt(C), k / C)`.
    pub beta: f64,
    pub k_cube_root: f64,
    pub beta_ge_k_cube_root: bool,
    pub claims: Vec<String>,
}

/// `max(sqrt(C), k / C)`.
pub fn beta(c: f64, k: f64) -> f64 {
    c.sqrt().max(k / c)
}

/// The strongtype summary for a single-type function with the given D and C.
pub fn strongtype_report(d: u32, c: usize) -> StrongtypeReport {
    let k = (d as f64).sqrt() / 4.0;
    let beta = if c == 0 { 0.0 } else { beta(c as f64, k) };
    let k_cube_root = k.cbrt();
    let beta_ge_k_cube_root = c == 0 || beta >= k_cube_root * (1.0 - 1e-9);
    let claims = vec![
        format!("R(f) = Omega(beta) with beta = {beta:.6}"),
        format!("Q(f) = Omega(sqrt(beta)) with sqrt(beta) = {:.6}", beta.sqrt()),
        format!("R(f) = Omega(D^(1/6)), D^(1/6) = {:.6}", (d as f64).powf(1.0 / 6.0)),
        format!("Q(f) = Omega(D^(1/12)), D^(1/12) = {:.6}", (d as f64).powf(1.0 / 12.0)),
    ];
    StrongtypeReport { d, c, k, beta, k_cube_root, beta_ge_k_cube_root, claims }
}

/// One certificate's contribution to `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub value: bool,
    /// Positions first assigned by this certificate.
    pub positions: Vec<usize>,
    /// The certificate's symbols on those positions.
    pub original: Vec<Symbol>,
    /// What `r` holds there after replacing symbols of `S`.
    pub substituted: Vec<Symbol>,
}

impl Segment {
    /// Multiset of `S` symbols displaced by the substitution.
    fn displaced(&self, s: &SymbolSet) -> BTreeMap<Symbol, u32> {
        let mut out = BTreeMap::new();
        for &sym in &self.original {
            if s.contains(&sym) {
                *out.entry(sym).or_insert(0) += 1;
            }
        }
        out
    }

    fn substitutes(&self, s: &SymbolSet) -> Vec<Symbol> {
        self.original
            .iter()
            .zip(&self.substituted)
            .filter(|(o, _)| s.contains(o))
            .map(|(_, &t)| t)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardInstanceConstruction {
    pub k: usize,
    pub certificate_bound: usize,
    pub p: PartialAssignment,
    pub s: SymbolSet,
    /// `r` after all rounds, with `S` symbols replaced.
    pub r: PartialAssignment,
    pub segments: Vec<Segment>,
    pub rounds_completed: usize,
    /// `floor((n - 10 k^2) / (4 k))`.
    pub proof_cap: i64,
    pub alpha: usize,
    /// Whether `rounds_completed >= floor(k / (2 C)) - 1`.
    pub round_bound_holds: bool,
    /// Componentwise maximum of the displaced `S` multisets, sorted.
    pub displaced: Vec<Symbol>,
    /// Common inactive filling of every bin, sorted.
    pub filler: Vec<Symbol>,
    /// Bin positions, one per kept segment.
    pub bins: Vec<Vec<usize>>,
    pub instance: AdversaryInstance,
}

fn multiset_vec(ms: &BTreeMap<Symbol, u32>) -> Vec<Symbol> {
    ms.iter().flat_map(|(&s, &c)| std::iter::repeat(s).take(c as usize)).collect()
}

/// Greedy common filler of size `len` from symbols outside `S`, keeping
/// `(2 alpha - 1)` extra copies available.
fn choose_filler(avail: &[i64], s: &SymbolSet, len: usize, alpha: usize) -> Option<Vec<u32>> {
    let copies = 2 * alpha as i64 - 1;
    let mut f = vec![0u32; avail.len()];
    for _ in 0..len {
        let pick = (0..avail.len())
            .filter(|&i| !s.contains(&(i as Symbol)))
            .filter(|&i| copies * (f[i] as i64 + 1) <= avail[i])
            .max_by_key(|&i| (avail[i] - copies * f[i] as i64, std::cmp::Reverse(i)))?;
        f[pick] += 1;
    }
    Some(f)
}

/// Builds the two-sided hard instance from a structure `(p, S)` for a
/// single-type `f` with `C(f) <= k`.
pub fn build_hard_instance(
    f: &PartialFunction,
    p: &PartialAssignment,
    s: &SymbolSet,
    k: usize,
    certificate_bound: usize,
) -> Result<HardInstanceConstruction> {
    let PromiseKind::SingleType(t) = f.promise().kind() else {
        return Err(Error::InvalidInput("hard instances need a single-type promise".into()));
    };
    p.validate(f.n(), f.m())?;
    let n = f.n();
    let m = f.m();
    if k == 0 || certificate_bound == 0 {
        return Err(Error::InvalidParameters("k and C must be positive".into()));
    }
    let proof_cap = (n as i64 - 10 * (k * k) as i64).div_euclid(4 * k as i64);
    if proof_cap <= 0 {
        return Err(Error::CapNonpositive { cap: proof_cap });
    }
    let oracle = oracle_for(f);
    let mut r = PartialAssignment::empty(n);
    let mut segments: Vec<Segment> = Vec::new();
    'rounds: while r.size() <= k {
        for value in [false, true] {
            let mut chosen = None;
            let filter = CertificateFilter {
                max_size: certificate_bound,
                agree_with: vec![p, &r],
                avoid: None,
                value: Some(value),
                legal_with: Some(p),
            };
            search_certificates(oracle.as_ref(), &filter, |c, _| {
                chosen = Some(c.clone());
                ControlFlow::Break(())
            })?;
            let c = chosen.ok_or_else(|| Error::SelectionFailed {
                r_size: r.size(),
                detail: format!("no {}-certificate consistent with p and r", u8::from(value)),
            })?;
            let positions: Vec<usize> =
                c.domain().filter(|&i| p.get(i).is_none() && r.get(i).is_none()).collect();
            if positions.is_empty() {
                return Err(Error::SelectionFailed {
                    r_size: r.size(),
                    detail: format!("certificate {c} adds no position"),
                });
            }
            let mut original = Vec::new();
            let mut substituted = Vec::new();
            for &i in &positions {
                let sym = c.get(i).unwrap();
                let used = |x: Symbol| p.occurrences(x) + r.occurrences(x);
                let put = if s.contains(&sym) {
                    (0..m as Symbol)
                        .find(|x| !s.contains(x) && used(*x) < t.get(*x))
                        .ok_or_else(|| Error::PaddingInfeasible(format!("no substitute for symbol {sym}")))?
                } else {
                    sym
                };
                r.set(i, put);
                original.push(sym);
                substituted.push(put);
            }
            segments.push(Segment { value, positions, original, substituted });
            if r.size() > k {
                break 'rounds;
            }
        }
    }
    let rounds_completed = segments.len() / 2;
    let round_bound_holds = rounds_completed as i64 >= (k / (2 * certificate_bound)) as i64 - 1;
    if rounds_completed == 0 {
        return Err(Error::SelectionFailed { r_size: r.size(), detail: "no complete round".into() });
    }
    let base_avail: Vec<i64> = (0..m)
        .map(|x| t.get(x as Symbol) as i64 - p.occurrences(x as Symbol) as i64 - r.occurrences(x as Symbol) as i64)
        .collect();
    let mut last_reason = String::new();
    let max_alpha = rounds_completed.min(proof_cap as usize);
    for alpha in (1..=max_alpha).rev() {
        let kept = &segments[..2 * alpha];
        let mut star: BTreeMap<Symbol, u32> = BTreeMap::new();
        for seg in kept {
            let d = seg.displaced(s);
            if d.is_empty() {
                return Err(Error::SelectionFailed {
                    r_size: r.size(),
                    detail: format!("certificate segment {:?} uses no symbol of S", seg.positions),
                });
            }
            for (sym, cnt) in d {
                let e = star.entry(sym).or_insert(0);
                *e = (*e).max(cnt);
            }
        }
        let mut avail = base_avail.clone();
        for (&sym, &cnt) in &star {
            avail[sym as usize] -= cnt as i64;
        }
        if avail.iter().any(|&a| a < 0) {
            last_reason = format!("alpha = {alpha}: type too small for p, r and the displaced symbols");
            continue;
        }
        let width: usize = star.values().map(|&c| c as usize).sum();
        let Some(filler) = choose_filler(&avail, s, width, alpha) else {
            last_reason = format!("alpha = {alpha}: no filler of size {width} outside S");
            continue;
        };
        let copies = 2 * alpha as i64 - 1;
        let rest: Vec<u32> = (0..m).map(|x| (avail[x] - copies * filler[x] as i64) as u32).collect();
        let free: Vec<usize> = (0..n).filter(|&i| p.get(i).is_none() && r.get(i).is_none()).collect();
        let bins: Vec<Vec<usize>> = (0..2 * alpha).map(|b| free[b * width..(b + 1) * width].to_vec()).collect();
        let rest_positions = &free[2 * alpha * width..];
        let filler_ms: BTreeMap<Symbol, u32> =
            filler.iter().enumerate().filter(|(_, &c)| c > 0).map(|(x, &c)| (x as Symbol, c)).collect();
        let filler_vec = multiset_vec(&filler_ms);
        let rest_vec: Vec<Symbol> =
            rest.iter().enumerate().flat_map(|(x, &c)| std::iter::repeat(x as Symbol).take(c as usize)).collect();
        debug_assert_eq!(rest_vec.len(), rest_positions.len());
        let mut base = vec![0 as Symbol; n];
        for (i, sym) in p.entries().chain(r.entries()) {
            base[i] = sym;
        }
        for (&i, &sym) in rest_positions.iter().zip(&rest_vec) {
            base[i] = sym;
        }
        for bin in &bins {
            for (&i, &sym) in bin.iter().zip(&filler_vec) {
                base[i] = sym;
            }
        }
        let mut zero_side = Vec::new();
        let mut one_side = Vec::new();
        for (seg, bin) in kept.iter().zip(&bins) {
            let mut x = base.clone();
            for (&i, &sym) in seg.positions.iter().zip(&seg.original) {
                x[i] = sym;
            }
            let mut fill = star.clone();
            for (sym, cnt) in seg.displaced(s) {
                *fill.get_mut(&sym).unwrap() -= cnt;
            }
            let mut active = multiset_vec(&fill);
            active.extend(seg.substitutes(s));
            active.sort_unstable();
            for (&i, &sym) in bin.iter().zip(&active) {
                x[i] = sym;
            }
            let x = InputString(x);
            if type_of(&x, m) != *t {
                return Err(Error::PaddingInfeasible(format!("input {x} left the type")));
            }
            if f.eval(&x) != Some(seg.value) {
                return Err(Error::SelectionFailed {
                    r_size: r.size(),
                    detail: format!("input {x} does not take value {}", u8::from(seg.value)),
                });
            }
            if seg.value {
                one_side.push(x);
            } else {
                zero_side.push(x);
            }
        }
        return Ok(HardInstanceConstruction {
            k,
            certificate_bound,
            p: p.clone(),
            s: s.clone(),
            r,
            segments,
            rounds_completed,
            proof_cap,
            alpha,
            round_bound_holds,
            displaced: multiset_vec(&star),
            filler: filler_vec,
            bins,
            instance: AdversaryInstance::complete(zero_side, one_side),
        });
    }
    Err(Error::PaddingInfeasible(last_reason))
}
