//! Inputs, types, promises, partial assignments and partial functions.
//!
//! An input is a string over the alphabet `[M] = {0, .., M-1}` of length `n`.
//! Its type is the multiplicity vector of its symbols, i.e. its orbit under
//! index permutation. A promise is the set of inputs on which a partial
//! function is defined.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};

pub type Symbol = u8;

/// Alphabet symbol set, used for `S`, `R` and `alphabet(c)`.
pub type SymbolSet = BTreeSet<Symbol>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputString(pub Vec<Symbol>);

impl InputString {
    pub fn new(entries: Vec<Symbol>) -> Self {
        InputString(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "input {self} has length {} but n = {n}",
                self.0.len()
            )));
        }
        if let Some(&s) = self.0.iter().find(|&&s| s as usize >= m) {
            return Err(Error::InvalidInput(format!("symbol {s} not below M = {m} in {self}")));
        }
        Ok(())
    }

    /// The input with its entries permuted: `x_sigma[i] = x[sigma[i]]`.
    pub fn permuted(&self, sigma: &[usize]) -> InputString {
        InputString(sigma.iter().map(|&i| self.0[i]).collect())
    }

    pub fn as_assignment(&self) -> PartialAssignment {
        PartialAssignment(self.0.iter().map(|&s| Some(s)).collect())
    }

    /// Bitmask of positions where `self` and `other` disagree.
    pub fn diff_mask(&self, other: &InputString) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    /// `x` restricted to the positions set in `mask`.
    pub fn restrict(&self, mask: u64) -> PartialAssignment {
        PartialAssignment(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &s)| (mask >> i & 1 == 1).then_some(s))
                .collect(),
        )
    }
}

impl fmt::Display for InputString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Multiplicity vector of a multiset over `[M]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeVector(pub Vec<u32>);

impl TypeVector {
    pub fn new(multiplicities: Vec<u32>) -> Self {
        TypeVector(multiplicities)
    }

    pub fn alphabet_size(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn get(&self, s: Symbol) -> u32 {
        self.0.get(s as usize).copied().unwrap_or(0)
    }

    /// Number of inputs of this type, `n! / prod T_i!`, saturating.
    pub fn orbit_size(&self) -> u128 {
        let mut out: u128 = 1;
        let mut placed: u128 = 0;
        for &c in &self.0 {
            for j in 1..=c as u128 {
                placed += 1;
                // multiply by C(placed, j) incrementally: out *= placed / j
                out = out.saturating_mul(placed) / j;
            }
        }
        out
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &TypeVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// All inputs of this type in lexicographic order.
    pub fn expand(&self) -> Result<Vec<InputString>> {
        budget::check(self.orbit_size())?;
        let mut cur: Vec<Symbol> = self
            .0
            .iter()
            .enumerate()
            .flat_map(|(s, &c)| std::iter::repeat(s as Symbol).take(c as usize))
            .collect();
        let mut out = vec![InputString(cur.clone())];
        while next_permutation(&mut cur) {
            out.push(InputString(cur.clone()));
        }
        Ok(out)
    }

    /// Every type of length `m` summing to `n`, in lexicographic order.
    pub fn all(n: usize, m: usize) -> Vec<TypeVector> {
        fn rec(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<TypeVector>) {
            if slots == 1 {
                cur.push(left);
                out.push(TypeVector(cur.clone()));
                cur.pop();
                return;
            }
            for c in 0..=left {
                cur.push(c);
                rec(left - c, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if m == 0 {
            return out;
        }
        rec(n as u32, m, &mut Vec::with_capacity(m), &mut out);
        out
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn next_permutation(v: &mut [Symbol]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Multiplicity counts of each symbol in `x`.
pub fn type_of(x: &InputString, m: usize) -> TypeVector {
    let mut counts = vec![0u32; m];
    for &s in &x.0 {
        counts[s as usize] += 1;
    }
    TypeVector(counts)
}

/// An element of `([M] ∪ {*})^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialAssignment(pub Vec<Option<Symbol>>);

impl PartialAssignment {
    pub fn empty(n: usize) -> Self {
        PartialAssignment(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of non-`*` entries.
    pub fn size(&self) -> usize {
        self.0.iter().filter(|e| e.is_some()).count()
    }

    pub fn get(&self, i: usize) -> Option<Symbol> {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        self.0[i] = Some(s);
    }

    /// Positions with a revealed symbol, ascending.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter_map(|(i, e)| e.map(|_| i))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, Symbol)> + '_ {
        self.0.iter().enumerate().filter_map(|(i, e)| e.map(|s| (i, s)))
    }

    pub fn alphabet(&self) -> SymbolSet {
        self.0.iter().flatten().copied().collect()
    }

    /// How many revealed entries equal `s`.
    pub fn occurrences(&self, s: Symbol) -> u32 {
        self.0.iter().filter(|e| **e == Some(s)).count() as u32
    }

    pub fn counts(&self, m: usize) -> Vec<u32> {
        let mut out = vec![0u32; m];
        for s in self.0.iter().flatten() {
            out[*s as usize] += 1;
        }
        out
    }

    /// True when no position carries two different symbols.
    pub fn agrees_with(&self, other: &PartialAssignment) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| !matches!((a, b), (Some(x), Some(y)) if x != y))
    }

    /// Union of two agreeing assignments; `None` when they conflict.
    pub fn union(&self, other: &PartialAssignment) -> Option<PartialAssignment> {
        self.agrees_with(other).then(|| {
            PartialAssignment(self.0.iter().zip(&other.0).map(|(a, b)| a.or(*b)).collect())
        })
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "assignment of length {} but n = {n}",
                self.0.len()
            )));
        }
        if let Some(s) = self.0.iter().flatten().find(|&&s| s as usize >= m) {
            return Err(Error::InvalidInput(format!("symbol {s} not below M = {m}")));
        }
        Ok(())
    }

    /// Parses `0,*,2` style text.
    pub fn parse(text: &str) -> Result<PartialAssignment> {
        text.split(',')
            .map(|t| match t.trim() {
                "*" | "" => Ok(None),
                v => v
                    .parse::<Symbol>()
                    .map(Some)
                    .map_err(|e| Error::Parse(format!("bad entry {v:?}: {e}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PartialAssignment)
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match e {
                Some(s) => write!(f, "{s}")?,
                None => write!(f, "*")?,
            }
        }
        write!(f, ")")
    }
}

/// True iff every non-`*` entry of `c` agrees with `x`.
pub fn is_consistent(c: &PartialAssignment, x: &InputString) -> Result<bool> {
    if c.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "assignment length {} vs input length {}",
            c.len(),
            x.len()
        )));
    }
    Ok(c.0.iter().zip(&x.0).all(|(e, s)| e.map_or(true, |v| v == *s)))
}

/// `c - p`: the entries of `c` at positions where `p` is `*`.
pub fn assignment_difference(
    c: &PartialAssignment,
    p: &PartialAssignment,
) -> Result<PartialAssignment> {
    if c.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "assignment lengths {} and {}",
            c.len(),
            p.len()
        )));
    }
    Ok(PartialAssignment(
        c.0.iter()
            .zip(&p.0)
            .map(|(ci, pi)| if pi.is_none() { *ci } else { None })
            .collect(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromiseKind {
    SingleType(TypeVector),
    SymmetricUnion(BTreeSet<TypeVector>),
    /// Sorted explicit input set with its transposition-closure flag.
    Explicit {
        inputs: BTreeSet<InputString>,
        symmetric: bool,
    },
}

/// The domain `X ⊆ [M]^n` of a partial function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseSet {
    n: usize,
    m: usize,
    kind: PromiseKind,
}

impl PromiseSet {
    pub fn single_type(t: TypeVector) -> Result<Self> {
        if t.alphabet_size() == 0 {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        Ok(PromiseSet { n: t.total(), m: t.alphabet_size(), kind: PromiseKind::SingleType(t) })
    }

    pub fn symmetric_union(n: usize, m: usize, types: BTreeSet<TypeVector>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::EmptyPromise);
        }
        for t in &types {
            if t.alphabet_size() != m || t.total() != n {
                return Err(Error::DimensionMismatch(format!("type {t} does not fit n={n}, M={m}")));
            }
        }
        Ok(PromiseSet { n, m, kind: PromiseKind::SymmetricUnion(types) })
    }

    /// Every string in `[M]^n`.
    pub fn total(n: usize, m: usize) -> Result<Self> {
        Self::symmetric_union(n, m, TypeVector::all(n, m).into_iter().collect())
    }

    pub fn explicit(n: usize, m: usize, inputs: impl IntoIterator<Item = InputString>) -> Result<Self> {
        let inputs: BTreeSet<InputString> = inputs.into_iter().collect();
        if inputs.is_empty() {
            return Err(Error::EmptyPromise);
        }
        for x in &inputs {
            x.validate(n, m)?;
        }
        let symmetric = transposition_closed(&inputs, n);
        Ok(PromiseSet { n, m, kind: PromiseKind::Explicit { inputs, symmetric } })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &PromiseKind {
        &self.kind
    }

    pub fn is_single_type(&self) -> bool {
        matches!(self.kind, PromiseKind::SingleType(_))
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            PromiseKind::Explicit { symmetric, .. } => *symmetric,
            _ => true,
        }
    }

    /// Distinct types of members, ascending.
    pub fn types(&self) -> Vec<TypeVector> {
        match &self.kind {
            PromiseKind::SingleType(t) => vec![t.clone()],
            PromiseKind::SymmetricUnion(ts) => ts.iter().cloned().collect(),
            PromiseKind::Explicit { inputs, .. } => inputs
                .iter()
                .map(|x| type_of(x, self.m))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }

    pub fn contains(&self, x: &InputString) -> bool {
        if x.validate(self.n, self.m).is_err() {
            return false;
        }
        match &self.kind {
            PromiseKind::SingleType(t) => type_of(x, self.m) == *t,
            PromiseKind::SymmetricUnion(ts) => ts.contains(&type_of(x, self.m)),
            PromiseKind::Explicit { inputs, .. } => inputs.contains(x),
        }
    }

    pub fn size(&self) -> u128 {
        match &self.kind {
            PromiseKind::SingleType(t) => t.orbit_size(),
            PromiseKind::SymmetricUnion(ts) => {
                ts.iter().fold(0u128, |a, t| a.saturating_add(t.orbit_size()))
            }
            PromiseKind::Explicit { inputs, .. } => inputs.len() as u128,
        }
    }

    /// All members in ascending lexicographic order.
    pub fn expand(&self) -> Result<Vec<InputString>> {
        budget::check(self.size())?;
        match &self.kind {
            PromiseKind::SingleType(t) => t.expand(),
            PromiseKind::SymmetricUnion(ts) => {
                let mut out = Vec::new();
                for t in ts {
                    out.extend(t.expand()?);
                }
                out.sort();
                Ok(out)
            }
            PromiseKind::Explicit { inputs, .. } => Ok(inputs.iter().cloned().collect()),
        }
    }

    /// Symbol multiset feasibility: some member type dominates `counts`.
    pub fn admits_counts(&self, counts: &[u32]) -> bool {
        let fits = |t: &TypeVector| t.0.iter().zip(counts).all(|(a, b)| a >= b);
        match &self.kind {
            PromiseKind::SingleType(t) => fits(t),
            PromiseKind::SymmetricUnion(ts) => ts.iter().any(fits),
            PromiseKind::Explicit { inputs, .. } => {
                inputs.iter().any(|x| fits(&type_of(x, self.m)))
            }
        }
    }
}

fn transposition_closed(inputs: &BTreeSet<InputString>, n: usize) -> bool {
    for x in inputs {
        for i in 0..n {
            for j in i + 1..n {
                if x.0[i] == x.0[j] {
                    continue;
                }
                let mut y = x.clone();
                y.0.swap(i, j);
                if !inputs.contains(&y) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff an explicit promise is closed under all index transpositions.
pub fn verify_symmetric(promise: &PromiseSet) -> Result<bool> {
    match &promise.kind {
        PromiseKind::Explicit { inputs, .. } => {
            budget::check(inputs.len() as u128 * (promise.n * promise.n) as u128)?;
            Ok(transposition_closed(inputs, promise.n))
        }
        _ => Ok(true),
    }
}

/// A group of index and symbol permutations under which a function and its
/// promise are invariant: positions may be permuted within each block and
/// symbols relabeled within each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    block_of: Vec<usize>,
    block_sizes: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<Vec<Symbol>>,
}

impl Symmetry {
    /// No symmetry at all: singleton blocks and singleton classes.
    pub fn trivial(n: usize, m: usize) -> Self {
        Self::new((0..n).collect(), (0..m).collect())
    }

    /// `block_of[i]` names the block of position `i`; `class_of[s]` the class
    /// of symbol `s`. Block and class ids must be dense from 0.
    pub fn new(block_of: Vec<usize>, class_of: Vec<usize>) -> Self {
        let nb = block_of.iter().max().map_or(0, |b| b + 1);
        let mut block_sizes = vec![0; nb];
        for &b in &block_of {
            block_sizes[b] += 1;
        }
        let nc = class_of.iter().max().map_or(0, |c| c + 1);
        let mut classes = vec![Vec::new(); nc];
        for (s, &c) in class_of.iter().enumerate() {
            classes[c].push(s as Symbol);
        }
        Symmetry { block_of, block_sizes, class_of, classes }
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn m(&self) -> usize {
        self.class_of.len()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn class_of(&self, s: Symbol) -> usize {
        self.class_of[s as usize]
    }

    pub fn classes(&self) -> &[Vec<Symbol>] {
        &self.classes
    }

    /// Positions of each block, ascending.
    pub fn block_positions(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_sizes.len()];
        for (i, &b) in self.block_of.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    /// Checks that symbol relabeling within classes preserves the promise.
    pub fn preserves_promise(&self, promise: &PromiseSet) -> bool {
        if self.n() != promise.n() || self.m() != promise.m() {
            return false;
        }
        let swapped = |t: &TypeVector, a: Symbol, b: Symbol| {
            let mut u = t.clone();
            u.0.swap(a as usize, b as usize);
            u
        };
        let pairs: Vec<(Symbol, Symbol)> = self
            .classes
            .iter()
            .flat_map(|c| c.windows(2).map(|w| (w[0], w[1])))
            .collect();
        match promise.kind() {
            PromiseKind::SingleType(t) => pairs.iter().all(|&(a, b)| t.get(a) == t.get(b)),
            PromiseKind::SymmetricUnion(ts) => pairs
                .iter()
                .all(|&(a, b)| ts.iter().all(|t| ts.contains(&swapped(t, a, b)))),
            PromiseKind::Explicit { .. } => {
                self.block_sizes.iter().all(|&s| s == 1) && self.classes.iter().all(|c| c.len() == 1)
            }
        }
    }
}

/// Built-in valuations; each knows its own invariance group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// 0 iff symbol 0 lies in the first `floor(n/2)` entries.
    PermInversion,
    /// OR of binary entries.
    Or,
    /// 0 only on the all-zero string.
    ZeroOnly,
    /// 1 iff the count of symbol `M-1` is at least `cut`.
    Threshold { cut: usize },
}

impl Builtin {
    pub fn eval(&self, x: &InputString, m: usize) -> bool {
        let n = x.len();
        match self {
            Builtin::PermInversion => !x.0[..n / 2].contains(&0),
            Builtin::Or => x.0.iter().any(|&s| s != 0),
            Builtin::ZeroOnly => x.0.iter().any(|&s| s != 0),
            Builtin::Threshold { cut } => {
                let top = (m - 1) as Symbol;
                x.0.iter().filter(|&&s| s == top).count() >= *cut
            }
        }
    }

    pub fn symmetry(&self, n: usize, m: usize) -> Symmetry {
        match self {
            Builtin::PermInversion => Symmetry::new(
                (0..n).map(|i| usize::from(i >= n / 2)).collect(),
                (0..m).map(|s| usize::from(s != 0)).collect(),
            ),
            Builtin::Or | Builtin::ZeroOnly => {
                Symmetry::new(vec![0; n], (0..m).map(|s| usize::from(s != 0)).collect())
            }
            Builtin::Threshold { .. } => {
                Symmetry::new(vec![0; n], (0..m).map(|s| usize::from(s + 1 == m)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Table(BTreeMap<InputString, bool>),
    Builtin(Builtin),
}

/// `f : X -> {0,1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFunction {
    promise: PromiseSet,
    valuation: Valuation,
    symmetry: Symmetry,
}

impl PartialFunction {
    /// A tabulated function; the table must cover the promise exactly.
    pub fn from_table(promise: PromiseSet, table: BTreeMap<InputString, bool>) -> Result<Self> {
        for x in table.keys() {
            if !promise.contains(x) {
                return Err(Error::InvalidInput(format!("table entry {x} is outside the promise")));
            }
        }
        if table.len() as u128 != promise.size() {
            return Err(Error::InvalidInput(format!(
                "table has {} entries but the promise has {} members",
                table.len(),
                promise.size()
            )));
        }
        let symmetry = Symmetry::trivial(promise.n(), promise.m());
        Ok(PartialFunction { promise, valuation: Valuation::Table(table), symmetry })
    }

    /// Tabulates `eval` over the expanded promise.
    pub fn from_fn(promise: PromiseSet, eval: impl Fn(&InputString) -> bool) -> Result<Self> {
        let table = promise.expand()?.into_iter().map(|x| {
            let v = eval(&x);
            (x, v)
        });
        Self::from_table(promise.clone(), table.collect())
    }

    pub fn builtin(promise: PromiseSet, builtin: Builtin) -> Result<Self> {
        let symmetry = builtin.symmetry(promise.n(), promise.m());
        if !symmetry.preserves_promise(&promise) {
            return Err(Error::InvalidParameters(format!(
                "{builtin:?} symmetry does not preserve the promise"
            )));
        }
        Ok(PartialFunction { promise, valuation: Valuation::Builtin(builtin), symmetry })
    }

    pub fn promise(&self) -> &PromiseSet {
        &self.promise
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn n(&self) -> usize {
        self.promise.n
    }

    pub fn m(&self) -> usize {
        self.promise.m
    }

    /// Value on a promise member; `None` outside the promise.
    pub fn eval(&self, x: &InputString) -> Option<bool> {
        if !self.promise.contains(x) {
            return None;
        }
        match &self.valuation {
            Valuation::Table(t) => t.get(x).copied(),
            Valuation::Builtin(b) => Some(b.eval(x, self.m())),
        }
    }

    /// Every member paired with its value, ascending.
    pub fn members(&self) -> Result<Vec<(InputString, bool)>> {
        if let Valuation::Table(t) = &self.valuation {
            budget::check(t.len() as u128)?;
            return Ok(t.iter().map(|(x, v)| (x.clone(), *v)).collect());
        }
        Ok(self
            .promise
            .expand()?
            .into_iter()
            .map(|x| {
                let v = self.eval(&x).expect("expanded member");
                (x, v)
            })
            .collect())
    }

    /// The same function with the promise cut down to inputs consistent with
    /// `p` and of type `t`, tabulated.
    pub fn restrict_to_type(&self, t: &TypeVector, p: &PartialAssignment) -> Result<Vec<(InputString, bool)>> {
        let mut out = Vec::new();
        for x in t.expand()? {
            if is_consistent(p, &x)? {
                if let Some(v) = self.eval(&x) {
                    out.push((x, v));
                }
            }
        }
        Ok(out)
    }
}
