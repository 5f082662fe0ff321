//! Value-set queries over the promise members consistent with a partial
//! assignment.
//!
//! [`ExplicitOracle`] scans the expanded promise. [`OrbitOracle`] works on a
//! symmetric promise without expanding it: a partial assignment is reduced to
//! its count matrix (revealed symbols per position block), canonicalized under
//! the function's symbol classes, and completions are explored over those
//! matrices with memoization.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::model::{
    is_consistent, InputString, PartialAssignment, PartialFunction, PromiseKind, Symbol, Symmetry,
};

/// Which values `f` takes on a set of inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValueSet {
    pub zero: bool,
    pub one: bool,
}

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet { zero: false, one: false };

    pub fn of(v: bool) -> Self {
        ValueSet { zero: !v, one: v }
    }

    pub fn insert(&mut self, v: bool) {
        if v {
            self.one = true;
        } else {
            self.zero = true;
        }
    }

    pub fn union(self, other: ValueSet) -> ValueSet {
        ValueSet { zero: self.zero || other.zero, one: self.one || other.one }
    }

    pub fn is_empty(self) -> bool {
        !self.zero && !self.one
    }

    pub fn contains(self, v: bool) -> bool {
        if v {
            self.one
        } else {
            self.zero
        }
    }

    /// The single value, when exactly one is present.
    pub fn single(self) -> Option<bool> {
        match (self.zero, self.one) {
            (true, false) => Some(false),
            (false, true) => Some(true),
            _ => None,
        }
    }
}

/// Result of a certificate test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub holds: bool,
    /// No promise member is consistent with the assignment.
    pub vacuous: bool,
}

pub trait ValueOracle {
    fn function(&self) -> &PartialFunction;

    /// Values of `f` over promise members consistent with `c`.
    fn values(&self, c: &PartialAssignment) -> Result<ValueSet>;

    /// Inputs covering every promise member up to a symmetry that preserves
    /// the per-input measures. Ascending.
    fn representatives(&self) -> Result<Vec<InputString>>;

    fn is_certificate(&self, c: &PartialAssignment, v: bool) -> Result<CertificateCheck> {
        c.validate(self.function().n(), self.function().m())?;
        let vs = self.values(c)?;
        Ok(CertificateCheck { holds: !vs.contains(!v), vacuous: vs.is_empty() })
    }
}

/// Picks the oracle suited to the promise kind.
pub fn oracle_for(f: &PartialFunction) -> Box<dyn ValueOracle + '_> {
    match f.promise().kind() {
        PromiseKind::Explicit { .. } => Box::new(ExplicitOracle::new(f)),
        _ => Box::new(OrbitOracle::new(f)),
    }
}

/// `is_certificate` with the default oracle.
pub fn is_certificate(f: &PartialFunction, c: &PartialAssignment, v: bool) -> Result<CertificateCheck> {
    oracle_for(f).is_certificate(c, v)
}

/// Linear scan over the expanded promise.
pub struct ExplicitOracle<'a> {
    f: &'a PartialFunction,
    members: RefCell<Option<Vec<(InputString, bool)>>>,
}

impl<'a> ExplicitOracle<'a> {
    pub fn new(f: &'a PartialFunction) -> Self {
        ExplicitOracle { f, members: RefCell::new(None) }
    }

    fn with_members<T>(&self, g: impl FnOnce(&[(InputString, bool)]) -> T) -> Result<T> {
        if self.members.borrow().is_none() {
            let ms = self.f.members()?;
            *self.members.borrow_mut() = Some(ms);
        }
        Ok(g(self.members.borrow().as_deref().unwrap()))
    }
}

impl ValueOracle for ExplicitOracle<'_> {
    fn function(&self) -> &PartialFunction {
        self.f
    }

    fn values(&self, c: &PartialAssignment) -> Result<ValueSet> {
        if c.len() != self.f.n() {
            return Err(Error::DimensionMismatch(format!("assignment length {}", c.len())));
        }
        self.with_members(|ms| {
            let mut vs = ValueSet::EMPTY;
            for (x, v) in ms {
                if is_consistent(c, x).unwrap_or(false) {
                    vs.insert(*v);
                    if vs.zero && vs.one {
                        break;
                    }
                }
            }
            vs
        })
    }

    fn representatives(&self) -> Result<Vec<InputString>> {
        self.with_members(|ms| ms.iter().map(|(x, _)| x.clone()).collect())
    }
}

/// Count matrix `counts[block * M + symbol]`, columns sorted within each
/// symbol class.
type StateKey = Vec<u16>;

/// Symmetry-reduced oracle for `SingleType` and `SymmetricUnion` promises.
pub struct OrbitOracle<'a> {
    f: &'a PartialFunction,
    sym: &'a Symmetry,
    blocks: Vec<Vec<usize>>,
    values: RefCell<HashMap<StateKey, ValueSet>>,
    depths: RefCell<HashMap<StateKey, u32>>,
}

impl<'a> OrbitOracle<'a> {
    pub fn new(f: &'a PartialFunction) -> Self {
        let sym = f.symmetry();
        OrbitOracle {
            f,
            sym,
            blocks: sym.block_positions(),
            values: RefCell::new(HashMap::new()),
            depths: RefCell::new(HashMap::new()),
        }
    }

    fn m(&self) -> usize {
        self.f.m()
    }

    fn nblocks(&self) -> usize {
        self.blocks.len()
    }

    fn matrix_of(&self, c: &PartialAssignment) -> Vec<u16> {
        let m = self.m();
        let mut mat = vec![0u16; self.nblocks() * m];
        for (i, s) in c.entries() {
            mat[self.sym.block_of(i) * m + s as usize] += 1;
        }
        mat
    }

    /// Sorts the symbol columns within each class so that relabeled matrices
    /// share one key.
    fn canonical(&self, mat: &[u16]) -> StateKey {
        let m = self.m();
        let nb = self.nblocks();
        let mut out = mat.to_vec();
        for class in self.sym.classes() {
            if class.len() < 2 {
                continue;
            }
            let mut cols: Vec<Vec<u16>> = class
                .iter()
                .map(|&s| (0..nb).map(|b| mat[b * m + s as usize]).collect())
                .collect();
            cols.sort_unstable();
            for (col, &s) in cols.iter().zip(class) {
                for b in 0..nb {
                    out[b * m + s as usize] = col[b];
                }
            }
        }
        out
    }

    fn column_totals(&self, mat: &[u16]) -> Vec<u32> {
        let m = self.m();
        let mut tot = vec![0u32; m];
        for b in 0..self.nblocks() {
            for s in 0..m {
                tot[s] += mat[b * m + s] as u32;
            }
        }
        tot
    }

    fn block_fill(&self, mat: &[u16], b: usize) -> usize {
        let m = self.m();
        mat[b * m..(b + 1) * m].iter().map(|&c| c as usize).sum()
    }

    /// A concrete input realizing a complete count matrix.
    fn realize(&self, mat: &[u16]) -> InputString {
        let m = self.m();
        let mut x = vec![0 as Symbol; self.f.n()];
        for (b, positions) in self.blocks.iter().enumerate() {
            let mut it = positions.iter();
            for s in 0..m {
                for _ in 0..mat[b * m + s] {
                    x[*it.next().unwrap()] = s as Symbol;
                }
            }
        }
        InputString(x)
    }

    fn remember<T: Copy>(&self, map: &RefCell<HashMap<StateKey, T>>, key: StateKey, v: T) -> Result<T> {
        let mut map = map.borrow_mut();
        budget::check(map.len() as u128 + 1)?;
        map.insert(key, v);
        Ok(v)
    }

    /// Single-symbol extensions of `mat` in the first unfilled block that
    /// keep some promise type reachable.
    fn feasible_extensions(&self, mat: &[u16], b: usize) -> Vec<Vec<u16>> {
        let m = self.m();
        let mut tot = self.column_totals(mat);
        let mut out = Vec::new();
        for s in 0..m {
            tot[s] += 1;
            if self.f.promise().admits_counts(&tot) {
                let mut next = mat.to_vec();
                next[b * m + s] += 1;
                out.push(next);
            }
            tot[s] -= 1;
        }
        out
    }

    fn values_of(&self, mat: &[u16]) -> Result<ValueSet> {
        let key = self.canonical(mat);
        if let Some(&v) = self.values.borrow().get(&key) {
            return Ok(v);
        }
        if !self.f.promise().admits_counts(&self.column_totals(&key)) {
            return self.remember(&self.values, key, ValueSet::EMPTY);
        }
        let open = (0..self.nblocks()).find(|&b| self.block_fill(&key, b) < self.sym.block_sizes()[b]);
        let vs = match open {
            None => {
                let x = self.realize(&key);
                self.f.eval(&x).map_or(ValueSet::EMPTY, ValueSet::of)
            }
            Some(b) => {
                let mut vs = ValueSet::EMPTY;
                for next in self.feasible_extensions(&key, b) {
                    vs = vs.union(self.values_of(&next)?);
                    if vs.zero && vs.one {
                        break;
                    }
                }
                vs
            }
        };
        self.remember(&self.values, key, vs)
    }

    /// Exact deterministic query complexity via minimax over canonical count
    /// matrices. Querying any open position of a block is equivalent, so the
    /// query choices are the blocks with open positions.
    pub fn depth(&self) -> Result<u32> {
        let start = vec![0u16; self.nblocks() * self.m()];
        if self.values_of(&start)?.is_empty() {
            return Err(Error::EmptyPromise);
        }
        self.depth_of(&start)
    }

    fn depth_of(&self, mat: &[u16]) -> Result<u32> {
        let key = self.canonical(mat);
        if let Some(&d) = self.depths.borrow().get(&key) {
            return Ok(d);
        }
        let vs = self.values_of(&key)?;
        if vs.single().is_some() || vs.is_empty() {
            return self.remember(&self.depths, key, 0);
        }
        let mut best = u32::MAX;
        for b in 0..self.nblocks() {
            if self.block_fill(&key, b) == self.sym.block_sizes()[b] {
                continue;
            }
            let mut worst = 0;
            for next in self.feasible_extensions(&key, b) {
                if self.values_of(&next)?.is_empty() {
                    continue;
                }
                worst = worst.max(self.depth_of(&next)?);
                if worst + 1 >= best {
                    break;
                }
            }
            best = best.min(worst + 1);
            if best == 1 {
                break;
            }
        }
        self.remember(&self.depths, key, best)
    }
}

impl ValueOracle for OrbitOracle<'_> {
    fn function(&self) -> &PartialFunction {
        self.f
    }

    fn values(&self, c: &PartialAssignment) -> Result<ValueSet> {
        if c.len() != self.f.n() {
            return Err(Error::DimensionMismatch(format!("assignment length {}", c.len())));
        }
        c.validate(self.f.n(), self.m())?;
        self.values_of(&self.matrix_of(c))
    }

    fn representatives(&self) -> Result<Vec<InputString>> {
        let m = self.m();
        let nb = self.nblocks();
        let sizes = self.sym.block_sizes().to_vec();
        let mut keys = BTreeSet::new();
        let mut visited = 0u128;
        for t in self.f.promise().types() {
            // distribute each symbol's multiplicity over the blocks
            let mut mat = vec![0u16; nb * m];
            let mut fill = vec![0usize; nb];
            let mut stack_err = None;
            distribute(&t.0, 0, &sizes, &mut fill, &mut mat, m, &mut |mat| {
                visited += 1;
                if let Err(e) = budget::check(visited) {
                    stack_err.get_or_insert(e);
                    return false;
                }
                keys.insert(self.canonical(mat));
                true
            });
            if let Some(e) = stack_err {
                return Err(e);
            }
        }
        let mut reps: Vec<InputString> = keys.iter().map(|k| self.realize(k)).collect();
        reps.sort();
        Ok(reps)
    }
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    t: &[u32],
    s: usize,
    sizes: &[usize],
    fill: &mut [usize],
    mat: &mut [u16],
    m: usize,
    emit: &mut dyn FnMut(&[u16]) -> bool,
) -> bool {
    if s == t.len() {
        return emit(mat);
    }
    // place `remaining` copies of symbol s into blocks b >= left_start
    fn place(
        t: &[u32],
        s: usize,
        b: usize,
        remaining: u32,
        sizes: &[usize],
        fill: &mut [usize],
        mat: &mut [u16],
        m: usize,
        emit: &mut dyn FnMut(&[u16]) -> bool,
    ) -> bool {
        if remaining == 0 {
            return distribute(t, s + 1, sizes, fill, mat, m, emit);
        }
        if b == sizes.len() {
            return true;
        }
        let cap = (sizes[b] - fill[b]).min(remaining as usize);
        for k in (0..=cap).rev() {
            fill[b] += k;
            mat[b * m + s] += k as u16;
            let go = place(t, s, b + 1, remaining - k as u32, sizes, fill, mat, m, emit);
            fill[b] -= k;
            mat[b * m + s] -= k as u16;
            if !go {
                return false;
            }
        }
        true
    }
    place(t, s, 0, t[s], sizes, fill, mat, m, emit)
}
