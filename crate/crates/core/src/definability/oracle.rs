//! Brute-force enumeration of definable sets, independent of the engine.
//!
//! Formulas over the core connectives in the variables `v0, v1` are
//! enumerated level by level and deduplicated semantically: a class is a
//! truth table (or, for terms, a value table) over all assignments to
//! `v0, v1`, paired with the syntactic set of free variables. Semantics is
//! compositional, so the classes reachable at depth ≤ d are exactly those
//! of the formulas of depth ≤ d.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::semantics::{ChoiceStructure, Elem, ElemSet};
use crate::syntax::{FunId, RelId};

/// Largest carrier the oracle accepts.
pub const ORACLE_MAX_CARRIER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute-force enumeration needs a carrier of at most {ORACLE_MAX_CARRIER} elements, got {0}")]
    CarrierTooLarge(usize),
}

/// How depth is counted. Function application, `not`, `or` and `eps`
/// always add one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthMode {
    /// Atoms add one, as in [`crate::syntax::Formula::depth`].
    Syntactic,
    /// Atoms have the depth of their deepest argument, so atoms over
    /// variables and constants have depth 0.
    Connective,
}

const V0: u8 = 1;
const V1: u8 = 2;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TermClass {
    /// 4 bits per assignment point.
    table: u64,
    fv: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FormulaClass {
    table: u16,
    fv: u8,
}

struct Space<'m> {
    m: &'m ChoiceStructure,
    n: usize,
}

impl Space<'_> {
    fn points(&self) -> usize {
        self.n * self.n
    }

    fn get(t: u64, p: usize) -> Elem {
        (t >> (4 * p) & 0xf) as Elem
    }

    fn var(&self, which: u8) -> TermClass {
        let mut table = 0;
        for p in 0..self.points() {
            let (a0, a1) = (p / self.n, p % self.n);
            let e = if which == V0 { a0 } else { a1 };
            table |= (e as u64) << (4 * p);
        }
        TermClass { table, fv: which }
    }

    fn constant(&self, e: Elem) -> TermClass {
        let mut table = 0;
        for p in 0..self.points() {
            table |= (e as u64) << (4 * p);
        }
        TermClass { table, fv: 0 }
    }

    fn app(&self, f: FunId, args: &[TermClass]) -> TermClass {
        let mut table = 0;
        let mut vals = [0; 8];
        for p in 0..self.points() {
            for (slot, a) in vals.iter_mut().zip(args) {
                *slot = Self::get(a.table, p);
            }
            let e = self.m.apply(f, &vals[..args.len()]);
            table |= (e as u64) << (4 * p);
        }
        TermClass { table, fv: args.iter().fold(0, |acc, a| acc | a.fv) }
    }

    fn eps(&self, bound: u8, body: FormulaClass) -> TermClass {
        let n = self.n;
        let mut table = 0;
        for p in 0..self.points() {
            let (a0, a1) = (p / n, p % n);
            let set: ElemSet = (0..n)
                .filter(|&m| {
                    let q = if bound == V0 { m * n + a1 } else { a0 * n + m };
                    body.table >> q & 1 == 1
                })
                .collect();
            table |= (self.m.choose(set) as u64) << (4 * p);
        }
        TermClass { table, fv: body.fv & !bound }
    }

    fn eq(&self, a: TermClass, b: TermClass) -> FormulaClass {
        let mut table = 0u16;
        for p in 0..self.points() {
            if Self::get(a.table, p) == Self::get(b.table, p) {
                table |= 1 << p;
            }
        }
        FormulaClass { table, fv: a.fv | b.fv }
    }

    fn rel(&self, r: RelId, args: &[TermClass]) -> FormulaClass {
        let mut table = 0u16;
        let mut vals = [0; 8];
        for p in 0..self.points() {
            for (slot, a) in vals.iter_mut().zip(args) {
                *slot = Self::get(a.table, p);
            }
            if self.m.holds(r, &vals[..args.len()]) {
                table |= 1 << p;
            }
        }
        FormulaClass { table, fv: args.iter().fold(0, |acc, a| acc | a.fv) }
    }

    fn not(&self, a: FormulaClass) -> FormulaClass {
        let mask = ((1u32 << self.points()) - 1) as u16;
        FormulaClass { table: !a.table & mask, fv: a.fv }
    }

    fn or(&self, a: FormulaClass, b: FormulaClass) -> FormulaClass {
        FormulaClass { table: a.table | b.table, fv: a.fv | b.fv }
    }

    /// Extension in `v0` of a class with no free `v1`.
    fn extension(&self, f: FormulaClass) -> ElemSet {
        (0..self.n).filter(|&a0| f.table >> (a0 * self.n) & 1 == 1).collect()
    }
}

/// Level-wise store of classes with first-seen depth.
struct Store<K> {
    seen: FxHashMap<K, usize>,
    levels: Vec<Vec<K>>,
}

impl<K: Copy + Eq + std::hash::Hash> Store<K> {
    fn new() -> Self {
        Store { seen: FxHashMap::default(), levels: vec![Vec::new()] }
    }

    fn add(&mut self, k: K, depth: usize) {
        if let std::collections::hash_map::Entry::Vacant(e) = self.seen.entry(k) {
            e.insert(depth);
            while self.levels.len() <= depth {
                self.levels.push(Vec::new());
            }
            self.levels[depth].push(k);
        }
    }

    fn upto(&self, d: usize) -> Vec<K> {
        self.levels.iter().take(d + 1).flatten().copied().collect()
    }

    fn at(&self, d: usize) -> Vec<K> {
        self.levels.get(d).cloned().unwrap_or_default()
    }
}

/// Summary of one brute-force run.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Extensions of every formula whose only free variable is `v0`.
    pub sets: BTreeSet<ElemSet>,
    pub term_classes: usize,
    pub formula_classes: usize,
}

fn tuples_with_new(old: &[TermClass], new: &[TermClass], arity: usize) -> Vec<Vec<TermClass>> {
    // tuples over old ∪ new using at least one member of new
    let all: Vec<TermClass> = old.iter().chain(new).copied().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; arity];
    if all.is_empty() || new.is_empty() {
        return out;
    }
    loop {
        if idx.iter().any(|&i| i >= old.len()) {
            out.push(idx.iter().map(|&i| all[i]).collect());
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < all.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Enumerates the sets definable by core formulas of depth ≤ `depth` in
/// the variables `v0, v1`. Stops early once every subset is found.
pub fn brute_force_sets(m: &ChoiceStructure, depth: usize, mode: DepthMode) -> Result<OracleResult, OracleError> {
    let n = m.size();
    if n > ORACLE_MAX_CARRIER {
        return Err(OracleError::CarrierTooLarge(n));
    }
    let sp = Space { m, n };
    let sig = m.signature();
    let mut run = Run { sp, terms: Store::new(), formulas: Store::new(), sets: BTreeSet::new(), total: 1 << n };
    run.terms.add(run.sp.var(V0), 0);
    run.terms.add(run.sp.var(V1), 0);
    for c in sig.constant_ids() {
        run.terms.add(run.sp.constant(m.constant(c)), 0);
    }
    let shift = usize::from(mode == DepthMode::Syntactic);
    // atoms over terms of depth exactly t land at formula depth t + shift
    let _ = run.atoms(0, shift);
    for d in 1..=depth {
        if run.complete() {
            break;
        }
        // terms of depth d
        let t_old = run.terms.upto(d - 1);
        let t_new = run.terms.at(d - 1);
        let t_old = &t_old[..t_old.len() - t_new.len()];
        for f in sig.function_ids() {
            for args in tuples_with_new(t_old, &t_new, sig.function(f).arity) {
                let t = run.sp.app(f, &args);
                run.terms.add(t, d);
            }
        }
        for body in run.formulas.at(d - 1) {
            let t0 = run.sp.eps(V0, body);
            let t1 = run.sp.eps(V1, body);
            run.terms.add(t0, d);
            run.terms.add(t1, d);
        }
        let f_new = run.formulas.at(d - 1);
        let f_all = run.formulas.upto(d - 1);
        for &g in &f_new {
            let h = run.sp.not(g);
            run.add_formula(h, d);
        }
        'or: for &a in &f_new {
            for &b in &f_all {
                let h = run.sp.or(a, b);
                run.add_formula(h, d);
                if run.complete() {
                    break 'or;
                }
            }
        }
        if d + shift <= depth && run.atoms(d, d + shift).is_err() {
            break;
        }
    }
    Ok(OracleResult { sets: run.sets, term_classes: run.terms.seen.len(), formula_classes: run.formulas.seen.len() })
}

struct Run<'m> {
    sp: Space<'m>,
    terms: Store<TermClass>,
    formulas: Store<FormulaClass>,
    sets: BTreeSet<ElemSet>,
    total: usize,
}

struct Complete;

impl Run<'_> {
    fn complete(&self) -> bool {
        self.sets.len() == self.total
    }

    fn add_formula(&mut self, f: FormulaClass, d: usize) {
        if !self.formulas.seen.contains_key(&f) {
            self.formulas.add(f, d);
            if f.fv & V1 == 0 {
                self.sets.insert(self.sp.extension(f));
            }
        }
    }

    /// Atoms whose deepest argument has depth exactly `t`, recorded at depth `d`.
    fn atoms(&mut self, t: usize, d: usize) -> Result<(), Complete> {
        let sig = self.sp.m.signature();
        let all = self.terms.upto(t);
        let new = self.terms.at(t);
        let old = &all[..all.len() - new.len()];
        for (j, &b) in all.iter().enumerate().skip(old.len()) {
            for &a in &all[..=j] {
                let f = self.sp.eq(a, b);
                self.add_formula(f, d);
            }
            if self.complete() {
                return Err(Complete);
            }
        }
        for r in sig.relation_ids() {
            for args in tuples_with_new(old, &new, sig.relation(r).arity) {
                let f = self.sp.rel(r, &args);
                self.add_formula(f, d);
            }
        }
        if self.complete() {
            return Err(Complete);
        }
        Ok(())
    }
}
