use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use super::oracle::{brute_force_sets, DepthMode, ORACLE_MAX_CARRIER};
use crate::semantics::{Assignment, ChoiceStructure, Elem, ElemSet, Evaluator};
use crate::syntax::{substitute_term, Formula, Term, Var};

/// Largest carrier the engine accepts: the Boolean closure of the
/// definable sets enumerates up to `2^16` unions of atoms.
pub const ENGINE_MAX_CARRIER: usize = 16;

pub const DEFAULT_MAX_ROUNDS: usize = 64;

const V0: Var = Var(0);
const V1: Var = Var(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("definability engine needs a carrier of at most {ENGINE_MAX_CARRIER} elements, got {0}")]
    CarrierTooLarge(usize),
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("{0} is not definable")]
    NotDefinable(ElemSet),
    #[error("stored witness for {set} has extension {found}")]
    Unsound { set: ElemSet, found: ElemSet },
}

/// A semantic object with the expression that defines it and that
/// expression's tree size.
#[derive(Clone, Debug)]
pub struct Witnessed<T, W> {
    pub value: T,
    pub witness: W,
    pub size: u64,
}

/// Sizes of the family after each round.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RoundTrace {
    pub elements: ElemSet,
    pub sets: usize,
    pub functions: usize,
    pub relations: usize,
}

/// The result of [`definable_closure`].
#[derive(Clone, Debug)]
pub struct DefinableFamily {
    pub size: usize,
    pub max_dim: usize,
    /// Denotable elements with closed witness terms, in discovery order.
    pub elements: Vec<Witnessed<Elem, Term>>,
    /// Definable subsets with witnesses whose only free variable is `v0`.
    pub sets: BTreeMap<ElemSet, Witnessed<ElemSet, Arc<Formula>>>,
    /// Definable unary functions (tables) with witness terms in `v0`.
    pub functions: Vec<Witnessed<Vec<Elem>, Term>>,
    /// Generating binary relations (rows indexed by the `v0` value) with
    /// witnesses in `v0, v1`. Empty at dimension 1.
    pub relations: Vec<Witnessed<Vec<ElemSet>, Arc<Formula>>>,
    pub rounds: usize,
    /// False when `max_rounds` ran out before a fixpoint.
    pub saturated: bool,
    pub trace: Vec<RoundTrace>,
}

impl DefinableFamily {
    pub fn element_set(&self) -> ElemSet {
        self.elements.iter().map(|w| w.value).collect()
    }

    pub fn element_witness(&self, e: Elem) -> Option<&Term> {
        self.elements.iter().find(|w| w.value == e).map(|w| &w.witness)
    }

    pub fn contains_set(&self, s: ElemSet) -> bool {
        self.sets.contains_key(&s)
    }

    pub fn set_list(&self) -> Vec<ElemSet> {
        self.sets.keys().copied().collect()
    }

    /// Re-evaluates every witness and checks the closure invariants.
    /// Returns the list of violations.
    pub fn verify(&self, m: &ChoiceStructure) -> Vec<String> {
        let mut bad = Vec::new();
        let mut ev = Evaluator::new(m);
        let empty = Assignment::new();
        for w in &self.elements {
            match ev.term(&empty, &w.witness) {
                Ok(e) if e == w.value => {}
                other => bad.push(format!("element {} witness evaluates to {:?}", w.value, other)),
            }
        }
        for (s, w) in &self.sets {
            match ev.extension(&empty, &w.witness, V0) {
                Ok(x) if x == *s => {}
                other => bad.push(format!("set {s} witness has extension {other:?}")),
            }
        }
        for w in &self.functions {
            for a in 0..self.size {
                let asg = Assignment::new().with(V0, a);
                match ev.term(&asg, &w.witness) {
                    Ok(e) if e == w.value[a] => {}
                    other => bad.push(format!("function {:?} witness at {a} gives {other:?}", w.value)),
                }
            }
        }
        for w in &self.relations {
            for a in 0..self.size {
                let asg = Assignment::new().with(V0, a);
                match ev.extension(&asg, &w.witness, V1) {
                    Ok(row) if row == w.value[a] => {}
                    other => bad.push(format!("relation row {a} witness gives {other:?}")),
                }
            }
        }
        let full = ElemSet::full(self.size);
        if !self.contains_set(ElemSet::EMPTY) || !self.contains_set(full) {
            bad.push("U lacks the empty set or the carrier".into());
        }
        for &s in self.sets.keys() {
            if !self.contains_set(s.complement(self.size)) {
                bad.push(format!("U not closed under complement at {s}"));
            }
        }
        let list = self.set_list();
        if list.len() <= 4096 {
            for &a in &list {
                for &b in &list {
                    if !self.contains_set(a.union(b)) {
                        bad.push(format!("U not closed under union at {a}, {b}"));
                    }
                }
            }
        }
        if self.saturated {
            let elems = self.element_set();
            for &s in self.sets.keys() {
                if !elems.contains(m.choose(s)) {
                    bad.push(format!("choice({s}) = {} not denotable", m.choose(s)));
                }
            }
        }
        bad
    }
}

/// The stored witness for `s`, re-checked against the structure.
pub fn witness_formula(fam: &DefinableFamily, m: &ChoiceStructure, s: ElemSet) -> Result<Formula, WitnessError> {
    let w = fam.sets.get(&s).ok_or(WitnessError::NotDefinable(s))?;
    let found = Evaluator::new(m)
        .extension(&Assignment::new(), &w.witness, V0)
        .map_err(|_| WitnessError::Unsound { set: s, found: ElemSet::EMPTY })?;
    if found != s {
        return Err(WitnessError::Unsound { set: s, found });
    }
    Ok(w.witness.as_ref().clone())
}

/// A term of the pool used to build new terms and atoms: a closed term
/// (an element) or a term in `v0` (a unary function).
#[derive(Clone)]
struct PoolItem {
    value: Value,
    term: Term,
    size: u64,
    /// An ε-function of a binary relation; kept out of binary atoms.
    binary: bool,
}

#[derive(Clone, PartialEq, Eq)]
enum Value {
    Closed(Elem),
    Open(Vec<Elem>),
}

impl Value {
    fn at(&self, a: Elem) -> Elem {
        match self {
            Value::Closed(e) => *e,
            Value::Open(t) => t[a],
        }
    }

    fn is_open(&self) -> bool {
        matches!(self, Value::Open(_))
    }
}

/// A term in `v0, v1` for binary atoms; `table[a0 * n + a1]`.
#[derive(Clone)]
struct Pool2Item {
    table: Vec<Elem>,
    term: Term,
    size: u64,
    /// bit 0: mentions v0, bit 1: mentions v1
    vars: u8,
}

type Rows = Vec<ElemSet>;

/// Keeps the smallest candidate per key; earlier wins ties.
struct Candidates<K: Ord, W> {
    map: BTreeMap<K, (W, u64)>,
}

impl<K: Ord, W> Candidates<K, W> {
    fn new() -> Self {
        Candidates { map: BTreeMap::new() }
    }

    fn offer(&mut self, key: K, w: impl FnOnce() -> W, size: u64) {
        match self.map.get(&key) {
            Some((_, s)) if *s <= size => {}
            _ => {
                self.map.insert(key, (w(), size));
            }
        }
    }
}

/// Index tuples over `0..len` with at least one index ≥ `mark`.
fn tuples_with_new(len: usize, mark: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 || mark >= len {
        return out;
    }
    let mut idx = vec![0usize; arity];
    loop {
        if idx.iter().any(|&i| i >= mark) {
            out.push(idx.clone());
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
        }
    }
}

struct Engine<'m> {
    m: &'m ChoiceStructure,
    n: usize,
    max_dim: usize,
    elems: Vec<Option<usize>>,
    elements: Vec<Witnessed<Elem, Term>>,
    func_index: FxHashMap<Vec<Elem>, usize>,
    functions: Vec<Witnessed<Vec<Elem>, Term>>,
    pool: Vec<PoolItem>,
    pool_mark: usize,
    sets: BTreeMap<ElemSet, Witnessed<ElemSet, Arc<Formula>>>,
    atoms: Vec<(ElemSet, Arc<Formula>, u64)>,
    /// U members already used as atom-partition generators.
    refined_by: usize,
    pool2: Vec<Pool2Item>,
    /// Pool items before this index are mirrored in `pool2`.
    pool2_from: usize,
    rel_index: FxHashMap<Rows, usize>,
    relations: Vec<Witnessed<Rows, Arc<Formula>>>,
    rel_atoms: Vec<(Rows, Arc<Formula>, u64)>,
    rel_atoms_refined: usize,
}

/// Conjunction, dropping a leading `(= v0 v0)`.
fn and(a: &Arc<Formula>, b: Arc<Formula>) -> Arc<Formula> {
    if is_top(a) {
        return b;
    }
    Arc::new(Formula::And(Arc::clone(a), b))
}

fn is_top(f: &Formula) -> bool {
    matches!(f, Formula::Eq(Term::Var(V0), Term::Var(V0)))
}

/// Size after [`and`].
fn and_size(a: &Arc<Formula>, asize: u64, bsize: u64) -> u64 {
    if is_top(a) {
        bsize
    } else {
        asize + bsize + 1
    }
}

impl<'m> Engine<'m> {
    fn new(m: &'m ChoiceStructure, max_dim: usize) -> Self {
        let n = m.size();
        let mut e = Engine {
            m,
            n,
            max_dim,
            elems: vec![None; n],
            elements: Vec::new(),
            func_index: FxHashMap::default(),
            functions: Vec::new(),
            pool: Vec::new(),
            pool_mark: 0,
            sets: BTreeMap::new(),
            atoms: Vec::new(),
            refined_by: 0,
            pool2: Vec::new(),
            pool2_from: 0,
            rel_index: FxHashMap::default(),
            relations: Vec::new(),
            rel_atoms: Vec::new(),
            rel_atoms_refined: 0,
        };
        for c in m.signature().constant_ids() {
            e.add_element(m.constant(c), Term::Const(c), 1);
        }
        e.add_function((0..n).collect(), Term::Var(V0), 1);
        let top = Arc::new(Formula::Eq(Term::Var(V0), Term::Var(V0)));
        e.atoms.push((ElemSet::full(n), Arc::clone(&top), 3));
        e.add_set(ElemSet::full(n), Arc::clone(&top), 3);
        e.add_set(ElemSet::EMPTY, Arc::new(Formula::Not(top)), 4);
        e.refined_by = e.sets.len();
        e
    }

    fn add_element(&mut self, e: Elem, term: Term, size: u64) -> bool {
        if self.elems[e].is_some() {
            return false;
        }
        self.elems[e] = Some(self.elements.len());
        self.elements.push(Witnessed { value: e, witness: term.clone(), size });
        self.pool.push(PoolItem { value: Value::Closed(e), term, size, binary: false });
        true
    }

    fn add_function(&mut self, table: Vec<Elem>, term: Term, size: u64) -> bool {
        let binary = matches!(term, Term::Eps(..));
        if self.func_index.contains_key(&table) {
            return false;
        }
        self.func_index.insert(table.clone(), self.functions.len());
        self.functions.push(Witnessed { value: table.clone(), witness: term.clone(), size });
        self.pool.push(PoolItem { value: Value::Open(table), term, size, binary });
        true
    }

    fn add_set(&mut self, s: ElemSet, f: Arc<Formula>, size: u64) -> bool {
        if self.sets.contains_key(&s) {
            return false;
        }
        self.sets.insert(s, Witnessed { value: s, witness: f, size });
        true
    }

    fn saturated_fully(&self) -> bool {
        self.elements.len() == self.n && self.sets.len() == 1 << self.n
    }

    fn trace(&self) -> RoundTrace {
        RoundTrace {
            elements: self.elements.iter().map(|w| w.value).collect(),
            sets: self.sets.len(),
            functions: self.functions.len(),
            relations: self.relations.len(),
        }
    }

    /// One Jacobi round: every candidate is computed from the state at the
    /// start of the round, then merged. Returns whether anything was added.
    fn round(&mut self) -> bool {
        let sig = self.m.signature();
        let n = self.n;
        let mut new_elems: Candidates<Elem, Term> = Candidates::new();
        let mut new_funcs: Candidates<Vec<Elem>, Term> = Candidates::new();
        let mut new_sets: Candidates<ElemSet, Arc<Formula>> = Candidates::new();

        // choice values of definable sets
        for (s, w) in &self.sets {
            let e = self.m.choose(*s);
            if self.elems[e].is_none() {
                new_elems.offer(e, || Term::Eps(V0, Arc::clone(&w.witness)), w.size + 1);
            }
        }

        // images of elements under definable functions
        let mark = self.pool_mark;
        let len = self.pool.len();
        for (i, g) in self.pool.iter().enumerate() {
            let Value::Open(table) = &g.value else { continue };
            for (j, x) in self.pool.iter().enumerate() {
                let Value::Closed(e) = x.value else { continue };
                if i < mark && j < mark {
                    continue;
                }
                let v = table[e];
                if self.elems[v].is_none() {
                    new_elems.offer(v, || substitute_term(&g.term, &x.term, V0), g.size + x.size);
                }
            }
        }

        // signature functions applied to pool terms
        for f in sig.function_ids() {
            let arity = sig.function(f).arity;
            for idx in self.curried_tuples(arity, mark) {
                let args: Vec<&PoolItem> = idx.iter().map(|&i| &self.pool[i]).collect();
                let size = 1 + args.iter().map(|a| a.size).sum::<u64>();
                let term = || Term::App(f, args.iter().map(|a| a.term.clone()).collect());
                let mut vals = vec![0; arity];
                if args.iter().any(|a| a.value.is_open()) {
                    let table: Vec<Elem> = (0..n)
                        .map(|a| {
                            for (slot, x) in vals.iter_mut().zip(&args) {
                                *slot = x.value.at(a);
                            }
                            self.m.apply(f, &vals)
                        })
                        .collect();
                    if !self.func_index.contains_key(&table) {
                        new_funcs.offer(table, term, size);
                    }
                } else {
                    for (slot, x) in vals.iter_mut().zip(&args) {
                        *slot = x.value.at(0);
                    }
                    let v = self.m.apply(f, &vals);
                    if self.elems[v].is_none() {
                        new_elems.offer(v, term, size);
                    }
                }
            }
        }

        // atomic formulas in v0
        for (j, b) in self.pool.iter().enumerate().skip(mark) {
            for a in &self.pool[..=j] {
                if !a.value.is_open() && !b.value.is_open() {
                    continue;
                }
                let s: ElemSet = (0..n).filter(|&x| a.value.at(x) == b.value.at(x)).collect();
                if !self.sets.contains_key(&s) {
                    // open side first: (= v0 zero)
                    let (l, r) = if a.value.is_open() { (a, b) } else { (b, a) };
                    new_sets.offer(
                        s,
                        || Arc::new(Formula::Eq(l.term.clone(), r.term.clone())),
                        1 + a.size + b.size,
                    );
                }
            }
        }
        for r in sig.relation_ids() {
            let arity = sig.relation(r).arity;
            for idx in tuples_with_new(len, mark, arity) {
                let args: Vec<&PoolItem> = idx.iter().map(|&i| &self.pool[i]).collect();
                if !args.iter().any(|a| a.value.is_open()) {
                    continue;
                }
                let mut vals = vec![0; arity];
                let s: ElemSet = (0..n)
                    .filter(|&x| {
                        for (slot, a) in vals.iter_mut().zip(&args) {
                            *slot = a.value.at(x);
                        }
                        self.m.holds(r, &vals)
                    })
                    .collect();
                if !self.sets.contains_key(&s) {
                    let size = 1 + args.iter().map(|a| a.size).sum::<u64>();
                    new_sets.offer(
                        s,
                        || Arc::new(Formula::Rel(r, args.iter().map(|a| a.term.clone()).collect())),
                        size,
                    );
                }
            }
        }

        let mut new_rels: Candidates<Rows, Arc<Formula>> = Candidates::new();
        if self.max_dim >= 2 {
            self.binary_round(&mut new_funcs, &mut new_rels);
        }

        // merge
        self.pool_mark = len;
        let mut changed = false;
        for (e, (t, size)) in new_elems.map {
            changed |= self.add_element(e, t, size);
        }
        for (table, (t, size)) in new_funcs.map {
            changed |= self.add_function(table, t, size);
        }
        for (s, (f, size)) in new_sets.map {
            changed |= self.add_set(s, f, size);
        }
        for (rows, (f, size)) in new_rels.map {
            if !self.rel_index.contains_key(&rows) {
                self.rel_index.insert(rows.clone(), self.relations.len());
                self.relations.push(Witnessed { value: rows, witness: f, size });
                changed = true;
            }
        }
        changed |= self.boolean_closure();
        changed
    }

    /// Argument tuples over the pool with at most one open term and at
    /// least one index ≥ `mark`.
    fn curried_tuples(&self, arity: usize, mark: usize) -> Vec<Vec<usize>> {
        let closed: Vec<usize> = (0..self.pool.len()).filter(|&i| !self.pool[i].value.is_open()).collect();
        let open: Vec<usize> = (0..self.pool.len()).filter(|&i| self.pool[i].value.is_open()).collect();
        let mut out = Vec::new();
        let closed_tuples = |k: usize| -> Vec<Vec<usize>> {
            let mut acc = vec![Vec::new()];
            for _ in 0..k {
                acc = acc
                    .into_iter()
                    .flat_map(|t| closed.iter().map(move |&c| [t.clone(), vec![c]].concat()))
                    .collect();
            }
            acc
        };
        for t in closed_tuples(arity) {
            if t.iter().any(|&i| i >= mark) {
                out.push(t);
            }
        }
        let rest = closed_tuples(arity - 1);
        for p in 0..arity {
            for &o in &open {
                for t in &rest {
                    if o < mark && t.iter().all(|&i| i < mark) {
                        continue;
                    }
                    let mut tuple = t.clone();
                    tuple.insert(p, o);
                    out.push(tuple);
                }
            }
        }
        out
    }

    /// Binary atoms over pool terms in `v0` and `v1`, and the ε-functions
    /// `m ↦ choice(row m)` of the generating relations and their atoms.
    fn binary_round(&mut self, new_funcs: &mut Candidates<Vec<Elem>, Term>, new_rels: &mut Candidates<Rows, Arc<Formula>>) {
        let n = self.n;
        let sig = self.m.signature();
        // extend pool2 with the pool items added since it was last built
        let start = self.pool2.len();
        for item in &self.pool[self.pool2_from..] {
            if item.binary {
                continue;
            }
            match &item.value {
                Value::Closed(e) => self.pool2.push(Pool2Item {
                    table: vec![*e; n * n],
                    term: item.term.clone(),
                    size: item.size,
                    vars: 0,
                }),
                Value::Open(t) => {
                    self.pool2.push(Pool2Item {
                        table: (0..n * n).map(|p| t[p / n]).collect(),
                        term: item.term.clone(),
                        size: item.size,
                        vars: 1,
                    });
                    self.pool2.push(Pool2Item {
                        table: (0..n * n).map(|p| t[p % n]).collect(),
                        term: substitute_term(&item.term, &Term::Var(V1), V0),
                        size: item.size,
                        vars: 2,
                    });
                }
            }
        }
        let mark = start;
        self.pool2_from = self.pool.len();
        let rows_of = |pred: &dyn Fn(usize) -> bool| -> Rows {
            (0..n).map(|a0| (0..n).filter(|&a1| pred(a0 * n + a1)).collect()).collect()
        };
        for (j, b) in self.pool2.iter().enumerate().skip(mark) {
            for a in &self.pool2[..=j] {
                if a.vars | b.vars != 3 {
                    continue;
                }
                let rows = rows_of(&|p| a.table[p] == b.table[p]);
                if !self.rel_index.contains_key(&rows) {
                    new_rels.offer(rows, || Arc::new(Formula::Eq(a.term.clone(), b.term.clone())), 1 + a.size + b.size);
                }
            }
        }
        for r in sig.relation_ids() {
            let arity = sig.relation(r).arity;
            for idx in tuples_with_new(self.pool2.len(), mark, arity) {
                let args: Vec<&Pool2Item> = idx.iter().map(|&i| &self.pool2[i]).collect();
                if args.iter().fold(0, |acc, a| acc | a.vars) != 3 {
                    continue;
                }
                let mut vals = vec![0; arity];
                let mut rows: Rows = vec![ElemSet::EMPTY; n];
                for (a0, row) in rows.iter_mut().enumerate() {
                    for a1 in 0..n {
                        for (slot, a) in vals.iter_mut().zip(&args) {
                            *slot = a.table[a0 * n + a1];
                        }
                        if self.m.holds(r, &vals) {
                            row.insert(a1);
                        }
                    }
                }
                if !self.rel_index.contains_key(&rows) {
                    let size = 1 + args.iter().map(|a| a.size).sum::<u64>();
                    new_rels.offer(rows, || Arc::new(Formula::Rel(r, args.iter().map(|a| a.term.clone()).collect())), size);
                }
            }
        }

        // refine the partition of carrier² by relations not yet used
        if self.rel_atoms.is_empty() {
            let top = Arc::new(Formula::Eq(Term::Var(V0), Term::Var(V0)));
            self.rel_atoms.push((vec![ElemSet::full(n); n], top, 3));
        }
        for k in self.rel_atoms_refined..self.relations.len() {
            let (rows, phi, size) = {
                let r = &self.relations[k];
                (r.value.clone(), Arc::clone(&r.witness), r.size)
            };
            let mut next = Vec::new();
            for (cells, w, ws) in self.rel_atoms.drain(..) {
                let inside: Rows = cells.iter().zip(&rows).map(|(c, r)| c.intersection(*r)).collect();
                let outside: Rows = cells.iter().zip(&rows).map(|(c, r)| c.difference(*r)).collect();
                let nonempty = |x: &Rows| x.iter().any(|s| !s.is_empty());
                if nonempty(&inside) && nonempty(&outside) {
                    next.push((inside, and(&w, Arc::clone(&phi)), and_size(&w, ws, size)));
                    next.push((outside, and(&w, Arc::new(Formula::Not(Arc::clone(&phi)))), and_size(&w, ws, size + 1)));
                } else {
                    next.push((cells, w, ws));
                }
            }
            self.rel_atoms = next;
        }
        self.rel_atoms_refined = self.relations.len();

        // ε-functions of the atoms of the binary partition
        let mut offer = |rows: &Rows, phi: &Arc<Formula>, size: u64, m: &ChoiceStructure, index: &FxHashMap<Vec<Elem>, usize>| {
            let table: Vec<Elem> = rows.iter().map(|row| m.choose(*row)).collect();
            if !index.contains_key(&table) {
                new_funcs.offer(table, || Term::Eps(V1, Arc::clone(phi)), size + 1);
            }
        };
        for (rows, phi, size) in &self.rel_atoms {
            offer(rows, phi, *size, self.m, &self.func_index);
        }
    }

    /// Refines the atom partition by the sets added since the last call and
    /// closes U under unions and complements. Returns whether U grew.
    fn boolean_closure(&mut self) -> bool {
        let gens: Vec<(ElemSet, Arc<Formula>, u64)> = self
            .sets
            .values()
            .map(|w| (w.value, Arc::clone(&w.witness), w.size))
            .collect();
        let before = self.sets.len();
        if self.refined_by == gens.len() {
            return false;
        }
        // generators are refined in set order; all of them, since new
        // members may sit anywhere in the ordered map
        for (s, phi, size) in &gens {
            let mut next = Vec::new();
            for (cell, w, ws) in self.atoms.drain(..) {
                let inside = cell.intersection(*s);
                let outside = cell.difference(*s);
                if !inside.is_empty() && !outside.is_empty() {
                    next.push((inside, and(&w, Arc::clone(phi)), and_size(&w, ws, *size)));
                    next.push((outside, and(&w, Arc::new(Formula::Not(Arc::clone(phi)))), and_size(&w, ws, size + 1)));
                } else {
                    next.push((cell, w, ws));
                }
            }
            self.atoms = next;
        }
        for (cell, w, ws) in &mut self.atoms {
            if let Some(known) = self.sets.get(cell) {
                if known.size < *ws {
                    *w = Arc::clone(&known.witness);
                    *ws = known.size;
                }
            }
        }
        let k = self.atoms.len();
        // every union of atoms, built along increasing atom masks
        let mut by_mask: Vec<(ElemSet, Arc<Formula>, u64)> = Vec::with_capacity(1 << k);
        by_mask.push((ElemSet::EMPTY, Arc::clone(&self.sets[&ElemSet::EMPTY].witness), self.sets[&ElemSet::EMPTY].size));
        for mask in 1usize..1 << k {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            let (atom, aw, asize) = &self.atoms[top];
            let set = by_mask[rest].0.union(*atom);
            let entry = if let Some(w) = self.sets.get(&set) {
                (set, Arc::clone(&w.witness), w.size)
            } else if rest == 0 {
                (set, Arc::clone(aw), *asize)
            } else {
                let (_, rw, rs) = &by_mask[rest];
                (set, Arc::new(Formula::Or(Arc::clone(rw), Arc::clone(aw))), rs + asize + 1)
            };
            by_mask.push(entry);
        }
        let full_mask = (1usize << k) - 1;
        let mut added = Vec::new();
        for mask in 0..=full_mask {
            let (set, w, size) = &by_mask[mask];
            if self.sets.contains_key(set) {
                continue;
            }
            // negation of an already known complement, when shorter
            let comp = &by_mask[full_mask & !mask];
            let known = self.sets.get(&comp.0);
            match known {
                Some(cw) if cw.size + 1 < *size => {
                    added.push((*set, Arc::new(Formula::Not(Arc::clone(&cw.witness))), cw.size + 1))
                }
                _ => added.push((*set, Arc::clone(w), *size)),
            }
        }
        for (s, w, size) in added {
            self.add_set(s, w, size);
        }
        debug_assert!(self.sets.len() == 1 << k);
        self.refined_by = self.sets.len();
        self.sets.len() > before
    }

    fn finish(self, rounds: usize, saturated: bool, trace: Vec<RoundTrace>) -> DefinableFamily {
        DefinableFamily {
            size: self.n,
            max_dim: self.max_dim,
            elements: self.elements,
            sets: self.sets,
            functions: self.functions,
            relations: self.relations,
            rounds,
            saturated,
            trace,
        }
    }
}

/// Computes the definable family by rounds of closure rules until nothing
/// new appears, or until every element is denotable and every subset
/// definable (nothing more can then reach `E` or `U`), or until
/// `max_rounds` run out, in which case the family is flagged unsaturated.
pub fn definable_closure(m: &ChoiceStructure, max_dim: usize, max_rounds: usize) -> Result<DefinableFamily, EngineError> {
    if m.size() > ENGINE_MAX_CARRIER {
        return Err(EngineError::CarrierTooLarge(m.size()));
    }
    if !(1..=2).contains(&max_dim) {
        return Err(EngineError::BadDimension(max_dim));
    }
    let mut engine = Engine::new(m, max_dim);
    engine.boolean_closure();
    let mut trace = vec![engine.trace()];
    let mut rounds = 0;
    let mut saturated = engine.saturated_fully();
    while !saturated && rounds < max_rounds {
        rounds += 1;
        let changed = engine.round();
        trace.push(engine.trace());
        saturated = !changed || engine.saturated_fully();
    }
    Ok(engine.finish(rounds, saturated, trace))
}

/// Dimension and brute-force comparison for one structure.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub dim1_elements: ElemSet,
    pub dim2_elements: ElemSet,
    pub dim1_sets: usize,
    pub dim2_sets: usize,
    pub dim1_rounds: usize,
    pub dim2_rounds: usize,
    pub saturated: bool,
    /// Closure at dimension 1 and 2 agree on E and U.
    pub stable: bool,
    pub oracle: Option<OracleAgreement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleAgreement {
    pub depth: usize,
    pub oracle_sets: usize,
    pub agrees: bool,
    pub only_engine: Vec<ElemSet>,
    pub only_oracle: Vec<ElemSet>,
}

/// Recomputes the closure at both dimensions and, for carriers of at most
/// four elements, compares U with brute-force enumeration to `oracle_depth`.
pub fn stability_check(m: &ChoiceStructure, oracle_depth: usize) -> Result<StabilityReport, EngineError> {
    let d1 = definable_closure(m, 1, DEFAULT_MAX_ROUNDS)?;
    let d2 = definable_closure(m, 2, DEFAULT_MAX_ROUNDS)?;
    let stable = d1.element_set() == d2.element_set() && d1.set_list() == d2.set_list();
    let oracle = (m.size() <= ORACLE_MAX_CARRIER).then(|| {
        let r = brute_force_sets(m, oracle_depth, DepthMode::Connective).expect("carrier checked");
        let engine: std::collections::BTreeSet<ElemSet> = d2.sets.keys().copied().collect();
        OracleAgreement {
            depth: oracle_depth,
            oracle_sets: r.sets.len(),
            agrees: engine == r.sets,
            only_engine: engine.difference(&r.sets).copied().collect(),
            only_oracle: r.sets.difference(&engine).copied().collect(),
        }
    });
    Ok(StabilityReport {
        dim1_elements: d1.element_set(),
        dim2_elements: d2.element_set(),
        dim1_sets: d1.sets.len(),
        dim2_sets: d2.sets.len(),
        dim1_rounds: d1.rounds,
        dim2_rounds: d2.rounds,
        saturated: d1.saturated && d2.saturated,
        stable,
        oracle,
    })
}
