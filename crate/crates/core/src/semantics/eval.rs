use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::set::{Elem, ElemSet};
use super::structure::ChoiceStructure;
use crate::syntax::{Formula, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(Var),
    #[error("variable {var} assigned {value}, outside the carrier")]
    OutOfRange { var: Var, value: Elem },
    #[error("not a sentence: free variables {0}")]
    OpenFormula(String),
}

/// Values for variables `v0..vk`; `None` leaves a variable unassigned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(Vec<Option<Elem>>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(Vec::new())
    }

    /// Assigns `values[i]` to `v<i>`.
    pub fn from_values(values: &[Elem]) -> Self {
        Assignment(values.iter().map(|&e| Some(e)).collect())
    }

    pub fn get(&self, v: Var) -> Option<Elem> {
        self.0.get(v.index()).copied().flatten()
    }

    pub fn set(&mut self, v: Var, e: Elem) {
        if v.index() >= self.0.len() {
            self.0.resize(v.index() + 1, None);
        }
        self.0[v.index()] = Some(e);
    }

    pub fn with(mut self, v: Var, e: Elem) -> Self {
        self.set(v, e);
        self
    }

    /// Assigned `(variable, value)` pairs in index order.
    pub fn pairs(&self) -> impl Iterator<Item = (Var, Elem)> + '_ {
        self.0.iter().enumerate().filter_map(|(i, e)| e.map(|e| (Var(i as u32), e)))
    }
}

/// Every assignment of carrier elements to `vars`, in lexicographic order.
pub fn assignments(n: usize, vars: &[Var]) -> impl Iterator<Item = Assignment> + '_ {
    super::structure::tuples(n, vars.len()).map(move |vals| {
        let mut a = Assignment::new();
        for (v, e) in vars.iter().zip(vals) {
            a.set(*v, e);
        }
        a
    })
}

/// Memo key for an ε-term: body identity, bound variable, packed values of
/// the body's other free variables.
type EpsKey = (usize, u32, u64);

/// Evaluator for one structure. It memoizes ε-terms by (body, values of
/// their free variables); the memo pins every body it has seen so pointer
/// keys stay valid for the evaluator's lifetime.
pub struct Evaluator<'m> {
    m: &'m ChoiceStructure,
    env: Vec<Option<Elem>>,
    memo: FxHashMap<EpsKey, Elem>,
    free: FxHashMap<usize, Arc<[Var]>>,
    pinned: Vec<Arc<Formula>>,
}

/// Free variables of ε-bodies, at most this many, are memoized.
const MEMO_MAX_FREE: usize = 8;

impl<'m> Evaluator<'m> {
    pub fn new(m: &'m ChoiceStructure) -> Self {
        Evaluator {
            m,
            env: Vec::new(),
            memo: FxHashMap::default(),
            free: FxHashMap::default(),
            pinned: Vec::new(),
        }
    }

    pub fn structure(&self) -> &'m ChoiceStructure {
        self.m
    }

    fn load(&mut self, a: &Assignment) -> Result<(), EvalError> {
        self.env.clear();
        for (i, e) in a.0.iter().enumerate() {
            if let Some(e) = e {
                if *e >= self.m.size() {
                    return Err(EvalError::OutOfRange { var: Var(i as u32), value: *e });
                }
            }
            self.env.push(*e);
        }
        Ok(())
    }

    pub fn term(&mut self, a: &Assignment, t: &Term) -> Result<Elem, EvalError> {
        self.load(a)?;
        self.eval_term(t)
    }

    pub fn formula(&mut self, a: &Assignment, f: &Formula) -> Result<bool, EvalError> {
        self.load(a)?;
        self.eval_formula(f)
    }

    /// `{ m : f holds at a[v ↦ m] }`.
    pub fn extension(&mut self, a: &Assignment, f: &Formula, v: Var) -> Result<ElemSet, EvalError> {
        self.load(a)?;
        self.ext(f, v)
    }

    fn bind(&mut self, v: Var, e: Option<Elem>) -> Option<Elem> {
        let i = v.index();
        if i >= self.env.len() {
            self.env.resize(i + 1, None);
        }
        std::mem::replace(&mut self.env[i], e)
    }

    fn ext(&mut self, f: &Formula, v: Var) -> Result<ElemSet, EvalError> {
        let saved = self.bind(v, None);
        let mut set = ElemSet::EMPTY;
        let mut result = Ok(());
        for m in 0..self.m.size() {
            self.env[v.index()] = Some(m);
            match self.eval_formula(f) {
                Ok(true) => set.insert(m),
                Ok(false) => {}
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        self.env[v.index()] = saved;
        result.map(|_| set)
    }

    fn free_of(&mut self, body: &Arc<Formula>) -> Arc<[Var]> {
        let key = Arc::as_ptr(body) as usize;
        if let Some(fv) = self.free.get(&key) {
            return Arc::clone(fv);
        }
        let mut acc = Vec::new();
        self.free_formula(body, &mut acc);
        acc.sort();
        acc.dedup();
        let fv: Arc<[Var]> = acc.into();
        self.free.insert(key, Arc::clone(&fv));
        self.pinned.push(Arc::clone(body));
        fv
    }

    // Free-variable collection that reuses the per-body cache, so shared
    // subterms are visited once.
    fn free_term(&mut self, t: &Term, acc: &mut Vec<Var>) {
        match t {
            Term::Var(v) => acc.push(*v),
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| self.free_term(a, acc)),
            Term::Eps(v, body) => {
                let fv = self.free_of(body);
                acc.extend(fv.iter().filter(|w| *w != v));
            }
        }
    }

    fn free_formula(&mut self, f: &Formula, acc: &mut Vec<Var>) {
        match f {
            Formula::Eq(a, b) => {
                self.free_term(a, acc);
                self.free_term(b, acc);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| self.free_term(a, acc)),
            Formula::Not(g) => acc.extend(self.free_of(g).iter()),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                acc.extend(self.free_of(a).iter());
                acc.extend(self.free_of(b).iter());
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let fv = self.free_of(g);
                acc.extend(fv.iter().filter(|w| *w != v));
            }
        }
    }

    fn lookup(&self, v: Var) -> Result<Elem, EvalError> {
        self.env.get(v.index()).copied().flatten().ok_or(EvalError::Unbound(v))
    }

    fn eval_eps(&mut self, v: Var, body: &Arc<Formula>) -> Result<Elem, EvalError> {
        let fv = self.free_of(body);
        let mut packed = 0u64;
        let mut count = 0;
        for w in fv.iter().filter(|w| **w != v) {
            packed = packed << 8 | self.lookup(*w)? as u64;
            count += 1;
        }
        let key = (Arc::as_ptr(body) as usize, v.0, packed);
        if count <= MEMO_MAX_FREE {
            if let Some(&e) = self.memo.get(&key) {
                return Ok(e);
            }
        }
        let set = self.ext(body, v)?;
        let e = self.m.choose(set);
        if count <= MEMO_MAX_FREE {
            self.memo.insert(key, e);
        }
        Ok(e)
    }

    fn eval_term(&mut self, t: &Term) -> Result<Elem, EvalError> {
        match t {
            Term::Var(v) => self.lookup(*v),
            Term::Const(c) => Ok(self.m.constant(*c)),
            Term::App(f, args) => {
                let mut vals = [0; 4];
                if args.len() <= 4 {
                    for (slot, a) in vals.iter_mut().zip(args) {
                        *slot = self.eval_term(a)?;
                    }
                    Ok(self.m.apply(*f, &vals[..args.len()]))
                } else {
                    let vals = args.iter().map(|a| self.eval_term(a)).collect::<Result<Vec<_>, _>>()?;
                    Ok(self.m.apply(*f, &vals))
                }
            }
            Term::Eps(v, body) => self.eval_eps(*v, body),
        }
    }

    fn eval_formula(&mut self, f: &Formula) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Eq(a, b) => self.eval_term(a)? == self.eval_term(b)?,
            Formula::Rel(r, args) => {
                let vals = args.iter().map(|a| self.eval_term(a)).collect::<Result<Vec<_>, _>>()?;
                self.m.holds(*r, &vals)
            }
            Formula::Not(g) => !self.eval_formula(g)?,
            Formula::Or(a, b) => self.eval_formula(a)? || self.eval_formula(b)?,
            Formula::And(a, b) => self.eval_formula(a)? && self.eval_formula(b)?,
            Formula::Imp(a, b) => !self.eval_formula(a)? || self.eval_formula(b)?,
            Formula::Iff(a, b) => self.eval_formula(a)? == self.eval_formula(b)?,
            Formula::Exists(v, g) => !self.ext(g, *v)?.is_empty(),
            Formula::Forall(v, g) => self.ext(g, *v)? == self.m.carrier(),
        })
    }
}

pub fn eval_term(m: &ChoiceStructure, a: &Assignment, t: &Term) -> Result<Elem, EvalError> {
    Evaluator::new(m).term(a, t)
}

pub fn eval_formula(m: &ChoiceStructure, a: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(m).formula(a, f)
}

/// Truth of a sentence in the structure: the semantic stand-in for
/// derivability from the structure's complete theory.
pub fn theory_holds(m: &ChoiceStructure, sentence: &Formula) -> Result<bool, EvalError> {
    let fv = sentence.free_vars();
    if !fv.is_empty() {
        let names: Vec<String> = fv.iter().map(|v| v.to_string()).collect();
        return Err(EvalError::OpenFormula(names.join(", ")));
    }
    eval_formula(m, &Assignment::new(), sentence)
}
