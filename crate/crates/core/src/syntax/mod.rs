//! The epsilon language: signatures, terms, formulas, substitution and the
//! fully parenthesized prefix grammar used for input and output.
//!
//! Terms and formulas share subtrees through [`Arc`], so substitution and
//! desugaring only rebuild the spine above the positions they touch. Large
//! witness terms produced by the definability engine rely on that sharing.

mod parse;
mod print;
mod subst;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse, parse_formula, parse_term, Expr, ParseError, ParseErrorKind};
pub use print::{Displayed, Printable};
pub use subst::{desugar, fresh_var, rename_var, substitute, substitute_term};

/// Words with a fixed meaning in the grammar.
pub const RESERVED: &[&str] = &["eps", "not", "or", "and", "imp", "iff", "ex", "all"];

/// A variable `v<index>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstId(pub u32);

/// What a declared name refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Rel(RelId),
    Fun(FunId),
    Const(ConstId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` declared more than once")]
    Duplicate(String),
    #[error("`{0}` is not a valid symbol name")]
    BadName(String),
    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(String),
}

/// A similarity type: relation, function and constant symbols.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    relations: Vec<SymbolDecl>,
    functions: Vec<SymbolDecl>,
    constants: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.relations == other.relations
            && self.functions == other.functions
            && self.constants == other.constants
    }
}

impl Eq for Signature {}

/// Names are `[a-z][a-z0-9_]*`, not reserved and not of variable shape.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    first.is_ascii_lowercase()
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !RESERVED.contains(&name)
        && parse::var_index(name).is_none()
}

impl Signature {
    pub fn new<R, F, C>(relations: R, functions: F, constants: C) -> Result<Self, SignatureError>
    where
        R: IntoIterator<Item = (String, usize)>,
        F: IntoIterator<Item = (String, usize)>,
        C: IntoIterator<Item = String>,
    {
        let mut sig = Signature::default();
        for (name, arity) in relations {
            let id = Symbol::Rel(RelId(sig.relations.len() as u32));
            sig.declare(&name, arity, id)?;
            sig.relations.push(SymbolDecl { name, arity });
        }
        for (name, arity) in functions {
            let id = Symbol::Fun(FunId(sig.functions.len() as u32));
            sig.declare(&name, arity, id)?;
            sig.functions.push(SymbolDecl { name, arity });
        }
        for name in constants {
            let id = Symbol::Const(ConstId(sig.constants.len() as u32));
            sig.declare(&name, 1, id)?;
            sig.constants.push(name);
        }
        Ok(sig)
    }

    fn declare(&mut self, name: &str, arity: usize, id: Symbol) -> Result<(), SignatureError> {
        if !is_valid_name(name) {
            return Err(SignatureError::BadName(name.to_string()));
        }
        if arity == 0 {
            return Err(SignatureError::ZeroArity(name.to_string()));
        }
        if self.index.insert(name.to_string(), id).is_some() {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn relations(&self) -> &[SymbolDecl] {
        &self.relations
    }

    pub fn functions(&self) -> &[SymbolDecl] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation(&self, id: RelId) -> &SymbolDecl {
        &self.relations[id.0 as usize]
    }

    pub fn function(&self, id: FunId) -> &SymbolDecl {
        &self.functions[id.0 as usize]
    }

    pub fn constant(&self, id: ConstId) -> &str {
        &self.constants[id.0 as usize]
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = RelId> {
        (0..self.relations.len() as u32).map(RelId)
    }

    pub fn function_ids(&self) -> impl Iterator<Item = FunId> {
        (0..self.functions.len() as u32).map(FunId)
    }

    pub fn constant_ids(&self) -> impl Iterator<Item = ConstId> {
        (0..self.constants.len() as u32).map(ConstId)
    }

    pub fn rel_id(&self, name: &str) -> Option<RelId> {
        match self.lookup(name)? {
            Symbol::Rel(id) => Some(id),
            _ => None,
        }
    }

    pub fn fun_id(&self, name: &str) -> Option<FunId> {
        match self.lookup(name)? {
            Symbol::Fun(id) => Some(id),
            _ => None,
        }
    }

    pub fn const_id(&self, name: &str) -> Option<ConstId> {
        match self.lookup(name)? {
            Symbol::Const(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(ConstId),
    App(FunId, Vec<Term>),
    /// `(eps v φ)`: a chosen witness of φ.
    Eps(Var, Arc<Formula>),
}

/// Formulas over the core connectives `=`, relations, `not`, `or` (plus ε
/// in terms), and the derived forms that [`desugar`] eliminates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Rel(RelId, Vec<Term>),
    Not(Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
}

impl Term {
    pub fn var(i: u32) -> Term {
        Term::Var(Var(i))
    }

    pub fn eps(v: Var, body: Formula) -> Term {
        Term::Eps(v, Arc::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_term(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable occurring in the term, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        all_vars_term(self, &mut out);
        out
    }

    /// Nesting depth: leaves are 0, every constructor adds one.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Eps(_, body) => 1 + body.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Eps(_, body) => 1 + body.size(),
        }
    }

    /// True when no derived connective occurs anywhere inside.
    pub fn is_core(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_core),
            Term::Eps(_, body) => body.is_core(),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Arc::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Arc::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_formula(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        all_vars_formula(self, &mut out);
        out
    }

    /// Nesting depth: an atom is one more than its deepest term, every
    /// connective or binder adds one.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Rel(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::Rel(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::Eq(a, b) => a.is_core() && b.is_core(),
            Formula::Rel(_, args) => args.iter().all(Term::is_core),
            Formula::Not(f) => f.is_core(),
            Formula::Or(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }
}

fn collect_term(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                out.insert(*v);
            }
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect_term(a, bound, out)),
        Term::Eps(v, body) => {
            bound.push(*v);
            collect_formula(body, bound, out);
            bound.pop();
        }
    }
}

fn collect_formula(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Eq(a, b) => {
            collect_term(a, bound, out);
            collect_term(b, bound, out);
        }
        Formula::Rel(_, args) => args.iter().for_each(|a| collect_term(a, bound, out)),
        Formula::Not(g) => collect_formula(g, bound, out),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
            collect_formula(a, bound, out);
            collect_formula(b, bound, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            bound.push(*v);
            collect_formula(g, bound, out);
            bound.pop();
        }
    }
}

fn all_vars_term(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(*v);
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| all_vars_term(a, out)),
        Term::Eps(v, body) => {
            out.insert(*v);
            all_vars_formula(body, out);
        }
    }
}

fn all_vars_formula(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Eq(a, b) => {
            all_vars_term(a, out);
            all_vars_term(b, out);
        }
        Formula::Rel(_, args) => args.iter().for_each(|a| all_vars_term(a, out)),
        Formula::Not(g) => all_vars_formula(g, out),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
            all_vars_formula(a, out);
            all_vars_formula(b, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            out.insert(*v);
            all_vars_formula(g, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ba_sig() -> Signature {
        Signature::new(
            vec![],
            vec![
                ("meet".to_string(), 2),
                ("join".to_string(), 2),
                ("compl".to_string(), 1),
            ],
            vec!["zero".to_string(), "one".to_string()],
        )
        .unwrap()
    }

    #[test]
    fn signature_rejects_collisions_and_bad_names() {
        let dup = Signature::new(vec![("p".to_string(), 1)], vec![("p".to_string(), 1)], vec![]);
        assert_eq!(dup.unwrap_err(), SignatureError::Duplicate("p".into()));
        let reserved = Signature::new(vec![], vec![], vec!["eps".to_string()]);
        assert!(matches!(reserved, Err(SignatureError::BadName(_))));
        let varlike = Signature::new(vec![], vec![], vec!["v3".to_string()]);
        assert!(matches!(varlike, Err(SignatureError::BadName(_))));
        let zero = Signature::new(vec![("p".to_string(), 0)], vec![], vec![]);
        assert!(matches!(zero, Err(SignatureError::ZeroArity(_))));
        // `v` alone and `v1x` are ordinary names
        assert!(Signature::new(vec![], vec![], vec!["v".to_string(), "v1x".to_string()]).is_ok());
    }

    #[test]
    fn free_vars_respect_epsilon_binding() {
        let sig = ba_sig();
        let t = parse_term("(eps v0 (= v0 v1))", &sig).unwrap();
        assert_eq!(t.free_vars(), [Var(1)].into());
        let f = parse_formula("(= v0 zero)", &sig).unwrap();
        assert_eq!(f.free_vars(), [Var(0)].into());
        let closed = parse_term("(eps v0 (= v0 zero))", &sig).unwrap();
        assert!(closed.free_vars().is_empty());
    }
}
