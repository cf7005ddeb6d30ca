//! The canonical model of a structure's theory.
//!
//! Its elements are classes of closed ε-terms `(eps v0 φ)` with `φ` in the
//! one variable `v0`, two terms being identified when the theory proves
//! them equal. For the theory of a single finite structure that is equality
//! of their values, so a canonical element is stored as one representative
//! term together with its value in the source, and the classes correspond
//! exactly to the values `choice(S)` for definable `S`.

mod check;
mod naturality;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use check::{check_atomic, check_elementary, AtomicReport, Counterexample, ElementaryReport, ELEMENTARY_EXHAUSTIVE_DEPTH};
pub use naturality::{lift_hom, naturality_oracle, parse_hom, HomError, NaturalityReport, OracleVerdicts};

use crate::definability::DefinableFamily;
use crate::semantics::{ChoiceRule, ChoiceStructure, Elem, ElemSet, EvalError, Evaluator, Assignment, StructureError};
use crate::syntax::{Formula, Printable, Term, Var};

const V0: Var = Var(0);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("the definable family is not saturated")]
    Unsaturated,
    #[error("the definable family belongs to a different structure")]
    WrongFamily,
    #[error("{0} has no representative in the canonical universe")]
    NotClosed(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A canonical element: a representative closed ε-term and its value in
/// the source structure.
#[derive(Clone, Debug)]
pub struct CanonicalElement {
    pub representative: Term,
    /// The definable set whose ε-term is the representative.
    pub set: ElemSet,
    pub value: Elem,
}

/// The canonical model, as a choice structure on `0..universe.len()` over
/// the source signature.
#[derive(Clone, Debug)]
pub struct CanonicalModel {
    pub universe: Vec<CanonicalElement>,
    pub structure: ChoiceStructure,
    pub source: ChoiceStructure,
    /// Subsets of the canonical universe whose image is definable; on
    /// these the canonical choice is transported from the source.
    pub definable_subsets: usize,
}

impl CanonicalModel {
    pub fn size(&self) -> usize {
        self.universe.len()
    }

    /// The canonical element with source value `e`.
    pub fn index_of(&self, e: Elem) -> Option<usize> {
        self.universe.iter().position(|c| c.value == e)
    }

    /// Image of a set of canonical elements in the source.
    pub fn image(&self, x: ElemSet) -> ElemSet {
        x.map(|i| self.universe[i].value)
    }

    pub fn representative_text(&self, i: usize) -> String {
        self.universe[i].representative.to_text(self.source.signature())
    }
}

/// Builds the canonical model from a saturated family: the universe is
/// `{ choice(S) : S definable }`, ordered by source value, each element
/// represented by the ε-term of its smallest defining formula.
/// Relations hold when the atomic sentence over the representatives holds
/// in the source; `f(a⃗)` is the class of `(eps v0 (= v0 (f t⃗)))`; the
/// choice on a set of canonical elements is the source choice when its
/// image is definable, otherwise the least element.
pub fn build_canonical_model(m: &ChoiceStructure, fam: &DefinableFamily) -> Result<CanonicalModel, CanonicalError> {
    if !fam.saturated {
        return Err(CanonicalError::Unsaturated);
    }
    if fam.size != m.size() {
        return Err(CanonicalError::WrongFamily);
    }
    let mut best: Vec<Option<(u64, ElemSet, &Arc<Formula>)>> = vec![None; m.size()];
    for (&s, w) in &fam.sets {
        let e = m.choose(s);
        if best[e].is_none_or(|(size, _, _)| w.size < size) {
            best[e] = Some((w.size, s, &w.witness));
        }
    }
    let universe: Vec<CanonicalElement> = best
        .iter()
        .enumerate()
        .filter_map(|(e, b)| {
            b.map(|(_, set, phi)| CanonicalElement { representative: Term::Eps(V0, Arc::clone(phi)), set, value: e })
        })
        .collect();
    let n = universe.len();
    let index_of = |e: Elem| universe.iter().position(|c| c.value == e);
    let sig = m.signature().clone();
    let mut ev = Evaluator::new(m);
    let empty = Assignment::new();

    let class_of = |ev: &mut Evaluator, t: Term| -> Result<usize, CanonicalError> {
        // the class of (eps v0 (= v0 t))
        let text = t.to_text(&sig);
        let named = Term::eps(V0, Formula::eq(Term::Var(V0), t));
        let e = ev.term(&empty, &named)?;
        index_of(e).ok_or(CanonicalError::NotClosed(text))
    };

    let mut relations = Vec::new();
    for r in sig.relation_ids() {
        let arity = sig.relation(r).arity;
        let mut tuples = Vec::new();
        for args in crate::semantics::tuples(n, arity) {
            let atom = Formula::Rel(r, args.iter().map(|&i| universe[i].representative.clone()).collect());
            if ev.formula(&empty, &atom)? {
                tuples.push(args);
            }
        }
        relations.push(tuples);
    }
    let mut functions = Vec::new();
    for f in sig.function_ids() {
        let arity = sig.function(f).arity;
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        for args in crate::semantics::tuples(n, arity) {
            let t = Term::App(f, args.iter().map(|&i| universe[i].representative.clone()).collect());
            table.push(class_of(&mut ev, t)?);
        }
        functions.push(table);
    }
    let mut constants = Vec::new();
    for c in sig.constant_ids() {
        constants.push(class_of(&mut ev, Term::Const(c))?);
    }

    let mut table = Vec::with_capacity(1 << n);
    let mut definable_subsets = 0;
    for x in ElemSet::all_subsets(n) {
        let image = x.map(|i| universe[i].value);
        let chosen = if fam.contains_set(image) {
            definable_subsets += 1;
            index_of(m.choose(image)).expect("choice of a definable set is canonical")
        } else {
            x.min().unwrap_or(0)
        };
        table.push(chosen);
    }
    let choice = ChoiceRule::Table(table);
    let choice = match choice.as_min(n) {
        Some(empty) => ChoiceRule::Min { empty },
        None => choice,
    };
    let structure = ChoiceStructure::new(sig, n, relations, functions, constants, choice)?;
    Ok(CanonicalModel { universe, structure, source: m.clone(), definable_subsets })
}

/// The canonical injection with the results of checking it.
#[derive(Clone, Debug, Serialize)]
pub struct Injection {
    /// `map[i]` is the source value of canonical element `i`.
    pub map: Vec<Elem>,
    pub injective: bool,
    pub surjective: bool,
    /// Table entries where η fails to commute with the interpretations.
    pub violations: Vec<String>,
}

impl Injection {
    pub fn holds(&self) -> bool {
        self.injective && self.violations.is_empty()
    }
}

/// η maps each canonical element to its source value. Checks injectivity
/// and that η preserves and reflects every relation, function and constant.
pub fn canonical_injection(c: &CanonicalModel) -> Injection {
    let map: Vec<Elem> = c.universe.iter().map(|e| e.value).collect();
    let mut sorted = map.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let injective = sorted.len() == map.len();
    let surjective = sorted.len() == c.source.size();
    let sig = c.source.signature();
    let n = c.size();
    let mut violations = Vec::new();
    for r in sig.relation_ids() {
        for args in crate::semantics::tuples(n, sig.relation(r).arity) {
            let image: Vec<Elem> = args.iter().map(|&i| map[i]).collect();
            if c.structure.holds(r, &args) != c.source.holds(r, &image) {
                violations.push(format!("{} at canonical {:?}", sig.relation(r).name, args));
            }
        }
    }
    for f in sig.function_ids() {
        for args in crate::semantics::tuples(n, sig.function(f).arity) {
            let image: Vec<Elem> = args.iter().map(|&i| map[i]).collect();
            if map[c.structure.apply(f, &args)] != c.source.apply(f, &image) {
                violations.push(format!("{} at canonical {:?}", sig.function(f).name, args));
            }
        }
    }
    for k in sig.constant_ids() {
        if map[c.structure.constant(k)] != c.source.constant(k) {
            violations.push(format!("constant {}", sig.constant(k)));
        }
    }
    Injection { map, injective, surjective, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::definability::{definable_closure, DEFAULT_MAX_ROUNDS};

    fn canon(m: &ChoiceStructure) -> CanonicalModel {
        let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS).unwrap();
        build_canonical_model(m, &fam).unwrap()
    }

    #[test]
    fn b2_is_its_own_canonical_model() {
        let m = corpus::boolean_algebra(1);
        let c = canon(&m);
        assert_eq!(c.size(), 2);
        let eta = canonical_injection(&c);
        assert_eq!(eta.map, vec![0, 1]);
        assert!(eta.holds() && eta.surjective);
        assert_eq!(c.structure, m);
    }

    #[test]
    fn b4_tables_match() {
        let m = corpus::boolean_algebra(2);
        let c = canon(&m);
        assert_eq!(c.size(), 4);
        assert!(canonical_injection(&c).holds());
        assert_eq!(c.structure, m);
        assert_eq!(c.definable_subsets, 16);
    }

    #[test]
    fn unsaturated_family_is_rejected() {
        let m = corpus::boolean_algebra(2);
        let mut fam = definable_closure(&m, 1, DEFAULT_MAX_ROUNDS).unwrap();
        fam.saturated = false;
        assert_eq!(build_canonical_model(&m, &fam).unwrap_err(), CanonicalError::Unsaturated);
    }

    #[test]
    fn representatives_denote_their_values() {
        let m = corpus::cycle3();
        let c = canon(&m);
        let mut ev = Evaluator::new(&m);
        for e in &c.universe {
            assert_eq!(ev.term(&Assignment::new(), &e.representative).unwrap(), e.value);
            assert_eq!(m.choose(e.set), e.value);
        }
    }
}
