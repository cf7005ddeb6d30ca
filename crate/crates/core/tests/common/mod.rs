//! Strategies shared by the property suites.

#![allow(dead_code)]

use std::sync::Arc;

use epscan_core::semantics::{ChoiceRule, ChoiceStructure};
use epscan_core::syntax::{ConstId, Formula, FunId, RelId, Signature, Term, Var};
use proptest::prelude::*;

/// `r/2 p/1 f/1 g/2 c d`: every kind of symbol, small arities.
pub fn signature() -> Signature {
    Signature::new(
        vec![("r".to_string(), 2), ("p".to_string(), 1)],
        vec![("f".to_string(), 1), ("g".to_string(), 2)],
        vec!["c".to_string(), "d".to_string()],
    )
    .expect("fixed signature")
}

pub const VARS: u32 = 4;

fn var() -> impl Strategy<Value = Var> {
    (0..VARS).prop_map(Var)
}

fn leaf_term() -> impl Strategy<Value = Term> {
    prop_oneof![var().prop_map(Term::Var), (0..2u32).prop_map(|c| Term::Const(ConstId(c)))]
}

fn atomic(terms: BoxedStrategy<Term>) -> impl Strategy<Value = Formula> {
    prop_oneof![
        (terms.clone(), terms.clone()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (terms.clone(), terms.clone()).prop_map(|(a, b)| Formula::Rel(RelId(0), vec![a, b])),
        terms.prop_map(|a| Formula::Rel(RelId(1), vec![a])),
    ]
}

/// Terms built over `inner` formulas: applications and ε-terms.
fn terms_over(formulas: BoxedStrategy<Formula>) -> BoxedStrategy<Term> {
    let leaf = leaf_term().boxed();
    prop_oneof![
        3 => leaf.clone(),
        1 => leaf.clone().prop_map(|t| Term::App(FunId(0), vec![t])),
        1 => (leaf.clone(), leaf).prop_map(|(a, b)| Term::App(FunId(1), vec![a, b])),
        1 => (var(), formulas).prop_map(|(v, f)| Term::Eps(v, Arc::new(f))),
    ]
    .boxed()
}

/// Formulas over [`signature`] with every connective, ε-terms included.
pub fn formula() -> impl Strategy<Value = Formula> {
    let leaf = atomic(leaf_term().boxed());
    leaf.prop_recursive(5, 48, 2, |inner| {
        let inner = inner.boxed();
        let a = || inner.clone().prop_map(Arc::new);
        prop_oneof![
            atomic(terms_over(inner.clone())),
            a().prop_map(Formula::Not),
            (a(), a()).prop_map(|(x, y)| Formula::Or(x, y)),
            (a(), a()).prop_map(|(x, y)| Formula::And(x, y)),
            (a(), a()).prop_map(|(x, y)| Formula::Imp(x, y)),
            (a(), a()).prop_map(|(x, y)| Formula::Iff(x, y)),
            (var(), a()).prop_map(|(v, x)| Formula::Exists(v, x)),
            (var(), a()).prop_map(|(v, x)| Formula::Forall(v, x)),
        ]
    })
}

/// Terms with ε-subterms.
pub fn term() -> impl Strategy<Value = Term> {
    terms_over(formula().boxed())
}

/// A structure over [`signature`] with random tables and choice.
pub fn structure() -> impl Strategy<Value = ChoiceStructure> {
    (1usize..=4).prop_flat_map(|n| {
        let pairs: Vec<Vec<usize>> = (0..n).flat_map(|x| (0..n).map(move |y| vec![x, y])).collect();
        let singles: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
        (
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()),
            proptest::sample::subsequence(singles.clone(), 0..=singles.len()),
            proptest::collection::vec(0..n, n),
            proptest::collection::vec(0..n, n * n),
            proptest::collection::vec(0..n, 2),
            prop_oneof![
                (0..n).prop_map(|e| ChoiceRule::Min { empty: e }),
                proptest::collection::vec(0..n, 1 << n).prop_map(move |t| {
                    // members of nonempty sets must be chosen from the set
                    ChoiceRule::Table(
                        (0..t.len()).map(|s| if s == 0 { t[0] } else { pick_member(s, t[s]) }).collect(),
                    )
                }),
            ],
        )
            .prop_map(move |(r, p, f, g, consts, choice)| {
                ChoiceStructure::new(signature(), n, vec![r, p], vec![f, g], consts, choice).expect("valid random structure")
            })
    })
}

/// The `k mod |s|`-th member of the set with mask `s`.
fn pick_member(s: usize, k: usize) -> usize {
    let members: Vec<usize> = (0..usize::BITS as usize).filter(|i| s >> i & 1 == 1).collect();
    members[k % members.len()]
}
