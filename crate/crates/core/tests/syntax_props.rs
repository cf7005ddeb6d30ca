mod common;

use std::collections::BTreeSet;

use epscan_core::syntax::{desugar, parse_formula, parse_term, rename_var, substitute, Printable, Var};
use proptest::prelude::*;

use common::{formula, signature, term};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn formulas_round_trip(f in formula()) {
        let sig = signature();
        let text = f.to_text(&sig);
        prop_assert_eq!(parse_formula(&text, &sig).unwrap(), f);
    }

    #[test]
    fn terms_round_trip(t in term()) {
        let sig = signature();
        prop_assert_eq!(parse_term(&t.to_text(&sig), &sig).unwrap(), t);
    }

    #[test]
    fn desugar_reaches_core_and_is_idempotent(f in formula()) {
        let d = desugar(&f);
        prop_assert!(d.is_core());
        prop_assert_eq!(desugar(&d), d.clone());
        prop_assert!(d.free_vars() == f.free_vars());
    }

    #[test]
    fn substitution_free_variables(f in formula(), t in term(), v in 0..4u32) {
        let v = Var(v);
        let result = substitute(&f, &t, v);
        let mut expected: BTreeSet<Var> = f.free_vars();
        if expected.remove(&v) {
            expected.extend(t.free_vars());
        }
        prop_assert_eq!(result.free_vars(), expected);
    }

    #[test]
    fn substituting_an_absent_variable_changes_nothing(f in formula(), t in term()) {
        let v = Var(9);
        prop_assert_eq!(substitute(&f, &t, v), f);
    }

    #[test]
    fn substitution_composes_through_a_fresh_variable(f in formula(), t in term(), v in 0..4u32) {
        let (v, w) = (Var(v), Var(7));
        let via = substitute(&substitute(&f, &epscan_core::syntax::Term::Var(w), v), &t, w);
        prop_assert!(via.alpha_eq(&substitute(&f, &t, v)));
    }

    #[test]
    fn renaming_to_a_fresh_variable_is_alpha_invisible(f in formula(), v in 0..4u32) {
        let (v, w) = (Var(v), Var(8));
        let renamed = rename_var(&f, v, w);
        prop_assert!(renamed.free_vars().len() == f.free_vars().len());
        prop_assert!(rename_var(&renamed, w, v).alpha_eq(&f));
    }
}
