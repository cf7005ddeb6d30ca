mod common;

use epscan_core::definability::oracle::{brute_force_sets, DepthMode};
use epscan_core::definability::{definable_closure, DEFAULT_MAX_ROUNDS};
use epscan_core::semantics::ElemSet;
use proptest::prelude::*;

use common::structure;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_grows_monotonically_and_saturates(m in structure(), dim in 1usize..=2) {
        let fam = definable_closure(&m, dim, DEFAULT_MAX_ROUNDS).unwrap();
        prop_assert!(fam.saturated);
        for w in fam.trace.windows(2) {
            prop_assert!(w[0].elements.is_subset(w[1].elements));
            prop_assert!(w[0].sets <= w[1].sets);
            prop_assert!(w[0].functions <= w[1].functions);
        }
    }

    #[test]
    fn witnesses_check_out_and_choice_lands_in_e(m in structure()) {
        let fam = definable_closure(&m, 2, DEFAULT_MAX_ROUNDS).unwrap();
        prop_assert_eq!(fam.verify(&m), Vec::<String>::new());
        let e = fam.element_set();
        for s in fam.set_list() {
            prop_assert!(e.contains(m.choose(s)), "choice({:?}) = {} not in E", s, m.choose(s));
        }
    }

    #[test]
    fn definable_sets_form_a_boolean_algebra(m in structure()) {
        let fam = definable_closure(&m, 2, DEFAULT_MAX_ROUNDS).unwrap();
        let n = m.size();
        prop_assert!(fam.contains_set(ElemSet::full(n)));
        for s in fam.set_list() {
            prop_assert!(fam.contains_set(s.complement(n)));
            for t in fam.set_list() {
                prop_assert!(fam.contains_set(s.union(t)));
            }
        }
    }

    #[test]
    fn every_set_of_shallow_formulas_is_found(m in structure()) {
        let fam = definable_closure(&m, 2, DEFAULT_MAX_ROUNDS).unwrap();
        let oracle = brute_force_sets(&m, 3, DepthMode::Connective).unwrap();
        for s in &oracle.sets {
            prop_assert!(fam.contains_set(*s), "{:?} definable at depth 3 but missed", s);
        }
    }
}
