use serde::Serialize;

use super::{analyze_kernel, build_lt1, build_phi, KernelReport, TermAlgebraError};
use crate::algebra::{from_structure, is_isomorphic, is_isomorphic_boolean, AlgebraKind, MonadicAlgebra};
use crate::canonical::build_canonical_model;
use crate::definability::{definable_closure, DEFAULT_MAX_ROUNDS};
use crate::semantics::ChoiceStructure;

/// Monadic when the signature has a unary `c`, Boolean otherwise.
pub fn infer_kind(m: &ChoiceStructure) -> AlgebraKind {
    match m.signature().fun_id("c") {
        Some(f) if m.signature().function(f).arity == 1 => AlgebraKind::Ca1,
        _ => AlgebraKind::Ba,
    }
}

struct Pipeline {
    canonical: MonadicAlgebra,
    kernel: KernelReport,
}

fn pipeline(m: &ChoiceStructure, kind: AlgebraKind) -> Result<Pipeline, TermAlgebraError> {
    // fail early on structures that are not algebras of the given kind
    from_structure(m, kind)?;
    let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS)?;
    let c = build_canonical_model(m, &fam)?;
    let canonical = from_structure(&c.structure, kind)?.algebra;
    let l = build_lt1(m, &fam)?;
    let phi = build_phi(m, &l, &c)?;
    let kernel = analyze_kernel(&l, &phi, c.size())?;
    Ok(Pipeline { canonical, kernel })
}

/// Both parts of the main theorem on one structure.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub kind: AlgebraKind,
    pub canonical_size: usize,
    /// `kernel` when Ker Φ is a congruence of the relevant kind, else
    /// `generated`.
    pub term_reading: &'static str,
    pub term_size: usize,
    pub term_degenerate: bool,
    /// Part (1): the Boolean reducts of the canonical model and the term
    /// algebra are isomorphic (equal cardinality for finite algebras).
    pub part1: bool,
    /// Part (2), monadic structures only: the canonical model is
    /// isomorphic to the term algebra, c0 included ...
    pub part2_isomorphic: Option<bool>,
    /// ... and, computed separately, Nr₀ of the canonical model is 2.
    pub part2_nr0_is_two: Option<bool>,
    /// The biconditional between the two.
    pub part2: Option<bool>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.part1 && self.part2.unwrap_or(true)
    }
}

/// Builds the canonical model as an algebra and the canonical term algebra
/// (the quotient of `Lt1` by Ker Φ, or by the congruence it generates when
/// Ker Φ is not a congruence), then evaluates both parts of the theorem.
/// Boolean structures use Boolean congruences; monadic ones respect c0.
pub fn check_theorem_main(m: &ChoiceStructure, kind: AlgebraKind) -> Result<TheoremReport, TermAlgebraError> {
    let p = pipeline(m, kind)?;
    let with_c0 = kind == AlgebraKind::Ca1;
    let (reading, term) = p.kernel.term_algebra(with_c0);
    let part1 = is_isomorphic_boolean(&p.canonical, term).is_some();
    let (iso, nr0, part2) = if with_c0 {
        let iso = is_isomorphic(&p.canonical, term).is_some();
        let nr0 = is_isomorphic(&p.canonical.nr0().algebra, &MonadicAlgebra::two()).is_some();
        (Some(iso), Some(nr0), Some(iso == nr0))
    } else {
        (None, None, None)
    };
    Ok(TheoremReport {
        kind,
        canonical_size: p.canonical.size(),
        term_reading: reading,
        term_size: term.size(),
        term_degenerate: term.is_degenerate(),
        part1,
        part2_isomorphic: iso,
        part2_nr0_is_two: nr0,
        part2,
    })
}

/// The chain of verdicts for the σ-complete case.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub kind: AlgebraKind,
    /// Finite Boolean algebras are σ-complete.
    pub sigma_complete: bool,
    /// Monadic structures only: Nr₀ of the structure is 2.
    pub nr0_is_two: Option<bool>,
    pub hypothesis: bool,
    /// Ker Φ is a congruence of the relevant kind.
    pub kernel_congruence: bool,
    pub quotient_size: Option<usize>,
    pub canonical_size: usize,
    /// The quotient exists and is isomorphic to the canonical model.
    pub conclusion: bool,
    /// What the quotient by the generated congruence gives instead.
    pub generated_size: usize,
    pub generated_isomorphic: bool,
}

impl SigmaReport {
    /// The implication: hypothesis false, or conclusion true.
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

/// For Boolean structures, compares the Boolean quotient of the set
/// algebra by Ker Φ with the canonical model; for monadic ones, when
/// `Nr₀ ≅ 2`, the monadic quotient.
pub fn check_sigma_prop(m: &ChoiceStructure, kind: AlgebraKind) -> Result<SigmaReport, TermAlgebraError> {
    let source = from_structure(m, kind)?.algebra;
    let p = pipeline(m, kind)?;
    let with_c0 = kind == AlgebraKind::Ca1;
    let nr0_is_two = with_c0.then(|| is_isomorphic(&source.nr0().algebra, &MonadicAlgebra::two()).is_some());
    let iso = |a: &MonadicAlgebra| {
        if with_c0 {
            is_isomorphic(a, &p.canonical).is_some()
        } else {
            is_isomorphic_boolean(a, &p.canonical).is_some()
        }
    };
    let verdict = if with_c0 { &p.kernel.ca1 } else { &p.kernel.ba };
    let quotient = p.kernel.quotient.as_ref().filter(|q| verdict.congruence && q.with_c0 == with_c0);
    let generated = if with_c0 { &p.kernel.generated_ca1 } else { &p.kernel.generated_ba };
    Ok(SigmaReport {
        kind,
        sigma_complete: true,
        nr0_is_two,
        hypothesis: nr0_is_two.unwrap_or(true),
        kernel_congruence: verdict.congruence,
        quotient_size: quotient.map(|q| q.size),
        canonical_size: p.canonical.size(),
        conclusion: quotient.is_some_and(|q| iso(&q.algebra)),
        generated_size: generated.size,
        generated_isomorphic: iso(&generated.algebra),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn b2_part_one_fails_under_the_min_rule() {
        let r = check_theorem_main(&corpus::boolean_algebra(1), AlgebraKind::Ba).unwrap();
        assert_eq!(r.term_reading, "generated");
        assert_eq!((r.canonical_size, r.term_size), (2, 1));
        assert!(!r.part1);
        assert!(r.part2.is_none());
    }

    #[test]
    fn b2_table_satisfies_both_statements() {
        let m = corpus::b2_table();
        let r = check_theorem_main(&m, AlgebraKind::Ba).unwrap();
        assert_eq!(r.term_reading, "kernel");
        assert!(r.part1);
        let s = check_sigma_prop(&m, AlgebraKind::Ba).unwrap();
        assert!(s.kernel_congruence && s.conclusion && s.holds());
    }

    #[test]
    fn monadic_biconditional_sides_are_independent() {
        let r = check_theorem_main(&corpus::simple_monadic(2), AlgebraKind::Ca1).unwrap();
        assert_eq!(r.part2_nr0_is_two, Some(true));
        let r = check_theorem_main(&corpus::identity_monadic(2), AlgebraKind::Ca1).unwrap();
        assert_eq!(r.part2_nr0_is_two, Some(false));
        assert!(r.part2.is_some());
    }

    #[test]
    fn kind_inference() {
        assert_eq!(infer_kind(&corpus::boolean_algebra(2)), AlgebraKind::Ba);
        assert_eq!(infer_kind(&corpus::simple_monadic(2)), AlgebraKind::Ca1);
    }
}
