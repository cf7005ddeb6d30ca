use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CanonicalModel;
use crate::enumerate::{enumerate, EnumConfig, RandomGen};
use crate::semantics::{assignments, Assignment, EvalError, Evaluator};
use crate::syntax::{Formula, Printable, Var};

/// Formulas up to this depth are checked exhaustively; deeper ones are
/// sampled.
pub const ELEMENTARY_EXHAUSTIVE_DEPTH: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct AtomicViolation {
    pub element: usize,
    pub representative: String,
    /// What the representative evaluates to inside the canonical model.
    pub value_in_canonical: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomicReport {
    pub checked: usize,
    pub violations: Vec<AtomicViolation>,
}

impl AtomicReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every representative inside the canonical model itself: each
/// canonical element must be the value of its own ε-term there.
pub fn check_atomic(c: &CanonicalModel) -> Result<AtomicReport, EvalError> {
    let mut ev = Evaluator::new(&c.structure);
    let empty = Assignment::new();
    let mut violations = Vec::new();
    for (i, e) in c.universe.iter().enumerate() {
        let got = ev.term(&empty, &e.representative)?;
        if got != i {
            violations.push(AtomicViolation { element: i, representative: c.representative_text(i), value_in_canonical: got });
        }
    }
    Ok(AtomicReport { checked: c.size(), violations })
}

/// A formula and assignment on which the canonical model and the source
/// disagree.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub formula: String,
    /// `(variable, canonical element)` pairs.
    pub assignment: Vec<(String, usize)>,
    pub in_canonical: bool,
    pub in_source: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementaryReport {
    pub depth: usize,
    pub exhaustive_formulas: usize,
    pub sampled_formulas: usize,
    pub seed: u64,
    /// Formula-assignment pairs compared.
    pub instances: u64,
    pub counterexample: Option<Counterexample>,
}

impl ElementaryReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct Comparer<'c> {
    c: &'c CanonicalModel,
    inner: Evaluator<'c>,
    outer: Evaluator<'c>,
    instances: u64,
}

impl Comparer<'_> {
    fn compare(&mut self, f: &Formula) -> Result<Option<Counterexample>, EvalError> {
        let vars: Vec<Var> = f.free_vars().into_iter().collect();
        for a in assignments(self.c.size(), &vars) {
            let mut image = Assignment::new();
            for (v, i) in a.pairs() {
                image.set(v, self.c.universe[i].value);
            }
            self.instances += 1;
            let in_canonical = self.inner.formula(&a, f)?;
            let in_source = self.outer.formula(&image, f)?;
            if in_canonical != in_source {
                return Ok(Some(Counterexample {
                    formula: f.to_text(self.c.source.signature()),
                    assignment: a.pairs().map(|(v, i)| (v.to_string(), i)).collect(),
                    in_canonical,
                    in_source,
                }));
            }
        }
        Ok(None)
    }
}

/// Compares truth in the canonical model with truth in the source along η,
/// `C ⊨ φ[a⃗]` iff `source ⊨ φ[η a⃗]`, for every formula in `v0, v1` of
/// depth ≤ 2 and every assignment, then for `samples` random formulas of
/// depth 3 to `depth`. Stops at the first disagreement.
pub fn check_elementary(c: &CanonicalModel, depth: usize, samples: usize, seed: u64) -> Result<ElementaryReport, EvalError> {
    let sig = c.source.signature();
    let mut cmp = Comparer { c, inner: Evaluator::new(&c.structure), outer: Evaluator::new(&c.source), instances: 0 };
    let mut report = ElementaryReport { depth, exhaustive_formulas: 0, sampled_formulas: 0, seed, instances: 0, counterexample: None };
    let levels = enumerate(sig, &EnumConfig::new(&[0, 1], depth.min(ELEMENTARY_EXHAUSTIVE_DEPTH)));
    for f in levels.all_formulas() {
        report.exhaustive_formulas += 1;
        if let Some(cx) = cmp.compare(f)? {
            report.counterexample = Some(cx);
            report.instances = cmp.instances;
            return Ok(report);
        }
    }
    if depth > ELEMENTARY_EXHAUSTIVE_DEPTH {
        let gen = RandomGen::new(sig, &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let d = rng.gen_range(ELEMENTARY_EXHAUSTIVE_DEPTH + 1..=depth);
            let f = gen.formula(&mut rng, d);
            report.sampled_formulas += 1;
            if let Some(cx) = cmp.compare(&f)? {
                report.counterexample = Some(cx);
                break;
            }
        }
    }
    report.instances = cmp.instances;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::build_canonical_model;
    use crate::corpus;
    use crate::definability::{definable_closure, DEFAULT_MAX_ROUNDS};

    #[test]
    fn b2_is_atomic_and_elementary() {
        let m = corpus::boolean_algebra(1);
        let fam = definable_closure(&m, 1, DEFAULT_MAX_ROUNDS).unwrap();
        let c = build_canonical_model(&m, &fam).unwrap();
        assert!(check_atomic(&c).unwrap().passed());
        let r = check_elementary(&c, 3, 50, 0).unwrap();
        assert!(r.passed(), "{:?}", r.counterexample);
        assert_eq!(r.sampled_formulas, 50);
        assert!(r.exhaustive_formulas > 0);
    }
}
