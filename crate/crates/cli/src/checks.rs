use std::time::Instant;

use epscan_core::algebra::{from_structure, AlgebraError};
use epscan_core::canonical::{
    build_canonical_model, canonical_injection, check_atomic, check_elementary, lift_hom, naturality_oracle, CanonicalModel,
};
use epscan_core::definability::oracle::ORACLE_MAX_CARRIER;
use epscan_core::definability::{definable_closure, DefinableFamily, DEFAULT_MAX_ROUNDS};
use epscan_core::semantics::{ChoiceStructure, Elem};
use epscan_core::termalgebra::{
    analyze_kernel, build_lt1, build_phi, check_rich, check_sigma_prop, check_theorem_main, infer_kind, KernelReport,
    Lt1Algebra, PhiMap, TermAlgebraError,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::InputError;
use crate::report::{CheckRecord, Verdict};

/// Budgets and switches shared by the checks.
#[derive(Clone, Copy, Debug)]
pub struct Opts {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub timing: bool,
}

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

/// Runs `f` and stamps the record with its duration when timing is on.
pub fn timed(opts: &Opts, f: impl FnOnce() -> Result<CheckRecord, InputError>) -> Result<CheckRecord, InputError> {
    let start = Instant::now();
    let mut rec = f()?;
    if opts.timing {
        rec.time_ms = Some((start.elapsed().as_secs_f64() * 1e4).round() / 10.0);
    }
    Ok(rec)
}

fn record(name: &'static str, verdict: Verdict, summary: String, details: Value) -> CheckRecord {
    CheckRecord { name, verdict, summary, details, time_ms: None }
}

/// The family and canonical model every check starts from.
pub struct Base {
    pub fam: DefinableFamily,
    pub canonical: CanonicalModel,
}

pub fn base(m: &ChoiceStructure) -> Result<Base, InputError> {
    let fam = definable_closure(m, 1, DEFAULT_MAX_ROUNDS)?;
    let canonical = build_canonical_model(m, &fam)?;
    Ok(Base { fam, canonical })
}

pub fn atomic(b: &Base) -> Result<CheckRecord, InputError> {
    let r = check_atomic(&b.canonical)?;
    let summary = format!("{} representatives, {} violations", r.checked, r.violations.len());
    Ok(record("atomic", Verdict::from_bool(r.passed(), Verdict::Fail), summary, value(&r)))
}

pub fn eta(b: &Base) -> CheckRecord {
    let r = canonical_injection(&b.canonical);
    let summary = format!(
        "injective {}, surjective {}, {} table violations",
        r.injective,
        r.surjective,
        r.violations.len()
    );
    record("eta", Verdict::from_bool(r.holds(), Verdict::Fail), summary, value(&r))
}

pub fn elementary(b: &Base, opts: &Opts) -> Result<CheckRecord, InputError> {
    let r = check_elementary(&b.canonical, opts.depth, opts.samples, opts.seed)?;
    let summary = format!(
        "depth {}: {} exhaustive + {} sampled formulas, {} instances{}",
        r.depth,
        r.exhaustive_formulas,
        r.sampled_formulas,
        r.instances,
        r.counterexample.as_ref().map(|c| format!(", counterexample {}", c.formula)).unwrap_or_default()
    );
    Ok(record("elementary", Verdict::from_bool(r.passed(), Verdict::Fail), summary, value(&r)))
}

pub fn naturality(h: &[Elem], b1: &Base, b2: &Base) -> Result<CheckRecord, InputError> {
    let r = lift_hom(h, &b1.canonical, &b2.canonical)?;
    let (m1, m2) = (&b1.canonical.source, &b2.canonical.source);
    let oracle = if m1.size() <= ORACLE_MAX_CARRIER && m2.size() <= ORACLE_MAX_CARRIER {
        Some(naturality_oracle(h, m1, m2, 4)?)
    } else {
        None
    };
    let agrees = oracle.as_ref().map(|o| {
        o.range_condition == r.range_condition && o.single_valued == r.single_valued && o.square_commutes == r.square_commutes
    });
    let verdict = if !r.square_commutes || agrees == Some(false) {
        Verdict::Fail
    } else {
        Verdict::from_bool(r.passed(), Verdict::Finding)
    };
    let summary = format!(
        "homomorphism {}, range {}, single-valued {}, square {}{}",
        r.homomorphism,
        r.range_condition,
        r.single_valued,
        r.square_commutes,
        agrees.map(|a| format!(", oracle agrees {a}")).unwrap_or_default()
    );
    Ok(record("naturality", verdict, summary, json!({ "lift": value(&r), "oracle": value(&oracle) })))
}

/// Lt1, Φ and the kernel analysis, shared by `lt-can` and `rich`.
pub struct TermStage {
    pub lt1: Lt1Algebra,
    pub phi: PhiMap,
    pub kernel: KernelReport,
}

pub fn term_stage(m: &ChoiceStructure, b: &Base) -> Result<TermStage, InputError> {
    let lt1 = build_lt1(m, &b.fam)?;
    let phi = build_phi(m, &lt1, &b.canonical)?;
    let kernel = analyze_kernel(&lt1, &phi, b.canonical.size())?;
    Ok(TermStage { lt1, phi, kernel })
}

pub fn lt_can(t: &TermStage) -> CheckRecord {
    let k = &t.kernel;
    let factor_ok = k.quotient.as_ref().is_none_or(|q| q.triangle && q.iota_bijective);
    let verdict = if !t.phi.surjective || !t.phi.transfinity || !factor_ok {
        Verdict::Fail
    } else {
        Verdict::from_bool(k.ca1.congruence, Verdict::Finding)
    };
    let summary = format!(
        "Lt1 {} elements, Φ surjective {}, Φ(S) ∈ S {}, kernel blocks {:?}, congruence CA1 {} / BA {}",
        t.lt1.size(),
        t.phi.surjective,
        t.phi.transfinity,
        short(&k.block_sizes),
        k.ca1.congruence,
        k.ba.congruence
    );
    let details = json!({
        "lt1_size": t.lt1.size(),
        "phi": value(&t.phi),
        "kernel": value(k),
    });
    record("lt-can", verdict, summary, details)
}

fn short(v: &[usize]) -> Vec<usize> {
    v.iter().copied().take(8).collect()
}

pub fn rich(t: &TermStage) -> CheckRecord {
    let q = t.kernel.quotient.as_ref().filter(|q| q.with_c0).map(|q| &q.algebra);
    let r = check_rich(&t.lt1.algebra, q);
    let nr0_ok = r.lt1.nr0_is_two && r.quotient.as_ref().is_none_or(|c| c.nr0_is_two || c.size == 1);
    let all = r.lt1.passed() && r.quotient.as_ref().is_none_or(|c| c.passed());
    let verdict = if !nr0_ok { Verdict::Fail } else { Verdict::from_bool(all, Verdict::Finding) };
    let summary = format!(
        "Lt1: c0 Boolean homomorphism {}, Nr0 ≅ 2 {}{}",
        r.lt1.homomorphism,
        r.lt1.nr0_is_two,
        r.quotient
            .as_ref()
            .map(|c| format!("; quotient: homomorphism {}, Nr0 ≅ 2 {}", c.homomorphism, c.nr0_is_two))
            .unwrap_or_default()
    );
    record("rich", verdict, summary, value(&r))
}

fn algebra_failure(name: &'static str, e: TermAlgebraError) -> Result<CheckRecord, InputError> {
    match e {
        TermAlgebraError::Algebra(AlgebraError::Signature(s)) => {
            Ok(record(name, Verdict::Skipped, format!("not an algebra signature: {s}"), Value::Null))
        }
        TermAlgebraError::Algebra(e) => Ok(record(name, Verdict::Fail, e.to_string(), Value::Null)),
        other => Err(InputError(other.to_string())),
    }
}

pub fn main_theorem(m: &ChoiceStructure) -> Result<CheckRecord, InputError> {
    let kind = infer_kind(m);
    match check_theorem_main(m, kind) {
        Ok(r) => {
            let summary = format!(
                "canonical {} vs term algebra {} ({} reading): part 1 {}{}",
                r.canonical_size,
                r.term_size,
                r.term_reading,
                r.part1,
                r.part2
                    .map(|p| format!(
                        "; part 2: iso {} iff Nr0 ≅ 2 {} → {p}",
                        r.part2_isomorphic.unwrap_or_default(),
                        r.part2_nr0_is_two.unwrap_or_default()
                    ))
                    .unwrap_or_default()
            );
            Ok(record("main", Verdict::from_bool(r.holds(), Verdict::Finding), summary, value(&r)))
        }
        Err(e) => algebra_failure("main", e),
    }
}

pub fn sigma(m: &ChoiceStructure) -> Result<CheckRecord, InputError> {
    let kind = infer_kind(m);
    match check_sigma_prop(m, kind) {
        Ok(r) => {
            let summary = format!(
                "hypothesis {}, Ker Φ congruence {}, quotient {:?} vs canonical {}, conclusion {}",
                r.hypothesis, r.kernel_congruence, r.quotient_size, r.canonical_size, r.conclusion
            );
            Ok(record("sigma", Verdict::from_bool(r.holds(), Verdict::Finding), summary, value(&r)))
        }
        Err(e) => algebra_failure("sigma", e),
    }
}

/// Whether the structure reads as an algebra of its inferred kind.
pub fn algebra_status(m: &ChoiceStructure) -> Result<Option<String>, AlgebraError> {
    match from_structure(m, infer_kind(m)) {
        Ok(a) => Ok(Some(format!("{:?} with {} atoms", infer_kind(m), a.algebra.atom_count()))),
        Err(AlgebraError::Signature(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
