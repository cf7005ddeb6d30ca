//! The algebra of definable sets, the map Φ onto the canonical model, its
//! kernel, and the checks built on them.
//!
//! `Lt1` is the monadic set algebra of definable subsets of the carrier
//! with `c0 S = carrier` for nonempty `S`. Φ sends a definable set `S` to
//! the canonical element denoted by `(eps v0 φ_S)`, that is `choice(S)`.
//! The canonical term algebra is the quotient of `Lt1` by the kernel of Φ
//! when that kernel is a congruence; otherwise the quotient by the
//! congruence the kernel generates is reported alongside.

mod rich;
mod theorem;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use rich::{check_rich, RichReport, RichnessCheck, POINTWISE_MAX_SIZE};
pub use theorem::{check_sigma_prop, check_theorem_main, infer_kind, SigmaReport, TheoremReport};

use crate::algebra::{
    generated_congruence, is_congruence, quotient, AElem, AlgebraError, Congruence, MonadicAlgebra, Violation,
};
use crate::canonical::{CanonicalError, CanonicalModel};
use crate::definability::{DefinableFamily, EngineError};
use crate::semantics::{ChoiceStructure, ElemSet, EvalError};
use crate::syntax::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermAlgebraError {
    #[error("the definable family is not saturated")]
    Unsaturated,
    #[error("the definable sets do not form a Boolean set algebra: {0}")]
    NotBoolean(String),
    #[error("choice of {0} is not a canonical element")]
    NotCanonical(ElemSet),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The definable sets as a monadic algebra. Element `x` (a mask over the
/// atoms of the set algebra) is the definable set `sets[x]`.
#[derive(Clone, Debug)]
pub struct Lt1Algebra {
    pub algebra: MonadicAlgebra,
    pub sets: Vec<ElemSet>,
    /// Minimal nonempty definable sets, in order of their least element.
    pub atoms: Vec<ElemSet>,
    pub witnesses: Vec<Arc<Formula>>,
    pub carrier: usize,
}

impl Lt1Algebra {
    pub fn size(&self) -> usize {
        self.sets.len()
    }

    /// The element naming a definable set.
    pub fn element_of(&self, s: ElemSet) -> Option<AElem> {
        let x = self.atoms.iter().enumerate().filter(|(_, &a)| a.is_subset(s)).fold(0, |acc, (i, _)| acc | 1 << i);
        (self.sets.get(x) == Some(&s)).then_some(x)
    }
}

/// Builds `Lt1` from a saturated family. The definable sets must be closed
/// under the Boolean operations; their atoms then partition the carrier.
pub fn build_lt1(m: &ChoiceStructure, fam: &DefinableFamily) -> Result<Lt1Algebra, TermAlgebraError> {
    if !fam.saturated {
        return Err(TermAlgebraError::Unsaturated);
    }
    let n = m.size();
    let nonempty: Vec<ElemSet> = fam.sets.keys().copied().filter(|s| !s.is_empty()).collect();
    let mut atoms: Vec<ElemSet> =
        nonempty.iter().copied().filter(|&s| !nonempty.iter().any(|&t| t != s && t.is_subset(s))).collect();
    atoms.sort_by_key(|&a| ElemSet::min(a));
    let k = atoms.len();
    let covered = atoms.iter().fold(ElemSet::EMPTY, |acc, &a| acc.union(a));
    if covered != ElemSet::full(n) || atoms.iter().map(|a| a.len()).sum::<usize>() != n {
        return Err(TermAlgebraError::NotBoolean("atoms do not partition the carrier".into()));
    }
    if fam.sets.len() != 1 << k {
        return Err(TermAlgebraError::NotBoolean(format!("{} sets over {k} atoms", fam.sets.len())));
    }
    let sets: Vec<ElemSet> = (0..1usize << k)
        .map(|x| (0..k).filter(|i| x >> i & 1 == 1).fold(ElemSet::EMPTY, |acc, i| acc.union(atoms[i])))
        .collect();
    let mut witnesses = Vec::with_capacity(sets.len());
    for s in &sets {
        let w = fam.sets.get(s).ok_or_else(|| TermAlgebraError::NotBoolean(format!("{s} is missing")))?;
        witnesses.push(Arc::clone(&w.witness));
    }
    let one = (1usize << k) - 1;
    let c0 = (0..1usize << k).map(|x| if x == 0 { 0 } else { one }).collect();
    let algebra = MonadicAlgebra::new(k, c0)?;
    Ok(Lt1Algebra { algebra, sets, atoms, witnesses, carrier: n })
}

/// Φ on every element of `Lt1`, with its kernel.
#[derive(Clone, Debug, Serialize)]
pub struct PhiMap {
    /// `image[x]` is the canonical element `Φ(sets[x])`.
    #[serde(skip)]
    pub image: Vec<usize>,
    #[serde(skip)]
    pub kernel: Congruence,
    pub surjective: bool,
    /// `Φ(S) ∈ S` for every nonempty `S`, read through η.
    pub transfinity: bool,
    pub transfinity_witness: Option<ElemSet>,
}

pub fn build_phi(m: &ChoiceStructure, l: &Lt1Algebra, c: &CanonicalModel) -> Result<PhiMap, TermAlgebraError> {
    let mut image = Vec::with_capacity(l.size());
    let mut hit = vec![false; c.size()];
    let mut transfinity_witness = None;
    for &s in &l.sets {
        let e = m.choose(s);
        let i = c.index_of(e).ok_or(TermAlgebraError::NotCanonical(s))?;
        if !s.is_empty() && !s.contains(c.universe[i].value) {
            transfinity_witness.get_or_insert(s);
        }
        hit[i] = true;
        image.push(i);
    }
    let kernel = Congruence::from_labels(&image);
    Ok(PhiMap {
        image,
        kernel,
        surjective: hit.iter().all(|&h| h),
        transfinity: transfinity_witness.is_none(),
        transfinity_witness,
    })
}

/// Whether a partition respects the operations, with a violating instance.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceVerdict {
    pub congruence: bool,
    pub violation: Option<Violation>,
}

impl CongruenceVerdict {
    fn of(a: &MonadicAlgebra, p: &Congruence, with_c0: bool) -> Self {
        match is_congruence(a, p, with_c0) {
            Ok(()) => CongruenceVerdict { congruence: true, violation: None },
            Err(v) => CongruenceVerdict { congruence: false, violation: Some(v) },
        }
    }
}

/// The quotient by the kernel and the factor map ι.
#[derive(Clone, Debug, Serialize)]
pub struct KernelQuotient {
    /// Whether c0 was respected and carried to the quotient.
    pub with_c0: bool,
    pub size: usize,
    pub degenerate: bool,
    #[serde(skip)]
    pub algebra: MonadicAlgebra,
    #[serde(skip)]
    pub projection: Vec<AElem>,
    /// `iota[q]` is the canonical element of quotient element `q`.
    pub iota: Vec<usize>,
    pub iota_bijective: bool,
    /// `ι ∘ π = Φ` pointwise.
    pub triangle: bool,
}

/// The quotient by the congruence generated by the kernel.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratedQuotient {
    pub with_c0: bool,
    pub block_count: usize,
    pub size: usize,
    pub degenerate: bool,
    #[serde(skip)]
    pub algebra: MonadicAlgebra,
    /// Φ is constant on the generated blocks, so it factors through.
    pub phi_factors: bool,
    /// ... and the factor map is injective: the generated congruence is
    /// the kernel itself.
    pub factor_injective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub block_count: usize,
    /// Block sizes, largest first.
    pub block_sizes: Vec<usize>,
    /// Respects the Boolean operations and c0.
    pub ca1: CongruenceVerdict,
    /// Respects the Boolean operations.
    pub ba: CongruenceVerdict,
    pub quotient: Option<KernelQuotient>,
    pub generated_ca1: GeneratedQuotient,
    pub generated_ba: GeneratedQuotient,
}

impl KernelReport {
    /// The term algebra for the given reading: the kernel quotient when the
    /// kernel is a congruence, else the generated quotient.
    pub fn term_algebra(&self, with_c0: bool) -> (&'static str, &MonadicAlgebra) {
        let verdict = if with_c0 { &self.ca1 } else { &self.ba };
        match (&self.quotient, verdict.congruence) {
            (Some(q), true) if q.with_c0 == with_c0 => ("kernel", &q.algebra),
            _ if with_c0 => ("generated", &self.generated_ca1.algebra),
            _ => ("generated", &self.generated_ba.algebra),
        }
    }
}

fn kernel_quotient(l: &Lt1Algebra, phi: &PhiMap, with_c0: bool, size: usize) -> Result<KernelQuotient, TermAlgebraError> {
    let q = quotient(&l.algebra, &phi.kernel, with_c0)?;
    let boolean = if with_c0 { q.algebra } else { q.algebra.boolean_reduct() };
    let mut iota = vec![usize::MAX; boolean.size()];
    let mut triangle = true;
    for x in l.algebra.elements() {
        let p = q.projection[x];
        if iota[p] == usize::MAX {
            iota[p] = phi.image[x];
        }
        triangle &= iota[p] == phi.image[x];
    }
    let mut seen = vec![false; size];
    let mut iota_bijective = iota.len() == size;
    for &i in &iota {
        if i == usize::MAX || seen[i] {
            iota_bijective = false;
        } else {
            seen[i] = true;
        }
    }
    Ok(KernelQuotient {
        with_c0,
        size: boolean.size(),
        degenerate: q.degenerate,
        algebra: boolean,
        projection: q.projection,
        iota,
        iota_bijective,
        triangle,
    })
}

fn generated_quotient(l: &Lt1Algebra, phi: &PhiMap, with_c0: bool) -> Result<GeneratedQuotient, TermAlgebraError> {
    let a = &l.algebra;
    // pairs linking each element to the first element of its kernel block
    let mut first = vec![usize::MAX; phi.kernel.block_count()];
    let mut pairs = Vec::new();
    for x in a.elements() {
        let b = phi.kernel.block(x);
        if first[b] == usize::MAX {
            first[b] = x;
        } else {
            pairs.push((first[b], x));
        }
    }
    let g = generated_congruence(a, &pairs, with_c0);
    let q = quotient(a, &g, with_c0)?;
    let phi_factors = a.elements().all(|x| {
        let y = x & !q.ideal;
        phi.image[x] == phi.image[y]
    });
    let algebra = if with_c0 { q.algebra } else { q.algebra.boolean_reduct() };
    Ok(GeneratedQuotient {
        with_c0,
        block_count: g.block_count(),
        size: algebra.size(),
        degenerate: q.degenerate,
        algebra,
        phi_factors,
        factor_injective: phi_factors && g == phi.kernel,
    })
}

/// Checks whether the kernel of Φ is a congruence, with and without c0,
/// builds the quotient and ι when it is, and always builds the quotients
/// by the generated congruences.
pub fn analyze_kernel(l: &Lt1Algebra, phi: &PhiMap, canonical_size: usize) -> Result<KernelReport, TermAlgebraError> {
    let a = &l.algebra;
    let ca1 = CongruenceVerdict::of(a, &phi.kernel, true);
    let ba = CongruenceVerdict::of(a, &phi.kernel, false);
    let quotient = if ca1.congruence {
        Some(kernel_quotient(l, phi, true, canonical_size)?)
    } else if ba.congruence {
        Some(kernel_quotient(l, phi, false, canonical_size)?)
    } else {
        None
    };
    let mut block_sizes = phi.kernel.block_sizes();
    block_sizes.sort_unstable_by(|x, y| y.cmp(x));
    Ok(KernelReport {
        block_count: phi.kernel.block_count(),
        block_sizes,
        ca1,
        ba,
        quotient,
        generated_ca1: generated_quotient(l, phi, true)?,
        generated_ba: generated_quotient(l, phi, false)?,
    })
}
