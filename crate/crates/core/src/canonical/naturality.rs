use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::CanonicalModel;
use crate::definability::oracle::{brute_force_sets, DepthMode, OracleError};
use crate::semantics::{tuples, ChoiceStructure, Elem, ElemSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no image given for element {0}")]
    Missing(Elem),
    #[error("the two structures have different signatures")]
    Signature,
}

/// Parses a carrier map: one `i -> j` per line, `#` starts a comment.
/// Every element of `0..n1` needs exactly one image in `0..n2`.
pub fn parse_hom(text: &str, n1: usize, n2: usize) -> Result<Vec<Elem>, HomError> {
    let mut map = vec![None; n1];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| HomError::Parse { line, message };
        let (l, r) = body.split_once("->").ok_or_else(|| err("expected `i -> j`".into()))?;
        let i: Elem = l.trim().parse().map_err(|_| err(format!("bad element `{}`", l.trim())))?;
        let j: Elem = r.trim().parse().map_err(|_| err(format!("bad element `{}`", r.trim())))?;
        if i >= n1 {
            return Err(err(format!("{i} is outside the domain of size {n1}")));
        }
        if j >= n2 {
            return Err(err(format!("{j} is outside the codomain of size {n2}")));
        }
        if map[i].replace(j).is_some() {
            return Err(err(format!("{i} is mapped twice")));
        }
    }
    map.iter().enumerate().map(|(i, j)| j.ok_or(HomError::Missing(i))).collect()
}

/// Where `h` fails to be a homomorphism of the first-order reducts.
fn hom_violations(h: &[Elem], m1: &ChoiceStructure, m2: &ChoiceStructure) -> Vec<String> {
    let sig = m1.signature();
    let mut out = Vec::new();
    for f in sig.function_ids() {
        for args in tuples(m1.size(), sig.function(f).arity) {
            let image: Vec<Elem> = args.iter().map(|&a| h[a]).collect();
            if h[m1.apply(f, &args)] != m2.apply(f, &image) {
                out.push(format!("{} at {:?}", sig.function(f).name, args));
            }
        }
    }
    for r in sig.relation_ids() {
        for args in m1.relation_tuples(r) {
            let image: Vec<Elem> = args.iter().map(|&a| h[a]).collect();
            if !m2.holds(r, &image) {
                out.push(format!("{} at {:?}", sig.relation(r).name, args));
            }
        }
    }
    for c in sig.constant_ids() {
        if h[m1.constant(c)] != m2.constant(c) {
            out.push(format!("constant {}", sig.constant(c)));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeWitness {
    /// Canonical element of the first model.
    pub element: usize,
    pub representative: String,
    pub value: Elem,
    /// `h(value)`, which no closed ε-term of the second structure denotes.
    pub image: Elem,
}

#[derive(Clone, Debug, Serialize)]
pub struct NaturalityReport {
    pub homomorphism: bool,
    pub hom_violations: Vec<String>,
    /// `h` maps ε-denotations of the first structure to ε-denotations of
    /// the second.
    pub range_condition: bool,
    pub range_witness: Option<RangeWitness>,
    /// No canonical element is related to two different ones.
    pub single_valued: bool,
    pub single_valued_witness: Option<(usize, Vec<usize>)>,
    /// `η₂ ∘ h* = h ∘ η₁` wherever `h*` is defined.
    pub square_commutes: bool,
    pub square_witness: Option<usize>,
    pub h_star: Option<Vec<usize>>,
}

impl NaturalityReport {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.range_condition && self.single_valued && self.square_commutes
    }
}

/// Lifts `h` to the canonical models: `h*` relates the class of `t` to
/// the class of `s` when `h(t) = s` in the sources. Checks the range
/// condition, that the relation is a function, and the commuting square.
pub fn lift_hom(h: &[Elem], c1: &CanonicalModel, c2: &CanonicalModel) -> Result<NaturalityReport, HomError> {
    let (m1, m2) = (&c1.source, &c2.source);
    if m1.signature() != m2.signature() {
        return Err(HomError::Signature);
    }
    if h.len() != m1.size() {
        return Err(HomError::Missing(h.len().min(m1.size())));
    }
    if let Some(&j) = h.iter().find(|&&j| j >= m2.size()) {
        return Err(HomError::Parse { line: 0, message: format!("{j} is outside the codomain") });
    }
    let hom_violations = hom_violations(h, m1, m2);
    let mut range_witness = None;
    let mut single_valued_witness = None;
    let mut square_witness = None;
    let mut h_star = Vec::with_capacity(c1.size());
    for (i, e) in c1.universe.iter().enumerate() {
        let image = h[e.value];
        let related: Vec<usize> = c2.universe.iter().enumerate().filter(|(_, s)| s.value == image).map(|(j, _)| j).collect();
        match related.as_slice() {
            [] => {
                range_witness.get_or_insert(RangeWitness { element: i, representative: c1.representative_text(i), value: e.value, image });
                h_star.push(None);
            }
            [j] => {
                if c2.universe[*j].value != image {
                    square_witness.get_or_insert(i);
                }
                h_star.push(Some(*j));
            }
            _ => {
                single_valued_witness.get_or_insert((i, related.clone()));
                h_star.push(None);
            }
        }
    }
    let h_star: Option<Vec<usize>> = h_star.into_iter().collect();
    Ok(NaturalityReport {
        homomorphism: hom_violations.is_empty(),
        hom_violations,
        range_condition: range_witness.is_none(),
        range_witness,
        single_valued: single_valued_witness.is_none(),
        single_valued_witness,
        square_commutes: square_witness.is_none(),
        square_witness,
        h_star,
    })
}

/// The three verdicts of [`lift_hom`], recomputed by brute force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVerdicts {
    pub range_condition: bool,
    pub single_valued: bool,
    pub square_commutes: bool,
}

/// Recomputes the naturality verdicts from the brute-force definable sets
/// of depth ≤ `depth`, independently of the engine and of the canonical
/// models: closed ε-terms are represented by their defining sets, two being
/// identified when they choose the same element.
pub fn naturality_oracle(h: &[Elem], m1: &ChoiceStructure, m2: &ChoiceStructure, depth: usize) -> Result<OracleVerdicts, OracleError> {
    let u1 = brute_force_sets(m1, depth, DepthMode::Connective)?.sets;
    let u2 = brute_force_sets(m2, depth, DepthMode::Connective)?.sets;
    let mut range_condition = true;
    let mut single_valued = true;
    let mut square_commutes = true;
    for &s in &u1 {
        let t = m1.choose(s);
        // classes of the second model related to the class of t
        let related: BTreeSet<Elem> = u2.iter().map(|&s2| m2.choose(s2)).filter(|&v| v == h[t]).collect();
        // every other term of t's class must relate to the same classes
        let same_class: Vec<ElemSet> = u1.iter().copied().filter(|&s1| m1.choose(s1) == t).collect();
        for s1 in same_class {
            let other: BTreeSet<Elem> = u2.iter().map(|&s2| m2.choose(s2)).filter(|&v| v == h[m1.choose(s1)]).collect();
            single_valued &= other == related;
        }
        match related.len() {
            0 => range_condition = false,
            1 => square_commutes &= related.iter().next() == Some(&h[t]),
            _ => single_valued = false,
        }
    }
    Ok(OracleVerdicts { range_condition, single_valued, square_commutes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_maps() {
        assert_eq!(parse_hom("# c\n0 -> 0\n1->1 # x\n\n2 -> 0\n3 -> 1\n", 4, 2).unwrap(), vec![0, 1, 0, 1]);
        assert!(matches!(parse_hom("0 -> 0\n0 -> 1\n", 2, 2), Err(HomError::Parse { line: 2, .. })));
        assert_eq!(parse_hom("0 -> 0\n", 2, 2), Err(HomError::Missing(1)));
        assert!(matches!(parse_hom("0 -> 5\n", 1, 2), Err(HomError::Parse { line: 1, .. })));
        assert!(matches!(parse_hom("0 => 1\n", 1, 2), Err(HomError::Parse { line: 1, .. })));
    }
}
