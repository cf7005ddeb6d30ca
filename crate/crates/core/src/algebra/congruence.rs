//! Congruences of finite monadic algebras.
//!
//! A congruence of a finite Boolean algebra is determined by its zero
//! block, a principal ideal `↓m`: `x ≡ y` iff `x ⊕ y ≤ m`. It respects c0
//! as well iff `c0 m ≤ m`. The checks below follow this description and,
//! when it fails, build a concrete violating instance.

use serde::Serialize;

use super::{AElem, AlgebraError, MonadicAlgebra};

/// A partition of the elements, as a block number per element. Blocks are
/// numbered in order of their least element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Congruence {
    block_of: Vec<usize>,
}

impl Congruence {
    /// Renumbers arbitrary labels so equal partitions compare equal.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let block_of = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Congruence { block_of }
    }

    pub fn discrete(size: usize) -> Self {
        Congruence { block_of: (0..size).collect() }
    }

    pub fn total(size: usize) -> Self {
        Congruence { block_of: vec![0; size] }
    }

    pub fn block(&self, x: AElem) -> usize {
        self.block_of[x]
    }

    pub fn related(&self, x: AElem, y: AElem) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<AElem>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks().iter().map(Vec::len).collect()
    }

    /// Partition by `x ↦ x ∧ ¬m`.
    pub fn from_ideal(a: &MonadicAlgebra, m: AElem) -> Self {
        let labels: Vec<AElem> = a.elements().map(|x| x & !m).collect();
        Congruence::from_labels(&labels)
    }
}

/// An operation instance `x ≡ x′`, `y ≡ y′` whose results are not related.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub op: &'static str,
    pub x: (AElem, AElem),
    pub y: Option<(AElem, AElem)>,
    pub results: (AElem, AElem),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.y {
            Some((y, y2)) => write!(
                f,
                "{}({}, {}) = {} but {}({}, {}) = {}",
                self.op, self.x.0, y, self.results.0, self.op, self.x.1, y2, self.results.1
            ),
            None => write!(f, "{}({}) = {} but {}({}) = {}", self.op, self.x.0, self.results.0, self.op, self.x.1, self.results.1),
        }
    }
}

fn binary(op: &'static str, x: (AElem, AElem), y: (AElem, AElem), a: &MonadicAlgebra) -> Violation {
    let f = |p: AElem, q: AElem| if op == "meet" { a.meet(p, q) } else { a.join(p, q) };
    Violation { op, x, y: Some(y), results: (f(x.0, y.0), f(x.1, y.1)) }
}

fn unary(op: &'static str, x: (AElem, AElem), a: &MonadicAlgebra) -> Violation {
    let f = |p: AElem| if op == "compl" { a.compl(p) } else { a.c0(p) };
    Violation { op, x, y: None, results: (f(x.0), f(x.1)) }
}

/// Checks that `p` respects meet, join, complement and, when `with_c0`,
/// c0. On failure returns a violating instance.
pub fn is_congruence(a: &MonadicAlgebra, p: &Congruence, with_c0: bool) -> Result<(), Violation> {
    assert_eq!(p.len(), a.size(), "partition of a different algebra");
    // the zero block must be closed under joins
    let zero_block: Vec<AElem> = a.elements().filter(|&x| p.related(x, 0)).collect();
    let mut m = 0;
    for &b in &zero_block {
        if !p.related(m | b, 0) {
            return Err(binary("join", (m, 0), (b, 0), a));
        }
        m |= b;
    }
    // and downward closed
    for z in a.elements().filter(|&z| a.leq(z, m)) {
        if !p.related(z, 0) {
            return Err(binary("meet", (m, 0), (z, z), a));
        }
    }
    if !p.related(a.compl(m), a.one()) {
        return Err(unary("compl", (m, 0), a));
    }
    // every x lies in the block of x ∧ ¬m
    let not_m = a.compl(m);
    for x in a.elements() {
        if !p.related(x & not_m, x) {
            return Err(binary("meet", (x, x), (not_m, a.one()), a));
        }
    }
    // and each block is a single coset
    let mut rep = vec![usize::MAX; p.block_count()];
    for x in a.elements() {
        let b = p.block(x);
        if rep[b] == usize::MAX {
            rep[b] = x;
            continue;
        }
        let x0 = rep[b];
        if !p.related(a.compl(x0), a.compl(x)) {
            return Err(unary("compl", (x0, x), a));
        }
        if !p.related(x0 & a.compl(x), 0) {
            return Err(binary("meet", (x0, x0), (a.compl(x), a.compl(x0)), a));
        }
        if !p.related(x & a.compl(x0), 0) {
            return Err(binary("meet", (x, x), (a.compl(x0), a.compl(x)), a));
        }
    }
    if with_c0 {
        for x in a.elements() {
            if !p.related(a.c0(x), a.c0(x & not_m)) {
                return Err(unary("c0", (x, x & not_m), a));
            }
        }
    }
    Ok(())
}

/// The least congruence containing `pairs`: the ideal generated by the
/// symmetric differences, closed under c0 when `with_c0`.
pub fn generated_congruence(a: &MonadicAlgebra, pairs: &[(AElem, AElem)], with_c0: bool) -> Congruence {
    let mut m = pairs.iter().fold(0, |acc, &(x, y)| acc | (x ^ y));
    if with_c0 {
        m = a.c0(m);
    }
    Congruence::from_ideal(a, m)
}

/// A quotient algebra with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: MonadicAlgebra,
    /// `projection[x]` is the element of the quotient that `x` maps to.
    pub projection: Vec<AElem>,
    /// The zero block is `↓ideal`.
    pub ideal: AElem,
    /// The one-element algebra, where `0 = 1`.
    pub degenerate: bool,
}

/// The quotient by a congruence: the atoms outside the zero block's top
/// survive.
pub fn quotient(a: &MonadicAlgebra, p: &Congruence, with_c0: bool) -> Result<Quotient, AlgebraError> {
    is_congruence(a, p, with_c0).map_err(|v| AlgebraError::NotCongruence(v.to_string()))?;
    let m = a.elements().filter(|&x| p.related(x, 0)).fold(0, |acc, x| acc | x);
    let kept: Vec<usize> = (0..a.atom_count()).filter(|i| m >> i & 1 == 0).collect();
    let compress = |x: AElem| kept.iter().enumerate().filter(|(_, &i)| x >> i & 1 == 1).fold(0, |acc, (j, _)| acc | 1 << j);
    let projection: Vec<AElem> = a.elements().map(compress).collect();
    let k = kept.len();
    let algebra = if with_c0 && !a.is_synthesized() {
        let expand = |y: AElem| kept.iter().enumerate().filter(|(j, _)| y >> j & 1 == 1).fold(0, |acc, (_, &i)| acc | 1 << i);
        let c0 = (0..1usize << k).map(|y| compress(a.c0(expand(y)))).collect();
        MonadicAlgebra::new(k, c0)?
    } else {
        MonadicAlgebra::boolean(k)?
    };
    // the projection is a surjective homomorphism
    for x in a.elements() {
        debug_assert_eq!(projection[a.compl(x)], algebra.compl(projection[x]));
        if with_c0 && projection[a.c0(x)] != algebra.c0(projection[x]) {
            return Err(AlgebraError::NotCongruence(format!("projection does not commute with c0 at {x}")));
        }
    }
    Ok(Quotient { algebra, projection, ideal: m, degenerate: k == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_congruence_on_b4() {
        let b4 = MonadicAlgebra::boolean(2).unwrap();
        let p = generated_congruence(&b4, &[(0, 1)], false);
        assert_eq!(p.block_sizes(), vec![2, 2]);
        assert!(is_congruence(&b4, &p, false).is_ok());
        let q = quotient(&b4, &p, false).unwrap();
        assert_eq!(q.algebra.size(), 2);
        assert!(!q.degenerate);
    }

    #[test]
    fn unequal_blocks_are_rejected() {
        let b16 = MonadicAlgebra::boolean(4).unwrap();
        // blocks by least atom, empty with atom 0: sizes 9/4/2/1
        let labels: Vec<u32> = (0..16usize).map(|x| if x == 0 { 0 } else { x.trailing_zeros() }).collect();
        let p = Congruence::from_labels(&labels);
        let mut sizes = p.block_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 4, 9]);
        let v = is_congruence(&b16, &p, false).unwrap_err();
        assert!(p.related(v.x.0, v.x.1));
        assert!(!p.related(v.results.0, v.results.1));
    }

    #[test]
    fn discrete_and_total() {
        let a = MonadicAlgebra::boolean(3).unwrap();
        assert!(is_congruence(&a, &Congruence::discrete(8), true).is_ok());
        assert_eq!(quotient(&a, &Congruence::discrete(8), true).unwrap().algebra.size(), 8);
        let q = quotient(&a, &Congruence::total(8), true).unwrap();
        assert!(q.degenerate);
        assert_eq!(generated_congruence(&a, &[], true), Congruence::discrete(8));
        assert_eq!(generated_congruence(&a, &[(0, 7)], true), Congruence::total(8));
    }
}
