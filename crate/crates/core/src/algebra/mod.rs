//! Finite Boolean and monadic algebras.
//!
//! An algebra with `k` atoms has the `2^k` subsets of its atoms as
//! elements, encoded as bitmasks, so the Boolean operations are bitwise and
//! only the laws of `c0` need checking. A Boolean algebra is a monadic
//! algebra whose `c0` is the discrete closure `x ↦ 1` for `x ≠ 0`, marked
//! as synthesized.

pub mod brute;
mod congruence;
mod structure;

use serde::Serialize;
use thiserror::Error;

pub use congruence::{generated_congruence, is_congruence, quotient, Congruence, Quotient, Violation};
pub use structure::{from_structure, AlgebraKind, StructureAlgebra};

/// An element: the mask of the atoms below it.
pub type AElem = usize;

/// Largest number of atoms accepted.
pub const MAX_ATOMS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("at most {MAX_ATOMS} atoms are supported, got {0}")]
    TooManyAtoms(usize),
    #[error("c0 table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("c0 law `{law}` fails at x = {x}{}", .y.map(|y| format!(", y = {y}")).unwrap_or_default())]
    Law { law: &'static str, x: AElem, y: Option<AElem> },
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("not a Boolean algebra: {0}")]
    NotBoolean(String),
    #[error("partition is not a congruence: {0}")]
    NotCongruence(String),
}

/// A finite monadic algebra (CA₁); Boolean algebras carry a synthesized c0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadicAlgebra {
    k: usize,
    c0: Vec<AElem>,
    synthesized: bool,
}

impl MonadicAlgebra {
    /// Validates the c0 laws: `c0 0 = 0`, `x ≤ c0 x`,
    /// `c0(x ∧ c0 y) = c0 x ∧ c0 y`, and the derived idempotence and
    /// additivity.
    pub fn new(k: usize, c0: Vec<AElem>) -> Result<Self, AlgebraError> {
        if k > MAX_ATOMS {
            return Err(AlgebraError::TooManyAtoms(k));
        }
        if c0.len() != 1 << k {
            return Err(AlgebraError::TableSize { expected: 1 << k, found: c0.len() });
        }
        let a = MonadicAlgebra { k, c0, synthesized: false };
        a.check_laws()?;
        Ok(a)
    }

    /// The Boolean algebra with `k` atoms.
    pub fn boolean(k: usize) -> Result<Self, AlgebraError> {
        if k > MAX_ATOMS {
            return Err(AlgebraError::TooManyAtoms(k));
        }
        let one = (1 << k) - 1;
        let c0 = (0..1usize << k).map(|x| if x == 0 { 0 } else { one }).collect();
        Ok(MonadicAlgebra { k, c0, synthesized: true })
    }

    /// The two-element algebra; its c0 is forced to be the identity.
    pub fn two() -> Self {
        MonadicAlgebra { k: 1, c0: vec![0, 1], synthesized: false }
    }

    /// The same Boolean algebra with the synthesized discrete c0.
    pub fn boolean_reduct(&self) -> Self {
        MonadicAlgebra::boolean(self.k).expect("atom count already checked")
    }

    fn check_laws(&self) -> Result<(), AlgebraError> {
        let c = &self.c0;
        if c[0] != 0 {
            return Err(AlgebraError::Law { law: "c0(0) = 0", x: 0, y: None });
        }
        let one = self.one();
        for x in 0..self.size() {
            if c[x] > one {
                return Err(AlgebraError::Law { law: "c0(x) is an element", x, y: None });
            }
            if x & !c[x] != 0 {
                return Err(AlgebraError::Law { law: "x <= c0(x)", x, y: None });
            }
        }
        // y enters the third law only through c0(y)
        let mut range: Vec<AElem> = c.clone();
        range.sort_unstable();
        range.dedup();
        for x in 0..self.size() {
            for &z in &range {
                if c[x & z] != c[x] & z {
                    let y = (0..self.size()).find(|&y| c[y] == z).expect("z is in the range");
                    return Err(AlgebraError::Law { law: "c0(x & c0(y)) = c0(x) & c0(y)", x, y: Some(y) });
                }
            }
        }
        for x in 0..self.size() {
            if c[c[x]] != c[x] {
                return Err(AlgebraError::Law { law: "c0(c0(x)) = c0(x)", x, y: None });
            }
            let by_atoms = self.atoms_of(x).fold(0, |acc, a| acc | c[a]);
            if by_atoms != c[x] {
                return Err(AlgebraError::Law { law: "c0 is additive", x, y: None });
            }
        }
        Ok(())
    }

    pub fn atom_count(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        1 << self.k
    }

    pub fn is_synthesized(&self) -> bool {
        self.synthesized
    }

    /// A one-element algebra, where `0 = 1`.
    pub fn is_degenerate(&self) -> bool {
        self.k == 0
    }

    pub fn zero(&self) -> AElem {
        0
    }

    pub fn one(&self) -> AElem {
        (1 << self.k) - 1
    }

    pub fn meet(&self, x: AElem, y: AElem) -> AElem {
        x & y
    }

    pub fn join(&self, x: AElem, y: AElem) -> AElem {
        x | y
    }

    pub fn compl(&self, x: AElem) -> AElem {
        self.one() & !x
    }

    pub fn c0(&self, x: AElem) -> AElem {
        self.c0[x]
    }

    pub fn c0_table(&self) -> &[AElem] {
        &self.c0
    }

    pub fn leq(&self, x: AElem, y: AElem) -> bool {
        x & !y == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = AElem> {
        0..self.size()
    }

    /// The minimal nonzero elements.
    pub fn atoms(&self) -> Vec<AElem> {
        (0..self.k).map(|i| 1 << i).collect()
    }

    fn atoms_of(&self, x: AElem) -> impl Iterator<Item = AElem> {
        (0..self.k).filter(move |i| x >> i & 1 == 1).map(|i| 1 << i)
    }

    /// Elements fixed by c0, ascending.
    pub fn fixed_points(&self) -> Vec<AElem> {
        self.elements().filter(|&x| self.c0[x] == x).collect()
    }

    /// The subalgebra `{x : c0 x = x}` of zero-dimensional elements, with
    /// identity c0, and the embedding of its elements.
    pub fn nr0(&self) -> Nr0 {
        let fixed = self.fixed_points();
        for &x in &fixed {
            for &y in &fixed {
                assert!(self.c0[x | y] == x | y && self.c0[x & y] == x & y, "fixed points not closed");
            }
            assert!(self.c0[self.compl(x)] == self.compl(x), "fixed points not closed under complement");
        }
        // atoms of the subalgebra: minimal nonzero fixed points
        let atoms: Vec<AElem> = fixed
            .iter()
            .copied()
            .filter(|&x| x != 0 && !fixed.iter().any(|&y| y != 0 && y != x && self.leq(y, x)))
            .collect();
        let k = atoms.len();
        let embedding = (0..1usize << k)
            .map(|m| (0..k).filter(|i| m >> i & 1 == 1).fold(0, |acc, i| acc | atoms[i]))
            .collect();
        let algebra = MonadicAlgebra { k, c0: (0..1 << k).collect(), synthesized: false };
        Nr0 { algebra, embedding }
    }
}

/// The zero-dimensional part of an algebra.
#[derive(Clone, Debug)]
pub struct Nr0 {
    pub algebra: MonadicAlgebra,
    /// `embedding[x]` is the element of the parent algebra that `x` names.
    pub embedding: Vec<AElem>,
}

/// An isomorphism given by where each atom goes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Isomorphism {
    pub atom_map: Vec<usize>,
}

impl Isomorphism {
    pub fn apply(&self, x: AElem) -> AElem {
        self.atom_map.iter().enumerate().filter(|(i, _)| x >> i & 1 == 1).fold(0, |acc, (_, &j)| acc | 1 << j)
    }
}

/// Whether the atom bijection commutes with c0 on every element.
pub fn check_isomorphism(a: &MonadicAlgebra, b: &MonadicAlgebra, iso: &Isomorphism) -> bool {
    a.k == b.k && a.elements().all(|x| iso.apply(a.c0(x)) == b.c0(iso.apply(x)))
}

/// Searches for an isomorphism, c0 included, by backtracking over atom
/// bijections. Atoms may only go to atoms whose c0 has the same number of
/// atoms, and c0-membership among assigned atoms must be preserved.
pub fn is_isomorphic(a: &MonadicAlgebra, b: &MonadicAlgebra) -> Option<Isomorphism> {
    if a.k != b.k {
        return None;
    }
    let k = a.k;
    let ca: Vec<AElem> = (0..k).map(|i| a.c0(1 << i)).collect();
    let cb: Vec<AElem> = (0..k).map(|i| b.c0(1 << i)).collect();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; k];
    fn search(i: usize, ca: &[AElem], cb: &[AElem], map: &mut [usize], used: &mut [bool]) -> bool {
        let k = ca.len();
        if i == k {
            return true;
        }
        for j in 0..k {
            if used[j] || ca[i].count_ones() != cb[j].count_ones() {
                continue;
            }
            let consistent = (0..i).all(|l| {
                (ca[i] >> l & 1 == 1) == (cb[j] >> map[l] & 1 == 1) && (ca[l] >> i & 1 == 1) == (cb[map[l]] >> j & 1 == 1)
            }) && (ca[i] >> i & 1 == 1) == (cb[j] >> j & 1 == 1);
            if !consistent {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if search(i + 1, ca, cb, map, used) {
                return true;
            }
            used[j] = false;
        }
        map[i] = usize::MAX;
        false
    }
    if !search(0, &ca, &cb, &mut map, &mut used) {
        return None;
    }
    let iso = Isomorphism { atom_map: map };
    check_isomorphism(a, b, &iso).then_some(iso)
}

/// Isomorphism of the Boolean reducts: finite Boolean algebras are
/// isomorphic exactly when they have the same number of atoms.
pub fn is_isomorphic_boolean(a: &MonadicAlgebra, b: &MonadicAlgebra) -> Option<Isomorphism> {
    (a.k == b.k).then(|| Isomorphism { atom_map: (0..a.k).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(k: usize) -> MonadicAlgebra {
        MonadicAlgebra::new(k, MonadicAlgebra::boolean(k).unwrap().c0).unwrap()
    }

    fn identity(k: usize) -> MonadicAlgebra {
        MonadicAlgebra::new(k, (0..1 << k).collect()).unwrap()
    }

    #[test]
    fn rejects_nonzero_c0_of_zero() {
        let err = MonadicAlgebra::new(2, vec![3, 3, 3, 3]).unwrap_err();
        assert_eq!(err, AlgebraError::Law { law: "c0(0) = 0", x: 0, y: None });
    }

    #[test]
    fn rejects_non_extensive_c0() {
        let err = MonadicAlgebra::new(2, vec![0, 1, 1, 3]).unwrap_err();
        assert!(matches!(err, AlgebraError::Law { law: "x <= c0(x)", x: 2, .. }));
    }

    #[test]
    fn atoms_and_nr0() {
        assert_eq!(MonadicAlgebra::two().atoms(), vec![1]);
        assert_eq!(MonadicAlgebra::boolean(2).unwrap().atoms().len(), 2);
        assert_eq!(MonadicAlgebra::boolean(3).unwrap().atoms().len(), 3);
        assert_eq!(simple(2).nr0().algebra.size(), 2);
        assert_eq!(identity(2).nr0().algebra.size(), 4);
        // product of the simple 4- and 2-element algebras
        let product = MonadicAlgebra::new(3, (0..8).map(|x: usize| (if x & 3 != 0 { 3 } else { 0 }) | (x & 4)).collect()).unwrap();
        assert_eq!(product.nr0().algebra.size(), 4);
        assert!(is_isomorphic(&simple(1), &MonadicAlgebra::two()).is_some());
    }

    #[test]
    fn isomorphism_respects_c0() {
        assert!(is_isomorphic(&identity(2), &simple(2)).is_none());
        assert!(is_isomorphic(&simple(2), &simple(3)).is_none());
        let a = MonadicAlgebra::new(3, (0..8).map(|x: usize| (if x & 3 != 0 { 3 } else { 0 }) | (x & 4)).collect()).unwrap();
        let b = MonadicAlgebra::new(3, (0..8).map(|x: usize| (if x & 6 != 0 { 6 } else { 0 }) | (x & 1)).collect()).unwrap();
        let iso = is_isomorphic(&a, &b).expect("relabelled product");
        assert!(check_isomorphism(&a, &b, &iso));
    }
}
