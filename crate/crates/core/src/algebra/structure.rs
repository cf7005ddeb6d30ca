//! Reading a choice structure in the Boolean or monadic signature as an
//! algebra.

use serde::Serialize;

use super::{AElem, AlgebraError, MonadicAlgebra, MAX_ATOMS};
use crate::semantics::{ChoiceStructure, Elem};
use crate::syntax::{ConstId, FunId, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    Ba,
    Ca1,
}

/// An algebra read off a structure, with the carrier-to-element bijection.
#[derive(Clone, Debug)]
pub struct StructureAlgebra {
    pub algebra: MonadicAlgebra,
    /// `element_map[e]` is the algebra element of carrier element `e`.
    pub element_map: Vec<AElem>,
}

impl StructureAlgebra {
    /// The carrier element of an algebra element.
    pub fn carrier_of(&self, x: AElem) -> Elem {
        self.element_map.iter().position(|&y| y == x).expect("element_map is a bijection")
    }
}

fn function(sig: &Signature, names: &[&str], arity: usize) -> Result<FunId, AlgebraError> {
    for name in names {
        if let Some(f) = sig.fun_id(name) {
            let found = sig.function(f).arity;
            if found != arity {
                return Err(AlgebraError::Signature(format!("`{name}` has arity {found}, expected {arity}")));
            }
            return Ok(f);
        }
    }
    Err(AlgebraError::Signature(format!("no function `{}`", names[0])))
}

fn constant(sig: &Signature, name: &str) -> Result<ConstId, AlgebraError> {
    sig.const_id(name).ok_or_else(|| AlgebraError::Signature(format!("no constant `{name}`")))
}

/// Reads `m` as an algebra: `meet`, `join`, `compl` (or `complement`),
/// `zero`, `one`, and for `Ca1` a unary `c`. The Boolean tables are checked
/// by mapping each element to the set of atoms below it and verifying that
/// this map is a bijective homomorphism onto the atom-set algebra.
pub fn from_structure(m: &ChoiceStructure, kind: AlgebraKind) -> Result<StructureAlgebra, AlgebraError> {
    let sig = m.signature();
    let meet = function(sig, &["meet"], 2)?;
    let join = function(sig, &["join"], 2)?;
    let compl = function(sig, &["compl", "complement"], 1)?;
    let zero = m.constant(constant(sig, "zero")?);
    let one = m.constant(constant(sig, "one")?);
    let c = match kind {
        AlgebraKind::Ca1 => Some(function(sig, &["c"], 1)?),
        AlgebraKind::Ba => None,
    };
    let n = m.size();
    let meet_of = |x: Elem, y: Elem| m.apply(meet, &[x, y]);
    let atoms: Vec<Elem> = (0..n)
        .filter(|&x| x != zero && (0..n).all(|y| y == zero || y == x || meet_of(y, x) != y))
        .collect();
    let k = atoms.len();
    if k > MAX_ATOMS {
        return Err(AlgebraError::TooManyAtoms(k));
    }
    if n != 1 << k {
        return Err(AlgebraError::NotBoolean(format!("{n} elements but {k} atoms")));
    }
    let element_map: Vec<AElem> = (0..n)
        .map(|x| atoms.iter().enumerate().filter(|&(_, &a)| meet_of(a, x) == a).fold(0, |acc, (i, _)| acc | 1 << i))
        .collect();
    let mut seen = vec![None; n];
    for (x, &mask) in element_map.iter().enumerate() {
        if let Some(y) = seen[mask] {
            return Err(AlgebraError::NotBoolean(format!("elements {y} and {x} lie above the same atoms")));
        }
        seen[mask] = Some(x);
    }
    let full = n - 1;
    if element_map[zero] != 0 {
        return Err(AlgebraError::NotBoolean(format!("zero = {zero} is not the least element")));
    }
    if element_map[one] != full {
        return Err(AlgebraError::NotBoolean(format!("one = {one} is not the greatest element")));
    }
    for x in 0..n {
        let ex = element_map[x];
        let cx = element_map[m.apply(compl, &[x])];
        if cx != full & !ex {
            return Err(AlgebraError::NotBoolean(format!("compl({x}) is not the complement of {x}")));
        }
        for y in 0..n {
            let ey = element_map[y];
            if element_map[meet_of(x, y)] != ex & ey {
                return Err(AlgebraError::NotBoolean(format!("meet({x}, {y}) is not the greatest lower bound")));
            }
            if element_map[m.apply(join, &[x, y])] != ex | ey {
                return Err(AlgebraError::NotBoolean(format!("join({x}, {y}) is not the least upper bound")));
            }
        }
    }
    let algebra = match c {
        None => MonadicAlgebra::boolean(k)?,
        Some(c) => {
            let mut table = vec![0; n];
            for x in 0..n {
                table[element_map[x]] = element_map[m.apply(c, &[x])];
            }
            MonadicAlgebra::new(k, table).map_err(|e| match e {
                // report carrier elements rather than atom masks
                AlgebraError::Law { law, x, y } => {
                    let back = |v: AElem| element_map.iter().position(|&w| w == v).expect("bijection");
                    AlgebraError::Law { law, x: back(x), y: y.map(back) }
                }
                other => other,
            })?
        }
    };
    Ok(StructureAlgebra { algebra, element_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::semantics::ChoiceRule;

    #[test]
    fn reads_boolean_algebras() {
        let a = from_structure(&corpus::boolean_algebra(2), AlgebraKind::Ba).unwrap();
        assert_eq!(a.algebra.atom_count(), 2);
        assert!(a.algebra.is_synthesized());
        assert_eq!(a.element_map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn identity_closure_is_monadic() {
        let a = from_structure(&corpus::identity_monadic(2), AlgebraKind::Ca1).unwrap();
        assert_eq!(a.algebra.fixed_points().len(), 4);
        assert!(from_structure(&corpus::boolean_algebra(2), AlgebraKind::Ca1).is_err());
    }

    #[test]
    fn rejects_c_of_zero_nonzero() {
        let sig = corpus::ba_signature(true);
        let m = corpus::identity_monadic(2);
        let mut funs: Vec<Vec<Elem>> = sig.function_ids().map(|f| m.function_table(f).to_vec()).collect();
        funs[3][0] = 3;
        let bad = ChoiceStructure::new(sig, 4, vec![], funs, vec![0, 3], ChoiceRule::Min { empty: 0 }).unwrap();
        let err = from_structure(&bad, AlgebraKind::Ca1).unwrap_err();
        assert!(matches!(err, AlgebraError::Law { law: "c0(0) = 0", .. }));
    }

    #[test]
    fn rejects_non_boolean_tables() {
        let m = corpus::cycle3();
        assert!(matches!(from_structure(&m, AlgebraKind::Ba), Err(AlgebraError::Signature(_))));
    }
}
