use serde::Serialize;

use crate::algebra::{is_isomorphic, AElem, MonadicAlgebra};

/// Algebras up to this size are checked over all element pairs; larger
/// ones through the atoms (see [`check_rich`]).
pub const POINTWISE_MAX_SIZE: usize = 256;

/// Whether `c0`, read as a map onto the fixed points, is a Boolean
/// homomorphism, and whether the fixed points form the algebra 2.
#[derive(Clone, Debug, Serialize)]
pub struct RichnessCheck {
    pub size: usize,
    /// `pointwise` or `atoms`.
    pub method: &'static str,
    pub preserves_zero: bool,
    pub preserves_one: bool,
    pub preserves_join: bool,
    pub preserves_meet: bool,
    pub preserves_complement: bool,
    /// First failing instance, as `(operation, x, y)`.
    pub witness: Option<(&'static str, AElem, Option<AElem>)>,
    pub homomorphism: bool,
    pub nr0_size: usize,
    pub nr0_is_two: bool,
}

impl RichnessCheck {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.nr0_is_two
    }
}

fn check(a: &MonadicAlgebra) -> RichnessCheck {
    let c = |x| a.c0(x);
    let mut witness = None;
    let preserves_zero = c(0) == 0;
    let preserves_one = c(a.one()) == a.one();
    let (method, preserves_join, preserves_meet, preserves_complement);
    if a.size() <= POINTWISE_MAX_SIZE {
        method = "pointwise";
        let mut join = true;
        let mut meet = true;
        let mut compl = true;
        for x in a.elements() {
            if c(a.compl(x)) != a.compl(c(x)) && compl {
                compl = false;
                witness.get_or_insert(("complement", x, None));
            }
            for y in a.elements() {
                if join && c(a.join(x, y)) != a.join(c(x), c(y)) {
                    join = false;
                    witness.get_or_insert(("join", x, Some(y)));
                }
                if meet && c(a.meet(x, y)) != a.meet(c(x), c(y)) {
                    meet = false;
                    witness.get_or_insert(("meet", x, Some(y)));
                }
            }
        }
        (preserves_join, preserves_meet, preserves_complement) = (join, meet, compl);
    } else {
        // c0 is additive by the algebra laws, so it preserves joins, and it
        // preserves meets and complements exactly when distinct atoms have
        // disjoint closures; a failure then shows up at an atom
        method = "atoms";
        preserves_join = a.elements().all(|x| {
            let by_atoms = a.atoms().into_iter().filter(|&t| a.leq(t, x)).fold(0, |acc, t| acc | c(t));
            by_atoms == c(x)
        });
        let atoms = a.atoms();
        let overlap = atoms
            .iter()
            .enumerate()
            .find_map(|(i, &s)| atoms[i + 1..].iter().find(|&&t| c(s) & c(t) != 0).map(|&t| (s, t)));
        preserves_meet = overlap.is_none();
        if let Some((s, t)) = overlap {
            witness.get_or_insert(("meet", s, Some(t)));
        }
        let bad_atom = atoms.iter().copied().find(|&s| c(a.compl(s)) != a.compl(c(s)));
        preserves_complement = bad_atom.is_none();
        if let Some(s) = bad_atom {
            if witness.is_none() {
                witness = Some(("complement", s, None));
            }
        }
    }
    let nr0 = a.nr0();
    let nr0_is_two = is_isomorphic(&nr0.algebra, &MonadicAlgebra::two()).is_some();
    RichnessCheck {
        size: a.size(),
        method,
        preserves_zero,
        preserves_one,
        preserves_join,
        preserves_meet,
        preserves_complement,
        witness,
        homomorphism: preserves_zero && preserves_one && preserves_join && preserves_meet && preserves_complement,
        nr0_size: nr0.algebra.size(),
        nr0_is_two,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RichReport {
    pub lt1: RichnessCheck,
    pub quotient: Option<RichnessCheck>,
}

/// Runs the richness checks on `Lt1` and, when given, on a quotient.
pub fn check_rich(lt1: &MonadicAlgebra, quotient: Option<&MonadicAlgebra>) -> RichReport {
    RichReport { lt1: check(lt1), quotient: quotient.map(check) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(k: usize) -> MonadicAlgebra {
        let one = (1 << k) - 1;
        MonadicAlgebra::new(k, (0..1 << k).map(|x| if x == 0 { 0 } else { one }).collect()).unwrap()
    }

    #[test]
    fn simple_algebras_fail_meet_beyond_two_elements() {
        let r = check(&simple(1));
        assert!(r.passed());
        let r = check(&simple(2));
        assert!(r.preserves_join && !r.preserves_meet && !r.preserves_complement);
        assert!(r.nr0_is_two);
    }

    #[test]
    fn identity_c0_is_a_negative_control() {
        let a = MonadicAlgebra::new(2, (0..4).collect()).unwrap();
        let r = check(&a);
        assert!(r.homomorphism);
        assert!(!r.nr0_is_two);
        assert_eq!(r.nr0_size, 4);
    }

    #[test]
    fn atom_method_agrees_with_pointwise() {
        // 9 atoms is above the pointwise bound; compare the verdicts with a
        // direct pointwise pass
        let k = 9;
        let blocks = [0b000000111usize, 0b000111000, 0b111000000];
        let c0: Vec<AElem> = (0..1usize << k).map(|x| blocks.iter().filter(|&&b| b & x != 0).fold(0, |acc, b| acc | b)).collect();
        let a = MonadicAlgebra::new(k, c0).unwrap();
        let r = check(&a);
        assert_eq!(r.method, "atoms");
        let c = |x| a.c0(x);
        let meet = a.elements().all(|x| a.elements().all(|y| c(x & y) == c(x) & c(y)));
        let compl = a.elements().all(|x| c(a.compl(x)) == a.compl(c(x)));
        assert_eq!((r.preserves_meet, r.preserves_complement, r.preserves_join), (meet, compl, true));
        assert_eq!(r.nr0_size, 8);
    }
}
