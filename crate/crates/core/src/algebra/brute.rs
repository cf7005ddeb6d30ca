//! Exhaustive reference implementations, used to cross-check the fast
//! algorithms. All of them are exponential or worse.

use super::{check_isomorphism, AElem, Congruence, Isomorphism, MonadicAlgebra};

/// Checks every operation instance `op(x, y)` vs `op(x′, y′)` with `x ≡ x′`
/// and `y ≡ y′`, stopping at the first failure. Returns the failing
/// operation and its arguments.
pub fn brute_force_congruence(a: &MonadicAlgebra, p: &Congruence, with_c0: bool) -> Result<(), (&'static str, AElem, AElem, AElem, AElem)> {
    let blocks = p.blocks();
    for x in a.elements() {
        for &x2 in &blocks[p.block(x)] {
            if !p.related(a.compl(x), a.compl(x2)) {
                return Err(("compl", x, x2, 0, 0));
            }
            if with_c0 && !p.related(a.c0(x), a.c0(x2)) {
                return Err(("c0", x, x2, 0, 0));
            }
        }
    }
    for x in a.elements() {
        for &x2 in &blocks[p.block(x)] {
            for y in a.elements() {
                for &y2 in &blocks[p.block(y)] {
                    if !p.related(a.meet(x, y), a.meet(x2, y2)) {
                        return Err(("meet", x, x2, y, y2));
                    }
                    if !p.related(a.join(x, y), a.join(x2, y2)) {
                        return Err(("join", x, x2, y, y2));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Least congruence containing `pairs`, by union-find: merge, then keep
/// merging the images of related elements under every operation until
/// nothing changes.
pub fn union_find_congruence(a: &MonadicAlgebra, pairs: &[(AElem, AElem)], with_c0: bool) -> Congruence {
    let n = a.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    fn union(parent: &mut [usize], x: usize, y: usize) -> bool {
        let (rx, ry) = (find(parent, x), find(parent, y));
        if rx == ry {
            return false;
        }
        parent[rx.max(ry)] = rx.min(ry);
        true
    }
    for &(x, y) in pairs {
        union(&mut parent, x, y);
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            let rx = find(&mut parent, x);
            if rx == x {
                continue;
            }
            // x ≡ rx: propagate through every operation
            changed |= union(&mut parent, a.compl(x), a.compl(rx));
            if with_c0 {
                changed |= union(&mut parent, a.c0(x), a.c0(rx));
            }
            for y in 0..n {
                changed |= union(&mut parent, a.meet(x, y), a.meet(rx, y));
                changed |= union(&mut parent, a.join(x, y), a.join(rx, y));
            }
        }
        if !changed {
            break;
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    Congruence::from_labels(&labels)
}

/// Tries every permutation of the atoms.
pub fn brute_force_isomorphic(a: &MonadicAlgebra, b: &MonadicAlgebra) -> Option<Isomorphism> {
    if a.atom_count() != b.atom_count() {
        return None;
    }
    let k = a.atom_count();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let iso = Isomorphism { atom_map: perm.clone() };
        if check_isomorphism(a, b, &iso) {
            return Some(iso);
        }
        // next permutation in lexicographic order
        let Some(i) = (1..k).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return None;
        };
        let j = (i..k).rev().find(|&j| perm[j] > perm[i - 1]).expect("exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}
