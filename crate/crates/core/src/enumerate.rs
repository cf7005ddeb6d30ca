//! Exhaustive and random generation of terms and formulas.
//!
//! Depth is the syntactic nesting depth of [`Formula::depth`]: variables
//! and constants are 0, every constructor adds one.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Formula, Signature, Term, Var};

#[derive(Clone, Debug)]
pub struct EnumConfig {
    pub vars: Vec<Var>,
    pub max_depth: usize,
    pub functions: bool,
    pub relations: bool,
    pub quantifiers: bool,
    /// Also generate `and`, `imp` and `iff`.
    pub sugar: bool,
}

impl EnumConfig {
    pub fn new(vars: &[u32], max_depth: usize) -> Self {
        EnumConfig {
            vars: vars.iter().map(|&i| Var(i)).collect(),
            max_depth,
            functions: true,
            relations: true,
            quantifiers: true,
            sugar: false,
        }
    }
}

/// Terms and formulas grouped by exact depth.
pub struct Levels {
    pub terms: Vec<Vec<Term>>,
    pub formulas: Vec<Vec<Arc<Formula>>>,
}

impl Levels {
    pub fn all_formulas(&self) -> impl Iterator<Item = &Arc<Formula>> {
        self.formulas.iter().flatten()
    }

    pub fn all_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().flatten()
    }

    pub fn formula_count(&self) -> usize {
        self.formulas.iter().map(Vec::len).sum()
    }
}

/// Argument tuples over `pool` (indexed by depth) with maximum depth exactly `d`.
fn tuples_at_depth<T: Clone>(pool: &[Vec<T>], arity: usize, d: usize) -> Vec<Vec<T>> {
    let upto: Vec<T> = pool[..=d].iter().flatten().cloned().collect();
    let below = pool[..d].iter().map(Vec::len).sum::<usize>();
    let mut out = Vec::new();
    let mut idx = vec![0usize; arity];
    if upto.is_empty() {
        return out;
    }
    loop {
        // keep tuples where some component has depth exactly d
        if idx.iter().any(|&i| i >= below) {
            out.push(idx.iter().map(|&i| upto[i].clone()).collect());
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < upto.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Unordered pairs `(a, b)` with `a ≤ b` in pool order and max depth exactly `d`.
fn pairs_at_depth<T: Clone>(pool: &[Vec<T>], d: usize) -> Vec<(T, T)> {
    let upto: Vec<T> = pool[..=d].iter().flatten().cloned().collect();
    let below = pool[..d].iter().map(Vec::len).sum::<usize>();
    let mut out = Vec::new();
    for j in below..upto.len() {
        for i in 0..=j {
            out.push((upto[i].clone(), upto[j].clone()));
        }
    }
    out
}

/// Every term and formula up to `cfg.max_depth`. Symmetric duplicates of
/// `=` and `or` are skipped.
pub fn enumerate(sig: &Signature, cfg: &EnumConfig) -> Levels {
    let mut terms: Vec<Vec<Term>> = Vec::new();
    let mut formulas: Vec<Vec<Arc<Formula>>> = Vec::new();
    let mut leaves: Vec<Term> = cfg.vars.iter().map(|&v| Term::Var(v)).collect();
    leaves.extend(sig.constant_ids().map(Term::Const));
    terms.push(leaves);
    formulas.push(Vec::new());
    for d in 1..=cfg.max_depth {
        let mut level = Vec::new();
        if cfg.functions {
            for f in sig.function_ids() {
                let arity = sig.function(f).arity;
                for args in tuples_at_depth(&terms, arity, d - 1) {
                    level.push(Term::App(f, args));
                }
            }
        }
        for &v in &cfg.vars {
            for body in &formulas[d - 1] {
                level.push(Term::Eps(v, Arc::clone(body)));
            }
        }
        let mut flevel: Vec<Arc<Formula>> = Vec::new();
        for (a, b) in pairs_at_depth(&terms, d - 1) {
            flevel.push(Arc::new(Formula::Eq(a, b)));
        }
        if cfg.relations {
            for r in sig.relation_ids() {
                for args in tuples_at_depth(&terms, sig.relation(r).arity, d - 1) {
                    flevel.push(Arc::new(Formula::Rel(r, args)));
                }
            }
        }
        if d >= 2 {
            for g in &formulas[d - 1] {
                flevel.push(Arc::new(Formula::Not(Arc::clone(g))));
            }
            for (a, b) in pairs_at_depth(&formulas, d - 1) {
                flevel.push(Arc::new(Formula::Or(Arc::clone(&a), Arc::clone(&b))));
                if cfg.sugar {
                    flevel.push(Arc::new(Formula::And(Arc::clone(&a), Arc::clone(&b))));
                    flevel.push(Arc::new(Formula::Iff(Arc::clone(&a), Arc::clone(&b))));
                    flevel.push(Arc::new(Formula::Imp(Arc::clone(&a), Arc::clone(&b))));
                    if !Arc::ptr_eq(&a, &b) {
                        flevel.push(Arc::new(Formula::Imp(b, a)));
                    }
                }
            }
            if cfg.quantifiers {
                for &v in &cfg.vars {
                    for g in &formulas[d - 1] {
                        flevel.push(Arc::new(Formula::Exists(v, Arc::clone(g))));
                        flevel.push(Arc::new(Formula::Forall(v, Arc::clone(g))));
                    }
                }
            }
        }
        terms.push(level);
        formulas.push(flevel);
    }
    Levels { terms, formulas }
}

/// Random generation over the full signature and all connectives.
pub struct RandomGen<'s> {
    sig: &'s Signature,
    vars: Vec<Var>,
}

impl<'s> RandomGen<'s> {
    pub fn new(sig: &'s Signature, vars: &[u32]) -> Self {
        RandomGen { sig, vars: vars.iter().map(|&i| Var(i)).collect() }
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Term {
        let k = self.vars.len() + self.sig.constants().len();
        let i = rng.gen_range(0..k);
        if i < self.vars.len() {
            Term::Var(self.vars[i])
        } else {
            Term::Const(crate::syntax::ConstId((i - self.vars.len()) as u32))
        }
    }

    /// A term of depth at most `depth`.
    pub fn term<R: Rng>(&self, rng: &mut R, depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.35) {
            return self.leaf(rng);
        }
        let nfun = self.sig.functions().len();
        // formulas need depth ≥ 1, so an ε-term needs depth ≥ 2
        let eps_ok = depth >= 2;
        if nfun == 0 && !eps_ok {
            return self.leaf(rng);
        }
        let pick = rng.gen_range(0..nfun + usize::from(eps_ok) * 2);
        if pick < nfun {
            let f = crate::syntax::FunId(pick as u32);
            let args = (0..self.sig.function(f).arity).map(|_| self.term(rng, depth - 1)).collect();
            Term::App(f, args)
        } else if eps_ok {
            let v = *self.vars.choose(rng).expect("at least one variable");
            Term::eps(v, self.formula(rng, depth - 1))
        } else {
            self.leaf(rng)
        }
    }

    /// A formula of depth at most `depth` (at least 1).
    pub fn formula<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        let depth = depth.max(1);
        let atomic = depth == 1 || rng.gen_bool(0.25);
        if atomic {
            let nrel = self.sig.relations().len();
            let pick = rng.gen_range(0..=nrel);
            if pick < nrel {
                let r = crate::syntax::RelId(pick as u32);
                let args = (0..self.sig.relation(r).arity).map(|_| self.term(rng, depth - 1)).collect();
                return Formula::Rel(r, args);
            }
            return Formula::Eq(self.term(rng, depth - 1), self.term(rng, depth - 1));
        }
        let v = *self.vars.choose(rng).expect("at least one variable");
        let d = depth - 1;
        match rng.gen_range(0..8) {
            0 => Formula::not(self.formula(rng, d)),
            1 => Formula::or(self.formula(rng, d), self.formula(rng, d)),
            2 => Formula::and(self.formula(rng, d), self.formula(rng, d)),
            3 => Formula::imp(self.formula(rng, d), self.formula(rng, d)),
            4 => Formula::iff(self.formula(rng, d), self.formula(rng, d)),
            5 => Formula::exists(v, self.formula(rng, d)),
            6 => Formula::forall(v, self.formula(rng, d)),
            _ => Formula::Eq(self.term(rng, d), self.term(rng, d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ba_signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn levels_have_exact_depth() {
        let sig = ba_signature(false);
        let no_functions = EnumConfig { functions: false, ..EnumConfig::new(&[0, 1], 3) };
        for cfg in [EnumConfig::new(&[0, 1], 2), no_functions] {
            let levels = enumerate(&sig, &cfg);
            for (d, level) in levels.formulas.iter().enumerate() {
                assert!(level.iter().all(|f| f.depth() == d));
            }
            for (d, level) in levels.terms.iter().enumerate() {
                assert!(level.iter().all(|t| t.depth() == d));
            }
        }
        let levels = enumerate(&sig, &EnumConfig::new(&[0, 1], 1));
        // depth 1: = over the four leaves, unordered with repetition
        assert_eq!(levels.formulas[1].len(), 10);
    }

    #[test]
    fn no_duplicates_at_depth_two() {
        let sig = ba_signature(false);
        let levels = enumerate(&sig, &EnumConfig::new(&[0, 1], 2));
        let mut seen = std::collections::HashSet::new();
        for f in levels.all_formulas() {
            assert!(seen.insert(f.as_ref().clone()));
        }
    }

    #[test]
    fn random_formulas_respect_depth() {
        let sig = ba_signature(true);
        let gen = RandomGen::new(&sig, &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            assert!(gen.formula(&mut rng, 4).depth() <= 4);
            assert!(gen.term(&mut rng, 3).depth() <= 3);
        }
    }
}
