use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Formula, Term, Var};

/// The smallest variable not in `avoid`.
pub fn fresh_var(avoid: &BTreeSet<Var>) -> Var {
    let mut i = 0;
    for v in avoid {
        if v.0 == i {
            i += 1;
        } else if v.0 > i {
            break;
        }
    }
    Var(i)
}

fn term_has_free(t: &Term, v: Var) -> bool {
    match t {
        Term::Var(w) => *w == v,
        Term::Const(_) => false,
        Term::App(_, args) => args.iter().any(|a| term_has_free(a, v)),
        Term::Eps(w, body) => *w != v && has_free(body, v),
    }
}

fn has_free(f: &Formula, v: Var) -> bool {
    match f {
        Formula::Eq(a, b) => term_has_free(a, v) || term_has_free(b, v),
        Formula::Rel(_, args) => args.iter().any(|a| term_has_free(a, v)),
        Formula::Not(g) => has_free(g, v),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
            has_free(a, v) || has_free(b, v)
        }
        Formula::Exists(w, g) | Formula::Forall(w, g) => *w != v && has_free(g, v),
    }
}

struct Subst<'a> {
    t: &'a Term,
    v: Var,
    t_free: BTreeSet<Var>,
}

impl Subst<'_> {
    fn arc(&self, f: &Arc<Formula>) -> Arc<Formula> {
        if has_free(f, self.v) {
            Arc::new(self.formula(f))
        } else {
            Arc::clone(f)
        }
    }

    /// Pushes the substitution under a binder of `w`, renaming `w` when it
    /// would capture a free variable of the substituted term.
    fn binder(&self, w: Var, body: &Arc<Formula>) -> (Var, Arc<Formula>) {
        if w == self.v || !has_free(body, self.v) {
            return (w, Arc::clone(body));
        }
        if self.t_free.contains(&w) {
            let mut avoid = body.all_vars();
            avoid.extend(self.t_free.iter().copied());
            avoid.insert(self.v);
            let fresh = fresh_var(&avoid);
            let renamed = rename_var(body, w, fresh);
            (fresh, Arc::new(self.formula(&renamed)))
        } else {
            (w, self.arc(body))
        }
    }

    fn term(&self, s: &Term) -> Term {
        match s {
            Term::Var(w) if *w == self.v => self.t.clone(),
            Term::Var(_) | Term::Const(_) => s.clone(),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| self.term(a)).collect()),
            Term::Eps(w, body) => {
                let (w, body) = self.binder(*w, body);
                Term::Eps(w, body)
            }
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Rel(r, args) => Formula::Rel(*r, args.iter().map(|a| self.term(a)).collect()),
            Formula::Not(g) => Formula::Not(self.arc(g)),
            Formula::Or(a, b) => Formula::Or(self.arc(a), self.arc(b)),
            Formula::And(a, b) => Formula::And(self.arc(a), self.arc(b)),
            Formula::Imp(a, b) => Formula::Imp(self.arc(a), self.arc(b)),
            Formula::Iff(a, b) => Formula::Iff(self.arc(a), self.arc(b)),
            Formula::Exists(w, g) => {
                let (w, g) = self.binder(*w, g);
                Formula::Exists(w, g)
            }
            Formula::Forall(w, g) => {
                let (w, g) = self.binder(*w, g);
                Formula::Forall(w, g)
            }
        }
    }
}

/// `phi[t/v]`, renaming bound variables of `phi` that would capture free
/// variables of `t`. Fresh names are the smallest indices not occurring in
/// the renamed body, in `t`, or equal to `v`.
pub fn substitute(phi: &Formula, t: &Term, v: Var) -> Formula {
    if !has_free(phi, v) {
        return phi.clone();
    }
    Subst { t, v, t_free: t.free_vars() }.formula(phi)
}

pub fn substitute_term(s: &Term, t: &Term, v: Var) -> Term {
    if !term_has_free(s, v) {
        return s.clone();
    }
    Subst { t, v, t_free: t.free_vars() }.term(s)
}

/// Renames free occurrences of `from` to `to`. `to` must not occur in `phi`.
pub fn rename_var(phi: &Formula, from: Var, to: Var) -> Formula {
    substitute(phi, &Term::Var(to), from)
}

fn desugar_arc(f: &Arc<Formula>) -> Arc<Formula> {
    Arc::new(desugar(f))
}

fn desugar_term(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(g, args) => Term::App(*g, args.iter().map(desugar_term).collect()),
        Term::Eps(v, body) => Term::Eps(*v, desugar_arc(body)),
    }
}

fn not(f: Arc<Formula>) -> Arc<Formula> {
    Arc::new(Formula::Not(f))
}

fn or(a: Arc<Formula>, b: Arc<Formula>) -> Arc<Formula> {
    Arc::new(Formula::Or(a, b))
}

/// Rewrites every derived connective into `not`, `or` and ε:
/// `(ex v φ)` becomes `φ[(eps v φ)/v]` and `(all v φ)` becomes
/// `φ[(eps v (not φ))/v]`.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(desugar_term(a), desugar_term(b)),
        Formula::Rel(r, args) => Formula::Rel(*r, args.iter().map(desugar_term).collect()),
        Formula::Not(g) => Formula::Not(desugar_arc(g)),
        Formula::Or(a, b) => Formula::Or(desugar_arc(a), desugar_arc(b)),
        Formula::And(a, b) => {
            Formula::Not(or(not(desugar_arc(a)), not(desugar_arc(b))))
        }
        Formula::Imp(a, b) => Formula::Or(not(desugar_arc(a)), desugar_arc(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar_arc(a), desugar_arc(b));
            let ab = or(not(a.clone()), b.clone());
            let ba = or(not(b), a);
            Formula::Not(or(not(ab), not(ba)))
        }
        Formula::Exists(v, g) => {
            let body = desugar(g);
            let witness = Term::Eps(*v, Arc::new(body.clone()));
            substitute(&body, &witness, *v)
        }
        Formula::Forall(v, g) => {
            let body = desugar(g);
            let witness = Term::Eps(*v, not(Arc::new(body.clone())));
            substitute(&body, &witness, *v)
        }
    }
}

fn alpha_term(a: &Term, b: &Term, env: &mut Vec<(Var, Var)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if l == x || r == y {
                    return l == x && r == y;
                }
            }
            x == y
        }
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, env))
        }
        (Term::Eps(x, p), Term::Eps(y, q)) => {
            env.push((*x, *y));
            let r = alpha_formula(p, q, env);
            env.pop();
            r
        }
        _ => false,
    }
}

fn alpha_formula(a: &Formula, b: &Formula, env: &mut Vec<(Var, Var)>) -> bool {
    use Formula::*;
    match (a, b) {
        (Eq(a1, a2), Eq(b1, b2)) => alpha_term(a1, b1, env) && alpha_term(a2, b2, env),
        (Rel(r, xs), Rel(s, ys)) => {
            r == s && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, env))
        }
        (Not(p), Not(q)) => alpha_formula(p, q, env),
        (Or(a1, a2), Or(b1, b2))
        | (And(a1, a2), And(b1, b2))
        | (Imp(a1, a2), Imp(b1, b2))
        | (Iff(a1, a2), Iff(b1, b2)) => alpha_formula(a1, b1, env) && alpha_formula(a2, b2, env),
        (Exists(x, p), Exists(y, q)) | (Forall(x, p), Forall(y, q)) => {
            env.push((*x, *y));
            let r = alpha_formula(p, q, env);
            env.pop();
            r
        }
        _ => false,
    }
}

impl Formula {
    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_formula(self, other, &mut Vec::new())
    }
}

impl Term {
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_term(self, other, &mut Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::ba_sig;
    use super::*;
    use crate::syntax::{parse_formula, parse_term, Printable};

    #[test]
    fn replaces_free_occurrence() {
        let sig = ba_sig();
        let phi = parse_formula("(= v0 zero)", &sig).unwrap();
        let one = parse_term("one", &sig).unwrap();
        assert_eq!(substitute(&phi, &one, Var(0)).to_text(&sig), "(= one zero)");
    }

    #[test]
    fn renames_capturing_binder() {
        let sig = ba_sig();
        let phi = parse_formula("(= (eps v0 (= v0 v1)) v1)", &sig).unwrap();
        let t = parse_term("(compl v0)", &sig).unwrap();
        let out = substitute(&phi, &t, Var(1));
        // v0 and v1 are taken by t and the target; v2 is the smallest free index
        assert_eq!(out.to_text(&sig), "(= (eps v2 (= v2 (compl v0))) (compl v0))");
        assert!(out.free_vars().contains(&Var(0)));
    }

    #[test]
    fn untouched_when_not_free() {
        let sig = ba_sig();
        let phi = parse_formula("(= v1 v1)", &sig).unwrap();
        let t = parse_term("zero", &sig).unwrap();
        assert_eq!(substitute(&phi, &t, Var(0)), phi);
        let bound = parse_formula("(ex v0 (= v0 v1))", &sig).unwrap();
        assert_eq!(substitute(&bound, &t, Var(0)), bound);
    }

    #[test]
    fn desugars_existential_by_epsilon() {
        let sig = ba_sig();
        let phi = parse_formula("(ex v0 (= v0 zero))", &sig).unwrap();
        assert_eq!(desugar(&phi).to_text(&sig), "(= (eps v0 (= v0 zero)) zero)");
    }

    #[test]
    fn desugars_universal_by_negated_epsilon() {
        let sig = ba_sig();
        let phi = parse_formula("(all v0 (= v0 v0))", &sig).unwrap();
        assert_eq!(
            desugar(&phi).to_text(&sig),
            "(= (eps v0 (not (= v0 v0))) (eps v0 (not (= v0 v0))))"
        );
    }

    #[test]
    fn desugars_conjunction_by_de_morgan() {
        let sig = ba_sig();
        let phi = parse_formula("(and (= v0 zero) (= v1 one))", &sig).unwrap();
        assert_eq!(
            desugar(&phi).to_text(&sig),
            "(not (or (not (= v0 zero)) (not (= v1 one))))"
        );
        let core = desugar(&parse_formula("(iff (ex v1 (= v0 v1)) (all v0 (= v0 v1)))", &sig).unwrap());
        assert!(core.is_core());
        assert_eq!(desugar(&core), core);
    }

    #[test]
    fn fresh_var_takes_smallest_gap() {
        assert_eq!(fresh_var(&BTreeSet::new()), Var(0));
        assert_eq!(fresh_var(&[Var(0), Var(1), Var(3)].into()), Var(2));
        assert_eq!(fresh_var(&[Var(1), Var(2)].into()), Var(0));
    }

    #[test]
    fn alpha_equivalence() {
        let sig = ba_sig();
        let a = parse_formula("(ex v0 (= v0 v2))", &sig).unwrap();
        let b = parse_formula("(ex v1 (= v1 v2))", &sig).unwrap();
        let c = parse_formula("(ex v2 (= v2 v2))", &sig).unwrap();
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}
