use std::fmt::{self, Display, Formatter};

use super::{Formula, Signature, Term};

/// Pairs an expression with the signature needed to print its symbols.
pub struct Displayed<'a, T: ?Sized> {
    item: &'a T,
    sig: &'a Signature,
}

pub trait Printable {
    fn write(&self, sig: &Signature, f: &mut Formatter<'_>) -> fmt::Result;

    fn display<'a>(&'a self, sig: &'a Signature) -> Displayed<'a, Self> {
        Displayed { item: self, sig }
    }

    fn to_text(&self, sig: &Signature) -> String {
        self.display(sig).to_string()
    }
}

impl<T: Printable + ?Sized> Display for Displayed<'_, T> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.item.write(self.sig, f)
    }
}

impl Printable for Term {
    fn write(&self, sig: &Signature, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(sig.constant(*c)),
            Term::App(g, args) => {
                write!(f, "({}", sig.function(*g).name)?;
                for a in args {
                    f.write_str(" ")?;
                    a.write(sig, f)?;
                }
                f.write_str(")")
            }
            Term::Eps(v, body) => {
                write!(f, "(eps {v} ")?;
                body.write(sig, f)?;
                f.write_str(")")
            }
        }
    }
}

impl Printable for Formula {
    fn write(&self, sig: &Signature, f: &mut Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut Formatter<'_>, op: &str, a: &Formula, b: &Formula| {
            write!(f, "({op} ")?;
            a.write(sig, f)?;
            f.write_str(" ")?;
            b.write(sig, f)?;
            f.write_str(")")
        };
        match self {
            Formula::Eq(a, b) => {
                f.write_str("(= ")?;
                a.write(sig, f)?;
                f.write_str(" ")?;
                b.write(sig, f)?;
                f.write_str(")")
            }
            Formula::Rel(r, args) => {
                write!(f, "({}", sig.relation(*r).name)?;
                for a in args {
                    f.write_str(" ")?;
                    a.write(sig, f)?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => {
                f.write_str("(not ")?;
                g.write(sig, f)?;
                f.write_str(")")
            }
            Formula::Or(a, b) => binary(f, "or", a, b),
            Formula::And(a, b) => binary(f, "and", a, b),
            Formula::Imp(a, b) => binary(f, "imp", a, b),
            Formula::Iff(a, b) => binary(f, "iff", a, b),
            Formula::Exists(v, g) => {
                write!(f, "(ex {v} ")?;
                g.write(sig, f)?;
                f.write_str(")")
            }
            Formula::Forall(v, g) => {
                write!(f, "(all {v} ")?;
                g.write(sig, f)?;
                f.write_str(")")
            }
        }
    }
}
