use std::sync::Arc;

use thiserror::Error;

use super::{Formula, Signature, Symbol, Term, Var, RESERVED};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical(char),
    UnexpectedEnd,
    Unexpected { expected: &'static str, found: String },
    Undeclared(String),
    Arity { name: String, expected: usize, found: usize },
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {}", describe(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Lexical(c) => format!("unexpected character {c:?}"),
        ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
        ParseErrorKind::Unexpected { expected, found } => {
            format!("expected {expected}, found `{found}`")
        }
        ParseErrorKind::Undeclared(name) => format!("undeclared symbol `{name}`"),
        ParseErrorKind::Arity { name, expected, found } => {
            format!("`{name}` takes {expected} argument(s), got {found}")
        }
        ParseErrorKind::TrailingInput => "trailing input after expression".to_string(),
    }
}

/// A parsed expression: the grammar lets a string denote either sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Term(Term),
    Formula(Formula),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

/// Parses `v<digits>` into a variable index.
pub(super) fn var_index(word: &str) -> Option<u32> {
    let digits = word.strip_prefix('v')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    sig: &'a Signature,
}

fn lex(src: &str) -> Result<Vec<(Tok<'_>, usize)>, (ParseErrorKind, usize)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                out.push((Tok::Open, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::Close, i));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            c if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_' || c == b'=' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i];
                    if d.is_ascii_lowercase() || d.is_ascii_digit() || d == b'_' || d == b'=' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Word(&src[start..i]), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err((ParseErrorKind::Lexical(ch), i));
            }
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn error(&self, kind: ParseErrorKind, offset: usize) -> ParseError {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
        ParseError { kind, offset, line, column }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.src.len())
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn peek2(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos + 1).map(|t| t.0)
    }

    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        let tok = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error(ParseErrorKind::UnexpectedEnd, self.src.len()))?;
        self.pos += 1;
        Ok(tok)
    }

    fn unexpected(&self, expected: &'static str, tok: Tok<'_>, at: usize) -> ParseError {
        let found = match tok {
            Tok::Open => "(".to_string(),
            Tok::Close => ")".to_string(),
            Tok::Word(w) => w.to_string(),
        };
        self.error(ParseErrorKind::Unexpected { expected, found }, at)
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            (Tok::Close, _) => Ok(()),
            (tok, at) => Err(self.unexpected("`)`", tok, at)),
        }
    }

    fn expect_var(&mut self) -> Result<Var, ParseError> {
        match self.next()? {
            (Tok::Word(w), at) => var_index(w)
                .map(Var)
                .ok_or_else(|| self.unexpected("a variable", Tok::Word(w), at)),
            (tok, at) => Err(self.unexpected("a variable", tok, at)),
        }
    }

    /// Does the upcoming token sequence start a term (rather than a formula)?
    fn starts_term(&self) -> bool {
        match (self.peek(), self.peek2()) {
            (Some(Tok::Word(_)), _) => true,
            (Some(Tok::Open), Some(Tok::Word("eps"))) => true,
            (Some(Tok::Open), Some(Tok::Word(w))) => {
                matches!(self.sig.lookup(w), Some(Symbol::Fun(_)))
            }
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, at) = self.next()?;
        match tok {
            Tok::Word(w) => {
                if let Some(i) = var_index(w) {
                    return Ok(Term::Var(Var(i)));
                }
                match self.sig.lookup(w) {
                    Some(Symbol::Const(c)) => Ok(Term::Const(c)),
                    Some(_) => Err(self.unexpected("a term", tok, at)),
                    None if RESERVED.contains(&w) || w == "=" => {
                        Err(self.unexpected("a term", tok, at))
                    }
                    None => Err(self.error(ParseErrorKind::Undeclared(w.to_string()), at)),
                }
            }
            Tok::Open => {
                let (head, head_at) = self.next()?;
                match head {
                    Tok::Word("eps") => {
                        let v = self.expect_var()?;
                        let body = self.formula()?;
                        self.expect_close()?;
                        Ok(Term::Eps(v, Arc::new(body)))
                    }
                    Tok::Word(name) => match self.sig.lookup(name) {
                        Some(Symbol::Fun(id)) => {
                            let args = self.args(name, self.sig.function(id).arity, head_at)?;
                            Ok(Term::App(id, args))
                        }
                        Some(_) => Err(self.unexpected("a function symbol", head, head_at)),
                        None if RESERVED.contains(&name) || name == "=" => {
                            Err(self.unexpected("a function symbol", head, head_at))
                        }
                        None => {
                            Err(self.error(ParseErrorKind::Undeclared(name.to_string()), head_at))
                        }
                    },
                    _ => Err(self.unexpected("a function symbol", head, head_at)),
                }
            }
            Tok::Close => Err(self.unexpected("a term", tok, at)),
        }
    }

    /// Reads terms up to the closing paren and checks their count.
    fn args(&mut self, name: &str, arity: usize, at: usize) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        while self.peek() != Some(Tok::Close) {
            if self.peek().is_none() {
                return Err(self.error(ParseErrorKind::UnexpectedEnd, self.src.len()));
            }
            args.push(self.term()?);
        }
        self.pos += 1;
        if args.len() != arity {
            return Err(self.error(
                ParseErrorKind::Arity { name: name.to_string(), expected: arity, found: args.len() },
                at,
            ));
        }
        Ok(args)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let (tok, at) = self.next()?;
        if tok != Tok::Open {
            return Err(self.unexpected("`(` opening a formula", tok, at));
        }
        let (head, head_at) = self.next()?;
        let Tok::Word(word) = head else {
            return Err(self.unexpected("a connective or relation", head, head_at));
        };
        let f = match word {
            "=" => {
                let a = self.term()?;
                let b = self.term()?;
                self.expect_close()?;
                Formula::Eq(a, b)
            }
            "not" => {
                let g = self.formula()?;
                self.expect_close()?;
                Formula::Not(Arc::new(g))
            }
            "or" | "and" | "imp" | "iff" => {
                let a = Arc::new(self.formula()?);
                let b = Arc::new(self.formula()?);
                self.expect_close()?;
                match word {
                    "or" => Formula::Or(a, b),
                    "and" => Formula::And(a, b),
                    "imp" => Formula::Imp(a, b),
                    _ => Formula::Iff(a, b),
                }
            }
            "ex" | "all" => {
                let v = self.expect_var()?;
                let g = Arc::new(self.formula()?);
                self.expect_close()?;
                if word == "ex" {
                    Formula::Exists(v, g)
                } else {
                    Formula::Forall(v, g)
                }
            }
            "eps" => return Err(self.unexpected("a connective or relation", head, head_at)),
            name => match self.sig.lookup(name) {
                Some(Symbol::Rel(id)) => {
                    let args = self.args(name, self.sig.relation(id).arity, head_at)?;
                    Formula::Rel(id, args)
                }
                Some(_) => return Err(self.unexpected("a connective or relation", head, head_at)),
                None => {
                    return Err(self.error(ParseErrorKind::Undeclared(name.to_string()), head_at))
                }
            },
        };
        Ok(f)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.error(ParseErrorKind::TrailingInput, self.here()))
        } else {
            Ok(())
        }
    }
}

fn parser<'a>(text: &'a str, sig: &'a Signature) -> Result<Parser<'a>, ParseError> {
    match lex(text) {
        Ok(toks) => Ok(Parser { src: text, toks, pos: 0, sig }),
        Err((kind, offset)) => {
            let p = Parser { src: text, toks: Vec::new(), pos: 0, sig };
            Err(p.error(kind, offset))
        }
    }
}

/// Parses a term or a formula, deciding by the leading tokens.
pub fn parse(text: &str, sig: &Signature) -> Result<Expr, ParseError> {
    let mut p = parser(text, sig)?;
    if p.peek().is_none() {
        return Err(p.error(ParseErrorKind::UnexpectedEnd, text.len()));
    }
    let e = if p.starts_term() { Expr::Term(p.term()?) } else { Expr::Formula(p.formula()?) };
    p.finish()?;
    Ok(e)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = parser(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = parser(text, sig)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}
