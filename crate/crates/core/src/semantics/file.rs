//! The line-oriented `.struct` file format.
//!
//! ```text
//! signature
//! fun meet 2
//! const zero
//! end
//! carrier 2
//! fun meet
//! 0 0 -> 0
//! ...
//! end
//! const zero 0
//! choice min
//! choice-empty 0
//! ```
//!
//! Unlisted relation tuples are false. Function tables and explicit choice
//! tables (`choice table` followed by `{i,j} -> k` lines and `end`) must be
//! total.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::set::{Elem, ElemSet};
use super::structure::{tuples, ChoiceRule, ChoiceStructure, StructureError};
use crate::syntax::{Signature, SignatureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawChoice {
    Min,
    Table(Vec<(ElemSet, Elem)>),
}

/// A structure file as read, before any semantic validation.
#[derive(Debug, Clone, Default)]
pub struct RawStructure {
    pub relations: Vec<(String, usize)>,
    pub functions: Vec<(String, usize)>,
    pub constants: Vec<String>,
    pub carrier: Option<usize>,
    pub relation_tuples: HashMap<String, Vec<Vec<Elem>>>,
    pub function_entries: HashMap<String, Vec<(Vec<Elem>, Elem)>>,
    pub constant_values: HashMap<String, Elem>,
    pub choice: Option<RawChoice>,
    pub choice_empty: Option<Elem>,
}

fn syntax(line: usize, message: impl Into<String>) -> FileError {
    FileError::Syntax { line, message: message.into() }
}

fn number(line: usize, word: &str) -> Result<usize, FileError> {
    word.parse().map_err(|_| syntax(line, format!("expected a number, found `{word}`")))
}

fn parse_set(line: usize, text: &str) -> Result<ElemSet, FileError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("expected a set like {{0,1}}, found `{text}`")))?;
    let mut set = ElemSet::EMPTY;
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e = number(line, part)?;
        if e >= 64 {
            return Err(syntax(line, format!("element {e} out of range")));
        }
        set.insert(e);
    }
    Ok(set)
}

/// Reads lines up to `end`.
fn read_block<'a, I>(lines: &mut I, opened: usize) -> Result<Vec<(usize, String)>, FileError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut body = Vec::new();
    for (n, l) in lines.by_ref() {
        if l == "end" {
            return Ok(body);
        }
        body.push((n, l.to_string()));
    }
    Err(syntax(opened, "block is missing `end`"))
}

impl RawStructure {
    pub fn parse(text: &str) -> Result<RawStructure, FileError> {
        let mut raw = RawStructure::default();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut seen_signature = false;
        while let Some((n, line)) = lines.next() {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["signature"] => {
                    if seen_signature {
                        return Err(syntax(n, "duplicate signature block"));
                    }
                    seen_signature = true;
                    for (m, decl) in read_block(&mut lines, n)? {
                        let w: Vec<&str> = decl.split_whitespace().collect();
                        match w.as_slice() {
                            ["rel", name, arity] => {
                                raw.relations.push((name.to_string(), number(m, arity)?))
                            }
                            ["fun", name, arity] => {
                                raw.functions.push((name.to_string(), number(m, arity)?))
                            }
                            ["const", name] => raw.constants.push(name.to_string()),
                            _ => return Err(syntax(m, format!("bad declaration `{decl}`"))),
                        }
                    }
                }
                ["carrier", k] => {
                    if raw.carrier.replace(number(n, k)?).is_some() {
                        return Err(syntax(n, "duplicate carrier line"));
                    }
                }
                ["rel", name] => {
                    let mut rows = Vec::new();
                    for (m, row) in read_block(&mut lines, n)? {
                        let t = row
                            .split_whitespace()
                            .map(|w| number(m, w))
                            .collect::<Result<Vec<_>, _>>()?;
                        rows.push(t);
                    }
                    if raw.relation_tuples.insert(name.to_string(), rows).is_some() {
                        return Err(syntax(n, format!("duplicate table for `{name}`")));
                    }
                }
                ["fun", name] => {
                    let mut entries = Vec::new();
                    for (m, row) in read_block(&mut lines, n)? {
                        let (lhs, rhs) = row
                            .split_once("->")
                            .ok_or_else(|| syntax(m, "expected `args -> value`"))?;
                        let args = lhs
                            .split_whitespace()
                            .map(|w| number(m, w))
                            .collect::<Result<Vec<_>, _>>()?;
                        entries.push((args, number(m, rhs.trim())?));
                    }
                    if raw.function_entries.insert(name.to_string(), entries).is_some() {
                        return Err(syntax(n, format!("duplicate table for `{name}`")));
                    }
                }
                ["const", name, k] => {
                    if raw.constant_values.insert(name.to_string(), number(n, k)?).is_some() {
                        return Err(syntax(n, format!("duplicate value for `{name}`")));
                    }
                }
                ["choice", "min"] => {
                    if raw.choice.replace(RawChoice::Min).is_some() {
                        return Err(syntax(n, "duplicate choice rule"));
                    }
                }
                ["choice", "table"] => {
                    let mut entries = Vec::new();
                    for (m, row) in read_block(&mut lines, n)? {
                        let (lhs, rhs) = row
                            .split_once("->")
                            .ok_or_else(|| syntax(m, "expected `{set} -> element`"))?;
                        entries.push((parse_set(m, lhs.trim())?, number(m, rhs.trim())?));
                    }
                    if raw.choice.replace(RawChoice::Table(entries)).is_some() {
                        return Err(syntax(n, "duplicate choice rule"));
                    }
                }
                ["choice-empty", k] => {
                    if raw.choice_empty.replace(number(n, k)?).is_some() {
                        return Err(syntax(n, "duplicate choice-empty line"));
                    }
                }
                _ => return Err(syntax(n, format!("unrecognised line `{line}`"))),
            }
        }
        if !seen_signature {
            return Err(syntax(1, "missing signature block"));
        }
        Ok(raw)
    }
}

/// Checks a raw structure against every invariant of [`ChoiceStructure`].
pub fn validate_structure(raw: &RawStructure) -> Result<ChoiceStructure, FileError> {
    let sig = Signature::new(
        raw.relations.iter().cloned(),
        raw.functions.iter().cloned(),
        raw.constants.iter().cloned(),
    )?;
    let n = raw.carrier.ok_or_else(|| syntax(1, "missing carrier line"))?;
    if n == 0 || n > super::set::MAX_CARRIER {
        return Err(StructureError::CarrierSize(n).into());
    }
    for name in raw.relation_tuples.keys() {
        if sig.rel_id(name).is_none() {
            return Err(StructureError::Invalid(format!("table for undeclared relation `{name}`")).into());
        }
    }
    for name in raw.function_entries.keys() {
        if sig.fun_id(name).is_none() {
            return Err(StructureError::Invalid(format!("table for undeclared function `{name}`")).into());
        }
    }
    for name in raw.constant_values.keys() {
        if sig.const_id(name).is_none() {
            return Err(StructureError::Invalid(format!("value for undeclared constant `{name}`")).into());
        }
    }
    let relations = sig
        .relations()
        .iter()
        .map(|d| raw.relation_tuples.get(&d.name).cloned().unwrap_or_default())
        .collect();
    let mut functions = Vec::new();
    for decl in sig.functions() {
        let mut table: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
        for (args, v) in raw.function_entries.get(&decl.name).into_iter().flatten() {
            let show = || args.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
            if args.len() != decl.arity {
                return Err(StructureError::TupleArity {
                    name: decl.name.clone(),
                    tuple: show(),
                    arity: decl.arity,
                }
                .into());
            }
            if args.iter().any(|&a| a >= n) {
                return Err(StructureError::Invalid(format!(
                    "function `{}` argument ({}) out of range",
                    decl.name,
                    show()
                ))
                .into());
            }
            if let Some(old) = table.insert(args.clone(), *v) {
                if old != *v {
                    return Err(StructureError::Invalid(format!(
                        "function `{}` has two values at ({})",
                        decl.name,
                        show()
                    ))
                    .into());
                }
            }
        }
        let mut values = Vec::new();
        for args in tuples(n, decl.arity) {
            match table.get(&args) {
                Some(&v) => values.push(v),
                None => {
                    return Err(StructureError::FunctionPartial {
                        name: decl.name.clone(),
                        args: args.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
                    }
                    .into())
                }
            }
        }
        functions.push(values);
    }
    let constants = sig
        .constants()
        .iter()
        .map(|c| {
            raw.constant_values
                .get(c)
                .copied()
                .ok_or_else(|| StructureError::ConstantMissing(c.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let choice = match raw.choice.as_ref().unwrap_or(&RawChoice::Min) {
        RawChoice::Min => ChoiceRule::Min { empty: raw.choice_empty.unwrap_or(0) },
        RawChoice::Table(entries) => {
            if n > super::structure::MAX_TABLE_CARRIER {
                return Err(StructureError::ChoiceTableTooLarge.into());
            }
            let mut values: Vec<Option<Elem>> = vec![None; 1 << n];
            for &(set, v) in entries {
                if !set.is_subset(ElemSet::full(n)) {
                    return Err(StructureError::Invalid(format!("choice table set {set} out of range")).into());
                }
                if let Some(old) = values[set.0 as usize].replace(v) {
                    if old != v {
                        return Err(StructureError::Invalid(format!("choice table lists {set} twice")).into());
                    }
                }
            }
            match (values[0], raw.choice_empty) {
                (Some(a), Some(b)) if a != b => {
                    return Err(StructureError::Invalid(
                        "choice-empty disagrees with the table entry for {}".into(),
                    )
                    .into())
                }
                (None, e) => values[0] = Some(e.unwrap_or(0)),
                _ => {}
            }
            let mut total = Vec::with_capacity(values.len());
            for (mask, v) in values.into_iter().enumerate() {
                total.push(v.ok_or(StructureError::ChoiceTablePartial(ElemSet(mask as u64)))?);
            }
            ChoiceRule::Table(total)
        }
    };
    Ok(ChoiceStructure::new(sig, n, relations, functions, constants, choice)?)
}

/// Parses and validates a structure file.
pub fn parse_structure(text: &str) -> Result<ChoiceStructure, FileError> {
    validate_structure(&RawStructure::parse(text)?)
}

/// Renders a structure in the file format; `parse_structure` reads it back
/// to an identical structure.
pub fn write_structure(m: &ChoiceStructure) -> String {
    let sig = m.signature();
    let mut out = String::new();
    out.push_str("signature\n");
    for d in sig.relations() {
        let _ = writeln!(out, "rel {} {}", d.name, d.arity);
    }
    for d in sig.functions() {
        let _ = writeln!(out, "fun {} {}", d.name, d.arity);
    }
    for c in sig.constants() {
        let _ = writeln!(out, "const {c}");
    }
    out.push_str("end\n");
    let _ = writeln!(out, "carrier {}", m.size());
    for r in sig.relation_ids() {
        let _ = writeln!(out, "rel {}", sig.relation(r).name);
        for t in m.relation_tuples(r) {
            let row: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out.push_str("end\n");
    }
    for f in sig.function_ids() {
        let decl = sig.function(f);
        let _ = writeln!(out, "fun {}", decl.name);
        for (args, v) in tuples(m.size(), decl.arity).zip(m.function_table(f)) {
            let row: Vec<String> = args.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{} -> {}", row.join(" "), v);
        }
        out.push_str("end\n");
    }
    for c in sig.constant_ids() {
        let _ = writeln!(out, "const {} {}", sig.constant(c), m.constant(c));
    }
    match m.choice().as_min(m.size()) {
        Some(empty) => {
            out.push_str("choice min\n");
            let _ = writeln!(out, "choice-empty {empty}");
        }
        None => {
            out.push_str("choice table\n");
            for s in ElemSet::all_subsets(m.size()) {
                let _ = writeln!(out, "{} -> {}", s, m.choose(s));
            }
            out.push_str("end\n");
        }
    }
    out
}
