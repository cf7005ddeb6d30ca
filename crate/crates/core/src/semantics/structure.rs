use thiserror::Error;

use super::set::{Elem, ElemSet, MAX_CARRIER};
use crate::syntax::{ConstId, FunId, RelId, Signature};

/// Largest carrier for which an explicit choice table (one entry per
/// subset) is accepted.
pub const MAX_TABLE_CARRIER: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("carrier size must be between 1 and {MAX_CARRIER}, got {0}")]
    CarrierSize(usize),
    #[error("function table partial: `{name}` has no value at ({args})")]
    FunctionPartial { name: String, args: String },
    #[error("function `{name}` maps ({args}) to {value}, outside the carrier")]
    FunctionOutOfRange { name: String, args: String, value: Elem },
    #[error("relation `{name}` tuple ({tuple}) out of range")]
    RelationOutOfRange { name: String, tuple: String },
    #[error("tuple ({tuple}) for `{name}` has wrong length, expected {arity}")]
    TupleArity { name: String, tuple: String, arity: usize },
    #[error("constant `{name}` has value {value}, outside the carrier")]
    ConstantOutOfRange { name: String, value: Elem },
    #[error("constant `{0}` has no value")]
    ConstantMissing(String),
    #[error("choice not in set: choice({set}) = {value}")]
    ChoiceNotInSet { set: ElemSet, value: Elem },
    #[error("choice of the empty set is {0}, outside the carrier")]
    ChoiceEmptyOutOfRange(Elem),
    #[error("explicit choice table not total: no entry for {0}")]
    ChoiceTablePartial(ElemSet),
    #[error("explicit choice tables need a carrier of at most {MAX_TABLE_CARRIER} elements")]
    ChoiceTableTooLarge,
    #[error("{0}")]
    Invalid(String),
}

/// The choice function of a choice structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceRule {
    /// Least element; the empty set goes to `empty`.
    Min { empty: Elem },
    /// One entry per subset, indexed by its mask.
    Table(Vec<Elem>),
}

impl ChoiceRule {
    pub fn choose(&self, set: ElemSet) -> Elem {
        match self {
            ChoiceRule::Min { empty } => set.min().unwrap_or(*empty),
            ChoiceRule::Table(values) => values[set.0 as usize],
        }
    }

    pub fn empty_value(&self) -> Elem {
        self.choose(ElemSet::EMPTY)
    }

    /// The minimum rule this table coincides with, if any.
    pub fn as_min(&self, n: usize) -> Option<Elem> {
        match self {
            ChoiceRule::Min { empty } => Some(*empty),
            ChoiceRule::Table(values) => {
                let empty = values[0];
                ElemSet::all_subsets(n)
                    .skip(1)
                    .all(|s| s.min() == Some(values[s.0 as usize]))
                    .then_some(empty)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RelTable {
    pub arity: usize,
    pub bits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FunTable {
    pub arity: usize,
    pub values: Vec<Elem>,
}

/// A finite structure paired with a choice function on its power set.
/// Immutable once validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceStructure {
    sig: Signature,
    size: usize,
    relations: Vec<RelTable>,
    functions: Vec<FunTable>,
    constants: Vec<Elem>,
    choice: ChoiceRule,
}

/// Row-major index of an argument tuple.
pub(crate) fn tuple_index(n: usize, args: &[Elem]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Enumerates `{0..n}^arity` in row-major order.
pub fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

fn show_tuple(t: &[Elem]) -> String {
    t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

impl ChoiceStructure {
    /// Builds and validates a structure. `relations[i]` lists the tuples of
    /// relation `i`; `functions[i]` is the row-major table of function `i`.
    pub fn new(
        sig: Signature,
        size: usize,
        relations: Vec<Vec<Vec<Elem>>>,
        functions: Vec<Vec<Elem>>,
        constants: Vec<Elem>,
        choice: ChoiceRule,
    ) -> Result<Self, StructureError> {
        if size == 0 || size > MAX_CARRIER {
            return Err(StructureError::CarrierSize(size));
        }
        if relations.len() != sig.relations().len()
            || functions.len() != sig.functions().len()
            || constants.len() != sig.constants().len()
        {
            return Err(StructureError::Invalid("tables do not match the signature".into()));
        }
        let mut rels = Vec::new();
        for (decl, tuples) in sig.relations().iter().zip(relations) {
            let mut bits = vec![false; size.pow(decl.arity as u32)];
            for t in tuples {
                if t.len() != decl.arity {
                    return Err(StructureError::TupleArity {
                        name: decl.name.clone(),
                        tuple: show_tuple(&t),
                        arity: decl.arity,
                    });
                }
                if t.iter().any(|&e| e >= size) {
                    return Err(StructureError::RelationOutOfRange {
                        name: decl.name.clone(),
                        tuple: show_tuple(&t),
                    });
                }
                bits[tuple_index(size, &t)] = true;
            }
            rels.push(RelTable { arity: decl.arity, bits });
        }
        let mut funs = Vec::new();
        for (decl, values) in sig.functions().iter().zip(functions) {
            let expected = size.pow(decl.arity as u32);
            if values.len() != expected {
                let missing = tuples(size, decl.arity).nth(values.len()).unwrap_or_default();
                return Err(StructureError::FunctionPartial {
                    name: decl.name.clone(),
                    args: show_tuple(&missing),
                });
            }
            for (args, &v) in tuples(size, decl.arity).zip(&values) {
                if v >= size {
                    return Err(StructureError::FunctionOutOfRange {
                        name: decl.name.clone(),
                        args: show_tuple(&args),
                        value: v,
                    });
                }
            }
            funs.push(FunTable { arity: decl.arity, values });
        }
        for (name, &v) in sig.constants().iter().zip(&constants) {
            if v >= size {
                return Err(StructureError::ConstantOutOfRange { name: name.clone(), value: v });
            }
        }
        validate_choice(size, &choice)?;
        Ok(ChoiceStructure { sig, size, relations: rels, functions: funs, constants, choice })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn carrier(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    pub fn choice(&self) -> &ChoiceRule {
        &self.choice
    }

    pub fn choose(&self, set: ElemSet) -> Elem {
        self.choice.choose(set)
    }

    pub fn holds(&self, r: RelId, args: &[Elem]) -> bool {
        self.relations[r.0 as usize].bits[tuple_index(self.size, args)]
    }

    pub fn apply(&self, f: FunId, args: &[Elem]) -> Elem {
        self.functions[f.0 as usize].values[tuple_index(self.size, args)]
    }

    pub fn constant(&self, c: ConstId) -> Elem {
        self.constants[c.0 as usize]
    }

    /// Tuples of a relation, row-major.
    pub fn relation_tuples(&self, r: RelId) -> Vec<Vec<Elem>> {
        let table = &self.relations[r.0 as usize];
        tuples(self.size, table.arity).filter(|t| table.bits[tuple_index(self.size, t)]).collect()
    }

    pub fn function_table(&self, f: FunId) -> &[Elem] {
        &self.functions[f.0 as usize].values
    }

    /// Returns a copy with a different choice function.
    pub fn with_choice(&self, choice: ChoiceRule) -> Result<Self, StructureError> {
        validate_choice(self.size, &choice)?;
        Ok(ChoiceStructure { choice, ..self.clone() })
    }
}

fn validate_choice(size: usize, choice: &ChoiceRule) -> Result<(), StructureError> {
    match choice {
        ChoiceRule::Min { empty } => {
            if *empty >= size {
                return Err(StructureError::ChoiceEmptyOutOfRange(*empty));
            }
        }
        ChoiceRule::Table(values) => {
            if size > MAX_TABLE_CARRIER {
                return Err(StructureError::ChoiceTableTooLarge);
            }
            if values.len() != 1 << size {
                let missing = ElemSet(values.len() as u64);
                return Err(StructureError::ChoiceTablePartial(missing));
            }
            if values[0] >= size {
                return Err(StructureError::ChoiceEmptyOutOfRange(values[0]));
            }
            for s in ElemSet::all_subsets(size).skip(1) {
                let v = values[s.0 as usize];
                if !s.contains(v) {
                    return Err(StructureError::ChoiceNotInSet { set: s, value: v });
                }
            }
        }
    }
    Ok(())
}
