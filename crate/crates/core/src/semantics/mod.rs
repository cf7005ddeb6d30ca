//! Finite choice structures, their file format, and the evaluator for
//! epsilon terms and formulas.

mod eval;
mod file;
mod set;
mod structure;

pub use eval::{assignments, eval_formula, eval_term, theory_holds, Assignment, EvalError, Evaluator};
pub use file::{parse_structure, validate_structure, write_structure, FileError, RawChoice, RawStructure};
pub use set::{Elem, ElemSet, MAX_CARRIER};
pub use structure::{tuples, ChoiceRule, ChoiceStructure, StructureError, MAX_TABLE_CARRIER};
