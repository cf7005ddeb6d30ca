//! Hilbert's epsilon calculus over finite choice structures: evaluation,
//! definable sets, canonical models, and the Boolean and monadic algebras
//! induced on them.

pub mod syntax;
pub mod semantics;
pub mod corpus;
pub mod enumerate;
pub mod definability;
pub mod algebra;
pub mod canonical;
pub mod termalgebra;
