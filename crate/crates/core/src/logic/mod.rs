//! Formulas of linear temporal logic over nonempty finite words, their
//! interning, parsing, direct word semantics, and the propositional
//! canonicalization that identifies automaton states.

pub mod ast;
mod eval;
mod parse;
pub mod skeleton;
pub mod trace;

pub use ast::{BinOp, FormulaId, FormulaNode, FormulaText};
pub use skeleton::PropKey;
pub use trace::{all_assignments, all_traces, Assignment, Trace};
