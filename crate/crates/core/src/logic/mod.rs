//! Continuous-logic formulas: syntax tree, DSL parser and printer, exact
//! evaluator, and builders for configuration formulas, extension axioms and
//! the distance-concentration sentence.

mod builders;
mod eval;
mod formula;
mod parser;

pub use builders::{build_conf, build_extension_axiom, build_phi_geq_half, AxiomTask};
pub use eval::{eval, eval_on_dvec, Compiled};
pub use formula::{print, Formula};
pub use parser::parse;
