//! Positive formulas, h-inductive sentences and their semantics.

pub mod ast;
pub mod eval;
pub mod fragment;
pub mod normal;
pub mod parse;

pub use ast::{HInductiveSentence, PositiveFormula, Term, Theory};
pub use eval::{eval, satisfies, tpqf, Assignment, EvalError, Satisfaction};
pub use fragment::{enumerate_fragment, ConjFormula, FormulaFragment, FragmentContext, SatTable};
pub use normal::{canonical_structure, pp_normal_form, CanonicalQuery, PPFormula};
pub use parse::{parse_formula, parse_sentence, parse_theory, serialize_theory, ParseError};
