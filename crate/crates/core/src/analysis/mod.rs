//! Bounded model enumeration and the class-level decision procedures.
//!
//! Everything here has within-universe semantics: the textbook notions
//! quantify over all models of a theory, these procedures quantify over
//! models up to a size bound and say so in every verdict.

pub mod amalgam;
pub mod classify;
pub mod companions;
pub mod ctr;
pub mod enumerate;
pub mod persist;
pub mod robinson;

pub use amalgam::{asymmetric_amalgam, is_amalgamation_basis, is_complete};
pub use classify::{h_maximal_members, is_h_maximal, is_pc, pc_continuation, pc_members};
pub use companions::{companion_check, kaiser_hull, theory_of, universal_companion, SentenceKind};
pub use ctr::{ctr, CtrOptions, CtrReport};
pub use enumerate::{enumerate_models, naive_enumerate, ModelUniverse};
pub use persist::{load_universe, save_universe, theory_hash, PersistError};
pub use robinson::{check_robinson, qe_check, RobinsonScope};

use crate::logic::eval::EvalError;
use crate::logic::parse::ParseError;
use crate::morphisms::MorphismError;
use crate::structures::StructureError;

/// Resource limits for the model search. Exceeding a budget is a hard
/// error carrying a partial-result marker, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Total ground-atom assignments (decisions plus propagations) across
    /// one enumerate_models call.
    pub max_atom_assignments: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_atom_assignments: 2_000_000_000 }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("search budget exceeded after {spent} atom assignments (limit {limit})")]
    BudgetExceeded { spent: u64, limit: u64 },
    #[error("structure is not a model of the theory: axiom {label} fails")]
    NotAModel { label: String },
    #[error("no pc member within bound {bound}: result would be vacuous")]
    EmptyPcSet { bound: usize },
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("formula uses free variable {var}, outside the fragment's x1..x{max}")]
    FreeVarOutOfRange { var: String, max: usize },
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
