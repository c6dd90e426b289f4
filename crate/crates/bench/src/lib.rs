//! Shared inputs for the criterion benches.

use posmod_core::corpus::{corpus_cycles, CycleVariant};
use posmod_core::logic::ast::Theory;
use posmod_core::structures::{cycle, disjoint_sum, FiniteStructure};

pub fn t4_theory() -> Theory {
    corpus_cycles(CycleVariant::Tn(4), 5).unwrap().theory
}

/// C3 + C3 + C3: enough symmetry to make homomorphism search and
/// canonicalization sweat.
pub fn triple_c3() -> FiniteStructure {
    let c3 = cycle(3);
    let six = disjoint_sum(&c3, &c3).unwrap();
    disjoint_sum(&six, &c3).unwrap()
}
