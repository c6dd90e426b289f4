//! Fragment-bounded h-inductive theories of a structure, the Kaiser hull
//! and universal companion over the pc members, and companionship of two
//! theories.

use crate::logic::ast::{HInductiveSentence, PositiveFormula, Theory};
use crate::logic::fragment::{ConjFormula, FormulaFragment, FragmentContext, SatTable};
use crate::structures::{FiniteStructure, Signature};
use std::sync::Arc;

use super::classify::pc_members;
use super::enumerate::{enumerate_models, ModelUniverse};
use super::{AnalysisError, SearchBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SentenceKind {
    HUniversal,
    HInductive,
}

/// One candidate sentence: premise row (None means truth), conclusion row
/// (None means falsity), over the context's conjunction list.
type Candidate = (Option<usize>, Option<usize>);

fn candidates(kind: SentenceKind, conjs: &[ConjFormula]) -> Vec<Candidate> {
    let mut out = Vec::new();
    match kind {
        SentenceKind::HUniversal => {
            for p in 0..conjs.len() {
                out.push((Some(p), None));
            }
        }
        SentenceKind::HInductive => {
            let mut premises: Vec<Option<usize>> = vec![None];
            premises.extend(
                conjs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.bound_used == 0)
                    .map(|(i, _)| Some(i)),
            );
            for p in premises {
                for c in 0..conjs.len() {
                    out.push((p, Some(c)));
                }
                out.push((p, None));
            }
        }
    }
    out
}

fn holds_in(sat: &SatTable, cand: Candidate) -> bool {
    match cand {
        (None, None) => false,
        (None, Some(c)) => sat.is_full(c),
        (Some(p), None) => sat.is_empty(p),
        (Some(p), Some(c)) => sat.subset(p, c),
    }
}

fn build_sentence(
    ctx: &FragmentContext,
    conjs: &[ConjFormula],
    cand: Candidate,
) -> HInductiveSentence {
    let premise = match cand.0 {
        None => PositiveFormula::Truth,
        Some(p) => ctx.conj_to_formula(&conjs[p]),
    };
    let conclusion = match cand.1 {
        None => PositiveFormula::Falsity,
        Some(c) => ctx.conj_to_formula(&conjs[c]),
    };
    let vars = (1..=ctx.frag().max_free).map(|i| format!("x{i}")).collect();
    HInductiveSentence { vars, premise, conclusion }
}

/// Signature extended with one fresh parameter constant per element, and
/// the structure reinterpreted over it.
fn with_parameters(m: &FiniteStructure) -> Result<FiniteStructure, AnalysisError> {
    let sig = m.sig();
    let mut constants = sig.constants().to_vec();
    constants.extend((0..m.size()).map(|i| format!("p{i}")));
    let ext = Arc::new(Signature::new(sig.relations().to_vec(), constants)?);
    let mut const_vals = m.const_vals().to_vec();
    const_vals.extend(0..m.size());
    Ok(FiniteStructure::new(
        ext,
        m.size(),
        m.tables().to_vec(),
        const_vals,
    )?)
}

/// The sentences of the fragment, of the given kind, true in `m`. With
/// parameters the signature gains a constant p{i} naming each element, so
/// the result plays the role of a bounded positive diagram.
pub fn theory_of(
    m: &FiniteStructure,
    frag: FormulaFragment,
    kind: SentenceKind,
    with_params: bool,
) -> Result<Vec<HInductiveSentence>, AnalysisError> {
    let m_ext;
    let m = if with_params {
        m_ext = with_parameters(m)?;
        &m_ext
    } else {
        m
    };
    let ctx = FragmentContext::new(m.sig().clone(), frag);
    let conjs = ctx.conjunctions();
    let sat = ctx.sat_table(m);
    Ok(candidates(kind, &conjs)
        .into_iter()
        .filter(|&cand| holds_in(&sat, cand))
        .map(|cand| build_sentence(&ctx, &conjs, cand))
        .collect())
}

fn over_pc_members(
    u: &ModelUniverse,
    frag: FormulaFragment,
    kind: SentenceKind,
) -> Result<Vec<HInductiveSentence>, AnalysisError> {
    let pc = pc_members(u);
    if pc.is_empty() {
        return Err(AnalysisError::EmptyPcSet { bound: u.bound() });
    }
    let ctx = FragmentContext::new(u.theory().sig.clone(), frag);
    let conjs = ctx.conjunctions();
    let sats: Vec<SatTable> =
        pc.iter().map(|&i| ctx.sat_table(&u.members()[i])).collect();
    Ok(candidates(kind, &conjs)
        .into_iter()
        .filter(|&cand| sats.iter().all(|sat| holds_in(sat, cand)))
        .map(|cand| build_sentence(&ctx, &conjs, cand))
        .collect())
}

/// Fragment sentences true in every pc member: the bounded Kaiser hull.
pub fn kaiser_hull(
    u: &ModelUniverse,
    frag: FormulaFragment,
) -> Result<Vec<HInductiveSentence>, AnalysisError> {
    over_pc_members(u, frag, SentenceKind::HInductive)
}

/// The h-universal part of the bounded Kaiser hull.
pub fn universal_companion(
    u: &ModelUniverse,
    frag: FormulaFragment,
) -> Result<Vec<HInductiveSentence>, AnalysisError> {
    over_pc_members(u, frag, SentenceKind::HUniversal)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompanionVerdict {
    EquivalentWithin(usize),
    /// Pc members of one theory with no isomorphic pc member of the other.
    Differs {
        left_only: Vec<FiniteStructure>,
        right_only: Vec<FiniteStructure>,
    },
}

impl CompanionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CompanionVerdict::EquivalentWithin(_))
    }
}

/// Companions share their pc models. The bounded check compares the pc
/// members of the two universes up to isomorphism.
pub fn companion_check(
    t1: &Theory,
    t2: &Theory,
    bound: usize,
    budget: &SearchBudget,
) -> Result<CompanionVerdict, AnalysisError> {
    if t1.sig.as_ref() != t2.sig.as_ref() {
        return Err(AnalysisError::SignatureMismatch);
    }
    let u1 = enumerate_models(t1, bound, budget)?;
    let u2 = enumerate_models(t2, bound, budget)?;
    let keys = |u: &ModelUniverse| -> Vec<Vec<u8>> {
        pc_members(u).iter().map(|&i| u.canonical_key(i).to_vec()).collect()
    };
    let (k1, k2) = (keys(&u1), keys(&u2));
    let left_only: Vec<FiniteStructure> = pc_members(&u1)
        .iter()
        .filter(|&&i| !k2.contains(&u1.canonical_key(i).to_vec()))
        .map(|&i| u1.members()[i].clone())
        .collect();
    let right_only: Vec<FiniteStructure> = pc_members(&u2)
        .iter()
        .filter(|&&i| !k1.contains(&u2.canonical_key(i).to_vec()))
        .map(|&i| u2.members()[i].clone())
        .collect();
    if left_only.is_empty() && right_only.is_empty() {
        Ok(CompanionVerdict::EquivalentWithin(bound))
    } else {
        Ok(CompanionVerdict::Differs { left_only, right_only })
    }
}
