//! Positively-closed and h-maximal classification of universe members.

use rayon::prelude::*;

use crate::logic::ast::PositiveFormula;
use crate::logic::eval::satisfies;
use crate::morphisms::{
    for_each_homomorphism, is_embedding, is_immersion, EmbeddingCheck, EmbeddingFailure,
    Homomorphism, ImmersionCheck, ImmersionMode,
};
use crate::structures::FiniteStructure;

use super::{AnalysisError, ModelUniverse};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcVerdict {
    HoldsWithin(usize),
    Fails(PcFailure),
}

/// A homomorphism into a member that is not an immersion, with the
/// distinguishing positive formula (true of the image tuple in the member,
/// false of the source tuple).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcFailure {
    pub member: usize,
    pub hom: Homomorphism,
    pub formula: PositiveFormula,
    pub source_tuple: Vec<usize>,
}

impl PcVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PcVerdict::HoldsWithin(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HMaxVerdict {
    HoldsWithin(usize),
    Fails(HMaxFailure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HMaxFailure {
    pub member: usize,
    pub hom: Homomorphism,
    pub failure: EmbeddingFailure,
}

impl HMaxVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, HMaxVerdict::HoldsWithin(_))
    }
}

fn check_is_model(a: &FiniteStructure, u: &ModelUniverse) -> Result<(), AnalysisError> {
    match satisfies(a, u.theory())? {
        s if s.holds() => Ok(()),
        crate::logic::eval::Satisfaction::Fails { label, .. } => {
            Err(AnalysisError::NotAModel { label })
        }
        _ => unreachable!(),
    }
}

/// The lexicographically least non-immersion homomorphism from `a` into a
/// member, scanning members in order.
fn first_non_immersion(
    a: &FiniteStructure,
    u: &ModelUniverse,
) -> Result<Option<(usize, Homomorphism)>, AnalysisError> {
    for (i, b) in u.members().iter().enumerate() {
        let mut found: Option<Homomorphism> = None;
        let mut inner_err = None;
        for_each_homomorphism(a, b, &[], &mut |map| {
            let f = Homomorphism { map: map.to_vec() };
            match is_immersion(a, b, &f, ImmersionMode::Retraction) {
                Ok(ImmersionCheck::Holds { .. }) => true,
                Ok(ImmersionCheck::Fails { .. }) => {
                    found = Some(f);
                    false
                }
                Err(e) => {
                    inner_err = Some(e);
                    false
                }
            }
        })?;
        if let Some(e) = inner_err {
            return Err(e.into());
        }
        if let Some(f) = found {
            return Ok(Some((i, f)));
        }
    }
    Ok(None)
}

/// A model is positively closed within the universe iff every homomorphism
/// from it into a member is an immersion.
pub fn is_pc(a: &FiniteStructure, u: &ModelUniverse) -> Result<PcVerdict, AnalysisError> {
    check_is_model(a, u)?;
    match first_non_immersion(a, u)? {
        None => Ok(PcVerdict::HoldsWithin(u.bound())),
        Some((member, hom)) => {
            let b = &u.members()[member];
            match is_immersion(a, b, &hom, ImmersionMode::Retraction)? {
                ImmersionCheck::Fails { formula, source_tuple } => {
                    Ok(PcVerdict::Fails(PcFailure { member, hom, formula, source_tuple }))
                }
                ImmersionCheck::Holds { .. } => unreachable!(),
            }
        }
    }
}

/// A model is h-maximal within the universe iff every homomorphism from it
/// into a member is an embedding.
pub fn is_h_maximal(
    a: &FiniteStructure,
    u: &ModelUniverse,
) -> Result<HMaxVerdict, AnalysisError> {
    check_is_model(a, u)?;
    for (i, b) in u.members().iter().enumerate() {
        let mut failure: Option<(Homomorphism, EmbeddingFailure)> = None;
        let mut inner_err = None;
        for_each_homomorphism(a, b, &[], &mut |map| {
            let f = Homomorphism { map: map.to_vec() };
            match is_embedding(a, b, &f) {
                Ok(EmbeddingCheck::Holds) => true,
                Ok(EmbeddingCheck::Fails(w)) => {
                    failure = Some((f, w));
                    false
                }
                Err(e) => {
                    inner_err = Some(e);
                    false
                }
            }
        })?;
        if let Some(e) = inner_err {
            return Err(e.into());
        }
        if let Some((hom, w)) = failure {
            return Ok(HMaxVerdict::Fails(HMaxFailure { member: i, hom, failure: w }));
        }
    }
    Ok(HMaxVerdict::HoldsWithin(u.bound()))
}

/// Per-member pc flags, computed once and cached on the universe.
pub fn pc_flags(u: &ModelUniverse) -> &[bool] {
    u.pc_flags_cache.get_or_init(|| {
        u.members()
            .par_iter()
            .map(|m| matches!(first_non_immersion(m, u), Ok(None)))
            .collect()
    })
}

/// Per-member h-maximality flags, computed once and cached.
pub fn hmax_flags(u: &ModelUniverse) -> &[bool] {
    u.hmax_flags_cache.get_or_init(|| {
        u.members()
            .par_iter()
            .map(|m| {
                matches!(is_h_maximal(m, u), Ok(HMaxVerdict::HoldsWithin(_)))
            })
            .collect()
    })
}

/// Indices of the pc members, in member order.
pub fn pc_members(u: &ModelUniverse) -> Vec<usize> {
    pc_flags(u)
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| if f { Some(i) } else { None })
        .collect()
}

/// Indices of the h-maximal members, in member order.
pub fn h_maximal_members(u: &ModelUniverse) -> Vec<usize> {
    hmax_flags(u)
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| if f { Some(i) } else { None })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Continuation {
    Found { member: usize, hom: Homomorphism },
    NotFoundWithin(usize),
}

/// A homomorphism from `a` into some pc member, if one exists within the
/// universe. The true pc continuation may exceed the bound.
pub fn pc_continuation(
    a: &FiniteStructure,
    u: &ModelUniverse,
) -> Result<Continuation, AnalysisError> {
    check_is_model(a, u)?;
    for i in pc_members(u) {
        let homs =
            crate::morphisms::find_homomorphisms(a, &u.members()[i], &[], Some(1))?;
        if let Some(hom) = homs.into_iter().next() {
            return Ok(Continuation::Found { member: i, hom });
        }
    }
    Ok(Continuation::NotFoundWithin(u.bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate::enumerate_models;
    use crate::analysis::SearchBudget;
    use crate::corpus::{corpus_cycles, CycleVariant};
    use crate::logic::eval::{eval, Assignment};
    use crate::structures::{chain, cycle, edgeless};

    fn t4_universe(bound: usize) -> ModelUniverse {
        let t = corpus_cycles(CycleVariant::Tn(4), bound).unwrap().theory;
        enumerate_models(&t, bound, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn c3_is_the_unique_pc_member_of_t4_at_bound_4() {
        let u = t4_universe(4);
        let pc = pc_members(&u);
        assert_eq!(pc.len(), 1);
        assert_eq!(u.find_isomorphic(&cycle(3)), Some(pc[0]));
    }

    #[test]
    fn chain_is_not_pc() {
        let u = t4_universe(4);
        match is_pc(&chain(2), &u).unwrap() {
            PcVerdict::Fails(w) => {
                // The distinguishing formula holds at the image, not the
                // source.
                let b = &u.members()[w.member];
                let asg_b: Assignment = (1..=w.source_tuple.len())
                    .map(|i| (format!("x{i}"), w.hom.map[w.source_tuple[i - 1]]))
                    .collect();
                let asg_a: Assignment = (1..=w.source_tuple.len())
                    .map(|i| (format!("x{i}"), w.source_tuple[i - 1]))
                    .collect();
                assert!(eval(b, &w.formula, &asg_b).unwrap());
                assert!(!eval(&chain(2), &w.formula, &asg_a).unwrap());
            }
            PcVerdict::HoldsWithin(_) => panic!("2-chain maps into C3 non-immersively"),
        }
    }

    #[test]
    fn pc_implies_h_maximal() {
        let u = t4_universe(4);
        let pc = pc_members(&u);
        let hm = h_maximal_members(&u);
        for i in pc {
            assert!(hm.contains(&i));
        }
    }

    #[test]
    fn two_isolated_points_not_h_maximal() {
        let t = corpus_cycles(CycleVariant::Tprime, 4).unwrap().theory;
        let u = enumerate_models(&t, 4, &SearchBudget::default()).unwrap();
        match is_h_maximal(&edgeless(2), &u).unwrap() {
            HMaxVerdict::Fails(w) => {
                assert!(matches!(w.failure, EmbeddingFailure::Merged { .. }));
            }
            HMaxVerdict::HoldsWithin(_) => panic!("merge map exists"),
        }
    }

    #[test]
    fn h_maximal_members_at_bound_4() {
        let u = t4_universe(4);
        let hm = h_maximal_members(&u);
        let c3 = u.find_isomorphic(&cycle(3)).unwrap();
        let chain2 = u.find_isomorphic(&chain(2)).unwrap();
        let singleton = u.find_isomorphic(&edgeless(1)).unwrap();
        let points = u.find_isomorphic(&edgeless(2)).unwrap();
        assert!(hm.contains(&c3));
        assert!(hm.contains(&chain2));
        assert!(hm.contains(&singleton));
        assert!(!hm.contains(&points));
    }

    #[test]
    fn pc_continuation_of_chain_reaches_c3() {
        let u = t4_universe(4);
        match pc_continuation(&chain(2), &u).unwrap() {
            Continuation::Found { member, hom } => {
                assert_eq!(u.find_isomorphic(&cycle(3)), Some(member));
                // Lexicographically least of the three edge maps.
                let all = crate::morphisms::find_homomorphisms(
                    &chain(2),
                    &u.members()[member],
                    &[],
                    None,
                )
                .unwrap();
                assert_eq!(all.len(), 3);
                assert_eq!(hom, all[0]);
            }
            Continuation::NotFoundWithin(_) => panic!(),
        }
    }

    #[test]
    fn singleton_continues_into_c3() {
        let u = t4_universe(4);
        match pc_continuation(&edgeless(1), &u).unwrap() {
            Continuation::Found { member, .. } => {
                assert_eq!(u.find_isomorphic(&cycle(3)), Some(member));
            }
            Continuation::NotFoundWithin(_) => panic!(),
        }
    }

    #[test]
    fn non_model_is_rejected() {
        let u = t4_universe(3);
        assert!(matches!(
            is_pc(&cycle(4), &u),
            Err(AnalysisError::NotAModel { .. })
        ));
    }

    #[test]
    fn monotone_refinement_of_pc_flags() {
        // Growing the universe can only remove pc status.
        let u4 = t4_universe(4);
        let u5 = t4_universe(5);
        for (i, m) in u4.members().iter().enumerate() {
            if let Some(j) = u5.find_isomorphic(m) {
                if pc_flags(&u5)[j] {
                    assert!(pc_flags(&u4)[i], "member {i} gained pc status");
                }
            }
        }
    }
}
