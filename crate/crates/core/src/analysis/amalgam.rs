//! Amalgamation over a bounded universe: bases, the asymmetric form over
//! an immersion, and joint continuation (completeness).

use crate::logic::eval::satisfies;
use crate::morphisms::{
    find_homomorphisms, is_immersion, verify_homomorphism, Homomorphism, ImmersionMode,
    MorphismError,
};
use crate::structures::FiniteStructure;

use super::{AnalysisError, ModelUniverse};

/// First homomorphism under the pins, treating contradictory pins as an
/// ordinary "no map" outcome rather than an error.
fn pinned_hom(
    a: &FiniteStructure,
    b: &FiniteStructure,
    pins: &[(usize, usize)],
) -> Result<Option<Homomorphism>, AnalysisError> {
    match find_homomorphisms(a, b, pins, Some(1)) {
        Ok(v) => Ok(v.into_iter().next()),
        Err(MorphismError::InconsistentPins { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn check_is_model(a: &FiniteStructure, u: &ModelUniverse) -> Result<(), AnalysisError> {
    match satisfies(a, u.theory())? {
        crate::logic::eval::Satisfaction::Holds => Ok(()),
        crate::logic::eval::Satisfaction::Fails { label, .. } => {
            Err(AnalysisError::NotAModel { label })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmalgamVerdict {
    HoldsWithin(usize),
    Fails(AmalgamFailure),
}

/// A span over the base that no member closes: homomorphisms into the two
/// listed members admitting no commuting pair into any third member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamFailure {
    pub left: usize,
    pub right: usize,
    pub into_left: Homomorphism,
    pub into_right: Homomorphism,
}

impl AmalgamVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, AmalgamVerdict::HoldsWithin(_))
    }
}

/// Can a given span f: A -> B, g: A -> C be completed inside the universe?
/// Scans members D in order, homomorphisms f': B -> D in lexicographic
/// order, then asks for g': C -> D pinned so that g' . g = f' . f.
fn complete_span(
    a: &FiniteStructure,
    b: &FiniteStructure,
    c: &FiniteStructure,
    f: &Homomorphism,
    g: &Homomorphism,
    u: &ModelUniverse,
) -> Result<Option<(usize, Homomorphism, Homomorphism)>, AnalysisError> {
    for (di, d) in u.members().iter().enumerate() {
        let fs = find_homomorphisms(b, d, &[], None)?;
        for fp in fs {
            let pins: Vec<(usize, usize)> =
                (0..a.size()).map(|x| (g.map[x], fp.map[f.map[x]])).collect();
            if let Some(gp) = pinned_hom(c, d, &pins)? {
                return Ok(Some((di, fp, gp)));
            }
        }
    }
    Ok(None)
}

/// A model is an amalgamation basis within the universe iff every span of
/// homomorphisms from it into two members can be closed by a third member.
pub fn is_amalgamation_basis(
    a: &FiniteStructure,
    u: &ModelUniverse,
) -> Result<AmalgamVerdict, AnalysisError> {
    check_is_model(a, u)?;
    for (bi, b) in u.members().iter().enumerate() {
        let homs_b = find_homomorphisms(a, b, &[], None)?;
        if homs_b.is_empty() {
            continue;
        }
        for (ci, c) in u.members().iter().enumerate() {
            let homs_c = find_homomorphisms(a, c, &[], None)?;
            for f in &homs_b {
                for g in &homs_c {
                    if complete_span(a, b, c, f, g, u)?.is_none() {
                        return Ok(AmalgamVerdict::Fails(AmalgamFailure {
                            left: bi,
                            right: ci,
                            into_left: f.clone(),
                            into_right: g.clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(AmalgamVerdict::HoldsWithin(u.bound()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsymmetricAmalgam {
    Found {
        member: usize,
        /// B -> D.
        left: Homomorphism,
        /// C -> D, an immersion.
        right: Homomorphism,
    },
    NotFoundWithin(usize),
}

/// Asymmetric amalgamation: given an immersion i: A -> B and a
/// homomorphism f: A -> C, find a member D, a homomorphism g: B -> D and
/// an immersion j: C -> D with g . i = j . f. The immersion precondition
/// on `i` is checked and is an error when it fails; the theorem offers
/// nothing without it.
pub fn asymmetric_amalgam(
    a: &FiniteStructure,
    b: &FiniteStructure,
    c: &FiniteStructure,
    i: &Homomorphism,
    f: &Homomorphism,
    u: &ModelUniverse,
) -> Result<AsymmetricAmalgam, AnalysisError> {
    verify_homomorphism(a, b, &i.map)?;
    verify_homomorphism(a, c, &f.map)?;
    if !is_immersion(a, b, i, ImmersionMode::Retraction)?.holds() {
        return Err(MorphismError::NotAnImmersion.into());
    }
    for (di, d) in u.members().iter().enumerate() {
        for j in find_homomorphisms(c, d, &[], None)? {
            if !is_immersion(c, d, &j, ImmersionMode::Retraction)?.holds() {
                continue;
            }
            let pins: Vec<(usize, usize)> =
                (0..a.size()).map(|x| (i.map[x], j.map[f.map[x]])).collect();
            if let Some(g) = pinned_hom(b, d, &pins)? {
                return Ok(AsymmetricAmalgam::Found { member: di, left: g, right: j });
            }
        }
    }
    Ok(AsymmetricAmalgam::NotFoundWithin(u.bound()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompleteVerdict {
    HoldsWithin(usize),
    /// Two members with no joint continuation inside the universe.
    Fails { left: usize, right: usize },
}

impl CompleteVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CompleteVerdict::HoldsWithin(_))
    }
}

/// A bounded stand-in for completeness: every two members map into some
/// common member.
pub fn is_complete(u: &ModelUniverse) -> Result<CompleteVerdict, AnalysisError> {
    let n = u.members().len();
    for bi in 0..n {
        for ci in bi..n {
            let b = &u.members()[bi];
            let c = &u.members()[ci];
            let mut joined = false;
            for d in u.members() {
                if !find_homomorphisms(b, d, &[], Some(1))?.is_empty()
                    && !find_homomorphisms(c, d, &[], Some(1))?.is_empty()
                {
                    joined = true;
                    break;
                }
            }
            if !joined {
                return Ok(CompleteVerdict::Fails { left: bi, right: ci });
            }
        }
    }
    Ok(CompleteVerdict::HoldsWithin(u.bound()))
}
