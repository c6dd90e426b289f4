//! Bounded Robinson-style type comparisons over the pc members, and a
//! quantifier-elimination check against the quantifier-free slice of a
//! fragment.

use crate::logic::ast::PositiveFormula;
use crate::logic::eval::{eval, Assignment};
use crate::logic::fragment::{FormulaFragment, FragmentContext};
use crate::morphisms::{tp_leq, tpqf_leq};

use super::classify::pc_members;
use super::enumerate::ModelUniverse;
use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobinsonScope {
    /// Compare tuples inside each pc member separately.
    Local,
    /// Compare tuples across every ordered pair of pc members.
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobinsonVerdict {
    HoldsWithin(usize),
    Fails(RobinsonFailure),
}

/// Tuples whose quantifier-free types are ordered while their full
/// positive types are not: the lexicographically least such pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobinsonFailure {
    pub left_member: usize,
    pub right_member: usize,
    pub left_tuple: Vec<usize>,
    pub right_tuple: Vec<usize>,
}

impl RobinsonVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, RobinsonVerdict::HoldsWithin(_))
    }
}

/// All length-`cap` tuples with pairwise-distinct entries over `0..n`, in
/// lexicographic order. Shorter tuples are covered by smaller caps, and
/// repeated entries reduce to the distinct support.
fn distinct_tuples(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if cap > n {
        return out;
    }
    let mut tuple = Vec::with_capacity(cap);
    fn rec(n: usize, cap: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if tuple.len() == cap {
            out.push(tuple.clone());
            return;
        }
        for v in 0..n {
            if !tuple.contains(&v) {
                tuple.push(v);
                rec(n, cap, tuple, out);
                tuple.pop();
            }
        }
    }
    rec(n, cap, &mut tuple, &mut out);
    out
}

/// Does the quantifier-free type order imply the positive type order on
/// tuples of the pc members? Checks every ordered tuple pair where the
/// quantifier-free types are comparable and demands the witnessing pinned
/// homomorphism.
pub fn check_robinson(
    u: &ModelUniverse,
    tuple_cap: usize,
    scope: RobinsonScope,
) -> Result<RobinsonVerdict, AnalysisError> {
    let pc = pc_members(u);
    if pc.is_empty() {
        return Err(AnalysisError::EmptyPcSet { bound: u.bound() });
    }
    for &ai in &pc {
        for &bi in &pc {
            if ai != bi && scope == RobinsonScope::Local {
                continue;
            }
            let a = &u.members()[ai];
            let b = &u.members()[bi];
            for ta in distinct_tuples(a.size(), tuple_cap) {
                for tb in distinct_tuples(b.size(), tuple_cap) {
                    if !tpqf_leq(a, &ta, b, &tb)?.holds() {
                        continue;
                    }
                    if !tp_leq(a, &ta, b, &tb)?.holds() {
                        return Ok(RobinsonVerdict::Fails(RobinsonFailure {
                            left_member: ai,
                            right_member: bi,
                            left_tuple: ta,
                            right_tuple: tb,
                        }));
                    }
                }
            }
        }
    }
    Ok(RobinsonVerdict::HoldsWithin(u.bound()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QeVerdict {
    /// First quantifier-free fragment formula with the same satisfaction
    /// set as the query on every pc member.
    Equivalent(PositiveFormula),
    NoQfEquivalentWithin(usize),
}

impl QeVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, QeVerdict::Equivalent(_))
    }
}

/// Search the quantifier-free slice of the fragment for a formula exactly
/// equivalent to `phi` on all pc members.
pub fn qe_check(
    u: &ModelUniverse,
    phi: &PositiveFormula,
    frag: FormulaFragment,
) -> Result<QeVerdict, AnalysisError> {
    let m = frag.max_free;
    let vars: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    for v in phi.free_vars() {
        if !vars.contains(&v) {
            return Err(AnalysisError::FreeVarOutOfRange { var: v, max: m });
        }
    }
    let pc = pc_members(u);
    if pc.is_empty() {
        return Err(AnalysisError::EmptyPcSet { bound: u.bound() });
    }

    let ctx = FragmentContext::new(u.theory().sig.clone(), frag);
    let conjs = ctx.conjunctions();
    let sats: Vec<_> = pc.iter().map(|&i| ctx.sat_table(&u.members()[i])).collect();

    // phi's satisfaction rows by direct evaluation.
    let mut phi_rows: Vec<Vec<u64>> = Vec::new();
    for (&i, sat) in pc.iter().zip(&sats) {
        let a = &u.members()[i];
        let mut bits = vec![0u64; sat.free_words];
        for idx in 0..sat.free_bits {
            let mut rest = idx;
            let mut tuple = vec![0usize; m];
            for k in (0..m).rev() {
                tuple[k] = rest % a.size();
                rest /= a.size();
            }
            let asg: Assignment =
                vars.iter().cloned().zip(tuple.into_iter()).collect();
            if eval(a, phi, &asg)? {
                bits[idx / 64] |= 1u64 << (idx % 64);
            }
        }
        phi_rows.push(bits);
    }

    let matches_row = |pick: &dyn Fn(usize) -> Vec<u64>| -> bool {
        sats.iter().enumerate().all(|(k, sat)| {
            let row = pick(k);
            let mut remaining = sat.free_bits;
            phi_rows[k].iter().zip(row.iter()).all(|(p, r)| {
                let take = remaining.min(64);
                remaining -= take;
                let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
                (p ^ r) & mask == 0
            })
        })
    };

    if frag.include_truth_falsity {
        if matches_row(&|k| {
            let sat = &sats[k];
            let mut row = vec![u64::MAX; sat.free_words];
            let tail = sat.free_bits % 64;
            if tail != 0 {
                *row.last_mut().unwrap() = (1u64 << tail) - 1;
            }
            row
        }) {
            return Ok(QeVerdict::Equivalent(PositiveFormula::Truth));
        }
        if matches_row(&|k| vec![0u64; sats[k].free_words]) {
            return Ok(QeVerdict::Equivalent(PositiveFormula::Falsity));
        }
    }
    for (ci, c) in conjs.iter().enumerate() {
        if c.bound_used > 0 {
            continue;
        }
        if matches_row(&|k| sats[k].rows[ci].clone()) {
            return Ok(QeVerdict::Equivalent(ctx.conj_to_formula(c)));
        }
    }
    Ok(QeVerdict::NoQfEquivalentWithin(u.bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate::enumerate_models;
    use crate::analysis::SearchBudget;
    use crate::corpus::{corpus_cycles, corpus_successor, CycleVariant};
    use crate::logic::parse_formula;

    fn t4_universe(bound: usize) -> ModelUniverse {
        let t = corpus_cycles(CycleVariant::Tn(4), bound).unwrap().theory;
        enumerate_models(&t, bound, &SearchBudget::default()).unwrap()
    }

    fn succ_universe(bound: usize) -> ModelUniverse {
        let t = corpus_successor().unwrap().theory;
        enumerate_models(&t, bound, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn distinct_tuples_are_injective_and_lex_ordered() {
        let ts = distinct_tuples(3, 2);
        assert_eq!(ts, vec![
            vec![0, 1], vec![0, 2], vec![1, 0],
            vec![1, 2], vec![2, 0], vec![2, 1],
        ]);
        assert!(distinct_tuples(2, 3).is_empty());
    }

    #[test]
    fn t4_is_locally_robinson_on_pairs() {
        let u = t4_universe(4);
        assert!(check_robinson(&u, 2, RobinsonScope::Local).unwrap().holds());
    }

    #[test]
    fn successor_cycles_fail_global_robinson() {
        // C3's edge has a smaller qf type than C2's, yet no homomorphism
        // carries C3 onto the 2-cycle. At bound 5 neither cycle is pc any
        // more (each maps non-immersively into C2 + C3), so bound 4 it is.
        let u = succ_universe(4);
        match check_robinson(&u, 2, RobinsonScope::Global).unwrap() {
            RobinsonVerdict::Fails(w) => {
                assert_eq!(u.members()[w.left_member].size(), 3);
                assert_eq!(u.members()[w.right_member].size(), 2);
                assert_eq!(w.left_tuple, vec![0, 1]);
                assert_eq!(w.right_tuple, vec![0, 1]);
            }
            RobinsonVerdict::HoldsWithin(_) => panic!(),
        }
    }

    #[test]
    fn successor_cycles_are_locally_robinson_at_bound_4() {
        // Pc members here are the pure cycles C2 and C3, where rotations
        // witness every comparable pair.
        let u = succ_universe(4);
        assert!(check_robinson(&u, 2, RobinsonScope::Local).unwrap().holds());
    }

    #[test]
    fn disjoint_cycle_sum_breaks_local_robinson_at_bound_5() {
        // C2 + C3 is pc. A cross-component pair has the empty
        // quantifier-free type, below every edge pair, yet no
        // endomorphism pins it onto an edge: that would fold one cycle
        // into the other.
        let u = succ_universe(5);
        match check_robinson(&u, 2, RobinsonScope::Local).unwrap() {
            RobinsonVerdict::Fails(w) => {
                assert_eq!(w.left_member, w.right_member);
                assert_eq!(u.members()[w.left_member].size(), 5);
            }
            RobinsonVerdict::HoldsWithin(_) => panic!(),
        }
    }

    #[test]
    fn out_neighbour_exists_eliminates_to_truth() {
        let u = t4_universe(4);
        let phi = parse_formula("(exists (y1) (S x1 y1))", &u.theory().sig).unwrap();
        match qe_check(&u, &phi, FormulaFragment::new(1, 1, 1)).unwrap() {
            QeVerdict::Equivalent(f) => assert_eq!(f, PositiveFormula::Truth),
            QeVerdict::NoQfEquivalentWithin(_) => panic!(),
        }
    }

    #[test]
    fn two_step_reach_eliminates_to_back_edge() {
        let u = t4_universe(4);
        let phi = parse_formula("(exists (z) (and (S x1 z) (S z x2)))", &u.theory().sig)
        .unwrap();
        match qe_check(&u, &phi, FormulaFragment::new(2, 2, 2)).unwrap() {
            QeVerdict::Equivalent(f) => assert_eq!(f.to_string(), "(S x2 x1)"),
            QeVerdict::NoQfEquivalentWithin(_) => panic!(),
        }
    }

    #[test]
    fn no_elimination_when_the_slice_is_too_small() {
        let u = succ_universe(5);
        // Two steps of the successor separate C2 from the larger cycles;
        // no single quantifier-free atom matches on all three pc members.
        let phi = parse_formula("(exists (z) (and (F x1 z) (F z x2)))", &u.theory().sig)
        .unwrap();
        assert!(matches!(
            qe_check(&u, &phi, FormulaFragment::new(2, 1, 1)).unwrap(),
            QeVerdict::NoQfEquivalentWithin(5)
        ));
    }
}
