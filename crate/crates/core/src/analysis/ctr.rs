//! Bounded Ctr sets: the fragment formulas jointly unsatisfiable with a
//! given formula across the universe, with optional quantifier-free basis
//! and complement reporting.

use crate::logic::ast::PositiveFormula;
use crate::logic::eval::{eval, Assignment};
use crate::logic::fragment::{FormulaFragment, FragmentContext, SatTable};

use super::classify::h_maximal_members;
use super::enumerate::ModelUniverse;
use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CtrOptions {
    /// Check whether the quantifier-free entries already generate the set.
    pub qf_basis: bool,
    /// Look for a complement: an entry of the set that together with the
    /// formula covers every tuple of every h-maximal member.
    pub complement: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtrVerdict {
    /// The formula and this entry hold together somewhere, so the entry is
    /// outside the set. Lexicographically least member and tuple.
    Refuted { member: usize, tuple: Vec<usize> },
    /// In the set as far as the universe can tell.
    NotRefutedUpTo(usize),
}

impl CtrVerdict {
    pub fn in_set(&self) -> bool {
        matches!(self, CtrVerdict::NotRefutedUpTo(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtrEntry {
    pub formula: PositiveFormula,
    pub quantifier_free: bool,
    pub verdict: CtrVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfBasisReport {
    /// Entry indices of set members with no quantifier-free entry of the
    /// set entailed by them across the universe.
    pub uncovered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtrReport {
    pub bound: usize,
    pub entries: Vec<CtrEntry>,
    pub qf_basis: Option<QfBasisReport>,
    /// Entry index of the first complement candidate, if one was asked for
    /// and found.
    pub complement: Option<Option<usize>>,
}

impl CtrReport {
    /// Entry indices of the bounded Ctr set, in fragment order.
    pub fn set(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.verdict.in_set().then_some(i))
            .collect()
    }
}

/// How a candidate's satisfaction row is obtained from a member's table.
enum RowSpec {
    Full,
    Empty,
    Conj(usize),
    Or(usize, usize),
}

fn row_bits(sat: &SatTable, spec: &RowSpec) -> Vec<u64> {
    match spec {
        RowSpec::Full => {
            let mut row = vec![u64::MAX; sat.free_words];
            let tail = sat.free_bits % 64;
            if tail != 0 {
                *row.last_mut().unwrap() = (1u64 << tail) - 1;
            }
            row
        }
        RowSpec::Empty => vec![0u64; sat.free_words],
        RowSpec::Conj(i) => sat.rows[*i].clone(),
        RowSpec::Or(i, j) => sat.rows[*i]
            .iter()
            .zip(sat.rows[*j].iter())
            .map(|(a, b)| a | b)
            .collect(),
    }
}

fn decode_tuple(mut idx: usize, n: usize, m: usize) -> Vec<usize> {
    let mut tuple = vec![0usize; m];
    for k in (0..m).rev() {
        tuple[k] = idx % n;
        idx /= n;
    }
    tuple
}

/// The bounded Ctr set of `phi`: every fragment formula is tested for
/// joint satisfiability with `phi` over all members. Free variables of
/// `phi` must lie among the fragment's x1..xm.
pub fn ctr(
    u: &ModelUniverse,
    phi: &PositiveFormula,
    frag: FormulaFragment,
    opts: &CtrOptions,
) -> Result<CtrReport, AnalysisError> {
    let m = frag.max_free;
    let allowed: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    for v in phi.free_vars() {
        if !allowed.contains(&v) {
            return Err(AnalysisError::FreeVarOutOfRange { var: v, max: m });
        }
    }

    let ctx = FragmentContext::new(u.theory().sig.clone(), frag);
    let conjs = ctx.conjunctions();
    let mut specs: Vec<(PositiveFormula, RowSpec)> = Vec::new();
    if frag.include_truth_falsity {
        specs.push((PositiveFormula::Truth, RowSpec::Full));
        specs.push((PositiveFormula::Falsity, RowSpec::Empty));
    }
    for (i, c) in conjs.iter().enumerate() {
        specs.push((ctx.conj_to_formula(c), RowSpec::Conj(i)));
    }
    if frag.allow_or {
        for i in 0..conjs.len() {
            for j in (i + 1)..conjs.len() {
                let f = PositiveFormula::Or(vec![
                    ctx.conj_to_formula(&conjs[i]),
                    ctx.conj_to_formula(&conjs[j]),
                ]);
                specs.push((f, RowSpec::Or(i, j)));
            }
        }
    }

    // Satisfaction of phi itself, one bitset per member, by direct
    // evaluation over every assignment.
    let sats: Vec<SatTable> = u.members().iter().map(|a| ctx.sat_table(a)).collect();
    let mut phi_bits: Vec<Vec<u64>> = Vec::new();
    for (a, sat) in u.members().iter().zip(&sats) {
        let mut bits = vec![0u64; sat.free_words];
        for idx in 0..sat.free_bits {
            let tuple = decode_tuple(idx, a.size(), m);
            let asg: Assignment =
                allowed.iter().cloned().zip(tuple.iter().copied()).collect();
            if eval(a, phi, &asg)? {
                bits[idx / 64] |= 1u64 << (idx % 64);
            }
        }
        phi_bits.push(bits);
    }

    let mut entries = Vec::new();
    for (formula, spec) in &specs {
        let mut verdict = CtrVerdict::NotRefutedUpTo(u.bound());
        'members: for (mi, (a, sat)) in u.members().iter().zip(&sats).enumerate() {
            let row = row_bits(sat, spec);
            for idx in 0..sat.free_bits {
                let both = phi_bits[mi][idx / 64] & row[idx / 64];
                if both >> (idx % 64) & 1 == 1 {
                    verdict = CtrVerdict::Refuted {
                        member: mi,
                        tuple: decode_tuple(idx, a.size(), m),
                    };
                    break 'members;
                }
            }
        }
        entries.push(CtrEntry {
            formula: formula.clone(),
            quantifier_free: formula.is_quantifier_free(),
            verdict,
        });
    }

    let set: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.verdict.in_set().then_some(i))
        .collect();

    let qf_basis = if opts.qf_basis {
        // An entry is covered when some quantifier-free set entry is
        // entailed by it in every member.
        let qf_set: Vec<usize> =
            set.iter().copied().filter(|&i| entries[i].quantifier_free).collect();
        let entailed = |from: usize, to: usize| -> bool {
            sats.iter().all(|sat| {
                let a = row_bits(sat, &specs[from].1);
                let b = row_bits(sat, &specs[to].1);
                a.iter().zip(b.iter()).all(|(x, y)| x & !y == 0)
            })
        };
        let uncovered = set
            .iter()
            .copied()
            .filter(|&i| !qf_set.iter().any(|&q| entailed(i, q)))
            .collect();
        Some(QfBasisReport { uncovered })
    } else {
        None
    };

    let complement = if opts.complement {
        let hmax = h_maximal_members(u);
        let found = set.iter().copied().find(|&i| {
            hmax.iter().all(|&mi| {
                let row = row_bits(&sats[mi], &specs[i].1);
                let mut remaining = sats[mi].free_bits;
                for (p, r) in phi_bits[mi].iter().zip(row.iter()) {
                    let take = remaining.min(64);
                    let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
                    if (p | r) & mask != mask {
                        return false;
                    }
                    remaining -= take;
                }
                true
            })
        });
        Some(found)
    } else {
        None
    };

    Ok(CtrReport { bound: u.bound(), entries, qf_basis, complement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate::enumerate_models;
    use crate::analysis::SearchBudget;
    use crate::corpus::{corpus_cycles, CycleVariant};
    use crate::logic::parse_formula;

    fn t4_universe(bound: usize) -> ModelUniverse {
        let t = corpus_cycles(CycleVariant::Tn(4), bound).unwrap().theory;
        enumerate_models(&t, bound, &SearchBudget::default()).unwrap()
    }

    #[test]
    fn edge_excludes_reverse_edge() {
        let u = t4_universe(3);
        let sig = u.theory().sig.clone();
        let phi = parse_formula("(S x1 x2)", &sig).unwrap();
        let report =
            ctr(&u, &phi, FormulaFragment::new(2, 0, 1), &CtrOptions::default()).unwrap();
        let in_set: Vec<String> = report
            .set()
            .into_iter()
            .map(|i| report.entries[i].formula.to_string())
            .collect();
        // No 2-cycles and no loops under the in-degree axiom.
        assert!(in_set.contains(&"(S x2 x1)".to_string()));
        assert!(in_set.contains(&"(= x1 x2)".to_string()));
        assert!(in_set.contains(&"false".to_string()));
        assert!(!in_set.contains(&"true".to_string()));
    }

    #[test]
    fn refutation_certificate_is_lex_least() {
        let u = t4_universe(3);
        let sig = u.theory().sig.clone();
        let phi = parse_formula("(S x1 x2)", &sig).unwrap();
        let report =
            ctr(&u, &phi, FormulaFragment::new(2, 0, 1), &CtrOptions::default()).unwrap();
        let truth = &report.entries[0];
        assert_eq!(truth.formula, PositiveFormula::Truth);
        match &truth.verdict {
            CtrVerdict::Refuted { member, tuple } => {
                // The first member carrying an edge, at its least edge.
                assert!(u.members()[*member].size() == 2);
                assert_eq!(tuple, &vec![0, 1]);
            }
            CtrVerdict::NotRefutedUpTo(_) => panic!(),
        }
    }

    #[test]
    fn free_variable_outside_fragment_is_an_error() {
        let u = t4_universe(2);
        let sig = u.theory().sig.clone();
        let phi = parse_formula("(S x1 x3)", &sig).unwrap();
        assert!(matches!(
            ctr(&u, &phi, FormulaFragment::new(2, 0, 1), &CtrOptions::default()),
            Err(AnalysisError::FreeVarOutOfRange { max: 2, .. })
        ));
    }

    #[test]
    fn qf_basis_covers_existential_entries() {
        let u = t4_universe(3);
        let sig = u.theory().sig.clone();
        let phi = parse_formula("(S x1 x2)", &sig).unwrap();
        let opts = CtrOptions { qf_basis: true, complement: false };
        let report = ctr(&u, &phi, FormulaFragment::new(2, 1, 1), &opts).unwrap();
        // The only existential entry of the set, (exists (y1) (S y1 y1)),
        // has an empty row everywhere and is covered by false.
        let basis = report.qf_basis.as_ref().unwrap();
        assert!(basis.uncovered.is_empty());
        assert!(report
            .set()
            .iter()
            .any(|&i| report.entries[i].formula.to_string() == "(exists (y1) (S y1 y1))"));
    }

    #[test]
    fn equality_complements_the_edge_up_to_hmax() {
        // On C3 every ordered pair is an edge or equal; on the chain and
        // the point members the same holds only where phi fails, so the
        // complement search must quantify over h-maximal members only.
        let u = t4_universe(3);
        let sig = u.theory().sig.clone();
        let phi = parse_formula("(or (S x1 x2) (S x2 x1))", &sig).unwrap();
        let opts = CtrOptions { qf_basis: false, complement: true };
        let report = ctr(&u, &phi, FormulaFragment::new(2, 0, 1), &opts).unwrap();
        let found = report.complement.unwrap();
        let idx = found.expect("equality should complement the symmetric edge");
        assert_eq!(report.entries[idx].formula.to_string(), "(= x1 x2)");
    }
}
