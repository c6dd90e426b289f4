//! Built-in example theories and structures: the cycle theories over
//! {S/2}, the pointed abelian groups over {P/3, e, a} and the successor
//! theory over {F/2}.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::sync::Arc;

use crate::logic::ast::Theory;
use crate::logic::parse::{parse_theory, ParseError};
use crate::structures::{chain, cycle, disjoint_sum, edgeless, FiniteStructure, Signature, StructureError};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("T_n requires n > 3, got {n}")]
    BadCycleBound { n: usize },
    #[error("{p} is not prime")]
    NotPrime { p: usize },
    #[error("exponent must be at least 1")]
    BadExponent,
    #[error("distinguished element {g} is not a nonzero residue mod {modulus}")]
    BadElement { g: usize, modulus: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleVariant {
    T,
    Tprime,
    Tn(usize),
}

pub struct CorpusCycles {
    pub theory: Theory,
    pub samples: Vec<(String, FiniteStructure)>,
}

/// The cycle theories: T says S has no 2-cycles and in-degree at most one;
/// T' adds the no-4-cycle axiom; T_n adds, for each m with n < m <= cap,
/// the axiom collapsing every m-cycle. The collapse schema is infinite, so
/// `cap` bounds the emitted instances; it should cover the universe bound
/// the theory will be used with.
pub fn corpus_cycles(variant: CycleVariant, cap: usize) -> Result<CorpusCycles, CorpusError> {
    let (name, upto) = match variant {
        CycleVariant::T => ("T".to_string(), None),
        CycleVariant::Tprime => ("Tprime".to_string(), None),
        CycleVariant::Tn(n) => {
            if n <= 3 {
                return Err(CorpusError::BadCycleBound { n });
            }
            (format!("T{n}"), Some(n))
        }
    };
    let mut text = String::new();
    write!(text, "(theory {name}\n  (sig (rel S 2))").unwrap();
    text.push_str("\n  (axiom no-2-cycle (not (exists (x y) (and (S x y) (S y x)))))");
    text.push_str(
        "\n  (axiom in-func (forall (x y z) (=> (and (S x z) (S y z)) (= x y))))",
    );
    if !matches!(variant, CycleVariant::T) {
        text.push_str(
            "\n  (axiom no-4-cycle (not (exists (x1 x2 x3 x4) (and (S x1 x2) (S x2 x3) (S x3 x4) (S x4 x1)))))",
        );
    }
    if let Some(n) = upto {
        for m in (n + 1)..=cap {
            let vars: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
            let mut cyc = String::new();
            for i in 1..=m {
                let next = if i == m { 1 } else { i + 1 };
                write!(cyc, " (S x{i} x{next})").unwrap();
            }
            let mut eqs = String::new();
            for i in 1..=m {
                for j in (i + 1)..=m {
                    write!(eqs, " (= x{i} x{j})").unwrap();
                }
            }
            write!(
                text,
                "\n  (axiom collapse-{m} (forall ({}) (=> (and{cyc}) (or{eqs}))))",
                vars.join(" ")
            )
            .unwrap();
        }
    }
    text.push_str(")\n");
    let theory = parse_theory(&text)?;
    let samples = vec![
        ("c3".to_string(), cycle(3)),
        ("c5".to_string(), cycle(5)),
        ("c3c5".to_string(), disjoint_sum(&cycle(3), &cycle(5))?),
        ("chain2".to_string(), chain(2)),
        ("points2".to_string(), edgeless(2)),
        ("c4".to_string(), cycle(4)),
    ];
    Ok(CorpusCycles { theory, samples })
}

pub struct CorpusGroup {
    pub theory: Theory,
    pub structure: FiniteStructure,
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// The pointed abelian group theory T_ag+ over {P/3, e, a}: P(x,y,z)
/// encodes xy=z, with totality, functionality, associativity,
/// commutativity, identity and inverse axioms plus the denial a=e. The
/// returned structure is the cyclic group Z/p^k with a interpreted as g.
pub fn corpus_group(p: usize, k: u32, g: usize) -> Result<CorpusGroup, CorpusError> {
    if !is_prime(p) {
        return Err(CorpusError::NotPrime { p });
    }
    if k == 0 {
        return Err(CorpusError::BadExponent);
    }
    let n = p.pow(k);
    if g == 0 || g >= n {
        return Err(CorpusError::BadElement { g, modulus: n });
    }
    let theory = group_theory()?;
    let mut table = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            table.insert(vec![x, y, (x + y) % n]);
        }
    }
    let structure = FiniteStructure::new(theory.sig.clone(), n, vec![table], vec![0, g])?;
    Ok(CorpusGroup { theory, structure })
}

pub fn group_theory() -> Result<Theory, CorpusError> {
    let text = "\
(theory Tag
  (sig (rel P 3) (const e) (const a))
  (axiom totality (forall (x y) (=> true (exists (z) (P x y z)))))
  (axiom functionality (forall (x y z w) (=> (and (P x y z) (P x y w)) (= z w))))
  (axiom associativity (forall (x y z u v w) (=> (and (P x y u) (P u z w) (P y z v)) (P x v w))))
  (axiom commutativity (forall (x y z) (=> (P x y z) (P y x z))))
  (axiom identity (forall (x) (=> true (P x e x))))
  (axiom inverse (forall (x) (=> true (exists (y) (P x y e)))))
  (axiom a-not-e (forall () (=> (= a e) false))))
";
    Ok(parse_theory(text)?)
}

pub struct CorpusSuccessor {
    pub theory: Theory,
    pub samples: Vec<(String, FiniteStructure)>,
}

/// The successor theory over {F/2}: F is a total function with no fixed
/// point. Samples are the functional p-cycles for p in {2, 3, 5}.
pub fn corpus_successor() -> Result<CorpusSuccessor, CorpusError> {
    let text = "\
(theory Tsucc
  (sig (rel F 2))
  (axiom totality (forall (x) (=> true (exists (y) (F x y)))))
  (axiom functionality (forall (x y z) (=> (and (F x y) (F x z)) (= y z))))
  (axiom no-fixed-point (not (exists (x) (F x x)))))
";
    let theory = parse_theory(text)?;
    let mut samples = Vec::new();
    for p in [2usize, 3, 5] {
        let mut table = BTreeSet::new();
        for i in 0..p {
            table.insert(vec![i, (i + 1) % p]);
        }
        let s = FiniteStructure::new(theory.sig.clone(), p, vec![table], vec![])?;
        samples.push((format!("fcycle{p}"), s));
    }
    Ok(CorpusSuccessor { theory, samples })
}

/// The signature {S/2} shared by the cycle corpus helpers.
pub fn s_signature() -> Arc<Signature> {
    Arc::new(Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::satisfies;

    #[test]
    fn t_has_two_axioms() {
        let c = corpus_cycles(CycleVariant::T, 8).unwrap();
        assert_eq!(c.theory.axioms.len(), 2);
        assert!(c.theory.sentence("no-2-cycle").unwrap().is_h_universal());
    }

    #[test]
    fn tprime_adds_no_4_cycle() {
        let c = corpus_cycles(CycleVariant::Tprime, 8).unwrap();
        assert_eq!(c.theory.axioms.len(), 3);
        assert!(c.theory.sentence("no-4-cycle").is_some());
    }

    #[test]
    fn t6_cap8_emits_collapse_for_7_and_8() {
        let c = corpus_cycles(CycleVariant::Tn(6), 8).unwrap();
        let labels: Vec<&str> = c.theory.axioms.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(
            labels,
            vec!["no-2-cycle", "in-func", "no-4-cycle", "collapse-7", "collapse-8"]
        );
    }

    #[test]
    fn tn_requires_n_above_3() {
        assert!(matches!(
            corpus_cycles(CycleVariant::Tn(3), 8),
            Err(CorpusError::BadCycleBound { n: 3 })
        ));
    }

    #[test]
    fn collapse_axiom_wraps_the_cycle() {
        // The m-cycle premise must close back to x1.
        let c = corpus_cycles(CycleVariant::Tn(4), 6).unwrap();
        let s = c.theory.sentence("collapse-5").unwrap();
        let printed = s.to_string();
        assert!(printed.contains("(S x5 x1)"), "{printed}");
        assert!(printed.contains("(= x1 x5)"), "{printed}");
    }

    #[test]
    fn cycle_samples_classified_by_t4() {
        let c = corpus_cycles(CycleVariant::Tn(4), 8).unwrap();
        for (name, s) in &c.samples {
            let sat = satisfies(s, &c.theory).unwrap().holds();
            let expected = matches!(name.as_str(), "c3" | "chain2" | "points2");
            assert_eq!(sat, expected, "{name}");
        }
    }

    #[test]
    fn z3_is_a_model_of_the_group_theory() {
        let g = corpus_group(3, 1, 1).unwrap();
        assert_eq!(g.structure.size(), 3);
        assert_eq!(g.structure.table(0).len(), 9);
        assert!(satisfies(&g.structure, &g.theory).unwrap().holds());
    }

    #[test]
    fn group_corpus_rejects_bad_parameters() {
        assert!(matches!(corpus_group(4, 1, 1), Err(CorpusError::NotPrime { p: 4 })));
        assert!(matches!(corpus_group(3, 0, 1), Err(CorpusError::BadExponent)));
        assert!(matches!(corpus_group(3, 1, 0), Err(CorpusError::BadElement { .. })));
        assert!(matches!(corpus_group(3, 1, 3), Err(CorpusError::BadElement { .. })));
    }

    #[test]
    fn successor_samples_are_models() {
        let c = corpus_successor().unwrap();
        assert_eq!(c.samples.len(), 3);
        for (name, s) in &c.samples {
            assert!(satisfies(s, &c.theory).unwrap().holds(), "{name}");
        }
    }
}
