//! Tarskian evaluation of positive formulas and theories over finite
//! structures, and quantifier-free positive types of tuples.

use std::collections::BTreeMap;

use crate::structures::{FiniteStructure, Signature};

use super::ast::{HInductiveSentence, PositiveFormula, Term, Theory};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound free variable {var}")]
    UnboundVar { var: String },
    #[error("symbol {name} is not in the structure's signature")]
    UnknownSymbol { name: String },
    #[error("signature mismatch")]
    SignatureMismatch,
}

pub type Assignment = BTreeMap<String, usize>;

fn term_value(t: &Term, a: &FiniteStructure, asg: &Assignment) -> Result<usize, EvalError> {
    match t {
        Term::Var(v) => asg
            .get(v)
            .copied()
            .ok_or_else(|| EvalError::UnboundVar { var: v.clone() }),
        Term::Const(c) => {
            let idx = a
                .sig()
                .constant_index(c)
                .ok_or_else(|| EvalError::UnknownSymbol { name: c.clone() })?;
            Ok(a.const_val(idx))
        }
    }
}

/// Standard Tarskian truth of a positive formula; existentials are searched
/// over the finite universe.
pub fn eval(a: &FiniteStructure, phi: &PositiveFormula, asg: &Assignment) -> Result<bool, EvalError> {
    match phi {
        PositiveFormula::Truth => Ok(true),
        PositiveFormula::Falsity => Ok(false),
        PositiveFormula::Atom(rel, terms) => {
            let idx = a
                .sig()
                .relation_index(rel)
                .ok_or_else(|| EvalError::UnknownSymbol { name: rel.clone() })?;
            let tuple = terms
                .iter()
                .map(|t| term_value(t, a, asg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(a.holds(idx, &tuple))
        }
        PositiveFormula::Eq(s, t) => Ok(term_value(s, a, asg)? == term_value(t, a, asg)?),
        PositiveFormula::And(fs) => {
            for f in fs {
                if !eval(a, f, asg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        PositiveFormula::Or(fs) => {
            for f in fs {
                if eval(a, f, asg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        PositiveFormula::Exists(vars, body) => {
            let mut asg = asg.clone();
            exists_search(a, vars, body, &mut asg, 0)
        }
    }
}

fn exists_search(
    a: &FiniteStructure,
    vars: &[String],
    body: &PositiveFormula,
    asg: &mut Assignment,
    i: usize,
) -> Result<bool, EvalError> {
    if i == vars.len() {
        return eval(a, body, asg);
    }
    let saved = asg.get(&vars[i]).copied();
    for v in 0..a.size() {
        asg.insert(vars[i].clone(), v);
        if exists_search(a, vars, body, asg, i + 1)? {
            return Ok(true);
        }
    }
    match saved {
        Some(v) => asg.insert(vars[i].clone(), v),
        None => asg.remove(&vars[i]),
    };
    Ok(false)
}

/// Three-valued evaluation under a partial assignment: `None` means the
/// value still depends on unassigned variables. Used to prune universal
/// instantiation early (e.g. collapse schemas whose conclusion is already
/// true on a partial tuple).
fn partial_eval(
    a: &FiniteStructure,
    phi: &PositiveFormula,
    asg: &Assignment,
) -> Result<Option<bool>, EvalError> {
    match phi {
        PositiveFormula::Truth => Ok(Some(true)),
        PositiveFormula::Falsity => Ok(Some(false)),
        PositiveFormula::Atom(rel, terms) => {
            let idx = a
                .sig()
                .relation_index(rel)
                .ok_or_else(|| EvalError::UnknownSymbol { name: rel.clone() })?;
            let mut tuple = Vec::with_capacity(terms.len());
            for t in terms {
                match t {
                    Term::Var(v) => match asg.get(v) {
                        Some(&x) => tuple.push(x),
                        None => return Ok(None),
                    },
                    Term::Const(c) => {
                        let ci = a
                            .sig()
                            .constant_index(c)
                            .ok_or_else(|| EvalError::UnknownSymbol { name: c.clone() })?;
                        tuple.push(a.const_val(ci));
                    }
                }
            }
            Ok(Some(a.holds(idx, &tuple)))
        }
        PositiveFormula::Eq(s, t) => {
            let sv = match s {
                Term::Var(v) => asg.get(v).copied(),
                Term::Const(_) => Some(term_value(s, a, asg)?),
            };
            let tv = match t {
                Term::Var(v) => asg.get(v).copied(),
                Term::Const(_) => Some(term_value(t, a, asg)?),
            };
            match (sv, tv) {
                (Some(x), Some(y)) => Ok(Some(x == y)),
                _ => Ok(None),
            }
        }
        PositiveFormula::And(fs) => {
            let mut all_true = true;
            for f in fs {
                match partial_eval(a, f, asg)? {
                    Some(false) => return Ok(Some(false)),
                    Some(true) => {}
                    None => all_true = false,
                }
            }
            Ok(if all_true { Some(true) } else { None })
        }
        PositiveFormula::Or(fs) => {
            let mut all_false = true;
            for f in fs {
                match partial_eval(a, f, asg)? {
                    Some(true) => return Ok(Some(true)),
                    Some(false) => {}
                    None => all_false = false,
                }
            }
            Ok(if all_false { Some(false) } else { None })
        }
        // Quantified subformulas are only decided once all their free
        // variables are assigned; then full evaluation applies.
        PositiveFormula::Exists(_, _) => {
            if phi.free_vars().iter().all(|v| asg.contains_key(v)) {
                Ok(Some(eval(a, phi, asg)?))
            } else {
                Ok(None)
            }
        }
    }
}

/// Outcome of checking a structure against a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfaction {
    Holds,
    Fails {
        /// Axiom label and the falsifying assignment of its universal
        /// variables, lexicographically least.
        label: String,
        assignment: Vec<(String, usize)>,
    },
}

impl Satisfaction {
    pub fn holds(&self) -> bool {
        matches!(self, Satisfaction::Holds)
    }
}

fn sentence_violation(
    a: &FiniteStructure,
    s: &HInductiveSentence,
) -> Result<Option<Vec<(String, usize)>>, EvalError> {
    fn rec(
        a: &FiniteStructure,
        s: &HInductiveSentence,
        asg: &mut Assignment,
        i: usize,
    ) -> Result<Option<Vec<(String, usize)>>, EvalError> {
        // Prune whole subtrees whose conclusion is already forced true or
        // whose premise is already forced false.
        if partial_eval(a, &s.conclusion, asg)? == Some(true)
            || partial_eval(a, &s.premise, asg)? == Some(false)
        {
            return Ok(None);
        }
        if i == s.vars.len() {
            if eval(a, &s.premise, asg)? && !eval(a, &s.conclusion, asg)? {
                return Ok(Some(s.vars.iter().map(|v| (v.clone(), asg[v])).collect()));
            }
            return Ok(None);
        }
        for v in 0..a.size() {
            asg.insert(s.vars[i].clone(), v);
            if let Some(w) = rec(a, s, asg, i + 1)? {
                return Ok(Some(w));
            }
        }
        asg.remove(&s.vars[i]);
        Ok(None)
    }
    rec(a, s, &mut Assignment::new(), 0)
}

/// Check whether `A` is a model of the theory. On failure, reports the
/// first axiom (in theory order) with its lexicographically least
/// falsifying assignment.
pub fn satisfies(a: &FiniteStructure, t: &Theory) -> Result<Satisfaction, EvalError> {
    if a.sig().as_ref() != t.sig.as_ref() {
        return Err(EvalError::SignatureMismatch);
    }
    for (label, s) in &t.axioms {
        if let Some(assignment) = sentence_violation(a, s)? {
            return Ok(Satisfaction::Fails { label: label.clone(), assignment });
        }
    }
    Ok(Satisfaction::Holds)
}

/// A term position in a quantifier-free type: a tuple slot or a constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TpqfTerm {
    /// 0-based tuple position.
    Pos(usize),
    Const(String),
}

impl std::fmt::Display for TpqfTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TpqfTerm::Pos(i) => write!(f, "p{}", i + 1),
            TpqfTerm::Const(c) => write!(f, "{c}"),
        }
    }
}

/// An atomic fact about a tuple: a relation atom over positions/constants,
/// or an equality between them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TpqfAtom {
    Rel(String, Vec<TpqfTerm>),
    Eq(TpqfTerm, TpqfTerm),
}

impl std::fmt::Display for TpqfAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TpqfAtom::Rel(name, args) => {
                write!(f, "({name}")?;
                for t in args {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            TpqfAtom::Eq(a, b) => write!(f, "(= {a} {b})"),
        }
    }
}

/// The atomic part of the quantifier-free positive type of a tuple: all
/// relation atoms over tuple positions and constants true of the tuple,
/// plus all equalities among positions and constants (including the
/// reflexive ones).
///
/// Containment of full quantifier-free positive types reduces to
/// containment of these atom sets: conjunction and disjunction closure
/// adds no separating power.
pub fn tpqf(a: &FiniteStructure, tuple: &[usize]) -> std::collections::BTreeSet<TpqfAtom> {
    let sig: &Signature = a.sig();
    let mut terms: Vec<(TpqfTerm, usize)> = tuple
        .iter()
        .enumerate()
        .map(|(i, &e)| (TpqfTerm::Pos(i), e))
        .collect();
    for (ci, name) in sig.constants().iter().enumerate() {
        terms.push((TpqfTerm::Const(name.clone()), a.const_val(ci)));
    }
    let mut out = std::collections::BTreeSet::new();
    for i in 0..terms.len() {
        for j in i..terms.len() {
            if terms[i].1 == terms[j].1 {
                out.insert(TpqfAtom::Eq(terms[i].0.clone(), terms[j].0.clone()));
            }
        }
    }
    for (rel, (name, arity)) in sig.relations().iter().enumerate() {
        let mut idx = vec![0usize; *arity];
        loop {
            let args: Vec<usize> = idx.iter().map(|&i| terms[i].1).collect();
            if a.holds(rel, &args) {
                out.insert(TpqfAtom::Rel(
                    name.clone(),
                    idx.iter().map(|&i| terms[i].0.clone()).collect(),
                ));
            }
            // Mixed-radix increment over term indices.
            let mut k = *arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < terms.len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula, parse_theory};
    use crate::structures::{cycle, disjoint_sum, edgeless};

    fn asg(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn eval_successor_exists() {
        let c3 = cycle(3);
        let f = parse_formula("(exists (y) (S x y))", c3.sig()).unwrap();
        assert!(eval(&c3, &f, &asg(&[("x", 0)])).unwrap());
    }

    #[test]
    fn closed_walks_by_brute_force() {
        let c3 = cycle(3);
        let walk4 = parse_formula(
            "(exists (x1 x2 x3 x4) (and (S x1 x2) (S x2 x3) (S x3 x4) (S x4 x1)))",
            c3.sig(),
        )
        .unwrap();
        // Oracle: brute force over 3^4 assignments.
        let mut found = false;
        for a1 in 0..3 {
            for a2 in 0..3 {
                for a3 in 0..3 {
                    for a4 in 0..3 {
                        found |= c3.holds(0, &[a1, a2])
                            && c3.holds(0, &[a2, a3])
                            && c3.holds(0, &[a3, a4])
                            && c3.holds(0, &[a4, a1]);
                    }
                }
            }
        }
        assert!(!found);
        assert_eq!(eval(&c3, &walk4, &Assignment::new()).unwrap(), found);

        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        let walk5 = parse_formula(
            "(exists (x1 x2 x3 x4 x5) (and (S x1 x2) (S x2 x3) (S x3 x4) (S x4 x5) (S x5 x1)))",
            c3c5.sig(),
        )
        .unwrap();
        assert!(eval(&c3c5, &walk5, &Assignment::new()).unwrap());
    }

    #[test]
    fn unbound_variable_reported() {
        let c3 = cycle(3);
        let f = parse_formula("(S x y)", c3.sig()).unwrap();
        assert!(matches!(
            eval(&c3, &f, &asg(&[("x", 0)])),
            Err(EvalError::UnboundVar { .. })
        ));
    }

    fn t4() -> Theory {
        crate::corpus::corpus_cycles(crate::corpus::CycleVariant::Tn(4), 8).unwrap().theory
    }

    #[test]
    fn c3_satisfies_t4() {
        assert!(satisfies(&cycle(3), &t4()).unwrap().holds());
    }

    #[test]
    fn c4_fails_no_4_cycle() {
        let tprime = crate::corpus::corpus_cycles(crate::corpus::CycleVariant::Tprime, 8)
            .unwrap()
            .theory;
        match satisfies(&cycle(4), &tprime).unwrap() {
            Satisfaction::Fails { label, assignment } => {
                assert_eq!(label, "no-4-cycle");
                assert!(assignment.is_empty()); // h-universal: no universal vars
            }
            Satisfaction::Holds => panic!("C4 should fail T'"),
        }
    }

    #[test]
    fn edgeless_satisfies_tprime() {
        let tprime = crate::corpus::corpus_cycles(crate::corpus::CycleVariant::Tprime, 8)
            .unwrap()
            .theory;
        assert!(satisfies(&edgeless(2), &tprime).unwrap().holds());
    }

    #[test]
    fn simple_theory_failure_assignment() {
        let t = parse_theory(
            "(theory loopfree (sig (rel S 2)) (axiom no-loop (forall (x) (=> (S x x) false))))",
        )
        .unwrap();
        let mut loopy = cycle(2);
        // Build a structure with a loop at 1.
        let mut table = loopy.table(0).clone();
        table.insert(vec![1, 1]);
        loopy = crate::structures::FiniteStructure::new(
            loopy.sig().clone(),
            2,
            vec![table],
            vec![],
        )
        .unwrap();
        match satisfies(&loopy, &t).unwrap() {
            Satisfaction::Fails { label, assignment } => {
                assert_eq!(label, "no-loop");
                assert_eq!(assignment, vec![("x".to_string(), 1)]);
            }
            Satisfaction::Holds => panic!(),
        }
    }

    #[test]
    fn tpqf_examples() {
        let c3 = cycle(3);
        let t = tpqf(&c3, &[0, 1]);
        assert!(t.contains(&TpqfAtom::Rel(
            "S".into(),
            vec![TpqfTerm::Pos(0), TpqfTerm::Pos(1)]
        )));
        assert!(!t.contains(&TpqfAtom::Rel(
            "S".into(),
            vec![TpqfTerm::Pos(1), TpqfTerm::Pos(0)]
        )));
        // A C5 edge in C3+C5 has the same atom set.
        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        assert_eq!(t, tpqf(&c3c5, &[3, 4]));
        // Repeated elements always yield the equality atom.
        assert!(tpqf(&c3, &[1, 1]).contains(&TpqfAtom::Eq(TpqfTerm::Pos(0), TpqfTerm::Pos(1))));
    }
}
