//! Primitive-positive normal form and the canonical-structure (canonical
//! query) construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::structures::{FiniteStructure, Signature, StructureError};

use super::ast::{PositiveFormula, Term};

/// A primitive positive formula: an existential block over a pure
/// conjunction of relation atoms and equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPFormula {
    pub bound: Vec<String>,
    pub atoms: Vec<PPAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PPAtom {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
}

impl PPFormula {
    /// Back to an ordinary positive formula.
    pub fn to_formula(&self) -> PositiveFormula {
        let atoms: Vec<PositiveFormula> = self
            .atoms
            .iter()
            .map(|a| match a {
                PPAtom::Rel(name, args) => PositiveFormula::Atom(name.clone(), args.clone()),
                PPAtom::Eq(s, t) => PositiveFormula::Eq(s.clone(), t.clone()),
            })
            .collect();
        let body = match atoms.len() {
            0 => PositiveFormula::Truth,
            1 => atoms.into_iter().next().unwrap(),
            _ => PositiveFormula::And(atoms),
        };
        if self.bound.is_empty() {
            body
        } else {
            PositiveFormula::Exists(self.bound.clone(), Box::new(body))
        }
    }
}

fn substitute(f: &PositiveFormula, map: &BTreeMap<String, String>) -> PositiveFormula {
    let sub_term = |t: &Term| match t {
        Term::Var(v) => match map.get(v) {
            Some(new) => Term::Var(new.clone()),
            None => t.clone(),
        },
        Term::Const(_) => t.clone(),
    };
    match f {
        PositiveFormula::Truth => PositiveFormula::Truth,
        PositiveFormula::Falsity => PositiveFormula::Falsity,
        PositiveFormula::Atom(name, args) => {
            PositiveFormula::Atom(name.clone(), args.iter().map(sub_term).collect())
        }
        PositiveFormula::Eq(a, b) => PositiveFormula::Eq(sub_term(a), sub_term(b)),
        PositiveFormula::And(fs) => {
            PositiveFormula::And(fs.iter().map(|x| substitute(x, map)).collect())
        }
        PositiveFormula::Or(fs) => {
            PositiveFormula::Or(fs.iter().map(|x| substitute(x, map)).collect())
        }
        PositiveFormula::Exists(vars, body) => {
            // Inner bindings shadow the substitution.
            let mut inner = map.clone();
            for v in vars {
                inner.remove(v);
            }
            PositiveFormula::Exists(vars.clone(), Box::new(substitute(body, &inner)))
        }
    }
}

/// Rewrite a positive formula as a finite disjunction of primitive
/// positive formulas: distribute `or` over `and`, pull existentials to the
/// front, rename bound variables apart. `Falsity` yields the empty list.
pub fn pp_normal_form(f: &PositiveFormula) -> Vec<PPFormula> {
    let mut counter = 0usize;
    nf(f, &mut counter)
}

fn nf(f: &PositiveFormula, counter: &mut usize) -> Vec<PPFormula> {
    match f {
        PositiveFormula::Truth => vec![PPFormula { bound: vec![], atoms: vec![] }],
        PositiveFormula::Falsity => vec![],
        PositiveFormula::Atom(name, args) => vec![PPFormula {
            bound: vec![],
            atoms: vec![PPAtom::Rel(name.clone(), args.clone())],
        }],
        PositiveFormula::Eq(a, b) => vec![PPFormula {
            bound: vec![],
            atoms: vec![PPAtom::Eq(a.clone(), b.clone())],
        }],
        PositiveFormula::Or(fs) => fs.iter().flat_map(|x| nf(x, counter)).collect(),
        PositiveFormula::And(fs) => {
            let mut acc = vec![PPFormula { bound: vec![], atoms: vec![] }];
            for x in fs {
                let parts = nf(x, counter);
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for p in &acc {
                    for q in &parts {
                        let mut bound = p.bound.clone();
                        bound.extend(q.bound.iter().cloned());
                        let mut atoms = p.atoms.clone();
                        atoms.extend(q.atoms.iter().cloned());
                        next.push(PPFormula { bound, atoms });
                    }
                }
                acc = next;
            }
            acc
        }
        PositiveFormula::Exists(vars, body) => {
            let mut map = BTreeMap::new();
            let mut fresh = Vec::with_capacity(vars.len());
            for v in vars {
                let name = format!("?y{}", *counter);
                *counter += 1;
                map.insert(v.clone(), name.clone());
                fresh.push(name);
            }
            let renamed = substitute(body, &map);
            nf(&renamed, counter)
                .into_iter()
                .map(|mut pp| {
                    let mut bound = fresh.clone();
                    bound.extend(pp.bound.drain(..));
                    PPFormula { bound, atoms: pp.atoms }
                })
                .collect()
        }
    }
}

/// Result of the canonical-query construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalQuery {
    /// The equalities force two distinct constants together: the formula
    /// is unsatisfiable in every structure.
    Unsatisfiable,
    Query {
        structure: FiniteStructure,
        /// The element class of each requested free variable, in order.
        free_tuple: Vec<usize>,
    },
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("variable {var} is neither free nor bound in the pp formula")]
    UnscopedVar { var: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Build the canonical structure of a primitive positive formula: universe
/// = equality classes of its terms (all signature constants included),
/// tables = its relation atoms. For every structure `A` and tuple `a`,
/// `eval(A, pp, free -> a)` holds iff some homomorphism from the canonical
/// structure into `A` maps the returned tuple to `a`.
pub fn canonical_structure(
    pp: &PPFormula,
    free_vars: &[String],
    sig: &Arc<Signature>,
) -> Result<CanonicalQuery, CanonicalError> {
    // Term universe: free vars, bound vars, then signature constants.
    let mut term_ids: BTreeMap<Term, usize> = BTreeMap::new();
    let mut order: Vec<Term> = Vec::new();
    let intern = |t: Term, order: &mut Vec<Term>, ids: &mut BTreeMap<Term, usize>| -> usize {
        if let Some(&i) = ids.get(&t) {
            return i;
        }
        let i = order.len();
        ids.insert(t.clone(), i);
        order.push(t);
        i
    };
    for v in free_vars {
        intern(Term::Var(v.clone()), &mut order, &mut term_ids);
    }
    for v in &pp.bound {
        intern(Term::Var(v.clone()), &mut order, &mut term_ids);
    }
    for c in sig.constants() {
        intern(Term::Const(c.clone()), &mut order, &mut term_ids);
    }
    let lookup = |t: &Term| -> Result<usize, CanonicalError> {
        term_ids.get(t).copied().ok_or_else(|| match t {
            Term::Var(v) => CanonicalError::UnscopedVar { var: v.clone() },
            Term::Const(c) => CanonicalError::UnscopedVar { var: c.clone() },
        })
    };

    // Union-find over terms driven by the equality atoms.
    let mut parent: Vec<usize> = (0..order.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for atom in &pp.atoms {
        if let PPAtom::Eq(a, b) = atom {
            let (ra, rb) = (lookup(a)?, lookup(b)?);
            let (ra, rb) = (find(&mut parent, ra), find(&mut parent, rb));
            if ra != rb {
                // Union by smaller representative id for determinism.
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
            }
        }
    }
    // Two distinct constants merged: unsatisfiable.
    let const_roots: Vec<usize> = sig
        .constants()
        .iter()
        .map(|c| find(&mut parent, term_ids[&Term::Const(c.clone())]))
        .collect();
    for i in 0..const_roots.len() {
        for j in (i + 1)..const_roots.len() {
            if const_roots[i] == const_roots[j] {
                return Ok(CanonicalQuery::Unsatisfiable);
            }
        }
    }

    // Classes relabeled to 0..k-1 by smallest member id.
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..order.len() {
        let r = find(&mut parent, i);
        let next = class_of.len();
        class_of.entry(r).or_insert(next);
    }
    let size = class_of.len().max(1);

    let mut tables = vec![std::collections::BTreeSet::new(); sig.relations().len()];
    for atom in &pp.atoms {
        if let PPAtom::Rel(name, args) = atom {
            let rel = sig
                .relation_index(name)
                .ok_or_else(|| CanonicalError::UnscopedVar { var: name.clone() })?;
            let tuple = args
                .iter()
                .map(|t| Ok(class_of[&find(&mut parent, lookup(t)?)]))
                .collect::<Result<Vec<usize>, CanonicalError>>()?;
            tables[rel].insert(tuple);
        }
    }
    let const_vals = sig
        .constants()
        .iter()
        .map(|c| class_of[&find(&mut parent, term_ids[&Term::Const(c.clone())])])
        .collect();
    let free_tuple = free_vars
        .iter()
        .map(|v| class_of[&find(&mut parent, term_ids[&Term::Var(v.clone())])])
        .collect();
    let structure = FiniteStructure::new(sig.clone(), size, tables, const_vals)?;
    Ok(CanonicalQuery::Query { structure, free_tuple })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::{eval, Assignment};
    use crate::logic::parse::parse_formula;
    use crate::structures::Signature;

    fn s_sig() -> Arc<Signature> {
        Arc::new(Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap())
    }

    #[test]
    fn atom_is_its_own_normal_form() {
        let sig = s_sig();
        let f = parse_formula("(S x y)", &sig).unwrap();
        let nf = pp_normal_form(&f);
        assert_eq!(nf.len(), 1);
        assert!(nf[0].bound.is_empty());
        assert_eq!(nf[0].atoms.len(), 1);
    }

    #[test]
    fn or_splits_into_two_disjuncts() {
        let sig = s_sig();
        let f = parse_formula("(or (S x y) (S y x))", &sig).unwrap();
        assert_eq!(pp_normal_form(&f).len(), 2);
    }

    #[test]
    fn exists_over_or_distributes() {
        let sig = s_sig();
        let f = parse_formula("(exists (y) (or (S x y) (S y x)))", &sig).unwrap();
        let nf = pp_normal_form(&f);
        assert_eq!(nf.len(), 2);
        for pp in &nf {
            assert_eq!(pp.bound.len(), 1);
            assert_eq!(pp.atoms.len(), 1);
        }
    }

    #[test]
    fn normal_form_preserves_semantics_on_small_structures() {
        // Semantic agreement checked by brute force on all structures of
        // size <= 3 over {S/2} for a few representative formulas.
        let sig = s_sig();
        let formulas = [
            "(or (S x y) (S y x))",
            "(exists (y) (or (S x y) (S y x)))",
            "(and (or (S x x) (S y y)) (exists (z) (S x z)))",
            "(exists (y) (and (S x y) (exists (y) (S y x))))",
        ];
        for text in formulas {
            let f = parse_formula(text, &sig).unwrap();
            let nf = pp_normal_form(&f);
            let free: Vec<String> = f.free_vars().into_iter().collect();
            for n in 1..=3usize {
                for bits in 0..(1u32 << (n * n)) {
                    let mut table = std::collections::BTreeSet::new();
                    for i in 0..n {
                        for j in 0..n {
                            if bits >> (i * n + j) & 1 == 1 {
                                table.insert(vec![i, j]);
                            }
                        }
                    }
                    let a =
                        FiniteStructure::new(sig.clone(), n, vec![table], vec![]).unwrap();
                    let mut idx = vec![0usize; free.len()];
                    loop {
                        let asg: Assignment =
                            free.iter().cloned().zip(idx.iter().copied()).collect();
                        let lhs = eval(&a, &f, &asg).unwrap();
                        let rhs = nf
                            .iter()
                            .any(|pp| eval(&a, &pp.to_formula(), &asg).unwrap());
                        assert_eq!(lhs, rhs, "{text} on n={n} bits={bits} asg={asg:?}");
                        let mut k = free.len();
                        loop {
                            if k == 0 {
                                break;
                            }
                            k -= 1;
                            idx[k] += 1;
                            if idx[k] < n {
                                break;
                            }
                            idx[k] = 0;
                        }
                        if idx.iter().all(|&x| x == 0) {
                            break;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_structure_of_edge() {
        let sig = s_sig();
        let f = parse_formula("(S x y)", &sig).unwrap();
        let pp = pp_normal_form(&f).remove(0);
        match canonical_structure(&pp, &["x".into(), "y".into()], &sig).unwrap() {
            CanonicalQuery::Query { structure, free_tuple } => {
                assert_eq!(structure.size(), 2);
                assert_eq!(free_tuple, vec![0, 1]);
                assert!(structure.holds(0, &[0, 1]));
                assert_eq!(structure.table(0).len(), 1);
            }
            CanonicalQuery::Unsatisfiable => panic!(),
        }
    }

    #[test]
    fn canonical_structure_of_path() {
        let sig = s_sig();
        let f = parse_formula("(exists (z) (and (S x z) (S z y)))", &sig).unwrap();
        let pp = pp_normal_form(&f).remove(0);
        match canonical_structure(&pp, &["x".into(), "y".into()], &sig).unwrap() {
            CanonicalQuery::Query { structure, free_tuple } => {
                assert_eq!(structure.size(), 3);
                assert_eq!(free_tuple.len(), 2);
                assert_eq!(structure.table(0).len(), 2);
            }
            CanonicalQuery::Unsatisfiable => panic!(),
        }
    }

    #[test]
    fn equality_unifies_variables() {
        let sig = s_sig();
        let f = parse_formula("(and (= x y) (S x y))", &sig).unwrap();
        let pp = pp_normal_form(&f).remove(0);
        match canonical_structure(&pp, &["x".into(), "y".into()], &sig).unwrap() {
            CanonicalQuery::Query { structure, free_tuple } => {
                assert_eq!(structure.size(), 1);
                assert_eq!(free_tuple, vec![0, 0]);
                assert!(structure.holds(0, &[0, 0]));
            }
            CanonicalQuery::Unsatisfiable => panic!(),
        }
    }

    #[test]
    fn merging_distinct_constants_is_unsatisfiable() {
        let sig = Arc::new(
            Signature::new(
                vec![("P".to_string(), 3)],
                vec!["e".to_string(), "a".to_string()],
            )
            .unwrap(),
        );
        let f = parse_formula("(= e a)", &sig).unwrap();
        let pp = pp_normal_form(&f).remove(0);
        assert_eq!(
            canonical_structure(&pp, &[], &sig).unwrap(),
            CanonicalQuery::Unsatisfiable
        );
    }
}
