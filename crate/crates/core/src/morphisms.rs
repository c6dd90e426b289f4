//! Homomorphism search between finite structures and the derived checks:
//! embedding, immersion and positive-existential type comparison.

use crate::logic::ast::{PositiveFormula, Term};
use crate::logic::eval::{tpqf, TpqfAtom};
use crate::logic::fragment::{FormulaFragment, FragmentContext, SatTable};
use crate::structures::{FiniteStructure, StructureError};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("signature mismatch between source and target")]
    SignatureMismatch,
    #[error("tuples have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("element {element} out of range for universe {size}")]
    BadElement { element: usize, size: usize },
    #[error("inconsistent pins: element {element} pinned to both {first} and {second}")]
    InconsistentPins { element: usize, first: usize, second: usize },
    #[error("map is not a homomorphism: relation {rel} tuple {tuple:?} not preserved")]
    NotAHomomorphism { rel: usize, tuple: Vec<usize> },
    #[error("map does not respect constant {index}")]
    ConstantNotPreserved { index: usize },
    #[error("not an immersion: the given map has no retraction")]
    NotAnImmersion,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A verified homomorphism, stored as the image of each source element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&x| self.map[x]).collect()
    }

    pub fn serialize(&self) -> String {
        let pairs: Vec<String> =
            self.map.iter().enumerate().map(|(i, j)| format!("({i} {j})")).collect();
        format!("(map {})", pairs.join(" "))
    }
}

/// Validate that `map` is a homomorphism from `a` to `b`.
pub fn verify_homomorphism(
    a: &FiniteStructure,
    b: &FiniteStructure,
    map: &[usize],
) -> Result<Homomorphism, MorphismError> {
    if a.sig().as_ref() != b.sig().as_ref() {
        return Err(MorphismError::SignatureMismatch);
    }
    if map.len() != a.size() {
        return Err(MorphismError::LengthMismatch { left: map.len(), right: a.size() });
    }
    for &x in map {
        if x >= b.size() {
            return Err(MorphismError::BadElement { element: x, size: b.size() });
        }
    }
    for rel in 0..a.sig().relations().len() {
        for tuple in a.table(rel) {
            let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
            if !b.holds(rel, &image) {
                return Err(MorphismError::NotAHomomorphism { rel, tuple: tuple.clone() });
            }
        }
    }
    for i in 0..a.sig().constants().len() {
        if map[a.const_val(i)] != b.const_val(i) {
            return Err(MorphismError::ConstantNotPreserved { index: i });
        }
    }
    Ok(Homomorphism { map: map.to_vec() })
}

fn resolve_pins(
    a: &FiniteStructure,
    b: &FiniteStructure,
    pins: &[(usize, usize)],
) -> Result<Vec<Option<usize>>, MorphismError> {
    let mut pinned: Vec<Option<usize>> = vec![None; a.size()];
    let mut add = |source: usize, target: usize| -> Result<(), MorphismError> {
        if source >= a.size() {
            return Err(MorphismError::BadElement { element: source, size: a.size() });
        }
        if target >= b.size() {
            return Err(MorphismError::BadElement { element: target, size: b.size() });
        }
        match pinned[source] {
            None => {
                pinned[source] = Some(target);
                Ok(())
            }
            Some(prev) if prev == target => Ok(()),
            Some(prev) => {
                Err(MorphismError::InconsistentPins { element: source, first: prev, second: target })
            }
        }
    };
    for i in 0..a.sig().constants().len() {
        add(a.const_val(i), b.const_val(i))?;
    }
    for &(s, t) in pins {
        add(s, t)?;
    }
    Ok(pinned)
}

/// Backtracking search over all homomorphisms from `a` to `b` respecting
/// the pins. Source elements are assigned in numeric order with numeric
/// candidate order, so maps are visited in lexicographic order. The
/// visitor returns false to stop the search; the function reports whether
/// the search ran to completion.
pub fn for_each_homomorphism(
    a: &FiniteStructure,
    b: &FiniteStructure,
    pins: &[(usize, usize)],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<bool, MorphismError> {
    if a.sig().as_ref() != b.sig().as_ref() {
        return Err(MorphismError::SignatureMismatch);
    }
    let pinned = resolve_pins(a, b, pins)?;
    // Tuples become checkable once their largest element is assigned.
    let mut checks: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); a.size()];
    for rel in 0..a.sig().relations().len() {
        for tuple in a.table(rel) {
            let last = *tuple.iter().max().unwrap();
            checks[last].push((rel, tuple));
        }
    }
    let mut map = vec![0usize; a.size()];
    fn rec(
        a: &FiniteStructure,
        b: &FiniteStructure,
        pinned: &[Option<usize>],
        checks: &[Vec<(usize, &Vec<usize>)>],
        map: &mut Vec<usize>,
        v: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if v == a.size() {
            return visit(map);
        }
        let candidates: Vec<usize> = match pinned[v] {
            Some(t) => vec![t],
            None => (0..b.size()).collect(),
        };
        for t in candidates {
            map[v] = t;
            let ok = checks[v].iter().all(|(rel, tuple)| {
                let image: Vec<usize> = tuple.iter().map(|&x| map[x]).collect();
                b.holds(*rel, &image)
            });
            if ok && !rec(a, b, pinned, checks, map, v + 1, visit) {
                return false;
            }
        }
        true
    }
    Ok(rec(a, b, &pinned, &checks, &mut map, 0, visit))
}

/// All homomorphisms (up to `limit`) from `a` to `b` respecting the pins,
/// in lexicographic map order.
pub fn find_homomorphisms(
    a: &FiniteStructure,
    b: &FiniteStructure,
    pins: &[(usize, usize)],
    limit: Option<usize>,
) -> Result<Vec<Homomorphism>, MorphismError> {
    let mut out = Vec::new();
    for_each_homomorphism(a, b, pins, &mut |map| {
        out.push(Homomorphism { map: map.to_vec() });
        limit.map_or(true, |l| out.len() < l)
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingCheck {
    Holds,
    Fails(EmbeddingFailure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingFailure {
    /// Two distinct source elements share an image.
    Merged { left: usize, right: usize },
    /// The atom holds of the images but not of the listed source tuple.
    AtomNotReflected { rel: usize, tuple: Vec<usize> },
}

impl EmbeddingCheck {
    pub fn holds(&self) -> bool {
        matches!(self, EmbeddingCheck::Holds)
    }
}

/// An embedding is an injective homomorphism whose images satisfy no atoms
/// beyond those of their sources.
pub fn is_embedding(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
) -> Result<EmbeddingCheck, MorphismError> {
    verify_homomorphism(a, b, &f.map)?;
    for left in 0..a.size() {
        for right in (left + 1)..a.size() {
            if f.map[left] == f.map[right] {
                return Ok(EmbeddingCheck::Fails(EmbeddingFailure::Merged { left, right }));
            }
        }
    }
    for rel in 0..a.sig().relations().len() {
        let arity = a.sig().arity(rel);
        let mut tuple = vec![0usize; arity];
        loop {
            let image: Vec<usize> = tuple.iter().map(|&x| f.map[x]).collect();
            if b.holds(rel, &image) && !a.holds(rel, &tuple) {
                return Ok(EmbeddingCheck::Fails(EmbeddingFailure::AtomNotReflected {
                    rel,
                    tuple,
                }));
            }
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < a.size() {
                    break;
                }
                tuple[k] = 0;
            }
            if tuple.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    Ok(EmbeddingCheck::Holds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImmersionMode {
    Retraction,
    Oracle(FormulaFragment),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImmersionCheck {
    Holds {
        /// The retraction certificate; absent in oracle mode.
        retraction: Option<Homomorphism>,
    },
    Fails {
        /// A positive formula true of the image tuple in the target but
        /// false of the source tuple in the source. Free variables x1, x2,
        /// ... correspond to the positions of `source_tuple`.
        formula: PositiveFormula,
        source_tuple: Vec<usize>,
    },
}

impl ImmersionCheck {
    pub fn holds(&self) -> bool {
        matches!(self, ImmersionCheck::Holds { .. })
    }
}

/// Check that `f` is an immersion. RETRACTION mode is exact for finite
/// relational structures: `f` is an immersion iff some homomorphism
/// g: B -> A satisfies g(f(x)) = x. ORACLE mode checks reflection of every
/// fragment formula on every tuple; it is sound but only as strong as the
/// fragment, and exists to validate the retraction criterion.
pub fn is_immersion(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
    mode: ImmersionMode,
) -> Result<ImmersionCheck, MorphismError> {
    match mode {
        ImmersionMode::Oracle(frag) => {
            verify_homomorphism(a, b, &f.map)?;
            let ctx = FragmentContext::new(a.sig().clone(), frag);
            let oracle = ImmersionOracle::new(&ctx, a, b);
            Ok(oracle.check(f))
        }
        ImmersionMode::Retraction => {
            match is_embedding(a, b, f)? {
                EmbeddingCheck::Holds => {}
                EmbeddingCheck::Fails(EmbeddingFailure::Merged { left, right }) => {
                    // x1 = x2 holds of the merged images, not the sources.
                    return Ok(ImmersionCheck::Fails {
                        formula: PositiveFormula::Eq(
                            Term::Var("x1".to_string()),
                            Term::Var("x2".to_string()),
                        ),
                        source_tuple: vec![left, right],
                    });
                }
                EmbeddingCheck::Fails(EmbeddingFailure::AtomNotReflected { rel, tuple }) => {
                    let name = a.sig().relations()[rel].0.clone();
                    let args = (1..=tuple.len())
                        .map(|i| Term::Var(format!("x{i}")))
                        .collect();
                    return Ok(ImmersionCheck::Fails {
                        formula: PositiveFormula::Atom(name, args),
                        source_tuple: tuple,
                    });
                }
            }
            let pins: Vec<(usize, usize)> =
                (0..a.size()).map(|x| (f.map[x], x)).collect();
            let retraction = find_homomorphisms(b, a, &pins, Some(1))?;
            if let Some(g) = retraction.into_iter().next() {
                return Ok(ImmersionCheck::Holds { retraction: Some(g) });
            }
            let (formula, source_tuple) = distinguishing_formula(a, b, f)?;
            Ok(ImmersionCheck::Fails { formula, source_tuple })
        }
    }
}

/// When no retraction exists, the canonical query of the whole target,
/// pinned at the image of `a`, is true in `b` and false in `a`. Greedily
/// drop atoms while that stays so, then existentially close the elements
/// outside the image.
fn distinguishing_formula(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
) -> Result<(PositiveFormula, Vec<usize>), MorphismError> {
    let pins: Vec<(usize, usize)> = (0..a.size()).map(|x| (f.map[x], x)).collect();
    let mut atoms: Vec<(usize, Vec<usize>)> = Vec::new();
    for rel in 0..b.sig().relations().len() {
        for tuple in b.table(rel) {
            atoms.push((rel, tuple.clone()));
        }
    }
    let unsatisfiable = |kept: &[(usize, Vec<usize>)]| -> Result<bool, MorphismError> {
        let mut tables = vec![std::collections::BTreeSet::new(); b.sig().relations().len()];
        for (rel, tuple) in kept {
            tables[*rel].insert(tuple.clone());
        }
        let q = FiniteStructure::new(
            b.sig().clone(),
            b.size(),
            tables,
            b.const_vals().to_vec(),
        )?;
        Ok(find_homomorphisms(&q, a, &pins, Some(1))?.is_empty())
    };
    debug_assert!(unsatisfiable(&atoms)?);
    let mut idx = 0;
    while idx < atoms.len() {
        let removed = atoms.remove(idx);
        if unsatisfiable(&atoms)? {
            continue;
        }
        atoms.insert(idx, removed);
        idx += 1;
    }
    // Elements still mentioned: image elements become free variables (in
    // source order), the rest are bound.
    let mut used = vec![false; b.size()];
    for (_, tuple) in &atoms {
        for &x in tuple {
            used[x] = true;
        }
    }
    let mut names: Vec<Option<String>> = vec![None; b.size()];
    let mut source_tuple = Vec::new();
    for x in 0..a.size() {
        if used[f.map[x]] {
            source_tuple.push(x);
            names[f.map[x]] = Some(format!("x{}", source_tuple.len()));
        }
    }
    let mut bound = Vec::new();
    for e in 0..b.size() {
        if used[e] && names[e].is_none() {
            bound.push(format!("y{}", bound.len() + 1));
            names[e] = Some(bound.last().unwrap().clone());
        }
    }
    let parts: Vec<PositiveFormula> = atoms
        .iter()
        .map(|(rel, tuple)| {
            PositiveFormula::Atom(
                b.sig().relations()[*rel].0.clone(),
                tuple.iter().map(|&x| Term::Var(names[x].clone().unwrap())).collect(),
            )
        })
        .collect();
    let body = match parts.len() {
        0 => PositiveFormula::Truth,
        1 => parts.into_iter().next().unwrap(),
        _ => PositiveFormula::And(parts),
    };
    let formula = if bound.is_empty() {
        body
    } else {
        PositiveFormula::Exists(bound, Box::new(body))
    };
    Ok((formula, source_tuple))
}

/// Precomputed reflection data for checking many homomorphisms between one
/// pair of structures against one fragment.
pub struct ImmersionOracle<'a> {
    ctx: &'a FragmentContext,
    sat_a: SatTable,
    sat_b: SatTable,
    /// bad[ia * tb + ib] set iff some fragment conjunction holds at target
    /// tuple ib but not at source tuple ia.
    bad: Vec<bool>,
}

impl<'a> ImmersionOracle<'a> {
    pub fn new(ctx: &'a FragmentContext, a: &FiniteStructure, b: &FiniteStructure) -> Self {
        let sat_a = ctx.sat_table(a);
        let sat_b = ctx.sat_table(b);
        let cols_a: Vec<Vec<u64>> = (0..sat_a.free_bits).map(|i| sat_a.column(i)).collect();
        let cols_b: Vec<Vec<u64>> = (0..sat_b.free_bits).map(|i| sat_b.column(i)).collect();
        let mut bad = vec![false; sat_a.free_bits * sat_b.free_bits];
        for (ia, ca) in cols_a.iter().enumerate() {
            for (ib, cb) in cols_b.iter().enumerate() {
                bad[ia * sat_b.free_bits + ib] =
                    cb.iter().zip(ca.iter()).any(|(x, y)| x & !y != 0);
            }
        }
        ImmersionOracle { ctx, sat_a, sat_b, bad }
    }

    pub fn check(&self, f: &Homomorphism) -> ImmersionCheck {
        let m = self.ctx.frag().max_free;
        let n = self.sat_a.n;
        let mut tuple = vec![0usize; m];
        loop {
            let ia = self.sat_a.tuple_index(&tuple);
            let ib = self.sat_b.tuple_index(&f.apply_tuple(&tuple));
            if self.bad[ia * self.sat_b.free_bits + ib] {
                // Recover the least offending conjunction for the report.
                let row = (0..self.sat_a.rows.len())
                    .find(|&r| self.sat_b.holds(r, ib) && !self.sat_a.holds(r, ia))
                    .unwrap();
                let conjs = self.ctx.conjunctions();
                return ImmersionCheck::Fails {
                    formula: self.ctx.conj_to_formula(&conjs[row]),
                    source_tuple: tuple,
                };
            }
            let mut k = m;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < n {
                    break;
                }
                tuple[k] = 0;
            }
            if tuple.iter().all(|&x| x == 0) {
                return ImmersionCheck::Holds { retraction: None };
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeCheck<W> {
    Holds(W),
    Fails,
}

impl<W> TypeCheck<W> {
    pub fn holds(&self) -> bool {
        matches!(self, TypeCheck::Holds(_))
    }
}

/// Positive-existential type containment tp(a-tuple) <= tp(b-tuple): holds
/// iff some homomorphism maps the first tuple pointwise onto the second.
pub fn tp_leq(
    a: &FiniteStructure,
    atuple: &[usize],
    b: &FiniteStructure,
    btuple: &[usize],
) -> Result<TypeCheck<Homomorphism>, MorphismError> {
    if atuple.len() != btuple.len() {
        return Err(MorphismError::LengthMismatch {
            left: atuple.len(),
            right: btuple.len(),
        });
    }
    let pins: Vec<(usize, usize)> =
        atuple.iter().copied().zip(btuple.iter().copied()).collect();
    match find_homomorphisms(a, b, &pins, Some(1)) {
        Ok(homs) => Ok(homs
            .into_iter()
            .next()
            .map_or(TypeCheck::Fails, TypeCheck::Holds)),
        // Repeated source elements pinned to different targets: the
        // equality atom is not preserved, so containment fails.
        Err(MorphismError::InconsistentPins { .. }) => Ok(TypeCheck::Fails),
        Err(e) => Err(e),
    }
}

/// Quantifier-free type containment: every atom (including equalities)
/// true of the first tuple is true of the second at the same positions.
/// Fails carry the least missing atom.
pub fn tpqf_leq(
    a: &FiniteStructure,
    atuple: &[usize],
    b: &FiniteStructure,
    btuple: &[usize],
) -> Result<TypeCheck<()>, MorphismError> {
    if atuple.len() != btuple.len() {
        return Err(MorphismError::LengthMismatch {
            left: atuple.len(),
            right: btuple.len(),
        });
    }
    if a.sig().as_ref() != b.sig().as_ref() {
        return Err(MorphismError::SignatureMismatch);
    }
    let ta = tpqf(a, atuple);
    let tb = tpqf(b, btuple);
    if ta.is_subset(&tb) {
        Ok(TypeCheck::Holds(()))
    } else {
        Ok(TypeCheck::Fails)
    }
}

/// The least atom of tpqf(a-tuple) missing from tpqf(b-tuple), if any.
pub fn tpqf_gap(
    a: &FiniteStructure,
    atuple: &[usize],
    b: &FiniteStructure,
    btuple: &[usize],
) -> Option<TpqfAtom> {
    let ta = tpqf(a, atuple);
    let tb = tpqf(b, btuple);
    ta.into_iter().find(|atom| !tb.contains(atom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::{eval, Assignment};
    use crate::structures::{chain, cycle, disjoint_sum, edgeless};

    fn naive_hom_count(a: &FiniteStructure, b: &FiniteStructure) -> usize {
        let mut count = 0;
        let mut map = vec![0usize; a.size()];
        loop {
            if verify_homomorphism(a, b, &map).is_ok() {
                count += 1;
            }
            let mut k = a.size();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                map[k] += 1;
                if map[k] < b.size() {
                    break;
                }
                map[k] = 0;
            }
            if map.iter().all(|&x| x == 0) {
                break;
            }
        }
        count
    }

    #[test]
    fn hom_counts_match_naive_oracle() {
        let c3 = cycle(3);
        let c5 = cycle(5);
        let cases = [
            (c3.clone(), c3.clone(), 3),
            (c3.clone(), c5.clone(), 0),
            (c5.clone(), c5.clone(), 5),
            (chain(2), c3.clone(), 3),
            (disjoint_sum(&c3, &c3).unwrap(), c3.clone(), 9),
        ];
        for (a, b, expected) in cases {
            let homs = find_homomorphisms(&a, &b, &[], None).unwrap();
            assert_eq!(homs.len(), expected);
            assert_eq!(naive_hom_count(&a, &b), expected);
            let mut sorted = homs.clone();
            sorted.sort();
            assert_eq!(homs, sorted);
        }
    }

    #[test]
    fn pins_restrict_the_search() {
        let c3 = cycle(3);
        let homs = find_homomorphisms(&c3, &c3, &[(0, 1)], None).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map, vec![1, 2, 0]);
    }

    #[test]
    fn contradictory_pins_are_an_error() {
        let c3 = cycle(3);
        assert!(matches!(
            find_homomorphisms(&c3, &c3, &[(0, 1), (0, 2)], None),
            Err(MorphismError::InconsistentPins { .. })
        ));
    }

    #[test]
    fn inclusion_into_sum_is_an_embedding_but_not_an_immersion() {
        let c3 = cycle(3);
        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        let f = verify_homomorphism(&c3, &c3c5, &[0, 1, 2]).unwrap();
        assert!(is_embedding(&c3, &c3c5, &f).unwrap().holds());
        match is_immersion(&c3, &c3c5, &f, ImmersionMode::Retraction).unwrap() {
            ImmersionCheck::Fails { formula, source_tuple } => {
                assert!(source_tuple.is_empty());
                // The minimized certificate is the closed 5-walk.
                assert!(eval(&c3c5, &formula, &Assignment::new()).unwrap());
                assert!(!eval(&c3, &formula, &Assignment::new()).unwrap());
                assert_eq!(formula.free_vars().len(), 0);
                let text = formula.to_string();
                assert_eq!(text.matches("(S ").count(), 5, "{text}");
            }
            ImmersionCheck::Holds { .. } => panic!("no retraction exists"),
        }
    }

    #[test]
    fn inclusion_into_doubled_structure_is_an_immersion() {
        let c3 = cycle(3);
        let c3c3 = disjoint_sum(&c3, &c3).unwrap();
        let f = verify_homomorphism(&c3, &c3c3, &[0, 1, 2]).unwrap();
        match is_immersion(&c3, &c3c3, &f, ImmersionMode::Retraction).unwrap() {
            ImmersionCheck::Holds { retraction } => {
                let g = retraction.unwrap();
                for x in 0..3 {
                    assert_eq!(g.map[f.map[x]], x);
                }
            }
            ImmersionCheck::Fails { .. } => panic!("folding retraction exists"),
        }
    }

    #[test]
    fn identity_is_an_immersion() {
        let c3 = cycle(3);
        let f = verify_homomorphism(&c3, &c3, &[0, 1, 2]).unwrap();
        assert!(is_immersion(&c3, &c3, &f, ImmersionMode::Retraction).unwrap().holds());
    }

    #[test]
    fn merge_map_fails_embedding() {
        let pts = edgeless(2);
        let single = edgeless(1);
        let f = verify_homomorphism(&pts, &single, &[0, 0]).unwrap();
        assert_eq!(
            is_embedding(&pts, &single, &f).unwrap(),
            EmbeddingCheck::Fails(EmbeddingFailure::Merged { left: 0, right: 1 })
        );
    }

    #[test]
    fn oracle_agrees_on_the_sum_inclusion() {
        let c3 = cycle(3);
        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        let f = verify_homomorphism(&c3, &c3c5, &[0, 1, 2]).unwrap();
        // v=5, k=5 suffices to express the closed 5-walk.
        let frag = FormulaFragment::new(0, 5, 5);
        match is_immersion(&c3, &c3c5, &f, ImmersionMode::Oracle(frag)).unwrap() {
            ImmersionCheck::Fails { formula, source_tuple } => {
                assert!(source_tuple.is_empty());
                assert!(eval(&c3c5, &formula, &Assignment::new()).unwrap());
                assert!(!eval(&c3, &formula, &Assignment::new()).unwrap());
            }
            ImmersionCheck::Holds { .. } => panic!("oracle should find the 5-walk"),
        }
    }

    #[test]
    fn tp_leq_on_cycle_tuples() {
        let c3 = cycle(3);
        assert!(tp_leq(&c3, &[0, 1], &c3, &[1, 2]).unwrap().holds());
        assert!(tp_leq(&c3, &[0, 1], &c3, &[0, 1]).unwrap().holds());
        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        assert!(!tp_leq(&c3c5, &[0, 1], &c3c5, &[3, 4]).unwrap().holds());
    }

    #[test]
    fn tpqf_leq_ignores_walk_structure() {
        let c3 = cycle(3);
        let c3c5 = disjoint_sum(&c3, &cycle(5)).unwrap();
        assert!(tpqf_leq(&c3, &[0, 1], &c3c5, &[3, 4]).unwrap().holds());
        assert!(!tpqf_leq(&c3, &[0, 0], &c3, &[0, 1]).unwrap().holds());
        assert!(tpqf_leq(&c3, &[2, 0], &c3, &[2, 0]).unwrap().holds());
    }

    #[test]
    fn repeated_elements_pinned_apart_fail_tp_leq() {
        let c3 = cycle(3);
        assert!(!tp_leq(&c3, &[0, 0], &c3, &[0, 1]).unwrap().holds());
    }

    #[test]
    fn hom_count_against_full_filter_on_small_pairs() {
        for a in [edgeless(2), chain(2), cycle(3)] {
            for b in [edgeless(2), chain(3), cycle(3)] {
                let fast = find_homomorphisms(&a, &b, &[], None).unwrap().len();
                assert_eq!(fast, naive_hom_count(&a, &b));
            }
        }
    }
}
