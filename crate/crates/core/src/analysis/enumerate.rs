//! The finite model finder: ground the theory's h-inductive sentences over
//! a fixed universe, enumerate satisfying relation tables with a DPLL-style
//! backtracking search, and deduplicate up to isomorphism.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::logic::ast::{PositiveFormula, Term, Theory};
use crate::logic::eval::satisfies;
use crate::logic::normal::{pp_normal_form, PPAtom, PPFormula};
use crate::structures::{
    canonical_form, canonicalize, isomorphic, refinement_colors, FiniteStructure,
};

use super::{AnalysisError, SearchBudget};

/// Ground relation atoms of one universe size, densely numbered.
struct AtomSpace {
    n: usize,
    offsets: Vec<usize>,
    arities: Vec<usize>,
    total: usize,
}

impl AtomSpace {
    fn new(theory: &Theory, n: usize) -> Self {
        let mut offsets = Vec::new();
        let mut arities = Vec::new();
        let mut total = 0usize;
        for (_, arity) in theory.sig.relations() {
            offsets.push(total);
            arities.push(*arity);
            total += n.pow(*arity as u32);
        }
        AtomSpace { n, offsets, arities, total }
    }

    fn encode(&self, rel: usize, tuple: &[usize]) -> u32 {
        let mut idx = 0usize;
        for &x in tuple {
            idx = idx * self.n + x;
        }
        (self.offsets[rel] + idx) as u32
    }

    fn decode(&self, atom: u32) -> (usize, Vec<usize>) {
        let atom = atom as usize;
        let rel = self
            .offsets
            .iter()
            .rposition(|&off| off <= atom)
            .unwrap();
        let mut idx = atom - self.offsets[rel];
        let arity = self.arities[rel];
        let mut tuple = vec![0usize; arity];
        for k in (0..arity).rev() {
            tuple[k] = idx % self.n;
            idx /= self.n;
        }
        (rel, tuple)
    }
}

/// A ground clause in implication form: if all `neg` atoms hold then some
/// `pos` atom holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Clause {
    neg: Vec<u32>,
    pos: Vec<u32>,
}

/// Rare general form for conclusions that ground to multi-atom disjuncts;
/// checked at leaves only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct GeneralClause {
    premise: Vec<u32>,
    disjuncts: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Grounding {
    Unsat,
    Clauses { lits: Vec<Clause>, general: Vec<GeneralClause> },
}

fn resolve(term: &Term, slots: &HashMap<String, usize>, asg: &[Option<usize>], consts: &HashMap<String, usize>) -> Option<usize> {
    match term {
        Term::Var(v) => slots.get(v).and_then(|&i| asg[i]),
        Term::Const(c) => consts.get(c).copied(),
    }
}

/// Three-valued evaluation of a conclusion under a partial assignment,
/// treating every relation atom as unknown. Some(true) means true however
/// the remaining variables and atoms turn out.
fn conclusion_partial(
    f: &PositiveFormula,
    slots: &HashMap<String, usize>,
    asg: &[Option<usize>],
    consts: &HashMap<String, usize>,
) -> Option<bool> {
    match f {
        PositiveFormula::Truth => Some(true),
        PositiveFormula::Falsity => Some(false),
        PositiveFormula::Atom(..) => None,
        PositiveFormula::Eq(a, b) => {
            match (resolve(a, slots, asg, consts), resolve(b, slots, asg, consts)) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            }
        }
        PositiveFormula::And(fs) => {
            let mut all_true = true;
            for x in fs {
                match conclusion_partial(x, slots, asg, consts) {
                    Some(false) => return Some(false),
                    Some(true) => {}
                    None => all_true = false,
                }
            }
            if all_true {
                Some(true)
            } else {
                None
            }
        }
        PositiveFormula::Or(fs) => {
            let mut all_false = true;
            for x in fs {
                match conclusion_partial(x, slots, asg, consts) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => all_false = false,
                }
            }
            if all_false {
                Some(false)
            } else {
                None
            }
        }
        PositiveFormula::Exists(vars, body) => {
            // Shadowed variables become unknown.
            let mut inner = slots.clone();
            for v in vars {
                inner.remove(v);
            }
            conclusion_partial(body, &inner, asg, consts)
        }
    }
}

/// Ground the conclusion instance to a disjunction of atom conjunctions.
/// None means the conclusion is already true (the clause is vacuous).
fn ground_dnf(
    pps: &[PPFormula],
    space: &AtomSpace,
    slots: &HashMap<String, usize>,
    asg: &[Option<usize>],
    consts: &HashMap<String, usize>,
    sig: &crate::structures::Signature,
) -> Option<Vec<Vec<u32>>> {
    let mut disjuncts: Vec<Vec<u32>> = Vec::new();
    for pp in pps {
        let mut bound_vals = vec![0usize; pp.bound.len()];
        loop {
            let mut all_slots = slots.clone();
            let mut full = asg.to_vec();
            for (v, &val) in pp.bound.iter().zip(bound_vals.iter()) {
                all_slots.insert(v.clone(), full.len());
                full.push(Some(val));
            }
            let mut atoms = Vec::new();
            let mut dead = false;
            for atom in &pp.atoms {
                match atom {
                    PPAtom::Eq(a, b) => {
                        let x = resolve(a, &all_slots, &full, consts).unwrap();
                        let y = resolve(b, &all_slots, &full, consts).unwrap();
                        if x != y {
                            dead = true;
                            break;
                        }
                    }
                    PPAtom::Rel(name, args) => {
                        let rel = sig.relation_index(name).unwrap();
                        let tuple: Vec<usize> = args
                            .iter()
                            .map(|t| resolve(t, &all_slots, &full, consts).unwrap())
                            .collect();
                        atoms.push(space.encode(rel, &tuple));
                    }
                }
            }
            if !dead {
                atoms.sort_unstable();
                atoms.dedup();
                if atoms.is_empty() {
                    return None;
                }
                disjuncts.push(atoms);
            }
            let mut k = bound_vals.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                bound_vals[k] += 1;
                if bound_vals[k] < space.n {
                    break;
                }
                bound_vals[k] = 0;
            }
            if bound_vals.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    disjuncts.sort_unstable();
    disjuncts.dedup();
    Some(disjuncts)
}

/// Ground every axiom over universe {0..n-1} with the given constant
/// interpretation.
fn ground(theory: &Theory, n: usize, const_vals: &[usize], space: &AtomSpace) -> Grounding {
    let consts: HashMap<String, usize> = theory
        .sig
        .constants()
        .iter()
        .cloned()
        .zip(const_vals.iter().copied())
        .collect();
    let mut lit_set: HashSet<Clause> = HashSet::new();
    let mut gen_set: HashSet<GeneralClause> = HashSet::new();
    for (_, sentence) in &theory.axioms {
        let concl_pps = pp_normal_form(&sentence.conclusion);
        for pp in pp_normal_form(&sentence.premise) {
            // Universal variables first so the conclusion can prune early;
            // premise existentials are universal once in premise position.
            let mut vars: Vec<String> = sentence.vars.clone();
            for b in &pp.bound {
                if !vars.contains(b) {
                    vars.push(b.clone());
                }
            }
            let slots: HashMap<String, usize> =
                vars.iter().cloned().zip(0..).collect();
            let mut asg: Vec<Option<usize>> = vec![None; vars.len()];
            let eq_atoms: Vec<(&Term, &Term)> = pp
                .atoms
                .iter()
                .filter_map(|a| match a {
                    PPAtom::Eq(x, y) => Some((x, y)),
                    _ => None,
                })
                .collect();
            let rel_atoms: Vec<(&String, &Vec<Term>)> = pp
                .atoms
                .iter()
                .filter_map(|a| match a {
                    PPAtom::Rel(name, args) => Some((name, args)),
                    _ => None,
                })
                .collect();
            // Depth-first assignment of the universal variables.
            let mut depth = 0usize;
            let mut next_val = vec![0usize; vars.len() + 1];
            loop {
                if depth == vars.len() {
                    // A full instance: emit its clause. Equality atoms are
                    // pruned during assignment, but a premise with fewer
                    // variables than equalities (constants only) reaches
                    // here unchecked.
                    let eq_holds = eq_atoms.iter().all(|(a, b)| {
                        resolve(a, &slots, &asg, &consts).unwrap()
                            == resolve(b, &slots, &asg, &consts).unwrap()
                    });
                    if !eq_holds {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        continue;
                    }
                    let mut premise = Vec::new();
                    for (name, args) in &rel_atoms {
                        let rel = theory.sig.relation_index(name).unwrap();
                        let tuple: Vec<usize> = args
                            .iter()
                            .map(|t| resolve(t, &slots, &asg, &consts).unwrap())
                            .collect();
                        premise.push(space.encode(rel, &tuple));
                    }
                    premise.sort_unstable();
                    premise.dedup();
                    match ground_dnf(&concl_pps, space, &slots, &asg, &consts, &theory.sig) {
                        None => {}
                        Some(disjuncts) => {
                            let implied = disjuncts
                                .iter()
                                .any(|d| d.iter().all(|a| premise.contains(a)));
                            if !implied {
                                if disjuncts.is_empty() && premise.is_empty() {
                                    return Grounding::Unsat;
                                }
                                if disjuncts.iter().all(|d| d.len() == 1) {
                                    let mut pos: Vec<u32> =
                                        disjuncts.iter().map(|d| d[0]).collect();
                                    pos.sort_unstable();
                                    pos.dedup();
                                    if !pos.iter().any(|a| premise.contains(a)) {
                                        lit_set.insert(Clause { neg: premise, pos });
                                    }
                                } else {
                                    gen_set.insert(GeneralClause {
                                        premise,
                                        disjuncts,
                                    });
                                }
                            }
                        }
                    }
                    // Backtrack.
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    continue;
                }
                let v = next_val[depth];
                if v >= n {
                    next_val[depth] = 0;
                    asg[depth] = None;
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    continue;
                }
                next_val[depth] += 1;
                asg[depth] = Some(v);
                // Prune: premise equality already false, or conclusion
                // already true.
                let eq_ok = eq_atoms.iter().all(|(a, b)| {
                    match (
                        resolve(a, &slots, &asg, &consts),
                        resolve(b, &slots, &asg, &consts),
                    ) {
                        (Some(x), Some(y)) => x == y,
                        _ => true,
                    }
                });
                if !eq_ok {
                    asg[depth] = None;
                    continue;
                }
                if conclusion_partial(&sentence.conclusion, &slots, &asg, &consts)
                    == Some(true)
                {
                    asg[depth] = None;
                    continue;
                }
                depth += 1;
                next_val[depth] = 0;
            }
        }
    }
    let mut lits: Vec<Clause> = lit_set.into_iter().collect();
    lits.sort_unstable();
    if lits.iter().any(|c| c.neg.is_empty() && c.pos.is_empty()) {
        return Grounding::Unsat;
    }
    let mut general: Vec<GeneralClause> = gen_set.into_iter().collect();
    general.sort_unstable();
    Grounding::Clauses { lits, general }
}

const UNASSIGNED: i8 = 0;

struct Solver {
    n_atoms: usize,
    /// Clause literal lists; watched literals at positions 0 and 1.
    lits: Vec<Vec<u32>>,
    /// watch[l] = clauses currently watching literal l.
    watch: Vec<Vec<u32>>,
    units: Vec<u32>,
    general: Vec<GeneralClause>,
    assign: Vec<i8>,
    trail: Vec<u32>,
}

fn lit(atom: u32, positive: bool) -> u32 {
    atom * 2 + u32::from(positive)
}

fn lit_atom(l: u32) -> u32 {
    l / 2
}

fn lit_positive(l: u32) -> bool {
    l % 2 == 1
}

fn lit_value(assign: &[i8], l: u32) -> i8 {
    let v = assign[lit_atom(l) as usize];
    if lit_positive(l) {
        v
    } else {
        -v
    }
}

impl Solver {
    fn new(n_atoms: usize, clauses: &[Clause], general: Vec<GeneralClause>) -> Self {
        let mut s = Solver {
            n_atoms,
            lits: Vec::new(),
            watch: vec![Vec::new(); n_atoms * 2],
            units: Vec::new(),
            general,
            assign: vec![UNASSIGNED; n_atoms],
            trail: Vec::new(),
        };
        for c in clauses {
            let mut ls: Vec<u32> = Vec::with_capacity(c.neg.len() + c.pos.len());
            for &a in &c.neg {
                ls.push(lit(a, false));
            }
            for &a in &c.pos {
                ls.push(lit(a, true));
            }
            if ls.len() == 1 {
                s.units.push(ls[0]);
                continue;
            }
            let idx = s.lits.len() as u32;
            s.watch[ls[0] as usize].push(idx);
            s.watch[ls[1] as usize].push(idx);
            s.lits.push(ls);
        }
        s
    }

    fn value(&self, l: u32) -> i8 {
        lit_value(&self.assign, l)
    }

    /// Assign and propagate; on conflict leaves the trail extended (the
    /// caller rewinds). Returns false on conflict.
    fn assign_propagate(
        &mut self,
        atom: u32,
        value: bool,
        spent: &mut u64,
    ) -> bool {
        let mut queue_start = self.trail.len();
        self.assign[atom as usize] = if value { 1 } else { -1 };
        self.trail.push(atom);
        *spent += 1;
        while queue_start < self.trail.len() {
            let a = self.trail[queue_start];
            queue_start += 1;
            // The literal that became false.
            let false_lit = lit(a, self.assign[a as usize] < 0);
            let watchers = std::mem::take(&mut self.watch[false_lit as usize]);
            let mut keep = Vec::with_capacity(watchers.len());
            let mut conflict = false;
            for &ci in watchers.iter() {
                if conflict {
                    keep.push(ci);
                    continue;
                }
                let clause = &mut self.lits[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                if lit_value(&self.assign, clause[0]) > 0 {
                    keep.push(ci);
                    continue;
                }
                let mut moved = false;
                for j in 2..clause.len() {
                    if lit_value(&self.assign, clause[j]) >= 0 {
                        clause.swap(1, j);
                        let new_watch = clause[1];
                        self.watch[new_watch as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(ci);
                let first = clause[0];
                match self.value(first) {
                    0 => {
                        let fatom = lit_atom(first);
                        self.assign[fatom as usize] =
                            if lit_positive(first) { 1 } else { -1 };
                        self.trail.push(fatom);
                        *spent += 1;
                    }
                    v if v < 0 => {
                        conflict = true;
                    }
                    _ => {}
                }
            }
            self.watch[false_lit as usize].extend(keep);
            if conflict {
                return false;
            }
        }
        true
    }

    fn rewind(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            self.assign[a as usize] = UNASSIGNED;
        }
    }

    fn general_ok(&self) -> bool {
        self.general.iter().all(|g| {
            let fired = g.premise.iter().all(|&a| self.assign[a as usize] > 0);
            !fired
                || g.disjuncts
                    .iter()
                    .any(|d| d.iter().all(|&a| self.assign[a as usize] > 0))
        })
    }

    fn enumerate(
        &mut self,
        budget: &SearchBudget,
        spent: &mut u64,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<(), AnalysisError> {
        let mark = self.trail.len();
        let units = self.units.clone();
        let mut ok = true;
        for l in units {
            match self.value(l) {
                v if v > 0 => {}
                0 => {
                    if !self.assign_propagate(lit_atom(l), lit_positive(l), spent) {
                        ok = false;
                        break;
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            self.dfs(0, budget, spent, out)?;
        }
        self.rewind(mark);
        Ok(())
    }

    fn dfs(
        &mut self,
        from: usize,
        budget: &SearchBudget,
        spent: &mut u64,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<(), AnalysisError> {
        if *spent > budget.max_atom_assignments {
            return Err(AnalysisError::BudgetExceeded {
                spent: *spent,
                limit: budget.max_atom_assignments,
            });
        }
        let next = (from..self.n_atoms).find(|&a| self.assign[a] == UNASSIGNED);
        let Some(atom) = next else {
            if self.general_ok() {
                let model: Vec<u32> = (0..self.n_atoms as u32)
                    .filter(|&a| self.assign[a as usize] > 0)
                    .collect();
                out.push(model);
            }
            return Ok(());
        };
        for value in [false, true] {
            let mark = self.trail.len();
            if self.assign_propagate(atom as u32, value, spent) {
                self.dfs(atom + 1, budget, spent, out)?;
            }
            self.rewind(mark);
        }
        Ok(())
    }
}

fn invariant_hash(s: &FiniteStructure) -> u64 {
    let colors = refinement_colors(s);
    let mut h = std::collections::hash_map::DefaultHasher::new();
    s.size().hash(&mut h);
    // Constant values are labels, not invariants: hash their equality
    // pattern and structural colors instead.
    let cv = s.const_vals();
    for (i, &v) in cv.iter().enumerate() {
        colors[v].hash(&mut h);
        for &w in &cv[..i] {
            (v == w).hash(&mut h);
        }
    }
    for t in s.tables() {
        t.len().hash(&mut h);
    }
    let mut sorted = colors;
    sorted.sort_unstable();
    sorted.hash(&mut h);
    h.finish()
}

struct IsoDeduper {
    buckets: HashMap<u64, Vec<usize>>,
    kept: Vec<FiniteStructure>,
}

impl IsoDeduper {
    fn new() -> Self {
        IsoDeduper { buckets: HashMap::new(), kept: Vec::new() }
    }

    fn add(&mut self, s: FiniteStructure) {
        let h = invariant_hash(&s);
        let bucket = self.buckets.entry(h).or_default();
        for &i in bucket.iter() {
            if isomorphic(&self.kept[i], &s).ok().flatten().is_some() {
                return;
            }
        }
        bucket.push(self.kept.len());
        self.kept.push(s);
    }
}

/// All models of the theory with universe size at most `bound`, one
/// canonical representative per isomorphism class, sorted by size and
/// canonical form.
#[derive(Debug)]
pub struct ModelUniverse {
    theory: Theory,
    bound: usize,
    members: Vec<FiniteStructure>,
    canonical_keys: Vec<Vec<u8>>,
    pub(crate) pc_flags_cache: OnceLock<Vec<bool>>,
    pub(crate) hmax_flags_cache: OnceLock<Vec<bool>>,
}

impl ModelUniverse {
    pub(crate) fn from_members(
        theory: Theory,
        bound: usize,
        mut reps: Vec<FiniteStructure>,
    ) -> Self {
        let mut keyed: Vec<(Vec<u8>, FiniteStructure)> = reps
            .drain(..)
            .map(|s| {
                let c = canonicalize(&s);
                (canonical_form(&c), c)
            })
            .collect();
        keyed.sort_by(|a, b| (a.1.size(), &a.0).cmp(&(b.1.size(), &b.0)));
        let (canonical_keys, members) = keyed.into_iter().unzip();
        ModelUniverse {
            theory,
            bound,
            members,
            canonical_keys,
            pc_flags_cache: OnceLock::new(),
            hmax_flags_cache: OnceLock::new(),
        }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn members(&self) -> &[FiniteStructure] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the member isomorphic to `s`, if any.
    pub fn find_isomorphic(&self, s: &FiniteStructure) -> Option<usize> {
        let key = canonical_form(&canonicalize(s));
        (0..self.members.len())
            .find(|&i| self.members[i].size() == s.size() && self.canonical_keys[i] == key)
    }

    pub fn canonical_key(&self, i: usize) -> &[u8] {
        &self.canonical_keys[i]
    }
}

fn const_assignments(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in out {
            for v in 0..n {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn build_structure(
    theory: &Theory,
    space: &AtomSpace,
    n: usize,
    const_vals: &[usize],
    true_atoms: &[u32],
) -> FiniteStructure {
    let mut tables = vec![std::collections::BTreeSet::new(); theory.sig.relations().len()];
    for &a in true_atoms {
        let (rel, tuple) = space.decode(a);
        tables[rel].insert(tuple);
    }
    FiniteStructure::new(theory.sig.clone(), n, tables, const_vals.to_vec()).unwrap()
}

/// Enumerate all models of the theory up to the bound, deduplicated up to
/// isomorphism.
pub fn enumerate_models(
    theory: &Theory,
    bound: usize,
    budget: &SearchBudget,
) -> Result<ModelUniverse, AnalysisError> {
    let mut spent = 0u64;
    let mut dedup = IsoDeduper::new();
    let n_consts = theory.sig.constants().len();
    for n in 1..=bound {
        let space = AtomSpace::new(theory, n);
        // Clause sets repeat across constant assignments (only equality
        // axioms between constants depend on them), so memoize solutions.
        let mut memo: HashMap<Grounding, Vec<Vec<u32>>> = HashMap::new();
        for const_vals in const_assignments(n_consts, n) {
            let grounding = ground(theory, n, &const_vals, &space);
            if grounding == Grounding::Unsat {
                continue;
            }
            if !memo.contains_key(&grounding) {
                let (lits, general) = match &grounding {
                    Grounding::Clauses { lits, general } => (lits.clone(), general.clone()),
                    Grounding::Unsat => unreachable!(),
                };
                let mut solver = Solver::new(space.total, &lits, general);
                let mut models = Vec::new();
                solver.enumerate(budget, &mut spent, &mut models)?;
                memo.insert(grounding.clone(), models);
            }
            for model in &memo[&grounding] {
                dedup.add(build_structure(theory, &space, n, &const_vals, model));
            }
        }
    }
    for member in &dedup.kept {
        debug_assert!(satisfies(member, theory).map(|s| s.holds()).unwrap_or(false));
    }
    Ok(ModelUniverse::from_members(theory.clone(), bound, dedup.kept))
}

/// Generate-and-filter oracle: all relation tables and constant values,
/// filtered by direct evaluation. Only usable when the table space is
/// small; serves as the reference for enumerate_models.
pub fn naive_enumerate(theory: &Theory, bound: usize) -> Result<ModelUniverse, AnalysisError> {
    let mut dedup = IsoDeduper::new();
    for n in 1..=bound {
        let space = AtomSpace::new(theory, n);
        assert!(space.total <= 25, "naive oracle limited to tiny universes");
        for const_vals in const_assignments(theory.sig.constants().len(), n) {
            for bits in 0u64..(1u64 << space.total) {
                let true_atoms: Vec<u32> =
                    (0..space.total as u32).filter(|&a| bits >> a & 1 == 1).collect();
                let s = build_structure(theory, &space, n, &const_vals, &true_atoms);
                if satisfies(&s, theory)?.holds() {
                    dedup.add(s);
                }
            }
        }
    }
    Ok(ModelUniverse::from_members(theory.clone(), bound, dedup.kept))
}
