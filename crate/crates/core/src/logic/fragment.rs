//! Bounded formula fragments: finite, deterministically ordered families of
//! positive formulas used by every refutation-style search.
//!
//! A fragment formula is an existential block over a conjunction of at most
//! `max_atoms` atoms, with free variables among x1..xm, bound variables
//! among y1..yv and the signature constants. Bound variables are forced
//! into first-occurrence order, so each formula appears exactly once up to
//! bound-variable renaming. No semantic deduplication is attempted.

use std::sync::Arc;

use crate::structures::{FiniteStructure, Signature};

use super::ast::{PositiveFormula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaFragment {
    pub max_free: usize,
    pub max_bound: usize,
    pub max_atoms: usize,
    pub allow_or: bool,
    pub include_truth_falsity: bool,
}

impl FormulaFragment {
    pub fn new(max_free: usize, max_bound: usize, max_atoms: usize) -> Self {
        FormulaFragment {
            max_free,
            max_bound,
            max_atoms,
            allow_or: false,
            include_truth_falsity: true,
        }
    }

    pub fn with_or(mut self) -> Self {
        self.allow_or = true;
        self
    }

    pub fn without_truth_falsity(mut self) -> Self {
        self.include_truth_falsity = false;
        self
    }
}

impl Default for FormulaFragment {
    fn default() -> Self {
        FormulaFragment::new(3, 3, 3)
    }
}

/// A term of the fragment alphabet. The derived order (free, then bound,
/// then constant) fixes the atom order and the scan order used for
/// bound-variable canonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FragTerm {
    Free(usize),
    Bound(usize),
    Const(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FragAtom {
    Rel(usize, Vec<FragTerm>),
    Eq(FragTerm, FragTerm),
}

impl FragAtom {
    fn terms(&self) -> &[FragTerm] {
        match self {
            FragAtom::Rel(_, args) => args,
            FragAtom::Eq(..) => unreachable!(),
        }
    }
}

/// One conjunction of the fragment: atom ids in increasing order plus the
/// number of bound variables in use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjFormula {
    pub atoms: Vec<usize>,
    pub bound_used: usize,
}

/// Receives the conjunction stream. `push`/`pop` bracket the depth-first
/// walk so implementations can share work along the prefix.
pub trait ConjVisitor {
    fn push(&mut self, atom: usize);
    fn pop(&mut self);
    fn emit(&mut self, atoms: &[usize], bound_used: usize);
}

pub struct FragmentContext {
    sig: Arc<Signature>,
    frag: FormulaFragment,
    atoms: Vec<FragAtom>,
}

impl FragmentContext {
    pub fn new(sig: Arc<Signature>, frag: FormulaFragment) -> Self {
        let mut terms = Vec::new();
        for i in 0..frag.max_free {
            terms.push(FragTerm::Free(i));
        }
        for j in 0..frag.max_bound {
            terms.push(FragTerm::Bound(j));
        }
        for c in 0..sig.constants().len() {
            terms.push(FragTerm::Const(c));
        }
        let mut atoms = Vec::new();
        for (rel, (_, arity)) in sig.relations().iter().enumerate() {
            let mut args = vec![0usize; *arity];
            loop {
                atoms.push(FragAtom::Rel(rel, args.iter().map(|&i| terms[i]).collect()));
                let mut k = *arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    args[k] += 1;
                    if args[k] < terms.len() {
                        break;
                    }
                    args[k] = 0;
                }
                if args.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                atoms.push(FragAtom::Eq(terms[i], terms[j]));
            }
        }
        FragmentContext { sig, frag, atoms }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn frag(&self) -> &FormulaFragment {
        &self.frag
    }

    pub fn atoms(&self) -> &[FragAtom] {
        &self.atoms
    }

    /// If the atom respects first-occurrence order given `bound_used`
    /// variables already introduced, the new count; otherwise None.
    fn admit(&self, atom: usize, bound_used: usize) -> Option<usize> {
        let mut cur = bound_used;
        let mut scan = |t: &FragTerm| -> bool {
            if let FragTerm::Bound(j) = t {
                if *j > cur {
                    return false;
                }
                if *j == cur {
                    cur += 1;
                }
            }
            true
        };
        let ok = match &self.atoms[atom] {
            FragAtom::Rel(..) => self.atoms[atom].terms().iter().all(&mut scan),
            FragAtom::Eq(a, b) => scan(a) && scan(b),
        };
        if ok {
            Some(cur)
        } else {
            None
        }
    }

    /// Depth-first walk over all admissible conjunctions of 1..=max_atoms
    /// atoms, in increasing atom-id order along each branch.
    pub fn walk<V: ConjVisitor>(&self, visitor: &mut V) {
        let mut current = Vec::new();
        self.walk_rec(0, 0, &mut current, visitor);
    }

    fn walk_rec<V: ConjVisitor>(
        &self,
        start: usize,
        bound_used: usize,
        current: &mut Vec<usize>,
        visitor: &mut V,
    ) {
        for id in start..self.atoms.len() {
            let Some(next_bound) = self.admit(id, bound_used) else {
                continue;
            };
            current.push(id);
            visitor.push(id);
            visitor.emit(current, next_bound);
            if current.len() < self.frag.max_atoms {
                self.walk_rec(id + 1, next_bound, current, visitor);
            }
            visitor.pop();
            current.pop();
        }
    }

    pub fn conjunctions(&self) -> Vec<ConjFormula> {
        struct Collect(Vec<ConjFormula>);
        impl ConjVisitor for Collect {
            fn push(&mut self, _: usize) {}
            fn pop(&mut self) {}
            fn emit(&mut self, atoms: &[usize], bound_used: usize) {
                self.0.push(ConjFormula { atoms: atoms.to_vec(), bound_used });
            }
        }
        let mut c = Collect(Vec::new());
        self.walk(&mut c);
        c.0
    }

    fn term_to_ast(&self, t: FragTerm) -> Term {
        match t {
            FragTerm::Free(i) => Term::Var(format!("x{}", i + 1)),
            FragTerm::Bound(j) => Term::Var(format!("y{}", j + 1)),
            FragTerm::Const(c) => Term::Const(self.sig.constants()[c].clone()),
        }
    }

    pub fn conj_to_formula(&self, conj: &ConjFormula) -> PositiveFormula {
        let parts: Vec<PositiveFormula> = conj
            .atoms
            .iter()
            .map(|&id| match &self.atoms[id] {
                FragAtom::Rel(rel, args) => PositiveFormula::Atom(
                    self.sig.relations()[*rel].0.clone(),
                    args.iter().map(|&t| self.term_to_ast(t)).collect(),
                ),
                FragAtom::Eq(a, b) => {
                    PositiveFormula::Eq(self.term_to_ast(*a), self.term_to_ast(*b))
                }
            })
            .collect();
        let body = if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            PositiveFormula::And(parts)
        };
        if conj.bound_used == 0 {
            body
        } else {
            let vars = (0..conj.bound_used).map(|j| format!("y{}", j + 1)).collect();
            PositiveFormula::Exists(vars, Box::new(body))
        }
    }

    /// Satisfaction table of every conjunction over one finite structure.
    pub fn sat_table(&self, a: &FiniteStructure) -> SatTable {
        let n = a.size();
        let m = self.frag.max_free;
        let v = self.frag.max_bound;
        let full_bits = n.pow((m + v) as u32);
        let free_bits = n.pow(m as u32);
        let bv = n.pow(v as u32);
        let full_words = full_bits.div_ceil(64);
        let free_words = free_bits.div_ceil(64);

        let mut all = vec![u64::MAX; full_words];
        if full_bits % 64 != 0 {
            all[full_words - 1] = (1u64 << (full_bits % 64)) - 1;
        }
        struct Builder<'a> {
            ctx: &'a FragmentContext,
            a: &'a FiniteStructure,
            n: usize,
            m: usize,
            v: usize,
            bv: usize,
            atom_bits: Vec<Option<Vec<u64>>>,
            stack: Vec<Vec<u64>>,
            rows: Vec<Vec<u64>>,
            free_bits: usize,
            free_words: usize,
        }
        impl Builder<'_> {
            fn atom_bits(&mut self, id: usize) -> &Vec<u64> {
                if self.atom_bits[id].is_none() {
                    let words = self.stack[0].len();
                    let mut bits = vec![0u64; words];
                    let mut vals = vec![0usize; self.m + self.v];
                    let value = |vals: &[usize], t: &FragTerm| match t {
                        FragTerm::Free(i) => vals[*i],
                        FragTerm::Bound(j) => vals[self.m + *j],
                        FragTerm::Const(c) => self.a.const_val(*c),
                    };
                    let mut idx = 0usize;
                    loop {
                        let holds = match &self.ctx.atoms[id] {
                            FragAtom::Rel(rel, args) => {
                                let tuple: Vec<usize> =
                                    args.iter().map(|t| value(&vals, t)).collect();
                                self.a.holds(*rel, &tuple)
                            }
                            FragAtom::Eq(s, t) => value(&vals, s) == value(&vals, t),
                        };
                        if holds {
                            bits[idx / 64] |= 1u64 << (idx % 64);
                        }
                        idx += 1;
                        let mut k = self.m + self.v;
                        loop {
                            if k == 0 {
                                break;
                            }
                            k -= 1;
                            vals[k] += 1;
                            if vals[k] < self.n {
                                break;
                            }
                            vals[k] = 0;
                        }
                        if vals.iter().all(|&x| x == 0) {
                            break;
                        }
                    }
                    self.atom_bits[id] = Some(bits);
                }
                self.atom_bits[id].as_ref().unwrap()
            }
        }
        impl ConjVisitor for Builder<'_> {
            fn push(&mut self, atom: usize) {
                self.atom_bits(atom);
                let atom_bits = self.atom_bits[atom].as_ref().unwrap();
                let top = self.stack.last().unwrap();
                let next: Vec<u64> =
                    top.iter().zip(atom_bits.iter()).map(|(a, b)| a & b).collect();
                self.stack.push(next);
            }

            fn pop(&mut self) {
                self.stack.pop();
            }

            fn emit(&mut self, _atoms: &[usize], _bound_used: usize) {
                // Existential projection: free assignment f holds iff any
                // bit in its block [f*bv, (f+1)*bv) is set.
                let top = self.stack.last().unwrap();
                let mut row = vec![0u64; self.free_words];
                for f in 0..self.free_bits {
                    let end = (f + 1) * self.bv;
                    let mut b = f * self.bv;
                    while b < end {
                        let w = b / 64;
                        let lo = b % 64;
                        let word_end = (end - w * 64).min(64);
                        let mask = if word_end == 64 {
                            u64::MAX << lo
                        } else {
                            ((1u64 << word_end) - 1) & (u64::MAX << lo)
                        };
                        if top[w] & mask != 0 {
                            row[f / 64] |= 1u64 << (f % 64);
                            break;
                        }
                        b = (w + 1) * 64;
                    }
                }
                self.rows.push(row);
            }
        }
        let mut b = Builder {
            ctx: self,
            a,
            n,
            m,
            v,
            bv,
            atom_bits: vec![None; self.atoms.len()],
            stack: vec![all],
            rows: Vec::new(),
            free_bits,
            free_words,
        };
        self.walk(&mut b);
        SatTable { n, m, free_bits, free_words, rows: b.rows }
    }
}

/// Per-conjunction satisfaction bitsets over the free-assignment space
/// {0..n-1}^m of one structure, row order matching `conjunctions()`.
#[derive(Debug, Clone)]
pub struct SatTable {
    pub n: usize,
    pub m: usize,
    pub free_bits: usize,
    pub free_words: usize,
    pub rows: Vec<Vec<u64>>,
}

impl SatTable {
    /// Index of a free-variable assignment, x1 most significant.
    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn holds(&self, row: usize, free_idx: usize) -> bool {
        self.rows[row][free_idx / 64] >> (free_idx % 64) & 1 == 1
    }

    pub fn is_empty(&self, row: usize) -> bool {
        self.rows[row].iter().all(|&w| w == 0)
    }

    pub fn is_full(&self, row: usize) -> bool {
        let mut remaining = self.free_bits;
        for &w in &self.rows[row] {
            let take = remaining.min(64);
            if w.count_ones() as usize != take {
                return false;
            }
            remaining -= take;
        }
        true
    }

    /// rows[p] a subset of rows[q], pointwise over assignments.
    pub fn subset(&self, p: usize, q: usize) -> bool {
        self.rows[p]
            .iter()
            .zip(self.rows[q].iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Per-assignment column: which rows hold at this assignment.
    pub fn column(&self, free_idx: usize) -> Vec<u64> {
        let mut col = vec![0u64; self.rows.len().div_ceil(64)];
        for (r, row) in self.rows.iter().enumerate() {
            if row[free_idx / 64] >> (free_idx % 64) & 1 == 1 {
                col[r / 64] |= 1u64 << (r % 64);
            }
        }
        col
    }
}

/// The full fragment as a deterministic formula list: Truth and Falsity
/// first when admitted, then every conjunction in walk order, then (with
/// the or flag) every unordered pair of distinct conjunctions.
pub fn enumerate_fragment(sig: &Arc<Signature>, frag: FormulaFragment) -> Vec<PositiveFormula> {
    let ctx = FragmentContext::new(sig.clone(), frag);
    let conjs = ctx.conjunctions();
    let mut out = Vec::new();
    if frag.include_truth_falsity {
        out.push(PositiveFormula::Truth);
        out.push(PositiveFormula::Falsity);
    }
    for c in &conjs {
        out.push(ctx.conj_to_formula(c));
    }
    if frag.allow_or {
        for i in 0..conjs.len() {
            for j in (i + 1)..conjs.len() {
                out.push(PositiveFormula::Or(vec![
                    ctx.conj_to_formula(&conjs[i]),
                    ctx.conj_to_formula(&conjs[j]),
                ]));
            }
        }
    }
    out
}
