//! Finite relational structures with constants: representation, file I/O,
//! isomorphism and canonical forms, and the basic constructions (induced
//! substructure, disjoint sum, direct product).
//!
//! Universes are always `{0..n-1}` with `n >= 1`. Structures are immutable
//! after construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::sexpr::{self, Sexp};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{pos}: element {element} out of range for universe {size}")]
    ElementOutOfRange { pos: String, element: usize, size: usize },
    #[error("constant {name} is not assigned an element")]
    UnassignedConstant { name: String },
    #[error("unknown symbol {name}")]
    UnknownSymbol { name: String },
    #[error("duplicate symbol {name}")]
    DuplicateSymbol { name: String },
    #[error("relation {name} has arity {expected}, got a tuple of length {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("arity of relation {name} must be positive")]
    BadArity { name: String },
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("induced substructure of an empty subset")]
    EmptySubset,
    #[error("constant {name} (element {element}) lies outside the chosen subset")]
    ConstantOutsideSubset { name: String, element: usize },
    #[error("disjoint sum is undefined for signatures with constants")]
    ConstantsPresent,
    #[error("cannot infer the arity of relation {name}: no tuples and no arity annotation")]
    UnknownArity { name: String },
}

/// A relational signature with constants. Function symbols are not part of
/// the data model; corpora encode them as relations with totality and
/// functionality axioms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new(
        relations: Vec<(String, usize)>,
        constants: Vec<String>,
    ) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(StructureError::BadArity { name: name.clone() });
            }
            if !seen.insert(name.clone()) {
                return Err(StructureError::DuplicateSymbol { name: name.clone() });
            }
        }
        for name in &constants {
            if !seen.insert(name.clone()) {
                return Err(StructureError::DuplicateSymbol { name: name.clone() });
            }
        }
        Ok(Signature { relations, constants })
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|n| n == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].1
    }
}

/// A finite interpretation of a signature over universe `{0..size-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    sig: Arc<Signature>,
    size: usize,
    /// One tuple set per relation symbol, in signature order.
    tables: Vec<BTreeSet<Vec<usize>>>,
    /// One element per constant symbol, in signature order.
    const_vals: Vec<usize>,
}

impl FiniteStructure {
    pub fn new(
        sig: Arc<Signature>,
        size: usize,
        tables: Vec<BTreeSet<Vec<usize>>>,
        const_vals: Vec<usize>,
    ) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        if tables.len() != sig.relations.len() || const_vals.len() != sig.constants.len() {
            return Err(StructureError::SignatureMismatch);
        }
        for (rel, table) in tables.iter().enumerate() {
            let (name, arity) = &sig.relations[rel];
            for tuple in table {
                if tuple.len() != *arity {
                    return Err(StructureError::ArityMismatch {
                        name: name.clone(),
                        expected: *arity,
                        got: tuple.len(),
                    });
                }
                if let Some(&e) = tuple.iter().find(|&&e| e >= size) {
                    return Err(StructureError::ElementOutOfRange {
                        pos: format!("relation {name}"),
                        element: e,
                        size,
                    });
                }
            }
        }
        for (i, &v) in const_vals.iter().enumerate() {
            if v >= size {
                return Err(StructureError::ElementOutOfRange {
                    pos: format!("constant {}", sig.constants[i]),
                    element: v,
                    size,
                });
            }
        }
        Ok(FiniteStructure { sig, size, tables, const_vals })
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, rel: usize) -> &BTreeSet<Vec<usize>> {
        &self.tables[rel]
    }

    pub fn tables(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.tables
    }

    pub fn const_val(&self, idx: usize) -> usize {
        self.const_vals[idx]
    }

    pub fn const_vals(&self) -> &[usize] {
        &self.const_vals
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.tables[rel].contains(tuple)
    }

    /// Total number of tuples across all relations.
    pub fn tuple_count(&self) -> usize {
        self.tables.iter().map(|t| t.len()).sum()
    }

    /// Reinterpret this structure under a larger signature: relations not
    /// present here become empty. Fails if the signatures disagree on a
    /// shared symbol or the target lacks one of our symbols, or if the
    /// target has constants we cannot interpret.
    pub fn with_signature(&self, sig: Arc<Signature>) -> Result<FiniteStructure, StructureError> {
        let mut tables = vec![BTreeSet::new(); sig.relations.len()];
        for (i, (name, arity)) in self.sig.relations.iter().enumerate() {
            match sig.relation_index(name) {
                Some(j) if sig.relations[j].1 == *arity => {
                    tables[j] = self.tables[i].clone();
                }
                _ => return Err(StructureError::SignatureMismatch),
            }
        }
        let mut const_vals = Vec::with_capacity(sig.constants.len());
        for name in &sig.constants {
            match self.sig.constant_index(name) {
                Some(i) => const_vals.push(self.const_vals[i]),
                None => return Err(StructureError::UnassignedConstant { name: name.clone() }),
            }
        }
        FiniteStructure::new(sig, self.size, tables, const_vals)
    }

    /// Deterministic serialization: relations in signature order with an
    /// explicit arity annotation, tuples in lexicographic order, then
    /// constants in signature order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        write!(out, "(structure (universe {})", self.size).unwrap();
        for (rel, (name, arity)) in self.sig.relations.iter().enumerate() {
            write!(out, "\n  (rel {name} {arity}").unwrap();
            for tuple in &self.tables[rel] {
                out.push_str(" (");
                for (i, e) in tuple.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    write!(out, "{e}").unwrap();
                }
                out.push(')');
            }
            out.push(')');
        }
        for (i, name) in self.sig.constants.iter().enumerate() {
            write!(out, "\n  (const {name} {})", self.const_vals[i]).unwrap();
        }
        out.push_str(")\n");
        out
    }

    /// Apply a permutation of the universe: element `e` becomes `perm[e]`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteStructure {
        assert_eq!(perm.len(), self.size);
        let tables = self
            .tables
            .iter()
            .map(|table| table.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        let const_vals = self.const_vals.iter().map(|&v| perm[v]).collect();
        FiniteStructure { sig: self.sig.clone(), size: self.size, tables, const_vals }
    }

    /// Compact order-preserving encoding used by `canonical_form`.
    fn encode(&self) -> Vec<u32> {
        let mut key = Vec::with_capacity(2 + self.tuple_count() * 3);
        key.push(self.size as u32);
        for table in &self.tables {
            key.push(u32::MAX); // relation separator
            for tuple in table {
                for &e in tuple {
                    key.push(e as u32);
                }
                key.push(u32::MAX - 1); // tuple separator
            }
        }
        for &v in &self.const_vals {
            key.push(v as u32);
        }
        key
    }
}

/// An ordered tuple of elements of a structure (repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementTuple<'a> {
    pub structure: &'a FiniteStructure,
    pub elements: Vec<usize>,
}

impl<'a> ElementTuple<'a> {
    pub fn new(structure: &'a FiniteStructure, elements: Vec<usize>) -> Result<Self, StructureError> {
        for &e in &elements {
            if e >= structure.size() {
                return Err(StructureError::ElementOutOfRange {
                    pos: "tuple".to_string(),
                    element: e,
                    size: structure.size(),
                });
            }
        }
        Ok(ElementTuple { structure, elements })
    }
}

fn parse_usize(s: &Sexp) -> Result<usize, StructureError> {
    let a = s
        .atom()
        .ok_or_else(|| StructureError::Syntax(format!("{}: expected an integer", s.pos())))?;
    a.parse()
        .map_err(|_| StructureError::Syntax(format!("{}: expected an integer, got {a:?}", s.pos())))
}

/// Parse a structure file. The signature is inferred from the content:
/// relations in order of appearance (arity from the optional annotation or
/// the first tuple), constants in order of appearance.
pub fn parse_structure(text: &str) -> Result<FiniteStructure, StructureError> {
    let top = sexpr::parse_one(text).map_err(|e| StructureError::Syntax(e.to_string()))?;
    let items = top
        .list()
        .ok_or_else(|| StructureError::Syntax("expected (structure ...)".to_string()))?;
    if items.first().and_then(|s| s.atom()) != Some("structure") {
        return Err(StructureError::Syntax(format!(
            "{}: expected (structure ...)",
            top.pos()
        )));
    }
    let uni = items
        .get(1)
        .and_then(|s| s.list())
        .filter(|l| l.len() == 2 && l[0].atom() == Some("universe"))
        .ok_or_else(|| StructureError::Syntax("expected (universe N)".to_string()))?;
    let size = parse_usize(&uni[1])?;
    if size == 0 {
        return Err(StructureError::EmptyUniverse);
    }

    let mut relations: Vec<(String, usize)> = Vec::new();
    let mut tables: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    let mut constants: Vec<String> = Vec::new();
    let mut const_vals: Vec<usize> = Vec::new();
    let mut names = BTreeSet::new();

    for item in &items[2..] {
        let l = item
            .list()
            .ok_or_else(|| StructureError::Syntax(format!("{}: expected (rel ...) or (const ...)", item.pos())))?;
        match l.first().and_then(|s| s.atom()) {
            Some("rel") => {
                let name = l
                    .get(1)
                    .and_then(|s| s.atom())
                    .ok_or_else(|| StructureError::Syntax(format!("{}: expected relation name", item.pos())))?
                    .to_string();
                if !names.insert(name.clone()) {
                    return Err(StructureError::DuplicateSymbol { name });
                }
                let mut rest = &l[2..];
                let mut arity: Option<usize> = None;
                if let Some(first) = rest.first() {
                    if first.atom().is_some() {
                        arity = Some(parse_usize(first)?);
                        rest = &rest[1..];
                    }
                }
                let mut table = BTreeSet::new();
                for t in rest {
                    let elems = t
                        .list()
                        .ok_or_else(|| StructureError::Syntax(format!("{}: expected a tuple", t.pos())))?;
                    let tuple: Vec<usize> =
                        elems.iter().map(parse_usize).collect::<Result<_, _>>()?;
                    if tuple.is_empty() {
                        return Err(StructureError::Syntax(format!("{}: empty tuple", t.pos())));
                    }
                    match arity {
                        None => arity = Some(tuple.len()),
                        Some(a) if a != tuple.len() => {
                            return Err(StructureError::ArityMismatch {
                                name,
                                expected: a,
                                got: tuple.len(),
                            })
                        }
                        _ => {}
                    }
                    if let Some(&e) = tuple.iter().find(|&&e| e >= size) {
                        return Err(StructureError::ElementOutOfRange {
                            pos: t.pos().to_string(),
                            element: e,
                            size,
                        });
                    }
                    table.insert(tuple);
                }
                let arity = arity.ok_or(StructureError::UnknownArity { name: name.clone() })?;
                relations.push((name, arity));
                tables.push(table);
            }
            Some("const") => {
                if l.len() != 3 {
                    return Err(StructureError::Syntax(format!(
                        "{}: expected (const NAME ELEMENT)",
                        item.pos()
                    )));
                }
                let name = l[1]
                    .atom()
                    .ok_or_else(|| StructureError::Syntax(format!("{}: expected constant name", item.pos())))?
                    .to_string();
                if !names.insert(name.clone()) {
                    return Err(StructureError::DuplicateSymbol { name });
                }
                let v = parse_usize(&l[2])?;
                if v >= size {
                    return Err(StructureError::ElementOutOfRange {
                        pos: l[2].pos().to_string(),
                        element: v,
                        size,
                    });
                }
                constants.push(name);
                const_vals.push(v);
            }
            _ => {
                return Err(StructureError::Syntax(format!(
                    "{}: expected (rel ...) or (const ...)",
                    item.pos()
                )))
            }
        }
    }

    let sig = Arc::new(Signature::new(relations, constants)?);
    FiniteStructure::new(sig, size, tables, const_vals)
}

/// Per-element invariant colors from two rounds of degree refinement.
/// Isomorphic structures get equal sorted color multisets; the colors guide
/// the bijection search in `isomorphic`.
pub(crate) fn refinement_colors(a: &FiniteStructure) -> Vec<u64> {
    let n = a.size();
    // Round 0: per (relation, position) occurrence counts; constants pin.
    let mut counts: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (rel, table) in a.tables().iter().enumerate() {
        for tuple in table {
            for (pos, &e) in tuple.iter().enumerate() {
                let slot = rel * 8 + pos.min(7);
                if counts[e].len() <= slot {
                    counts[e].resize(slot + 1, 0);
                }
                counts[e][slot] += 1;
            }
        }
    }
    let mut colors: Vec<u64> = vec![0; n];
    for (e, c) in counts.iter().enumerate() {
        let mut h: u64 = 0xcbf29ce484222325;
        for &x in c {
            h = (h ^ x as u64).wrapping_mul(0x100000001b3);
        }
        colors[e] = h;
    }
    for (ci, &v) in a.const_vals().iter().enumerate() {
        colors[v] = colors[v].wrapping_add(0xdeadbeef + ci as u64);
    }
    // Two refinement rounds: mix in the multiset of neighbor colors.
    for _ in 0..2 {
        let mut next = colors.clone();
        for (rel, table) in a.tables().iter().enumerate() {
            for tuple in table {
                for (pos, &e) in tuple.iter().enumerate() {
                    let mut h: u64 = (rel as u64) << 8 | pos as u64;
                    for (qos, &other) in tuple.iter().enumerate() {
                        if qos != pos {
                            h = h.wrapping_add(colors[other].rotate_left(qos as u32));
                        }
                    }
                    // Commutative accumulation keeps the result independent
                    // of table iteration order.
                    next[e] = next[e].wrapping_add(h.wrapping_mul(0x9e3779b97f4a7c15));
                }
            }
        }
        colors = next;
    }
    colors
}

/// Search for an isomorphism `A -> B`. Returns the bijection as a vector
/// `map[a] = b`, or `None`.
pub fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> Result<Option<Vec<usize>>, StructureError> {
    if a.sig() != b.sig() {
        return Err(StructureError::SignatureMismatch);
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    for rel in 0..a.sig().relations().len() {
        if a.table(rel).len() != b.table(rel).len() {
            return Ok(None);
        }
    }
    let ca = refinement_colors(a);
    let cb = refinement_colors(b);
    {
        let mut sa = ca.clone();
        let mut sb = cb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return Ok(None);
        }
    }
    let n = a.size();
    // Tuples of A grouped by element for incremental checking.
    let mut touching: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); n];
    for (rel, table) in a.tables().iter().enumerate() {
        for tuple in table {
            let mut seen = [usize::MAX; 8];
            let mut k = 0;
            for &e in tuple {
                if !seen[..k].contains(&e) {
                    if k < 8 {
                        seen[k] = e;
                        k += 1;
                    }
                    touching[e].push((rel, tuple));
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    // Constants are pinned.
    for (ci, &va) in a.const_vals().iter().enumerate() {
        let vb = b.const_val(ci);
        if map[va] != usize::MAX && map[va] != vb {
            return Ok(None);
        }
        if map[va] == usize::MAX {
            if used[vb] {
                return Ok(None);
            }
            map[va] = vb;
            used[vb] = true;
        }
    }

    fn consistent(
        _a: &FiniteStructure,
        b: &FiniteStructure,
        touching: &[Vec<(usize, &Vec<usize>)>],
        map: &[usize],
        e: usize,
    ) -> bool {
        let mut image = Vec::with_capacity(4);
        for &(rel, tuple) in &touching[e] {
            image.clear();
            let mut complete = true;
            for &x in tuple.iter() {
                if map[x] == usize::MAX {
                    complete = false;
                    break;
                }
                image.push(map[x]);
            }
            if complete && !b.holds(rel, &image) {
                return false;
            }
        }
        true
    }

    fn search(
        a: &FiniteStructure,
        b: &FiniteStructure,
        ca: &[u64],
        cb: &[u64],
        touching: &[Vec<(usize, &Vec<usize>)>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        e: usize,
    ) -> bool {
        let n = a.size();
        if e == n {
            return true;
        }
        if map[e] != usize::MAX {
            return consistent(a, b, touching, map, e)
                && search(a, b, ca, cb, touching, map, used, e + 1);
        }
        for v in 0..n {
            if used[v] || cb[v] != ca[e] {
                continue;
            }
            map[e] = v;
            used[v] = true;
            if consistent(a, b, touching, map, e) && search(a, b, ca, cb, touching, map, used, e + 1)
            {
                return true;
            }
            map[e] = usize::MAX;
            used[v] = false;
        }
        false
    }

    // Pinned constants must already be consistent with the colors.
    for (e, &m) in map.iter().enumerate() {
        if m != usize::MAX && ca[e] != cb[m] {
            return Ok(None);
        }
    }
    if search(a, b, &ca, &cb, &touching, &mut map, &mut used, 0) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; n];
    result.push(current.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                current.swap(0, i);
            } else {
                current.swap(c[i], i);
            }
            result.push(current.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    result
}

/// The lexicographically minimal encoding of `A` over all permutations of
/// its universe. Brute force by construction; adequate at desk scale
/// (n <= 9) and the oracle for any faster labeling added later.
pub fn canonical_form(a: &FiniteStructure) -> Vec<u8> {
    let (min, _) = canonical_key(a);
    min.into_iter().flat_map(|x| x.to_be_bytes()).collect()
}

/// Relabel `A` into its canonical representative.
pub fn canonicalize(a: &FiniteStructure) -> FiniteStructure {
    let (_, perm) = canonical_key(a);
    a.relabel(&perm)
}

fn canonical_key(a: &FiniteStructure) -> (Vec<u32>, Vec<usize>) {
    let n = a.size();
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    for perm in permutations(n) {
        let key = a.relabel(&perm).encode();
        match &best {
            Some((b, _)) if *b <= key => {}
            _ => best = Some((key, perm)),
        }
    }
    best.unwrap()
}

/// Restrict `A` to a subset of its universe, relabeled order-preservingly
/// to `{0..|subset|-1}`.
pub fn induced_substructure(
    a: &FiniteStructure,
    subset: &BTreeSet<usize>,
) -> Result<FiniteStructure, StructureError> {
    if subset.is_empty() {
        return Err(StructureError::EmptySubset);
    }
    if let Some(&e) = subset.iter().next_back() {
        if e >= a.size() {
            return Err(StructureError::ElementOutOfRange {
                pos: "subset".to_string(),
                element: e,
                size: a.size(),
            });
        }
    }
    let relabel: BTreeMap<usize, usize> =
        subset.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    for (ci, &v) in a.const_vals().iter().enumerate() {
        if !subset.contains(&v) {
            return Err(StructureError::ConstantOutsideSubset {
                name: a.sig().constants()[ci].clone(),
                element: v,
            });
        }
    }
    let tables = a
        .tables()
        .iter()
        .map(|table| {
            table
                .iter()
                .filter(|t| t.iter().all(|e| subset.contains(e)))
                .map(|t| t.iter().map(|e| relabel[e]).collect())
                .collect()
        })
        .collect();
    let const_vals = a.const_vals().iter().map(|v| relabel[v]).collect();
    FiniteStructure::new(a.sig().clone(), subset.len(), tables, const_vals)
}

/// Disjoint sum: `B`'s elements are shifted past `A`'s. Only defined for
/// constant-free signatures.
pub fn disjoint_sum(
    a: &FiniteStructure,
    b: &FiniteStructure,
) -> Result<FiniteStructure, StructureError> {
    if a.sig() != b.sig() {
        return Err(StructureError::SignatureMismatch);
    }
    if !a.sig().constants().is_empty() {
        return Err(StructureError::ConstantsPresent);
    }
    let shift = a.size();
    let tables = a
        .tables()
        .iter()
        .zip(b.tables())
        .map(|(ta, tb)| {
            let mut t = ta.clone();
            t.extend(tb.iter().map(|tuple| tuple.iter().map(|&e| e + shift).collect::<Vec<_>>()));
            t
        })
        .collect();
    FiniteStructure::new(a.sig().clone(), a.size() + b.size(), tables, Vec::new())
}

/// Direct product: universe `A x B` flattened as `a * |B| + b`; relations
/// hold componentwise; constants interpreted componentwise.
pub fn product(
    a: &FiniteStructure,
    b: &FiniteStructure,
) -> Result<FiniteStructure, StructureError> {
    if a.sig() != b.sig() {
        return Err(StructureError::SignatureMismatch);
    }
    let nb = b.size();
    let pair = |x: usize, y: usize| x * nb + y;
    let tables = a
        .tables()
        .iter()
        .zip(b.tables())
        .map(|(ta, tb)| {
            let mut t = BTreeSet::new();
            for ta_tuple in ta {
                for tb_tuple in tb {
                    t.insert(
                        ta_tuple
                            .iter()
                            .zip(tb_tuple)
                            .map(|(&x, &y)| pair(x, y))
                            .collect::<Vec<_>>(),
                    );
                }
            }
            t
        })
        .collect();
    let const_vals = a
        .const_vals()
        .iter()
        .zip(b.const_vals())
        .map(|(&x, &y)| pair(x, y))
        .collect();
    FiniteStructure::new(a.sig().clone(), a.size() * nb, tables, const_vals)
}

/// The directed n-cycle over `{S/2}`: edges i -> i+1 mod n.
pub fn cycle(n: usize) -> FiniteStructure {
    let sig = Arc::new(Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap());
    let table: BTreeSet<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    FiniteStructure::new(sig, n, vec![table], vec![]).unwrap()
}

/// The directed chain 0 -> 1 -> ... -> n-1 over `{S/2}`.
pub fn chain(n: usize) -> FiniteStructure {
    let sig = Arc::new(Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap());
    let table: BTreeSet<Vec<usize>> = (0..n.saturating_sub(1)).map(|i| vec![i, i + 1]).collect();
    FiniteStructure::new(sig, n, vec![table], vec![]).unwrap()
}

/// n isolated points over `{S/2}`.
pub fn edgeless(n: usize) -> FiniteStructure {
    let sig = Arc::new(Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap());
    FiniteStructure::new(sig, n, vec![BTreeSet::new()], vec![]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_c3() {
        let c3 = parse_structure("(structure (universe 3) (rel S (0 1) (1 2) (2 0)))").unwrap();
        assert_eq!(c3, cycle(3));
    }

    #[test]
    fn parse_singleton_without_relations() {
        let s = parse_structure("(structure (universe 1))").unwrap();
        assert_eq!(s.size(), 1);
        assert!(s.sig().relations().is_empty());
    }

    #[test]
    fn parse_out_of_range_element() {
        let err = parse_structure("(structure (universe 3) (rel S (0 3)))").unwrap_err();
        assert!(matches!(err, StructureError::ElementOutOfRange { element: 3, size: 3, .. }));
    }

    #[test]
    fn serialize_reparses_identically() {
        let c3 = cycle(3);
        let text = c3.serialize();
        let back = parse_structure(&text).unwrap();
        assert_eq!(back, c3);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn empty_relation_needs_arity_annotation() {
        assert!(matches!(
            parse_structure("(structure (universe 2) (rel S))"),
            Err(StructureError::UnknownArity { .. })
        ));
        let s = parse_structure("(structure (universe 2) (rel S 2))").unwrap();
        assert_eq!(s.sig().relations(), &[("S".to_string(), 2)]);
    }

    #[test]
    fn isomorphic_relabeled_c3() {
        let c3 = cycle(3);
        let rotated = c3.relabel(&[1, 2, 0]);
        let map = isomorphic(&c3, &rotated).unwrap().unwrap();
        assert_eq!(map.len(), 3);
        // The bijection preserves the edge relation.
        for t in c3.table(0) {
            assert!(rotated.holds(0, &[map[t[0]], map[t[1]]]));
        }
    }

    #[test]
    fn c3_not_isomorphic_to_c5() {
        assert!(isomorphic(&cycle(3), &cycle(5)).unwrap().is_none());
    }

    #[test]
    fn two_element_models_not_isomorphic() {
        // The two non-isomorphic 2-element structures: empty S vs single edge.
        // Exhaustive oracle: neither of the two bijections preserves tables.
        let empty = edgeless(2);
        let edge = chain(2);
        for perm in [[0, 1], [1, 0]] {
            let relabeled = edge.relabel(&perm);
            assert_ne!(relabeled, empty);
        }
        assert!(isomorphic(&empty, &edge).unwrap().is_none());
    }

    #[test]
    fn canonical_form_permutation_invariant() {
        let c3 = cycle(3);
        assert_eq!(canonical_form(&c3), canonical_form(&c3.relabel(&[2, 0, 1])));
        assert_ne!(canonical_form(&c3), canonical_form(&chain(3)));
    }

    #[test]
    fn canonical_form_of_chain_by_enumeration() {
        // Oracle: minimum over all 6 permutations, computed directly.
        let c = chain(3);
        let mut keys: Vec<Vec<u8>> = permutations(3)
            .into_iter()
            .map(|p| {
                c.relabel(&p)
                    .encode()
                    .into_iter()
                    .flat_map(|x| x.to_be_bytes())
                    .collect()
            })
            .collect();
        keys.sort();
        assert_eq!(canonical_form(&c), keys[0]);
    }

    #[test]
    fn singleton_canonical_form_stable() {
        let s = edgeless(1);
        assert_eq!(canonical_form(&s), canonical_form(&edgeless(1)));
    }

    #[test]
    fn induced_substructure_examples() {
        // C5 restricted to {0, 2}: no edges survive.
        let sub = induced_substructure(&cycle(5), &BTreeSet::from([0, 2])).unwrap();
        assert_eq!(sub.size(), 2);
        assert!(sub.table(0).is_empty());
        // C3 restricted to {0, 1}: the single edge S(0,1).
        let sub = induced_substructure(&cycle(3), &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(sub, chain(2));
        // Identity case.
        let sub = induced_substructure(&cycle(3), &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(sub, cycle(3));
        // Errors.
        assert!(matches!(
            induced_substructure(&cycle(3), &BTreeSet::new()),
            Err(StructureError::EmptySubset)
        ));
    }

    #[test]
    fn disjoint_sum_examples() {
        let sum = disjoint_sum(&cycle(3), &cycle(5)).unwrap();
        assert_eq!(sum.size(), 8);
        assert_eq!(sum.table(0).len(), 8);
        assert!(sum.holds(0, &[3, 4]));
        let plus_point = disjoint_sum(&cycle(3), &edgeless(1)).unwrap();
        assert_eq!(plus_point.size(), 4);
        assert_eq!(plus_point.table(0).len(), 3);
    }

    #[test]
    fn product_examples() {
        // singleton x C3: no edge survives componentwise.
        let p = product(&edgeless(1), &cycle(3)).unwrap();
        assert_eq!(p.size(), 3);
        assert!(p.table(0).is_empty());
        // C3 x C3: 9 elements, three disjoint 3-cycles.
        let p = product(&cycle(3), &cycle(3)).unwrap();
        assert_eq!(p.size(), 9);
        assert_eq!(p.table(0).len(), 9);
        // Brute-force cycle decomposition: every element has out-degree 1
        // and lies on a closed 3-walk.
        for e in 0..9 {
            let succ: Vec<usize> = p
                .table(0)
                .iter()
                .filter(|t| t[0] == e)
                .map(|t| t[1])
                .collect();
            assert_eq!(succ.len(), 1);
            let mut x = e;
            for _ in 0..3 {
                x = p.table(0).iter().find(|t| t[0] == x).unwrap()[1];
            }
            assert_eq!(x, e);
        }
    }

    #[test]
    fn size_invariants() {
        let a = cycle(3);
        let b = chain(4);
        assert_eq!(disjoint_sum(&a, &b).unwrap().size(), a.size() + b.size());
        assert_eq!(product(&a, &b).unwrap().size(), a.size() * b.size());
    }
}
