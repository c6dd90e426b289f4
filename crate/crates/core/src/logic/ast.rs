//! ASTs for positive formulas, h-inductive sentences and theories.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::structures::Signature;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A positive formula: atoms, equality, truth values, conjunction,
/// disjunction and existential quantification. No negation, implication or
/// universal quantifier can appear.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositiveFormula {
    Truth,
    Falsity,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    And(Vec<PositiveFormula>),
    Or(Vec<PositiveFormula>),
    Exists(Vec<String>, Box<PositiveFormula>),
}

impl PositiveFormula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            PositiveFormula::Truth | PositiveFormula::Falsity => {}
            PositiveFormula::Atom(_, terms) => {
                for t in terms {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            PositiveFormula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            PositiveFormula::And(fs) | PositiveFormula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            PositiveFormula::Exists(vars, body) => {
                let added: Vec<&String> = vars.iter().filter(|v| bound.insert((*v).clone())).collect();
                body.collect_free(bound, out);
                for v in added {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            PositiveFormula::Truth
            | PositiveFormula::Falsity
            | PositiveFormula::Atom(..)
            | PositiveFormula::Eq(..) => true,
            PositiveFormula::And(fs) | PositiveFormula::Or(fs) => {
                fs.iter().all(|f| f.is_quantifier_free())
            }
            PositiveFormula::Exists(..) => false,
        }
    }
}

impl fmt::Display for PositiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositiveFormula::Truth => write!(f, "true"),
            PositiveFormula::Falsity => write!(f, "false"),
            PositiveFormula::Atom(name, terms) => {
                write!(f, "({name}")?;
                for t in terms {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            PositiveFormula::Eq(a, b) => write!(f, "(= {a} {b})"),
            PositiveFormula::And(fs) => {
                write!(f, "(and")?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            PositiveFormula::Or(fs) => {
                write!(f, "(or")?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            PositiveFormula::Exists(vars, body) => {
                write!(f, "(exists (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ") {body})")
            }
        }
    }
}

/// An h-inductive sentence `forall vars (premise -> conclusion)` with both
/// sides positive. H-universal sentences are the special case
/// `conclusion = Falsity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HInductiveSentence {
    pub vars: Vec<String>,
    pub premise: PositiveFormula,
    pub conclusion: PositiveFormula,
}

impl HInductiveSentence {
    pub fn is_h_universal(&self) -> bool {
        self.conclusion == PositiveFormula::Falsity
    }

    /// The sentence must be closed: no free variable escapes `vars`.
    pub fn closed(&self) -> bool {
        let bound: BTreeSet<&String> = self.vars.iter().collect();
        self.premise
            .free_vars()
            .iter()
            .chain(self.conclusion.free_vars().iter())
            .all(|v| bound.contains(v))
    }
}

impl fmt::Display for HInductiveSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(forall (")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ") (=> {} {}))", self.premise, self.conclusion)
    }
}

/// A named h-inductive theory: labeled sentences over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub sig: Arc<Signature>,
    pub axioms: Vec<(String, HInductiveSentence)>,
}

impl Theory {
    pub fn sentence(&self, label: &str) -> Option<&HInductiveSentence> {
        self.axioms.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }
}
