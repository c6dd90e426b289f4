//! Parsers for the formula, sentence and theory grammars.

use std::sync::Arc;

use crate::sexpr::{self, Sexp};
use crate::structures::{Signature, StructureError};

use super::ast::{HInductiveSentence, PositiveFormula, Term, Theory};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{pos}: {op} is not allowed here: positive fragment only")]
    NotPositive { pos: String, op: String },
    #[error("{pos}: unknown symbol {name}")]
    UnknownSymbol { pos: String, name: String },
    #[error("{pos}: relation {name} has arity {expected}, got {got} arguments")]
    ArityMismatch { pos: String, name: String, expected: usize, got: usize },
    #[error("{pos}: sentence is not closed: free variable {var}")]
    NotClosed { pos: String, var: String },
    #[error("{pos}: duplicate axiom label {label}")]
    DuplicateLabel { pos: String, label: String },
    #[error("bad signature: {0}")]
    BadSignature(#[from] StructureError),
}

fn term(s: &Sexp, sig: &Signature) -> Result<Term, ParseError> {
    let name = s
        .atom()
        .ok_or_else(|| ParseError::Syntax(format!("{}: expected a term", s.pos())))?;
    if matches!(name, "true" | "false" | "and" | "or" | "exists" | "not" | "forall" | "=>" | "=") {
        return Err(ParseError::Syntax(format!("{}: {name} cannot be a term", s.pos())));
    }
    if sig.constant_index(name).is_some() {
        Ok(Term::Const(name.to_string()))
    } else {
        Ok(Term::Var(name.to_string()))
    }
}

fn var_list(s: &Sexp) -> Result<Vec<String>, ParseError> {
    let items = s
        .list()
        .ok_or_else(|| ParseError::Syntax(format!("{}: expected a variable list", s.pos())))?;
    items
        .iter()
        .map(|v| {
            v.atom()
                .map(str::to_string)
                .ok_or_else(|| ParseError::Syntax(format!("{}: expected a variable", v.pos())))
        })
        .collect()
}

fn formula(s: &Sexp, sig: &Signature) -> Result<PositiveFormula, ParseError> {
    match s {
        Sexp::Atom(a, pos) => match a.as_str() {
            "true" => Ok(PositiveFormula::Truth),
            "false" => Ok(PositiveFormula::Falsity),
            other => Err(ParseError::Syntax(format!("{pos}: unexpected atom {other:?}"))),
        },
        Sexp::List(items, pos) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| ParseError::Syntax(format!("{pos}: expected an operator or relation")))?;
            match head {
                "not" | "forall" | "=>" => Err(ParseError::NotPositive {
                    pos: pos.to_string(),
                    op: head.to_string(),
                }),
                "and" | "or" => {
                    if items.len() < 3 {
                        return Err(ParseError::Syntax(format!(
                            "{pos}: {head} needs at least two operands"
                        )));
                    }
                    let fs = items[1..]
                        .iter()
                        .map(|x| formula(x, sig))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        PositiveFormula::And(fs)
                    } else {
                        PositiveFormula::Or(fs)
                    })
                }
                "exists" => {
                    if items.len() != 3 {
                        return Err(ParseError::Syntax(format!(
                            "{pos}: expected (exists (vars) body)"
                        )));
                    }
                    let vars = var_list(&items[1])?;
                    if vars.is_empty() {
                        return Err(ParseError::Syntax(format!(
                            "{pos}: exists needs at least one variable"
                        )));
                    }
                    let body = formula(&items[2], sig)?;
                    Ok(PositiveFormula::Exists(vars, Box::new(body)))
                }
                "=" => {
                    if items.len() != 3 {
                        return Err(ParseError::Syntax(format!("{pos}: expected (= t1 t2)")));
                    }
                    Ok(PositiveFormula::Eq(term(&items[1], sig)?, term(&items[2], sig)?))
                }
                rel => {
                    let idx = sig.relation_index(rel).ok_or_else(|| ParseError::UnknownSymbol {
                        pos: pos.to_string(),
                        name: rel.to_string(),
                    })?;
                    let arity = sig.arity(idx);
                    let args = items[1..]
                        .iter()
                        .map(|t| term(t, sig))
                        .collect::<Result<Vec<_>, _>>()?;
                    if args.len() != arity {
                        return Err(ParseError::ArityMismatch {
                            pos: pos.to_string(),
                            name: rel.to_string(),
                            expected: arity,
                            got: args.len(),
                        });
                    }
                    Ok(PositiveFormula::Atom(rel.to_string(), args))
                }
            }
        }
    }
}

/// Parse a positive formula against a signature.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<PositiveFormula, ParseError> {
    let s = sexpr::parse_one(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    formula(&s, sig)
}

fn sentence(s: &Sexp, sig: &Signature) -> Result<HInductiveSentence, ParseError> {
    let items = s
        .list()
        .ok_or_else(|| ParseError::Syntax(format!("{}: expected a sentence", s.pos())))?;
    let head = items.first().and_then(|h| h.atom());
    let sent = match head {
        // (not f): h-universal, normalized to conclusion = Falsity.
        Some("not") => {
            if items.len() != 2 {
                return Err(ParseError::Syntax(format!("{}: expected (not f)", s.pos())));
            }
            HInductiveSentence {
                vars: Vec::new(),
                premise: formula(&items[1], sig)?,
                conclusion: PositiveFormula::Falsity,
            }
        }
        Some("forall") => {
            if items.len() != 3 {
                return Err(ParseError::Syntax(format!(
                    "{}: expected (forall (vars) (=> p q))",
                    s.pos()
                )));
            }
            let vars = var_list(&items[1])?;
            let imp = items[2]
                .list()
                .filter(|l| l.len() == 3 && l[0].atom() == Some("=>"))
                .ok_or_else(|| ParseError::Syntax(format!("{}: expected (=> p q)", items[2].pos())))?;
            HInductiveSentence {
                vars,
                premise: formula(&imp[1], sig)?,
                conclusion: formula(&imp[2], sig)?,
            }
        }
        _ => {
            return Err(ParseError::Syntax(format!(
                "{}: expected (forall ...) or (not ...)",
                s.pos()
            )))
        }
    };
    if let Some(v) = sentence_free_var(&sent) {
        return Err(ParseError::NotClosed { pos: s.pos().to_string(), var: v });
    }
    Ok(sent)
}

fn sentence_free_var(s: &HInductiveSentence) -> Option<String> {
    let bound: std::collections::BTreeSet<&String> = s.vars.iter().collect();
    s.premise
        .free_vars()
        .into_iter()
        .chain(s.conclusion.free_vars())
        .find(|v| !bound.contains(v))
}

/// Parse a sentence against a signature.
pub fn parse_sentence(text: &str, sig: &Signature) -> Result<HInductiveSentence, ParseError> {
    let s = sexpr::parse_one(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    sentence(&s, sig)
}

/// Parse a theory file:
/// `(theory NAME (sig (rel NAME ARITY)* (const NAME)*) (axiom LABEL sentence)*)`
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let top = sexpr::parse_one(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    let items = top
        .list()
        .ok_or_else(|| ParseError::Syntax("expected (theory ...)".to_string()))?;
    if items.first().and_then(|s| s.atom()) != Some("theory") {
        return Err(ParseError::Syntax(format!("{}: expected (theory ...)", top.pos())));
    }
    let name = items
        .get(1)
        .and_then(|s| s.atom())
        .ok_or_else(|| ParseError::Syntax("expected theory name".to_string()))?
        .to_string();
    let sig_items = items
        .get(2)
        .and_then(|s| s.list())
        .filter(|l| l.first().and_then(|h| h.atom()) == Some("sig"))
        .ok_or_else(|| ParseError::Syntax("expected (sig ...)".to_string()))?;
    let mut relations = Vec::new();
    let mut constants = Vec::new();
    for decl in &sig_items[1..] {
        let l = decl
            .list()
            .ok_or_else(|| ParseError::Syntax(format!("{}: expected (rel ...) or (const ...)", decl.pos())))?;
        match l.first().and_then(|h| h.atom()) {
            Some("rel") if l.len() == 3 => {
                let rname = l[1]
                    .atom()
                    .ok_or_else(|| ParseError::Syntax(format!("{}: expected relation name", l[1].pos())))?;
                let arity: usize = l[2]
                    .atom()
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| ParseError::Syntax(format!("{}: expected an arity", l[2].pos())))?;
                relations.push((rname.to_string(), arity));
            }
            Some("const") if l.len() == 2 => {
                let cname = l[1]
                    .atom()
                    .ok_or_else(|| ParseError::Syntax(format!("{}: expected constant name", l[1].pos())))?;
                constants.push(cname.to_string());
            }
            _ => {
                return Err(ParseError::Syntax(format!(
                    "{}: expected (rel NAME ARITY) or (const NAME)",
                    decl.pos()
                )))
            }
        }
    }
    let sig = Arc::new(Signature::new(relations, constants)?);
    let mut axioms: Vec<(String, HInductiveSentence)> = Vec::new();
    for ax in &items[3..] {
        let l = ax
            .list()
            .filter(|l| l.len() == 3 && l[0].atom() == Some("axiom"))
            .ok_or_else(|| ParseError::Syntax(format!("{}: expected (axiom LABEL sentence)", ax.pos())))?;
        let label = l[1]
            .atom()
            .ok_or_else(|| ParseError::Syntax(format!("{}: expected axiom label", l[1].pos())))?
            .to_string();
        if axioms.iter().any(|(existing, _)| *existing == label) {
            return Err(ParseError::DuplicateLabel { pos: ax.pos().to_string(), label });
        }
        let sent = sentence(&l[2], &sig)?;
        axioms.push((label, sent));
    }
    Ok(Theory { name, sig, axioms })
}

/// Deterministic theory serialization; `parse_theory` inverts it.
pub fn serialize_theory(t: &Theory) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    write!(out, "(theory {}\n  (sig", t.name).unwrap();
    for (name, arity) in t.sig.relations() {
        write!(out, " (rel {name} {arity})").unwrap();
    }
    for name in t.sig.constants() {
        write!(out, " (const {name})").unwrap();
    }
    out.push(')');
    for (label, s) in &t.axioms {
        write!(out, "\n  (axiom {label} {s})").unwrap();
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

    fn s_sig() -> Signature {
        Signature::new(vec![("S".to_string(), 2)], vec![]).unwrap()
    }

    #[test]
    fn parses_exists() {
        let f = parse_formula("(exists (y) (S x y))", &s_sig()).unwrap();
        assert_eq!(
            f,
            PositiveFormula::Exists(
                vec!["y".into()],
                Box::new(PositiveFormula::Atom(
                    "S".into(),
                    vec![Term::Var("x".into()), Term::Var("y".into())]
                ))
            )
        );
    }

    #[test]
    fn parses_conjunction_of_atoms() {
        let f = parse_formula("(and (S x y) (S y x))", &s_sig()).unwrap();
        match f {
            PositiveFormula::And(fs) => assert_eq!(fs.len(), 2),
            other => panic!("expected And, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negation() {
        let err = parse_formula("(not (S x y))", &s_sig()).unwrap_err();
        assert!(matches!(err, ParseError::NotPositive { .. }));
        assert!(err.to_string().contains("positive fragment only"));
    }

    #[test]
    fn rejects_arity_mismatch_and_unknown_symbol() {
        assert!(matches!(
            parse_formula("(S x)", &s_sig()),
            Err(ParseError::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_formula("(R x y)", &s_sig()),
            Err(ParseError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn h_universal_sentence_normalized() {
        let s = parse_sentence("(not (exists (x) (S x x)))", &s_sig()).unwrap();
        assert!(s.is_h_universal());
        assert!(s.vars.is_empty());
    }

    #[test]
    fn totality_axiom_parses() {
        let s = parse_sentence("(forall (x) (=> true (exists (y) (S x y))))", &s_sig()).unwrap();
        assert_eq!(s.premise, PositiveFormula::Truth);
        assert!(!s.is_h_universal());
    }

    #[test]
    fn non_closed_sentence_rejected() {
        assert!(matches!(
            parse_sentence("(forall (x) (=> (S x y) false))", &s_sig()),
            Err(ParseError::NotClosed { .. })
        ));
    }

    #[test]
    fn theory_round_trip() {
        let text = "(theory T (sig (rel S 2)) (axiom no-2-cycle (not (exists (x y) (and (S x y) (S y x))))) (axiom in-func (forall (x y z) (=> (and (S x z) (S y z)) (= x y)))))";
        let t = parse_theory(text).unwrap();
        assert_eq!(t.axioms.len(), 2);
        assert!(t.axioms[0].1.is_h_universal());
        let printed = serialize_theory(&t);
        let back = parse_theory(&printed).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn print_parse_round_trip() {
        let sig = s_sig();
        for text in ["(exists (y) (S x y))", "(and (S x y) (S y x))", "true", "(= x y)"] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f);
        }
    }
}
