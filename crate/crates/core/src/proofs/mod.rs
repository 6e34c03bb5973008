//! Checking Hilbert-style derivations in the normal systems and in their
//! certainty versions (the same axioms and rules with `Cert` for `K`).
//!
//! Certainty proofs are checked by translating every line to the knowledge
//! language first. Axiom lines are recognised by matching against the
//! schema, structurally and then on desugared forms; a supplied
//! substitution must agree with the match. Line references are 1-based.

mod file;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::decision::{translate_c_to_k, Schema, SystemId};
use crate::formula::{Formula, Language};
use crate::pattern::{match_pattern, meta, ANY_AGENT};

pub use file::{corpus, load_proof, save_proof, ProofFileError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofLanguage {
    LK,
    LC,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Justification {
    /// Substitution instance of a propositional tautology.
    Taut,
    Axiom {
        schema: Schema,
        /// Metavariable (`phi`, `psi`) to formula; may be empty.
        subst: BTreeMap<String, Formula>,
    },
    /// Modus ponens from the lines holding `φ` and `φ -> ψ`.
    ModusPonens(usize, usize),
    Necessitation(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofLine {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Proof {
    pub system: SystemId,
    pub language: ProofLanguage,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofErrorKind {
    #[error("the proof has no lines")]
    Empty,
    #[error("axiom {0} is not part of {1}")]
    SchemaNotInSystem(&'static str, SystemId),
    #[error("not an instance of axiom {0}")]
    NotAnInstance(&'static str),
    #[error("substitution disagrees with the formula at `{0}`")]
    BadSubstitution(String),
    #[error("not a propositional tautology")]
    NotTautology,
    #[error("line {0} is not earlier than this line")]
    ForwardReference(usize),
    #[error("modus ponens: line {1} is not `line {0} -> this line`")]
    ModusPonensMismatch(usize, usize),
    #[error("necessitation: this line is not K applied to line {0}")]
    NecessitationMismatch(usize),
    #[error("formula is outside the proof's language: {0}")]
    Language(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ProofError {
    /// 1-based line number.
    pub line: usize,
    pub kind: ProofErrorKind,
}

fn to_knowledge(f: &Formula, lang: ProofLanguage) -> Result<Formula, ProofErrorKind> {
    let bad = |f: &Formula| ProofErrorKind::Language(f.to_string());
    match lang {
        ProofLanguage::LK => match f.desugar().classify() {
            Language::LK | Language::Propositional => Ok(f.clone()),
            _ => Err(bad(f)),
        },
        ProofLanguage::LC => translate_c_to_k(f).map_err(|_| bad(f)),
    }
}

pub fn check_proof(p: &Proof) -> Result<(), ProofError> {
    if p.lines.is_empty() {
        return Err(ProofError {
            line: 0,
            kind: ProofErrorKind::Empty,
        });
    }
    let mut done: Vec<Formula> = vec![];
    for (k, line) in p.lines.iter().enumerate() {
        let err = |kind| ProofError { line: k + 1, kind };
        let f = to_knowledge(&line.formula, p.language).map_err(err)?;
        let earlier = |i: usize| -> Result<&Formula, ProofError> {
            if i == 0 || i > k {
                Err(err(ProofErrorKind::ForwardReference(i)))
            } else {
                Ok(&done[i - 1])
            }
        };
        match &line.just {
            Justification::Taut => {
                if !is_prop_tautology(&f) {
                    return Err(err(ProofErrorKind::NotTautology));
                }
            }
            Justification::Axiom { schema, subst } => {
                if !p.system.schemas().contains(schema) {
                    return Err(err(ProofErrorKind::SchemaNotInSystem(schema.name(), p.system)));
                }
                let found = match_axiom(&f, *schema)
                    .ok_or_else(|| err(ProofErrorKind::NotAnInstance(schema.name())))?;
                for (var, given) in subst {
                    let given = to_knowledge(given, p.language).map_err(err)?;
                    let ok = found
                        .get(canonical_var(var))
                        .is_some_and(|b| same(b, &given));
                    if !ok {
                        return Err(err(ProofErrorKind::BadSubstitution(var.clone())));
                    }
                }
            }
            Justification::ModusPonens(i, j) => {
                let (a, imp) = (earlier(*i)?, earlier(*j)?);
                if !is_implication(imp, a, &f) && !is_implication(a, imp, &f) {
                    return Err(err(ProofErrorKind::ModusPonensMismatch(*i, *j)));
                }
            }
            Justification::Necessitation(i) => {
                let a = earlier(*i)?;
                let ok = match &f {
                    Formula::Know(_, body) => same(body, a),
                    _ => false,
                };
                if !ok {
                    return Err(err(ProofErrorKind::NecessitationMismatch(*i)));
                }
            }
        }
        done.push(f);
    }
    Ok(())
}

fn canonical_var(v: &str) -> &str {
    match v {
        "φ" | "phi" | "Phi" => "phi",
        "ψ" | "psi" | "Psi" => "psi",
        other => other,
    }
}

fn same(a: &Formula, b: &Formula) -> bool {
    a == b || a.desugar() == b.desugar()
}

/// `imp` is `a -> b`, up to desugaring.
fn is_implication(imp: &Formula, a: &Formula, b: &Formula) -> bool {
    if let Formula::Implies(x, y) = imp {
        if x.as_ref() == a && y.as_ref() == b {
            return true;
        }
    }
    imp.desugar() == Formula::implies(a.clone(), b.clone()).desugar()
}

/// The schema as a pattern over the metavariables `phi` and `psi`.
pub fn schema_pattern(schema: Schema) -> Formula {
    let k = |f| Formula::know(ANY_AGENT, f);
    let (phi, psi) = (meta("phi"), meta("psi"));
    match schema {
        Schema::K => Formula::implies(
            Formula::and(k(phi.clone()), k(Formula::implies(phi, psi.clone()))),
            k(psi),
        ),
        Schema::T => Formula::implies(k(phi.clone()), phi),
        Schema::Four => Formula::implies(k(phi.clone()), k(k(phi))),
        Schema::Five => Formula::implies(
            Formula::not(k(phi.clone())),
            k(Formula::not(k(phi))),
        ),
        Schema::D => Formula::not(k(Formula::False)),
    }
}

/// Substitution making `f` an instance of `schema` (knowledge language),
/// if any. Every modal operator of the instance belongs to one agent.
pub fn match_axiom(f: &Formula, schema: Schema) -> Option<BTreeMap<String, Formula>> {
    let pat = schema_pattern(schema);
    match_pattern(&pat, f)
        .or_else(|| match_pattern(&pat.desugar(), &f.desugar()))
        .map(|b| b.vars)
}

/// [`match_axiom`] for a formula of the given language; certainty formulas
/// are matched against the schema with `Cert` for `K`.
pub fn match_axiom_in(
    f: &Formula,
    schema: Schema,
    lang: ProofLanguage,
) -> Option<BTreeMap<String, Formula>> {
    let k = to_knowledge(f, lang).ok()?;
    let found = match_axiom(&k, schema)?;
    if lang == ProofLanguage::LK {
        return Some(found);
    }
    found
        .into_iter()
        .map(|(v, b)| Some((v, crate::decision::translate_k_to_c(&b).ok()?)))
        .collect()
}

/// Truth-table check with maximal modal and weight subformulas as atoms.
pub fn is_prop_tautology(f: &Formula) -> bool {
    let mut atoms = vec![];
    collect_atoms(f, &mut atoms);
    if atoms.len() > 24 {
        // 2^24 rows is the practical ceiling; larger inputs are rejected.
        return false;
    }
    (0u32..1 << atoms.len()).all(|row| truth(f, &atoms, row))
}

fn collect_atoms<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Not(a) => collect_atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        _ => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
}

fn truth(f: &Formula, atoms: &[&Formula], row: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Not(a) => !truth(a, atoms, row),
        Formula::And(a, b) => truth(a, atoms, row) && truth(b, atoms, row),
        Formula::Or(a, b) => truth(a, atoms, row) || truth(b, atoms, row),
        Formula::Implies(a, b) => !truth(a, atoms, row) || truth(b, atoms, row),
        _ => {
            let k = atoms.iter().position(|a| *a == f).expect("collected atom");
            row >> k & 1 == 1
        }
    }
}

#[cfg(test)]
mod tests;
