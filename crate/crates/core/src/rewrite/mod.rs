//! Flattening nested knowledge and certainty operators under KD45.
//!
//! Bodies are normalized innermost-first. Each `K` body is put in
//! conjunctive normal form with propositional literals before modal ones,
//! after which five equivalences push the operator down to propositional
//! arguments. Certainty formulas are rewritten through the knowledge
//! translation and mapped back.

use std::fmt;

use thiserror::Error;

use crate::decision::{decide, translate_c_to_k, translate_k_to_c, SystemId};
use crate::formula::{AgentId, Formula, Language};
use crate::pattern::{instantiate, Bindings, match_pattern, meta, ANY_AGENT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRule {
    pub name: &'static str,
    pub left: Formula,
    pub right: Formula,
    pub direction: Direction,
}

impl RewriteRule {
    fn sides(&self) -> (&Formula, &Formula) {
        match self.direction {
            Direction::Forward => (&self.left, &self.right),
            Direction::Backward => (&self.right, &self.left),
        }
    }

    /// Both sides are equivalent in KD45. Metavariables act as atoms, so this
    /// covers every instance.
    pub fn verify(&self) -> bool {
        let one = Bindings {
            agent: Some(AgentId::DEFAULT),
            ..Bindings::default()
        };
        let iff = Formula::iff(instantiate(&self.left, &one), instantiate(&self.right, &one));
        decide(&iff, SystemId::KD45).is_ok_and(|r| r.verdict.is_valid())
    }

    pub fn reversed(&self) -> RewriteRule {
        RewriteRule {
            direction: match self.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            },
            ..self.clone()
        }
    }
}

fn k(f: Formula) -> Formula {
    Formula::know(ANY_AGENT, f)
}

/// The bundled rules, in the order the normalizer tries them.
pub fn rules() -> Vec<RewriteRule> {
    let (phi, psi) = (meta("phi"), meta("psi"));
    let rule = |name, left, right| RewriteRule {
        name,
        left,
        right,
        direction: Direction::Forward,
    };
    vec![
        rule("k-k", k(k(phi.clone())), k(phi.clone())),
        rule("k-not-k", k(Formula::not(k(phi.clone()))), Formula::not(k(phi.clone()))),
        rule(
            "k-and",
            k(Formula::and(phi.clone(), psi.clone())),
            Formula::and(k(phi.clone()), k(psi.clone())),
        ),
        rule(
            "k-or-k",
            k(Formula::or(phi.clone(), k(psi.clone()))),
            Formula::or(k(phi.clone()), k(psi.clone())),
        ),
        rule(
            "k-or-not-k",
            k(Formula::or(phi.clone(), Formula::not(k(psi.clone())))),
            Formula::or(k(phi), Formula::not(k(psi))),
        ),
    ]
}

pub fn rule(name: &str) -> Option<RewriteRule> {
    rules().into_iter().find(|r| r.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("expected a knowledge or certainty formula, got {0}")]
    NotModal(Language),
    #[error("depth-one normalization needs a single agent, found {0}")]
    MultiAgent(usize),
    #[error("no subformula at position {0}")]
    BadPosition(Position),
    #[error("rule {rule} does not match at position {position}")]
    NoMatch { rule: &'static str, position: Position },
}

/// Path of child indices from the root. A certainty operator counts as a
/// single node with its argument as child 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Position(pub Vec<usize>);

impl Position {
    fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub rule: &'static str,
    pub position: Position,
    pub before: Formula,
    pub after: Formula,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {} => {}", self.rule, self.position, self.before, self.after)
    }
}

/// Name of the trace step that replaces a body by its normal form.
pub const BODY_CNF: &str = "body-cnf";

fn check_input(f: &Formula) -> Result<Language, RewriteError> {
    let lang = f.classify();
    if !matches!(lang, Language::LK | Language::LC | Language::Propositional) {
        return Err(RewriteError::NotModal(lang));
    }
    let agents = f.agents().len();
    if agents > 1 {
        return Err(RewriteError::MultiAgent(agents));
    }
    Ok(lang)
}

fn to_k(f: &Formula, lang: Language) -> Formula {
    if lang == Language::LC {
        translate_c_to_k(f).expect("certainty formula translates")
    } else {
        f.clone()
    }
}

fn from_k(f: Formula, lang: Language) -> Formula {
    if lang == Language::LC {
        translate_k_to_c(&f).expect("knowledge formula translates")
    } else {
        f
    }
}

pub fn normalize_depth_one(f: &Formula) -> Result<Formula, RewriteError> {
    normalize_with_trace(f).map(|(g, _)| g)
}

/// Normal form of modal depth at most one together with the rewrite steps.
pub fn normalize_with_trace(f: &Formula) -> Result<(Formula, Vec<TraceStep>), RewriteError> {
    let lang = check_input(f)?;
    let mut n = Normalizer {
        rules: rules(),
        trace: vec![],
    };
    let out = n.norm(&to_k(f, lang), Position::default());
    let trace = n
        .trace
        .into_iter()
        .map(|s| TraceStep {
            before: from_k(s.before, lang),
            after: from_k(s.after, lang),
            ..s
        })
        .collect();
    Ok((from_k(out, lang), trace))
}

struct Normalizer {
    rules: Vec<RewriteRule>,
    trace: Vec<TraceStep>,
}

impl Normalizer {
    fn norm(&mut self, f: &Formula, pos: Position) -> Formula {
        match f {
            Formula::Prop(_) | Formula::True | Formula::False => f.clone(),
            Formula::Not(a) => Formula::not(self.norm(a, pos.child(0))),
            Formula::And(a, b) => Formula::and(self.norm(a, pos.child(0)), self.norm(b, pos.child(1))),
            Formula::Or(a, b) => Formula::or(self.norm(a, pos.child(0)), self.norm(b, pos.child(1))),
            Formula::Implies(a, b) => {
                Formula::implies(self.norm(a, pos.child(0)), self.norm(b, pos.child(1)))
            }
            Formula::Know(i, a) => {
                let body = self.norm(a, pos.child(0));
                if body.modal_depth() == 0 {
                    return Formula::know(*i, body);
                }
                let cnf = cnf_formula(&body);
                let before = Formula::know(*i, body);
                let current = Formula::know(*i, cnf);
                if current != before {
                    self.trace.push(TraceStep {
                        rule: BODY_CNF,
                        position: pos.clone(),
                        before,
                        after: current.clone(),
                    });
                }
                self.push_down(current, pos)
            }
            Formula::Weight(_) | Formula::WeightIn(_) => unreachable!("input language checked"),
        }
    }

    /// Applies the first matching rule at the root of `f` and continues on
    /// the operators it creates.
    fn push_down(&mut self, f: Formula, pos: Position) -> Formula {
        let Some(rule) = self.rules.iter().find(|r| match_pattern(&r.left, &f).is_some()) else {
            return f;
        };
        let b = match_pattern(&rule.left, &f).expect("just matched");
        let out = instantiate(&rule.right, &b);
        let name = rule.name;
        self.trace.push(TraceStep {
            rule: name,
            position: pos.clone(),
            before: f,
            after: out.clone(),
        });
        match (name, out) {
            ("k-and", Formula::And(x, y)) => Formula::and(
                self.push_down(*x, pos.child(0)),
                self.push_down(*y, pos.child(1)),
            ),
            ("k-or-k" | "k-or-not-k", Formula::Or(x, y)) => {
                Formula::or(self.push_down(*x, pos.child(0)), *y)
            }
            (_, out) => out,
        }
    }
}

/// Literal: an atom (proposition or modal formula) with its sign.
type Lit = (Formula, bool);

fn cnf(f: &Formula, positive: bool) -> Vec<Vec<Lit>> {
    let product = |a: Vec<Vec<Lit>>, b: Vec<Vec<Lit>>| {
        let mut out = vec![];
        for x in &a {
            for y in &b {
                out.push(x.iter().chain(y).cloned().collect());
            }
        }
        out
    };
    let concat = |mut a: Vec<Vec<Lit>>, b: Vec<Vec<Lit>>| {
        a.extend(b);
        a
    };
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => vec![],
        (Formula::True, false) | (Formula::False, true) => vec![vec![]],
        (Formula::Not(a), _) => cnf(a, !positive),
        (Formula::And(a, b), true) => concat(cnf(a, true), cnf(b, true)),
        (Formula::And(a, b), false) => product(cnf(a, false), cnf(b, false)),
        (Formula::Or(a, b), true) => product(cnf(a, true), cnf(b, true)),
        (Formula::Or(a, b), false) => concat(cnf(a, false), cnf(b, false)),
        (Formula::Implies(a, b), true) => product(cnf(a, false), cnf(b, true)),
        (Formula::Implies(a, b), false) => concat(cnf(a, true), cnf(b, false)),
        _ => vec![vec![(f.clone(), positive)]],
    }
}

/// Conjunctive normal form with duplicate literals and clauses and
/// tautological clauses removed; in each clause propositional literals
/// precede modal ones.
fn cnf_formula(f: &Formula) -> Formula {
    let mut clauses: Vec<Vec<Lit>> = vec![];
    for clause in cnf(f, true) {
        let mut lits: Vec<Lit> = vec![];
        for l in clause {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        let tautology = lits.iter().any(|(a, s)| lits.contains(&(a.clone(), !s)));
        if tautology {
            continue;
        }
        lits.sort_by_key(|(a, _)| a.is_know());
        if !clauses.contains(&lits) {
            clauses.push(lits);
        }
    }
    Formula::conjunction(clauses.into_iter().map(|c| {
        Formula::disjunction(
            c.into_iter()
                .map(|(a, s)| if s { a } else { Formula::not(a) }),
        )
    }))
}

/// Subformula at `pos`, with certainty operators as single nodes.
pub fn subformula_at<'a>(f: &'a Formula, pos: &Position) -> Option<&'a Formula> {
    let mut cur = f;
    for &i in &pos.0 {
        cur = modal_children(cur).get(i).copied()?;
    }
    Some(cur)
}

fn modal_children(f: &Formula) -> Vec<&Formula> {
    match f.as_cert() {
        Some((_, a)) => vec![a],
        None => f.children(),
    }
}

fn replace_at(f: &Formula, path: &[usize], new: Formula) -> Formula {
    let Some((&i, rest)) = path.split_first() else {
        return new;
    };
    let sub = |a: &Formula| replace_at(a, rest, new.clone());
    if let Some((agent, a)) = f.as_cert() {
        return Formula::cert(agent, sub(a));
    }
    match (f, i) {
        (Formula::Not(a), 0) => Formula::not(sub(a)),
        (Formula::Know(j, a), 0) => Formula::know(*j, sub(a)),
        (Formula::And(a, b), 0) => Formula::and(sub(a), (**b).clone()),
        (Formula::And(a, b), _) => Formula::and((**a).clone(), sub(b)),
        (Formula::Or(a, b), 0) => Formula::or(sub(a), (**b).clone()),
        (Formula::Or(a, b), _) => Formula::or((**a).clone(), sub(b)),
        (Formula::Implies(a, b), 0) => Formula::implies(sub(a), (**b).clone()),
        (Formula::Implies(a, b), _) => Formula::implies((**a).clone(), sub(b)),
        _ => unreachable!("position validated"),
    }
}

/// One rewrite step at `pos`. Certainty formulas are matched against the
/// rule with `Cert` in place of `K`.
pub fn apply_rule(
    f: &Formula,
    rule: &RewriteRule,
    pos: &Position,
) -> Result<(Formula, TraceStep), RewriteError> {
    let target = subformula_at(f, pos).ok_or_else(|| RewriteError::BadPosition(pos.clone()))?;
    let lang = target.classify();
    let (from, to) = rule.sides();
    let no_match = || RewriteError::NoMatch {
        rule: rule.name,
        position: pos.clone(),
    };
    let k_target = match lang {
        Language::LC => translate_c_to_k(target).map_err(|_| no_match())?,
        Language::LK => target.clone(),
        _ => return Err(no_match()),
    };
    let b = match_pattern(from, &k_target).ok_or_else(no_match)?;
    let after = from_k(instantiate(to, &b), lang);
    let step = TraceStep {
        rule: rule.name,
        position: pos.clone(),
        before: target.clone(),
        after: after.clone(),
    };
    Ok((replace_at(f, &pos.0, after), step))
}

#[cfg(test)]
mod tests;
