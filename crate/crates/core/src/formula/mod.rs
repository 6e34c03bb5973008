//! One AST shared by the probability language, the knowledge language and
//! the certainty fragment.
//!
//! Parsed formulas keep their sugar (`|`, `->`, rational bounds, `<`, `=`,
//! interval atoms) so they can be printed back verbatim. [`Formula::desugar`]
//! produces the canonical form, in which only propositions, constants,
//! negation, conjunction, knowledge operators and integer `>=` weight atoms
//! remain. `Cert_i(φ)` has no node of its own: it is the conjunction
//! `w_i(φ) >= 1 & -w_i(φ) >= -1`, recognised by [`Formula::as_cert`].

mod parse;
mod render;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::rational::Rational;

pub use parse::{parse, ParseError, ParseErrorKind};

/// Index of an agent. Agents are numbered from 1; single-agent formulas use
/// agent 1 and print without an index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(pub u32);

impl AgentId {
    pub const DEFAULT: AgentId = AgentId(1);

    /// Zero-based position of the agent in a structure's agent list.
    pub fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }
}

impl Default for AgentId {
    fn default() -> AgentId {
        AgentId::DEFAULT
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Relation {
    Ge,
    Le,
    Eq,
    Lt,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// `coeff · w_agent(arg)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightTerm {
    pub coeff: BigInt,
    pub agent: AgentId,
    pub arg: Formula,
}

impl WeightTerm {
    pub fn new(coeff: impl Into<BigInt>, agent: AgentId, arg: Formula) -> WeightTerm {
        WeightTerm {
            coeff: coeff.into(),
            agent,
            arg,
        }
    }
}

/// `Σ coeff·w(arg) rel bound`. Canonical atoms use `>=` and an integer bound.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightAtom {
    pub terms: Vec<WeightTerm>,
    pub rel: Relation,
    pub bound: Rational,
}

impl WeightAtom {
    pub fn is_canonical(&self) -> bool {
        self.rel == Relation::Ge && self.bound.is_integer() && !self.terms.is_empty()
    }
}

/// `w_agent(arg) in [lo, hi]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightInterval {
    pub agent: AgentId,
    pub arg: Box<Formula>,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Prop(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Know(AgentId, Box<Formula>),
    Weight(WeightAtom),
    WeightIn(WeightInterval),
}

/// Which fragment a (desugared) formula belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Language {
    Propositional,
    /// Knowledge formulas: no weight atoms.
    LK,
    /// Certainty formulas: weight atoms only inside `Cert` pairs, no `K`.
    LC,
    /// Probability formulas: arbitrary weight atoms, no `K`.
    LP,
    Mixed,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Propositional => "propositional",
            Language::LK => "LK",
            Language::LC => "LC",
            Language::LP => "LP",
            Language::Mixed => "mixed",
        })
    }
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn know(agent: AgentId, f: Formula) -> Formula {
        Formula::Know(agent, Box::new(f))
    }

    /// Canonical certainty pair `w_i(f) >= 1 & -w_i(f) >= -1`.
    pub fn cert(agent: AgentId, f: Formula) -> Formula {
        Formula::and(
            Formula::Weight(WeightAtom {
                terms: vec![WeightTerm::new(1, agent, f.clone())],
                rel: Relation::Ge,
                bound: Rational::one(),
            }),
            Formula::Weight(WeightAtom {
                terms: vec![WeightTerm::new(-1, agent, f)],
                rel: Relation::Ge,
                bound: Rational::from(-1),
            }),
        )
    }

    pub fn weight(terms: Vec<WeightTerm>, rel: Relation, bound: Rational) -> Formula {
        Formula::Weight(WeightAtom { terms, rel, bound })
    }

    pub fn weight_in(agent: AgentId, arg: Formula, lo: Rational, hi: Rational) -> Formula {
        Formula::WeightIn(WeightInterval {
            agent,
            arg: Box::new(arg),
            lo,
            hi,
        })
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Recognises the canonical certainty pair and returns its agent and
    /// argument.
    pub fn as_cert(&self) -> Option<(AgentId, &Formula)> {
        let Formula::And(a, b) = self else {
            return None;
        };
        let (Formula::Weight(lo), Formula::Weight(hi)) = (a.as_ref(), b.as_ref()) else {
            return None;
        };
        let single = |w: &'_ WeightAtom| -> Option<(BigInt, AgentId)> {
            match w.terms.as_slice() {
                [t] if w.rel == Relation::Ge => Some((t.coeff.clone(), t.agent)),
                _ => None,
            }
        };
        let (c1, i1) = single(lo)?;
        let (c2, i2) = single(hi)?;
        let one = BigInt::one();
        let is_pair = c1 == one
            && lo.bound.is_one()
            && c2 == -&one
            && hi.bound == Rational::from(-1)
            && i1 == i2
            && lo.terms[0].arg == hi.terms[0].arg;
        is_pair.then(|| (i1, &lo.terms[0].arg))
    }

    pub fn is_know(&self) -> bool {
        matches!(self, Formula::Know(..))
    }

    /// Canonical form: rational bounds cleared, every comparison reduced to
    /// `>=` (negated where strict), `|` and `->` expanded through `~` and `&`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Know(i, a) => Formula::know(*i, a.desugar()),
            Formula::Weight(w) => {
                let terms: Vec<WeightTerm> = w
                    .terms
                    .iter()
                    .map(|t| WeightTerm::new(t.coeff.clone(), t.agent, t.arg.desugar()))
                    .collect();
                desugar_comparison(terms, w.rel, &w.bound)
            }
            Formula::WeightIn(iv) => {
                let arg = iv.arg.desugar();
                let term = |arg: Formula| vec![WeightTerm::new(1, iv.agent, arg)];
                Formula::and(
                    desugar_comparison(term(arg.clone()), Relation::Ge, &iv.lo),
                    desugar_comparison(term(arg), Relation::Le, &iv.hi),
                )
            }
        }
    }

    pub fn classify(&self) -> Language {
        let mut scan = LanguageScan::default();
        scan.visit(self);
        match (scan.know, scan.cert, scan.weight) {
            (false, false, false) => Language::Propositional,
            (false, _, false) => Language::LC,
            (true, false, false) => Language::LK,
            (false, _, true) => Language::LP,
            _ => Language::Mixed,
        }
    }

    /// Maximum nesting of `K`, `Cert` and weight operators.
    pub fn modal_depth(&self) -> usize {
        if let Some((_, arg)) = self.as_cert() {
            return 1 + arg.modal_depth();
        }
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            Formula::Know(_, a) => 1 + a.modal_depth(),
            Formula::Weight(w) => {
                1 + w
                    .terms
                    .iter()
                    .map(|t| t.arg.modal_depth())
                    .max()
                    .unwrap_or(0)
            }
            Formula::WeightIn(iv) => 1 + iv.arg.modal_depth(),
        }
    }

    /// All subformulas in pre-order, without duplicates, starting with `self`.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
        if !seen.insert(self) {
            return;
        }
        out.push(self.clone());
        for child in self.children() {
            child.collect_subformulas(seen, out);
        }
    }

    /// Immediate subformulas, including the arguments of weight terms.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => vec![],
            Formula::Not(a) | Formula::Know(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
            Formula::Weight(w) => w.terms.iter().map(|t| &t.arg).collect(),
            Formula::WeightIn(iv) => vec![&iv.arg],
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Agents mentioned by `K`, `Cert` or weight operators.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Know(i, _) => {
                out.insert(*i);
            }
            Formula::Weight(w) => out.extend(w.terms.iter().map(|t| t.agent)),
            Formula::WeightIn(iv) => {
                out.insert(iv.agent);
            }
            _ => {}
        });
        out
    }

    /// Number of `~`, `&`, `|`, `->`, `K`, `Cert` and weight operators.
    pub fn connective_count(&self) -> usize {
        if let Some((_, arg)) = self.as_cert() {
            return 1 + arg.connective_count();
        }
        let own = usize::from(!matches!(
            self,
            Formula::Prop(_) | Formula::True | Formula::False
        ));
        own + self
            .children()
            .into_iter()
            .map(Formula::connective_count)
            .sum::<usize>()
    }

    fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

/// Clears the bound's denominator and rewrites the comparison with `>=`.
fn desugar_comparison(terms: Vec<WeightTerm>, rel: Relation, bound: &Rational) -> Formula {
    let scale = bound.denom().clone();
    let scaled_bound = Rational::from_integer(bound.numer().clone());
    let ge = |negate: bool| {
        let sign = if negate { -BigInt::one() } else { BigInt::one() };
        Formula::Weight(WeightAtom {
            terms: terms
                .iter()
                .map(|t| WeightTerm::new(&t.coeff * &scale * &sign, t.agent, t.arg.clone()))
                .collect(),
            rel: Relation::Ge,
            bound: if negate {
                -&scaled_bound
            } else {
                scaled_bound.clone()
            },
        })
    };
    match rel {
        Relation::Ge => ge(false),
        Relation::Le => ge(true),
        Relation::Lt => Formula::not(ge(false)),
        Relation::Gt => Formula::not(ge(true)),
        Relation::Eq => Formula::and(ge(false), ge(true)),
    }
}

#[derive(Default)]
struct LanguageScan {
    know: bool,
    cert: bool,
    weight: bool,
}

impl LanguageScan {
    fn visit(&mut self, f: &Formula) {
        if let Some((_, arg)) = f.as_cert() {
            self.cert = true;
            self.visit(arg);
            return;
        }
        match f {
            Formula::Know(..) => self.know = true,
            Formula::Weight(_) | Formula::WeightIn(_) => self.weight = true,
            _ => {}
        }
        for c in f.children() {
            self.visit(c);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

/// Textual form accepted by [`parse`].
pub fn render(f: &Formula) -> String {
    render::render(f)
}
