//! Schematic formulas: metavariables are propositions named `?x`, which the
//! parser cannot produce, and every modal operator of a pattern written
//! with agent 0 stands for one common agent.

use std::collections::BTreeMap;

use crate::formula::{AgentId, Formula, WeightAtom, WeightTerm};

pub(crate) const ANY_AGENT: AgentId = AgentId(0);

pub(crate) fn meta(name: &str) -> Formula {
    Formula::Prop(format!("?{name}"))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Bindings {
    /// Metavariable name without the `?`.
    pub vars: BTreeMap<String, Formula>,
    pub agent: Option<AgentId>,
}

pub(crate) fn match_pattern(pat: &Formula, f: &Formula) -> Option<Bindings> {
    let mut b = Bindings::default();
    b.go(pat, f).then_some(b)
}

pub(crate) fn instantiate(pat: &Formula, b: &Bindings) -> Formula {
    let agent = |i: AgentId| {
        if i == ANY_AGENT {
            b.agent.unwrap_or(AgentId::DEFAULT)
        } else {
            i
        }
    };
    match pat {
        Formula::Prop(name) => match name.strip_prefix('?') {
            Some(v) => b.vars.get(v).cloned().unwrap_or_else(|| pat.clone()),
            None => pat.clone(),
        },
        Formula::True | Formula::False => pat.clone(),
        Formula::Not(a) => Formula::not(instantiate(a, b)),
        Formula::And(x, y) => Formula::and(instantiate(x, b), instantiate(y, b)),
        Formula::Or(x, y) => Formula::or(instantiate(x, b), instantiate(y, b)),
        Formula::Implies(x, y) => Formula::implies(instantiate(x, b), instantiate(y, b)),
        Formula::Know(i, a) => Formula::know(agent(*i), instantiate(a, b)),
        Formula::Weight(w) => Formula::Weight(WeightAtom {
            terms: w
                .terms
                .iter()
                .map(|t| WeightTerm::new(t.coeff.clone(), agent(t.agent), instantiate(&t.arg, b)))
                .collect(),
            rel: w.rel,
            bound: w.bound.clone(),
        }),
        Formula::WeightIn(iv) => {
            Formula::weight_in(agent(iv.agent), instantiate(&iv.arg, b), iv.lo.clone(), iv.hi.clone())
        }
    }
}

impl Bindings {
    fn agent(&mut self, pat: AgentId, a: AgentId) -> bool {
        if pat != ANY_AGENT {
            return pat == a;
        }
        match self.agent {
            Some(b) => a == b,
            None => {
                self.agent = Some(a);
                true
            }
        }
    }

    fn go(&mut self, pat: &Formula, f: &Formula) -> bool {
        if let Formula::Prop(name) = pat {
            if let Some(v) = name.strip_prefix('?') {
                return match self.vars.get(v) {
                    Some(b) => b == f,
                    None => {
                        self.vars.insert(v.to_string(), f.clone());
                        true
                    }
                };
            }
        }
        match (pat, f) {
            (Formula::Prop(a), Formula::Prop(b)) => a == b,
            (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
            (Formula::Not(a), Formula::Not(b)) => self.go(a, b),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Implies(a1, a2), Formula::Implies(b1, b2)) => {
                self.go(a1, b1) && self.go(a2, b2)
            }
            (Formula::Know(i, a), Formula::Know(j, b)) => self.agent(*i, *j) && self.go(a, b),
            (Formula::Weight(a), Formula::Weight(b)) => self.weight(a, b),
            (Formula::WeightIn(a), Formula::WeightIn(b)) => {
                a.lo == b.lo && a.hi == b.hi && self.agent(a.agent, b.agent) && self.go(&a.arg, &b.arg)
            }
            _ => false,
        }
    }

    fn weight(&mut self, a: &WeightAtom, b: &WeightAtom) -> bool {
        a.rel == b.rel
            && a.bound == b.bound
            && a.terms.len() == b.terms.len()
            && a.terms.iter().zip(&b.terms).all(|(x, y)| {
                x.coeff == y.coeff && self.agent(x.agent, y.agent) && self.go(&x.arg, &y.arg)
            })
    }
}
