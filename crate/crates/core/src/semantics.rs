//! Satisfaction for knowledge, simple and generalized probability structures.
//!
//! Extensions are computed bottom-up, one boolean per state, and memoised per
//! distinct subformula. Sugar nodes (`|`, `->`, strict or rational
//! comparisons, interval atoms) are evaluated directly, with the same result
//! as their desugared form.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{AgentId, Formula, WeightAtom, WeightInterval};
use crate::rational::Rational;
use crate::structures::{
    BinaryRelation, Distribution, GeneralizedProbabilityStructure, KnowledgeStructure,
    SimpleProbabilityStructure, Structure, Worlds,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("{operator} cannot be evaluated in a {kind} structure")]
    Mismatch {
        operator: &'static str,
        kind: &'static str,
    },
    #[error("agent {0} is not declared by the structure")]
    UnknownAgent(AgentId),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("proposition `{0}` is not declared by the structure")]
    UndeclaredProp(String),
}

/// What the evaluator needs from a structure. Implementations return `None`
/// for the modality they do not carry.
pub trait Model {
    fn worlds(&self) -> &Worlds;
    fn agent_count(&self) -> usize;
    fn kind(&self) -> &'static str;
    fn accessibility(&self, agent: AgentId) -> Option<&BinaryRelation>;
    fn distribution(&self, agent: AgentId, state: usize) -> Option<&Distribution>;
    /// True when the distribution does not depend on the state.
    fn state_independent(&self) -> bool {
        false
    }
}

impl Model for KnowledgeStructure {
    fn worlds(&self) -> &Worlds {
        KnowledgeStructure::worlds(self)
    }
    fn agent_count(&self) -> usize {
        self.agents().len()
    }
    fn kind(&self) -> &'static str {
        "knowledge"
    }
    fn accessibility(&self, agent: AgentId) -> Option<&BinaryRelation> {
        self.relation(agent)
    }
    fn distribution(&self, _: AgentId, _: usize) -> Option<&Distribution> {
        None
    }
}

impl Model for SimpleProbabilityStructure {
    fn worlds(&self) -> &Worlds {
        SimpleProbabilityStructure::worlds(self)
    }
    fn agent_count(&self) -> usize {
        self.agents().len()
    }
    fn kind(&self) -> &'static str {
        "simple"
    }
    fn accessibility(&self, _: AgentId) -> Option<&BinaryRelation> {
        None
    }
    fn distribution(&self, agent: AgentId, _: usize) -> Option<&Distribution> {
        SimpleProbabilityStructure::distribution(self, agent)
    }
    fn state_independent(&self) -> bool {
        true
    }
}

impl Model for GeneralizedProbabilityStructure {
    fn worlds(&self) -> &Worlds {
        GeneralizedProbabilityStructure::worlds(self)
    }
    fn agent_count(&self) -> usize {
        self.agents().len()
    }
    fn kind(&self) -> &'static str {
        "generalized"
    }
    fn accessibility(&self, _: AgentId) -> Option<&BinaryRelation> {
        None
    }
    fn distribution(&self, agent: AgentId, state: usize) -> Option<&Distribution> {
        GeneralizedProbabilityStructure::distribution(self, agent, state)
    }
}

impl Model for Structure {
    fn worlds(&self) -> &Worlds {
        Structure::worlds(self)
    }
    fn agent_count(&self) -> usize {
        self.agents().len()
    }
    fn kind(&self) -> &'static str {
        Structure::kind(self)
    }
    fn accessibility(&self, agent: AgentId) -> Option<&BinaryRelation> {
        match self {
            Structure::Knowledge(m) => m.accessibility(agent),
            _ => None,
        }
    }
    fn distribution(&self, agent: AgentId, state: usize) -> Option<&Distribution> {
        match self {
            Structure::Knowledge(_) => None,
            Structure::Simple(n) => Model::distribution(n, agent, state),
            Structure::Generalized(n) => Model::distribution(n, agent, state),
        }
    }
    fn state_independent(&self) -> bool {
        matches!(self, Structure::Simple(_))
    }
}

/// The set of states satisfying a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    members: Vec<bool>,
}

impl Extension {
    pub fn contains(&self, state: usize) -> bool {
        self.members[state]
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(|&s| self.members[s])
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_all(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    pub fn as_mask(&self) -> &[bool] {
        &self.members
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// First state (in declaration order) where the formula fails.
    Falsified(usize),
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}

struct Evaluator<'m, 'f, M: ?Sized> {
    model: &'m M,
    memo: HashMap<&'f Formula, Vec<bool>>,
}

impl<'m, 'f, M: Model + ?Sized> Evaluator<'m, 'f, M> {
    fn n(&self) -> usize {
        self.model.worlds().len()
    }

    fn agent(&self, agent: AgentId) -> Result<(), SemanticsError> {
        if agent.0 >= 1 && agent.index() < self.model.agent_count() {
            Ok(())
        } else {
            Err(SemanticsError::UnknownAgent(agent))
        }
    }

    fn ext(&mut self, f: &'f Formula) -> Result<Vec<bool>, SemanticsError> {
        if let Some(v) = self.memo.get(f) {
            return Ok(v.clone());
        }
        let n = self.n();
        let v = match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Prop(p) => {
                let w = self.model.worlds();
                let k = w
                    .prop_index(p)
                    .ok_or_else(|| SemanticsError::UndeclaredProp(p.clone()))?;
                (0..n).map(|s| w.holds(s, k)).collect()
            }
            Formula::Not(a) => self.ext(a)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip(self.ext(a)?, self.ext(b)?, |x, y| x && y),
            Formula::Or(a, b) => zip(self.ext(a)?, self.ext(b)?, |x, y| x || y),
            Formula::Implies(a, b) => zip(self.ext(a)?, self.ext(b)?, |x, y| !x || y),
            Formula::Know(i, a) => {
                self.agent(*i)?;
                let inner = self.ext(a)?;
                let rel = self.model.accessibility(*i).ok_or(SemanticsError::Mismatch {
                    operator: "K",
                    kind: self.model.kind(),
                })?;
                (0..n)
                    .map(|s| rel.successors(s).all(|t| inner[t]))
                    .collect()
            }
            Formula::Weight(w) => self.weight(w)?,
            Formula::WeightIn(iv) => self.interval(iv)?,
        };
        self.memo.insert(f, v.clone());
        Ok(v)
    }

    fn distribution(&self, agent: AgentId, s: usize) -> Result<&'m Distribution, SemanticsError> {
        self.agent(agent)?;
        self.model
            .distribution(agent, s)
            .ok_or(SemanticsError::Mismatch {
                operator: "w",
                kind: self.model.kind(),
            })
    }

    /// Evaluates `value(s) rel bound` at every state, once if the model's
    /// distributions are state independent.
    fn per_state(
        &self,
        mut value: impl FnMut(usize) -> Result<bool, SemanticsError>,
    ) -> Result<Vec<bool>, SemanticsError> {
        if self.model.state_independent() {
            Ok(vec![value(0)?; self.n()])
        } else {
            (0..self.n()).map(value).collect()
        }
    }

    fn weight(&mut self, w: &'f WeightAtom) -> Result<Vec<bool>, SemanticsError> {
        let args = w
            .terms
            .iter()
            .map(|t| self.ext(&t.arg))
            .collect::<Result<Vec<_>, _>>()?;
        self.per_state(|s| {
            let mut lhs = Rational::zero();
            for (t, arg) in w.terms.iter().zip(&args) {
                let p = self.distribution(t.agent, s)?.measure(arg);
                lhs += &(Rational::from(t.coeff.clone()) * p);
            }
            Ok(w.rel.holds(&lhs, &w.bound))
        })
    }

    fn interval(&mut self, iv: &'f WeightInterval) -> Result<Vec<bool>, SemanticsError> {
        let arg = self.ext(&iv.arg)?;
        self.per_state(|s| {
            let p = self.distribution(iv.agent, s)?.measure(&arg);
            Ok(iv.lo <= p && p <= iv.hi)
        })
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

pub fn extension<M: Model + ?Sized>(model: &M, f: &Formula) -> Result<Extension, SemanticsError> {
    let mut ev = Evaluator {
        model,
        memo: HashMap::new(),
    };
    Ok(Extension {
        members: ev.ext(f)?,
    })
}

pub fn eval<M: Model + ?Sized>(model: &M, state: usize, f: &Formula) -> Result<bool, SemanticsError> {
    if state >= model.worlds().len() {
        return Err(SemanticsError::UnknownState(state.to_string()));
    }
    Ok(extension(model, f)?.contains(state))
}

/// [`eval`] with the state given by name.
pub fn eval_at<M: Model + ?Sized>(model: &M, state: &str, f: &Formula) -> Result<bool, SemanticsError> {
    let s = model
        .worlds()
        .state_index(state)
        .ok_or_else(|| SemanticsError::UnknownState(state.to_string()))?;
    eval(model, s, f)
}

pub fn valid_in_structure<M: Model + ?Sized>(
    model: &M,
    f: &Formula,
) -> Result<Validity, SemanticsError> {
    let ext = extension(model, f)?;
    Ok(match (0..model.worlds().len()).find(|&s| !ext.contains(s)) {
        None => Validity::Valid,
        Some(s) => Validity::Falsified(s),
    })
}
