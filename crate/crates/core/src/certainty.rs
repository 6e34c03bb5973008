//! False beliefs in simple probability structures.
//!
//! In a simple structure every certainty subformula is true everywhere or
//! nowhere, so a formula's extension is a union of truth-assignment
//! classes. A state therefore carries a false certainty exactly when its
//! class has probability zero, and the disjunction of the positive classes'
//! characteristic conjunctions witnesses it.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::formula::{AgentId, Formula};
use crate::semantics::eval;
use crate::structures::SimpleProbabilityStructure;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertaintyError {
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalseBeliefReport {
    pub agent: AgentId,
    /// States where some `φ` has `~φ & Cert(φ)`, in order.
    pub fb: Vec<usize>,
    pub measure: Rational,
    pub witnesses: BTreeMap<usize, Formula>,
}

impl FalseBeliefReport {
    pub fn to_json(&self, n: &SimpleProbabilityStructure) -> Value {
        let names = n.worlds().states();
        json!({
            "fb": self.fb.iter().map(|&s| names[s].clone()).collect::<Vec<_>>(),
            "measure": self.measure.to_string(),
            "witnesses": self
                .witnesses
                .iter()
                .map(|(&s, f)| (names[s].clone(), Value::String(f.to_string())))
                .collect::<serde_json::Map<_, _>>(),
        })
    }
}

/// Conjunction of the literals fixing `state`'s truth assignment.
pub fn characteristic(n: &SimpleProbabilityStructure, state: usize) -> Formula {
    let w = n.worlds();
    Formula::conjunction(w.props().iter().zip(w.assignment(state)).map(|(p, &v)| {
        let atom = Formula::prop(p.clone());
        if v {
            atom
        } else {
            Formula::not(atom)
        }
    }))
}

pub fn false_belief_states(
    n: &SimpleProbabilityStructure,
    agent: AgentId,
) -> Result<FalseBeliefReport, CertaintyError> {
    let pr = n.distribution(agent).ok_or(CertaintyError::UnknownAgent(agent))?;
    let w = n.worlds();
    let size = w.len();
    let class_of = |s: usize| (0..size).filter(move |&t| w.assignment(t) == w.assignment(s));
    let class_measure: Vec<Rational> = (0..size).map(|s| pr.measure_of(class_of(s))).collect();
    let fb: Vec<usize> = (0..size).filter(|&s| class_measure[s].is_zero()).collect();
    let mut positive: Vec<usize> = vec![];
    for (s, m) in class_measure.iter().enumerate() {
        if class_of(s).next() == Some(s) && !m.is_zero() {
            positive.push(s);
        }
    }
    let witness = Formula::disjunction(positive.iter().map(|&s| characteristic(n, s)));
    let claim = Formula::and(Formula::not(witness.clone()), Formula::cert(agent, witness.clone()));
    let mut witnesses = BTreeMap::new();
    for &s in &fb {
        assert!(
            eval(n, s, &claim).expect("witness uses declared props"),
            "witness fails at state {s}"
        );
        witnesses.insert(s, witness.clone());
    }
    Ok(FalseBeliefReport {
        agent,
        measure: pr.measure_of(fb.iter().copied()),
        fb,
        witnesses,
    })
}

pub fn is_positive_structure(n: &SimpleProbabilityStructure, agent: AgentId) -> bool {
    n.is_positive(agent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Distribution, Worlds};

    fn structure(assign: &[bool], pr: &[(i64, i64)]) -> SimpleProbabilityStructure {
        let worlds = Worlds::numbered(
            assign.len(),
            &["p".to_string()],
            assign.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap();
        let pr = Distribution::new(pr.iter().map(|&(a, b)| Rational::new(a, b)).collect()).unwrap();
        SimpleProbabilityStructure::new(worlds, vec!["a".into()], vec![pr]).unwrap()
    }

    #[test]
    fn examples() {
        let one = AgentId(1);
        let n = structure(&[true, false], &[(1, 1), (0, 1)]);
        let r = false_belief_states(&n, one).unwrap();
        assert_eq!(r.fb, vec![1]);
        assert!(r.measure.is_zero());
        assert_eq!(r.witnesses[&1], Formula::prop("p"));
        assert!(!is_positive_structure(&n, one));

        let n = structure(&[true, false], &[(1, 2), (1, 2)]);
        assert!(false_belief_states(&n, one).unwrap().fb.is_empty());
        assert!(is_positive_structure(&n, one));

        let n = structure(&[true, true], &[(1, 1), (0, 1)]);
        assert!(false_belief_states(&n, one).unwrap().fb.is_empty());

        assert_eq!(false_belief_states(&n, AgentId(2)), Err(CertaintyError::UnknownAgent(AgentId(2))));
    }

    #[test]
    fn json_report() {
        let n = structure(&[true, false], &[(1, 1), (0, 1)]);
        let r = false_belief_states(&n, AgentId(1)).unwrap();
        let v = r.to_json(&n);
        assert_eq!(v["fb"], json!(["s2"]));
        assert_eq!(v["measure"], json!("0"));
        assert_eq!(v["witnesses"]["s2"], json!("p"));
    }
}
