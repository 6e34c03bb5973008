//! Miller's principle: instances, frame checks, countermodels for
//! non-uniform frames, and the expert/agent equivalence-class constraint.

mod battery;

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::formula::{AgentId, Formula, Relation, WeightInterval, WeightTerm};
use crate::semantics::{eval, SemanticsError};
use crate::structures::{assignment_from_mask, Frame, GeneralizedProbabilityStructure};
use crate::Rational;

pub use battery::{default_battery, load_battery, random_battery, save_battery, Battery, BatteryError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MillerError {
    #[error("interval {0} is not inside [0, 1] with lo <= hi")]
    BadInterval(String),
    #[error("conditioning atom `{0}` is not of the form w(chi) in [a, b] for the inner agent")]
    BadConditioningAtom(String),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("the frame is uniform for agent {0}")]
    Uniform(AgentId),
    #[error("{states} states and {props} propositions are too many to enumerate assignments")]
    TooLarge { states: usize, props: usize },
    #[error("the agent's distribution differs between states {0} and {1}")]
    StateDependent(usize, usize),
    #[error("no falsified instance found")]
    NotFound,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Closed interval with rational endpoints inside `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Interval, MillerError> {
        if lo.is_negative() || lo > hi || hi > Rational::one() {
            return Err(MillerError::BadInterval(format!("[{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: Rational) -> Result<Interval, MillerError> {
        Interval::new(v.clone(), v)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MillerInstance {
    pub phi: Formula,
    pub interval: Interval,
    /// Outer (conditioning) and inner agent.
    pub agents: (AgentId, AgentId),
    /// Both inequalities with denominators cleared.
    pub rendered: Formula,
}

fn in_interval(agent: AgentId, phi: &Formula, i: &Interval) -> Formula {
    Formula::WeightIn(WeightInterval {
        agent,
        arg: Box::new(phi.clone()),
        lo: i.lo.clone(),
        hi: i.hi.clone(),
    })
}

/// `a·w(E) <= w(φ & E) <= b·w(E)` for `w = w_outer`, with each side
/// multiplied through by the endpoint's denominator.
fn cleared(outer: AgentId, phi: &Formula, event: &Formula, i: &Interval) -> Formula {
    let both = Formula::and(phi.clone(), event.clone());
    let term = |c: BigInt, f: &Formula| WeightTerm::new(c, outer, f.clone());
    let nonzero = |terms: Vec<WeightTerm>| -> Vec<WeightTerm> {
        terms.into_iter().filter(|t| t.coeff != BigInt::from(0)).collect()
    };
    let zero = Rational::zero();
    let lower = Formula::weight(
        nonzero(vec![
            term(i.lo.denom().clone(), &both),
            term(-i.lo.numer().clone(), event),
        ]),
        Relation::Ge,
        zero.clone(),
    );
    let upper = Formula::weight(
        nonzero(vec![
            term(i.hi.numer().clone(), event),
            term(-i.hi.denom().clone(), &both),
        ]),
        Relation::Ge,
        zero,
    );
    Formula::and(lower, upper)
}

pub fn miller_instance(phi: &Formula, interval: &Interval, outer: AgentId, inner: AgentId) -> MillerInstance {
    let event = in_interval(inner, phi, interval);
    MillerInstance {
        phi: phi.clone(),
        interval: interval.clone(),
        agents: (outer, inner),
        rendered: cleared(outer, phi, &event, interval),
    }
}

/// The instance conditioned additionally on `psi`, a list of atoms
/// `w_inner(chi) in J`.
pub fn stronger_miller_instance(
    phi: &Formula,
    psi: &[Formula],
    interval: &Interval,
    outer: AgentId,
    inner: AgentId,
) -> Result<Formula, MillerError> {
    for atom in psi {
        let ok = matches!(atom, Formula::WeightIn(iv) if iv.agent == inner
            && Interval::new(iv.lo.clone(), iv.hi.clone()).is_ok());
        if !ok {
            return Err(MillerError::BadConditioningAtom(atom.to_string()));
        }
    }
    let event = Formula::conjunction(
        psi.iter()
            .cloned()
            .chain([in_interval(inner, phi, interval)]),
    );
    Ok(cleared(outer, phi, &event, interval))
}

/// A structure based on the frame, a state and the instance failing there.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub structure: GeneralizedProbabilityStructure,
    pub state: usize,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MillerReport {
    pub uniform: bool,
    /// Every battery formula holds in every enumerated structure.
    pub all_valid: bool,
    /// A failing battery formula if there is one, otherwise a synthesized
    /// countermodel for a non-uniform frame when one exists.
    pub counterexample: Option<Counterexample>,
}

/// Largest `states × props` for which assignments are enumerated.
pub const MAX_ASSIGNMENT_BITS: usize = 20;

pub const DEFAULT_PROPS: [&str; 4] = ["p", "q", "r", "s"];

pub fn check_miller_theorem(
    frame: &Frame,
    agent: AgentId,
    props: &[String],
    battery: &Battery,
) -> Result<MillerReport, MillerError> {
    check_miller_theorem_with(frame, agent, props, battery, 1)
}

/// [`check_miller_theorem`] with the assignments split across `jobs`
/// threads. The reported counterexample does not depend on `jobs`.
pub fn check_miller_theorem_with(
    frame: &Frame,
    agent: AgentId,
    props: &[String],
    battery: &Battery,
    jobs: usize,
) -> Result<MillerReport, MillerError> {
    frame.kernel(agent).ok_or(MillerError::UnknownAgent(agent))?;
    let n = frame.len();
    if n * props.len() > MAX_ASSIGNMENT_BITS {
        return Err(MillerError::TooLarge {
            states: n,
            props: props.len(),
        });
    }
    for i in battery.agents() {
        frame.kernel(i).ok_or(MillerError::UnknownAgent(i))?;
    }
    let uniform = frame.is_uniform(agent);
    let formulas = battery.formulas();
    let total = 1u64 << (n * props.len());
    let jobs = (jobs.max(1) as u64).min(total);
    let chunk = total.div_ceil(jobs);
    let search = |range: std::ops::Range<u64>| first_failure(frame, props, &formulas, range);
    let found: Vec<Result<Option<Counterexample>, MillerError>> = if jobs == 1 {
        vec![search(0..total)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let range = j * chunk..((j + 1) * chunk).min(total);
                    scope.spawn(move || search(range))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut counterexample = None;
    for r in found {
        if let Some(c) = r? {
            counterexample = Some(c);
            break;
        }
    }
    let all_valid = counterexample.is_none();
    if counterexample.is_none() && !uniform {
        // Some non-uniform frames validate every instance; the report then
        // carries no counterexample.
        match nonuniform_countermodel(frame, agent) {
            Ok((structure, inst, state)) => {
                counterexample = Some(Counterexample {
                    structure,
                    state,
                    formula: inst.rendered,
                })
            }
            Err(MillerError::NotFound) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(MillerReport {
        uniform,
        all_valid,
        counterexample,
    })
}

fn first_failure(
    frame: &Frame,
    props: &[String],
    formulas: &[Formula],
    masks: std::ops::Range<u64>,
) -> Result<Option<Counterexample>, MillerError> {
    let n = frame.len();
    for mask in masks {
        let structure = frame
            .with_assignment(props.to_vec(), assignment_from_mask(n, props.len(), mask))
            .expect("frame and assignment agree");
        for f in formulas {
            let ext = crate::semantics::extension(&structure, f)?;
            if let Some(state) = (0..n).find(|&s| !ext.contains(s)) {
                return Ok(Some(Counterexample {
                    structure,
                    state,
                    formula: f.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Structure on a non-uniform frame with one proposition `p` and an
/// instance for `p` that fails at the returned state.
///
/// Only the extension `A` of `p` and the set of values `PR(u)(A)` inside
/// the interval matter, and shrinking the interval to the extreme values
/// it contains only tightens both inequalities. So trying every `A` with
/// every interval between two attained values is exhaustive. Singleton
/// sets come first, in state order, and point intervals before wider ones.
pub fn nonuniform_countermodel(
    frame: &Frame,
    agent: AgentId,
) -> Result<(GeneralizedProbabilityStructure, MillerInstance, usize), MillerError> {
    let kernel = frame.kernel(agent).ok_or(MillerError::UnknownAgent(agent))?;
    if frame.is_uniform(agent) {
        return Err(MillerError::Uniform(agent));
    }
    let n = frame.len();
    if n > MAX_ASSIGNMENT_BITS {
        return Err(MillerError::TooLarge { states: n, props: 1 });
    }
    let p = Formula::prop("p");
    let mut sets: Vec<u64> = (1u64..1 << n).collect();
    sets.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    for mask in sets {
        let assign: Vec<Vec<bool>> = (0..n).map(|s| vec![mask >> s & 1 == 1]).collect();
        let structure = frame
            .with_assignment(vec!["p".into()], assign)
            .expect("frame and assignment agree");
        let mut values: Vec<Rational> = kernel
            .iter()
            .map(|d| d.measure_of((0..n).filter(|s| mask >> s & 1 == 1)))
            .collect();
        values.sort();
        values.dedup();
        let mut intervals = vec![];
        for width in 0..values.len() {
            for lo in 0..values.len() - width {
                intervals.push(Interval::new(values[lo].clone(), values[lo + width].clone())?);
            }
        }
        for interval in intervals {
            let inst = miller_instance(&p, &interval, agent, agent);
            let ext = crate::semantics::extension(&structure, &inst.rendered)?;
            if let Some(state) = (0..n).find(|&s| !ext.contains(s)) {
                debug_assert!(!eval(&structure, state, &inst.rendered)?);
                return Ok((structure, inst, state));
            }
        }
    }
    Err(MillerError::NotFound)
}

/// States where the expert gives probability one to the states sharing its
/// current distribution.
pub fn s_good(
    n: &GeneralizedProbabilityStructure,
    expert: AgentId,
    agent: AgentId,
) -> Result<Vec<usize>, MillerError> {
    let kernel = n.kernel(expert).ok_or(MillerError::UnknownAgent(expert))?;
    n.kernel(agent).ok_or(MillerError::UnknownAgent(agent))?;
    let size = kernel.len();
    Ok((0..size)
        .filter(|&s| {
            let class = (0..size).filter(|&u| kernel[u] == kernel[s]);
            kernel[s].measure_of(class).is_one()
        })
        .collect())
}

/// The agent's fixed distribution gives `S_good` probability one.
pub fn equivalence_class_constraint(
    n: &GeneralizedProbabilityStructure,
    expert: AgentId,
    agent: AgentId,
) -> Result<bool, MillerError> {
    let good = s_good(n, expert, agent)?;
    let kernel = n.kernel(agent).ok_or(MillerError::UnknownAgent(agent))?;
    if let Some(s) = (1..kernel.len()).find(|&s| kernel[s] != kernel[0]) {
        return Err(MillerError::StateDependent(0, s));
    }
    Ok(kernel[0].measure_of(good).is_one())
}

#[cfg(test)]
mod tests;
