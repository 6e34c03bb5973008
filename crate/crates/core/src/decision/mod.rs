//! Validity for the normal systems and for certainty over probability
//! structures.
//!
//! Knowledge formulas are decided by a model search (see [`tableau`]).
//! Certainty formulas are translated (`Cert` to `K`) and decided in the
//! system matching the class of probability structures; a knowledge
//! countermodel is turned back into a probability structure by spreading
//! probability uniformly over each successor set. Every countermodel is
//! re-checked with the evaluator before it is returned.

mod system;
mod tableau;

use thiserror::Error;

use crate::formula::{AgentId, Formula, Language};
use crate::semantics::{self, SemanticsError};
use crate::structures::{
    default_agent_names, Distribution, GeneralizedProbabilityStructure, KnowledgeStructure,
    SimpleProbabilityStructure, Structure,
};

pub use system::{Schema, SystemId, UnknownSystem};
use tableau::{agent_count, Closure, Search};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecisionError {
    #[error("expected a knowledge formula, found a {0} formula")]
    NotKnowledge(Language),
    #[error("expected a certainty formula, found a {0} formula")]
    NotCertainty(Language),
    #[error("the class N^A needs a system containing T or D, not {0}")]
    NeedsTOrD(SystemId),
    #[error("{0} is defined for a single agent only")]
    SingleAgentOnly(&'static str),
    #[error("search budget of {0} nodes exhausted")]
    ResourceLimit(u64),
    #[error("countermodel failed verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        self == Verdict::Valid
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Debug)]
pub struct DecisionResult {
    pub verdict: Verdict,
    /// A structure of the system's class and a state where the formula
    /// fails; present exactly when the verdict is invalid.
    pub countermodel: Option<(KnowledgeStructure, usize)>,
    /// Search nodes used.
    pub steps: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct DecideOptions {
    pub node_budget: u64,
}

impl Default for DecideOptions {
    fn default() -> DecideOptions {
        DecideOptions {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

fn knowledge_input(f: &Formula) -> Result<Formula, DecisionError> {
    let d = f.desugar();
    match d.classify() {
        Language::LK | Language::Propositional => Ok(d),
        other => Err(DecisionError::NotKnowledge(other)),
    }
}

pub fn decide(f: &Formula, sys: SystemId) -> Result<DecisionResult, DecisionError> {
    decide_with(f, sys, &DecideOptions::default())
}

pub fn decide_with(
    f: &Formula,
    sys: SystemId,
    opts: &DecideOptions,
) -> Result<DecisionResult, DecisionError> {
    let f = knowledge_input(f)?;
    let props: Vec<String> = f.props().into_iter().collect();
    let agents = agent_count(&f);
    let (cl, root) = Closure::new(&f, props, agents);
    let mut search = Search::new(&cl, sys, opts.node_budget);
    let found = search
        .satisfy(root, false)
        .map_err(|_| DecisionError::ResourceLimit(opts.node_budget))?;
    let Some(state) = found else {
        return Ok(DecisionResult {
            verdict: Verdict::Valid,
            countermodel: None,
            steps: search.steps,
        });
    };
    let model = search.model(default_agent_names(agents));
    for a in 1..=agents {
        let rel = model.relation(AgentId(a as u32)).expect("agent");
        if !rel.properties().satisfies(&sys.frame_conditions()) {
            return Err(DecisionError::Unverified(format!(
                "relation of agent {a} is not in the class of {sys}"
            )));
        }
    }
    if semantics::eval(&model, state, &f)? {
        return Err(DecisionError::Unverified(format!(
            "formula holds at the returned state in {sys}"
        )));
    }
    Ok(DecisionResult {
        verdict: Verdict::Invalid,
        countermodel: Some((model, state)),
        steps: search.steps,
    })
}

/// Satisfiability in the class of `sys`, with a model when satisfiable.
pub fn satisfiable(
    f: &Formula,
    sys: SystemId,
) -> Result<Option<(KnowledgeStructure, usize)>, DecisionError> {
    Ok(decide(&Formula::not(f.clone()), sys)?.countermodel)
}

/// Classes of probability structures for certainty formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertaintyClass {
    /// All simple probability structures.
    N0,
    /// Simple structures where every state has positive probability.
    N1,
    /// Uniform generalized structures.
    Uniform,
    /// Generalized structures whose support relation lies in the class of
    /// the system.
    Relational(SystemId),
}

impl CertaintyClass {
    /// The knowledge system whose theorems, read with `Cert` for `K`, are
    /// valid in the class.
    pub fn system(self) -> SystemId {
        match self {
            CertaintyClass::N0 | CertaintyClass::Uniform => SystemId::KD45,
            CertaintyClass::N1 => SystemId::S5,
            CertaintyClass::Relational(s) => s,
        }
    }
}

impl std::fmt::Display for CertaintyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertaintyClass::N0 => f.write_str("N0"),
            CertaintyClass::N1 => f.write_str("N1"),
            CertaintyClass::Uniform => f.write_str("Nunif"),
            CertaintyClass::Relational(s) => write!(f, "N^{s}"),
        }
    }
}

impl std::str::FromStr for CertaintyClass {
    type Err = UnknownSystem;

    /// `N0`, `N1`, `Nunif`, or `N^<system>` / `N<system>` (for example
    /// `N^KD45`).
    fn from_str(s: &str) -> Result<CertaintyClass, UnknownSystem> {
        match s.trim() {
            "N0" | "n0" => Ok(CertaintyClass::N0),
            "N1" | "n1" => Ok(CertaintyClass::N1),
            "Nunif" | "N_unif" | "nunif" | "unif" => Ok(CertaintyClass::Uniform),
            other => {
                let sys = other
                    .strip_prefix("N^")
                    .or_else(|| other.strip_prefix('N'))
                    .ok_or_else(|| UnknownSystem(s.to_string()))?;
                Ok(CertaintyClass::Relational(sys.parse()?))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertaintyResult {
    pub verdict: Verdict,
    /// A probability structure of the class and a state falsifying the
    /// formula.
    pub countermodel: Option<(Structure, usize)>,
    pub steps: u64,
}

pub fn decide_certainty(
    f: &Formula,
    class: CertaintyClass,
) -> Result<CertaintyResult, DecisionError> {
    decide_certainty_with(f, class, &DecideOptions::default())
}

pub fn decide_certainty_with(
    f: &Formula,
    class: CertaintyClass,
    opts: &DecideOptions,
) -> Result<CertaintyResult, DecisionError> {
    let d = f.desugar();
    match d.classify() {
        Language::LC | Language::Propositional => {}
        other => return Err(DecisionError::NotCertainty(other)),
    }
    if let CertaintyClass::Relational(s) = class {
        if !s.is_serial() {
            return Err(DecisionError::NeedsTOrD(s));
        }
    }
    let single = matches!(class, CertaintyClass::N0 | CertaintyClass::N1);
    if single && agent_count(&d) > 1 {
        return Err(DecisionError::SingleAgentOnly("a simple-structure class"));
    }
    let k = translate_c_to_k(&d)?;
    let r = decide_with(&k, class.system(), opts)?;
    let Some((m, state)) = r.countermodel else {
        return Ok(CertaintyResult {
            verdict: Verdict::Valid,
            countermodel: None,
            steps: r.steps,
        });
    };
    let structure = realize(&m, class)?;
    if semantics::eval(&structure, state, &d)? {
        return Err(DecisionError::Unverified(format!(
            "probability countermodel for {class} satisfies the formula"
        )));
    }
    Ok(CertaintyResult {
        verdict: Verdict::Invalid,
        countermodel: Some((structure, state)),
        steps: r.steps,
    })
}

/// Turns a knowledge countermodel into a probability structure of `class`.
fn realize(m: &KnowledgeStructure, class: CertaintyClass) -> Result<Structure, DecisionError> {
    let n = m.worlds().len();
    match class {
        CertaintyClass::N0 | CertaintyClass::N1 => {
            let rel = m.relation(AgentId(1)).expect("one agent");
            let first: Vec<usize> = rel.successors(0).collect();
            if (0..n).any(|s| rel.successors(s).ne(first.iter().copied())) {
                return Err(DecisionError::Unverified(
                    "knowledge countermodel is not a single cluster".into(),
                ));
            }
            if class == CertaintyClass::N1 && first.len() != n {
                return Err(DecisionError::Unverified(
                    "S5 countermodel has unreachable states".into(),
                ));
            }
            let pr = Distribution::uniform_on(n, &first);
            let s = SimpleProbabilityStructure::new(
                m.worlds().clone(),
                m.agents().to_vec(),
                vec![pr],
            )
            .map_err(|e| DecisionError::Unverified(e.to_string()))?;
            Ok(Structure::Simple(s))
        }
        CertaintyClass::Uniform | CertaintyClass::Relational(_) => {
            let kernels = m
                .relations()
                .iter()
                .map(|rel| {
                    (0..n)
                        .map(|s| Distribution::uniform_on(n, &rel.successors(s).collect::<Vec<_>>()))
                        .collect()
                })
                .collect();
            let g = GeneralizedProbabilityStructure::new(
                m.worlds().clone(),
                m.agents().to_vec(),
                kernels,
            )
            .map_err(|e| DecisionError::Unverified(e.to_string()))?;
            Ok(Structure::Generalized(g))
        }
    }
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub s5: Verdict,
    pub kd45_of_k: Verdict,
    pub agree: bool,
}

/// Decides `φ` in S5 and `Kφ` in KD45.
pub fn check_s5_kd45_bridge(f: &Formula) -> Result<BridgeReport, DecisionError> {
    let f = knowledge_input(f)?;
    if agent_count(&f) > 1 {
        return Err(DecisionError::SingleAgentOnly("the S5/KD45 bridge"));
    }
    let s5 = decide(&f, SystemId::S5)?.verdict;
    let kd45_of_k = decide(&Formula::know(AgentId(1), f), SystemId::KD45)?.verdict;
    Ok(BridgeReport {
        s5,
        kd45_of_k,
        agree: s5 == kd45_of_k,
    })
}

#[derive(Clone, Debug)]
pub struct CertTranslationReport {
    pub s5_provable: bool,
    pub n0_certain: bool,
    pub agree: bool,
}

/// Compares S5 provability of `φ` with validity of `Cert(φ^C)` over all
/// simple probability structures.
pub fn cert_of_translation(f: &Formula) -> Result<CertTranslationReport, DecisionError> {
    let f = knowledge_input(f)?;
    if agent_count(&f) > 1 {
        return Err(DecisionError::SingleAgentOnly("the certainty translation check"));
    }
    let s5_provable = decide(&f, SystemId::S5)?.verdict.is_valid();
    let c = Formula::cert(AgentId(1), translate_k_to_c(&f)?);
    let n0_certain = decide_certainty(&c, CertaintyClass::N0)?.verdict.is_valid();
    Ok(CertTranslationReport {
        s5_provable,
        n0_certain,
        agree: s5_provable == n0_certain,
    })
}

/// Replaces every `K_i` by `Cert_i`.
pub fn translate_k_to_c(f: &Formula) -> Result<Formula, DecisionError> {
    let rec = |a: &Formula| translate_k_to_c(a);
    Ok(match f {
        Formula::Prop(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(a) => Formula::not(rec(a)?),
        Formula::And(a, b) => Formula::and(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => Formula::implies(rec(a)?, rec(b)?),
        Formula::Know(i, a) => Formula::cert(*i, rec(a)?),
        Formula::Weight(_) | Formula::WeightIn(_) => {
            return Err(DecisionError::NotKnowledge(f.desugar().classify()))
        }
    })
}

/// Replaces every `Cert_i` by `K_i`. Weight atoms that are not certainty
/// statements are rejected.
pub fn translate_c_to_k(f: &Formula) -> Result<Formula, DecisionError> {
    if let Some((i, a)) = f.as_cert() {
        return Ok(Formula::know(i, translate_c_to_k(a)?));
    }
    let rec = |a: &Formula| translate_c_to_k(a);
    Ok(match f {
        Formula::Prop(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(a) => Formula::not(rec(a)?),
        Formula::And(a, b) => Formula::and(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => Formula::implies(rec(a)?, rec(b)?),
        Formula::Know(..) => return Err(DecisionError::NotCertainty(Language::Mixed)),
        Formula::Weight(_) | Formula::WeightIn(_) => {
            let d = f.desugar();
            match d.as_cert() {
                Some((i, a)) => Formula::know(i, translate_c_to_k(a)?),
                None => return Err(DecisionError::NotCertainty(d.classify())),
            }
        }
    })
}
