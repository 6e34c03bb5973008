//! Knowledge structures, simple and generalized probability structures and
//! probability frames.
//!
//! States, propositions and agents are addressed by their position; names
//! are kept for I/O only. Every constructor validates, so a value of any of
//! these types is always well formed.

mod enumerate;
mod json;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::formula::AgentId;
use crate::rational::Rational;

pub use enumerate::{
    distribution_grid, enumerate_knowledge_structures, enumerate_relations,
    random_generalized_structure, random_simple_structure, KnowledgeEnumeration, Shape,
    DEFAULT_ENUMERATION_LIMIT,
};
pub use json::{load, load_frame, save, save_frame};
pub(crate) use enumerate::assignment_from_mask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("a structure needs at least one state")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("undeclared proposition `{0}`")]
    UndeclaredProp(String),
    #[error("undeclared agent `{0}`")]
    UndeclaredAgent(String),
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("negative probability {value} for state `{state}`")]
    NegativeProbability { state: String, value: Rational },
    #[error("distribution {context} sums to {sum}, not 1")]
    NotNormalized { context: String, sum: Rational },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid structure file: {0}")]
    Schema(String),
    #[error("enumeration of {count} candidates exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },
}

/// A binary relation on `0..n`, stored as a dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    n: usize,
    bits: Vec<bool>,
}

impl BinaryRelation {
    pub fn empty(n: usize) -> BinaryRelation {
        BinaryRelation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> BinaryRelation {
        let mut r = BinaryRelation::empty(n);
        for (s, t) in pairs {
            r.insert(s, t);
        }
        r
    }

    /// Decodes bit `s * n + t` of `mask` as membership of `(s, t)`.
    pub fn from_mask(n: usize, mask: u64) -> BinaryRelation {
        BinaryRelation {
            n,
            bits: (0..n * n).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.bits[s * self.n + t]
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        self.bits[s * self.n + t] = true;
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&t| self.contains(s, t))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |s| self.successors(s).map(move |t| (s, t)))
    }

    pub fn properties(&self) -> FrameProperties {
        frame_properties(self)
    }
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// The five relational conditions on an accessibility or support relation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct FrameProperties {
    pub reflexive: bool,
    pub transitive: bool,
    pub symmetric: bool,
    pub euclidean: bool,
    pub serial: bool,
}

impl FrameProperties {
    /// No condition required.
    pub const ANY: FrameProperties = FrameProperties {
        reflexive: false,
        transitive: false,
        symmetric: false,
        euclidean: false,
        serial: false,
    };

    /// True when every flag set in `required` is also set in `self`.
    pub fn satisfies(&self, required: &FrameProperties) -> bool {
        (!required.reflexive || self.reflexive)
            && (!required.transitive || self.transitive)
            && (!required.symmetric || self.symmetric)
            && (!required.euclidean || self.euclidean)
            && (!required.serial || self.serial)
    }
}

/// Evaluates each condition by direct quantification over the states.
pub fn frame_properties(rel: &BinaryRelation) -> FrameProperties {
    let n = rel.size();
    let states = || 0..n;
    FrameProperties {
        reflexive: states().all(|s| rel.contains(s, s)),
        serial: states().all(|s| rel.successors(s).next().is_some()),
        symmetric: rel.pairs().all(|(s, t)| rel.contains(t, s)),
        transitive: rel
            .pairs()
            .all(|(s, t)| rel.successors(t).all(|u| rel.contains(s, u))),
        euclidean: states().all(|s| {
            rel.successors(s)
                .all(|t| rel.successors(s).all(|u| rel.contains(t, u)))
        }),
    }
}

/// A discrete probability distribution over the states of a structure,
/// stored densely in state order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Distribution(Vec<Rational>);

impl Distribution {
    /// Checks non-negativity and that the values sum to exactly 1.
    pub fn new(values: Vec<Rational>) -> Result<Distribution, StructureError> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(StructureError::NegativeProbability {
                state: format!("#{i}"),
                value: v.clone(),
            });
        }
        let sum: Rational = values.iter().sum();
        if !sum.is_one() {
            return Err(StructureError::NotNormalized {
                context: "over states".into(),
                sum,
            });
        }
        Ok(Distribution(values))
    }

    /// All mass on state `s` of `n`.
    pub fn point(n: usize, s: usize) -> Distribution {
        let mut v = vec![Rational::zero(); n];
        v[s] = Rational::one();
        Distribution(v)
    }

    /// Equal mass on each state of a non-empty `support`.
    pub fn uniform_on(n: usize, support: &[usize]) -> Distribution {
        assert!(!support.is_empty(), "uniform distribution needs support");
        let share = Rational::new(1, support.len() as i64);
        let mut v = vec![Rational::zero(); n];
        for &s in support {
            v[s] = share.clone();
        }
        Distribution(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, s: usize) -> &Rational {
        &self.0[s]
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_positive())
            .map(|(s, _)| s)
    }

    /// Probability of the set `{s : member[s]}`.
    pub fn measure(&self, member: &[bool]) -> Rational {
        self.0
            .iter()
            .zip(member)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
            .sum()
    }

    pub fn measure_of(&self, states: impl IntoIterator<Item = usize>) -> Rational {
        states.into_iter().map(|s| &self.0[s]).sum()
    }
}

/// States, proposition names and the truth assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Worlds {
    states: Vec<String>,
    props: Vec<String>,
    assign: Vec<Vec<bool>>,
}

impl Worlds {
    /// `assign[s][p]` is the truth value of proposition `p` at state `s`.
    pub fn new(
        states: Vec<String>,
        props: Vec<String>,
        assign: Vec<Vec<bool>>,
    ) -> Result<Worlds, StructureError> {
        if states.is_empty() {
            return Err(StructureError::NoStates);
        }
        check_unique(&states).map_err(StructureError::DuplicateState)?;
        check_unique(&props).map_err(StructureError::DuplicateName)?;
        if assign.len() != states.len() || assign.iter().any(|row| row.len() != props.len()) {
            return Err(StructureError::Shape(
                "assignment must give every proposition at every state".into(),
            ));
        }
        Ok(Worlds {
            states,
            props,
            assign,
        })
    }

    /// States named `s1..sn`.
    pub fn numbered(n: usize, props: &[String], assign: Vec<Vec<bool>>) -> Result<Worlds, StructureError> {
        Worlds::new(
            (1..=n).map(|i| format!("s{i}")).collect(),
            props.to_vec(),
            assign,
        )
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn holds(&self, state: usize, prop: usize) -> bool {
        self.assign[state][prop]
    }

    pub fn assignment(&self, state: usize) -> &[bool] {
        &self.assign[state]
    }
}

fn check_unique(names: &[String]) -> Result<(), String> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(n.clone());
        }
    }
    Ok(())
}

fn check_agents(agents: &[String], expected: usize) -> Result<(), StructureError> {
    check_unique(agents).map_err(StructureError::DuplicateName)?;
    if agents.len() != expected || agents.is_empty() {
        return Err(StructureError::Shape(format!(
            "{} agent names for {expected} agent components",
            agents.len()
        )));
    }
    Ok(())
}

/// Names `a1..an`, used when a structure is built programmatically.
pub fn default_agent_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

/// `(S, π, K_1, ..., K_n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KnowledgeStructure {
    worlds: Worlds,
    agents: Vec<String>,
    relations: Vec<BinaryRelation>,
}

impl KnowledgeStructure {
    pub fn new(
        worlds: Worlds,
        agents: Vec<String>,
        relations: Vec<BinaryRelation>,
    ) -> Result<KnowledgeStructure, StructureError> {
        check_agents(&agents, relations.len())?;
        if relations.iter().any(|r| r.size() != worlds.len()) {
            return Err(StructureError::Shape("relation size differs from state count".into()));
        }
        Ok(KnowledgeStructure {
            worlds,
            agents,
            relations,
        })
    }

    pub fn worlds(&self) -> &Worlds {
        &self.worlds
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn relation(&self, agent: AgentId) -> Option<&BinaryRelation> {
        self.relations.get(agent.index())
    }

    pub fn relations(&self) -> &[BinaryRelation] {
        &self.relations
    }
}

/// `(S, π, pr_1, ..., pr_n)`: one global distribution per agent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleProbabilityStructure {
    worlds: Worlds,
    agents: Vec<String>,
    pr: Vec<Distribution>,
}

impl SimpleProbabilityStructure {
    pub fn new(
        worlds: Worlds,
        agents: Vec<String>,
        pr: Vec<Distribution>,
    ) -> Result<SimpleProbabilityStructure, StructureError> {
        check_agents(&agents, pr.len())?;
        if pr.iter().any(|d| d.len() != worlds.len()) {
            return Err(StructureError::Shape("distribution size differs from state count".into()));
        }
        Ok(SimpleProbabilityStructure { worlds, agents, pr })
    }

    pub fn worlds(&self) -> &Worlds {
        &self.worlds
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn distribution(&self, agent: AgentId) -> Option<&Distribution> {
        self.pr.get(agent.index())
    }

    /// Every state has positive probability for `agent` (class 𝒩₁).
    pub fn is_positive(&self, agent: AgentId) -> bool {
        self.distribution(agent)
            .is_some_and(|d| d.values().iter().all(Rational::is_positive))
    }

    /// The same structure with `PR(s) = pr` at every state.
    pub fn embed(&self) -> GeneralizedProbabilityStructure {
        let n = self.worlds.len();
        GeneralizedProbabilityStructure {
            worlds: self.worlds.clone(),
            agents: self.agents.clone(),
            pr: self.pr.iter().map(|d| vec![d.clone(); n]).collect(),
        }
    }
}

/// Per-agent kernel `PR_i : S -> Δ(S)`, shared by structures and frames.
fn support_of(kernel: &[Distribution]) -> BinaryRelation {
    let n = kernel.len();
    BinaryRelation::from_pairs(
        n,
        kernel
            .iter()
            .enumerate()
            .flat_map(|(s, d)| d.support().map(move |t| (s, t))),
    )
}

/// First support-linked pair whose distributions differ, if any.
fn kernel_nonuniform_pair(kernel: &[Distribution]) -> Option<(usize, usize)> {
    kernel
        .iter()
        .enumerate()
        .flat_map(|(s, d)| d.support().map(move |t| (s, t)))
        .find(|&(s, t)| kernel[s] != kernel[t])
}

/// `(S, π, PR_1, ..., PR_n)`: a distribution per agent per state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneralizedProbabilityStructure {
    worlds: Worlds,
    agents: Vec<String>,
    pr: Vec<Vec<Distribution>>,
}

impl GeneralizedProbabilityStructure {
    /// `pr[agent][state]` is the agent's distribution at that state.
    pub fn new(
        worlds: Worlds,
        agents: Vec<String>,
        pr: Vec<Vec<Distribution>>,
    ) -> Result<GeneralizedProbabilityStructure, StructureError> {
        check_agents(&agents, pr.len())?;
        let n = worlds.len();
        if pr
            .iter()
            .any(|k| k.len() != n || k.iter().any(|d| d.len() != n))
        {
            return Err(StructureError::Shape("kernel size differs from state count".into()));
        }
        Ok(GeneralizedProbabilityStructure { worlds, agents, pr })
    }

    pub fn worlds(&self) -> &Worlds {
        &self.worlds
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn kernel(&self, agent: AgentId) -> Option<&[Distribution]> {
        self.pr.get(agent.index()).map(Vec::as_slice)
    }

    pub fn distribution(&self, agent: AgentId, state: usize) -> Option<&Distribution> {
        self.pr.get(agent.index()).and_then(|k| k.get(state))
    }

    /// `{(s, t) : PR(s)(t) > 0}`.
    pub fn support_relation(&self, agent: AgentId) -> Option<BinaryRelation> {
        self.kernel(agent).map(support_of)
    }

    /// Support-linked states carry equal distributions.
    pub fn is_uniform(&self, agent: AgentId) -> bool {
        self.kernel(agent)
            .is_some_and(|k| kernel_nonuniform_pair(k).is_none())
    }

    /// The knowledge structure whose relations are the support relations.
    pub fn to_knowledge_structure(&self) -> KnowledgeStructure {
        KnowledgeStructure {
            worlds: self.worlds.clone(),
            agents: self.agents.clone(),
            relations: self.pr.iter().map(|k| support_of(k)).collect(),
        }
    }

    /// Reads the structure back as a simple one when every agent's
    /// distribution is state-independent.
    pub fn as_simple(&self) -> Option<SimpleProbabilityStructure> {
        let pr = self
            .pr
            .iter()
            .map(|k| k.iter().all(|d| d == &k[0]).then(|| k[0].clone()))
            .collect::<Option<Vec<_>>>()?;
        Some(SimpleProbabilityStructure {
            worlds: self.worlds.clone(),
            agents: self.agents.clone(),
            pr,
        })
    }

    pub fn frame(&self) -> Frame {
        Frame {
            states: self.worlds.states.clone(),
            agents: self.agents.clone(),
            pr: self.pr.clone(),
        }
    }
}

/// `(S, PR_1, ..., PR_n)`: a generalized structure without a truth
/// assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Frame {
    states: Vec<String>,
    agents: Vec<String>,
    pr: Vec<Vec<Distribution>>,
}

impl Frame {
    pub fn new(
        states: Vec<String>,
        agents: Vec<String>,
        pr: Vec<Vec<Distribution>>,
    ) -> Result<Frame, StructureError> {
        let n = states.len();
        let g = GeneralizedProbabilityStructure::new(
            Worlds::new(states, vec![], vec![vec![]; n])?,
            agents,
            pr,
        )?;
        Ok(g.frame())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn kernel(&self, agent: AgentId) -> Option<&[Distribution]> {
        self.pr.get(agent.index()).map(Vec::as_slice)
    }

    pub fn support_relation(&self, agent: AgentId) -> Option<BinaryRelation> {
        self.kernel(agent).map(support_of)
    }

    pub fn is_uniform(&self, agent: AgentId) -> bool {
        self.kernel(agent)
            .is_some_and(|k| kernel_nonuniform_pair(k).is_none())
    }

    /// First pair `(s, t)` with `PR(s)(t) > 0` and `PR(s) != PR(t)`.
    pub fn nonuniform_pair(&self, agent: AgentId) -> Option<(usize, usize)> {
        self.kernel(agent).and_then(kernel_nonuniform_pair)
    }

    /// The structure based on this frame with the given assignment.
    pub fn with_assignment(
        &self,
        props: Vec<String>,
        assign: Vec<Vec<bool>>,
    ) -> Result<GeneralizedProbabilityStructure, StructureError> {
        GeneralizedProbabilityStructure::new(
            Worlds::new(self.states.clone(), props, assign)?,
            self.agents.clone(),
            self.pr.clone(),
        )
    }
}

/// Any of the three structure kinds, as read from a structure file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Structure {
    Knowledge(KnowledgeStructure),
    Simple(SimpleProbabilityStructure),
    Generalized(GeneralizedProbabilityStructure),
}

impl Structure {
    pub fn worlds(&self) -> &Worlds {
        match self {
            Structure::Knowledge(m) => m.worlds(),
            Structure::Simple(n) => n.worlds(),
            Structure::Generalized(n) => n.worlds(),
        }
    }

    pub fn agents(&self) -> &[String] {
        match self {
            Structure::Knowledge(m) => m.agents(),
            Structure::Simple(n) => n.agents(),
            Structure::Generalized(n) => n.agents(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Knowledge(_) => "knowledge",
            Structure::Simple(_) => "simple",
            Structure::Generalized(_) => "generalized",
        }
    }

    /// Resolves an agent by 1-based index or by name.
    pub fn agent_id(&self, name_or_index: &str) -> Option<AgentId> {
        resolve_agent(self.agents(), name_or_index)
    }
}

pub(crate) fn resolve_agent(agents: &[String], name_or_index: &str) -> Option<AgentId> {
    if let Some(pos) = agents.iter().position(|a| a == name_or_index) {
        return Some(AgentId(pos as u32 + 1));
    }
    let i: u32 = name_or_index.parse().ok()?;
    (1..=agents.len() as u32).contains(&i).then_some(AgentId(i))
}
