//! Model search for the normal systems.
//!
//! Labels are sets of signed subformulas. A label is saturated by the
//! propositional rules (branching on negated conjunctions) and then given
//! successors per agent according to the system:
//!
//! * K, KD, T: one successor per negated box, carrying the box bodies.
//! * K4, KD4, S4: successors also inherit the boxes; a successor whose
//!   saturated label is contained in an ancestor's (along edges of the same
//!   agent) is replaced by an edge to that ancestor. The relation is closed
//!   transitively at the end.
//! * K45, KD45, S5: a world guesses every relevant box of the agent (a cut),
//!   and its successors form one cluster sharing those guesses. Cluster
//!   worlds never create successors for that agent. In S5 the world itself
//!   belongs to the cluster.
//! * K5, KD5: the successors of a world form part of a cluster whose box
//!   values are guessed separately, since the world itself sees only part
//!   of the cluster.
//!
//! With T the relation is closed reflexively. Every search step counts
//! against a node budget.

use std::collections::{HashMap, HashSet};

use crate::formula::{AgentId, Formula};
use crate::structures::{BinaryRelation, KnowledgeStructure, Worlds};

use super::SystemId;

type NodeId = usize;
/// A signed subformula; the node is never a negation.
type Lit = (bool, NodeId);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Node {
    True,
    False,
    Prop(usize),
    Not(NodeId),
    And(NodeId, NodeId),
    Know(usize, NodeId),
}

pub(crate) struct Closure {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    props: Vec<String>,
    agents: usize,
}

impl Closure {
    /// Interns a knowledge formula. Sugar is expanded on the way; weight
    /// atoms must have been rejected by the caller.
    pub(crate) fn new(f: &Formula, props: Vec<String>, agents: usize) -> (Closure, NodeId) {
        let mut cl = Closure {
            nodes: vec![],
            index: HashMap::new(),
            props,
            agents,
        };
        let root = cl.intern(f);
        (cl, root)
    }

    fn add(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn intern(&mut self, f: &Formula) -> NodeId {
        match f {
            Formula::True => self.add(Node::True),
            Formula::False => self.add(Node::False),
            Formula::Prop(p) => {
                let k = self
                    .props
                    .iter()
                    .position(|q| q == p)
                    .expect("proposition collected beforehand");
                self.add(Node::Prop(k))
            }
            Formula::Not(a) => {
                let a = self.intern(a);
                self.add(Node::Not(a))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.add(Node::And(a, b))
            }
            Formula::Know(i, a) => {
                let a = self.intern(a);
                self.add(Node::Know(i.index(), a))
            }
            Formula::Or(..) | Formula::Implies(..) => self.intern(&f.desugar()),
            Formula::Weight(_) | Formula::WeightIn(_) => {
                unreachable!("weight atoms are rejected before the search")
            }
        }
    }

    fn lit(&self, mut sign: bool, mut id: NodeId) -> Lit {
        while let Node::Not(a) = self.nodes[id] {
            sign = !sign;
            id = a;
        }
        (sign, id)
    }

    /// Boxes of agent `i` reachable from `roots` without passing through
    /// another agent's operator.
    fn agent_atoms(&self, roots: impl IntoIterator<Item = NodeId>, i: usize) -> Vec<NodeId> {
        let mut seen = HashSet::new();
        let mut stack: Vec<NodeId> = roots.into_iter().collect();
        let mut out = vec![];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            match self.nodes[id] {
                Node::Not(a) => stack.push(a),
                Node::And(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Know(j, a) if j == i => {
                    out.push(id);
                    stack.push(a);
                }
                _ => {}
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Label {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Label {
    fn new(n: usize) -> Label {
        let words = n.div_ceil(64);
        Label {
            pos: vec![0; words],
            neg: vec![0; words],
        }
    }

    fn has(&self, (sign, id): Lit) -> bool {
        let bits = if sign { &self.pos } else { &self.neg };
        bits[id / 64] >> (id % 64) & 1 == 1
    }

    fn insert(&mut self, (sign, id): Lit) {
        let bits = if sign { &mut self.pos } else { &mut self.neg };
        bits[id / 64] |= 1 << (id % 64);
    }

    fn subset_of(&self, other: &Label) -> bool {
        let sub = |a: &[u64], b: &[u64]| a.iter().zip(b).all(|(x, y)| x & !y == 0);
        sub(&self.pos, &other.pos) && sub(&self.neg, &other.neg)
    }

    fn members(&self) -> impl Iterator<Item = Lit> + '_ {
        let n = self.pos.len() * 64;
        (0..n)
            .filter(|&id| self.has((true, id)))
            .map(|id| (true, id))
            .chain((0..n).filter(|&id| self.has((false, id))).map(|id| (false, id)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct BudgetExceeded;

type Step<T> = Result<T, BudgetExceeded>;

#[derive(Clone)]
struct Ctx {
    /// Per agent: the world belongs to a cluster built by its creator.
    clustered: Vec<bool>,
    /// For systems with 4: the agent of the edge that created the world and
    /// the ancestors along edges of that agent, nearest last.
    chain: Option<(usize, Vec<usize>)>,
}

pub(crate) struct Search<'c> {
    cl: &'c Closure,
    sys: SystemId,
    budget: u64,
    pub(crate) steps: u64,
    worlds: Vec<Label>,
    edges: Vec<(usize, usize, usize)>,
    failed: HashSet<(Vec<Lit>, Vec<bool>)>,
}

impl<'c> Search<'c> {
    pub(crate) fn new(cl: &'c Closure, sys: SystemId, budget: u64) -> Search<'c> {
        Search {
            cl,
            sys,
            budget,
            steps: 0,
            worlds: vec![],
            edges: vec![],
            failed: HashSet::new(),
        }
    }

    fn blocking(&self) -> bool {
        self.sys.has_4() && !self.sys.has_5()
    }

    /// Looks for a world satisfying `root` signed true. Returns the world
    /// index (always 0) on success.
    pub(crate) fn satisfy(&mut self, root: NodeId, sign: bool) -> Step<Option<usize>> {
        let ctx = Ctx {
            clustered: vec![false; self.cl.agents],
            chain: None,
        };
        let lit = self.cl.lit(sign, root);
        self.solve(vec![lit], &ctx)
    }

    fn checkpoint(&self) -> (usize, usize) {
        (self.worlds.len(), self.edges.len())
    }

    fn restore(&mut self, (w, e): (usize, usize)) {
        self.worlds.truncate(w);
        self.edges.truncate(e);
    }

    fn solve(&mut self, mut init: Vec<Lit>, ctx: &Ctx) -> Step<Option<usize>> {
        init.sort_unstable();
        init.dedup();
        let key = (!self.blocking()).then(|| (init.clone(), ctx.clustered.clone()));
        if let Some(k) = &key {
            if self.failed.contains(k) {
                return Ok(None);
            }
        }
        let cut: Vec<usize> = if self.sys.has_4() && self.sys.has_5() {
            (0..self.cl.agents).filter(|&i| !ctx.clustered[i]).collect()
        } else {
            vec![]
        };
        let mut found = None;
        let label = Label::new(self.cl.nodes.len());
        self.saturate(label, init, &cut, &mut |s: &mut Search<'c>, l: Label| {
            if let Some((_, chain)) = &ctx.chain {
                if s.blocking() {
                    if let Some(&a) = chain.iter().rev().find(|&&a| l.subset_of(&s.worlds[a])) {
                        found = Some(a);
                        return Ok(true);
                    }
                }
            }
            let cp = s.checkpoint();
            let id = s.worlds.len();
            s.worlds.push(l.clone());
            for i in 0..s.cl.agents {
                if ctx.clustered[i] {
                    continue;
                }
                if !s.successors(i, id, &l, ctx)? {
                    s.restore(cp);
                    return Ok(false);
                }
            }
            found = Some(id);
            Ok(true)
        })?;
        if found.is_none() {
            if let Some(k) = key {
                self.failed.insert(k);
            }
        }
        Ok(found)
    }

    /// Enumerates the saturated extensions of `label ∪ pending`, calling `k`
    /// on each until it returns true.
    fn saturate(
        &mut self,
        mut label: Label,
        mut pending: Vec<Lit>,
        cut: &[usize],
        k: &mut dyn FnMut(&mut Search<'c>, Label) -> Step<bool>,
    ) -> Step<bool> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(BudgetExceeded);
        }
        while let Some(lit) = pending.pop() {
            let (sign, id) = self.cl.lit(lit.0, lit.1);
            if label.has((sign, id)) {
                continue;
            }
            if label.has((!sign, id)) {
                return Ok(false);
            }
            match self.cl.nodes[id] {
                Node::True if !sign => return Ok(false),
                Node::False if sign => return Ok(false),
                Node::And(a, b) if sign => {
                    pending.push((true, a));
                    pending.push((true, b));
                }
                Node::Know(_, a) if sign && self.sys.has_t() => pending.push((true, a)),
                _ => {}
            }
            label.insert((sign, id));
        }
        let open = label.members().find_map(|(sign, id)| match self.cl.nodes[id] {
            Node::And(a, b) if !sign => {
                let (la, lb) = (self.cl.lit(false, a), self.cl.lit(false, b));
                (!label.has(la) && !label.has(lb)).then_some((a, b))
            }
            _ => None,
        });
        if let Some((a, b)) = open {
            if self.saturate(label.clone(), vec![(false, a)], cut, k)? {
                return Ok(true);
            }
            return self.saturate(label, vec![(true, a), (false, b)], cut, k);
        }
        for &i in cut {
            let atoms = self.cl.agent_atoms(label.members().map(|(_, id)| id), i);
            if let Some(&atom) = atoms
                .iter()
                .find(|&&a| !label.has((true, a)) && !label.has((false, a)))
            {
                if self.saturate(label.clone(), vec![(true, atom)], cut, k)? {
                    return Ok(true);
                }
                return self.saturate(label, vec![(false, atom)], cut, k);
            }
        }
        k(self, label)
    }

    /// `(atom, body)` for the boxes of agent `i` signed `sign` in `l`.
    fn boxes(&self, l: &Label, i: usize, sign: bool) -> Vec<(NodeId, NodeId)> {
        l.members()
            .filter(|&(s, _)| s == sign)
            .filter_map(|(_, id)| match self.cl.nodes[id] {
                Node::Know(j, a) if j == i => Some((id, a)),
                _ => None,
            })
            .collect()
    }

    fn successors(&mut self, i: usize, x: usize, l: &Label, ctx: &Ctx) -> Step<bool> {
        let boxes = self.boxes(l, i, true);
        let diamonds = self.boxes(l, i, false);
        if self.sys.has_5() {
            return if self.sys.has_t() {
                self.s5_cluster(i, x, l, &boxes, &diamonds)
            } else if self.sys.has_4() {
                self.k45_cluster(i, x, l, &boxes, &diamonds)
            } else {
                self.k5_cluster(i, x, &boxes, &diamonds)
            };
        }
        let mut base: Vec<Lit> = boxes.iter().map(|&(_, b)| (true, b)).collect();
        let child_ctx = Ctx {
            clustered: vec![false; self.cl.agents],
            chain: self.sys.has_4().then(|| {
                let mut chain = match &ctx.chain {
                    Some((j, chain)) if *j == i => chain.clone(),
                    _ => vec![],
                };
                chain.push(x);
                (i, chain)
            }),
        };
        if self.sys.has_4() {
            base.extend(boxes.iter().map(|&(atom, _)| (true, atom)));
        }
        for &(_, psi) in &diamonds {
            if self.sys.has_t() && l.has(self.cl.lit(false, psi)) {
                continue;
            }
            let mut init = base.clone();
            init.push((false, psi));
            match self.solve(init, &child_ctx)? {
                Some(c) => self.edges.push((i, x, c)),
                None => return Ok(false),
            }
        }
        if diamonds.is_empty() && self.sys.has_d() {
            if boxes.is_empty() {
                self.edges.push((i, x, x));
            } else {
                match self.solve(base, &child_ctx)? {
                    Some(c) => self.edges.push((i, x, c)),
                    None => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    fn cluster_ctx(&self, i: usize) -> Ctx {
        let mut clustered = vec![false; self.cl.agents];
        clustered[i] = true;
        Ctx {
            clustered,
            chain: None,
        }
    }

    fn agent_lits(&self, l: &Label, i: usize) -> Vec<Lit> {
        l.members()
            .filter(|&(_, id)| matches!(self.cl.nodes[id], Node::Know(j, _) if j == i))
            .collect()
    }

    fn solve_all(&mut self, inits: Vec<Vec<Lit>>, ctx: &Ctx) -> Step<Option<Vec<usize>>> {
        let mut out = vec![];
        for init in inits {
            match self.solve(init, ctx)? {
                Some(w) => out.push(w),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn connect_all(&mut self, i: usize, members: &[usize]) {
        for &a in members {
            for &b in members {
                self.edges.push((i, a, b));
            }
        }
    }

    fn s5_cluster(
        &mut self,
        i: usize,
        x: usize,
        l: &Label,
        boxes: &[(NodeId, NodeId)],
        diamonds: &[(NodeId, NodeId)],
    ) -> Step<bool> {
        let mut base = self.agent_lits(l, i);
        base.extend(boxes.iter().map(|&(_, b)| (true, b)));
        let inits: Vec<Vec<Lit>> = diamonds
            .iter()
            .filter(|&&(_, psi)| !l.has(self.cl.lit(false, psi)))
            .map(|&(_, psi)| {
                let mut init = base.clone();
                init.push((false, psi));
                init
            })
            .collect();
        let ctx = self.cluster_ctx(i);
        let Some(mut members) = self.solve_all(inits, &ctx)? else {
            return Ok(false);
        };
        members.insert(0, x);
        self.connect_all(i, &members);
        Ok(true)
    }

    fn k45_cluster(
        &mut self,
        i: usize,
        x: usize,
        l: &Label,
        boxes: &[(NodeId, NodeId)],
        diamonds: &[(NodeId, NodeId)],
    ) -> Step<bool> {
        if diamonds.is_empty() {
            if !self.sys.has_d() {
                return Ok(true);
            }
            if boxes.is_empty() {
                self.edges.push((i, x, x));
                return Ok(true);
            }
        }
        let mut base = self.agent_lits(l, i);
        base.extend(boxes.iter().map(|&(_, b)| (true, b)));
        let inits: Vec<Vec<Lit>> = if diamonds.is_empty() {
            vec![base]
        } else {
            diamonds
                .iter()
                .map(|&(_, psi)| {
                    let mut init = base.clone();
                    init.push((false, psi));
                    init
                })
                .collect()
        };
        let ctx = self.cluster_ctx(i);
        let Some(members) = self.solve_all(inits, &ctx)? else {
            return Ok(false);
        };
        for &m in &members {
            self.edges.push((i, x, m));
        }
        self.connect_all(i, &members);
        Ok(true)
    }

    fn k5_cluster(
        &mut self,
        i: usize,
        x: usize,
        boxes: &[(NodeId, NodeId)],
        diamonds: &[(NodeId, NodeId)],
    ) -> Step<bool> {
        if diamonds.is_empty() {
            if !self.sys.has_d() {
                return Ok(true);
            }
            if boxes.is_empty() {
                self.edges.push((i, x, x));
                return Ok(true);
            }
        }
        let bodies = boxes.iter().chain(diamonds).map(|&(_, b)| b);
        let atoms = self.cl.agent_atoms(bodies, i);
        let ctx = self.cluster_ctx(i);
        for mask in 0u64..(1u64 << atoms.len().min(63)) {
            let tau: Vec<Lit> = atoms
                .iter()
                .enumerate()
                .map(|(k, &a)| (mask >> k & 1 == 1, a))
                .collect();
            let body = |&(sign, a): &Lit| match self.cl.nodes[a] {
                Node::Know(_, b) => (sign, b),
                _ => unreachable!("cluster guesses are boxes"),
            };
            let tboxes: Vec<Lit> = tau.iter().filter(|l| l.0).map(body).collect();
            let tdiamonds: Vec<Lit> = tau.iter().filter(|l| !l.0).map(body).collect();
            let mut common = tau.clone();
            common.extend(tboxes.iter().copied());
            let mut seen = common.clone();
            seen.extend(boxes.iter().map(|&(_, b)| (true, b)));
            let mut inits: Vec<Vec<Lit>> = if diamonds.is_empty() {
                vec![seen.clone()]
            } else {
                diamonds
                    .iter()
                    .map(|&(_, psi)| {
                        let mut init = seen.clone();
                        init.push((false, psi));
                        init
                    })
                    .collect()
            };
            let seen_count = inits.len();
            inits.extend(tdiamonds.iter().map(|&(_, theta)| {
                let mut init = common.clone();
                init.push((false, theta));
                init
            }));
            let cp = self.checkpoint();
            match self.solve_all(inits, &ctx)? {
                Some(members) => {
                    for &m in &members[..seen_count] {
                        self.edges.push((i, x, m));
                    }
                    self.connect_all(i, &members);
                    return Ok(true);
                }
                None => self.restore(cp),
            }
        }
        Ok(false)
    }

    /// The structure found by a successful search, with relations closed
    /// under the system's conditions.
    pub(crate) fn model(&self, agent_names: Vec<String>) -> KnowledgeStructure {
        let n = self.worlds.len();
        let assign = self
            .worlds
            .iter()
            .map(|l| {
                (0..self.cl.props.len())
                    .map(|p| {
                        let id = self.cl.index.get(&Node::Prop(p));
                        id.is_some_and(|&id| l.has((true, id)))
                    })
                    .collect()
            })
            .collect();
        let states = (1..=n).map(|k| format!("w{k}")).collect();
        let worlds = Worlds::new(states, self.cl.props.clone(), assign).expect("distinct names");
        let relations = (0..agent_names.len())
            .map(|i| {
                let mut m = vec![vec![false; n]; n];
                for &(j, a, b) in &self.edges {
                    if j == i {
                        m[a][b] = true;
                    }
                }
                if self.sys.has_t() {
                    for (s, row) in m.iter_mut().enumerate() {
                        row[s] = true;
                    }
                }
                if self.blocking() {
                    for k in 0..n {
                        for a in 0..n {
                            if m[a][k] {
                                let via = m[k].clone();
                                for (b, &x) in via.iter().enumerate() {
                                    if x {
                                        m[a][b] = true;
                                    }
                                }
                            }
                        }
                    }
                }
                BinaryRelation::from_pairs(
                    n,
                    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| m[a][b]),
                )
            })
            .collect();
        KnowledgeStructure::new(worlds, agent_names, relations).expect("valid structure")
    }
}

pub(crate) fn agent_count(f: &Formula) -> usize {
    f.agents().iter().map(|a: &AgentId| a.0 as usize).max().unwrap_or(1).max(1)
}
