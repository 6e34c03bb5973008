use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    default_agent_names, BinaryRelation, Distribution, FrameProperties,
    GeneralizedProbabilityStructure, KnowledgeStructure, SimpleProbabilityStructure, Structure,
    StructureError, Worlds,
};
use crate::rational::Rational;

/// Default cap on the number of candidate structures an enumeration may visit.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 26;

/// All relations on `n` states whose properties include `required`, in mask
/// order.
pub fn enumerate_relations(n: usize, required: &FrameProperties) -> Vec<BinaryRelation> {
    assert!(n * n < 64, "relation masks are limited to 63 bits");
    (0..1u64 << (n * n))
        .map(|mask| BinaryRelation::from_mask(n, mask))
        .filter(|r| r.properties().satisfies(required))
        .collect()
}

/// Single-agent knowledge structures on exactly `n_states` states, in a
/// fixed order: relation mask outer, assignment mask inner.
#[derive(Debug)]
pub struct KnowledgeEnumeration {
    n: usize,
    props: Vec<String>,
    relations: Vec<BinaryRelation>,
    rel_pos: usize,
    assign_mask: u64,
    assign_count: u64,
}

pub fn enumerate_knowledge_structures(
    n_states: usize,
    props: &[String],
    required: &FrameProperties,
    limit: u128,
) -> Result<KnowledgeEnumeration, StructureError> {
    if n_states == 0 {
        return Err(StructureError::NoStates);
    }
    let bits = n_states * n_states + n_states * props.len();
    let count = if bits >= 127 { u128::MAX } else { 1u128 << bits };
    if count > limit || n_states * n_states >= 64 || n_states * props.len() >= 64 {
        return Err(StructureError::TooLarge { count, limit });
    }
    Ok(KnowledgeEnumeration {
        n: n_states,
        props: props.to_vec(),
        relations: enumerate_relations(n_states, required),
        rel_pos: 0,
        assign_mask: 0,
        assign_count: 1 << (n_states * props.len()),
    })
}

impl KnowledgeEnumeration {
    /// Number of structures the iterator yields in total.
    pub fn total(&self) -> u128 {
        self.relations.len() as u128 * self.assign_count as u128
    }
}

/// Row-major decoding of `mask` into an `n × k` truth assignment.
pub(crate) fn assignment_from_mask(n: usize, k: usize, mask: u64) -> Vec<Vec<bool>> {
    (0..n)
        .map(|s| (0..k).map(|p| mask >> (s * k + p) & 1 == 1).collect())
        .collect()
}

impl Iterator for KnowledgeEnumeration {
    type Item = KnowledgeStructure;

    fn next(&mut self) -> Option<KnowledgeStructure> {
        if self.assign_mask == self.assign_count {
            self.assign_mask = 0;
            self.rel_pos += 1;
        }
        let rel = self.relations.get(self.rel_pos)?.clone();
        let assign = assignment_from_mask(self.n, self.props.len(), self.assign_mask);
        self.assign_mask += 1;
        let worlds = Worlds::numbered(self.n, &self.props, assign).expect("well-formed worlds");
        Some(
            KnowledgeStructure::new(worlds, default_agent_names(1), vec![rel])
                .expect("well-formed structure"),
        )
    }
}

/// Every distribution on `n` states whose values share a denominator
/// `d <= max_denominator`, deduplicated, in a fixed order.
pub fn distribution_grid(n: usize, max_denominator: u32) -> Vec<Distribution> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d in 1..=max_denominator.max(1) {
        let mut parts = vec![0u32; n];
        compositions(d, 0, &mut parts, &mut |parts| {
            let values: Vec<Rational> = parts
                .iter()
                .map(|&k| Rational::new(k as i64, d as i64))
                .collect();
            if seen.insert(values.clone()) {
                out.push(Distribution::new(values).expect("composition sums to one"));
            }
        });
    }
    out
}

fn compositions(remaining: u32, pos: usize, parts: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    if pos + 1 == parts.len() {
        parts[pos] = remaining;
        emit(parts);
        return;
    }
    for k in (0..=remaining).rev() {
        parts[pos] = k;
        compositions(remaining - k, pos + 1, parts, emit);
    }
}

/// Shapes produced by [`random_generalized_structure`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    /// Independent distribution at each state.
    Any,
    /// Support-linked states share their distribution.
    Uniform,
    /// A simple structure in which every state has positive probability.
    PositiveSimple,
}

fn random_distribution(
    rng: &mut impl Rng,
    support: &[usize],
    n: usize,
    denominator_bound: u32,
    positive: bool,
) -> Distribution {
    let m = support.len() as u32;
    let (lo, hi) = if positive {
        (m, denominator_bound.max(m))
    } else {
        (1, denominator_bound.max(1))
    };
    let d = rng.gen_range(lo..=hi);
    let mut units = vec![0u32; support.len()];
    let mut left = d;
    if positive {
        units.iter_mut().for_each(|u| *u = 1);
        left -= m;
    }
    for _ in 0..left {
        units[rng.gen_range(0..support.len())] += 1;
    }
    let mut values = vec![Rational::zero(); n];
    for (&s, &u) in support.iter().zip(&units) {
        values[s] = Rational::new(u as i64, d as i64);
    }
    Distribution::new(values).expect("units sum to the denominator")
}

fn random_assignment(rng: &mut impl Rng, n: usize, k: usize) -> Vec<Vec<bool>> {
    (0..n).map(|_| (0..k).map(|_| rng.gen()).collect()).collect()
}

/// Single-agent simple structure on `n_states` states with probabilities
/// whose denominators do not exceed `denominator_bound` (raised to
/// `n_states` when `positive` requires it).
pub fn random_simple_structure(
    rng: &mut impl Rng,
    n_states: usize,
    props: &[String],
    denominator_bound: u32,
    positive: bool,
) -> SimpleProbabilityStructure {
    assert!(n_states >= 1);
    let all: Vec<usize> = (0..n_states).collect();
    let pr = random_distribution(rng, &all, n_states, denominator_bound, positive);
    let worlds = Worlds::numbered(n_states, props, random_assignment(rng, n_states, props.len()))
        .expect("well-formed worlds");
    SimpleProbabilityStructure::new(worlds, default_agent_names(1), vec![pr])
        .expect("well-formed structure")
}

/// Seeded single-agent structure of the requested shape.
pub fn random_generalized_structure(
    n_states: usize,
    props: &[String],
    denominator_bound: u32,
    seed: u64,
    shape: Shape,
) -> Structure {
    assert!(n_states >= 1 && denominator_bound >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_states;
    let all: Vec<usize> = (0..n).collect();
    let kernel: Vec<Distribution> = match shape {
        Shape::PositiveSimple => {
            return Structure::Simple(random_simple_structure(
                &mut rng,
                n,
                props,
                denominator_bound,
                true,
            ));
        }
        Shape::Any => (0..n)
            .map(|_| random_distribution(&mut rng, &all, n, denominator_bound, false))
            .collect(),
        Shape::Uniform => {
            // Disjoint blocks, each carrying one distribution with full
            // support on the block; states outside every block adopt one of
            // the block distributions.
            let mut order = all.clone();
            order.shuffle(&mut rng);
            let covered = rng.gen_range(1..=n);
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            for &s in &order[..covered] {
                if blocks.is_empty() || rng.gen_bool(0.5) {
                    blocks.push(vec![s]);
                } else {
                    let b = rng.gen_range(0..blocks.len());
                    blocks[b].push(s);
                }
            }
            let dists: Vec<Distribution> = blocks
                .iter_mut()
                .map(|b| {
                    b.sort_unstable();
                    random_distribution(&mut rng, b, n, denominator_bound.max(b.len() as u32), true)
                })
                .collect();
            let mut kernel = vec![None; n];
            for (b, d) in blocks.iter().zip(&dists) {
                for &s in b {
                    kernel[s] = Some(d.clone());
                }
            }
            kernel
                .into_iter()
                .map(|d| d.unwrap_or_else(|| dists[rng.gen_range(0..dists.len())].clone()))
                .collect()
        }
    };
    let worlds = Worlds::numbered(n, props, random_assignment(&mut rng, n, props.len()))
        .expect("well-formed worlds");
    Structure::Generalized(
        GeneralizedProbabilityStructure::new(worlds, default_agent_names(1), vec![kernel])
            .expect("well-formed structure"),
    )
}
