//! Seeded random formulas and exhaustive formula enumeration, for property
//! suites and batteries.

use rand::Rng;

use crate::formula::{AgentId, Formula};

/// Which modal operator generated formulas use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modality {
    Know,
    Cert,
    None,
}

#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub props: Vec<String>,
    pub agents: u32,
    /// Maximum modal nesting.
    pub max_depth: usize,
    /// Maximum number of connectives.
    pub max_size: usize,
    pub modality: Modality,
    /// Allow `|` and `->` in addition to `~` and `&`.
    pub sugar: bool,
}

impl FormulaShape {
    pub fn new(props: &[&str], modality: Modality, max_depth: usize, max_size: usize) -> FormulaShape {
        FormulaShape {
            props: props.iter().map(|p| p.to_string()).collect(),
            agents: 1,
            max_depth,
            max_size,
            modality,
            sugar: true,
        }
    }

    fn modal(&self, agent: AgentId, f: Formula) -> Formula {
        match self.modality {
            Modality::Know => Formula::know(agent, f),
            Modality::Cert => Formula::cert(agent, f),
            Modality::None => unreachable!("no modal operator requested"),
        }
    }
}

/// A random formula with at most `shape.max_size` connectives and modal
/// depth at most `shape.max_depth`.
pub fn random_formula(rng: &mut impl Rng, shape: &FormulaShape) -> Formula {
    let size = rng.gen_range(0..=shape.max_size);
    build(rng, shape, shape.max_depth, size)
}

fn atom(rng: &mut impl Rng, shape: &FormulaShape) -> Formula {
    if rng.gen_ratio(1, 12) {
        if rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        }
    } else {
        Formula::prop(shape.props[rng.gen_range(0..shape.props.len())].clone())
    }
}

fn build(rng: &mut impl Rng, shape: &FormulaShape, depth: usize, size: usize) -> Formula {
    if size == 0 {
        return atom(rng, shape);
    }
    let modal = depth > 0 && shape.modality != Modality::None;
    let binary_kinds = if shape.sugar { 3 } else { 1 };
    let choices = 1 + usize::from(modal) * 2 + if size >= 2 { binary_kinds * 2 } else { 0 };
    let pick = rng.gen_range(0..choices);
    if pick == 0 {
        return Formula::not(build(rng, shape, depth, size - 1));
    }
    if modal && pick <= 2 {
        let agent = AgentId(rng.gen_range(1..=shape.agents.max(1)));
        return shape.modal(agent, build(rng, shape, depth - 1, size - 1));
    }
    let left = rng.gen_range(0..size);
    let a = build(rng, shape, depth, left);
    let b = build(rng, shape, depth, size - 1 - left);
    match rng.gen_range(0..binary_kinds) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::implies(a, b),
    }
}

/// Every formula over `props` built with `~`, `&` and the modal operator of
/// agent 1, with at most `max_size` connectives and modal depth at most
/// `max_depth`, in order of size.
pub fn enumerate_formulas(
    props: &[&str],
    modality: Modality,
    max_size: usize,
    max_depth: usize,
) -> Vec<Formula> {
    // by_size[n] holds (formula, depth) pairs with exactly n connectives.
    let mut by_size: Vec<Vec<(Formula, usize)>> =
        vec![props.iter().map(|p| (Formula::prop(*p), 0)).collect()];
    let shape = FormulaShape::new(props, modality, max_depth, max_size);
    for n in 1..=max_size {
        let mut level = vec![];
        for (f, d) in &by_size[n - 1] {
            level.push((Formula::not(f.clone()), *d));
            if modality != Modality::None && *d < max_depth {
                level.push((shape.modal(AgentId::DEFAULT, f.clone()), d + 1));
            }
        }
        for left in 0..n {
            for (a, da) in &by_size[left] {
                for (b, db) in &by_size[n - 1 - left] {
                    level.push((Formula::and(a.clone(), b.clone()), (*da).max(*db)));
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().map(|(f, _)| f).collect()
}
