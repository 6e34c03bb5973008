mod common;

use certlogic::decision::{translate_c_to_k, translate_k_to_c};
use certlogic::generate::{random_formula, FormulaShape, Modality};
use certlogic::semantics::{eval, extension};
use certlogic::structures::{
    random_generalized_structure, random_simple_structure, BinaryRelation, Shape, Structure,
};
use certlogic::{parse, AgentId, Formula, Language, Rational, Relation, WeightAtom, WeightTerm};
use proptest::prelude::*;

const PROPS: [&str; 3] = ["p", "q", "r"];

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (0i64..=4, 1i64..=4).prop_map(|(n, d)| Rational::new(n.min(d), d))
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![
        Just(Relation::Ge),
        Just(Relation::Le),
        Just(Relation::Eq),
        Just(Relation::Lt),
        Just(Relation::Gt)
    ]
}

/// Arbitrary ASTs over the full language, two agents.
fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => (0..PROPS.len()).prop_map(|i| Formula::prop(PROPS[i])),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let agent = (1u32..=2).prop_map(AgentId);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (agent.clone(), inner.clone()).prop_map(|(i, a)| Formula::know(i, a)),
            (agent.clone(), inner.clone()).prop_map(|(i, a)| Formula::cert(i, a)),
            (
                prop::collection::vec((prop_oneof![-3i64..=-1, 1i64..=3], agent.clone(), inner.clone()), 1..=2),
                relation(),
                rational()
            )
                .prop_map(|(terms, rel, bound)| Formula::Weight(WeightAtom {
                    terms: terms.into_iter().map(|(c, i, a)| WeightTerm::new(c, i, a)).collect(),
                    rel,
                    bound,
                })),
            (agent, inner, unit_rational(), unit_rational()).prop_map(|(i, a, x, y)| {
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                Formula::weight_in(i, a, lo, hi)
            }),
        ]
    })
}

/// Formulas without `K`, for probability structures.
fn probability_formula() -> impl Strategy<Value = Formula> {
    formula().prop_filter("no knowledge operator", |f| !has_know(f))
}

fn has_know(f: &Formula) -> bool {
    f.to_string().contains("K")
}

fn generalized(seed: u64, n: usize, shape: Shape) -> Structure {
    let props: Vec<String> = PROPS.iter().map(|p| p.to_string()).collect();
    random_generalized_structure(n, &props, 6, seed, shape)
}

/// Two-agent variant: the random structure's kernel is reused for agent 2
/// in permuted form.
fn two_agents(s: Structure) -> certlogic::structures::GeneralizedProbabilityStructure {
    let g = match s {
        Structure::Generalized(g) => g,
        Structure::Simple(n) => n.embed(),
        Structure::Knowledge(_) => unreachable!(),
    };
    let k1: Vec<_> = g.kernel(AgentId(1)).unwrap().to_vec();
    let mut k2 = k1.clone();
    k2.rotate_left(1);
    certlogic::structures::GeneralizedProbabilityStructure::new(
        g.worlds().clone(),
        vec!["a".into(), "b".into()],
        vec![k1, k2],
    )
    .unwrap()
}

fn naive_properties(n: usize, rel: &BinaryRelation) -> [bool; 5] {
    let r = |s, t| rel.contains(s, t);
    let mut out = [true; 5];
    for s in 0..n {
        out[0] &= r(s, s);
        out[4] &= (0..n).any(|t| r(s, t));
        for t in 0..n {
            out[2] &= !r(s, t) || r(t, s);
            for u in 0..n {
                out[1] &= !(r(s, t) && r(t, u)) || r(s, u);
                out[3] &= !(r(s, t) && r(s, u)) || r(t, u);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_inverts_render(f in formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn render_inverts_parse_up_to_whitespace(f in formula()) {
        let text = f.to_string();
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        prop_assert_eq!(parse(&spaced).unwrap().to_string(), text);
    }

    #[test]
    fn desugar_is_idempotent(f in formula()) {
        let d = f.desugar();
        prop_assert_eq!(d.desugar(), d);
    }

    #[test]
    fn desugar_preserves_meaning(f in probability_formula(), seed in any::<u64>(), n in 1usize..=4) {
        let m = two_agents(generalized(seed, n, Shape::Any));
        prop_assert_eq!(extension(&m, &f).unwrap(), extension(&m, &f.desugar()).unwrap());
    }

    #[test]
    fn translations_land_in_their_languages(seed in any::<u64>()) {
        let mut rng = common::seeded(seed);
        let k = random_formula(&mut rng, &FormulaShape::new(&["p", "q"], Modality::Know, 3, 10));
        let c = translate_k_to_c(&k).unwrap();
        let back = translate_c_to_k(&c).unwrap();
        if k.modal_depth() > 0 {
            prop_assert_eq!(c.desugar().classify(), Language::LC);
            prop_assert_eq!(back.desugar().classify(), Language::LK);
        }
        prop_assert_eq!(back.desugar(), k.desugar());
    }

    #[test]
    fn support_relations_are_serial(seed in any::<u64>(), n in 1usize..=5) {
        for shape in [Shape::Any, Shape::Uniform, Shape::PositiveSimple] {
            let g = two_agents(generalized(seed, n, shape));
            for i in 1..=2 {
                prop_assert!(g.support_relation(AgentId(i)).unwrap().properties().serial);
            }
        }
    }

    #[test]
    fn simple_structures_embed_as_uniform(seed in any::<u64>(), n in 1usize..=5, f in probability_formula()) {
        let props: Vec<String> = PROPS.iter().map(|p| p.to_string()).collect();
        let s = random_simple_structure(&mut common::seeded(seed), n, &props, 6, false);
        let g = s.embed();
        prop_assert!(g.is_uniform(AgentId(1)));
        prop_assert_eq!(g.as_simple(), Some(s.clone()));
        if f.agents().iter().all(|a| *a == AgentId(1)) {
            prop_assert_eq!(extension(&s, &f).unwrap(), extension(&g, &f).unwrap());
        }
    }

    #[test]
    fn weight_atoms_are_state_independent_in_simple_structures(
        seed in any::<u64>(),
        n in 1usize..=5,
        f in probability_formula(),
    ) {
        let props: Vec<String> = PROPS.iter().map(|p| p.to_string()).collect();
        let s = random_simple_structure(&mut common::seeded(seed), n, &props, 6, false);
        let atom = match f {
            Formula::Weight(_) | Formula::WeightIn(_) => f,
            other => Formula::cert(AgentId(1), other),
        };
        if atom.agents().iter().all(|a| *a == AgentId(1)) {
            let first = eval(&s, 0, &atom).unwrap();
            for st in 1..n {
                prop_assert_eq!(eval(&s, st, &atom).unwrap(), first);
            }
        }
    }
}

/// Frame properties against a triple loop on every relation over at most
/// four states.
#[test]
fn frame_properties_match_naive_loops() {
    let check = |n: usize, mask: u64| {
        let rel = BinaryRelation::from_mask(n, mask);
        let p = rel.properties();
        assert_eq!(
            [p.reflexive, p.transitive, p.symmetric, p.euclidean, p.serial],
            naive_properties(n, &rel),
            "{n} {mask:b}"
        );
    };
    for n in 1..=3 {
        for mask in 0..1u64 << (n * n) {
            check(n, mask);
        }
    }
    for mask in 0..1u64 << 16 {
        check(4, mask);
    }
}

/// eval is a pure function of its inputs.
#[test]
fn evaluation_is_deterministic() {
    let mut rng = common::seeded(5);
    let shape = FormulaShape::new(&["p", "q"], Modality::Cert, 3, 10);
    for i in 0..200u64 {
        let s = generalized(i, 3, Shape::Any);
        let f = random_formula(&mut rng, &shape);
        assert_eq!(extension(&s, &f).unwrap(), extension(&s.clone(), &f.clone()).unwrap());
    }
}
