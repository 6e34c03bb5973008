mod common;

use certlogic::certainty::{false_belief_states, is_positive_structure};
use certlogic::semantics::eval;
use certlogic::structures::{random_simple_structure, SimpleProbabilityStructure};
use certlogic::{AgentId, Formula, Rational};
use proptest::prelude::*;

const ONE: AgentId = AgentId(1);

/// The class-based false-belief set equals the one found by exhaustive
/// formula enumeration on every small structure.
#[test]
fn class_characterization_matches_enumeration() {
    for props in [vec!["p".to_string()], vec!["p".to_string(), "q".to_string()]] {
        let all = common::simple_grid(3, &props, 3);
        assert!(all.len() > 100);
        for n in &all {
            let r = false_belief_states(n, ONE).unwrap();
            assert_eq!(r.fb, common::fb_by_enumeration(n, 6), "{n:?}");
            assert!(r.measure.is_zero());
        }
    }
}

fn arb_structure() -> impl Strategy<Value = (SimpleProbabilityStructure, bool)> {
    (1usize..=6, 0usize..=3, any::<u64>(), any::<bool>()).prop_map(|(size, k, seed, positive)| {
        let props: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
        let mut rng = common::seeded(seed);
        (random_simple_structure(&mut rng, size, &props, 8, positive), positive)
    })
}

proptest! {
    /// The false-belief set is a null set, every witness checks, and
    /// positive structures have no false beliefs.
    #[test]
    fn false_beliefs_are_null((n, positive) in arb_structure()) {
        let r = false_belief_states(&n, ONE).unwrap();
        prop_assert!(r.measure.is_zero());
        prop_assert_eq!(r.witnesses.len(), r.fb.len());
        for (&s, phi) in &r.witnesses {
            let claim = Formula::and(Formula::not(phi.clone()), Formula::cert(ONE, phi.clone()));
            prop_assert!(eval(&n, s, &claim).unwrap());
        }
        prop_assert_eq!(is_positive_structure(&n, ONE), positive || n.distribution(ONE).unwrap().values().iter().all(Rational::is_positive));
        if is_positive_structure(&n, ONE) {
            prop_assert!(r.fb.is_empty());
        }
    }
}
