use super::*;
use crate::decision::{decide, translate_k_to_c};
use crate::formula::parse;

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn line(formula: &str, just: Justification) -> ProofLine {
    ProofLine {
        formula: f(formula),
        just,
    }
}

fn axiom(schema: Schema, subst: &[(&str, &str)]) -> Justification {
    Justification::Axiom {
        schema,
        subst: subst.iter().map(|(k, v)| (k.to_string(), f(v))).collect(),
    }
}

fn proof(system: SystemId, lines: Vec<ProofLine>) -> Proof {
    Proof {
        system,
        language: ProofLanguage::LK,
        lines,
    }
}

#[test]
fn documented_examples() {
    let p = proof(
        SystemId::K,
        vec![line("K(p) & K(p -> p) -> K(p)", axiom(Schema::K, &[("phi", "p"), ("psi", "p")]))],
    );
    assert_eq!(check_proof(&p), Ok(()));
    let p = proof(SystemId::KD45, vec![line("K(p) -> p", axiom(Schema::T, &[]))]);
    assert_eq!(
        check_proof(&p).unwrap_err().kind,
        ProofErrorKind::SchemaNotInSystem("T", SystemId::KD45)
    );
    let p = proof(
        SystemId::K,
        vec![
            line("p -> p | q", Justification::Taut),
            line("K(p -> p | q)", Justification::Necessitation(1)),
        ],
    );
    assert_eq!(check_proof(&p), Ok(()));
}

#[test]
fn rule_errors() {
    let p = proof(
        SystemId::K,
        vec![
            line("p -> p", Justification::Taut),
            line("K(p -> p)", Justification::Necessitation(2)),
        ],
    );
    assert_eq!(check_proof(&p).unwrap_err(), ProofError { line: 2, kind: ProofErrorKind::ForwardReference(2) });
    let p = proof(
        SystemId::K,
        vec![
            line("p -> p", Justification::Taut),
            line("K(p)", Justification::Necessitation(1)),
        ],
    );
    assert!(matches!(check_proof(&p).unwrap_err().kind, ProofErrorKind::NecessitationMismatch(1)));
    let p = proof(
        SystemId::K,
        vec![
            line("p -> p", Justification::Taut),
            line("(p -> p) -> q | ~q", Justification::Taut),
            line("q", Justification::ModusPonens(1, 2)),
        ],
    );
    assert!(matches!(check_proof(&p).unwrap_err().kind, ProofErrorKind::ModusPonensMismatch(1, 2)));
    let p = proof(SystemId::K, vec![line("p", Justification::Taut)]);
    assert_eq!(check_proof(&p).unwrap_err().kind, ProofErrorKind::NotTautology);
    let p = proof(
        SystemId::S5,
        vec![line("K(p) -> p", axiom(Schema::T, &[("phi", "q")]))],
    );
    assert_eq!(
        check_proof(&p).unwrap_err().kind,
        ProofErrorKind::BadSubstitution("phi".into())
    );
    let p = proof(SystemId::S5, vec![line("K(p) -> K(K(q))", axiom(Schema::Four, &[]))]);
    assert_eq!(check_proof(&p).unwrap_err().kind, ProofErrorKind::NotAnInstance("4"));
    assert_eq!(check_proof(&proof(SystemId::K, vec![])).unwrap_err().kind, ProofErrorKind::Empty);
}

#[test]
fn matching() {
    let s = match_axiom(&f("~K(q) -> K(~K(q))"), Schema::Five).unwrap();
    assert_eq!(s.get("phi"), Some(&f("q")));
    assert!(match_axiom(&f("K(q) -> K(K(q))"), Schema::T).is_none());
    let s = match_axiom_in(&f("~Cert(false)"), Schema::D, ProofLanguage::LC).unwrap();
    assert!(s.is_empty());
    // One agent per instance.
    assert!(match_axiom(&f("K_1(p) -> K_2(K_2(p))"), Schema::Four).is_none());
    assert!(match_axiom(&f("K_2(p) -> K_2(K_2(p))"), Schema::Four).is_some());
    // Desugared forms match too.
    assert!(match_axiom(&f("~(K(p) & ~p)"), Schema::T).is_some());
}

#[test]
fn tautologies() {
    assert!(is_prop_tautology(&f("K(p) | ~K(p)")));
    assert!(!is_prop_tautology(&f("K(p) -> p")));
    assert!(is_prop_tautology(&f("(p -> q) -> (~q -> ~p)")));
    assert!(is_prop_tautology(&f("Cert(p) | ~Cert(p)")));
    assert!(!is_prop_tautology(&f("K(p | ~p)")));
}

/// Brute-force truth tables over up to six propositions agree with the
/// checker, on random propositional formulas.
#[test]
fn taut_matches_truth_table_oracle() {
    use crate::generate::{random_formula, FormulaShape, Modality};
    use rand::SeedableRng;
    let props = ["a", "b", "c", "d", "e", "f"];
    let shape = FormulaShape::new(&props, Modality::None, 0, 9);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut seen_taut = 0;
    for _ in 0..3000 {
        let phi = random_formula(&mut rng, &shape);
        let oracle = (0u32..64).all(|row| {
            let w = crate::structures::Worlds::numbered(
                1,
                &props.map(String::from),
                vec![(0..6).map(|k| row >> k & 1 == 1).collect()],
            )
            .unwrap();
            let m = crate::structures::KnowledgeStructure::new(
                w,
                vec!["a".into()],
                vec![crate::structures::BinaryRelation::empty(1)],
            )
            .unwrap();
            crate::semantics::eval(&m, 0, &phi).unwrap()
        });
        seen_taut += usize::from(oracle);
        assert_eq!(is_prop_tautology(&phi), oracle, "{phi}");
    }
    assert!(seen_taut > 20);
}

#[test]
fn corpus_checks_and_conclusions_are_valid() {
    let c = corpus();
    assert!(c.len() >= 10);
    for (name, text) in c {
        let p = load_proof(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        check_proof(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
        let concl = p.conclusion().unwrap();
        let k = match p.language {
            ProofLanguage::LK => concl.clone(),
            ProofLanguage::LC => crate::decision::translate_c_to_k(concl).unwrap(),
        };
        assert!(decide(&k, p.system).unwrap().verdict.is_valid(), "{name}");
        assert_eq!(load_proof(&save_proof(&p)).unwrap(), p);
    }
}

/// A knowledge proof still checks after every line is moved to the
/// certainty language, and back.
#[test]
fn proofs_transfer_between_languages() {
    for (name, text) in corpus() {
        let p = load_proof(text).unwrap();
        if p.language != ProofLanguage::LK {
            continue;
        }
        let lc = Proof {
            language: ProofLanguage::LC,
            lines: p
                .lines
                .iter()
                .map(|l| ProofLine {
                    formula: translate_k_to_c(&l.formula).unwrap(),
                    just: match &l.just {
                        Justification::Axiom { schema, subst } => Justification::Axiom {
                            schema: *schema,
                            subst: subst
                                .iter()
                                .map(|(k, v)| (k.clone(), translate_k_to_c(v).unwrap()))
                                .collect(),
                        },
                        other => other.clone(),
                    },
                })
                .collect(),
            ..p.clone()
        };
        check_proof(&lc).unwrap_or_else(|e| panic!("{name} in LC: {e}"));
        let mixed = Proof { language: ProofLanguage::LK, ..lc };
        assert!(check_proof(&mixed).is_err() || p.lines.iter().all(|l| l.formula.modal_depth() == 0));
    }
}
