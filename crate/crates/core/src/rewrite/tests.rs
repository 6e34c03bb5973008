use super::*;
use crate::decision::decide;
use crate::formula::parse;

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn kd45_equivalent(a: &Formula, b: &Formula) -> bool {
    decide(&Formula::iff(a.clone(), b.clone()), SystemId::KD45)
        .unwrap()
        .verdict
        .is_valid()
}

#[test]
fn bundled_rules_are_kd45_equivalences() {
    for r in rules() {
        assert!(r.verify(), "{}", r.name);
    }
}

#[test]
fn printed_variant_of_k_not_k_is_not_an_equivalence() {
    let printed = RewriteRule {
        name: "printed",
        left: k(Formula::not(k(meta("phi")))),
        right: k(meta("phi")),
        direction: Direction::Forward,
    };
    assert!(!printed.verify());
}

#[test]
fn documented_examples() {
    assert_eq!(normalize_depth_one(&f("K(K(p))")).unwrap(), f("K(p)"));
    assert_eq!(normalize_depth_one(&f("K(p | K(q))")).unwrap(), f("K(p) | K(q)"));
    assert_eq!(normalize_depth_one(&f("Cert(~Cert(p))")).unwrap(), f("~Cert(p)"));
}

#[test]
fn single_steps() {
    let kk = rule("k-k").unwrap();
    let (out, step) = apply_rule(&f("K(K(p))"), &kk, &Position::default()).unwrap();
    assert_eq!(out, f("K(p)"));
    assert_eq!(step.rule, "k-k");
    let and = rule("k-and").unwrap();
    let (out, _) = apply_rule(&f("K(p & q)"), &and, &Position::default()).unwrap();
    assert_eq!(out, f("K(p) & K(q)"));
    assert!(matches!(
        apply_rule(&f("p"), &kk, &Position::default()),
        Err(RewriteError::NoMatch { rule: "k-k", .. })
    ));
    // Nested position and certainty form.
    let (out, _) = apply_rule(&f("q | Cert(Cert(p))"), &kk, &Position(vec![1])).unwrap();
    assert_eq!(out, f("q | Cert(p)"));
    let (back, _) = apply_rule(&out, &kk.reversed(), &Position(vec![1])).unwrap();
    assert_eq!(back, f("q | Cert(Cert(p))"));
    assert!(matches!(
        apply_rule(&f("p"), &kk, &Position(vec![3])),
        Err(RewriteError::BadPosition(_))
    ));
}

#[test]
fn trace_replays() {
    let phi = f("K(p & (q | ~K(r | K(p))))");
    let (out, trace) = normalize_with_trace(&phi).unwrap();
    assert!(out.modal_depth() <= 1);
    assert!(!trace.is_empty());
    let mut cur = phi.clone();
    for step in &trace {
        assert_eq!(subformula_at(&cur, &step.position), Some(&step.before), "{step}");
        if step.rule == BODY_CNF {
            assert!(kd45_equivalent(&step.before, &step.after));
            cur = replace_at(&cur, &step.position.0, step.after.clone());
        } else {
            let (next, replay) = apply_rule(&cur, &rule(step.rule).unwrap(), &step.position).unwrap();
            assert_eq!(&replay, step);
            cur = next;
        }
    }
    assert_eq!(cur, out);
    assert!(kd45_equivalent(&phi, &out));
}

#[test]
fn input_gate() {
    // Nested probability is outside the rewritable fragment.
    let nested = f("w(w(p) >= 1/2) < 1/3");
    assert_eq!(nested.classify(), Language::LP);
    assert_eq!(normalize_depth_one(&nested), Err(RewriteError::NotModal(Language::LP)));
    assert_eq!(
        normalize_depth_one(&f("K_1(K_2(p))")),
        Err(RewriteError::MultiAgent(2))
    );
    assert_eq!(normalize_depth_one(&f("p -> q")).unwrap(), f("p -> q"));
}

#[test]
fn corner_bodies() {
    for s in ["K(K(p) | ~K(p))", "K(K(p) & ~K(p))", "K(~K(q) | K(p))", "K(~(K(p) -> q))", "~K(true | K(K(false)))"] {
        let phi = f(s);
        let out = normalize_depth_one(&phi).unwrap();
        assert!(out.modal_depth() <= 1, "{s} -> {out}");
        assert!(kd45_equivalent(&phi, &out), "{s} -> {out}");
    }
}
