use super::*;
use crate::formula::parse;
use crate::semantics::valid_in_structure;
use crate::structures::{Distribution, Worlds};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn dist(v: &[(i64, i64)]) -> Distribution {
    Distribution::new(v.iter().map(|&(a, b)| r(a, b)).collect()).unwrap()
}

fn frame(kernel: Vec<Distribution>) -> Frame {
    let n = kernel.len();
    Frame::new((1..=n).map(|i| format!("s{i}")).collect(), vec!["a".into()], vec![kernel]).unwrap()
}

fn two_agents(expert: Vec<Distribution>, agent: Vec<Distribution>) -> GeneralizedProbabilityStructure {
    let n = expert.len();
    GeneralizedProbabilityStructure::new(
        Worlds::numbered(n, &[], vec![vec![]; n]).unwrap(),
        vec!["expert".into(), "agent".into()],
        vec![expert, agent],
    )
    .unwrap()
}

const ONE: AgentId = AgentId(1);

#[test]
fn intervals() {
    assert!(Interval::new(r(2, 1), r(3, 1)).is_err());
    assert!(Interval::new(r(1, 2), r(1, 3)).is_err());
    assert!(Interval::new(r(-1, 2), r(1, 3)).is_err());
    assert!(Interval::point(r(1, 3)).unwrap().contains(&r(1, 3)));
}

#[test]
fn cleared_instances() {
    let p = parse("p").unwrap();
    let i = Interval::point(r(1, 3)).unwrap();
    let inst = miller_instance(&p, &i, ONE, ONE);
    let expected = parse(
        "3w(p & w(p) in [1/3, 1/3]) - w(w(p) in [1/3, 1/3]) >= 0 \
         & w(w(p) in [1/3, 1/3]) - 3w(p & w(p) in [1/3, 1/3]) >= 0",
    )
    .unwrap();
    assert_eq!(inst.rendered, expected);
    let whole = miller_instance(&p, &Interval::new(r(0, 1), r(1, 1)).unwrap(), ONE, ONE);
    assert_eq!(
        whole.rendered,
        parse("w(p & w(p) in [0, 1]) >= 0 & w(w(p) in [0, 1]) - w(p & w(p) in [0, 1]) >= 0").unwrap()
    );
}

#[test]
fn stronger_form() {
    let p = parse("p").unwrap();
    let zero = Interval::point(r(0, 1)).unwrap();
    assert_eq!(
        stronger_miller_instance(&p, &[], &zero, ONE, ONE).unwrap(),
        miller_instance(&p, &zero, ONE, ONE).rendered
    );
    let psi = parse("w(q) in [1/2, 1]").unwrap();
    let f = stronger_miller_instance(&p, &[psi], &zero, ONE, ONE).unwrap();
    let event = "w(q) in [1/2, 1] & w(p) in [0, 0]";
    assert_eq!(
        f,
        parse(&format!("w(p & ({event})) >= 0 & -w(p & ({event})) >= 0")).unwrap()
    );
    assert!(matches!(
        stronger_miller_instance(&p, &[parse("q").unwrap()], &zero, ONE, ONE),
        Err(MillerError::BadConditioningAtom(_))
    ));
    assert!(matches!(
        stronger_miller_instance(&p, &[parse("w_2(q) in [0, 1]").unwrap()], &zero, ONE, ONE),
        Err(MillerError::BadConditioningAtom(_))
    ));
}

#[test]
fn frame_checks() {
    let props = vec!["p".to_string()];
    let uniform = frame(vec![dist(&[(1, 2), (1, 2)]), dist(&[(1, 2), (1, 2)])]);
    let rep = check_miller_theorem(&uniform, ONE, &props, &default_battery()).unwrap();
    assert!(rep.uniform && rep.all_valid && rep.counterexample.is_none());

    let skewed = frame(vec![dist(&[(1, 2), (1, 2)]), dist(&[(0, 1), (1, 1)])]);
    let rep = check_miller_theorem(&skewed, ONE, &props, &default_battery()).unwrap();
    assert!(!rep.uniform);
    let c = rep.counterexample.unwrap();
    assert!(!eval(&c.structure, c.state, &c.formula).unwrap());

    let single = frame(vec![dist(&[(1, 1)])]);
    let rep = check_miller_theorem(&single, ONE, &props, &default_battery()).unwrap();
    assert!(rep.uniform && rep.all_valid);

    let many: Vec<String> = (0..11).map(|i| format!("p{i}")).collect();
    assert!(matches!(
        check_miller_theorem(&uniform, ONE, &many, &default_battery()),
        Err(MillerError::TooLarge { .. })
    ));
}

#[test]
fn countermodels() {
    // p at the first state only, interval [1/2, 1/2]: the first state
    // gives the event probability 1/2 but p-and-event probability 1/2.
    let f = frame(vec![dist(&[(1, 2), (1, 2)]), dist(&[(0, 1), (1, 1)])]);
    let (n, inst, s) = nonuniform_countermodel(&f, ONE).unwrap();
    assert!(!eval(&n, s, &inst.rendered).unwrap());
    assert!(!valid_in_structure(&n, &inst.rendered).unwrap().is_valid());

    // Point masses on two linked states.
    let f = frame(vec![dist(&[(0, 1), (1, 1)]), dist(&[(1, 1), (0, 1)])]);
    let (n, inst, s) = nonuniform_countermodel(&f, ONE).unwrap();
    assert!(!eval(&n, s, &inst.rendered).unwrap());
    assert!(inst.interval.lo() == inst.interval.hi());

    let u = frame(vec![dist(&[(1, 1), (0, 1)]), dist(&[(1, 1), (0, 1)])]);
    assert_eq!(nonuniform_countermodel(&u, ONE).unwrap_err(), MillerError::Uniform(ONE));
}

#[test]
fn expert_classes() {
    let (e1, a1) = (AgentId(1), AgentId(2));
    let fixed = || vec![dist(&[(1, 2), (1, 2)]); 2];
    let n = two_agents(vec![dist(&[(1, 1), (0, 1)]), dist(&[(0, 1), (1, 1)])], fixed());
    assert_eq!(s_good(&n, e1, a1).unwrap(), vec![0, 1]);
    assert!(equivalence_class_constraint(&n, e1, a1).unwrap());

    let n = two_agents(vec![dist(&[(1, 2), (1, 2)]); 2], fixed());
    assert_eq!(s_good(&n, e1, a1).unwrap(), vec![0, 1]);

    let n = two_agents(vec![dist(&[(1, 2), (1, 2)]), dist(&[(1, 1), (0, 1)])], fixed());
    assert!(s_good(&n, e1, a1).unwrap().is_empty());
    assert!(!equivalence_class_constraint(&n, e1, a1).unwrap());

    // The bad state is null for the agent.
    let n = two_agents(
        vec![dist(&[(1, 1), (0, 1), (0, 1)]), dist(&[(1, 2), (0, 1), (1, 2)]), dist(&[(0, 1), (0, 1), (1, 1)])],
        vec![dist(&[(1, 3), (0, 1), (2, 3)]); 3],
    );
    assert_eq!(s_good(&n, e1, a1).unwrap(), vec![0, 2]);
    assert!(equivalence_class_constraint(&n, e1, a1).unwrap());

    let n = two_agents(fixed(), vec![dist(&[(1, 1), (0, 1)]), dist(&[(0, 1), (1, 1)])]);
    assert_eq!(equivalence_class_constraint(&n, e1, a1), Err(MillerError::StateDependent(0, 1)));
}

#[test]
fn battery_round_trip() {
    let b = default_battery();
    assert_eq!(b.instances.len(), 50);
    assert_eq!(load_battery(&save_battery(&b)).unwrap(), b);
    let b = load_battery(r#"[{"phi": "p", "interval": ["1/3", 1], "agents": [1, 2]}]"#).unwrap();
    assert_eq!(b.instances[0].agents, (AgentId(1), AgentId(2)));
    assert!(load_battery(r#"[{"phi": "p", "interval": ["2", "3"]}]"#).is_err());
    assert!(load_battery(r#"[{"phi": "p &", "interval": [0, 1]}]"#).is_err());
}

#[test]
fn parallel_check_is_deterministic() {
    let props = vec!["p".to_string(), "q".to_string()];
    let f = frame(vec![dist(&[(1, 2), (1, 2), (0, 1)]), dist(&[(0, 1), (1, 1), (0, 1)]), dist(&[(1, 3), (1, 3), (1, 3)])]);
    let b = default_battery();
    let one = check_miller_theorem(&f, ONE, &props, &b).unwrap();
    for jobs in [2, 3, 7, 100] {
        assert_eq!(check_miller_theorem_with(&f, ONE, &props, &b, jobs).unwrap(), one);
    }
    assert!(!one.all_valid);
}

#[test]
fn mixture_frame_validates_the_principle() {
    // The first state is null and mixes two self-certain point masses.
    let f = frame(vec![dist(&[(0, 1), (1, 2), (1, 2)]), dist(&[(0, 1), (1, 1), (0, 1)]), dist(&[(0, 1), (0, 1), (1, 1)])]);
    assert_eq!(nonuniform_countermodel(&f, ONE), Err(MillerError::NotFound));
    let instances = Battery {
        extra: vec![],
        ..default_battery()
    };
    let rep = check_miller_theorem(&f, ONE, &["p".to_string()], &instances).unwrap();
    assert!(!rep.uniform && rep.all_valid && rep.counterexample.is_none());
    // The extra formulas need uniformity.
    let rep = check_miller_theorem(&f, ONE, &["p".to_string()], &default_battery()).unwrap();
    assert!(!rep.all_valid);
}
