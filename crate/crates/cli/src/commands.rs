use std::path::Path;

use serde_json::{json, Value};

use certlogic::certainty::false_belief_states;
use certlogic::decision::{
    check_s5_kd45_bridge, decide_certainty_with, decide_with, translate_c_to_k, translate_k_to_c,
    CertaintyClass, DecideOptions, DecisionError, SystemId,
};
use certlogic::miller::{
    check_miller_theorem_with, default_battery, equivalence_class_constraint, load_battery,
    miller_instance, s_good, stronger_miller_instance, Interval, DEFAULT_PROPS,
};
use certlogic::proofs::{check_proof, load_proof, ProofLanguage};
use certlogic::rewrite::normalize_with_trace;
use certlogic::semantics::{eval_at, extension, valid_in_structure, Validity};
use certlogic::structures::{
    self, enumerate_knowledge_structures, random_generalized_structure, BinaryRelation, Frame,
    FrameProperties, GeneralizedProbabilityStructure, Shape, Structure,
    DEFAULT_ENUMERATION_LIMIT,
};
use certlogic::{parse, AgentId, Formula, Language, Rational};

use crate::args::{Cli, Command, MillerCommand};
use crate::Failure;

type Outcome = Result<bool, Failure>;

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| Failure::Usage(format!("formula: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn structure(path: &Path) -> Result<Structure, Failure> {
    structures::load(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn agent(s: &Structure, name: &str) -> Result<AgentId, Failure> {
    s.agent_id(name)
        .ok_or_else(|| Failure::Usage(format!("unknown agent `{name}`")))
}

fn decision_failure(e: DecisionError) -> Failure {
    match e {
        DecisionError::ResourceLimit(_) => Failure::Resource(e.to_string()),
        other => Failure::Usage(other.to_string()),
    }
}

fn options(budget: Option<u64>) -> DecideOptions {
    let mut o = DecideOptions::default();
    if let Some(b) = budget {
        o.node_budget = b;
    }
    o
}

fn emit(cli: &Cli, value: Value, human: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{}", human());
    }
}

fn structure_value(s: &Structure) -> Value {
    serde_json::from_str(&structures::save(s)).expect("saved structure is JSON")
}

fn state_names(s: &Structure, states: impl IntoIterator<Item = usize>) -> Vec<String> {
    let names = s.worlds().states();
    states.into_iter().map(|i| names[i].clone()).collect()
}

fn properties_value(p: &FrameProperties) -> Value {
    json!({
        "reflexive": p.reflexive,
        "transitive": p.transitive,
        "symmetric": p.symmetric,
        "euclidean": p.euclidean,
        "serial": p.serial,
    })
}

fn properties_text(p: &FrameProperties) -> String {
    [
        ("reflexive", p.reflexive),
        ("transitive", p.transitive),
        ("symmetric", p.symmetric),
        ("euclidean", p.euclidean),
        ("serial", p.serial),
    ]
    .iter()
    .map(|(name, v)| format!("{name:<11}{}", if *v { "yes" } else { "no" }))
    .collect::<Vec<_>>()
    .join("\n")
}

fn pairs(rel: &BinaryRelation, names: &[String]) -> Vec<(String, String)> {
    rel.pairs()
        .map(|(s, t)| (names[s].clone(), names[t].clone()))
        .collect()
}

fn generalized(s: &Structure) -> Result<GeneralizedProbabilityStructure, Failure> {
    match s {
        Structure::Generalized(n) => Ok(n.clone()),
        Structure::Simple(n) => Ok(n.embed()),
        Structure::Knowledge(_) => Err(Failure::Usage("expected a probability structure".into())),
    }
}

fn rational_pair(text: &str) -> Result<(Rational, Rational), Failure> {
    let (a, b) = text
        .trim_matches(|c| c == '[' || c == ']')
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("expected `a,b`, got `{text}`")))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn agent_pair(text: &str) -> Result<(AgentId, AgentId), Failure> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("expected `i,j`, got `{text}`")))?;
    let id = |s: &str| -> Result<AgentId, Failure> {
        match s.trim().parse::<u32>() {
            Ok(i) if i >= 1 => Ok(AgentId(i)),
            _ => Err(Failure::Usage(format!("bad agent index `{s}`"))),
        }
    };
    Ok((id(a)?, id(b)?))
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Parse(f) => {
            let phi = formula(&f.formula)?;
            let d = phi.desugar();
            let lang = d.classify();
            emit(
                cli,
                json!({
                    "formula": phi.to_string(),
                    "desugared": d.to_string(),
                    "language": lang.to_string(),
                    "modal_depth": phi.modal_depth(),
                    "connectives": phi.connective_count(),
                }),
                || {
                    format!(
                        "formula    {phi}\ndesugared  {d}\nlanguage   {lang}\ndepth      {}",
                        phi.modal_depth()
                    )
                },
            );
            Ok(true)
        }
        Command::Eval { model, state, formula: f } => {
            let s = structure(&model.model)?;
            let phi = formula(&f.formula)?;
            let v = eval_at(&s, state, &phi)?;
            emit(cli, json!({ "value": v }), || v.to_string());
            Ok(v)
        }
        Command::Extension { model, formula: f } => {
            let s = structure(&model.model)?;
            let ext = extension(&s, &formula(&f.formula)?)?;
            let names = state_names(&s, ext.states());
            emit(cli, json!({ "states": names }), || format!("{{{}}}", names.join(", ")));
            Ok(true)
        }
        Command::Valid { model, formula: f } => {
            let s = structure(&model.model)?;
            let v = valid_in_structure(&s, &formula(&f.formula)?)?;
            match v {
                Validity::Valid => emit(cli, json!({ "valid": true }), || "valid".into()),
                Validity::Falsified(at) => {
                    let name = &s.worlds().states()[at];
                    emit(cli, json!({ "valid": false, "falsified_at": name }), || {
                        format!("falsified at {name}")
                    })
                }
            }
            Ok(v.is_valid())
        }
        Command::Decide { sys, formula: f, budget } => {
            let sys: SystemId = sys.parse()?;
            let phi = formula(&f.formula)?;
            let r = decide_with(&phi, sys, &options(*budget)).map_err(decision_failure)?;
            let cm = r
                .countermodel
                .map(|(m, s)| (Structure::Knowledge(m), s));
            report_verdict(cli, r.verdict.is_valid(), sys.to_string(), r.steps, cm);
            Ok(r.verdict.is_valid())
        }
        Command::DecideCert { class, formula: f, budget } => {
            let class: CertaintyClass = class.parse()?;
            let phi = formula(&f.formula)?;
            let r = decide_certainty_with(&phi, class, &options(*budget)).map_err(decision_failure)?;
            report_verdict(cli, r.verdict.is_valid(), class.to_string(), r.steps, r.countermodel);
            Ok(r.verdict.is_valid())
        }
        Command::Bridge(f) => {
            let r = check_s5_kd45_bridge(&formula(&f.formula)?).map_err(decision_failure)?;
            emit(
                cli,
                json!({ "s5": r.s5.to_string(), "kd45_of_k": r.kd45_of_k.to_string(), "agree": r.agree }),
                || format!("S5 phi      {}\nKD45 K(phi) {}\nagree       {}", r.s5, r.kd45_of_k, r.agree),
            );
            Ok(r.agree)
        }
        Command::Translate { formula: f, to } => {
            let phi = formula(&f.formula)?;
            let target = match to.as_deref() {
                Some("k" | "K" | "LK") => Language::LK,
                Some("c" | "C" | "LC") => Language::LC,
                Some(other) => return Err(Failure::Usage(format!("unknown target `{other}`"))),
                None if phi.classify() == Language::LC => Language::LK,
                None => Language::LC,
            };
            let out = match target {
                Language::LK => translate_c_to_k(&phi),
                _ => translate_k_to_c(&phi),
            }
            .map_err(decision_failure)?;
            emit(cli, json!({ "formula": out.to_string() }), || out.to_string());
            Ok(true)
        }
        Command::Normalize { formula: f, trace } => {
            let phi = formula(&f.formula)?;
            let (out, steps) = normalize_with_trace(&phi)?;
            let steps_json: Vec<Value> = steps
                .iter()
                .map(|s| {
                    json!({
                        "rule": s.rule,
                        "position": s.position.to_string(),
                        "before": s.before.to_string(),
                        "after": s.after.to_string(),
                    })
                })
                .collect();
            emit(cli, json!({ "formula": out.to_string(), "trace": steps_json }), || {
                let mut text = String::new();
                if *trace {
                    for s in &steps {
                        text.push_str(&format!("{s}\n"));
                    }
                }
                text.push_str(&out.to_string());
                text
            });
            Ok(true)
        }
        Command::FrameProps { model, agent: a } => {
            let (rel, names) = relation_of(&model.model, &a.agent)?;
            let props = rel.properties();
            let systems: Vec<&str> = SystemId::ALL
                .iter()
                .filter(|s| props.satisfies(&s.frame_conditions()))
                .map(|s| s.name())
                .collect();
            emit(
                cli,
                json!({ "properties": properties_value(&props), "systems": systems, "pairs": pairs(&rel, &names) }),
                || format!("{}\nsystems    {}", properties_text(&props), systems.join(" ")),
            );
            Ok(true)
        }
        Command::Support { model, agent: a } => {
            let s = structure(&model.model)?;
            let id = agent(&s, &a.agent)?;
            let n = generalized(&s)?;
            let rel = n.support_relation(id).expect("resolved agent");
            let uniform = n.is_uniform(id);
            let names = s.worlds().states().to_vec();
            let edges = pairs(&rel, &names);
            emit(cli, json!({ "support": edges, "uniform": uniform }), || {
                let list: Vec<String> = edges.iter().map(|(a, b)| format!("({a}, {b})")).collect();
                format!("support  {}\nuniform  {uniform}", list.join(" "))
            });
            Ok(true)
        }
        Command::Fb { model, agent: a } => {
            let s = structure(&model.model)?;
            let id = agent(&s, &a.agent)?;
            let n = match &s {
                Structure::Simple(n) => n.clone(),
                Structure::Generalized(g) => g
                    .as_simple()
                    .ok_or_else(|| Failure::Usage("the structure is not simple".into()))?,
                Structure::Knowledge(_) => {
                    return Err(Failure::Usage("expected a simple probability structure".into()))
                }
            };
            let r = false_belief_states(&n, id)?;
            emit(cli, r.to_json(&n), || {
                let names = n.worlds().states();
                let mut text = format!(
                    "FB       {{{}}}\nmeasure  {}",
                    r.fb.iter().map(|&i| names[i].clone()).collect::<Vec<_>>().join(", "),
                    r.measure
                );
                for (&st, w) in &r.witnesses {
                    text.push_str(&format!("\n{}  ~phi & Cert(phi) with phi = {w}", names[st]));
                }
                text
            });
            Ok(true)
        }
        Command::Miller(m) => miller(cli, m),
        Command::ProveCheck { proof, confirm } => {
            let p = load_proof(&read(proof)?)?;
            if let Err(e) = check_proof(&p) {
                emit(cli, json!({ "ok": false, "line": e.line, "reason": e.kind.to_string() }), || {
                    e.to_string()
                });
                return Ok(false);
            }
            let mut confirmed = None;
            if *confirm {
                let c = p.conclusion().expect("checked proofs are non-empty");
                let k = match p.language {
                    ProofLanguage::LK => c.clone(),
                    ProofLanguage::LC => translate_c_to_k(c).map_err(decision_failure)?,
                };
                let r = decide_with(&k, p.system, &DecideOptions::default()).map_err(decision_failure)?;
                confirmed = Some(r.verdict.is_valid());
            }
            let lines = p.lines.len();
            emit(cli, json!({ "ok": true, "lines": lines, "conclusion_valid": confirmed }), || {
                let mut text = format!("ok ({lines} lines, {})", p.system);
                if let Some(v) = confirmed {
                    text.push_str(&format!("\nconclusion {}", if v { "valid" } else { "NOT valid" }));
                }
                text
            });
            Ok(confirmed.unwrap_or(true))
        }
        Command::Enumerate {
            states,
            props,
            sys,
            formula: f,
            count,
            random,
            shape,
            den,
        } => {
            let props: Vec<String> = props
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(String::from)
                .collect();
            if let Some(k) = random {
                let shape = match shape.as_str() {
                    "any" => Shape::Any,
                    "uniform" => Shape::Uniform,
                    "positive-simple" => Shape::PositiveSimple,
                    other => return Err(Failure::Usage(format!("unknown shape `{other}`"))),
                };
                if *states == 0 || *den == 0 {
                    return Err(Failure::Usage("--states and --den must be positive".into()));
                }
                for i in 0..*k {
                    let s = random_generalized_structure(*states, &props, *den, cli.seed.wrapping_add(i as u64), shape);
                    println!("{}", structure_value(&s));
                }
                return Ok(true);
            }
            let required = match sys {
                Some(s) => s.parse::<SystemId>()?.frame_conditions(),
                None => FrameProperties::ANY,
            };
            let all: Vec<_> = enumerate_knowledge_structures(*states, &props, &required, DEFAULT_ENUMERATION_LIMIT)
                .map_err(|e| match e {
                    structures::StructureError::TooLarge { .. } => Failure::Resource(e.to_string()),
                    other => Failure::Usage(other.to_string()),
                })?
                .collect();
            let Some(f) = f else {
                if *count {
                    emit(cli, json!({ "count": all.len() }), || all.len().to_string());
                } else {
                    for m in all {
                        println!("{}", structure_value(&Structure::Knowledge(m)));
                    }
                }
                return Ok(true);
            };
            let phi = formula(f)?;
            let falsified = falsifying(&all, &phi, cli.jobs)?;
            let first = falsified.first().map(|&(i, st)| {
                let s = Structure::Knowledge(all[i].clone());
                let name = s.worlds().states()[st].clone();
                (structure_value(&s), name)
            });
            emit(
                cli,
                json!({
                    "structures": all.len(),
                    "falsifying": falsified.len(),
                    "first": first.as_ref().map(|(m, s)| json!({ "state": s, "structure": m })),
                }),
                || {
                    let mut text = format!("structures  {}\nfalsifying  {}", all.len(), falsified.len());
                    if let Some((m, s)) = &first {
                        text.push_str(&format!(
                            "\nfirst countermodel at {s}:\n{}",
                            serde_json::to_string_pretty(m).expect("serializable")
                        ));
                    }
                    text
                },
            );
            Ok(falsified.is_empty())
        }
    }
}

/// Indices of structures falsifying `phi` with their first falsifying
/// state, in enumeration order.
fn falsifying(
    all: &[certlogic::structures::KnowledgeStructure],
    phi: &Formula,
    jobs: usize,
) -> Result<Vec<(usize, usize)>, Failure> {
    let check = |range: std::ops::Range<usize>| -> Result<Vec<(usize, usize)>, Failure> {
        let mut out = vec![];
        for i in range {
            if let Validity::Falsified(s) = valid_in_structure(&all[i], phi)? {
                out.push((i, s));
            }
        }
        Ok(out)
    };
    let jobs = jobs.clamp(1, all.len().max(1));
    let chunk = all.len().div_ceil(jobs).max(1);
    let parts: Vec<Result<Vec<(usize, usize)>, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let range = (j * chunk).min(all.len())..((j + 1) * chunk).min(all.len());
                scope.spawn(move || check(range))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = vec![];
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn relation_of(path: &Path, agent_name: &str) -> Result<(BinaryRelation, Vec<String>), Failure> {
    let text = read(path)?;
    if let Ok(s) = structures::load(&text) {
        let id = agent(&s, agent_name)?;
        let names = s.worlds().states().to_vec();
        let rel = match &s {
            Structure::Knowledge(m) => m.relation(id).expect("resolved agent").clone(),
            other => generalized(other)?.support_relation(id).expect("resolved agent"),
        };
        return Ok((rel, names));
    }
    let frame = structures::load_frame(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let id = frame_agent(&frame, agent_name)?;
    Ok((frame.support_relation(id).expect("resolved agent"), frame.states().to_vec()))
}

fn frame_agent(frame: &Frame, name: &str) -> Result<AgentId, Failure> {
    if let Some(i) = frame.agents().iter().position(|a| a == name) {
        return Ok(AgentId(i as u32 + 1));
    }
    match name.parse::<u32>() {
        Ok(i) if (1..=frame.agents().len() as u32).contains(&i) => Ok(AgentId(i)),
        _ => Err(Failure::Usage(format!("unknown agent `{name}`"))),
    }
}

fn report_verdict(cli: &Cli, valid: bool, system: String, steps: u64, cm: Option<(Structure, usize)>) {
    let verdict = if valid { "valid" } else { "invalid" };
    let cm = cm.map(|(s, st)| (s.worlds().states()[st].clone(), structure_value(&s)));
    emit(
        cli,
        json!({
            "verdict": verdict,
            "system": system,
            "steps": steps,
            "state": cm.as_ref().map(|c| c.0.clone()),
            "countermodel": cm.as_ref().map(|c| c.1.clone()),
        }),
        || match &cm {
            None => verdict.to_string(),
            Some((state, m)) => format!(
                "{verdict}\ncountermodel at {state}:\n{}",
                serde_json::to_string_pretty(m).expect("serializable")
            ),
        },
    );
}

fn miller(cli: &Cli, m: &MillerCommand) -> Outcome {
    match m {
        MillerCommand::Instance { formula: f, interval, agents, given } => {
            let phi = formula(&f.formula)?;
            let (lo, hi) = rational_pair(interval)?;
            let i = Interval::new(lo, hi)?;
            let (outer, inner) = agent_pair(agents)?;
            let out = if given.is_empty() {
                miller_instance(&phi, &i, outer, inner).rendered
            } else {
                let psi = given.iter().map(|g| formula(g)).collect::<Result<Vec<_>, _>>()?;
                stronger_miller_instance(&phi, &psi, &i, outer, inner)?
            };
            emit(cli, json!({ "instance": out.to_string() }), || out.to_string());
            Ok(true)
        }
        MillerCommand::CheckFrame { frame, props, battery, agent: a } => {
            let text = read(frame)?;
            let f = structures::load_frame(&text).map_err(|e| Failure::Usage(format!("{}: {e}", frame.display())))?;
            let id = frame_agent(&f, &a.agent)?;
            let names: Vec<String> = if *props <= DEFAULT_PROPS.len() {
                DEFAULT_PROPS[..*props].iter().map(|p| p.to_string()).collect()
            } else {
                (1..=*props).map(|i| format!("p{i}")).collect()
            };
            let b = match battery {
                Some(path) => load_battery(&read(path)?)?,
                None => default_battery(),
            };
            if b.is_empty() {
                return Err(Failure::Usage("the battery is empty".into()));
            }
            let undeclared: Vec<String> = b
                .formulas()
                .iter()
                .flat_map(|f| f.props())
                .filter(|p| !names.contains(p))
                .collect();
            if let Some(p) = undeclared.first() {
                return Err(Failure::Usage(format!(
                    "battery uses `{p}`, outside the {} enumerated proposition(s)",
                    names.len()
                )));
            }
            let r = check_miller_theorem_with(&f, id, &names, &b, cli.jobs).map_err(|e| match e {
                certlogic::miller::MillerError::TooLarge { .. } => Failure::Resource(e.to_string()),
                other => Failure::Usage(other.to_string()),
            })?;
            let cx = r.counterexample.as_ref().map(|c| {
                let s = Structure::Generalized(c.structure.clone());
                json!({
                    "state": s.worlds().states()[c.state],
                    "formula": c.formula.to_string(),
                    "structure": structure_value(&s),
                })
            });
            emit(
                cli,
                json!({
                    "uniform": r.uniform,
                    "all_valid": r.all_valid,
                    "battery": b.len(),
                    "counterexample": cx,
                }),
                || {
                    let mut text = format!(
                        "uniform    {}\nbattery    {} formulas, {}",
                        r.uniform,
                        b.len(),
                        if r.all_valid { "all valid" } else { "some falsified" }
                    );
                    if let Some(c) = &cx {
                        text.push_str(&format!(
                            "\n{} at {}: {}\n{}",
                            if r.all_valid { "countermodel from frame search" } else { "counterexample" },
                            c["state"].as_str().unwrap_or_default(),
                            c["formula"].as_str().unwrap_or_default(),
                            serde_json::to_string_pretty(&c["structure"]).expect("serializable")
                        ));
                    }
                    text
                },
            );
            Ok(r.counterexample.is_none())
        }
        MillerCommand::Sgood { model, expert, agent: a } => {
            let s = structure(&model.model)?;
            let (e, i) = (agent(&s, expert)?, agent(&s, a)?);
            let good = s_good(&generalized(&s)?, e, i)?;
            let names = state_names(&s, good);
            emit(cli, json!({ "s_good": names }), || format!("{{{}}}", names.join(", ")));
            Ok(true)
        }
        MillerCommand::Ecc { model, expert, agent: a } => {
            let s = structure(&model.model)?;
            let (e, i) = (agent(&s, expert)?, agent(&s, a)?);
            let holds = equivalence_class_constraint(&generalized(&s)?, e, i)?;
            emit(cli, json!({ "holds": holds }), || holds.to_string());
            Ok(holds)
        }
    }
}
