//! The JSON structure file.
//!
//! ```json
//! { "type": "knowledge" | "simple" | "generalized",
//!   "agents": ["a"], "props": ["p"],
//!   "states": [{"id": "s", "assign": {"p": true}}],
//!   "K": {"a": [["s", "s"]]}                 // knowledge
//!   "pr": {"a": {"s": "1/2"}}                // simple
//!   "PR": {"a": {"s": {"s": "1"}}} }         // generalized
//! ```
//!
//! Rationals are strings `"num/den"` or `"int"` (plain JSON integers are
//! accepted too). States left out of a distribution get probability 0 and
//! propositions left out of an assignment are false. Frames use type
//! `"frame"`, omit `props` and `assign`, and carry a `PR` table.

use serde_json::{json, Map, Value};

use super::{
    BinaryRelation, Distribution, Frame, GeneralizedProbabilityStructure, KnowledgeStructure,
    SimpleProbabilityStructure, Structure, StructureError, Worlds,
};
use crate::rational::Rational;

fn schema(msg: impl Into<String>) -> StructureError {
    StructureError::Schema(msg.into())
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, StructureError> {
    v.as_object()
        .ok_or_else(|| schema(format!("{what} must be an object")))
}

fn string_list(v: Option<&Value>, what: &str) -> Result<Vec<String>, StructureError> {
    let Some(v) = v else {
        return Ok(vec![]);
    };
    v.as_array()
        .ok_or_else(|| schema(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(format!("`{what}` entries must be strings")))
        })
        .collect()
}

fn rational(v: &Value) -> Result<Rational, StructureError> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|_| StructureError::MalformedRational(s.clone())),
        Value::Number(n) if n.is_i64() => Ok(Rational::from(n.as_i64().expect("i64"))),
        other => Err(StructureError::MalformedRational(other.to_string())),
    }
}

struct Header {
    agents: Vec<String>,
    states: Vec<String>,
}

impl Header {
    fn state(&self, name: &str) -> Result<usize, StructureError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| StructureError::UndeclaredState(name.to_string()))
    }

    /// Per-agent entries of `table`, in declared agent order.
    fn per_agent<'a>(
        &self,
        table: &'a Value,
        what: &str,
    ) -> Result<Vec<&'a Value>, StructureError> {
        let map = object(table, what)?;
        if let Some(unknown) = map.keys().find(|k| !self.agents.contains(k)) {
            return Err(StructureError::UndeclaredAgent(unknown.clone()));
        }
        self.agents
            .iter()
            .map(|a| {
                map.get(a)
                    .ok_or_else(|| schema(format!("`{what}` has no entry for agent `{a}`")))
            })
            .collect()
    }

    fn distribution(&self, v: &Value, context: &str) -> Result<Distribution, StructureError> {
        let map = object(v, "a distribution")?;
        let mut values = vec![Rational::zero(); self.states.len()];
        for (state, p) in map {
            let s = self.state(state)?;
            let p = rational(p)?;
            if p.is_negative() {
                return Err(StructureError::NegativeProbability {
                    state: state.clone(),
                    value: p,
                });
            }
            values[s] = p;
        }
        Distribution::new(values).map_err(|e| match e {
            StructureError::NotNormalized { sum, .. } => StructureError::NotNormalized {
                context: context.to_string(),
                sum,
            },
            other => other,
        })
    }

    fn kernel(&self, v: &Value, agent: &str) -> Result<Vec<Distribution>, StructureError> {
        let map = object(v, "a PR entry")?;
        if let Some(unknown) = map.keys().find(|k| !self.states.contains(k)) {
            return Err(StructureError::UndeclaredState(unknown.clone()));
        }
        self.states
            .iter()
            .map(|s| {
                let d = map
                    .get(s)
                    .ok_or_else(|| schema(format!("PR of agent `{agent}` misses state `{s}`")))?;
                self.distribution(d, &format!("PR[{agent}][{s}]"))
            })
            .collect()
    }
}

fn parse_value(text: &str) -> Result<Value, StructureError> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

fn state_names(v: Option<&Value>) -> Result<Vec<String>, StructureError> {
    let states = v
        .and_then(Value::as_array)
        .ok_or_else(|| schema("`states` must be an array"))?;
    states
        .iter()
        .map(|s| match s {
            Value::String(id) => Ok(id.clone()),
            Value::Object(o) => o
                .get("id")
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| schema("every state needs a string `id`")),
            _ => Err(schema("states must be objects with an `id`")),
        })
        .collect()
}

/// Reads and validates a structure file.
pub fn load(text: &str) -> Result<Structure, StructureError> {
    let root = parse_value(text)?;
    let top = object(&root, "a structure file")?;
    let kind = top
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("missing `type`"))?;
    let agents = string_list(top.get("agents"), "agents")?;
    if agents.is_empty() {
        return Err(schema("`agents` must name at least one agent"));
    }
    let props = string_list(top.get("props"), "props")?;
    let states = state_names(top.get("states"))?;
    if states.is_empty() {
        return Err(StructureError::NoStates);
    }
    let mut assign = vec![vec![false; props.len()]; states.len()];
    for (row, entry) in assign.iter_mut().zip(top["states"].as_array().expect("checked")) {
        let Some(a) = entry.get("assign") else {
            continue;
        };
        for (prop, value) in object(a, "`assign`")? {
            let p = props
                .iter()
                .position(|x| x == prop)
                .ok_or_else(|| StructureError::UndeclaredProp(prop.clone()))?;
            row[p] = value
                .as_bool()
                .ok_or_else(|| schema(format!("assignment of `{prop}` must be a boolean")))?;
        }
    }
    let worlds = Worlds::new(states.clone(), props, assign)?;
    let header = Header { agents, states };

    let present: Vec<&str> = ["K", "pr", "PR"]
        .into_iter()
        .filter(|k| top.contains_key(*k))
        .collect();
    let expected = match kind {
        "knowledge" => "K",
        "simple" => "pr",
        "generalized" => "PR",
        other => return Err(schema(format!("unknown structure type `{other}`"))),
    };
    if present != [expected] {
        return Err(schema(format!(
            "a {kind} structure carries exactly one `{expected}` table"
        )));
    }
    let table = &top[expected];
    match kind {
        "knowledge" => {
            let relations = header
                .per_agent(table, "K")?
                .into_iter()
                .map(|pairs| {
                    let pairs = pairs
                        .as_array()
                        .ok_or_else(|| schema("K entries must be arrays of pairs"))?;
                    let mut rel = BinaryRelation::empty(header.states.len());
                    for pair in pairs {
                        let (s, t) = match pair.as_array().map(Vec::as_slice) {
                            Some([Value::String(s), Value::String(t)]) => (s, t),
                            _ => return Err(schema("K pairs must be [state, state]")),
                        };
                        rel.insert(header.state(s)?, header.state(t)?);
                    }
                    Ok(rel)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Structure::Knowledge(KnowledgeStructure::new(
                worlds,
                header.agents,
                relations,
            )?))
        }
        "simple" => {
            let pr = header
                .per_agent(table, "pr")?
                .into_iter()
                .zip(&header.agents)
                .map(|(d, a)| header.distribution(d, &format!("pr[{a}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Structure::Simple(SimpleProbabilityStructure::new(
                worlds,
                header.agents,
                pr,
            )?))
        }
        _ => {
            let pr = header
                .per_agent(table, "PR")?
                .into_iter()
                .zip(&header.agents)
                .map(|(k, a)| header.kernel(k, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Structure::Generalized(GeneralizedProbabilityStructure::new(
                worlds,
                header.agents,
                pr,
            )?))
        }
    }
}

/// Reads a frame file; a generalized structure file is accepted too and its
/// assignment is dropped.
pub fn load_frame(text: &str) -> Result<Frame, StructureError> {
    let root = parse_value(text)?;
    let top = object(&root, "a frame file")?;
    match top.get("type").and_then(Value::as_str) {
        Some("frame") => {}
        Some("generalized") => {
            return match load(text)? {
                Structure::Generalized(g) => Ok(g.frame()),
                _ => unreachable!("type checked above"),
            }
        }
        _ => return Err(schema("a frame file has type `frame` or `generalized`")),
    }
    let agents = string_list(top.get("agents"), "agents")?;
    let states = state_names(top.get("states"))?;
    if states.is_empty() {
        return Err(StructureError::NoStates);
    }
    let header = Header { agents, states };
    let table = top.get("PR").ok_or_else(|| schema("a frame carries a `PR` table"))?;
    let pr = header
        .per_agent(table, "PR")?
        .into_iter()
        .zip(&header.agents)
        .map(|(k, a)| header.kernel(k, a))
        .collect::<Result<Vec<_>, _>>()?;
    Frame::new(header.states, header.agents, pr)
}

fn distribution_value(states: &[String], d: &Distribution) -> Value {
    let mut m = Map::new();
    for (s, v) in states.iter().zip(d.values()) {
        if !v.is_zero() {
            m.insert(s.clone(), Value::String(v.to_string()));
        }
    }
    Value::Object(m)
}

fn kernel_value(states: &[String], kernel: &[Distribution]) -> Value {
    let mut m = Map::new();
    for (s, d) in states.iter().zip(kernel) {
        m.insert(s.clone(), distribution_value(states, d));
    }
    Value::Object(m)
}

/// Serialises a structure; `load(&save(x))` returns `x`.
pub fn save(structure: &Structure) -> String {
    let worlds = structure.worlds();
    let states: Vec<Value> = (0..worlds.len())
        .map(|s| {
            let mut assign = Map::new();
            for (p, name) in worlds.props().iter().enumerate() {
                assign.insert(name.clone(), Value::Bool(worlds.holds(s, p)));
            }
            json!({ "id": worlds.states()[s], "assign": assign })
        })
        .collect();
    let mut top = Map::new();
    top.insert("type".into(), json!(structure.kind()));
    top.insert("agents".into(), json!(structure.agents()));
    top.insert("props".into(), json!(worlds.props()));
    top.insert("states".into(), Value::Array(states));
    let names = worlds.states();
    let agents = structure.agents();
    let mut table = Map::new();
    let key = match structure {
        Structure::Knowledge(m) => {
            for (a, rel) in agents.iter().zip(m.relations()) {
                let pairs: Vec<Value> = rel
                    .pairs()
                    .map(|(s, t)| json!([names[s], names[t]]))
                    .collect();
                table.insert(a.clone(), Value::Array(pairs));
            }
            "K"
        }
        Structure::Simple(n) => {
            for (k, a) in agents.iter().enumerate() {
                let d = n.distribution(crate::AgentId(k as u32 + 1)).expect("agent");
                table.insert(a.clone(), distribution_value(names, d));
            }
            "pr"
        }
        Structure::Generalized(n) => {
            for (k, a) in agents.iter().enumerate() {
                let kernel = n.kernel(crate::AgentId(k as u32 + 1)).expect("agent");
                table.insert(a.clone(), kernel_value(names, kernel));
            }
            "PR"
        }
    };
    top.insert(key.into(), Value::Object(table));
    serde_json::to_string_pretty(&Value::Object(top)).expect("serialisable")
}

pub fn save_frame(frame: &Frame) -> String {
    let mut table = Map::new();
    for (k, a) in frame.agents().iter().enumerate() {
        let kernel = frame.kernel(crate::AgentId(k as u32 + 1)).expect("agent");
        table.insert(a.clone(), kernel_value(frame.states(), kernel));
    }
    let states: Vec<Value> = frame.states().iter().map(|s| json!({ "id": s })).collect();
    serde_json::to_string_pretty(&json!({
        "type": "frame",
        "agents": frame.agents(),
        "states": states,
        "PR": table,
    }))
    .expect("serialisable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AgentId;
    use crate::structures::{random_generalized_structure, Shape};

    const COIN: &str = r#"{
        "type": "generalized",
        "agents": ["a"],
        "props": ["heads"],
        "states": [
            {"id": "fair-h", "assign": {"heads": true}},
            {"id": "fair-t", "assign": {"heads": false}},
            {"id": "biased-h", "assign": {"heads": true}},
            {"id": "biased-t"}
        ],
        "PR": {"a": {
            "fair-h": {"fair-h": "1/2", "fair-t": "1/2"},
            "fair-t": {"fair-h": "1/2", "fair-t": "1/2"},
            "biased-h": {"biased-h": "1/3", "biased-t": "2/3"},
            "biased-t": {"biased-h": "1/3", "biased-t": "2/3"}
        }}
    }"#;

    #[test]
    fn coin_loads_as_four_state_generalized() {
        let Structure::Generalized(n) = load(COIN).unwrap() else {
            panic!("expected a generalized structure");
        };
        assert_eq!(n.worlds().len(), 4);
        assert!(!n.worlds().holds(3, 0));
        assert_eq!(
            n.distribution(AgentId(1), 2).unwrap().get(3),
            &Rational::new(2, 3)
        );
        let rel = n.support_relation(AgentId(1)).unwrap();
        assert_eq!(
            rel.pairs().collect::<Vec<_>>(),
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]
        );
    }

    #[test]
    fn one_state_structure() {
        let text = r#"{"type":"simple","agents":["a"],"props":[],"states":[{"id":"s"}],"pr":{"a":{"s":"1"}}}"#;
        assert!(matches!(load(text).unwrap(), Structure::Simple(_)));
        let text = r#"{"type":"simple","agents":["a"],"props":[],"states":[{"id":"s"}],"pr":{"a":{"s":1}}}"#;
        assert!(load(text).is_ok());
    }

    #[test]
    fn validation_errors() {
        let base = |pr: &str| {
            format!(
                r#"{{"type":"simple","agents":["a"],"props":["p"],"states":[{{"id":"s"}},{{"id":"t","assign":{{"p":true}}}}],"pr":{pr}}}"#
            )
        };
        assert!(matches!(
            load(&base(r#"{"a":{"s":"1/3","t":"1/3"}}"#)),
            Err(StructureError::NotNormalized { .. })
        ));
        assert!(matches!(
            load(&base(r#"{"a":{"s":"x","t":"1"}}"#)),
            Err(StructureError::MalformedRational(_))
        ));
        assert!(matches!(
            load(&base(r#"{"a":{"u":"1"}}"#)),
            Err(StructureError::UndeclaredState(_))
        ));
        assert!(matches!(
            load(&base(r#"{"b":{"s":"1"}}"#)),
            Err(StructureError::UndeclaredAgent(_))
        ));
        assert!(matches!(
            load(&base(r#"{"a":{"s":"3/2","t":"-1/2"}}"#)),
            Err(StructureError::NegativeProbability { .. })
        ));
        let bad_prop = r#"{"type":"knowledge","agents":["a"],"props":[],"states":[{"id":"s","assign":{"q":true}}],"K":{"a":[]}}"#;
        assert!(matches!(load(bad_prop), Err(StructureError::UndeclaredProp(_))));
        let empty = r#"{"type":"knowledge","agents":["a"],"props":[],"states":[],"K":{"a":[]}}"#;
        assert!(matches!(load(empty), Err(StructureError::NoStates)));
        let two_tables = r#"{"type":"knowledge","agents":["a"],"props":[],"states":[{"id":"s"}],"K":{"a":[]},"pr":{"a":{"s":"1"}}}"#;
        assert!(matches!(load(two_tables), Err(StructureError::Schema(_))));
    }

    #[test]
    fn save_load_identity() {
        let s = load(COIN).unwrap();
        assert_eq!(load(&save(&s)).unwrap(), s);
        for seed in 0..50 {
            for shape in [Shape::Any, Shape::Uniform, Shape::PositiveSimple] {
                let s = random_generalized_structure(3, &["p".into(), "q".into()], 4, seed, shape);
                assert_eq!(load(&save(&s)).unwrap(), s);
            }
            if let Structure::Generalized(g) =
                random_generalized_structure(2, &[], 3, seed, Shape::Any)
            {
                let m = Structure::Knowledge(g.to_knowledge_structure());
                assert_eq!(load(&save(&m)).unwrap(), m);
                let f = g.frame();
                assert_eq!(load_frame(&save_frame(&f)).unwrap(), f);
            }
        }
    }

    #[test]
    fn frame_from_generalized_file() {
        let f = load_frame(COIN).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.is_uniform(AgentId(1)));
    }
}
