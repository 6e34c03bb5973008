//! Proof files.
//!
//! ```json
//! { "system": "KD45", "language": "LK",
//!   "lines": [ {"formula": "K(p) -> K(K(p))", "just": {"axiom": "4", "subst": {"phi": "p"}}},
//!              {"formula": "...", "just": "taut"},
//!              {"formula": "...", "just": {"mp": [1, 2]}},
//!              {"formula": "...", "just": {"nec": 1}} ] }
//! ```

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Justification, Proof, ProofLanguage, ProofLine};
use crate::decision::{Schema, SystemId};
use crate::formula::{parse, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofFileError {
    #[error("malformed proof file: {0}")]
    Schema(String),
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
}

fn schema_err(msg: impl Into<String>) -> ProofFileError {
    ProofFileError::Schema(msg.into())
}

fn index(v: &Value) -> Result<usize, ProofFileError> {
    v.as_u64()
        .map(|i| i as usize)
        .ok_or_else(|| schema_err("line references are positive integers"))
}

fn justification(v: &Value, line: usize) -> Result<Justification, ProofFileError> {
    if v.as_str() == Some("taut") {
        return Ok(Justification::Taut);
    }
    let o = v
        .as_object()
        .ok_or_else(|| schema_err(format!("line {line}: unknown justification {v}")))?;
    if let Some(name) = o.get("axiom") {
        let schema: Schema = name
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| schema_err(format!("line {line}: unknown axiom {name}")))?;
        let mut subst = BTreeMap::new();
        if let Some(s) = o.get("subst") {
            let s = s
                .as_object()
                .ok_or_else(|| schema_err(format!("line {line}: `subst` must be an object")))?;
            for (var, text) in s {
                let text = text
                    .as_str()
                    .ok_or_else(|| schema_err(format!("line {line}: substitutions are strings")))?;
                let f = parse(text).map_err(|source| ProofFileError::Formula { line, source })?;
                subst.insert(var.clone(), f);
            }
        }
        return Ok(Justification::Axiom { schema, subst });
    }
    if let Some(mp) = o.get("mp") {
        return match mp.as_array().map(Vec::as_slice) {
            Some([i, j]) => Ok(Justification::ModusPonens(index(i)?, index(j)?)),
            _ => Err(schema_err(format!("line {line}: `mp` takes two line numbers"))),
        };
    }
    if let Some(i) = o.get("nec") {
        return Ok(Justification::Necessitation(index(i)?));
    }
    Err(schema_err(format!("line {line}: unknown justification {v}")))
}

pub fn load_proof(text: &str) -> Result<Proof, ProofFileError> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema_err(e.to_string()))?;
    let system: SystemId = root
        .get("system")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err("missing `system`"))?
        .parse()
        .map_err(|e: crate::decision::UnknownSystem| schema_err(e.to_string()))?;
    let language = match root.get("language").and_then(Value::as_str).unwrap_or("LK") {
        "LK" => ProofLanguage::LK,
        "LC" => ProofLanguage::LC,
        other => return Err(schema_err(format!("unknown language `{other}`"))),
    };
    let lines = root
        .get("lines")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("missing `lines`"))?
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let line = k + 1;
            let text = l
                .get("formula")
                .and_then(Value::as_str)
                .ok_or_else(|| schema_err(format!("line {line}: missing `formula`")))?;
            let formula = parse(text).map_err(|source| ProofFileError::Formula { line, source })?;
            let just = justification(
                l.get("just")
                    .ok_or_else(|| schema_err(format!("line {line}: missing `just`")))?,
                line,
            )?;
            Ok(ProofLine { formula, just })
        })
        .collect::<Result<Vec<_>, ProofFileError>>()?;
    Ok(Proof {
        system,
        language,
        lines,
    })
}

pub fn save_proof(p: &Proof) -> String {
    let lines: Vec<Value> = p
        .lines
        .iter()
        .map(|l| {
            let just = match &l.just {
                Justification::Taut => json!("taut"),
                Justification::Axiom { schema, subst } => {
                    let mut o = Map::new();
                    o.insert("axiom".into(), json!(schema.name()));
                    if !subst.is_empty() {
                        let s: Map<String, Value> = subst
                            .iter()
                            .map(|(k, v)| (k.clone(), json!(v.to_string())))
                            .collect();
                        o.insert("subst".into(), Value::Object(s));
                    }
                    Value::Object(o)
                }
                Justification::ModusPonens(i, j) => json!({ "mp": [i, j] }),
                Justification::Necessitation(i) => json!({ "nec": i }),
            };
            json!({ "formula": l.formula.to_string(), "just": just })
        })
        .collect();
    let language = match p.language {
        ProofLanguage::LK => "LK",
        ProofLanguage::LC => "LC",
    };
    serde_json::to_string_pretty(&json!({
        "system": p.system.name(),
        "language": language,
        "lines": lines,
    }))
    .expect("serialisable")
}

/// The bundled proofs, by name.
pub fn corpus() -> Vec<(&'static str, &'static str)> {
    vec![
    ("k_and_distribution", include_str!("../../proofs/k_and_distribution.json")),
    ("k_axiom_instance", include_str!("../../proofs/k_axiom_instance.json")),
    ("k_necessitation", include_str!("../../proofs/k_necessitation.json")),
    ("k_two_agents", include_str!("../../proofs/k_two_agents.json")),
    ("kd45_k_not_k", include_str!("../../proofs/kd45_k_not_k.json")),
    ("kd45c_cert_not_cert", include_str!("../../proofs/kd45c_cert_not_cert.json")),
    ("kd45c_introspection", include_str!("../../proofs/kd45c_introspection.json")),
    ("kd_no_contradictory_beliefs", include_str!("../../proofs/kd_no_contradictory_beliefs.json")),
    ("kdc_no_contradictory_certainty", include_str!("../../proofs/kdc_no_contradictory_certainty.json")),
    ("s4_iterated_introspection", include_str!("../../proofs/s4_iterated_introspection.json")),
    ("s5_t_instances", include_str!("../../proofs/s5_t_instances.json")),
    ("s5_truth_is_believed_possible", include_str!("../../proofs/s5_truth_is_believed_possible.json")),
    ("t_known_conjunct", include_str!("../../proofs/t_known_conjunct.json")),
    ]
}
