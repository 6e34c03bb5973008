//! Instance batteries and their JSON form: a list whose entries are either
//! `{"phi", "interval": [a, b], "agents": [outer, inner]}` or
//! `{"formula"}` for extra formulas checked alongside the instances.

use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use super::{miller_instance, Interval, MillerInstance};
use crate::formula::{parse, AgentId, Formula, ParseError};
use crate::Rational;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Battery {
    pub instances: Vec<MillerInstance>,
    pub extra: Vec<Formula>,
}

impl Battery {
    pub fn len(&self) -> usize {
        self.instances.len() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rendered instances followed by the extra formulas.
    pub fn formulas(&self) -> Vec<Formula> {
        self.instances
            .iter()
            .map(|i| i.rendered.clone())
            .chain(self.extra.iter().cloned())
            .collect()
    }

    pub fn agents(&self) -> Vec<AgentId> {
        let mut out: Vec<AgentId> = self
            .formulas()
            .iter()
            .flat_map(|f| f.agents())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Error)]
pub enum BatteryError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {entry}: {msg}")]
    Entry { entry: usize, msg: String },
    #[error("entry {entry}: {source}")]
    Formula { entry: usize, source: ParseError },
}

fn rational(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => s.parse().ok(),
        Value::Number(n) => n.as_i64().map(Rational::from),
        _ => None,
    }
}

pub fn load_battery(text: &str) -> Result<Battery, BatteryError> {
    let v: Value = serde_json::from_str(text)?;
    let entries = v.as_array().ok_or(BatteryError::Entry {
        entry: 0,
        msg: "expected a list".into(),
    })?;
    let mut out = Battery::default();
    for (k, e) in entries.iter().enumerate() {
        let entry = k + 1;
        let bad = |msg: &str| BatteryError::Entry {
            entry,
            msg: msg.to_string(),
        };
        let formula = |key: &str| -> Result<Formula, BatteryError> {
            let s = e[key].as_str().ok_or_else(|| bad(&format!("`{key}` must be a string")))?;
            parse(s).map_err(|source| BatteryError::Formula { entry, source })
        };
        if e.get("formula").is_some() {
            out.extra.push(formula("formula")?);
            continue;
        }
        let phi = formula("phi")?;
        let bounds = e["interval"]
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| bad("`interval` must be a pair"))?;
        let (lo, hi) = match (rational(&bounds[0]), rational(&bounds[1])) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(bad("interval endpoints must be rationals")),
        };
        let interval = Interval::new(lo, hi).map_err(|err| bad(&err.to_string()))?;
        let agents = match e.get("agents") {
            None => (AgentId::DEFAULT, AgentId::DEFAULT),
            Some(a) => match a.as_array().map(|a| a.iter().map(Value::as_u64).collect::<Vec<_>>()) {
                Some(ids) if ids.len() == 2 && ids.iter().all(|i| i.is_some_and(|i| i >= 1)) => (
                    AgentId(ids[0].expect("checked") as u32),
                    AgentId(ids[1].expect("checked") as u32),
                ),
                _ => return Err(bad("`agents` must be two positive integers")),
            },
        };
        out.instances.push(miller_instance(&phi, &interval, agents.0, agents.1));
    }
    Ok(out)
}

pub fn save_battery(b: &Battery) -> String {
    let mut entries: Vec<Value> = b
        .instances
        .iter()
        .map(|i| {
            json!({
                "phi": i.phi.to_string(),
                "interval": [i.interval.lo().to_string(), i.interval.hi().to_string()],
                "agents": [i.agents.0 .0, i.agents.1 .0],
            })
        })
        .collect();
    entries.extend(b.extra.iter().map(|f| json!({ "formula": f.to_string() })));
    serde_json::to_string_pretty(&Value::Array(entries)).expect("serializable")
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Fifty single-agent instances over the proposition `p`, ten intervals for
/// each of five formulas (two of them nested), plus the formulas
/// `w(p) > a -> w(w(p) > a) = 1`. Those hold in every uniform frame but do
/// not follow from the principle and the probability axioms.
pub fn default_battery() -> Battery {
    let phis = [
        "p",
        "~p",
        "w(p) >= 1/2",
        "p & w(p) > 0",
        "p | w(p) <= 1/4",
    ];
    let intervals = [
        (r(0, 1), r(1, 1)),
        (r(0, 1), r(0, 1)),
        (r(1, 1), r(1, 1)),
        (r(1, 2), r(1, 2)),
        (r(1, 3), r(1, 3)),
        (r(2, 3), r(2, 3)),
        (r(1, 4), r(1, 4)),
        (r(1, 4), r(3, 4)),
        (r(0, 1), r(1, 2)),
        (r(1, 2), r(1, 1)),
    ];
    let one = AgentId::DEFAULT;
    let mut instances = vec![];
    for phi in phis {
        let phi = parse(phi).expect("well-formed");
        for (lo, hi) in &intervals {
            let i = Interval::new(lo.clone(), hi.clone()).expect("inside [0, 1]");
            instances.push(miller_instance(&phi, &i, one, one));
        }
    }
    let extra = ["0", "1/3", "1/2"]
        .iter()
        .map(|a| parse(&format!("w(p) > {a} -> w(w(p) > {a}) = 1")).expect("well-formed"))
        .collect();
    Battery { instances, extra }
}

/// `count` single-agent instances over `props` with random propositional
/// or depth-one arguments and endpoints of denominator at most `max_den`.
pub fn random_battery(rng: &mut impl Rng, props: &[String], count: usize, max_den: i64) -> Battery {
    let one = AgentId::DEFAULT;
    let mut instances = vec![];
    for _ in 0..count {
        let p = Formula::prop(props[rng.gen_range(0..props.len())].clone());
        let q = Formula::prop(props[rng.gen_range(0..props.len())].clone());
        let phi = match rng.gen_range(0..5) {
            0 => p,
            1 => Formula::not(p),
            2 => Formula::or(p, q),
            3 => Formula::and(p, Formula::not(q)),
            _ => {
                let d = rng.gen_range(1..=max_den);
                Formula::weight_in(one, p, Rational::new(rng.gen_range(0..=d), d), Rational::one())
            }
        };
        let d = rng.gen_range(1..=max_den);
        let (mut a, mut b) = (rng.gen_range(0..=d), rng.gen_range(0..=d));
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let i = Interval::new(Rational::new(a, d), Rational::new(b, d)).expect("inside [0, 1]");
        instances.push(miller_instance(&phi, &i, one, one));
    }
    Battery {
        instances,
        extra: vec![],
    }
}
