use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{AgentId, Formula, WeightTerm};

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub(super) fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, IMPLIES);
    out
}

fn operator(out: &mut String, name: &str, agent: AgentId) {
    out.push_str(name);
    if agent != AgentId::DEFAULT {
        let _ = write!(out, "_{}", agent.0);
    }
}

fn write_formula(out: &mut String, f: &Formula, ctx: u8) {
    if let Some((agent, arg)) = f.as_cert() {
        operator(out, "Cert", agent);
        out.push('(');
        write_formula(out, arg, IMPLIES);
        out.push(')');
        return;
    }
    let binary = |out: &mut String, prec: u8, sym: &str, a: &Formula, b: &Formula, la: u8, lb: u8| {
        let wrap = ctx > prec;
        if wrap {
            out.push('(');
        }
        write_formula(out, a, la);
        out.push_str(sym);
        write_formula(out, b, lb);
        if wrap {
            out.push(')');
        }
    };
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Not(a) => {
            out.push('~');
            write_formula(out, a, UNARY);
        }
        Formula::And(a, b) => binary(out, AND, " & ", a, b, AND, UNARY),
        Formula::Or(a, b) => binary(out, OR, " | ", a, b, OR, AND),
        Formula::Implies(a, b) => binary(out, IMPLIES, " -> ", a, b, OR, IMPLIES),
        Formula::Know(i, a) => {
            operator(out, "K", *i);
            out.push('(');
            write_formula(out, a, IMPLIES);
            out.push(')');
        }
        Formula::Weight(w) => {
            for (k, term) in w.terms.iter().enumerate() {
                write_term(out, term, k == 0);
            }
            let _ = write!(out, " {} {}", w.rel.symbol(), w.bound);
        }
        Formula::WeightIn(iv) => {
            operator(out, "w", iv.agent);
            out.push('(');
            write_formula(out, &iv.arg, IMPLIES);
            let _ = write!(out, ") in [{}, {}]", iv.lo, iv.hi);
        }
    }
}

fn write_term(out: &mut String, term: &WeightTerm, first: bool) {
    let magnitude: BigInt = term.coeff.abs();
    let negative = term.coeff.is_negative();
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if !magnitude.is_one() {
        let _ = write!(out, "{magnitude}");
    }
    operator(out, "w", term.agent);
    out.push('(');
    write_formula(out, &term.arg, IMPLIES);
    out.push(')');
}
