use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{AgentId, Formula, Relation, WeightAtom, WeightInterval, WeightTerm};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),
    #[error("coefficients must be integers")]
    NonIntegerCoefficient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Rel(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Rel(r) => format!("`{r}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", tok_text(other)),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Tilde => "~",
        Tok::Amp => "&",
        Tok::Bar => "|",
        Tok::Arrow => "->",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        _ => "?",
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let mut len = 1;
        match c {
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '[' => push(Tok::LBracket),
            ']' => push(Tok::RBracket),
            ',' => push(Tok::Comma),
            '~' => push(Tok::Tilde),
            '&' => push(Tok::Amp),
            '|' => push(Tok::Bar),
            '+' => push(Tok::Plus),
            '*' => push(Tok::Star),
            '/' => push(Tok::Slash),
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Arrow);
                len = 2;
            }
            '-' => push(Tok::Minus),
            '<' | '>' | '=' | '!' => {
                let mut j = i;
                while j < chars.len() && matches!(chars[j], '<' | '>' | '=' | '!') {
                    j += 1;
                }
                push(Tok::Rel(chars[i..j].iter().collect()));
                len = j - i;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                push(Tok::Int(digits.parse().expect("digits")));
                len = j - i;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                push(Tok::Ident(chars[i..j].iter().collect()));
                len = j - i;
            }
            other => {
                return Err(ParseError {
                    line,
                    column: col,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                })
            }
        }
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Operator {
    Know,
    Cert,
    Weight,
}

/// Splits `K`, `K_3`, `Cert_2`, `w_1`, ... into operator and agent.
fn operator_keyword(ident: &str) -> Option<(Operator, AgentId)> {
    let (head, idx) = match ident.split_once('_') {
        None => (ident, None),
        Some((h, rest)) => (h, Some(rest)),
    };
    let op = match head {
        "K" => Operator::Know,
        "Cert" => Operator::Cert,
        "w" => Operator::Weight,
        _ => return None,
    };
    let agent = match idx {
        None => AgentId::DEFAULT,
        Some(digits) => {
            if digits.is_empty()
                || !digits.bytes().all(|b| b.is_ascii_digit())
                || digits.starts_with('0')
            {
                return None;
            }
            AgentId(digits.parse().ok()?)
        }
    };
    Some((op, agent))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

/// Parses a formula, keeping its sugar.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_kind(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn error(&self, msg: String) -> ParseError {
        self.error_kind(ParseErrorKind::Syntax(msg))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected `{}`, found {}",
                tok_text(&tok),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek() == &Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Int(_) | Tok::Minus => self.weight(),
            Tok::Ident(name) => {
                let followed_by_paren = self.peek_at(1) == &Tok::LParen;
                match operator_keyword(&name) {
                    Some((Operator::Weight, _)) if followed_by_paren => self.weight(),
                    Some((op, agent)) if followed_by_paren => {
                        self.bump();
                        self.bump();
                        let arg = self.formula()?;
                        self.expect(Tok::RParen)?;
                        Ok(match op {
                            Operator::Know => Formula::know(agent, arg),
                            _ => Formula::cert(agent, arg),
                        })
                    }
                    _ => {
                        self.bump();
                        if self.peek() == &Tok::LParen {
                            return Err(self.error(format!("`{name}` is not an operator")));
                        }
                        Ok(match name.as_str() {
                            "true" => Formula::True,
                            "false" => Formula::False,
                            _ => Formula::Prop(name),
                        })
                    }
                }
            }
            other => Err(self.error(format!("unexpected {}", other.describe()))),
        }
    }

    /// `wterm ((+|-) wterm)* rel rat` or `w(φ) in [rat, rat]`.
    fn weight(&mut self) -> Result<Formula, ParseError> {
        let mut terms = vec![self.weight_term(false)?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.weight_term(false)?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(self.weight_term(true)?);
                }
                _ => break,
            }
        }
        match self.peek().clone() {
            Tok::Rel(sym) => {
                let rel = match sym.as_str() {
                    ">=" => Relation::Ge,
                    "<=" => Relation::Le,
                    "=" => Relation::Eq,
                    "<" => Relation::Lt,
                    ">" => Relation::Gt,
                    _ => return Err(self.error_kind(ParseErrorKind::UnknownRelation(sym))),
                };
                self.bump();
                if !self.weight_term_ahead() {
                    let bound = self.rational()?;
                    return Ok(Formula::Weight(WeightAtom { terms, rel, bound }));
                }
                // Terms on the right move to the left with flipped sign.
                terms.push(self.weight_term(true)?);
                loop {
                    match self.peek() {
                        Tok::Plus => {
                            self.bump();
                            terms.push(self.weight_term(true)?);
                        }
                        Tok::Minus => {
                            self.bump();
                            terms.push(self.weight_term(false)?);
                        }
                        _ => break,
                    }
                }
                Ok(Formula::Weight(WeightAtom {
                    terms,
                    rel,
                    bound: Rational::zero(),
                }))
            }
            Tok::Ident(kw) if kw == "in" => {
                let [term] = terms.as_slice() else {
                    return Err(self.error("`in` takes a single weight term".into()));
                };
                if !term.coeff.is_one() {
                    return Err(self.error("`in` takes an unscaled weight term".into()));
                }
                let term = terms.pop().expect("one term");
                self.bump();
                self.expect(Tok::LBracket)?;
                let lo = self.rational()?;
                self.expect(Tok::Comma)?;
                let hi = self.rational()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::WeightIn(WeightInterval {
                    agent: term.agent,
                    arg: Box::new(term.arg),
                    lo,
                    hi,
                }))
            }
            Tok::Arrow => Err(self.error_kind(ParseErrorKind::UnknownRelation("->".into()))),
            other => Err(self.error(format!(
                "expected a relation after weight terms, found {}",
                other.describe()
            ))),
        }
    }

    fn weight_term_ahead(&self) -> bool {
        let mut k = 0;
        if self.peek_at(k) == &Tok::Minus {
            k += 1;
        }
        if matches!(self.peek_at(k), Tok::Int(_)) {
            k += 1;
            if self.peek_at(k) == &Tok::Star {
                k += 1;
            }
        }
        matches!(self.peek_at(k), Tok::Ident(name)
            if matches!(operator_keyword(name), Some((Operator::Weight, _))))
            && self.peek_at(k + 1) == &Tok::LParen
    }

    fn weight_term(&mut self, negated: bool) -> Result<WeightTerm, ParseError> {
        let mut sign = if negated { -BigInt::one() } else { BigInt::one() };
        if self.peek() == &Tok::Minus {
            self.bump();
            sign = -sign;
        }
        let mut coeff = BigInt::one();
        if let Tok::Int(n) = self.peek().clone() {
            self.bump();
            if self.peek() == &Tok::Slash {
                return Err(self.error_kind(ParseErrorKind::NonIntegerCoefficient));
            }
            coeff = n;
            if self.peek() == &Tok::Star {
                self.bump();
            }
        }
        let agent = match self.peek().clone() {
            Tok::Ident(name) => match operator_keyword(&name) {
                Some((Operator::Weight, agent)) => agent,
                _ => return Err(self.error(format!("expected `w`, found `{name}`"))),
            },
            other => return Err(self.error(format!("expected `w`, found {}", other.describe()))),
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let arg = self.formula()?;
        self.expect(Tok::RParen)?;
        Ok(WeightTerm {
            coeff: sign * coeff,
            agent,
            arg,
        })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = if self.peek() == &Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let Tok::Int(n) = self.peek().clone() else {
            return Err(self.error(format!(
                "expected a number, found {}",
                self.peek().describe()
            )));
        };
        self.bump();
        let numer = if negative { -n } else { n };
        if self.peek() != &Tok::Slash {
            return Ok(Rational::from_integer(numer));
        }
        self.bump();
        let Tok::Int(d) = self.peek().clone() else {
            return Err(self.error("expected a positive denominator".into()));
        };
        if d.is_zero() {
            return Err(self.error("expected a positive denominator".into()));
        }
        self.bump();
        Ok(Rational::new(numer, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_weight() {
        let f = parse("2w(p) >= 1").unwrap();
        assert_eq!(
            f,
            Formula::weight(
                vec![WeightTerm::new(2, AgentId(1), Formula::prop("p"))],
                Relation::Ge,
                Rational::one()
            )
        );
        assert_eq!(parse("2*w(p) >= 1").unwrap(), f);
    }

    #[test]
    fn terms_on_both_sides() {
        let f = parse("w(p) < 2w(q)").unwrap();
        assert_eq!(f, parse("w(p) - 2w(q) < 0").unwrap());
        assert_eq!(
            f.desugar(),
            Formula::not(parse("w(p) - 2w(q) >= 0").unwrap())
        );
    }

    #[test]
    fn nested_cert() {
        let f = parse("~q & Cert(~Cert(p) & Cert(q))").unwrap();
        let a = AgentId(1);
        let expected = Formula::and(
            Formula::not(Formula::prop("q")),
            Formula::cert(
                a,
                Formula::and(
                    Formula::not(Formula::cert(a, Formula::prop("p"))),
                    Formula::cert(a, Formula::prop("q")),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn know_default_agent() {
        assert_eq!(
            parse("K(p)").unwrap(),
            Formula::know(AgentId(1), Formula::prop("p"))
        );
        assert_eq!(
            parse("K_3(p)").unwrap(),
            Formula::know(AgentId(3), Formula::prop("p"))
        );
    }

    #[test]
    fn precedence() {
        let f = parse("p | q & r -> s -> t").unwrap();
        let expected = Formula::implies(
            Formula::or(
                Formula::prop("p"),
                Formula::and(Formula::prop("q"), Formula::prop("r")),
            ),
            Formula::implies(Formula::prop("s"), Formula::prop("t")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn interval_and_multi_terms() {
        let f = parse("w_2(p) in [1/3, 1]").unwrap();
        assert!(matches!(f, Formula::WeightIn(ref iv) if iv.agent == AgentId(2)));
        let g = parse("-w(p) + 3w(q) - 2*w_2(r) > -1/2").unwrap();
        let Formula::Weight(w) = g else { panic!() };
        let coeffs: Vec<i64> = w
            .terms
            .iter()
            .map(|t| i64::try_from(&t.coeff).unwrap())
            .collect();
        assert_eq!(coeffs, vec![-1, 3, -2]);
        assert_eq!(w.bound, Rational::new(-1, 2));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse("p &\n  & q").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = parse("w(p) => 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownRelation("=>".into()));

        let e = parse("1/2w(p) >= 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerCoefficient);

        assert!(parse("w(p) >= 1/0").is_err());
        assert!(parse("K p").is_err());
        assert!(parse("p(q)").is_err());
        assert!(parse("").is_err());
        assert!(parse("(p").is_err());
        assert!(parse("3w(p) in [0,1]").is_err());
    }
}
