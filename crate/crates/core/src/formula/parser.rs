//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula   := until (('&' | '|') until)*        -- mixing '&' and '|' needs parentheses
//! until     := unary ('U[' num ',' num ']' unary)?
//! unary     := '!' unary | 'G[' num ',' num ']' unary | 'F[' num ',' num ']' unary
//!            | '(' formula ')' | 'true' | predicate
//! predicate := expr ('>=' expr)?                  -- implicit '>= 0'
//! expr      := product (('+' | '-') product)*
//! product   := signed ('*' signed)*               -- at least one factor of each product is constant
//! signed    := '-' signed | number | ident | 'norm(' expr (',' expr)* ')' | '(' expr ')'
//! ```

use super::{Formula, FormulaError, Interval, PredicateExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    /// `G[`, `F[` or `U[`; the bracket is consumed with the keyword.
    Temporal(char),
    True,
    LParen,
    RParen,
    RBracket,
    Comma,
    Amp,
    Pipe,
    Bang,
    Plus,
    Minus,
    Star,
    Ge,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { position, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '!' => Some(Tok::Bang),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos: start });
            i += 1;
            continue;
        }
        if c == '>' {
            if bytes.get(i + 1) == Some(&b'=') {
                out.push(Token { tok: Tok::Ge, pos: start });
                i += 2;
                continue;
            }
            return Err(syntax(start, "expected `>=`"));
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value = lit
                .parse::<f64>()
                .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
            out.push(Token { tok: Tok::Num(value), pos: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "G" | "F" | "U" if bytes.get(i) == Some(&b'[') => {
                    i += 1;
                    Tok::Temporal(word.chars().next().unwrap())
                }
                "true" => Tok::True,
                _ => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, pos: start });
            continue;
        }
        return Err(syntax(start, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, pos: text.len() });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

/// Parses formula text into a normalized [`Formula`].
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { tokens: lex(text)?, at: 0 };
    let f = p.formula()?;
    match p.peek() {
        Tok::Eof => Ok(f.normalize()),
        other => Err(syntax(p.pos(), format!("unexpected {} after formula", describe(other)))),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Temporal(c) => format!("`{c}[`"),
        Tok::True => "`true`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let first = self.until()?;
        let conjunction = match self.peek() {
            Tok::Amp => true,
            Tok::Pipe => false,
            _ => return Ok(first),
        };
        let mut operands = vec![first];
        loop {
            match self.peek() {
                Tok::Amp if conjunction => {}
                Tok::Pipe if !conjunction => {}
                Tok::Amp | Tok::Pipe => {
                    return Err(syntax(self.pos(), "mixing `&` and `|` requires parentheses"))
                }
                _ => break,
            }
            self.bump();
            operands.push(self.until()?);
        }
        Ok(if conjunction { Formula::and(operands) } else { Formula::or(operands) })
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        if *self.peek() != Tok::Temporal('U') {
            return Ok(lhs);
        }
        self.bump();
        let interval = self.interval()?;
        let rhs = self.unary()?;
        if *self.peek() == Tok::Temporal('U') {
            return Err(syntax(self.pos(), "chained `U` requires parentheses"));
        }
        Ok(Formula::until(interval, lhs, rhs))
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Temporal(op @ ('G' | 'F')) => {
                self.bump();
                let interval = self.interval()?;
                let body = self.unary()?;
                Ok(if op == 'G' {
                    Formula::always(interval, body)
                } else {
                    Formula::eventually(interval, body)
                })
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::LParen => {
                // A parenthesis opens either an arithmetic group or a sub-formula.
                let mark = self.at;
                let as_predicate = self.predicate();
                match as_predicate {
                    Ok(f) => Ok(f),
                    Err(pred_err) => {
                        let pred_reach = self.at;
                        self.at = mark;
                        self.bump();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen)?;
                            Ok(f)
                        });
                        match inner {
                            Ok(f) => Ok(f),
                            Err(_) if pred_reach > self.at => Err(pred_err),
                            Err(err) => Err(err),
                        }
                    }
                }
            }
            _ => self.predicate(),
        }
    }

    fn interval(&mut self) -> Result<Interval, FormulaError> {
        let a = self.signed_number()?;
        self.expect(Tok::Comma)?;
        let b = self.signed_number()?;
        self.expect(Tok::RBracket)?;
        Interval::new(a, b)
    }

    fn signed_number(&mut self) -> Result<f64, FormulaError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            other => Err(syntax(self.pos(), format!("expected number, found {}", describe(&other)))),
        }
    }

    fn predicate(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.expr()?;
        if *self.peek() == Tok::Ge {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Formula::predicate(PredicateExpr::sub(lhs, rhs)));
        }
        Ok(Formula::predicate(lhs))
    }

    fn expr(&mut self) -> Result<PredicateExpr, FormulaError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = PredicateExpr::add(acc, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = PredicateExpr::sub(acc, self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<PredicateExpr, FormulaError> {
        let mut acc = self.signed()?;
        while *self.peek() == Tok::Star {
            let pos = self.pos();
            self.bump();
            let rhs = self.signed()?;
            acc = match (acc, rhs) {
                (PredicateExpr::Const(c), e) => PredicateExpr::scale(c, e),
                (e, PredicateExpr::Const(c)) => PredicateExpr::scale(c, e),
                _ => return Err(syntax(pos, "multiplication requires a constant factor")),
            };
        }
        Ok(acc)
    }

    fn signed(&mut self) -> Result<PredicateExpr, FormulaError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(match self.signed()? {
                    PredicateExpr::Const(c) => PredicateExpr::Const(-c),
                    e => PredicateExpr::scale(-1.0, e),
                })
            }
            Tok::Num(v) => {
                self.bump();
                Ok(PredicateExpr::Const(v))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(PredicateExpr::Channel(name));
                }
                if name != "norm" {
                    return Err(FormulaError::UnknownFunction { name, position: pos });
                }
                self.bump();
                let mut items = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(PredicateExpr::Norm(items))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(syntax(
                self.pos(),
                format!("expected expression, found {}", describe(&other)),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::format_formula;

    fn p(name: &str) -> Formula {
        Formula::predicate(PredicateExpr::channel(name))
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn case_study_task_structure() {
        let f = parse_formula("G[0,6](F[0,4](p1) & F[0,4](p2))").unwrap();
        let expected = Formula::always(
            iv(0.0, 6.0),
            Formula::And(vec![
                Formula::eventually(iv(0.0, 4.0), p("p1")),
                Formula::eventually(iv(0.0, 4.0), p("p2")),
            ]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn negation() {
        assert_eq!(parse_formula("!(p1)").unwrap(), Formula::not(p("p1")));
        assert_eq!(parse_formula("!p1").unwrap(), Formula::not(p("p1")));
    }

    #[test]
    fn reversed_interval_is_rejected() {
        assert!(matches!(parse_formula("G[6,0] p1"), Err(FormulaError::Interval { a, b }) if a == 6.0 && b == 0.0));
        assert!(matches!(parse_formula("F[-1,2] p1"), Err(FormulaError::Interval { .. })));
    }

    #[test]
    fn unknown_function() {
        let err = parse_formula("sqrt(x1) >= 1").unwrap_err();
        assert_eq!(err, FormulaError::UnknownFunction { name: "sqrt".into(), position: 0 });
    }

    #[test]
    fn mixing_and_or_without_parentheses_fails() {
        let err = parse_formula("a & b | c").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { position: 6, .. }), "{err:?}");
        assert!(parse_formula("(a & b) | c").is_ok());
    }

    #[test]
    fn chains_flatten_into_one_node() {
        let f = parse_formula("p1 & p2 & p3").unwrap();
        assert_eq!(f, Formula::And(vec![p("p1"), p("p2"), p("p3")]));
        assert_eq!(format_formula(&f), "(p1 & p2 & p3)");
        assert_eq!(parse_formula(&format_formula(&f)).unwrap(), f);
        // parenthesised groups of the same operator are flattened as well
        assert_eq!(parse_formula("(p1 & p2) & p3").unwrap(), f);
    }

    #[test]
    fn printer_examples() {
        let f = Formula::eventually(iv(0.0, 4.0), p("p1"));
        assert_eq!(format_formula(&f), "F[0,4](p1)");
        let nn = Formula::not(Formula::not(p("p1")));
        assert_eq!(format_formula(&nn), "!(!(p1))");
        assert_eq!(parse_formula("!(!(p1))").unwrap(), nn);
    }

    #[test]
    fn predicate_with_comparison() {
        let f = parse_formula("x1 >= -1").unwrap();
        assert_eq!(
            f,
            Formula::predicate(PredicateExpr::sub(PredicateExpr::channel("x1"), PredicateExpr::Const(-1.0)))
        );
        let g = parse_formula("0.2 - norm(x1 - 1.5, x2 - 2.5)").unwrap();
        assert_eq!(g, Formula::predicate(PredicateExpr::ball(&["x1", "x2"], &[1.5, 2.5], 0.2)));
    }

    #[test]
    fn parenthesised_arithmetic_and_formulas() {
        let f = parse_formula("(x1 + 1) >= 2 & (x2 >= 0)").unwrap();
        assert!(matches!(&f, Formula::And(ops) if ops.len() == 2));
        let g = parse_formula("((x1 - 1) & p2)").unwrap();
        assert!(matches!(&g, Formula::And(ops) if ops.len() == 2));
    }

    #[test]
    fn until_and_scaling() {
        let f = parse_formula("p1 U[2,3] F[0,4] p2").unwrap();
        assert_eq!(
            f,
            Formula::until(iv(2.0, 3.0), p("p1"), Formula::eventually(iv(0.0, 4.0), p("p2")))
        );
        assert!(parse_formula("a U[0,1] b U[0,1] c").is_err());
        let s = parse_formula("x1 * 2 - -x2").unwrap();
        assert_eq!(
            s,
            Formula::predicate(PredicateExpr::sub(
                PredicateExpr::scale(2.0, PredicateExpr::channel("x1")),
                PredicateExpr::scale(-1.0, PredicateExpr::channel("x2")),
            ))
        );
        assert!(parse_formula("x1 * x2").is_err());
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_formula("G[0,1] (p1 & )") {
            Err(FormulaError::Syntax { position, .. }) => assert_eq!(position, 13),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("p1 )").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("G[0 1] p").is_err());
    }

    #[test]
    fn true_literal() {
        assert_eq!(parse_formula("F[0,1] true").unwrap(), Formula::eventually(iv(0.0, 1.0), Formula::True));
    }
}
