use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("parse error at byte offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax {
        expected: Vec<String>,
        found: String,
    },
    InvalidCharacter {
        found: char,
    },
    InvalidNumber,
    UnknownIdentifier {
        name: String,
    },
    Arity {
        function: String,
        expected: usize,
        found: usize,
    },
    NonIntegerExponent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(
                    f,
                    "expected one of [{}], found {found}",
                    expected.join(", ")
                )
            }
            ParseErrorKind::InvalidCharacter { found } => write!(f, "invalid character {found:?}"),
            ParseErrorKind::InvalidNumber => f.write_str("malformed numeric literal"),
            ParseErrorKind::UnknownIdentifier { name } => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity {
                function,
                expected,
                found,
            } => write!(
                f,
                "`{function}` takes {expected} argument(s) but {found} were given"
            ),
            ParseErrorKind::NonIntegerExponent => {
                f.write_str("exponent must be an integer literal")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i)?;
                let value = text[start..i].parse::<f64>().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidNumber,
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('\0');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidCharacter { found },
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// Returns the end of a decimal/scientific literal starting at `i`.
fn scan_number(bytes: &[u8], mut i: usize) -> Result<usize, ParseError> {
    let digits = |bytes: &[u8], mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let start = i;
    i = digits(bytes, i);
    let mut mantissa_digits = i > start;
    if i < bytes.len() && bytes[i] == b'.' {
        let frac = i + 1;
        i = digits(bytes, frac);
        mantissa_digits |= i > frac;
    }
    if !mantissa_digits {
        return Err(ParseError {
            offset: start,
            kind: ParseErrorKind::InvalidNumber,
        });
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let exp = i;
        i = digits(bytes, i);
        if i == exp {
            return Err(ParseError {
                offset: exp,
                kind: ParseErrorKind::InvalidNumber,
            });
        }
    }
    Ok(i)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

const OPERAND_START: [&str; 4] = ["number", "identifier", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().describe(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let n = self.integer_exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32, ParseError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) => {
                let at = self.offset();
                self.bump();
                as_exponent(if negative { -v } else { v }).ok_or(ParseError {
                    offset: at,
                    kind: ParseErrorKind::NonIntegerExponent,
                })
            }
            _ => Err(self.unexpected(&["integer exponent"])),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                if *self.peek() == Tok::LParen {
                    self.call(&name, at)
                } else {
                    self.identifier(&name, at)
                }
            }
            _ => Err(self.unexpected(&OPERAND_START)),
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        if Func::from_name(name).is_some() || name == "pow" {
            return Err(self.unexpected(&["`(`"]));
        }
        if name == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        if name == "t" && self.dim == 1 {
            return Ok(Expr::Var(0));
        }
        if let Some(idx) = name.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
            if (1..=self.dim).contains(&idx) && !name[1..].starts_with('0') {
                return Ok(Expr::Var(idx - 1));
            }
        }
        Err(ParseError {
            offset: at,
            kind: ParseErrorKind::UnknownIdentifier {
                name: name.to_string(),
            },
        })
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        let func = Func::from_name(name);
        if func.is_none() && name != "pow" {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::UnknownIdentifier {
                    name: name.to_string(),
                },
            });
        }
        self.bump(); // `(`
        let mut args = Vec::new();
        let mut arg_offsets = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
        } else {
            loop {
                arg_offsets.push(self.offset());
                args.push(self.expr()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.unexpected(&["`,`", "`)`", "operator"])),
                }
            }
        }
        let expected = if func.is_some() { 1 } else { 2 };
        if args.len() != expected {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Arity {
                    function: name.to_string(),
                    expected,
                    found: args.len(),
                },
            });
        }
        let mut args = args.into_iter();
        let first = Box::new(args.next().expect("arity checked"));
        match func {
            Some(f) => Ok(Expr::Call(f, first)),
            None => {
                let exponent = args.next().expect("arity checked");
                let n = literal_value(&exponent)
                    .and_then(as_exponent)
                    .ok_or(ParseError {
                        offset: arg_offsets[1],
                        kind: ParseErrorKind::NonIntegerExponent,
                    })?;
                Ok(Expr::Pow(first, n))
            }
        }
    }
}

fn literal_value(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(v) => Some(*v),
        Expr::Neg(inner) => literal_value(inner).map(|v| -v),
        _ => None,
    }
}

fn as_exponent(v: f64) -> Option<i32> {
    (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
}

pub(super) fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, dim };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Box<Expr> {
        Box::new(Expr::Const(v))
    }

    #[test]
    fn parses_sum_with_call() {
        let e = parse("2 + sin(t)", 1).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                c(2.0),
                Box::new(Expr::Call(Func::Sin, Box::new(Expr::Var(0))))
            )
        );
    }

    #[test]
    fn parses_nested_quotient() {
        let e = parse("1/(x1^2 + 1)", 2).unwrap();
        let denom = Expr::Add(Box::new(Expr::Pow(Box::new(Expr::Var(0)), 2)), c(1.0));
        assert_eq!(e, Expr::Div(c(1.0), Box::new(denom)));
    }

    #[test]
    fn precedence_of_unary_minus_and_power() {
        // ^ binds tighter than unary minus, which binds tighter than * and /
        let e = parse("-x1^2 * 3", 1).unwrap();
        let sq = Expr::Pow(Box::new(Expr::Var(0)), 2);
        assert_eq!(e, Expr::Mul(Box::new(Expr::Neg(Box::new(sq))), c(3.0)));
        assert_eq!(
            parse("2 - 3 - 4", 1).unwrap(),
            Expr::Sub(Box::new(Expr::Sub(c(2.0), c(3.0))), c(4.0))
        );
    }

    #[test]
    fn scientific_literals_and_pow_call() {
        assert_eq!(parse("1.5e-3", 1).unwrap(), Expr::Const(1.5e-3));
        assert_eq!(parse(".25", 1).unwrap(), Expr::Const(0.25));
        assert_eq!(
            parse("pow(t, -2)", 1).unwrap(),
            Expr::Pow(Box::new(Expr::Var(0)), -2)
        );
    }

    #[test]
    fn unclosed_call_reports_end_offset() {
        let err = parse("2 + sin(", 1).unwrap_err();
        assert_eq!(err.offset, 8);
        assert!(matches!(err.kind, ParseErrorKind::Syntax { .. }));
    }

    #[test]
    fn variable_out_of_range_is_unknown() {
        let err = parse("x1 + x3", 2).unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(
            err.kind,
            ParseErrorKind::UnknownIdentifier { name: "x3".into() }
        );
        assert!(parse("t", 2).is_err());
    }

    #[test]
    fn arity_mismatch() {
        let err = parse("1 + sin(1, 2)", 1).unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Arity {
                expected: 1,
                found: 2,
                ..
            }
        ));
    }
}
