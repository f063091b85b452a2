//! A small expression language for warp functions and line weights.
//!
//! Expressions are written in chart coordinates `x1..xn` (plus `t` as an alias
//! for `x1` in one dimension) and evaluated together with their exact gradient
//! and Hessian by second-order forward-mode differentiation.
//!
//! ```
//! use warpgeo::dsl::Expr;
//!
//! let k = Expr::parse("2 + sin(t)", 1).unwrap();
//! let jet = k.eval2(&[0.0]).unwrap();
//! assert_eq!(jet.value, 2.0);
//! assert_eq!(jet.gradient(1), vec![1.0]);
//! ```

mod eval;
mod jet;
mod parse;

use std::fmt;

pub use jet::{Jet2, MAX_DIM};
pub use parse::{ParseError, ParseErrorKind};

/// Elementary functions understood by the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Parsed expression tree. Variables are zero-based coordinate indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parses `text` over coordinates `x1..x{dim}`.
    pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
        parse::parse(text, dim)
    }

    /// Largest variable index used plus one (0 for constant expressions).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed to parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => (" + ", 1),
                    Expr::Sub(..) => (" - ", 1),
                    Expr::Mul(..) => (" * ", 2),
                    _ => (" / ", 2),
                };
                write_operand(f, a, prec)?;
                f.write_str(op)?;
                write_operand(f, b, prec + 1)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 4)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_keeps_structure() {
        for (src, dim) in [
            ("2 + sin(t)", 1),
            ("1 / (x1^2 + 1)", 2),
            ("-(x1 - x2) * 3", 2),
            ("x1 - (x2 - 1)", 2),
            ("(-x1)^2", 1),
            ("-x1^2", 1),
            ("x1^-2 / (2 / x2)", 2),
            ("exp(log(x1)) - --x2", 2),
        ] {
            let e = Expr::parse(src, dim).unwrap();
            let printed = e.to_string();
            assert_eq!(Expr::parse(&printed, dim).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn arity_counts_highest_variable() {
        assert_eq!(Expr::parse("3", 2).unwrap().arity(), 0);
        assert_eq!(Expr::parse("x2 * 4", 3).unwrap().arity(), 2);
    }
}
