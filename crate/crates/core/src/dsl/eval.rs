use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{Expr, Func, Jet2, MAX_DIM};
use crate::error::{GeoError, Result};

trait Number:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether derivatives are propagated (sqrt at zero is then rejected).
    const DIFFERENTIATES: bool;
    fn constant(v: f64) -> Self;
    fn variable(v: f64, index: usize) -> Self;
    fn value(&self) -> f64;
    fn apply(&self, f: Func) -> Self;
    fn powi(&self, n: i32) -> Self;
}

impl Number for f64 {
    const DIFFERENTIATES: bool = false;
    fn constant(v: f64) -> Self {
        v
    }
    fn variable(v: f64, _: usize) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn apply(&self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sqrt => self.sqrt(),
        }
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

impl Number for Jet2 {
    const DIFFERENTIATES: bool = true;
    fn constant(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn variable(v: f64, index: usize) -> Self {
        Jet2::variable(v, index)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn apply(&self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sqrt => self.sqrt(),
        }
    }
    fn powi(&self, n: i32) -> Self {
        Jet2::powi(self, n)
    }
}

fn domain(e: &Expr, reason: &str) -> GeoError {
    GeoError::Eval {
        subexpr: e.to_string(),
        reason: reason.to_string(),
    }
}

fn walk<T: Number>(e: &Expr, p: &[f64]) -> Result<T> {
    let out = match e {
        Expr::Const(c) => T::constant(*c),
        Expr::Var(i) => T::variable(p[*i], *i),
        Expr::Neg(a) => -walk::<T>(a, p)?,
        Expr::Add(a, b) => walk::<T>(a, p)? + walk::<T>(b, p)?,
        Expr::Sub(a, b) => walk::<T>(a, p)? - walk::<T>(b, p)?,
        Expr::Mul(a, b) => walk::<T>(a, p)? * walk::<T>(b, p)?,
        Expr::Div(a, b) => {
            let num = walk::<T>(a, p)?;
            let den = walk::<T>(b, p)?;
            if den.value() == 0.0 {
                return Err(domain(b, "division by zero"));
            }
            num / den
        }
        Expr::Pow(a, n) => {
            let base = walk::<T>(a, p)?;
            if *n < 0 && base.value() == 0.0 {
                return Err(domain(e, "negative power of zero"));
            }
            base.powi(*n)
        }
        Expr::Call(f, a) => {
            let arg = walk::<T>(a, p)?;
            let v = arg.value();
            match f {
                Func::Log if v <= 0.0 => {
                    return Err(domain(e, "logarithm of a non-positive value"))
                }
                Func::Sqrt if v < 0.0 || (T::DIFFERENTIATES && v == 0.0) => {
                    return Err(domain(e, "square root outside its differentiable domain"))
                }
                _ => arg.apply(*f),
            }
        }
    };
    if !out.value().is_finite() {
        return Err(domain(e, "non-finite value"));
    }
    Ok(out)
}

impl Expr {
    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() < self.arity() {
            return Err(GeoError::input(format!(
                "expression uses {} coordinates but the point has {}",
                self.arity(),
                p.len()
            )));
        }
        Ok(())
    }

    /// Plain value at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        walk::<f64>(self, p)
    }

    /// Value, gradient and Hessian at `p` in one forward pass.
    pub fn eval2(&self, p: &[f64]) -> Result<Jet2> {
        self.check_point(p)?;
        if p.len() > MAX_DIM {
            return Err(GeoError::input(format!(
                "second-order evaluation supports at most {MAX_DIM} coordinates, got {}",
                p.len()
            )));
        }
        walk::<Jet2>(self, p)
    }
}
