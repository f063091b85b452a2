use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest coordinate dimension supported by second-order evaluation.
pub const MAX_DIM: usize = 4;

/// Second-order jet: value, gradient and Hessian with respect to up to
/// [`MAX_DIM`] coordinates. Entries beyond the active dimension stay zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// Coordinate `index` seeded with unit derivative.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut j = Jet2::constant(value);
        j.grad[index] = 1.0;
        j
    }

    pub fn gradient(&self, dim: usize) -> Vec<f64> {
        self.grad[..dim].to_vec()
    }

    pub fn hessian(&self, dim: usize) -> Vec<Vec<f64>> {
        self.hess[..dim]
            .iter()
            .map(|row| row[..dim].to_vec())
            .collect()
    }

    /// Chain rule for a scalar function with derivatives `d1`, `d2` at `self.value`.
    pub fn compose(&self, value: f64, d1: f64, d2: f64) -> Self {
        let mut out = Jet2::constant(value);
        for i in 0..MAX_DIM {
            out.grad[i] = d1 * self.grad[i];
            for j in 0..MAX_DIM {
                out.hess[i][j] = d1 * self.hess[i][j] + d2 * (self.grad[i] * self.grad[j]);
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let nf = n as f64;
        let d1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * v.powi(n - 2)
        };
        self.compose(v.powi(n), d1, d2)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.value += rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] += rhs.grad[i];
            for j in 0..MAX_DIM {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.value = -self.value;
        for i in 0..MAX_DIM {
            self.grad[i] = -self.grad[i];
            for j in 0..MAX_DIM {
                self.hess[i][j] = -self.hess[i][j];
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet2::constant(a * b);
        for i in 0..MAX_DIM {
            out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
            for j in 0..MAX_DIM {
                out.hess[i][j] = a * rhs.hess[i][j]
                    + b * self.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_coordinates() {
        let x = Jet2::variable(3.0, 0);
        let y = Jet2::variable(5.0, 1);
        let p = x * y;
        assert_eq!(p.value, 15.0);
        assert_eq!(p.gradient(2), vec![5.0, 3.0]);
        assert_eq!(p.hessian(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn powers_including_negative() {
        let x = Jet2::variable(2.0, 0);
        let cube = x.powi(3);
        assert_eq!(
            (cube.value, cube.grad[0], cube.hess[0][0]),
            (8.0, 12.0, 12.0)
        );
        let inv = x.powi(-1);
        assert_eq!((inv.value, inv.grad[0], inv.hess[0][0]), (0.5, -0.25, 0.25));
        let one = x.powi(0);
        assert_eq!((one.value, one.grad[0], one.hess[0][0]), (1.0, 0.0, 0.0));
    }
}
