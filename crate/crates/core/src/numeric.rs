//! Quadrature and interpolation on uniform grids.

use crate::error::{GeoError, Result};

/// Running integral `I_i = ∫_{t_0}^{t_i} f` of samples on a uniform grid of step `h`.
///
/// Even nodes use composite Simpson, odd nodes finish with a 3/8 panel, and
/// the first node uses a four-point endpoint rule, so every entry is
/// fourth-order accurate.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    out[1] = if n >= 4 {
        h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    } else {
        h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
    };
    for i in 2..n {
        out[i] = if i % 2 == 0 {
            out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i])
        } else {
            out[i - 3] + 3.0 * h / 8.0 * (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i])
        };
    }
    out
}

/// Composite Simpson integral over the whole grid.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    cumulative_simpson(f, h).last().copied().unwrap_or(0.0)
}

/// Fourth-order finite-difference derivative of uniformly sampled data.
pub fn derivative_fd4(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n >= 5, "need at least five samples");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
    d[1] = c * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
    for i in 2..n - 2 {
        d[i] = c * (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]);
    }
    let m = n - 1;
    d[m - 1] = c * (3.0 * v[m] + 10.0 * v[m - 1] - 18.0 * v[m - 2] + 6.0 * v[m - 3] - v[m - 4]);
    d[m] = c * (25.0 * v[m] - 48.0 * v[m - 1] + 36.0 * v[m - 2] - 16.0 * v[m - 3] + 3.0 * v[m - 4]);
    d
}

/// Node data for quintic Hermite interpolation on one interval.
pub struct HermiteNode<'a> {
    pub p: &'a [f64],
    pub v: &'a [f64],
    pub a: &'a [f64],
}

/// Position, velocity and acceleration of the quintic Hermite interpolant at
/// local coordinate `u ∈ [0, 1]` on an interval of length `h`.
pub fn quintic_hermite(
    n0: &HermiteNode,
    n1: &HermiteNode,
    h: f64,
    u: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (u2, u3, u4, u5) = (u * u, u * u * u, u.powi(4), u.powi(5));
    let b = [
        1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5,
        u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5,
        0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5,
        0.5 * u3 - u4 + 0.5 * u5,
        -4.0 * u3 + 7.0 * u4 - 3.0 * u5,
        10.0 * u3 - 15.0 * u4 + 6.0 * u5,
    ];
    let d = [
        -30.0 * u2 + 60.0 * u3 - 30.0 * u4,
        1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4,
        u - 4.5 * u2 + 6.0 * u3 - 2.5 * u4,
        1.5 * u2 - 4.0 * u3 + 2.5 * u4,
        -12.0 * u2 + 28.0 * u3 - 15.0 * u4,
        30.0 * u2 - 60.0 * u3 + 30.0 * u4,
    ];
    let dd = [
        -60.0 * u + 180.0 * u2 - 120.0 * u3,
        -36.0 * u + 96.0 * u2 - 60.0 * u3,
        1.0 - 9.0 * u + 18.0 * u2 - 10.0 * u3,
        3.0 * u - 12.0 * u2 + 10.0 * u3,
        -24.0 * u + 84.0 * u2 - 60.0 * u3,
        60.0 * u - 180.0 * u2 + 120.0 * u3,
    ];
    let combine = |w: &[f64; 6], i: usize| {
        w[0] * n0.p[i]
            + w[1] * h * n0.v[i]
            + w[2] * h * h * n0.a[i]
            + w[3] * h * h * n1.a[i]
            + w[4] * h * n1.v[i]
            + w[5] * n1.p[i]
    };
    let dim = n0.p.len();
    (
        (0..dim).map(|i| combine(&b, i)).collect(),
        (0..dim).map(|i| combine(&d, i) / h).collect(),
        (0..dim).map(|i| combine(&dd, i) / (h * h)).collect(),
    )
}

/// Value and derivative of the cubic Hermite interpolant on one interval.
pub fn cubic_hermite(p0: f64, v0: f64, p1: f64, v1: f64, h: f64, u: f64) -> (f64, f64) {
    let (u2, u3) = (u * u, u * u * u);
    let value = (2.0 * u3 - 3.0 * u2 + 1.0) * p0
        + (u3 - 2.0 * u2 + u) * h * v0
        + (-2.0 * u3 + 3.0 * u2) * p1
        + (u3 - u2) * h * v1;
    let slope = ((6.0 * u2 - 6.0 * u) * p0
        + (3.0 * u2 - 4.0 * u + 1.0) * h * v0
        + (-6.0 * u2 + 6.0 * u) * p1
        + (3.0 * u2 - 2.0 * u) * h * v1)
        / h;
    (value, slope)
}

/// Locates the interval of a uniform grid `[0, span]` with `n` intervals
/// containing `t`, returning `(index, local coordinate)`.
pub fn locate_uniform(t: f64, span: f64, n: usize) -> (usize, f64) {
    let x = (t / span * n as f64).clamp(0.0, n as f64);
    let i = (x.floor() as usize).min(n - 1);
    (i, x - i as f64)
}

/// Monotone piecewise-cubic interpolant of strictly increasing samples.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// `slopes` are derivative estimates at the knots; they are limited so the
    /// interpolant stays increasing.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || slopes.len() != n {
            return Err(GeoError::input(
                "monotone interpolation needs matching arrays of length at least 2",
            ));
        }
        for i in 0..n - 1 {
            if !(xs[i + 1] > xs[i] && ys[i + 1] > ys[i]) {
                return Err(GeoError::numerical(format!(
                    "samples are not strictly increasing at index {i}"
                )));
            }
        }
        let mut ds: Vec<f64> = slopes.iter().map(|s| s.max(0.0)).collect();
        for i in 0..n - 1 {
            let secant = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            let (alpha, beta) = (ds[i] / secant, ds[i + 1] / secant);
            let radius = alpha.hypot(beta);
            if radius > 3.0 {
                let tau = 3.0 / radius;
                ds[i] = tau * alpha * secant;
                ds[i + 1] = tau * beta * secant;
            }
        }
        Ok(MonotoneCubic { xs, ys, ds })
    }

    fn interval(&self, x: f64) -> usize {
        match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            i => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.xs[i + 1] - self.xs[i];
        cubic_hermite(
            self.ys[i],
            self.ds[i],
            self.ys[i + 1],
            self.ds[i + 1],
            h,
            (x - self.xs[i]) / h,
        )
        .0
    }

    /// Solves `eval(x) = y` by bisection down to adjacent floating-point values.
    pub fn inverse(&self, y: f64) -> f64 {
        let n = self.xs.len();
        if y <= self.ys[0] {
            return self.xs[0];
        }
        if y >= self.ys[n - 1] {
            return self.xs[n - 1];
        }
        let i = match self.ys.partition_point(|&k| k <= y) {
            0 => 0,
            j => (j - 1).min(n - 2),
        };
        let (mut lo, mut hi) = (self.xs[i], self.xs[i + 1]);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        if (y - flo).abs() <= (fhi - y).abs() {
            lo
        } else {
            hi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(n: usize, span: f64) -> (Vec<f64>, f64) {
        let h = span / n as f64;
        ((0..=n).map(|i| i as f64 * h).collect(), h)
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [3, 5, 16, 17] {
            let (t, h) = grid(n, 2.0);
            let f: Vec<f64> = t.iter().map(|x| x * x * x - 2.0 * x + 1.0).collect();
            let cum = cumulative_simpson(&f, h);
            for (x, c) in t.iter().zip(&cum) {
                assert_abs_diff_eq!(*c, x.powi(4) / 4.0 - x * x + x, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let integral = |n: usize| {
            let (t, h) = grid(n, 3.0);
            let f: Vec<f64> = t.iter().map(|x| 1.0 / (2.0 + x.sin())).collect();
            simpson(&f, h)
        };
        let (a, b, c) = (integral(64), integral(128), integral(256));
        let ratio = (a - b).abs() / (b - c).abs();
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn fd4_is_exact_for_quartics() {
        let (t, h) = grid(20, 1.0);
        let v: Vec<f64> = t.iter().map(|x| x.powi(4) - x).collect();
        for (x, d) in t.iter().zip(derivative_fd4(&v, h)) {
            assert_abs_diff_eq!(d, 4.0 * x.powi(3) - 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn quintic_hermite_reproduces_quintics() {
        let f = |x: f64| [x.powi(5) - 2.0 * x * x, 3.0 * x];
        let df = |x: f64| [5.0 * x.powi(4) - 4.0 * x, 3.0];
        let ddf = |x: f64| [20.0 * x.powi(3) - 4.0, 0.0];
        let (x0, x1) = (0.5, 1.25);
        let n0 = HermiteNode {
            p: &f(x0),
            v: &df(x0),
            a: &ddf(x0),
        };
        let n1 = HermiteNode {
            p: &f(x1),
            v: &df(x1),
            a: &ddf(x1),
        };
        for u in [0.0, 0.3, 0.77, 1.0] {
            let x = x0 + u * (x1 - x0);
            let (p, v, a) = quintic_hermite(&n0, &n1, x1 - x0, u);
            for i in 0..2 {
                assert_abs_diff_eq!(p[i], f(x)[i], epsilon = 1e-13);
                assert_abs_diff_eq!(v[i], df(x)[i], epsilon = 1e-12);
                assert_abs_diff_eq!(a[i], ddf(x)[i], epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn monotone_cubic_round_trips() {
        let (t, _) = grid(32, 1.0);
        let ys: Vec<f64> = t
            .iter()
            .map(|x| x + 0.3 * (2.0 * PI * x).sin() / (2.0 * PI))
            .collect();
        let ds: Vec<f64> = t.iter().map(|x| 1.0 + 0.3 * (2.0 * PI * x).cos()).collect();
        let m = MonotoneCubic::new(t.clone(), ys.clone(), ds).unwrap();
        for (x, y) in t.iter().zip(&ys) {
            assert_eq!(m.eval(*x), *y);
        }
        for y in [0.0, 0.1, 0.5, 0.93, 1.0] {
            assert_abs_diff_eq!(m.eval(m.inverse(y)), y, epsilon = 1e-15);
        }
        let mut prev = -1.0;
        for i in 0..=1000 {
            let v = m.eval(i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn monotone_cubic_rejects_non_monotone_samples() {
        assert!(
            MonotoneCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0], vec![1.0; 3]).is_err()
        );
    }
}
