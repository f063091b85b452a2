//! Coordinate-chart Riemannian manifolds.
//!
//! A [`MetricChart`] evaluates metric components (and optionally their
//! derivatives) at chart points. Everything else in the crate, from
//! Christoffel symbols to geodesic right-hand sides and sectional curvature,
//! is derived from those two evaluators.

mod charts;
mod registry;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use charts::{Circle, Euclidean, PoincareBall, PoincareHalfPlane, Sphere, WeightedLine};
pub use registry::{ChartFactory, ChartRegistry, ChartSpec, ParamValue};

use crate::error::{GeoError, Result};

/// Central-difference step used when a chart has no analytic metric derivative.
pub const FD_STEP: f64 = 1e-5;

/// Step for differentiating Christoffel symbols in the numeric curvature path.
pub const CURVATURE_FD_STEP: f64 = 1e-4;

/// A single coordinate chart carrying a Riemannian metric.
pub trait MetricChart: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn contains(&self, _p: &[f64]) -> bool {
        true
    }

    /// Symmetric positive-definite metric components at `p`.
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>>;

    /// `out[l][(i, j)] = ∂g_ij/∂x^l`. Defaults to central differences.
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        finite_difference_metric_derivative(self, p, FD_STEP)
    }

    /// Closed-form sectional curvature of span{e1, e2}, when the chart knows it.
    fn sectional_curvature_analytic(&self, _p: &[f64], _e1: &[f64], _e2: &[f64]) -> Option<f64> {
        None
    }
}

/// Vector in the tangent space at `base`, in chart components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Vec<f64>,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: Vec<f64>, components: Vec<f64>) -> Result<Self> {
        if base.len() != components.len() {
            return Err(GeoError::input(format!(
                "tangent vector has {} components but base point has {} coordinates",
                components.len(),
                base.len()
            )));
        }
        Ok(TangentVector { base, components })
    }

    pub fn zero(base: Vec<f64>) -> Self {
        let n = base.len();
        TangentVector {
            base,
            components: vec![0.0; n],
        }
    }
}

pub fn finite_difference_metric_derivative<C: MetricChart + ?Sized>(
    chart: &C,
    p: &[f64],
    h: f64,
) -> Result<Vec<DMatrix<f64>>> {
    let mut q = p.to_vec();
    (0..chart.dim())
        .map(|l| {
            q[l] = p[l] + h;
            let plus = chart.metric_at(&q)?;
            q[l] = p[l] - h;
            let minus = chart.metric_at(&q)?;
            q[l] = p[l];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

pub(crate) fn check_dim(chart: &dyn MetricChart, what: &str, v: &[f64]) -> Result<()> {
    if v.len() != chart.dim() {
        return Err(GeoError::input(format!(
            "{what} has length {} but chart `{}` has dimension {}",
            v.len(),
            chart.name(),
            chart.dim()
        )));
    }
    Ok(())
}

pub(crate) fn ensure_in_domain(
    chart: &dyn MetricChart,
    p: &[f64],
    param: Option<f64>,
) -> Result<()> {
    if p.iter().all(|x| x.is_finite()) && chart.contains(p) {
        Ok(())
    } else {
        Err(GeoError::Domain {
            chart: chart.name().to_string(),
            point: p.to_vec(),
            param,
        })
    }
}

/// `uᵀ G v` with G the metric matrix at the shared base point.
pub fn inner(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += u[i] * g[(i, j)] * v[j];
        }
    }
    acc
}

/// Metric pairing g_p(u, v).
pub fn metric_eval(
    chart: &dyn MetricChart,
    p: &[f64],
    u: &TangentVector,
    v: &TangentVector,
) -> Result<f64> {
    check_dim(chart, "point", p)?;
    check_dim(chart, "first vector", &u.components)?;
    check_dim(chart, "second vector", &v.components)?;
    if u.base != p || v.base != p {
        return Err(GeoError::input(
            "tangent vectors must be based at the evaluation point",
        ));
    }
    ensure_in_domain(chart, p, None)?;
    Ok(inner(&chart.metric_at(p)?, &u.components, &v.components))
}

/// Squared norm g_p(v, v) without the tangent-vector wrapper.
pub fn norm_sq(chart: &dyn MetricChart, p: &[f64], v: &[f64]) -> Result<f64> {
    Ok(inner(&chart.metric_at(p)?, v, v))
}

fn condition_estimate(g: &DMatrix<f64>) -> f64 {
    let eig = g.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a metric matrix via Cholesky; fails unless positive definite.
pub fn inverse_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match g.clone().cholesky() {
        Some(ch) => Ok(ch.inverse()),
        None => Err(GeoError::SingularMetric {
            condition: condition_estimate(g),
        }),
    }
}

/// Christoffel symbols of the second kind, `Γ^k_ij`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    /// `Γ^k_ij u^i v^j` for every k.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Christoffel symbols from metric components and their derivatives.
pub fn christoffel_from_parts(g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Result<Christoffel> {
    let n = g.nrows();
    let ginv = inverse_metric(g)?;
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma.set(k, i, j, 0.5 * acc);
                gamma.set(k, j, i, 0.5 * acc);
            }
        }
    }
    Ok(gamma)
}

/// Levi-Civita Christoffel symbols at `p`.
pub fn christoffel(chart: &dyn MetricChart, p: &[f64]) -> Result<Christoffel> {
    check_dim(chart, "point", p)?;
    ensure_in_domain(chart, p, None)?;
    christoffel_from_parts(&chart.metric_at(p)?, &chart.metric_derivative_at(p)?)
}

/// Index raising: the vector v with g(v, ·) = ω.
pub fn sharp(chart: &dyn MetricChart, p: &[f64], covector: &[f64]) -> Result<TangentVector> {
    check_dim(chart, "point", p)?;
    check_dim(chart, "covector", covector)?;
    ensure_in_domain(chart, p, None)?;
    let ginv = inverse_metric(&chart.metric_at(p)?)?;
    let v = ginv * DVector::from_column_slice(covector);
    TangentVector::new(p.to_vec(), v.iter().copied().collect())
}

/// Geodesic acceleration `a^k = −Γ^k_ij v^i v^j`.
pub fn geodesic_rhs(chart: &dyn MetricChart, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_dim(chart, "velocity", v)?;
    let gamma = christoffel(chart, p)?;
    Ok(gamma.contract(v, v).into_iter().map(|a| -a).collect())
}

/// Sectional curvature computed from the Riemann tensor, with Christoffel
/// derivatives taken by central differences of step `h`.
pub fn sectional_curvature_numeric(
    chart: &dyn MetricChart,
    p: &[f64],
    e1: &[f64],
    e2: &[f64],
    h: f64,
) -> Result<f64> {
    let n = chart.dim();
    if n < 2 {
        return Err(GeoError::input(
            "sectional curvature needs dimension at least 2",
        ));
    }
    check_dim(chart, "first plane vector", e1)?;
    check_dim(chart, "second plane vector", e2)?;
    let g = chart.metric_at(p)?;
    let gamma = christoffel(chart, p)?;
    let mut q = p.to_vec();
    let mut dgamma = Vec::with_capacity(n);
    for m in 0..n {
        q[m] = p[m] + h;
        let plus = christoffel(chart, &q)?;
        q[m] = p[m] - h;
        let minus = christoffel(chart, &q)?;
        q[m] = p[m];
        dgamma.push((plus, minus));
    }
    let d = |m: usize, l: usize, j: usize, k: usize| {
        (dgamma[m].0.get(l, j, k) - dgamma[m].1.get(l, j, k)) / (2.0 * h)
    };

    // R^l_ijk X^i Y^j Y^k, then lowered against X
    let mut ryy = vec![0.0; n];
    for l in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let xy = e1[i] * e2[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let mut r = d(i, l, j, k) - d(j, l, i, k);
                    for m in 0..n {
                        r += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    acc += r * xy * e2[k];
                }
            }
        }
        ryy[l] = acc;
    }
    let num = inner(&g, &ryy, e1);
    let den = inner(&g, e1, e1) * inner(&g, e2, e2) - inner(&g, e1, e2).powi(2);
    if den <= 0.0 {
        return Err(GeoError::input("plane vectors are linearly dependent"));
    }
    Ok(num / den)
}

/// Sectional curvature of span{e1, e2}: analytic when the chart provides it.
pub fn sectional_curvature(
    chart: &dyn MetricChart,
    p: &[f64],
    e1: &[f64],
    e2: &[f64],
) -> Result<f64> {
    check_dim(chart, "point", p)?;
    ensure_in_domain(chart, p, None)?;
    match chart.sectional_curvature_analytic(p, e1, e2) {
        Some(k) => Ok(k),
        None => sectional_curvature_numeric(chart, p, e1, e2, CURVATURE_FD_STEP),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tv(p: &[f64], c: &[f64]) -> TangentVector {
        TangentVector::new(p.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_pairings() {
        let e = Euclidean::new(2);
        let p = [0.0, 0.0];
        assert_eq!(
            metric_eval(&e, &p, &tv(&p, &[1.0, 0.0]), &tv(&p, &[1.0, 0.0])).unwrap(),
            1.0
        );
        assert_eq!(
            metric_eval(&e, &p, &tv(&p, &[1.0, 0.0]), &tv(&p, &[0.0, 1.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn half_plane_pairing() {
        let h = PoincareHalfPlane;
        let p = [0.0, 2.0];
        let v = tv(&p, &[1.0, 0.0]);
        assert_eq!(metric_eval(&h, &p, &v, &v).unwrap(), 0.25);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let e = Euclidean::new(2);
        let p = [0.0, 0.0];
        let bad = TangentVector::zero(vec![0.0, 0.0, 0.0]);
        assert!(matches!(
            metric_eval(&e, &p, &bad, &bad),
            Err(GeoError::Input(_))
        ));
        assert!(TangentVector::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn flat_christoffel_vanishes() {
        for n in 1..4 {
            let g = christoffel(&Euclidean::new(n), &vec![0.3; n]).unwrap();
            assert_eq!(g.max_abs(), 0.0);
        }
        assert_eq!(
            christoffel(&Circle::new(1.0), &[0.7]).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn half_plane_christoffel_at_unit_height() {
        // Γ^x_xy = -1/y, Γ^y_xx = 1/y, Γ^y_yy = -1/y
        let g = christoffel(&PoincareHalfPlane, &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(g.get(0, 0, 1), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(0, 1, 0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(1, 0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.get(1, 1, 1), -1.0, epsilon = 1e-15);
        assert_eq!(g.get(0, 0, 0), 0.0);
        assert_eq!(g.get(0, 1, 1), 0.0);
        assert_eq!(g.get(1, 0, 1), 0.0);
    }

    #[test]
    fn sharp_raises_indices() {
        let e = Euclidean::new(2);
        assert_eq!(
            sharp(&e, &[0.0, 0.0], &[3.0, 4.0]).unwrap().components,
            vec![3.0, 4.0]
        );
        let v = sharp(&PoincareHalfPlane, &[0.0, 2.0], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(v.components[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.components[1], 0.0, epsilon = 1e-14);
        let z = sharp(&Sphere::new(2, 1.0), &[0.2, -0.4], &[0.0, 0.0]).unwrap();
        assert_eq!(z.components, vec![0.0, 0.0]);
    }

    #[test]
    fn sharp_inverts_the_pairing() {
        let s = Sphere::new(3, 2.0);
        let p = [0.3, -0.1, 0.5];
        let omega = [0.7, -1.1, 0.4];
        let v = sharp(&s, &p, &omega).unwrap();
        let g = s.metric_at(&p).unwrap();
        for w in [[1.0, 0.0, 0.0], [0.2, -0.3, 0.9]] {
            let lhs = inner(&g, &v.components, &w);
            let rhs: f64 = omega.iter().zip(w).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn geodesic_acceleration() {
        assert_eq!(
            geodesic_rhs(&Euclidean::new(2), &[1.0, 2.0], &[3.0, -1.0]).unwrap(),
            vec![0.0, 0.0]
        );
        let a = geodesic_rhs(&PoincareHalfPlane, &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(a[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], -1.0, epsilon = 1e-15);
        assert_eq!(
            geodesic_rhs(&PoincareHalfPlane, &[0.0, 1.0], &[0.0, 0.0]).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn singular_metric_is_reported() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            inverse_metric(&g),
            Err(GeoError::SingularMetric { .. })
        ));
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert!(matches!(
            christoffel(&PoincareHalfPlane, &[0.0, -1.0]),
            Err(GeoError::Domain { .. })
        ));
    }

    #[test]
    fn numeric_curvature_matches_known_values() {
        let cases: Vec<(Box<dyn MetricChart>, Vec<f64>, f64)> = vec![
            (Box::new(PoincareHalfPlane), vec![0.4, 1.3], -1.0),
            (Box::new(PoincareBall::new(2)), vec![0.2, -0.3], -1.0),
            (Box::new(Sphere::new(2, 1.0)), vec![0.5, 0.1], 1.0),
            (Box::new(Sphere::new(3, 2.0)), vec![0.5, 0.1, -0.2], 0.25),
            (Box::new(Euclidean::new(3)), vec![0.5, 0.1, -0.2], 0.0),
        ];
        for (chart, p, expected) in cases {
            let n = chart.dim();
            let mut e1 = vec![0.0; n];
            let mut e2 = vec![0.0; n];
            e1[0] = 1.0;
            e2[1] = 0.7;
            e2[0] = 0.2;
            let k = sectional_curvature_numeric(chart.as_ref(), &p, &e1, &e2, CURVATURE_FD_STEP)
                .unwrap();
            assert_abs_diff_eq!(k, expected, epsilon = 1e-6);
            assert_abs_diff_eq!(
                sectional_curvature(chart.as_ref(), &p, &e1, &e2).unwrap(),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn analytic_and_finite_difference_christoffel_agree() {
        #[derive(Debug)]
        struct NumericOnly<'a>(&'a dyn MetricChart);
        impl MetricChart for NumericOnly<'_> {
            fn name(&self) -> &str {
                "numeric"
            }
            fn dim(&self) -> usize {
                self.0.dim()
            }
            fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
                self.0.metric_at(p)
            }
        }
        let charts: Vec<(Box<dyn MetricChart>, Vec<f64>)> = vec![
            (Box::new(PoincareHalfPlane), vec![0.1, 0.8]),
            (Box::new(PoincareBall::new(3)), vec![0.1, 0.2, -0.3]),
            (Box::new(Sphere::new(2, 1.5)), vec![1.1, -0.6]),
        ];
        for (chart, p) in charts {
            let analytic = christoffel(chart.as_ref(), &p).unwrap();
            let numeric = christoffel(&NumericOnly(chart.as_ref()), &p).unwrap();
            let scale = analytic.max_abs().max(1.0);
            let n = chart.dim();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let err = (analytic.get(k, i, j) - numeric.get(k, i, j)).abs() / scale;
                        assert!(
                            err <= 10.0 * FD_STEP * FD_STEP,
                            "{} err {err}",
                            chart.name()
                        );
                    }
                }
            }
        }
    }
}
