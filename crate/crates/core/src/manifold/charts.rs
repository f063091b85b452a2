use nalgebra::DMatrix;

use super::MetricChart;
use crate::dsl::Expr;
use crate::error::{GeoError, Result};

fn scaled_identity(n: usize, s: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal_element(n, n, s)
}

fn sq_norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

fn constant_plane_curvature(dim: usize, k: f64) -> Option<f64> {
    (dim >= 2).then_some(k)
}

/// Flat ℝⁿ with the identity metric.
#[derive(Debug, Clone)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Euclidean { dim }
    }
}

impl MetricChart for Euclidean {
    fn name(&self) -> &str {
        "euclidean"
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_at(&self, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(self.dim, self.dim))
    }
    fn metric_derivative_at(&self, _p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        Ok(vec![DMatrix::zeros(self.dim, self.dim); self.dim])
    }
    fn sectional_curvature_analytic(&self, _p: &[f64], _e1: &[f64], _e2: &[f64]) -> Option<f64> {
        constant_plane_curvature(self.dim, 0.0)
    }
}

/// Upper half-plane `y > 0` with `(dx² + dy²)/y²`.
#[derive(Debug, Clone, Copy)]
pub struct PoincareHalfPlane;

impl MetricChart for PoincareHalfPlane {
    fn name(&self) -> &str {
        "poincare_half_plane"
    }
    fn dim(&self) -> usize {
        2
    }
    fn contains(&self, p: &[f64]) -> bool {
        p[1] > 0.0
    }
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(scaled_identity(2, 1.0 / (p[1] * p[1])))
    }
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        Ok(vec![
            DMatrix::zeros(2, 2),
            scaled_identity(2, -2.0 / p[1].powi(3)),
        ])
    }
    fn sectional_curvature_analytic(&self, _p: &[f64], _e1: &[f64], _e2: &[f64]) -> Option<f64> {
        Some(-1.0)
    }
}

/// Unit ball with `4|dx|²/(1 − |x|²)²`.
#[derive(Debug, Clone)]
pub struct PoincareBall {
    dim: usize,
}

impl PoincareBall {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        PoincareBall { dim }
    }
}

impl MetricChart for PoincareBall {
    fn name(&self) -> &str {
        "poincare_ball"
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn contains(&self, p: &[f64]) -> bool {
        sq_norm(p) < 1.0
    }
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let lambda = 2.0 / (1.0 - sq_norm(p));
        Ok(scaled_identity(self.dim, lambda * lambda))
    }
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let lambda = 2.0 / (1.0 - sq_norm(p));
        let c = 2.0 * lambda.powi(3);
        Ok(p.iter().map(|x| scaled_identity(self.dim, c * x)).collect())
    }
    fn sectional_curvature_analytic(&self, _p: &[f64], _e1: &[f64], _e2: &[f64]) -> Option<f64> {
        constant_plane_curvature(self.dim, -1.0)
    }
}

/// Round sphere of radius ρ in stereographic coordinates:
/// `4ρ²|dx|²/(1 + |x|²)²`. Covers everything except one pole.
#[derive(Debug, Clone)]
pub struct Sphere {
    dim: usize,
    radius: f64,
}

impl Sphere {
    pub fn new(dim: usize, radius: f64) -> Self {
        assert!(
            dim > 0 && radius > 0.0,
            "sphere needs positive dimension and radius"
        );
        Sphere { dim, radius }
    }
}

impl MetricChart for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let s = 1.0 + sq_norm(p);
        Ok(scaled_identity(
            self.dim,
            4.0 * self.radius * self.radius / (s * s),
        ))
    }
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let s = 1.0 + sq_norm(p);
        let c = -16.0 * self.radius * self.radius / s.powi(3);
        Ok(p.iter().map(|x| scaled_identity(self.dim, c * x)).collect())
    }
    fn sectional_curvature_analytic(&self, _p: &[f64], _e1: &[f64], _e2: &[f64]) -> Option<f64> {
        constant_plane_curvature(self.dim, 1.0 / (self.radius * self.radius))
    }
}

/// Circle of radius ρ in the angle chart, `ρ² dθ²`. The chart does not wrap.
#[derive(Debug, Clone, Copy)]
pub struct Circle {
    radius: f64,
}

impl Circle {
    pub fn new(radius: f64) -> Self {
        assert!(radius > 0.0, "radius must be positive");
        Circle { radius }
    }
}

impl MetricChart for Circle {
    fn name(&self) -> &str {
        "circle"
    }
    fn dim(&self) -> usize {
        1
    }
    fn metric_at(&self, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(scaled_identity(1, self.radius * self.radius))
    }
    fn metric_derivative_at(&self, _p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        Ok(vec![DMatrix::zeros(1, 1)])
    }
}

/// Real line with `f(t) dt²` for a positive weight expression `f`.
#[derive(Debug, Clone)]
pub struct WeightedLine {
    weight: Expr,
    source: String,
}

impl WeightedLine {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(WeightedLine {
            weight: Expr::parse(text, 1)?,
            source: text.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn weight(&self) -> &Expr {
        &self.weight
    }

    fn positive_weight(&self, p: &[f64]) -> Result<f64> {
        let f = self.weight.eval(p)?;
        if f > 0.0 {
            Ok(f)
        } else {
            Err(GeoError::SingularMetric {
                condition: f64::INFINITY,
            })
        }
    }
}

impl MetricChart for WeightedLine {
    fn name(&self) -> &str {
        "weighted_line"
    }
    fn dim(&self) -> usize {
        1
    }
    fn contains(&self, p: &[f64]) -> bool {
        matches!(self.weight.eval(p), Ok(f) if f > 0.0)
    }
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(scaled_identity(1, self.positive_weight(p)?))
    }
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.positive_weight(p)?;
        let jet = self.weight.eval2(p)?;
        Ok(vec![scaled_identity(1, jet.grad[0])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{christoffel, geodesic_rhs};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn metrics_are_positive_definite_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let charts: Vec<Box<dyn MetricChart>> = vec![
            Box::new(Euclidean::new(3)),
            Box::new(PoincareHalfPlane),
            Box::new(PoincareBall::new(2)),
            Box::new(PoincareBall::new(3)),
            Box::new(Sphere::new(2, 1.0)),
            Box::new(Sphere::new(3, 0.5)),
            Box::new(Circle::new(2.0)),
            Box::new(WeightedLine::parse("1 + t^2").unwrap()),
        ];
        for chart in &charts {
            let mut accepted = 0;
            while accepted < 1000 {
                let p: Vec<f64> = (0..chart.dim())
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect();
                if !chart.contains(&p) {
                    continue;
                }
                let g = chart.metric_at(&p).unwrap();
                assert!(g.clone().cholesky().is_some(), "{} at {p:?}", chart.name());
                assert_eq!(g.transpose(), g);
                accepted += 1;
            }
        }
    }

    #[test]
    fn weighted_line_christoffel() {
        // Γ = f'/(2f)
        let w = WeightedLine::parse("2 + sin(t)").unwrap();
        let g = christoffel(&w, &[0.0]).unwrap();
        assert!((g.get(0, 0, 0) - 0.25).abs() < 1e-15);
        let a = geodesic_rhs(&w, &[0.0], &[2.0]).unwrap();
        assert!((a[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_line_rejects_nonpositive_weight() {
        let w = WeightedLine::parse("t").unwrap();
        assert!(!w.contains(&[-1.0]));
        assert!(w.metric_at(&[-1.0]).is_err());
    }
}
