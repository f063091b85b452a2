//! The warp function, the conformal family `G_r = (1/k + r)·g₁` and the
//! curvature of its members.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dsl::{Expr, Jet2};
use crate::error::{GeoError, Result};
use crate::manifold::{
    check_dim, christoffel, ensure_in_domain, inner, inverse_metric, sectional_curvature,
    MetricChart,
};

/// Relative slack allowed when checking sampled values against declared bounds.
const BOUND_SLACK: f64 = 1e-12;

/// Tolerance on `g₁(e_i, e_j) = δ_ij` for curvature inputs.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Positive scalar field `k` on the base chart with declared bounds.
#[derive(Debug, Clone)]
pub struct WarpField {
    expr: Expr,
    source: String,
    dim: usize,
    k0: f64,
    k_sup: Option<f64>,
}

/// Admissible parameters are `r > k1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpParameterRange {
    pub k1: f64,
}

impl WarpParameterRange {
    pub fn contains(&self, r: f64) -> bool {
        r.is_finite() && r > self.k1
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(GeoError::Parameter { r, k1: self.k1 })
        }
    }

    /// Left end of the default r-grid: `k1 + 1e-3·(1 + |k1|)`.
    pub fn lower_probe(&self) -> f64 {
        self.k1 + 1e-3 * (1.0 + self.k1.abs())
    }
}

impl WarpField {
    /// `k0` is the declared infimum, `k_sup` the declared supremum (`None` if unbounded).
    pub fn new(text: &str, dim: usize, k0: f64, k_sup: Option<f64>) -> Result<Self> {
        let expr = Expr::parse(text, dim)?;
        Self::from_expr(expr, text.to_string(), dim, k0, k_sup)
    }

    pub fn constant(c: f64, dim: usize) -> Result<Self> {
        Self::from_expr(Expr::Const(c), format!("{c:?}"), dim, c, Some(c))
    }

    fn from_expr(
        expr: Expr,
        source: String,
        dim: usize,
        k0: f64,
        k_sup: Option<f64>,
    ) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(GeoError::input(format!(
                "declared k0 must be positive and finite, got {k0}"
            )));
        }
        if let Some(sup) = k_sup {
            if !(sup >= k0 && sup.is_finite()) {
                return Err(GeoError::input(format!(
                    "declared K0 = {sup} must be finite and at least k0 = {k0}"
                )));
            }
        }
        if dim == 0 || dim > crate::dsl::MAX_DIM {
            return Err(GeoError::input(format!(
                "warp dimension must be in 1..={}, got {dim}",
                crate::dsl::MAX_DIM
            )));
        }
        Ok(WarpField {
            expr,
            source,
            dim,
            k0,
            k_sup,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn k_sup(&self) -> Option<f64> {
        self.k_sup
    }

    pub fn is_constant(&self) -> bool {
        self.expr.arity() == 0
    }

    fn check_bounds(&self, p: &[f64], k: f64) -> Result<()> {
        let below = k < self.k0 * (1.0 - BOUND_SLACK);
        let above = self.k_sup.is_some_and(|s| k > s * (1.0 + BOUND_SLACK));
        if below || above {
            let sup = self
                .k_sup
                .map_or("unbounded".to_string(), |s| s.to_string());
            return Err(GeoError::input(format!(
                "warp `{}` = {k} at {p:?} violates declared bounds [{}, {sup}]",
                self.source, self.k0
            )));
        }
        Ok(())
    }

    /// `k(p)`, checked against the declared bounds.
    pub fn value(&self, p: &[f64]) -> Result<f64> {
        let k = self.expr.eval(p)?;
        self.check_bounds(p, k)?;
        Ok(k)
    }

    /// Value, coordinate gradient and coordinate Hessian of `k`.
    pub fn jet(&self, p: &[f64]) -> Result<Jet2> {
        let j = self.expr.eval2(p)?;
        self.check_bounds(p, j.value)?;
        Ok(j)
    }

    /// Components of the differential `dk`.
    pub fn differential(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jet(p)?.gradient(self.dim))
    }

    /// Covariant Hessian `∇dk_ij = ∂_i∂_j k − Γ^l_ij ∂_l k` with respect to `g1`.
    pub fn covariant_hessian(&self, g1: &dyn MetricChart, p: &[f64]) -> Result<DMatrix<f64>> {
        let j = self.jet(p)?;
        let gamma = christoffel(g1, p)?;
        let n = self.dim;
        Ok(DMatrix::from_fn(n, n, |a, b| {
            j.hess[a][b] - (0..n).map(|l| gamma.get(l, a, b) * j.grad[l]).sum::<f64>()
        }))
    }

    /// Evaluates `k` at every sample and reports the first bound violation.
    pub fn validate_bounds<'a>(&self, samples: impl IntoIterator<Item = &'a [f64]>) -> Result<()> {
        for p in samples {
            self.value(p)?;
        }
        Ok(())
    }

    pub fn admissible_range(&self) -> WarpParameterRange {
        admissible_range(self)
    }
}

pub fn admissible_range(w: &WarpField) -> WarpParameterRange {
    WarpParameterRange {
        k1: w.k_sup.map_or(0.0, |s| -1.0 / s),
    }
}

/// Member `G_r` of the conformal family, usable as a chart in its own right.
#[derive(Debug, Clone)]
pub struct ConformalChart {
    g1: Arc<dyn MetricChart>,
    warp: Arc<WarpField>,
    r: f64,
}

impl ConformalChart {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn base(&self) -> &Arc<dyn MetricChart> {
        &self.g1
    }

    pub fn warp(&self) -> &Arc<WarpField> {
        &self.warp
    }

    /// Conformal factor `1/k + r`, which is positive for admissible r.
    pub fn factor(&self, p: &[f64]) -> Result<f64> {
        let k = self.warp.value(p)?;
        Ok(1.0 / k + self.r)
    }
}

pub fn conformal_metric(
    g1: Arc<dyn MetricChart>,
    w: Arc<WarpField>,
    r: f64,
) -> Result<ConformalChart> {
    if w.dim() != g1.dim() {
        return Err(GeoError::input(format!(
            "warp has dimension {} but base chart `{}` has dimension {}",
            w.dim(),
            g1.name(),
            g1.dim()
        )));
    }
    w.admissible_range().check(r)?;
    Ok(ConformalChart { g1, warp: w, r })
}

impl MetricChart for ConformalChart {
    fn name(&self) -> &str {
        "conformal"
    }
    fn dim(&self) -> usize {
        self.g1.dim()
    }
    fn contains(&self, p: &[f64]) -> bool {
        self.g1.contains(p)
    }
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.g1.metric_at(p)? * self.factor(p)?)
    }
    fn metric_derivative_at(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let j = self.warp.jet(p)?;
        let h = 1.0 / j.value + self.r;
        let g = self.g1.metric_at(p)?;
        let dg = self.g1.metric_derivative_at(p)?;
        Ok(dg
            .into_iter()
            .enumerate()
            .map(|(l, d)| &g * (-j.grad[l] / (j.value * j.value)) + d * h)
            .collect())
    }
    fn sectional_curvature_analytic(&self, p: &[f64], e1: &[f64], e2: &[f64]) -> Option<f64> {
        let g = self.g1.metric_at(p).ok()?;
        let (u, v) = orthonormalize(&g, e1, e2).ok()?;
        sectional_curvature_gr(self.g1.as_ref(), &self.warp, self.r, p, &u, &v).ok()
    }
}

/// Constants `(k2, k3)` with `g₁ ≤ k2·G_r` and `G_r ≤ k3·g₁`.
pub fn equivalence_bounds(w: &WarpField, r: f64) -> Result<(f64, f64)> {
    w.admissible_range().check(r)?;
    // t/(1+rt) increases and (1+rt)/t decreases on the admissible range
    let k2 = match w.k_sup() {
        Some(sup) => sup / (1.0 + r * sup),
        None => 1.0 / r,
    };
    Ok((k2, 1.0 / w.k0() + r))
}

/// Gram–Schmidt in the metric `g`, returning a `g`-orthonormal basis of span{u, v}.
pub fn orthonormalize(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let nu = inner(g, u, u).sqrt();
    if !(nu > 0.0) {
        return Err(GeoError::input("plane vectors are linearly dependent"));
    }
    let e1: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let c = inner(g, v, &e1);
    let w: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a - c * b).collect();
    let nw = inner(g, &w, &w).sqrt();
    if !(nw > 1e-12 * inner(g, v, v).sqrt()) {
        return Err(GeoError::input("plane vectors are linearly dependent"));
    }
    Ok((e1, w.iter().map(|x| x / nw).collect()))
}

fn require_unit(g: &DMatrix<f64>, e: &[f64], what: &str) -> Result<()> {
    let n = inner(g, e, e);
    if (n - 1.0).abs() > ORTHONORMAL_TOL {
        return Err(GeoError::input(format!(
            "{what} must have unit g1-norm, got squared norm {n}"
        )));
    }
    Ok(())
}

/// Pointwise data shared by the curvature formula and the negativity test.
struct WarpJet {
    k: f64,
    dk: Vec<f64>,
    hess: DMatrix<f64>,
    dk_norm_sq: f64,
}

fn warp_jet(g1: &dyn MetricChart, w: &WarpField, p: &[f64], g: &DMatrix<f64>) -> Result<WarpJet> {
    let j = w.jet(p)?;
    let dk = j.gradient(w.dim());
    let ginv = inverse_metric(g)?;
    // ‖dk‖² = g1(dk♯, dk♯) = dkᵀ g⁻¹ dk
    let dk_norm_sq = inner(&ginv, &dk, &dk);
    Ok(WarpJet {
        k: j.value,
        hess: w.covariant_hessian(g1, p)?,
        dk,
        dk_norm_sq,
    })
}

fn directional(dk: &[f64], e: &[f64]) -> f64 {
    dk.iter().zip(e).map(|(a, b)| a * b).sum()
}

/// Sectional curvature of `G_r` on the plane spanned by a `g1`-orthonormal pair.
pub fn sectional_curvature_gr(
    g1: &dyn MetricChart,
    w: &WarpField,
    r: f64,
    p: &[f64],
    e1: &[f64],
    e2: &[f64],
) -> Result<f64> {
    w.admissible_range().check(r)?;
    check_dim(g1, "point", p)?;
    check_dim(g1, "first plane vector", e1)?;
    check_dim(g1, "second plane vector", e2)?;
    ensure_in_domain(g1, p, None)?;
    let g = g1.metric_at(p)?;
    require_unit(&g, e1, "first plane vector")?;
    require_unit(&g, e2, "second plane vector")?;
    let cross = inner(&g, e1, e2);
    if cross.abs() > ORTHONORMAL_TOL {
        return Err(GeoError::input(format!(
            "plane vectors must be g1-orthogonal, got g1(e1,e2) = {cross}"
        )));
    }
    let k1_sigma = sectional_curvature(g1, p, e1, e2)?;
    let j = warp_jet(g1, w, p, &g)?;
    let (k, s) = (j.k, 1.0 + r * j.k);
    let hsum = inner(&j.hess, e1, e1) + inner(&j.hess, e2, e2);
    let dsum = directional(&j.dk, e1).powi(2) + directional(&j.dk, e2).powi(2);
    Ok(k / s * k1_sigma + hsum / (2.0 * s * s)
        - (1.0 + 4.0 * r * k) / (4.0 * k * s.powi(3)) * dsum
        - j.dk_norm_sq / (4.0 * k * s.powi(3)))
}

/// Right-hand side minus left-hand side of the Hessian inequality for a unit `e`;
/// positive exactly when the inequality holds.
pub fn negativity_margin(
    g1: &dyn MetricChart,
    w: &WarpField,
    r: f64,
    p: &[f64],
    e: &[f64],
    sigma_curvature: f64,
) -> Result<f64> {
    w.admissible_range().check(r)?;
    check_dim(g1, "point", p)?;
    check_dim(g1, "direction", e)?;
    ensure_in_domain(g1, p, None)?;
    let g = g1.metric_at(p)?;
    require_unit(&g, e, "direction")?;
    let j = warp_jet(g1, w, p, &g)?;
    let (k, s) = (j.k, 1.0 + r * j.k);
    let ek = directional(&j.dk, e);
    let rhs = (1.0 + 4.0 * r * k) / (2.0 * k * s) * ek * ek + j.dk_norm_sq / (4.0 * k * s)
        - k * s * sigma_curvature;
    Ok(rhs - inner(&j.hess, e, e))
}

pub fn negativity_check(
    g1: &dyn MetricChart,
    w: &WarpField,
    r: f64,
    p: &[f64],
    e: &[f64],
    sigma_curvature: f64,
) -> Result<bool> {
    Ok(negativity_margin(g1, w, r, p, e, sigma_curvature)? > 0.0)
}

/// One sampled plane in a curvature scan.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub r: f64,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub base_curvature: f64,
    pub curvature: f64,
    /// Smaller of the two Hessian-inequality margins for e1 and e2.
    pub margin: f64,
}

/// Evaluates `K_r` and the Hessian-inequality margins on `angles` planes per
/// coordinate pair at every point and every r.
pub fn curvature_scan(
    g1: &dyn MetricChart,
    w: &WarpField,
    points: &[Vec<f64>],
    rs: &[f64],
    angles: usize,
) -> Result<Vec<CurvatureSample>> {
    let n = g1.dim();
    if n < 2 {
        return Err(GeoError::input(
            "curvature scans need a base of dimension at least 2",
        ));
    }
    if angles == 0 || points.is_empty() || rs.is_empty() {
        return Err(GeoError::input(
            "curvature scan needs at least one point, one r and one angle",
        ));
    }
    let mut out = Vec::new();
    for p in points {
        let g = g1.metric_at(p)?;
        for &r in rs {
            for a in 0..n {
                for b in a + 1..n {
                    for i in 0..angles {
                        let th = std::f64::consts::PI * i as f64 / angles as f64;
                        let mut u = vec![0.0; n];
                        let mut v = vec![0.0; n];
                        (u[a], u[b]) = (th.cos(), th.sin());
                        (v[a], v[b]) = (-th.sin(), th.cos());
                        let (e1, e2) = orthonormalize(&g, &u, &v)?;
                        let base_curvature = sectional_curvature(g1, p, &e1, &e2)?;
                        let curvature = sectional_curvature_gr(g1, w, r, p, &e1, &e2)?;
                        let margin = negativity_margin(g1, w, r, p, &e1, base_curvature)?
                            .min(negativity_margin(g1, w, r, p, &e2, base_curvature)?);
                        out.push(CurvatureSample {
                            point: p.clone(),
                            r,
                            e1,
                            e2,
                            base_curvature,
                            curvature,
                            margin,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The data of a warped product `g₁ − k·g₂` on `M₁ × M₂`.
#[derive(Debug, Clone)]
pub struct WarpedProduct {
    pub g1: Arc<dyn MetricChart>,
    pub g2: Arc<dyn MetricChart>,
    pub warp: Arc<WarpField>,
}

impl WarpedProduct {
    pub fn new(
        g1: Arc<dyn MetricChart>,
        g2: Arc<dyn MetricChart>,
        warp: WarpField,
    ) -> Result<Self> {
        if warp.dim() != g1.dim() {
            return Err(GeoError::input(format!(
                "warp has dimension {} but base chart `{}` has dimension {}",
                warp.dim(),
                g1.name(),
                g1.dim()
            )));
        }
        Ok(WarpedProduct {
            g1,
            g2,
            warp: Arc::new(warp),
        })
    }

    pub fn range(&self) -> WarpParameterRange {
        self.warp.admissible_range()
    }

    pub fn conformal(&self, r: f64) -> Result<ConformalChart> {
        conformal_metric(self.g1.clone(), self.warp.clone(), r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{
        sectional_curvature_numeric, Euclidean, PoincareHalfPlane, Sphere, CURVATURE_FD_STEP,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn sine_warp() -> WarpField {
        WarpField::new("2 + sin(t)", 1, 1.0, Some(3.0)).unwrap()
    }

    #[test]
    fn admissible_ranges() {
        assert_eq!(
            WarpField::constant(1.0, 1).unwrap().admissible_range().k1,
            -1.0
        );
        assert_abs_diff_eq!(
            sine_warp().admissible_range().k1,
            -1.0 / 3.0,
            epsilon = 1e-16
        );
        let unbounded = WarpField::new("1 + x1^2", 1, 1.0, None).unwrap();
        assert_eq!(unbounded.admissible_range().k1, 0.0);
    }

    #[test]
    fn declared_bounds_are_validated() {
        assert!(WarpField::new("2", 1, 0.0, None)
            .unwrap_err()
            .is_validation());
        assert!(WarpField::new("2", 1, 2.0, Some(1.0))
            .unwrap_err()
            .is_validation());
        let w = WarpField::new("2 + sin(t)", 1, 1.5, Some(3.0)).unwrap();
        assert!(w.value(&[0.0]).is_ok());
        assert!(w.value(&[-FRAC_PI_2]).unwrap_err().is_validation());
        let samples = [[0.0], [1.0], [2.0]];
        assert!(sine_warp()
            .validate_bounds(samples.iter().map(|p| &p[..]))
            .is_ok());
    }

    #[test]
    fn conformal_factors() {
        let line: Arc<dyn MetricChart> = Arc::new(Euclidean::new(1));
        let one = Arc::new(WarpField::constant(1.0, 1).unwrap());
        let g0 = conformal_metric(line.clone(), one.clone(), 0.0).unwrap();
        assert_eq!(g0.metric_at(&[0.3]).unwrap()[(0, 0)], 1.0);
        let g3 = conformal_metric(line.clone(), one.clone(), 3.0).unwrap();
        assert_eq!(g3.metric_at(&[0.3]).unwrap()[(0, 0)], 4.0);
        let gs = conformal_metric(line.clone(), Arc::new(sine_warp()), 0.0).unwrap();
        assert_abs_diff_eq!(
            gs.metric_at(&[FRAC_PI_2]).unwrap()[(0, 0)],
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            conformal_metric(line, one, -1.0),
            Err(GeoError::Parameter { .. })
        ));
    }

    #[test]
    fn conformal_derivative_matches_finite_differences() {
        let w = Arc::new(WarpField::new("2 + 0.5*sin(x1)*cos(x2)", 2, 1.5, Some(2.5)).unwrap());
        let g = conformal_metric(Arc::new(PoincareHalfPlane), w, 0.7).unwrap();
        let p = [0.3, 1.4];
        let analytic = g.metric_derivative_at(&p).unwrap();
        let fd = crate::manifold::finite_difference_metric_derivative(&g, &p, 1e-5).unwrap();
        for (a, b) in analytic.iter().zip(&fd) {
            assert!((a - b).abs().max() < 1e-9);
        }
    }

    #[test]
    fn equivalence_constants() {
        assert_eq!(
            equivalence_bounds(&WarpField::constant(1.0, 1).unwrap(), 0.0).unwrap(),
            (1.0, 1.0)
        );
        let (k2, k3) = equivalence_bounds(&sine_warp(), 1.0).unwrap();
        assert_abs_diff_eq!(k2, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(k3, 2.0, epsilon = 1e-15);
        let (_, big) = equivalence_bounds(&sine_warp(), 1e9).unwrap();
        assert!(big > 1e8);
    }

    #[test]
    fn constant_warp_curvature() {
        let h = PoincareHalfPlane;
        let p = [0.2, 1.7];
        let (e1, e2) = ([1.7, 0.0], [0.0, 1.7]);
        let one = WarpField::constant(1.0, 2).unwrap();
        assert_abs_diff_eq!(
            sectional_curvature_gr(&h, &one, 1.0, &p, &e1, &e2).unwrap(),
            -0.5,
            epsilon = 1e-15
        );
        let flat = Euclidean::new(2);
        for r in [-0.5, 0.0, 4.0] {
            let k = sectional_curvature_gr(&flat, &one, r, &p, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
            assert_eq!(k, 0.0);
        }
        let c = WarpField::constant(2.5, 2).unwrap();
        let k = sectional_curvature_gr(&h, &c, 0.3, &p, &e1, &e2).unwrap();
        assert_abs_diff_eq!(k, -2.5 / (1.0 + 0.75), epsilon = 1e-12);
    }

    #[test]
    fn curvature_formula_matches_numeric_curvature() {
        let cases: Vec<(Arc<dyn MetricChart>, &str, Vec<f64>)> = vec![
            (
                Arc::new(PoincareHalfPlane),
                "2 + 0.4*sin(log(x2))",
                vec![0.4, 1.3],
            ),
            (
                Arc::new(Euclidean::new(2)),
                "2 + 0.5*sin(x1)*cos(0.5*x2)",
                vec![0.4, -0.8],
            ),
            (Arc::new(Sphere::new(2, 1.0)), "3 + x1*x2", vec![0.3, 0.2]),
        ];
        for (g1, k, p) in cases {
            let w = Arc::new(WarpField::new(k, 2, 1.0, Some(4.0)).unwrap());
            for r in [-0.2, 0.0, 1.5] {
                let chart = conformal_metric(g1.clone(), w.clone(), r).unwrap();
                let (u, v) = ([1.0, 0.3], [-0.2, 1.0]);
                let formula = chart.sectional_curvature_analytic(&p, &u, &v).unwrap();
                let numeric =
                    sectional_curvature_numeric(&chart, &p, &u, &v, CURVATURE_FD_STEP).unwrap();
                assert!(
                    (formula - numeric).abs() < 1e-6,
                    "{k} r={r}: {formula} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn curvature_rejects_non_orthonormal_planes() {
        let one = WarpField::constant(1.0, 2).unwrap();
        let e = Euclidean::new(2);
        let err = sectional_curvature_gr(&e, &one, 0.0, &[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0])
            .unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn negativity_for_constant_warp() {
        let one = WarpField::constant(1.0, 2).unwrap();
        let h = PoincareHalfPlane;
        let p = [0.0, 1.0];
        assert!(negativity_check(&h, &one, 0.0, &p, &[1.0, 0.0], -1.0).unwrap());
        assert!(!negativity_check(&h, &one, 0.0, &p, &[1.0, 0.0], 1.0).unwrap());
        assert_abs_diff_eq!(
            negativity_margin(&h, &one, 0.0, &p, &[1.0, 0.0], -1.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn hessian_inequality_forces_negative_curvature() {
        let w = WarpField::new("2 + 0.5*sin(x1)", 2, 1.5, Some(2.5)).unwrap();
        let h = PoincareHalfPlane;
        let points: Vec<Vec<f64>> = [0.0, 1.0, 2.5]
            .iter()
            .flat_map(|&x| [0.5, 1.0, 3.0].map(|y| vec![x, y]))
            .collect();
        let samples = curvature_scan(&h, &w, &points, &[0.0, 1.0, 10.0], 8).unwrap();
        assert_eq!(samples.len(), 9 * 3 * 8);
        for s in samples {
            if s.margin > 0.0 {
                assert!(s.curvature < 0.0, "{s:?}");
            }
        }
    }
}
