//! Fixed-step RK4 integration of geodesic equations and residual checks.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::manifold::{
    check_dim, ensure_in_domain, geodesic_rhs, inner, inverse_metric, MetricChart,
};
use crate::numeric::{derivative_fd4, locate_uniform, quintic_hermite, HermiteNode};
use crate::warp::WarpedProduct;

/// Relative slack when a query parameter lands just outside the curve span.
const SPAN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub steps: usize,
    /// Acceptance threshold for geodesic-equation residuals.
    pub tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps: 1024,
            tolerance: 1e-5,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(steps: usize) -> Self {
        IntegratorConfig {
            steps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 16 {
            return Err(GeoError::input(format!(
                "integrator needs at least 16 steps, got {}",
                self.steps
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(GeoError::input(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// A curve sampled on the uniform grid `t_i = i·span/steps`.
///
/// Accelerations are kept so that intermediate parameters can be evaluated by
/// quintic Hermite interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    span: f64,
    params: Vec<f64>,
    points: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    #[serde(skip)]
    accelerations: Vec<Vec<f64>>,
    #[serde(skip)]
    jerks: Vec<Vec<f64>>,
}

/// Position, velocity and acceleration at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

impl Curve {
    pub fn new(
        span: f64,
        points: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        accelerations: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = points.len();
        if n < 2 || velocities.len() != n || accelerations.len() != n {
            return Err(GeoError::input("a curve needs matching point, velocity and acceleration arrays of length at least 2"));
        }
        if !(span > 0.0 && span.is_finite()) {
            return Err(GeoError::input(format!(
                "curve span must be positive, got {span}"
            )));
        }
        let dim = points[0].len();
        if points
            .iter()
            .chain(&velocities)
            .chain(&accelerations)
            .any(|v| v.len() != dim)
        {
            return Err(GeoError::input(
                "curve samples have inconsistent dimensions",
            ));
        }
        let steps = n - 1;
        let params = (0..n).map(|i| span * i as f64 / steps as f64).collect();
        let jerks = differentiate_samples(&accelerations, span / steps as f64);
        Ok(Curve {
            span,
            params,
            points,
            velocities,
            accelerations,
            jerks,
        })
    }

    pub fn constant(point: Vec<f64>, steps: usize, span: f64) -> Result<Self> {
        let zero = vec![0.0; point.len()];
        Curve::new(
            span,
            vec![point; steps + 1],
            vec![zero.clone(); steps + 1],
            vec![zero; steps + 1],
        )
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn step_size(&self) -> f64 {
        self.span / self.steps() as f64
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    pub fn accelerations(&self) -> &[Vec<f64>] {
        &self.accelerations
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        &self.points[self.steps()]
    }

    pub fn initial_velocity(&self) -> &[f64] {
        &self.velocities[0]
    }

    /// Interpolated state at `t ∈ [0, span]`.
    ///
    /// Positions come from the quintic Hermite interpolant of (point, velocity,
    /// acceleration); velocities and accelerations from the one of (velocity,
    /// acceleration, jerk), which avoids differentiating interpolated positions.
    pub fn eval(&self, t: f64) -> Result<CurveSample> {
        let slack = SPAN_SLACK * self.span.max(1.0);
        if !(t >= -slack && t <= self.span + slack) {
            return Err(GeoError::input(format!(
                "parameter {t} lies outside the curve span [0, {}]",
                self.span
            )));
        }
        let (i, u) = locate_uniform(t, self.span, self.steps());
        let h = self.step_size();
        let node = |j: usize| HermiteNode {
            p: &self.points[j],
            v: &self.velocities[j],
            a: &self.accelerations[j],
        };
        let (point, _, _) = quintic_hermite(&node(i), &node(i + 1), h, u);
        let rate = |j: usize| HermiteNode {
            p: &self.velocities[j],
            v: &self.accelerations[j],
            a: &self.jerks[j],
        };
        let (velocity, acceleration, _) = quintic_hermite(&rate(i), &rate(i + 1), h, u);
        Ok(CurveSample {
            point,
            velocity,
            acceleration,
        })
    }

    /// The same trace on `[0, 1]`: `c̃(s) = c(s·span)`.
    pub fn normalized(&self) -> Curve {
        let t = self.span;
        let scale = |vs: &[Vec<f64>], f: f64| {
            vs.iter()
                .map(|v| v.iter().map(|x| x * f).collect())
                .collect()
        };
        Curve::new(
            1.0,
            self.points.clone(),
            scale(&self.velocities, t),
            scale(&self.accelerations, t * t),
        )
        .expect("rescaling keeps a valid curve")
    }

    /// CSV with columns `t, x1..xn, v1..vn` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let dim = self.dim();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=dim).map(|i| format!("x{i}")))
            .chain((1..=dim).map(|i| format!("v{i}")))
            .collect();
        let io = |e: csv::Error| GeoError::numerical(format!("cannot write curve CSV: {e}"));
        w.write_record(&header).map_err(io)?;
        for ((t, p), v) in self.params.iter().zip(&self.points).zip(&self.velocities) {
            let row: Vec<String> = std::iter::once(t)
                .chain(p)
                .chain(v)
                .map(|x| format!("{x:.16e}"))
                .collect();
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| GeoError::numerical(format!("cannot write curve CSV: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Largest pointwise distance (max norm) between two curves on the same grid.
    pub fn max_distance(&self, other: &Curve) -> Result<f64> {
        if self.steps() != other.steps() || self.dim() != other.dim() {
            return Err(GeoError::input("curves must share grid and dimension"));
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}

/// Componentwise derivative of uniformly sampled vectors: fourth-order when
/// there are enough samples, first-order otherwise.
fn differentiate_samples(samples: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let n = samples.len();
    let dim = samples[0].len();
    if n < 5 {
        return (0..n)
            .map(|i| {
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (0..dim)
                    .map(|j| (samples[hi][j] - samples[lo][j]) / ((hi - lo) as f64 * h))
                    .collect()
            })
            .collect();
    }
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|j| derivative_fd4(&samples.iter().map(|v| v[j]).collect::<Vec<_>>(), h))
        .collect();
    (0..n)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect()
}

fn attach_param(err: GeoError, t: f64) -> GeoError {
    match err {
        GeoError::Domain {
            chart,
            point,
            param: None,
        } => GeoError::Domain {
            chart,
            point,
            param: Some(t),
        },
        other => other,
    }
}

/// One state vector per grid node.
pub type Samples = Vec<Vec<f64>>;

/// Classical RK4 on `[0, span]`; returns states and their derivatives at every node.
pub fn rk4<F>(y0: Vec<f64>, span: f64, steps: usize, mut f: F) -> Result<(Samples, Samples)>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let h = span / steps as f64;
    let mut eval = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        if y.iter().any(|x| !x.is_finite()) {
            return Err(GeoError::numerical(format!(
                "integration diverged at parameter {t}"
            )));
        }
        f(t, y).map_err(|e| attach_param(e, t))
    };
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        y.iter().zip(k).map(|(y, k)| y + a * k).collect()
    };
    let mut states = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);
    let mut y = y0;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = eval(t, &y)?;
        let k2 = eval(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = eval(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = eval(t + h, &axpy(&y, h, &k3))?;
        let next: Vec<f64> = (0..y.len())
            .map(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect();
        states.push(std::mem::replace(&mut y, next));
        derivs.push(k1);
    }
    derivs.push(eval(span, &y)?);
    states.push(y);
    Ok((states, derivs))
}

fn split(states: &[Vec<f64>], ranges: &[std::ops::Range<usize>]) -> Vec<Vec<Vec<f64>>> {
    ranges
        .iter()
        .map(|r| states.iter().map(|s| s[r.clone()].to_vec()).collect())
        .collect()
}

/// Geodesic of `chart` on `[0, span]` from `p0` with initial velocity `v0`.
pub fn integrate_geodesic_over(
    chart: &dyn MetricChart,
    p0: &[f64],
    v0: &[f64],
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<Curve> {
    cfg.validate()?;
    check_dim(chart, "initial point", p0)?;
    check_dim(chart, "initial velocity", v0)?;
    ensure_in_domain(chart, p0, Some(0.0))?;
    let n = chart.dim();
    let y0 = [p0, v0].concat();
    let (states, derivs) = rk4(y0, span, cfg.steps, |t, y| {
        ensure_in_domain(chart, &y[..n], Some(t))?;
        let a = geodesic_rhs(chart, &y[..n], &y[n..])?;
        Ok([&y[n..], &a[..]].concat())
    })?;
    let mut parts = split(&states, &[0..n, n..2 * n]);
    let accelerations = derivs.iter().map(|d| d[n..].to_vec()).collect();
    let velocities = parts.pop().unwrap();
    let points = parts.pop().unwrap();
    Curve::new(span, points, velocities, accelerations)
}

/// Geodesic of `chart` on `[0, 1]`.
pub fn integrate_geodesic(
    chart: &dyn MetricChart,
    p0: &[f64],
    v0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Curve> {
    integrate_geodesic_over(chart, p0, v0, 1.0, cfg)
}

/// Geodesic of the product `G_r + g₂`; the factors decouple.
pub fn integrate_product_geodesic(
    gr: &dyn MetricChart,
    g2: &dyn MetricChart,
    x0: &[f64],
    v0: &[f64],
    y0: &[f64],
    w0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(Curve, Curve)> {
    Ok((
        integrate_geodesic(gr, x0, v0, cfg)?,
        integrate_geodesic(g2, y0, w0, cfg)?,
    ))
}

/// Accelerations `(γ̈, τ̈)` prescribed by the geodesic system of `g₁ − k·g₂`.
pub fn g_system_rhs(
    wp: &WarpedProduct,
    x: &[f64],
    v: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let jet = wp.warp.jet(x)?;
    let n = wp.g1.dim();
    let dk = jet.gradient(n);
    let fiber_sq = inner(&wp.g2.metric_at(y)?, w, w);
    let ginv = inverse_metric(&wp.g1.metric_at(x)?)?;
    let mut a = geodesic_rhs(wp.g1.as_ref(), x, v)?;
    for (i, ai) in a.iter_mut().enumerate() {
        let grad_i: f64 = (0..n).map(|j| ginv[(i, j)] * dk[j]).sum();
        *ai -= 0.5 * fiber_sq * grad_i;
    }
    let dk_v: f64 = dk.iter().zip(v).map(|(a, b)| a * b).sum();
    let mut b = geodesic_rhs(wp.g2.as_ref(), y, w)?;
    for (bi, wi) in b.iter_mut().zip(w) {
        *bi -= dk_v / jet.value * wi;
    }
    Ok((a, b))
}

/// Direct integration of the geodesic system of `g₁ − k·g₂` on `[0, span]`.
pub fn integrate_g_geodesic_over(
    wp: &WarpedProduct,
    x0: &[f64],
    v0: &[f64],
    y0: &[f64],
    w0: &[f64],
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<(Curve, Curve)> {
    cfg.validate()?;
    let (g1, g2) = (wp.g1.as_ref(), wp.g2.as_ref());
    check_dim(g1, "base point", x0)?;
    check_dim(g1, "base velocity", v0)?;
    check_dim(g2, "fiber point", y0)?;
    check_dim(g2, "fiber velocity", w0)?;
    let (n, m) = (g1.dim(), g2.dim());
    let y_init = [x0, y0, v0, w0].concat();
    let (states, derivs) = rk4(y_init, span, cfg.steps, |t, s| {
        let (x, y) = (&s[..n], &s[n..n + m]);
        let (v, w) = (&s[n + m..2 * n + m], &s[2 * n + m..]);
        ensure_in_domain(g1, x, Some(t))?;
        ensure_in_domain(g2, y, Some(t))?;
        let (a, b) = g_system_rhs(wp, x, v, y, w)?;
        Ok([v, w, &a[..], &b[..]].concat())
    })?;
    let ranges = [0..n, n..n + m, n + m..2 * n + m, 2 * n + m..2 * (n + m)];
    let mut s = split(&states, &ranges).into_iter();
    let (xs, ys, vs, ws) = (
        s.next().unwrap(),
        s.next().unwrap(),
        s.next().unwrap(),
        s.next().unwrap(),
    );
    let mut d = split(&derivs, &ranges[2..]).into_iter();
    let (axs, bys) = (d.next().unwrap(), d.next().unwrap());
    Ok((
        Curve::new(span, xs, vs, axs)?,
        Curve::new(span, ys, ws, bys)?,
    ))
}

/// The oracle: geodesic of `g₁ − k·g₂` on `[0, 1]` integrated directly.
pub fn integrate_g_geodesic_oracle(
    wp: &WarpedProduct,
    x0: &[f64],
    v0: &[f64],
    y0: &[f64],
    w0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(Curve, Curve)> {
    integrate_g_geodesic_over(wp, x0, v0, y0, w0, 1.0, cfg)
}

fn velocity_derivatives(c: &Curve) -> Vec<Vec<f64>> {
    differentiate_samples(&c.velocities, c.step_size())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Max-norm residuals of the base and fiber equations of the geodesic system
/// of `g₁ − k·g₂`, with accelerations taken by finite differences of the sampled velocities.
pub fn residual_g_system(wp: &WarpedProduct, gamma: &Curve, tau: &Curve) -> Result<(f64, f64)> {
    if gamma.steps() != tau.steps() || (gamma.span - tau.span).abs() > SPAN_SLACK * gamma.span {
        return Err(GeoError::input(
            "base and fiber curves must share their parameter grid",
        ));
    }
    if gamma.steps() < 4 {
        return Err(GeoError::input("residuals need at least five samples"));
    }
    check_dim(wp.g1.as_ref(), "base curve", gamma.start())?;
    check_dim(wp.g2.as_ref(), "fiber curve", tau.start())?;
    let (da, db) = (velocity_derivatives(gamma), velocity_derivatives(tau));
    let (mut r1, mut r2) = (0.0_f64, 0.0_f64);
    for i in 0..gamma.points.len() {
        let (a, b) = g_system_rhs(
            wp,
            &gamma.points[i],
            &gamma.velocities[i],
            &tau.points[i],
            &tau.velocities[i],
        )?;
        r1 = r1.max(max_abs_diff(&da[i], &a));
        r2 = r2.max(max_abs_diff(&db[i], &b));
    }
    Ok((r1, r2))
}

/// Max-norm residual of the plain geodesic equation of `chart` along `c`.
pub fn geodesic_residual(chart: &dyn MetricChart, c: &Curve) -> Result<f64> {
    check_dim(chart, "curve", c.start())?;
    let da = velocity_derivatives(c);
    let mut r = 0.0_f64;
    for i in 0..c.points.len() {
        let a = geodesic_rhs(chart, &c.points[i], &c.velocities[i])?;
        r = r.max(max_abs_diff(&da[i], &a));
    }
    Ok(r)
}

/// `g(γ̇, γ̇)` at every node.
pub fn speeds_sq(chart: &dyn MetricChart, c: &Curve) -> Result<Vec<f64>> {
    c.points
        .iter()
        .zip(&c.velocities)
        .map(|(p, v)| Ok(inner(&chart.metric_at(p)?, v, v)))
        .collect()
}

/// Largest deviation of `g(γ̇, γ̇)` from its initial value.
pub fn speed_drift(chart: &dyn MetricChart, c: &Curve) -> Result<f64> {
    let s = speeds_sq(chart, c)?;
    Ok(s.iter().map(|x| (x - s[0]).abs()).fold(0.0, f64::max))
}

/// `k(γ)²·g₂(τ̇, τ̇)` at every node; constant along geodesics of `g₁ − k·g₂`.
pub fn fiber_invariant(wp: &WarpedProduct, gamma: &Curve, tau: &Curve) -> Result<Vec<f64>> {
    if gamma.steps() != tau.steps() {
        return Err(GeoError::input(
            "base and fiber curves must share their parameter grid",
        ));
    }
    let speeds = speeds_sq(wp.g2.as_ref(), tau)?;
    gamma
        .points
        .iter()
        .zip(speeds)
        .map(|(x, s)| {
            let k = wp.warp.value(x)?;
            Ok(k * k * s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Circle, Euclidean, PoincareHalfPlane, Sphere};
    use crate::warp::{conformal_metric, WarpField};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::with_steps(8)
            .validate()
            .unwrap_err()
            .is_validation());
        assert!(IntegratorConfig::default().validate().is_ok());
    }

    #[test]
    fn straight_line() {
        let c = integrate_geodesic(&Euclidean::new(2), &[0.0, 0.0], &[1.0, 2.0], &cfg()).unwrap();
        assert_abs_diff_eq!(c.end()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.end()[1], 2.0, epsilon = 1e-14);
        assert_eq!(c.params()[0], 0.0);
        assert_eq!(c.params().len(), 1025);
    }

    #[test]
    fn half_plane_semicircle() {
        // unit-speed geodesic through (0,1) with horizontal velocity: (tanh t, sech t)
        let c = integrate_geodesic(&PoincareHalfPlane, &[0.0, 1.0], &[1.0, 0.0], &cfg()).unwrap();
        let end = c.end();
        assert_abs_diff_eq!(end[0], 1f64.tanh(), epsilon = 1e-10);
        assert_abs_diff_eq!(end[1], 1.0 / 1f64.cosh(), epsilon = 1e-10);
        assert!(speed_drift(&PoincareHalfPlane, &c).unwrap() < 1e-8);
        assert!(geodesic_residual(&PoincareHalfPlane, &c).unwrap() < 1e-8);
    }

    #[test]
    fn constant_conformal_factor_keeps_traces() {
        let one = Arc::new(WarpField::constant(1.0, 2).unwrap());
        let gr = conformal_metric(Arc::new(PoincareHalfPlane), one, 3.0).unwrap();
        let a = integrate_geodesic(&gr, &[0.0, 1.0], &[0.5, 0.3], &cfg()).unwrap();
        let b = integrate_geodesic(&PoincareHalfPlane, &[0.0, 1.0], &[0.5, 0.3], &cfg()).unwrap();
        assert!(a.max_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn leaving_the_chart_reports_the_parameter() {
        // t dt² has finite distance 2/3 from t = 1 to the boundary t = 0
        let line = crate::manifold::WeightedLine::parse("t").unwrap();
        match integrate_geodesic(&line, &[1.0], &[-5.0], &cfg()).unwrap_err() {
            GeoError::Domain { param, .. } => {
                let t = param.unwrap();
                assert!(t > 0.1 && t < 0.2, "{t}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = integrate_geodesic(&Euclidean::new(1), &[0.0], &[1.0, 2.0], &cfg()).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn product_geodesics_split() {
        let (a, b) = integrate_product_geodesic(
            &Euclidean::new(1),
            &Circle::new(1.0),
            &[0.0],
            &[1.0],
            &[0.0],
            &[1.0],
            &cfg(),
        )
        .unwrap();
        assert_abs_diff_eq!(a.end()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.end()[0], 1.0, epsilon = 1e-14);
        let (a, b) = integrate_product_geodesic(
            &PoincareHalfPlane,
            &Sphere::new(2, 1.0),
            &[0.1, 1.2],
            &[0.4, -0.2],
            &[0.3, 0.1],
            &[-0.5, 0.7],
            &cfg(),
        )
        .unwrap();
        assert!(speed_drift(&PoincareHalfPlane, &a).unwrap() < 1e-6);
        assert!(speed_drift(&Sphere::new(2, 1.0), &b).unwrap() < 1e-6);
    }

    fn flrw() -> WarpedProduct {
        WarpedProduct::new(
            Arc::new(Euclidean::new(1)),
            Arc::new(Circle::new(1.0)),
            WarpField::new("2 + sin(t)", 1, 1.0, Some(3.0)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn oracle_conserves_the_fiber_invariant() {
        let wp = flrw();
        let (g, t) =
            integrate_g_geodesic_oracle(&wp, &[0.0], &[2.0], &[0.0], &[0.5], &cfg()).unwrap();
        let inv = fiber_invariant(&wp, &g, &t).unwrap();
        let drift = inv.iter().map(|x| (x - inv[0]).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-10, "{drift}");
        let (r1, r2) = residual_g_system(&wp, &g, &t).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");
    }

    #[test]
    fn oracle_degenerate_cases() {
        let wp = flrw();
        let (g, t) =
            integrate_g_geodesic_oracle(&wp, &[0.3], &[1.0], &[0.2], &[0.0], &cfg()).unwrap();
        assert!(t.points().iter().all(|p| p[0] == 0.2));
        assert_abs_diff_eq!(g.end()[0], 1.3, epsilon = 1e-14);
        let flat = WarpedProduct::new(
            Arc::new(Euclidean::new(1)),
            Arc::new(Euclidean::new(1)),
            WarpField::constant(2.0, 1).unwrap(),
        )
        .unwrap();
        let (g, t) =
            integrate_g_geodesic_oracle(&flat, &[0.0], &[1.0], &[0.0], &[3.0], &cfg()).unwrap();
        assert_abs_diff_eq!(g.end()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.end()[0], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn residuals_detect_non_geodesics() {
        let wp = flrw();
        let line = Curve::new(
            1.0,
            (0..=64).map(|i| vec![i as f64 / 64.0]).collect(),
            vec![vec![1.0]; 65],
            vec![vec![0.0]; 65],
        )
        .unwrap();
        let fiber = Curve::new(
            1.0,
            (0..=64).map(|i| vec![i as f64 / 64.0]).collect(),
            vec![vec![1.0]; 65],
            vec![vec![0.0]; 65],
        )
        .unwrap();
        let (r1, r2) = residual_g_system(&wp, &line, &fiber).unwrap();
        assert!(r1 > 0.1 && r2 > 0.1);
        let still = Curve::constant(vec![0.5], 64, 1.0).unwrap();
        assert_eq!(residual_g_system(&wp, &still, &still).unwrap(), (0.0, 0.0));
        let short = Curve::constant(vec![0.5], 32, 1.0).unwrap();
        assert!(residual_g_system(&wp, &still, &short)
            .unwrap_err()
            .is_validation());
    }

    #[test]
    fn interpolation_and_csv() {
        let c = integrate_geodesic(
            &PoincareHalfPlane,
            &[0.0, 1.0],
            &[1.0, 0.0],
            &IntegratorConfig::with_steps(64),
        )
        .unwrap();
        let s = c.eval(0.37).unwrap();
        assert_abs_diff_eq!(s.point[0], 0.37f64.tanh(), epsilon = 1e-9);
        assert_abs_diff_eq!(
            s.velocity[1],
            -0.37f64.tanh() / 0.37f64.cosh(),
            epsilon = 1e-8
        );
        assert!(c.eval(1.5).unwrap_err().is_validation());
        let csv = c.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,x2,v1,v2");
        assert_eq!(lines.next().unwrap(), "0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0");
        assert_eq!(csv.lines().count(), 66);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let end = |steps: usize| {
            integrate_geodesic(
                &PoincareHalfPlane,
                &[0.0, 1.0],
                &[1.0, 0.5],
                &IntegratorConfig::with_steps(steps),
            )
            .unwrap()
            .end()
            .to_vec()
        };
        let (a, b, c) = (end(32), end(64), end(128));
        let ratio = max_abs_diff(&a, &b) / max_abs_diff(&b, &c);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }
}
