//! Two-point connection problems for `g₁ − k·g₂`.
//!
//! The base points are joined by a geodesic `μ_r` of `G_r`, which fixes
//!
//! ```text
//! β(r) = (a_r/b_r)·((1 + r·k(x₀))/k(x₀)·g₁(X_r, X_r))^½
//! ```
//!
//! and the connection problem becomes the scalar equation `β(r) = d_{g₂}(y₀, y₁)`.
//! `β` decreases from `+∞` near `k1` to `0` as `r → ∞`, so a sign change is
//! bracketed on a geometric grid and refined with Brent's method.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use roots::{find_root_brent, Convergency};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::integrate::{integrate_geodesic, residual_g_system, rk4, Curve, IntegratorConfig};
use crate::manifold::{check_dim, ensure_in_domain, inner, MetricChart};
use crate::numeric::{derivative_fd4, simpson};
use crate::reparam::{compatible_fiber_tangent, constants_along, riemannize, RiemannianGeodesic};
use crate::warp::{WarpParameterRange, WarpedProduct};

/// Damped Newton settings for boundary-value shooting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShootingConfig {
    pub max_iter: usize,
    /// Endpoint tolerance, max-norm in chart coordinates.
    pub tolerance: f64,
    /// Relative step of the finite-difference Jacobian.
    pub fd_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            max_iter: 50,
            tolerance: 1e-10,
            fd_step: 1e-7,
        }
    }
}

/// Settings of the connection solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectConfig {
    pub shooting: ShootingConfig,
    /// Number of samples of the bracketing grid.
    pub grid_points: usize,
    pub r_max: f64,
    /// Relative tolerance on `r` (and on `β − β₀`) for root refinement.
    pub root_tolerance: f64,
    pub root_max_iter: usize,
    pub picard_tolerance: f64,
    pub picard_max_iter: usize,
}

impl Default for ConnectConfig {
    fn default() -> Self {
        ConnectConfig {
            shooting: ShootingConfig::default(),
            grid_points: 64,
            r_max: 1e6,
            root_tolerance: 1e-13,
            root_max_iter: 200,
            picard_tolerance: 1e-10,
            picard_max_iter: 1000,
        }
    }
}

impl ConnectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(GeoError::input("grid_points must be at least 2"));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(GeoError::input("r_max must be positive and finite"));
        }
        let s = &self.shooting;
        if s.max_iter == 0 || !(s.tolerance > 0.0) || !(s.fd_step > 0.0) {
            return Err(GeoError::input(
                "shooting needs max_iter > 0, tolerance > 0 and fd_step > 0",
            ));
        }
        if !(self.root_tolerance > 0.0) || !(self.picard_tolerance > 0.0) {
            return Err(GeoError::input("tolerances must be positive"));
        }
        Ok(())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solution of a boundary-value problem for geodesics on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Shot {
    pub velocity: Vec<f64>,
    pub curve: Curve,
    pub iterations: usize,
    pub endpoint_error: f64,
}

/// Initial velocity of a geodesic of `chart` from `x0` reaching `x1` at time 1.
///
/// Damped Newton on the endpoint map with a central-difference Jacobian,
/// started from `guess` or from the coordinate difference `x1 − x0`.
pub fn shoot_boundary(
    chart: &dyn MetricChart,
    x0: &[f64],
    x1: &[f64],
    guess: Option<&[f64]>,
    cfg: &IntegratorConfig,
    sc: &ShootingConfig,
) -> Result<Shot> {
    check_dim(chart, "start point", x0)?;
    check_dim(chart, "end point", x1)?;
    ensure_in_domain(chart, x1, None)?;
    let n = chart.dim();
    let miss = |v: &[f64]| -> Result<(Vec<f64>, Curve)> {
        let c = integrate_geodesic(chart, x0, v, cfg)?;
        let res = c.end().iter().zip(x1).map(|(p, q)| p - q).collect();
        Ok((res, c))
    };
    let mut v = match guess {
        Some(g) => {
            check_dim(chart, "initial guess", g)?;
            g.to_vec()
        }
        None => x1.iter().zip(x0).map(|(a, b)| a - b).collect(),
    };
    let (mut res, mut curve) = miss(&v)?;
    let mut norm = max_abs(&res);
    let mut iterations = 0;
    while norm > sc.tolerance {
        if iterations == sc.max_iter {
            return Err(GeoError::Shooting {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let step = sc.fd_step * (1.0 + v[j].abs());
            let mut plus = v.clone();
            plus[j] += step;
            let mut minus = v.clone();
            minus[j] -= step;
            let col: Vec<f64> = match (miss(&plus), miss(&minus)) {
                (Ok((rp, _)), Ok((rm, _))) => rp
                    .iter()
                    .zip(&rm)
                    .map(|(a, b)| (a - b) / (2.0 * step))
                    .collect(),
                (Ok((rp, _)), Err(_)) => rp.iter().zip(&res).map(|(a, b)| (a - b) / step).collect(),
                (Err(_), Ok((rm, _))) => res.iter().zip(&rm).map(|(a, b)| (a - b) / step).collect(),
                (Err(_), Err(_)) => {
                    return Err(GeoError::Shooting {
                        iterations,
                        residual: norm,
                    })
                }
            };
            jac.set_column(j, &DVector::from_vec(col));
        }
        let delta =
            jac.lu()
                .solve(&-DVector::from_column_slice(&res))
                .ok_or(GeoError::Shooting {
                    iterations,
                    residual: norm,
                })?;
        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = v
                .iter()
                .zip(delta.iter())
                .map(|(a, d)| a + lambda * d)
                .collect();
            if let Ok((r, c)) = miss(&trial) {
                let m = max_abs(&r);
                if m < (1.0 - 1e-4 * lambda) * norm {
                    break Some((trial, r, c, m));
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                break None;
            }
        };
        match accepted {
            Some((trial, r, c, m)) => {
                v = trial;
                res = r;
                curve = c;
                norm = m;
            }
            None => {
                return Err(GeoError::Shooting {
                    iterations,
                    residual: norm,
                })
            }
        }
    }
    Ok(Shot {
        velocity: v,
        curve,
        iterations,
        endpoint_error: norm,
    })
}

/// Data of the first-order solve used for one-dimensional bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstIntegralReport {
    /// The constant `c_r` with `G_r(μ̇, μ̇) = c_r²`.
    pub c: f64,
    pub picard_iterations: usize,
    /// Largest gap between the differentiated samples of `μ_r` and `c_r·h(μ_r)`.
    pub residual: f64,
    pub monotone: bool,
}

/// A `G_r`-geodesic joining the base points.
#[derive(Debug, Clone)]
pub struct BaseSolution {
    pub mu: Curve,
    pub iterations: usize,
    pub endpoint_error: f64,
    pub first_integral: Option<FirstIntegralReport>,
}

/// Strategy for joining two base points by a geodesic of `G_r`.
pub trait BaseConnector: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// `warm` is a previous solution's initial velocity, if any.
    #[allow(clippy::too_many_arguments)]
    fn connect(
        &self,
        wp: &WarpedProduct,
        r: f64,
        x0: &[f64],
        x1: &[f64],
        warm: Option<&[f64]>,
        cfg: &IntegratorConfig,
        cc: &ConnectConfig,
    ) -> Result<BaseSolution>;
}

/// Newton shooting on the second-order geodesic equation; works in any dimension.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShootingConnector;

impl BaseConnector for ShootingConnector {
    fn name(&self) -> &'static str {
        "shooting"
    }

    fn connect(
        &self,
        wp: &WarpedProduct,
        r: f64,
        x0: &[f64],
        x1: &[f64],
        warm: Option<&[f64]>,
        cfg: &IntegratorConfig,
        cc: &ConnectConfig,
    ) -> Result<BaseSolution> {
        let gr = wp.conformal(r)?;
        let shot = shoot_boundary(&gr, x0, x1, warm, cfg, &cc.shooting)?;
        Ok(BaseSolution {
            mu: shot.curve,
            iterations: shot.iterations,
            endpoint_error: shot.endpoint_error,
            first_integral: None,
        })
    }
}

/// For a one-dimensional base `f·dt²` the geodesics of `G_r` obey the first
/// integral `μ̇ = c·h(μ)`, `h = (k/((1 + r·k)·f))^½`, and `c` is the fixed point
/// of `c = (x₁ − x₀)/∫₀¹ h(μ_c)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstIntegralConnector;

impl FirstIntegralConnector {
    /// `(h, h')` at `t`.
    fn speed_profile(wp: &WarpedProduct, r: f64, t: f64) -> Result<(f64, f64)> {
        let p = [t];
        ensure_in_domain(wp.g1.as_ref(), &p, None)?;
        let jet = wp.warp.jet(&p)?;
        let (k, dk) = (jet.value, jet.grad[0]);
        let f = wp.g1.metric_at(&p)?[(0, 0)];
        let df = wp.g1.metric_derivative_at(&p)?[0][(0, 0)];
        let h = (k / ((1.0 + r * k) * f)).sqrt();
        let dlog = 0.5 * (dk / (k * (1.0 + r * k)) - df / f);
        Ok((h, h * dlog))
    }

    fn integrate(
        wp: &WarpedProduct,
        r: f64,
        x0: f64,
        c: f64,
        cfg: &IntegratorConfig,
    ) -> Result<Vec<f64>> {
        let (states, _) = rk4(vec![x0], 1.0, cfg.steps, |_, y| {
            Ok(vec![c * Self::speed_profile(wp, r, y[0])?.0])
        })?;
        Ok(states.into_iter().map(|s| s[0]).collect())
    }

    fn quadrature(wp: &WarpedProduct, r: f64, samples: &[f64]) -> Result<f64> {
        let h = samples
            .iter()
            .map(|&t| Ok(Self::speed_profile(wp, r, t)?.0))
            .collect::<Result<Vec<f64>>>()?;
        Ok(simpson(&h, 1.0 / (samples.len() - 1) as f64))
    }
}

impl BaseConnector for FirstIntegralConnector {
    fn name(&self) -> &'static str {
        "first-integral"
    }

    fn connect(
        &self,
        wp: &WarpedProduct,
        r: f64,
        x0: &[f64],
        x1: &[f64],
        _warm: Option<&[f64]>,
        cfg: &IntegratorConfig,
        cc: &ConnectConfig,
    ) -> Result<BaseSolution> {
        if wp.g1.dim() != 1 {
            return Err(GeoError::input(format!(
                "the first-integral connector needs a one-dimensional base, `{}` has dimension {}",
                wp.g1.name(),
                wp.g1.dim()
            )));
        }
        if wp.warp.k_sup().is_none() {
            return Err(GeoError::input(
                "the first-integral connector needs a warp bounded from above",
            ));
        }
        check_dim(wp.g1.as_ref(), "start point", x0)?;
        check_dim(wp.g1.as_ref(), "end point", x1)?;
        wp.range().check(r)?;
        cfg.validate()?;
        let (t0, t1) = (x0[0], x1[0]);
        let dx = t1 - t0;
        let n = cfg.steps;

        let mut c = if dx == 0.0 {
            0.0
        } else {
            let line: Vec<f64> = (0..=n).map(|i| t0 + dx * i as f64 / n as f64).collect();
            dx / Self::quadrature(wp, r, &line)?
        };
        let mut iterations = 0;
        let mut relax = 1.0;
        let mut last_change = f64::INFINITY;
        let mut converged = dx == 0.0;
        while !converged {
            if iterations == cc.picard_max_iter {
                return Err(GeoError::numerical(format!(
                    "fixed point for c_r did not converge in {iterations} iterations (last change {last_change:.3e})"
                )));
            }
            iterations += 1;
            let samples = Self::integrate(wp, r, t0, c, cfg)?;
            let next = dx / Self::quadrature(wp, r, &samples)?;
            let change = (next - c).abs();
            if change <= cc.picard_tolerance * c.abs() {
                c = next;
                converged = true;
            } else {
                if change > last_change {
                    relax *= 0.5;
                }
                last_change = change;
                c += relax * (next - c);
            }
        }

        let points = Self::integrate(wp, r, t0, c, cfg)?;
        let mut velocities = Vec::with_capacity(n + 1);
        let mut accelerations = Vec::with_capacity(n + 1);
        for &t in &points {
            let (h, dh) = Self::speed_profile(wp, r, t)?;
            velocities.push(vec![c * h]);
            accelerations.push(vec![c * c * h * dh]);
        }
        let fd = derivative_fd4(&points, 1.0 / n as f64);
        let residual = fd
            .iter()
            .zip(&velocities)
            .map(|(d, v)| (d - v[0]).abs())
            .fold(0.0, f64::max);
        let monotone = dx == 0.0 || points.windows(2).all(|w| (w[1] - w[0]) * dx > 0.0);
        if !monotone {
            return Err(GeoError::numerical(
                "first-integral solution is not strictly monotone",
            ));
        }
        let endpoint_error = (points[n] - t1).abs();
        let mu = Curve::new(
            1.0,
            points.into_iter().map(|t| vec![t]).collect(),
            velocities,
            accelerations,
        )?;
        Ok(BaseSolution {
            mu,
            iterations,
            endpoint_error,
            first_integral: Some(FirstIntegralReport {
                c,
                picard_iterations: iterations,
                residual,
                monotone,
            }),
        })
    }
}

/// Connectors available by name.
pub fn builtin_connectors() -> Vec<Arc<dyn BaseConnector>> {
    vec![
        Arc::new(ShootingConnector),
        Arc::new(FirstIntegralConnector),
    ]
}

pub fn connector_by_name(name: &str) -> Result<Arc<dyn BaseConnector>> {
    builtin_connectors()
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| {
            let known: Vec<_> = builtin_connectors().iter().map(|c| c.name()).collect();
            GeoError::input(format!(
                "unknown connector `{name}` (known: {})",
                known.join(", ")
            ))
        })
}

/// `β(r)` and the data it was computed from.
#[derive(Debug, Clone, Serialize)]
pub struct BetaSample {
    pub r: f64,
    pub beta: f64,
    pub a_r: f64,
    pub b_r: f64,
    pub x_r: Vec<f64>,
    pub iterations: usize,
    pub endpoint_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_integral: Option<FirstIntegralReport>,
    #[serde(skip)]
    pub mu: Curve,
}

/// Evaluates `β(r)` using `connector` for the base problem.
#[allow(clippy::too_many_arguments)]
pub fn beta_sample(
    connector: &dyn BaseConnector,
    wp: &WarpedProduct,
    x0: &[f64],
    x1: &[f64],
    r: f64,
    warm: Option<&[f64]>,
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<BetaSample> {
    wp.range().check(r)?;
    let base = connector.connect(wp, r, x0, x1, warm, cfg, cc)?;
    let (a, b) = constants_along(&base.mu, &wp.warp, r)?;
    let k = wp.warp.value(x0)?;
    let x_r = base.mu.initial_velocity().to_vec();
    let xx = inner(&wp.g1.metric_at(x0)?, &x_r, &x_r);
    Ok(BetaSample {
        r,
        beta: a / b * ((1.0 + r * k) / k * xx).sqrt(),
        a_r: a,
        b_r: b,
        x_r,
        iterations: base.iterations,
        endpoint_error: base.endpoint_error,
        first_integral: base.first_integral,
        mu: base.mu,
    })
}

/// `β(r)` with the shooting connector and no warm start.
pub fn beta_of_r(
    wp: &WarpedProduct,
    x0: &[f64],
    x1: &[f64],
    r: f64,
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<BetaSample> {
    beta_sample(&ShootingConnector, wp, x0, x1, r, None, cfg, cc)
}

/// Geometric grid of `n` parameters from `k1 + 1e-3·(1 + |k1|)` to `r_max`,
/// uniform in `log(r − k1)`.
pub fn r_grid(range: WarpParameterRange, n: usize, r_max: f64) -> Result<Vec<f64>> {
    let lo = range.lower_probe() - range.k1;
    let hi = r_max - range.k1;
    if n < 2 || !(hi > lo) {
        return Err(GeoError::input(format!(
            "r grid needs at least 2 points and r_max > {}",
            range.lower_probe()
        )));
    }
    let ratio = (hi / lo).ln();
    Ok((0..n)
        .map(|i| match i {
            0 => range.lower_probe(),
            _ if i == n - 1 => r_max,
            _ => range.k1 + lo * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// `β` over the given parameters, each base solve warm-started from the previous one.
#[allow(clippy::too_many_arguments)]
pub fn beta_scan(
    connector: &dyn BaseConnector,
    wp: &WarpedProduct,
    x0: &[f64],
    x1: &[f64],
    rs: &[f64],
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<Vec<BetaSample>> {
    if rs.is_empty() {
        return Err(GeoError::input("r grid is empty"));
    }
    let mut out: Vec<BetaSample> = Vec::with_capacity(rs.len());
    for &r in rs {
        let warm = out.last().map(|s| s.x_r.clone());
        out.push(beta_sample(
            connector,
            wp,
            x0,
            x1,
            r,
            warm.as_deref(),
            cfg,
            cc,
        )?);
    }
    Ok(out)
}

/// Stopping rule for Brent's method: `|β − β₀| ≤ tol·β₀` or a bracket of
/// relative width `tol`.
struct RootTolerance {
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
}

impl Convergency<f64> for RootTolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.f_tol
    }

    fn is_converged(&mut self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.x_tol * (1.0 + a.abs().max(b.abs()))
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Audit trail of a connection solve.
#[derive(Debug, Clone, Serialize)]
pub struct ShootingReport {
    pub connector: String,
    /// `None` for the trivial connection with `y₀ = y₁`.
    pub r: Option<f64>,
    pub x_r: Vec<f64>,
    pub y_r: Vec<f64>,
    pub beta: f64,
    pub target_beta: f64,
    pub a_r: Option<f64>,
    pub b_r: Option<f64>,
    pub endpoint_error: f64,
    pub residual_base: f64,
    pub residual_fiber: f64,
    /// Base-solver iterations at the final parameter.
    pub iterations: usize,
    pub fiber_iterations: usize,
    pub root_evaluations: usize,
    pub scan: Vec<BetaSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_integral: Option<FirstIntegralReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<RiemannianGeodesic>,
    #[serde(skip)]
    pub gamma: Curve,
    #[serde(skip)]
    pub tau: Curve,
}

/// Joins `(x0, y0)` to `(x1, y1)` by a geodesic of `g₁ − k·g₂` obtained from a
/// product geodesic, solving `β(r) = d_{g₂}(y₀, y₁)` for `r`.
#[allow(clippy::too_many_arguments)]
pub fn connect_with(
    connector: &dyn BaseConnector,
    wp: &WarpedProduct,
    x0: &[f64],
    y0: &[f64],
    x1: &[f64],
    y1: &[f64],
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<ShootingReport> {
    cfg.validate()?;
    cc.validate()?;
    check_dim(wp.g2.as_ref(), "fiber start", y0)?;
    check_dim(wp.g2.as_ref(), "fiber end", y1)?;
    check_dim(wp.g1.as_ref(), "base start", x0)?;
    check_dim(wp.g1.as_ref(), "base end", x1)?;

    if y0 == y1 {
        return trivial_connection(connector, wp, x0, y0, x1, cfg, cc);
    }

    let fiber = shoot_boundary(wp.g2.as_ref(), y0, y1, None, cfg, &cc.shooting)?;
    let target = inner(&wp.g2.metric_at(y0)?, &fiber.velocity, &fiber.velocity).sqrt();

    let grid = r_grid(wp.range(), cc.grid_points, cc.r_max)?;
    let mut scan: Vec<BetaSample> = Vec::new();
    let mut bracket = None;
    for &r in &grid {
        let warm = scan.last().map(|s| s.x_r.clone());
        let s = beta_sample(connector, wp, x0, x1, r, warm.as_deref(), cfg, cc)?;
        let crossed = scan
            .last()
            .is_some_and(|p| (p.beta - target) * (s.beta - target) <= 0.0);
        scan.push(s);
        if crossed || scan.last().unwrap().beta == target {
            bracket = Some(scan.len() - 1);
            break;
        }
    }
    let Some(hi) = bracket else {
        let betas = scan.iter().map(|s| s.beta);
        return Err(GeoError::Bracket {
            target,
            r_min: grid[0],
            r_max: *grid.last().unwrap(),
            beta_min: betas.clone().fold(f64::INFINITY, f64::min),
            beta_max: betas.fold(f64::NEG_INFINITY, f64::max),
        });
    };

    let last = &scan[hi];
    let mut root_evaluations = 0;
    let (r0, sample) = if last.beta == target || hi == 0 {
        (last.r, last.clone())
    } else {
        let left = &scan[hi - 1];
        let mut warm = left.x_r.clone();
        let mut failure = None;
        let mut best: Option<BetaSample> = None;
        let mut conv = RootTolerance {
            f_tol: cc.root_tolerance * target,
            x_tol: cc.root_tolerance,
            max_iter: cc.root_max_iter,
        };
        let found = find_root_brent(
            left.r,
            last.r,
            |r: f64| {
                root_evaluations += 1;
                match beta_sample(connector, wp, x0, x1, r, Some(&warm), cfg, cc) {
                    Ok(s) => {
                        warm = s.x_r.clone();
                        let f = s.beta - target;
                        if best
                            .as_ref()
                            .is_none_or(|b| (b.beta - target).abs() > f.abs())
                        {
                            best = Some(s);
                        }
                        f
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &mut conv,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let r0 =
            found.map_err(|e| GeoError::numerical(format!("root refinement failed: {e:?}")))?;
        let sample = match best {
            Some(s) if s.r == r0 => s,
            _ => {
                root_evaluations += 1;
                beta_sample(connector, wp, x0, x1, r0, Some(&warm), cfg, cc)?
            }
        };
        (r0, sample)
    };

    let y = compatible_fiber_tangent(
        wp,
        x0,
        &sample.x_r,
        y0,
        &fiber.velocity,
        sample.a_r,
        sample.b_r,
        r0,
    )?;
    let nu = integrate_geodesic(wp.g2.as_ref(), y0, &y, cfg)?;
    let geodesic = riemannize(wp, &sample.mu, &nu, r0, cfg)?;
    let endpoint_error =
        max_abs_diff(geodesic.gamma.end(), x1).max(max_abs_diff(geodesic.tau.end(), y1));
    Ok(ShootingReport {
        connector: connector.name().to_string(),
        r: Some(r0),
        x_r: sample.x_r.clone(),
        y_r: y,
        beta: sample.beta,
        target_beta: target,
        a_r: Some(sample.a_r),
        b_r: Some(sample.b_r),
        endpoint_error,
        residual_base: geodesic.diagnostics.residual_base,
        residual_fiber: geodesic.diagnostics.residual_fiber,
        iterations: sample.iterations,
        fiber_iterations: fiber.iterations,
        root_evaluations,
        scan,
        first_integral: sample.first_integral,
        gamma: geodesic.gamma.clone(),
        tau: geodesic.tau.clone(),
        geodesic: Some(geodesic),
    })
}

/// With `y₀ = y₁` the fiber stays put and the base follows a plain `g₁`-geodesic.
fn trivial_connection(
    connector: &dyn BaseConnector,
    wp: &WarpedProduct,
    x0: &[f64],
    y0: &[f64],
    x1: &[f64],
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<ShootingReport> {
    let shot = shoot_boundary(wp.g1.as_ref(), x0, x1, None, cfg, &cc.shooting)?;
    let tau = Curve::constant(y0.to_vec(), cfg.steps, 1.0)?;
    let (residual_base, residual_fiber) = residual_g_system(wp, &shot.curve, &tau)?;
    Ok(ShootingReport {
        connector: connector.name().to_string(),
        r: None,
        x_r: shot.velocity,
        y_r: vec![0.0; y0.len()],
        beta: 0.0,
        target_beta: 0.0,
        a_r: None,
        b_r: None,
        endpoint_error: shot.endpoint_error,
        residual_base,
        residual_fiber,
        iterations: shot.iterations,
        fiber_iterations: 0,
        root_evaluations: 0,
        scan: Vec::new(),
        first_integral: None,
        geodesic: None,
        gamma: shot.curve,
        tau,
    })
}

/// [`connect_with`] using Newton shooting for the base.
pub fn connect_points(
    wp: &WarpedProduct,
    z0: (&[f64], &[f64]),
    z1: (&[f64], &[f64]),
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<ShootingReport> {
    connect_with(&ShootingConnector, wp, z0.0, z0.1, z1.0, z1.1, cfg, cc)
}

/// [`connect_with`] using the first integral of a one-dimensional base.
#[allow(clippy::too_many_arguments)]
pub fn flrw_connect(
    wp: &WarpedProduct,
    t0: f64,
    t1: f64,
    y0: &[f64],
    y1: &[f64],
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<ShootingReport> {
    connect_with(&FirstIntegralConnector, wp, &[t0], y0, &[t1], y1, cfg, cc)
}

/// The pair of fiber lengths `±β` reachable from a unit-speed product geodesic
/// followed for base time `α`, with the geodesics realizing them.
#[derive(Debug, Clone, Serialize)]
pub struct PartialConnection {
    pub alpha: f64,
    pub r: f64,
    pub a_r: f64,
    pub b_r: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub plus: RiemannianGeodesic,
    pub minus: RiemannianGeodesic,
}

fn unit(g: &DMatrix<f64>, v: &[f64], what: &str) -> Result<Vec<f64>> {
    let n = inner(g, v, v).sqrt();
    if !(n > 0.0) {
        return Err(GeoError::input(format!("{what} must be nonzero")));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

/// `X` and `Y` are normalized (`g₁` and `g₂` unit length) before use. The
/// base runs along the `G_r`-geodesic with initial velocity `α·X`; the fiber
/// along `±β·Y` with `β = (a/b)·((1 + r·k(x₀))/k(x₀))^½·|α|`.
#[allow(clippy::too_many_arguments)]
pub fn partial_connect(
    wp: &WarpedProduct,
    r: f64,
    x0: &[f64],
    x: &[f64],
    y0: &[f64],
    y: &[f64],
    alpha: f64,
    cfg: &IntegratorConfig,
) -> Result<PartialConnection> {
    wp.range().check(r)?;
    check_dim(wp.g1.as_ref(), "base point", x0)?;
    check_dim(wp.g1.as_ref(), "base direction", x)?;
    check_dim(wp.g2.as_ref(), "fiber point", y0)?;
    check_dim(wp.g2.as_ref(), "fiber direction", y)?;
    if !alpha.is_finite() {
        return Err(GeoError::input("alpha must be finite"));
    }
    let xu = unit(&wp.g1.metric_at(x0)?, x, "base direction")?;
    let yu = unit(&wp.g2.metric_at(y0)?, y, "fiber direction")?;
    let gr = wp.conformal(r)?;
    let v: Vec<f64> = xu.iter().map(|c| alpha * c).collect();
    let mu = integrate_geodesic(&gr, x0, &v, cfg)?;
    let (a, b) = constants_along(&mu, &wp.warp, r)?;
    let k = wp.warp.value(x0)?;
    let beta = a / b * ((1.0 + r * k) / k).sqrt() * alpha.abs();
    let build = |sign: f64| -> Result<RiemannianGeodesic> {
        let w: Vec<f64> = yu.iter().map(|c| sign * beta * c).collect();
        let nu = integrate_geodesic(wp.g2.as_ref(), y0, &w, cfg)?;
        riemannize(wp, &mu, &nu, r, cfg)
    };
    Ok(PartialConnection {
        alpha,
        r,
        a_r: a,
        b_r: b,
        beta_plus: beta,
        beta_minus: -beta,
        plus: build(1.0)?,
        minus: build(-1.0)?,
    })
}

/// True if two non-neighbouring samples of the trace come closer than half
/// the local sample spacing.
pub fn has_self_intersection(c: &Curve) -> bool {
    let pts = c.points();
    let n = pts.len();
    if c.dim() == 1 {
        let forward = pts.windows(2).all(|w| w[1][0] > w[0][0]);
        let backward = pts.windows(2).all(|w| w[1][0] < w[0][0]);
        let still = pts.windows(2).all(|w| w[1][0] == w[0][0]);
        return !(forward || backward || still);
    }
    let dist = |i: usize, j: usize| {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let spacing: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 < n {
                dist(i, i + 1)
            } else {
                dist(i - 1, i)
            }
        })
        .collect();
    if spacing.iter().all(|&s| s == 0.0) {
        return false;
    }
    (0..n).any(|i| (i + 3..n).any(|j| dist(i, j) < 0.5 * spacing[i].min(spacing[j])))
}

/// Value of `θ_r` at one base time.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaValue {
    pub t: f64,
    pub base_point: Vec<f64>,
    /// `ν_r(β(t))`, reached by a geodesic of `g₁ − k·g₂` from `(μ_r(0), ν_r(0))`.
    pub point: Vec<f64>,
    pub beta: f64,
    /// `(a/b)·((1 + r·k(x₀))/k(x₀))·t`, without the square root.
    pub beta_linear: f64,
    pub linear_point: Vec<f64>,
    /// `|β_linear − β|`; zero exactly when `(1 + r·k(x₀))/k(x₀) = 1` or `t = 0`.
    pub linear_discrepancy: f64,
    pub residual_base: f64,
    pub residual_fiber: f64,
}

/// `θ_r(μ_r(t)) = ν_r(β(t))` for unit-speed initial data.
#[allow(clippy::too_many_arguments)]
pub fn theta_map(
    wp: &WarpedProduct,
    r: f64,
    x0: &[f64],
    x: &[f64],
    y0: &[f64],
    y: &[f64],
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<ThetaValue> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GeoError::input(format!(
            "query time must be finite and non-negative, got {t}"
        )));
    }
    let pc = partial_connect(wp, r, x0, x, y0, y, t, cfg)?;
    if has_self_intersection(&pc.plus.mu) {
        return Err(GeoError::input(format!(
            "base geodesic intersects itself on [0, {t}]"
        )));
    }
    let k = wp.warp.value(x0)?;
    let beta_linear = pc.a_r / pc.b_r * (1.0 + r * k) / k * t;
    let yu = unit(&wp.g2.metric_at(y0)?, y, "fiber direction")?;
    let w: Vec<f64> = yu.iter().map(|c| beta_linear * c).collect();
    let linear_point = integrate_geodesic(wp.g2.as_ref(), y0, &w, cfg)?
        .end()
        .to_vec();
    let d = &pc.plus.diagnostics;
    Ok(ThetaValue {
        t,
        base_point: pc.plus.gamma.end().to_vec(),
        point: pc.plus.tau.end().to_vec(),
        beta: pc.beta_plus,
        beta_linear,
        linear_point,
        linear_discrepancy: (beta_linear - pc.beta_plus).abs(),
        residual_base: d.residual_base,
        residual_fiber: d.residual_fiber,
    })
}

/// Both sides of the two-sided estimate of `β²(r)` in terms of the
/// `g₁`-geodesic `γ` joining the base points with initial velocity `X`:
/// `g₁(X, X)·a/b² ≤ β² ≤ g₁(X, X)·(a²/b²)·∫₀¹ (1 + r·k(γ))/k(γ)`.
///
/// Both bounds presume that `γ` minimizes `g₁`-length and `μ_r` minimizes `G_r`-length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    pub r: f64,
    pub g1_speed_sq: f64,
    pub lower: f64,
    pub beta_sq: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn sandwich_bounds(
    wp: &WarpedProduct,
    x0: &[f64],
    x1: &[f64],
    r: f64,
    cfg: &IntegratorConfig,
    cc: &ConnectConfig,
) -> Result<SandwichBounds> {
    let plain = shoot_boundary(wp.g1.as_ref(), x0, x1, None, cfg, &cc.shooting)?;
    let s = beta_of_r(wp, x0, x1, r, cfg, cc)?;
    let f = plain
        .curve
        .points()
        .iter()
        .map(|p| {
            let k = wp.warp.value(p)?;
            Ok((1.0 + r * k) / k)
        })
        .collect::<Result<Vec<f64>>>()?;
    let integral = simpson(&f, plain.curve.step_size());
    let xx = inner(&wp.g1.metric_at(x0)?, &plain.velocity, &plain.velocity);
    let (a, b) = (s.a_r, s.b_r);
    let lower = xx * a / (b * b);
    let upper = xx * a * a / (b * b) * integral;
    let beta_sq = s.beta * s.beta;
    let slack = 1e-8 * beta_sq.max(f64::MIN_POSITIVE);
    Ok(SandwichBounds {
        r,
        g1_speed_sq: xx,
        lower,
        beta_sq,
        upper,
        lower_holds: lower <= beta_sq + slack,
        upper_holds: beta_sq <= upper + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Circle, Euclidean, PoincareHalfPlane, Sphere};
    use crate::warp::WarpField;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    fn cc() -> ConnectConfig {
        ConnectConfig::default()
    }

    fn flat_line(k: f64) -> WarpedProduct {
        WarpedProduct::new(
            Arc::new(Euclidean::new(1)),
            Arc::new(Euclidean::new(1)),
            WarpField::constant(k, 1).unwrap(),
        )
        .unwrap()
    }

    fn flrw() -> WarpedProduct {
        WarpedProduct::new(
            Arc::new(Euclidean::new(1)),
            Arc::new(Circle::new(1.0)),
            WarpField::new("2 + sin(t)", 1, 1.0, Some(3.0)).unwrap(),
        )
        .unwrap()
    }

    /// `β(r) = ∫ dt/(k(1 + r·k))^½` over `[t0, t1]` for a flat line base, by fine Simpson.
    fn flrw_beta_oracle(r: f64, t0: f64, t1: f64) -> f64 {
        let n = 1 << 16;
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                let k = 2.0 + t.sin();
                1.0 / (k * (1.0 + r * k)).sqrt()
            })
            .collect();
        simpson(&f, (t1 - t0) / n as f64)
    }

    #[test]
    fn shooting_examples() {
        let s = shoot_boundary(
            &Euclidean::new(2),
            &[0.0, 0.0],
            &[1.0, 2.0],
            None,
            &cfg(),
            &ShootingConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(s.velocity[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.velocity[1], 2.0, epsilon = 1e-12);

        let s = shoot_boundary(
            &PoincareHalfPlane,
            &[0.0, 1.0],
            &[0.0, 2.0],
            None,
            &cfg(),
            &ShootingConfig::default(),
        )
        .unwrap();
        assert!(s.endpoint_error <= 1e-8);
        assert_abs_diff_eq!(s.velocity[0], 0.0, epsilon = 1e-10);
        // unit metric at y = 1, so the coordinate speed is the hyperbolic length log 2
        assert_abs_diff_eq!(s.velocity[1], 2f64.ln(), epsilon = 1e-8);

        let wp = WarpedProduct::new(
            Arc::new(PoincareHalfPlane),
            Arc::new(Euclidean::new(1)),
            WarpField::constant(1.0, 2).unwrap(),
        )
        .unwrap();
        let gr = wp.conformal(3.0).unwrap();
        let (a, b) = ([0.0, 1.0], [1.0, 1.5]);
        let plain = shoot_boundary(
            &PoincareHalfPlane,
            &a,
            &b,
            None,
            &cfg(),
            &ShootingConfig::default(),
        )
        .unwrap();
        let scaled = shoot_boundary(&gr, &a, &b, None, &cfg(), &ShootingConfig::default()).unwrap();
        assert!(max_abs_diff(&plain.velocity, &scaled.velocity) < 1e-9);
    }

    #[test]
    fn shooting_reports_failure_with_best_residual() {
        let sc = ShootingConfig {
            max_iter: 1,
            tolerance: 1e-300,
            fd_step: 1e-7,
        };
        let err = shoot_boundary(
            &Sphere::new(2, 1.0),
            &[0.0, 0.0],
            &[3.0, 0.5],
            None,
            &cfg(),
            &sc,
        )
        .unwrap_err();
        assert!(matches!(err, GeoError::Shooting { iterations: 1, .. }));
    }

    #[test]
    fn constant_warp_beta_closed_form() {
        let wp = flat_line(1.0);
        for r in [0.0, 3.0, 8.0, 99.0] {
            let s = beta_of_r(&wp, &[0.0], &[1.0], r, &cfg(), &cc()).unwrap();
            assert_abs_diff_eq!(s.beta, 1.0 / (1.0 + r).sqrt(), epsilon = 1e-8);
        }
    }

    #[test]
    fn flrw_beta_matches_quadrature_for_both_connectors() {
        let wp = flrw();
        for r in [-0.3, 0.0, 1.0, 50.0] {
            let want = flrw_beta_oracle(r, 0.0, PI);
            for c in builtin_connectors() {
                let s =
                    beta_sample(c.as_ref(), &wp, &[0.0], &[PI], r, None, &cfg(), &cc()).unwrap();
                assert!(
                    (s.beta - want).abs() < 1e-8 * want,
                    "{} r={r}: {} vs {want}",
                    c.name(),
                    s.beta
                );
            }
        }
    }

    #[test]
    fn grid_is_geometric_in_distance_to_k1() {
        let range = WarpParameterRange { k1: -1.0 / 3.0 };
        let g = r_grid(range, 64, 1e6).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], range.lower_probe());
        assert_eq!(g[63], 1e6);
        let q: Vec<f64> = g
            .windows(2)
            .map(|w| (w[1] - range.k1) / (w[0] - range.k1))
            .collect();
        assert!(q.iter().all(|x| (x / q[0] - 1.0).abs() < 1e-9));
        assert!(r_grid(range, 1, 1e6).unwrap_err().is_validation());
        assert!(beta_scan(
            &ShootingConnector,
            &flat_line(1.0),
            &[0.0],
            &[1.0],
            &[],
            &cfg(),
            &cc()
        )
        .unwrap_err()
        .is_validation());
    }

    #[test]
    fn constant_warp_connection_recovers_r() {
        let wp = flat_line(1.0);
        let rep = connect_points(&wp, (&[0.0], &[0.0]), (&[1.0], &[0.5]), &cfg(), &cc()).unwrap();
        assert_abs_diff_eq!(rep.r.unwrap(), 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rep.target_beta, 0.5, epsilon = 1e-12);
        assert!(rep.endpoint_error < 1e-8);
    }

    #[test]
    fn equal_fiber_points_connect_trivially() {
        let wp = flrw();
        let rep = connect_points(&wp, (&[0.0], &[0.3]), (&[2.0], &[0.3]), &cfg(), &cc()).unwrap();
        assert_eq!(rep.r, None);
        assert!(rep.tau.velocities().iter().all(|v| v[0] == 0.0));
        assert!(rep.endpoint_error < 1e-10);
        assert!(rep.residual_base < 1e-8 && rep.residual_fiber == 0.0);
    }

    #[test]
    fn fiber_out_of_reach_reports_scanned_range() {
        let wp = flat_line(1.0);
        let err =
            connect_points(&wp, (&[0.0], &[0.0]), (&[0.0], &[1.0]), &cfg(), &cc()).unwrap_err();
        assert!(matches!(err, GeoError::Bracket { beta_max, .. } if beta_max == 0.0));
    }

    #[test]
    fn flrw_solvers_agree() {
        let wp = flrw();
        let fi = flrw_connect(&wp, 0.0, PI, &[0.0], &[1.0], &cfg(), &cc()).unwrap();
        let sh = connect_points(&wp, (&[0.0], &[0.0]), (&[PI], &[1.0]), &cfg(), &cc()).unwrap();
        let (r1, r2) = (fi.r.unwrap(), sh.r.unwrap());
        assert!((r1 - r2).abs() <= 1e-4, "{r1} vs {r2}");
        for rep in [&fi, &sh] {
            assert!(rep.endpoint_error <= 1e-6);
            assert!(rep.residual_base <= 1e-5 && rep.residual_fiber <= 1e-5);
        }
        let first = fi.first_integral.unwrap();
        assert!(first.monotone && first.residual <= 1e-8);
        // c_r = ∫ dt/h(t) over [t0, t1]
        let r = r1;
        let n = 1 << 16;
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                let k = 2.0 + (PI * i as f64 / n as f64).sin();
                ((1.0 + r * k) / k).sqrt()
            })
            .collect();
        assert_abs_diff_eq!(first.c, simpson(&f, PI / n as f64), epsilon = 1e-9);
    }

    #[test]
    fn first_integral_constant_warp() {
        let wp = WarpedProduct::new(
            Arc::new(Euclidean::new(1)),
            Arc::new(Circle::new(1.0)),
            WarpField::constant(1.0, 1).unwrap(),
        )
        .unwrap();
        for r in [0.0, 2.0] {
            let s = FirstIntegralConnector
                .connect(&wp, r, &[0.5], &[2.0], None, &cfg(), &cc())
                .unwrap();
            let c = s.first_integral.unwrap().c;
            assert_abs_diff_eq!(c, 1.5 * (1.0 + r).sqrt(), epsilon = 1e-12);
            assert!(s.endpoint_error < 1e-12);
        }
        let plane = WarpedProduct::new(
            Arc::new(Euclidean::new(2)),
            Arc::new(Circle::new(1.0)),
            WarpField::constant(1.0, 2).unwrap(),
        )
        .unwrap();
        assert!(FirstIntegralConnector
            .connect(&plane, 0.0, &[0.0, 0.0], &[1.0, 0.0], None, &cfg(), &cc())
            .unwrap_err()
            .is_validation());
        assert!(connector_by_name("first-integral").is_ok());
        assert!(connector_by_name("newton").unwrap_err().is_validation());
    }

    #[test]
    fn partial_connection_examples() {
        let wp = flat_line(1.0);
        let pc = partial_connect(&wp, 1.0, &[0.0], &[1.0], &[0.0], &[1.0], 0.0, &cfg()).unwrap();
        assert_eq!((pc.beta_plus, pc.beta_minus), (0.0, 0.0));
        for (r, alpha) in [(0.0, 2.0), (3.0, -1.5)] {
            let pc =
                partial_connect(&wp, r, &[0.0], &[4.0], &[0.0], &[2.0], alpha, &cfg()).unwrap();
            assert_abs_diff_eq!(
                pc.beta_plus,
                alpha.abs() / (1.0 + r).sqrt(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(pc.minus.tau.end()[0], -pc.beta_plus, epsilon = 1e-12);
        }

        let wp = flrw();
        let pc = partial_connect(&wp, 0.0, &[0.0], &[1.0], &[0.0], &[1.0], PI, &cfg()).unwrap();
        let reached = pc.plus.gamma.end()[0];
        assert!((pc.beta_plus - flrw_beta_oracle(0.0, 0.0, reached)).abs() < 1e-8);
        for g in [&pc.plus, &pc.minus] {
            assert!(g.diagnostics.residual_base <= 1e-5 && g.diagnostics.residual_fiber <= 1e-5);
            assert_eq!(g.gamma.end()[0], reached);
        }
        assert_abs_diff_eq!(pc.plus.tau.end()[0], pc.beta_plus, epsilon = 1e-10);
    }

    #[test]
    fn theta_map_examples() {
        let wp = WarpedProduct::new(
            Arc::new(PoincareHalfPlane),
            Arc::new(Circle::new(1.0)),
            WarpField::new("2 + 0.5*sin(x1)", 2, 1.5, Some(2.5)).unwrap(),
        )
        .unwrap();
        let (x0, x, y0, y) = ([0.0, 1.0], [1.0, 0.5], [0.2], [1.0]);
        let z = theta_map(&wp, 0.4, &x0, &x, &y0, &y, 0.0, &cfg()).unwrap();
        assert_eq!(z.point, y0.to_vec());
        for t in [0.5, 1.0, 2.0] {
            let z = theta_map(&wp, 0.4, &x0, &x, &y0, &y, t, &cfg()).unwrap();
            assert!(z.residual_base <= 1e-5 && z.residual_fiber <= 1e-5);
            assert_abs_diff_eq!(z.point[0], y0[0] + z.beta, epsilon = 1e-10);
            assert!(z.linear_discrepancy > 0.0);
        }
        assert!(theta_map(&wp, 0.4, &x0, &x, &y0, &y, -1.0, &cfg())
            .unwrap_err()
            .is_validation());

        // with k ≡ 1 and r = 0 the two readings of β coincide
        let one = flat_line(1.0);
        let z = theta_map(&one, 0.0, &[0.0], &[1.0], &[0.0], &[1.0], 2.5, &cfg()).unwrap();
        assert_abs_diff_eq!(z.beta, 2.5, epsilon = 1e-12);
        assert!(z.linear_discrepancy < 1e-12);
    }

    #[test]
    fn self_intersections_are_detected() {
        let sphere = WarpedProduct::new(
            Arc::new(Sphere::new(2, 1.0)),
            Arc::new(Circle::new(1.0)),
            WarpField::constant(1.0, 2).unwrap(),
        )
        .unwrap();
        // the unit circle of the chart is the equator; go once around and a bit more
        let around = 2.0 * PI + 1.0;
        let err = theta_map(
            &sphere,
            0.0,
            &[0.0, -1.0],
            &[1.0, 0.0],
            &[0.0],
            &[1.0],
            around,
            &cfg(),
        )
        .unwrap_err();
        assert!(err.is_validation());
        assert!(theta_map(
            &sphere,
            0.0,
            &[0.0, -1.0],
            &[1.0, 0.0],
            &[0.0],
            &[1.0],
            FRAC_PI_2,
            &cfg()
        )
        .is_ok());
    }

    #[test]
    fn sandwich_bounds_hold() {
        let wp = flrw();
        for r in [-0.3, 0.0, 2.0, 100.0] {
            let s = sandwich_bounds(&wp, &[0.0], &[PI], r, &cfg(), &cc()).unwrap();
            assert!(s.lower_holds && s.upper_holds, "{s:?}");
        }
        let hp = WarpedProduct::new(
            Arc::new(PoincareHalfPlane),
            Arc::new(Circle::new(1.0)),
            WarpField::new("2 + 0.5*sin(x1)", 2, 1.5, Some(2.5)).unwrap(),
        )
        .unwrap();
        for r in [-0.35, 1.0] {
            let s = sandwich_bounds(&hp, &[0.0, 1.0], &[1.5, 2.0], r, &cfg(), &cc()).unwrap();
            assert!(s.lower_holds && s.upper_holds, "{s:?}");
        }
    }
}
