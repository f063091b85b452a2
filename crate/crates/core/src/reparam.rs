//! Reparametrizing product geodesics of `G_r + g₂` into geodesics of `g₁ − k·g₂`.
//!
//! Given a geodesic `μ` of `G_r` and a geodesic `ν` of `g₂`, both on `[0, 1]`,
//! the base is re-timed by `φ` with `φ̇ = a·(1 + r·k)/k ∘ μ ∘ φ` and the fiber
//! by `ψ` with `ψ̇ = b/(k ∘ γ)`. When the initial speeds satisfy
//! `a²(1 + r·k(x₀))/k(x₀)·g₁(X, X) = b²·g₂(Y, Y)` the pair `(μ∘φ, ν∘ψ)` is a
//! geodesic of the warped metric.

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::integrate::{
    fiber_invariant, integrate_g_geodesic_oracle, integrate_geodesic, residual_g_system, Curve,
    IntegratorConfig,
};
use crate::manifold::{check_dim, inner};
use crate::numeric::{cumulative_simpson, derivative_fd4, simpson, MonotoneCubic};
use crate::warp::{WarpField, WarpedProduct};

/// Default relative tolerance of the compatibility condition.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Strictly increasing map of `[0, 1]` onto itself sampled on a uniform grid,
/// with the scalar constant that normalizes it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneMap {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub second_derivatives: Vec<f64>,
    pub constant: f64,
}

impl MonotoneMap {
    pub fn identity(steps: usize, constant: f64) -> Self {
        let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
        MonotoneMap {
            values: grid.clone(),
            derivatives: vec![1.0; steps + 1],
            second_derivatives: vec![0.0; steps + 1],
            grid,
            constant,
        }
    }

    pub fn steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Largest gap between the stored derivative and a finite-difference
    /// derivative of the stored values.
    pub fn derivative_defect(&self) -> f64 {
        let h = 1.0 / self.steps() as f64;
        derivative_fd4(&self.values, h)
            .iter()
            .zip(&self.derivatives)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn require_unit_span(c: &Curve, what: &str) -> Result<()> {
    if (c.span() - 1.0).abs() > 1e-12 {
        return Err(GeoError::input(format!(
            "{what} must be parametrized on [0, 1], got [0, {}]",
            c.span()
        )));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a_r = ∫₀¹ k/(1 + r·k) ∘ μ` and the map `φ_r`.
pub fn compute_a_and_phi(mu: &Curve, w: &WarpField, r: f64) -> Result<MonotoneMap> {
    require_unit_span(mu, "base curve")?;
    w.admissible_range().check(r)?;
    let steps = mu.steps();
    let h = mu.step_size();
    let f = mu
        .points()
        .iter()
        .map(|p| {
            let k = w.value(p)?;
            Ok(k / (1.0 + r * k))
        })
        .collect::<Result<Vec<f64>>>()?;
    let cum = cumulative_simpson(&f, h);
    let a = cum[steps];
    let grid = mu.params().to_vec();
    let inverse = MonotoneCubic::new(
        grid.clone(),
        cum.iter().map(|c| c / a).collect(),
        f.iter().map(|x| x / a).collect(),
    )?;
    let mut values = Vec::with_capacity(steps + 1);
    let mut derivatives = Vec::with_capacity(steps + 1);
    let mut second = Vec::with_capacity(steps + 1);
    for (i, &t) in grid.iter().enumerate() {
        let s = match i {
            0 => 0.0,
            _ if i == steps => 1.0,
            _ => inverse.inverse(t),
        };
        let at = mu.eval(s)?;
        let jet = w.jet(&at.point)?;
        let k = jet.value;
        let d = a * (1.0 + r * k) / k;
        let dk_mu = dot(&jet.gradient(w.dim()), &at.velocity);
        values.push(s);
        derivatives.push(d);
        second.push(-a * dk_mu / (k * k) * d);
    }
    Ok(MonotoneMap {
        grid,
        values,
        derivatives,
        second_derivatives: second,
        constant: a,
    })
}

/// `b = (∫₀¹ 1/k ∘ γ)⁻¹` and the map `ψ`.
pub fn compute_b_and_psi(gamma: &Curve, w: &WarpField) -> Result<MonotoneMap> {
    require_unit_span(gamma, "base curve")?;
    let h = gamma.step_size();
    let mut inv_k = Vec::with_capacity(gamma.steps() + 1);
    let mut second = Vec::with_capacity(gamma.steps() + 1);
    for (p, v) in gamma.points().iter().zip(gamma.velocities()) {
        let jet = w.jet(p)?;
        inv_k.push(1.0 / jet.value);
        second.push(-dot(&jet.gradient(w.dim()), v) / (jet.value * jet.value));
    }
    let cum = cumulative_simpson(&inv_k, h);
    let b = 1.0 / cum[gamma.steps()];
    let mut values: Vec<f64> = cum.iter().map(|c| b * c).collect();
    *values.last_mut().unwrap() = 1.0;
    Ok(MonotoneMap {
        grid: gamma.params().to_vec(),
        values,
        derivatives: inv_k.iter().map(|x| b * x).collect(),
        second_derivatives: second.iter().map(|x| b * x).collect(),
        constant: b,
    })
}

/// `curve ∘ map`, with velocities and accelerations by the chain rule.
pub fn reparametrize(curve: &Curve, map: &MonotoneMap) -> Result<Curve> {
    require_unit_span(curve, "curve")?;
    if map.steps() != curve.steps() {
        return Err(GeoError::input("map and curve must share their grid"));
    }
    let mut points = Vec::with_capacity(map.values.len());
    let mut velocities = Vec::with_capacity(map.values.len());
    let mut accelerations = Vec::with_capacity(map.values.len());
    for i in 0..map.values.len() {
        let s = map.values[i];
        if !(0.0..=1.0).contains(&s) {
            return Err(GeoError::input(format!(
                "map value {s} requires extrapolating the curve"
            )));
        }
        let (d, dd) = (map.derivatives[i], map.second_derivatives[i]);
        let at = curve.eval(s)?;
        velocities.push(at.velocity.iter().map(|v| v * d).collect());
        accelerations.push(
            at.acceleration
                .iter()
                .zip(&at.velocity)
                .map(|(a, v)| a * d * d + v * dd)
                .collect(),
        );
        points.push(at.point);
    }
    Curve::new(1.0, points, velocities, accelerations)
}

/// Both sides of the compatibility condition at the initial point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Compatibility {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

/// Checks `a²(1 + r·k(x₀))/k(x₀)·g₁(X, X) = b²·g₂(Y, Y)` to relative tolerance `tol`.
#[allow(clippy::too_many_arguments)]
pub fn check_compatibility(
    wp: &WarpedProduct,
    x0: &[f64],
    x: &[f64],
    y0: &[f64],
    y: &[f64],
    a: f64,
    b: f64,
    r: f64,
    tol: f64,
) -> Result<Compatibility> {
    check_dim(wp.g1.as_ref(), "base point", x0)?;
    check_dim(wp.g1.as_ref(), "base tangent", x)?;
    check_dim(wp.g2.as_ref(), "fiber point", y0)?;
    check_dim(wp.g2.as_ref(), "fiber tangent", y)?;
    wp.range().check(r)?;
    let k = wp.warp.value(x0)?;
    let lhs = a * a * (1.0 + r * k) / k * inner(&wp.g1.metric_at(x0)?, x, x);
    let rhs = b * b * inner(&wp.g2.metric_at(y0)?, y, y);
    let defect = lhs - rhs;
    Ok(Compatibility {
        satisfied: defect.abs() <= tol * lhs.max(rhs).max(1.0),
        lhs,
        rhs,
        defect,
    })
}

/// `X̃ = a(1 + r·k(x₀))/k(x₀)·X` and `Ỹ = (b/k(x₀))·Y`.
pub fn tangent_transform(
    w: &WarpField,
    x0: &[f64],
    x: &[f64],
    y: &[f64],
    a: f64,
    b: f64,
    r: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    w.admissible_range().check(r)?;
    let k = w.value(x0)?;
    let sx = a * (1.0 + r * k) / k;
    let sy = b / k;
    Ok((
        x.iter().map(|v| sx * v).collect(),
        y.iter().map(|v| sy * v).collect(),
    ))
}

/// The parameter `r` for which a geodesic of `g₁ − k·g₂` with initial tangents
/// `(X̃, Ỹ)` arises from the construction, or `None` when the strict
/// inequality fails.
pub fn classify_riemannian(
    wp: &WarpedProduct,
    x0: &[f64],
    xt: &[f64],
    y0: &[f64],
    yt: &[f64],
) -> Result<Option<f64>> {
    check_dim(wp.g1.as_ref(), "base point", x0)?;
    check_dim(wp.g1.as_ref(), "base tangent", xt)?;
    check_dim(wp.g2.as_ref(), "fiber point", y0)?;
    check_dim(wp.g2.as_ref(), "fiber tangent", yt)?;
    let q = inner(&wp.g2.metric_at(y0)?, yt, yt);
    if !(q > 0.0) {
        return Err(GeoError::input("fiber tangent must be nonzero"));
    }
    let k = wp.warp.value(x0)?;
    let lhs = inner(&wp.g1.metric_at(x0)?, xt, xt);
    let threshold = match wp.warp.k_sup() {
        Some(sup) => k * q * (sup - k) / sup,
        None => k * q,
    };
    if lhs <= threshold {
        return Ok(None);
    }
    let r = lhs / (k * k * q) - 1.0 / k;
    Ok(wp.range().contains(r).then_some(r))
}

/// Measured quality of a constructed geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub residual_base: f64,
    pub residual_fiber: f64,
    pub compatibility: Compatibility,
    /// `g₁(X̃, X̃) − k(x₀)(1 + r·k(x₀))·g₂(Ỹ, Ỹ)`, relative to the larger side.
    pub transformed_defect: f64,
    /// Largest deviation of `g₁(γ̇, γ̇)` from its predicted profile along the curve.
    pub base_norm_identity: f64,
    /// Largest deviation of `k(γ)²·g₂(τ̇, τ̇)` from `b²·g₂(Y, Y)`.
    pub fiber_norm_identity: f64,
    pub fiber_invariant_drift: f64,
    /// Relative gap between `b` and the same constant computed along `μ`.
    pub b_cross_check: f64,
    /// `|1/a − 1/b − r|`; the two constants are tied by this identity along `γ`.
    pub ab_identity: f64,
    /// Largest gap between `ψ` and its `μ`-based counterpart composed with `φ`.
    pub psi_cross_check: f64,
    pub phi_derivative_defect: f64,
    pub psi_derivative_defect: f64,
    pub endpoint_gap: f64,
    /// Gap between `(γ̇(0), τ̇(0))` and the transformed tangents.
    pub tangent_gap: f64,
}

/// A geodesic of `g₁ − k·g₂` built from a product geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct RiemannianGeodesic {
    pub r: f64,
    pub a_r: f64,
    pub b_r: f64,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub x_r: Vec<f64>,
    pub y_r: Vec<f64>,
    pub x_tilde: Vec<f64>,
    pub y_tilde: Vec<f64>,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub mu: Curve,
    #[serde(skip)]
    pub nu: Curve,
    #[serde(skip)]
    pub gamma: Curve,
    #[serde(skip)]
    pub tau: Curve,
    #[serde(skip)]
    pub phi: MonotoneMap,
    #[serde(skip)]
    pub psi: MonotoneMap,
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Constant `b` recomputed along `μ`: `1/b = (1/a)∫₀¹ 1/(1 + r·k ∘ μ)`,
/// together with the running integral used for the `ψ` cross-check.
fn b_from_base(mu: &Curve, w: &WarpField, r: f64, a: f64) -> Result<(f64, Vec<f64>)> {
    let f = mu
        .points()
        .iter()
        .map(|p| Ok(1.0 / (1.0 + r * w.value(p)?)))
        .collect::<Result<Vec<f64>>>()?;
    let cum = cumulative_simpson(&f, mu.step_size());
    Ok((a / cum[mu.steps()], f))
}

/// Assembles the geodesic `(μ∘φ, ν∘ψ)` of `g₁ − k·g₂` and measures it.
///
/// Fails with a compatibility error if the initial speeds violate the
/// compatibility condition, and with a numerical error if the assembled
/// curves miss the geodesic equations by more than `cfg.tolerance`.
pub fn riemannize(
    wp: &WarpedProduct,
    mu: &Curve,
    nu: &Curve,
    r: f64,
    cfg: &IntegratorConfig,
) -> Result<RiemannianGeodesic> {
    wp.range().check(r)?;
    require_unit_span(mu, "base curve")?;
    require_unit_span(nu, "fiber curve")?;
    if mu.steps() != nu.steps() {
        return Err(GeoError::input(
            "base and fiber curves must share their grid",
        ));
    }
    check_dim(wp.g1.as_ref(), "base curve", mu.start())?;
    check_dim(wp.g2.as_ref(), "fiber curve", nu.start())?;
    let w = wp.warp.as_ref();
    let (x0, y0) = (mu.start().to_vec(), nu.start().to_vec());
    let (x_r, y_r) = (
        mu.initial_velocity().to_vec(),
        nu.initial_velocity().to_vec(),
    );

    let phi = compute_a_and_phi(mu, w, r)?;
    let gamma = reparametrize(mu, &phi)?;
    let psi = compute_b_and_psi(&gamma, w)?;
    let tau = reparametrize(nu, &psi)?;
    let (a, b) = (phi.constant, psi.constant);

    let compatibility = check_compatibility(wp, &x0, &x_r, &y0, &y_r, a, b, r, COMPATIBILITY_TOL)?;
    if !compatibility.satisfied {
        return Err(GeoError::Compatibility {
            defect: compatibility.defect,
        });
    }
    let (residual_base, residual_fiber) = residual_g_system(wp, &gamma, &tau)?;
    if residual_base.max(residual_fiber) > cfg.tolerance {
        return Err(GeoError::numerical(format!(
            "assembled curve misses the geodesic equations: residuals {residual_base:.3e}, {residual_fiber:.3e} exceed {:.3e}",
            cfg.tolerance
        )));
    }

    let (x_tilde, y_tilde) = tangent_transform(w, &x0, &x_r, &y_r, a, b, r)?;
    let k0 = w.value(&x0)?;
    let g1_0 = wp.g1.metric_at(&x0)?;
    let g2_0 = wp.g2.metric_at(&y0)?;
    let lt = inner(&g1_0, &x_tilde, &x_tilde);
    let rt = k0 * (1.0 + r * k0) * inner(&g2_0, &y_tilde, &y_tilde);
    let transformed_defect = (lt - rt).abs() / lt.max(rt).max(f64::MIN_POSITIVE);

    let xx = inner(&g1_0, &x_r, &x_r);
    let yy = inner(&g2_0, &y_r, &y_r);
    let mut base_norm_identity = 0.0_f64;
    for (p, v) in gamma.points().iter().zip(gamma.velocities()) {
        let k = w.value(p)?;
        let predicted = a * a * (1.0 + r * k0) * (1.0 + r * k) / (k0 * k) * xx;
        base_norm_identity =
            base_norm_identity.max((inner(&wp.g1.metric_at(p)?, v, v) - predicted).abs());
    }
    let invariant = fiber_invariant(wp, &gamma, &tau)?;
    let fiber_norm_identity = invariant
        .iter()
        .map(|v| (v - b * b * yy).abs())
        .fold(0.0, f64::max);
    let fiber_invariant_drift = invariant
        .iter()
        .map(|v| (v - invariant[0]).abs())
        .fold(0.0, f64::max);

    let (b_mu, f_mu) = b_from_base(mu, w, r, a)?;
    let cum_mu = cumulative_simpson(&f_mu, mu.step_size());
    let psi_mu = MonotoneCubic::new(
        mu.params().to_vec(),
        cum_mu.iter().map(|c| c * b / a).collect(),
        f_mu.iter().map(|x| x * b / a).collect(),
    )?;
    let psi_cross_check = phi
        .values
        .iter()
        .zip(&psi.values)
        .map(|(s, p)| (psi_mu.eval(*s) - p).abs())
        .fold(0.0, f64::max);

    let endpoint_gap = max_gap(gamma.end(), mu.end()).max(max_gap(tau.end(), nu.end()));
    let tangent_gap =
        max_gap(gamma.initial_velocity(), &x_tilde).max(max_gap(tau.initial_velocity(), &y_tilde));

    let diagnostics = Diagnostics {
        residual_base,
        residual_fiber,
        compatibility,
        transformed_defect,
        base_norm_identity,
        fiber_norm_identity,
        fiber_invariant_drift,
        b_cross_check: (b - b_mu).abs() / b,
        ab_identity: (1.0 / a - 1.0 / b - r).abs(),
        psi_cross_check,
        phi_derivative_defect: phi.derivative_defect(),
        psi_derivative_defect: psi.derivative_defect(),
        endpoint_gap,
        tangent_gap,
    };
    Ok(RiemannianGeodesic {
        r,
        a_r: a,
        b_r: b,
        x0,
        y0,
        x_r,
        y_r,
        x_tilde,
        y_tilde,
        diagnostics,
        mu: mu.clone(),
        nu: nu.clone(),
        gamma,
        tau,
        phi,
        psi,
    })
}

/// Constants `(a_r, b_r)` along the `G_r`-geodesic `μ`.
pub fn constants_along(mu: &Curve, w: &WarpField, r: f64) -> Result<(f64, f64)> {
    let phi = compute_a_and_phi(mu, w, r)?;
    let gamma = reparametrize(mu, &phi)?;
    Ok((phi.constant, compute_b_and_psi(&gamma, w)?.constant))
}

/// Runs the whole construction from `G_r` initial data: `X` is used as given and
/// `Y` is rescaled (keeping its direction) so that the compatibility condition holds.
#[allow(clippy::too_many_arguments)]
pub fn construct(
    wp: &WarpedProduct,
    r: f64,
    x0: &[f64],
    x: &[f64],
    y0: &[f64],
    y_direction: &[f64],
    cfg: &IntegratorConfig,
) -> Result<RiemannianGeodesic> {
    let gr = wp.conformal(r)?;
    let mu = integrate_geodesic(&gr, x0, x, cfg)?;
    let (a, b) = constants_along(&mu, &wp.warp, r)?;
    let y = compatible_fiber_tangent(wp, x0, x, y0, y_direction, a, b, r)?;
    let nu = integrate_geodesic(wp.g2.as_ref(), y0, &y, cfg)?;
    riemannize(wp, &mu, &nu, r, cfg)
}

/// Rescales `direction` so that it satisfies the compatibility condition with `X`.
#[allow(clippy::too_many_arguments)]
pub fn compatible_fiber_tangent(
    wp: &WarpedProduct,
    x0: &[f64],
    x: &[f64],
    y0: &[f64],
    direction: &[f64],
    a: f64,
    b: f64,
    r: f64,
) -> Result<Vec<f64>> {
    check_dim(wp.g2.as_ref(), "fiber direction", direction)?;
    let dd = inner(&wp.g2.metric_at(y0)?, direction, direction);
    if !(dd > 0.0) {
        return Err(GeoError::input("fiber direction must be nonzero"));
    }
    let k = wp.warp.value(x0)?;
    let target = a * a * (1.0 + r * k) / (k * b * b) * inner(&wp.g1.metric_at(x0)?, x, x);
    let s = (target / dd).sqrt();
    Ok(direction.iter().map(|v| s * v).collect())
}

/// Initial data `(X_r, Y_r)` of the product geodesic whose construction yields
/// the geodesic of `g₁ − k·g₂` with initial tangents `(X̃, Ỹ)`.
///
/// The constants are read off the target geodesic itself:
/// `1/a = ∫₀¹ (1/k + r) ∘ γ̃` and `1/b = ∫₀¹ 1/k ∘ γ̃`.
#[allow(clippy::too_many_arguments)]
pub fn product_tangents_for(
    wp: &WarpedProduct,
    r: f64,
    x0: &[f64],
    xt: &[f64],
    y0: &[f64],
    yt: &[f64],
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    wp.range().check(r)?;
    let (gamma, _) = integrate_g_geodesic_oracle(wp, x0, xt, y0, yt, cfg)?;
    let w = wp.warp.as_ref();
    let inv_k = gamma
        .points()
        .iter()
        .map(|p| Ok(1.0 / w.value(p)?))
        .collect::<Result<Vec<f64>>>()?;
    let b = 1.0 / simpson(&inv_k, gamma.step_size());
    let a = b / (1.0 + r * b);
    let k0 = w.value(x0)?;
    let sx = k0 / (a * (1.0 + r * k0));
    let sy = k0 / b;
    Ok((
        xt.iter().map(|v| sx * v).collect(),
        yt.iter().map(|v| sy * v).collect(),
    ))
}
