use serde::{Deserialize, Serialize};
use warpgeo::integrate::{
    fiber_invariant, geodesic_residual, integrate_g_geodesic_oracle, integrate_geodesic,
    integrate_product_geodesic, residual_g_system, speed_drift, Curve,
};
use warpgeo::manifold::MetricChart;
use warpgeo::reparam::{
    classify_riemannian, construct, product_tangents_for, riemannize, RiemannianGeodesic,
};

use super::{params, Context, Task};
use crate::error::CliError;
use crate::output::{num, vec_text, Artifacts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
enum System {
    /// Geodesic of `g₁`.
    Base,
    /// Geodesic of `g₂`.
    Fiber,
    /// Geodesic of `G_r`.
    Conformal,
    /// Geodesic of `G_r + g₂`.
    Product,
    /// Geodesic of `g₁ − k·g₂`.
    Warped,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegrateParams {
    system: System,
    x0: Vec<f64>,
    v0: Vec<f64>,
    y0: Option<Vec<f64>>,
    w0: Option<Vec<f64>>,
    r: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CurveReport {
    name: String,
    start: Vec<f64>,
    end: Vec<f64>,
    initial_velocity: Vec<f64>,
    /// Largest deviation of the squared speed from its initial value.
    speed_drift: f64,
    /// Max-norm residual of the geodesic equation.
    residual: f64,
}

#[derive(Debug, Serialize)]
struct WarpedReport {
    residual_base: f64,
    residual_fiber: f64,
    /// Spread of `k(γ)²·g₂(τ̇, τ̇)` along the curve.
    fiber_invariant_drift: f64,
}

#[derive(Debug, Serialize)]
struct IntegrateReport {
    system: System,
    r: Option<f64>,
    steps: usize,
    curves: Vec<CurveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warped: Option<WarpedReport>,
}

fn curve_report(name: &str, chart: &dyn MetricChart, c: &Curve) -> Result<CurveReport, CliError> {
    Ok(CurveReport {
        name: name.to_string(),
        start: c.start().to_vec(),
        end: c.end().to_vec(),
        initial_velocity: c.initial_velocity().to_vec(),
        speed_drift: speed_drift(chart, c)?,
        residual: geodesic_residual(chart, c)?,
    })
}

fn required<T: Clone>(task: &str, key: &str, v: &Option<T>) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::config(format!("task `{task}` needs `{key}` for this system")))
}

/// Integrates one geodesic on `[0, 1]` and measures it.
#[derive(Debug)]
pub struct IntegrateTask;

impl Task for IntegrateTask {
    fn name(&self) -> &'static str {
        "integrate"
    }

    fn about(&self) -> &'static str {
        "integrate a geodesic of g1, g2, G_r, G_r + g2 or g1 - k g2"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: IntegrateParams = params(self.name(), table)?;
        let wp = &ctx.problem;
        let cfg = &ctx.integrator;
        let mut out = Artifacts::default();
        let mut curves = Vec::new();
        let mut warped = None;
        let r = match p.system {
            System::Conformal | System::Product => Some(required(self.name(), "r", &p.r)?),
            _ => None,
        };
        match p.system {
            System::Base | System::Fiber => {
                let chart = if p.system == System::Base {
                    &wp.g1
                } else {
                    &wp.g2
                };
                let c = integrate_geodesic(chart.as_ref(), &p.x0, &p.v0, cfg)?;
                curves.push(curve_report("curve", chart.as_ref(), &c)?);
                out.curve("curve", &c);
            }
            System::Conformal => {
                let gr = wp.conformal(r.unwrap_or_default())?;
                let c = integrate_geodesic(&gr, &p.x0, &p.v0, cfg)?;
                curves.push(curve_report("curve", &gr, &c)?);
                out.curve("curve", &c);
            }
            System::Product => {
                let gr = wp.conformal(r.unwrap_or_default())?;
                let (y0, w0) = (
                    required(self.name(), "y0", &p.y0)?,
                    required(self.name(), "w0", &p.w0)?,
                );
                let (mu, nu) =
                    integrate_product_geodesic(&gr, wp.g2.as_ref(), &p.x0, &p.v0, &y0, &w0, cfg)?;
                curves.push(curve_report("mu", &gr, &mu)?);
                curves.push(curve_report("nu", wp.g2.as_ref(), &nu)?);
                out.curve("mu", &mu);
                out.curve("nu", &nu);
            }
            System::Warped => {
                let (y0, w0) = (
                    required(self.name(), "y0", &p.y0)?,
                    required(self.name(), "w0", &p.w0)?,
                );
                let (gamma, tau) = integrate_g_geodesic_oracle(wp, &p.x0, &p.v0, &y0, &w0, cfg)?;
                let (residual_base, residual_fiber) = residual_g_system(wp, &gamma, &tau)?;
                let inv = fiber_invariant(wp, &gamma, &tau)?;
                let lo = inv.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = inv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                warped = Some(WarpedReport {
                    residual_base,
                    residual_fiber,
                    fiber_invariant_drift: hi - lo,
                });
                out.curve("gamma", &gamma);
                out.curve("tau", &tau);
            }
        }
        out.line(
            format!(
                "task integrate ({:?} system, {} steps)",
                p.system, cfg.steps
            )
            .to_lowercase(),
        );
        for c in &curves {
            out.line(format!(
                "{}: end {}, speed drift {}, residual {}",
                c.name,
                vec_text(&c.end),
                num(c.speed_drift),
                num(c.residual)
            ));
        }
        if let Some(w) = &warped {
            out.line(format!(
                "g-system residuals: base {}, fiber {}; fiber invariant drift {}",
                num(w.residual_base),
                num(w.residual_fiber),
                num(w.fiber_invariant_drift)
            ));
        }
        out.json(
            "report.json",
            &IntegrateReport {
                system: p.system,
                r,
                steps: cfg.steps,
                curves,
                warped,
            },
        )?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    /// `x`, `y` are product initial data `(X_r, Y_r)`.
    #[default]
    Product,
    /// `x`, `y` are target tangents `(X̃, Ỹ)` of the geodesic of `g₁ − k·g₂`.
    Target,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiemannizeParams {
    #[serde(default)]
    mode: Mode,
    r: Option<f64>,
    x0: Vec<f64>,
    x: Vec<f64>,
    y0: Vec<f64>,
    y: Vec<f64>,
    /// In product mode, rescale `y` to satisfy the compatibility condition.
    #[serde(default = "yes")]
    rescale_fiber: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct RiemannizeReport<'a> {
    mode: Mode,
    /// In target mode, the parameter given by the classification inequality.
    classified_r: Option<f64>,
    /// In target mode, the largest gap to an independent integration of `g₁ − k·g₂`.
    oracle_gap: Option<f64>,
    geodesic: &'a RiemannianGeodesic,
}

/// Builds a geodesic of `g₁ − k·g₂` from a geodesic of `G_r + g₂`.
#[derive(Debug)]
pub struct RiemannizeTask;

impl Task for RiemannizeTask {
    fn name(&self) -> &'static str {
        "riemannize"
    }

    fn about(&self) -> &'static str {
        "construct a geodesic of g1 - k g2 by reparametrizing a product geodesic"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: RiemannizeParams = params(self.name(), table)?;
        let wp = &ctx.problem;
        let cfg = &ctx.integrator;
        let (geodesic, classified_r, oracle_gap) = match p.mode {
            Mode::Product => {
                let r = required(self.name(), "r", &p.r)?;
                let g = if p.rescale_fiber {
                    construct(wp, r, &p.x0, &p.x, &p.y0, &p.y, cfg)?
                } else {
                    let (mu, nu) = integrate_product_geodesic(
                        &wp.conformal(r)?,
                        wp.g2.as_ref(),
                        &p.x0,
                        &p.x,
                        &p.y0,
                        &p.y,
                        cfg,
                    )?;
                    riemannize(wp, &mu, &nu, r, cfg)?
                };
                (g, None, None)
            }
            Mode::Target => {
                let classified = classify_riemannian(wp, &p.x0, &p.x, &p.y0, &p.y)?;
                let r = match (p.r, classified) {
                    (Some(r), _) => r,
                    (None, Some(r)) => r,
                    (None, None) => {
                        return Err(CliError::config(
                            "target tangents fail the classification inequality; no admissible r exists",
                        ))
                    }
                };
                let (xr, yr) = product_tangents_for(wp, r, &p.x0, &p.x, &p.y0, &p.y, cfg)?;
                let (mu, nu) = integrate_product_geodesic(
                    &wp.conformal(r)?,
                    wp.g2.as_ref(),
                    &p.x0,
                    &xr,
                    &p.y0,
                    &yr,
                    cfg,
                )?;
                let g = riemannize(wp, &mu, &nu, r, cfg)?;
                let (og, ot) = integrate_g_geodesic_oracle(wp, &p.x0, &p.x, &p.y0, &p.y, cfg)?;
                let gap = g.gamma.max_distance(&og)?.max(g.tau.max_distance(&ot)?);
                (g, classified, Some(gap))
            }
        };
        let d = &geodesic.diagnostics;
        let mut out = Artifacts::default();
        out.line(
            format!("task riemannize ({:?} mode, {} steps)", p.mode, cfg.steps).to_lowercase(),
        );
        out.line(format!(
            "r = {}, a_r = {}, b_r = {}",
            num(geodesic.r),
            num(geodesic.a_r),
            num(geodesic.b_r)
        ));
        out.line(format!(
            "transformed tangents X~ = {}, Y~ = {}",
            vec_text(&geodesic.x_tilde),
            vec_text(&geodesic.y_tilde)
        ));
        out.line(format!(
            "g-system residuals: base {}, fiber {}",
            num(d.residual_base),
            num(d.residual_fiber)
        ));
        out.line(format!(
            "endpoint gap {}, tangent gap {}",
            num(d.endpoint_gap),
            num(d.tangent_gap)
        ));
        if let Some(gap) = oracle_gap {
            out.line(format!("gap to direct integration {}", num(gap)));
        }
        out.json(
            "report.json",
            &RiemannizeReport {
                mode: p.mode,
                classified_r,
                oracle_gap,
                geodesic: &geodesic,
            },
        )?;
        out.curve("mu", &geodesic.mu);
        out.curve("nu", &geodesic.nu);
        out.curve("gamma", &geodesic.gamma);
        out.curve("tau", &geodesic.tau);
        out.map("phi", &geodesic.phi);
        out.map("psi", &geodesic.psi);
        Ok(out)
    }
}
