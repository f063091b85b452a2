use serde::{Deserialize, Serialize};
use warpgeo::connect::{
    beta_scan, connect_points, connect_with, connector_by_name, flrw_connect, partial_connect,
    sandwich_bounds, theta_map, BetaSample, PartialConnection, SandwichBounds, ShootingReport,
    ThetaValue,
};

use super::{collect_rs, params, Context, RGridSpec, Task};
use crate::error::CliError;
use crate::output::{num, vec_text, Artifacts};

fn shooting() -> String {
    "shooting".to_string()
}

fn scan_rows(scan: &[BetaSample]) -> impl Iterator<Item = Vec<f64>> + '_ {
    scan.iter().map(|s| {
        vec![
            s.r,
            s.beta,
            s.a_r,
            s.b_r,
            s.iterations as f64,
            s.endpoint_error,
        ]
    })
}

const SCAN_HEADER: [&str; 6] = ["r", "beta", "a_r", "b_r", "iterations", "endpoint_error"];

/// Summary, report and curve files shared by `connect` and `flrw`.
fn connection_artifacts(rep: &ShootingReport, out: &mut Artifacts) {
    match rep.r {
        Some(r) => out.line(format!(
            "r0 = {}, beta = {} (target {}), {} root evaluations",
            num(r),
            num(rep.beta),
            num(rep.target_beta),
            rep.root_evaluations
        )),
        None => out.line("fiber endpoints coincide: trivial connection, no parameter r"),
    }
    out.line(format!(
        "initial tangents X_r = {}, Y_r = {}",
        vec_text(&rep.x_r),
        vec_text(&rep.y_r)
    ));
    if let Some(g) = &rep.geodesic {
        out.line(format!(
            "transformed tangents X~ = {}, Y~ = {}",
            vec_text(&g.x_tilde),
            vec_text(&g.y_tilde)
        ));
    }
    out.line(format!(
        "endpoint error {}, g-system residuals: base {}, fiber {}",
        num(rep.endpoint_error),
        num(rep.residual_base),
        num(rep.residual_fiber)
    ));
    if let Some(fi) = &rep.first_integral {
        out.line(format!(
            "first integral c = {}, {} Picard iterations, residual {}",
            num(fi.c),
            fi.picard_iterations,
            num(fi.residual)
        ));
    }
    out.curve("gamma", &rep.gamma);
    out.curve("tau", &rep.tau);
    out.table("scan", &SCAN_HEADER, scan_rows(&rep.scan));
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectParams {
    x0: Vec<f64>,
    y0: Vec<f64>,
    x1: Vec<f64>,
    y1: Vec<f64>,
    #[serde(default = "shooting")]
    connector: String,
}

/// Joins two points of `M₁ × M₂` by a geodesic of `g₁ − k·g₂`.
#[derive(Debug)]
pub struct ConnectTask;

impl Task for ConnectTask {
    fn name(&self) -> &'static str {
        "connect"
    }

    fn about(&self) -> &'static str {
        "join two points by a Riemannian geodesic, solving beta(r) = beta0"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: ConnectParams = params(self.name(), table)?;
        let connector = connector_by_name(&p.connector)?;
        let rep = connect_with(
            connector.as_ref(),
            &ctx.problem,
            &p.x0,
            &p.y0,
            &p.x1,
            &p.y1,
            &ctx.integrator,
            &ctx.connect,
        )?;
        let mut out = Artifacts::default();
        out.line(format!(
            "task connect ({} connector, {} steps)",
            p.connector, ctx.integrator.steps
        ));
        connection_artifacts(&rep, &mut out);
        out.json("report.json", &rep)?;
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlrwParams {
    t0: f64,
    t1: f64,
    y0: Vec<f64>,
    y1: Vec<f64>,
    /// Also solve with the general shooting path and report the gap in `r₀`.
    #[serde(default)]
    cross_check: bool,
}

#[derive(Debug, Serialize)]
struct FlrwReport<'a> {
    #[serde(flatten)]
    report: &'a ShootingReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    shooting_r: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_gap: Option<f64>,
}

/// Connection on a one-dimensional base using the first integral of the base equation.
#[derive(Debug)]
pub struct FlrwTask;

impl Task for FlrwTask {
    fn name(&self) -> &'static str {
        "flrw"
    }

    fn about(&self) -> &'static str {
        "connect two events of a generalized FLRW spacetime via the first integral"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: FlrwParams = params(self.name(), table)?;
        if ctx.problem.g1.dim() != 1 {
            return Err(CliError::config(
                "task `flrw` needs a one-dimensional base chart",
            ));
        }
        let (cfg, cc) = (&ctx.integrator, &ctx.connect);
        let rep = flrw_connect(&ctx.problem, p.t0, p.t1, &p.y0, &p.y1, cfg, cc)?;
        let mut out = Artifacts::default();
        out.line(format!("task flrw ({} steps)", cfg.steps));
        connection_artifacts(&rep, &mut out);
        let (mut shooting_r, mut r_gap) = (None, None);
        if p.cross_check {
            let general =
                connect_points(&ctx.problem, (&[p.t0], &p.y0), (&[p.t1], &p.y1), cfg, cc)?;
            r_gap = match (rep.r, general.r) {
                (Some(a), Some(b)) => Some((a - b).abs()),
                _ => None,
            };
            shooting_r = Some(general.r);
            if let Some(gap) = r_gap {
                out.line(format!(
                    "general shooting path agrees on r0 to {}",
                    num(gap)
                ));
            }
        }
        out.json(
            "report.json",
            &FlrwReport {
                report: &rep,
                shooting_r,
                r_gap,
            },
        )?;
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialParams {
    r: f64,
    x0: Vec<f64>,
    x: Vec<f64>,
    y0: Vec<f64>,
    y: Vec<f64>,
    alpha: f64,
    /// Query times of the correspondence map `θ_r`.
    #[serde(default)]
    theta_t: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct PartialReport<'a> {
    partial: &'a PartialConnection,
    theta: &'a [ThetaValue],
}

/// Endpoints reachable from `(x₀, y₀)` along the base geodesic of length `α`.
#[derive(Debug)]
pub struct PartialConnectTask;

impl Task for PartialConnectTask {
    fn name(&self) -> &'static str {
        "partial-connect"
    }

    fn about(&self) -> &'static str {
        "compute the fiber parameters +-beta joined to a base geodesic of length alpha"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: PartialParams = params(self.name(), table)?;
        let (wp, cfg) = (&ctx.problem, &ctx.integrator);
        let pc = partial_connect(wp, p.r, &p.x0, &p.x, &p.y0, &p.y, p.alpha, cfg)?;
        let theta = p
            .theta_t
            .iter()
            .map(|&t| theta_map(wp, p.r, &p.x0, &p.x, &p.y0, &p.y, t, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Artifacts::default();
        out.line(format!("task partial-connect ({} steps)", cfg.steps));
        out.line(format!(
            "alpha = {}, r = {}: beta = +-{}, a_r = {}, b_r = {}",
            num(pc.alpha),
            num(pc.r),
            num(pc.beta_plus),
            num(pc.a_r),
            num(pc.b_r)
        ));
        for (tag, g) in [("+", &pc.plus), ("-", &pc.minus)] {
            let d = &g.diagnostics;
            out.line(format!(
                "{tag}beta geodesic: end {} x {}, residuals base {}, fiber {}",
                vec_text(g.gamma.end()),
                vec_text(g.tau.end()),
                num(d.residual_base),
                num(d.residual_fiber)
            ));
        }
        for th in &theta {
            out.line(format!(
                "theta({}) = {}, beta {}, linear-form discrepancy {}",
                num(th.t),
                vec_text(&th.point),
                num(th.beta),
                num(th.linear_discrepancy)
            ));
        }
        out.json(
            "report.json",
            &PartialReport {
                partial: &pc,
                theta: &theta,
            },
        )?;
        out.curve("plus_gamma", &pc.plus.gamma);
        out.curve("plus_tau", &pc.plus.tau);
        out.curve("minus_gamma", &pc.minus.gamma);
        out.curve("minus_tau", &pc.minus.tau);
        if !theta.is_empty() {
            let n = theta[0].point.len();
            let mut header = vec![
                "t".to_string(),
                "beta".to_string(),
                "beta_linear".to_string(),
            ];
            header.extend((1..=n).map(|i| format!("y{i}")));
            header.extend((1..=n).map(|i| format!("linear_y{i}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = theta.iter().map(|th| {
                let mut row = vec![th.t, th.beta, th.beta_linear];
                row.extend(&th.point);
                row.extend(&th.linear_point);
                row
            });
            out.table("theta", &header, rows);
        }
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaScanParams {
    x0: Vec<f64>,
    x1: Vec<f64>,
    #[serde(default)]
    rs: Vec<f64>,
    r_grid: Option<RGridSpec>,
    #[serde(default = "shooting")]
    connector: String,
    /// Also evaluate the two-sided bound on `β²` at every parameter.
    #[serde(default)]
    sandwich: bool,
}

#[derive(Debug, Serialize)]
struct BetaScanReport<'a> {
    connector: &'a str,
    samples: &'a [BetaSample],
    strictly_decreasing: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sandwich: Vec<SandwichBounds>,
}

/// Tabulates `β(r)` over a parameter grid.
#[derive(Debug)]
pub struct BetaScanTask;

impl Task for BetaScanTask {
    fn name(&self) -> &'static str {
        "beta-scan"
    }

    fn about(&self) -> &'static str {
        "tabulate the shooting function beta(r) over a parameter grid"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: BetaScanParams = params(self.name(), table)?;
        let rs = collect_rs(ctx, &p.rs, p.r_grid)?;
        let connector = connector_by_name(&p.connector)?;
        let (wp, cfg, cc) = (&ctx.problem, &ctx.integrator, &ctx.connect);
        let samples = beta_scan(connector.as_ref(), wp, &p.x0, &p.x1, &rs, cfg, cc)?;
        let mut sorted: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.beta)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let strictly_decreasing = sorted
            .windows(2)
            .all(|w| w[0].0 == w[1].0 || w[1].1 < w[0].1);
        let sandwich = if p.sandwich {
            rs.iter()
                .map(|&r| sandwich_bounds(wp, &p.x0, &p.x1, r, cfg, cc))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        let mut out = Artifacts::default();
        out.line(format!(
            "task beta-scan ({} connector, {} parameters, {} steps)",
            p.connector,
            rs.len(),
            cfg.steps
        ));
        for s in &samples {
            out.line(format!(
                "r = {}: beta = {}, endpoint error {}",
                num(s.r),
                num(s.beta),
                num(s.endpoint_error)
            ));
        }
        out.line(format!(
            "beta strictly decreasing in r: {strictly_decreasing}"
        ));
        if p.sandwich {
            let ok = sandwich.iter().all(|b| b.lower_holds && b.upper_holds);
            out.line(format!("sandwich bounds hold at every parameter: {ok}"));
        }
        out.table("beta", &SCAN_HEADER, scan_rows(&samples));
        out.json(
            "report.json",
            &BetaScanReport {
                connector: &p.connector,
                samples: &samples,
                strictly_decreasing,
                sandwich,
            },
        )?;
        Ok(out)
    }
}
