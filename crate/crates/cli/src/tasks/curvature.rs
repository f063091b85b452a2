use serde::{Deserialize, Serialize};
use warpgeo::warp::{curvature_scan, CurvatureSample};

use super::{collect_rs, params, Context, RGridSpec, Task};
use crate::error::CliError;
use crate::output::{num, Artifacts};

/// `n` samples of one coordinate, uniform or geometric.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
    #[serde(default)]
    log: bool,
}

impl Axis {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.n == 0
            || !(self.lo.is_finite() && self.hi.is_finite())
            || (self.log && !(self.lo > 0.0 && self.hi > 0.0))
        {
            return Err(CliError::config(format!(
                "axis [{}, {}] with {} samples is invalid (geometric axes need positive ends)",
                self.lo, self.hi, self.n
            )));
        }
        let at = |i: usize| {
            if self.n == 1 {
                0.0
            } else {
                i as f64 / (self.n - 1) as f64
            }
        };
        Ok((0..self.n)
            .map(|i| match self.log {
                false => self.lo + (self.hi - self.lo) * at(i),
                true => self.lo * (self.hi / self.lo).powf(at(i)),
            })
            .collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvatureParams {
    #[serde(default)]
    points: Vec<Vec<f64>>,
    /// One axis per base coordinate; their product is appended to `points`.
    #[serde(default)]
    axes: Vec<Axis>,
    #[serde(default)]
    rs: Vec<f64>,
    r_grid: Option<RGridSpec>,
    #[serde(default = "default_angles")]
    angles: usize,
}

fn default_angles() -> usize {
    8
}

#[derive(Debug, Serialize)]
struct CurvatureReport {
    points: usize,
    parameters: Vec<f64>,
    planes: usize,
    max_curvature: f64,
    min_curvature: f64,
    all_negative: bool,
    /// Smallest margin of the Hessian inequality; positive means it holds at every sample.
    min_margin: f64,
    hessian_inequality_holds: bool,
}

fn grid_points(axes: &[Axis]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut pts = vec![Vec::new()];
    for a in axes {
        let vals = a.values()?;
        pts = pts
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    Ok(pts)
}

/// Samples the sectional curvature of `G_r` over points, parameters and planes.
#[derive(Debug)]
pub struct CurvatureScanTask;

impl Task for CurvatureScanTask {
    fn name(&self) -> &'static str {
        "curvature-scan"
    }

    fn about(&self) -> &'static str {
        "sample the sectional curvature K_r of G_r and the Hessian inequality"
    }

    fn run(&self, ctx: &Context, table: toml::Table) -> Result<Artifacts, CliError> {
        let p: CurvatureParams = params(self.name(), table)?;
        let wp = &ctx.problem;
        let n = wp.g1.dim();
        let mut points = p.points.clone();
        if !p.axes.is_empty() {
            if p.axes.len() != n {
                return Err(CliError::config(format!(
                    "`axes` needs one entry per base coordinate ({n})"
                )));
            }
            points.extend(grid_points(&p.axes)?);
        }
        let rs = collect_rs(ctx, &p.rs, p.r_grid)?;
        wp.warp.validate_bounds(points.iter().map(Vec::as_slice))?;
        let samples = curvature_scan(wp.g1.as_ref(), &wp.warp, &points, &rs, p.angles)?;
        let fold = |init: f64, f: fn(f64, f64) -> f64, pick: fn(&CurvatureSample) -> f64| {
            samples.iter().map(pick).fold(init, f)
        };
        let max_curvature = fold(f64::NEG_INFINITY, f64::max, |s| s.curvature);
        let report = CurvatureReport {
            points: points.len(),
            parameters: rs.clone(),
            planes: samples.len(),
            max_curvature,
            min_curvature: fold(f64::INFINITY, f64::min, |s| s.curvature),
            all_negative: max_curvature < 0.0,
            min_margin: fold(f64::INFINITY, f64::min, |s| s.margin),
            hessian_inequality_holds: samples.iter().all(|s| s.margin > 0.0),
        };
        let mut out = Artifacts::default();
        out.line(format!(
            "task curvature-scan ({} points, {} parameters, {} planes)",
            report.points,
            rs.len(),
            report.planes
        ));
        out.line(format!(
            "K_r in [{}, {}]; all negative: {}",
            num(report.min_curvature),
            num(report.max_curvature),
            report.all_negative
        ));
        out.line(format!(
            "Hessian inequality margin >= {}; holds everywhere: {}",
            num(report.min_margin),
            report.hessian_inequality_holds
        ));
        let mut header = Vec::new();
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("r".into());
        header.extend((1..=n).map(|i| format!("e1_{i}")));
        header.extend((1..=n).map(|i| format!("e2_{i}")));
        header.extend(["base_curvature", "curvature", "margin"].map(String::from));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = samples.iter().map(|s| {
            let mut row = s.point.clone();
            row.push(s.r);
            row.extend(&s.e1);
            row.extend(&s.e2);
            row.extend([s.base_curvature, s.curvature, s.margin]);
            row
        });
        out.table("curvature", &header, rows);
        out.json("report.json", &report)?;
        Ok(out)
    }
}
