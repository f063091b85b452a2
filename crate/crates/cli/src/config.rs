use std::path::{Path, PathBuf};

use serde::Deserialize;
use warpgeo::connect::ConnectConfig;
use warpgeo::integrate::IntegratorConfig;
use warpgeo::manifold::{ChartRegistry, ChartSpec};
use warpgeo::warp::{WarpField, WarpedProduct};

use crate::error::CliError;

/// Warp function text with its declared bounds `k0 ≤ k ≤ K0`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpSpec {
    pub k: String,
    pub k0: f64,
    /// Omitted when `k` is unbounded above.
    #[serde(rename = "K0")]
    pub k_sup: Option<f64>,
}

/// A parsed configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    /// Output directory; `--out` takes precedence.
    pub out: Option<PathBuf>,
    pub chart1: ChartSpec,
    pub chart2: ChartSpec,
    pub warp: WarpSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub connect: ConnectConfig,
    /// `kind` names the task; the remaining keys are its parameters.
    pub task: toml::Table,
}

impl TaskConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read `{}`: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Splits the task table into its name and parameter table.
    pub fn task_kind(&self) -> Result<(String, toml::Table), CliError> {
        let mut params = self.task.clone();
        match params.remove("kind") {
            Some(toml::Value::String(kind)) => Ok((kind, params)),
            Some(_) => Err(CliError::config("`task.kind` must be a string")),
            None => Err(CliError::config("missing `task.kind`")),
        }
    }

    /// Builds the warped product described by the chart and warp sections.
    pub fn problem(&self, charts: &ChartRegistry) -> Result<WarpedProduct, CliError> {
        let g1 = charts.build(&self.chart1)?;
        let g2 = charts.build(&self.chart2)?;
        let w = WarpField::new(&self.warp.k, g1.dim(), self.warp.k0, self.warp.k_sup)?;
        Ok(WarpedProduct::new(g1, g2, w)?)
    }
}
