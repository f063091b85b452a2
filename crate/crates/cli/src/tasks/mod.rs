use std::collections::BTreeMap;
use std::fmt;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use warpgeo::connect::{r_grid, ConnectConfig};
use warpgeo::integrate::IntegratorConfig;
use warpgeo::warp::WarpedProduct;

use crate::error::CliError;
use crate::output::Artifacts;

mod connection;
mod curvature;
mod geodesic;

pub use connection::{BetaScanTask, ConnectTask, FlrwTask, PartialConnectTask};
pub use curvature::CurvatureScanTask;
pub use geodesic::{IntegrateTask, RiemannizeTask};

/// Everything a task needs besides its own parameters.
#[derive(Debug, Clone)]
pub struct Context {
    pub problem: WarpedProduct,
    pub integrator: IntegratorConfig,
    pub connect: ConnectConfig,
}

/// A unit of work selectable by `task.kind`.
pub trait Task: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    fn run(&self, ctx: &Context, params: toml::Table) -> Result<Artifacts, CliError>;
}

/// Name → task table.
#[derive(Debug, Default)]
pub struct TaskRegistry {
    tasks: BTreeMap<&'static str, Box<dyn Task>>,
}

impl TaskRegistry {
    pub fn empty() -> Self {
        TaskRegistry::default()
    }

    pub fn with_builtins() -> Self {
        let mut reg = TaskRegistry::empty();
        reg.register(Box::new(IntegrateTask));
        reg.register(Box::new(RiemannizeTask));
        reg.register(Box::new(ConnectTask));
        reg.register(Box::new(PartialConnectTask));
        reg.register(Box::new(FlrwTask));
        reg.register(Box::new(CurvatureScanTask));
        reg.register(Box::new(BetaScanTask));
        reg
    }

    /// Adds or replaces a task under its own name.
    pub fn register(&mut self, task: Box<dyn Task>) {
        self.tasks.insert(task.name(), task);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Task, CliError> {
        self.tasks.get(name).map(|t| t.as_ref()).ok_or_else(|| {
            let known: Vec<&str> = self.tasks.keys().copied().collect();
            CliError::config(format!(
                "unknown task `{name}` (known: {})",
                known.join(", ")
            ))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Task> {
        self.tasks.values().map(|t| t.as_ref())
    }
}

/// Deserializes a task's parameter table, rejecting unknown keys.
pub fn params<T: DeserializeOwned>(task: &str, table: toml::Table) -> Result<T, CliError> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(format!("task `{task}`: {}", e.message())))
}

/// Geometric parameter grid in `r − k1` ending at `r_max`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RGridSpec {
    pub n: usize,
    pub r_max: f64,
}

/// Explicit parameters followed by an optional generated grid.
pub fn collect_rs(
    ctx: &Context,
    explicit: &[f64],
    grid: Option<RGridSpec>,
) -> Result<Vec<f64>, CliError> {
    let mut rs = explicit.to_vec();
    if let Some(g) = grid {
        rs.extend(r_grid(ctx.problem.range(), g.n, g.r_max)?);
    }
    Ok(rs)
}
