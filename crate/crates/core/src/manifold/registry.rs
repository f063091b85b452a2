use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::charts::{Circle, Euclidean, PoincareBall, PoincareHalfPlane, Sphere, WeightedLine};
use super::MetricChart;
use crate::error::{GeoError, Result};

/// A chart parameter as it appears in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

/// Chart selection: a registered name plus free-form parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub name: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, ParamValue>,
}

impl ChartSpec {
    pub fn new(name: impl Into<String>) -> Self {
        ChartSpec {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn number(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(ParamValue::Number(x)) => Ok(*x),
            Some(ParamValue::Text(_)) => Err(GeoError::input(format!(
                "chart `{}`: parameter `{key}` must be a number",
                self.name
            ))),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.number(key, default)?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(GeoError::input(format!(
                "chart `{}`: parameter `{key}` must be positive, got {x}",
                self.name
            )))
        }
    }

    pub fn dimension(&self, default: usize) -> Result<usize> {
        let x = self.number("dim", default as f64)?;
        if x >= 1.0 && x.fract() == 0.0 && x <= 64.0 {
            Ok(x as usize)
        } else {
            Err(GeoError::input(format!(
                "chart `{}`: `dim` must be a positive integer, got {x}",
                self.name
            )))
        }
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        match self.params.get(key) {
            Some(ParamValue::Text(s)) => Ok(s),
            _ => Err(GeoError::input(format!(
                "chart `{}`: missing string parameter `{key}`",
                self.name
            ))),
        }
    }
}

pub type ChartFactory = fn(&ChartSpec) -> Result<Arc<dyn MetricChart>>;

/// Name → constructor table for charts selectable from configuration.
#[derive(Debug, Clone, Default)]
pub struct ChartRegistry {
    factories: BTreeMap<String, ChartFactory>,
}

impl ChartRegistry {
    pub fn empty() -> Self {
        ChartRegistry::default()
    }

    pub fn with_builtins() -> Self {
        let mut reg = ChartRegistry::empty();
        reg.register("euclidean", |s| {
            Ok(Arc::new(Euclidean::new(s.dimension(1)?)))
        });
        reg.register("poincare_half_plane", |_| Ok(Arc::new(PoincareHalfPlane)));
        reg.register("poincare_ball", |s| {
            Ok(Arc::new(PoincareBall::new(s.dimension(2)?)))
        });
        reg.register("sphere", |s| {
            Ok(Arc::new(Sphere::new(
                s.dimension(2)?,
                s.positive("radius", 1.0)?,
            )))
        });
        reg.register("circle", |s| {
            Ok(Arc::new(Circle::new(s.positive("radius", 1.0)?)))
        });
        reg.register("weighted_line", |s| {
            Ok(Arc::new(WeightedLine::parse(s.text("weight")?)?))
        });
        reg
    }

    /// Adds or replaces a factory.
    pub fn register(&mut self, name: &str, factory: ChartFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &ChartSpec) -> Result<Arc<dyn MetricChart>> {
        let factory = self.factories.get(&spec.name).ok_or_else(|| {
            GeoError::input(format!(
                "unknown chart `{}` (known: {})",
                spec.name,
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_every_builtin() {
        let reg = ChartRegistry::with_builtins();
        let specs = [
            ChartSpec::new("euclidean").with("dim", ParamValue::Number(3.0)),
            ChartSpec::new("poincare_half_plane"),
            ChartSpec::new("poincare_ball"),
            ChartSpec::new("sphere").with("radius", ParamValue::Number(2.0)),
            ChartSpec::new("circle"),
            ChartSpec::new("weighted_line").with("weight", ParamValue::Text("2 + sin(t)".into())),
        ];
        let dims: Vec<usize> = specs.iter().map(|s| reg.build(s).unwrap().dim()).collect();
        assert_eq!(dims, vec![3, 2, 2, 2, 1, 1]);
    }

    #[test]
    fn rejects_bad_specs() {
        let reg = ChartRegistry::with_builtins();
        for spec in [
            ChartSpec::new("torus"),
            ChartSpec::new("euclidean").with("dim", ParamValue::Number(1.5)),
            ChartSpec::new("sphere").with("radius", ParamValue::Number(-1.0)),
            ChartSpec::new("weighted_line"),
            ChartSpec::new("weighted_line").with("weight", ParamValue::Text("1 +".into())),
        ] {
            assert!(reg.build(&spec).unwrap_err().is_validation(), "{spec:?}");
        }
    }

    #[test]
    fn custom_factories_can_be_registered() {
        let mut reg = ChartRegistry::empty();
        reg.register("plane", |_| Ok(Arc::new(Euclidean::new(2))));
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["plane"]);
        assert_eq!(reg.build(&ChartSpec::new("plane")).unwrap().dim(), 2);
    }
}
