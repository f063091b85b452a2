use serde::Serialize;
use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T> = std::result::Result<T, GeoError>;

/// Every failure the library can report.
///
/// Variants split into two families: validation problems with the caller's
/// input (see [`GeoError::is_validation`]) and numerical failures that arise
/// while integrating, shooting or root finding.
#[derive(Debug, Clone, Error, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum GeoError {
    #[error("input error: {0}")]
    Input(String),

    #[error("parameter r = {r} is not admissible (must exceed k1 = {k1})")]
    Parameter { r: f64, k1: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("cannot evaluate `{subexpr}`: {reason}")]
    Eval { subexpr: String, reason: String },

    #[error("point {point:?} is outside the domain of chart `{chart}`{}", fmt_param(*.param))]
    Domain {
        chart: String,
        point: Vec<f64>,
        param: Option<f64>,
    },

    #[error("metric matrix is singular or indefinite (condition estimate {condition:.3e})")]
    SingularMetric { condition: f64 },

    #[error("compatibility condition violated: defect {defect:.6e}")]
    Compatibility { defect: f64 },

    #[error("shooting did not converge after {iterations} iterations (best endpoint residual {residual:.3e})")]
    Shooting { iterations: usize, residual: f64 },

    #[error(
        "no bracket for target beta {target:.6e}: scanned r in [{r_min:.6e}, {r_max:.6e}], beta in [{beta_min:.6e}, {beta_max:.6e}]"
    )]
    Bracket {
        target: f64,
        r_min: f64,
        r_max: f64,
        beta_min: f64,
        beta_max: f64,
    },

    #[error("numerical error: {0}")]
    Numerical(String),
}

fn fmt_param(param: Option<f64>) -> String {
    match param {
        Some(t) => format!(" at curve parameter {t}"),
        None => String::new(),
    }
}

impl GeoError {
    /// True for errors caused by malformed or inadmissible input, as opposed
    /// to failures of a numerical procedure on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GeoError::Input(_) | GeoError::Parameter { .. } | GeoError::Parse(_)
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        GeoError::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        GeoError::Numerical(msg.into())
    }
}
