use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use warpgeo::integrate::Curve;
use warpgeo::reparam::MonotoneMap;

use crate::error::CliError;

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Files produced by a task plus the lines of its human-readable summary.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Vec<String>,
}

impl Artifacts {
    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io {
            path: name.to_string(),
            reason: e.to_string(),
        })?;
        text.push('\n');
        self.files.push((name.to_string(), text.into_bytes()));
        Ok(())
    }

    pub fn curve(&mut self, name: &str, c: &Curve) {
        self.files
            .push((format!("{name}.csv"), c.to_csv().into_bytes()));
    }

    /// `t, value, derivative` of a reparametrization map.
    pub fn map(&mut self, name: &str, m: &MonotoneMap) {
        let rows = (0..m.grid.len()).map(|i| vec![m.grid[i], m.values[i], m.derivatives[i]]);
        self.table(name, &["t", "value", "derivative"], rows);
    }

    /// Numeric CSV table; every cell printed with [`num`].
    pub fn table<I>(&mut self, name: &str, header: &[&str], rows: I)
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(num).collect();
            let _ = writeln!(text, "{}", cells.join(","));
        }
        self.files.push((format!("{name}.csv"), text.into_bytes()));
    }

    pub fn summary_text(&self) -> String {
        let mut s = self.summary.join("\n");
        s.push('\n');
        s
    }

    /// Writes every file plus `summary.txt` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<String>, CliError> {
        let io = |path: &Path, e: std::io::Error| CliError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::new();
        let summary = ("summary.txt".to_string(), self.summary_text().into_bytes());
        for (name, bytes) in self.files.iter().chain(std::iter::once(&summary)) {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| io(&path, e))?;
            written.push(name.clone());
        }
        Ok(written)
    }
}

/// Formats a vector with 17 significant digits for summaries.
pub fn vec_text(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| num(*x)).collect();
    format!("({})", cells.join(", "))
}
