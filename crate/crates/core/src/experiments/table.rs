//! Numeric result tables and their CSV form.
//!
//! ```text
//! # experiment: hitcdf
//! # panel: summary
//! # config_sha256: 3f1c...
//! # seed: 1
//! # version: fskjcr 0.1.0
//! gamma2,mean_l0,...
//! 0.0001,287.3,...
//! ```
//!
//! Values use Rust's shortest round-trip `f64` formatting, so parsing a file
//! back gives the exact numbers. Wall-clock time is kept out of the CSV (see
//! the JSON manifest) so reruns are byte-identical.

use crate::error::Error;
use crate::Result;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub panel: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Extra `# key: value` lines, written in order.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(experiment: &str, panel: &str, columns: Vec<String>) -> Self {
        Self {
            experiment: experiment.into(),
            panel: panel.into(),
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "{}_{}: row has {} values for {} columns",
                self.experiment,
                self.panel,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.csv", self.experiment, self.panel)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# experiment: {}\n# panel: {}\n", self.experiment, self.panel);
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("csv: {msg}"));
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(c) = line.strip_prefix('#') {
                let (k, v) = c.trim().split_once(':').ok_or_else(|| bad(format!("line {}: malformed comment", n + 1)))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row = line
                        .split(',')
                        .map(|s| s.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 1))))
                        .collect::<Result<Vec<_>>>()?;
                    if row.len() != cols.len() {
                        return Err(bad(format!("line {}: {} cells for {} columns", n + 1, row.len(), cols.len())));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| bad("no header row".into()))?;
        let take = |key: &str, meta: &mut Vec<(String, String)>| {
            let i = meta.iter().position(|(k, _)| k == key)?;
            Some(meta.remove(i).1)
        };
        let experiment = take("experiment", &mut meta).ok_or_else(|| bad("no experiment line".into()))?;
        let panel = take("panel", &mut meta).ok_or_else(|| bad("no panel line".into()))?;
        Ok(Self {
            experiment,
            panel,
            columns,
            rows,
            metadata: meta,
        })
    }

    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }
}
