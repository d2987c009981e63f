//! CSV and JSON emitters.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use dressed_core::audit::AuditLog;

use crate::config::{Format, RunConfig};

/// Column-major numeric table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub summary: Map<String, Value>,
    pub table: Option<Table>,
    pub audit: AuditLog,
}

impl Report {
    pub fn new(command: &'static str, audit: AuditLog) -> Self {
        Self {
            command,
            summary: Map::new(),
            table: None,
            audit,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    fn default_format(&self) -> Format {
        if self.table.is_some() {
            Format::Csv
        } else {
            Format::Json
        }
    }

    pub fn meta(&self, config: &RunConfig) -> Value {
        let audit: Vec<Value> = self
            .audit
            .records
            .iter()
            .map(|r| json!({"id": r.id, "value": r.value, "anchor": r.anchor}))
            .collect();
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "audit": audit,
        })
    }

    pub fn to_json(&self, config: &RunConfig) -> Value {
        let mut data = self.summary.clone();
        if let Some(t) = &self.table {
            for (i, name) in t.columns.iter().enumerate() {
                data.insert((*name).to_string(), json!(t.column(i)));
            }
        }
        json!({"meta": self.meta(config), "data": data})
    }

    /// CSV body: the table, or a one-row table of the numeric summary fields.
    pub fn to_csv(&self) -> String {
        let owned;
        let table = match &self.table {
            Some(t) => t,
            None => {
                let numeric: Vec<(&String, f64)> = self
                    .summary
                    .iter()
                    .filter_map(|(k, v)| v.as_f64().map(|x| (k, x)))
                    .collect();
                owned = (
                    numeric.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>(),
                    numeric.iter().map(|(_, x)| *x).collect::<Vec<_>>(),
                );
                return render_csv(&owned.0, std::slice::from_ref(&owned.1));
            }
        };
        render_csv(&table.columns, &table.rows)
    }

    /// Writes the report and returns the paths written (empty for stdout).
    pub fn write(&self, config: &RunConfig) -> std::io::Result<Vec<PathBuf>> {
        let format = config.format.unwrap_or_else(|| self.default_format());
        let body = match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(config))?;
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        };
        let meta = || -> std::io::Result<String> {
            let mut m = serde_json::to_string_pretty(&json!({
                "meta": self.meta(config),
                "summary": self.summary,
            }))?;
            m.push('\n');
            Ok(m)
        };
        match &config.output {
            Some(path) => {
                std::fs::write(path, body)?;
                let mut written = vec![path.clone()];
                if format == Format::Csv {
                    let side = sidecar_path(path);
                    std::fs::write(&side, meta()?)?;
                    written.push(side);
                }
                Ok(written)
            }
            None => {
                std::io::stdout().lock().write_all(body.as_bytes())?;
                if format == Format::Csv {
                    std::io::stderr().lock().write_all(meta()?.as_bytes())?;
                }
                Ok(Vec::new())
            }
        }
    }
}

/// `out.csv` → `out.csv.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn render_csv<S: AsRef<str>>(columns: &[S], rows: &[Vec<f64>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(columns.iter().map(|c| c.as_ref())).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.11e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: usize) -> Report {
        let mut r = Report::new("potential", AuditLog::new(1.0, 0.5));
        let mut t = Table::new(&["r", "a0"]);
        for i in 0..rows {
            t.push(vec![i as f64 * 0.1, 1.0 / 3.0]);
        }
        r.table = Some(t);
        r
    }

    #[test]
    fn empty_profile_is_header_only() {
        assert_eq!(report(0).to_csv(), "r,a0\n");
    }

    #[test]
    fn csv_uses_twelve_significant_digits() {
        let csv = report(2).to_csv();
        assert_eq!(csv, "r,a0\n0.00000000000e0,3.33333333333e-1\n1.00000000000e-1,3.33333333333e-1\n");
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut r = report(3);
        r.set("tricky", 0.1 + 0.2);
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&r.to_json(&cfg)).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["data"]["tricky"].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back["data"]["a0"][1].as_f64().unwrap().to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(back["meta"]["config"]["alpha"].as_f64().unwrap(), cfg.alpha);
    }
}
