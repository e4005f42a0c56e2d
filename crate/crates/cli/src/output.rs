use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

/// Rectangular table of reals with run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub config: Value,
    /// Known inconsistencies between the formulas used, plus runtime notes.
    pub flags: Vec<String>,
}

impl ResultTable {
    pub fn new(command: &str, columns: Vec<String>, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            columns,
            rows: Vec::new(),
            config: serde_json::to_value(config).expect("config serializes"),
            flags: Vec::new(),
        }
    }

    pub fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    fn metadata(&self) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "columns": self.columns,
            "flags": self.flags,
            "config": self.config,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# tool: {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        );
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config: {}", self.config);
        let flags = if self.flags.is_empty() {
            "none".to_string()
        } else {
            self.flags.join(";")
        };
        let _ = writeln!(out, "# flags: {flags}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        (
                            c.clone(),
                            serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                        )
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": self.metadata(), "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> anyhow::Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                }
                std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let mut t = ResultTable::new("tube", vec!["a".into(), "b".into()], &RunConfig::default());
        t.rows.push(vec![0.1, -10.0]);
        t.rows.push(vec![f64::NAN, 1e-300]);
        t.flag("x");
        t.flag("x");
        t
    }

    #[test]
    fn csv_has_metadata_header_and_fixed_precision() {
        let csv = table().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# tool: "));
        assert_eq!(lines[3], "# flags: x");
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "1.0000000000000001e-1,-1.0000000000000000e1");
        assert_eq!(lines[6], "NaN,1.0000000000000000e-300");
    }

    #[test]
    fn json_rows_are_objects() {
        let v: Value = serde_json::from_str(&table().to_json()).unwrap();
        assert_eq!(v["rows"][0]["b"], json!(-10.0));
        assert_eq!(v["rows"][1]["a"], Value::Null);
        assert_eq!(v["metadata"]["command"], json!("tube"));
        assert_eq!(v["metadata"]["config"]["r0"], json!(0.1));
    }
}
