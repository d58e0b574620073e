use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// Round-trip formatting used in every output file.
pub fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

/// Comma-separated table with `#` header comments.
pub struct Table {
    comments: Vec<String>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { comments: Vec::new(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<()> {
        let mut buf = String::new();
        for c in &self.comments {
            buf.push_str("# ");
            buf.push_str(c);
            buf.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        buf.push_str(std::str::from_utf8(&w.into_inner()?)?);
        let path = dir.join(name);
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))
    }
}

/// One structured `key = value` record per run.
#[derive(Default)]
pub struct Summary {
    lines: Vec<(String, String)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.put(key, fmt(value));
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("summary.txt");
        fs::write(&path, self.text()).with_context(|| format!("writing {}", path.display()))
    }
}
