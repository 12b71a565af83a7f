//! Report files: CSV tables and JSON documents, both carrying the resolved config and version.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

pub const VERSION: &str = concat!("beurling ", env!("CARGO_PKG_VERSION"));

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BEURLING_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RunError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ErrorKind::Config => "config error",
            ErrorKind::Numerical => "numerical failure",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

impl From<beurling::Error> for RunError {
    fn from(e: beurling::Error) -> Self {
        let kind = if e.is_numerical() { ErrorKind::Numerical } else { ErrorKind::Config };
        Self { kind, message: e.to_string() }
    }
}

/// Shortest round-trip form of a float.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Table { header: Vec<&'static str>, rows: Vec<Vec<String>> },
    Json(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub pass: bool,
    pub summary: String,
    pub body: Body,
}

impl Report {
    pub fn extension(&self) -> &'static str {
        match self.body {
            Body::Table { .. } => "csv",
            Body::Json(_) => "json",
        }
    }

    pub fn default_file_name(&self) -> String {
        format!("{}.{}", self.command, self.extension())
    }

    /// File contents. For tables only the first line depends on `generated_unix`.
    pub fn render(&self, generated_unix: u64) -> String {
        match &self.body {
            Body::Table { header, rows } => {
                let mut s = format!(
                    "# generated_unix={generated_unix}\n# version={VERSION}\n# command={}\n# config={}\n{}\n",
                    self.command,
                    self.config,
                    header.join(",")
                );
                for r in rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
            Body::Json(v) => {
                let doc = json!({
                    "generated_unix": generated_unix,
                    "version": VERSION,
                    "command": self.command,
                    "config": self.config,
                    "pass": self.pass,
                    "summary": self.summary,
                    "report": v,
                });
                serde_json::to_string_pretty(&doc).unwrap() + "\n"
            }
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .map_err(|e| RunError::config(format!("out: cannot create {}: {e}", dir.display())))?;
        }
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        std::fs::write(path, self.render(now))
            .map_err(|e| RunError::config(format!("out: cannot write {}: {e}", path.display())))
    }
}

/// Output directory from the environment, or the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Drops the timestamp line of a rendered CSV file.
pub fn csv_body(contents: &str) -> &str {
    match contents.split_once('\n') {
        Some((first, rest)) if first.starts_with("# generated_unix=") => rest,
        _ => contents,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = Report {
            command: "demo".into(),
            config: json!({"a": 1}),
            pass: true,
            summary: String::new(),
            body: Body::Table { header: vec!["x", "y"], rows: vec![vec![num(0.1), num(1e-20)]] },
        };
        let a = r.render(1);
        let b = r.render(2);
        assert_ne!(a, b);
        assert_eq!(csv_body(&a), csv_body(&b));
        assert!(a.ends_with("x,y\n0.1,1e-20\n"));
        assert!(a.contains("# config={\"a\":1}"));
        assert_eq!(r.default_file_name(), "demo.csv");
    }
}
