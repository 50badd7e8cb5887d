//! Report files: JSON certificates and CSV summaries, written atomically.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::problem::{TaskOutput, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    CsvSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: String,
    pub task: String,
    pub status: String,
    pub seed: u64,
    pub certificate: Value,
    pub timings: Timings,
}

impl ReportFile {
    pub fn new(out: &TaskOutput, elapsed_ms: f64) -> Self {
        ReportFile {
            version: FORMAT_VERSION.to_string(),
            task: out.task.as_str().to_string(),
            status: out.status.clone(),
            seed: out.seed,
            certificate: out.certificate.clone(),
            timings: Timings { elapsed_ms },
        }
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(report: &ReportFile, rows: &[Vec<String>], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::CsvSummary => rows
            .iter()
            .map(|r| r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",") + "\n")
            .collect(),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit_report(report: &ReportFile, rows: &[Vec<String>], format: Format, path: &Path) -> std::io::Result<()> {
    write_atomic(path, &render(report, rows, format))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportFile {
        ReportFile {
            version: "1".into(),
            task: "fixpoint".into(),
            status: "converged".into(),
            seed: 3,
            certificate: serde_json::json!({"point": [0.1 + 0.2], "residual": 1e-300}),
            timings: Timings { elapsed_ms: 1.5 },
        }
    }

    #[test]
    fn json_round_trips_bitwise() {
        let r = sample();
        let back: ReportFile = serde_json::from_str(&render(&r, &[], Format::Json)).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.certificate["point"][0].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }

    #[test]
    fn csv_quotes_cells() {
        let rows = vec![vec!["a".into(), "b,c".into()], vec!["1".into(), "say \"x\"".into()]];
        assert_eq!(render(&sample(), &rows, Format::CsvSummary), "a,\"b,c\"\n1,\"say \"\"x\"\"\"\n");
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        std::fs::write(&p, "old").unwrap();
        emit_report(&sample(), &[], Format::Json, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"converged\""));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
