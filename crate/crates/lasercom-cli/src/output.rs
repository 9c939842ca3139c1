//! Deterministic table writers: RFC-4180 CSV with LF endings and `.`
//! decimals, JSON with stable key order. Floats are written in
//! scientific notation via the shortest round-trip formatter so a file
//! is byte-identical across runs and thread counts.

use std::io::Write;
use std::path::Path;

use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub struct CsvWriter {
    buf: Vec<u8>,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(header.join(",").as_bytes());
        buf.push(b'\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buf.extend_from_slice(fields.join(",").as_bytes());
        self.buf.push(b'\n');
    }

    pub fn write_to(self, path: &Path) -> Result<(), CliError> {
        write_bytes(path, &self.buf)
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(bytes)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("cannot encode {}: {e}", path.display())))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}
