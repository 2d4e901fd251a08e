//! Tabular output: comma-separated data files with a '#'-prefixed
//! metadata header carrying the artifact version and the fully resolved
//! configuration, so any file can be reproduced from its own header.
//! Floats are written with Rust's shortest round-trip formatting, which
//! keeps reruns bit-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::ResolvedConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sorted key = value lines for the resolved configuration.
pub fn metadata_lines(cfg: &ResolvedConfig) -> Vec<String> {
    let value = serde_json::to_value(cfg).expect("config serializes");
    let obj = value.as_object().expect("config is an object");
    let mut keys: Vec<&String> = obj.keys().collect();
    keys.sort();
    keys.iter()
        .map(|k| {
            let v = &obj[k.as_str()];
            let rendered = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => "none".to_string(),
                other => other.to_string(),
            };
            format!("{k} = {rendered}")
        })
        .collect()
}

pub struct TableWriter {
    out_dir: PathBuf,
    header: Vec<String>,
}

impl TableWriter {
    pub fn new(out_dir: &Path, cfg: &ResolvedConfig) -> std::io::Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        let mut header = vec![format!("gauge-transfer {VERSION}")];
        header.extend(metadata_lines(cfg));
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            header,
        })
    }

    /// Write one CSV table with the metadata header. Rows are written in
    /// the iterator's order.
    pub fn write_table<I>(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: I,
    ) -> std::io::Result<PathBuf>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let path = self.out_dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        for line in &self.header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", columns.join(","))?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let mut first = true;
            for v in row {
                if !first {
                    write!(w, ",")?;
                }
                write!(w, "{v}")?;
                first = false;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Write the machine-readable summary (carries the timestamp; data
    /// files stay timestamp-free so reruns are bit-identical).
    pub fn write_summary(
        &mut self,
        name: &str,
        cfg: &ResolvedConfig,
        results: serde_json::Value,
    ) -> std::io::Result<PathBuf> {
        let path = self.out_dir.join(name);
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let doc = serde_json::json!({
            "artifact": "gauge-transfer",
            "version": VERSION,
            "unix_time": unix_time,
            "config": cfg,
            "results": results,
        });
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }
}
