//! Result files. Everything except the timing sidecar is a pure function of the
//! configuration, so reruns produce identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Version string baked in at build time (`git describe` when available).
pub fn version() -> &'static str {
    env!("HOMFRAME_VERSION")
}

/// Identifies the run that produced a file.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    fn header_line(&self) -> String {
        format!("# homframe {} command={} config_hash={} seed={}\n", version(), self.command, self.config_hash, self.seed)
    }

    fn json(&self) -> Value {
        json!({ "version": version(), "command": self.command, "config_hash": self.config_hash, "seed": self.seed })
    }
}

/// Rows of a CSV file with a fixed header.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal form; non-finite values as `inf`, `-inf`, `nan`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// JSON number, or a string for non-finite values.
pub fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(num(v))
    }
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_csv(dir: &Path, stem: &str, prov: &Provenance, table: &Table) -> std::io::Result<PathBuf> {
    let mut buf = prov.header_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    let path = dir.join(format!("{stem}.csv"));
    write_atomic(&path, &buf)?;
    Ok(path)
}

/// Writes `{provenance, result}` as pretty JSON.
pub fn write_json(dir: &Path, stem: &str, prov: &Provenance, result: Value) -> std::io::Result<PathBuf> {
    let doc = json!({ "provenance": prov.json(), "result": result });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::other)?;
    bytes.push(b'\n');
    let path = dir.join(format!("{stem}.json"));
    write_atomic(&path, &bytes)?;
    Ok(path)
}

/// Wall time and thread count, kept apart from the deterministic outputs.
pub fn write_timing(dir: &Path, stem: &str, prov: &Provenance, seconds: f64, threads: usize) -> std::io::Result<PathBuf> {
    let doc = json!({ "provenance": prov.json(), "wall_time_s": seconds, "threads": threads });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::other)?;
    bytes.push(b'\n');
    let path = dir.join(format!("{stem}.timing.json"));
    write_atomic(&path, &bytes)?;
    Ok(path)
}
